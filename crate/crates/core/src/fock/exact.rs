//! Exact arithmetic for ladder-operator matrices.
//!
//! Ladder matrix entries are square roots of integers. Floating-point
//! products of those roots are not exact (`fl(√2)·fl(√2) != 2`), so the
//! commutator and number operator are assembled here over integer
//! combinations of square-free radicals and rounded only once, at the end.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::matrix::CMatrix;

/// `Σ c_r √r` with square-free radicands `r` and integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Surd(BTreeMap<u64, i64>);

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Split `n = s^2 r` with `r` square-free.
fn square_free(n: u64) -> (u64, u64) {
    let (mut s, mut r) = (1, n);
    let mut k = 2;
    while k * k <= r {
        while r % (k * k) == 0 {
            r /= k * k;
            s *= k;
        }
        k += 1;
    }
    (s, r)
}

impl Surd {
    pub fn zero() -> Self {
        Surd::default()
    }

    pub fn integer(c: i64) -> Self {
        Surd::zero().plus_term(1, c)
    }

    /// `√n`
    pub fn sqrt(n: u64) -> Self {
        if n == 0 {
            return Surd::zero();
        }
        let (s, r) = square_free(n);
        Surd::zero().plus_term(r, s as i64)
    }

    fn plus_term(mut self, radicand: u64, coeff: i64) -> Self {
        let c = self.0.entry(radicand).or_insert(0);
        *c += coeff;
        if *c == 0 {
            self.0.remove(&radicand);
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// The integer value, when there are no irrational parts.
    pub fn as_integer(&self) -> Option<i64> {
        match self.0.len() {
            0 => Some(0),
            1 => self.0.get(&1).copied(),
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        other.0.iter().fold(self.clone(), |acc, (&r, &c)| acc.plus_term(r, c))
    }

    pub fn neg(&self) -> Self {
        Surd(self.0.iter().map(|(&r, &c)| (r, -c)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Surd::zero();
        for (&r1, &c1) in &self.0 {
            for (&r2, &c2) in &other.0 {
                // r1, r2 square-free: √r1 √r2 = g √(r1 r2 / g^2), g = gcd.
                let g = gcd(r1, r2);
                out = out.plus_term((r1 / g) * (r2 / g), c1 * c2 * g as i64);
            }
        }
        out
    }

    /// Nearest double for single-term surds; otherwise a sum of rounded terms.
    pub fn to_f64(&self) -> f64 {
        if self.0.len() == 1 {
            let (&r, &c) = self.0.iter().next().unwrap();
            let sq = (c as f64) * (c as f64) * r as f64;
            return sq.sqrt().copysign(c as f64);
        }
        self.0.iter().map(|(&r, &c)| c as f64 * (r as f64).sqrt()).sum()
    }
}

/// Sparse square matrix of real surds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurdMatrix {
    dim: usize,
    entries: BTreeMap<(usize, usize), Surd>,
}

impl SurdMatrix {
    pub fn zeros(dim: usize) -> Self {
        SurdMatrix { dim, entries: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn set(&mut self, i: usize, j: usize, value: Surd) {
        assert!(i < self.dim && j < self.dim);
        if value.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), value);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Surd {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    /// `a|n> = √n |n-1>`
    pub fn lowering(dim: usize) -> Self {
        let mut m = SurdMatrix::zeros(dim);
        for n in 1..dim {
            m.set(n - 1, n, Surd::sqrt(n as u64));
        }
        m
    }

    /// `a†|n> = √(n+1) |n+1>`, truncated at the top state.
    pub fn raising(dim: usize) -> Self {
        SurdMatrix::lowering(dim).transpose()
    }

    pub fn transpose(&self) -> Self {
        SurdMatrix { dim: self.dim, entries: self.entries.iter().map(|(&(i, j), v)| ((j, i), v.clone())).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (&(i, j), v) in &other.entries {
            let cur = out.get(i, j);
            out.set(i, j, cur.sub(v));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut acc: BTreeMap<(usize, usize), Surd> = BTreeMap::new();
        for (&(i, k), a) in &self.entries {
            for (&(_, j), b) in other.entries.range((k, 0)..(k + 1, 0)) {
                let e = acc.entry((i, j)).or_default();
                *e = e.add(&a.mul(b));
            }
        }
        let mut out = SurdMatrix::zeros(self.dim);
        for ((i, j), v) in acc {
            out.set(i, j, v);
        }
        out
    }

    pub fn to_cmatrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim);
        for (&(i, j), v) in &self.entries {
            m[(i, j)] = C64::new(v.to_f64(), 0.0);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radicals_reduce() {
        assert_eq!(Surd::sqrt(8), Surd::zero().plus_term(2, 2));
        assert_eq!(Surd::sqrt(9).as_integer(), Some(3));
        assert_eq!(Surd::sqrt(2).mul(&Surd::sqrt(2)).as_integer(), Some(2));
        assert_eq!(Surd::sqrt(6).mul(&Surd::sqrt(10)), Surd::sqrt(60));
        assert_eq!(Surd::sqrt(3).sub(&Surd::sqrt(3)), Surd::zero());
        assert_eq!(Surd::sqrt(5).as_integer(), None);
    }

    #[test]
    fn float_products_of_roots_are_not_exact() {
        // Why the ladder products go through this module.
        let r = 2.0_f64.sqrt();
        assert_ne!(r * r, 2.0);
        assert_eq!(Surd::sqrt(2).mul(&Surd::sqrt(2)).to_f64(), 2.0);
    }

    #[test]
    fn number_operator_is_diagonal_integers() {
        let dim = 9;
        let n = SurdMatrix::raising(dim).mul(&SurdMatrix::lowering(dim));
        for i in 0..dim {
            for j in 0..dim {
                let expect = if i == j { i as i64 } else { 0 };
                assert_eq!(n.get(i, j).as_integer(), Some(expect));
            }
        }
    }
}
