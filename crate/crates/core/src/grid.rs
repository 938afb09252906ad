//! Uniform 1D grids, sampled wavefunctions and quadrature.
//!
//! Closed grids include both endpoints and integrate with the composite
//! trapezoidal rule. Periodic grids identify `b` with `a`, drop the last
//! point and use uniform weights.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::operator::LinearOperator;

/// Tolerance on the quadrature norm of a wavefunction tagged as normalized.
pub const NORMALIZED_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Topology {
    Closed,
    Periodic,
}

impl Topology {
    pub fn name(self) -> &'static str {
        match self {
            Topology::Closed => "closed",
            Topology::Periodic => "periodic",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Immutable uniform mesh on `[a, b]` (closed) or `[a, b)` (periodic).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
    topology: Topology,
}

/// Build a uniform grid with `n` points.
pub fn make_uniform_grid(a: f64, b: f64, n: usize, topology: Topology) -> Result<Grid> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("grid endpoints must be finite, got [{a}, {b}]")));
    }
    if b <= a {
        return Err(Error::Domain(format!("grid requires b > a, got a = {a}, b = {b}")));
    }
    if n < 3 {
        return Err(Error::Domain(format!("grid requires at least 3 points, got {n}")));
    }
    let cells = match topology {
        Topology::Closed => n - 1,
        Topology::Periodic => n,
    };
    let h = (b - a) / cells as f64;
    Ok(Grid { a, b, n, h, topology })
}

impl Grid {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn x(&self, i: usize) -> f64 {
        self.a + i as f64 * self.h
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Quadrature weights: trapezoidal on closed grids, uniform on periodic ones.
    pub fn weights(&self) -> Vec<f64> {
        let mut w = vec![self.h; self.n];
        if self.topology == Topology::Closed {
            w[0] = 0.5 * self.h;
            w[self.n - 1] = 0.5 * self.h;
        }
        w
    }

    /// Quadrature of real samples.
    pub fn integrate(&self, samples: &[f64]) -> f64 {
        assert_eq!(samples.len(), self.n);
        self.weights().iter().zip(samples).map(|(w, s)| w * s).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// Samples as given; no normalization over the grid.
    UnitAmplitude,
    /// Quadrature norm is one.
    L2Normalized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction {
    grid: Grid,
    values: Vec<C64>,
    convention: Convention,
}

impl Wavefunction {
    pub fn new(grid: Grid, values: Vec<C64>, convention: Convention) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::DimensionMismatch { expected: grid.n(), found: values.len() });
        }
        let psi = Wavefunction { grid, values, convention };
        if convention == Convention::L2Normalized {
            let norm = psi.norm();
            if (norm - 1.0).abs() > NORMALIZED_TOL {
                return Err(Error::Domain(format!("wavefunction tagged normalized has norm {norm}")));
            }
        }
        Ok(psi)
    }

    /// Sample `f` at every grid point, without normalization.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> C64) -> Self {
        let values = grid.points().into_iter().map(f).collect();
        Wavefunction { grid, values, convention: Convention::UnitAmplitude }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn norm(&self) -> f64 {
        let sq: f64 = self.grid.weights().iter().zip(&self.values).map(|(w, v)| w * v.norm_sqr()).sum();
        sq.sqrt()
    }

    pub(crate) fn with_values(&self, values: Vec<C64>) -> Self {
        Wavefunction { grid: self.grid, values, convention: Convention::UnitAmplitude }
    }
}

/// Free-particle state `A exp(i (p x - E t) / hbar)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneWaveParams {
    pub amplitude: C64,
    pub p: f64,
    pub energy: f64,
    pub t: f64,
    pub hbar: f64,
}

impl PlaneWaveParams {
    /// Unit amplitude, `E = t = 0`, `hbar = 1`.
    pub fn with_momentum(p: f64) -> Self {
        PlaneWaveParams { amplitude: C64::new(1.0, 0.0), p, energy: 0.0, t: 0.0, hbar: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {}", self.hbar)));
        }
        let finite = [self.amplitude.re, self.amplitude.im, self.p, self.energy, self.t];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("plane-wave parameters must be finite".into()));
        }
        Ok(())
    }

    pub fn value_at(&self, x: f64) -> C64 {
        self.amplitude * C64::cis((self.p * x - self.energy * self.t) / self.hbar)
    }
}

pub fn sample_plane_wave(grid: &Grid, params: &PlaneWaveParams) -> Result<Wavefunction> {
    params.validate()?;
    Ok(Wavefunction::from_fn(*grid, |x| params.value_at(x)))
}

/// Quadrature of `conj(f) g` on the shared grid.
pub fn inner_product(f: &Wavefunction, g: &Wavefunction) -> Result<C64> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch);
    }
    Ok(weighted_dot(&f.grid.weights(), &f.values, &g.values))
}

pub(crate) fn weighted_dot(w: &[f64], f: &[C64], g: &[C64]) -> C64 {
    w.iter().zip(f.iter().zip(g)).fold(C64::new(0.0, 0.0), |acc, (w, (f, g))| acc + f.conj() * g * *w)
}

/// `<psi|op|psi>` under the state's own convention; no renormalization.
pub fn expectation(op: &LinearOperator, psi: &Wavefunction) -> Result<C64> {
    let applied = op.apply(psi)?;
    inner_product(psi, &applied)
}

pub fn normalize(psi: &Wavefunction) -> Result<Wavefunction> {
    let norm = psi.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroNorm);
    }
    let values = psi.values.iter().map(|v| v / norm).collect();
    Ok(Wavefunction { grid: psi.grid, values, convention: Convention::L2Normalized })
}
