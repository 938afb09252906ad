//! Dense matrix realizations of differential operators.
//!
//! Every operator carries the domain it acts on: a grid together with its
//! boundary convention, or a truncated Fock basis. Adjoints are taken with
//! respect to the quadrature inner product of the grid, so on closed grids
//! the endpoint half-weights enter the definition.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{inner_product, Grid, Topology, Wavefunction};
use crate::matrix::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Ghost points outside `[a, b]` are zero.
    DirichletVanishing,
    /// Indices wrap around.
    Periodic,
}

impl Boundary {
    pub fn name(self) -> &'static str {
        match self {
            Boundary::DirichletVanishing => "dirichlet_vanishing",
            Boundary::Periodic => "periodic",
        }
    }

    /// The convention that matches a grid topology.
    pub fn natural(topology: Topology) -> Self {
        match topology {
            Topology::Closed => Boundary::DirichletVanishing,
            Topology::Periodic => Boundary::Periodic,
        }
    }

    fn check(self, grid: &Grid) -> Result<()> {
        if Boundary::natural(grid.topology()) == self {
            Ok(())
        } else {
            Err(Error::Incompatible { bc: self.name(), topology: grid.topology().name() })
        }
    }
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Grid { grid: Grid, bc: Boundary },
    Fock { dim: usize },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match self {
            Domain::Grid { grid, .. } => grid.n(),
            Domain::Fock { dim } => *dim,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    matrix: CMatrix,
    domain: Domain,
    time_dependent: bool,
}

impl LinearOperator {
    pub fn on_grid(grid: &Grid, bc: Boundary, matrix: CMatrix) -> Result<Self> {
        bc.check(grid)?;
        if matrix.dim() != grid.n() {
            return Err(Error::DimensionMismatch { expected: grid.n(), found: matrix.dim() });
        }
        Ok(LinearOperator { matrix, domain: Domain::Grid { grid: *grid, bc }, time_dependent: false })
    }

    pub fn on_fock(matrix: CMatrix) -> Self {
        let dim = matrix.dim();
        LinearOperator { matrix, domain: Domain::Fock { dim }, time_dependent: false }
    }

    pub fn identity(grid: &Grid, bc: Boundary) -> Result<Self> {
        Self::on_grid(grid, bc, CMatrix::identity(grid.n()))
    }

    pub fn zero(grid: &Grid, bc: Boundary) -> Result<Self> {
        Self::on_grid(grid, bc, CMatrix::zeros(grid.n()))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn grid(&self) -> Option<&Grid> {
        match &self.domain {
            Domain::Grid { grid, .. } => Some(grid),
            Domain::Fock { .. } => None,
        }
    }

    pub fn boundary(&self) -> Option<Boundary> {
        match self.domain {
            Domain::Grid { bc, .. } => Some(bc),
            Domain::Fock { .. } => None,
        }
    }

    /// Always false for the operators built here; the explicit time
    /// derivative term in the equation of motion therefore vanishes.
    pub fn time_dependent(&self) -> bool {
        self.time_dependent
    }

    pub fn apply(&self, psi: &Wavefunction) -> Result<Wavefunction> {
        match &self.domain {
            Domain::Grid { grid, .. } if grid == psi.grid() => Ok(psi.with_values(self.matrix.matvec(psi.values()))),
            Domain::Grid { .. } => Err(Error::GridMismatch),
            Domain::Fock { .. } => {
                Err(Error::OperandMismatch("Fock-space operator applied to a grid wavefunction".into()))
            }
        }
    }

    fn same_domain(&self, other: &Self) -> Result<()> {
        if self.domain == other.domain {
            Ok(())
        } else if self.dim() != other.dim() {
            Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() })
        } else {
            Err(Error::OperandMismatch("operators act on different domains".into()))
        }
    }

    fn derived(&self, matrix: CMatrix, time_dependent: bool) -> Self {
        LinearOperator { matrix, domain: self.domain, time_dependent }
    }
}

/// Central first difference `(f[i+1] - f[i-1]) / 2h`.
pub fn first_derivative(grid: &Grid, bc: Boundary) -> Result<LinearOperator> {
    bc.check(grid)?;
    let n = grid.n();
    let half_inv_h = 0.5 / grid.h();
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        if let Some(j) = neighbor(i, 1, n, bc) {
            m[(i, j)] = C64::new(half_inv_h, 0.0);
        }
        if let Some(j) = neighbor(i, -1, n, bc) {
            m[(i, j)] = C64::new(-half_inv_h, 0.0);
        }
    }
    LinearOperator::on_grid(grid, bc, m)
}

/// Central second difference `(f[i+1] - 2 f[i] + f[i-1]) / h^2`.
pub fn second_derivative(grid: &Grid, bc: Boundary) -> Result<LinearOperator> {
    bc.check(grid)?;
    let n = grid.n();
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        m[(i, i)] = C64::new(-2.0 * inv_h2, 0.0);
        for step in [1, -1] {
            if let Some(j) = neighbor(i, step, n, bc) {
                m[(i, j)] = C64::new(inv_h2, 0.0);
            }
        }
    }
    LinearOperator::on_grid(grid, bc, m)
}

/// Multiplication by the grid coordinate.
pub fn position(grid: &Grid, bc: Boundary) -> Result<LinearOperator> {
    bc.check(grid)?;
    let mut m = CMatrix::zeros(grid.n());
    for i in 0..grid.n() {
        m[(i, i)] = C64::new(grid.x(i), 0.0);
    }
    LinearOperator::on_grid(grid, bc, m)
}

fn neighbor(i: usize, step: isize, n: usize, bc: Boundary) -> Option<usize> {
    let j = i as isize + step;
    match bc {
        Boundary::Periodic => Some(j.rem_euclid(n as isize) as usize),
        Boundary::DirichletVanishing => (0..n as isize).contains(&j).then_some(j as usize),
    }
}

/// Adjoint with respect to the quadrature inner product:
/// `M†[i][j] = conj(M[j][i]) * w[j] / w[i]`.
pub fn adjoint(op: &LinearOperator) -> LinearOperator {
    let uniform = match &op.domain {
        Domain::Grid { grid, .. } => grid.topology() == Topology::Periodic,
        Domain::Fock { .. } => true,
    };
    let matrix = if uniform {
        op.matrix.conj_transpose()
    } else {
        let w = op.grid().map(Grid::weights).unwrap_or_default();
        CMatrix::from_fn(op.dim(), |i, j| {
            let z = op.matrix[(j, i)].conj();
            let r = w[j] / w[i];
            C64::new(z.re * r, z.im * r)
        })
    };
    op.derived(matrix, op.time_dependent)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiticityResidual {
    /// Largest normalized `|<Mf, g> - <f, Mg>|` over ordered probe pairs.
    pub probe: f64,
    /// `max |M - M†|` entrywise.
    pub matrix: f64,
}

pub fn hermiticity_residual(op: &LinearOperator, probes: &[Wavefunction]) -> Result<HermiticityResidual> {
    if probes.is_empty() {
        return Err(Error::EmptyProbes);
    }
    let applied = probes.iter().map(|f| op.apply(f)).collect::<Result<Vec<_>>>()?;
    let norms: Vec<f64> = probes.iter().map(Wavefunction::norm).collect();
    if norms.contains(&0.0) {
        return Err(Error::ZeroNorm);
    }
    let mut worst = 0.0_f64;
    for (i, f) in probes.iter().enumerate() {
        for (j, g) in probes.iter().enumerate() {
            let lhs = inner_product(&applied[i], g)?;
            let rhs = inner_product(f, &applied[j])?;
            worst = worst.max((lhs - rhs).norm() / (norms[i] * norms[j]));
        }
    }
    let matrix = op.matrix.sub(&adjoint(op).matrix).max_abs();
    Ok(HermiticityResidual { probe: worst, matrix })
}

/// `AB - BA`.
pub fn commutator(a: &LinearOperator, b: &LinearOperator) -> Result<LinearOperator> {
    a.same_domain(b)?;
    let m = a.matrix.matmul(&b.matrix).sub(&b.matrix.matmul(&a.matrix));
    Ok(a.derived(m, a.time_dependent || b.time_dependent))
}

pub fn scale(op: &LinearOperator, c: C64) -> LinearOperator {
    op.derived(op.matrix.scale(c), op.time_dependent)
}

pub fn add(a: &LinearOperator, b: &LinearOperator) -> Result<LinearOperator> {
    a.same_domain(b)?;
    Ok(a.derived(a.matrix.add(&b.matrix), a.time_dependent || b.time_dependent))
}

pub fn compose(a: &LinearOperator, b: &LinearOperator) -> Result<LinearOperator> {
    a.same_domain(b)?;
    Ok(a.derived(a.matrix.matmul(&b.matrix), a.time_dependent || b.time_dependent))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_uniform_grid;
    use std::f64::consts::PI;

    fn periodic(n: usize) -> Grid {
        make_uniform_grid(0.0, 1.0, n, Topology::Periodic).unwrap()
    }

    fn closed(a: f64, b: f64, n: usize) -> Grid {
        make_uniform_grid(a, b, n, Topology::Closed).unwrap()
    }

    fn real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Wavefunction {
        Wavefunction::from_fn(grid, |x| C64::new(f(x), 0.0))
    }

    fn gaussian(grid: Grid, center: f64, width: f64) -> Wavefunction {
        real_fn(grid, |x| (-(x - center).powi(2) / (2.0 * width * width)).exp())
    }

    #[test]
    fn boundary_must_match_topology() {
        let g = periodic(8);
        assert!(matches!(first_derivative(&g, Boundary::DirichletVanishing), Err(Error::Incompatible { .. })));
        let g = closed(0.0, 1.0, 8);
        assert!(matches!(second_derivative(&g, Boundary::Periodic), Err(Error::Incompatible { .. })));
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let g = periodic(16);
        let c = real_fn(g, |_| 1.0);
        let d1 = first_derivative(&g, Boundary::Periodic).unwrap().apply(&c).unwrap();
        let d2 = second_derivative(&g, Boundary::Periodic).unwrap().apply(&c).unwrap();
        assert!(d1.values().iter().all(|v| *v == C64::new(0.0, 0.0)));
        assert!(d2.values().iter().all(|v| *v == C64::new(0.0, 0.0)));
    }

    #[test]
    fn first_derivative_of_sine_within_taylor_bound() {
        let g = periodic(64);
        let k = 2.0 * PI;
        let d = first_derivative(&g, Boundary::Periodic).unwrap();
        let out = d.apply(&real_fn(g, |x| (k * x).sin())).unwrap();
        let bound = k.powi(3) * g.h().powi(2) / 6.0;
        for (i, v) in out.values().iter().enumerate() {
            let exact = k * (k * g.x(i)).cos();
            assert!((v.re - exact).abs() <= bound, "i = {i}");
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn first_derivative_dirichlet_rows() {
        let g = closed(0.0, 1.0, 11);
        let d = first_derivative(&g, Boundary::DirichletVanishing).unwrap();
        let out = d.apply(&real_fn(g, |x| x)).unwrap();
        let v = out.values();
        for vi in &v[1..10] {
            assert!((vi.re - 1.0).abs() < 1e-13);
        }
        // Ghost values are zero outside the interval.
        assert!((v[0].re - g.x(1) / (2.0 * g.h())).abs() < 1e-13);
        assert!((v[10].re + g.x(9) / (2.0 * g.h())).abs() < 1e-13);
    }

    #[test]
    fn second_derivative_exact_on_quadratics() {
        let g = closed(0.0, 1.0, 9);
        let d2 = second_derivative(&g, Boundary::DirichletVanishing).unwrap();
        let out = d2.apply(&real_fn(g, |x| x * x)).unwrap();
        for v in &out.values()[1..8] {
            assert_eq!(v.re, 2.0);
        }
    }

    #[test]
    fn second_derivative_plane_wave_symbol() {
        let g = periodic(40);
        let p = 2.0 * PI * 3.0;
        let psi = Wavefunction::from_fn(g, |x| C64::cis(p * x));
        let out = second_derivative(&g, Boundary::Periodic).unwrap().apply(&psi).unwrap();
        let symbol = -(2.0 - 2.0 * (p * g.h()).cos()) / (g.h() * g.h());
        for (o, v) in out.values().iter().zip(psi.values()) {
            assert!((o - v * symbol).norm() < 1e-9 * symbol.abs());
        }
        assert!((symbol + p * p).abs() / (p * p) < 0.03);
    }

    #[test]
    fn periodic_stencils_are_exactly_antisymmetric_and_symmetric() {
        let g = periodic(12);
        let d1 = first_derivative(&g, Boundary::Periodic).unwrap();
        let d2 = second_derivative(&g, Boundary::Periodic).unwrap();
        for i in 0..12 {
            for j in 0..12 {
                assert_eq!(d1.matrix()[(i, j)], -d1.matrix()[(j, i)]);
                assert_eq!(d2.matrix()[(i, j)], d2.matrix()[(j, i)]);
            }
        }
    }

    #[test]
    fn adjoint_examples() {
        let g = periodic(10);
        let id = LinearOperator::identity(&g, Boundary::Periodic).unwrap();
        assert_eq!(adjoint(&id), id);
        let d = first_derivative(&g, Boundary::Periodic).unwrap();
        assert_eq!(adjoint(&d), scale(&d, C64::new(-1.0, 0.0)));

        let gc = closed(0.0, 1.0, 10);
        let idc = LinearOperator::identity(&gc, Boundary::DirichletVanishing).unwrap();
        assert_eq!(adjoint(&idc), idc);
    }

    #[test]
    fn adjoint_respects_trapezoid_weights() {
        let g = closed(-1.0, 2.0, 7);
        let m = CMatrix::from_fn(7, |i, j| C64::new((i * 7 + j) as f64 * 0.3 - 2.0, (i as f64 - j as f64).sin()));
        let op = LinearOperator::on_grid(&g, Boundary::DirichletVanishing, m).unwrap();
        let f = Wavefunction::from_fn(g, |x| C64::new(x.cos(), x * x));
        let h = Wavefunction::from_fn(g, |x| C64::new(1.0 + x, -x.sin()));
        let lhs = inner_product(&adjoint(&op).apply(&f).unwrap(), &h).unwrap();
        let rhs = inner_product(&f, &op.apply(&h).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn hermiticity_of_momentum_like_operator() {
        let g = periodic(64);
        let d = first_derivative(&g, Boundary::Periodic).unwrap();
        let p = scale(&d, C64::new(0.0, -1.0));
        let probes =
            vec![gaussian(g, 0.5, 0.08), gaussian(g, 0.4, 0.1), Wavefunction::from_fn(g, |x| C64::cis(2.0 * PI * x))];
        let r = hermiticity_residual(&p, &probes).unwrap();
        assert!(r.probe <= 1e-12);
        assert_eq!(r.matrix, 0.0);
    }

    #[test]
    fn bare_derivative_is_not_hermitian() {
        let g = make_uniform_grid(-10.0, 10.0, 512, Topology::Periodic).unwrap();
        let d = first_derivative(&g, Boundary::Periodic).unwrap();
        let (c1, c2, s) = (-0.5, 0.5, 1.0);
        let probes = vec![gaussian(g, c1, s), gaussian(g, c2, s)];
        let r = hermiticity_residual(&d, &probes).unwrap();
        // For anti-Hermitian D the defect is 2 |<f, g'>|, normalized by s sqrt(pi).
        let dc = c1 - c2;
        let overlap = dc.abs() * PI.sqrt() / (2.0 * s) * (-dc * dc / (4.0 * s * s)).exp();
        let oracle = 2.0 * overlap / (s * PI.sqrt());
        assert!(r.probe >= oracle * (1.0 - 1e-3), "{} vs {}", r.probe, oracle);
        assert!(r.probe > 0.5);
    }

    #[test]
    fn empty_probes_rejected() {
        let g = periodic(8);
        let id = LinearOperator::identity(&g, Boundary::Periodic).unwrap();
        assert_eq!(hermiticity_residual(&id, &[]), Err(Error::EmptyProbes));
    }

    #[test]
    fn dirichlet_time_like_operator_with_vanishing_probes() {
        for n in [256, 512] {
            let g = closed(-10.0, 10.0, n);
            let t = scale(&first_derivative(&g, Boundary::DirichletVanishing).unwrap(), C64::new(0.0, -0.25));
            let probes = vec![gaussian(g, 0.0, 1.0), gaussian(g, 1.0, 0.7)];
            let r = hermiticity_residual(&t, &probes).unwrap();
            assert!(r.probe <= 1e-12, "n = {n}: {}", r.probe);
        }
    }

    #[test]
    fn commutator_examples() {
        let g = periodic(32);
        let d1 = first_derivative(&g, Boundary::Periodic).unwrap();
        let d2 = second_derivative(&g, Boundary::Periodic).unwrap();
        assert!(commutator(&d1, &d1).unwrap().matrix().is_zero());
        assert!(commutator(&d1, &d2).unwrap().matrix().max_abs() <= 1e-13);
    }

    #[test]
    fn canonical_commutation_on_interior() {
        let g = closed(-8.0, 8.0, 401);
        let bc = Boundary::DirichletVanishing;
        let x = position(&g, bc).unwrap();
        let p = scale(&first_derivative(&g, bc).unwrap(), C64::new(0.0, -1.0));
        let c = commutator(&x, &p).unwrap();
        let f = gaussian(g, 0.3, 1.0);
        let out = c.apply(&f).unwrap();
        // |f''| <= 1 for a unit-width Gaussian.
        let tol = g.h() * g.h();
        for i in 1..g.n() - 1 {
            let expect = C64::new(0.0, 1.0) * f.values()[i];
            assert!((out.values()[i] - expect).norm() <= tol);
        }
    }

    #[test]
    fn algebra_plumbing() {
        let g = periodic(16);
        let id = LinearOperator::identity(&g, Boundary::Periodic).unwrap();
        let f = Wavefunction::from_fn(g, |x| C64::new(x, 1.0 - x));
        let twice = scale(&id, C64::new(2.0, 0.0)).apply(&f).unwrap();
        for (a, b) in twice.values().iter().zip(f.values()) {
            assert_eq!(*a, b * 2.0);
        }
        let d = first_derivative(&g, Boundary::Periodic).unwrap();
        assert!(add(&d, &scale(&d, C64::new(-1.0, 0.0))).unwrap().matrix().is_zero());
        let other = first_derivative(&periodic(17), Boundary::Periodic).unwrap();
        assert!(add(&d, &other).is_err());
        assert!(commutator(&d, &other).is_err());
    }

    #[test]
    fn composed_first_derivative_approximates_second() {
        let g = periodic(128);
        let k = 2.0 * PI;
        let d1 = first_derivative(&g, Boundary::Periodic).unwrap();
        let dd = compose(&d1, &d1).unwrap();
        let d2 = second_derivative(&g, Boundary::Periodic).unwrap();
        let f = real_fn(g, |x| (k * x).sin());
        let a = dd.apply(&f).unwrap();
        let b = d2.apply(&f).unwrap();
        let tol = k.powi(4) * g.h().powi(2) / 3.0;
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() <= tol);
        }
    }

    #[test]
    fn operator_applied_to_foreign_grid() {
        let d = first_derivative(&periodic(8), Boundary::Periodic).unwrap();
        let f = real_fn(periodic(9), |x| x);
        assert_eq!(d.apply(&f), Err(Error::GridMismatch));
    }
}
