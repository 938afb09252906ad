//! Numerical machinery shared by the experiments: interval expectations of
//! plane waves, least-squares fits, and analytic probe states.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{oscillator_eigenfunction, FockSpace};
use crate::grid::{
    make_uniform_grid, sample_plane_wave, weighted_dot, Convention, Grid, PlaneWaveParams, Topology, Wavefunction,
};
use crate::operator::{Boundary, LinearOperator};

/// `∫_a^b ψ* (A ψ) dx` for a plane wave that extends beyond `[a, b]`.
///
/// The operator is built on `[a - h, b + h]` with one halo cell per side so
/// that every stencil inside `[a, b]` sees true plane-wave neighbours; the
/// halo rows (which carry the zero ghost values) are excluded from the
/// trapezoidal quadrature over the `n` interior points.
pub fn interval_expectation<F>(a: f64, b: f64, n: usize, wave: &PlaneWaveParams, build: F) -> Result<C64>
where
    F: Fn(&Grid, Boundary) -> Result<LinearOperator>,
{
    let inner = make_uniform_grid(a, b, n, Topology::Closed)?;
    let h = inner.h();
    let outer = make_uniform_grid(a - h, b + h, n + 2, Topology::Closed)?;
    let op = build(&outer, Boundary::DirichletVanishing)?;
    let psi = sample_plane_wave(&outer, wave)?;
    let applied = op.apply(&psi)?;
    Ok(weighted_dot(&inner.weights(), &psi.values()[1..=n], &applied.values()[1..=n]))
}

/// Expectation on a periodic grid over `[a, b)`; exact stencil behaviour
/// requires `p (b - a) / hbar` to be a multiple of `2π`.
pub fn periodic_expectation<F>(a: f64, b: f64, n: usize, wave: &PlaneWaveParams, build: F) -> Result<C64>
where
    F: Fn(&Grid, Boundary) -> Result<LinearOperator>,
{
    let grid = make_uniform_grid(a, b, n, Topology::Periodic)?;
    let op = build(&grid, Boundary::Periodic)?;
    crate::grid::expectation(&op, &sample_plane_wave(&grid, wave)?)
}

pub fn is_commensurate(p: f64, length: f64, hbar: f64) -> bool {
    let turns = p * length / (hbar * 2.0 * std::f64::consts::PI);
    (turns - turns.round()).abs() < 1e-9
}

/// Second-order Richardson extrapolation from spacings `h` and `h / 2`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    assert_eq!(x.len(), y.len());
    assert!(x.len() >= 2);
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fitted exponent `q` in `err ≈ C h^q`.
pub fn convergence_order(h: &[f64], err: &[f64]) -> f64 {
    let lx: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = err.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly).0
}

/// Modulated Gaussian `exp(-(x - c)^2 / 2σ^2 + i k x)` with its exact derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianProbe {
    pub center: f64,
    pub width: f64,
    pub k: f64,
}

impl GaussianProbe {
    pub fn value(&self, x: f64) -> C64 {
        let u = (x - self.center) / self.width;
        C64::from_polar((-0.5 * u * u).exp(), self.k * x)
    }

    pub fn derivative(&self, x: f64) -> C64 {
        let slope = C64::new(-(x - self.center) / (self.width * self.width), self.k);
        slope * self.value(x)
    }

    pub fn second_derivative(&self, x: f64) -> C64 {
        let s2 = self.width * self.width;
        let slope = C64::new(-(x - self.center) / s2, self.k);
        (slope * slope - 1.0 / s2) * self.value(x)
    }

    pub fn sample(&self, grid: &Grid) -> Wavefunction {
        Wavefunction::from_fn(*grid, |x| self.value(x))
    }

    pub fn sample_derivative(&self, grid: &Grid) -> Wavefunction {
        Wavefunction::from_fn(*grid, |x| self.derivative(x))
    }
}

/// Largest `|<A_h f, g> - <f, A g>| / (|f| |A g|)` over ordered probe pairs,
/// where `A_h` is the discrete operator and `exact` gives the continuum `A g`
/// at each grid point. Measures how far the discrete operator is from the
/// Hermitian continuum one, including stencil error.
pub fn consistency_residual<E>(op: &LinearOperator, probes: &[GaussianProbe], exact: E) -> Result<f64>
where
    E: Fn(&GaussianProbe, f64) -> C64,
{
    let grid = *op.grid().ok_or_else(|| Error::Domain("consistency residual needs a grid operator".into()))?;
    if probes.is_empty() {
        return Err(Error::EmptyProbes);
    }
    let w = grid.weights();
    let samples: Vec<Wavefunction> = probes.iter().map(|p| p.sample(&grid)).collect();
    let applied = samples.iter().map(|f| op.apply(f)).collect::<Result<Vec<_>>>()?;
    let continuum: Vec<Wavefunction> = probes.iter().map(|p| Wavefunction::from_fn(grid, |x| exact(p, x))).collect();
    let mut worst = 0.0_f64;
    for (f, af) in samples.iter().zip(&applied) {
        for (g, ag) in samples.iter().zip(&continuum) {
            let scale = f.norm() * ag.norm();
            if scale == 0.0 {
                return Err(Error::ZeroNorm);
            }
            let lhs = weighted_dot(&w, af.values(), g.values());
            let rhs = weighted_dot(&w, f.values(), ag.values());
            worst = worst.max((lhs - rhs).norm() / scale);
        }
    }
    Ok(worst)
}

/// Gaussians centred inside `[a, b]`, narrow enough to vanish at both ends.
pub fn gaussian_probes(grid: &Grid) -> Vec<GaussianProbe> {
    let l = grid.length();
    let mid = grid.a() + 0.5 * l;
    let width = l / 20.0;
    let k = 2.0 * std::f64::consts::PI / l;
    vec![
        GaussianProbe { center: mid, width, k: 0.0 },
        GaussianProbe { center: mid - 0.05 * l, width: 1.2 * width, k: 3.0 * k },
        GaussianProbe { center: mid + 0.07 * l, width: 0.8 * width, k: -2.0 * k },
    ]
}

/// Commensurate plane waves on `[a, b)`.
pub fn plane_wave_probes(grid: &Grid, hbar: f64) -> Result<Vec<Wavefunction>> {
    let k = 2.0 * std::f64::consts::PI / grid.length();
    [1.0, 2.0, 5.0]
        .iter()
        .map(|j| sample_plane_wave(grid, &PlaneWaveParams { hbar, ..PlaneWaveParams::with_momentum(j * k * hbar) }))
        .collect()
}

/// Oscillator eigenfunctions centred on the grid midpoint with width `L / 20`.
pub fn hermite_probes(grid: &Grid, count: usize) -> Result<Vec<Wavefunction>> {
    let half = 0.5 * grid.length();
    let centred = make_uniform_grid(-half, half, grid.n(), grid.topology())?;
    let omega = (20.0 / grid.length()).powi(2);
    let space = FockSpace::new(count + 2, omega, 1.0, 1.0, 1.0)?;
    (0..count)
        .map(|n| {
            let psi = oscillator_eigenfunction(n, &centred, &space)?;
            Wavefunction::new(*grid, psi.values().to_vec(), Convention::L2Normalized)
        })
        .collect()
}
