//! The named free-particle operators and their closed-form expectations.
//!
//! `p` is a scalar momentum eigenvalue throughout, not an operator: the
//! displacement and time operators divide by `p^2` as a number.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{expectation, Grid, Wavefunction};
use crate::operator::{commutator, first_derivative, scale, second_derivative, Boundary, LinearOperator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleParams {
    /// Mass; zero and negative values are allowed where the operator permits.
    pub m: f64,
    /// Momentum eigenvalue.
    pub p: f64,
    /// Classical velocity, for the `p = m v` correspondence.
    pub v: f64,
    pub hbar: f64,
}

impl ParticleParams {
    pub fn new(m: f64, p: f64) -> Self {
        ParticleParams { m, p, v: if m != 0.0 { p / m } else { 0.0 }, hbar: 1.0 }
    }

    /// Parameters with `p = m v`.
    pub fn from_velocity(m: f64, v: f64) -> Self {
        ParticleParams { m, p: m * v, v, hbar: 1.0 }
    }

    pub fn with_hbar(self, hbar: f64) -> Self {
        ParticleParams { hbar, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {}", self.hbar)));
        }
        if !(self.m.is_finite() && self.p.is_finite() && self.v.is_finite()) {
            return Err(Error::InvalidParameter("particle parameters must be finite".into()));
        }
        Ok(())
    }

    fn require_mass(&self) -> Result<()> {
        self.validate()?;
        if self.m == 0.0 {
            return Err(Error::ZeroMass);
        }
        Ok(())
    }

    fn require_momentum(&self) -> Result<()> {
        self.validate()?;
        if self.p == 0.0 {
            return Err(Error::ZeroMomentum);
        }
        Ok(())
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `-(hbar^2 / 2m) d^2/dx^2`
pub fn kinetic_operator(grid: &Grid, bc: Boundary, params: &ParticleParams) -> Result<LinearOperator> {
    params.require_mass()?;
    let d2 = second_derivative(grid, bc)?;
    Ok(scale(&d2, real(-params.hbar * params.hbar / (2.0 * params.m))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VelocityBranch {
    Plus,
    /// The branch for which a plane wave of momentum `p` has eigenvalue `p/m`.
    #[default]
    Minus,
}

/// `∓(i hbar / m) d/dx`.
pub fn velocity_operator(
    grid: &Grid,
    bc: Boundary,
    params: &ParticleParams,
    branch: VelocityBranch,
) -> Result<LinearOperator> {
    params.require_mass()?;
    let d = first_derivative(grid, bc)?;
    let c = params.hbar / params.m;
    let factor = match branch {
        VelocityBranch::Minus => C64::new(0.0, -c),
        VelocityBranch::Plus => C64::new(0.0, c),
    };
    Ok(scale(&d, factor))
}

/// `-(hbar^2 / p^2) d^2/dx^2`; a plane wave of the same `p` has eigenvalue 1.
pub fn displacement_operator(grid: &Grid, bc: Boundary, params: &ParticleParams) -> Result<LinearOperator> {
    params.require_momentum()?;
    let d2 = second_derivative(grid, bc)?;
    Ok(scale(&d2, real(-params.hbar * params.hbar / (params.p * params.p))))
}

/// `-i hbar d/dx`
pub fn momentum_operator(grid: &Grid, bc: Boundary, params: &ParticleParams) -> Result<LinearOperator> {
    params.validate()?;
    let d = first_derivative(grid, bc)?;
    Ok(scale(&d, C64::new(0.0, -params.hbar)))
}

/// `(hbar m / (i p^2)) d/dx`, built as `(m / p^2)` times the momentum operator.
///
/// With `m = 0` every entry is zero.
pub fn time_operator(grid: &Grid, bc: Boundary, params: &ParticleParams) -> Result<LinearOperator> {
    params.require_momentum()?;
    let momentum = momentum_operator(grid, bc, params)?;
    Ok(scale(&momentum, real(params.m / (params.p * params.p))))
}

/// `m (b - a) / p`, the classical transit time `(b - a) / v` when `p = m v`.
pub fn expected_time_closed_form(params: &ParticleParams, a: f64, b: f64) -> Result<f64> {
    params.require_momentum()?;
    Ok(params.m * (b - a) / params.p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeisenbergConvention {
    /// `(i / hbar) <[H, A]>`
    Standard,
    /// `i hbar <[A, H]>`, the prefactor and ordering taken literally as written.
    Literal,
}

/// Rate of change of `<A>` from the Heisenberg equation; the explicit
/// `∂A/∂t` term contributes zero for time-independent operators.
pub fn heisenberg_rate(
    a: &LinearOperator,
    h: &LinearOperator,
    psi: &Wavefunction,
    hbar: f64,
    convention: HeisenbergConvention,
) -> Result<C64> {
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
    }
    if a.time_dependent() {
        return Err(Error::InvalidParameter("explicitly time-dependent operators are not supported".into()));
    }
    let rate = match convention {
        HeisenbergConvention::Standard => C64::new(0.0, 1.0 / hbar) * expectation(&commutator(h, a)?, psi)?,
        HeisenbergConvention::Literal => C64::new(0.0, hbar) * expectation(&commutator(a, h)?, psi)?,
    };
    Ok(rate)
}
