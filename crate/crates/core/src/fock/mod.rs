//! Truncated number-basis algebra for the harmonic oscillator.
//!
//! The basis is `|0>, ..., |dim-1>`. Matrix elements that involve the top
//! state are corrupted by truncation (`a†|dim-1>` is dropped), so every
//! operation indexed by a basis state only admits `n <= dim - 2`.

pub mod exact;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::grid::{normalize, Convention, Grid, Wavefunction};
use crate::matrix::CMatrix;
use crate::operator::{scale, Domain, LinearOperator};
use exact::SurdMatrix;

/// Largest allowed magnitude of an eigenfunction at the grid endpoints.
pub const BOUNDARY_DECAY: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockSpace {
    dim: usize,
    omega: f64,
    m: f64,
    hbar: f64,
    p_eff: f64,
}

impl FockSpace {
    /// `p_eff` is the scalar momentum in the `m / p^2` prefactor of the
    /// time operator; it may be zero here, `time_ladder` rejects it.
    pub fn new(dim: usize, omega: f64, m: f64, hbar: f64, p_eff: f64) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidParameter(format!("Fock dimension must be at least 3, got {dim}")));
        }
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        if !m.is_finite() || m == 0.0 {
            return Err(Error::ZeroMass);
        }
        if !p_eff.is_finite() {
            return Err(Error::InvalidParameter("p_eff must be finite".into()));
        }
        Ok(FockSpace { dim, omega, m, hbar, p_eff })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn p_eff(&self) -> f64 {
        self.p_eff
    }

    /// Highest basis index free of truncation artifacts.
    pub fn max_admissible(&self) -> usize {
        self.dim - 2
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n > self.max_admissible() {
            return Err(Error::OutOfRange { n, max: self.max_admissible() });
        }
        Ok(())
    }

    /// `sqrt(m hbar omega / 2)`; an imaginary value is an error, not a complex prefactor.
    fn momentum_scale(&self) -> Result<f64> {
        let arg = self.m * self.hbar * self.omega / 2.0;
        if arg <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "m * hbar * omega / 2 = {arg} is not positive; the ladder momentum prefactor would be imaginary"
            )));
        }
        Ok(arg.sqrt())
    }

    /// `(i m / p^2) sqrt(m hbar omega / 2)`, the scalar in front of `(a - a†)`.
    pub fn alpha(&self) -> Result<C64> {
        if self.p_eff == 0.0 {
            return Err(Error::ZeroMomentum);
        }
        Ok(C64::new(0.0, self.m / (self.p_eff * self.p_eff) * self.momentum_scale()?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    space: FockSpace,
    coeffs: Vec<C64>,
}

impl FockVector {
    pub fn new(space: &FockSpace, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != space.dim {
            return Err(Error::DimensionMismatch { expected: space.dim, found: coeffs.len() });
        }
        Ok(FockVector { space: *space, coeffs })
    }

    /// `|n>`
    pub fn basis(space: &FockSpace, n: usize) -> Result<Self> {
        if n >= space.dim {
            return Err(Error::OutOfRange { n, max: space.dim - 1 });
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); space.dim];
        coeffs[n] = C64::new(1.0, 0.0);
        Ok(FockVector { space: *space, coeffs })
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn apply(&self, op: &LinearOperator) -> Result<FockVector> {
        check_fock(op, &self.space)?;
        Ok(FockVector { space: self.space, coeffs: op.matrix().matvec(&self.coeffs) })
    }

    /// `<self|other>`
    pub fn inner(&self, other: &FockVector) -> C64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum()
    }
}

fn check_fock(op: &LinearOperator, space: &FockSpace) -> Result<()> {
    match op.domain() {
        Domain::Fock { dim } if *dim == space.dim => Ok(()),
        Domain::Fock { dim } => Err(Error::DimensionMismatch { expected: space.dim, found: *dim }),
        Domain::Grid { .. } => Err(Error::OperandMismatch("grid operator used in Fock space".into())),
    }
}

pub fn lowering_matrix(space: &FockSpace) -> LinearOperator {
    LinearOperator::on_fock(SurdMatrix::lowering(space.dim).to_cmatrix())
}

pub fn raising_matrix(space: &FockSpace) -> LinearOperator {
    LinearOperator::on_fock(SurdMatrix::raising(space.dim).to_cmatrix())
}

/// `a† a`, exact integers on the diagonal.
pub fn number_matrix(space: &FockSpace) -> LinearOperator {
    let n = SurdMatrix::raising(space.dim).mul(&SurdMatrix::lowering(space.dim));
    LinearOperator::on_fock(n.to_cmatrix())
}

/// `[a, a†]` evaluated exactly; identity except the last diagonal entry, `1 - dim`.
pub fn ladder_commutator(space: &FockSpace) -> LinearOperator {
    let a = SurdMatrix::lowering(space.dim);
    let ad = SurdMatrix::raising(space.dim);
    LinearOperator::on_fock(a.mul(&ad).sub(&ad.mul(&a)).to_cmatrix())
}

/// `i sqrt(m hbar omega / 2) (a - a†)`
pub fn momentum_ladder(space: &FockSpace) -> Result<LinearOperator> {
    let s = space.momentum_scale()?;
    let diff = SurdMatrix::lowering(space.dim).sub(&SurdMatrix::raising(space.dim));
    let op = LinearOperator::on_fock(diff.to_cmatrix());
    Ok(scale(&op, C64::new(0.0, s)))
}

/// `(m / p_eff^2)` times the ladder momentum.
pub fn time_ladder(space: &FockSpace) -> Result<LinearOperator> {
    if space.p_eff == 0.0 {
        return Err(Error::ZeroMomentum);
    }
    let p = momentum_ladder(space)?;
    Ok(scale(&p, C64::new(space.m / (space.p_eff * space.p_eff), 0.0)))
}

/// `<n|op|n>` by direct indexing.
pub fn fock_expectation(op: &LinearOperator, n: usize, space: &FockSpace) -> Result<C64> {
    check_fock(op, space)?;
    space.check_index(n)?;
    Ok(op.matrix()[(n, n)])
}

pub fn fock_identity(space: &FockSpace) -> LinearOperator {
    LinearOperator::on_fock(CMatrix::identity(space.dim))
}

/// Oscillator eigenfunction `ψ_n` sampled on `grid` via the three-term
/// recurrence of normalized Hermite functions
/// `ψ_{k+1} = sqrt(2/(k+1)) ξ ψ_k - sqrt(k/(k+1)) ψ_{k-1}`, `ξ = sqrt(m ω / hbar) x`.
pub fn oscillator_eigenfunction(n: usize, grid: &Grid, space: &FockSpace) -> Result<Wavefunction> {
    space.check_index(n)?;
    if space.m < 0.0 {
        return Err(Error::InvalidParameter("oscillator eigenfunctions need positive mass".into()));
    }
    let k = space.m * space.omega / space.hbar;
    let scale = k.sqrt();
    let prefactor = (k / std::f64::consts::PI).powf(0.25);
    let values: Vec<f64> = grid
        .points()
        .into_iter()
        .map(|x| {
            let xi = scale * x;
            let mut prev = 0.0;
            let mut cur = prefactor * (-0.5 * xi * xi).exp();
            for j in 0..n {
                let jf = j as f64;
                let next = (2.0 / (jf + 1.0)).sqrt() * xi * cur - (jf / (jf + 1.0)).sqrt() * prev;
                prev = cur;
                cur = next;
            }
            cur
        })
        .collect();
    let edge = values[0].abs().max(values[values.len() - 1].abs());
    if edge > BOUNDARY_DECAY {
        return Err(Error::InsufficientDomain { n, value: edge, limit: BOUNDARY_DECAY });
    }
    let values = values.into_iter().map(|v| C64::new(v, 0.0)).collect();
    normalize(&Wavefunction::new(*grid, values, Convention::UnitAmplitude)?)
}

/// Smallest `Δt` allowed by `ΔE Δt >= hbar / 2`.
pub fn jump_time_bound(delta_e: f64, hbar: f64) -> Result<f64> {
    if !(delta_e > 0.0 && delta_e.is_finite()) {
        return Err(Error::InvalidParameter(format!("energy gap must be positive, got {delta_e}")));
    }
    if !(hbar > 0.0 && hbar.is_finite()) {
        return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
    }
    Ok(hbar / (2.0 * delta_e))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpCheck {
    pub satisfied: bool,
    pub tau_j: f64,
    pub delta_t: f64,
    /// `delta_t - tau_j`; negative when the bound is violated.
    pub margin: f64,
}

/// `tau_j <= delta_t`, inclusive.
pub fn check_jump_inequality(tau_j: f64, delta_t: f64) -> Result<JumpCheck> {
    if !(tau_j >= 0.0 && tau_j.is_finite()) {
        return Err(Error::InvalidParameter(format!("jump time must be nonnegative, got {tau_j}")));
    }
    if !(delta_t > 0.0 && delta_t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time uncertainty must be positive, got {delta_t}")));
    }
    Ok(JumpCheck { satisfied: tau_j <= delta_t, tau_j, delta_t, margin: delta_t - tau_j })
}
