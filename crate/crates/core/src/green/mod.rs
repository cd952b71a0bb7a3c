//! Two-particle Green function elements in centre-of-mass coordinates, the
//! Macdonald time-integral identity, single-particle resolvent integrals and
//! the ε-regularized time-quadrature oracle behind all of them.

mod closed;
mod engine;
mod oracle;
mod single;

pub use closed::{green2, green2_alpha0, green2_coefficients, green2_diag, green2_offdiag, macdonald_time_integral};
pub use engine::{e_function, ShiftTerm};
pub use oracle::{
    green2_oracle, macdonald_oracle, regularized_time_quadrature, OracleValue, PairIntegrand, PowerIntegrand,
    ProfileModel, TimeIntegrand,
};
pub use single::{single_particle_green, SingleKind};

use crate::error::{Error, Result};
use crate::spinalg::{ComPoint, SpinChannel};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// One element request R_{σ′σ}(z)(x, X).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenQuery {
    pub z: C64,
    pub q: ComPoint,
    pub sigma_out: SpinChannel,
    pub sigma_in: SpinChannel,
}

impl GreenQuery {
    pub fn new(z: C64, q: ComPoint, sigma_out: SpinChannel, sigma_in: SpinChannel) -> Self {
        GreenQuery { z, q, sigma_out, sigma_in }
    }

    pub fn validate(&self) -> Result<()> {
        check_energy(self.z)?;
        check_point(&self.q)
    }

    /// The query mirrored to conj(z), −Q with the channels swapped; its value is the conjugate of this one.
    pub fn mirrored(&self) -> GreenQuery {
        GreenQuery { z: self.z.conj(), q: self.q.neg(), sigma_out: self.sigma_in, sigma_in: self.sigma_out }
    }
}

/// ε-regularization and accuracy settings for the time-quadrature oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureControl {
    pub eps_sequence: Vec<f64>,
    pub abs_tol: f64,
    /// Integration ranges stop where the exponential envelope has decayed by e^{−t_max}.
    pub t_max: f64,
}

impl Default for QuadratureControl {
    fn default() -> Self {
        QuadratureControl { eps_sequence: vec![1e-2, 3e-3, 1e-3], abs_tol: 1e-8, t_max: 60.0 }
    }
}

impl QuadratureControl {
    pub fn validate(&self) -> Result<()> {
        let eps = &self.eps_sequence;
        if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0)) || eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidParameter("eps_sequence must be positive and strictly decreasing".into()));
        }
        if !(self.abs_tol > 0.0) || !(self.t_max > 0.0) {
            return Err(Error::InvalidParameter("abs_tol and t_max must be positive".into()));
        }
        Ok(())
    }
}

pub(crate) fn check_energy(z: C64) -> Result<()> {
    if z.im == 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::DomainError(format!("Green functions need Im z != 0, got {z}")));
    }
    Ok(())
}

pub(crate) fn check_point(q: &ComPoint) -> Result<()> {
    let n = q.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::DomainError("Green functions need |Q| > 0".into()));
    }
    Ok(())
}

/// +1 for Im z > 0 (upper sign), −1 otherwise.
pub(crate) fn branch_sign(z: C64) -> f64 {
    if z.im > 0.0 {
        1.0
    } else {
        -1.0
    }
}
