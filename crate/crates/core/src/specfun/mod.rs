//! Special functions: Φ₃, ₀F₁, Macdonald K_ν and the propagator time profiles.

mod bessel;
pub mod dd;
mod hyper;
mod profiles;

pub use bessel::{bessel_k, bessel_k_orders};
pub use hyper::{hyp0f1, laguerre_profiles, phi3, LaguerreProfiles};
pub use profiles::{cosh_sinhc_gap, sinhc, time_profiles, time_profiles_laplace, time_profiles_small_alpha, SmallAlphaProfile};

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Truncation policy for the hypergeometric series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl { rel_tol: 1e-14, max_terms: 10_000 }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) || self.max_terms < 1 {
            return Err(Error::InvalidParameter(format!("bad series control {self:?}")));
        }
        Ok(())
    }
}

/// (a_t, b_t): the scalar time profiles of the propagator kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeProfiles {
    pub a: C64,
    pub b: C64,
}
