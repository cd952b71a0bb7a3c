use super::hyper::phi3;
use super::{SeriesControl, TimeProfiles};
use crate::error::Result;
use crate::quad::exp_sinh;
use crate::kernel::Coupling;
use num_complex::Complex64 as C64;

const SMALL_W: f64 = 0.5;

/// sinh(w)/w, with its Taylor series near 0.
pub fn sinhc(w: C64) -> C64 {
    if w.norm() < SMALL_W {
        let w2 = w * w;
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..14 {
            term = term * w2 / ((2 * k) as f64 * (2 * k + 1) as f64);
            sum += term;
        }
        sum
    } else {
        w.sinh() / w
    }
}

/// (cosh w − sinh(w)/w)/w² = Σ_{k≥1} 2k w^{2k−2}/(2k+1)!
pub fn cosh_sinhc_gap(w: C64) -> C64 {
    if w.norm() < SMALL_W {
        let w2 = w * w;
        // 1/(2k+1)! accumulated alongside w^{2k-2}
        let mut fact_pow = C64::new(1.0 / 6.0, 0.0);
        let mut sum = fact_pow * 2.0;
        for k in 2..16 {
            fact_pow = fact_pow * w2 / ((2 * k) as f64 * (2 * k + 1) as f64);
            sum += fact_pow * (2 * k) as f64;
        }
        sum
    } else {
        (w.cosh() - w.sinh() / w) / (w * w)
    }
}

/// a_t = Φ₃(1; ½; tα²/4, (βt/2)²), b_t = t·Φ₃(1; 3/2; ·, ·); t may be complex.
pub fn time_profiles(c: &Coupling, t: C64, ctl: &SeriesControl) -> Result<TimeProfiles> {
    let x = t * (c.alpha * c.alpha / 4.0);
    let y = (t * (c.beta / 2.0)).powu(2);
    Ok(TimeProfiles {
        a: phi3(1.0, 0.5, x, y, ctl)?,
        b: t * phi3(1.0, 1.5, x, y, ctl)?,
    })
}

/// The same profiles from their Laplace representation
/// `a_τ = ∫₀^∞ e^{−ρ} cosh√W dρ`, `b_τ = τ ∫₀^∞ e^{−ρ} sinh(√W)/√W dρ`,
/// W = α²ρτ + β²τ². Stays accurate for large |τ| where the series cancels.
pub fn time_profiles_laplace(c: &Coupling, tau: C64, rel_tol: f64) -> Result<TimeProfiles> {
    let (a2, b2) = (c.alpha * c.alpha, c.beta * c.beta);
    let root = |rho: f64| (tau * a2 * rho + tau * tau * b2).sqrt();
    let a = exp_sinh(|rho| root(rho).cosh() * (-rho).exp(), rel_tol)?.value;
    let b = exp_sinh(|rho| sinhc(root(rho)) * (-rho).exp(), rel_tol)?.value;
    Ok(TimeProfiles { a, b: tau * b })
}

/// Coefficients of the small-α profiles at complex time τ:
/// `a_τ = a0 + α²·a2 + O(α⁴)`, `b_τ = b0 + α²·b2 + O(α⁴)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallAlphaProfile {
    pub a0: C64,
    pub a2: C64,
    pub b0: C64,
    pub b2: C64,
}

impl SmallAlphaProfile {
    pub fn new(beta: f64, tau: C64) -> Self {
        let w = tau * beta;
        let shc = sinhc(w);
        SmallAlphaProfile {
            a0: w.cosh(),
            a2: tau * shc / 2.0,
            b0: tau * shc,
            b2: tau * tau * cosh_sinhc_gap(w) / 2.0,
        }
    }

    pub fn at(&self, alpha: f64) -> TimeProfiles {
        let a2 = alpha * alpha;
        TimeProfiles { a: self.a0 + self.a2 * a2, b: self.b0 + self.b2 * a2 }
    }
}

/// Profiles at imaginary time `it` through O(α²):
/// `a = cos βt + i(α²/2β) sin βt`,
/// `b = i sin(βt)/β + (α²/2β²)(cos βt − sin(βt)/(βt))`,
/// with the β → 0 limit taken inside the series of sinh(w)/w.
pub fn time_profiles_small_alpha(c: &Coupling, t: f64) -> TimeProfiles {
    SmallAlphaProfile::new(c.beta, C64::new(0.0, t)).at(c.alpha)
}
