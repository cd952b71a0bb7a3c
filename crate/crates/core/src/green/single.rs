//! Single-particle resolvent kernels as Laplace transforms of the propagator:
//! G₁ = ∫ e^{tz} K⁰_t b_t dt, G₂ = ∫ e^{tz} K⁰_t a_t dt,
//! D^±G₁ = −(x^±/2) ∫ e^{tz} K⁰_t b_t t^{−1} dt, for Re z < −Σ.

use super::QuadratureControl;
use crate::error::{Error, Result};
use crate::kernel::{heat_kernel, sigma_bound, Coupling};
use crate::quad::exp_sinh;
use crate::specfun::{time_profiles, time_profiles_laplace, SeriesControl, TimeProfiles};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SingleKind {
    G1,
    G2,
    DPlusG1,
    DMinusG1,
}

const SERIES_REACH: f64 = 10.0;

fn profiles_real_time(c: &Coupling, t: f64) -> Result<TimeProfiles> {
    let x = t * c.alpha * c.alpha / 4.0;
    let y = (c.beta * t / 2.0).powi(2);
    if x + y < SERIES_REACH {
        time_profiles(c, C64::new(t, 0.0), &SeriesControl::default())
    } else {
        time_profiles_laplace(c, C64::new(t, 0.0), 1e-14)
    }
}

pub fn single_particle_green(z: C64, x: [f64; 3], c: &Coupling, which: SingleKind, ctl: &QuadratureControl) -> Result<C64> {
    ctl.validate()?;
    let sigma = sigma_bound(c);
    if !(z.re < -sigma) {
        return Err(Error::DomainError(format!("need Re z < -{sigma}, got {z}")));
    }
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 == 0.0 && which != SingleKind::G1 {
        return Err(Error::DomainError(format!("{which:?} is singular at x = 0")));
    }
    let decay = -(z.re + sigma);
    let t_cut = ctl.t_max / decay;
    let failure = RefCell::new(None);
    let integrand = |t: f64| -> C64 {
        if t > t_cut {
            return C64::new(0.0, 0.0);
        }
        let (k, p) = match (heat_kernel(C64::new(t, 0.0), x), profiles_real_time(c, t)) {
            (Ok(k), Ok(p)) => (k, p),
            (Err(e), _) | (_, Err(e)) => {
                failure.borrow_mut().get_or_insert(e);
                return C64::new(0.0, 0.0);
            }
        };
        let profile = match which {
            SingleKind::G2 => p.a,
            SingleKind::G1 => p.b,
            SingleKind::DPlusG1 | SingleKind::DMinusG1 => p.b / t,
        };
        (z * t).exp() * k * profile
    };
    let rel = (ctl.abs_tol * 1e-4).max(1e-14);
    let value = exp_sinh(integrand, rel)?.value;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(match which {
        SingleKind::DPlusG1 => -C64::new(x[0], x[1]) / 2.0 * value,
        SingleKind::DMinusG1 => -C64::new(x[0], -x[1]) / 2.0 * value,
        _ => value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn free_resolvent_kernels() {
        let ctl = QuadratureControl::default();
        let c = Coupling::free();
        let z = C64::new(-3.0, 0.0);
        let x = [0.6, 0.0, 0.8];
        let k = (-z).sqrt();
        let g2 = single_particle_green(z, x, &c, SingleKind::G2, &ctl).unwrap();
        let want2 = (-k).exp() / (4.0 * PI);
        assert!((g2 - want2).norm() < 1e-10 * want2.norm(), "{g2} {want2}");
        let g1 = single_particle_green(z, x, &c, SingleKind::G1, &ctl).unwrap();
        let want1 = (-k).exp() / (8.0 * PI * k);
        assert!((g1 - want1).norm() < 1e-10 * want1.norm(), "{g1} {want1}");
    }

    #[test]
    fn domain_errors() {
        let ctl = QuadratureControl::default();
        let c = Coupling::new(0.5, 1.0).unwrap();
        assert!(single_particle_green(C64::new(-0.5, 0.0), [1.0, 0.0, 0.0], &c, SingleKind::G1, &ctl).is_err());
        assert!(single_particle_green(C64::new(-3.0, 0.0), [0.0; 3], &c, SingleKind::G2, &ctl).is_err());
        assert!(single_particle_green(C64::new(-3.0, 0.0), [0.0; 3], &c, SingleKind::G1, &ctl).is_ok());
    }
}
