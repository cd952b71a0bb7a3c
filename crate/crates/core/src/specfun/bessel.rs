//! Macdonald functions K_ν(z) of integer order for Re z > 0.
//!
//! |z| ≤ 2: ascending series for K₀, K₁ and upward recurrence.
//! |z| > 2: K_ν(z) = √π (z/2)^ν / Γ(ν+½) ∫₁^∞ e^{−zt} (t²−1)^{ν−½} dt on the
//! ray t = 1 + s·e^{−i arg z}, which makes e^{−zt} decay without oscillation.
//! With s = w² the integrand is a smooth even function of w and the
//! trapezoidal rule converges geometrically.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_RADIUS: f64 = 2.0;

fn check_domain(z: C64) -> Result<()> {
    if !(z.re > 0.0) || !z.im.is_finite() || !z.re.is_finite() {
        return Err(Error::DomainError(format!("K_nu needs Re z > 0, got {z}")));
    }
    Ok(())
}

fn series_k0_k1(z: C64) -> (C64, C64) {
    let q = z * z / 4.0;
    let log_half = (z / 2.0).ln();
    let (mut i0, mut i1s, mut k0s, mut k1s) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    // term_k = q^k/(k!)^2 and q^k/(k!(k+1)!)
    let mut t0 = C64::new(1.0, 0.0);
    let mut t1 = C64::new(1.0, 0.0);
    let mut harmonic = 0.0;
    for k in 0..60 {
        if k > 0 {
            let kf = k as f64;
            t0 = t0 * q / (kf * kf);
            t1 = t1 * q / (kf * (kf + 1.0));
            harmonic += 1.0 / kf;
        }
        let psi_k1 = -EULER_GAMMA + harmonic;
        let psi_k2 = psi_k1 + 1.0 / (k as f64 + 1.0);
        i0 += t0;
        i1s += t1;
        k0s += t0 * harmonic;
        k1s += t1 * (psi_k1 + psi_k2);
        if t0.norm() < 1e-18 * i0.norm() && k > 2 {
            break;
        }
    }
    let i1 = z / 2.0 * i1s;
    let k0 = -(log_half + EULER_GAMMA) * i0 + k0s;
    let k1 = z.inv() + log_half * i1 - z / 4.0 * k1s;
    (k0, k1)
}

/// √π / Γ(ν+½) = 4^ν ν! / (2ν)!
fn inv_gamma_half_ratio(nu: u32) -> f64 {
    let mut r = 1.0;
    for j in 1..=nu {
        r *= 4.0 * j as f64 / ((2 * j - 1) as f64 * (2 * j) as f64);
    }
    r
}

fn integral_k(nu: u32, z: C64) -> C64 {
    let r = z.norm();
    let rot = z.conj() / r; // e^{-i arg z}
    let h = (0.05f64).min(0.4 / r.sqrt());
    let p = nu as f64 - 0.5;
    let f = |w: f64| -> C64 {
        let w2 = w * w;
        (C64::new(2.0, 0.0) + rot * w2).powf(p) * (w2.powi(nu as i32) * (-r * w2).exp())
    };
    let mut sum = f(0.0);
    let peak = (nu as f64 / r).sqrt() * 2.0 + 1.0 / r.sqrt();
    let mut j = 1usize;
    loop {
        let w = j as f64 * h;
        let v = f(w);
        sum += 2.0 * v;
        if w > peak && v.norm() < 1e-18 * sum.norm() {
            break;
        }
        j += 1;
        if j > 200_000 {
            break;
        }
    }
    let phase = rot.powf(nu as f64 + 0.5);
    inv_gamma_half_ratio(nu) * (z / 2.0).powu(nu) * (-z).exp() * phase * sum * h
}

/// K_ν(z) for ν ∈ 0..=4 and Re z > 0 (principal branch).
pub fn bessel_k(nu: u32, z: C64) -> Result<C64> {
    if nu > 4 {
        return Err(Error::InvalidParameter(format!("order {nu} outside 0..=4")));
    }
    check_domain(z)?;
    if z.norm() > SERIES_RADIUS {
        return Ok(integral_k(nu, z));
    }
    let seq = bessel_k_orders(nu as usize, z)?;
    Ok(seq[nu as usize])
}

/// K₀(z), …, K_max(z) by upward recurrence (stable for K).
pub fn bessel_k_orders(max: usize, z: C64) -> Result<Vec<C64>> {
    check_domain(z)?;
    let (k0, k1) = if z.norm() > SERIES_RADIUS {
        (integral_k(0, z), integral_k(1, z))
    } else {
        series_k0_k1(z)
    };
    let mut out = Vec::with_capacity(max + 1);
    out.push(k0);
    if max >= 1 {
        out.push(k1);
    }
    for nu in 1..max {
        let next = out[nu - 1] + 2.0 * nu as f64 / z * out[nu];
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn reference_values() {
        // K_0(1), K_1(1), K_2(3), K_4(0.5): classical tables
        let cases = [
            (0, 1.0, 0.421_024_438_240_708_3),
            (1, 1.0, 0.601_907_230_197_234_6),
            (2, 3.0, 0.061_510_458_471_742_07),
            (4, 0.5, 752.245_097_910_404),
            (2, 25.0, 3.746_783_808_069_109e-12),
        ];
        for (nu, x, want) in cases {
            let got = bessel_k(nu, C64::new(x, 0.0)).unwrap();
            assert!(rel(got, C64::new(want, 0.0)) < 1e-13, "K_{nu}({x}) = {got}");
        }
    }

    #[test]
    fn series_and_integral_agree_at_switch() {
        for arg in [0.0f64, 0.7, 1.3, -1.4] {
            let z = C64::from_polar(SERIES_RADIUS, arg);
            let (k0, k1) = series_k0_k1(z);
            assert!(rel(k0, integral_k(0, z)) < 1e-14);
            assert!(rel(k1, integral_k(1, z)) < 1e-14);
        }
    }

    #[test]
    fn near_imaginary_axis() {
        // K_0(ix) = -(π/2)(Y_0(x) + i J_0(x))
        let z = C64::new(1e-12, 5.0);
        let want = C64::new(0.484_618_352_492_666_7, 0.278_968_356_031_195_9);
        assert!(rel(bessel_k(0, z).unwrap(), want) < 1e-11);
    }

    #[test]
    fn domain() {
        assert!(matches!(bessel_k(0, C64::new(0.0, 1.0)), Err(Error::DomainError(_))));
        assert!(matches!(bessel_k(0, C64::new(-1.0, 0.0)), Err(Error::DomainError(_))));
        assert!(bessel_k(5, C64::new(1.0, 0.0)).is_err());
    }
}
