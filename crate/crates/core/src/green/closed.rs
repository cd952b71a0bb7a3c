//! Closed-form Green function elements through O(α³).

use super::engine::{e_function, eval_combo, ShiftTerm};
use super::{branch_sign, check_energy, check_point, GreenQuery};
use crate::error::Result;
use crate::kernel::Coupling;
use crate::spinalg::{ComPoint, SpinChannel};
use num_complex::Complex64 as C64;
use std::f64::consts::{PI, SQRT_2};

/// ∫₀^∞ e^{±itz} K⁰_{±it}(x) K⁰_{±it}(X) t^{−n} dt
/// = ±i z^{1+n/2} K_{n+2}(|Q|√(−z)) / (2^{3−n} π³ |Q|^{n+2}).
pub fn macdonald_time_integral(n: i32, z: C64, q_norm: f64) -> Result<C64> {
    check_energy(z)?;
    if !(q_norm > 0.0) {
        return Err(crate::Error::DomainError("Macdonald integral needs |Q| > 0".into()));
    }
    let sg = branch_sign(z);
    let e = e_function(n, z, q_norm)?;
    Ok(C64::new(0.0, sg) * e / (2f64.powi(3 - n) * PI.powi(3) * q_norm.powi(n + 2)))
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn kron(a: i32, b: i32) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Spin-dependent geometric factors of the off-diagonal elements.
struct OffDiagFactors {
    /// multiplies differences built on z − 2β
    lower: C64,
    /// multiplies differences built on z + 2β
    upper: C64,
    quadratic: C64,
}

fn offdiag_factors(out: SpinChannel, inp: SpinChannel, q: &ComPoint) -> OffDiagFactors {
    let (sp, tp) = (out.proj, out.total);
    let (s, t) = (inp.proj, inp.total);
    let (xp, xm, cp, cm) = (q.rel_plus(), q.rel_minus(), q.cm_plus(), q.cm_minus());
    let (par, parp) = (inp.parity(), out.parity());
    let lower = (cm - xm * par) * (kron(sp, 1) * kron(tp, 1) * kron(s, 0))
        - (cp - xp * parp) * (kron(sp, 0) * kron(s, 1) * kron(t, 1));
    let upper = (cm * parp - xm) * (kron(sp, 0) * kron(s, -1) * kron(t, 1))
        - (cp * par - xp) * (kron(sp, -1) * kron(tp, 1) * kron(s, 0));
    let quadratic = (xm * cm * kron(sp, 1) * kron(s, -1) + xp * cp * kron(sp, -1) * kron(s, 1))
        * (2.0 * kron(tp, t) * kron(t, 1))
        + (xm * cp - xp * cm) * (par * kron(sp, s) * kron(s, 0) * (1.0 - kron(tp, t)));
    OffDiagFactors { lower, upper, quadratic }
}

/// Coefficients `[c0, c1, c2, c3]` of R_{σ′σ}(z)(Q) = Σ αᵏ cₖ + O(α⁴).
/// The α-independent coefficients depend on β only.
pub fn green2_coefficients(beta: f64, query: &GreenQuery) -> Result<[C64; 4]> {
    query.validate()?;
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(crate::Error::InvalidParameter(format!("beta must be finite and >= 0, got {beta}")));
    }
    let GreenQuery { z, q, sigma_out: out, sigma_in: inp } = *query;
    let qn = q.norm();
    let sg = branch_sign(z);
    let i_sg = C64::new(0.0, sg);
    let pi3 = PI.powi(3);
    let zero = c(0.0);
    let mut coef = [zero; 4];
    let t = |k: C64, n: i32, shift: i32, bp: u32| ShiftTerm::new(k, n, shift, bp);

    if out == inp {
        let s = inp.proj;
        coef[0] = -e_function(0, z - 2.0 * beta * s as f64, qn)? / (8.0 * pi3 * qn * qn);
        let terms: Vec<ShiftTerm> = match s {
            0 => {
                let g = -i_sg * inp.parity() * (q.rel_minus() * q.cm_plus() + q.rel_plus() * q.cm_minus())
                    / (8.0 * qn);
                vec![
                    t(c(1.0), 1, 0, 0),
                    t(c(-0.5), 1, 2, 0),
                    t(c(-0.5), 1, -2, 0),
                    t(g * 2.0, 2, 0, 0),
                    t(-g, 2, 2, 0),
                    t(-g, 2, -2, 0),
                ]
            }
            1 => vec![t(c(1.0), 1, -2, 0), t(c(-1.0), 1, 0, 0), t(i_sg * qn, 0, -2, 1)],
            _ => vec![t(c(1.0), 1, 2, 0), t(c(-1.0), 1, 0, 0), t(-i_sg * qn, 0, 2, 1)],
        };
        coef[2] = -i_sg / (8.0 * pi3 * qn.powi(3)) * eval_combo(&terms, 2, z, beta, qn)?;
        return Ok(coef);
    }

    let f = offdiag_factors(out, inp, &q);
    if f.lower != zero || f.upper != zero {
        let mut first = Vec::new();
        let mut third = Vec::new();
        if f.lower != zero {
            let a = f.lower;
            first.extend([t(a, 1, 0, 0), t(-a, 1, -2, 0)]);
            third.extend([
                t(a * 3.0, 2, -2, 0),
                t(a * -4.0, 2, 0, 0),
                t(a, 2, 2, 0),
                t(a * i_sg * (2.0 * qn), 1, -2, 1),
            ]);
        }
        if f.upper != zero {
            let a = f.upper;
            first.extend([t(a, 1, 0, 0), t(-a, 1, 2, 0)]);
            third.extend([
                t(a * 3.0, 2, 2, 0),
                t(a * -4.0, 2, 0, 0),
                t(a, 2, -2, 0),
                t(a * -i_sg * (2.0 * qn), 1, 2, 1),
            ]);
        }
        coef[1] = i_sg / (16.0 * SQRT_2 * pi3 * qn.powi(3)) * eval_combo(&first, 1, z, beta, qn)?;
        coef[3] = c(1.0) / (32.0 * SQRT_2 * pi3 * qn.powi(4)) * eval_combo(&third, 3, z, beta, qn)?;
    }
    if f.quadratic != zero {
        let terms = [t(c(2.0), 2, 0, 0), t(c(-1.0), 2, 2, 0), t(c(-1.0), 2, -2, 0)];
        coef[2] = -f.quadratic / (64.0 * pi3 * qn.powi(4)) * eval_combo(&terms, 2, z, beta, qn)?;
    }
    Ok(coef)
}

/// R_{σσ}(z)(Q) at α = 0.
pub fn green2_alpha0(beta: f64, z: C64, q: &ComPoint, sigma: SpinChannel) -> Result<C64> {
    Ok(green2_coefficients(beta, &GreenQuery::new(z, *q, sigma, sigma))?[0])
}

/// Diagonal element through O(α²).
pub fn green2_diag(c: &Coupling, z: C64, q: &ComPoint, sigma: SpinChannel) -> Result<C64> {
    let k = green2_coefficients(c.beta, &GreenQuery::new(z, *q, sigma, sigma))?;
    Ok(k[0] + k[2] * (c.alpha * c.alpha))
}

/// Off-diagonal element (σ′ ≠ σ) through O(α³).
pub fn green2_offdiag(c: &Coupling, query: &GreenQuery) -> Result<C64> {
    if query.sigma_out == query.sigma_in {
        return Err(crate::Error::InvalidChannel(format!(
            "off-diagonal element requested for {} -> {}",
            query.sigma_in, query.sigma_out
        )));
    }
    let k = green2_coefficients(c.beta, query)?;
    let a = c.alpha;
    Ok(k[1] * a + k[2] * (a * a) + k[3] * (a * a * a))
}

/// Any element, diagonal through O(α²) and off-diagonal through O(α³).
pub fn green2(c: &Coupling, query: &GreenQuery) -> Result<C64> {
    check_energy(query.z)?;
    check_point(&query.q)?;
    let k = green2_coefficients(c.beta, query)?;
    let a = c.alpha;
    Ok(k[0] + k[1] * a + k[2] * (a * a) + k[3] * (a * a * a))
}
