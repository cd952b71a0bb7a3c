//! Hypergeometric series: the confluent Humbert function Φ₃ and ₀F₁.

use super::dd::{CDd, Dd};
use super::SeriesControl;
use crate::error::{Error, Result};
use num_complex::Complex64 as C64;

fn check_lower(b: f64) -> Result<()> {
    if b <= 0.0 && b.fract() == 0.0 {
        return Err(Error::InvalidParameter(format!("lower parameter {b} is a non-positive integer")));
    }
    if !b.is_finite() {
        return Err(Error::InvalidParameter(format!("lower parameter {b} is not finite")));
    }
    Ok(())
}

fn check_arg(name: &str, z: C64) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {z} is not finite")))
    }
}

/// Stops once `needed` consecutive contributions are below `rel_tol·|S|`,
/// but never before the index passes `min_index` (terms may still grow).
struct TailRule {
    rel_tol: f64,
    min_index: usize,
    quiet: usize,
}

impl TailRule {
    const NEEDED: usize = 3;

    fn new(rel_tol: f64, min_index: usize) -> Self {
        TailRule { rel_tol, min_index, quiet: 0 }
    }

    fn done(&mut self, index: usize, contribution: f64, sum: f64) -> bool {
        if contribution <= self.rel_tol * sum || contribution == 0.0 {
            self.quiet += 1;
        } else {
            self.quiet = 0;
        }
        index >= self.min_index && self.quiet >= Self::NEEDED
    }
}

/// Φ₃(a; b; x, y) = Σ_{m,n} (a)_m / (b)_{m+n} · xᵐ/m! · yⁿ/n!
///
/// Summed along anti-diagonals m + n = k in double-double arithmetic.
/// `max_terms` bounds the number of anti-diagonals.
pub fn phi3(a: f64, b: f64, x: C64, y: C64, ctl: &SeriesControl) -> Result<C64> {
    ctl.validate()?;
    check_lower(b)?;
    check_arg("x", x)?;
    check_arg("y", y)?;
    if x == C64::new(0.0, 0.0) && y == C64::new(0.0, 0.0) {
        return Ok(C64::new(1.0, 0.0));
    }
    let (xd, yd) = (CDd::from_c64(x), CDd::from_c64(y));
    let from_m0 = y.norm() >= x.norm();
    // ratio of neighbouring terms along a diagonal, up to integer factors
    let ratio = if from_m0 { xd.div(yd) } else { yd.div(xd) };
    let (ad, bd) = (Dd::new(a), Dd::new(b));

    // T(0,k) and T(k,0)
    let mut t0k = CDd::ONE;
    let mut tk0 = CDd::ONE;
    let mut sum = CDd::ONE;
    let min_index = (x.norm() + y.norm()).ceil() as usize + 2;
    let mut rule = TailRule::new(ctl.rel_tol, min_index);
    for k in 1..=ctl.max_terms {
        let kd = Dd::new(k as f64);
        let denom = (bd + Dd::new(k as f64 - 1.0)) * kd;
        t0k = (t0k * yd).div_real(denom);
        tk0 = (tk0 * xd).scale(ad + Dd::new(k as f64 - 1.0)).div_real(denom);

        let mut diag = CDd::ZERO;
        if from_m0 {
            let mut t = t0k;
            for m in 0..=k {
                diag = diag + t;
                if m < k {
                    let num = (ad + Dd::new(m as f64)) * Dd::new((k - m) as f64);
                    t = (t * ratio).scale(num).div_real(Dd::new((m + 1) as f64));
                }
            }
        } else {
            let mut t = tk0;
            for m in (0..=k).rev() {
                diag = diag + t;
                if m > 0 {
                    let den = (ad + Dd::new(m as f64 - 1.0)) * Dd::new((k - m + 1) as f64);
                    t = (t * ratio).scale(Dd::new(m as f64)).div_real(den);
                }
            }
        }
        sum = sum + diag;
        if rule.done(k, diag.norm_f64(), sum.norm_f64()) {
            return Ok(sum.to_c64());
        }
    }
    Err(Error::NonConvergence { what: "phi3 series", iterations: ctl.max_terms })
}

/// ₀F₁(; b; z) = Σ zⁿ / ((b)_n n!)
pub fn hyp0f1(b: f64, z: C64, ctl: &SeriesControl) -> Result<C64> {
    ctl.validate()?;
    check_lower(b)?;
    check_arg("z", z)?;
    let zd = CDd::from_c64(z);
    let mut term = CDd::ONE;
    let mut sum = CDd::ONE;
    let mut rule = TailRule::new(ctl.rel_tol, z.norm().sqrt().ceil() as usize + 2);
    for n in 1..=ctl.max_terms {
        let denom = (Dd::new(b) + Dd::new(n as f64 - 1.0)) * Dd::new(n as f64);
        term = (term * zd).div_real(denom);
        sum = sum + term;
        if rule.done(n, term.norm_f64(), sum.norm_f64()) {
            return Ok(sum.to_c64());
        }
    }
    Err(Error::NonConvergence { what: "0F1 series", iterations: ctl.max_terms })
}

/// Profiles of the full off-axis propagator kernel.
///
/// With u = |x⊥|²/(4t), X = tα²/4, Y = (βt/2)²:
/// `a = Σ L_n(u) Xⁿ Yᵖ / ((1/2)_{n+p} p!)`, `b = t Σ L_n(u) Xⁿ Yᵖ / ((3/2)_{n+p} p!)`
/// and `db` is ∂b/∂u. At u = 0 these are the Φ₃ time profiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaguerreProfiles {
    pub a: C64,
    pub b: C64,
    pub db: C64,
}

pub fn laguerre_profiles(xa: C64, yb: C64, u: C64, t: C64, ctl: &SeriesControl) -> Result<LaguerreProfiles> {
    ctl.validate()?;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    // Laguerre values and derivatives, grown on demand
    let mut lag = vec![one];
    let mut dlag = vec![zero];
    let mut xpow = vec![one];
    let mut ypf = vec![one];
    let (mut poch_half, mut poch_3half) = (1.0f64, 1.0f64);
    let (mut sa, mut sb, mut sd) = (one, one, zero);
    let min_index = (xa.norm() * (1.0 + u.norm()) + yb.norm()).ceil() as usize + 4;
    let mut rule = TailRule::new(ctl.rel_tol, min_index);
    for k in 1..=ctl.max_terms {
        let n = k - 1;
        let next = ((2.0 * n as f64 + 1.0 - u) * lag[n] - if n > 0 { n as f64 * lag[n - 1] } else { zero }) / (n as f64 + 1.0);
        dlag.push(dlag[n] - lag[n]);
        lag.push(next);
        xpow.push(xpow[n] * xa);
        ypf.push(ypf[n] * yb / k as f64);
        poch_half *= k as f64 - 0.5;
        poch_3half *= k as f64 + 0.5;
        let (mut diag, mut ddiag) = (zero, zero);
        for m in 0..=k {
            let w = xpow[m] * ypf[k - m];
            diag += lag[m] * w;
            ddiag += dlag[m] * w;
        }
        let (da, db, dd) = (diag / poch_half, diag / poch_3half, ddiag / poch_3half);
        sa += da;
        sb += db;
        sd += dd;
        let contrib = da.norm().max(db.norm());
        let scale = sa.norm().max(sb.norm());
        if rule.done(k, contrib, scale) {
            return Ok(LaguerreProfiles { a: sa, b: t * sb, db: t * sd });
        }
    }
    Err(Error::NonConvergence { what: "kernel profile series", iterations: ctl.max_terms })
}
