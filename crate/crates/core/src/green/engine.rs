//! Evaluation of finite combinations Σ c·β^k·E_n(z + jβ) / β^p, where
//!
//! E_n(z′) = (√z′)^{n+2} K_{|n+2|}(|Q|√(−z′)),   ∂_{z′}E_n = (ς i|Q|/2) E_{n−1},
//!
//! ς = sign Im z. For small β the divided differences are summed as a Taylor
//! series around z, which also yields the β → 0 limit exactly.

use crate::error::Result;
use crate::specfun::bessel_k_orders;
use num_complex::Complex64 as C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftTerm {
    pub coef: C64,
    /// index n of E_n
    pub n: i32,
    /// argument is z + shift·β
    pub shift: i32,
    /// explicit power of β multiplying the term
    pub beta_pow: u32,
}

impl ShiftTerm {
    pub fn new(coef: C64, n: i32, shift: i32, beta_pow: u32) -> Self {
        ShiftTerm { coef, n, shift, beta_pow }
    }
}

/// (√z′)^{n+2} K_{|n+2|}(q√(−z′)) for a run of indices n, n−1, …, n−count+1.
fn e_run(n_top: i32, count: usize, z: C64, q: f64) -> Result<Vec<C64>> {
    let w = (-z).sqrt() * q;
    let lowest = n_top - count as i32 + 1;
    let max_order = (n_top + 2).abs().max((lowest + 2).abs()) as usize;
    let ks = bessel_k_orders(max_order, w)?;
    let root = z.sqrt();
    Ok((0..count)
        .map(|m| {
            let n = n_top - m as i32;
            root.powi(n + 2) * ks[(n + 2).unsigned_abs() as usize]
        })
        .collect())
}

/// E_n(z′) on the principal branch.
pub fn e_function(n: i32, z: C64, q: f64) -> Result<C64> {
    Ok(e_run(n, 1, z, q)?[0])
}

const SERIES_RATIO: f64 = 0.6;
const MAX_SERIES_TERMS: usize = 80;

/// Distance from z to the cut [0, ∞) of √(−z).
fn cut_distance(z: C64) -> f64 {
    if z.re > 0.0 {
        z.im.abs()
    } else {
        z.norm()
    }
}

pub(crate) fn eval_combo(terms: &[ShiftTerm], p: u32, z: C64, beta: f64, q: f64) -> Result<C64> {
    let max_shift = terms.iter().map(|t| t.shift.unsigned_abs()).max().unwrap_or(0) as f64;
    let ratio = beta * max_shift / cut_distance(z);
    if ratio < SERIES_RATIO {
        // ratio^m < 1e-17
        let needed = if ratio > 0.0 { (-39.0 / ratio.ln()).ceil() as usize + 3 } else { 1 };
        let v = series(terms, p, z, beta, q, (needed + p as usize).min(MAX_SERIES_TERMS))?;
        if v.re.is_finite() && v.im.is_finite() {
            return Ok(v);
        }
    }
    direct(terms, p, z, beta, q)
}

fn direct(terms: &[ShiftTerm], p: u32, z: C64, beta: f64, q: f64) -> Result<C64> {
    let mut sum = C64::new(0.0, 0.0);
    for t in terms {
        let zs = z + t.shift as f64 * beta;
        sum += t.coef * beta.powi(t.beta_pow as i32) * e_function(t.n, zs, q)?;
    }
    Ok(sum / beta.powi(p as i32))
}

fn series(terms: &[ShiftTerm], p: u32, z: C64, beta: f64, q: f64, count: usize) -> Result<C64> {
    let n_top = terms.iter().map(|t| t.n).max().unwrap_or(0);
    let e = e_run(n_top, count + (n_top - terms.iter().map(|t| t.n).min().unwrap_or(0)) as usize + 1, z, q)?;
    let kappa = C64::new(0.0, crate::green::branch_sign(z) * q / 2.0);
    let max_pow = count + terms.iter().map(|t| t.beta_pow as usize).max().unwrap_or(0);
    let mut coeffs = vec![C64::new(0.0, 0.0); max_pow + 1];
    for t in terms {
        // shift^m κ^m / m!
        let mut w = C64::new(1.0, 0.0);
        for m in 0..=count {
            if m > 0 {
                w = w * kappa * t.shift as f64 / m as f64;
            }
            if t.shift == 0 && m > 0 {
                break;
            }
            let idx = (n_top - (t.n - m as i32)) as usize;
            coeffs[t.beta_pow as usize + m] += t.coef * w * e[idx];
        }
    }
    let mut sum = C64::new(0.0, 0.0);
    let mut bp = 1.0;
    let mut quiet = 0;
    for c in coeffs.iter().skip(p as usize) {
        let term = c * bp;
        sum += term;
        quiet = if term.norm() <= 1e-17 * sum.norm() { quiet + 1 } else { 0 };
        if quiet >= 3 || (beta == 0.0) {
            break;
        }
        bp *= beta;
    }
    Ok(sum)
}

#[cfg(test)]
pub(crate) fn low_order_residual(terms: &[ShiftTerm], p: u32, z: C64, q: f64) -> Vec<C64> {
    // Taylor coefficients below β^p must cancel for the combination to be finite
    let n_top = terms.iter().map(|t| t.n).max().unwrap();
    let e = e_run(n_top, 16, z, q).unwrap();
    let kappa = C64::new(0.0, crate::green::branch_sign(z) * q / 2.0);
    let mut coeffs = vec![C64::new(0.0, 0.0); p as usize];
    for t in terms {
        let mut w = C64::new(1.0, 0.0);
        for m in 0..p as usize {
            if m > 0 {
                w = w * kappa * t.shift as f64 / m as f64;
            }
            let k = t.beta_pow as usize + m;
            if k < p as usize {
                coeffs[k] += t.coef * w * e[(n_top - (t.n - m as i32)) as usize];
            }
        }
    }
    coeffs
}
