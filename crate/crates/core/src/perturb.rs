//! Diagnostics of the zero-range (supersingular) perturbation: the
//! normalization constant N_σ, the H₋₄ norm, the logarithmic divergence that
//! excludes H₋₃, and the real roots λ of the singular-point relation.

use crate::error::{Error, Result};
use crate::green::green2_diag;
use crate::kernel::Coupling;
use crate::spinalg::{ComPoint, SpinChannel};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

/// N at α = β = 0.
pub const FREE_NORM_CONST: f64 = 16.0 * SQRT_2 * PI;

/// Below this β the α² bracket is divided by β² through its Taylor series.
pub const SMALL_BETA: f64 = 1e-3;

/// Default z-step of the finite-difference derivatives.
pub const DEFAULT_Z_STEP: f64 = 1e-2;

/// |c₁| above this counts as a logarithmic divergence.
pub const DIVERGENCE_THRESHOLD: f64 = 1e-3;

/// θ_β = arg(2β + i)
pub fn theta_beta(beta: f64) -> f64 {
    FRAC_PI_2 - (2.0 * beta).atan()
}

fn alpha0_part(sigma: SpinChannel, beta: f64) -> f64 {
    let th = theta_beta(beta);
    let w = 1.0 + 4.0 * beta * beta;
    match sigma.proj {
        0 => PI,
        1 => 2.0 * (-2.0 * beta + th * w),
        _ => 2.0 * (2.0 * beta + (PI - th) * w),
    }
}

/// α² bracket of N_σ⁻², already divided by β².
fn alpha2_part(sigma: SpinChannel, beta: f64) -> f64 {
    let b2 = beta * beta;
    if beta < SMALL_BETA {
        let (b4, b6) = (b2 * b2, b2 * b2 * b2);
        return match sigma.proj {
            0 => 12.0 + 8.0 * b2 - 64.0 * b4 / 15.0 + 192.0 * b6 / 35.0,
            s => 12.0 - s as f64 * 8.0 * PI * beta + 24.0 * b2 - 64.0 * b4 / 3.0 + 192.0 * b6 / 5.0,
        };
    }
    let th = theta_beta(beta);
    let log = (4.0 * b2).ln_1p();
    let root = (1.0 + 4.0 * b2).sqrt();
    let bracket = match sigma.proj {
        0 => {
            0.25 * (2.0 * beta * (PI * (5.0 + 4.0 * b2) - 11.0 * th + 4.0 * beta * (2.0 - 3.0 * beta * th))
                - 4.0 * log
                + beta
                    * root
                    * ((4.0 * beta * (PI - th) - log) * th.cos() + 2.0 * (PI - th + beta * log) * th.sin()))
        }
        1 => 8.0 * b2 * (1.0 - 2.0 * beta * th) + log,
        _ => 8.0 * b2 * (1.0 + 2.0 * beta * (PI - th)) + log,
    };
    bracket / b2
}

/// N_σ⁻² through O(α²).
pub fn norm_const_inv_sq(sigma: SpinChannel, c: &Coupling) -> f64 {
    alpha0_part(sigma, c.beta) / (512.0 * PI.powi(3))
        + c.alpha * c.alpha * alpha2_part(sigma, c.beta) / (1536.0 * PI.powi(3))
}

/// Normalization constant N_σ; fails when the truncated N_σ⁻² is not positive
/// (α outside the small-coupling regime).
pub fn norm_const(sigma: SpinChannel, c: &Coupling) -> Result<f64> {
    let inv = norm_const_inv_sq(sigma, c);
    if !(inv > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "N^-2 = {inv} is not positive at alpha = {}, beta = {}",
            c.alpha, c.beta
        )));
    }
    Ok(inv.powf(-0.5))
}

/// ‖ψ_σ‖*₋₄ = N_σ/(16√2π).
pub fn h_minus4_norm(sigma: SpinChannel, c: &Coupling) -> Result<f64> {
    Ok(norm_const(sigma, c)? / FREE_NORM_CONST)
}

/// The two limits |Q| → 0 appearing in the class argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Combination {
    /// i[R(−i) − R(i)] − R(−i)′ − R(i)′, finite as |Q| → 0
    MinusFour,
    /// 3i[R(−i)′ − R(i)′] + R(−i)″ + R(i)″, O(log|Q|)
    MinusThree,
}

/// Fixed generic direction in ℝ⁶ along which |Q| → 0.
pub fn approach_point(q_norm: f64) -> ComPoint {
    let d = [0.5, 0.3, -0.2, 0.4, -0.6, 0.3];
    let n = d.iter().map(|v: &f64| v * v).sum::<f64>().sqrt();
    let k = q_norm / n;
    ComPoint::new([d[0] * k, d[1] * k, d[2] * k], [d[3] * k, d[4] * k, d[5] * k])
}

/// R_{σσ} and its first two z-derivatives by 5-point central differences.
fn diag_with_derivatives(c: &Coupling, z: C64, q: &ComPoint, sigma: SpinChannel, h: f64) -> Result<[C64; 3]> {
    let f = |k: f64| green2_diag(c, z + k * h, q, sigma);
    let (m2, m1, c0, p1, p2) = (f(-2.0)?, f(-1.0)?, f(0.0)?, f(1.0)?, f(2.0)?);
    let d1 = (m2 - m1 * 8.0 + p1 * 8.0 - p2) / (12.0 * h);
    let d2 = (-m2 + m1 * 16.0 - c0 * 30.0 + p1 * 16.0 - p2) / (12.0 * h * h);
    Ok([c0, d1, d2])
}

/// Value of a class combination at one |Q| (real up to rounding).
pub fn q_limit_combination(which: Combination, sigma: SpinChannel, c: &Coupling, q_norm: f64, z_step: f64) -> Result<C64> {
    if !(q_norm > 0.0) || !(z_step > 0.0) {
        return Err(Error::InvalidParameter("|Q| and the z-step must be positive".into()));
    }
    let q = approach_point(q_norm);
    let i = C64::new(0.0, 1.0);
    let up = diag_with_derivatives(c, i, &q, sigma, z_step)?;
    let down = diag_with_derivatives(c, -i, &q, sigma, z_step)?;
    Ok(match which {
        Combination::MinusFour => i * (down[0] - up[0]) - down[1] - up[1],
        Combination::MinusThree => i * 3.0 * (down[1] - up[1]) + down[2] + up[2],
    })
}

/// Solves the small dense system `a x = b` by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if a[piv][col].abs() < 1e-300 {
            return Err(Error::FitFailure("singular normal equations".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for k in col..n {
                a[r][k] -= f * a[col][k];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Ok(x)
}

/// Least squares of `values` on the given basis functions of |Q|.
pub fn least_squares(q_values: &[f64], values: &[f64], basis: &[&dyn Fn(f64) -> f64]) -> Result<(Vec<f64>, f64)> {
    let m = basis.len();
    if q_values.len() < m || q_values.len() != values.len() {
        return Err(Error::FitFailure(format!("{} points for {m} coefficients", q_values.len())));
    }
    let rows: Vec<Vec<f64>> = q_values.iter().map(|&q| basis.iter().map(|f| f(q)).collect()).collect();
    let mut ata = vec![vec![0.0; m]; m];
    let mut atb = vec![0.0; m];
    for (row, &y) in rows.iter().zip(values) {
        for i in 0..m {
            atb[i] += row[i] * y;
            for j in 0..m {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let coef = solve(ata, atb)?;
    let resid = rows
        .iter()
        .zip(values)
        .map(|(row, y)| (y - row.iter().zip(&coef).map(|(a, b)| a * b).sum::<f64>()).abs())
        .fold(0.0, f64::max);
    Ok((coef, resid))
}

/// Limit of the H₋₄ combination from |Q| samples, fitting L + c·Q²log|Q| + d·Q².
pub fn h_minus4_limit(sigma: SpinChannel, c: &Coupling, q_values: &[f64], z_step: f64) -> Result<f64> {
    let values = q_values
        .iter()
        .map(|&q| Ok(q_limit_combination(Combination::MinusFour, sigma, c, q, z_step)?.re))
        .collect::<Result<Vec<f64>>>()?;
    let (coef, _) = least_squares(q_values, &values, &[&|_| 1.0, &|q| q * q * q.ln(), &|q| q * q])?;
    Ok(coef[0])
}

/// ‖ψ_σ‖*₋₄² = (N_σ²/4)·lim with the Green function of the free pair (α = β = 0).
pub fn h_minus4_norm_sq_by_limit(sigma: SpinChannel, c: &Coupling, q_values: &[f64]) -> Result<f64> {
    let n = norm_const(sigma, c)?;
    Ok(n * n / 4.0 * h_minus4_limit(sigma, &Coupling::free(), q_values, DEFAULT_Z_STEP)?)
}

/// Fits c₀ + c₁ log|Q| to the H₋₃ combination; returns (|c₁| > threshold, c₁).
pub fn h_minus3_divergence(sigma: SpinChannel, c: &Coupling, q_values: &[f64]) -> Result<(bool, f64)> {
    h_minus3_divergence_with(sigma, c, q_values, DEFAULT_Z_STEP)
}

pub fn h_minus3_divergence_with(sigma: SpinChannel, c: &Coupling, q_values: &[f64], z_step: f64) -> Result<(bool, f64)> {
    let slope = log_slope(Combination::MinusThree, sigma, c, q_values, z_step)?;
    Ok((slope.abs() > DIVERGENCE_THRESHOLD, slope))
}

/// Fitted coefficient of log|Q| for either combination.
pub fn log_slope(which: Combination, sigma: SpinChannel, c: &Coupling, q_values: &[f64], z_step: f64) -> Result<f64> {
    if q_values.len() < 4 || q_values.windows(2).any(|w| !(w[1] < w[0])) || q_values.iter().any(|q| !(*q > 0.0)) {
        return Err(Error::InvalidParameter(
            "q_values must hold at least 4 positive values decreasing toward 0".into(),
        ));
    }
    let values = q_values
        .iter()
        .map(|&q| Ok(q_limit_combination(which, sigma, c, q, z_step)?.re))
        .collect::<Result<Vec<f64>>>()?;
    let (coef, resid) = least_squares(q_values, &values, &[&|_| 1.0, &|q: f64| q.ln()])?;
    let lo = values.iter().cloned().fold(f64::MAX, f64::min);
    let hi = values.iter().cloned().fold(f64::MIN, f64::max);
    // a flat data set is judged against the spread a threshold-sized slope would give
    let log_span = (q_values[0] / q_values[q_values.len() - 1]).ln();
    let range = (hi - lo).max(DIVERGENCE_THRESHOLD * log_span);
    if resid > 0.1 * range {
        return Err(Error::FitFailure(format!("log fit residual {resid:.3e} exceeds 10% of range {range:.3e}")));
    }
    Ok(coef[1])
}

/// (1+λ)[2(1+3λ) + π(γ(1+λ) − 1)] − 4λ² log(−λ)
pub fn lambda_relation(gamma: f64, lambda: f64) -> f64 {
    (1.0 + lambda) * (2.0 * (1.0 + 3.0 * lambda) + PI * (gamma * (1.0 + lambda) - 1.0))
        - 4.0 * lambda * lambda * (-lambda).ln()
}

pub const DEFAULT_SCAN_POINTS: usize = 10_000;

/// Roots of the λ relation in (lo, hi) ⊂ (−∞, 0).
pub fn lambda_roots(gamma: f64, interval: (f64, f64)) -> Result<Vec<f64>> {
    lambda_roots_with(gamma, interval, DEFAULT_SCAN_POINTS)
}

pub fn lambda_roots_with(gamma: f64, interval: (f64, f64), scan_points: usize) -> Result<Vec<f64>> {
    let (lo, hi) = interval;
    if !(lo < hi && hi < 0.0) || !lo.is_finite() || !gamma.is_finite() || scan_points < 2 {
        return Err(Error::InvalidParameter(format!("bad search interval ({lo}, {hi}) or scan size")));
    }
    let f = |l: f64| lambda_relation(gamma, l);
    let mut roots: Vec<f64> = Vec::new();
    let step = (hi - lo) / scan_points as f64;
    let mut a = lo;
    let mut fa = f(a);
    for k in 1..=scan_points {
        let b = if k == scan_points { hi } else { lo + k as f64 * step };
        let fb = f(b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa.signum() != fb.signum() && fb != 0.0 {
            roots.push(bisect(&f, a, b, fa));
        }
        a = b;
        fa = fb;
    }
    if fa == 0.0 {
        roots.push(a);
    }
    if lo < -1.0 && -1.0 < hi {
        roots.push(-1.0);
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-9 * y.abs().max(1.0));
    // snap the exact root
    for r in roots.iter_mut() {
        if (*r + 1.0).abs() <= 1e-9 {
            *r = -1.0;
        }
    }
    Ok(roots)
}

fn bisect(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    if f(a).abs() <= f(b).abs() {
        a
    } else {
        b
    }
}

/// N_σ as β ↘ 0 at fixed α, by Neville extrapolation from β = 4, 2, 1 × 10⁻⁶.
pub fn beta_limit(sigma: SpinChannel, alpha: f64) -> Result<f64> {
    let betas = [4e-6, 2e-6, 1e-6];
    let mut p = betas
        .iter()
        .map(|&b| norm_const(sigma, &Coupling { alpha, beta: b }))
        .collect::<Result<Vec<f64>>>()?;
    for m in 1..betas.len() {
        for i in 0..betas.len() - m {
            p[i] = (p[i + 1] * betas[i] - p[i] * betas[i + m]) / (betas[i] - betas[i + m]);
        }
    }
    Ok(p[0])
}

/// Summary written by the `report` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbReport {
    pub sigma: SpinChannel,
    pub alpha: f64,
    pub beta: f64,
    pub n_const: f64,
    pub h4_norm: f64,
    pub h3_divergent: bool,
    pub log_slope: f64,
    pub gamma: f64,
    pub lambda_roots: Vec<f64>,
    /// λ = −1 solves the relation for every γ; whether it is a physical
    /// singular point is left open, so its presence is flagged separately.
    pub lambda_minus_one: bool,
}

pub const DEFAULT_Q_VALUES: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

pub fn perturb_report(sigma: SpinChannel, c: &Coupling, gamma: f64, interval: (f64, f64)) -> Result<PerturbReport> {
    let n_const = norm_const(sigma, c)?;
    let (h3_divergent, log_slope) = h_minus3_divergence(sigma, c, &DEFAULT_Q_VALUES)?;
    let roots = lambda_roots(gamma, interval)?;
    Ok(PerturbReport {
        sigma,
        alpha: c.alpha,
        beta: c.beta,
        n_const,
        h4_norm: n_const / FREE_NORM_CONST,
        h3_divergent,
        log_slope,
        gamma,
        lambda_minus_one: roots.contains(&-1.0),
        lambda_roots: roots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(a: f64, b: f64) -> Coupling {
        Coupling::new(a, b).unwrap()
    }

    #[test]
    fn free_constant() {
        for s in SpinChannel::ALL {
            let n = norm_const(s, &Coupling::free()).unwrap();
            assert!((n - FREE_NORM_CONST).abs() < 1e-12 * FREE_NORM_CONST);
            assert!((h_minus4_norm(s, &Coupling::free()).unwrap() - 1.0).abs() < 1e-14);
        }
        assert!((FREE_NORM_CONST - 71.086_2).abs() < 1e-4);
    }

    #[test]
    fn theta_at_half() {
        assert!((theta_beta(0.5) - PI / 4.0).abs() < 1e-15);
        assert!((theta_beta(0.0) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn channels_merge_as_beta_vanishes() {
        for s in SpinChannel::ALL {
            let lim = beta_limit(s, 0.0).unwrap();
            assert!((lim - FREE_NORM_CONST).abs() < 1e-8 * FREE_NORM_CONST, "{s} {lim}");
            // at finite β the triplet branches move linearly
            let near = norm_const(s, &cp(0.0, 1e-6)).unwrap();
            assert!((near - FREE_NORM_CONST).abs() < 1e-5 * FREE_NORM_CONST);
        }
    }

    #[test]
    fn continuous_across_series_switch() {
        for s in SpinChannel::ALL {
            let below = alpha2_part(s, SMALL_BETA * (1.0 - 1e-12));
            let above = alpha2_part(s, SMALL_BETA);
            assert!((below - above).abs() < 1e-8, "{s} {below} {above}");
        }
    }

    #[test]
    fn singlet_bracket_matches_reduced_form() {
        // the s = 0 bracket collapses to 2·atan(2β)(3β + 4β³) + 4β² − log(1 + 4β²)
        for b in [0.01f64, 0.2, 0.5, 1.3, 2.0] {
            let reduced = 2.0 * (2.0 * b).atan() * (3.0 * b + 4.0 * b * b * b) + 4.0 * b * b - (4.0 * b * b).ln_1p();
            let got = alpha2_part(SpinChannel::ALL[1], b) * b * b;
            assert!((got - reduced).abs() < 1e-13 * reduced.abs().max(1.0), "{b}");
        }
    }

    #[test]
    fn norms_positive_on_the_small_coupling_box() {
        for s in SpinChannel::ALL {
            for i in 0..=10 {
                for j in 0..=20 {
                    let c = cp(0.01 * i as f64, 0.1 * j as f64);
                    assert!(h_minus4_norm(s, &c).unwrap() > 0.0);
                }
            }
        }
    }

    #[test]
    fn q_limit_route_reproduces_norm() {
        let c = cp(0.0, 0.5);
        for s in SpinChannel::ALL {
            let h4 = h_minus4_norm(s, &c).unwrap();
            let route = h_minus4_norm_sq_by_limit(s, &c, &[0.1, 0.05, 0.025]).unwrap();
            assert!((route / (h4 * h4) - 1.0).abs() < 1e-3, "{s}");
            // with the Green function of the same β the functional is a unit vector
            let n = norm_const(s, &c).unwrap();
            let unit = n * n / 4.0 * h_minus4_limit(s, &c, &[0.1, 0.05, 0.025], DEFAULT_Z_STEP).unwrap();
            assert!((unit - 1.0).abs() < 1e-3, "{s} {unit}");
        }
    }

    #[test]
    fn combinations_are_real() {
        let c = cp(0.04, 0.7);
        for s in SpinChannel::ALL {
            for w in [Combination::MinusFour, Combination::MinusThree] {
                let v = q_limit_combination(w, s, &c, 0.05, DEFAULT_Z_STEP).unwrap();
                assert!(v.im.abs() < 1e-8 * v.re.abs().max(1e-3), "{s} {w:?} {v}");
            }
        }
    }

    #[test]
    fn minus_three_diverges_and_minus_four_does_not() {
        let free = Coupling::free();
        let s = SpinChannel::ALL[3];
        let (div, c1) = h_minus3_divergence(s, &free, &DEFAULT_Q_VALUES).unwrap();
        assert!(div);
        // leading log coefficient of the free pair
        assert!((c1 + 1.0 / (4.0 * PI.powi(3))).abs() < 0.01 / (4.0 * PI.powi(3)) * 2.0, "{c1}");
        let control = log_slope(Combination::MinusFour, s, &free, &DEFAULT_Q_VALUES, DEFAULT_Z_STEP).unwrap();
        assert!(control.abs() < DIVERGENCE_THRESHOLD);
    }

    #[test]
    fn slope_stable_under_step_halving() {
        let c = cp(0.0, 0.5);
        for s in SpinChannel::ALL {
            let a = h_minus3_divergence_with(s, &c, &DEFAULT_Q_VALUES, DEFAULT_Z_STEP).unwrap().1;
            let b = h_minus3_divergence_with(s, &c, &DEFAULT_Q_VALUES, DEFAULT_Z_STEP / 2.0).unwrap().1;
            assert!((a - b).abs() <= 0.01 * a.abs());
        }
    }

    #[test]
    fn q_values_validated() {
        let c = Coupling::free();
        let s = SpinChannel::ALL[0];
        assert!(h_minus3_divergence(s, &c, &[0.2, 0.1, 0.05]).is_err());
        assert!(h_minus3_divergence(s, &c, &[0.1, 0.2, 0.05, 0.01]).is_err());
    }

    #[test]
    fn lambda_minus_one_always_present() {
        for g in [-3.0, 0.0, 0.7, 5.0] {
            let r = lambda_roots(g, (-2.0, -0.5)).unwrap();
            assert!(r.contains(&-1.0), "{g} {r:?}");
            assert_eq!(lambda_relation(g, -1.0), 0.0);
        }
    }

    #[test]
    fn lambda_roots_satisfy_relation() {
        let r = lambda_roots(0.0, (-10.0, -1e-6)).unwrap();
        assert!(!r.is_empty());
        for l in &r {
            assert!(*l < 0.0 && lambda_relation(0.0, *l).abs() <= 1e-12, "{l}");
        }
        let finer = lambda_roots_with(0.0, (-10.0, -1e-6), 2 * DEFAULT_SCAN_POINTS).unwrap();
        assert_eq!(r.len(), finer.len());
    }

    #[test]
    fn lambda_interval_checked() {
        assert!(lambda_roots(0.0, (-1.0, 0.5)).is_err());
        assert!(lambda_roots(0.0, (-1.0, -2.0)).is_err());
    }

    #[test]
    fn report_serializes() {
        let r = perturb_report(SpinChannel::ALL[0], &cp(0.02, 0.5), 0.0, (-10.0, -1e-6)).unwrap();
        let js = serde_json::to_value(&r).unwrap();
        assert_eq!(js["sigma"]["S"], 1);
        assert!(js["h3_divergent"].as_bool().unwrap());
    }
}
