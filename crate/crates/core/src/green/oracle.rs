//! ε-regularized time quadrature. Every Green function element is an integral
//!
//! ∫₀^∞ e^{±itz} e^{±iQ²/(4t)} e^{−ε/t} (±4πit)^{−3} F(t) dt,
//!
//! split at t = 1. On [1, ∞) the path is rotated to t = 1 + w·e^{iθ} so every
//! energy z + jβ appearing in F decays; on (0, 1] the substitution u = 1/t with
//! u = 1 ± iv turns e^{±iQ²u/4} into a decaying exponential. Each piece is an
//! exp-sinh integral; the results for the ε sequence are extrapolated to ε = 0
//! by Neville's scheme.

use super::{branch_sign, check_energy, check_point, GreenQuery, QuadratureControl};
use crate::error::{Error, Result};
use crate::kernel::Coupling;
use crate::quad::exp_sinh_many;
use crate::specfun::{time_profiles_laplace, SmallAlphaProfile};
use crate::spinalg::{cgc_matrix, CgcConvention, ComPoint, SpinChannel};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::cell::RefCell;
use std::f64::consts::PI;

const PIECE_TOL: f64 = 1e-12;
const MAX_EXTRA_EPS: usize = 6;

/// Integrand factor F(t) of the time integral, possibly vector-valued.
pub trait TimeIntegrand: Sync {
    fn outputs(&self) -> usize;
    /// Real offsets j·β such that F(t) grows at most like Σ e^{±i t offset}.
    fn energy_shifts(&self) -> Vec<f64>;
    /// Fills `out` with F(t); `sign` is +1 for Im z > 0 and −1 otherwise.
    fn eval(&self, sign: f64, t: C64, out: &mut [C64]) -> Result<()>;
}

/// Extrapolated value, its residual and the per-ε values it came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleValue {
    pub value: C64,
    pub residual: f64,
    /// regulator values actually used (the control sequence, possibly continued)
    pub eps: Vec<f64>,
    pub per_eps: Vec<C64>,
}

/// Neville extrapolation to ε = 0 over all points, and over all but the largest ε.
fn extrapolate(eps: &[f64], vals: &[C64]) -> (C64, C64) {
    let neville = |xs: &[f64], ys: &[C64]| -> C64 {
        let mut p: Vec<C64> = ys.to_vec();
        let n = xs.len();
        for m in 1..n {
            for i in 0..n - m {
                let (xi, xj) = (xs[i], xs[i + m]);
                p[i] = (p[i + 1] * xi - p[i] * xj) / (xi - xj);
            }
        }
        p[0]
    };
    let full = neville(eps, vals);
    let reduced = if eps.len() > 1 { neville(&eps[1..], &vals[1..]) } else { vals[0] };
    (full, reduced)
}

/// Rounding floor of the extrapolated value: unit roundoff times the
/// Lebesgue constant of the interpolation weights at ε = 0.
fn rounding_floor(eps: &[f64], vals: &[C64]) -> f64 {
    let lebesgue: f64 = (0..eps.len())
        .map(|i| {
            (0..eps.len())
                .filter(|&j| j != i)
                .map(|j| (eps[j] / (eps[j] - eps[i])).abs())
                .product::<f64>()
        })
        .sum();
    let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    f64::EPSILON * lebesgue * scale
}

fn contour_angle(sign: f64, z: C64, shifts: &[f64]) -> Result<f64> {
    let phases: Vec<f64> = shifts.iter().map(|s| (z + s).arg()).collect();
    let hi = phases.iter().cloned().fold(f64::MIN, f64::max);
    let lo = phases.iter().cloned().fold(f64::MAX, f64::min);
    if hi - lo >= PI {
        return Err(Error::DomainError("energy offsets straddle the real axis".into()));
    }
    Ok(if sign > 0.0 { (PI - hi - lo) / 2.0 } else { (-PI - hi - lo) / 2.0 })
}

/// ∫₀^∞ e^{±itz} e^{±iQ²/(4t)} e^{−ε/t} (±4πit)^{−3} F(t) dt for each ε of the
/// control sequence, extrapolated to ε = 0. While the extrapolation residual
/// exceeds `abs_tol` the sequence is continued with its last ratio, up to six
/// more values; after that the result is `NonConvergence`.
pub fn regularized_time_quadrature<I: TimeIntegrand>(
    integrand: &I,
    z: C64,
    q2: f64,
    ctl: &QuadratureControl,
) -> Result<Vec<OracleValue>> {
    check_energy(z)?;
    ctl.validate()?;
    if !(q2 > 0.0) {
        return Err(Error::DomainError("time quadrature needs |Q| > 0".into()));
    }
    let sign = branch_sign(z);
    let isg = C64::new(0.0, sign);
    let shifts = integrand.energy_shifts();
    let theta = contour_angle(sign, z, &shifts)?;
    let dir = C64::from_polar(1.0, theta);
    let rate_a = shifts.iter().map(|s| sign * (dir * (z + s)).im).fold(f64::MAX, f64::min);
    let rate_b = q2 / 4.0;
    let n = integrand.outputs();
    let t_max = ctl.t_max;

    let kernel_factor = |t: C64, eps: f64| -> C64 {
        let phase = isg * t * z + isg * q2 / (4.0 * t) - eps / t;
        phase.exp() / (isg * 4.0 * PI * t).powi(3)
    };

    let failure = RefCell::new(None);
    let evaluate = |eps: f64| -> Result<Vec<C64>> {
        let piece_a = exp_sinh_many(
            |w, out: &mut [C64]| {
                if w * rate_a > t_max {
                    return;
                }
                let t = C64::new(1.0, 0.0) + dir * w;
                if let Err(e) = integrand.eval(sign, t, out) {
                    failure.borrow_mut().get_or_insert(e);
                }
                let k = kernel_factor(t, eps) * dir;
                out.iter_mut().for_each(|v| *v *= k);
            },
            n,
            PIECE_TOL,
        )?;
        let piece_b = exp_sinh_many(
            |v, out: &mut [C64]| {
                if v * rate_b > t_max {
                    return;
                }
                let u = C64::new(1.0, sign * v);
                let t = u.inv();
                if let Err(e) = integrand.eval(sign, t, out) {
                    failure.borrow_mut().get_or_insert(e);
                }
                let k = kernel_factor(t, eps) * isg / (u * u);
                out.iter_mut().for_each(|x| *x *= k);
            },
            n,
            PIECE_TOL,
        )?;
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        Ok(piece_a.iter().zip(piece_b.iter()).map(|(a, b)| a.value + b.value).collect())
    };

    let mut eps = ctl.eps_sequence.clone();
    let mut per_eps: Vec<Vec<C64>> = vec![Vec::new(); n];
    for &e in &eps {
        for (acc, v) in per_eps.iter_mut().zip(evaluate(e)?) {
            acc.push(v);
        }
    }
    // continue the sequence geometrically while the extrapolation is not settled
    let ratio = if eps.len() > 1 { eps[eps.len() - 2] / eps[eps.len() - 1] } else { 3.0 };
    let mut extra = 0;
    loop {
        let estimates: Vec<(C64, C64, f64)> = per_eps
            .iter()
            .map(|v| {
                let (full, reduced) = extrapolate(&eps, v);
                (full, reduced, (full - reduced).norm().max(rounding_floor(&eps, v)))
            })
            .collect();
        let worst = estimates.iter().map(|e| e.2).fold(0.0, f64::max);
        if worst <= ctl.abs_tol || extra == MAX_EXTRA_EPS || !worst.is_finite() {
            if !(worst <= ctl.abs_tol) {
                return Err(Error::NonConvergence { what: "epsilon extrapolation", iterations: eps.len() });
            }
            return Ok(estimates
                .into_iter()
                .zip(per_eps)
                .map(|((full, _, residual), vals)| OracleValue {
                    value: full,
                    residual,
                    eps: eps.clone(),
                    per_eps: vals,
                })
                .collect());
        }
        let next = eps[eps.len() - 1] / ratio;
        eps.push(next);
        for (acc, v) in per_eps.iter_mut().zip(evaluate(next)?) {
            acc.push(v);
        }
        extra += 1;
    }
}

/// F(t) = t^{−n}: the Macdonald time integral.
#[derive(Debug, Clone, Copy)]
pub struct PowerIntegrand {
    pub n: i32,
}

impl TimeIntegrand for PowerIntegrand {
    fn outputs(&self) -> usize {
        1
    }

    fn energy_shifts(&self) -> Vec<f64> {
        vec![0.0]
    }

    fn eval(&self, _sign: f64, t: C64, out: &mut [C64]) -> Result<()> {
        out[0] = t.powi(-self.n);
        Ok(())
    }
}

/// Profile model used to build G_{±it}(x) G_{±it}(X).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileModel {
    /// Profiles truncated at O(α²); outputs are the α⁰..α³ coefficients.
    SmallAlpha,
    /// Exact profiles at the given α; one output per channel pair.
    Exact { alpha: f64 },
}

/// ±i Σ CGC·CGC G^{s1′s1}_{±it}(x) G^{s2′s2}_{±it}(X) without the heat-kernel factors,
/// where G^{s′s}_τ(x)/K⁰_τ(x) = δ_{s′s}(a_τ − 2βs b_τ) + (α/2τ) b_τ (δ_{+−}x⁻ − δ_{−+}x⁺).
#[derive(Debug, Clone)]
pub struct PairIntegrand {
    pub beta: f64,
    pub q: ComPoint,
    pub pairs: Vec<(SpinChannel, SpinChannel)>,
    pub model: ProfileModel,
    pub convention: CgcConvention,
}

/// One-particle spin matrix as polynomial coefficients in α (up to α³).
type SpinPoly = [[[C64; 2]; 2]; 4];

impl PairIntegrand {
    fn orders(&self) -> usize {
        match self.model {
            ProfileModel::SmallAlpha => 4,
            ProfileModel::Exact { .. } => 1,
        }
    }

    fn spin_factor(&self, tau: C64, a: [C64; 2], b: [C64; 2], minus: C64, plus: C64, alpha_scale: f64) -> SpinPoly {
        // a[k], b[k]: coefficient of α^{2k}; SmallAlpha keeps two, Exact one (α folded in)
        let zero = C64::new(0.0, 0.0);
        let mut g = [[[zero; 2]; 2]; 4];
        for k in 0..2 {
            // spin index 0 is +½ (s = ½), 1 is −½
            g[2 * k][0][0] = a[k] - b[k] * self.beta;
            g[2 * k][1][1] = a[k] + b[k] * self.beta;
            let off = b[k] * alpha_scale / (tau * 2.0);
            g[2 * k + 1][0][1] = off * minus;
            g[2 * k + 1][1][0] = -off * plus;
        }
        if self.orders() == 1 {
            for k in 1..4 {
                for r in 0..2 {
                    for col in 0..2 {
                        let v = g[k][r][col];
                        g[0][r][col] += v;
                    }
                }
            }
        }
        g
    }
}

impl TimeIntegrand for PairIntegrand {
    fn outputs(&self) -> usize {
        self.pairs.len() * self.orders()
    }

    fn energy_shifts(&self) -> Vec<f64> {
        let b = self.beta;
        let mut v = vec![0.0, b, -b, 2.0 * b, -2.0 * b];
        if let ProfileModel::Exact { alpha } = self.model {
            // the exact profiles also grow like e^{t α²/4 …}; the bottom of the spectrum bounds them
            let sigma = crate::kernel::sigma_bound(&Coupling { alpha, beta: b });
            v.extend([2.0 * sigma, -2.0 * sigma]);
        }
        v
    }

    fn eval(&self, sign: f64, t: C64, out: &mut [C64]) -> Result<()> {
        let isg = C64::new(0.0, sign);
        let tau = isg * t;
        let zero = C64::new(0.0, 0.0);
        let (a, b, scale) = match self.model {
            ProfileModel::SmallAlpha => {
                let p = SmallAlphaProfile::new(self.beta, tau);
                ([p.a0, p.a2], [p.b0, p.b2], 1.0)
            }
            ProfileModel::Exact { alpha } => {
                let c = Coupling { alpha, beta: self.beta };
                let p = time_profiles_laplace(&c, tau, 1e-14)?;
                ([p.a, zero], [p.b, zero], alpha)
            }
        };
        let gx = self.spin_factor(tau, a, b, self.q.rel_minus(), self.q.rel_plus(), scale);
        let gc = self.spin_factor(tau, a, b, self.q.cm_minus(), self.q.cm_plus(), scale);
        let orders = self.orders();
        // pair matrix P[k][(s1′s2′)][(s1 s2)] = Σ_{i+j=k} gx[i]⊗gc[j]
        let mut pair = vec![[[zero; 4]; 4]; orders];
        for (i, gxi) in gx.iter().enumerate() {
            for (j, gcj) in gc.iter().enumerate() {
                if i + j >= orders {
                    continue;
                }
                for r in 0..4 {
                    for col in 0..4 {
                        pair[i + j][r][col] += gxi[r / 2][col / 2] * gcj[r % 2][col % 2];
                    }
                }
            }
        }
        let cg = cgc_matrix(self.convention);
        for (p, (out_ch, in_ch)) in self.pairs.iter().enumerate() {
            let (ro, ri) = (cg[out_ch.index()], cg[in_ch.index()]);
            for k in 0..orders {
                let mut acc = zero;
                for r in 0..4 {
                    if ro[r] == 0.0 {
                        continue;
                    }
                    for col in 0..4 {
                        if ri[col] != 0.0 {
                            acc += pair[k][r][col] * (ro[r] * ri[col]);
                        }
                    }
                }
                out[p * orders + k] = isg * acc;
            }
        }
        Ok(())
    }
}

/// Quadrature oracle for `macdonald_time_integral`.
pub fn macdonald_oracle(n: i32, z: C64, q_norm: f64, ctl: &QuadratureControl) -> Result<OracleValue> {
    let mut v = regularized_time_quadrature(&PowerIntegrand { n }, z, q_norm * q_norm, ctl)?;
    Ok(v.remove(0))
}

/// Quadrature oracle for a Green function element. With `ProfileModel::SmallAlpha`
/// the four α-coefficients are returned (α of `c` is ignored); with
/// `ProfileModel::Exact` a single value at α of the model.
pub fn green2_oracle(
    beta: f64,
    model: ProfileModel,
    query: &GreenQuery,
    convention: CgcConvention,
    ctl: &QuadratureControl,
) -> Result<Vec<OracleValue>> {
    query.validate()?;
    check_point(&query.q)?;
    let integrand = PairIntegrand {
        beta,
        q: query.q,
        pairs: vec![(query.sigma_out, query.sigma_in)],
        model,
        convention,
    };
    regularized_time_quadrature(&integrand, query.z, query.q.q2(), ctl)
}
