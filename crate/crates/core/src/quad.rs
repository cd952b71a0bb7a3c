//! Quadrature rules for complex-valued integrands: double-exponential
//! (exp-sinh) on [0, ∞) and adaptive Gauss–Kronrod (7/15) on finite intervals.

use crate::error::{Error, Result};
use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: C64,
    pub error: f64,
    pub evaluations: usize,
}

const MAX_LEVEL: usize = 12;
const S_MAX: f64 = 6.5;

/// ∫₀^∞ f(x) dx with x = exp(π/2·sinh s). Non-finite samples count as zero
/// (they only occur where the integrand has underflowed or overflowed at the
/// extreme nodes).
pub fn exp_sinh<F: Fn(f64) -> C64>(f: F, rel_tol: f64) -> Result<QuadResult> {
    let out = exp_sinh_many(|x, v: &mut [C64]| v[0] = f(x), 1, rel_tol)?;
    Ok(out[0])
}

/// exp-sinh for `n` integrands sharing their node evaluations; `f(x, values)`
/// fills all of them. Convergence is judged on the largest component.
pub fn exp_sinh_many<F: Fn(f64, &mut [C64])>(f: F, n: usize, rel_tol: f64) -> Result<Vec<QuadResult>> {
    let zero = C64::new(0.0, 0.0);
    let mut buf = vec![zero; n];
    let mut sum = vec![zero; n];
    let mut evaluations = 0usize;
    let mut add_node = |s: f64, sum: &mut [C64], evaluations: &mut usize| {
        *evaluations += 1;
        let x = (FRAC_PI_2 * s.sinh()).exp();
        if x == 0.0 || !x.is_finite() {
            return;
        }
        let w = FRAC_PI_2 * s.cosh() * x;
        buf.iter_mut().for_each(|b| *b = zero);
        f(x, &mut buf);
        for (acc, v) in sum.iter_mut().zip(buf.iter()) {
            let v = v * w;
            if v.re.is_finite() && v.im.is_finite() {
                *acc += v;
            }
        }
    };
    let mut h = 0.5;
    add_node(0.0, &mut sum, &mut evaluations);
    let mut k = 1;
    while k as f64 * h <= S_MAX {
        add_node(k as f64 * h, &mut sum, &mut evaluations);
        add_node(-(k as f64) * h, &mut sum, &mut evaluations);
        k += 1;
    }
    let mut prev: Vec<C64> = sum.iter().map(|v| v * h).collect();
    for _level in 1..MAX_LEVEL {
        h /= 2.0;
        let mut k = 1;
        while k as f64 * h <= S_MAX {
            add_node(k as f64 * h, &mut sum, &mut evaluations);
            add_node(-(k as f64) * h, &mut sum, &mut evaluations);
            k += 2;
        }
        let cur: Vec<C64> = sum.iter().map(|v| v * h).collect();
        let scale = cur.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let err = cur.iter().zip(prev.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if err <= rel_tol * scale || scale == 0.0 {
            return Ok(cur
                .into_iter()
                .zip(prev.iter())
                .map(|(value, p)| QuadResult { value, error: (value - p).norm(), evaluations })
                .collect());
        }
        prev = cur;
    }
    Err(Error::NonConvergence { what: "exp-sinh quadrature", iterations: MAX_LEVEL })
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = hl * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kron += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    (kron * hl, ((kron - gauss) * hl).norm())
}

/// Adaptive Gauss–Kronrod on [a, b] by interval bisection.
pub fn gauss_kronrod<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<QuadResult> {
    let (v, e) = gk15(&f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    let mut evaluations = 15;
    for _ in 0..5000 {
        let total: C64 = pieces.iter().map(|p| p.2).sum();
        let err: f64 = pieces.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.norm()) {
            return Ok(QuadResult { value: total, error: err, evaluations });
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("non-empty");
        let (lo, hi, _, _) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        evaluations += 30;
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
    Err(Error::NonConvergence { what: "Gauss-Kronrod quadrature", iterations: 5000 })
}
