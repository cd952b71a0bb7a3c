//! Free heat kernel, the 2×2 propagator kernel of e^{−th}, and the Fourier
//! symbol of h with its closed-form exponential.

use crate::error::{Error, Result};
use crate::specfun::{laguerre_profiles, SeriesControl};
use crate::spinalg::{spin_op, SpinMatrix, SpinOp};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub alpha: f64,
    pub beta: f64,
}

impl Coupling {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha.is_finite() && beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("couplings must be finite and >= 0, got ({alpha}, {beta})")));
        }
        Ok(Coupling { alpha, beta })
    }

    pub fn free() -> Self {
        Coupling { alpha: 0.0, beta: 0.0 }
    }
}

/// Entries indexed by (s′, s) in the (+½, −½) basis; units length⁻³.
pub type KernelMatrix = SpinMatrix;
/// Hermitian 2×2 multiplier ĥ(ξ).
pub type SymbolMatrix = SpinMatrix;

fn check_time(t: C64) -> Result<()> {
    if t == C64::new(0.0, 0.0) || t.re < 0.0 || !t.re.is_finite() || !t.im.is_finite() {
        return Err(Error::DomainError(format!("kernel time must have Re t >= 0 and t != 0, got {t}")));
    }
    Ok(())
}

/// (4πt)^{3/2} on the principal branch.
fn gauss_norm(t: C64) -> C64 {
    ((t * 4.0 * PI).ln() * 1.5).exp()
}

/// K_t⁰(x) = e^{−|x|²/(4t)} / (4πt)^{3/2}
pub fn heat_kernel(t: C64, x: [f64; 3]) -> Result<C64> {
    check_time(t)?;
    let r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    Ok((-r2 / (t * 4.0)).exp() / gauss_norm(t))
}

/// G_t(x) of e^{−th}.
///
/// `G = K_t⁰ [δ_{s′s}(A − 2βs·B) + (α/2t)(B − ∂_u B)(δ_{+−}x⁻ − δ_{−+}x⁺)]`
/// where A, B are the Laguerre-weighted Φ₃ profiles at u = |x⊥|²/(4t).
/// On the x³ axis A = a_t and B = b_t.
pub fn propagator_kernel(c: &Coupling, t: C64, x: [f64; 3]) -> Result<KernelMatrix> {
    propagator_kernel_with(c, t, x, &SeriesControl::default())
}

pub fn propagator_kernel_with(c: &Coupling, t: C64, x: [f64; 3], ctl: &SeriesControl) -> Result<KernelMatrix> {
    let k0 = heat_kernel(t, x)?;
    let u = (x[0] * x[0] + x[1] * x[1]) / (t * 4.0);
    let p = laguerre_profiles(t * (c.alpha * c.alpha / 4.0), (t * (c.beta / 2.0)).powu(2), u, t, ctl)?;
    let up = k0 * (p.a - c.beta * p.b);
    let down = k0 * (p.a + c.beta * p.b);
    let flip = k0 * c.alpha / (t * 2.0) * (p.b - p.db);
    let xp = C64::new(x[0], x[1]);
    Ok(SpinMatrix([[up, flip * xp.conj()], [-flip * xp, down]]))
}

/// ĥ(ξ) = ξ·ξ I + α(iξ⁻S⁺ − iξ⁺S⁻) + 2βS³
pub fn symbol(c: &Coupling, xi: [f64; 3]) -> SymbolMatrix {
    let xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    SpinMatrix::identity().scale(C64::new(xi2, 0.0)) + spin_part(c, xi)
}

fn spin_part(c: &Coupling, xi: [f64; 3]) -> SpinMatrix {
    let xp = C64::new(xi[0], xi[1]);
    let i = C64::new(0.0, 1.0);
    spin_op(SpinOp::Splus).scale(i * c.alpha * xp.conj())
        + spin_op(SpinOp::Sminus).scale(-i * c.alpha * xp)
        + spin_op(SpinOp::S3).scale(C64::new(2.0 * c.beta, 0.0))
}

/// exp(−t ĥ(ξ)) = e^{−tξ²}[cosh(tμ) I − sinh(tμ)/μ · M], μ² = α²|ξ⊥|² + β².
pub fn symbol_exp(c: &Coupling, t: C64, xi: [f64; 3]) -> SpinMatrix {
    let xi2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    let mu = (c.alpha * c.alpha * (xi[0] * xi[0] + xi[1] * xi[1]) + c.beta * c.beta).sqrt();
    let tm = t * mu;
    let ep = (-t * xi2 + tm).exp();
    let em = (-t * xi2 - tm).exp();
    let ch = (ep + em) / 2.0;
    let sh_over_mu = if tm.norm() < 1e-6 {
        (-t * xi2).exp() * t * (1.0 + tm * tm / 6.0)
    } else {
        (ep - em) / (2.0 * mu)
    };
    SpinMatrix::identity().scale(ch) - spin_part(c, xi).scale(sh_over_mu)
}

/// Σ = −inf spec h: β if 2β > α², else (β/α)² + (α/2)².
pub fn sigma_bound(c: &Coupling) -> f64 {
    if c.alpha == 0.0 || 2.0 * c.beta > c.alpha * c.alpha {
        c.beta
    } else {
        (c.beta / c.alpha).powi(2) + (c.alpha / 2.0).powi(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::time_profiles;
    use proptest::prelude::*;

    fn cp(a: f64, b: f64) -> Coupling {
        Coupling::new(a, b).unwrap()
    }

    #[test]
    fn heat_kernel_basics() {
        let v = heat_kernel(C64::new(1.0, 0.0), [0.0; 3]).unwrap();
        assert!((v.re - (4.0 * PI).powf(-1.5)).abs() < 1e-17);
        let t0 = 0.8;
        let v = heat_kernel(C64::new(0.0, t0), [0.3, -1.0, 2.0]).unwrap();
        assert!((v.norm() - (4.0 * PI * t0).powf(-1.5)).abs() < 1e-15);
        assert!(heat_kernel(C64::new(0.0, 0.0), [0.0; 3]).is_err());
        assert!(heat_kernel(C64::new(-1.0, 0.0), [0.0; 3]).is_err());
    }

    #[test]
    fn heat_kernel_unit_mass() {
        // radial integral 4π ∫ r² K dr on a fine midpoint rule
        let t = C64::new(0.6, 0.0);
        let h = 1e-3;
        let mut s = 0.0;
        for i in 0..20_000 {
            let r = (i as f64 + 0.5) * h;
            s += 4.0 * PI * r * r * heat_kernel(t, [r, 0.0, 0.0]).unwrap().re * h;
        }
        assert!((s - 1.0).abs() < 1e-10);
    }

    #[test]
    fn free_kernel_is_diagonal_heat_kernel() {
        let t = C64::new(0.4, 0.1);
        let x = [0.3, 0.5, -0.2];
        let g = propagator_kernel(&Coupling::free(), t, x).unwrap();
        let k = heat_kernel(t, x).unwrap();
        assert!((g.0[0][0] - k).norm() < 1e-16);
        assert!((g.0[1][1] - k).norm() < 1e-16);
        assert_eq!(g.0[0][1], C64::new(0.0, 0.0));
        assert_eq!(g.0[1][0], C64::new(0.0, 0.0));
    }

    #[test]
    fn imaginary_time_alpha_zero() {
        let (beta, t0) = (0.7, 1.1);
        let t = C64::new(0.0, t0);
        let x = [0.4, -0.3, 0.9];
        let g = propagator_kernel(&cp(0.0, beta), t, x).unwrap();
        let k = heat_kernel(t, x).unwrap();
        let up = k * C64::new((beta * t0).cos(), -(beta * t0).sin());
        let down = k * C64::new((beta * t0).cos(), (beta * t0).sin());
        assert!((g.0[0][0] - up).norm() < 1e-14 * k.norm());
        assert!((g.0[1][1] - down).norm() < 1e-14 * k.norm());
        assert!(g.0[0][1].norm() == 0.0 && g.0[1][0].norm() == 0.0);
    }

    #[test]
    fn on_axis_matches_phi3_profiles() {
        let c = cp(0.4, 0.6);
        let t = C64::new(0.5, 0.0);
        let x = [0.0, 0.0, 0.7];
        let g = propagator_kernel(&c, t, x).unwrap();
        let p = time_profiles(&c, t, &SeriesControl::default()).unwrap();
        let k = heat_kernel(t, x).unwrap();
        assert!((g.0[0][0] - k * (p.a - c.beta * p.b)).norm() < 1e-14 * k.norm());
        assert!((g.0[1][1] - k * (p.a + c.beta * p.b)).norm() < 1e-14 * k.norm());
    }

    #[test]
    fn symbol_examples() {
        let c = cp(0.0, 0.8);
        let h = symbol(&c, [0.0; 3]);
        assert_eq!(h, SpinMatrix::from_real([[0.8, 0.0], [0.0, -0.8]]));
        // eigenvalues of a Hermitian 2×2: tr/2 ± sqrt((d/2)² + |off|²)
        let h = symbol(&cp(1.0, 0.0), [1.0, 0.0, 0.0]).0;
        let tr = (h[0][0] + h[1][1]).re;
        let d = (h[0][0] - h[1][1]).re;
        let disc = ((d / 2.0).powi(2) + h[0][1].norm_sqr()).sqrt();
        assert!((tr / 2.0 - disc).abs() < 1e-15 && (tr / 2.0 + disc - 2.0).abs() < 1e-15);
    }

    #[test]
    fn symbol_exp_alpha_zero() {
        let (beta, t) = (0.6, C64::new(0.3, 0.0));
        let xi = [0.5, -1.0, 0.2];
        let e = symbol_exp(&cp(0.0, beta), t, xi);
        let xi2 = 0.25 + 1.0 + 0.04;
        assert!((e.0[0][0] - (-t * (xi2 + beta)).exp()).norm() < 1e-15);
        assert!((e.0[1][1] - (-t * (xi2 - beta)).exp()).norm() < 1e-15);
    }

    #[test]
    fn symbol_exp_small_mu_branch_is_continuous() {
        let c = cp(0.0, 1e-7);
        let xi = [0.1, 0.0, 0.0];
        let a = symbol_exp(&c, C64::new(0.9, 0.0), xi);
        let b = symbol_exp(&cp(0.0, 2e-6), C64::new(0.9, 0.0), xi);
        assert!(a.max_abs_diff(b) < 3e-6);
        assert!((a.0[0][0] - (-0.9f64 * (0.01 + 1e-7)).exp()).norm() < 1e-15);
    }

    #[test]
    fn sigma_bound_examples() {
        assert_eq!(sigma_bound(&cp(2.0, 1.0)), 1.25);
        assert_eq!(sigma_bound(&cp(1.0, 1.0)), 1.0);
        assert_eq!(sigma_bound(&cp(0.0, 0.0)), 0.0);
    }

    fn unitary_defect(m: SpinMatrix) -> f64 {
        (m.adjoint() * m).max_abs_diff(SpinMatrix::identity())
    }

    proptest! {
        #[test]
        fn symbol_is_hermitian(a in 0.0f64..2.0, b in 0.0f64..2.0, xi in proptest::array::uniform3(-5.0f64..5.0)) {
            let h = symbol(&cp(a, b), xi);
            prop_assert!(h.max_abs_diff(h.adjoint()) == 0.0);
        }

        #[test]
        fn group_law(a in 0.0f64..1.5, b in 0.0f64..1.5, xi in proptest::array::uniform3(-3.0f64..3.0),
                     t1 in 0.0f64..0.5, t2 in 0.0f64..0.5, s1 in -2.0f64..2.0, s2 in -2.0f64..2.0) {
            let c = cp(a, b);
            let (t1, t2) = (C64::new(t1, s1), C64::new(t2, s2));
            let lhs = symbol_exp(&c, t1, xi) * symbol_exp(&c, t2, xi);
            let rhs = symbol_exp(&c, t1 + t2, xi);
            prop_assert!(lhs.max_abs_diff(rhs) < 1e-12);
        }

        #[test]
        fn imaginary_time_is_unitary(a in 0.0f64..2.0, b in 0.0f64..2.0, xi in proptest::array::uniform3(-6.0f64..6.0), s in -5.0f64..5.0) {
            prop_assert!(unitary_defect(symbol_exp(&cp(a, b), C64::new(0.0, s), xi)) < 1e-13);
        }

        #[test]
        fn kernel_hermitian_symmetry(x in proptest::array::uniform3(-2.0f64..2.0)) {
            let c = cp(0.5, 0.7);
            let t = C64::new(0.9, 0.0);
            let g = propagator_kernel(&c, t, x).unwrap();
            let gm = propagator_kernel(&c, t, x.map(|v| -v)).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((g.0[i][j] - gm.0[j][i].conj()).norm() <= 1e-14 * (1.0 + g.0[i][j].norm()));
                }
            }
        }
    }
}
