use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rashba::green::{
    green2, green2_alpha0, green2_diag, green2_oracle, macdonald_oracle, macdonald_time_integral, GreenQuery,
    ProfileModel, QuadratureControl,
};
use rashba::spinalg::{CgcConvention, ComPoint, SpinChannel};
use rashba::verify::loglog_slope;
use rashba::Coupling;

fn energy() -> impl Strategy<Value = C64> {
    (-1.5f64..1.0, 0.3f64..1.5, prop::bool::ANY).prop_map(|(re, im, up)| C64::new(re, if up { im } else { -im }))
}

fn point() -> impl Strategy<Value = ComPoint> {
    (proptest::array::uniform3(-1.0f64..1.0), proptest::array::uniform3(-1.0f64..1.0))
        .prop_map(|(x, y)| ComPoint::new(x, y))
        .prop_filter("away from the coincidence point", |q| q.norm() > 0.3)
}

fn channel() -> impl Strategy<Value = SpinChannel> {
    (0usize..4).prop_map(|i| SpinChannel::ALL[i])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn macdonald_closed_form_vs_quadrature(n in 0i32..=2, z in energy(), q in 0.3f64..2.0) {
        let cf = macdonald_time_integral(n, z, q).unwrap();
        let o = macdonald_oracle(n, z, q, &QuadratureControl::default()).unwrap();
        prop_assert!((cf - o.value).norm() <= 1e-6, "{} vs {}", cf, o.value);
    }

    #[test]
    fn elements_vs_small_alpha_quadrature(z in energy(), q in point(), out in channel(), inp in channel(),
                                          alpha in 0.0f64..0.5, beta in 0.0f64..1.2) {
        let c = Coupling::new(alpha, beta).unwrap();
        let query = GreenQuery::new(z, q, out, inp);
        let cf = green2(&c, &query).unwrap();
        let coeffs = green2_oracle(beta, ProfileModel::SmallAlpha, &query, CgcConvention::default(),
                                   &QuadratureControl::default()).unwrap();
        let oracle = coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, v| acc * alpha + v.value);
        prop_assert!((cf - oracle).norm() <= 1e-5);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn upper_and_lower_half_planes_are_conjugate(z in energy(), q in point(), out in channel(), inp in channel(),
                                                 alpha in 0.0f64..0.5, beta in 0.0f64..1.2) {
        let c = Coupling::new(alpha, beta).unwrap();
        let query = GreenQuery::new(z, q, out, inp);
        let a = green2(&c, &query).unwrap();
        let b = green2(&c, &query.mirrored()).unwrap();
        prop_assert!((b - a.conj()).norm() <= 1e-13 * a.norm().max(1e-6));
    }

    #[test]
    fn diagonal_matches_alpha_zero_at_zero_coupling(z in energy(), q in point(), s in channel(), beta in 0.0f64..1.2) {
        let c = Coupling::new(0.0, beta).unwrap();
        prop_assert_eq!(green2_diag(&c, z, &q, s).unwrap(), green2_alpha0(beta, z, &q, s).unwrap());
    }
}

#[test]
fn diagonal_correction_is_quadratic() {
    // exact-profile quadrature, α ∈ {0.04, 0.02, 0.01}
    let ctl = QuadratureControl::default();
    let alphas = [0.04, 0.02, 0.01];
    for s in SpinChannel::ALL {
        let q = GreenQuery::new(C64::new(-0.6, -0.7), ComPoint::new([0.3, 0.5, -0.4], [-0.2, 0.1, 0.6]), s, s);
        let base = green2_alpha0(0.8, q.z, &q.q, s).unwrap();
        let diffs: Vec<f64> = alphas
            .iter()
            .map(|&alpha| {
                let v = green2_oracle(0.8, ProfileModel::Exact { alpha }, &q, CgcConvention::default(), &ctl).unwrap();
                (v[0].value - base).norm()
            })
            .collect();
        let slope = loglog_slope(&alphas, &diffs).unwrap();
        assert!((slope - 2.0).abs() <= 0.02, "{s}: {slope}");
    }
}

#[test]
fn diagonal_elements_ignore_singlet_phase() {
    let ctl = QuadratureControl::default();
    let q = ComPoint::new([0.2, -0.6, 0.1], [0.4, 0.3, -0.5]);
    for s in SpinChannel::ALL {
        let query = GreenQuery::new(C64::new(0.3, 0.6), q, s, s);
        let a = green2_oracle(0.4, ProfileModel::Exact { alpha: 0.3 }, &query, CgcConvention::CondonShortley, &ctl).unwrap();
        let b = green2_oracle(0.4, ProfileModel::Exact { alpha: 0.3 }, &query, CgcConvention::FlippedSinglet, &ctl).unwrap();
        assert!((a[0].value - b[0].value).norm() <= 1e-15 * a[0].value.norm(), "{s}");
    }
}
