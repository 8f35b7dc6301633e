use proptest::prelude::*;
use sopq_core::kernel::{theta, theta_expanded, theta_power, theta_power_partial, KernelPoint};
use sopq_core::zonal::relative_deviation;
use sopq_core::{
    partner_sigma, principal_sigma, zonal_eval, zonal_integral, Complex64, GroupSignature, MethodTag,
    RepresentationParams, ZonalConfig,
};

fn signature() -> impl Strategy<Value = GroupSignature> {
    prop::sample::select(vec![(2u32, 1u32), (2, 2), (3, 1), (3, 2), (3, 3), (4, 3), (5, 2), (6, 4), (2, 5)])
        .prop_map(|(p, q)| GroupSignature::new(p, q).unwrap())
}

fn sigma() -> impl Strategy<Value = Complex64> {
    (-5.0f64..3.0, -3.0f64..3.0).prop_map(|(re, im)| Complex64::new(re, im))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_is_positive_and_matches_expanded(alpha in -3.0f64..3.0, x in -1.0f64..=1.0, y in -1.0f64..=1.0) {
        let pt = KernelPoint::new(x, y).unwrap();
        let v = theta(alpha, pt);
        prop_assert!(v >= (-2.0 * alpha.abs()).exp() * (1.0 - 1e-14));
        prop_assert!((v - theta_expanded(alpha, pt)).abs() <= 1e-14 * alpha.cosh().powi(2));
    }

    #[test]
    fn kernel_expansion_converges_for_moderate_alpha(
        alpha in -0.9f64..0.9,
        x in -1.0f64..=1.0,
        y in -1.0f64..=1.0,
        s in sigma(),
    ) {
        let pt = KernelPoint::new(x, y).unwrap();
        let exact = theta_power(alpha, pt, s);
        let partial = theta_power_partial(alpha, pt, s, 60);
        prop_assert!((partial - exact).norm() <= 1e-10 * exact.norm().max(1.0));
    }

    #[test]
    fn every_route_is_even_in_alpha(g in signature(), s in sigma(), alpha in 0.05f64..1.4) {
        let rep = RepresentationParams::even(s).unwrap();
        let cfg = ZonalConfig::default();
        for m in [MethodTag::Integral, MethodTag::Series12, MethodTag::Horn13, MethodTag::Horn14] {
            let a = zonal_eval(&g, &rep, alpha, m, &cfg).unwrap().value;
            let b = zonal_eval(&g, &rep, -alpha, m, &cfg).unwrap().value;
            prop_assert!(relative_deviation(a, b) <= 1e-10, "{m}: {a} vs {b}");
        }
    }

    #[test]
    fn horn_forms_and_series_agree_off_the_principal_line(g in signature(), s in sigma(), alpha in 0.0f64..1.6) {
        let rep = RepresentationParams::even(s).unwrap();
        let cfg = ZonalConfig::with_tol(1e-13).unwrap();
        let h13 = zonal_eval(&g, &rep, alpha, MethodTag::Horn13, &cfg).unwrap().value;
        let h14 = zonal_eval(&g, &rep, alpha, MethodTag::Horn14, &cfg).unwrap().value;
        let s12 = zonal_eval(&g, &rep, alpha, MethodTag::Series12, &cfg).unwrap().value;
        prop_assert!(relative_deviation(h13, h14) <= 1e-10);
        prop_assert!(relative_deviation(h13, s12) <= 1e-10);
    }

    #[test]
    fn functional_equation_and_conjugation(g in signature(), s in sigma(), alpha in 0.0f64..2.0) {
        let spec = ZonalConfig::default().quad;
        let z = zonal_integral(&g, &RepresentationParams::even(s).unwrap(), alpha, &spec).unwrap().value;
        let w = zonal_integral(&g, &RepresentationParams::even(partner_sigma(&g, s)).unwrap(), alpha, &spec)
            .unwrap()
            .value;
        prop_assert!(relative_deviation(z, w) <= 1e-8);
        let zc = zonal_integral(&g, &RepresentationParams::even(s.conj()).unwrap(), alpha, &spec).unwrap().value;
        prop_assert!(relative_deviation(zc, z.conj()) <= 1e-13);
    }
}

#[test]
fn principal_line_values_are_real() {
    let cfg = ZonalConfig::default();
    for (p, q) in [(2, 2), (3, 2), (3, 3), (4, 3), (5, 2), (6, 4)] {
        let g = GroupSignature::new(p, q).unwrap();
        for rho in [0.0, 0.7, 2.3] {
            let rep = principal_sigma(&g, rho);
            for alpha in [0.3, 1.1, 2.0] {
                let z = zonal_eval(&g, &rep, alpha, MethodTag::Integral, &cfg).unwrap().value;
                assert!(z.im.abs() <= 1e-8, "({p},{q}) rho {rho} alpha {alpha}: {z}");
            }
        }
    }
}

#[test]
fn quadrature_normalization_grid() {
    let cfg = ZonalConfig::default();
    for (p, q) in [(2, 2), (3, 2), (3, 3), (4, 3), (5, 2), (6, 4)] {
        let g = GroupSignature::new(p, q).unwrap();
        for rho in [0.0, 0.7, 2.3] {
            let z = zonal_integral(&g, &principal_sigma(&g, rho), 0.0, &cfg.quad).unwrap().value;
            assert!((z - 1.0).norm() <= 1e-12);
        }
    }
}
