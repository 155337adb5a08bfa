mod common;

use common::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn birkhoff_factors_reconstruct(v in pair4(), w in [small(), small()], o in any::<bool>()) {
        birkhoff_reconstruction(v, w, o)?;
    }

    #[test]
    fn iwasawa_factors_reconstruct(v in pair4(), theta in -0.5f64..0.5) {
        iwasawa_reconstruction(v, theta)?;
    }

    #[test]
    fn paracomplex_domain_laws(z in pc()) {
        paracomplex_laws(z)?;
    }

    #[test]
    fn conjugation_is_multiplicative(z in pc(), w in pc()) {
        let lhs = (z * w).conj();
        let rhs = z.conj() * w.conj();
        prop_assert!((lhs.re - rhs.re).abs() < 1e-12 && (lhs.im - rhs.im).abs() < 1e-12);
        let n = z.to_null();
        prop_assert!(((n.p + n.q) / 2.0 - z.re).abs() < 1e-15);
        prop_assert!(((n.p - n.q) / 2.0 - z.im).abs() < 1e-15);
    }

    #[test]
    fn epsilon_selector_law(x in pc(), y in pc()) {
        epsilon_selector(x, y)?;
    }

    #[test]
    fn sym_is_gauge_invariant(v in pair4(), c in -1.0f64..1.0, theta in -0.3f64..0.3) {
        sym_gauge_invariance(v, c, theta)?;
    }

    #[test]
    fn h_does_not_depend_on_mu((f, g, q, r, s, t, th) in h_inputs()) {
        h_mu_independence(f, g, q, r, s, t, th)?;
    }

    #[test]
    fn mu_log_derivative_is_second_order(v in pair4(), theta in -0.5f64..0.5) {
        mu_log_derivative_convergence(v, theta)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn nil_group_law(x in [small(), small(), small()], y in [small(), small(), small()], z in [small(), small(), small()]) {
        use nilweier_core::geometry::NilPoint;
        let (a, b, c) = (NilPoint::from_array(x), NilPoint::from_array(y), NilPoint::from_array(z));
        let lhs = a.mul(b).mul(c).to_array();
        let rhs = a.mul(b.mul(c)).to_array();
        let id = a.mul(a.inv()).to_array();
        for k in 0..3 {
            prop_assert!((lhs[k] - rhs[k]).abs() < 1e-12);
            prop_assert!(id[k].abs() < 1e-12);
        }
    }
}
