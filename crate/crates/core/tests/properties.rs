//! Algebraic invariants under randomized inputs.

mod common;

use cartan_dress::expr::parse;
use cartan_dress::groups::{conf_jet_of, proj_jet_of, random_hc, random_hp, refactor, MobiusFactors};
use cartan_dress::jets::{compose3, invert3, prolong3, Jet3};
use cartan_dress::metric::Signature;
use cartan_dress::spec::builtin_corpus;
use cartan_dress::taylor::{coefficient_count, Taylor};
use common::random_jet3;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn taylor(n: usize) -> impl Strategy<Value = Taylor> {
    prop::collection::vec(-2.0f64..2.0, coefficient_count(n, 3)).prop_map(move |c| Taylor::from_coeffs(n, 3, &c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn leibniz_rule(a in taylor(3), b in taylor(3), v in 0usize..3) {
        let lhs = (a * b).deriv(v);
        let rhs = a.deriv(v) * b.truncate(2) + a.truncate(2) * b.deriv(v);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn exp_inverts_log(a in taylor(4)) {
        let mut pos = a;
        pos = pos - a.value() + 1.5;
        prop_assert!(pos.ln().exp().max_abs_diff(&pos) < 1e-12);
        prop_assert!((pos * pos.recip() - 1.0).max_abs() < 1e-12);
    }

    #[test]
    fn jet_inverse_is_two_sided(seed in any::<u64>(), n in 3usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_jet3(&mut rng, n);
        let hi = invert3(&h).unwrap();
        let id = Jet3::identity(n);
        prop_assert!(compose3(&h, &hi).max_abs_diff(&id) < 1e-10);
        prop_assert!(compose3(&hi, &h).max_abs_diff(&id) < 1e-10);
    }

    #[test]
    fn prolongation_is_a_homomorphism(seed in any::<u64>(), n in 3usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eta = Signature::Lorentzian.eta(n);
        let (a, b) = (random_hc(&mut rng, &eta), random_hc(&mut rng, &eta));
        let lhs = prolong3(&conf_jet_of(&a.compose(&b)), &eta).unwrap();
        let rhs = compose3(&prolong3(&conf_jet_of(&a), &eta).unwrap(), &prolong3(&conf_jet_of(&b), &eta).unwrap());
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10 * rhs.max_abs().max(1.0));

        let (p, q) = (random_hp(&mut rng, n), random_hp(&mut rng, n));
        let lhs = prolong3(&proj_jet_of(&p.compose(&q).unwrap()).unwrap(), &eta).unwrap();
        let rhs = compose3(
            &prolong3(&proj_jet_of(&p).unwrap(), &eta).unwrap(),
            &prolong3(&proj_jet_of(&q).unwrap(), &eta).unwrap(),
        );
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10 * rhs.max_abs().max(1.0));
    }

    #[test]
    fn closed_law_and_refactor_round_trip(seed in any::<u64>(), n in 3usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eta = Signature::Lorentzian.eta(n);
        let (a, b) = (random_hc(&mut rng, &eta), random_hc(&mut rng, &eta));
        let prod = &a.matrix(&eta) * &b.matrix(&eta);
        prop_assert!(a.compose(&b).matrix(&eta).max_abs_diff(&prod) < 1e-11);
        let g = MobiusFactors { t: (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect(), h: a };
        let m = g.matrix(&eta);
        prop_assert!(refactor(&m, &eta).unwrap().matrix(&eta).max_abs_diff(&m) < 1e-11);
    }

    #[test]
    fn parsed_polynomials_evaluate_exactly(
        coeffs in prop::collection::vec(-9i32..=9, 4),
        x in prop::collection::vec(-1.0f64..1.0, 3),
    ) {
        let src = format!("{}*x0^2 + {}*x1*x2 - ({})*x2 + {}", coeffs[0], coeffs[1], coeffs[2], coeffs[3]);
        let e = parse(&src, 3).unwrap();
        let c: Vec<f64> = coeffs.iter().map(|&k| k as f64).collect();
        let want = c[0] * x[0] * x[0] + c[1] * x[1] * x[2] - c[2] * x[2] + c[3];
        prop_assert!((e.eval(&x) - want).abs() < 1e-12);
        prop_assert_eq!(parse(&src, 3).unwrap().canonical(), e.canonical());
    }

    #[test]
    fn sample_points_stay_in_box(count in 1usize..40, k in 0usize..8) {
        let spec = &builtin_corpus()[k];
        for p in spec.sample_points(count) {
            for (a, v) in p.iter().enumerate() {
                prop_assert!((v - spec.base_point[a]).abs() <= spec.half_width[a] + 1e-15);
            }
        }
    }
}
