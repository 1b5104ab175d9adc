use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rodlab::critical::{make_critical, normal_form, CriticalParams, FamilyParams};
use rodlab::framed::HopfSeries;
use rodlab::knot::{alexander, family_diagram, knot_determinant, LaurentPoly};
use rodlab::unitary::{c64, random_u2};
use rodlab::variational::{energy, gradient, StiefelPoint};
use rodlab::{Direction, FourierSeries, Parity, QuatPath};

fn series(max_k: i32) -> impl Strategy<Value = FourierSeries> {
    prop::collection::vec((-max_k..=max_k, -2.0..2.0f64, -2.0..2.0f64), 1..6)
        .prop_map(|terms| FourierSeries::from_terms(terms.into_iter().map(|(k, re, im)| (k, c64(re, im)))))
}

fn pure_series(parity: i32) -> impl Strategy<Value = FourierSeries> {
    prop::collection::vec((-3..=3i32, -2.0..2.0f64, -2.0..2.0f64), 1..5).prop_map(move |terms| {
        FourierSeries::from_terms(terms.into_iter().map(|(k, re, im)| (2 * k + parity, c64(re, im))))
    })
}

fn stiefel_point() -> impl Strategy<Value = StiefelPoint> {
    (any::<u64>(), prop::bool::ANY, 2..5i32).prop_map(|(seed, odd, max_freq)| {
        let parity = if odd { Parity::Odd } else { Parity::Even };
        StiefelPoint::random(&mut ChaCha8Rng::seed_from_u64(seed), parity, max_freq).unwrap()
    })
}

proptest! {
    #[test]
    fn product_is_pointwise(a in series(6), b in series(6), t in 0.0..2.0f64) {
        let lhs = (&a * &b).eval(t);
        let rhs = a.eval(t) * b.eval(t);
        prop_assert!((lhs - rhs).norm() < 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn antiderivative_inverts_derivative(a in series(6), re in -1.0..1.0f64, t in 0.0..2.0f64) {
        let f = a.antiderivative(c64(re, 0.0));
        prop_assert!((f.eval(0.0) - c64(re, 0.0)).norm() < 1e-12);
        let h = 1e-5;
        let fd = (f.eval(t + h) - f.eval(t - h)) / (2.0 * h);
        prop_assert!((fd - a.eval(t)).norm() < 1e-6 * (1.0 + a.max_abs_coeff() * 40.0));
        prop_assert!((&f.derivative() - &a).max_abs_coeff() < 1e-12);
    }

    #[test]
    fn parity_of_products(pa in 0..2i32, pb in 0..2i32, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pick = |p: i32, rng: &mut ChaCha8Rng| {
            use rand::Rng;
            FourierSeries::from_terms((0..3).map(|_| (2 * rng.random_range(-3..=3) + p, c64(rng.random_range(0.5..1.0), 0.0))))
        };
        let (a, b) = (pick(pa, &mut rng), pick(pb, &mut rng));
        prop_assume!(!(&a * &b).is_zero());
        prop_assert_eq!((&a * &b).parity(), a.parity().product(b.parity()));
        // odd series negate across the interval, even ones repeat
        let sign = if pa == 1 { -1.0 } else { 1.0 };
        prop_assert!((a.eval(2.0) - a.eval(0.0) * sign).norm() < 1e-12);
    }

    #[test]
    fn hopf_map_is_a_double_cover(z in pure_series(1), w in pure_series(1), t in 0.0..2.0f64) {
        let q = QuatPath::new(z, w);
        prop_assume!(q.norm_sq_at(t) > 1e-3);
        let (a, b) = (HopfSeries::new(&q), HopfSeries::new(&q.neg()));
        prop_assert!((a.gamma_at(t) - b.gamma_at(t)).norm() < 1e-10);
        prop_assert!((a.frame_at(t) - b.frame_at(t)).norm() < 1e-10);
    }

    #[test]
    fn gradient_matches_finite_difference(p in stiefel_point(), seed in any::<u64>()) {
        let x = StiefelPoint::random(&mut ChaCha8Rng::seed_from_u64(seed), p.parity(), 3).unwrap().into_inner();
        let q = p.q();
        let g = gradient(q).unwrap();
        let h = 1e-4;
        let fd = (energy(&q.axpy(h, &x)) - energy(&q.axpy(-h, &x))) / (2.0 * h);
        let exact = g.metric(&x);
        prop_assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "fd {fd} exact {exact}");
    }

    #[test]
    fn unitary_action_preserves_energy_and_shape(p in stiefel_point(), seed in any::<u64>(), s in 0.0..2.0f64, t in 0.0..2.0f64) {
        let a = random_u2(&mut ChaCha8Rng::seed_from_u64(seed));
        let pa = p.act(&a);
        prop_assert!(StiefelPoint::new(pa.q().clone()).is_ok());
        prop_assert!((energy(p.q()) - energy(pa.q())).abs() < 1e-9 * energy(p.q()));
        let (h0, h1) = (HopfSeries::new(p.q()), HopfSeries::new(pa.q()));
        let d0 = (h0.gamma_at(s) - h0.gamma_at(t)).norm();
        let d1 = (h1.gamma_at(s) - h1.gamma_at(t)).norm();
        prop_assert!((d0 - d1).abs() < 1e-9);
    }

    #[test]
    fn laurent_normalization_is_a_unit_invariant(coeffs in prop::collection::vec(-5i128..=5, 1..6), shift in -4..4i32, neg in any::<bool>()) {
        let p = LaurentPoly::from_coeffs(0, coeffs);
        prop_assume!(!p.is_zero());
        let mut u = p.shift(shift);
        if neg { u = u.neg(); }
        prop_assert_eq!(u.normalized(), p.normalized());
        prop_assert!(u.equiv(&p));
        let sq = p.mul(&p).unwrap();
        prop_assert_eq!(sq.div_exact(&p).unwrap(), p);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn normal_form_is_constant_on_orbits(seed in any::<u64>(), aseed in any::<u64>()) {
        let params = CriticalParams::random_normal_form(&mut ChaCha8Rng::seed_from_u64(seed), 6);
        let q = make_critical(&params).unwrap();
        let a = random_u2(&mut ChaCha8Rng::seed_from_u64(aseed));
        let nf = normal_form(&q.act(&a)).unwrap();
        prop_assert!(nf.params.max_abs_diff(&params) < 1e-8, "{:?} vs {:?}", nf.params, params);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn knot_invariants_are_projection_independent(u in 0.05..0.4f64, seed in any::<u64>()) {
        let fp = FamilyParams::new(2, 1, u);
        let a = family_diagram(&fp, Direction::Auto { seed }).unwrap();
        let b = family_diagram(&fp, Direction::Auto { seed: seed.wrapping_add(1) }).unwrap();
        prop_assert_eq!(alexander(&a).unwrap(), alexander(&b).unwrap());
        prop_assert_eq!(knot_determinant(&a).unwrap(), 3);
    }
}
