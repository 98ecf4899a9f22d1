//! Property tests for the structural invariants the modules promise.

use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use chartax::characters::GroupStructure;
use chartax::dichotomy::{fejer, nearest_integer_distance};
use chartax::distance::char_delta;
use chartax::multiplicative::{Builtin, MultiplicativeFunction, SupportSet};
use chartax::sieve::selberg_weights;
use chartax::PrimeTable;

fn table() -> Arc<PrimeTable> {
    static TABLE: OnceLock<Arc<PrimeTable>> = OnceLock::new();
    TABLE
        .get_or_init(|| Arc::new(PrimeTable::build(50_000).unwrap()))
        .clone()
}

proptest! {
    #[test]
    fn factorization_reassembles(n in 1u64..50_000) {
        let t = table();
        let prod: u64 = t.factorize(n).unwrap().iter().map(|&(p, e)| p.pow(e)).product();
        prop_assert_eq!(prod, n);
    }

    #[test]
    fn spf_divides_and_is_prime(n in 2u64..50_000) {
        let t = table();
        let p = t.spf(n).unwrap();
        prop_assert_eq!(n % p, 0);
        prop_assert!(t.is_prime(p));
    }

    #[test]
    fn reciprocal_sum_additive(d in 2u64..5_000, span1 in 0u64..20_000, span2 in 0u64..20_000) {
        let t = table();
        let y = d + span1;
        let x = y + span2;
        let a = t.reciprocal_sum(d, y).unwrap();
        let b = t.reciprocal_sum(y.max(2), x).unwrap();
        let c = t.reciprocal_sum(d, x).unwrap();
        prop_assert!((a + b - c).abs() <= 1e-12 * c.abs().max(1.0));
    }

    #[test]
    fn fejer_forms_agree_and_nonnegative(n in 1u64..64, theta in -5.0f64..5.0) {
        prop_assume!(nearest_integer_distance(theta) >= 1e-6);
        let closed = fejer(n, theta);
        let mut expo = 1.0;
        for m in 1..n {
            expo += 2.0 * (1.0 - m as f64 / n as f64)
                * (2.0 * std::f64::consts::PI * m as f64 * theta).cos();
        }
        prop_assert!((closed - expo).abs() < 1e-10);
        prop_assert!(closed >= -1e-12);
    }

    #[test]
    fn nearest_integer_distance_and_sine_bounds(theta in -10.0f64..10.0) {
        let d = nearest_integer_distance(theta);
        prop_assert!((0.0..=0.5).contains(&d));
        let s = (std::f64::consts::PI * theta).sin().abs();
        prop_assert!(2.0 * d <= s + 1e-9);
        prop_assert!(s <= std::f64::consts::PI * d + 1e-9);
    }

    #[test]
    fn character_order_divides_phi(d in 1u64..120, pick in 0u64..10_000) {
        let g = GroupStructure::build(d).unwrap();
        let chi = g.character_by_id(pick % g.phi()).unwrap();
        prop_assert_eq!(g.phi() % chi.order(), 0);
        // conjugation preserves the order, products stay in the group
        prop_assert_eq!(chi.conjugate().order(), chi.order());
        prop_assert!(chi.product(&chi.conjugate()).unwrap().is_principal());
    }

    #[test]
    fn multiplicative_on_coprime_pairs(seed in 0u64..500, m in 1u64..200, n in 1u64..200) {
        prop_assume!(chartax::numeric::gcd(m, n) == 1);
        let t = table();
        let g = MultiplicativeFunction::make_builtin(
            Builtin::UnimodularRandom { seed, density: 0.7 },
            &t,
            None,
        )
        .unwrap();
        let lhs = g.evaluate(m * n, &t).unwrap();
        let rhs = g.evaluate(m, &t).unwrap() * g.evaluate(n, &t).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-12);
        prop_assert!(lhs.norm() <= 1.0 + 1e-9);
    }

    #[test]
    fn delta_star_stays_in_range(d in 2u64..80, pick in 0u64..10_000, t in -3.0f64..3.0, seed in 0u64..300) {
        let table = table();
        let x = 20_000u64;
        prop_assume!(d < x);
        let g = GroupStructure::build(d).unwrap();
        let chi = g.character_by_id(pick % g.phi()).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        use rand::{Rng, SeedableRng};
        let s = SupportSet::from_predicate(&table, d, x, |_| rng.random::<f64>() < 0.5).unwrap();
        let prof = char_delta(&s, &chi, t, &table, d, x).unwrap();
        prop_assert!(prof.raw >= 0.0);
        prop_assert!(prof.raw <= 4.0 * prof.l_value + 1e-12);
        if let Some(ds) = prof.delta_star {
            prop_assert!((0.0..=4.0 + 1e-12).contains(&ds));
        }
    }

    #[test]
    fn selberg_invariants(q in 1u64..20_000, h in 2.0f64..1e6, eps in 0.05f64..0.95) {
        let w = selberg_weights(q, h, eps).unwrap();
        prop_assert_eq!(w.weights[&1], 1.0);
        for (&d, &l) in &w.weights {
            prop_assert!(l.abs() <= 1.0);
            prop_assert!(d as f64 <= w.cutoff + 1e-9);
            prop_assert_eq!(q % d, 0);
        }
    }
}
