mod common;

use common::*;
use expflow::flow::{rep_membership, Reparametrization};
use expflow::symbolic::{distance, SymbolSequence};
use proptest::prelude::*;

fn green(c: Check) {
    if let Err(e) = c {
        panic!("{e}");
    }
}

#[test]
fn metric_axioms_hold_on_every_fixture() {
    green(metric_axioms(1000));
}

#[test]
fn group_law() {
    green(common::group_law(64));
}

#[test]
fn rep_is_monotone_in_eps() {
    green(rep_monotonicity(2000));
}

#[test]
fn pseudo_orbits_stay_valid_for_larger_delta() {
    green(delta_monotonicity(32));
}

#[test]
fn sections_are_injective_at_time_e() {
    green(section_injectivity());
}

#[test]
fn itineraries_are_equivariant() {
    green(itinerary_equivariance(16));
}

#[test]
fn certificates_reverify_and_tampering_is_caught() {
    green(certificate_reverification());
}

#[test]
fn json_round_trips() {
    green(common::json_round_trips());
}

#[test]
fn certificates_are_byte_identical() {
    green(determinism());
}

fn word() -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, 1..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sequence_metric_triangle(a in word(), b in word(), c in word()) {
        let (x, y, z) = (
            SymbolSequence::periodic(2, &a).unwrap(),
            SymbolSequence::periodic(2, &b).unwrap(),
            SymbolSequence::periodic(2, &c).unwrap(),
        );
        let d = |p: &SymbolSequence, q: &SymbolSequence| distance(p, q, 1e-12).unwrap();
        prop_assert!(d(&x, &x) == 0.0);
        prop_assert!((d(&x, &y) - d(&y, &x)).abs() < 1e-12);
        prop_assert!(d(&x, &z) <= d(&x, &y) + d(&y, &z) + 1e-9);
    }

    #[test]
    fn shifting_back_and_forth_is_the_identity(a in word(), k in -5i64..5) {
        let x = SymbolSequence::periodic(2, &a).unwrap();
        let back = x.shift(k).shift(-k);
        prop_assert!(distance(&x, &back, 1e-12).unwrap() < 1e-12);
    }

    #[test]
    fn reparametrization_inverse(slopes in prop::collection::vec(0.5f64..1.5, 1..6)) {
        let mut knots = vec![(0.0, 0.0)];
        let (mut t, mut h) = (0.0, 0.0);
        for s in &slopes {
            t += 1.0;
            h += s;
            knots.push((t, h));
        }
        let r = Reparametrization::from_knots(knots).unwrap();
        let inv = r.inverse();
        for x in [-2.0, -0.3, 0.0, 0.7, 2.5, 7.0] {
            prop_assert!((inv.eval(r.eval(x)) - x).abs() < 1e-9);
        }
        prop_assert_eq!(r.eval(0.0), 0.0);
    }

    #[test]
    fn rep_membership_is_monotone(e1 in 0.01f64..0.5, extra in 0.0f64..0.5, seed in 0u64..1000) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let h = random_reparam(&mut rng, 0.4);
        if rep_membership(&h, e1) {
            prop_assert!(rep_membership(&h, e1 + extra));
        }
    }
}
