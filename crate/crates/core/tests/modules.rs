//! Worked cases for each module, run through the public API.

use expflow::cli::RunConfig;
use expflow::entropy::{certify_positive_entropy, time_change_normalize, CertifyConfig};
use expflow::error::Error;
use expflow::expansivity::{expansive_check, invariance_probe, sample_pairs, test_pair, ExpansivityScale};
use expflow::flow::FlowSystem;
use expflow::sections::{build_family, code_system};
use expflow::shadowing::{shadowable_point_check, validate, CheckOptions, PseudoOrbit};
use expflow::specification::{check_spec_instance, reduce_point_to_global, Homeomorphism, SpecInstance};
use expflow::suspension::{suspension_entropy_reference, RoofFunction, SuspensionFlow};
use expflow::symbolic::SymbolSequence;
use expflow::systems::{self, blown_up_map, cat_map, torus_dist, AnyFlow, BlownUpCat, BlownUpPoint, ShiftMap, TorusPoint};
use serde::{Deserialize, Serialize};

fn shift_flow() -> SuspensionFlow<ShiftMap> {
    match systems::flow_fixture("suspended-full-shift").unwrap() {
        AnyFlow::Shift(f) => f,
        _ => unreachable!(),
    }
}

fn blown_up_flow() -> SuspensionFlow<BlownUpCat> {
    match systems::flow_fixture("suspended-blown-up").unwrap() {
        AnyFlow::BlownUp(f) => f,
        _ => unreachable!(),
    }
}

fn disc(radius: f64) -> TorusPoint {
    BlownUpPoint::Disc { radius, angle: 0.0 }.to_torus(&BlownUpCat::default()).unwrap()
}

fn zeros() -> SymbolSequence {
    SymbolSequence::constant(2, 0).unwrap()
}

fn mixed() -> SymbolSequence {
    SymbolSequence::periodic(2, &[0, 0, 1, 0, 1, 1, 1]).unwrap()
}

#[test]
fn exact_orbit_is_a_pseudo_orbit() {
    let f = shift_flow();
    let p = f.point(mixed(), 0.25);
    let q = f.evaluate(&p, 1.5);
    let chain = PseudoOrbit::finite(vec![(p, 1.5), (q, 1.5)], 0.05, 1.0).unwrap();
    assert!(validate(&chain, &f).unwrap());
}

#[test]
fn a_jump_of_two_delta_is_rejected() {
    let f = shift_flow();
    let delta = 0.05;
    let p = f.point(mixed(), 0.25);
    let end = f.evaluate(&p, 1.5);
    let q = f.evaluate(&end, 4.0 * delta);
    assert!(f.dist(&end, &q) > delta);
    let chain = PseudoOrbit::finite(vec![(p, 1.5), (q, 1.5)], delta, 1.0).unwrap();
    assert!(!validate(&chain, &f).unwrap());
}

#[test]
fn zero_shadow_trials_is_a_domain_error() {
    let f = shift_flow();
    let p = f.point(mixed(), 0.25);
    let r = shadowable_point_check(&p, 0.1, 0.05, &f, 0, false, CheckOptions::default());
    assert!(matches!(r, Err(Error::Domain(_))));
}

#[test]
fn sections_reject_singular_flows() {
    let AnyFlow::SingularBlownUp(f) = systems::flow_fixture("singular-blown-up").unwrap() else {
        unreachable!()
    };
    assert!(matches!(build_family(&f, 0.5, 0.25), Err(Error::Unsupported(_))));
}

#[test]
fn coding_an_empty_set_is_a_domain_error() {
    let f = shift_flow();
    let fam = build_family(&f, 0.5, 0.25).unwrap();
    assert!(matches!(code_system(&fam, &f, &[], 8.0, 0.25), Err(Error::Domain(_))));
}

#[test]
fn a_fixed_orbit_codes_to_one_cycle() {
    let f = shift_flow();
    let fam = build_family(&f, 0.5, 0.25).unwrap();
    let coded = code_system(&fam, &f, &[f.point(zeros(), 0.0)], 8.0, 0.25).unwrap();
    let edges: Vec<(usize, usize)> = (0..coded.alphabet)
        .flat_map(|i| (0..coded.alphabet).map(move |j| (i, j)))
        .filter(|&(i, j)| coded.transitions[i][j])
        .collect();
    let used: Vec<usize> = coded.correspondence[0].sections.clone();
    assert!(!used.is_empty());
    // each visited section has exactly one successor, and the successors close up
    for &s in &used {
        assert_eq!(edges.iter().filter(|e| e.0 == s).count(), 1, "{edges:?}");
    }
    let mut seen = vec![used[0]];
    let mut cur = used[0];
    loop {
        let next = edges.iter().find(|e| e.0 == cur).unwrap().1;
        if next == used[0] {
            break;
        }
        assert!(!seen.contains(&next));
        seen.push(next);
        cur = next;
    }
    assert_eq!(edges.len(), seen.len());
}

#[test]
fn full_shift_suspension_is_expansive_on_samples() {
    let f = shift_flow();
    let scale = ExpansivityScale::new(0.1, 0.02, 6.0).unwrap();
    let pairs = sample_pairs(&f, 0.25, 40, 3);
    let report = expansive_check(&f, &scale, &pairs);
    assert!(report.passed(), "{:?}", report.verdict);
}

#[test]
fn two_disc_points_break_expansivity() {
    let f = blown_up_flow();
    let x = f.point(disc(0.2), 0.5);
    let y = f.point(disc(0.3), 0.5);
    let scale = ExpansivityScale::new(0.1, 0.05, 6.0).unwrap();
    assert!(test_pair(&f, &x, &y, &scale).is_some());
}

#[test]
fn invariance_probe_cases() {
    let scale = ExpansivityScale::new(0.1, 0.02, 4.0).unwrap();
    let f = shift_flow();
    let p = f.point(mixed(), 0.25);
    assert!(invariance_probe(&f, &p, 0.0, 0.05, &scale, 0.05).unwrap());

    let g = blown_up_flow();
    let d = g.point(disc(0.2), 0.5);
    let r = invariance_probe(&g, &d, 1.0, 0.05, &ExpansivityScale::new(0.1, 0.05, 4.0).unwrap(), 0.02);
    assert!(matches!(r, Err(Error::Precondition(_))), "{r:?}");
}

#[test]
fn time_change_sends_separation_times_to_integers() {
    let h = time_change_normalize(&[2.0, 4.0, 6.0]).unwrap();
    for n in 1..=3 {
        let t = 2.0 * n as f64;
        assert!((h.eval(t) - n as f64).abs() < 1e-12);
        assert!((h.eval(-t) + n as f64).abs() < 1e-12);
    }
    assert!(matches!(time_change_normalize(&[2.0, 1.0]), Err(Error::Domain(_))));
}

#[test]
fn certify_rejects_a_periodic_point() {
    let f = shift_flow();
    let p = f.point(zeros(), 0.5);
    let cfg = CertifyConfig {
        u_radius: 0.1,
        expansivity_net: 0.1,
        ..CertifyConfig::default()
    };
    let r = certify_positive_entropy(&f, &p, &cfg);
    assert!(matches!(r, Err(Error::Precondition(_))), "{r:?}");
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Real(f64);

struct Identity;

impl Homeomorphism for Identity {
    type Point = Real;

    fn forward(&self, p: &Real) -> Real {
        *p
    }

    fn backward(&self, p: &Real) -> Real {
        *p
    }

    fn dist(&self, a: &Real, b: &Real) -> f64 {
        (a.0 - b.0).abs()
    }

    fn name(&self) -> String {
        "identity".into()
    }
}

#[test]
fn identity_has_no_specification() {
    let eps = 0.1;
    let inst = SpecInstance::new(vec![Real(0.0), Real(3.0 * eps)], vec![(0, 0), (5, 5)], 4).unwrap();
    let pool: Vec<Real> = (0..=100).map(|k| Real(k as f64 * 0.005)).collect();
    assert_eq!(check_spec_instance(&Identity, &inst, eps, &pool), None);
    let single = SpecInstance::new(vec![Real(0.0)], vec![(0, 3)], 4).unwrap();
    assert_eq!(check_spec_instance(&Identity, &single, eps, &pool), Some(Real(0.0)));
}

#[test]
fn reduction_prepends_the_point_before_the_first_window() {
    let k = 4u64;
    let inst = SpecInstance::new(vec![Real(1.0)], vec![(8, 10)], k).unwrap();
    let aug = reduce_point_to_global(&inst, &Real(0.5), k, 100).unwrap();
    assert_eq!(aug.windows(), &[(3, 4), (8, 10)]);
    assert_eq!(aug.points()[0], Real(0.5));

    let empty = SpecInstance::<Real>::empty(k).unwrap();
    let aug = reduce_point_to_global(&empty, &Real(0.5), k, 100).unwrap();
    assert_eq!(aug.windows(), &[(0, 0)]);
}

#[test]
fn unit_speed_matches_the_plain_suspension() {
    let plain = shift_flow();
    let AnyFlow::SingularShift(sing) = systems::flow_fixture("singular-suspension(full-2-shift, unit, unit)").unwrap()
    else {
        unreachable!()
    };
    let p = plain.point(mixed(), 0.3);
    for t in [-2.7, -0.4, 0.0, 0.9, 3.3] {
        let a = plain.evaluate(&p, t);
        let b = sing.evaluate(&p, t);
        assert!(plain.dist(&a, &b) < 1e-6, "t = {t}");
    }
}

#[test]
fn constant_roof_halves_the_entropy() {
    let h = suspension_entropy_reference::<SymbolSequence>(2, &RoofFunction::constant(2.0)).unwrap();
    assert!((h - std::f64::consts::LN_2 / 2.0).abs() < 1e-12);
}

#[test]
fn base_map_examples() {
    let (x, y) = cat_map(&TorusPoint::new(0.5, 0.5)).coords();
    assert!((x - 0.5).abs() < 1e-12 && y.abs() < 1e-12);
    let d = BlownUpPoint::Disc { radius: 0.5, angle: 1.0 };
    let (a, b) = (d.to_torus(&BlownUpCat::default()).unwrap(), blown_up_map(&d).unwrap());
    assert!(torus_dist(&a, &b.to_torus(&BlownUpCat::default()).unwrap()) < 1e-12);
}

#[test]
fn config_parse_errors() {
    assert!(matches!(RunConfig::parse("bogus = 1"), Err(Error::Config(_))));
    assert!(matches!(RunConfig::parse("seed 4"), Err(Error::Config(_))));
    let cfg = RunConfig::parse("# comment\nseed = x\n").unwrap();
    assert!(matches!(cfg.seed(), Err(Error::Config(_))));
    let cfg = RunConfig::parse("seed = 7\nworkers = 2").unwrap();
    assert_eq!(cfg.seed().unwrap(), 7);
}
