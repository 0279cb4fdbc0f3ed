//! Checks shared by the acceptance and property suites. Each returns a short
//! detail string on success and the reason on failure.
#![allow(dead_code)]

use std::collections::HashSet;
use std::time::Instant;

use expflow::cli::{certify_preset, run, Command, RunConfig};
use expflow::entropy::{certify_positive_entropy, entropy_estimate, verify_certificate, EntropyCertificate, VerifyOptions};
use expflow::error::Error;
use expflow::flow::{group_law_residual, rep_membership, FlowSystem, Reparametrization};
use expflow::sections::{build_family, check_family, code_system, itinerary, SectionFamily};
use expflow::shadowing::{random_pseudo_orbit, search_shadow, validate, PseudoOrbit, ShadowWitness};
use expflow::specification::{
    check_spec_instance, reduce_point_to_global, sample_instance, splice_candidates, splice_margin, traces,
    Homeomorphism,
};
use expflow::suspension::{SuspensionBase, SuspensionFlow, SuspensionPoint};
use expflow::symbolic::{periodic_family, Subshift, Symbol, SymbolSequence};
use expflow::systems::{self, AnyFlow, Fixture, ShiftMap};
use expflow::{with_flow, with_map};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;

pub type Check = std::result::Result<String, String>;

/// Flow fixtures exercised by the property suites.
pub const FLOWS: &[&str] = &[
    "suspended-full-shift",
    "suspension(golden-mean-sft, wave(0.3))",
    "suspended-cat-map",
    "suspended-blown-up",
    "singular-blown-up",
];

pub const MAPS: &[&str] = &["full-2-shift", "golden-mean-sft", "cat-map", "blown-up-cat-map"];

pub fn flow(name: &str) -> AnyFlow {
    systems::flow_fixture(name).expect("fixture")
}

pub fn shift_flow() -> SuspensionFlow<ShiftMap> {
    match flow("suspended-full-shift") {
        AnyFlow::Shift(f) => f,
        _ => unreachable!(),
    }
}

pub fn serial<T: Send>(job: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(job)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---- entropy references ----

pub fn entropy_headline(name: &str, eps: &[f64], ts: &[f64], target: f64, rel: f64) -> Check {
    let f = flow(name);
    let start = Instant::now();
    let table = serial(|| with_flow!(&f, f => entropy_estimate(f, eps, ts, 0.25))).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let err = (table.headline - target).abs() / target;
    ensure(err <= rel && secs < 60.0, || {
        format!("headline {:.4} vs {target:.4} (rel {err:.3}), {secs:.1} s", table.headline)
    })?;
    Ok(format!("headline {:.4} vs {target:.4} (rel {err:.3}), {secs:.1} s serial", table.headline))
}

/// `log` of the spectral radius of the golden-mean transition matrix.
pub fn golden_oracle() -> f64 {
    Subshift::golden_mean().spectral_entropy().unwrap()
}

// ---- certification ----

pub fn preset_certificate(name: &str, n_max: Option<usize>) -> expflow::error::Result<String> {
    let mut cfg = RunConfig::new();
    cfg.set("fixture", name)?;
    if let Some(n) = n_max {
        cfg.set("n_max", &n.to_string())?;
    }
    Ok(run(Command::Certify, &cfg)?.json.unwrap())
}

pub fn certify_cat(n_max: usize) -> Check {
    let f = flow("suspended-cat-map");
    let AnyFlow::Cat(f) = &f else { unreachable!() };
    let (p, mut cfg) = certify_preset("suspended-cat-map").ok_or("no preset")?;
    cfg.n_max = n_max;
    let p: SuspensionPoint<_> = serde_json::from_value(p).map_err(|e| e.to_string())?;
    let cert = certify_positive_entropy(f, &p, &cfg).map_err(|e| e.to_string())?;
    let report = verify_certificate(f, &cert, VerifyOptions { max_pairs: 500, seed: 7 }).map_err(|e| e.to_string())?;
    let last = cert.families.last().ok_or("no families")?;
    ensure(last.n == n_max && last.shadow_b_n.len() == 1 << n_max, || "family size".into())?;
    let ln2 = std::f64::consts::LN_2;
    ensure((cert.bound_time_changed - ln2).abs() < 1e-12, || "time-changed bound".into())?;
    ensure((cert.bound_flow - ln2 / cert.max_period()).abs() < 1e-12, || "flow bound".into())?;
    let n8 = (1usize << n_max) * ((1usize << n_max) - 1) / 2;
    Ok(format!(
        "n = {n_max}: {} pairs of C(2^{n_max}, 2) = {n8} re-checked, bounds {:.4} and {:.4}",
        report.pairs_checked, cert.bound_time_changed, cert.bound_flow
    ))
}

pub fn singular_discrimination() -> Check {
    let name = "singular-blown-up";
    let f = flow(name);
    let AnyFlow::SingularBlownUp(f) = &f else { unreachable!() };
    let (p, cfg) = certify_preset(name).ok_or("no preset")?;
    ensure(cfg.strong, || "preset must demand strong witnesses".into())?;
    let p = serde_json::from_value(p).map_err(|e| e.to_string())?;
    let cert = certify_positive_entropy(f, &p, &cfg).map_err(|e| format!("away from the disc: {e}"))?;
    verify_certificate(f, &cert, VerifyOptions::default()).map_err(|e| e.to_string())?;
    let disc = serde_json::from_value(serde_json::json!({"base": {"xf": 0.05, "yf": 0.0}, "height": 0.5})).unwrap();
    let mut cfg_disc = cfg.clone();
    cfg_disc.n_max = 1;
    match certify_positive_entropy(f, &disc, &cfg_disc) {
        Err(Error::Stage { stage, .. }) if stage == "uniform-expansivity" => {}
        other => return Err(format!("disc point: expected a uniform-expansivity failure, got {other:?}")),
    }
    let mut c = RunConfig::new();
    c.set("fixture", name).unwrap();
    c.set("point", r#"{"base":{"xf":0.05,"yf":0.0},"height":0.5}"#).unwrap();
    c.set("n_max", "1").unwrap();
    let e = run(Command::Certify, &c).err().ok_or("cli certify from the disc succeeded")?;
    ensure(expflow::cli::exit_code(&e) == 3 && e.to_string().contains("uniform-expansivity"), || {
        format!("cli: {e}")
    })?;
    Ok(format!(
        "off-disc certificate with {} families (strong); disc point exits 3 at uniform-expansivity",
        cert.families.len()
    ))
}

// ---- coding ----

/// The two fixed-point suspensions and the distinct `A_s` shadows for `n ≤ n_max`. The
/// fixed points are far apart, so each shadow is the base's exact periodic
/// shadow of the level sequence (`s` read with `a = 0`, `b = 1`).
pub fn coding_set(f: &SuspensionFlow<ShiftMap>, n_max: usize) -> Vec<SuspensionPoint<SymbolSequence>> {
    let a = SymbolSequence::constant(2, 0).unwrap();
    let b = SymbolSequence::constant(2, 1).unwrap();
    let mut ys = vec![SuspensionPoint::new(a.clone(), 0.0), SuspensionPoint::new(b.clone(), 0.0)];
    for n in 1..=n_max {
        for s in periodic_family(n).unwrap() {
            let levels: Vec<SymbolSequence> =
                (0..n as i64).map(|i| if s.symbol(i) == 0 { a.clone() } else { b.clone() }).collect();
            let z = SuspensionPoint::new(f.base().shadow_levels(&levels, true).expect("periodic shadow"), 0.0);
            // words like 0101 repeat lower-period points
            if ys.iter().all(|y| f.dist(y, &z) > 0.0) {
                ys.push(z);
            }
        }
    }
    ys
}

/// Sections crossed in one roof period by the fixed point with symbol `c`.
fn block_of(fam: &SectionFamily<SuspensionPoint<SymbolSequence>>, f: &SuspensionFlow<ShiftMap>, c: Symbol) -> Vec<usize> {
    let y = SuspensionPoint::new(SymbolSequence::constant(2, c).unwrap(), 0.0);
    let it = itinerary(fam, f, &y, 1.0 - fam.beta / 2.0, false);
    it.sections
}

/// Distinct length-`len` windows of the block-coded full 2-shift.
fn block_code_count(blocks: &[Vec<usize>; 2], len: usize) -> usize {
    let m = blocks[0].len().min(blocks[1].len()).max(1);
    let words = len / m + 3;
    let mut seen = HashSet::new();
    for code in 0..(1usize << words) {
        let mut seq = Vec::new();
        for j in 0..words {
            seq.extend_from_slice(&blocks[(code >> j) & 1]);
        }
        for w in seq.windows(len) {
            seen.insert(w.to_vec());
        }
    }
    seen.len()
}

pub fn coding_soundness() -> Check {
    let f = shift_flow();
    let fam = build_family(&f, 0.5, 0.25).map_err(|e| e.to_string())?;
    let ys = coding_set(&f, 5);
    let coded = code_system(&fam, &f, &ys, 12.0, 0.1).map_err(|e| e.to_string())?;
    let sub = coded.subshift().map_err(|e| e.to_string())?;
    let blocks = [block_of(&fam, &f, 0), block_of(&fam, &f, 1)];
    ensure(!blocks[0].is_empty() && blocks[0] != blocks[1], || format!("blocks {blocks:?}"))?;
    for len in 1..=8 {
        let got = sub.word_count(len).map_err(|e| e.to_string())? as usize;
        let want = block_code_count(&blocks, len);
        ensure(got == want, || format!("length {len}: coded {got} words, block code {want}"))?;
    }
    let codes: HashSet<_> = coded.correspondence.iter().map(|c| (c.sections.clone(), c.times.iter().map(|t| (t * 1e6).round() as i64).collect::<Vec<_>>())).collect();
    ensure(codes.len() == ys.len(), || format!("{} codes for {} points", codes.len(), ys.len()))?;
    Ok(format!(
        "{} points, {} sections, word counts match for lengths 1..=8, injective",
        ys.len(),
        coded.alphabet
    ))
}

// ---- specification ----

pub fn spec_reduction(trials: usize, seed: u64) -> Check {
    let shift = ShiftMap::full(2).unwrap();
    let eps = 0.25;
    let gap = 2 * u64::from(splice_margin(2, eps));
    let pool = shift.net(0.25);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut good = 0;
    for trial in 0..trials {
        let x = pool[rng.gen_range(0..pool.len())].clone();
        let x0 = pool[rng.gen_range(0..pool.len())].clone();
        let inst = sample_instance(&x0, &pool, gap, &mut rng).map_err(|e| e.to_string())?;
        let aug = reduce_point_to_global(&inst, &x, gap, 1000).map_err(|e| e.to_string())?;
        let cands = splice_candidates(shift.subshift(), &aug, eps);
        let Some(y) = check_spec_instance(&shift, &aug, eps, &cands) else {
            return Err(format!("trial {trial}: augmented instance not traced"));
        };
        ensure(traces(&shift, &inst, eps, &y), || format!("trial {trial}: tracing point fails the original"))?;
        ensure(shift.dist(&y, &x) < eps || traces(&shift, &aug, eps, &y), || format!("trial {trial}"))?;
        good += 1;
    }
    ensure(good == trials, || format!("{good}/{trials}"))?;
    Ok(format!("{good}/{trials} augmented instances traced, same point traces the original"))
}

// ---- properties ----

fn map_samples<M: Homeomorphism + SuspensionBase>(m: &M, count: usize, rng: &mut ChaCha8Rng) -> Vec<M::Point>
where
    M::Point: Clone,
{
    let net = m.net(0.25);
    (0..count)
        .map(|_| {
            let p = &net[rng.gen_range(0..net.len())];
            m.perturb(p, 0.2, rng)
        })
        .collect()
}

fn flow_samples<F: FlowSystem>(f: &F, count: usize, rng: &mut ChaCha8Rng) -> Vec<F::Point> {
    let net = f.net(0.5);
    (0..count)
        .map(|_| {
            let p = &net[rng.gen_range(0..net.len())];
            let q = f.perturb(p, 0.3, rng);
            f.evaluate(&q, rng.gen_range(-1.0..1.0))
        })
        .collect()
}

fn triangle_check(pts: &[impl Clone], d: impl Fn(usize, usize) -> f64, triples: usize, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = pts.len();
    for _ in 0..triples {
        let (i, j, k) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        let (dij, dji, djk, dik) = (d(i, j), d(j, i), d(j, k), d(i, k));
        ensure(d(i, i) <= 1e-12, || format!("d(x, x) = {}", d(i, i)))?;
        ensure(dij >= 0.0 && (dij - dji).abs() <= 1e-12, || format!("asymmetric: {dij} vs {dji}"))?;
        ensure(dik <= dij + djk + 1e-9, || format!("triangle: {dik} > {dij} + {djk}"))?;
    }
    Ok(())
}

pub fn metric_axioms(triples: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for name in FLOWS {
        let f = flow(name);
        with_flow!(&f, f => {
            let pts = flow_samples(f, 64, &mut rng);
            triangle_check(&pts, |i, j| f.dist(&pts[i], &pts[j]), triples, &mut rng).map_err(|e| format!("{name}: {e}"))?;
            for i in 1..pts.len() {
                if pts[i] != pts[0] {
                    ensure(f.dist(&pts[i], &pts[0]) > 0.0, || format!("{name}: distinct points at distance 0"))?;
                }
            }
        });
    }
    for name in MAPS {
        let Fixture::Map(m) = systems::fixture(name).unwrap() else { unreachable!() };
        with_map!(&m, m => {
            let pts = map_samples(m, 64, &mut rng);
            triangle_check(&pts, |i, j| Homeomorphism::dist(m, &pts[i], &pts[j]), triples, &mut rng).map_err(|e| format!("{name}: {e}"))?;
        });
    }
    Ok(format!("{triples} triples on each of {} fixtures", FLOWS.len() + MAPS.len()))
}

pub fn group_law(samples: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    for name in FLOWS {
        let f = flow(name);
        with_flow!(&f, f => {
            let pts = flow_samples(f, samples, &mut rng);
            let s: Vec<_> = pts.into_iter().map(|p| (p, rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))).collect();
            let r = group_law_residual(f, &s);
            ensure(r <= 1e3 * f.tol(), || format!("{name}: residual {r:.3e} above {:.1e}", 1e3 * f.tol()))?;
            worst = worst.max(r);
        });
    }
    Ok(format!("worst residual {worst:.2e}"))
}

pub fn random_reparam(rng: &mut ChaCha8Rng, spread: f64) -> Reparametrization {
    let k = rng.gen_range(1..6);
    let mut knots = vec![(0.0, 0.0)];
    let (mut t, mut h) = (0.0, 0.0);
    for _ in 0..k {
        let dt = rng.gen_range(0.1..2.0);
        t += dt;
        h += dt * (1.0 + rng.gen_range(-spread..spread));
        knots.push((t, h));
    }
    Reparametrization::from_knots(knots).unwrap()
}

pub fn rep_monotonicity(cases: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut members = 0;
    for _ in 0..cases {
        let h = random_reparam(&mut rng, 0.4);
        let e1 = rng.gen_range(0.01..0.5);
        let e2 = e1 + rng.gen_range(0.0..0.5);
        if rep_membership(&h, e1) {
            members += 1;
            ensure(rep_membership(&h, e2), || format!("{h:?} in Rep_{e1} but not Rep_{e2}"))?;
        }
    }
    Ok(format!("{cases} cases, {members} members at the smaller scale"))
}

pub fn delta_monotonicity(cases: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for name in ["suspended-full-shift", "suspended-cat-map"] {
        let f = flow(name);
        with_flow!(&f, f => {
            let pts = flow_samples(f, cases, &mut rng);
            for p in &pts {
                let delta = rng.gen_range(0.01..0.2);
                let chain = random_pseudo_orbit(f, p, delta, 1.0, 4, &mut rng).map_err(|e| e.to_string())?;
                ensure(validate(&chain, f).unwrap(), || format!("{name}: sampled chain invalid at its own delta"))?;
                let wider: PseudoOrbit<_> = chain.clone().with_delta(delta * rng.gen_range(1.0..3.0));
                ensure(validate(&wider, f).unwrap(), || format!("{name}: chain invalid at a larger delta"))?;
            }
        });
    }
    Ok(format!("{cases} chains per fixture"))
}

pub fn section_injectivity() -> Check {
    let mut out = Vec::new();
    for name in ["suspended-full-shift", "suspended-cat-map"] {
        let f = flow(name);
        with_flow!(&f, f => {
            let mut fam = build_family(f, 0.5, 0.25).map_err(|e| e.to_string())?;
            let net = f.net(0.25);
            let chk = check_family(f, &mut fam, &net);
            ensure(chk.injective && chk.disjoint && chk.covering, || format!("{name}: {chk:?}"))?;
            out.push(format!("{name}: {} sections on {} net points", fam.len(), chk.net_points));
        });
    }
    Ok(out.join("; "))
}

pub fn itinerary_equivariance(cases: usize) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for name in ["suspended-full-shift", "suspended-cat-map"] {
        let f = flow(name);
        with_flow!(&f, f => {
            let fam = build_family(f, 0.5, 0.25).map_err(|e| e.to_string())?;
            for y in flow_samples(f, cases, &mut rng) {
                let t = rng.gen_range(0.5..3.0);
                let h = 6.0;
                let long = itinerary(&fam, f, &y, h + t, false);
                let short = itinerary(&fam, f, &f.evaluate(&y, t), h, false);
                let tail: Vec<(usize, f64)> = long
                    .sections
                    .iter()
                    .zip(&long.times)
                    .filter(|(_, &s)| s > t + 1e-3 && s < h + t - 1e-3)
                    .map(|(&i, &s)| (i, s - t))
                    .collect();
                let inner: Vec<(usize, f64)> = short
                    .sections
                    .iter()
                    .zip(&short.times)
                    .filter(|(_, &s)| s > 1e-3 && s < h - 1e-3)
                    .map(|(&i, &s)| (i, s))
                    .collect();
                ensure(tail.len() == inner.len(), || format!("{name}: {} vs {} crossings", tail.len(), inner.len()))?;
                for (a, b) in tail.iter().zip(&inner) {
                    ensure(a.0 == b.0 && (a.1 - b.1).abs() < 1e-6, || format!("{name}: {a:?} vs {b:?}"))?;
                }
            }
        });
    }
    Ok(format!("{cases} points per fixture"))
}

fn round_trip<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(v: &T) -> Result<(), String> {
    let s = serde_json::to_string(v).map_err(|e| e.to_string())?;
    let back: T = serde_json::from_str(&s).map_err(|e| e.to_string())?;
    ensure(&back == v, || format!("round trip changed {}", std::any::type_name::<T>()))
}

pub fn json_round_trips() -> Check {
    let f = shift_flow();
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let p = flow_samples(&f, 1, &mut rng).remove(0);
    let chain = random_pseudo_orbit(&f, &p, 0.05, 1.0, 3, &mut rng).unwrap();
    round_trip(&chain)?;
    let w: ShadowWitness<_> = search_shadow(&chain, 0.1, &f, true, 64).ok_or("no shadow")?;
    round_trip(&w)?;
    round_trip(&random_reparam(&mut rng, 0.3))?;
    let fam = build_family(&f, 0.5, 0.25).unwrap();
    let coded = code_system(&fam, &f, &coding_set(&f, 2), 8.0, 0.1).unwrap();
    round_trip(&coded)?;
    let table = entropy_estimate(&f, &[0.5], &[2.0, 3.0], 0.25).unwrap();
    round_trip(&table)?;
    let text = preset_certificate("suspended-cat-map", Some(3)).map_err(|e| e.to_string())?;
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    ensure(doc["schema_version"].is_u64() && doc["result"]["schema_version"].is_u64(), || "schema_version".into())?;
    let AnyFlow::Cat(_) = flow("suspended-cat-map") else { unreachable!() };
    let cert: EntropyCertificate<SuspensionPoint<expflow::systems::TorusPoint>> =
        serde_json::from_value(doc["result"].clone()).map_err(|e| e.to_string())?;
    round_trip(&cert)?;
    let again: serde_json::Value = serde_json::from_str(&serde_json::to_string(&doc).unwrap()).unwrap();
    ensure(again == doc, || "envelope round trip".into())?;
    Ok("pseudo-orbit, witness, reparametrization, coded system, entropy table, certificate".into())
}

pub fn certificate_reverification() -> Check {
    let text = preset_certificate("suspended-cat-map", Some(4)).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    std::fs::write(&path, &text).unwrap();
    let mut cfg = RunConfig::new();
    cfg.set("certificate", path.to_str().unwrap()).unwrap();
    run(Command::Verify, &cfg).map_err(|e| e.to_string())?;
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let fam = &mut doc["result"]["families"][3]["shadow_b_n"];
    fam[5]["point"] = fam[2]["point"].clone();
    std::fs::write(&path, doc.to_string()).unwrap();
    let e = run(Command::Verify, &cfg).err().ok_or("tampered certificate passed")?;
    ensure(e.to_string().contains("shadow points 2") && e.to_string().contains(" and 5 "), || e.to_string())?;
    Ok(format!("sound certificate passes; tampered one fails with '{e}'"))
}

pub fn determinism() -> Check {
    let a = serial(|| preset_certificate("suspended-cat-map", Some(3))).map_err(|e| e.to_string())?;
    let b = preset_certificate("suspended-cat-map", Some(3)).map_err(|e| e.to_string())?;
    ensure(a == b, || "certificate JSON differs between serial and parallel runs".into())?;
    let mut cfg = RunConfig::new();
    cfg.set("fixture", "suspended-full-shift").unwrap();
    cfg.set("t_ladder", "2,3").unwrap();
    let x = run(Command::Entropy, &cfg).map_err(|e| e.to_string())?;
    cfg.set("workers", "1").unwrap();
    let y = run(Command::Entropy, &cfg).map_err(|e| e.to_string())?;
    ensure(x == y, || "entropy artifacts differ with the worker count".into())?;
    Ok(format!("{} byte certificate identical across runs and worker counts", a.len()))
}
