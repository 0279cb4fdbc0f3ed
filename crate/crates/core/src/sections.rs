//! Cross sections, section families, itineraries and the coding of a flow as
//! a suspension of a subshift.
//!
//! A section is the zero set of a phase function restricted to a domain. A
//! trajectory crosses it when the phase changes sign from negative to
//! nonnegative inside the domain; crossings are located on a time grid and
//! refined by bisection.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{golden_min, FlowSystem};
use crate::symbolic::Subshift;

/// Phase values within this bound count as lying on the section.
pub const MEMBER_TOL: f64 = 1e-7;

/// Phase jumps larger than this between grid points are discontinuities, not crossings.
const PHASE_JUMP: f64 = 0.25;

pub type Phase<P> = Arc<dyn Fn(&P) -> f64 + Send + Sync>;
pub type Domain<P> = Arc<dyn Fn(&P) -> bool + Send + Sync>;

/// A cross section of time `e`.
#[derive(Clone)]
pub struct CrossSection<P> {
    name: String,
    phase: Phase<P>,
    domain: Domain<P>,
    time_scale: f64,
    diameter_bound: f64,
    samples: Vec<P>,
}

impl<P: Debug> Debug for CrossSection<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CrossSection")
            .field("name", &self.name)
            .field("time_scale", &self.time_scale)
            .field("samples", &self.samples.len())
            .finish()
    }
}

impl<P: Clone> CrossSection<P> {
    /// Section `{phase = 0} ∩ domain`.
    pub fn level(
        name: impl Into<String>,
        time_scale: f64,
        phase: impl Fn(&P) -> f64 + Send + Sync + 'static,
        domain: impl Fn(&P) -> bool + Send + Sync + 'static,
    ) -> Self {
        CrossSection {
            name: name.into(),
            phase: Arc::new(phase),
            domain: Arc::new(domain),
            time_scale,
            diameter_bound: f64::INFINITY,
            samples: Vec::new(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn time_scale(&self) -> f64 {
        self.time_scale
    }

    pub fn diameter_bound(&self) -> f64 {
        self.diameter_bound
    }

    pub fn samples(&self) -> &[P] {
        &self.samples
    }

    pub fn phase(&self, p: &P) -> f64 {
        self.phase.as_ref()(p)
    }

    pub fn in_domain(&self, p: &P) -> bool {
        self.domain.as_ref()(p)
    }

    pub fn contains(&self, p: &P) -> bool {
        let v = self.phase(p);
        v.abs() <= MEMBER_TOL && self.in_domain(p)
    }

    pub fn with_diameter_bound(mut self, d: f64) -> Self {
        self.diameter_bound = d;
        self
    }

    pub fn push_sample(&mut self, p: P) {
        self.samples.push(p);
    }

    /// Largest pairwise distance among the samples.
    pub fn sample_diameter(&self, dist: impl Fn(&P, &P) -> f64) -> f64 {
        let mut d: f64 = 0.0;
        for (i, a) in self.samples.iter().enumerate() {
            for b in &self.samples[i + 1..] {
                d = d.max(dist(a, b));
            }
        }
        d
    }
}

/// Outer sections `T_i`, inner sections `S_i ⊂ T_i*`, and the time constants.
#[derive(Debug, Clone)]
pub struct SectionFamily<P> {
    pub outer: Vec<CrossSection<P>>,
    pub inner: Vec<CrossSection<P>>,
    pub alpha: f64,
    pub beta: f64,
    pub rho: f64,
    pub xi: f64,
    /// Time scale `e` shared by the sections.
    pub time_scale: f64,
    /// Grid step used for crossing detection.
    pub scan_step: f64,
}

impl<P: Clone> SectionFamily<P> {
    pub fn len(&self) -> usize {
        self.outer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outer.is_empty()
    }
}

/// One located crossing.
#[derive(Debug, Clone)]
pub struct Crossing<P> {
    pub section: usize,
    pub time: f64,
    pub point: P,
}

fn upward(a: f64, b: f64) -> bool {
    a < 0.0 && b >= 0.0 && b - a < PHASE_JUMP
}

/// Refines a sign change of `sec`'s phase between `pa` (time 0) and time `h`.
fn refine<F: FlowSystem>(f: &F, sec: &CrossSection<F::Point>, pa: &F::Point, h: f64) -> (f64, F::Point) {
    let (mut lo, mut hi) = (0.0, h);
    let mut p_hi = f.evaluate(pa, h);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let q = f.evaluate(pa, mid);
        let v = sec.phase(&q);
        if v >= 0.0 && v - sec.phase(pa) < PHASE_JUMP {
            hi = mid;
            p_hi = q;
        } else {
            lo = mid;
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    (hi, p_hi)
}

/// Crossings of `sections` along `φ^t(y)`, `t` between 0 and `span`
/// (negative `span` scans backward). A crossing at `t = 0` is reported only
/// when scanning forward.
pub fn scan_crossings<F: FlowSystem>(
    f: &F,
    sections: &[CrossSection<F::Point>],
    y: &F::Point,
    span: f64,
    dt: f64,
) -> Vec<Crossing<F::Point>> {
    let mut out = Vec::new();
    let forward = span >= 0.0;
    let steps = (span.abs() / dt).ceil() as usize;
    let h = span.abs() / steps.max(1) as f64;
    let mut cur = y.clone();
    let mut ph: Vec<f64> = sections.iter().map(|s| s.phase(&cur)).collect();
    if forward {
        for (j, s) in sections.iter().enumerate() {
            if ph[j] >= 0.0 && ph[j] <= MEMBER_TOL && s.in_domain(&cur) {
                out.push(Crossing {
                    section: j,
                    time: 0.0,
                    point: cur.clone(),
                });
            }
        }
    }
    for k in 0..steps {
        let t_prev = k as f64 * h;
        let next = f.evaluate(&cur, if forward { h } else { -h });
        let nph: Vec<f64> = sections.iter().map(|s| s.phase(&next)).collect();
        let mut found: Vec<Crossing<F::Point>> = Vec::new();
        for (j, s) in sections.iter().enumerate() {
            // in forward time the earlier point is `cur`; backward it is `next`
            let (early, a, b) = if forward { (&cur, ph[j], nph[j]) } else { (&next, nph[j], ph[j]) };
            if !upward(a, b) {
                continue;
            }
            let (tau, q) = refine(f, s, early, h);
            if !s.in_domain(&q) {
                continue;
            }
            let time = if forward { t_prev + tau } else { -(t_prev + h) + tau };
            found.push(Crossing { section: j, time, point: q });
        }
        if forward {
            found.sort_by(|a, b| a.time.total_cmp(&b.time));
        } else {
            found.sort_by(|a, b| b.time.total_cmp(&a.time));
        }
        out.extend(found);
        cur = next;
        ph = nph;
    }
    out
}

/// Symbols and crossing times of an orbit through the inner sections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Itinerary {
    pub sections: Vec<usize>,
    /// Absolute crossing times, increasing.
    pub times: Vec<f64>,
    pub periodic: bool,
    /// Number of entries per period when periodic.
    pub period_len: Option<usize>,
}

impl Itinerary {
    /// Pairs `(S_i, t_i)`: the section crossed and the time to the next crossing.
    pub fn entries(&self) -> Vec<(usize, f64)> {
        self.sections
            .iter()
            .zip(self.times.windows(2))
            .map(|(&s, w)| (s, w[1] - w[0]))
            .collect()
    }

    pub fn gaps(&self) -> Vec<f64> {
        self.times.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn len(&self) -> usize {
        self.sections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sections.is_empty()
    }

    fn detect_period(&mut self, tol: f64) {
        let e = self.entries();
        let n = e.len();
        for p in 1..=n / 2 {
            let ok = (0..n - p).all(|j| e[j].0 == e[j + p].0 && (e[j].1 - e[j + p].1).abs() <= tol);
            if ok {
                self.periodic = true;
                self.period_len = Some(p);
                return;
            }
        }
    }
}

/// Itinerary of `y` through the inner sections on `[0, horizon]`, or on
/// `[-horizon, horizon]` when `bilateral`.
pub fn itinerary<F: FlowSystem>(
    fam: &SectionFamily<F::Point>,
    f: &F,
    y: &F::Point,
    horizon: f64,
    bilateral: bool,
) -> Itinerary {
    let mut cr = Vec::new();
    if bilateral {
        let mut back = scan_crossings(f, &fam.inner, y, -horizon, fam.scan_step);
        back.reverse();
        cr.extend(back);
    }
    for c in scan_crossings(f, &fam.inner, y, horizon, fam.scan_step) {
        // both scans report a crossing at time 0
        if matches!(cr.last(), Some(l) if l.section == c.section && (l.time - c.time).abs() < fam.scan_step) {
            continue;
        }
        cr.push(c);
    }
    let mut it = Itinerary {
        sections: cr.iter().map(|c| c.section).collect(),
        times: cr.iter().map(|c| c.time).collect(),
        periodic: false,
        period_len: None,
    };
    it.detect_period(1e-6);
    it
}

/// Projects `y` onto section `i` along the flow: the crossing of smallest
/// `|t*| ≤ ρ`, returned with `t*`.
pub fn project<F: FlowSystem>(fam: &SectionFamily<F::Point>, f: &F, i: usize, y: &F::Point) -> Result<(F::Point, f64)> {
    let sec = fam
        .outer
        .get(i)
        .ok_or_else(|| Error::domain(format!("section {i} out of range ({})", fam.len())))?;
    if sec.contains(y) {
        return Ok((y.clone(), 0.0));
    }
    let dt = (fam.rho / 16.0).min(fam.scan_step);
    let one = std::slice::from_ref(sec);
    let fwd = scan_crossings(f, one, y, fam.rho, dt).into_iter().next();
    let bwd = scan_crossings(f, one, y, -fam.rho, dt).into_iter().next();
    let best = match (fwd, bwd) {
        (Some(a), Some(b)) => Some(if a.time.abs() <= b.time.abs() { a } else { b }),
        (a, b) => a.or(b),
    };
    best.map(|c| (c.point, c.time))
        .ok_or_else(|| Error::Range(format!("no crossing of section {i} within time {}", fam.rho)))
}

/// Slack on crossing times located by bisection.
const CROSSING_TOL: f64 = 1e-6;

/// Outcome of checking the family invariants on a net.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyCheck {
    pub net_points: usize,
    pub disjoint: bool,
    pub covering: bool,
    pub injective: bool,
    pub min_return: f64,
    pub max_sample_diameter: f64,
}

impl FamilyCheck {
    pub fn passed(&self, beta: f64, rho: f64) -> bool {
        self.disjoint && self.covering && self.injective && beta <= self.min_return + CROSSING_TOL && 2.0 * rho < beta
    }
}

/// Largest number of net points used to validate a family.
pub const MAX_CHECK_POINTS: usize = 400;

fn thin<P: Clone>(net: Vec<P>, cap: usize) -> Vec<P> {
    if net.len() <= cap {
        return net;
    }
    let stride = net.len() as f64 / cap as f64;
    (0..cap).map(|k| net[(k as f64 * stride) as usize].clone()).collect()
}

/// Fills section samples from the net and checks disjointness, covering,
/// time-`e` injectivity and the minimal return time.
pub fn check_family<F: FlowSystem>(f: &F, fam: &mut SectionFamily<F::Point>, net: &[F::Point]) -> FamilyCheck {
    let horizon = 2.0 * fam.alpha;
    let fwd: Vec<Vec<Crossing<F::Point>>> = net
        .par_iter()
        .map(|p| scan_crossings(f, &fam.outer, p, horizon, fam.scan_step))
        .collect();
    let covering_fwd = fwd
        .iter()
        .all(|c| c.first().map(|x| x.time <= fam.alpha).unwrap_or(false));
    let covering_bwd = net.par_iter().all(|p| {
        if fam.outer.iter().any(|s| s.contains(p)) {
            return true;
        }
        scan_crossings(f, &fam.outer, p, -fam.alpha, fam.scan_step)
            .first()
            .is_some()
    });
    let mut min_return = f64::INFINITY;
    for c in &fwd {
        for w in c.windows(2) {
            min_return = min_return.min(w[1].time - w[0].time);
        }
    }
    for s in fam.outer.iter_mut() {
        s.samples.clear();
    }
    for c in &fwd {
        if let Some(x) = c.first() {
            if fam.outer[x.section].samples.len() < 64 {
                fam.outer[x.section].samples.push(x.point.clone());
            }
        }
    }
    let disjoint = fam.outer.iter().enumerate().all(|(i, s)| {
        s.samples
            .iter()
            .all(|p| fam.outer.iter().enumerate().all(|(j, t)| i == j || !t.contains(p)))
    });
    let e = fam.time_scale;
    let injective = fam.outer.par_iter().all(|s| {
        s.samples.iter().all(|x| {
            (1..=8).all(|k| {
                let t = e * k as f64 / 8.0;
                !s.contains(&f.evaluate(x, t)) && !s.contains(&f.evaluate(x, -t))
            })
        })
    });
    let mut max_diam: f64 = 0.0;
    for s in fam.outer.iter_mut() {
        let d = s.sample_diameter(|a, b| f.dist(a, b));
        if s.diameter_bound.is_infinite() {
            s.diameter_bound = d;
        }
        max_diam = max_diam.max(d);
    }
    fam.inner = fam.outer.clone();
    FamilyCheck {
        net_points: net.len(),
        disjoint,
        covering: covering_fwd && covering_bwd,
        injective,
        min_return,
        max_sample_diameter: max_diam,
    }
}

fn reject_singular<F: FlowSystem>(f: &F, net: &[F::Point]) -> Result<()> {
    if !f.declared_singularities().is_empty() {
        return Err(Error::Unsupported(format!(
            "{} has singular points; sections need a flow without singularities",
            f.name()
        )));
    }
    let dt = 1e-3;
    if let Some(p) = net.iter().find(|p| f.dist(&f.evaluate(p, dt), p) < f.tol()) {
        return Err(Error::Unsupported(format!("singular point detected at {p:?}")));
    }
    Ok(())
}

/// A family of disjoint sections of time `e` through which every orbit passes
/// within time `alpha`, checked on an `net_eps`-net.
pub fn build_family<F: FlowSystem + Clone + 'static>(f: &F, alpha: f64, net_eps: f64) -> Result<SectionFamily<F::Point>> {
    if !(alpha > 0.0) || !(net_eps > 0.0) {
        return Err(Error::domain("alpha and net_eps must be positive"));
    }
    let net = thin(f.net(net_eps), MAX_CHECK_POINTS);
    reject_singular(f, &net)?;
    let mut fam = match f.analytic_sections(alpha) {
        Some(a) => {
            let beta = a.min_return;
            let rho = beta / 4.0;
            SectionFamily {
                inner: a.sections.clone(),
                outer: a.sections,
                alpha,
                beta,
                rho,
                xi: rho / 2.0,
                time_scale: a.time_scale,
                scan_step: (beta / 4.0).min(alpha / 4.0),
            }
        }
        None => greedy_family(f, alpha, &net)?,
    };
    let check = check_family(f, &mut fam, &net);
    if !check.passed(fam.beta, fam.rho) {
        return Err(Error::stage(
            "build_family",
            format!("section family fails its invariants on the net: {check:?}"),
        ));
    }
    Ok(fam)
}

/// Sections through seed points: near `x0`, the phase is minus the local
/// time of closest approach to `x0`.
fn seeded_section<F: FlowSystem + Clone + 'static>(f: &F, x0: F::Point, radius: f64, e: f64, name: String) -> CrossSection<F::Point> {
    let f1 = f.clone();
    let x1 = x0.clone();
    let closest = move |p: &F::Point| -> (f64, f64) {
        golden_min(-e, e, 40, |tau| f1.dist(&f1.evaluate(p, tau), &x1))
    };
    let c1 = closest.clone();
    let phase = move |p: &F::Point| {
        let (tau, d) = c1(p);
        if d < radius && tau.abs() < 0.9 * e {
            -tau
        } else {
            f64::NAN
        }
    };
    let domain = move |p: &F::Point| {
        let (tau, d) = closest(p);
        d < radius && tau.abs() < 0.9 * e
    };
    CrossSection::level(name, e / 2.0, phase, domain)
}

fn greedy_family<F: FlowSystem + Clone + 'static>(f: &F, alpha: f64, net: &[F::Point]) -> Result<SectionFamily<F::Point>> {
    let e = alpha / 4.0;
    let radius = net
        .iter()
        .skip(1)
        .map(|q| f.dist(&net[0], q))
        .fold(f64::INFINITY, f64::min)
        .max(1e-6)
        * 2.0;
    let scan_step = e / 4.0;
    let mut sections: Vec<CrossSection<F::Point>> = Vec::new();
    for p in net {
        let covered = !scan_crossings(f, &sections, p, alpha, scan_step).is_empty();
        if covered {
            continue;
        }
        let seed = f.evaluate(p, alpha / 2.0);
        let clash = sections.iter().any(|s| {
            (-4..=4).any(|k| s.contains(&f.evaluate(&seed, e * k as f64 / 4.0)))
        });
        if clash {
            continue;
        }
        let name = format!("seed{}", sections.len());
        sections.push(seeded_section(f, seed, radius, e, name));
    }
    if sections.is_empty() {
        return Err(Error::stage("build_family", "no seed section could be placed"));
    }
    let mut min_gap = f64::INFINITY;
    for p in net {
        let c = scan_crossings(f, &sections, p, 2.0 * alpha, scan_step);
        for w in c.windows(2) {
            min_gap = min_gap.min(w[1].time - w[0].time);
        }
    }
    let beta = min_gap.min(alpha / 2.0);
    let rho = beta / 4.0;
    Ok(SectionFamily {
        inner: sections.clone(),
        outer: sections,
        alpha,
        beta,
        rho,
        xi: rho / 2.0,
        time_scale: e / 2.0,
        scan_step,
    })
}

/// Observed crossing times for one transition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoofEntry {
    pub from: usize,
    pub to: usize,
    pub mean: f64,
    pub spread: f64,
    pub count: usize,
}

/// Code of one point: bilateral crossing symbols and times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeEntry {
    pub point_id: usize,
    pub sections: Vec<usize>,
    pub times: Vec<f64>,
}

/// The coded model: a subshift on section indices with a crossing-time roof.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodedSystem {
    pub schema_version: u32,
    pub alphabet: usize,
    pub transitions: Vec<Vec<bool>>,
    pub roof_table: Vec<RoofEntry>,
    pub correspondence: Vec<CodeEntry>,
}

impl CodedSystem {
    pub fn subshift(&self) -> Result<Subshift> {
        Subshift::from_transitions(self.transitions.clone())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV of the itineraries: one row per crossing.
    pub fn itineraries_csv(&self) -> String {
        let mut out = String::from("point_id,index,section,time\n");
        for c in &self.correspondence {
            for (k, (s, t)) in c.sections.iter().zip(&c.times).enumerate() {
                out.push_str(&format!("{},{},{},{}\n", c.point_id, k, s, t));
            }
        }
        out
    }

    pub fn roof(&self, from: usize, to: usize) -> Option<&RoofEntry> {
        self.roof_table.iter().find(|r| r.from == from && r.to == to)
    }
}

/// Codes the points of `ys` by their bilateral itineraries over `horizon`.
/// Two points with matching codes (same symbols, crossing times within `ρ`)
/// must stay within `2 eps` along `[-horizon/2, horizon/2]`.
pub fn code_system<F: FlowSystem>(
    fam: &SectionFamily<F::Point>,
    f: &F,
    ys: &[F::Point],
    horizon: f64,
    eps: f64,
) -> Result<CodedSystem> {
    if ys.is_empty() {
        return Err(Error::domain("cannot code an empty point set"));
    }
    if fam.len() > 256 {
        return Err(Error::Coding(format!("{} sections exceed the symbol range", fam.len())));
    }
    let its: Vec<Itinerary> = ys.par_iter().map(|y| itinerary(fam, f, y, horizon, true)).collect();
    let k = fam.len();
    let mut transitions = vec![vec![false; k]; k];
    let mut obs: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for it in &its {
        for (j, w) in it.sections.windows(2).enumerate() {
            transitions[w[0]][w[1]] = true;
            obs.entry((w[0], w[1])).or_default().push(it.times[j + 1] - it.times[j]);
        }
    }
    let roof_table = obs
        .into_iter()
        .map(|((from, to), v)| {
            let mean = v.iter().sum::<f64>() / v.len() as f64;
            let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            RoofEntry {
                from,
                to,
                mean,
                spread: hi - lo,
                count: v.len(),
            }
        })
        .collect();
    // injectivity at scale 2 eps
    let n = ys.len();
    let same_code = |a: &Itinerary, b: &Itinerary| {
        a.sections == b.sections && a.times.iter().zip(&b.times).all(|(x, y)| (x - y).abs() <= fam.rho)
    };
    let steps = ((horizon / fam.scan_step).ceil() as usize).max(1);
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| same_code(&its[i], &its[j]))
        .collect();
    let clash = pairs.par_iter().find_first(|&&(i, j)| {
        let mut a = f.evaluate(&ys[i], -horizon / 2.0);
        let mut b = f.evaluate(&ys[j], -horizon / 2.0);
        let h = horizon / steps as f64;
        for _ in 0..=steps {
            if f.dist(&a, &b) > 2.0 * eps {
                return true;
            }
            a = f.evaluate(&a, h);
            b = f.evaluate(&b, h);
        }
        false
    });
    if let Some(&(i, j)) = clash {
        return Err(Error::Coding(format!(
            "points {i} and {j} share a code but their orbits separate beyond 2 eps = {}",
            2.0 * eps
        )));
    }
    Ok(CodedSystem {
        schema_version: crate::io::SCHEMA_VERSION,
        alphabet: k,
        transitions,
        roof_table,
        correspondence: its
            .into_iter()
            .enumerate()
            .map(|(point_id, it)| CodeEntry {
                point_id,
                sections: it.sections,
                times: it.times,
            })
            .collect(),
    })
}
