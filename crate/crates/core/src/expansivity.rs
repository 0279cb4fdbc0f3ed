//! Finite-scale expansivity tests.
//!
//! A pair `(x, y)` δ-tracks under `h` when `d(φ^t x, φ^{h(t)} y) < δ` for every
//! grid time `t ∈ [-H, H]`. Expansivity at scale `(ε, δ)` demands that every
//! tracking pair lies on one orbit up to a time shift below `ε`; numerically,
//! `min_{|τ| ≤ ε} d(φ^τ x, y)` must fall below a resolution.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{golden_min, slope_ladder, FlowSystem, Reparametrization, DEFAULT_LADDER_LEVELS};

/// Scales of an expansivity test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansivityScale {
    pub eps: f64,
    pub delta: f64,
    pub horizon: f64,
    /// Working constant `e = δ/8` used by the entropy pipeline.
    pub e: f64,
    /// Distance below which `y` counts as lying on the orbit of `x`.
    pub resolution: f64,
    /// Grid step of the tracking test.
    pub dt: f64,
    pub ladder_levels: usize,
}

impl ExpansivityScale {
    pub fn new(eps: f64, delta: f64, horizon: f64) -> Result<Self> {
        if !(eps > 0.0) || !(delta > 0.0) || !(horizon > 0.0) {
            return Err(Error::domain("eps, delta and horizon must be positive"));
        }
        if delta >= eps {
            return Err(Error::domain(format!("delta {delta} must be below eps {eps}")));
        }
        Ok(ExpansivityScale {
            eps,
            delta,
            horizon,
            e: delta / 8.0,
            resolution: 1e-6,
            dt: 0.05,
            ladder_levels: DEFAULT_LADDER_LEVELS,
        })
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_resolution(mut self, r: f64) -> Self {
        self.resolution = r;
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self.e = delta / 8.0;
        self
    }
}

/// A pair that tracks yet is not on one orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "P: Serialize", deserialize = "P: DeserializeOwned"))]
pub struct Counterexample<P> {
    pub x: P,
    pub y: P,
    #[serde(rename = "knots")]
    pub reparam: Reparametrization,
    /// Largest tracking distance over the horizon.
    pub tracking: f64,
    /// `min_{|τ| ≤ ε} d(φ^τ x, y)`.
    pub orbit_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
#[serde(bound(serialize = "P: Serialize", deserialize = "P: DeserializeOwned"))]
pub enum Verdict<P> {
    Pass,
    Fail(Counterexample<P>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "P: Serialize", deserialize = "P: DeserializeOwned"))]
pub struct ExpansivityReport<P> {
    pub verdict: Verdict<P>,
    pub scale: ExpansivityScale,
    pub pairs_tested: usize,
    /// Smallest tracking distance among violating pairs: below it, tracking
    /// pairs were all found on one orbit.
    pub constant: Option<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl<P> ExpansivityReport<P> {
    pub fn passed(&self) -> bool {
        matches!(self.verdict, Verdict::Pass)
    }
}

/// Sup of `d(φ^t x, φ^{h(t)} y)` over the grid, or `None` once it reaches `delta`.
pub fn tracking_distance<F: FlowSystem>(
    f: &F,
    x: &F::Point,
    y: &F::Point,
    h: &Reparametrization,
    delta: f64,
    horizon: f64,
    dt: f64,
) -> Option<f64> {
    let steps = (horizon / dt).ceil() as usize;
    let step = horizon / steps.max(1) as f64;
    let mut worst = f.dist(x, y);
    if worst >= delta {
        return None;
    }
    for dir in [1.0, -1.0] {
        let mut a = x.clone();
        let mut b = y.clone();
        let mut hb = 0.0;
        for k in 1..=steps {
            let t = dir * k as f64 * step;
            a = f.evaluate(&a, dir * step);
            let ht = h.eval(t);
            b = f.evaluate(&b, ht - hb);
            hb = ht;
            let d = f.dist(&a, &b);
            worst = worst.max(d);
            if worst >= delta {
                return None;
            }
        }
    }
    Some(worst)
}

/// `min_{|τ| ≤ ε} d(φ^τ x, y)`.
pub fn orbit_gap<F: FlowSystem>(f: &F, x: &F::Point, y: &F::Point, eps: f64) -> f64 {
    let n = 32usize;
    let h = 2.0 * eps / n as f64;
    let mut best = (0.0, f.dist(x, y));
    let mut cur = f.evaluate(x, -eps);
    for k in 0..=n {
        let tau = -eps + k as f64 * h;
        let d = f.dist(&cur, y);
        if d < best.1 {
            best = (tau, d);
        }
        cur = f.evaluate(&cur, h);
    }
    let lo = (best.0 - h).max(-eps);
    let hi = (best.0 + h).min(eps);
    let (_, d) = golden_min(lo, hi, 60, |tau| f.dist(&f.evaluate(x, tau), y));
    d.min(best.1)
}

/// Tests one pair against every ladder reparametrization.
pub fn test_pair<F: FlowSystem>(
    f: &F,
    x: &F::Point,
    y: &F::Point,
    scale: &ExpansivityScale,
) -> Option<Counterexample<F::Point>> {
    let mut gap: Option<f64> = None;
    for c in slope_ladder(scale.eps, scale.ladder_levels) {
        let h = if c == 1.0 {
            Reparametrization::identity()
        } else {
            Reparametrization::linear(c, scale.horizon).ok()?
        };
        let Some(tr) = tracking_distance(f, x, y, &h, scale.delta, scale.horizon, scale.dt) else {
            continue;
        };
        let g = *gap.get_or_insert_with(|| orbit_gap(f, x, y, scale.eps));
        if g >= scale.resolution {
            return Some(Counterexample {
                x: x.clone(),
                y: y.clone(),
                reparam: h,
                tracking: tr,
                orbit_gap: g,
            });
        }
    }
    None
}

/// Runs the pair test over `pairs`; the first violation in pair order is reported.
pub fn expansive_check<F: FlowSystem>(
    f: &F,
    scale: &ExpansivityScale,
    pairs: &[(F::Point, F::Point)],
) -> ExpansivityReport<F::Point> {
    let results: Vec<Option<Counterexample<F::Point>>> =
        pairs.par_iter().map(|(x, y)| test_pair(f, x, y, scale)).collect();
    let constant = results
        .iter()
        .flatten()
        .map(|c| c.tracking)
        .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))));
    let verdict = match results.into_iter().flatten().next() {
        Some(c) => Verdict::Fail(c),
        None => Verdict::Pass,
    };
    ExpansivityReport {
        verdict,
        scale: *scale,
        pairs_tested: pairs.len(),
        constant,
        seed: None,
    }
}

/// Up to `count` distinct pairs of net points, drawn with a seeded shuffle.
pub fn sample_pairs<F: FlowSystem>(f: &F, net_eps: f64, count: usize, seed: u64) -> Vec<(F::Point, F::Point)> {
    let net = f.net(net_eps);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = net.len();
    if n < 2 {
        return Vec::new();
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        idx.shuffle(&mut rng);
        for w in idx.chunks(2) {
            if w.len() == 2 && out.len() < count {
                out.push((net[w[0]].clone(), net[w[1]].clone()));
            }
        }
        if n < 4 {
            break;
        }
    }
    out
}

/// Pairs among `x` and the net points inside `B_{u_radius}(x)`.
pub fn local_pairs<F: FlowSystem>(f: &F, x: &F::Point, u_radius: f64, net_eps: f64) -> Vec<(F::Point, F::Point)> {
    let mut pts = vec![x.clone()];
    for q in f.net_near(x, u_radius, net_eps) {
        if !pts.contains(&q) {
            pts.push(q);
        }
    }
    let mut out = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            out.push((pts[i].clone(), pts[j].clone()));
        }
    }
    out
}

/// The expansivity test restricted to pairs in `B_{u_radius}(x)`.
pub fn uniformly_expansive_check<F: FlowSystem>(
    f: &F,
    x: &F::Point,
    u_radius: f64,
    scale: &ExpansivityScale,
    net_eps: f64,
) -> Result<ExpansivityReport<F::Point>> {
    if !(u_radius > 0.0) || !(net_eps > 0.0) {
        return Err(Error::domain("neighborhood radius and net scale must be positive"));
    }
    let pairs = local_pairs(f, x, u_radius, net_eps);
    Ok(expansive_check(f, scale, &pairs))
}

/// Largest ratio `d(φ^t q, φ^t x) / d(q, x)` over sampled `q` near `x`.
pub fn lipschitz_estimate<F: FlowSystem>(f: &F, x: &F::Point, t: f64, radius: f64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fx = f.evaluate(x, t);
    let mut l: f64 = 1.0;
    for _ in 0..32 {
        let q = f.perturb(x, radius, &mut rng);
        let d0 = f.dist(&q, x);
        if d0 > 0.0 {
            l = l.max(f.dist(&f.evaluate(&q, t), &fx) / d0);
        }
    }
    l
}

/// Whether the uniform test still passes at `φ^t x` on the image neighborhood,
/// approximated by the ball of radius `u_radius / L` with `L` the sampled
/// Lipschitz constant of `φ^{-t}` there.
pub fn invariance_probe<F: FlowSystem>(
    f: &F,
    x: &F::Point,
    t: f64,
    u_radius: f64,
    scale: &ExpansivityScale,
    net_eps: f64,
) -> Result<bool> {
    let base = uniformly_expansive_check(f, x, u_radius, scale, net_eps)?;
    if !base.passed() {
        return Err(Error::Precondition(
            "the point itself is not uniformly expansive at this scale".into(),
        ));
    }
    if t == 0.0 {
        return Ok(true);
    }
    let y = f.evaluate(x, t);
    let l = lipschitz_estimate(f, &y, -t, u_radius / 4.0, 0);
    let r = u_radius / l.max(1.0);
    Ok(uniformly_expansive_check(f, &y, r, scale, net_eps.min(r))?.passed())
}
