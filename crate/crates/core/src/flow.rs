//! The continuous-flow contract, reparametrizations of the time axis, and
//! finite-resolution classification of points (singular, periodic, non-critical,
//! non-wandering).
//!
//! Every "for all t" condition is checked on a finite horizon with a fixed grid
//! step; reports carry the horizon they were computed with.

use std::fmt::Debug;

use rand::RngCore;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sections::CrossSection;
use crate::shadowing::PseudoOrbit;

/// A continuous flow `φ: R × X → X` on a compact metric space.
///
/// Implementations must be callable from several threads at once.
pub trait FlowSystem: Send + Sync {
    type Point: Clone + Debug + PartialEq + Send + Sync + Serialize + DeserializeOwned + 'static;

    /// `φ^t(p)`.
    fn evaluate(&self, p: &Self::Point, t: f64) -> Self::Point;

    fn dist(&self, a: &Self::Point, b: &Self::Point) -> f64;

    /// A finite `eps`-net of the space.
    fn net(&self, eps: f64) -> Vec<Self::Point>;

    /// Net points within `radius` of `center`.
    fn net_near(&self, center: &Self::Point, radius: f64, eps: f64) -> Vec<Self::Point> {
        self.net(eps)
            .into_iter()
            .filter(|q| self.dist(center, q) < radius)
            .collect()
    }

    /// Candidate pool for `(t, eps)`-separated sets: points whose orbit segments
    /// of length `t` are spread at scale about `eps`. Only its growth in `t`
    /// matters to entropy estimates. Defaults to the plain net.
    fn spanning_set(&self, eps: f64, _t: f64) -> Vec<Self::Point> {
        self.net(eps)
    }

    /// Coordinates `v(p)` with `dist(a, b) = feature_dist(v(a), v(b))`, when the
    /// metric has that form; lets callers cache costly distance evaluations.
    fn features(&self, _p: &Self::Point) -> Option<Vec<f64>> {
        None
    }

    fn feature_dist(&self, _a: &[f64], _b: &[f64]) -> f64 {
        f64::NAN
    }

    /// A random point within `radius` of `p`.
    fn perturb(&self, p: &Self::Point, radius: f64, rng: &mut dyn RngCore) -> Self::Point;

    /// Candidate shadows for a pseudo-orbit supplied by the system itself, e.g.
    /// from an exact symbolic or hyperbolic model. Callers must verify them.
    fn shadow_candidates(&self, _chain: &PseudoOrbit<Self::Point>) -> Vec<(Self::Point, Reparametrization)> {
        Vec::new()
    }

    /// Candidate non-wandering returns `(x, t)` near `p` supplied by the system,
    /// e.g. solved from a linear model. Callers verify them.
    fn return_candidates(&self, _p: &Self::Point, _eta: f64, _horizon: f64) -> Vec<(Self::Point, f64)> {
        Vec::new()
    }

    /// Cross sections built from the structure of the system, if it has any.
    fn analytic_sections(&self, _alpha: f64) -> Option<AnalyticSections<Self::Point>> {
        None
    }

    /// Points the system knows to be fixed.
    fn declared_singularities(&self) -> Vec<Self::Point> {
        Vec::new()
    }

    /// Accuracy of `evaluate` (group-law residual bound).
    fn tol(&self) -> f64 {
        1e-9
    }

    fn name(&self) -> String;
}

/// Sections produced by [`FlowSystem::analytic_sections`] together with the
/// time constants they were designed for.
pub struct AnalyticSections<P> {
    pub sections: Vec<CrossSection<P>>,
    /// Time scale `e` of every section.
    pub time_scale: f64,
    /// Minimal time between two crossings.
    pub min_return: f64,
    /// Maximal time to reach the union of sections.
    pub max_return: f64,
}

/// Largest residual of the group law `φ^{t+s}(p) = φ^s(φ^t(p))` on the samples.
pub fn group_law_residual<F: FlowSystem>(f: &F, samples: &[(F::Point, f64, f64)]) -> f64 {
    samples
        .iter()
        .map(|(p, t, s)| f.dist(&f.evaluate(p, t + s), &f.evaluate(&f.evaluate(p, *t), *s)))
        .fold(0.0, f64::max)
}

const SLOPE_SLACK: f64 = 1e-12;

/// An increasing piecewise-linear homeomorphism of `R` fixing `0`, with slope 1
/// beyond the outermost knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct Reparametrization {
    knots: Vec<(f64, f64)>,
}

impl From<Reparametrization> for Vec<(f64, f64)> {
    fn from(r: Reparametrization) -> Self {
        r.knots
    }
}

impl TryFrom<Vec<(f64, f64)>> for Reparametrization {
    type Error = Error;

    fn try_from(v: Vec<(f64, f64)>) -> Result<Self> {
        Reparametrization::from_knots(v)
    }
}

impl Default for Reparametrization {
    fn default() -> Self {
        Self::identity()
    }
}

impl Reparametrization {
    pub fn identity() -> Self {
        Reparametrization { knots: vec![(0.0, 0.0)] }
    }

    /// Knots must be strictly increasing in both coordinates and contain `(0, 0)`.
    pub fn from_knots(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(Error::domain("knots must be finite"));
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        if !knots.iter().any(|&(t, v)| t == 0.0 && v == 0.0) {
            return Err(Error::domain("a reparametrization must contain the knot (0, 0)"));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) {
                return Err(Error::domain(format!(
                    "knots must be strictly increasing: {:?} then {:?}",
                    w[0], w[1]
                )));
            }
        }
        Ok(Reparametrization { knots })
    }

    /// `h(t) = c·t` on `[-span, span]`, slope 1 outside.
    pub fn linear(c: f64, span: f64) -> Result<Self> {
        if !(c > 0.0) || !(span > 0.0) {
            return Err(Error::domain("slope and span must be positive"));
        }
        Self::from_knots(vec![(-span, -c * span), (0.0, 0.0), (span, c * span)])
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = &self.knots;
        let first = k[0];
        let last = k[k.len() - 1];
        if t <= first.0 {
            return first.1 + (t - first.0);
        }
        if t >= last.0 {
            return last.1 + (t - last.0);
        }
        let j = k.partition_point(|&(x, _)| x <= t);
        let (t0, v0) = k[j - 1];
        let (t1, v1) = k[j];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    pub fn inverse(&self) -> Reparametrization {
        Reparametrization {
            knots: self.knots.iter().map(|&(t, v)| (v, t)).collect(),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Reparametrization) -> Reparametrization {
        let inv = inner.inverse();
        let mut ts: Vec<f64> = inner.knots.iter().map(|k| k.0).collect();
        ts.extend(self.knots.iter().map(|&(x, _)| inv.eval(x)));
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        let mut knots: Vec<(f64, f64)> = ts.into_iter().map(|t| (t, self.eval(inner.eval(t)))).collect();
        for k in knots.iter_mut() {
            if k.0.abs() < 1e-15 {
                *k = (0.0, 0.0);
            }
        }
        Reparametrization { knots }
    }

    /// Segment slopes, including the slope-1 extrapolation.
    pub fn slopes(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self
            .knots
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect();
        s.push(1.0);
        s
    }
}

/// Whether `h ∈ Rep_ε`: every difference quotient lies in `[1 - ε, 1 + ε]`.
/// For piecewise-linear maps it suffices to check segment slopes.
pub fn rep_membership(h: &Reparametrization, eps: f64) -> bool {
    h.slopes()
        .iter()
        .all(|s| (s - 1.0).abs() <= eps + SLOPE_SLACK)
}

/// Slopes used for reparametrization candidates: `levels` values spread
/// evenly over `[1 - eps, 1 + eps]`, ordered by distance from 1 (identity first).
pub fn slope_ladder(eps: f64, levels: usize) -> Vec<f64> {
    let levels = levels.max(1);
    let half = (levels / 2) as i64;
    let mut out = vec![1.0];
    if half == 0 {
        return out;
    }
    for k in 1..=half {
        let d = eps * k as f64 / half as f64;
        out.push(1.0 + d);
        if 1.0 - d > 0.0 {
            out.push(1.0 - d);
        }
    }
    out
}

pub const DEFAULT_LADDER_LEVELS: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CriticalKind {
    Singular,
    Periodic { period: f64 },
    NonCritical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalReport {
    #[serde(flatten)]
    pub kind: CriticalKind,
    pub tolerance: f64,
    pub horizon: f64,
}

impl CriticalReport {
    pub fn period(&self) -> Option<f64> {
        match self.kind {
            CriticalKind::Periodic { period } => Some(period),
            _ => None,
        }
    }
}

/// Minimizes a unimodal function on `[lo, hi]` by golden-section search.
pub(crate) fn golden_min(mut lo: f64, mut hi: f64, iters: usize, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    for _ in 0..iters {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    if fa <= fb {
        (a, fa)
    } else {
        (b, fb)
    }
}

/// Samples `d(φ^t p, q)` on `t = t0 + k·dt`, `k = 0..=steps`, evaluating the flow
/// incrementally.
pub(crate) fn orbit_samples<F: FlowSystem>(f: &F, p: &F::Point, t0: f64, dt: f64, steps: usize) -> Vec<F::Point> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut cur = f.evaluate(p, t0);
    out.push(cur.clone());
    for _ in 0..steps {
        cur = f.evaluate(&cur, dt);
        out.push(cur.clone());
    }
    out
}

/// Classifies `p` as singular, periodic or non-critical at resolution `tol`
/// over `[0, horizon]`, sampling with step `dt`.
pub fn classify_point<F: FlowSystem>(f: &F, p: &F::Point, horizon: f64, tol: f64, dt: f64) -> Result<CriticalReport> {
    if !(horizon > tol) || !(tol > 0.0) || !(dt > 0.0) {
        return Err(Error::domain("classify_point needs horizon > tol > 0 and dt > 0"));
    }
    let steps = (horizon / dt).ceil() as usize;
    let orbit = orbit_samples(f, p, 0.0, dt, steps);
    let disp: Vec<f64> = orbit.iter().map(|q| f.dist(q, p)).collect();
    let report = |kind| CriticalReport { kind, tolerance: tol, horizon };
    if disp.iter().all(|&d| d < tol) {
        return Ok(report(CriticalKind::Singular));
    }
    for k in 1..disp.len() {
        let t = k as f64 * dt;
        if t <= tol {
            continue;
        }
        let left = disp[k - 1];
        let right = disp.get(k + 1).copied().unwrap_or(f64::INFINITY);
        if !(disp[k] <= left && disp[k] <= right) {
            continue;
        }
        let lo = ((k - 1) as f64 * dt).max(tol);
        let (tr, dr) = golden_min(lo, t + dt, 80, |s| f.dist(&f.evaluate(p, s), p));
        let (period, d) = if dr < disp[k] { (tr, dr) } else { (t, disp[k]) };
        if d >= tol || period > horizon + dt {
            continue;
        }
        // Sustained closeness over one more period.
        let m = (period / dt).ceil() as usize;
        let sustained = (0..=m).all(|j| {
            let u = (j as f64 * dt).min(period);
            let a = f.evaluate(p, u);
            f.dist(&f.evaluate(&a, period), &a) < tol
        });
        if sustained {
            return Ok(report(CriticalKind::Periodic { period }));
        }
    }
    Ok(report(CriticalKind::NonCritical))
}

/// Non-wandering witness search: points `x` near `p` and times `t > t_min` with
/// `φ^t(x)` back within `eta` of `p`. Verified system-supplied returns come
/// first, then `p` itself and the `eta/2`-net inside `B_eta(p)`, each
/// contributing its first return.
pub fn nonwandering_witnesses<F: FlowSystem>(
    f: &F,
    p: &F::Point,
    eta: f64,
    t_min: f64,
    horizon: f64,
    dt: f64,
) -> Vec<(F::Point, f64)> {
    nonwandering_witnesses_in(f, p, eta, t_min, horizon, dt, eta / 2.0)
}

/// [`nonwandering_witnesses`] with candidates from a `net_eps`-net.
pub fn nonwandering_witnesses_in<F: FlowSystem>(
    f: &F,
    p: &F::Point,
    eta: f64,
    t_min: f64,
    horizon: f64,
    dt: f64,
    net_eps: f64,
) -> Vec<(F::Point, f64)> {
    if !(eta > 0.0) || !(horizon > t_min) || !(dt > 0.0) || !(net_eps > 0.0) {
        return Vec::new();
    }
    let mut solved: Vec<(F::Point, f64)> = f
        .return_candidates(p, eta, horizon)
        .into_par_iter()
        .filter(|(x, t)| *t > t_min && *t <= horizon && f.dist(x, p) < eta && f.dist(&f.evaluate(x, *t), p) < eta)
        .collect();
    let mut candidates = vec![p.clone()];
    for q in f.net_near(p, eta, net_eps) {
        if q != *p {
            candidates.push(q);
        }
    }
    let found: Vec<(F::Point, f64)> = candidates
        .into_par_iter()
        .filter_map(|x| first_return(f, &x, p, eta, t_min, horizon, dt).map(|t| (x, t)))
        .collect();
    solved.extend(found);
    solved
}

fn first_return<F: FlowSystem>(f: &F, x: &F::Point, p: &F::Point, eta: f64, t_min: f64, horizon: f64, dt: f64) -> Option<f64> {
    let k0 = (t_min / dt).floor() as usize + 1;
    let steps = ((horizon / dt).floor() as usize).checked_sub(k0)?;
    let samples = orbit_samples(f, x, k0 as f64 * dt, dt, steps);
    let d: Vec<f64> = samples.iter().map(|q| f.dist(q, p)).collect();
    let hit = d.iter().position(|&v| v < eta)?;
    // follow the descent to the local minimum and refine there
    let mut k = hit;
    while k + 1 < d.len() && d[k + 1] < d[k] {
        k += 1;
    }
    let t = (k0 + k) as f64 * dt;
    let lo = (t - dt).max(t_min + 1e-12);
    let (tr, dr) = golden_min(lo, t + dt, 60, |s| f.dist(&f.evaluate(x, s), p));
    if dr < d[k] && tr > t_min {
        Some(tr)
    } else {
        Some(t)
    }
}

/// First non-wandering witness in candidate order, if any.
pub fn nonwandering_witness<F: FlowSystem>(
    f: &F,
    p: &F::Point,
    eta: f64,
    t_min: f64,
    horizon: f64,
    dt: f64,
) -> Option<(F::Point, f64)> {
    nonwandering_witnesses(f, p, eta, t_min, horizon, dt).into_iter().next()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rep_membership_examples() {
        let id = Reparametrization::identity();
        for eps in [0.0, 0.01, 1.0] {
            assert!(rep_membership(&id, eps));
        }
        let h = Reparametrization::linear(1.1, 50.0).unwrap();
        assert!(rep_membership(&h, 0.1));
        assert!(!rep_membership(&h, 0.05));
        let pl = Reparametrization::from_knots(vec![(-2.0, -1.9), (0.0, 0.0), (1.0, 1.1), (3.0, 2.9), (4.0, 3.95)]).unwrap();
        assert!(rep_membership(&pl, 0.1));
        assert!(!rep_membership(&pl, 0.04));
    }

    #[test]
    fn reparametrization_validation() {
        assert!(Reparametrization::from_knots(vec![(1.0, 1.0)]).is_err());
        assert!(Reparametrization::from_knots(vec![(0.0, 0.0), (1.0, -1.0)]).is_err());
        let h = Reparametrization::from_knots(vec![(0.0, 0.0), (2.0, 1.0)]).unwrap();
        assert_eq!(h.eval(0.0), 0.0);
        assert_eq!(h.eval(1.0), 0.5);
        assert_eq!(h.eval(3.0), 2.0);
        assert_eq!(h.eval(-1.0), -1.0);
        let js = serde_json::to_string(&h).unwrap();
        assert_eq!(js, "[[0.0,0.0],[2.0,1.0]]");
        assert!(serde_json::from_str::<Reparametrization>("[[1.0,2.0]]").is_err());
    }

    #[test]
    fn compose_and_inverse() {
        let h = Reparametrization::from_knots(vec![(-1.0, -0.9), (0.0, 0.0), (2.0, 2.2)]).unwrap();
        let id = Reparametrization::identity();
        for t in [-3.0, -0.5, 0.0, 0.7, 2.5] {
            assert!((h.compose(&id).eval(t) - h.eval(t)).abs() < 1e-12);
            assert!((id.compose(&h).eval(t) - h.eval(t)).abs() < 1e-12);
            assert!((h.inverse().eval(h.eval(t)) - t).abs() < 1e-12);
        }
        assert_eq!(rep_membership(&h.compose(&id), 0.1), rep_membership(&h, 0.1));
    }

    #[test]
    fn ladder_is_identity_first() {
        let l = slope_ladder(0.2, DEFAULT_LADDER_LEVELS);
        assert_eq!(l.len(), 9);
        assert_eq!(l[0], 1.0);
        assert!(l.iter().all(|s| (s - 1.0).abs() <= 0.2 + 1e-15));
    }
}
