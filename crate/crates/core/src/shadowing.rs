//! Pseudo-orbits, shadow verification and shadow search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{rep_membership, slope_ladder, FlowSystem, Reparametrization, DEFAULT_LADDER_LEVELS};
use crate::symbolic::{Extension, SymbolSequence};

/// A finite or periodic list of orbit segments `(x_i, t_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "P: Serialize", deserialize = "P: DeserializeOwned"))]
pub struct PseudoOrbit<P> {
    entries: Vec<(P, f64)>,
    delta: f64,
    #[serde(rename = "T")]
    t_min: f64,
    extension: ChainExtension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainExtension {
    Finite,
    Periodic,
}

impl<P: Clone> PseudoOrbit<P> {
    pub fn new(entries: Vec<(P, f64)>, delta: f64, t_min: f64, periodic: bool) -> Result<Self> {
        if !(delta > 0.0) || !(t_min > 0.0) {
            return Err(Error::domain("delta and T must be positive"));
        }
        if let Some((i, _)) = entries.iter().enumerate().find(|(_, e)| !(e.1 > 0.0) || !e.1.is_finite()) {
            return Err(Error::domain(format!("entry {i} has a non-positive time")));
        }
        Ok(PseudoOrbit {
            entries,
            delta,
            t_min,
            extension: if periodic {
                ChainExtension::Periodic
            } else {
                ChainExtension::Finite
            },
        })
    }

    pub fn finite(entries: Vec<(P, f64)>, delta: f64, t_min: f64) -> Result<Self> {
        Self::new(entries, delta, t_min, false)
    }

    pub fn periodic(entries: Vec<(P, f64)>, delta: f64, t_min: f64) -> Result<Self> {
        Self::new(entries, delta, t_min, true)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_periodic(&self) -> bool {
        self.extension == ChainExtension::Periodic
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn entries(&self) -> &[(P, f64)] {
        &self.entries
    }

    fn slot(&self, i: i64) -> usize {
        let n = self.entries.len() as i64;
        if self.is_periodic() {
            i.rem_euclid(n) as usize
        } else {
            assert!(i >= 0 && i < n, "entry {i} outside a finite chain of {n}");
            i as usize
        }
    }

    /// Entry `i`; periodic chains accept any integer index.
    pub fn entry(&self, i: i64) -> (&P, f64) {
        let (x, t) = &self.entries[self.slot(i)];
        (x, *t)
    }

    /// Sum of the entry times of one period.
    pub fn period(&self) -> f64 {
        self.entries.iter().map(|e| e.1).sum()
    }

    /// `s_i`: the accumulated time at the start of entry `i`.
    pub fn accumulated(&self, i: i64) -> f64 {
        let n = self.entries.len() as i64;
        if n == 0 {
            return 0.0;
        }
        let (q, r) = if self.is_periodic() {
            (i.div_euclid(n), i.rem_euclid(n))
        } else {
            (0, i)
        };
        let partial: f64 = if r >= 0 {
            self.entries[..r.min(n) as usize].iter().map(|e| e.1).sum()
        } else {
            -self.entries[..(-r).min(n) as usize].iter().map(|e| e.1).sum::<f64>()
        };
        q as f64 * self.period() + partial
    }

    /// Total time covered by a finite chain; infinite for periodic ones.
    pub fn extent(&self) -> f64 {
        if self.is_periodic() {
            f64::INFINITY
        } else {
            self.period()
        }
    }
}

/// Whether every `t_i ≥ T` and every jump is below `δ`.
pub fn validate<F: FlowSystem>(chain: &PseudoOrbit<F::Point>, f: &F) -> Result<bool> {
    if chain.is_empty() {
        return Err(Error::domain("pseudo-orbit has no entries"));
    }
    let (jump, times_ok) = max_jump(chain, f);
    Ok(times_ok && jump < chain.delta)
}

/// Largest jump `d(φ^{t_i} x_i, x_{i+1})` and whether all `t_i ≥ T`.
pub fn max_jump<F: FlowSystem>(chain: &PseudoOrbit<F::Point>, f: &F) -> (f64, bool) {
    let n = chain.len();
    let times_ok = chain.entries.iter().all(|e| e.1 >= chain.t_min);
    let pairs = if chain.is_periodic() { n } else { n.saturating_sub(1) };
    let mut worst = 0.0f64;
    for i in 0..pairs {
        let (x, t) = chain.entry(i as i64);
        let (y, _) = chain.entry(i as i64 + 1);
        worst = worst.max(f.dist(&f.evaluate(x, t), y));
    }
    (worst, times_ok)
}

/// Periodic chain alternating `(p, T)` and `(φ^T x_a, t_a - T)`.
pub fn build_return_chain<F: FlowSystem>(
    f: &F,
    p: &F::Point,
    x_a: &F::Point,
    t_a: f64,
    t_min: f64,
    delta: f64,
) -> Result<PseudoOrbit<F::Point>> {
    if !(t_a > t_min) {
        return Err(Error::domain(format!("return time {t_a} must exceed T = {t_min}")));
    }
    if t_a - t_min < t_min {
        return Err(Error::domain(format!(
            "second entry time {} is below T = {t_min}",
            t_a - t_min
        )));
    }
    PseudoOrbit::periodic(
        vec![(p.clone(), t_min), (f.evaluate(x_a, t_min), t_a - t_min)],
        delta,
        t_min,
    )
}

/// Chain with entry `(a, π_a)` where `s_i = 0` and `(b, π_b)` where `s_i = 1`.
/// Periodic sequences give periodic chains over one period, others a finite
/// chain over their support.
pub fn build_symbol_chain<P: Clone>(
    a: (&P, f64),
    b: (&P, f64),
    s: &SymbolSequence,
    delta: f64,
    t_min: f64,
) -> Result<PseudoOrbit<P>> {
    let (lo, hi, periodic) = match s.extension() {
        Extension::Periodic { period } => (0, period as i64 - 1, true),
        Extension::Tails { .. } => {
            let (lo, hi) = s.support();
            (lo, hi, false)
        }
    };
    let mut entries = Vec::with_capacity((hi - lo + 1) as usize);
    for i in lo..=hi {
        let e = match s.symbol(i) {
            0 => (a.0.clone(), a.1),
            1 => (b.0.clone(), b.1),
            c => return Err(Error::domain(format!("symbol {c} at index {i} is not binary"))),
        };
        entries.push(e);
    }
    PseudoOrbit::new(entries, delta, t_min, periodic)
}

/// A verified shadow: `d(φ^{h(t)} x, φ^{t - s_i} x_i) < ε` on the grid up to `horizon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "P: Serialize", deserialize = "P: DeserializeOwned"))]
pub struct ShadowWitness<P> {
    pub point: P,
    #[serde(rename = "knots")]
    pub reparam: Reparametrization,
    pub eps: f64,
    pub strong: bool,
    pub horizon: f64,
    pub residual: f64,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Grid spacing used by [`search_shadow`] when none is given.
pub fn default_grid(chain_t_min: f64) -> f64 {
    (chain_t_min / 8.0).min(0.05)
}

/// Default verification horizon: the whole finite chain, or two periods.
pub fn default_horizon<P: Clone>(chain: &PseudoOrbit<P>) -> f64 {
    if chain.is_periodic() {
        2.0 * chain.period()
    } else {
        chain.extent()
    }
}

/// Largest tracking distance on the grid `{s_i + kΔt}` up to `horizon`.
/// Stops early once the residual reaches `abort_above`.
pub fn tracking_residual<F: FlowSystem>(
    chain: &PseudoOrbit<F::Point>,
    f: &F,
    point: &F::Point,
    h: &Reparametrization,
    dt: f64,
    horizon: f64,
    abort_above: f64,
) -> Result<f64> {
    if chain.is_empty() {
        return Err(Error::domain("pseudo-orbit has no entries"));
    }
    if !(dt > 0.0) || dt > chain.t_min / 4.0 + 1e-15 {
        return Err(Error::domain(format!(
            "grid step {dt} must lie in (0, T/4 = {}]",
            chain.t_min / 4.0
        )));
    }
    if !chain.is_periodic() && horizon > chain.extent() + 1e-12 {
        return Err(Error::domain(format!(
            "horizon {horizon} exceeds the chain extent {}",
            chain.extent()
        )));
    }
    let mut worst = 0.0f64;
    let mut shadow = f.evaluate(point, h.eval(0.0));
    let mut h_prev = h.eval(0.0);
    let mut i = 0i64;
    loop {
        let s_i = chain.accumulated(i);
        if s_i > horizon || (!chain.is_periodic() && i as usize >= chain.len()) {
            break;
        }
        let (x, t_i) = chain.entry(i);
        let end = (s_i + t_i).min(horizon);
        let steps = ((end - s_i) / dt).ceil().max(0.0) as usize;
        let mut piece = x.clone();
        let mut local = 0.0;
        for k in 0..=steps {
            let t = (s_i + k as f64 * dt).min(end);
            let loc = t - s_i;
            if loc > local {
                piece = f.evaluate(&piece, loc - local);
                local = loc;
            }
            let ht = h.eval(t);
            if ht != h_prev {
                shadow = f.evaluate(&shadow, ht - h_prev);
                h_prev = ht;
            }
            let d = f.dist(&shadow, &piece);
            if d > worst {
                worst = d;
                if worst >= abort_above {
                    return Ok(worst);
                }
            }
        }
        i += 1;
    }
    Ok(worst)
}

/// Re-checks a witness against the chain on a grid of step `dt`.
pub fn verify_shadow<F: FlowSystem>(
    chain: &PseudoOrbit<F::Point>,
    w: &ShadowWitness<F::Point>,
    f: &F,
    dt: f64,
) -> Result<bool> {
    let r = tracking_residual(chain, f, &w.point, &w.reparam, dt, w.horizon, w.eps)?;
    Ok(r < w.eps && (!w.strong || rep_membership(&w.reparam, w.eps)))
}

/// Search settings; `None` fields take defaults from the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub ladder_levels: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            dt: None,
            horizon: None,
            ladder_levels: DEFAULT_LADDER_LEVELS,
        }
    }
}

/// Outcome of a search: the witness, or the smallest residual seen.
pub type SearchOutcome<P> = std::result::Result<ShadowWitness<P>, f64>;

/// Multi-start search for a shadow. Candidates in order: fixture-provided
/// shadows, then points of an `ε/2`-net near `x_0` (with `x_0` first), each
/// tried with the identity and then uniform slopes from the ladder.
pub fn search_shadow<F: FlowSystem>(
    chain: &PseudoOrbit<F::Point>,
    eps: f64,
    f: &F,
    strong: bool,
    budget: usize,
) -> Option<ShadowWitness<F::Point>> {
    search_shadow_with(chain, eps, f, strong, budget, SearchOptions::default()).ok()
}

pub fn search_shadow_with<F: FlowSystem>(
    chain: &PseudoOrbit<F::Point>,
    eps: f64,
    f: &F,
    strong: bool,
    budget: usize,
    opts: SearchOptions,
) -> SearchOutcome<F::Point> {
    if chain.is_empty() || budget == 0 {
        return Err(f64::INFINITY);
    }
    let dt = opts.dt.unwrap_or_else(|| default_grid(chain.t_min));
    let horizon = opts.horizon.unwrap_or_else(|| default_horizon(chain));
    let mut candidates: Vec<(F::Point, Reparametrization)> = f.shadow_candidates(chain);
    let (x0, _) = chain.entry(0);
    let mut points = vec![x0.clone()];
    for q in f.net_near(x0, eps, eps / 2.0) {
        if !points.contains(&q) {
            points.push(q);
        }
    }
    let ladder = slope_ladder(eps, opts.ladder_levels);
    'outer: for q in &points {
        for &c in &ladder {
            if candidates.len() >= budget {
                break 'outer;
            }
            let h = if c == 1.0 {
                Reparametrization::identity()
            } else {
                match Reparametrization::linear(c, horizon) {
                    Ok(h) => h,
                    Err(_) => continue,
                }
            };
            candidates.push((q.clone(), h));
        }
    }
    candidates.truncate(budget);
    let mut best = f64::INFINITY;
    for chunk in candidates.chunks(16) {
        let results: Vec<Option<f64>> = chunk
            .par_iter()
            .map(|(q, h)| {
                if strong && !rep_membership(h, eps) {
                    return None;
                }
                tracking_residual(chain, f, q, h, dt, horizon, eps).ok()
            })
            .collect();
        for ((q, h), r) in chunk.iter().zip(results) {
            let Some(r) = r else { continue };
            best = best.min(r);
            if r < eps {
                return Ok(ShadowWitness {
                    point: q.clone(),
                    reparam: h.clone(),
                    eps,
                    strong: strong || rep_membership(h, eps),
                    horizon,
                    residual: r,
                    seed: None,
                });
            }
        }
    }
    Err(best)
}

/// One random pseudo-orbit trial of [`shadowable_point_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowTrial {
    pub id: usize,
    pub passed: bool,
    pub max_jump: f64,
    /// Witness residual, or the best residual seen when no witness was found.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShadowReport {
    pub eps: f64,
    pub delta: f64,
    pub t_min: f64,
    pub strong: bool,
    pub seed: u64,
    pub trials: Vec<ShadowTrial>,
}

impl ShadowReport {
    pub fn passed(&self) -> usize {
        self.trials.iter().filter(|t| t.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.trials.len() - self.passed()
    }

    /// Largest residual among passing trials.
    pub fn worst_residual(&self) -> f64 {
        self.trials
            .iter()
            .filter(|t| t.passed)
            .map(|t| t.residual)
            .fold(0.0, f64::max)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,passed,max_jump,residual\n");
        for t in &self.trials {
            out.push_str(&format!("{},{},{},{}\n", t.id, t.passed, t.max_jump, t.residual));
        }
        out
    }
}

/// Settings of [`shadowable_point_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    pub t_min: f64,
    /// Entries per random pseudo-orbit.
    pub entries: usize,
    pub budget: usize,
    pub seed: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            t_min: 1.0,
            entries: 6,
            budget: 64,
            seed: 0,
        }
    }
}

/// Random `(δ, T)`-pseudo-orbit through `p`: entry times in `[T, 2T)`, jumps
/// drawn by the fixture's perturbation sampler.
pub fn random_pseudo_orbit<F: FlowSystem>(
    f: &F,
    p: &F::Point,
    delta: f64,
    t_min: f64,
    entries: usize,
    rng: &mut ChaCha8Rng,
) -> Result<PseudoOrbit<F::Point>> {
    let mut out = Vec::with_capacity(entries);
    let mut x = p.clone();
    for i in 0..entries.max(1) {
        let t = t_min * (1.0 + rng.gen::<f64>());
        if i + 1 < entries {
            let end = f.evaluate(&x, t);
            let next = f.perturb(&end, delta * 0.95, rng);
            out.push((x, t));
            x = next;
        } else {
            out.push((x.clone(), t));
        }
    }
    PseudoOrbit::finite(out, delta, t_min)
}

/// Samples `trials` random pseudo-orbits through `p` and searches a shadow
/// for each.
pub fn shadowable_point_check<F: FlowSystem>(
    p: &F::Point,
    eps: f64,
    delta: f64,
    f: &F,
    trials: usize,
    strong: bool,
    opts: CheckOptions,
) -> Result<ShadowReport> {
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    if !(eps > 0.0) || !(delta > 0.0) {
        return Err(Error::domain("eps and delta must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let chains = (0..trials)
        .map(|_| random_pseudo_orbit(f, p, delta, opts.t_min, opts.entries, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let out: Vec<ShadowTrial> = chains
        .par_iter()
        .enumerate()
        .map(|(id, chain)| {
            let (jump, _) = max_jump(chain, f);
            let res = search_shadow_with(chain, eps, f, strong, opts.budget, SearchOptions::default());
            let (passed, residual) = match res {
                Ok(w) => (true, w.residual),
                Err(best) => (false, best),
            };
            ShadowTrial {
                id,
                passed,
                max_jump: jump,
                residual,
            }
        })
        .collect();
    Ok(ShadowReport {
        eps,
        delta,
        t_min: opts.t_min,
        strong,
        seed: opts.seed,
        trials: out,
    })
}

/// Result of the plain-to-strong shadowing harness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KomuroReport {
    pub eps: f64,
    pub delta: f64,
    pub plain_passed: bool,
    /// `(δ', T')` at which every strong trial passed, if any was found.
    pub strong_constants: Option<(f64, f64)>,
    pub seed: u64,
}

/// When plain shadowing passes at `(ε, δ)`, looks for `(δ', T')` with
/// `δ' ≤ δ`, `T' ≥ T` at which strong shadowing passes too.
pub fn komuro_harness<F: FlowSystem>(
    p: &F::Point,
    eps: f64,
    delta: f64,
    f: &F,
    trials: usize,
    opts: CheckOptions,
) -> Result<KomuroReport> {
    if !f.declared_singularities().is_empty() {
        return Err(Error::Unsupported(
            "strong shadowing equivalence applies to flows without singularities".into(),
        ));
    }
    let plain = shadowable_point_check(p, eps, delta, f, trials, false, opts)?;
    let plain_passed = plain.failed() == 0;
    let mut strong_constants = None;
    if plain_passed {
        'search: for k in 0..4 {
            let d = delta / f64::from(1u32 << k);
            for &tm in &[opts.t_min, 2.0 * opts.t_min, 4.0 * opts.t_min] {
                let o = CheckOptions { t_min: tm, ..opts };
                let r = shadowable_point_check(p, eps, d, f, trials, true, o)?;
                if r.failed() == 0 {
                    strong_constants = Some((d, tm));
                    break 'search;
                }
            }
        }
    }
    Ok(KomuroReport {
        eps,
        delta,
        plain_passed,
        strong_constants,
        seed: opts.seed,
    })
}
