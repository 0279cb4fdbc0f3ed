//! `(t, ε)`-separated sets, entropy estimates, and the positive-entropy
//! certificate built from two periodic orbits near a non-wandering point.
//!
//! The certificate glues loops around orbits `a` and `b` along binary words,
//! shadows every glued chain, and checks that the `2^n` shadows for words of
//! length `n` are pairwise `(t_n, α)`-separated. That gives
//! `(1/t_n) log #B_n ≥ log 2 / max(π_a, π_b)` for the flow itself, and
//! `log 2` after the time change sending `t_n` to `n`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expansivity::{uniformly_expansive_check, ExpansivityScale, Verdict};
use crate::flow::{classify_point, nonwandering_witnesses_in, orbit_samples, CriticalKind, FlowSystem, Reparametrization};
use crate::io::SCHEMA_VERSION;
use crate::shadowing::{
    build_return_chain, build_symbol_chain, search_shadow, search_shadow_with, shadowable_point_check, validate,
    verify_shadow, CheckOptions, PseudoOrbit, SearchOptions, ShadowWitness,
};
use crate::symbolic::{family_word, periodic_family, SymbolSequence};

/// Grid step of separation checks unless configured otherwise.
pub const DEFAULT_SAMPLE_STEP: f64 = 0.1;

/// Orbit samples on `[0, t]`, kept as feature vectors when the flow has them.
enum Track<P> {
    Features(Vec<Vec<f64>>),
    Points(Vec<P>),
}

fn grid(t: f64, dt: f64) -> (usize, f64) {
    let steps = (t / dt).ceil().max(1.0) as usize;
    (steps, t / steps as f64)
}

fn track<F: FlowSystem>(f: &F, p: &F::Point, t: f64, dt: f64) -> Track<F::Point> {
    let (steps, step) = grid(t, dt);
    let pts = orbit_samples(f, p, 0.0, step, steps);
    match pts.iter().map(|q| f.features(q)).collect::<Option<Vec<_>>>() {
        Some(v) => Track::Features(v),
        None => Track::Points(pts),
    }
}

/// First sample index at which the two tracks are `eps` apart.
fn first_gap<F: FlowSystem>(f: &F, a: &Track<F::Point>, b: &Track<F::Point>, eps: f64) -> Option<usize> {
    match (a, b) {
        (Track::Features(x), Track::Features(y)) => x.iter().zip(y).position(|(u, v)| f.feature_dist(u, v) >= eps),
        (Track::Points(x), Track::Points(y)) => x.iter().zip(y).position(|(u, v)| f.dist(u, v) >= eps),
        _ => None,
    }
}

/// A `(t, ε)`-separated set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "P: Serialize", deserialize = "P: DeserializeOwned"))]
pub struct SeparatedSet<P> {
    pub points: Vec<P>,
    pub t: f64,
    pub eps: f64,
    pub sample_step: f64,
}

/// Whether `max_{u ∈ grid[0, t]} d(φ^u x, φ^u y) ≥ eps`.
pub fn is_separated<F: FlowSystem>(f: &F, x: &F::Point, y: &F::Point, t: f64, eps: f64, dt: f64) -> bool {
    first_gap(f, &track(f, x, t, dt), &track(f, y, t, dt), eps).is_some()
}

/// Greedy maximal separated subset of `v` in index order, sampled with
/// [`DEFAULT_SAMPLE_STEP`].
pub fn separated_count<F: FlowSystem>(f: &F, v: &[F::Point], t: f64, eps: f64) -> Result<(usize, SeparatedSet<F::Point>)> {
    separated_count_with(f, v, t, eps, DEFAULT_SAMPLE_STEP)
}

pub fn separated_count_with<F: FlowSystem>(
    f: &F,
    v: &[F::Point],
    t: f64,
    eps: f64,
    dt: f64,
) -> Result<(usize, SeparatedSet<F::Point>)> {
    if v.is_empty() {
        return Err(Error::domain("point set is empty"));
    }
    if !(t > 0.0) || !(eps > 0.0) || !(dt > 0.0) {
        return Err(Error::domain("t, eps and the sample step must be positive"));
    }
    let tracks: Vec<Track<F::Point>> = v.par_iter().map(|p| track(f, p, t, dt)).collect();
    let mut admitted: Vec<usize> = Vec::new();
    for i in 0..v.len() {
        let ok = if admitted.len() > 64 {
            admitted.par_iter().all(|&j| first_gap(f, &tracks[i], &tracks[j], eps).is_some())
        } else {
            admitted.iter().all(|&j| first_gap(f, &tracks[i], &tracks[j], eps).is_some())
        };
        if ok {
            admitted.push(i);
        }
    }
    let points: Vec<F::Point> = admitted.iter().map(|&i| v[i].clone()).collect();
    Ok((
        points.len(),
        SeparatedSet {
            points,
            t,
            eps,
            sample_step: grid(t, dt).1,
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyRow {
    pub eps: f64,
    pub t: f64,
    pub pool: usize,
    pub count: usize,
    /// `(1/t) log count`.
    pub rate: f64,
}

/// Finite table of separated-set counts. The headline is the growth rate
/// `Δ log count / Δt` between the two largest times at the finest scale, which
/// cancels the `t`-independent prefactor that biases `(1/t) log count`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyTable {
    pub rows: Vec<EntropyRow>,
    pub headline: f64,
    pub headline_eps: f64,
    pub headline_times: (f64, f64),
    /// `(1/t) log count` at the finest scale and largest time.
    pub finest_rate: f64,
    pub net_eps: f64,
    pub sample_step: f64,
}

impl EntropyTable {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("eps,t,pool,count,rate\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{},{}\n", r.eps, r.t, r.pool, r.count, r.rate));
        }
        s
    }
}

/// Separated-set counts over the ladders, drawn from the flow's candidate pools.
pub fn entropy_estimate<F: FlowSystem>(f: &F, eps_ladder: &[f64], t_ladder: &[f64], net_eps: f64) -> Result<EntropyTable> {
    entropy_estimate_with(f, eps_ladder, t_ladder, net_eps, DEFAULT_SAMPLE_STEP)
}

pub fn entropy_estimate_with<F: FlowSystem>(
    f: &F,
    eps_ladder: &[f64],
    t_ladder: &[f64],
    net_eps: f64,
    dt: f64,
) -> Result<EntropyTable> {
    if eps_ladder.is_empty() || t_ladder.is_empty() {
        return Err(Error::domain("ladders must be nonempty"));
    }
    if eps_ladder.iter().any(|&e| !(e > 0.0)) || eps_ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::domain("eps ladder must be positive and strictly decreasing"));
    }
    if t_ladder.iter().any(|&t| !(t > 0.0)) || t_ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("t ladder must be positive and strictly increasing"));
    }
    if !(net_eps > 0.0) {
        return Err(Error::domain("net scale must be positive"));
    }
    let mut rows = Vec::new();
    for &eps in eps_ladder {
        for &t in t_ladder {
            let pool = f.spanning_set(net_eps.min(eps), t);
            let (count, _) = separated_count_with(f, &pool, t, eps, dt)?;
            rows.push(EntropyRow {
                eps,
                t,
                pool: pool.len(),
                count,
                rate: (count as f64).ln() / t,
            });
        }
    }
    let finest = *eps_ladder.last().unwrap_or(&0.0);
    let last: Vec<&EntropyRow> = rows.iter().filter(|r| r.eps == finest).collect();
    let top = last[last.len() - 1];
    let (headline, times) = if last.len() >= 2 {
        let lo = last[last.len() - 2];
        (((top.count as f64).ln() - (lo.count as f64).ln()) / (top.t - lo.t), (lo.t, top.t))
    } else {
        (top.rate, (top.t, top.t))
    };
    Ok(EntropyTable {
        headline,
        headline_eps: finest,
        headline_times: times,
        finest_rate: top.rate,
        rows,
        net_eps,
        sample_step: dt,
    })
}

/// PL time change with knots `(±t_n, ±n)` and `(0, 0)`.
pub fn time_change_normalize(t_values: &[f64]) -> Result<Reparametrization> {
    if t_values.is_empty() {
        return Err(Error::domain("no times given"));
    }
    if t_values[0] <= 0.0 || t_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("times must be positive and strictly increasing"));
    }
    let mut knots = vec![(0.0, 0.0)];
    for (k, &t) in t_values.iter().enumerate() {
        let n = (k + 1) as f64;
        knots.push((t, n));
        knots.push((-t, -n));
    }
    Reparametrization::from_knots(knots)
}

/// Scales and budgets of [`certify_positive_entropy`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifyConfig {
    /// Shadowing precision.
    pub eps: f64,
    /// Jump bound of the glued chains.
    pub delta: f64,
    /// Separation unit: `a` leaves `p` by `8e`, `a` and `b` differ by `7e`.
    pub e: f64,
    /// Minimal entry time `T` of the chains.
    pub chain_time: f64,
    /// Radius of the non-wandering witness search.
    pub eta: f64,
    pub witness_net: f64,
    pub witness_horizon: f64,
    pub dt: f64,
    pub n_max: usize,
    /// Separation scale; `e/4` when absent.
    pub alpha_sep: Option<f64>,
    pub strong: bool,
    pub budget: usize,
    pub u_radius: f64,
    pub expansivity: ExpansivityScale,
    pub expansivity_net: f64,
    /// Random pseudo-orbits through `p` that must all be shadowed.
    pub shadow_trials: usize,
    /// Entries of each of those pseudo-orbits.
    #[serde(default = "default_shadow_entries")]
    pub shadow_entries: usize,
    pub classify_tol: f64,
    pub seed: u64,
}

impl CertifyConfig {
    pub fn alpha(&self) -> f64 {
        self.alpha_sep.unwrap_or(self.e / 4.0)
    }

    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("eps", self.eps),
            ("delta", self.delta),
            ("e", self.e),
            ("chain_time", self.chain_time),
            ("eta", self.eta),
            ("witness_net", self.witness_net),
            ("witness_horizon", self.witness_horizon),
            ("dt", self.dt),
            ("u_radius", self.u_radius),
            ("expansivity_net", self.expansivity_net),
            ("classify_tol", self.classify_tol),
            ("alpha_sep", self.alpha()),
        ];
        for (name, v) in pos {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.n_max == 0 || self.n_max > 12 {
            return Err(Error::Config(format!("n_max must lie in 1..=12, got {}", self.n_max)));
        }
        if self.shadow_entries == 0 {
            return Err(Error::Config("shadow_entries must be at least 1".into()));
        }
        if self.budget == 0 {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        if self.dt > self.chain_time / 4.0 {
            return Err(Error::Config(format!(
                "dt {} exceeds chain_time/4 = {}",
                self.dt,
                self.chain_time / 4.0
            )));
        }
        if self.witness_horizon <= 2.0 * self.chain_time {
            return Err(Error::Config("witness_horizon must exceed 2 chain_time".into()));
        }
        Ok(())
    }
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            eps: 0.05,
            delta: 0.02,
            e: 0.02,
            chain_time: 1.0,
            eta: 0.02,
            witness_net: 0.004,
            witness_horizon: 8.0,
            dt: 0.05,
            n_max: 4,
            alpha_sep: None,
            strong: false,
            budget: 64,
            u_radius: 0.05,
            expansivity: ExpansivityScale {
                eps: 0.1,
                delta: 0.02,
                horizon: 6.0,
                e: 0.0025,
                resolution: 1e-6,
                dt: 0.05,
                ladder_levels: crate::flow::DEFAULT_LADDER_LEVELS,
            },
            expansivity_net: 0.02,
            shadow_trials: 4,
            shadow_entries: default_shadow_entries(),
            classify_tol: 1e-6,
            seed: 0,
        }
    }
}

fn default_shadow_entries() -> usize {
    6
}

/// A periodic orbit obtained by closing a witness return.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "P: Serialize", deserialize = "P: DeserializeOwned"))]
pub struct OrbitRecord<P> {
    pub point: P,
    pub period: f64,
    /// Return time of the witness that produced the orbit.
    pub witness_return: f64,
    pub shadow_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "P: Serialize", deserialize = "P: DeserializeOwned"))]
pub struct ShadowRecord<P> {
    pub point: P,
    #[serde(rename = "knots")]
    pub reparam: Reparametrization,
    pub period: f64,
    pub residual: f64,
    pub horizon: f64,
}

/// The words of length `n` and their shadows, in the same order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "P: Serialize", deserialize = "P: DeserializeOwned"))]
pub struct FamilyRecord<P> {
    pub n: usize,
    pub t_n: f64,
    pub symbolic_b_n: Vec<String>,
    pub shadow_b_n: Vec<ShadowRecord<P>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "P: Serialize", deserialize = "P: DeserializeOwned"))]
pub struct EntropyCertificate<P> {
    pub schema_version: u32,
    pub flow: String,
    pub p: P,
    pub a: OrbitRecord<P>,
    pub b: OrbitRecord<P>,
    pub separation_time: f64,
    pub separation_margin: f64,
    pub alpha_sep: f64,
    pub sample_step: f64,
    /// Lower bound on the time between section crossings.
    pub beta: f64,
    pub families: Vec<FamilyRecord<P>>,
    #[serde(rename = "time_change_knots")]
    pub time_change: Reparametrization,
    /// Bound for the time-changed flow.
    pub bound_time_changed: f64,
    /// Bound for the flow itself, `log 2 / max(π_a, π_b)`.
    pub bound_flow: f64,
    pub config: CertifyConfig,
    pub seed: u64,
}

impl<P> EntropyCertificate<P> {
    pub fn max_period(&self) -> f64 {
        self.a.period.max(self.b.period)
    }

    /// `(n, log|B_n| / t_n)` rows.
    pub fn rates_csv(&self) -> String {
        let mut s = String::from("n,t_n,rate\n");
        for fam in &self.families {
            let rate = (fam.shadow_b_n.len() as f64).ln() / fam.t_n;
            s.push_str(&format!("{},{},{}\n", fam.n, fam.t_n, rate));
        }
        s
    }
}

fn word_string(s: &[u8]) -> String {
    s.iter().map(|c| char::from(b'0' + c)).collect()
}

fn close_orbit<F: FlowSystem>(
    f: &F,
    p: &F::Point,
    x: &F::Point,
    t: f64,
    cfg: &CertifyConfig,
) -> Option<OrbitRecord<F::Point>> {
    let chain = build_return_chain(f, p, x, t, cfg.chain_time, cfg.delta).ok()?;
    if !validate(&chain, f).ok()? {
        return None;
    }
    let w = search_shadow(&chain, cfg.eps, f, cfg.strong, cfg.budget)?;
    let rep = classify_point(f, &w.point, 2.0 * t + 1.0, cfg.classify_tol, cfg.dt).ok()?;
    match rep.kind {
        CriticalKind::Periodic { period } if period >= cfg.chain_time => Some(OrbitRecord {
            point: w.point,
            period,
            witness_return: t,
            shadow_residual: w.residual,
        }),
        _ => None,
    }
}

/// Shadow of a glued chain checked over one period plus one entry: longer
/// horizons only re-check the same periodic pattern while rounding errors
/// grow along the unstable direction.
fn family_shadow<F: FlowSystem>(chain: &PseudoOrbit<F::Point>, f: &F, cfg: &CertifyConfig) -> Option<ShadowWitness<F::Point>> {
    let opts = SearchOptions {
        dt: Some(cfg.dt),
        horizon: Some(chain.period() + cfg.chain_time),
        ..SearchOptions::default()
    };
    search_shadow_with(chain, cfg.eps, f, cfg.strong, cfg.budget, opts).ok()
}

fn symbol_chain<P: Clone>(a: &OrbitRecord<P>, b: &OrbitRecord<P>, s: &SymbolSequence, cfg: &CertifyConfig) -> Result<PseudoOrbit<P>> {
    build_symbol_chain((&a.point, a.period), (&b.point, b.period), s, cfg.delta, cfg.chain_time)
}

/// First pair `(i, j)` among `pairs` whose tracks are not `alpha`-apart.
fn unseparated<F: FlowSystem>(f: &F, tracks: &[Track<F::Point>], pairs: &[(usize, usize)], alpha: f64) -> Option<(usize, usize)> {
    pairs
        .par_iter()
        .find_first(|&&(i, j)| first_gap(f, &tracks[i], &tracks[j], alpha).is_none())
        .copied()
}

fn all_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Runs the construction from `p`; each failing hypothesis is reported as a
/// stage error (periodic `p` as a precondition error).
pub fn certify_positive_entropy<F: FlowSystem>(
    f: &F,
    p: &F::Point,
    cfg: &CertifyConfig,
) -> Result<EntropyCertificate<F::Point>> {
    cfg.validate()?;
    let ue = uniformly_expansive_check(f, p, cfg.u_radius, &cfg.expansivity, cfg.expansivity_net)?;
    if let Verdict::Fail(c) = &ue.verdict {
        return Err(Error::stage(
            "uniform-expansivity",
            format!(
                "a pair within {} of p tracks to {:.3e} (< delta = {}) yet sits {:.3e} off one orbit",
                cfg.u_radius, c.tracking, cfg.expansivity.delta, c.orbit_gap
            ),
        ));
    }
    let rep = classify_point(f, p, cfg.witness_horizon, cfg.classify_tol, cfg.dt)?;
    match rep.kind {
        CriticalKind::Singular => return Err(Error::stage("classification", "p is singular")),
        CriticalKind::Periodic { period } => {
            return Err(Error::Precondition(format!(
                "p is periodic with period {period:.6}; a non-periodic point is required"
            )))
        }
        CriticalKind::NonCritical => {}
    }
    let witnesses = nonwandering_witnesses_in(
        f,
        p,
        cfg.eta,
        2.0 * cfg.chain_time,
        cfg.witness_horizon,
        cfg.dt,
        cfg.witness_net,
    );
    if witnesses.is_empty() {
        return Err(Error::stage(
            "non-wandering",
            format!("no return within {} of p up to time {}", cfg.eta, cfg.witness_horizon),
        ));
    }
    if cfg.shadow_trials > 0 {
        let opts = CheckOptions {
            t_min: cfg.chain_time,
            entries: cfg.shadow_entries,
            budget: cfg.budget,
            seed: cfg.seed,
        };
        let report = shadowable_point_check(p, cfg.eps, cfg.delta, f, cfg.shadow_trials, cfg.strong, opts)?;
        if report.failed() > 0 {
            return Err(Error::stage(
                "shadowing",
                format!(
                    "{} of {} pseudo-orbits through p have no {}-shadow",
                    report.failed(),
                    cfg.shadow_trials,
                    cfg.eps
                ),
            ));
        }
    }
    let orbits: Vec<Option<OrbitRecord<F::Point>>> =
        witnesses.par_iter().map(|(x, t)| close_orbit(f, p, x, *t, cfg)).collect();
    let orbits: Vec<OrbitRecord<F::Point>> = orbits.into_iter().flatten().collect();
    let a = orbits.first().cloned().ok_or_else(|| {
        Error::stage(
            "closing",
            format!("none of {} witness returns closed up to a periodic shadow", witnesses.len()),
        )
    })?;

    // first grid time at which a leaves p by 8e
    let (steps, step) = grid(cfg.witness_horizon, cfg.dt);
    let pa = orbit_samples(f, &a.point, 0.0, step, steps);
    let pp = orbit_samples(f, p, 0.0, step, steps);
    let k = (1..=steps)
        .find(|&k| f.dist(&pa[k], &pp[k]) > 8.0 * cfg.e)
        .ok_or_else(|| Error::stage("separation-time", format!("a stays within 8e = {} of p", 8.0 * cfg.e)))?;
    let sep_t = k as f64 * step;
    let a_t = &pa[k];

    let b = orbits
        .iter()
        .skip(1)
        .filter(|o| o.witness_return > sep_t && f.dist(&a.point, &o.point) < cfg.delta)
        .map(|o| (o, f.dist(a_t, &f.evaluate(&o.point, sep_t))))
        .find(|(_, m)| *m >= 7.0 * cfg.e);
    let Some((b, margin)) = b else {
        return Err(Error::stage(
            "second-orbit",
            format!("no second periodic orbit is 7e = {} away from a at time {sep_t:.4}", 7.0 * cfg.e),
        ));
    };
    let b = b.clone();

    let alpha = cfg.alpha();
    let mut families = Vec::with_capacity(cfg.n_max);
    let mut times = Vec::with_capacity(cfg.n_max);
    for n in 1..=cfg.n_max {
        let seqs = periodic_family(n)?;
        let shadows: Vec<Result<(PseudoOrbit<F::Point>, ShadowWitness<F::Point>)>> = seqs
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                let chain = symbol_chain(&a, &b, s, cfg)?;
                let w = family_shadow(&chain, f, cfg).ok_or_else(|| {
                    Error::stage(
                        "family-shadow",
                        format!("no {}-shadow for word {} (n = {n})", cfg.eps, word_string(&family_word(n, i))),
                    )
                })?;
                Ok((chain, w))
            })
            .collect();
        let shadows = shadows.into_iter().collect::<Result<Vec<_>>>()?;
        let t_n = shadows.iter().map(|(c, _)| c.period()).fold(0.0, f64::max);
        let tracks: Vec<Track<F::Point>> = shadows.par_iter().map(|(_, w)| track(f, &w.point, t_n, cfg.dt)).collect();
        if let Some((i, j)) = unseparated(f, &tracks, &all_pairs(tracks.len()), alpha) {
            return Err(Error::stage(
                "family-separation",
                format!(
                    "shadows of {} and {} are not ({t_n}, {alpha})-separated",
                    word_string(&family_word(n, i)),
                    word_string(&family_word(n, j))
                ),
            ));
        }
        families.push(FamilyRecord {
            n,
            t_n,
            symbolic_b_n: (0..1usize << n).map(|i| word_string(&family_word(n, i))).collect(),
            shadow_b_n: shadows
                .into_iter()
                .map(|(c, w)| ShadowRecord {
                    point: w.point,
                    reparam: w.reparam,
                    period: c.period(),
                    residual: w.residual,
                    horizon: w.horizon,
                })
                .collect(),
        });
        times.push(t_n);
    }
    let time_change = time_change_normalize(&times)
        .map_err(|e| Error::stage("time-change", format!("t_n not strictly increasing: {e}")))?;
    let beta = f
        .analytic_sections(cfg.chain_time)
        .map(|s| s.min_return)
        .unwrap_or_else(|| a.period.min(b.period));
    let ln2 = std::f64::consts::LN_2;
    Ok(EntropyCertificate {
        schema_version: SCHEMA_VERSION,
        flow: f.name(),
        p: p.clone(),
        bound_flow: ln2 / a.period.max(b.period),
        a,
        b,
        separation_time: sep_t,
        separation_margin: margin,
        alpha_sep: alpha,
        sample_step: cfg.dt,
        beta,
        families,
        time_change,
        bound_time_changed: ln2,
        config: cfg.clone(),
        seed: cfg.seed,
    })
}

/// Settings of [`verify_certificate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Pairs per family above which a seeded sample of this size is checked.
    pub max_pairs: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { max_pairs: 500, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub families: usize,
    pub shadows_checked: usize,
    pub pairs_checked: usize,
    pub max_pairs: usize,
    pub seed: u64,
}

fn decode_pair(k: usize, n: usize) -> (usize, usize) {
    // row i holds pairs (i, i+1..n)
    let mut i = 0;
    let mut rest = k;
    while rest >= n - 1 - i {
        rest -= n - 1 - i;
        i += 1;
    }
    (i, i + 1 + rest)
}

fn sampled_pairs(n: usize, max_pairs: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let total = n * n.saturating_sub(1) / 2;
    if total <= max_pairs {
        return all_pairs(n);
    }
    let mut idx = rand::seq::index::sample(rng, total, max_pairs).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|k| decode_pair(k, n)).collect()
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Verification(msg()))
    }
}

/// Re-checks a certificate from its contents and the flow alone.
pub fn verify_certificate<F: FlowSystem>(
    f: &F,
    cert: &EntropyCertificate<F::Point>,
    opts: VerifyOptions,
) -> Result<VerifyReport> {
    let cfg = &cert.config;
    let ln2 = std::f64::consts::LN_2;
    check(cert.flow == f.name(), || format!("certificate is for {}, not {}", cert.flow, f.name()))?;
    check(cert.schema_version == SCHEMA_VERSION, || {
        format!("unsupported schema version {}", cert.schema_version)
    })?;
    let pmax = cert.max_period();
    check((cert.bound_time_changed - ln2).abs() < 1e-12, || "time-changed bound is not log 2".into())?;
    check((cert.bound_flow - ln2 / pmax).abs() < 1e-12, || {
        format!("flow bound {} differs from log 2 / {pmax}", cert.bound_flow)
    })?;
    for (name, o) in [("a", &cert.a), ("b", &cert.b)] {
        let d = f.dist(&f.evaluate(&o.point, o.period), &o.point);
        check(d < cfg.classify_tol, || format!("orbit {name} does not close: gap {d:.3e} after {}", o.period))?;
    }
    let fa = f.evaluate(&cert.a.point, cert.separation_time);
    let fb = f.evaluate(&cert.b.point, cert.separation_time);
    let margin = f.dist(&fa, &fb);
    check(margin >= 7.0 * cfg.e, || format!("a/b margin {margin} is below 7e = {}", 7.0 * cfg.e))?;
    check((cert.alpha_sep - cfg.alpha()).abs() < 1e-15, || "alpha_sep does not match the config".into())?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut shadows_checked = 0;
    let mut pairs_checked = 0;
    let mut prev = 0.0;
    let mut times = Vec::new();
    for (k, fam) in cert.families.iter().enumerate() {
        let n = fam.n;
        check(n == k + 1, || format!("family {k} has n = {n}"))?;
        let size = 1usize << n;
        check(fam.symbolic_b_n.len() == size && fam.shadow_b_n.len() == size, || {
            format!("family n = {n} has {} words and {} shadows, expected {size}", fam.symbolic_b_n.len(), fam.shadow_b_n.len())
        })?;
        let seqs = periodic_family(n)?;
        for (i, w) in fam.symbolic_b_n.iter().enumerate() {
            let want = word_string(&family_word(n, i));
            check(*w == want, || format!("family n = {n}: word {i} is {w}, expected {want}"))?;
        }
        check(fam.t_n > prev, || format!("t_{n} = {} does not increase", fam.t_n))?;
        check(fam.t_n >= n as f64 * cert.beta - 1e-9, || {
            format!("t_{n} = {} is below n beta = {}", fam.t_n, n as f64 * cert.beta)
        })?;
        check(fam.t_n <= n as f64 * pmax + 1e-9, || {
            format!("t_{n} = {} exceeds n max(pi_a, pi_b) = {}", fam.t_n, n as f64 * pmax)
        })?;
        check((size as f64).ln() / fam.t_n >= cert.bound_flow - 1e-12, || {
            format!("rate at n = {n} is below the flow bound")
        })?;
        prev = fam.t_n;
        times.push(fam.t_n);

        // separation first, so a tampered point is reported as a pair
        let tracks: Vec<Track<F::Point>> = fam
            .shadow_b_n
            .par_iter()
            .map(|r| track(f, &r.point, fam.t_n, cert.sample_step))
            .collect();
        let pairs = sampled_pairs(size, opts.max_pairs, &mut rng);
        if let Some((i, j)) = unseparated(f, &tracks, &pairs, cert.alpha_sep) {
            return Err(Error::Verification(format!(
                "family n = {n}: shadow points {i} ({}) and {j} ({}) are not ({}, {})-separated",
                fam.symbolic_b_n[i], fam.symbolic_b_n[j], fam.t_n, cert.alpha_sep
            )));
        }
        pairs_checked += pairs.len();

        let results: Vec<Result<f64>> = seqs
            .par_iter()
            .zip(&fam.shadow_b_n)
            .map(|(s, rec)| {
                let chain = symbol_chain(&cert.a, &cert.b, s, cfg)?;
                let w = ShadowWitness {
                    point: rec.point.clone(),
                    reparam: rec.reparam.clone(),
                    eps: cfg.eps,
                    strong: cfg.strong,
                    horizon: rec.horizon,
                    residual: rec.residual,
                    seed: None,
                };
                let ok = verify_shadow(&chain, &w, f, cert.sample_step.min(cfg.chain_time / 4.0))?;
                Ok(if ok { chain.period() } else { f64::NAN })
            })
            .collect();
        let mut t_max: f64 = 0.0;
        for (i, r) in results.into_iter().enumerate() {
            let period = r?;
            check(!period.is_nan(), || {
                format!("family n = {n}: shadow of {} fails re-verification", fam.symbolic_b_n[i])
            })?;
            t_max = t_max.max(period);
        }
        check((t_max - fam.t_n).abs() < 1e-9, || format!("t_{n} = {} but the longest chain lasts {t_max}", fam.t_n))?;
        shadows_checked += size;
    }
    let h = time_change_normalize(&times)?;
    check(h == cert.time_change, || "time change knots do not match t_n".into())?;
    Ok(VerifyReport {
        families: cert.families.len(),
        shadows_checked,
        pairs_checked,
        max_pairs: opts.max_pairs,
        seed: opts.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn time_change_examples() {
        let h = time_change_normalize(&[1.0, 2.0, 3.0]).unwrap();
        for t in [-3.0, -1.5, 0.0, 0.7, 2.5] {
            assert!((h.eval(t) - t).abs() < 1e-12);
        }
        let h = time_change_normalize(&[2.0, 4.0]).unwrap();
        assert!((h.eval(3.0) - 1.5).abs() < 1e-12);
        assert!(time_change_normalize(&[2.0, 2.0]).is_err());
        assert!(time_change_normalize(&[3.0, 1.0]).is_err());
    }

    #[test]
    fn pair_decoding_covers_all_pairs() {
        let n = 7;
        let all = all_pairs(n);
        for (k, p) in all.iter().enumerate() {
            assert_eq!(decode_pair(k, n), *p);
        }
    }
}
