//! Specification for homeomorphisms: instances, tracing search, specification
//! points and the reduction from a single specification point to the global
//! property.

use std::fmt::Debug;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbolic::{Extension, Subshift, Symbol, SymbolSequence};

/// A homeomorphism of a compact metric space.
pub trait Homeomorphism: Send + Sync {
    type Point: Clone + Debug + PartialEq + Send + Sync + Serialize + DeserializeOwned + 'static;

    fn forward(&self, p: &Self::Point) -> Self::Point;

    fn backward(&self, p: &Self::Point) -> Self::Point;

    fn dist(&self, a: &Self::Point, b: &Self::Point) -> f64;

    fn name(&self) -> String;

    /// `f^n(p)` for any integer `n`.
    fn iterate(&self, p: &Self::Point, n: i64) -> Self::Point {
        let mut q = p.clone();
        if n >= 0 {
            for _ in 0..n {
                q = self.forward(&q);
            }
        } else {
            for _ in 0..(-n) {
                q = self.backward(&q);
            }
        }
        q
    }

    fn tol(&self) -> f64 {
        1e-9
    }
}

/// Largest `d(f⁻¹(f(p)), p)` and `d(f(f⁻¹(p)), p)` over the samples.
pub fn inverse_residual<F: Homeomorphism + ?Sized>(f: &F, samples: &[F::Point]) -> f64 {
    samples
        .iter()
        .map(|p| {
            let a = f.dist(&f.backward(&f.forward(p)), p);
            let b = f.dist(&f.forward(&f.backward(p)), p);
            a.max(b)
        })
        .fold(0.0, f64::max)
}

/// Points `x_0..x_n` with windows `[a_i, b_i]` separated by gaps of at least `K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "P: Serialize", deserialize = "P: DeserializeOwned"))]
pub struct SpecInstance<P> {
    points: Vec<P>,
    windows: Vec<(i64, i64)>,
    gap: u64,
}

impl<P: Clone> SpecInstance<P> {
    pub fn new(points: Vec<P>, windows: Vec<(i64, i64)>, gap: u64) -> Result<Self> {
        if gap == 0 {
            return Err(Error::domain("gap bound K must be positive"));
        }
        if points.len() != windows.len() {
            return Err(Error::domain(format!(
                "{} points but {} windows",
                points.len(),
                windows.len()
            )));
        }
        for (i, &(a, b)) in windows.iter().enumerate() {
            if a > b {
                return Err(Error::domain(format!("window {i} has a > b ({a} > {b})")));
            }
            if i > 0 && a - windows[i - 1].1 < gap as i64 {
                return Err(Error::domain(format!(
                    "gap between windows {} and {i} is {} < K = {gap}",
                    i - 1,
                    a - windows[i - 1].1
                )));
            }
        }
        Ok(SpecInstance { points, windows, gap })
    }

    pub fn empty(gap: u64) -> Result<Self> {
        Self::new(Vec::new(), Vec::new(), gap)
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn windows(&self) -> &[(i64, i64)] {
        &self.windows
    }

    pub fn gap(&self) -> u64 {
        self.gap
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Smallest `a_0` and largest `b_n`.
    pub fn span(&self) -> Option<(i64, i64)> {
        Some((self.windows.first()?.0, self.windows.last()?.1))
    }
}

/// Whether the tracing point must also be periodic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    Any,
    /// Periodic with some period `1..=max_period`.
    Periodic { max_period: u64 },
}

/// Whether `y` traces every window of `inst` within `eps`.
pub fn traces<F: Homeomorphism + ?Sized>(f: &F, inst: &SpecInstance<F::Point>, eps: f64, y: &F::Point) -> bool {
    for (x, &(a, b)) in inst.points.iter().zip(&inst.windows) {
        let mut fy = f.iterate(y, a);
        let mut fx = f.iterate(x, a);
        for j in a..=b {
            if !(f.dist(&fy, &fx) < eps) {
                return false;
            }
            if j < b {
                fy = f.forward(&fy);
                fx = f.forward(&fx);
            }
        }
    }
    true
}

fn is_periodic<F: Homeomorphism + ?Sized>(f: &F, y: &F::Point, max_period: u64) -> bool {
    let mut q = y.clone();
    for _ in 0..max_period {
        q = f.forward(&q);
        if f.dist(&q, y) <= f.tol() {
            return true;
        }
    }
    false
}

/// First candidate tracing every window of `inst`, if any.
pub fn check_spec_instance<F: Homeomorphism + ?Sized>(
    f: &F,
    inst: &SpecInstance<F::Point>,
    eps: f64,
    candidates: &[F::Point],
) -> Option<F::Point> {
    check_spec_instance_with(f, inst, eps, candidates, TraceMode::Any).map(|i| candidates[i].clone())
}

/// Index of the first candidate tracing `inst` under `mode`.
pub fn check_spec_instance_with<F: Homeomorphism + ?Sized>(
    f: &F,
    inst: &SpecInstance<F::Point>,
    eps: f64,
    candidates: &[F::Point],
    mode: TraceMode,
) -> Option<usize> {
    candidates.iter().position(|y| {
        traces(f, inst, eps, y)
            && match mode {
                TraceMode::Any => true,
                TraceMode::Periodic { max_period } => is_periodic(f, y, max_period),
            }
    })
}

/// Prepends `x` in the degenerate window `(a_0 - K - 1, a_0 - K)`. An empty
/// instance becomes the single window `(0, 0)` for `x`.
pub fn reduce_point_to_global<P: Clone>(
    inst: &SpecInstance<P>,
    x: &P,
    gap: u64,
    horizon: i64,
) -> Result<SpecInstance<P>> {
    let k = gap as i64;
    let new_window = match inst.windows.first() {
        Some(&(a0, _)) => (a0 - k - 1, a0 - k),
        None => (0, 0),
    };
    let mut points = Vec::with_capacity(inst.len() + 1);
    points.push(x.clone());
    points.extend(inst.points.iter().cloned());
    let mut windows = Vec::with_capacity(inst.len() + 1);
    windows.push(new_window);
    windows.extend(inst.windows.iter().copied());
    let lo = windows[0].0;
    let hi = windows.last().map(|w| w.1).unwrap_or(0);
    if lo.abs() > horizon || hi.abs() > horizon {
        return Err(Error::Range(format!(
            "augmented windows span [{lo}, {hi}], beyond horizon {horizon}"
        )));
    }
    SpecInstance::new(points, windows, gap.min(inst.gap))
}

/// Outcome of one sampled instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub id: usize,
    pub windows: Vec<(i64, i64)>,
    pub passed: bool,
    /// Index of the tracing candidate among the candidates supplied for this trial.
    pub tracing_point: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecReport {
    pub eps: f64,
    pub gap: u64,
    pub seed: u64,
    pub trials: Vec<TrialOutcome>,
}

impl SpecReport {
    pub fn passed(&self) -> usize {
        self.trials.iter().filter(|t| t.passed).count()
    }

    pub fn all_passed(&self) -> bool {
        self.trials.iter().all(|t| t.passed)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("instance_id,passed,tracing_point_id\n");
        for t in &self.trials {
            let id = t.tracing_point.map(|i| i.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{}\n", t.id, t.passed, id));
        }
        out
    }
}

/// Random instance with `x_0 = x`, other points drawn from `pool`.
pub fn sample_instance<P: Clone>(x: &P, pool: &[P], gap: u64, rng: &mut ChaCha8Rng) -> Result<SpecInstance<P>> {
    let n = if pool.is_empty() { 0 } else { rng.gen_range(1..=3) };
    let mut points = vec![x.clone()];
    let mut windows = Vec::with_capacity(n + 1);
    let mut a = 0i64;
    let mut b = a + rng.gen_range(0..4);
    windows.push((a, b));
    for _ in 0..n {
        points.push(pool[rng.gen_range(0..pool.len())].clone());
        a = b + gap as i64 + rng.gen_range(0..3);
        b = a + rng.gen_range(0..4);
        windows.push((a, b));
    }
    SpecInstance::new(points, windows, gap)
}

/// Samples `trials` instances with `x_0 = x` and records whether a tracing
/// point is found among `candidates(instance)`.
pub fn spec_point_check<F, C>(
    f: &F,
    x: &F::Point,
    eps: f64,
    gap: u64,
    trials: usize,
    seed: u64,
    pool: &[F::Point],
    candidates: C,
) -> Result<SpecReport>
where
    F: Homeomorphism + ?Sized,
    C: Fn(&SpecInstance<F::Point>) -> Vec<F::Point>,
{
    if trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    if !(eps > 0.0) {
        return Err(Error::domain("eps must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(trials);
    for id in 0..trials {
        let inst = sample_instance(x, pool, gap, &mut rng)?;
        let cands = candidates(&inst);
        let hit = check_spec_instance_with(f, &inst, eps, &cands, TraceMode::Any);
        out.push(TrialOutcome {
            id,
            windows: inst.windows.clone(),
            passed: hit.is_some(),
            tracing_point: hit,
        });
    }
    Ok(SpecReport {
        eps,
        gap,
        seed,
        trials: out,
    })
}

/// Smallest `m` with `2 (k - 1) 2^{-m} < eps`: agreement on `[j - m, j + m]`
/// forces the shifted sequences within `eps`.
pub fn splice_margin(alphabet: u32, eps: f64) -> u32 {
    let k = f64::from(alphabet.max(2) - 1);
    let mut m = 0u32;
    while 2.0 * k * 0.5f64.powi(m as i32) >= eps && m < 60 {
        m += 1;
    }
    m
}

/// Splice oracle for shifts: candidates copying each `x_i` on its window
/// widened by the margin, with several fillers in between. Candidates not
/// admitted by `shift` are dropped.
pub fn splice_candidates(shift: &Subshift, inst: &SpecInstance<SymbolSequence>, eps: f64) -> Vec<SymbolSequence> {
    let Some((lo, hi)) = inst.span() else {
        return SymbolSequence::constant(shift.alphabet(), 0).into_iter().collect();
    };
    let k = shift.alphabet();
    let m = i64::from(splice_margin(k, eps));
    let pad = 64i64;
    let start = lo - m - pad;
    let end = hi + m + pad;
    let owner = |j: i64| -> Option<usize> {
        inst.windows
            .iter()
            .position(|&(a, b)| j >= a - m && j <= b + m)
    };
    let nearest = |j: i64| -> usize {
        let mut best = 0usize;
        let mut bd = i64::MAX;
        for (i, &(a, b)) in inst.windows.iter().enumerate() {
            let d = if j < a { a - j } else if j > b { j - b } else { 0 };
            if d < bd {
                bd = d;
                best = i;
            }
        }
        best
    };
    let mut out = Vec::new();
    let build = |fill: Option<Symbol>| -> Option<SymbolSequence> {
        let word: Vec<Symbol> = (start..=end)
            .map(|j| match (owner(j), fill) {
                (Some(i), _) => inst.points[i].symbol(j),
                (None, Some(c)) => c,
                (None, None) => inst.points[nearest(j)].symbol(j),
            })
            .collect();
        let left = inst.points[0].symbol(start - 1);
        let right = inst.points[inst.len() - 1].symbol(end + 1);
        SymbolSequence::with_tails(k, start, word, left, right).ok()
    };
    for fill in std::iter::once(None).chain((0..k).map(|c| Some(c as Symbol))) {
        if let Some(y) = build(fill) {
            if !out.contains(&y) {
                out.push(y);
            }
        }
    }
    out.retain(|y| shift.admits_sequence(y));
    out
}

/// Periodic splice candidates: one period covers all widened windows plus a
/// gap of `K`.
pub fn periodic_splice_candidates(shift: &Subshift, inst: &SpecInstance<SymbolSequence>, eps: f64) -> Vec<SymbolSequence> {
    let Some((lo, hi)) = inst.span() else {
        return SymbolSequence::constant(shift.alphabet(), 0).into_iter().collect();
    };
    let k = shift.alphabet();
    let m = i64::from(splice_margin(k, eps));
    let start = lo - m;
    let period = (hi + m - start + 1) + inst.gap as i64 + m;
    let mut out = Vec::new();
    for fill in 0..k {
        let word: Vec<Symbol> = (start..start + period)
            .map(|j| {
                inst.windows
                    .iter()
                    .position(|&(a, b)| j >= a - m && j <= b + m)
                    .map(|i| inst.points[i].symbol(j))
                    .unwrap_or(fill as Symbol)
            })
            .collect();
        // rotate so that index 0 of the word sits at position `start`
        let shift_by = start.rem_euclid(period) as usize;
        let mut rotated = word.clone();
        rotated.rotate_right(shift_by);
        if let Ok(y) = SymbolSequence::periodic(k, &rotated) {
            if shift.admits_sequence(&y) && !out.contains(&y) {
                out.push(y);
            }
        }
    }
    out
}

/// Whether a sequence is periodic under its canonical form.
pub fn is_periodic_sequence(s: &SymbolSequence) -> bool {
    matches!(s.extension(), Extension::Periodic { .. })
}
