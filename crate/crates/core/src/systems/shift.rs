//! Shift maps on subshifts of finite type, as base homeomorphisms.

use rand::{Rng, RngCore};

use crate::specification::Homeomorphism;
use crate::suspension::SuspensionBase;
use crate::symbolic::{distance_unchecked, truncation_index, Subshift, Symbol, SymbolSequence};

/// Tail tolerance of the base metric.
pub const SHIFT_TAIL_TOL: f64 = 1e-12;

/// Coordinates `[-EMBED_RADIUS, EMBED_RADIUS]` enter the suspension embedding.
pub const EMBED_RADIUS: i64 = 40;

/// Longest window enumerated by nets.
const MAX_NET_RADIUS: i64 = 12;

/// The left shift `σ(s)_i = s_{i+1}` on a subshift.
#[derive(Debug, Clone)]
pub struct ShiftMap {
    shift: Subshift,
    label: String,
    cut: i64,
}

impl ShiftMap {
    pub fn new(shift: Subshift, label: impl Into<String>) -> Self {
        let cut = truncation_index(shift.alphabet(), SHIFT_TAIL_TOL);
        ShiftMap {
            shift,
            label: label.into(),
            cut,
        }
    }

    pub fn full(alphabet: u32) -> crate::error::Result<Self> {
        let name = if alphabet == 2 {
            "full-2-shift".to_string()
        } else {
            format!("full-{alphabet}-shift")
        };
        Ok(Self::new(Subshift::full(alphabet)?, name))
    }

    pub fn golden_mean() -> Self {
        Self::new(Subshift::golden_mean(), "golden-mean-sft")
    }

    pub fn subshift(&self) -> &Subshift {
        &self.shift
    }

    fn k(&self) -> u32 {
        self.shift.alphabet()
    }

    /// Smallest `m` such that agreeing on `[-m, m]` puts sequences within `eps`.
    pub fn radius_for(&self, eps: f64) -> i64 {
        let k = f64::from(self.k().max(2) - 1);
        let mut m = 0i64;
        while 2.0 * k * 0.5f64.powi(m as i32) >= eps && m < 60 {
            m += 1;
        }
        m
    }

    /// A self-looping symbol that may precede (or follow) `c`.
    fn tail_symbol(&self, c: Symbol, before: bool) -> Option<Symbol> {
        (0..self.k() as Symbol).find(|&a| {
            let w = if before { [a, a, a, c] } else { [c, a, a, a] };
            self.shift.word_allowed(&w)
        })
    }

    /// Admissible sequences equal to a word on `[lo, lo + len)` with constant tails.
    fn fill(&self, lo: i64, word: &[Symbol]) -> Option<SymbolSequence> {
        let left = self.tail_symbol(*word.first()?, true)?;
        let right = self.tail_symbol(*word.last()?, false)?;
        SymbolSequence::with_tails(self.k(), lo, word.to_vec(), left, right).ok()
    }

    /// Depth-first enumeration of admissible words on `[lo, hi]` whose partial
    /// distance to `center` (weights `2^{-|i|}`) stays below `budget`.
    fn words_near(&self, center: Option<&SymbolSequence>, lo: i64, hi: i64, budget: f64) -> Vec<SymbolSequence> {
        let idx: Vec<i64> = (lo..=hi).collect();
        let mut order: Vec<usize> = (0..idx.len()).collect();
        order.sort_by_key(|&j| (idx[j].abs(), idx[j]));
        let n = idx.len();
        let mut word = vec![0 as Symbol; n];
        let mut out = Vec::new();
        self.dfs(center, &idx, &order, 0, 0.0, budget, &mut word, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn dfs(
        &self,
        center: Option<&SymbolSequence>,
        idx: &[i64],
        order: &[usize],
        depth: usize,
        acc: f64,
        budget: f64,
        word: &mut Vec<Symbol>,
        out: &mut Vec<SymbolSequence>,
    ) {
        if depth == order.len() {
            if self.shift.word_allowed(word) {
                if let Some(s) = self.fill(idx[0], word) {
                    out.push(s);
                }
            }
            return;
        }
        let j = order[depth];
        let i = idx[j];
        let w = 0.5f64.powi(i.unsigned_abs() as i32);
        for c in 0..self.k() as Symbol {
            let add = match center {
                Some(s) => w * f64::from((i32::from(c) - i32::from(s.symbol(i))).unsigned_abs()),
                None => 0.0,
            };
            if acc + add >= budget {
                continue;
            }
            word[j] = c;
            self.dfs(center, idx, order, depth + 1, acc + add, budget, word, out);
        }
    }
}

impl Homeomorphism for ShiftMap {
    type Point = SymbolSequence;

    fn forward(&self, p: &SymbolSequence) -> SymbolSequence {
        p.shift(1)
    }

    fn backward(&self, p: &SymbolSequence) -> SymbolSequence {
        p.shift(-1)
    }

    fn dist(&self, a: &SymbolSequence, b: &SymbolSequence) -> f64 {
        distance_unchecked(a, b, self.cut)
    }

    fn name(&self) -> String {
        self.label.clone()
    }

    fn tol(&self) -> f64 {
        SHIFT_TAIL_TOL
    }
}

impl SuspensionBase for ShiftMap {
    fn embed_dim(&self) -> usize {
        (2 * EMBED_RADIUS + 1) as usize
    }

    fn embed(&self, p: &SymbolSequence, out: &mut [f64]) {
        for (j, i) in (-EMBED_RADIUS..=EMBED_RADIUS).enumerate() {
            out[j] = 0.5f64.powi(i.unsigned_abs() as i32) * f64::from(p.symbol(i));
        }
    }

    fn net_near(&self, center: &SymbolSequence, radius: f64, eps: f64) -> Vec<SymbolSequence> {
        let m = self.radius_for(eps).min(MAX_NET_RADIUS);
        self.words_near(Some(center), -m, m, radius)
            .into_iter()
            .filter(|q| self.dist(center, q) < radius)
            .collect()
    }

    fn net(&self, eps: f64) -> Vec<SymbolSequence> {
        let m = self.radius_for(eps).min(MAX_NET_RADIUS);
        self.words_near(None, -m, m, f64::INFINITY)
    }

    /// Admissible words on `[0, steps]`; coordinates outside that window only
    /// add a factor independent of `steps`.
    fn spanning(&self, _eps: f64, steps: usize) -> Vec<SymbolSequence> {
        let hi = (steps as i64).min(2 * MAX_NET_RADIUS);
        self.words_near(None, 0, hi, f64::INFINITY)
    }

    fn perturb(&self, p: &SymbolSequence, radius: f64, rng: &mut dyn RngCore) -> SymbolSequence {
        let m = self.radius_for(radius);
        let span = m + 24;
        let k = self.k();
        for _ in 0..64 {
            let mut word: Vec<Symbol> = (-span..=span).map(|i| p.symbol(i)).collect();
            for (j, i) in (-span..=span).enumerate() {
                if i.abs() > m && rng.gen::<f64>() < 0.5 {
                    word[j] = rng.gen_range(0..k) as Symbol;
                }
            }
            let left = p.symbol(-span - 1);
            let right = p.symbol(span + 1);
            let Ok(q) = SymbolSequence::with_tails(k, -span, word, left, right) else {
                continue;
            };
            if self.shift.admits(&q, -span - 2, span + 2) && self.dist(p, &q) < radius {
                return q;
            }
        }
        p.clone()
    }

    fn shadow_levels(&self, levels: &[SymbolSequence], periodic: bool) -> Option<SymbolSequence> {
        let n = levels.len();
        if n == 0 {
            return None;
        }
        let k = self.k();
        let s = if periodic {
            let word: Vec<Symbol> = levels.iter().map(|w| w.symbol(0)).collect();
            SymbolSequence::periodic(k, &word).ok()?
        } else {
            let r = EMBED_RADIUS + 8;
            let lo = -r;
            let hi = n as i64 - 1 + r;
            let sym = |i: i64| -> Symbol {
                if i < 0 {
                    levels[0].symbol(i)
                } else if i < n as i64 {
                    levels[i as usize].symbol(0)
                } else {
                    levels[n - 1].symbol(i - n as i64 + 1)
                }
            };
            SymbolSequence::from_fn(k, lo, hi, sym(lo - 1), sym(hi + 1), sym).ok()?
        };
        Some(s)
    }

    fn partition_size(&self, _alpha: f64) -> usize {
        self.k() as usize
    }

    fn cell_of(&self, p: &SymbolSequence, _alpha: f64) -> usize {
        p.symbol(0) as usize
    }

    fn embed_diameter(&self) -> f64 {
        3.0 * f64::from(self.k().max(2) - 1)
    }
}
