//! Shift spaces over finite alphabets.
//!
//! A bi-infinite sequence is stored as a finite window plus an extension rule
//! (periodic, or constant tails on each side), which makes symbol access total
//! and exact. Sequences are kept in a canonical form so that derived equality
//! is equality of the underlying bi-infinite sequences.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symbol type. Alphabets are `0..alphabet`.
pub type Symbol = u8;

/// How a [`SymbolSequence`] continues outside its stored window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Extension {
    /// `symbol(i + period) == symbol(i)` for every `i`.
    Periodic { period: usize },
    /// Constant `left` before the window, constant `right` after it.
    Tails { left: Symbol, right: Symbol },
}

impl fmt::Display for Extension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extension::Periodic { period } => write!(f, "periodic({period})"),
            Extension::Tails { left, right } => write!(f, "tails({left},{right})"),
        }
    }
}

impl FromStr for Extension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let inner = |prefix: &str| -> Option<&str> {
            s.strip_prefix(prefix)
                .and_then(|r| r.strip_prefix('('))
                .and_then(|r| r.strip_suffix(')'))
        };
        if let Some(p) = inner("periodic") {
            let period = p
                .trim()
                .parse::<usize>()
                .map_err(|e| Error::domain(format!("bad period in `{s}`: {e}")))?;
            return Ok(Extension::Periodic { period });
        }
        if let Some(ab) = inner("tails") {
            let mut it = ab.split(',').map(|x| x.trim().parse::<Symbol>());
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(left)), Some(Ok(right)), None) => {
                    return Ok(Extension::Tails { left, right })
                }
                _ => return Err(Error::domain(format!("bad tails in `{s}`"))),
            }
        }
        Err(Error::domain(format!("unknown extension `{s}`")))
    }
}

impl Serialize for Extension {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Extension {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct RawSequence {
    alphabet: u32,
    window: Vec<Symbol>,
    offset: i64,
    ext: Extension,
}

/// A bi-infinite sequence `(s_i)_{i ∈ Z}` over the alphabet `0..alphabet`.
///
/// Window index `j` holds `symbol(offset + j)`. Periodic sequences are stored
/// with minimal period, `offset == 0` and `window.len() == period`. Tail
/// sequences are trimmed so that the window starts and ends with symbols that
/// differ from the respective tail.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSequence", into = "RawSequence")]
pub struct SymbolSequence {
    alphabet: u32,
    window: Vec<Symbol>,
    offset: i64,
    ext: Extension,
}

impl From<SymbolSequence> for RawSequence {
    fn from(s: SymbolSequence) -> Self {
        RawSequence {
            alphabet: s.alphabet,
            window: s.window,
            offset: s.offset,
            ext: s.ext,
        }
    }
}

impl TryFrom<RawSequence> for SymbolSequence {
    type Error = Error;

    fn try_from(r: RawSequence) -> Result<Self> {
        match r.ext {
            Extension::Periodic { period } => {
                if period == 0 || r.window.len() < period {
                    return Err(Error::domain(format!(
                        "periodic({period}) needs a window of at least {period} symbols"
                    )));
                }
                // Reading position i from the raw window uses (i - offset) mod period.
                let word: Vec<Symbol> = (0..period as i64)
                    .map(|i| r.window[(i - r.offset).rem_euclid(period as i64) as usize])
                    .collect();
                let per = SymbolSequence::periodic(r.alphabet, &word)?;
                // The raw window must itself be consistent with the period.
                for (j, &c) in r.window.iter().enumerate() {
                    if per.symbol(r.offset + j as i64) != c {
                        return Err(Error::domain("window is not periodic with the declared period"));
                    }
                }
                Ok(per)
            }
            Extension::Tails { left, right } => {
                SymbolSequence::with_tails(r.alphabet, r.offset, r.window, left, right)
            }
        }
    }
}

fn check_symbols(alphabet: u32, symbols: &[Symbol]) -> Result<()> {
    if alphabet == 0 {
        return Err(Error::domain("alphabet size must be positive"));
    }
    if let Some(&bad) = symbols.iter().find(|&&c| u32::from(c) >= alphabet) {
        return Err(Error::domain(format!(
            "symbol {bad} outside alphabet of size {alphabet}"
        )));
    }
    Ok(())
}

fn minimal_period(word: &[Symbol]) -> usize {
    let n = word.len();
    (1..=n)
        .find(|&p| n % p == 0 && (p..n).all(|i| word[i] == word[i - p]))
        .unwrap_or(n)
}

impl SymbolSequence {
    /// The periodic sequence with `symbol(i) = word[i mod word.len()]`.
    pub fn periodic(alphabet: u32, word: &[Symbol]) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::domain("periodic word must be non-empty"));
        }
        check_symbols(alphabet, word)?;
        let p = minimal_period(word);
        Ok(SymbolSequence {
            alphabet,
            window: word[..p].to_vec(),
            offset: 0,
            ext: Extension::Periodic { period: p },
        })
    }

    /// The constant sequence `symbol(i) = c`.
    pub fn constant(alphabet: u32, c: Symbol) -> Result<Self> {
        Self::periodic(alphabet, &[c])
    }

    /// A sequence equal to `window` on `[offset, offset + len)`, `left` before it and
    /// `right` after it.
    pub fn with_tails(
        alphabet: u32,
        offset: i64,
        window: Vec<Symbol>,
        left: Symbol,
        right: Symbol,
    ) -> Result<Self> {
        check_symbols(alphabet, &window)?;
        check_symbols(alphabet, &[left, right])?;
        let mut start = 0;
        while start < window.len() && window[start] == left {
            start += 1;
        }
        let mut end = window.len();
        while end > start && window[end - 1] == right {
            end -= 1;
        }
        if start == end && left == right {
            return Self::constant(alphabet, left);
        }
        Ok(SymbolSequence {
            alphabet,
            window: window[start..end].to_vec(),
            offset: offset + start as i64,
            ext: Extension::Tails { left, right },
        })
    }

    /// Builds the sequence `i ↦ f(i)` on `[lo, hi]`, with the given tails outside.
    pub fn from_fn(
        alphabet: u32,
        lo: i64,
        hi: i64,
        left: Symbol,
        right: Symbol,
        f: impl Fn(i64) -> Symbol,
    ) -> Result<Self> {
        let window = (lo..=hi).map(f).collect();
        Self::with_tails(alphabet, lo, window, left, right)
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn extension(&self) -> Extension {
        self.ext
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn window(&self) -> &[Symbol] {
        &self.window
    }

    /// Minimal period for periodic sequences.
    pub fn period(&self) -> Option<usize> {
        match self.ext {
            Extension::Periodic { period } => Some(period),
            Extension::Tails { .. } => None,
        }
    }

    #[inline]
    pub fn symbol(&self, i: i64) -> Symbol {
        match self.ext {
            Extension::Periodic { period } => self.window[i.rem_euclid(period as i64) as usize],
            Extension::Tails { left, right } => {
                let j = i - self.offset;
                if j < 0 {
                    left
                } else if j as usize >= self.window.len() {
                    right
                } else {
                    self.window[j as usize]
                }
            }
        }
    }

    /// Symbols on `[lo, hi]`.
    pub fn block(&self, lo: i64, hi: i64) -> Vec<Symbol> {
        (lo..=hi).map(|i| self.symbol(i)).collect()
    }

    /// `σ^k`: `result(i) = self(i + k)`.
    pub fn shift(&self, k: i64) -> SymbolSequence {
        match self.ext {
            Extension::Periodic { period } => {
                let p = period as i64;
                let window = (0..p).map(|i| self.symbol(i + k)).collect();
                SymbolSequence {
                    alphabet: self.alphabet,
                    window,
                    offset: 0,
                    ext: self.ext,
                }
            }
            Extension::Tails { .. } => SymbolSequence {
                alphabet: self.alphabet,
                window: self.window.clone(),
                offset: self.offset - k,
                ext: self.ext,
            },
        }
    }

    /// Indices outside `[lo, hi]` agree with the extension rule; for tails this is the
    /// smallest interval containing the window.
    pub fn support(&self) -> (i64, i64) {
        match self.ext {
            Extension::Periodic { period } => (0, period as i64 - 1),
            Extension::Tails { .. } => (self.offset, self.offset + self.window.len() as i64 - 1),
        }
    }
}

impl fmt::Display for SymbolSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: String = self
            .window
            .iter()
            .map(|&c| char::from_digit(u32::from(c), 36).unwrap_or('?'))
            .collect();
        match self.ext {
            Extension::Periodic { .. } => write!(f, "({w})^∞"),
            Extension::Tails { left, right } => {
                write!(f, "…{left}{left}[{}:{w}]{right}{right}…", self.offset)
            }
        }
    }
}

/// Truncation index for the sequence metric: all terms with `|i| > N` together
/// contribute less than `tail_tol`.
pub fn truncation_index(alphabet: u32, tail_tol: f64) -> i64 {
    let k1 = f64::from(alphabet.saturating_sub(1));
    if k1 == 0.0 {
        return 0;
    }
    let mut n: i64 = 0;
    // tail bound (k-1) 2^{-N+2}
    while k1 * 2f64.powi(-(n as i32) + 2) >= tail_tol {
        n += 1;
        if n > 1000 {
            break;
        }
    }
    n
}

/// `d(s, t) = Σ_i 2^{-|i|} |s_i - t_i|`, truncated so the result is within
/// `tail_tol` of the full series.
pub fn distance(s: &SymbolSequence, t: &SymbolSequence, tail_tol: f64) -> Result<f64> {
    if s.alphabet != t.alphabet {
        return Err(Error::domain(format!(
            "alphabet mismatch: {} vs {}",
            s.alphabet, t.alphabet
        )));
    }
    if !(tail_tol > 0.0) {
        return Err(Error::domain("tail_tol must be positive"));
    }
    Ok(distance_unchecked(s, t, truncation_index(s.alphabet, tail_tol)))
}

pub(crate) fn distance_unchecked(s: &SymbolSequence, t: &SymbolSequence, n: i64) -> f64 {
    let mut acc = 0.0;
    for i in -n..=n {
        let a = s.symbol(i);
        let b = t.symbol(i);
        if a != b {
            acc += (f64::from(a) - f64::from(b)).abs() * 2f64.powi(-(i.abs() as i32));
        }
    }
    acc
}

/// All `2^n` binary sequences with periodic extension of period `n`, in
/// lexicographic order of their defining word `s_0 … s_{n-1}`.
pub fn periodic_family(n: usize) -> Result<Vec<SymbolSequence>> {
    if n == 0 {
        return Err(Error::domain("period must be at least 1"));
    }
    if n > 24 {
        return Err(Error::Range(format!("periodic family of period {n} is too large")));
    }
    (0..1u32 << n)
        .map(|code| {
            let word: Vec<Symbol> = (0..n).map(|j| ((code >> (n - 1 - j)) & 1) as Symbol).collect();
            SymbolSequence::periodic(2, &word)
        })
        .collect()
}

/// Binary word of length `n` for index `code` in [`periodic_family`] order.
pub fn family_word(n: usize, code: usize) -> Vec<Symbol> {
    (0..n).map(|j| ((code >> (n - 1 - j)) & 1) as Symbol).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Constraint {
    /// `transition[a][b]` allows `b` to follow `a`.
    Transitions(Vec<Vec<bool>>),
    /// Words that may not occur.
    Forbidden(Vec<Vec<Symbol>>),
}

/// A subshift of finite type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subshift {
    alphabet: u32,
    constraint: Constraint,
}

/// Higher-block presentation: vertices are admissible words of length `m`, edges
/// overlap in `m - 1` symbols. Only essential vertices survive.
#[derive(Debug, Clone)]
struct BlockGraph {
    m: usize,
    vertices: Vec<Vec<Symbol>>,
    edges: Vec<Vec<usize>>,
}

impl Subshift {
    pub fn full(alphabet: u32) -> Result<Self> {
        Self::from_transitions(vec![vec![true; alphabet as usize]; alphabet as usize])
    }

    /// Binary shift with the word `11` forbidden.
    pub fn golden_mean() -> Self {
        Subshift {
            alphabet: 2,
            constraint: Constraint::Forbidden(vec![vec![1, 1]]),
        }
    }

    pub fn from_transitions(matrix: Vec<Vec<bool>>) -> Result<Self> {
        let k = matrix.len();
        if k == 0 || matrix.iter().any(|row| row.len() != k) {
            return Err(Error::domain("transition matrix must be square and non-empty"));
        }
        Ok(Subshift {
            alphabet: k as u32,
            constraint: Constraint::Transitions(matrix),
        })
    }

    pub fn from_forbidden(alphabet: u32, words: Vec<Vec<Symbol>>) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::domain("alphabet size must be positive"));
        }
        for w in &words {
            if w.is_empty() {
                return Err(Error::domain("forbidden words must be non-empty"));
            }
            check_symbols(alphabet, w)?;
        }
        Ok(Subshift {
            alphabet,
            constraint: Constraint::Forbidden(words),
        })
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn constraint(&self) -> &Constraint {
        &self.constraint
    }

    /// Whether the finite word avoids every forbidden pattern.
    pub fn word_allowed(&self, word: &[Symbol]) -> bool {
        if word.iter().any(|&c| u32::from(c) >= self.alphabet) {
            return false;
        }
        match &self.constraint {
            Constraint::Transitions(m) => word
                .windows(2)
                .all(|w| m[w[0] as usize][w[1] as usize]),
            Constraint::Forbidden(fw) => !fw.iter().any(|f| {
                f.len() <= word.len() && word.windows(f.len()).any(|w| w == f.as_slice())
            }),
        }
    }

    /// Whether `s` restricted to `[lo, hi]` is an allowed word.
    pub fn admits(&self, s: &SymbolSequence, lo: i64, hi: i64) -> bool {
        s.alphabet() == self.alphabet && self.word_allowed(&s.block(lo, hi))
    }

    /// Whether the whole bi-infinite sequence is admitted. Tails and periodic
    /// words are finite data, so a bounded window decides this.
    pub fn admits_sequence(&self, s: &SymbolSequence) -> bool {
        let m = self.memory() as i64 + 1;
        let (lo, hi) = match s.extension() {
            Extension::Periodic { period } => (0, 2 * period as i64 + m),
            Extension::Tails { .. } => {
                let (a, b) = s.support();
                (a - m, b + m)
            }
        };
        self.admits(s, lo, hi)
    }

    fn memory(&self) -> usize {
        match &self.constraint {
            Constraint::Transitions(_) => 1,
            Constraint::Forbidden(fw) => fw.iter().map(|w| w.len()).max().unwrap_or(1).saturating_sub(1).max(1),
        }
    }

    fn block_graph(&self) -> BlockGraph {
        let m = self.memory();
        let k = self.alphabet as usize;
        let mut vertices = Vec::new();
        let mut word = vec![0 as Symbol; m];
        // enumerate k^m words
        let total = (k as u128).pow(m as u32);
        for code in 0..total {
            let mut c = code;
            for j in (0..m).rev() {
                word[j] = (c % k as u128) as Symbol;
                c /= k as u128;
            }
            if self.word_allowed(&word) {
                vertices.push(word.clone());
            }
        }
        let mut edges = vec![Vec::new(); vertices.len()];
        for (i, v) in vertices.iter().enumerate() {
            for (j, w) in vertices.iter().enumerate() {
                if v[1..] == w[..m - 1] {
                    let mut ext = v.clone();
                    ext.push(w[m - 1]);
                    if self.word_allowed(&ext) {
                        edges[i].push(j);
                    }
                }
            }
        }
        // Trim vertices without successors or predecessors until stable.
        let mut alive = vec![true; vertices.len()];
        loop {
            let mut changed = false;
            let mut has_pred = vec![false; vertices.len()];
            for (i, out) in edges.iter().enumerate() {
                if alive[i] {
                    for &j in out {
                        if alive[j] {
                            has_pred[j] = true;
                        }
                    }
                }
            }
            for i in 0..vertices.len() {
                if alive[i] {
                    let has_succ = edges[i].iter().any(|&j| alive[j]);
                    if !has_succ || !has_pred[i] {
                        alive[i] = false;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let remap: Vec<Option<usize>> = {
            let mut next = 0;
            alive
                .iter()
                .map(|&a| {
                    if a {
                        next += 1;
                        Some(next - 1)
                    } else {
                        None
                    }
                })
                .collect()
        };
        let mut vs = Vec::new();
        let mut es = Vec::new();
        for (i, v) in vertices.into_iter().enumerate() {
            if alive[i] {
                vs.push(v);
                es.push(edges[i].iter().filter_map(|&j| remap[j]).collect());
            }
        }
        BlockGraph { m, vertices: vs, edges: es }
    }

    /// Number of words of length `n` that occur in some point of the subshift.
    pub fn word_count(&self, n: usize) -> Result<u128> {
        let g = self.block_graph();
        if g.vertices.is_empty() {
            return Err(Error::domain("empty subshift"));
        }
        if n == 0 {
            return Ok(1);
        }
        if n < g.m {
            let mut prefixes: Vec<&[Symbol]> = g.vertices.iter().map(|v| &v[..n]).collect();
            prefixes.sort();
            prefixes.dedup();
            return Ok(prefixes.len() as u128);
        }
        let mut counts = vec![1u128; g.vertices.len()];
        for _ in 0..n - g.m {
            let mut next = vec![0u128; counts.len()];
            for (i, out) in g.edges.iter().enumerate() {
                for &j in out {
                    next[j] = next[j]
                        .checked_add(counts[i])
                        .ok_or_else(|| Error::Range("word count overflows u128".into()))?;
                }
            }
            counts = next;
        }
        counts
            .into_iter()
            .try_fold(0u128, |acc, c| acc.checked_add(c))
            .ok_or_else(|| Error::Range("word count overflows u128".into()))
    }

    /// `(1/n) log #{admissible words of length n}`.
    pub fn entropy(&self, horizon: usize) -> Result<f64> {
        if horizon == 0 {
            return Err(Error::domain("horizon must be positive"));
        }
        let g = self.block_graph();
        if g.vertices.is_empty() {
            return Err(Error::domain("empty subshift"));
        }
        if horizon <= g.m {
            return Ok((self.word_count(horizon)? as f64).ln() / horizon as f64);
        }
        // Log-scaled path counting.
        let mut counts = vec![1.0f64; g.vertices.len()];
        let mut log_scale = 0.0;
        for _ in 0..horizon - g.m {
            let mut next = vec![0.0; counts.len()];
            for (i, out) in g.edges.iter().enumerate() {
                for &j in out {
                    next[j] += counts[i];
                }
            }
            let norm = next.iter().cloned().fold(0.0, f64::max);
            if norm > 0.0 {
                for c in next.iter_mut() {
                    *c /= norm;
                }
                log_scale += norm.ln();
            }
            counts = next;
        }
        let total: f64 = counts.iter().sum();
        Ok((total.ln() + log_scale) / horizon as f64)
    }
}

impl Subshift {
    /// `log` of the spectral radius of the block graph, by normalized power
    /// iteration; the growth rate is averaged so periodic graphs converge too.
    pub fn spectral_entropy(&self) -> Result<f64> {
        let g = self.block_graph();
        if g.vertices.is_empty() {
            return Err(Error::domain("empty subshift"));
        }
        let (burn, keep) = (500, 2000);
        let mut v = vec![1.0f64; g.vertices.len()];
        let mut acc = 0.0;
        for k in 0..burn + keep {
            let mut next = vec![0.0; v.len()];
            for (i, out) in g.edges.iter().enumerate() {
                for &j in out {
                    next[j] += v[i];
                }
            }
            let norm: f64 = next.iter().sum();
            if norm == 0.0 {
                return Err(Error::domain("subshift has no bi-infinite points"));
            }
            if k >= burn {
                acc += (norm / v.iter().sum::<f64>()).ln();
            }
            v = next.into_iter().map(|x| x / norm).collect();
        }
        Ok(acc / keep as f64)
    }
}

/// `(1/horizon) log(count of admissible words of length horizon)`.
pub fn subshift_entropy(s: &Subshift, horizon: usize) -> Result<f64> {
    s.entropy(horizon)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bin(word: &[Symbol]) -> SymbolSequence {
        SymbolSequence::periodic(2, word).unwrap()
    }

    #[test]
    fn distance_examples() {
        let s = SymbolSequence::with_tails(2, -3, vec![1, 0, 1, 1, 0], 0, 1).unwrap();
        assert_eq!(distance(&s, &s, 1e-12).unwrap(), 0.0);

        let zero = SymbolSequence::constant(2, 0).unwrap();
        let one_at_0 = SymbolSequence::with_tails(2, 0, vec![1], 0, 0).unwrap();
        assert!((distance(&zero, &one_at_0, 1e-12).unwrap() - 1.0).abs() < 1e-12);

        // 1 + 2 Σ_{i≥1} 2^{-i} by direct partial sums
        let one = SymbolSequence::constant(2, 1).unwrap();
        let oracle: f64 = 1.0 + 2.0 * (1..200).map(|i| 0.5f64.powi(i)).sum::<f64>();
        let tol = 1e-9;
        assert!((distance(&zero, &one, tol).unwrap() - oracle).abs() < tol);
        assert!((oracle - 3.0).abs() < 1e-12);
    }

    #[test]
    fn distance_rejects_mismatched_alphabets() {
        let a = SymbolSequence::constant(2, 0).unwrap();
        let b = SymbolSequence::constant(3, 0).unwrap();
        assert!(matches!(distance(&a, &b, 1e-6), Err(Error::Domain(_))));
    }

    #[test]
    fn shift_examples() {
        let s = SymbolSequence::with_tails(2, -2, vec![1, 1, 0, 1], 0, 1).unwrap();
        assert_eq!(s.shift(0), s);
        let zero = SymbolSequence::constant(2, 0).unwrap();
        assert_eq!(zero.shift(5), zero);
        assert_eq!(bin(&[0, 1]).shift(1), bin(&[1, 0]));
        for i in -10..10 {
            assert_eq!(s.shift(3).symbol(i), s.symbol(i + 3));
        }
    }

    #[test]
    fn canonical_forms_agree() {
        let a = SymbolSequence::with_tails(2, 4, vec![0, 0, 0], 0, 0).unwrap();
        assert_eq!(a, SymbolSequence::constant(2, 0).unwrap());
        assert_eq!(bin(&[0, 1, 0, 1]), bin(&[0, 1]));
        assert_eq!(bin(&[0, 1, 0, 1]).period(), Some(2));
    }

    #[test]
    fn json_literal_format() {
        let s = SymbolSequence::with_tails(3, -2, vec![2, 1, 0], 0, 1).unwrap();
        let js = serde_json::to_string(&s).unwrap();
        assert!(js.contains("\"ext\":\"tails(0,1)\""), "{js}");
        assert_eq!(serde_json::from_str::<SymbolSequence>(&js).unwrap(), s);
        let p: SymbolSequence =
            serde_json::from_str(r#"{"alphabet":2,"window":[1,0,1,0],"offset":-3,"ext":"periodic(2)"}"#).unwrap();
        // symbol(-3) = 1 so symbol(0) = symbol(-3 + 3) must be 0
        assert_eq!(p.symbol(-3), 1);
        assert_eq!(p.symbol(0), 0);
        assert!(serde_json::from_str::<SymbolSequence>(
            r#"{"alphabet":2,"window":[1,0,0],"offset":0,"ext":"periodic(2)"}"#
        )
        .is_err());
        assert!(serde_json::from_str::<SymbolSequence>(
            r#"{"alphabet":2,"window":[2],"offset":0,"ext":"periodic(1)"}"#
        )
        .is_err());
    }

    #[test]
    fn periodic_family_examples() {
        let f1 = periodic_family(1).unwrap();
        assert_eq!(f1, vec![bin(&[0]), bin(&[1])]);
        assert_eq!(periodic_family(3).unwrap().len(), 8);
        let f2 = periodic_family(2).unwrap();
        assert!(f2.contains(&bin(&[0, 1])) && f2.contains(&bin(&[1, 0])));
        assert_ne!(bin(&[0, 1]), bin(&[1, 0]));
        assert!(matches!(periodic_family(0), Err(Error::Domain(_))));
    }

    #[test]
    fn subshift_entropy_examples() {
        let full = Subshift::full(2).unwrap();
        for n in [1, 5, 17] {
            assert!((subshift_entropy(&full, n).unwrap() - 2f64.ln()).abs() < 1e-12);
        }
        // power iteration on [[1,1],[1,0]] as the spectral-radius oracle
        let mut v = [1.0f64, 1.0];
        let mut lambda = 0.0;
        for _ in 0..200 {
            let w = [v[0] + v[1], v[0]];
            lambda = w[0] / v[0];
            let n = w[0].max(w[1]);
            v = [w[0] / n, w[1] / n];
        }
        let gm = subshift_entropy(&Subshift::golden_mean(), 30).unwrap();
        assert!((gm - lambda.ln()).abs() < 0.02, "{gm} vs {}", lambda.ln());

        let single = Subshift::from_transitions(vec![vec![true, false], vec![false, false]]).unwrap();
        assert_eq!(subshift_entropy(&single, 12).unwrap(), 0.0);

        let empty = Subshift::from_forbidden(2, vec![vec![0], vec![1]]).unwrap();
        assert!(matches!(subshift_entropy(&empty, 3), Err(Error::Domain(_))));
    }

    #[test]
    fn full_shift_word_counts_are_exact() {
        for k in 1..5u32 {
            let s = Subshift::full(k).unwrap();
            for n in 0..12 {
                assert_eq!(s.word_count(n).unwrap(), u128::from(k).pow(n as u32));
            }
        }
    }

    #[test]
    fn golden_mean_counts_are_fibonacci() {
        let s = Subshift::golden_mean();
        let counts: Vec<u128> = (1..10).map(|n| s.word_count(n).unwrap()).collect();
        assert_eq!(counts, vec![2, 3, 5, 8, 13, 21, 34, 55, 89]);
    }

    #[test]
    fn extension_parsing() {
        assert_eq!("periodic(4)".parse::<Extension>().unwrap(), Extension::Periodic { period: 4 });
        assert_eq!(
            " tails(1, 0) ".parse::<Extension>().unwrap(),
            Extension::Tails { left: 1, right: 0 }
        );
        assert!("tails(1)".parse::<Extension>().is_err());
        assert!("mirror(2)".parse::<Extension>().is_err());
    }
}
