//! Suspension flows over a base homeomorphism.
//!
//! A point of `X_r` is a pair `(x, s)` with `0 ≤ s < r(x)`; the flow moves `s`
//! at unit speed and applies the base map when `s` reaches the roof, realizing
//! the identification `(x, r(x)) ∼ (f(x), 0)`.
//!
//! The metric embeds `X_r` into a normed space. With `u = s / r(x)` and `ι` an
//! embedding of the base,
//!
//! ```text
//! Φ(x, u) = ( (1 - u) ι(x) + u ι(f x),  sin(πu) ι(x),  u mod 1 )
//! ```
//!
//! and `d(p, q) = ‖Φ(p) - Φ(q)‖₁` with the circle distance in the last slot.
//! `Φ` is continuous, injective and compatible with the identification, so `d`
//! is a genuine metric inducing the quotient topology.

use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

use rand::{Rng, RngCore};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flow::{AnalyticSections, FlowSystem, Reparametrization};
use crate::sections::CrossSection;
use crate::shadowing::PseudoOrbit;
use crate::specification::Homeomorphism;

/// Upper bound on [`SuspensionBase::embed_dim`].
pub const MAX_EMBED: usize = 128;

/// Wrap tolerance for heights at the roof.
pub const HEIGHT_WRAP_TOL: f64 = 1e-9;

/// What a base homeomorphism must provide to be suspended.
pub trait SuspensionBase: Homeomorphism + Clone + 'static {
    /// Dimension of the embedding used by the suspension metric.
    fn embed_dim(&self) -> usize;

    /// Writes the embedding of `p` into `out[..embed_dim()]`.
    fn embed(&self, p: &Self::Point, out: &mut [f64]);

    /// Base points within `radius` of `center` from an `eps`-net.
    fn net_near(&self, center: &Self::Point, radius: f64, eps: f64) -> Vec<Self::Point>;

    /// A finite `eps`-net of the base.
    fn net(&self, eps: f64) -> Vec<Self::Point>;

    /// A set `eps`-spanning orbit segments of `steps` iterates.
    fn spanning(&self, eps: f64, steps: usize) -> Vec<Self::Point> {
        let _ = steps;
        self.net(eps)
    }

    fn perturb(&self, p: &Self::Point, radius: f64, rng: &mut dyn RngCore) -> Self::Point;

    /// Points within `radius` of `p` whose `k`-th image, `k ≤ max_steps`, comes
    /// back within `radius` of `p`, when the map can solve for them. Callers
    /// verify.
    fn return_candidates(&self, _p: &Self::Point, _radius: f64, _max_steps: usize) -> Vec<(Self::Point, usize)> {
        Vec::new()
    }

    /// A point whose orbit tracks `levels[k] ≈ f^k(z)`, closing up after
    /// `levels.len()` iterates when `periodic`.
    fn shadow_levels(&self, levels: &[Self::Point], periodic: bool) -> Option<Self::Point>;

    /// Number of cells of the base partition used for sections with diameter
    /// scale `alpha`.
    fn partition_size(&self, alpha: f64) -> usize;

    fn cell_of(&self, p: &Self::Point, alpha: f64) -> usize;

    /// Diameter of the base in the embedding metric.
    fn embed_diameter(&self) -> f64;
}

/// A roof function `r` with bounds `r_min ≤ r(x) ≤ r_max`.
#[derive(Clone)]
pub struct RoofFunction<P> {
    eval: Arc<dyn Fn(&P) -> f64 + Send + Sync>,
    r_min: f64,
    r_max: f64,
    constant: Option<f64>,
    label: String,
}

impl<P> Debug for RoofFunction<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RoofFunction")
            .field("label", &self.label)
            .field("r_min", &self.r_min)
            .field("r_max", &self.r_max)
            .finish()
    }
}

impl<P> RoofFunction<P> {
    pub fn constant(c: f64) -> Self {
        RoofFunction {
            eval: Arc::new(move |_| c),
            r_min: c,
            r_max: c,
            constant: Some(c),
            label: format!("const({c})"),
        }
    }

    pub fn unit() -> Self {
        let mut r = Self::constant(1.0);
        r.label = "unit".into();
        r
    }

    pub fn new(label: impl Into<String>, r_min: f64, r_max: f64, eval: impl Fn(&P) -> f64 + Send + Sync + 'static) -> Self {
        RoofFunction {
            eval: Arc::new(eval),
            r_min,
            r_max,
            constant: None,
            label: label.into(),
        }
    }

    #[inline]
    pub fn at(&self, p: &P) -> f64 {
        self.eval.as_ref()(p)
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn constant_value(&self) -> Option<f64> {
        self.constant
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// A point `(x, s)` of `X_r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "P: Serialize", deserialize = "P: DeserializeOwned"))]
pub struct SuspensionPoint<P> {
    pub base: P,
    pub height: f64,
}

impl<P> SuspensionPoint<P> {
    pub fn new(base: P, height: f64) -> Self {
        SuspensionPoint { base, height }
    }
}

/// The suspension flow of a base homeomorphism under a roof.
#[derive(Debug, Clone)]
pub struct SuspensionFlow<B: SuspensionBase> {
    base: B,
    roof: RoofFunction<B::Point>,
}

/// Builds the suspension flow; fails unless the roof is bounded below by a
/// positive constant.
pub fn suspend_flow<B: SuspensionBase>(base: B, roof: RoofFunction<B::Point>) -> Result<SuspensionFlow<B>> {
    if !(roof.r_min() > 0.0) || !(roof.r_max() >= roof.r_min()) || !roof.r_max().is_finite() {
        return Err(Error::domain(format!(
            "roof must satisfy 0 < r_min <= r_max < inf, got [{}, {}]",
            roof.r_min(),
            roof.r_max()
        )));
    }
    Ok(SuspensionFlow { base, roof })
}

impl<B: SuspensionBase> SuspensionFlow<B> {
    pub fn base(&self) -> &B {
        &self.base
    }

    pub fn roof(&self) -> &RoofFunction<B::Point> {
        &self.roof
    }

    /// Normalizes a height into `[0, r(base))`, moving along the base as needed.
    pub fn point(&self, base: B::Point, height: f64) -> SuspensionPoint<B::Point> {
        self.flow_unit(&SuspensionPoint::new(base, 0.0), height)
    }

    fn flow_unit(&self, p: &SuspensionPoint<B::Point>, t: f64) -> SuspensionPoint<B::Point> {
        let mut x = p.base.clone();
        let mut s = p.height + t;
        let mut r = self.roof.at(&x);
        loop {
            if s >= r - HEIGHT_WRAP_TOL {
                s -= r;
                x = self.base.forward(&x);
                r = self.roof.at(&x);
                if s < 0.0 {
                    s = 0.0;
                }
            } else if s < 0.0 {
                x = self.base.backward(&x);
                r = self.roof.at(&x);
                s += r;
            } else {
                break;
            }
        }
        SuspensionPoint::new(x, s)
    }

    /// Normalized height `s / r(x)` in `[0, 1)`.
    pub fn fraction(&self, p: &SuspensionPoint<B::Point>) -> f64 {
        (p.height / self.roof.at(&p.base)).clamp(0.0, 1.0)
    }

    fn embed_pair(&self, x: &B::Point, ex: &mut [f64], efx: &mut [f64]) {
        self.base.embed(x, ex);
        self.base.embed(&self.base.forward(x), efx);
    }

    /// Suspension metric (see the module docs).
    pub fn metric(&self, a: &SuspensionPoint<B::Point>, b: &SuspensionPoint<B::Point>) -> f64 {
        let n = self.base.embed_dim();
        let mut ex = [0.0; MAX_EMBED];
        let mut efx = [0.0; MAX_EMBED];
        let mut ey = [0.0; MAX_EMBED];
        let mut efy = [0.0; MAX_EMBED];
        self.embed_pair(&a.base, &mut ex[..n], &mut efx[..n]);
        self.embed_pair(&b.base, &mut ey[..n], &mut efy[..n]);
        let u = self.fraction(a);
        let v = self.fraction(b);
        let (su, sv) = ((PI * u).sin(), (PI * v).sin());
        let mut blend = 0.0;
        let mut fiber = 0.0;
        for j in 0..n {
            blend += ((1.0 - u) * ex[j] + u * efx[j] - (1.0 - v) * ey[j] - v * efy[j]).abs();
            fiber += (su * ex[j] - sv * ey[j]).abs();
        }
        let du = (u - v).abs();
        blend + fiber + du.min(1.0 - du)
    }

    /// `[(1-u)ι(x) + uι(fx), sin(πu)ι(x), u]`, the coordinates in which
    /// [`Self::metric`] is an L1 distance plus a circle distance.
    pub fn features(&self, a: &SuspensionPoint<B::Point>) -> Vec<f64> {
        let n = self.base.embed_dim();
        let mut ex = [0.0; MAX_EMBED];
        let mut efx = [0.0; MAX_EMBED];
        self.embed_pair(&a.base, &mut ex[..n], &mut efx[..n]);
        let u = self.fraction(a);
        let su = (PI * u).sin();
        let mut out = Vec::with_capacity(2 * n + 1);
        out.extend((0..n).map(|j| (1.0 - u) * ex[j] + u * efx[j]));
        out.extend((0..n).map(|j| su * ex[j]));
        out.push(u);
        out
    }

    pub fn feature_dist(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() - 1;
        let l1: f64 = a[..n].iter().zip(&b[..n]).map(|(x, y)| (x - y).abs()).sum();
        let du = (a[n] - b[n]).abs();
        l1 + du.min(1.0 - du)
    }

    fn height_grid(&self, eps: f64) -> Vec<f64> {
        let spacing = eps / (2.0 * (2.0 + self.base.embed_diameter()));
        let m = (1.0 / spacing).ceil().max(1.0) as usize;
        (0..m).map(|k| k as f64 / m as f64).collect()
    }

    fn base_eps(&self, eps: f64) -> f64 {
        eps / 6.0
    }

    /// Base pseudo-orbit seen by a flow pseudo-orbit under a constant roof:
    /// one base point per crossing level, plus the level/height knots used to
    /// realign heights.
    fn level_sequence(&self, chain: &PseudoOrbit<SuspensionPoint<B::Point>>, r: f64) -> Option<(Vec<B::Point>, Vec<i64>, usize)> {
        let k = chain.len();
        let mut levels: Vec<Option<B::Point>> = Vec::new();
        let mut start: Vec<i64> = Vec::with_capacity(k + 1);
        let mut cur: i64 = 0;
        let put = |levels: &mut Vec<Option<B::Point>>, idx: i64, p: B::Point| -> Option<()> {
            if idx < 0 {
                return None;
            }
            let idx = idx as usize;
            if levels.len() <= idx {
                levels.resize(idx + 1, None);
            }
            levels[idx] = Some(p);
            Some(())
        };
        for i in 0..k {
            let (x, t) = chain.entry(i as i64);
            start.push(cur);
            let total = x.height + t;
            let m = (total / r + HEIGHT_WRAP_TOL).floor() as i64;
            let mut b = x.base.clone();
            put(&mut levels, cur, b.clone())?;
            for j in 1..=m {
                b = self.base.forward(&b);
                put(&mut levels, cur + j, b.clone())?;
            }
            let v = total - m as f64 * r;
            let adj = if i + 1 < k || chain.is_periodic() {
                let (nx, _) = chain.entry(i as i64 + 1);
                let gap = v - nx.height;
                if gap > r / 2.0 {
                    1
                } else if gap < -r / 2.0 {
                    -1
                } else {
                    0
                }
            } else {
                0
            };
            cur += m + adj;
        }
        start.push(cur);
        let total_levels = if chain.is_periodic() { cur.max(0) as usize } else { levels.len() };
        if total_levels == 0 {
            return None;
        }
        let mut out = Vec::with_capacity(total_levels);
        for l in 0..total_levels {
            out.push(levels.get(l).cloned().flatten()?);
        }
        Some((out, start, total_levels))
    }
}

impl<B: SuspensionBase> FlowSystem for SuspensionFlow<B> {
    type Point = SuspensionPoint<B::Point>;

    fn evaluate(&self, p: &Self::Point, t: f64) -> Self::Point {
        self.flow_unit(p, t)
    }

    fn dist(&self, a: &Self::Point, b: &Self::Point) -> f64 {
        self.metric(a, b)
    }

    fn features(&self, p: &Self::Point) -> Option<Vec<f64>> {
        Some(SuspensionFlow::features(self, p))
    }

    fn feature_dist(&self, a: &[f64], b: &[f64]) -> f64 {
        SuspensionFlow::<B>::feature_dist(a, b)
    }

    fn net(&self, eps: f64) -> Vec<Self::Point> {
        let bases = self.base.net(self.base_eps(eps));
        let hs = self.height_grid(eps);
        let mut out = Vec::with_capacity(bases.len() * hs.len());
        for b in &bases {
            let r = self.roof.at(b);
            for &h in &hs {
                out.push(SuspensionPoint::new(b.clone(), h * r));
            }
        }
        out
    }

    fn net_near(&self, center: &Self::Point, radius: f64, eps: f64) -> Vec<Self::Point> {
        let bases = self.base.net_near(&center.base, radius, self.base_eps(eps));
        let hs = self.height_grid(eps);
        let mut out = Vec::new();
        for b in bases {
            let r = self.roof.at(&b);
            for &h in &hs {
                let q = SuspensionPoint::new(b.clone(), h * r);
                if self.metric(center, &q) < radius {
                    out.push(q);
                }
            }
        }
        // also look one fiber below and above for points near the identification
        let cu = self.fraction(center);
        if cu < 0.5 {
            let prev = self.base.backward(&center.base);
            for b in self.base.net_near(&prev, radius * 2.0, self.base_eps(eps)) {
                let r = self.roof.at(&b);
                for &h in hs.iter().rev().take_while(|&&h| h > 0.5) {
                    let q = SuspensionPoint::new(b.clone(), h * r);
                    if self.metric(center, &q) < radius && !out.contains(&q) {
                        out.push(q);
                    }
                }
            }
        }
        out
    }

    fn spanning_set(&self, eps: f64, t: f64) -> Vec<Self::Point> {
        // Heights at spacing about eps: closer points on one fiber cannot be
        // (t, eps)-separated by more than a bounded factor anyway.
        let steps = (t / self.roof.r_min()).ceil() as usize + 1;
        let bases = self.base.spanning(eps, steps);
        let m = (self.roof.r_max() / eps).ceil().max(1.0) as usize;
        let mut out = Vec::with_capacity(bases.len() * m);
        for b in &bases {
            let r = self.roof.at(b);
            for k in 0..m {
                out.push(SuspensionPoint::new(b.clone(), k as f64 / m as f64 * r));
            }
        }
        out
    }

    fn perturb(&self, p: &Self::Point, radius: f64, rng: &mut dyn RngCore) -> Self::Point {
        let mut scale = radius / 4.0;
        for _ in 0..60 {
            let b = self.base.perturb(&p.base, scale, rng);
            let dh = (rng.gen::<f64>() * 2.0 - 1.0) * scale * 0.25 * self.roof.at(&p.base);
            let q = self.flow_unit(&SuspensionPoint::new(b, p.height.max(0.0)), dh);
            if self.metric(p, &q) < radius {
                return q;
            }
            scale *= 0.7;
        }
        p.clone()
    }

    fn return_candidates(&self, p: &Self::Point, eta: f64, horizon: f64) -> Vec<(Self::Point, f64)> {
        // candidates are filtered by the caller in the suspension metric
        let u = self.fraction(p);
        let steps = (horizon / self.roof.r_min()).floor() as usize;
        self.base
            .return_candidates(&p.base, eta / 3.0, steps)
            .into_iter()
            .map(|(x, k)| {
                let mut t = (1.0 - u) * self.roof.at(&x);
                let mut y = self.base.forward(&x);
                for _ in 1..k {
                    t += self.roof.at(&y);
                    y = self.base.forward(&y);
                }
                t += u * self.roof.at(&y);
                let h = u * self.roof.at(&x);
                (SuspensionPoint::new(x, h), t)
            })
            .filter(|(_, t)| *t <= horizon)
            .collect()
    }

    fn shadow_candidates(&self, chain: &PseudoOrbit<Self::Point>) -> Vec<(Self::Point, Reparametrization)> {
        let Some(r) = self.roof.constant_value() else {
            return Vec::new();
        };
        if chain.is_empty() {
            return Vec::new();
        }
        let Some((levels, start, n_levels)) = self.level_sequence(chain, r) else {
            return Vec::new();
        };
        let Some(z) = self.base.shadow_levels(&levels, chain.is_periodic()) else {
            return Vec::new();
        };
        let (x0, _) = chain.entry(0);
        let c = x0.height;
        let k = chain.len();
        let periods = if chain.is_periodic() { 4 } else { 1 };
        let mut knots = Vec::with_capacity(k * periods + 1);
        for m in 0..periods {
            for i in 0..k {
                let (xi, _) = chain.entry(i as i64);
                let s = chain.accumulated(i as i64 + (m * k) as i64);
                let h = (start[i] + (m * n_levels) as i64) as f64 * r + xi.height - c;
                knots.push((s, h));
            }
        }
        if !chain.is_periodic() {
            let (xl, tl) = chain.entry(k as i64 - 1);
            knots.push((chain.accumulated(k as i64), start[k - 1] as f64 * r + xl.height + tl - c));
        } else {
            let s = chain.accumulated((periods * k) as i64);
            knots.push((s, (periods * n_levels) as f64 * r));
        }
        knots[0] = (0.0, 0.0);
        match Reparametrization::from_knots(knots) {
            Ok(h) => vec![(SuspensionPoint::new(z, c), h)],
            Err(_) => Vec::new(),
        }
    }

    fn analytic_sections(&self, alpha: f64) -> Option<AnalyticSections<Self::Point>> {
        let rmin = self.roof.r_min();
        let rmax = self.roof.r_max();
        // levels at fractions k/m of the roof; spacing strictly below alpha
        let m = ((rmax / alpha).floor() as usize + 1).max(1);
        let cells = self.base.partition_size(alpha);
        let spacing_min = rmin / m as f64;
        let mut sections = Vec::with_capacity(m * cells);
        for level in 0..m {
            let frac = level as f64 / m as f64;
            for cell in 0..cells {
                let me = self.clone_handle();
                let me2 = self.clone_handle();
                let phase = move |p: &SuspensionPoint<B::Point>| {
                    let u = me.fraction(p) * m as f64;
                    let d = u - level as f64;
                    let w = d - (d / m as f64).round() * m as f64;
                    w / m as f64
                };
                let domain = move |p: &SuspensionPoint<B::Point>| me2.base.cell_of(&p.base, alpha) == cell;
                sections.push(CrossSection::level(
                    format!("cell{cell}@{frac:.3}"),
                    spacing_min / 2.0,
                    phase,
                    domain,
                ));
            }
        }
        Some(AnalyticSections {
            sections,
            time_scale: spacing_min / 2.0,
            min_return: spacing_min,
            max_return: rmax / m as f64,
        })
    }

    fn tol(&self) -> f64 {
        1e-9
    }

    fn name(&self) -> String {
        format!("suspension({}, {})", self.base.name(), self.roof.label())
    }
}

impl<B: SuspensionBase> SuspensionFlow<B> {
    fn clone_handle(&self) -> Arc<SuspensionFlow<B>> {
        Arc::new(self.clone())
    }
}

/// A nonnegative speed on `X_r` whose zeros are the declared singularities.
#[derive(Clone)]
pub struct SpeedProfile<P> {
    eval: Arc<dyn Fn(&SuspensionPoint<P>) -> f64 + Send + Sync>,
    unit_fiber: Arc<dyn Fn(&P) -> bool + Send + Sync>,
    zero_set: Vec<SuspensionPoint<P>>,
    label: String,
}

impl<P> Debug for SpeedProfile<P> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpeedProfile").field("label", &self.label).finish()
    }
}

impl<P: Clone> SpeedProfile<P> {
    /// `unit_fiber(x)` must hold only when the speed is identically 1 on the fiber over `x`.
    pub fn new(
        label: impl Into<String>,
        zero_set: Vec<SuspensionPoint<P>>,
        eval: impl Fn(&SuspensionPoint<P>) -> f64 + Send + Sync + 'static,
        unit_fiber: impl Fn(&P) -> bool + Send + Sync + 'static,
    ) -> Self {
        SpeedProfile {
            eval: Arc::new(eval),
            unit_fiber: Arc::new(unit_fiber),
            zero_set,
            label: label.into(),
        }
    }

    pub fn constant(c: f64) -> Self {
        SpeedProfile::new(format!("const({c})"), Vec::new(), move |_| c, move |_| c == 1.0)
    }

    pub fn at(&self, p: &SuspensionPoint<P>) -> f64 {
        self.eval.as_ref()(p)
    }

    pub fn zero_set(&self) -> &[SuspensionPoint<P>] {
        &self.zero_set
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Suspension flow slowed down by a speed profile: trajectories are those of
/// the regular suspension, traversed with `ds/dt = speed`.
#[derive(Debug, Clone)]
pub struct SingularSuspension<B: SuspensionBase> {
    inner: SuspensionFlow<B>,
    speed: SpeedProfile<B::Point>,
    /// Height step of the composite Simpson quadrature of `1/speed`.
    quad_step: f64,
}

/// Builds the singular suspension; the speed must be nonnegative on the net
/// samples checked here and the zero set finite.
pub fn singular_suspend<B: SuspensionBase>(
    base: B,
    roof: RoofFunction<B::Point>,
    speed: SpeedProfile<B::Point>,
) -> Result<SingularSuspension<B>> {
    let inner = suspend_flow(base, roof)?;
    for p in inner.net(1.0) {
        let v = speed.at(&p);
        if !(v >= 0.0) {
            return Err(Error::domain(format!("speed {v} is negative at a sample")));
        }
    }
    for z in speed.zero_set() {
        if speed.at(z) != 0.0 {
            return Err(Error::domain("declared zero of the speed profile is not a zero"));
        }
    }
    Ok(SingularSuspension {
        inner,
        speed,
        quad_step: 1e-3,
    })
}

impl<B: SuspensionBase> SingularSuspension<B> {
    pub fn with_quad_step(mut self, h: f64) -> Self {
        self.quad_step = h;
        self
    }

    pub fn regular(&self) -> &SuspensionFlow<B> {
        &self.inner
    }

    pub fn speed(&self) -> &SpeedProfile<B::Point> {
        &self.speed
    }

    fn inv_speed(&self, x: &B::Point, s: f64) -> f64 {
        let v = self.speed.at(&SuspensionPoint::new(x.clone(), s));
        if v <= 0.0 {
            f64::INFINITY
        } else {
            1.0 / v
        }
    }

    /// `∫_a^b ds / speed` along the fiber over `x` (`a ≤ b`).
    fn transit(&self, x: &B::Point, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let n = ((b - a) / self.quad_step).ceil().max(1.0) as usize;
        let h = (b - a) / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let lo = a + i as f64 * h;
            acc += self.simpson(x, lo, lo + h);
            if !acc.is_finite() {
                return f64::INFINITY;
            }
        }
        acc
    }

    fn simpson(&self, x: &B::Point, lo: f64, hi: f64) -> f64 {
        let m = 0.5 * (lo + hi);
        (hi - lo) / 6.0 * (self.inv_speed(x, lo) + 4.0 * self.inv_speed(x, m) + self.inv_speed(x, hi))
    }

    /// Height reached from `a` after time `t` moving up, staying below `top`.
    fn advance_up(&self, x: &B::Point, a: f64, top: f64, t: f64) -> f64 {
        let mut s = a;
        let mut left = t;
        while s < top {
            let hi = (s + self.quad_step).min(top);
            let dt = self.simpson(x, s, hi);
            if dt.is_finite() && dt <= left {
                left -= dt;
                s = hi;
                continue;
            }
            // solve inside [s, hi]
            let (mut lo_b, mut hi_b) = (s, hi);
            for _ in 0..80 {
                let mid = 0.5 * (lo_b + hi_b);
                let tm = self.simpson(x, s, mid);
                if tm.is_finite() && tm <= left {
                    lo_b = mid;
                } else {
                    hi_b = mid;
                }
            }
            return lo_b;
        }
        top
    }

    fn advance_down(&self, x: &B::Point, a: f64, t: f64) -> f64 {
        let mut s = a;
        let mut left = t;
        while s > 0.0 {
            let lo = (s - self.quad_step).max(0.0);
            let dt = self.simpson(x, lo, s);
            if dt.is_finite() && dt <= left {
                left -= dt;
                s = lo;
                continue;
            }
            let (mut lo_b, mut hi_b) = (lo, s);
            for _ in 0..80 {
                let mid = 0.5 * (lo_b + hi_b);
                let tm = self.simpson(x, mid, s);
                if tm.is_finite() && tm <= left {
                    hi_b = mid;
                } else {
                    lo_b = mid;
                }
            }
            return hi_b;
        }
        0.0
    }

    fn is_singular(&self, p: &SuspensionPoint<B::Point>) -> bool {
        self.speed.zero_set().iter().any(|z| self.inner.metric(z, p) < 1e-12)
    }
}

impl<B: SuspensionBase> FlowSystem for SingularSuspension<B> {
    type Point = SuspensionPoint<B::Point>;

    fn evaluate(&self, p: &Self::Point, t: f64) -> Self::Point {
        if t == 0.0 || self.is_singular(p) {
            return p.clone();
        }
        let base = self.inner.base();
        let roof = self.inner.roof();
        let mut x = p.base.clone();
        let mut s = p.height;
        let mut left = t.abs();
        let mut guard = 0usize;
        if t > 0.0 {
            loop {
                guard += 1;
                if guard > 1_000_000 {
                    break;
                }
                let r = roof.at(&x);
                if (self.speed.unit_fiber.as_ref())(&x) {
                    let rest = r - s;
                    if left < rest - HEIGHT_WRAP_TOL {
                        s += left;
                        break;
                    }
                    left -= rest;
                    x = base.forward(&x);
                    s = 0.0;
                    continue;
                }
                let rest = self.transit(&x, s, r);
                if left < rest {
                    s = self.advance_up(&x, s, r, left);
                    if s >= r - HEIGHT_WRAP_TOL {
                        x = base.forward(&x);
                        s = 0.0;
                    }
                    break;
                }
                left -= rest;
                x = base.forward(&x);
                s = 0.0;
            }
        } else {
            loop {
                guard += 1;
                if guard > 1_000_000 {
                    break;
                }
                if (self.speed.unit_fiber.as_ref())(&x) {
                    if left <= s {
                        s -= left;
                        break;
                    }
                    left -= s;
                    x = base.backward(&x);
                    s = roof.at(&x);
                    continue;
                }
                let rest = self.transit(&x, 0.0, s);
                if left <= rest {
                    s = self.advance_down(&x, s, left);
                    break;
                }
                left -= rest;
                x = base.backward(&x);
                s = roof.at(&x);
            }
            let r = roof.at(&x);
            if s >= r - HEIGHT_WRAP_TOL {
                x = base.forward(&x);
                s = 0.0;
            }
        }
        SuspensionPoint::new(x, s)
    }

    fn dist(&self, a: &Self::Point, b: &Self::Point) -> f64 {
        self.inner.metric(a, b)
    }

    fn features(&self, p: &Self::Point) -> Option<Vec<f64>> {
        Some(self.inner.features(p))
    }

    fn feature_dist(&self, a: &[f64], b: &[f64]) -> f64 {
        SuspensionFlow::<B>::feature_dist(a, b)
    }

    fn net(&self, eps: f64) -> Vec<Self::Point> {
        self.inner.net(eps)
    }

    fn net_near(&self, center: &Self::Point, radius: f64, eps: f64) -> Vec<Self::Point> {
        self.inner.net_near(center, radius, eps)
    }

    fn spanning_set(&self, eps: f64, t: f64) -> Vec<Self::Point> {
        self.inner.spanning_set(eps, t)
    }

    fn perturb(&self, p: &Self::Point, radius: f64, rng: &mut dyn RngCore) -> Self::Point {
        self.inner.perturb(p, radius, rng)
    }

    fn return_candidates(&self, p: &Self::Point, eta: f64, horizon: f64) -> Vec<(Self::Point, f64)> {
        self.inner.return_candidates(p, eta, horizon)
    }

    fn shadow_candidates(&self, chain: &PseudoOrbit<Self::Point>) -> Vec<(Self::Point, Reparametrization)> {
        // Away from the slowed fibers the two flows coincide.
        self.inner.shadow_candidates(chain)
    }

    fn analytic_sections(&self, alpha: f64) -> Option<AnalyticSections<Self::Point>> {
        self.inner.analytic_sections(alpha)
    }

    fn declared_singularities(&self) -> Vec<Self::Point> {
        self.speed.zero_set().to_vec()
    }

    fn tol(&self) -> f64 {
        1e-7
    }

    fn name(&self) -> String {
        format!(
            "singular-suspension({}, {}, {})",
            self.inner.base().name(),
            self.inner.roof().label(),
            self.speed.label()
        )
    }
}

/// `log(alphabet_size) / c` for the suspension of a full shift under the
/// constant roof `c`.
pub fn suspension_entropy_reference<P>(alphabet_size: u32, roof: &RoofFunction<P>) -> Result<f64> {
    let Some(c) = roof.constant_value() else {
        return Err(Error::Unsupported("entropy reference needs a constant roof".into()));
    };
    if alphabet_size == 0 {
        return Err(Error::domain("alphabet size must be positive"));
    }
    Ok(f64::from(alphabet_size).ln() / c)
}

/// Random suspension point above a base point, used by property tests.
pub fn random_height<P>(roof: &RoofFunction<P>, base: &P, rng: &mut dyn RngCore) -> f64 {
    rng.gen::<f64>() * roof.at(base) * (1.0 - 1e-6)
}
