//! The two-torus with exact dyadic coordinates, the cat map and its blow-up
//! along a disc.
//!
//! Coordinates are stored as `u128` fractions of one turn, so the cat map
//! `(x, y) ↦ (2x + y, x + y)` is exact wrapping integer arithmetic. This keeps
//! long hyperbolic orbits reproducible bit for bit.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, RngCore};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::specification::Homeomorphism;
use crate::suspension::SuspensionBase;

const TWO64: f64 = 18446744073709551616.0;

/// A point of `R²/Z²` with 128-bit fixed-point coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TorusPoint {
    pub x: u128,
    pub y: u128,
}

/// Fraction of a turn to fixed point.
pub fn to_fixed(v: f64) -> u128 {
    let f = v - v.floor();
    let hi = (f * TWO64).floor();
    let rem = f * TWO64 - hi;
    let lo = (rem * TWO64).floor();
    ((hi as u64 as u128) << 64) | (lo.clamp(0.0, TWO64 - 1.0) as u64 as u128)
}

pub fn from_fixed(v: u128) -> f64 {
    (v >> 64) as f64 / TWO64 + (v as u64) as f64 / (TWO64 * TWO64)
}

/// Signed fixed-point value in `[-1/2, 1/2)` to a float.
pub fn signed_to_f64(v: i128) -> f64 {
    let neg = v < 0;
    let m = v.unsigned_abs();
    let f = from_fixed(m);
    if neg {
        -f
    } else {
        f
    }
}

pub fn f64_to_signed(v: f64) -> i128 {
    if v < 0.0 {
        -(to_fixed(-v) as i128)
    } else {
        to_fixed(v) as i128
    }
}

impl TorusPoint {
    pub fn new(x: f64, y: f64) -> Self {
        TorusPoint {
            x: to_fixed(x),
            y: to_fixed(y),
        }
    }

    pub fn origin() -> Self {
        TorusPoint { x: 0, y: 0 }
    }

    pub fn coords(&self) -> (f64, f64) {
        (from_fixed(self.x), from_fixed(self.y))
    }

    /// Lift to `[-1/2, 1/2)²`.
    pub fn lift(&self) -> (f64, f64) {
        (signed_to_f64(self.x as i128), signed_to_f64(self.y as i128))
    }

    pub fn from_lift(x: f64, y: f64) -> Self {
        TorusPoint {
            x: f64_to_signed(x) as u128,
            y: f64_to_signed(y) as u128,
        }
    }

    /// Signed displacement `self - other` of the minimal lift.
    pub fn delta(&self, other: &TorusPoint) -> (f64, f64) {
        (
            signed_to_f64(self.x.wrapping_sub(other.x) as i128),
            signed_to_f64(self.y.wrapping_sub(other.y) as i128),
        )
    }

    pub fn translate(&self, dx: f64, dy: f64) -> TorusPoint {
        TorusPoint {
            x: self.x.wrapping_add(f64_to_signed(dx) as u128),
            y: self.y.wrapping_add(f64_to_signed(dy) as u128),
        }
    }

    pub fn norm_lift(&self) -> f64 {
        let (a, b) = self.lift();
        a.hypot(b)
    }
}

#[derive(Serialize, Deserialize)]
struct RawTorus {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    xf: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yf: Option<f64>,
}

impl Serialize for TorusPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (xf, yf) = self.coords();
        RawTorus {
            x: Some(format!("{:032x}", self.x)),
            y: Some(format!("{:032x}", self.y)),
            xf: Some(xf),
            yf: Some(yf),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TorusPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawTorus::deserialize(d)?;
        // exact hex coordinates win; bare floats are accepted for hand-written input
        let coord = |hex: &Option<String>, f: Option<f64>, name: &str| match (hex, f) {
            (Some(h), _) => u128::from_str_radix(h, 16).map_err(serde::de::Error::custom),
            (None, Some(v)) if v.is_finite() => Ok(to_fixed(v)),
            _ => Err(serde::de::Error::custom(format!("missing coordinate {name}"))),
        };
        Ok(TorusPoint {
            x: coord(&raw.x, raw.xf, "x")?,
            y: coord(&raw.y, raw.yf, "y")?,
        })
    }
}

/// Flat torus distance of the minimal lift.
pub fn torus_dist(a: &TorusPoint, b: &TorusPoint) -> f64 {
    let (dx, dy) = a.delta(b);
    dx.hypot(dy)
}

/// Exact `A = [[2, 1], [1, 1]]` mod 1.
#[inline]
pub fn cat_forward(p: &TorusPoint) -> TorusPoint {
    TorusPoint {
        x: p.x.wrapping_mul(2).wrapping_add(p.y),
        y: p.x.wrapping_add(p.y),
    }
}

/// Exact `A⁻¹ = [[1, -1], [-1, 2]]` mod 1.
#[inline]
pub fn cat_backward(p: &TorusPoint) -> TorusPoint {
    TorusPoint {
        x: p.x.wrapping_sub(p.y),
        y: p.y.wrapping_mul(2).wrapping_sub(p.x),
    }
}

/// Golden ratio.
pub const PHI: f64 = 1.618_033_988_749_895;

/// Unstable eigenvalue `φ²` of the cat map.
pub const LAMBDA_U: f64 = PHI * PHI;

/// Unit unstable and stable eigenvectors.
pub fn eigenvectors() -> ((f64, f64), (f64, f64)) {
    let n = (PHI * PHI + 1.0).sqrt();
    ((PHI / n, 1.0 / n), (-1.0 / n, PHI / n))
}

fn embed_torus(p: &TorusPoint, out: &mut [f64]) {
    let (x, y) = p.coords();
    let s = 1.0 / (2.0 * PI);
    out[0] = (2.0 * PI * x).cos() * s;
    out[1] = (2.0 * PI * x).sin() * s;
    out[2] = (2.0 * PI * y).cos() * s;
    out[3] = (2.0 * PI * y).sin() * s;
}

/// Grid of `n × n` points `(i/n, j/n)` covering the torus at mesh `1/n`.
fn grid_size(eps: f64) -> usize {
    // a square cell of side h has radius h / √2
    ((std::f64::consts::SQRT_2 / (2.0 * eps)).ceil() as usize).max(1)
}

fn torus_net(eps: f64) -> Vec<TorusPoint> {
    let n = grid_size(eps);
    let mut out = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            out.push(TorusPoint::new(i as f64 / n as f64, j as f64 / n as f64));
        }
    }
    out
}

fn torus_net_near(center: &TorusPoint, radius: f64, eps: f64) -> Vec<TorusPoint> {
    let n = grid_size(eps) as i64;
    let (cx, cy) = center.coords();
    let r = (radius * n as f64).ceil() as i64 + 1;
    let (ix, iy) = ((cx * n as f64).round() as i64, (cy * n as f64).round() as i64);
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            let i = (ix + a).rem_euclid(n);
            let j = (iy + b).rem_euclid(n);
            let q = TorusPoint::new(i as f64 / n as f64, j as f64 / n as f64);
            if torus_dist(center, &q) < radius && !out.contains(&q) {
                out.push(q);
            }
        }
    }
    out
}

/// Points `a e_u + b e_s` in the unit square with spacing `eps / λ^steps`
/// along the unstable direction and `eps` along the stable one: every orbit
/// segment of `steps` iterates stays near one of them.
fn cat_spanning(eps: f64, steps: usize) -> Vec<TorusPoint> {
    let (eu, es) = eigenvectors();
    let hu = eps / LAMBDA_U.powi(steps as i32);
    let hs = eps;
    let corners = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
    let pu: Vec<f64> = corners.iter().map(|c| c.0 * eu.0 + c.1 * eu.1).collect();
    let ps: Vec<f64> = corners.iter().map(|c| c.0 * es.0 + c.1 * es.1).collect();
    let (u0, u1) = (pu.iter().cloned().fold(f64::INFINITY, f64::min), pu.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let (s0, s1) = (ps.iter().cloned().fold(f64::INFINITY, f64::min), ps.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let mut out = Vec::new();
    let nu = ((u1 - u0) / hu).ceil() as usize;
    let ns = ((s1 - s0) / hs).ceil() as usize;
    for i in 0..=nu {
        let a = u0 + i as f64 * hu;
        for j in 0..=ns {
            let b = s0 + j as f64 * hs;
            let x = a * eu.0 + b * es.0;
            let y = a * eu.1 + b * es.1;
            if (-hs..1.0 + hs).contains(&x) && (-hs..1.0 + hs).contains(&y) {
                out.push(TorusPoint::new(x, y));
            }
        }
    }
    out
}

/// Points `x = p + τ e_u` with `|τ| < radius` whose `k`-th image lands within
/// `radius` of `p` along the stable direction, for `k = 1..=max_steps`.
///
/// With `c = A^{-k} p - p` lifted, the landing condition reads
/// `|⟨c - n, e_s⟩| < λ^k radius` and `τ = ⟨c - n, e_u⟩` for an integer vector `n`.
fn cat_return_candidates(p: &TorusPoint, radius: f64, max_steps: usize) -> Vec<(TorusPoint, usize)> {
    let (eu, es) = eigenvectors();
    let mut out = Vec::new();
    let mut back = *p;
    for k in 1..=max_steps.min(16) {
        back = cat_backward(&back);
        let (cx, cy) = back.delta(p);
        let reach = LAMBDA_U.powi(k as i32) * radius;
        let span = reach.ceil() as i64 + 1;
        for nx in -span..=span {
            // τ = (cx - nx) eu.0 + (cy - ny) eu.1 with eu.1 > 0; solve |τ| < radius for ny
            let base = (cx - nx as f64) * eu.0 + cy * eu.1;
            let lo = ((base - radius) / eu.1).ceil() as i64;
            let hi = ((base + radius) / eu.1).floor() as i64;
            for ny in lo..=hi {
                let (dx, dy) = (cx - nx as f64, cy - ny as f64);
                let tau = dx * eu.0 + dy * eu.1;
                let along = dx * es.0 + dy * es.1;
                if tau.abs() < radius && along.abs() < reach {
                    out.push((p.translate(tau * eu.0, tau * eu.1), k));
                }
            }
        }
    }
    out.sort_by(|a, b| a.1.cmp(&b.1));
    out.dedup();
    out
}

fn torus_perturb(p: &TorusPoint, radius: f64, rng: &mut dyn RngCore) -> TorusPoint {
    let r = radius * rng.gen::<f64>().sqrt() * 0.999;
    let th = 2.0 * PI * rng.gen::<f64>();
    p.translate(r * th.cos(), r * th.sin())
}

fn torus_cell(p: &TorusPoint, alpha: f64) -> usize {
    let k = torus_partition(alpha);
    let (x, y) = p.coords();
    let i = ((x * k as f64) as usize).min(k - 1);
    let j = ((y * k as f64) as usize).min(k - 1);
    i * k + j
}

/// Grid cells per side: cells of diameter at most `alpha`.
fn torus_partition(alpha: f64) -> usize {
    ((std::f64::consts::SQRT_2 / alpha).ceil() as usize).max(1)
}

fn big_pow(m: [[i64; 2]; 2], n: usize) -> [[BigInt; 2]; 2] {
    let mut r = [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]];
    let base = [
        [BigInt::from(m[0][0]), BigInt::from(m[0][1])],
        [BigInt::from(m[1][0]), BigInt::from(m[1][1])],
    ];
    for _ in 0..n {
        r = [
            [
                &r[0][0] * &base[0][0] + &r[0][1] * &base[1][0],
                &r[0][0] * &base[0][1] + &r[0][1] * &base[1][1],
            ],
            [
                &r[1][0] * &base[0][0] + &r[1][1] * &base[1][0],
                &r[1][0] * &base[0][1] + &r[1][1] * &base[1][1],
            ],
        ];
    }
    r
}

fn round_div(a: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(d);
    if (r.abs() * 2) >= d.abs() {
        q + 1
    } else {
        q
    }
}

fn wrap_signed(v: &BigInt) -> i128 {
    let m = BigInt::one() << 128;
    let r = v.mod_floor(&m);
    r.to_u128().unwrap_or(0) as i128
}

/// Jumps `w_{k+1} - A w_k` of a cat-map pseudo-orbit, exactly.
fn cat_jumps(levels: &[TorusPoint], periodic: bool) -> Vec<(i128, i128)> {
    let n = levels.len();
    let m = if periodic { n } else { n.saturating_sub(1) };
    (0..m)
        .map(|k| {
            let a = cat_forward(&levels[k]);
            let b = levels[(k + 1) % n];
            (b.x.wrapping_sub(a.x) as i128, b.y.wrapping_sub(a.y) as i128)
        })
        .collect()
}

/// Exact periodic shadow of a cat-map pseudo-orbit: the unique `z` with
/// `A^N z = z` and `z = w_0 + e_0` where `(A^N - I) e_0 = Σ A^{N-1-k} j_k`.
pub fn cat_periodic_shadow(levels: &[TorusPoint]) -> Option<TorusPoint> {
    let n = levels.len();
    if n == 0 {
        return None;
    }
    let jumps = cat_jumps(levels, true);
    let (mut sx, mut sy) = (BigInt::zero(), BigInt::zero());
    for &(jx, jy) in &jumps {
        let nx = &sx * 2 + &sy + BigInt::from(jx);
        let ny = &sx + &sy + BigInt::from(jy);
        sx = nx;
        sy = ny;
    }
    let mut a = big_pow([[2, 1], [1, 1]], n);
    a[0][0] -= 1;
    a[1][1] -= 1;
    let det = &a[0][0] * &a[1][1] - &a[0][1] * &a[1][0];
    if det.is_zero() {
        return None;
    }
    let ex = round_div(&(&a[1][1] * &sx - &a[0][1] * &sy), &det);
    let ey = round_div(&(&a[0][0] * &sy - &a[1][0] * &sx), &det);
    let w = levels[0];
    Some(TorusPoint {
        x: w.x.wrapping_add(wrap_signed(&ex) as u128),
        y: w.y.wrapping_add(wrap_signed(&ey) as u128),
    })
}

/// Bounded shadow of a finite cat-map pseudo-orbit: zero stable correction at
/// the start, zero unstable correction at the end.
pub fn cat_finite_shadow(levels: &[TorusPoint]) -> Option<TorusPoint> {
    let n = levels.len();
    if n == 0 {
        return None;
    }
    let jumps = cat_jumps(levels, false);
    let (eu, _) = eigenvectors();
    let mut eu0 = 0.0;
    let mut scale = 1.0;
    for &(jx, jy) in &jumps {
        scale /= LAMBDA_U;
        let ju = signed_to_f64(jx) * eu.0 + signed_to_f64(jy) * eu.1;
        eu0 += scale * ju;
    }
    Some(levels[0].translate(eu0 * eu.0, eu0 * eu.1))
}

/// The cat map as a base homeomorphism.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CatMap;

impl Homeomorphism for CatMap {
    type Point = TorusPoint;

    fn forward(&self, p: &TorusPoint) -> TorusPoint {
        cat_forward(p)
    }

    fn backward(&self, p: &TorusPoint) -> TorusPoint {
        cat_backward(p)
    }

    fn dist(&self, a: &TorusPoint, b: &TorusPoint) -> f64 {
        torus_dist(a, b)
    }

    fn name(&self) -> String {
        "cat-map".into()
    }

    fn tol(&self) -> f64 {
        1e-15
    }
}

impl SuspensionBase for CatMap {
    fn embed_dim(&self) -> usize {
        4
    }

    fn embed(&self, p: &TorusPoint, out: &mut [f64]) {
        embed_torus(p, out)
    }

    fn net_near(&self, center: &TorusPoint, radius: f64, eps: f64) -> Vec<TorusPoint> {
        torus_net_near(center, radius, eps)
    }

    fn net(&self, eps: f64) -> Vec<TorusPoint> {
        torus_net(eps)
    }

    fn spanning(&self, eps: f64, steps: usize) -> Vec<TorusPoint> {
        cat_spanning(eps, steps)
    }

    fn perturb(&self, p: &TorusPoint, radius: f64, rng: &mut dyn RngCore) -> TorusPoint {
        torus_perturb(p, radius, rng)
    }

    fn return_candidates(&self, p: &TorusPoint, radius: f64, max_steps: usize) -> Vec<(TorusPoint, usize)> {
        cat_return_candidates(p, radius, max_steps)
    }

    fn shadow_levels(&self, levels: &[TorusPoint], periodic: bool) -> Option<TorusPoint> {
        if periodic {
            cat_periodic_shadow(levels)
        } else {
            cat_finite_shadow(levels)
        }
    }

    fn partition_size(&self, alpha: f64) -> usize {
        let k = torus_partition(alpha);
        k * k
    }

    fn cell_of(&self, p: &TorusPoint, alpha: f64) -> usize {
        torus_cell(p, alpha)
    }

    fn embed_diameter(&self) -> f64 {
        4.0 / PI
    }
}

/// The cat map slowed to the identity on a disc: in the lift `ẑ ∈ [-1/2, 1/2)²`,
/// `f(z) = A^{λ(|ẑ|)} ẑ` with `λ = 0` on the disc, `λ = 1` outside the collar
/// and a logarithmic ramp in between. The ramp keeps `f` injective because the
/// collar's radius ratio exceeds the expansion `φ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlownUpCat {
    pub disc_radius: f64,
    pub collar_radius: f64,
}

impl Default for BlownUpCat {
    fn default() -> Self {
        BlownUpCat {
            disc_radius: 0.1,
            collar_radius: 0.3,
        }
    }
}

impl BlownUpCat {
    pub fn new(disc_radius: f64, collar_radius: f64) -> Result<Self> {
        if !(disc_radius > 0.0) || collar_radius / disc_radius <= LAMBDA_U || collar_radius >= 0.5 {
            return Err(Error::domain(format!(
                "collar ratio {collar_radius}/{disc_radius} must exceed {LAMBDA_U:.4} and the collar fit in the torus"
            )));
        }
        Ok(BlownUpCat {
            disc_radius,
            collar_radius,
        })
    }

    /// Exponent `λ(ρ)` of the local power of `A`.
    pub fn exponent(&self, rho: f64) -> f64 {
        if rho <= self.disc_radius {
            0.0
        } else if rho >= self.collar_radius {
            1.0
        } else {
            (rho / self.disc_radius).ln() / (self.collar_radius / self.disc_radius).ln()
        }
    }

    pub fn in_disc(&self, p: &TorusPoint) -> bool {
        p.norm_lift() <= self.disc_radius
    }

    pub fn in_collar(&self, p: &TorusPoint) -> bool {
        p.norm_lift() < self.collar_radius
    }

    /// `A^λ v` through the eigen-decomposition.
    fn power(lambda: f64, v: (f64, f64)) -> (f64, f64) {
        let (eu, es) = eigenvectors();
        let a = v.0 * eu.0 + v.1 * eu.1;
        let b = v.0 * es.0 + v.1 * es.1;
        let a = a * LAMBDA_U.powf(lambda);
        let b = b * LAMBDA_U.powf(-lambda);
        (a * eu.0 + b * es.0, a * eu.1 + b * es.1)
    }
}

impl Homeomorphism for BlownUpCat {
    type Point = TorusPoint;

    fn forward(&self, p: &TorusPoint) -> TorusPoint {
        let (x, y) = p.lift();
        let rho = x.hypot(y);
        if rho >= self.collar_radius {
            return cat_forward(p);
        }
        if rho <= self.disc_radius {
            return *p;
        }
        let (u, v) = Self::power(self.exponent(rho), (x, y));
        TorusPoint::from_lift(u, v)
    }

    fn backward(&self, w: &TorusPoint) -> TorusPoint {
        let z0 = cat_backward(w);
        if z0.norm_lift() >= self.collar_radius {
            return z0;
        }
        // the preimage lies in the collar ball; solve |A^{-λ(ρ)} ŵ| = ρ
        let (zx, zy) = z0.lift();
        let target = (2.0 * zx + zy, zx + zy);
        let g = |rho: f64| {
            let (a, b) = Self::power(-self.exponent(rho), target);
            a.hypot(b) - rho
        };
        let (mut lo, mut hi) = (0.0, self.collar_radius);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let rho = 0.5 * (lo + hi);
        if rho <= self.disc_radius {
            return *w;
        }
        let (a, b) = Self::power(-self.exponent(rho), target);
        TorusPoint::from_lift(a, b)
    }

    fn dist(&self, a: &TorusPoint, b: &TorusPoint) -> f64 {
        torus_dist(a, b)
    }

    fn name(&self) -> String {
        "blown-up-cat-map".into()
    }

    fn tol(&self) -> f64 {
        1e-12
    }
}

impl SuspensionBase for BlownUpCat {
    fn embed_dim(&self) -> usize {
        4
    }

    fn embed(&self, p: &TorusPoint, out: &mut [f64]) {
        embed_torus(p, out)
    }

    fn net_near(&self, center: &TorusPoint, radius: f64, eps: f64) -> Vec<TorusPoint> {
        torus_net_near(center, radius, eps)
    }

    fn net(&self, eps: f64) -> Vec<TorusPoint> {
        torus_net(eps)
    }

    fn spanning(&self, eps: f64, steps: usize) -> Vec<TorusPoint> {
        cat_spanning(eps, steps)
    }

    fn perturb(&self, p: &TorusPoint, radius: f64, rng: &mut dyn RngCore) -> TorusPoint {
        torus_perturb(p, radius, rng)
    }

    fn return_candidates(&self, p: &TorusPoint, radius: f64, max_steps: usize) -> Vec<(TorusPoint, usize)> {
        // exact for orbits that stay outside the collar; callers verify
        if self.in_collar(p) {
            Vec::new()
        } else {
            cat_return_candidates(p, radius, max_steps)
        }
    }

    fn shadow_levels(&self, levels: &[TorusPoint], periodic: bool) -> Option<TorusPoint> {
        // the linear solve is exact away from the collar; callers verify
        if levels.iter().all(|p| !self.in_disc(p)) {
            CatMap.shadow_levels(levels, periodic)
        } else {
            None
        }
    }

    fn partition_size(&self, alpha: f64) -> usize {
        let k = torus_partition(alpha);
        k * k
    }

    fn cell_of(&self, p: &TorusPoint, alpha: f64) -> usize {
        torus_cell(p, alpha)
    }

    fn embed_diameter(&self) -> f64 {
        4.0 / PI
    }
}

/// A point of the blown-up torus seen either in disc coordinates (radius as a
/// fraction of the disc radius, angle in radians) or as a torus point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "chart", rename_all = "snake_case")]
pub enum BlownUpPoint {
    Disc { radius: f64, angle: f64 },
    Torus(TorusPoint),
}

impl BlownUpPoint {
    pub fn to_torus(&self, map: &BlownUpCat) -> Result<TorusPoint> {
        match *self {
            BlownUpPoint::Disc { radius, angle } => {
                if !(0.0..=1.0).contains(&radius) {
                    return Err(Error::domain(format!("disc radius {radius} outside [0, 1]")));
                }
                let r = radius * map.disc_radius;
                Ok(TorusPoint::from_lift(r * angle.cos(), r * angle.sin()))
            }
            BlownUpPoint::Torus(p) => Ok(p),
        }
    }

    pub fn from_torus(p: &TorusPoint, map: &BlownUpCat) -> Self {
        if map.in_disc(p) {
            let (x, y) = p.lift();
            BlownUpPoint::Disc {
                radius: x.hypot(y) / map.disc_radius,
                angle: y.atan2(x),
            }
        } else {
            BlownUpPoint::Torus(*p)
        }
    }
}
