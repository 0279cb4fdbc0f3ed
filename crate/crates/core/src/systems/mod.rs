//! Concrete systems: symbolic shifts, the cat map, its blow-up along a disc,
//! and their suspensions, plus a registry addressing them by name.

mod shift;
mod torus;

use std::fmt;
use std::str::FromStr;

pub use shift::{ShiftMap, EMBED_RADIUS, SHIFT_TAIL_TOL};
pub use torus::{
    cat_backward, cat_finite_shadow, cat_forward, cat_periodic_shadow, eigenvectors, from_fixed, to_fixed, torus_dist,
    BlownUpCat, BlownUpPoint, CatMap, TorusPoint, LAMBDA_U, PHI,
};

use crate::error::{Error, Result};
use crate::specification::Homeomorphism;
use crate::suspension::{singular_suspend, suspend_flow, RoofFunction, SingularSuspension, SpeedProfile, SuspensionFlow, SuspensionPoint};

/// The cat map `[[2, 1], [1, 1]]` mod 1.
pub fn cat_map(p: &TorusPoint) -> TorusPoint {
    cat_forward(p)
}

/// The blown-up cat map with default disc and collar.
pub fn blown_up_map(p: &BlownUpPoint) -> Result<BlownUpPoint> {
    let f = BlownUpCat::default();
    let z = p.to_torus(&f)?;
    Ok(BlownUpPoint::from_torus(&f.forward(&z), &f))
}

/// Base maps known to the registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseName {
    FullShift,
    GoldenMean,
    Cat,
    BlownUp,
}

impl BaseName {
    pub const ALL: [BaseName; 4] = [BaseName::FullShift, BaseName::GoldenMean, BaseName::Cat, BaseName::BlownUp];

    pub fn as_str(&self) -> &'static str {
        match self {
            BaseName::FullShift => "full-2-shift",
            BaseName::GoldenMean => "golden-mean-sft",
            BaseName::Cat => "cat-map",
            BaseName::BlownUp => "blown-up-cat-map",
        }
    }
}

impl FromStr for BaseName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BaseName::ALL
            .into_iter()
            .find(|b| b.as_str() == s.trim())
            .ok_or_else(|| Error::domain(format!("unknown base map '{s}'")))
    }
}

/// Roof choices: `unit`, `const(c)`, or `wave(a)` = `1 + a·g(x)` with `|g| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RoofSpec {
    Unit,
    Const(f64),
    Wave(f64),
}

/// Speed choices for singular suspensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpeedSpec {
    Unit,
    Const(f64),
    /// Quadratic vanishing at the disc center, mid-height; 1 off the disc.
    DiscCenter,
}

/// A parsed fixture name.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixtureSpec {
    Map(BaseName),
    Suspension(BaseName, RoofSpec),
    Singular(BaseName, RoofSpec, SpeedSpec),
}

fn call(s: &str) -> Option<(&str, Vec<&str>)> {
    let s = s.trim();
    let open = s.find('(')?;
    if !s.ends_with(')') {
        return None;
    }
    let head = s[..open].trim();
    let inner = &s[open + 1..s.len() - 1];
    let mut args = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                args.push(inner[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    args.push(inner[start..].trim());
    Some((head, args))
}

fn number(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::domain(format!("'{s}' is not a number")))
}

impl FromStr for RoofSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "unit" {
            return Ok(RoofSpec::Unit);
        }
        match call(s) {
            Some(("const", a)) if a.len() == 1 => Ok(RoofSpec::Const(number(a[0])?)),
            Some(("wave", a)) if a.len() == 1 => Ok(RoofSpec::Wave(number(a[0])?)),
            _ => Err(Error::domain(format!("unknown roof '{s}' (unit, const(c), wave(a))"))),
        }
    }
}

impl FromStr for SpeedSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "unit" => return Ok(SpeedSpec::Unit),
            "disc-center" => return Ok(SpeedSpec::DiscCenter),
            _ => {}
        }
        match call(s) {
            Some(("const", a)) if a.len() == 1 => Ok(SpeedSpec::Const(number(a[0])?)),
            _ => Err(Error::domain(format!("unknown speed '{s}' (unit, const(c), disc-center)"))),
        }
    }
}

impl FromStr for FixtureSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "suspended-full-shift" => return Ok(FixtureSpec::Suspension(BaseName::FullShift, RoofSpec::Unit)),
            "suspended-cat-map" => return Ok(FixtureSpec::Suspension(BaseName::Cat, RoofSpec::Unit)),
            "suspended-blown-up" => return Ok(FixtureSpec::Suspension(BaseName::BlownUp, RoofSpec::Unit)),
            "singular-blown-up" => {
                return Ok(FixtureSpec::Singular(BaseName::BlownUp, RoofSpec::Unit, SpeedSpec::DiscCenter))
            }
            _ => {}
        }
        if let Ok(b) = s.parse::<BaseName>() {
            return Ok(FixtureSpec::Map(b));
        }
        match call(s) {
            Some(("suspension", a)) if a.len() == 2 => Ok(FixtureSpec::Suspension(a[0].parse()?, a[1].parse()?)),
            Some(("singular-suspension", a)) if a.len() == 3 => {
                Ok(FixtureSpec::Singular(a[0].parse()?, a[1].parse()?, a[2].parse()?))
            }
            _ => Err(Error::domain(format!("unknown fixture '{s}'"))),
        }
    }
}

impl fmt::Display for RoofSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RoofSpec::Unit => write!(f, "unit"),
            RoofSpec::Const(c) => write!(f, "const({c})"),
            RoofSpec::Wave(a) => write!(f, "wave({a})"),
        }
    }
}

impl fmt::Display for SpeedSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpeedSpec::Unit => write!(f, "unit"),
            SpeedSpec::Const(c) => write!(f, "const({c})"),
            SpeedSpec::DiscCenter => write!(f, "disc-center"),
        }
    }
}

impl fmt::Display for FixtureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixtureSpec::Map(b) => write!(f, "{}", b.as_str()),
            FixtureSpec::Suspension(b, r) => write!(f, "suspension({}, {r})", b.as_str()),
            FixtureSpec::Singular(b, r, v) => write!(f, "singular-suspension({}, {r}, {v})", b.as_str()),
        }
    }
}

/// Base-specific roof and speed construction.
pub trait FixtureBase: crate::suspension::SuspensionBase {
    /// `g` with `|g| ≤ 1` used by `wave(a)` roofs.
    fn wave(p: &Self::Point) -> f64;

    fn disc_center_speed(&self, roof: &RoofFunction<Self::Point>) -> Result<SpeedProfile<Self::Point>>;
}

impl FixtureBase for ShiftMap {
    fn wave(p: &crate::symbolic::SymbolSequence) -> f64 {
        2.0 * f64::from(p.symbol(0)) / f64::from((p.alphabet().max(2) - 1) as u8) - 1.0
    }

    fn disc_center_speed(&self, _roof: &RoofFunction<crate::symbolic::SymbolSequence>) -> Result<SpeedProfile<crate::symbolic::SymbolSequence>> {
        Err(Error::domain("disc-center speed needs a torus base"))
    }
}

fn torus_wave(p: &TorusPoint) -> f64 {
    let (x, _) = p.coords();
    (2.0 * std::f64::consts::PI * x).sin()
}

fn disc_speed(disc: f64, roof: &RoofFunction<TorusPoint>) -> SpeedProfile<TorusPoint> {
    let r2 = disc * disc;
    let roof_c = roof.clone();
    let roof_z = roof.at(&TorusPoint::origin());
    let eval = move |p: &SuspensionPoint<TorusPoint>| {
        let rho = p.base.norm_lift();
        if rho >= disc {
            return 1.0;
        }
        let u = p.height / roof_c.at(&p.base);
        let du = (u - 0.5).abs();
        let du = du.min(1.0 - du);
        ((rho * rho + du * du) / r2).min(1.0)
    };
    SpeedProfile::new(
        "disc-center",
        vec![SuspensionPoint::new(TorusPoint::origin(), 0.5 * roof_z)],
        eval,
        move |b: &TorusPoint| b.norm_lift() >= disc,
    )
}

impl FixtureBase for CatMap {
    fn wave(p: &TorusPoint) -> f64 {
        torus_wave(p)
    }

    fn disc_center_speed(&self, roof: &RoofFunction<TorusPoint>) -> Result<SpeedProfile<TorusPoint>> {
        Ok(disc_speed(BlownUpCat::default().disc_radius, roof))
    }
}

impl FixtureBase for BlownUpCat {
    fn wave(p: &TorusPoint) -> f64 {
        torus_wave(p)
    }

    fn disc_center_speed(&self, roof: &RoofFunction<TorusPoint>) -> Result<SpeedProfile<TorusPoint>> {
        Ok(disc_speed(self.disc_radius, roof))
    }
}

pub fn make_roof<B: FixtureBase>(spec: RoofSpec) -> Result<RoofFunction<B::Point>> {
    Ok(match spec {
        RoofSpec::Unit => RoofFunction::unit(),
        RoofSpec::Const(c) => {
            if !(c > 0.0) {
                return Err(Error::domain(format!("roof constant {c} must be positive")));
            }
            RoofFunction::constant(c)
        }
        RoofSpec::Wave(a) => {
            if !(0.0..1.0).contains(&a) {
                return Err(Error::domain(format!("wave amplitude {a} must lie in [0, 1)")));
            }
            RoofFunction::new(format!("wave({a})"), 1.0 - a, 1.0 + a, move |p| 1.0 + a * B::wave(p))
        }
    })
}

pub fn make_speed<B: FixtureBase>(base: &B, roof: &RoofFunction<B::Point>, spec: SpeedSpec) -> Result<SpeedProfile<B::Point>> {
    Ok(match spec {
        SpeedSpec::Unit => SpeedProfile::constant(1.0),
        SpeedSpec::Const(c) => {
            if !(c > 0.0) {
                return Err(Error::domain(format!("speed constant {c} must be positive")));
            }
            SpeedProfile::constant(c)
        }
        SpeedSpec::DiscCenter => base.disc_center_speed(roof)?,
    })
}

/// Any base map of the registry.
#[derive(Debug, Clone)]
pub enum AnyMap {
    Shift(ShiftMap),
    Cat(CatMap),
    BlownUp(BlownUpCat),
}

/// Any flow of the registry.
#[derive(Debug, Clone)]
pub enum AnyFlow {
    Shift(SuspensionFlow<ShiftMap>),
    Cat(SuspensionFlow<CatMap>),
    BlownUp(SuspensionFlow<BlownUpCat>),
    SingularShift(SingularSuspension<ShiftMap>),
    SingularCat(SingularSuspension<CatMap>),
    SingularBlownUp(SingularSuspension<BlownUpCat>),
}

/// Runs `$body` with `$f` bound to the concrete flow inside an [`AnyFlow`].
#[macro_export]
macro_rules! with_flow {
    ($flow:expr, $f:ident => $body:expr) => {
        match $flow {
            $crate::systems::AnyFlow::Shift($f) => $body,
            $crate::systems::AnyFlow::Cat($f) => $body,
            $crate::systems::AnyFlow::BlownUp($f) => $body,
            $crate::systems::AnyFlow::SingularShift($f) => $body,
            $crate::systems::AnyFlow::SingularCat($f) => $body,
            $crate::systems::AnyFlow::SingularBlownUp($f) => $body,
        }
    };
}

/// Runs `$body` with `$f` bound to the concrete map inside an [`AnyMap`].
#[macro_export]
macro_rules! with_map {
    ($map:expr, $f:ident => $body:expr) => {
        match $map {
            $crate::systems::AnyMap::Shift($f) => $body,
            $crate::systems::AnyMap::Cat($f) => $body,
            $crate::systems::AnyMap::BlownUp($f) => $body,
        }
    };
}

/// A system from the registry.
#[derive(Debug, Clone)]
pub enum Fixture {
    Map(AnyMap),
    Flow(AnyFlow),
}

fn base_map(b: BaseName) -> Result<AnyMap> {
    Ok(match b {
        BaseName::FullShift => AnyMap::Shift(ShiftMap::full(2)?),
        BaseName::GoldenMean => AnyMap::Shift(ShiftMap::golden_mean()),
        BaseName::Cat => AnyMap::Cat(CatMap),
        BaseName::BlownUp => AnyMap::BlownUp(BlownUpCat::default()),
    })
}

fn suspend<B: FixtureBase>(base: B, roof: RoofSpec) -> Result<SuspensionFlow<B>> {
    suspend_flow(base, make_roof::<B>(roof)?)
}

fn singular<B: FixtureBase>(base: B, roof: RoofSpec, speed: SpeedSpec) -> Result<SingularSuspension<B>> {
    let r = make_roof::<B>(roof)?;
    let v = make_speed(&base, &r, speed)?;
    singular_suspend(base, r, v)
}

/// Assembles the system for a parsed fixture name.
pub fn build(spec: FixtureSpec) -> Result<Fixture> {
    Ok(match spec {
        FixtureSpec::Map(b) => Fixture::Map(base_map(b)?),
        FixtureSpec::Suspension(b, r) => Fixture::Flow(match base_map(b)? {
            AnyMap::Shift(m) => AnyFlow::Shift(suspend(m, r)?),
            AnyMap::Cat(m) => AnyFlow::Cat(suspend(m, r)?),
            AnyMap::BlownUp(m) => AnyFlow::BlownUp(suspend(m, r)?),
        }),
        FixtureSpec::Singular(b, r, v) => Fixture::Flow(match base_map(b)? {
            AnyMap::Shift(m) => AnyFlow::SingularShift(singular(m, r, v)?),
            AnyMap::Cat(m) => AnyFlow::SingularCat(singular(m, r, v)?),
            AnyMap::BlownUp(m) => AnyFlow::SingularBlownUp(singular(m, r, v)?),
        }),
    })
}

/// Parses and assembles a fixture; unknown names are domain errors.
pub fn fixture(name: &str) -> Result<Fixture> {
    build(name.parse()?)
}

/// Parses a fixture name that must denote a flow.
pub fn flow_fixture(name: &str) -> Result<AnyFlow> {
    match fixture(name)? {
        Fixture::Flow(f) => Ok(f),
        Fixture::Map(_) => Err(Error::domain(format!("'{name}' is a map, not a flow; wrap it in suspension(..)"))),
    }
}

/// Registry entry for listings.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct FixtureInfo {
    pub name: &'static str,
    pub kind: &'static str,
    pub params: &'static str,
}

pub fn registry() -> Vec<FixtureInfo> {
    vec![
        FixtureInfo {
            name: "full-2-shift",
            kind: "map",
            params: "shift on {0,1}^Z; metric sum 2^-|i| |s_i - t_i|",
        },
        FixtureInfo {
            name: "golden-mean-sft",
            kind: "map",
            params: "shift on {0,1}^Z with the word 11 forbidden",
        },
        FixtureInfo {
            name: "cat-map",
            kind: "map",
            params: "[[2,1],[1,1]] mod 1 on the torus, exact 128-bit coordinates",
        },
        FixtureInfo {
            name: "blown-up-cat-map",
            kind: "map",
            params: "cat map, identity on the disc of radius 0.1 about 0, log collar out to radius 0.3",
        },
        FixtureInfo {
            name: "suspension(base, roof)",
            kind: "flow",
            params: "base: any map above; roof: unit | const(c) | wave(a), a in [0,1)",
        },
        FixtureInfo {
            name: "singular-suspension(base, roof, speed)",
            kind: "flow",
            params: "speed: unit | const(c) | disc-center (torus bases; zero at disc center, mid-height)",
        },
        FixtureInfo {
            name: "suspended-full-shift",
            kind: "flow",
            params: "alias of suspension(full-2-shift, unit)",
        },
        FixtureInfo {
            name: "suspended-cat-map",
            kind: "flow",
            params: "alias of suspension(cat-map, unit)",
        },
        FixtureInfo {
            name: "suspended-blown-up",
            kind: "flow",
            params: "alias of suspension(blown-up-cat-map, unit)",
        },
        FixtureInfo {
            name: "singular-blown-up",
            kind: "flow",
            params: "alias of singular-suspension(blown-up-cat-map, unit, disc-center)",
        },
    ]
}
