//! Command front end: plain-text configuration, command dispatch and the
//! exit-code contract (0 success, 2 configuration, 3 pipeline failure).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::entropy::{
    certify_positive_entropy, entropy_estimate_with, verify_certificate, CertifyConfig, EntropyCertificate,
    VerifyOptions, DEFAULT_SAMPLE_STEP,
};
use crate::error::{Error, Result};
use crate::expansivity::{expansive_check, sample_pairs, uniformly_expansive_check, ExpansivityScale};
use crate::flow::FlowSystem;
use crate::io::SCHEMA_VERSION;
use crate::sections::{build_family, code_system};
use crate::shadowing::{random_pseudo_orbit, search_shadow, PseudoOrbit};
use crate::specification::{spec_point_check, splice_candidates, splice_margin};
use crate::suspension::SuspensionBase;
use crate::symbolic::SymbolSequence;
use crate::systems::{self, AnyMap, Fixture};
use crate::with_flow;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

/// Keys accepted in a configuration.
pub const KEYS: &[&str] = &[
    "fixture",
    "seed",
    "workers",
    "out",
    "csv",
    "point",
    // entropy
    "eps_ladder",
    "t_ladder",
    "net_eps",
    "sample_step",
    // certify and shared scales
    "eps",
    "delta",
    "e",
    "chain_time",
    "eta",
    "witness_net",
    "witness_horizon",
    "dt",
    "n_max",
    "alpha_sep",
    "strong",
    "budget",
    "u_radius",
    "expansivity_net",
    "shadow_trials",
    "shadow_entries",
    "classify_tol",
    "exp_eps",
    "exp_delta",
    "exp_horizon",
    "exp_dt",
    "exp_resolution",
    // verify
    "certificate",
    "max_pairs",
    // shadow
    "chain",
    "entries",
    // code
    "alpha",
    "horizon",
    "points",
    // expansivity
    "pairs",
    // spec
    "gap",
    "trials",
    "pool",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Entropy,
    Certify,
    Verify,
    Shadow,
    Code,
    Expansivity,
    Spec,
    Fixtures,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Entropy,
        Command::Certify,
        Command::Verify,
        Command::Shadow,
        Command::Code,
        Command::Expansivity,
        Command::Spec,
        Command::Fixtures,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Entropy => "entropy",
            Command::Certify => "certify",
            Command::Verify => "verify",
            Command::Shadow => "shadow",
            Command::Code => "code",
            Command::Expansivity => "expansivity",
            Command::Spec => "spec",
            Command::Fixtures => "fixtures",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown command '{s}'")))
    }
}

/// Key-value run configuration. Later assignments override earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::Config(format!("unknown key '{key}'")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn assign(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got '{kv}'")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    /// Keys that can change results; output paths and the worker count cannot.
    pub fn effective(&self) -> BTreeMap<&str, &str> {
        self.values
            .iter()
            .filter(|(k, _)| !matches!(k.as_str(), "out" | "csv" | "workers"))
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect()
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Config(format!("cannot parse {key} = '{v}'"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// A positive finite real.
    pub fn scale(&self, key: &str, default: f64) -> Result<f64> {
        let v = self.get_or(key, default)?;
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Config(format!("{key} must be positive, got {v}")));
        }
        Ok(v)
    }

    /// Comma-separated positive reals.
    pub fn list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        let Some(raw) = self.raw(key) else {
            return Ok(default.to_vec());
        };
        let out = raw
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| *v > 0.0 && v.is_finite())
                    .ok_or_else(|| Error::Config(format!("{key}: '{}' is not a positive number", s.trim())))
            })
            .collect::<Result<Vec<f64>>>()?;
        if out.is_empty() {
            return Err(Error::Config(format!("{key} is empty")));
        }
        Ok(out)
    }

    pub fn fixture(&self) -> Result<String> {
        self.raw("fixture")
            .map(str::to_string)
            .ok_or_else(|| Error::Config("missing key 'fixture'".into()))
    }

    pub fn seed(&self) -> Result<u64> {
        self.get_or("seed", 0)
    }

    /// Worker threads; 0 means the available parallelism.
    pub fn workers(&self) -> Result<usize> {
        self.get_or("workers", 0)
    }

    fn json<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => serde_json::from_str(v)
                .map(Some)
                .map_err(|e| Error::Config(format!("{key}: {e}"))),
        }
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Artifacts {
    pub json: Option<String>,
    pub csv: Option<String>,
    /// One-line human summary.
    pub summary: String,
}

/// Exit status for an error: configuration problems give 2, everything else 3.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Io(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

/// Certification point and scales known to work on a fixture.
pub fn certify_preset(fixture: &str) -> Option<(Value, CertifyConfig)> {
    let canonical = match systems::flow_fixture(fixture) {
        Ok(f) => with_flow!(&f, f => f.name()),
        Err(_) => return None,
    };
    let mut cfg = CertifyConfig {
        eps: 0.15,
        delta: 0.08,
        e: 0.02,
        eta: 0.02,
        witness_net: 0.02,
        witness_horizon: 8.0,
        ..CertifyConfig::default()
    };
    let p = match canonical.as_str() {
        "suspension(cat-map, unit)" => {
            cfg.n_max = 8;
            json!({"base": {"xf": 0.1763, "yf": 0.2757}, "height": 0.5})
        }
        "suspension(blown-up-cat-map, unit)" | "singular-suspension(blown-up-cat-map, unit, disc-center)" => {
            cfg.n_max = 5;
            cfg.strong = true;
            cfg.shadow_entries = 3;
            json!({"base": {"xf": 0.4263, "yf": 0.4757}, "height": 0.5})
        }
        _ => return None,
    };
    Some((p, cfg))
}

/// Certification scales from the configuration over `base`.
pub fn certify_config(cfg: &RunConfig, base: CertifyConfig) -> Result<CertifyConfig> {
    let x = base.expansivity;
    let exp_eps = cfg.scale("exp_eps", x.eps)?;
    let exp_delta = cfg.scale("exp_delta", x.delta)?;
    let scale = ExpansivityScale::new(exp_eps, exp_delta, cfg.scale("exp_horizon", x.horizon)?)
        .map_err(|e| Error::Config(e.to_string()))?
        .with_dt(cfg.scale("exp_dt", x.dt)?)
        .with_resolution(cfg.scale("exp_resolution", x.resolution)?);
    let alpha_sep = match cfg.raw("alpha_sep") {
        Some(_) => Some(cfg.scale("alpha_sep", 1.0)?),
        None => base.alpha_sep,
    };
    let out = CertifyConfig {
        eps: cfg.scale("eps", base.eps)?,
        delta: cfg.scale("delta", base.delta)?,
        e: cfg.scale("e", base.e)?,
        chain_time: cfg.scale("chain_time", base.chain_time)?,
        eta: cfg.scale("eta", base.eta)?,
        witness_net: cfg.scale("witness_net", base.witness_net)?,
        witness_horizon: cfg.scale("witness_horizon", base.witness_horizon)?,
        dt: cfg.scale("dt", base.dt)?,
        n_max: cfg.get_or("n_max", base.n_max)?,
        alpha_sep,
        strong: cfg.get_or("strong", base.strong)?,
        budget: cfg.get_or("budget", base.budget)?,
        u_radius: cfg.scale("u_radius", base.u_radius)?,
        expansivity: scale,
        expansivity_net: cfg.scale("expansivity_net", base.expansivity_net)?,
        shadow_trials: cfg.get_or("shadow_trials", base.shadow_trials)?,
        shadow_entries: cfg.get_or("shadow_entries", base.shadow_entries)?,
        classify_tol: cfg.scale("classify_tol", base.classify_tol)?,
        seed: cfg.seed()?,
    };
    out.validate()?;
    Ok(out)
}

fn envelope(cmd: Command, cfg: &RunConfig, seed: u64, result: Value) -> Result<String> {
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": cmd.as_str(),
        "seed": seed,
        "config": cfg.effective(),
        "result": result,
    });
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// Prefixes CSV text with `# key=value` provenance lines.
fn tagged_csv(cfg: &RunConfig, seed: u64, body: &str) -> String {
    let mut out = format!("# seed={seed}\n");
    for (k, v) in cfg.effective() {
        if k != "seed" {
            out.push_str(&format!("# {k}={v}\n"));
        }
    }
    out.push_str(body);
    out
}

fn flow_point<F: FlowSystem>(_f: &F, cfg: &RunConfig, fallback: Option<Value>) -> Result<F::Point> {
    if let Some(p) = cfg.json::<F::Point>("point")? {
        return Ok(p);
    }
    let v = fallback.ok_or_else(|| Error::Config("missing key 'point' (JSON of a point)".into()))?;
    serde_json::from_value(v).map_err(|e| Error::Config(format!("point: {e}")))
}

/// Runs a command; no files are written.
pub fn run(cmd: Command, cfg: &RunConfig) -> Result<Artifacts> {
    let workers = cfg.workers()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    pool.install(|| dispatch(cmd, cfg))
}

fn dispatch(cmd: Command, cfg: &RunConfig) -> Result<Artifacts> {
    let seed = cfg.seed()?;
    match cmd {
        Command::Fixtures => fixtures(cfg, seed),
        Command::Entropy => entropy(cfg, seed),
        Command::Certify => certify(cfg, seed),
        Command::Verify => verify(cfg, seed),
        Command::Shadow => shadow(cfg, seed),
        Command::Code => code(cfg, seed),
        Command::Expansivity => expansivity(cfg, seed),
        Command::Spec => spec(cfg, seed),
    }
}

fn fixtures(cfg: &RunConfig, seed: u64) -> Result<Artifacts> {
    let reg = systems::registry();
    let mut summary = String::new();
    for r in &reg {
        summary.push_str(&format!("{:<40} {:<5} {}\n", r.name, r.kind, r.params));
    }
    Ok(Artifacts {
        json: Some(envelope(Command::Fixtures, cfg, seed, serde_json::to_value(&reg)?)?),
        csv: None,
        summary,
    })
}

fn entropy(cfg: &RunConfig, seed: u64) -> Result<Artifacts> {
    let f = systems::flow_fixture(&cfg.fixture()?)?;
    let eps = cfg.list("eps_ladder", &[0.5, 0.25])?;
    let ts = cfg.list("t_ladder", &[4.0, 5.0, 6.0])?;
    let net = cfg.scale("net_eps", 0.25)?;
    let step = cfg.scale("sample_step", DEFAULT_SAMPLE_STEP)?;
    let table = with_flow!(&f, f => entropy_estimate_with(f, &eps, &ts, net, step))?;
    let summary = format!(
        "headline {:.6} at eps {} between t = {:?}",
        table.headline, table.headline_eps, table.headline_times
    );
    Ok(Artifacts {
        json: Some(envelope(Command::Entropy, cfg, seed, serde_json::to_value(&table)?)?),
        csv: Some(tagged_csv(cfg, seed, &table.to_csv())),
        summary,
    })
}

fn certify(cfg: &RunConfig, seed: u64) -> Result<Artifacts> {
    let name = cfg.fixture()?;
    let f = systems::flow_fixture(&name)?;
    let (p0, base) = match certify_preset(&name) {
        Some((p, c)) => (Some(p), c),
        None => (None, CertifyConfig::default()),
    };
    let scales = certify_config(cfg, base)?;
    with_flow!(&f, f => {
        let p = flow_point(f, cfg, p0)?;
        let cert = certify_positive_entropy(f, &p, &scales)?;
        let summary = format!(
            "certified: {} families, bound {:.6} (time-changed {:.6}), t_n up to {}",
            cert.families.len(),
            cert.bound_flow,
            cert.bound_time_changed,
            cert.families.last().map_or(0.0, |x| x.t_n)
        );
        Ok(Artifacts {
            json: Some(envelope(Command::Certify, cfg, seed, serde_json::to_value(&cert)?)?),
            csv: Some(tagged_csv(cfg, seed, &cert.rates_csv())),
            summary,
        })
    })
}

/// The certificate inside a document: either bare or under `result`.
fn unwrap_result(doc: Value) -> Value {
    match doc {
        Value::Object(mut m) if m.contains_key("result") && !m.contains_key("families") => {
            m.remove("result").unwrap_or(Value::Null)
        }
        other => other,
    }
}

fn verify(cfg: &RunConfig, seed: u64) -> Result<Artifacts> {
    let path = cfg
        .raw("certificate")
        .ok_or_else(|| Error::Config("missing key 'certificate' (path)".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {path}: {e}")))?;
    let doc = unwrap_result(serde_json::from_str(&text).map_err(|e| Error::Config(format!("{path}: {e}")))?);
    let flow = doc
        .get("flow")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Config("certificate has no flow name".into()))?
        .to_string();
    let f = systems::flow_fixture(&flow)?;
    let opts = VerifyOptions {
        max_pairs: cfg.get_or("max_pairs", VerifyOptions::default().max_pairs)?,
        seed,
    };
    with_flow!(&f, f => {
        let cert = parse_certificate(f, doc)?;
        let report = verify_certificate(f, &cert, opts)?;
        Ok(Artifacts {
            summary: format!(
                "sound: {} families, {} shadows and {} pairs re-checked",
                report.families, report.shadows_checked, report.pairs_checked
            ),
            json: Some(envelope(Command::Verify, cfg, seed, serde_json::to_value(&report)?)?),
            csv: None,
        })
    })
}

fn parse_certificate<F: FlowSystem>(_f: &F, doc: Value) -> Result<EntropyCertificate<F::Point>> {
    serde_json::from_value(doc).map_err(|e| Error::Config(format!("malformed certificate: {e}")))
}

fn shadow(cfg: &RunConfig, seed: u64) -> Result<Artifacts> {
    let f = systems::flow_fixture(&cfg.fixture()?)?;
    let eps = cfg.scale("eps", 0.15)?;
    let strong = cfg.get_or("strong", false)?;
    let budget: usize = cfg.get_or("budget", 64)?;
    with_flow!(&f, f => {
        let chain: PseudoOrbit<_> = match cfg.raw("chain") {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::Config(format!("cannot read {path}: {e}")))?;
                serde_json::from_str(&text).map_err(|e| Error::Config(format!("{path}: {e}")))?
            }
            None => {
                let p = flow_point(f, cfg, default_point(f))?;
                let delta = cfg.scale("delta", 0.02)?;
                let t_min = cfg.scale("chain_time", 1.0)?;
                let entries: usize = cfg.get_or("entries", 3)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                random_pseudo_orbit(f, &p, delta, t_min, entries, &mut rng)?
            }
        };
        let mut w = search_shadow(&chain, eps, f, strong, budget)
            .ok_or_else(|| Error::stage("shadowing", format!("no {eps}-shadow within {budget} candidates")))?;
        w.seed = Some(seed);
        Ok(Artifacts {
            summary: format!("shadowed within {:.3e} (strong = {})", w.residual, w.strong),
            json: Some(envelope(
                Command::Shadow,
                cfg,
                seed,
                json!({"chain": serde_json::to_value(&chain)?, "witness": serde_json::to_value(&w)?}),
            )?),
            csv: None,
        })
    })
}

/// First net point of the flow, used when no point is configured.
fn default_point<F: FlowSystem>(f: &F) -> Option<Value> {
    f.net(0.5).into_iter().next().and_then(|p| serde_json::to_value(p).ok())
}

fn code(cfg: &RunConfig, seed: u64) -> Result<Artifacts> {
    let f = systems::flow_fixture(&cfg.fixture()?)?;
    let alpha = cfg.scale("alpha", 0.5)?;
    let net = cfg.scale("net_eps", 0.25)?;
    let horizon = cfg.scale("horizon", 8.0)?;
    let eps = cfg.scale("eps", 0.25)?;
    let count: usize = cfg.get_or("points", 32)?;
    with_flow!(&f, f => {
        let fam = build_family(f, alpha, net)?;
        let pool = f.net(net);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ys: Vec<_> = sample(&mut rng, pool.len(), count.min(pool.len()))
            .into_iter()
            .map(|i| pool[i].clone())
            .collect();
        let coded = code_system(&fam, f, &ys, horizon, eps)?;
        Ok(Artifacts {
            summary: format!("coded {} points over {} sections", ys.len(), fam.len()),
            json: Some(envelope(Command::Code, cfg, seed, serde_json::to_value(&coded)?)?),
            csv: Some(tagged_csv(cfg, seed, &coded.itineraries_csv())),
        })
    })
}

fn expansivity(cfg: &RunConfig, seed: u64) -> Result<Artifacts> {
    let f = systems::flow_fixture(&cfg.fixture()?)?;
    let d = CertifyConfig::default().expansivity;
    let scale = ExpansivityScale::new(
        cfg.scale("exp_eps", d.eps)?,
        cfg.scale("exp_delta", d.delta)?,
        cfg.scale("exp_horizon", d.horizon)?,
    )
    .map_err(|e| Error::Config(e.to_string()))?
    .with_dt(cfg.scale("exp_dt", d.dt)?)
    .with_resolution(cfg.scale("exp_resolution", d.resolution)?);
    let net = cfg.scale("net_eps", 0.02)?;
    with_flow!(&f, f => {
        let mut report = match cfg.raw("point") {
            Some(_) => {
                let p = flow_point(f, cfg, None)?;
                uniformly_expansive_check(f, &p, cfg.scale("u_radius", 0.05)?, &scale, net)?
            }
            None => {
                let pairs = sample_pairs(f, net, cfg.get_or("pairs", 200)?, seed);
                expansive_check(f, &scale, &pairs)
            }
        };
        report.seed = Some(seed);
        Ok(Artifacts {
            summary: format!(
                "{} on {} pairs",
                if report.passed() { "pass" } else { "fail" },
                report.pairs_tested
            ),
            json: Some(envelope(Command::Expansivity, cfg, seed, serde_json::to_value(&report)?)?),
            csv: None,
        })
    })
}

fn spec(cfg: &RunConfig, seed: u64) -> Result<Artifacts> {
    let name = cfg.fixture()?;
    let map = match systems::fixture(&name)? {
        Fixture::Map(m) => m,
        Fixture::Flow(_) => return Err(Error::Config(format!("'{name}' is a flow; spec needs a map fixture"))),
    };
    let AnyMap::Shift(shift) = &map else {
        return Err(Error::Config(format!(
            "spec needs a shift fixture with a splice oracle, got '{name}'"
        )));
    };
    let eps = cfg.scale("eps", 0.25)?;
    let margin = splice_margin(shift.subshift().alphabet(), eps);
    let gap: u64 = cfg.get_or("gap", 2 * u64::from(margin))?;
    let trials: usize = cfg.get_or("trials", 100)?;
    let pool = shift.net(cfg.scale("pool", 0.25)?);
    let x: SymbolSequence = match cfg.json("point")? {
        Some(p) => p,
        None => pool
            .first()
            .cloned()
            .ok_or_else(|| Error::Config("empty point pool".into()))?,
    };
    let sub = shift.subshift().clone();
    let report = spec_point_check(shift, &x, eps, gap, trials, seed, &pool, |inst| {
        splice_candidates(&sub, inst, eps)
    })?;
    Ok(Artifacts {
        summary: format!("{}/{} instances traced", report.passed(), trials),
        json: Some(envelope(Command::Spec, cfg, seed, serde_json::to_value(&report)?)?),
        csv: Some(tagged_csv(cfg, seed, &report.to_csv())),
    })
}

/// Runs a command, writes its artifacts and returns the exit status.
/// JSON goes to `out` (stdout when unset), CSV to `csv` when set, and the
/// summary or error to stderr.
pub fn execute(cmd: Command, cfg: &RunConfig) -> i32 {
    match run(cmd, cfg).and_then(|a| write_artifacts(cfg, &a).map(|_| a)) {
        Ok(a) => {
            eprintln!("{}", a.summary.trim_end());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{cmd}: {e}");
            exit_code(&e)
        }
    }
}

fn write_artifacts(cfg: &RunConfig, a: &Artifacts) -> Result<()> {
    if let Some(j) = &a.json {
        match cfg.raw("out") {
            Some(path) => std::fs::write(path, j)?,
            None => println!("{j}"),
        }
    }
    if let (Some(c), Some(path)) = (&a.csv, cfg.raw("csv")) {
        std::fs::write(path, c)?;
    }
    Ok(())
}
