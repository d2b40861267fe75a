//! Experiment configuration files.
//!
//! The format is line based: `key = value` pairs grouped under `[section]`
//! headers, `#` starts a comment. Lists are comma separated; a list of
//! multi-indices separates components with `:` (`alphas = 3:2, 5:1`).
//! See `docs/config.md` for every key.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use chebdir_core::index::{Direction, MultiIndex};
use chebdir_core::{Complex64, MinimaxOptions, PointCloud, SetModel};

use crate::error::{CliError, Result};

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Raw `section -> key -> value` table.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, BTreeMap<String, String>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut section = String::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| bad(format!("line {}: unterminated section header", no + 1)))?
                    .trim();
                if name.is_empty() {
                    return Err(bad(format!("line {}: empty section name", no + 1)));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| bad(format!("line {}: expected key = value", no + 1)))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(bad(format!("line {}: missing key", no + 1)));
            }
            let table = entries.entry(section.clone()).or_default();
            if table.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(bad(format!("line {}: duplicate key {section}.{key}", no + 1)));
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.entries.get(section).and_then(|t| t.get(key)).map(String::as_str)
    }

    pub fn set(&mut self, section: &str, key: &str, value: impl Into<String>) {
        self.entries.entry(section.to_string()).or_default().insert(key.to_string(), value.into());
    }

    pub fn retain(&mut self, section: &str, keep: impl Fn(&str) -> bool) {
        if let Some(t) = self.entries.get_mut(section) {
            t.retain(|k, _| keep(k));
        }
    }

    pub fn section(&self, section: &str) -> Option<&BTreeMap<String, String>> {
        self.entries.get(section)
    }

    fn keys(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().flat_map(|(s, t)| t.keys().map(move |k| (s.as_str(), k.as_str())))
    }
}

fn parse_num<T: FromStr>(what: &str, s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| bad(format!("{what}: cannot parse {s:?}")))
}

fn parse_f64(what: &str, s: &str) -> Result<f64> {
    let v: f64 = parse_num(what, s)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad(format!("{what}: {s:?} is not finite")))
    }
}

fn parse_bool(what: &str, s: &str) -> Result<bool> {
    match s.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(bad(format!("{what}: expected true or false, got {other:?}"))),
    }
}

/// Mesh sizes: a plain number or `[c]pi[/n]`, e.g. `2pi/64`.
pub fn parse_mesh(s: &str) -> Result<f64> {
    let t = s.trim();
    let v = if let Some(pos) = t.find("pi") {
        let coef = t[..pos].trim().trim_end_matches('*');
        let c = if coef.is_empty() { 1.0 } else { parse_f64("mesh", coef)? };
        let rest = t[pos + 2..].trim();
        let div = match rest.strip_prefix('/') {
            Some(n) => parse_f64("mesh", n)?,
            None if rest.is_empty() => 1.0,
            None => return Err(bad(format!("mesh: cannot parse {s:?}"))),
        };
        c * PI / div
    } else {
        parse_f64("mesh", t)?
    };
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(bad(format!("mesh must be positive, got {s:?}")))
    }
}

/// Complex numbers as `a`, `bi`, `a+bi` or `a-bi`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let err = || bad(format!("cannot parse complex number {s:?}"));
    if t.is_empty() {
        return Err(err());
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(t.parse().map_err(|_| err())?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => v.parse().map_err(|_| err())?,
    };
    Ok(Complex64::new(re.parse().map_err(|_| err())?, im))
}

fn split_list(s: &str, sep: char) -> Vec<&str> {
    s.split(sep).map(str::trim).filter(|x| !x.is_empty()).collect()
}

fn parse_f64_list(what: &str, items: &[&str]) -> Result<Vec<f64>> {
    items.iter().map(|v| parse_f64(what, v)).collect()
}

fn parse_multi_index(s: &str) -> Result<MultiIndex> {
    let e: Vec<u32> = split_list(s, ':').iter().map(|v| parse_num("multi-index", v)).collect::<Result<_>>()?;
    MultiIndex::new(e).map_err(|e| bad(e.to_string()))
}

/// Model parameters keyed by name, each a list of raw items.
pub type Params = HashMap<String, Vec<String>>;

/// `k=v1:v2,k2=v` as used by `--params`.
pub fn parse_params(s: &str) -> Result<Params> {
    let mut out = Params::new();
    for pair in split_list(s, ',') {
        let (k, v) = pair.split_once('=').ok_or_else(|| bad(format!("--params: expected k=v, got {pair:?}")))?;
        let items = split_list(v, ':').into_iter().map(String::from).collect();
        if out.insert(k.trim().to_string(), items).is_some() {
            return Err(bad(format!("--params: duplicate key {k}")));
        }
    }
    Ok(out)
}

const MODEL_KEYS: [&str; 9] = ["radii", "centers", "A", "r", "a", "b", "base", "matrix", "shift"];

/// Build a catalog model from its name and parameters.
pub fn model_from_params(name: &str, p: &Params) -> Result<SetModel> {
    let floats = |k: &str| -> Result<Vec<f64>> {
        let items = p.get(k).ok_or_else(|| bad(format!("model {name} needs parameter {k}")))?;
        items.iter().map(|v| parse_f64(k, v)).collect()
    };
    let one = |k: &str| -> Result<f64> {
        match floats(k)?.as_slice() {
            [v] => Ok(*v),
            _ => Err(bad(format!("parameter {k} takes a single value"))),
        }
    };
    let complexes = |k: &str| -> Result<Vec<Complex64>> {
        let items = p.get(k).ok_or_else(|| bad(format!("model {name} needs parameter {k}")))?;
        items.iter().map(|v| parse_complex(v)).collect()
    };
    let model = match name {
        "torus" => SetModel::Torus { radii: floats("radii")? },
        "product-discs" => {
            let radii = floats("radii")?;
            let centers = if p.contains_key("centers") {
                complexes("centers")?
            } else {
                vec![Complex64::new(0.0, 0.0); radii.len()]
            };
            SetModel::ProductDiscs { centers, radii }
        }
        "ellipsoid" => SetModel::Ellipsoid { a: one("A")?, r: one("r")? },
        "zaharjuta" => SetModel::ZaharjutaPluripolar,
        "segment" => SetModel::Segment { a: one("a")?, b: one("b")? },
        "unit-circle" => SetModel::Torus { radii: vec![1.0] },
        "affine" => {
            let base_name = match p.get("base").map(Vec::as_slice) {
                Some([b]) if b != "affine" => b.clone(),
                _ => return Err(bad("affine model needs a single non-affine base")),
            };
            let base = model_from_params(&base_name, p)?;
            let d = base.dim();
            let matrix = complexes("matrix")?;
            let shift = if p.contains_key("shift") { complexes("shift")? } else { vec![Complex64::new(0.0, 0.0); d] };
            SetModel::AffineImage { base: Box::new(base), matrix, shift }
        }
        other => return Err(bad(format!("unknown set model {other:?}"))),
    };
    model.validate().map_err(|e| bad(format!("model {name}: {e}")))?;
    Ok(model)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightSpec {
    None,
    /// `w = c`.
    Constant(f64),
    /// `w(z) = exp(-a |z|^2)`.
    Gaussian(f64),
}

impl FromStr for WeightSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
        let w = match kind.trim() {
            "none" => WeightSpec::None,
            "constant" => WeightSpec::Constant(parse_f64("weight", arg)?),
            "gaussian" => WeightSpec::Gaussian(if arg.is_empty() { 1.0 } else { parse_f64("weight", arg)? }),
            other => return Err(bad(format!("unknown weight {other:?}"))),
        };
        match w {
            WeightSpec::Constant(c) if !(c > 0.0) => Err(bad("constant weight must be positive")),
            WeightSpec::Gaussian(a) if !(a >= 0.0) => Err(bad("gaussian weight needs a >= 0")),
            _ => Ok(w),
        }
    }
}

impl fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightSpec::None => write!(f, "none"),
            WeightSpec::Constant(c) => write!(f, "constant:{c}"),
            WeightSpec::Gaussian(a) => write!(f, "gaussian:{a}"),
        }
    }
}

impl WeightSpec {
    pub fn eval(&self, z: &[Complex64]) -> f64 {
        match *self {
            WeightSpec::None => 1.0,
            WeightSpec::Constant(c) => c,
            WeightSpec::Gaussian(a) => (-a * z.iter().map(|c| c.norm_sqr()).sum::<f64>()).exp(),
        }
    }
}

/// A sampled set: model, mesh and weight.
#[derive(Clone, Debug, PartialEq)]
pub struct SetSpec {
    pub model: SetModel,
    pub mesh: f64,
    pub weight: WeightSpec,
}

impl SetSpec {
    pub fn cloud(&self) -> chebdir_core::Result<PointCloud> {
        self.cloud_at(self.mesh)
    }

    pub fn cloud_at(&self, mesh: f64) -> chebdir_core::Result<PointCloud> {
        let cloud = chebdir_core::sets::generate(&self.model, mesh)?;
        match self.weight {
            WeightSpec::None => Ok(cloud),
            w => cloud.weighted_by(|z| w.eval(z)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    TauSweep,
    Delta,
    Counterexample,
    VerifyStep1,
    VerifyStep2,
    VerifyStep3,
    VerifyScaling,
    VerifySandwich,
    Lemma100Ellipsoid,
    Lemma100Axis,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        ExperimentKind::TauSweep,
        ExperimentKind::Delta,
        ExperimentKind::Counterexample,
        ExperimentKind::VerifyStep1,
        ExperimentKind::VerifyStep2,
        ExperimentKind::VerifyStep3,
        ExperimentKind::VerifyScaling,
        ExperimentKind::VerifySandwich,
        ExperimentKind::Lemma100Ellipsoid,
        ExperimentKind::Lemma100Axis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::TauSweep => "tau-sweep",
            ExperimentKind::Delta => "delta",
            ExperimentKind::Counterexample => "counterexample",
            ExperimentKind::VerifyStep1 => "verify-step1",
            ExperimentKind::VerifyStep2 => "verify-step2",
            ExperimentKind::VerifyStep3 => "verify-step3-factorization",
            ExperimentKind::VerifyScaling => "verify-scaling",
            ExperimentKind::VerifySandwich => "verify-sandwich",
            ExperimentKind::Lemma100Ellipsoid => "lemma100-ellipsoid",
            ExperimentKind::Lemma100Axis => "lemma100-axis",
        }
    }

    /// CLI subcommand that runs this kind.
    pub fn command(self) -> &'static str {
        match self {
            ExperimentKind::TauSweep | ExperimentKind::Counterexample => "sweep",
            ExperimentKind::Delta => "delta",
            ExperimentKind::Lemma100Ellipsoid | ExperimentKind::Lemma100Axis => "lemma100",
            _ => "verify",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| bad(format!("unknown experiment kind {s:?}")))
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sequence {
    /// Largest-remainder rounding of `j * theta`.
    Rounded,
    /// `(j, 0)` for even `j`, `(j-1, 1)` for odd `j`.
    Interleaved,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeltaMethod {
    Fekete,
    Zaharjuta,
}

impl FromStr for DeltaMethod {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fekete" => Ok(DeltaMethod::Fekete),
            "zaharjuta" => Ok(DeltaMethod::Zaharjuta),
            other => Err(bad(format!("unknown delta method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub name: String,
    pub set: SetSpec,
    pub theta: Option<Direction>,
    pub j_min: u32,
    pub j_max: u32,
    pub sequence: Sequence,
    pub half_mesh: bool,
    /// Trailing window for limsup/liminf estimates.
    pub window: usize,
    /// Pass tolerance of the experiment's checks.
    pub tol: f64,
    pub mesh_tol: f64,
    pub solver_tol: f64,
    /// Reference value for the limit (sweeps) or the diameter (delta).
    pub expected: Option<f64>,
    /// Tolerance for the limit against `expected`; defaults to `tol`.
    pub limit_tol: f64,
    pub seed: u64,
    pub epsilon: f64,
    pub eta: Option<f64>,
    pub alphas: Vec<MultiIndex>,
    pub max_degree: u32,
    pub trials: usize,
    pub z_degree: Option<u32>,
    pub candidates: usize,
    pub margin: f64,
    pub slack: f64,
    pub method: DeltaMethod,
    pub degrees: Vec<u32>,
    pub nodes: usize,
    pub exchange_rounds: usize,
    pub interior: Vec<f64>,
    pub lemma_degree: u32,
    pub shear: f64,
    pub out_dir: PathBuf,
}

const KNOWN: &[(&str, &[&str])] = &[
    ("experiment", &["kind", "name", "seed", "window", "tol", "mesh_tol", "solver_tol", "expected", "limit_tol"]),
    ("set", &["model", "mesh", "weight", "radii", "centers", "A", "r", "a", "b", "base", "matrix", "shift"]),
    ("sweep", &["theta", "j_min", "j_max", "sequence", "half_mesh"]),
    ("verify", &["epsilon", "eta", "alphas", "max_degree", "trials", "z_degree", "candidates", "margin", "slack"]),
    ("delta", &["method", "degrees", "nodes", "exchange_rounds"]),
    ("lemma100", &["interior", "degree", "shear"]),
    ("output", &["dir"]),
];

impl ExperimentConfig {
    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_file(&ConfigFile::parse(text)?)
    }

    pub fn from_file(f: &ConfigFile) -> Result<Self> {
        for (section, key) in f.keys() {
            let ok = KNOWN.iter().any(|(s, keys)| *s == section && keys.contains(&key));
            if !ok {
                return Err(bad(format!("unknown key {section}.{key}")));
            }
        }
        let get = |s: &str, k: &str| f.get(s, k);
        let kind: ExperimentKind =
            get("experiment", "kind").ok_or_else(|| bad("missing experiment.kind"))?.parse()?;
        let float = |s: &str, k: &str, default: f64| -> Result<f64> {
            get(s, k).map_or(Ok(default), |v| parse_f64(&format!("{s}.{k}"), v))
        };
        let int = |s: &str, k: &str, default: u64| -> Result<u64> {
            get(s, k).map_or(Ok(default), |v| parse_num(&format!("{s}.{k}"), v))
        };

        let model_name = get("set", "model").ok_or_else(|| bad("missing set.model"))?;
        let mut params = Params::new();
        if let Some(table) = f.section("set") {
            for (k, v) in table {
                if MODEL_KEYS.contains(&k.as_str()) {
                    params.insert(k.clone(), split_list(v, ',').into_iter().map(String::from).collect());
                }
            }
        }
        let model = model_from_params(model_name, &params)?;
        let mesh = parse_mesh(get("set", "mesh").ok_or_else(|| bad("missing set.mesh"))?)?;
        let weight = get("set", "weight").map_or(Ok(WeightSpec::None), str::parse)?;
        let set = SetSpec { model, mesh, weight };

        let theta = match get("sweep", "theta") {
            Some(v) => {
                let coords = parse_f64_list("sweep.theta", &split_list(v, ','))?;
                Some(Direction::new(coords).map_err(|e| bad(format!("sweep.theta: {e}")))?)
            }
            None => None,
        };
        let sequence = match get("sweep", "sequence").unwrap_or("rounded") {
            "rounded" => Sequence::Rounded,
            "interleaved" => Sequence::Interleaved,
            other => return Err(bad(format!("unknown sequence {other:?}"))),
        };
        let alphas = match get("verify", "alphas") {
            Some(v) => split_list(v, ',').into_iter().map(parse_multi_index).collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let degrees = match get("delta", "degrees") {
            Some(v) => split_list(v, ',').into_iter().map(|d| parse_num("delta.degrees", d)).collect::<Result<_>>()?,
            None => vec![4],
        };
        let interior = match get("lemma100", "interior") {
            Some(v) => parse_f64_list("lemma100.interior", &split_list(v, ','))?,
            None => vec![0.80, 0.90, 0.95],
        };
        let eta = match get("verify", "eta") {
            Some(v) => Some(parse_f64("verify.eta", v)?),
            None => None,
        };
        let expected = match get("experiment", "expected") {
            Some(v) => Some(parse_f64("experiment.expected", v)?),
            None => None,
        };
        let z_degree = match get("verify", "z_degree") {
            Some(v) => Some(parse_num("verify.z_degree", v)?),
            None => None,
        };
        let half_mesh = get("sweep", "half_mesh").map_or(Ok(true), |v| parse_bool("sweep.half_mesh", v))?;

        let cfg = ExperimentConfig {
            kind,
            name: get("experiment", "name").unwrap_or(kind.name()).to_string(),
            set,
            theta,
            j_min: int("sweep", "j_min", 1)? as u32,
            j_max: int("sweep", "j_max", 24)? as u32,
            sequence,
            half_mesh,
            window: int("experiment", "window", 8)? as usize,
            tol: float("experiment", "tol", 1e-2)?,
            mesh_tol: float("experiment", "mesh_tol", 1e-2)?,
            solver_tol: float("experiment", "solver_tol", 1e-9)?,
            expected,
            limit_tol: float("experiment", "limit_tol", float("experiment", "tol", 1e-2)?)?,
            seed: int("experiment", "seed", 0)?,
            epsilon: float("verify", "epsilon", 0.1)?,
            eta,
            alphas,
            max_degree: int("verify", "max_degree", 16)? as u32,
            trials: int("verify", "trials", 20)? as usize,
            z_degree,
            candidates: int("verify", "candidates", 41)? as usize,
            margin: float("verify", "margin", 1.5)?,
            slack: float("verify", "slack", 1e-6)?,
            method: get("delta", "method").unwrap_or("fekete").parse()?,
            degrees,
            nodes: int("delta", "nodes", 16)? as usize,
            exchange_rounds: int("delta", "exchange_rounds", 50)? as usize,
            interior,
            lemma_degree: int("lemma100", "degree", 20)? as u32,
            shear: float("lemma100", "shear", 0.5)?,
            out_dir: PathBuf::from(get("output", "dir").unwrap_or("out")),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.j_min < 1 || self.j_min > self.j_max {
            return Err(bad(format!("need 1 <= j_min <= j_max, got {}..{}", self.j_min, self.j_max)));
        }
        for (what, v) in [
            ("tol", self.tol),
            ("limit_tol", self.limit_tol),
            ("mesh_tol", self.mesh_tol),
            ("solver_tol", self.solver_tol),
        ] {
            if !(v > 0.0) {
                return Err(bad(format!("{what} must be positive, got {v}")));
            }
        }
        if self.window == 0 {
            return Err(bad("window must be >= 1"));
        }
        if let Some(t) = &self.theta {
            if t.dim() != self.set.model.dim() {
                return Err(bad(format!("theta has {} coordinates, the set lives in C^{}", t.dim(), self.set.model.dim())));
            }
        }
        if let Some(a) = self.alphas.iter().find(|a| a.dim() != self.set.model.dim() || a.degree() == 0) {
            return Err(bad(format!("multi-index {a} does not fit the set")));
        }
        if !(self.epsilon >= 0.0) || self.eta.is_some_and(|e| !(e > 0.0)) {
            return Err(bad("need epsilon >= 0 and eta > 0"));
        }
        if self.degrees.contains(&0) {
            return Err(bad("delta degrees must be >= 1"));
        }
        if self.interior.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
            return Err(bad("interior directions need 0 < theta1 < 1"));
        }
        let needs_theta = matches!(self.kind, ExperimentKind::TauSweep | ExperimentKind::VerifyStep1);
        if needs_theta && self.theta.is_none() {
            return Err(bad(format!("{} needs sweep.theta", self.kind)));
        }
        if self.kind == ExperimentKind::VerifyStep3 && self.alphas.is_empty() {
            return Err(bad("verify-step3-factorization needs verify.alphas"));
        }
        Ok(())
    }

    pub fn solver(&self) -> MinimaxOptions {
        MinimaxOptions::with_tol(self.solver_tol)
    }
}
