use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Algorithm family addressable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Algorithm {
    AdaGradPlus,
    AdaAcsa,
    AdaAgdPlus,
    AdaMp,
    AdaGrad,
    LinCoup,
    Sgd,
}

impl Algorithm {
    pub fn id(self) -> &'static str {
        match self {
            Algorithm::AdaGradPlus => "adagrad+",
            Algorithm::AdaAcsa => "adaacsa",
            Algorithm::AdaAgdPlus => "adaagd+",
            Algorithm::AdaMp => "adamp",
            Algorithm::AdaGrad => "adagrad",
            Algorithm::LinCoup => "lincoup",
            Algorithm::Sgd => "sgd",
        }
    }

    /// Whether the method needs a bounded feasible set and a radius.
    pub fn is_constrained(self) -> bool {
        matches!(self, Algorithm::AdaGradPlus | Algorithm::AdaAcsa | Algorithm::AdaAgdPlus | Algorithm::AdaMp)
    }
}

/// Algorithm plus mode suffixes, e.g. `adaacsa:scalar:stoch`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgoId {
    pub algorithm: Algorithm,
    pub scalar: bool,
    pub stoch: bool,
}

impl FromStr for AlgoId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split(':');
        let head = parts.next().unwrap_or_default();
        let algorithm = match head {
            "adagrad+" => Algorithm::AdaGradPlus,
            "adaacsa" => Algorithm::AdaAcsa,
            "adaagd+" => Algorithm::AdaAgdPlus,
            "adamp" => Algorithm::AdaMp,
            "adagrad" => Algorithm::AdaGrad,
            "lincoup" => Algorithm::LinCoup,
            "sgd" => Algorithm::Sgd,
            other => return Err(Error::Parse(format!("unknown algorithm '{other}'"))),
        };
        let mut id = AlgoId { algorithm, scalar: false, stoch: false };
        for suffix in parts {
            match suffix {
                "scalar" if matches!(algorithm, Algorithm::AdaGradPlus | Algorithm::AdaAcsa | Algorithm::AdaAgdPlus) => {
                    id.scalar = true
                }
                // adamp already uses 2R^2
                "stoch" if matches!(algorithm, Algorithm::AdaGradPlus | Algorithm::AdaAcsa | Algorithm::AdaAgdPlus) => {
                    id.stoch = true
                }
                other => return Err(Error::Parse(format!("suffix '{other}' is not valid for {head}"))),
            }
        }
        Ok(id)
    }
}

impl fmt::Display for AlgoId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.algorithm.id())?;
        if self.scalar {
            f.write_str(":scalar")?;
        }
        if self.stoch {
            f.write_str(":stoch")?;
        }
        Ok(())
    }
}

/// Test problem addressable as `name:key=value,...`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ProblemSpec {
    /// `nesterov:n=100[,box=2]`
    Nesterov { n: usize, half_width: f64 },
    /// `diagquad:beta=1,10,100[,xstar=...][,box=2]`; `x*` defaults to all ones
    DiagQuad { beta: Vec<f64>, x_star: Vec<f64>, half_width: f64 },
    /// `bilinear:seed=7,d=3`, played on `[-1, 1]^(2d)`
    Bilinear { seed: u64, d: usize },
}

/// Half-width of the box constrained methods run in on objective problems.
pub const DEFAULT_HALF_WIDTH: f64 = 2.0;

fn parse_keyed(body: &str) -> Result<Vec<(String, Vec<String>)>> {
    let mut out: Vec<(String, Vec<String>)> = Vec::new();
    for tok in body.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((k, v)) = tok.split_once('=') {
            out.push((k.trim().to_string(), vec![v.trim().to_string()]));
        } else if let Some(last) = out.last_mut() {
            last.1.push(tok.to_string());
        } else {
            return Err(Error::Parse(format!("expected key=value, got '{tok}'")));
        }
    }
    Ok(out)
}

fn one<T: FromStr>(key: &str, vals: &[String]) -> Result<T> {
    match vals {
        [v] => v.parse().map_err(|_| Error::Parse(format!("bad value '{v}' for {key}"))),
        _ => Err(Error::Parse(format!("{key} takes a single value"))),
    }
}

fn many(key: &str, vals: &[String]) -> Result<Vec<f64>> {
    vals.iter()
        .map(|v| v.parse().map_err(|_| Error::Parse(format!("bad value '{v}' for {key}"))))
        .collect()
}

impl FromStr for ProblemSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, body) = s.trim().split_once(':').unwrap_or((s.trim(), ""));
        let kv = parse_keyed(body)?;
        let unknown = |k: &str| Error::Parse(format!("unknown key '{k}' for {name}"));
        match name {
            "nesterov" => {
                let (mut n, mut half_width) = (None, DEFAULT_HALF_WIDTH);
                for (k, v) in &kv {
                    match k.as_str() {
                        "n" => n = Some(one(k, v)?),
                        "box" => half_width = one(k, v)?,
                        _ => return Err(unknown(k)),
                    }
                }
                let n = n.ok_or_else(|| Error::Parse("nesterov needs n".into()))?;
                Ok(ProblemSpec::Nesterov { n, half_width })
            }
            "diagquad" => {
                let (mut beta, mut x_star, mut half_width) = (None, None, DEFAULT_HALF_WIDTH);
                for (k, v) in &kv {
                    match k.as_str() {
                        "beta" => beta = Some(many(k, v)?),
                        "xstar" => x_star = Some(many(k, v)?),
                        "box" => half_width = one(k, v)?,
                        _ => return Err(unknown(k)),
                    }
                }
                let beta: Vec<f64> = beta.ok_or_else(|| Error::Parse("diagquad needs beta".into()))?;
                let x_star = x_star.unwrap_or_else(|| vec![1.0; beta.len()]);
                if x_star.len() != beta.len() {
                    return Err(Error::Parse("xstar and beta lengths differ".into()));
                }
                Ok(ProblemSpec::DiagQuad { beta, x_star, half_width })
            }
            "bilinear" => {
                let (mut seed, mut d) = (0u64, None);
                for (k, v) in &kv {
                    match k.as_str() {
                        "seed" => seed = one(k, v)?,
                        "d" => d = Some(one(k, v)?),
                        _ => return Err(unknown(k)),
                    }
                }
                let d = d.ok_or_else(|| Error::Parse("bilinear needs d".into()))?;
                Ok(ProblemSpec::Bilinear { seed, d })
            }
            other => Err(Error::Parse(format!("unknown problem '{other}'"))),
        }
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            ProblemSpec::Nesterov { n, half_width } => {
                write!(f, "nesterov:n={n}")?;
                if *half_width != DEFAULT_HALF_WIDTH {
                    write!(f, ",box={half_width}")?;
                }
                Ok(())
            }
            ProblemSpec::DiagQuad { beta, x_star, half_width } => {
                write!(f, "diagquad:beta={}", list(beta))?;
                if x_star.iter().any(|&x| x != 1.0) {
                    write!(f, ",xstar={}", list(x_star))?;
                }
                if *half_width != DEFAULT_HALF_WIDTH {
                    write!(f, ",box={half_width}")?;
                }
                Ok(())
            }
            ProblemSpec::Bilinear { seed, d } => write!(f, "bilinear:seed={seed},d={d}"),
        }
    }
}

pub const DEFAULT_TARGETS: [f64; 5] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];

/// One optimizer run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub algo: AlgoId,
    pub problem: ProblemSpec,
    pub iters: usize,
    /// Learning rate. `None` picks `η = R` for the constrained methods, `1`
    /// for `adagrad` and `lincoup`, and `0.1` for `sgd`.
    pub eta: Option<f64>,
    /// `None` uses the feasible set's diameter in the method's norm.
    pub radius: Option<f64>,
    pub sigma: f64,
    pub seed: u64,
    pub momentum: f64,
    pub targets: Vec<f64>,
}

impl RunSpec {
    pub fn new(algo: AlgoId, problem: ProblemSpec) -> Self {
        RunSpec {
            algo,
            problem,
            iters: 2000,
            eta: None,
            radius: None,
            sigma: 0.0,
            seed: 0,
            momentum: 0.9,
            targets: DEFAULT_TARGETS.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.iters < 1 {
            return Err(Error::InvalidParameter("iters must be at least 1".into()));
        }
        if let Some(eta) = self.eta {
            if !(eta.is_finite() && eta > 0.0) {
                return Err(Error::InvalidParameter(format!("eta = {eta}")));
            }
        }
        if let Some(r) = self.radius {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidParameter(format!("radius = {r}")));
            }
        }
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!("sigma = {}", self.sigma)));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidParameter(format!("momentum = {}", self.momentum)));
        }
        if self.targets.iter().any(|&t| !(t.is_finite() && t > 0.0)) {
            return Err(Error::InvalidParameter("targets must be positive".into()));
        }
        Ok(())
    }

    /// Applies one `key=value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let num = |v: &str| -> Result<f64> { v.parse().map_err(|_| Error::Parse(format!("bad number '{v}' for {key}"))) };
        match key {
            "algo" => self.algo = value.parse()?,
            "problem" => self.problem = value.parse()?,
            "iters" => self.iters = value.parse().map_err(|_| Error::Parse(format!("bad iters '{value}'")))?,
            "eta" | "lr" => self.eta = Some(num(value)?),
            "radius" => self.radius = Some(num(value)?),
            "sigma" => self.sigma = num(value)?,
            "seed" => self.seed = value.parse().map_err(|_| Error::Parse(format!("bad seed '{value}'")))?,
            "momentum" => self.momentum = num(value)?,
            "targets" => self.targets = parse_targets(value)?,
            other => return Err(Error::Parse(format!("unknown key '{other}'"))),
        }
        Ok(())
    }
}

pub fn parse_targets(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("bad target '{t}'"))))
        .collect()
}

/// Parses a config file: one run per non-empty line as whitespace-separated
/// `key=value` pairs, `#` starting a comment. Lines must set `algo` and
/// `problem`; everything else has a default.
pub fn parse_config(text: &str) -> Result<Vec<Vec<(String, String)>>> {
    let mut runs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        let mut pairs = Vec::new();
        for tok in line.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value, got '{tok}'", lineno + 1)))?;
            pairs.push((k.to_string(), v.to_string()));
        }
        runs.push(pairs);
    }
    Ok(runs)
}

/// Builds a spec from layered settings, later layers winning.
pub fn build_spec(layers: &[&[(String, String)]]) -> Result<RunSpec> {
    let find = |key: &str| {
        layers.iter().rev().find_map(|l| l.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.clone()))
    };
    let algo = find("algo").ok_or(Error::Missing("algo"))?.parse()?;
    let problem = find("problem").ok_or(Error::Missing("problem"))?.parse()?;
    let mut spec = RunSpec::new(algo, problem);
    for layer in layers {
        for (k, v) in layer.iter() {
            if k != "algo" && k != "problem" {
                spec.set(k, v)?;
            }
        }
    }
    spec.validate()?;
    Ok(spec)
}
