use serde::{Deserialize, Serialize};

use super::spec::{Algorithm, ProblemSpec, RunSpec};
use crate::error::{Error, Result};
use crate::geometry::{FeasibleSet, Point, ScalingMode};
use crate::optimizers::{
    AdaAcsa, AdaAgdPlus, AdaGrad, AdaGradPlus, AdaMirrorProx, LinearCouplingAcsa, MovementDenominator, Optimizer,
    OptimizerConfig, SgdMomentum, StepReport,
};
use crate::problems::{
    stochastic_wrap, BilinearGame, DiagQuadratic, GradientOracle, MonotoneOp, NesterovWorst, Objective,
    OperatorOracle, Oracle,
};

/// What the `value` column measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ValueKind {
    /// `f(solution) - f*`
    Error,
    /// duality gap of the solution
    Gap,
    /// `f(solution)`, optimum unknown
    Raw,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: usize,
    pub value: f64,
    pub trace_d: f64,
    pub movement: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub algo: String,
    pub problem: String,
    pub kind: ValueKind,
    pub rows: Vec<TraceRow>,
}

impl RunTrace {
    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }
}

/// Read-only view handed to a [`run_observed`] callback after every step.
pub struct StepView<'a> {
    pub t: usize,
    pub optimizer: &'a dyn Optimizer<f64>,
    pub report: &'a StepReport<f64>,
    pub domain: &'a FeasibleSet<f64>,
}

enum Instance {
    Objective { f: Box<dyn Objective<f64>>, reference: Option<f64> },
    Game(BilinearGame<f64>),
}

/// Everything needed to run one spec, built up front so setup errors surface
/// before any iteration.
pub struct Prepared {
    instance: Instance,
    domain: FeasibleSet<f64>,
    optimizer: Box<dyn Optimizer<f64>>,
    spec: RunSpec,
}

impl Prepared {
    pub fn domain(&self) -> &FeasibleSet<f64> {
        &self.domain
    }

    pub fn optimizer(&self) -> &dyn Optimizer<f64> {
        self.optimizer.as_ref()
    }
}

pub fn prepare(spec: &RunSpec) -> Result<Prepared> {
    spec.validate()?;
    let algo = spec.algo.algorithm;
    let constrained = algo.is_constrained();

    let (instance, domain) = match &spec.problem {
        ProblemSpec::Nesterov { n, half_width } => {
            let f = NesterovWorst::<f64>::new(*n)?;
            let domain = if constrained {
                // the minimizer lies in (0, 1)^n
                if !(*half_width >= 1.0) {
                    return Err(Error::InvalidParameter(format!("nesterov box half-width {half_width} must be >= 1")));
                }
                FeasibleSet::cube(*n, -half_width, *half_width)?
            } else {
                FeasibleSet::Unconstrained
            };
            let reference = f.f_star();
            (Instance::Objective { f: Box::new(f), reference }, domain)
        }
        ProblemSpec::DiagQuad { beta, x_star, half_width } => {
            let f = DiagQuadratic::new(beta.clone(), Point::new(x_star.clone()))?;
            let domain = if constrained {
                FeasibleSet::cube(beta.len(), -half_width, *half_width)?
            } else {
                FeasibleSet::Unconstrained
            };
            let reference = f.constrained_optimum(&domain).map(|(_, v)| v);
            (Instance::Objective { f: Box::new(f), reference }, domain)
        }
        ProblemSpec::Bilinear { seed, d } => {
            if algo != Algorithm::AdaMp {
                return Err(Error::UnsupportedDomain { required: "objective", got: "variational inequality" });
            }
            let g = BilinearGame::random(*d, *seed)?;
            let domain = g.domain();
            (Instance::Game(g), domain)
        }
    };

    let dim = match &instance {
        Instance::Objective { f, .. } => f.dim(),
        Instance::Game(g) => g.dim(),
    };
    // the origin is a saddle point of every bilinear game, so games start at
    // the all-ones corner instead
    let x0 = match instance {
        Instance::Game(_) => Point::new(vec![1.0; dim]),
        Instance::Objective { .. } => Point::zeros(dim),
    };
    let scaling = if spec.algo.scalar { ScalingMode::Scalar } else { ScalingMode::PerCoordinate };
    let radius = spec.radius.unwrap_or_else(|| match (algo, scaling) {
        (Algorithm::AdaGradPlus | Algorithm::AdaAgdPlus, ScalingMode::Scalar) => domain.l2_diameter(),
        _ => domain.linf_diameter(),
    });
    let mut cfg = OptimizerConfig::new(radius).with_scaling(scaling);
    if let Some(eta) = spec.eta {
        cfg = cfg.with_eta(eta);
    }
    if spec.algo.stoch {
        cfg = cfg.with_denominator(MovementDenominator::TwoR2);
    }

    let optimizer: Box<dyn Optimizer<f64>> = match algo {
        Algorithm::AdaGradPlus => Box::new(AdaGradPlus::new(x0, domain.clone(), cfg)?),
        Algorithm::AdaAcsa => Box::new(AdaAcsa::new(x0, domain.clone(), cfg)?),
        Algorithm::AdaAgdPlus => Box::new(AdaAgdPlus::new(x0, domain.clone(), cfg)?),
        Algorithm::AdaMp => Box::new(AdaMirrorProx::new(x0, domain.clone(), cfg)?),
        Algorithm::AdaGrad => Box::new(AdaGrad::new(x0, &domain, spec.eta.unwrap_or(1.0))?),
        Algorithm::LinCoup => Box::new(LinearCouplingAcsa::new(x0, &domain, spec.eta.unwrap_or(1.0))?),
        Algorithm::Sgd => Box::new(SgdMomentum::new(x0, domain.clone(), spec.eta.unwrap_or(0.1), spec.momentum)?),
    };
    Ok(Prepared { instance, domain, optimizer, spec: spec.clone() })
}

/// Runs `spec` to completion and returns one row per iteration, `t = 1..=T`.
pub fn run(spec: &RunSpec) -> Result<RunTrace> {
    run_observed(spec, &mut |_| {})
}

/// [`run`], calling `observer` after every step.
pub fn run_observed(spec: &RunSpec, observer: &mut dyn FnMut(&StepView)) -> Result<RunTrace> {
    let prepared = prepare(spec)?;
    execute(prepared, observer)
}

fn execute(prepared: Prepared, observer: &mut dyn FnMut(&StepView)) -> Result<RunTrace> {
    let Prepared { instance, domain, mut optimizer, spec } = prepared;
    let (kind, mut oracle): (ValueKind, Box<dyn Oracle<f64> + '_>) = match &instance {
        Instance::Objective { f, reference } => {
            let base = GradientOracle(f.as_ref());
            let kind = if reference.is_some() { ValueKind::Error } else { ValueKind::Raw };
            if spec.sigma > 0.0 {
                (kind, Box::new(stochastic_wrap(base, spec.sigma, spec.seed)?))
            } else {
                (kind, Box::new(base))
            }
        }
        Instance::Game(g) => {
            let base = OperatorOracle(g);
            if spec.sigma > 0.0 {
                (ValueKind::Gap, Box::new(stochastic_wrap(base, spec.sigma, spec.seed)?))
            } else {
                (ValueKind::Gap, Box::new(base))
            }
        }
    };
    let evaluate = |x: &Point<f64>| -> f64 {
        match &instance {
            Instance::Objective { f, reference } => f.value(x) - reference.unwrap_or(0.0),
            Instance::Game(g) => g.duality_gap(x).unwrap_or(f64::NAN),
        }
    };

    let mut rows = Vec::with_capacity(spec.iters);
    for t in 1..=spec.iters {
        let report = optimizer.step(oracle.as_mut())?;
        let trace_d = optimizer.scaling().map_or(domain_dim(&domain, optimizer.as_ref()), |s| s.trace());
        rows.push(TraceRow { t, value: evaluate(&optimizer.solution()), trace_d, movement: report.movement });
        observer(&StepView { t, optimizer: optimizer.as_ref(), report: &report, domain: &domain });
    }
    Ok(RunTrace { algo: spec.algo.to_string(), problem: spec.problem.to_string(), kind, rows })
}

/// Methods without a preconditioner report `trace(I) = d`.
fn domain_dim(domain: &FeasibleSet<f64>, opt: &dyn Optimizer<f64>) -> f64 {
    domain.dim().unwrap_or_else(|| opt.solution().dim()) as f64
}

/// First `t` at which the value drops to each target, or `None`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetHit {
    pub target: f64,
    pub iteration: Option<usize>,
}

pub fn iterations_to_target(trace: &RunTrace, targets: &[f64]) -> Result<Vec<TargetHit>> {
    if trace.kind == ValueKind::Raw {
        return Err(Error::Missing("f_star"));
    }
    Ok(targets
        .iter()
        .map(|&target| TargetHit { target, iteration: trace.rows.iter().find(|r| r.value <= target).map(|r| r.t) })
        .collect())
}
