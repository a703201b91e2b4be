use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::run::{run_observed, RunTrace};
use super::spec::RunSpec;
use crate::diagnostics::{
    check_rate_bound, compare_traces, estimate_rate_shrinking, find_recurrence_violation, fit_window,
    RateBound, RecurrenceTrace, ScalingRecorder,
};
use crate::error::Result;
use crate::geometry::{FeasibleSet, Point};
use crate::optimizers::{AdaAcsa, LinearCouplingAcsa, MovementDenominator, Optimizer, OptimizerConfig, StepSizeSchedule};
use crate::problems::{DiagQuadratic, GradientOracle};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        CheckResult { name: name.to_string(), passed, detail }
    }
}

/// A run plus what the structural checks saw along the way.
struct Observed {
    trace: RunTrace,
    recorder: ScalingRecorder,
    infeasible_steps: usize,
    growth_violations: usize,
}

fn observe(spec: &RunSpec) -> Result<Observed> {
    let mut recorder = ScalingRecorder::new();
    let mut infeasible_steps = 0;
    let mut growth_violations = 0;
    let mut prev: Option<Vec<f64>> = None;
    let trace = run_observed(spec, &mut |v| {
        recorder.record(v.report);
        if v.domain.is_constrained() && v.optimizer.iterates().iter().any(|(_, p)| !v.domain.contains(p, 1e-12)) {
            infeasible_steps += 1;
        }
        if let Some(s) = v.optimizer.scaling() {
            let cur = s.stored().to_vec();
            if let Some(p) = &prev {
                let bad = p.iter().zip(&cur).any(|(&a, &b)| b < a || (v.domain.is_constrained() && b > a * 2f64.sqrt() * (1.0 + 1e-12)));
                if bad {
                    growth_violations += 1;
                }
            }
            prev = Some(cur);
        }
    })?;
    Ok(Observed { trace, recorder, infeasible_steps, growth_violations })
}

fn spec(algo: &str, problem: &str, iters: usize) -> RunSpec {
    let mut s = RunSpec::new(algo.parse().expect("static id"), problem.parse().expect("static problem"));
    s.iters = iters;
    s
}

/// The diagnostics suite run by `adaopt check`. Sizes are kept small enough
/// to finish in a few seconds.
pub fn run_checks() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();

    // scaling recurrence on random sequences
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut failures = 0;
    for _ in 0..1000 {
        let r2: f64 = rng.random_range(0.01..10.0);
        let len = rng.random_range(1..=200);
        let seq = (0..len).map(|_| rng.random_range(0.0..=r2)).collect();
        let tr = RecurrenceTrace::generate(r2, 1.0, seq)?;
        if find_recurrence_violation(&tr)?.is_some() {
            failures += 1;
        }
    }
    out.push(CheckResult::new("recurrence: random sequences", failures == 0, format!("{failures} of 1000 violated")));

    // rates on a smooth quadratic
    let quad = "diagquad:beta=1,4,16";
    let mut runs = Vec::new();
    for (algo, bound, max_slope) in [
        ("adaacsa", RateBound::AdaAcsaSmooth, -1.7),
        ("adaagd+", RateBound::AdaAgdPlusSmooth, -1.7),
        ("adagrad+", RateBound::AdaGradPlusSmooth, -0.9),
    ] {
        let o = observe(&spec(algo, quad, 5000))?;
        let errs = o.trace.values();
        let slope = estimate_rate_shrinking(&errs, 0.25)?;
        out.push(CheckResult::new(
            &format!("rate: {algo} slope"),
            slope.slope <= max_slope,
            format!("slope {:.3} over {:?}, need <= {max_slope}", slope.slope, slope.window),
        ));
        let b = check_rate_bound(&errs, bound, 4.0, &[1.0, 4.0, 16.0])?;
        out.push(CheckResult::new(
            &format!("rate: {algo} fitted constant"),
            b.holds,
            format!("constant {:.3e}", b.constant),
        ));
        runs.push(o);
    }

    // explicit AdaGrad bound with the a-posteriori radius
    out.push(adagrad_explicit_bound()?);

    // mirror-prox duality gap
    let o = observe(&spec("adamp", "bilinear:seed=7,d=3", 2000))?;
    let gaps = o.trace.values();
    let fit = fit_window(&gaps, 250, 2000)?;
    out.push(CheckResult::new(
        "rate: adamp gap slope",
        fit.slope <= -0.9 && gaps[1999] <= gaps[249] / 5.0,
        format!("slope {:.3}, gap(250) {:.3e}, gap(2000) {:.3e}", fit.slope, gaps[249], gaps[1999]),
    ));
    runs.push(o);

    // structural invariants on every run above
    for o in &runs {
        let traces = o.recorder.traces()?;
        let mut bad = 0;
        for tr in &traces {
            if find_recurrence_violation(tr)?.is_some() {
                bad += 1;
            }
        }
        out.push(CheckResult::new(
            &format!("recurrence: {} scaling", o.trace.algo),
            bad == 0,
            format!("{bad} of {} entries violated", traces.len()),
        ));
        out.push(CheckResult::new(
            &format!("structure: {}", o.trace.algo),
            o.infeasible_steps == 0 && o.growth_violations == 0,
            format!("{} infeasible steps, {} growth violations", o.infeasible_steps, o.growth_violations),
        ));
    }

    out.push(linear_coupling_equivalence()?);
    Ok(out)
}

fn adagrad_explicit_bound() -> Result<CheckResult> {
    let beta = [1.0, 4.0, 16.0];
    let x0 = [0.1, -0.1, 0.1];
    let f = DiagQuadratic::new(beta.to_vec(), Point::zeros(3))?;
    // R must bound the trajectory it produces; iterate R -> max ||x_t - x*||
    let horizon = 10_000;
    let mut radius = Point::from_f64(&x0).norm_inf();
    let mut errors = Vec::new();
    for _ in 0..50 {
        let (errs, reach) = adagrad_run(&f, &x0, radius, horizon)?;
        errors = errs;
        if reach <= radius {
            break;
        }
        radius = reach;
    }
    let b = check_rate_bound(&errors, RateBound::AdaGradUnconstrained, radius, &beta)?;
    Ok(CheckResult::new(
        "bound: adagrad explicit constant",
        b.holds,
        format!("max error / bound = {:.3} with R = {radius:.4}", b.constant),
    ))
}

/// Errors of `x̄_T` for every `T` and the trajectory's ℓ∞ reach.
fn adagrad_run(f: &DiagQuadratic<f64>, x0: &[f64], radius: f64, horizon: usize) -> Result<(Vec<f64>, f64)> {
    use crate::optimizers::AdaGrad;
    use crate::problems::Objective;
    let mut opt = AdaGrad::new(Point::from_f64(x0), &FeasibleSet::Unconstrained, radius / 2f64.sqrt())?;
    let mut reach: f64 = Point::from_f64(x0).norm_inf();
    let mut errors = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        opt.step(&mut GradientOracle(f))?;
        reach = reach.max(opt.current().norm_inf());
        errors.push(f.value(&opt.solution()));
    }
    Ok((errors, reach))
}

fn linear_coupling_equivalence() -> Result<CheckResult> {
    let f = DiagQuadratic::new(vec![1.0, 1.0], Point::from_f64(&[0.5, -0.25]))?;
    let half = 1e6;
    let radius = 2.0 * half;
    let k = FeasibleSet::cube(2, -half, half)?;
    let cfg = OptimizerConfig::new(radius)
        .with_schedule(StepSizeSchedule::Optimized)
        .with_denominator(MovementDenominator::TwoR2);
    let mut acsa = AdaAcsa::new(Point::zeros(2), k, cfg)?;
    let mut lc = LinearCouplingAcsa::new(Point::zeros(2), &FeasibleSet::Unconstrained, radius * 2f64.sqrt())?;
    let (mut a, mut b) = (Vec::new(), Vec::new());
    for _ in 0..50 {
        acsa.step(&mut GradientOracle(&f))?;
        lc.step(&mut GradientOracle(&f))?;
        a.push(acsa.y().clone());
        b.push(lc.y().clone());
    }
    let c = compare_traces(&a, &b, 1e-9)?;
    Ok(CheckResult::new(
        "equivalence: linear coupling vs boxed adaacsa",
        c.within,
        format!("max deviation {:.3e} at step {}", c.max_deviation, c.worst_step),
    ))
}
