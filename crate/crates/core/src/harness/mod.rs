//! Experiment runner behind the `adaopt` command line: run specs, traces,
//! the iterations-to-target table and the diagnostics suite.

mod checks;
mod output;
mod run;
mod spec;

pub use checks::{run_checks, CheckResult};
pub use output::{
    build_table, csv_string, emit_csv, emit_plot_data, parse_csv, series_file_name, traces_from_json, traces_to_json,
    TableRow, TargetTable, CSV_HEADER,
};
pub use run::{iterations_to_target, prepare, run, run_observed, Prepared, RunTrace, StepView, TargetHit, TraceRow, ValueKind};
pub use spec::{
    build_spec, parse_config, parse_targets, AlgoId, Algorithm, ProblemSpec, RunSpec, DEFAULT_HALF_WIDTH,
    DEFAULT_TARGETS,
};

use crate::error::Result;

/// The four runs of the synthetic benchmark on Nesterov's function with
/// `n = 100`, `T = 2000`, `x_0 = 0`: SGD (lr 0.1, momentum 0.9), AdaGrad
/// (lr 1), AdaACSA and AdaAGD+ (lr 1, box `[-2, 2]^n`, `R = 4`).
pub fn synthetic_specs() -> Vec<RunSpec> {
    let problem = ProblemSpec::Nesterov { n: 100, half_width: DEFAULT_HALF_WIDTH };
    let mk = |algo: &str, eta: f64| {
        let mut s = RunSpec::new(algo.parse().expect("static id"), problem.clone());
        s.eta = Some(eta);
        s
    };
    vec![mk("sgd", 0.1), mk("adagrad", 1.0), mk("adaacsa", 1.0), mk("adaagd+", 1.0)]
}

/// Runs independent specs on separate threads; results come back in input
/// order.
pub fn run_all(specs: &[RunSpec]) -> Result<Vec<RunTrace>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = specs.iter().map(|s| scope.spawn(move || run(s))).collect();
        handles.into_iter().map(|h| h.join().expect("run thread panicked")).collect()
    })
}
