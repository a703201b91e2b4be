use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use adaopt::harness::{
    build_spec, build_table, csv_string, emit_plot_data, parse_config, parse_targets, run_all, run_checks,
    synthetic_specs, traces_from_json, traces_to_json, RunSpec, DEFAULT_TARGETS,
};
use adaopt::Error;

#[derive(Parser)]
#[command(name = "adaopt", version, about = "Adaptive first-order methods: runs, tables and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one spec (or every spec in --config) and write the CSV trace
    Run(RunArgs),
    /// Iterations-to-target table for the synthetic benchmark or --config specs
    Table(TableArgs),
    /// Run the diagnostics suite; exits 2 if any check fails
    Check(CheckArgs),
    /// Per-algorithm value series for plotting
    Plotdata(PlotArgs),
}

#[derive(Args, Default)]
struct SpecFlags {
    /// Algorithm id, e.g. adaacsa or adagrad+:scalar:stoch
    #[arg(long)]
    algo: Option<String>,
    /// Problem spec, e.g. nesterov:n=100 or diagquad:beta=1,10,100
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// SGD momentum
    #[arg(long)]
    momentum: Option<f64>,
    /// Comma-separated error targets
    #[arg(long)]
    targets: Option<String>,
    /// Config file: one run per line as key=value pairs
    #[arg(long)]
    config: Option<PathBuf>,
}

impl SpecFlags {
    fn pairs(&self) -> Vec<(String, String)> {
        let mut v = Vec::new();
        let mut push = |k: &str, val: Option<String>| {
            if let Some(val) = val {
                v.push((k.to_string(), val));
            }
        };
        push("algo", self.algo.clone());
        push("problem", self.problem.clone());
        push("iters", self.iters.map(|x| x.to_string()));
        push("eta", self.eta.map(|x| x.to_string()));
        push("radius", self.radius.map(|x| x.to_string()));
        push("sigma", self.sigma.map(|x| x.to_string()));
        push("seed", self.seed.map(|x| x.to_string()));
        push("momentum", self.momentum.map(|x| x.to_string()));
        push("targets", self.targets.clone());
        v
    }

    /// Specs from the config file with flags layered on top, or a single
    /// spec from the flags alone.
    fn specs(&self) -> Result<Option<Vec<RunSpec>>, Error> {
        let cli = self.pairs();
        match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                let lines = parse_config(&text)?;
                if lines.is_empty() {
                    return Err(Error::Parse(format!("{}: no runs", path.display())));
                }
                lines.iter().map(|l| build_spec(&[l, &cli])).collect::<Result<Vec<_>, _>>().map(Some)
            }
            None if self.algo.is_some() || self.problem.is_some() => Ok(Some(vec![build_spec(&[&cli])?])),
            None => Ok(None),
        }
    }

    fn targets(&self) -> Result<Vec<f64>, Error> {
        self.targets.as_deref().map_or(Ok(DEFAULT_TARGETS.to_vec()), parse_targets)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    spec: SpecFlags,
    /// Output file (one spec) or directory (several); stdout if omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    spec: SpecFlags,
    /// Write the table JSON here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Build the table from previously saved traces instead of running
    #[arg(long)]
    traces_in: Option<PathBuf>,
    /// Save the traces the table was built from
    #[arg(long)]
    traces_out: Option<PathBuf>,
}

#[derive(Args)]
struct CheckArgs {
    /// Write the check results as JSON here
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    spec: SpecFlags,
    /// Directory for the series files
    #[arg(long)]
    out: PathBuf,
}

fn write(path: &Path, body: &str) -> Result<(), Error> {
    fs::write(path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn cmd_run(args: RunArgs) -> Result<(), Error> {
    let specs = args.spec.specs()?.ok_or(Error::Missing("algo and problem (or --config)"))?;
    let traces = run_all(&specs)?;
    match (&args.out, traces.as_slice()) {
        (None, [one]) => print!("{}", csv_string(&one.rows)),
        (None, _) => return Err(Error::Missing("--out directory for several runs")),
        (Some(path), [one]) => write(path, &csv_string(&one.rows))?,
        (Some(dir), many) => {
            fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
            for (k, tr) in many.iter().enumerate() {
                let name = format!("{k}-{}", adaopt::harness::series_file_name(&tr.algo));
                write(&dir.join(name), &csv_string(&tr.rows))?;
            }
        }
    }
    Ok(())
}

fn cmd_table(args: TableArgs) -> Result<(), Error> {
    let targets = args.spec.targets()?;
    let traces = match &args.traces_in {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            traces_from_json(&text)?
        }
        None => run_all(&args.spec.specs()?.unwrap_or_else(synthetic_specs))?,
    };
    if let Some(path) = &args.traces_out {
        write(path, &traces_to_json(&traces))?;
    }
    let table = build_table(&traces, &targets)?;
    print!("{}", table.render_text());
    if let Some(path) = &args.out {
        write(path, &table.to_json())?;
    }
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<(), Error> {
    let traces = run_all(&args.spec.specs()?.unwrap_or_else(synthetic_specs))?;
    for p in emit_plot_data(&traces, &args.out)? {
        println!("{}", p.display());
    }
    Ok(())
}

fn cmd_check(args: CheckArgs) -> Result<bool, Error> {
    let results = run_checks()?;
    for r in &results {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    if let Some(path) = &args.out {
        write(path, &serde_json::to_string_pretty(&results).expect("results serialize"))?;
    }
    Ok(results.iter().all(|r| r.passed))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a).map(|_| true),
        Command::Table(a) => cmd_table(a).map(|_| true),
        Command::Plotdata(a) => cmd_plot(a).map(|_| true),
        Command::Check(a) => cmd_check(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
