use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::run::{iterations_to_target, RunTrace, TraceRow};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "t,value,trace_d,movement";

/// 17 significant digits, enough for an exact `f64` round trip.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn csv_string(rows: &[TraceRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{},{},{},{}", r.t, num(r.value), num(r.trace_d), num(r.movement));
    }
    out
}

pub fn parse_csv(text: &str) -> Result<Vec<TraceRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == CSV_HEADER => {}
        other => return Err(Error::Parse(format!("bad CSV header {other:?}"))),
    }
    let mut rows = Vec::new();
    for (k, line) in lines.enumerate() {
        let bad = || Error::Parse(format!("bad CSV row {}: '{line}'", k + 2));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(bad());
        }
        let float = |s: &str| s.parse::<f64>().map_err(|_| bad());
        rows.push(TraceRow {
            t: f[0].parse().map_err(|_| bad())?,
            value: float(f[1])?,
            trace_d: float(f[2])?,
            movement: float(f[3])?,
        });
    }
    Ok(rows)
}

pub fn emit_csv(trace: &RunTrace, path: &Path) -> Result<()> {
    fs::write(path, csv_string(&trace.rows)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Iterations-to-target table over a set of traces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetTable {
    pub targets: Vec<f64>,
    pub rows: Vec<TableRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub algo: String,
    pub problem: String,
    /// first iteration at or below each target; `None` if never reached
    pub hits: Vec<Option<usize>>,
}

/// Pure function of the traces: the same traces always give the same table.
pub fn build_table(traces: &[RunTrace], targets: &[f64]) -> Result<TargetTable> {
    let rows = traces
        .iter()
        .map(|tr| {
            Ok(TableRow {
                algo: tr.algo.clone(),
                problem: tr.problem.clone(),
                hits: iterations_to_target(tr, targets)?.into_iter().map(|h| h.iteration).collect(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(TargetTable { targets: targets.to_vec(), rows })
}

impl TargetTable {
    pub fn render_text(&self) -> String {
        let mut header = vec!["algorithm".to_string()];
        header.extend(self.targets.iter().map(|t| format!("{t:e}")));
        let mut cells: Vec<Vec<String>> = vec![header];
        for r in &self.rows {
            let mut line = vec![r.algo.clone()];
            line.extend(r.hits.iter().map(|h| h.map_or_else(|| "-".to_string(), |t| t.to_string())));
            cells.push(line);
        }
        let cols = cells[0].len();
        let widths: Vec<usize> = (0..cols).map(|c| cells.iter().map(|l| l[c].len()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for line in &cells {
            let parts: Vec<String> = line
                .iter()
                .enumerate()
                .map(|(c, s)| if c == 0 { format!("{s:<w$}", w = widths[c]) } else { format!("{s:>w$}", w = widths[c]) })
                .collect();
            out.push_str(parts.join("  ").trim_end());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }
}

/// File name for an algorithm's series: `+` and `:` are spelled out.
pub fn series_file_name(algo: &str) -> String {
    let mut s = algo.replace('+', "_plus").replace(':', "_");
    s.push_str(".csv");
    s
}

/// Writes one `t,value` CSV per trace into `dir`. Repeated algorithm ids get
/// a numeric suffix.
pub fn emit_plot_data(traces: &[RunTrace], dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut written: Vec<std::path::PathBuf> = Vec::new();
    for tr in traces {
        let mut path = dir.join(series_file_name(&tr.algo));
        let mut k = 2;
        while written.contains(&path) {
            path = dir.join(series_file_name(&format!("{}-{k}", tr.algo)));
            k += 1;
        }
        let mut body = String::from("t,value\n");
        for r in &tr.rows {
            let _ = writeln!(body, "{},{}", r.t, num(r.value));
        }
        fs::write(&path, body).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}

pub fn traces_to_json(traces: &[RunTrace]) -> String {
    serde_json::to_string(traces).expect("traces serialize")
}

pub fn traces_from_json(text: &str) -> Result<Vec<RunTrace>> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}
