//! Executable checks for the scaling recurrence, convergence rates and
//! trace agreement.
//!
//! Everything here works in `f64`; optimizer output in other precisions is
//! widened before it gets here.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{FeasibleSet, Point};
use crate::optimizers::StepReport;
use crate::problems::MonotoneOp;
use crate::scalar::Scalar;

/// Relative slack used by every inequality check.
pub const REL_SLACK: f64 = 1e-9;

/// A sequence generated by `D_{t+1}^2 = D_t^2 (1 + d_t^2 / R^2)`.
///
/// `D` is always computed here from `d_t^2`, never taken from the caller, so
/// the recurrence holds by construction.
#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceTrace {
    r_sq: f64,
    d_sq: Vec<f64>,
    big_d: Vec<f64>,
}

impl RecurrenceTrace {
    pub fn generate(r_sq: f64, d0: f64, d_sq: Vec<f64>) -> Result<Self> {
        if !(r_sq.is_finite() && r_sq > 0.0) {
            return Err(Error::InvalidParameter(format!("R^2 = {r_sq}")));
        }
        if !(d0.is_finite() && d0 > 0.0) {
            return Err(Error::InvalidParameter(format!("D_0 = {d0}")));
        }
        if d_sq.iter().any(|&x| !(x.is_finite() && x >= 0.0)) {
            return Err(Error::NonFinite("movement sequence"));
        }
        let mut big_d = Vec::with_capacity(d_sq.len() + 1);
        big_d.push(d0);
        for (t, &x) in d_sq.iter().enumerate() {
            big_d.push(big_d[t] * (1.0 + x / r_sq).sqrt());
        }
        Ok(RecurrenceTrace { r_sq, d_sq, big_d })
    }

    pub fn r_sq(&self) -> f64 {
        self.r_sq
    }

    /// Number of steps; `D` has one more entry.
    pub fn len(&self) -> usize {
        self.d_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d_sq.is_empty()
    }

    pub fn d_sq(&self) -> &[f64] {
        &self.d_sq
    }

    /// `D_0, ..., D_n`.
    pub fn scaling(&self) -> &[f64] {
        &self.big_d
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceReport {
    pub window: (usize, usize),
    /// Whether every `d_t^2 <= R^2` on the window, the hypothesis of the
    /// upper and logarithmic bounds. When false those two are reported as
    /// holding vacuously.
    pub bounded_steps: bool,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub log_ok: bool,
    /// `lhs - rhs`, `rhs - lhs`, `rhs - lhs`: positive means room to spare.
    pub lower_margin: f64,
    pub upper_margin: f64,
    pub log_margin: f64,
}

impl RecurrenceReport {
    pub fn all_ok(&self) -> bool {
        self.lower_ok && self.upper_ok && self.log_ok
    }
}

fn holds(small: f64, large: f64) -> bool {
    small <= large + REL_SLACK * small.abs().max(large.abs())
}

/// Checks, over `[a, b)`,
///
/// ```text
/// sum D_t d_t^2 >= 2 R^2 (D_b - D_a)
/// sum D_t d_t^2 <= (sqrt(2) + 1) R^2 (D_b - D_a)     if every d_t^2 <= R^2
/// sum d_t^2     <= 4 R^2 ln(D_b / D_a)               if every d_t^2 <= R^2
/// ```
///
/// Sums are taken directly over the window, and `D_b - D_a` and
/// `ln(D_b / D_a)` are rebuilt from `ln(1 + d_t^2 / R^2)`, so late windows
/// whose steps fall below one ulp of `D` are not lost to cancellation.
pub fn check_recurrence_bounds(trace: &RecurrenceTrace, a: usize, b: usize) -> Result<RecurrenceReport> {
    if !(a < b && b <= trace.len()) {
        return Err(Error::InvalidWindow { lo: a, hi: b, len: trace.len() });
    }
    let r2 = trace.r_sq;
    let window = a..b;
    let weighted: f64 = window.clone().map(|t| trace.big_d[t] * trace.d_sq[t]).sum();
    let plain: f64 = trace.d_sq[window.clone()].iter().sum();
    let log_ratio: f64 = trace.d_sq[window.clone()].iter().map(|&x| 0.5 * (x / r2).ln_1p()).sum();
    let growth = trace.big_d[a] * log_ratio.exp_m1();
    let bounded_steps = trace.d_sq[window].iter().all(|&x| x <= r2);

    let lower = 2.0 * r2 * growth;
    let upper = (2f64.sqrt() + 1.0) * r2 * growth;
    let log = 4.0 * r2 * log_ratio;
    Ok(RecurrenceReport {
        window: (a, b),
        bounded_steps,
        lower_ok: holds(lower, weighted),
        upper_ok: !bounded_steps || holds(weighted, upper),
        log_ok: !bounded_steps || holds(plain, log),
        lower_margin: weighted - lower,
        upper_margin: upper - weighted,
        log_margin: log - plain,
    })
}

/// Runs [`check_recurrence_bounds`] over the full window, every prefix and
/// every suffix ending at a roughly geometric grid of indices. Returns the
/// first failing report, or `None`.
pub fn find_recurrence_violation(trace: &RecurrenceTrace) -> Result<Option<RecurrenceReport>> {
    let n = trace.len();
    if n == 0 {
        return Ok(None);
    }
    let mut cuts: Vec<usize> = Vec::new();
    let mut c = 1usize;
    while c < n {
        cuts.push(c);
        c = (c + 1).max(c * 5 / 4);
    }
    cuts.push(n);
    for &b in &cuts {
        let r = check_recurrence_bounds(trace, 0, b)?;
        if !r.all_ok() {
            return Ok(Some(r));
        }
    }
    for &a in &cuts[..cuts.len() - 1] {
        let r = check_recurrence_bounds(trace, a, n)?;
        if !r.all_ok() {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// Collects the movement each step fed into the scaling update and rebuilds
/// one [`RecurrenceTrace`] per stored scaling entry.
#[derive(Clone, Debug, Default)]
pub struct ScalingRecorder {
    denom: Option<f64>,
    per_entry: Vec<Vec<f64>>,
    mixed_denominators: bool,
}

impl ScalingRecorder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record<T: Scalar>(&mut self, report: &StepReport<T>) {
        let Some(step) = &report.scaling else { return };
        let denom = step.denom.to_f64_lossy();
        match self.denom {
            None => self.denom = Some(denom),
            Some(d) if d != denom => self.mixed_denominators = true,
            _ => {}
        }
        if self.per_entry.is_empty() {
            self.per_entry = vec![Vec::new(); step.movement_sq.len()];
        }
        for (seq, &m) in self.per_entry.iter_mut().zip(&step.movement_sq) {
            seq.push(m.to_f64_lossy());
        }
    }

    pub fn steps(&self) -> usize {
        self.per_entry.first().map_or(0, Vec::len)
    }

    /// One trace per scaling entry, all starting from `D_0 = 1`.
    pub fn traces(&self) -> Result<Vec<RecurrenceTrace>> {
        if self.mixed_denominators {
            return Err(Error::InvalidParameter("scaling denominator changed mid-run".into()));
        }
        let Some(denom) = self.denom else { return Ok(Vec::new()) };
        self.per_entry
            .iter()
            .map(|seq| RecurrenceTrace::generate(denom, 1.0, seq.clone()))
            .collect()
    }
}

/// Least-squares fit of `ln(error) = intercept + slope ln(t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SlopeEstimate {
    pub slope: f64,
    pub intercept: f64,
    /// inclusive `[t_lo, t_hi]`
    pub window: (usize, usize),
}

/// Fits over `t` in `[ceil(window_fraction * T), T]`, where `errors[k]` is
/// the error at `t = k + 1` and `T = errors.len()`.
pub fn estimate_rate(errors: &[f64], window_fraction: f64) -> Result<SlopeEstimate> {
    if !(window_fraction > 0.0 && window_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!("window fraction {window_fraction}")));
    }
    let n = errors.len();
    let lo = ((window_fraction * n as f64).ceil() as usize).max(1);
    fit_window(errors, lo, n)
}

/// Fits over the inclusive window `[t_lo, t_hi]` (1-based `t`).
pub fn fit_window(errors: &[f64], t_lo: usize, t_hi: usize) -> Result<SlopeEstimate> {
    if !(1 <= t_lo && t_lo < t_hi && t_hi <= errors.len()) {
        return Err(Error::InvalidWindow { lo: t_lo, hi: t_hi, len: errors.len() });
    }
    let mut pts = Vec::with_capacity(t_hi - t_lo + 1);
    for t in t_lo..=t_hi {
        let e = errors[t - 1];
        if !(e > 0.0) || !e.is_finite() {
            return Err(Error::NonPositiveError(t));
        }
        pts.push(((t as f64).ln(), e.ln()));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    Ok(SlopeEstimate { slope, intercept: my - slope * mx, window: (t_lo, t_hi) })
}

/// [`estimate_rate`], shrinking the horizon to just before the first
/// non-positive error when the run has already hit machine precision.
pub fn estimate_rate_shrinking(errors: &[f64], window_fraction: f64) -> Result<SlopeEstimate> {
    let mut horizon = errors.len();
    loop {
        match estimate_rate(&errors[..horizon], window_fraction) {
            Err(Error::NonPositiveError(t)) => horizon = t - 1,
            other => return other,
        }
    }
}

/// Rate guarantees that can be checked against a trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RateBound {
    /// `O(R^2 sum β_i ln(2 β_i) / T)`
    AdaGradPlusSmooth,
    /// `O(R^2 sum β_i ln(2 β_i) / T^2)`
    AdaAcsaSmooth,
    /// `O(R^2 sum β_i ln(2 β_i) / T^2)`
    AdaAgdPlusSmooth,
    /// `f(x̄_T) - f* <= R^2 sum β_i / T`, constant exactly 1
    AdaGradUnconstrained,
    /// `O(R^2 sum β_i ln(2 β_i) / T)` on the duality gap
    AdaMpSmooth,
}

impl RateBound {
    pub fn power(self) -> i32 {
        match self {
            RateBound::AdaAcsaSmooth | RateBound::AdaAgdPlusSmooth => 2,
            _ => 1,
        }
    }

    pub fn is_explicit(self) -> bool {
        self == RateBound::AdaGradUnconstrained
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound: RateBound,
    pub holds: bool,
    /// Explicit bound: largest `error / bound` seen. Otherwise the largest
    /// normalized ratio over the final decade (the fitted constant).
    pub constant: f64,
    /// Explicit bound: first `t` with error above the bound.
    pub first_violation: Option<usize>,
    /// Maxima of the normalized ratio over log-spaced blocks of the final
    /// decade; must be non-increasing for an `O(.)` bound to pass.
    pub block_maxima: Vec<f64>,
}

/// Checks a rate claim on `errors[k]` = error at `t = k + 1`.
///
/// The explicit bound is tested at every `t`. For the `O(.)` bounds the
/// normalized ratio `error * t^p / (R^2 sum β_i ln(2 β_i))` is split into ten
/// log-spaced blocks over `[T/10, T]`, and the block maxima must not increase
/// (relative slack `1e-9`). Non-positive errors count as zero.
pub fn check_rate_bound(errors: &[f64], bound: RateBound, radius: f64, beta: &[f64]) -> Result<BoundReport> {
    if beta.is_empty() {
        return Err(Error::Missing("smoothness"));
    }
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!("radius = {radius}")));
    }
    let n = errors.len();
    let r2 = radius * radius;
    if bound.is_explicit() {
        let scale = r2 * beta.iter().sum::<f64>();
        let mut constant = 0.0f64;
        let mut first_violation = None;
        for (k, &e) in errors.iter().enumerate() {
            let t = (k + 1) as f64;
            let ratio = e.max(0.0) * t / scale;
            constant = constant.max(ratio);
            if first_violation.is_none() && !holds(ratio, 1.0) {
                first_violation = Some(k + 1);
            }
        }
        return Ok(BoundReport {
            bound,
            holds: first_violation.is_none(),
            constant,
            first_violation,
            block_maxima: Vec::new(),
        });
    }

    if n < 10 {
        return Err(Error::InvalidWindow { lo: 1, hi: n, len: n });
    }
    let scale = r2 * beta.iter().map(|&b| b * (2.0 * b).ln()).sum::<f64>();
    let p = bound.power();
    let ratio = |t: usize| errors[t - 1].max(0.0) * (t as f64).powi(p) / scale;
    let start = (n / 10).max(1);
    let mut edges: Vec<usize> = (0..=10).map(|k| (start as f64 * 10f64.powf(k as f64 / 10.0)).round() as usize).collect();
    edges[10] = n;
    edges.dedup();
    let mut block_maxima = Vec::new();
    for w in edges.windows(2) {
        let lo = w[0];
        let hi = w[1];
        let m = (lo..=hi.min(n)).map(ratio).fold(0.0f64, f64::max);
        block_maxima.push(m);
    }
    let holds_all = block_maxima.windows(2).all(|w| holds(w[1], w[0]));
    Ok(BoundReport {
        bound,
        holds: holds_all,
        constant: block_maxima.iter().copied().fold(0.0, f64::max),
        first_violation: None,
        block_maxima,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceComparison {
    pub max_deviation: f64,
    /// index of the step with the largest deviation
    pub worst_step: usize,
    pub within: bool,
}

/// `max_t ||a_t - b_t||_∞`.
pub fn compare_traces<T: Scalar>(a: &[Point<T>], b: &[Point<T>], tol: f64) -> Result<TraceComparison> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    let mut max_deviation = 0.0f64;
    let mut worst_step = 0;
    for (k, (pa, pb)) in a.iter().zip(b).enumerate() {
        if pa.dim() != pb.dim() {
            return Err(Error::DimensionMismatch { expected: pa.dim(), got: pb.dim() });
        }
        let dev = pa.dist_inf(pb).to_f64_lossy();
        if dev.is_nan() {
            return Err(Error::NonFinite("trace entry"));
        }
        if dev > max_deviation {
            max_deviation = dev;
            worst_step = k;
        }
    }
    Ok(TraceComparison { max_deviation, worst_step, within: max_deviation <= tol })
}

/// Averaged regret of the iterates against the best fixed point of `set`:
///
/// ```text
/// max_{u in K} (1/T) sum_t <F(x_t), x_t - u>
/// ```
///
/// For a monotone `F` this upper-bounds the duality gap of the average
/// `(1/T) sum_t x_t`, which is how a regret guarantee becomes a convergence
/// guarantee.
pub fn averaged_regret<M: MonotoneOp<f64> + ?Sized>(op: &M, points: &[Point<f64>], set: &FeasibleSet<f64>) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Missing("iterates"));
    }
    let d = op.dim();
    let mut lin = 0.0;
    let mut total = Point::zeros(d);
    for x in points {
        if x.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: x.dim() });
        }
        let f = op.apply(x);
        lin += f.dot(x);
        total.add_scaled(1.0, &f);
    }
    // min over K of <total, u>
    let min_lin = match set {
        FeasibleSet::Unconstrained => {
            return Err(Error::UnsupportedDomain { required: "constrained", got: "unconstrained" });
        }
        FeasibleSet::Box { lower, upper } => (0..d).map(|i| (total[i] * lower[i]).min(total[i] * upper[i])).sum(),
        FeasibleSet::Ball { center, radius } => total.dot(center) - radius * total.norm2(),
    };
    Ok((lin - min_lin) / points.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::BilinearGame;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_steps_hold_with_equality() {
        let tr = RecurrenceTrace::generate(2.0, 1.0, vec![0.0; 10]).unwrap();
        let r = check_recurrence_bounds(&tr, 0, 10).unwrap();
        assert!(r.all_ok() && r.bounded_steps);
        assert_eq!((r.lower_margin, r.upper_margin, r.log_margin), (0.0, 0.0, 0.0));
    }

    #[test]
    fn single_full_step_is_tight_above() {
        let r2 = 3.0;
        let tr = RecurrenceTrace::generate(r2, 1.0, vec![r2]).unwrap();
        assert_eq!(tr.scaling()[1], 2f64.sqrt());
        let r = check_recurrence_bounds(&tr, 0, 1).unwrap();
        assert!(r.all_ok());
        // lhs = R^2; lower = 2 R^2 (sqrt 2 - 1); upper = R^2 exactly
        assert!((r.lower_margin - r2 * (1.0 - 2.0 * (2f64.sqrt() - 1.0))).abs() < 1e-12);
        assert!(r.upper_margin.abs() < 1e-12);
    }

    #[test]
    fn random_sequences_satisfy_all_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let r2 = rng.random_range(0.01..10.0);
            let len = rng.random_range(1..=200);
            let d0 = rng.random_range(1.0..5.0);
            let seq = (0..len).map(|_| rng.random_range(0.0..=r2)).collect();
            let tr = RecurrenceTrace::generate(r2, d0, seq).unwrap();
            let a = rng.random_range(0..len);
            let b = rng.random_range(a + 1..=len);
            let r = check_recurrence_bounds(&tr, a, b).unwrap();
            assert!(r.all_ok() && r.bounded_steps, "{r:?}");
            assert_eq!(find_recurrence_violation(&tr).unwrap(), None);
        }
    }

    #[test]
    fn large_steps_only_need_the_lower_bound() {
        let tr = RecurrenceTrace::generate(1.0, 1.0, vec![50.0, 0.0, 900.0]).unwrap();
        let r = check_recurrence_bounds(&tr, 0, 3).unwrap();
        assert!(!r.bounded_steps);
        assert!(r.lower_ok);
    }

    #[test]
    fn window_validation() {
        let tr = RecurrenceTrace::generate(1.0, 1.0, vec![0.5; 4]).unwrap();
        assert!(check_recurrence_bounds(&tr, 2, 2).is_err());
        assert!(check_recurrence_bounds(&tr, 0, 5).is_err());
        assert!(RecurrenceTrace::generate(0.0, 1.0, vec![]).is_err());
        assert!(RecurrenceTrace::generate(1.0, 1.0, vec![-1.0]).is_err());
    }

    #[test]
    fn power_laws_are_recovered() {
        for p in [0.5, 1.0, 2.0] {
            let errs: Vec<f64> = (1..=5000).map(|t| 3.0 * (t as f64).powf(-p)).collect();
            let s = estimate_rate(&errs, 0.25).unwrap();
            assert!((s.slope + p).abs() < 1e-6, "p = {p}: {}", s.slope);
            assert!((s.intercept - 3f64.ln()).abs() < 1e-6);
            assert_eq!(s.window, (1250, 5000));
        }
        let flat = vec![0.7; 100];
        assert!(estimate_rate(&flat, 0.5).unwrap().slope.abs() < 1e-12);
    }

    #[test]
    fn non_positive_errors_shrink_the_window() {
        let mut errs: Vec<f64> = (1..=1000).map(|t| 1.0 / (t as f64 * t as f64)).collect();
        errs[800] = 0.0;
        assert_eq!(estimate_rate(&errs, 0.25), Err(Error::NonPositiveError(801)));
        let s = estimate_rate_shrinking(&errs, 0.25).unwrap();
        assert_eq!(s.window, (200, 800));
        assert!((s.slope + 2.0).abs() < 1e-6);
    }

    #[test]
    fn explicit_bound_constant_one() {
        let beta = [1.0, 4.0];
        // error exactly at the bound R^2 sum β / t passes, above it fails
        let at: Vec<f64> = (1..=100).map(|t| 4.0 * 5.0 / t as f64).collect();
        assert!(check_rate_bound(&at, RateBound::AdaGradUnconstrained, 2.0, &beta).unwrap().holds);
        let mut over = at.clone();
        over[49] *= 1.01;
        let r = check_rate_bound(&over, RateBound::AdaGradUnconstrained, 2.0, &beta).unwrap();
        assert_eq!(r.first_violation, Some(50));
    }

    #[test]
    fn fitted_constant_consistency() {
        let beta = [1.0, 10.0];
        let fast: Vec<f64> = (1..=2000).map(|t| 1.0 / (t as f64).powi(2)).collect();
        assert!(check_rate_bound(&fast, RateBound::AdaGradPlusSmooth, 1.0, &beta).unwrap().holds);
        assert!(check_rate_bound(&fast, RateBound::AdaAcsaSmooth, 1.0, &beta).unwrap().holds);
        let slow: Vec<f64> = (1..=2000).map(|t| 1.0 / (t as f64)).collect();
        assert!(!check_rate_bound(&slow, RateBound::AdaAcsaSmooth, 1.0, &beta).unwrap().holds);
        let converged = vec![0.0; 2000];
        for b in [RateBound::AdaGradPlusSmooth, RateBound::AdaAgdPlusSmooth, RateBound::AdaGradUnconstrained] {
            assert!(check_rate_bound(&converged, b, 1.0, &beta).unwrap().holds);
        }
        assert_eq!(check_rate_bound(&fast, RateBound::AdaMpSmooth, 1.0, &[]), Err(Error::Missing("smoothness")));
    }

    #[test]
    fn trace_comparison() {
        let a = vec![Point::from_f64(&[1.0, 2.0]), Point::from_f64(&[3.0, 4.0])];
        let mut b = a.clone();
        assert_eq!(compare_traces(&a, &b, 0.0).unwrap().max_deviation, 0.0);
        b[1][0] = 3.5;
        let c = compare_traces(&a, &b, 0.1).unwrap();
        assert_eq!((c.max_deviation, c.worst_step, c.within), (0.5, 1, false));
        assert!(compare_traces(&a, &b[..1], 0.1).is_err());
    }

    #[test]
    fn regret_bounds_the_averaged_gap() {
        let g = BilinearGame::<f64>::random(3, 3).unwrap();
        let k = g.domain();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let pts: Vec<Point<f64>> = (0..20)
                .map(|_| Point::new((0..6).map(|_| rng.random_range(-1.0..=1.0)).collect()))
                .collect();
            let mut avg = Point::zeros(6);
            for p in &pts {
                avg.add_scaled(1.0 / 20.0, p);
            }
            let gap = g.duality_gap(&avg).unwrap();
            assert!(gap <= averaged_regret(&g, &pts, &k).unwrap() + 1e-12);
        }
    }
}
