//! Adaptive first-order methods behind one stepping interface.
//!
//! Every method is a state machine built from a starting point, the feasible
//! set and an [`OptimizerConfig`]; [`Optimizer::step`] runs one iteration of
//! the method against an [`Oracle`] and [`Optimizer::solution`] returns the
//! point the method reports (a running average or the last `y`).
//!
//! Constrained methods grow `D` from the iterate movement,
//! `D_i^2 <- D_i^2 (1 + m_i^2 / (c R^2))`, with `c = 1` for exact gradients
//! and `c = 2` for the stochastic variants. The learning rate `η` enters as
//! a gradient scale `η / R` in front of each prox step, so the default
//! `η = R` is exactly the textbook update.

mod adaacsa;
mod adaagd_plus;
mod adagrad;
mod adagrad_plus;
mod adamp;
mod lincoup;
mod sgd;

pub use adaacsa::AdaAcsa;
pub use adaagd_plus::AdaAgdPlus;
pub use adagrad::AdaGrad;
pub use adagrad_plus::AdaGradPlus;
pub use adamp::AdaMirrorProx;
pub use lincoup::LinearCouplingAcsa;
pub use sgd::SgdMomentum;

use crate::error::{Error, Result};
use crate::geometry::{DiagonalScaling, FeasibleSet, Point, ScalingMode};
use crate::problems::Oracle;
use crate::scalar::Scalar;

/// Step sizes `α_t`, `γ_t` of the accelerated methods.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StepSizeSchedule {
    /// `α_t = γ_t = 1 + t/3`
    #[default]
    Standard,
    /// `α_0 = 1`, `α_{t+1} = (1 + sqrt(1 + 4 α_t^2)) / 2`, `γ_t = α_t`
    Optimized,
}

impl StepSizeSchedule {
    pub fn start<T: Scalar>(self) -> StepSizes<T> {
        StepSizes { kind: self, t: 0, alpha: T::one() }
    }
}

/// Iterator state of a [`StepSizeSchedule`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepSizes<T> {
    kind: StepSizeSchedule,
    t: usize,
    alpha: T,
}

impl<T: Scalar> StepSizes<T> {
    pub fn t(&self) -> usize {
        self.t
    }

    /// `(α_t, γ_t)`
    pub fn current(&self) -> (T, T) {
        (self.alpha, self.alpha)
    }

    pub fn advance(&mut self) {
        self.t += 1;
        self.alpha = match self.kind {
            StepSizeSchedule::Standard => T::one() + T::lit(self.t as f64) / T::lit(3.0),
            StepSizeSchedule::Optimized => optimized_next(self.alpha),
        };
    }
}

/// `(1 + sqrt(1 + 4 a^2)) / 2`, the positive root of `(b - 1) b = a^2`.
pub fn optimized_next<T: Scalar>(a: T) -> T {
    (T::one() + (T::one() + T::lit(4.0) * a * a).sqrt()) / T::lit(2.0)
}

/// Constant in the movement-based `D` update.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MovementDenominator {
    /// `R^2`, exact gradients
    #[default]
    OneR2,
    /// `2 R^2`, stochastic gradients
    TwoR2,
}

impl MovementDenominator {
    pub fn denom<T: Scalar>(self, radius: T) -> T {
        match self {
            MovementDenominator::OneR2 => radius * radius,
            MovementDenominator::TwoR2 => T::lit(2.0) * radius * radius,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizerConfig<T> {
    /// `R∞` (per-coordinate) or `R₂` (scalar); must bound the set's diameter.
    pub radius: T,
    /// Learning rate; the prox gradient is scaled by `eta / radius`.
    pub eta: T,
    pub scaling: ScalingMode,
    pub denominator: MovementDenominator,
    pub schedule: StepSizeSchedule,
}

impl<T: Scalar> OptimizerConfig<T> {
    /// Defaults: `η = R`, per-coordinate scaling, exact-gradient constant,
    /// standard schedule.
    pub fn new(radius: T) -> Self {
        OptimizerConfig {
            radius,
            eta: radius,
            scaling: ScalingMode::PerCoordinate,
            denominator: MovementDenominator::OneR2,
            schedule: StepSizeSchedule::Standard,
        }
    }

    pub fn with_eta(mut self, eta: T) -> Self {
        self.eta = eta;
        self
    }

    pub fn with_scaling(mut self, scaling: ScalingMode) -> Self {
        self.scaling = scaling;
        self
    }

    pub fn with_denominator(mut self, denominator: MovementDenominator) -> Self {
        self.denominator = denominator;
        self
    }

    pub fn with_schedule(mut self, schedule: StepSizeSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > T::zero()) {
            return Err(Error::InvalidParameter(format!("radius = {}", self.radius)));
        }
        if !(self.eta.is_finite() && self.eta > T::zero()) {
            return Err(Error::InvalidParameter(format!("eta = {}", self.eta)));
        }
        Ok(())
    }

    /// Multiplier applied to gradients before each prox step.
    pub fn gradient_scale(&self) -> T {
        self.eta / self.radius
    }

    pub fn movement_denom(&self) -> T {
        self.denominator.denom(self.radius)
    }
}

/// Which diameter a method's radius has to dominate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum RadiusNorm {
    Linf,
    L2,
}

/// Common checks for the constrained methods' starting state.
pub(crate) fn check_constrained_start<T: Scalar>(
    x0: &Point<T>,
    set: &FeasibleSet<T>,
    cfg: &OptimizerConfig<T>,
    norm: RadiusNorm,
) -> Result<()> {
    cfg.validate()?;
    if !set.is_constrained() {
        return Err(Error::UnsupportedDomain { required: "constrained", got: set.kind() });
    }
    if let Some(d) = set.dim() {
        if d != x0.dim() {
            return Err(Error::DimensionMismatch { expected: d, got: x0.dim() });
        }
    }
    if !x0.is_finite() {
        return Err(Error::NonFinite("starting point"));
    }
    if !set.contains(x0, T::zero()) {
        return Err(Error::Infeasible);
    }
    let diameter = match norm {
        RadiusNorm::Linf => set.linf_diameter(),
        RadiusNorm::L2 => set.l2_diameter(),
    };
    if cfg.radius < diameter * (T::one() - T::lit(1e-12)) {
        return Err(Error::InvalidParameter(format!(
            "radius {} is smaller than the feasible set's diameter {}",
            cfg.radius, diameter
        )));
    }
    Ok(())
}

pub(crate) fn check_unconstrained_start<T: Scalar>(x0: &Point<T>, set: &FeasibleSet<T>) -> Result<()> {
    if set.is_constrained() {
        return Err(Error::UnsupportedDomain { required: "unconstrained", got: set.kind() });
    }
    if !x0.is_finite() {
        return Err(Error::NonFinite("starting point"));
    }
    Ok(())
}

pub(crate) fn check_query<T: Scalar>(g: &Point<T>, dim: usize) -> Result<()> {
    if g.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: g.dim() });
    }
    if !g.is_finite() {
        return Err(Error::NonFinite("oracle output"));
    }
    Ok(())
}

pub(crate) fn squared_diff<T: Scalar>(a: &Point<T>, b: &Point<T>) -> Vec<T> {
    a.iter().zip(b.iter()).map(|(&x, &y)| (x - y) * (x - y)).collect()
}

/// What the scaling update of one step consumed, in the form
/// `D_{t+1}^2 = D_t^2 (1 + movement_sq / denom)` (per coordinate, or a single
/// summed entry in scalar mode).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalingStep<T> {
    pub movement_sq: Vec<T>,
    pub denom: T,
}

impl<T: Scalar> ScalingStep<T> {
    pub(crate) fn new(mode: ScalingMode, movement_sq: Vec<T>, denom: T) -> Self {
        let movement_sq = match mode {
            ScalingMode::PerCoordinate => movement_sq,
            ScalingMode::Scalar => vec![movement_sq.iter().copied().sum()],
        };
        ScalingStep { movement_sq, denom }
    }

    /// Additive update `D^2 <- D^2 + c v^2` rewritten multiplicatively
    /// against the pre-update scaling.
    pub(crate) fn additive(before: &DiagonalScaling<T>, v: &[T], c: T) -> Self {
        let movement_sq = match before.mode() {
            ScalingMode::PerCoordinate => v
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let w = before.weight(i);
                    c * x * x / (w * w)
                })
                .collect(),
            ScalingMode::Scalar => {
                let w = before.weight(0);
                vec![c * v.iter().map(|&x| x * x).sum::<T>() / (w * w)]
            }
        };
        ScalingStep { movement_sq, denom: T::one() }
    }
}

/// Per-step record returned by [`Optimizer::step`].
#[derive(Clone, Debug, PartialEq)]
pub struct StepReport<T> {
    /// ℓ2 norm of the movement that drives the `D` update.
    pub movement: T,
    pub scaling: Option<ScalingStep<T>>,
}

pub trait Optimizer<T: Scalar> {
    fn name(&self) -> &'static str;

    fn step(&mut self, oracle: &mut dyn Oracle<T>) -> Result<StepReport<T>>;

    /// The point the method returns after the iterations run so far.
    fn solution(&self) -> Point<T>;

    /// Current preconditioner, if the method has one.
    fn scaling(&self) -> Option<&DiagonalScaling<T>>;

    /// Iteration counter in the method's own indexing.
    fn iteration(&self) -> usize;

    /// Every point the state currently stores, for feasibility checks.
    fn iterates(&self) -> Vec<(&'static str, &Point<T>)>;
}
