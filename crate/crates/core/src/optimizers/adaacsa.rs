use super::{
    check_constrained_start, check_query, squared_diff, OptimizerConfig, Optimizer, RadiusNorm, ScalingStep,
    StepReport, StepSizes,
};
use crate::error::Result;
use crate::geometry::{project_weighted, DiagonalScaling, FeasibleSet, Point, ScalingMode};
use crate::problems::Oracle;
use crate::scalar::Scalar;

/// Accelerated adaptive method built on AC-SA:
///
/// ```text
/// x_t     = (1 - 1/α_t) y_t + (1/α_t) z_t
/// z_{t+1} = argmin_{u in K} γ_t <g(x_t), u> + 1/2 ||u - z_t||_{D_t}^2
/// y_{t+1} = (1 - 1/α_t) y_t + (1/α_t) z_{t+1}
/// D_{t+1} grown from z_{t+1} - z_t
/// ```
///
/// Returns `y_T`.
#[derive(Clone, Debug)]
pub struct AdaAcsa<T: Scalar> {
    x: Point<T>,
    y: Point<T>,
    z: Point<T>,
    scaling: DiagonalScaling<T>,
    steps: StepSizes<T>,
    set: FeasibleSet<T>,
    cfg: OptimizerConfig<T>,
}

impl<T: Scalar> AdaAcsa<T> {
    /// Starts from `y_0 = z_0 = x0`.
    ///
    /// The radius is checked against the ℓ∞ diameter in both scaling modes;
    /// which diameter the scalar variant should use is left to the caller.
    pub fn new(x0: Point<T>, set: FeasibleSet<T>, cfg: OptimizerConfig<T>) -> Result<Self> {
        check_constrained_start(&x0, &set, &cfg, RadiusNorm::Linf)?;
        let d = x0.dim();
        Ok(AdaAcsa {
            x: x0.clone(),
            y: x0.clone(),
            z: x0,
            scaling: DiagonalScaling::identity(d, cfg.scaling),
            steps: cfg.schedule.start(),
            set,
            cfg,
        })
    }

    pub fn y(&self) -> &Point<T> {
        &self.y
    }

    pub fn z(&self) -> &Point<T> {
        &self.z
    }

    /// `x_t` of the last completed iteration (`x_0 = z_0` before the first).
    pub fn x(&self) -> &Point<T> {
        &self.x
    }
}

impl<T: Scalar> Optimizer<T> for AdaAcsa<T> {
    fn name(&self) -> &'static str {
        match self.cfg.scaling {
            ScalingMode::PerCoordinate => "adaacsa",
            ScalingMode::Scalar => "adaacsa:scalar",
        }
    }

    fn step(&mut self, oracle: &mut dyn Oracle<T>) -> Result<StepReport<T>> {
        let (alpha, gamma) = self.steps.current();
        let w = T::one() / alpha;
        let x = Point::lerp(&self.y, &self.z, w);
        let g = oracle.query(&x);
        check_query(&g, x.dim())?;

        let scaled = g.scaled(gamma * self.cfg.gradient_scale());
        let z_next = project_weighted(&scaled, &self.z, &self.scaling, &self.set)?;
        let y_next = Point::lerp(&self.y, &z_next, w);

        let movement_sq = squared_diff(&z_next, &self.z);
        let denom = self.cfg.movement_denom();
        self.scaling.grow_by_movement(&movement_sq, denom);
        let movement = movement_sq.iter().copied().sum::<T>().sqrt();

        self.x = x;
        self.y = y_next;
        self.z = z_next;
        self.steps.advance();
        Ok(StepReport { movement, scaling: Some(ScalingStep::new(self.cfg.scaling, movement_sq, denom)) })
    }

    fn solution(&self) -> Point<T> {
        self.y.clone()
    }

    fn scaling(&self) -> Option<&DiagonalScaling<T>> {
        Some(&self.scaling)
    }

    fn iteration(&self) -> usize {
        self.steps.t()
    }

    fn iterates(&self) -> Vec<(&'static str, &Point<T>)> {
        vec![("x", &self.x), ("y", &self.y), ("z", &self.z)]
    }
}
