use super::{
    check_constrained_start, check_query, squared_diff, OptimizerConfig, Optimizer, RadiusNorm, ScalingStep,
    StepReport,
};
use crate::error::Result;
use crate::geometry::{project_weighted, DiagonalScaling, FeasibleSet, Point, ScalingMode};
use crate::problems::Oracle;
use crate::scalar::Scalar;

/// Constrained AdaGrad with the scaling grown from iterate movement:
///
/// ```text
/// x_{t+1}     = argmin_{x in K} <g_t, x> + 1/2 ||x - x_t||_{D_t}^2
/// D_{t+1,i}^2 = D_{t,i}^2 (1 + (x_{t+1,i} - x_{t,i})^2 / R^2)
/// ```
///
/// Returns the average of `x_1, ..., x_T`. In scalar mode `D` is a single
/// number and the movement is `||x_{t+1} - x_t||_2^2 / R_2^2`.
#[derive(Clone, Debug)]
pub struct AdaGradPlus<T: Scalar> {
    x: Point<T>,
    scaling: DiagonalScaling<T>,
    sum: Point<T>,
    t: usize,
    set: FeasibleSet<T>,
    cfg: OptimizerConfig<T>,
}

impl<T: Scalar> AdaGradPlus<T> {
    pub fn new(x0: Point<T>, set: FeasibleSet<T>, cfg: OptimizerConfig<T>) -> Result<Self> {
        let norm = match cfg.scaling {
            ScalingMode::PerCoordinate => RadiusNorm::Linf,
            ScalingMode::Scalar => RadiusNorm::L2,
        };
        check_constrained_start(&x0, &set, &cfg, norm)?;
        let d = x0.dim();
        Ok(AdaGradPlus {
            scaling: DiagonalScaling::identity(d, cfg.scaling),
            sum: Point::zeros(d),
            x: x0,
            t: 0,
            set,
            cfg,
        })
    }

    pub fn current(&self) -> &Point<T> {
        &self.x
    }

    /// One iteration given `∇f(x_t)` (or an estimate of it).
    pub fn step_with_gradient(&mut self, g: &Point<T>) -> Result<StepReport<T>> {
        check_query(g, self.x.dim())?;
        let scaled = g.scaled(self.cfg.gradient_scale());
        let next = project_weighted(&scaled, &self.x, &self.scaling, &self.set)?;
        let movement_sq = squared_diff(&next, &self.x);
        let denom = self.cfg.movement_denom();
        self.scaling.grow_by_movement(&movement_sq, denom);
        let movement = movement_sq.iter().copied().sum::<T>().sqrt();
        self.sum.add_scaled(T::one(), &next);
        self.x = next;
        self.t += 1;
        Ok(StepReport { movement, scaling: Some(ScalingStep::new(self.cfg.scaling, movement_sq, denom)) })
    }
}

impl<T: Scalar> Optimizer<T> for AdaGradPlus<T> {
    fn name(&self) -> &'static str {
        match self.cfg.scaling {
            ScalingMode::PerCoordinate => "adagrad+",
            ScalingMode::Scalar => "adagrad+:scalar",
        }
    }

    fn step(&mut self, oracle: &mut dyn Oracle<T>) -> Result<StepReport<T>> {
        let g = oracle.query(&self.x);
        self.step_with_gradient(&g)
    }

    fn solution(&self) -> Point<T> {
        if self.t == 0 {
            self.x.clone()
        } else {
            self.sum.scaled(T::one() / T::lit(self.t as f64))
        }
    }

    fn scaling(&self) -> Option<&DiagonalScaling<T>> {
        Some(&self.scaling)
    }

    fn iteration(&self) -> usize {
        self.t
    }

    fn iterates(&self) -> Vec<(&'static str, &Point<T>)> {
        vec![("x", &self.x)]
    }
}
