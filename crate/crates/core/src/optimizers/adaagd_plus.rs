use super::{
    check_constrained_start, check_query, squared_diff, OptimizerConfig, Optimizer, RadiusNorm, ScalingStep,
    StepReport,
};
use crate::error::Result;
use crate::geometry::{project_weighted, DiagonalScaling, FeasibleSet, Point, ScalingMode};
use crate::problems::Oracle;
use crate::scalar::Scalar;

/// Dual-averaging accelerated method built on AGD+, with `a_t = t` and
/// `A_t = t(t+1)/2`:
///
/// ```text
/// x_t = (A_{t-1}/A_t) y_{t-1} + (a_t/A_t) z_{t-1}
/// z_t = argmin_{u in K} <sum_{i<=t} a_i g(x_i), u> + 1/2 ||u - z_0||_{D_t}^2
/// y_t = (A_{t-1}/A_t) y_{t-1} + (a_t/A_t) z_t
/// D_{t+1} grown from z_t - z_{t-1}
/// ```
///
/// Iterations are numbered from 1. Returns `y_T`.
#[derive(Clone, Debug)]
pub struct AdaAgdPlus<T: Scalar> {
    x: Point<T>,
    y: Point<T>,
    z: Point<T>,
    z0: Point<T>,
    /// `sum_{i<=t} a_i g(x_i)`, unscaled
    grad_sum: Point<T>,
    scaling: DiagonalScaling<T>,
    t: u64,
    set: FeasibleSet<T>,
    cfg: OptimizerConfig<T>,
}

impl<T: Scalar> AdaAgdPlus<T> {
    pub fn new(z0: Point<T>, set: FeasibleSet<T>, cfg: OptimizerConfig<T>) -> Result<Self> {
        let norm = match cfg.scaling {
            ScalingMode::PerCoordinate => RadiusNorm::Linf,
            ScalingMode::Scalar => RadiusNorm::L2,
        };
        check_constrained_start(&z0, &set, &cfg, norm)?;
        let d = z0.dim();
        Ok(AdaAgdPlus {
            x: z0.clone(),
            y: z0.clone(),
            z: z0.clone(),
            z0,
            grad_sum: Point::zeros(d),
            scaling: DiagonalScaling::identity(d, cfg.scaling),
            t: 0,
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

    pub fn x(&self) -> &Point<T> {
        &self.x
    }

    pub fn anchor(&self) -> &Point<T> {
        &self.z0
    }

    pub fn gradient_sum(&self) -> &Point<T> {
        &self.grad_sum
    }

    /// `A_t = t(t+1)/2`
    pub fn weight_total(t: u64) -> u64 {
        t * (t + 1) / 2
    }
}

impl<T: Scalar> Optimizer<T> for AdaAgdPlus<T> {
    fn name(&self) -> &'static str {
        match self.cfg.scaling {
            ScalingMode::PerCoordinate => "adaagd+",
            ScalingMode::Scalar => "adaagd+:scalar",
        }
    }

    fn step(&mut self, oracle: &mut dyn Oracle<T>) -> Result<StepReport<T>> {
        let t = self.t + 1;
        let a_prev = T::lit(Self::weight_total(t - 1) as f64);
        let a_total = T::lit(Self::weight_total(t) as f64);
        let a_t = T::lit(t as f64);
        let w_old = a_prev / a_total;
        let w_new = a_t / a_total;

        let x = Point::combine(w_old, &self.y, w_new, &self.z);
        let g = oracle.query(&x);
        check_query(&g, x.dim())?;
        self.grad_sum.add_scaled(a_t, &g);

        let scaled = self.grad_sum.scaled(self.cfg.gradient_scale());
        let z_next = project_weighted(&scaled, &self.z0, &self.scaling, &self.set)?;
        let y_next = Point::combine(w_old, &self.y, w_new, &z_next);

        let movement_sq = squared_diff(&z_next, &self.z);
        let denom = self.cfg.movement_denom();
        self.scaling.grow_by_movement(&movement_sq, denom);
        let movement = movement_sq.iter().copied().sum::<T>().sqrt();

        self.x = x;
        self.y = y_next;
        self.z = z_next;
        self.t = t;
        Ok(StepReport { movement, scaling: Some(ScalingStep::new(self.cfg.scaling, movement_sq, denom)) })
    }

    fn solution(&self) -> Point<T> {
        self.y.clone()
    }

    fn scaling(&self) -> Option<&DiagonalScaling<T>> {
        Some(&self.scaling)
    }

    fn iteration(&self) -> usize {
        self.t as usize
    }

    fn iterates(&self) -> Vec<(&'static str, &Point<T>)> {
        vec![("x", &self.x), ("y", &self.y), ("z", &self.z)]
    }
}
