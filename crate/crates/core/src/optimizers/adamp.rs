use super::{check_constrained_start, check_query, OptimizerConfig, Optimizer, RadiusNorm, ScalingStep, StepReport};
use crate::error::Result;
use crate::geometry::{project_weighted, DiagonalScaling, FeasibleSet, Point};
use crate::problems::Oracle;
use crate::scalar::Scalar;

/// Adaptive mirror-prox for monotone variational inequalities:
///
/// ```text
/// x_t = argmin_{x in K} <F(y_{t-1}), x> + 1/2 ||x - y_{t-1}||_{D_t}^2
/// y_t = argmin_{x in K} <F(x_t), x>     + 1/2 ||x - y_{t-1}||_{D_t}^2
/// D_{t+1,i}^2 = D_{t,i}^2 (1 + ((x_{t,i} - y_{t-1,i})^2 + (x_{t,i} - y_{t,i})^2) / (2 R^2))
/// ```
///
/// The `2 R^2` constant is fixed by the method and does not follow
/// `cfg.denominator`. Returns the average of `x_1, ..., x_T`.
#[derive(Clone, Debug)]
pub struct AdaMirrorProx<T: Scalar> {
    x: Point<T>,
    y: Point<T>,
    sum: Point<T>,
    scaling: DiagonalScaling<T>,
    t: usize,
    set: FeasibleSet<T>,
    cfg: OptimizerConfig<T>,
}

impl<T: Scalar> AdaMirrorProx<T> {
    pub fn new(y0: Point<T>, set: FeasibleSet<T>, cfg: OptimizerConfig<T>) -> Result<Self> {
        check_constrained_start(&y0, &set, &cfg, RadiusNorm::Linf)?;
        let d = y0.dim();
        Ok(AdaMirrorProx {
            x: y0.clone(),
            y: y0,
            sum: Point::zeros(d),
            scaling: DiagonalScaling::identity(d, cfg.scaling),
            t: 0,
            set,
            cfg,
        })
    }

    pub fn x(&self) -> &Point<T> {
        &self.x
    }

    pub fn y(&self) -> &Point<T> {
        &self.y
    }
}

impl<T: Scalar> Optimizer<T> for AdaMirrorProx<T> {
    fn name(&self) -> &'static str {
        "adamp"
    }

    fn step(&mut self, oracle: &mut dyn Oracle<T>) -> Result<StepReport<T>> {
        let c = self.cfg.gradient_scale();
        let dim = self.y.dim();

        let f_y = oracle.query(&self.y);
        check_query(&f_y, dim)?;
        let x = project_weighted(&f_y.scaled(c), &self.y, &self.scaling, &self.set)?;
        let f_x = oracle.query(&x);
        check_query(&f_x, dim)?;
        let y_next = project_weighted(&f_x.scaled(c), &self.y, &self.scaling, &self.set)?;

        let two = T::lit(2.0);
        // (a^2 + b^2) / (2 R^2) as mean-square movement over R^2
        let movement_sq: Vec<T> = (0..dim)
            .map(|i| {
                let a = x[i] - self.y[i];
                let b = x[i] - y_next[i];
                (a * a + b * b) / two
            })
            .collect();
        let denom = self.cfg.radius * self.cfg.radius;
        self.scaling.grow_by_movement(&movement_sq, denom);
        let movement = movement_sq.iter().copied().sum::<T>().sqrt();

        self.sum.add_scaled(T::one(), &x);
        self.x = x;
        self.y = y_next;
        self.t += 1;
        Ok(StepReport { movement, scaling: Some(ScalingStep::new(self.cfg.scaling, movement_sq, denom)) })
    }

    fn solution(&self) -> Point<T> {
        if self.t == 0 {
            self.y.clone()
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
        vec![("x", &self.x), ("y", &self.y)]
    }
}
