use super::{check_query, check_unconstrained_start, Optimizer, ScalingStep, StepReport};
use crate::error::{Error, Result};
use crate::geometry::{DiagonalScaling, FeasibleSet, Point, ScalingMode};
use crate::problems::Oracle;
use crate::scalar::Scalar;

/// Unconstrained diagonal AdaGrad:
///
/// ```text
/// x_{t+1}     = x_t - η D_t^{-1} g(x_t)
/// D_{t+1,i}^2 = D_{t,i}^2 + g_i(x_{t+1})^2
/// ```
///
/// The scaling is updated with the gradient at the new point, so `D_t`
/// already contains `g(x_t)` when the step from `x_t` is taken. One oracle
/// call per iterate; with a stochastic oracle the draw at `x_{t+1}` feeds
/// both the `D` update and the next step. After `T` steps returns the
/// average of `x_0, ..., x_{T-1}`.
#[derive(Clone, Debug)]
pub struct AdaGrad<T: Scalar> {
    x: Point<T>,
    grad: Option<Point<T>>,
    scaling: DiagonalScaling<T>,
    sum: Point<T>,
    t: usize,
    eta: T,
}

impl<T: Scalar> AdaGrad<T> {
    pub fn new(x0: Point<T>, set: &FeasibleSet<T>, eta: T) -> Result<Self> {
        check_unconstrained_start(&x0, set)?;
        if !(eta.is_finite() && eta > T::zero()) {
            return Err(Error::InvalidParameter(format!("eta = {eta}")));
        }
        let d = x0.dim();
        Ok(AdaGrad {
            sum: Point::zeros(d),
            x: x0,
            grad: None,
            scaling: DiagonalScaling::identity(d, ScalingMode::PerCoordinate),
            t: 0,
            eta,
        })
    }

    pub fn current(&self) -> &Point<T> {
        &self.x
    }
}

impl<T: Scalar> Optimizer<T> for AdaGrad<T> {
    fn name(&self) -> &'static str {
        "adagrad"
    }

    fn step(&mut self, oracle: &mut dyn Oracle<T>) -> Result<StepReport<T>> {
        let dim = self.x.dim();
        let g = match self.grad.take() {
            Some(g) => g,
            None => {
                let g = oracle.query(&self.x);
                check_query(&g, dim)?;
                g
            }
        };
        let next = Point::new(
            (0..dim)
                .map(|i| self.x[i] - self.eta * g[i] / self.scaling.weight(i))
                .collect(),
        );
        let g_next = oracle.query(&next);
        check_query(&g_next, dim)?;

        let report = ScalingStep::additive(&self.scaling, g_next.as_slice(), T::one());
        self.scaling.add_squares(g_next.as_slice(), T::one());
        let movement = next.sub(&self.x).norm2();

        self.sum.add_scaled(T::one(), &self.x);
        self.x = next;
        self.grad = Some(g_next);
        self.t += 1;
        Ok(StepReport { movement, scaling: Some(report) })
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{DiagQuadratic, GradientOracle};

    fn p(v: &[f64]) -> Point<f64> {
        Point::from_f64(v)
    }

    #[test]
    fn zero_gradient_fixed_point() {
        let q = DiagQuadratic::new(vec![1.0, 2.0], p(&[0.5, 0.5])).unwrap();
        let mut opt = AdaGrad::new(p(&[0.5, 0.5]), &FeasibleSet::Unconstrained, 1.0).unwrap();
        for _ in 0..5 {
            opt.step(&mut GradientOracle(&q)).unwrap();
        }
        assert_eq!(opt.current(), &p(&[0.5, 0.5]));
        assert_eq!(opt.scaling.diag(), vec![1.0, 1.0]);
    }

    #[test]
    fn one_hand_evaluated_step() {
        // f = x^2/2, x0 = 1, η = 1: x1 = 1 - 1 = 0, D1^2 = 1 + f'(0)^2 = 1
        let q = DiagQuadratic::new(vec![1.0], p(&[0.0])).unwrap();
        let mut opt = AdaGrad::new(p(&[1.0]), &FeasibleSet::Unconstrained, 1.0).unwrap();
        opt.step(&mut GradientOracle(&q)).unwrap();
        assert_eq!(opt.current(), &p(&[0.0]));
        assert_eq!(opt.scaling.weight(0), 1.0);
        assert_eq!(opt.solution(), p(&[1.0]));
        opt.step(&mut GradientOracle(&q)).unwrap();
        assert_eq!(opt.solution(), p(&[0.5]));
    }

    #[test]
    fn scaling_includes_gradient_at_new_point() {
        // f = x^2/2, x0 = 1, η = 0.5: x1 = 0.5, D1^2 = 1 + 0.25
        let q = DiagQuadratic::new(vec![1.0], p(&[0.0])).unwrap();
        let mut opt = AdaGrad::new(p(&[1.0]), &FeasibleSet::Unconstrained, 0.5).unwrap();
        opt.step(&mut GradientOracle(&q)).unwrap();
        assert_eq!(opt.scaling.weight(0), 1.25f64.sqrt());
        opt.step(&mut GradientOracle(&q)).unwrap();
        let x2 = 0.5 - 0.5 * 0.5 / 1.25f64.sqrt();
        assert!((opt.current()[0] - x2).abs() < 1e-15);
    }

    #[test]
    fn rejects_constrained_domain() {
        let k = FeasibleSet::cube(1, -1.0, 1.0).unwrap();
        assert!(matches!(AdaGrad::new(p(&[0.0]), &k, 1.0), Err(Error::UnsupportedDomain { .. })));
    }
}
