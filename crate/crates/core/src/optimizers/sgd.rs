use super::{check_query, Optimizer, StepReport};
use crate::error::{Error, Result};
use crate::geometry::{DiagonalScaling, FeasibleSet, Point};
use crate::problems::Oracle;
use crate::scalar::Scalar;

/// Heavy-ball SGD baseline: `v <- μ v - lr g(x)`, `x <- Π_K(x + v)`.
///
/// On an unconstrained set the projection is the identity. Returns the last
/// iterate.
#[derive(Clone, Debug)]
pub struct SgdMomentum<T: Scalar> {
    x: Point<T>,
    v: Point<T>,
    lr: T,
    mu: T,
    set: FeasibleSet<T>,
    t: usize,
}

impl<T: Scalar> SgdMomentum<T> {
    pub fn new(x0: Point<T>, set: FeasibleSet<T>, lr: T, mu: T) -> Result<Self> {
        if !(lr.is_finite() && lr > T::zero()) {
            return Err(Error::InvalidParameter(format!("lr = {lr}")));
        }
        if !(mu >= T::zero() && mu < T::one()) {
            return Err(Error::InvalidParameter(format!("momentum = {mu}")));
        }
        if let Some(d) = set.dim() {
            if d != x0.dim() {
                return Err(Error::DimensionMismatch { expected: d, got: x0.dim() });
            }
        }
        if !x0.is_finite() {
            return Err(Error::NonFinite("starting point"));
        }
        if !set.contains(&x0, T::zero()) {
            return Err(Error::Infeasible);
        }
        let d = x0.dim();
        Ok(SgdMomentum { x: x0, v: Point::zeros(d), lr, mu, set, t: 0 })
    }

    pub fn velocity(&self) -> &Point<T> {
        &self.v
    }
}

impl<T: Scalar> Optimizer<T> for SgdMomentum<T> {
    fn name(&self) -> &'static str {
        "sgd"
    }

    fn step(&mut self, oracle: &mut dyn Oracle<T>) -> Result<StepReport<T>> {
        let g = oracle.query(&self.x);
        check_query(&g, self.x.dim())?;
        let v = Point::combine(self.mu, &self.v, -self.lr, &g);
        let next = self.set.project(&self.x.add(&v));
        let movement = next.sub(&self.x).norm2();
        self.x = next;
        self.v = v;
        self.t += 1;
        Ok(StepReport { movement, scaling: None })
    }

    fn solution(&self) -> Point<T> {
        self.x.clone()
    }

    fn scaling(&self) -> Option<&DiagonalScaling<T>> {
        None
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
    fn zero_momentum_is_gradient_descent() {
        let q = DiagQuadratic::new(vec![1.0, 4.0], p(&[0.0, 0.0])).unwrap();
        let mut opt = SgdMomentum::new(p(&[1.0, 1.0]), FeasibleSet::Unconstrained, 0.25, 0.0).unwrap();
        opt.step(&mut GradientOracle(&q)).unwrap();
        assert_eq!(opt.solution(), p(&[0.75, 0.0]));
    }

    #[test]
    fn momentum_accumulates() {
        // f = x^2/2 from 1, lr 0.5, μ 0.5: v1 = -0.5, x1 = 0.5; v2 = -0.25 - 0.25, x2 = 0
        let q = DiagQuadratic::new(vec![1.0], p(&[0.0])).unwrap();
        let mut opt = SgdMomentum::new(p(&[1.0]), FeasibleSet::Unconstrained, 0.5, 0.5).unwrap();
        opt.step(&mut GradientOracle(&q)).unwrap();
        assert_eq!(opt.solution(), p(&[0.5]));
        opt.step(&mut GradientOracle(&q)).unwrap();
        assert_eq!(opt.solution(), p(&[0.0]));
    }

    #[test]
    fn zero_gradient_stays_put() {
        let q = DiagQuadratic::new(vec![1.0], p(&[0.3])).unwrap();
        let mut opt = SgdMomentum::new(p(&[0.3]), FeasibleSet::Unconstrained, 0.1, 0.9).unwrap();
        for _ in 0..10 {
            opt.step(&mut GradientOracle(&q)).unwrap();
        }
        assert_eq!(opt.solution(), p(&[0.3]));
    }

    #[test]
    fn projection_keeps_box() {
        let q = DiagQuadratic::new(vec![1.0], p(&[5.0])).unwrap();
        let k = FeasibleSet::cube(1, -1.0, 1.0).unwrap();
        let mut opt = SgdMomentum::new(p(&[0.0]), k, 1.0, 0.9).unwrap();
        for _ in 0..20 {
            opt.step(&mut GradientOracle(&q)).unwrap();
            assert!(opt.solution()[0] <= 1.0);
        }
        assert_eq!(opt.solution(), p(&[1.0]));
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(SgdMomentum::new(p(&[0.0]), FeasibleSet::Unconstrained, 0.0, 0.5).is_err());
        assert!(SgdMomentum::new(p(&[0.0]), FeasibleSet::Unconstrained, 0.1, 1.0).is_err());
    }
}
