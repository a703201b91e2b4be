use super::Objective;
use crate::error::{Error, Result};
use crate::geometry::{FeasibleSet, Point};
use crate::scalar::Scalar;

/// `f(x) = 1/2 sum_i β_i (x_i - x*_i)^2`, smooth with respect to `diag(β)`.
#[derive(Clone, Debug)]
pub struct DiagQuadratic<T> {
    beta: Vec<T>,
    x_star: Point<T>,
}

impl<T: Scalar> DiagQuadratic<T> {
    pub fn new(beta: Vec<T>, x_star: Point<T>) -> Result<Self> {
        if beta.len() != x_star.dim() {
            return Err(Error::DimensionMismatch { expected: beta.len(), got: x_star.dim() });
        }
        if beta.is_empty() {
            return Err(Error::InvalidParameter("diagquad: empty β".into()));
        }
        for &b in &beta {
            if !(b >= T::one()) || !b.is_finite() {
                return Err(Error::InvalidParameter(format!("diagquad: β entry {b} must be >= 1")));
            }
        }
        if !x_star.is_finite() {
            return Err(Error::NonFinite("diagquad minimizer"));
        }
        Ok(DiagQuadratic { beta, x_star })
    }

    pub fn beta(&self) -> &[T] {
        &self.beta
    }

    /// Minimizer and minimum over `K`. For a box the objective is separable,
    /// so the constrained minimizer is the clamp of `x*`.
    pub fn constrained_optimum(&self, set: &FeasibleSet<T>) -> Option<(Point<T>, T)> {
        match set {
            FeasibleSet::Unconstrained => Some((self.x_star.clone(), T::zero())),
            FeasibleSet::Box { .. } => {
                let x = set.project(&self.x_star);
                let v = self.value(&x);
                Some((x, v))
            }
            FeasibleSet::Ball { .. } => None,
        }
    }
}

impl<T: Scalar> Objective<T> for DiagQuadratic<T> {
    fn dim(&self) -> usize {
        self.beta.len()
    }

    fn value(&self, x: &Point<T>) -> T {
        let half = T::lit(0.5);
        self.beta
            .iter()
            .zip(x.iter().zip(self.x_star.iter()))
            .map(|(&b, (&xi, &si))| half * b * (xi - si) * (xi - si))
            .sum()
    }

    fn gradient(&self, x: &Point<T>) -> Point<T> {
        Point::new(
            self.beta
                .iter()
                .zip(x.iter().zip(self.x_star.iter()))
                .map(|(&b, (&xi, &si))| b * (xi - si))
                .collect(),
        )
    }

    fn f_star(&self) -> Option<T> {
        Some(T::zero())
    }

    fn minimizer(&self) -> Option<&Point<T>> {
        Some(&self.x_star)
    }

    fn smoothness(&self) -> Option<&[T]> {
        Some(&self.beta)
    }
}
