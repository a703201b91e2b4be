//! Objectives, monotone operators and first-order oracles.

mod bilinear;
mod nesterov;
mod quadratic;
mod stochastic;
pub mod tridiag;

pub use bilinear::BilinearGame;
pub use nesterov::NesterovWorst;
pub use quadratic::DiagQuadratic;
pub use stochastic::{stochastic_wrap, StochasticOracle};

use crate::geometry::Point;
use crate::scalar::Scalar;

/// A convex objective with exact gradients and optional reference data.
pub trait Objective<T: Scalar> {
    fn dim(&self) -> usize;
    fn value(&self, x: &Point<T>) -> T;
    fn gradient(&self, x: &Point<T>) -> Point<T>;

    fn f_star(&self) -> Option<T> {
        None
    }
    fn minimizer(&self) -> Option<&Point<T>> {
        None
    }
    /// Per-coordinate smoothness `β` (each entry >= 1).
    fn smoothness(&self) -> Option<&[T]> {
        None
    }
    fn lipschitz(&self) -> Option<T> {
        None
    }
}

/// A monotone operator `F` with an optional duality-gap evaluator.
pub trait MonotoneOp<T: Scalar> {
    fn dim(&self) -> usize;
    fn apply(&self, x: &Point<T>) -> Point<T>;
    fn duality_gap(&self, _x: &Point<T>) -> Option<T> {
        None
    }
}

/// Source of first-order information handed to the optimizers: `∇f`, `F`,
/// or a noisy estimate of either.
pub trait Oracle<T: Scalar> {
    fn dim(&self) -> usize;
    fn query(&mut self, x: &Point<T>) -> Point<T>;
}

/// Exact gradients of an objective.
pub struct GradientOracle<'a, O: ?Sized>(pub &'a O);

impl<T: Scalar, O: Objective<T> + ?Sized> Oracle<T> for GradientOracle<'_, O> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn query(&mut self, x: &Point<T>) -> Point<T> {
        self.0.gradient(x)
    }
}

/// Exact operator values.
pub struct OperatorOracle<'a, M: ?Sized>(pub &'a M);

impl<T: Scalar, M: MonotoneOp<T> + ?Sized> Oracle<T> for OperatorOracle<'_, M> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn query(&mut self, x: &Point<T>) -> Point<T> {
        self.0.apply(x)
    }
}

impl<T: Scalar, O: Oracle<T> + ?Sized> Oracle<T> for &mut O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn query(&mut self, x: &Point<T>) -> Point<T> {
        (**self).query(x)
    }
}

#[cfg(test)]
pub(crate) mod checks {
    //! Shared certificate checks used by the problem tests.
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub fn random_point(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> Point<f64> {
        Point::new((0..d).map(|_| rng.random_range(-scale..=scale)).collect())
    }

    /// Central finite differences of `value` against `gradient`.
    pub fn assert_gradient_consistent<O: Objective<f64>>(obj: &O, seed: u64, scale: f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let x = random_point(&mut rng, obj.dim(), scale);
            let g = obj.gradient(&x);
            let h = 1e-6 * (1.0 + x.norm2());
            for i in 0..obj.dim() {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fd = (obj.value(&xp) - obj.value(&xm)) / (2.0 * h);
                let tol = 1e-5 * (1.0 + g[i].abs());
                assert!((fd - g[i]).abs() <= tol, "coord {i}: fd {fd} vs grad {}", g[i]);
            }
        }
    }

    /// `f(y) <= f(x) + <∇f(x), y - x> + 1/2 ||y - x||_B^2` on random pairs.
    pub fn assert_smoothness_certificate<O: Objective<f64>>(obj: &O, seed: u64, scale: f64) {
        let beta = obj.smoothness().expect("objective exposes β").to_vec();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..1000 {
            let x = random_point(&mut rng, obj.dim(), scale);
            let y = random_point(&mut rng, obj.dim(), scale);
            let diff = y.sub(&x);
            let quad: f64 = diff.iter().zip(&beta).map(|(v, b)| b * v * v).sum();
            let rhs = obj.value(&x) + obj.gradient(&x).dot(&diff) + 0.5 * quad;
            assert!(obj.value(&y) <= rhs + 1e-12 * (1.0 + rhs.abs()));
        }
    }
}
