use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Oracle;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::Scalar;

/// Adds seeded zero-mean Gaussian noise to an exact oracle.
///
/// Each coordinate of the noise has standard deviation `σ/√d`, so
/// `E||ξ||² = σ²`. Draw `k` is generated from ChaCha stream `k` under the
/// oracle seed, so `(seed, counter)` fully determines the noise vector.
#[derive(Clone, Debug)]
pub struct StochasticOracle<T, B> {
    base: B,
    sigma: T,
    seed: u64,
    counter: u64,
}

pub fn stochastic_wrap<T: Scalar, B: Oracle<T>>(base: B, sigma: T, seed: u64) -> Result<StochasticOracle<T, B>> {
    if !(sigma >= T::zero()) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("sigma = {sigma}")));
    }
    Ok(StochasticOracle { base, sigma, seed, counter: 0 })
}

impl<T: Scalar, B: Oracle<T>> StochasticOracle<T, B> {
    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Index of the next draw.
    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// Noise vector of draw number `counter`.
    pub fn noise(&self, counter: u64) -> Vec<T> {
        let d = self.base.dim();
        if self.sigma == T::zero() {
            return vec![T::zero(); d];
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(counter);
        let sd = self.sigma / T::lit(d as f64).sqrt();
        (0..d)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                sd * T::lit(z)
            })
            .collect()
    }

    /// Exact value plus the next noise draw.
    pub fn draw_gradient(&mut self, x: &Point<T>) -> Point<T> {
        let mut g = self.base.query(x);
        if self.sigma > T::zero() {
            for (gi, xi) in g.as_mut_slice().iter_mut().zip(self.noise(self.counter)) {
                *gi = *gi + xi;
            }
        }
        self.counter += 1;
        g
    }
}

impl<T: Scalar, B: Oracle<T>> Oracle<T> for StochasticOracle<T, B> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn query(&mut self, x: &Point<T>) -> Point<T> {
        self.draw_gradient(x)
    }
}
