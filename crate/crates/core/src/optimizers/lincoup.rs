use super::{check_query, check_unconstrained_start, optimized_next, Optimizer, ScalingStep, StepReport};
use crate::error::{Error, Result};
use crate::geometry::{DiagonalScaling, FeasibleSet, Point, ScalingMode};
use crate::problems::Oracle;
use crate::scalar::Scalar;

/// Unconstrained AdaACSA in linear-coupling form:
///
/// ```text
/// g_t         = g(x_t)
/// D_{t+1,i}^2 = D_{t,i}^2 + (γ_t^2 / η^2) g_{t,i}^2
/// z_{t+1}     = z_t - γ_t D_{t+1}^{-1} g_t
/// y_{t+1}     = x_t - D_t^{-1} g_t
/// γ_{t+1}     = (1 + sqrt(1 + 4 γ_t^2)) / 2
/// x_{t+1}     = (1 - 1/γ_{t+1}) y_{t+1} + (1/γ_{t+1}) z_{t+1}
/// ```
///
/// The gradient step uses the updated scaling, the mirror step the old one.
/// Returns `y_T`.
#[derive(Clone, Debug)]
pub struct LinearCouplingAcsa<T: Scalar> {
    x: Point<T>,
    y: Point<T>,
    z: Point<T>,
    scaling: DiagonalScaling<T>,
    gamma: T,
    eta: T,
    t: usize,
}

impl<T: Scalar> LinearCouplingAcsa<T> {
    pub fn new(x0: Point<T>, set: &FeasibleSet<T>, eta: T) -> Result<Self> {
        check_unconstrained_start(&x0, set)?;
        if !(eta.is_finite() && eta > T::zero()) {
            return Err(Error::InvalidParameter(format!("eta = {eta}")));
        }
        let d = x0.dim();
        Ok(LinearCouplingAcsa {
            x: x0.clone(),
            y: x0.clone(),
            z: x0,
            scaling: DiagonalScaling::identity(d, ScalingMode::PerCoordinate),
            gamma: T::one(),
            eta,
            t: 0,
        })
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn x(&self) -> &Point<T> {
        &self.x
    }

    pub fn y(&self) -> &Point<T> {
        &self.y
    }

    pub fn z(&self) -> &Point<T> {
        &self.z
    }
}

impl<T: Scalar> Optimizer<T> for LinearCouplingAcsa<T> {
    fn name(&self) -> &'static str {
        "lincoup"
    }

    fn step(&mut self, oracle: &mut dyn Oracle<T>) -> Result<StepReport<T>> {
        let dim = self.x.dim();
        let g = oracle.query(&self.x);
        check_query(&g, dim)?;

        let old = self.scaling.clone();
        let c = self.gamma * self.gamma / (self.eta * self.eta);
        let report = ScalingStep::additive(&old, g.as_slice(), c);
        self.scaling.add_squares(g.as_slice(), c);

        let z_next = Point::new((0..dim).map(|i| self.z[i] - self.gamma * g[i] / self.scaling.weight(i)).collect());
        let y_next = Point::new((0..dim).map(|i| self.x[i] - g[i] / old.weight(i)).collect());
        let gamma_next = optimized_next(self.gamma);
        let x_next = Point::lerp(&y_next, &z_next, T::one() / gamma_next);

        let movement = z_next.sub(&self.z).norm2();
        self.x = x_next;
        self.y = y_next;
        self.z = z_next;
        self.gamma = gamma_next;
        self.t += 1;
        Ok(StepReport { movement, scaling: Some(report) })
    }

    fn solution(&self) -> Point<T> {
        self.y.clone()
    }

    fn scaling(&self) -> Option<&DiagonalScaling<T>> {
        Some(&self.scaling)
    }

    fn iteration(&self) -> usize {
        self.t
    }

    fn iterates(&self) -> Vec<(&'static str, &Point<T>)> {
        vec![("x", &self.x), ("y", &self.y), ("z", &self.z)]
    }
}
