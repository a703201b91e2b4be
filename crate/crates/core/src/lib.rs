//! Adaptive first-order methods for constrained convex minimization and
//! monotone variational inequalities.
//!
//! The preconditioned methods grow a diagonal scaling `D` from how far the
//! iterates move rather than from gradient magnitudes, which lets them adapt
//! to smooth and non-smooth problems alike without knowing either regime's
//! constants. Everything is generic over the scalar type; the `*64` and
//! `*32` aliases below pin it for the common cases.
//!
//! ```
//! use adaopt::{FeasibleSet64, OptimizerConfig64, Point64};
//! use adaopt::optimizers::{AdaAcsa, Optimizer};
//! use adaopt::problems::{DiagQuadratic, GradientOracle, Objective};
//!
//! let f = DiagQuadratic::new(vec![1.0, 10.0], Point64::from_f64(&[0.5, -0.5])).unwrap();
//! let k = FeasibleSet64::cube(2, -1.0, 1.0).unwrap();
//! let mut opt = AdaAcsa::new(Point64::zeros(2), k, OptimizerConfig64::new(2.0)).unwrap();
//! for _ in 0..200 {
//!     opt.step(&mut GradientOracle(&f)).unwrap();
//! }
//! assert!(f.value(&opt.solution()) < 1e-6);
//! ```

pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod optimizers;
pub mod problems;
pub mod scalar;

pub use error::{Error, Result};
pub use geometry::{project_weighted, DiagonalScaling, FeasibleSet, Point, ScalingMode};
pub use optimizers::{MovementDenominator, Optimizer, OptimizerConfig, StepSizeSchedule};
pub use scalar::Scalar;

pub type Point64 = Point<f64>;
pub type FeasibleSet64 = FeasibleSet<f64>;
pub type DiagonalScaling64 = DiagonalScaling<f64>;
pub type OptimizerConfig64 = OptimizerConfig<f64>;

pub type Point32 = Point<f32>;
pub type FeasibleSet32 = FeasibleSet<f32>;
pub type DiagonalScaling32 = DiagonalScaling<f32>;
pub type OptimizerConfig32 = OptimizerConfig<f32>;
