use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::MonotoneOp;
use crate::error::{Error, Result};
use crate::geometry::{FeasibleSet, Point};
use crate::scalar::Scalar;

/// Zero-sum bilinear game `min_{x in X} max_{y in Y} x^T A y` over boxes.
///
/// Points of the joint space are `(x, y)` concatenated. The operator is
/// `F(x, y) = (A y, -A^T x)`.
#[derive(Clone, Debug)]
pub struct BilinearGame<T> {
    rows: usize,
    cols: usize,
    /// row-major, `rows x cols`
    a: Vec<T>,
    x_lower: Vec<T>,
    x_upper: Vec<T>,
    y_lower: Vec<T>,
    y_upper: Vec<T>,
}

fn bounded_box<T: Scalar>(set: FeasibleSet<T>, dim: usize, name: &str) -> Result<(Vec<T>, Vec<T>)> {
    match set {
        FeasibleSet::Box { lower, upper } => {
            if lower.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: lower.len() });
            }
            if lower.iter().chain(&upper).any(|v| !v.is_finite()) {
                return Err(Error::InvalidParameter(format!("bilinear: {name} box must be bounded")));
            }
            Ok((lower, upper))
        }
        other => Err(Error::UnsupportedDomain { required: "box", got: other.kind() }),
    }
}

impl<T: Scalar> BilinearGame<T> {
    pub fn new(rows: usize, cols: usize, a: Vec<T>, x_set: FeasibleSet<T>, y_set: FeasibleSet<T>) -> Result<Self> {
        if a.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: a.len() });
        }
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("game matrix"));
        }
        let (x_lower, x_upper) = bounded_box(x_set, rows, "X")?;
        let (y_lower, y_upper) = bounded_box(y_set, cols, "Y")?;
        Ok(BilinearGame { rows, cols, a, x_lower, x_upper, y_lower, y_upper })
    }

    /// `d x d` game with entries uniform in `[-1, 1]` and `X = Y = [-1, 1]^d`.
    pub fn random(d: usize, seed: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("bilinear: d must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = (0..d * d).map(|_| T::lit(rng.random_range(-1.0..=1.0))).collect();
        let cube = || FeasibleSet::cube(d, -T::one(), T::one());
        Self::new(d, d, a, cube()?, cube()?)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> T {
        self.a[i * self.cols + j]
    }

    /// The product domain `X x Y`.
    pub fn domain(&self) -> FeasibleSet<T> {
        let lower = self.x_lower.iter().chain(&self.y_lower).copied().collect();
        let upper = self.x_upper.iter().chain(&self.y_upper).copied().collect();
        FeasibleSet::Box { lower, upper }
    }

    pub fn split<'p>(&self, z: &'p Point<T>) -> (&'p [T], &'p [T]) {
        z.as_slice().split_at(self.rows)
    }

    fn a_times(&self, y: &[T]) -> Vec<T> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.entry(i, j) * y[j]).sum())
            .collect()
    }

    fn at_times(&self, x: &[T]) -> Vec<T> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.entry(i, j) * x[i]).sum())
            .collect()
    }

    /// `x^T A y`.
    pub fn payoff(&self, z: &Point<T>) -> T {
        let (x, y) = self.split(z);
        x.iter().zip(self.a_times(y)).map(|(&xi, v)| xi * v).sum()
    }
}

/// `max_{v in [lo, hi]} <c, v>`, coordinate-wise.
fn linear_max<T: Scalar>(c: &[T], lo: &[T], hi: &[T]) -> T {
    c.iter()
        .zip(lo.iter().zip(hi))
        .map(|(&ci, (&l, &u))| (ci * l).max(ci * u))
        .sum()
}

impl<T: Scalar> MonotoneOp<T> for BilinearGame<T> {
    fn dim(&self) -> usize {
        self.rows + self.cols
    }

    fn apply(&self, z: &Point<T>) -> Point<T> {
        let (x, y) = self.split(z);
        let mut out = self.a_times(y);
        out.extend(self.at_times(x).into_iter().map(|v| -v));
        Point::new(out)
    }

    /// `max_{y' in Y} x^T A y' - min_{x' in X} x'^T A y`, in closed form over the boxes.
    fn duality_gap(&self, z: &Point<T>) -> Option<T> {
        let (x, y) = self.split(z);
        let best_y = linear_max(&self.at_times(x), &self.y_lower, &self.y_upper);
        let neg_ay: Vec<T> = self.a_times(y).into_iter().map(|v| -v).collect();
        let best_x = -linear_max(&neg_ay, &self.x_lower, &self.x_upper);
        Some(best_y - best_x)
    }
}
