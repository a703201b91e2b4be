//! Points, diagonal preconditioners, feasible sets and the weighted
//! proximal projection
//!
//! ```text
//! argmin_{x in K}  <g, x> + 1/2 ||x - anchor||_D^2
//! ```
//!
//! which is the inner step of every constrained method in [`crate::optimizers`].

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point (or gradient / operator value) in R^d.
#[derive(Clone, Debug, PartialEq)]
pub struct Point<T>(Vec<T>);

impl<T: Scalar> Point<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Point(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![T::zero(); dim])
    }

    pub fn from_f64(coords: &[f64]) -> Self {
        Point(coords.iter().map(|&v| T::lit(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn dot(&self, other: &Point<T>) -> T {
        self.0.iter().zip(&other.0).map(|(&a, &b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }

    pub fn norm2(&self) -> T {
        self.norm_sq().sqrt()
    }

    pub fn norm_inf(&self) -> T {
        self.0.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn sub(&self, other: &Point<T>) -> Point<T> {
        Point(self.0.iter().zip(&other.0).map(|(&a, &b)| a - b).collect())
    }

    pub fn add(&self, other: &Point<T>) -> Point<T> {
        Point(self.0.iter().zip(&other.0).map(|(&a, &b)| a + b).collect())
    }

    pub fn scaled(&self, c: T) -> Point<T> {
        Point(self.0.iter().map(|&v| c * v).collect())
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: T, other: &Point<T>) {
        for (a, &b) in self.0.iter_mut().zip(&other.0) {
            *a = *a + c * b;
        }
    }

    /// `(1 - w) * a + w * b`
    pub fn lerp(a: &Point<T>, b: &Point<T>, w: T) -> Point<T> {
        let v = T::one() - w;
        Point(a.0.iter().zip(&b.0).map(|(&x, &y)| v * x + w * y).collect())
    }

    /// `(wa * a + wb * b)` for explicit weights
    pub fn combine(wa: T, a: &Point<T>, wb: T, b: &Point<T>) -> Point<T> {
        Point(a.0.iter().zip(&b.0).map(|(&x, &y)| wa * x + wb * y).collect())
    }

    pub fn dist_inf(&self, other: &Point<T>) -> T {
        self.0
            .iter()
            .zip(&other.0)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }
}

impl<T> Index<usize> for Point<T> {
    type Output = T;
    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

impl<T> IndexMut<usize> for Point<T> {
    fn index_mut(&mut self, i: usize) -> &mut T {
        &mut self.0[i]
    }
}

impl<T> From<Vec<T>> for Point<T> {
    fn from(v: Vec<T>) -> Self {
        Point(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalingMode {
    PerCoordinate,
    Scalar,
}

/// The diagonal preconditioner `D_t`.
///
/// Entries start at 1 and are only ever multiplied by factors >= 1 (or have
/// nonnegative squares added), so every entry stays >= 1 for the whole run.
/// In scalar mode a single value stands for `D * I`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalScaling<T> {
    values: Vec<T>,
    dim: usize,
    mode: ScalingMode,
}

impl<T: Scalar> DiagonalScaling<T> {
    pub fn identity(dim: usize, mode: ScalingMode) -> Self {
        let n = match mode {
            ScalingMode::PerCoordinate => dim,
            ScalingMode::Scalar => 1,
        };
        DiagonalScaling { values: vec![T::one(); n], dim, mode }
    }

    /// Per-coordinate scaling from explicit entries, each of which must be >= 1.
    pub fn from_diag(diag: Vec<T>) -> Result<Self> {
        check_scaling_entries(&diag)?;
        Ok(DiagonalScaling { dim: diag.len(), values: diag, mode: ScalingMode::PerCoordinate })
    }

    /// Scalar scaling `c * I` with `c >= 1`.
    pub fn uniform(dim: usize, c: T) -> Result<Self> {
        check_scaling_entries(&[c])?;
        Ok(DiagonalScaling { values: vec![c], dim, mode: ScalingMode::Scalar })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> ScalingMode {
        self.mode
    }

    /// Weight applied to coordinate `i`.
    #[inline]
    pub fn weight(&self, i: usize) -> T {
        match self.mode {
            ScalingMode::PerCoordinate => self.values[i],
            ScalingMode::Scalar => self.values[0],
        }
    }

    /// Stored entries: `d` values per-coordinate, one value in scalar mode.
    pub fn stored(&self) -> &[T] {
        &self.values
    }

    /// Entries expanded to length `d`.
    pub fn diag(&self) -> Vec<T> {
        (0..self.dim).map(|i| self.weight(i)).collect()
    }

    /// `trace(D)`.
    pub fn trace(&self) -> T {
        match self.mode {
            ScalingMode::PerCoordinate => self.values.iter().copied().sum(),
            ScalingMode::Scalar => self.values[0] * T::lit(self.dim as f64),
        }
    }

    /// `D_i^2 <- D_i^2 (1 + m_i^2 / denom)`; scalar mode uses `||m||_2^2`.
    pub fn grow_by_movement(&mut self, movement_sq: &[T], denom: T) {
        match self.mode {
            ScalingMode::PerCoordinate => {
                for (d, &m) in self.values.iter_mut().zip(movement_sq) {
                    *d = *d * (T::one() + m / denom).sqrt();
                }
            }
            ScalingMode::Scalar => {
                let total: T = movement_sq.iter().copied().sum();
                self.values[0] = self.values[0] * (T::one() + total / denom).sqrt();
            }
        }
    }

    /// `D_i^2 <- D_i^2 + c * v_i^2`; scalar mode adds `c * ||v||_2^2`.
    pub fn add_squares(&mut self, v: &[T], c: T) {
        match self.mode {
            ScalingMode::PerCoordinate => {
                for (d, &x) in self.values.iter_mut().zip(v) {
                    *d = (*d * *d + c * x * x).sqrt();
                }
            }
            ScalingMode::Scalar => {
                let total: T = v.iter().map(|&x| x * x).sum();
                self.values[0] = (self.values[0] * self.values[0] + c * total).sqrt();
            }
        }
    }
}

fn check_scaling_entries<T: Scalar>(diag: &[T]) -> Result<()> {
    for &d in diag {
        if !d.is_finite() {
            return Err(Error::NonFinite("scaling"));
        }
        if d < T::one() {
            return Err(Error::InvalidParameter(format!("scaling entry {d} < 1")));
        }
    }
    Ok(())
}

/// The constraint domain `K`.
#[derive(Clone, Debug, PartialEq)]
pub enum FeasibleSet<T> {
    Unconstrained,
    Box { lower: Vec<T>, upper: Vec<T> },
    Ball { center: Point<T>, radius: T },
}

/// Relative tolerance for the ball projection's multiplier search.
pub const DEFAULT_BALL_TOL: f64 = 1e-12;
const BALL_MAX_ITER: usize = 200;
/// Slack when checking that a projection anchor lies in `K`.
const ANCHOR_SLACK: f64 = 1e-9;

impl<T: Scalar> FeasibleSet<T> {
    /// Axis-aligned box. Bounds may be infinite to relax single coordinates.
    pub fn boxed(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch { expected: lower.len(), got: upper.len() });
        }
        for (l, u) in lower.iter().zip(&upper) {
            if l.is_nan() || u.is_nan() {
                return Err(Error::NonFinite("box bounds"));
            }
            if l > u {
                return Err(Error::InvalidParameter(format!("box lower {l} > upper {u}")));
            }
        }
        Ok(FeasibleSet::Box { lower, upper })
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: T, hi: T) -> Result<Self> {
        Self::boxed(vec![lo; dim], vec![hi; dim])
    }

    pub fn ball(center: Point<T>, radius: T) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::NonFinite("ball center"));
        }
        if !(radius.is_finite() && radius > T::zero()) {
            return Err(Error::InvalidParameter(format!("ball radius {radius}")));
        }
        Ok(FeasibleSet::Ball { center, radius })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FeasibleSet::Unconstrained => "unconstrained",
            FeasibleSet::Box { .. } => "box",
            FeasibleSet::Ball { .. } => "ball",
        }
    }

    pub fn is_constrained(&self) -> bool {
        !matches!(self, FeasibleSet::Unconstrained)
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            FeasibleSet::Unconstrained => None,
            FeasibleSet::Box { lower, .. } => Some(lower.len()),
            FeasibleSet::Ball { center, .. } => Some(center.dim()),
        }
    }

    /// ℓ∞ diameter `R∞`.
    pub fn linf_diameter(&self) -> T {
        match self {
            FeasibleSet::Unconstrained => T::infinity(),
            FeasibleSet::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .fold(T::zero(), |m, (&l, &u)| m.max(u - l)),
            FeasibleSet::Ball { radius, .. } => *radius + *radius,
        }
    }

    /// ℓ2 diameter `R₂`.
    pub fn l2_diameter(&self) -> T {
        match self {
            FeasibleSet::Unconstrained => T::infinity(),
            FeasibleSet::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(&l, &u)| (u - l) * (u - l))
                .sum::<T>()
                .sqrt(),
            FeasibleSet::Ball { radius, .. } => *radius + *radius,
        }
    }

    /// Membership with an absolute-plus-relative slack.
    pub fn contains(&self, x: &Point<T>, slack: T) -> bool {
        match self {
            FeasibleSet::Unconstrained => true,
            FeasibleSet::Box { lower, upper } => {
                x.dim() == lower.len()
                    && x.iter().zip(lower.iter().zip(upper)).all(|(&v, (&l, &u))| {
                        v >= l - slack * (T::one() + l.abs())
                            && v <= u + slack * (T::one() + u.abs())
                    })
            }
            FeasibleSet::Ball { center, radius } => {
                x.dim() == center.dim()
                    && x.sub(center).norm2() <= *radius * (T::one() + slack) + slack
            }
        }
    }

    /// Euclidean projection onto `K`.
    pub fn project(&self, x: &Point<T>) -> Point<T> {
        match self {
            FeasibleSet::Unconstrained => x.clone(),
            FeasibleSet::Box { lower, upper } => Point::new(
                x.iter()
                    .zip(lower.iter().zip(upper))
                    .map(|(&v, (&l, &u))| v.max(l).min(u))
                    .collect(),
            ),
            FeasibleSet::Ball { center, radius } => {
                let off = x.sub(center);
                let r = off.norm2();
                if r <= *radius {
                    x.clone()
                } else {
                    center.add(&off.scaled(*radius / r))
                }
            }
        }
    }
}

/// `argmin_{x in K} <g, x> + 1/2 ||x - anchor||_D^2` with the default ball tolerance.
pub fn project_weighted<T: Scalar>(
    g: &Point<T>,
    anchor: &Point<T>,
    scaling: &DiagonalScaling<T>,
    set: &FeasibleSet<T>,
) -> Result<Point<T>> {
    project_weighted_with_tol(g, anchor, scaling, set, T::lit(DEFAULT_BALL_TOL))
}

pub fn project_weighted_with_tol<T: Scalar>(
    g: &Point<T>,
    anchor: &Point<T>,
    scaling: &DiagonalScaling<T>,
    set: &FeasibleSet<T>,
    ball_tol: T,
) -> Result<Point<T>> {
    let d = anchor.dim();
    if g.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: g.dim() });
    }
    if scaling.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: scaling.dim() });
    }
    if let Some(k) = set.dim() {
        if k != d {
            return Err(Error::DimensionMismatch { expected: k, got: d });
        }
    }
    if !g.is_finite() {
        return Err(Error::NonFinite("linear term"));
    }
    if !anchor.is_finite() {
        return Err(Error::NonFinite("anchor"));
    }
    if !set.contains(anchor, T::lit(ANCHOR_SLACK)) {
        return Err(Error::Infeasible);
    }

    let step = |i: usize| anchor[i] - g[i] / scaling.weight(i);
    Ok(match set {
        FeasibleSet::Unconstrained => Point::new((0..d).map(step).collect()),
        FeasibleSet::Box { lower, upper } => {
            Point::new((0..d).map(|i| step(i).max(lower[i]).min(upper[i])).collect())
        }
        FeasibleSet::Ball { center, radius } => {
            project_ball(g, anchor, scaling, center, *radius, ball_tol)
        }
    })
}

/// KKT solution `x(mu) = (D + mu I)^-1 (D anchor - g + mu center)`, bisecting on
/// the multiplier `mu >= 0` until `||x(mu) - center||` matches the radius.
fn project_ball<T: Scalar>(
    g: &Point<T>,
    anchor: &Point<T>,
    scaling: &DiagonalScaling<T>,
    center: &Point<T>,
    radius: T,
    tol: T,
) -> Point<T> {
    let d = anchor.dim();
    let at = |mu: T| -> Point<T> {
        Point::new(
            (0..d)
                .map(|i| {
                    let w = scaling.weight(i);
                    (w * anchor[i] - g[i] + mu * center[i]) / (w + mu)
                })
                .collect(),
        )
    };
    let dist = |x: &Point<T>| x.sub(center).norm2();

    let free = Point::new((0..d).map(|i| anchor[i] - g[i] / scaling.weight(i)).collect());
    if dist(&free) <= radius {
        return free;
    }

    let two = T::lit(2.0);
    let mut lo = T::zero();
    let mut hi = T::one();
    let mut x_hi = at(hi);
    while dist(&x_hi) > radius && hi < T::max_value() / two {
        lo = hi;
        hi = hi * two;
        x_hi = at(hi);
    }

    for _ in 0..BALL_MAX_ITER {
        let mid = (lo + hi) / two;
        let x = at(mid);
        let r = dist(&x);
        if (r - radius).abs() <= tol * radius {
            return x;
        }
        if r > radius {
            lo = mid;
        } else {
            hi = mid;
            x_hi = x;
        }
        if hi - lo <= T::epsilon() * hi {
            break;
        }
    }
    x_hi
}
