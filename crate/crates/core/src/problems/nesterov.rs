use super::tridiag::solve_tridiagonal;
use super::Objective;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::scalar::Scalar;

/// Nesterov's worst-case quadratic
///
/// ```text
/// f(x) = 1/2 (x_1^2 + x_n^2 + sum_{i<n} (x_i - x_{i+1})^2) - x_1
/// ```
///
/// with Hessian `tridiag(-1, 2, -1)`. The minimizer is computed once at
/// construction by a tridiagonal solve of `A x* = e_1`.
#[derive(Clone, Debug)]
pub struct NesterovWorst<T> {
    n: usize,
    x_star: Point<T>,
    f_star: T,
    beta: Vec<T>,
}

impl<T: Scalar> NesterovWorst<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("nesterov: n = {n} < 2")));
        }
        let off = vec![-T::one(); n - 1];
        let diag = vec![T::lit(2.0); n];
        let mut e1 = vec![T::zero(); n];
        e1[0] = T::one();
        let x_star = Point::new(solve_tridiagonal(&off, &diag, &off, &e1)?);
        let mut f = NesterovWorst { n, x_star, f_star: T::zero(), beta: vec![T::lit(4.0); n] };
        f.f_star = f.value(&f.x_star);
        Ok(f)
    }

    /// `A x` for `A = tridiag(-1, 2, -1)`.
    pub fn hessian_apply(&self, x: &Point<T>) -> Point<T> {
        let n = self.n;
        let two = T::lit(2.0);
        Point::new(
            (0..n)
                .map(|i| {
                    let mut v = two * x[i];
                    if i > 0 {
                        v = v - x[i - 1];
                    }
                    if i + 1 < n {
                        v = v - x[i + 1];
                    }
                    v
                })
                .collect(),
        )
    }
}

impl<T: Scalar> Objective<T> for NesterovWorst<T> {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &Point<T>) -> T {
        let n = self.n;
        let mut s = x[0] * x[0] + x[n - 1] * x[n - 1];
        for i in 0..n - 1 {
            let d = x[i] - x[i + 1];
            s = s + d * d;
        }
        s / T::lit(2.0) - x[0]
    }

    fn gradient(&self, x: &Point<T>) -> Point<T> {
        let mut g = self.hessian_apply(x);
        g[0] = g[0] - T::one();
        g
    }

    fn f_star(&self) -> Option<T> {
        Some(self.f_star)
    }

    fn minimizer(&self) -> Option<&Point<T>> {
        Some(&self.x_star)
    }

    /// `||A|| <= 4`, exposed as `β_i = 4`.
    fn smoothness(&self) -> Option<&[T]> {
        Some(&self.beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::checks;

    #[test]
    fn origin_value_and_gradient() {
        let f = NesterovWorst::<f64>::new(5).unwrap();
        let x = Point::zeros(5);
        assert_eq!(f.value(&x), 0.0);
        assert_eq!(f.gradient(&x).as_slice(), &[-1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn two_dimensional_minimizer() {
        // A = [[2, -1], [-1, 2]], A x = e1 by Cramer's rule: x = (2/3, 1/3)
        let f = NesterovWorst::<f64>::new(2).unwrap();
        let xs = f.minimizer().unwrap();
        assert!((xs[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((xs[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((f.f_star().unwrap() + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn n100_matches_closed_form() {
        let n = 100;
        let f = NesterovWorst::<f64>::new(n).unwrap();
        let xs = f.minimizer().unwrap();
        let mut e1 = f.hessian_apply(xs);
        e1[0] -= 1.0;
        assert!(e1.norm_inf() <= 1e-12);
        for i in 0..n {
            let closed = (n - i) as f64 / (n + 1) as f64;
            assert!((xs[i] - closed).abs() < 1e-12);
        }
        let expected = -(n as f64) / (2.0 * (n as f64 + 1.0));
        assert!((f.f_star().unwrap() - expected).abs() < 1e-12);
        assert!((expected + 0.49505).abs() < 1e-5);
    }

    #[test]
    fn certificates() {
        let f = NesterovWorst::<f64>::new(7).unwrap();
        checks::assert_gradient_consistent(&f, 1, 2.0);
        checks::assert_smoothness_certificate(&f, 2, 2.0);
    }

    #[test]
    fn rejects_small_n() {
        assert!(NesterovWorst::<f64>::new(1).is_err());
    }
}
