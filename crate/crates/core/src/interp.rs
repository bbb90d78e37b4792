//! Natural cubic splines on sorted, non-uniform grids.

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug)]
pub struct CubicSpline<T> {
    x: Vec<T>,
    y: Vec<T>,
    m: Vec<T>,
    cumulative: Vec<T>,
}

impl<T: Real> CubicSpline<T> {
    pub fn new(x: &[T], y: &[T]) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::Parameter("spline needs at least two matching samples".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) || x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::Parameter("spline abscissae must be finite and strictly increasing".into()));
        }
        let two = T::lit(2.0);
        let six = T::lit(6.0);
        // tridiagonal system for the second derivatives, natural ends
        let mut m = vec![T::zero(); n];
        if n > 2 {
            let mut c = vec![T::zero(); n];
            let mut d = vec![T::zero(); n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let rhs = six * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
                let b = two * (h0 + h1) - h0 * c[i - 1];
                c[i] = h1 / b;
                d[i] = (rhs - h0 * d[i - 1]) / b;
            }
            for i in (1..n - 1).rev() {
                m[i] = d[i] - c[i] * m[i + 1];
            }
        }
        let mut cumulative = vec![T::zero(); n];
        for i in 1..n {
            let h = x[i] - x[i - 1];
            let piece = h * (y[i] + y[i - 1]) / two - h * h * h * (m[i] + m[i - 1]) / T::lit(24.0);
            cumulative[i] = cumulative[i - 1] + piece;
        }
        Ok(Self { x: x.to_vec(), y: y.to_vec(), m, cumulative })
    }

    pub fn domain(&self) -> (T, T) {
        (self.x[0], *self.x.last().unwrap())
    }

    fn locate(&self, t: T) -> usize {
        let n = self.x.len();
        self.x.partition_point(|&v| v <= t).clamp(1, n - 1) - 1
    }

    /// Value, first derivative and the integral from the left end.
    fn parts(&self, t: T) -> (T, T, T) {
        let i = self.locate(t);
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let six = T::lit(6.0);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.y[i], self.y[i + 1]);
        let value = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / six;
        let slope = (y1 - y0) / h + (-(T::lit(3.0) * a * a - T::one()) * m0 + (T::lit(3.0) * b * b - T::one()) * m1) * h / six;
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        let part = h * (y0 * (T::one() - a * a) / two + y1 * b * b / two)
            + h * h * h / six * (m0 * (-(a * a * a * a) / four + a * a / two - T::lit(0.25)) + m1 * (b * b * b * b / four - b * b / two));
        (value, slope, self.cumulative[i] + part)
    }

    pub fn eval(&self, t: T) -> T {
        self.parts(t).0
    }

    pub fn derivative(&self, t: T) -> T {
        self.parts(t).1
    }

    /// `∫ₓ₀ᵗ s(r) dr`.
    pub fn integral(&self, t: T) -> T {
        self.parts(t).2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_cubic_interior() {
        let xs: Vec<f64> = (0..200).map(|i| (i as f64 * 0.05).powf(1.3)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
        let s = CubicSpline::new(&xs, &ys).unwrap();
        for t in [0.7, 3.3, 10.0] {
            assert!((s.eval(t) - t.sin()).abs() < 1e-5);
            assert!((s.derivative(t) - t.cos()).abs() < 1e-3);
            assert!((s.integral(t) - (1.0 - t.cos())).abs() < 1e-5);
        }
        assert_eq!(s.eval(xs[17]), ys[17]);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(CubicSpline::new(&[0.0, 0.0], &[1.0, 2.0]).is_err());
        assert!(CubicSpline::new(&[0.0], &[1.0]).is_err());
    }
}
