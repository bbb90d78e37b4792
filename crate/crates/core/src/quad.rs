//! Quadrature rules: adaptive Gauss–Kronrod (7/15), tanh-sinh and
//! Gauss–Legendre panels.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Outcome of a quadrature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
    pub converged: bool,
}

/// Kahan–Neumaier compensated accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier<T> {
    sum: T,
    comp: T,
}

impl<T: Real> Neumaier<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> T {
        self.sum + self.comp
    }
}

/// One 15-point Kronrod evaluation on `[a, b]`, returning the estimate and
/// a QUADPACK-style error bound.
pub fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let abs_half = half_len.abs();

    let fc = f(center);
    let mut res_g = fc * T::lit(WG[3]);
    let mut res_k = fc * T::lit(WGK[7]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];

    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        res_k += w * (f1 + f2);
        res_abs += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += T::lit(WG[j / 2]) * (f1 + f2);
        }
    }

    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        res_asc += T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half_len;
    res_abs *= abs_half;
    res_asc *= abs_half;
    let mut err = ((res_k - res_g) * half_len).abs();
    if res_asc > T::zero() && err > T::zero() {
        let scale = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = res_asc * scale.min(T::one());
    }
    let floor = T::lit(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) {
        err = err.max(floor);
    }
    (value, err)
}

struct Panel<T> {
    a: T,
    b: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl<T: Real> Eq for Panel<T> {}

impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// Globally adaptive Gauss–Kronrod integration over consecutive breakpoints.
///
/// `points` must contain at least two finite, increasing abscissae; the
/// integrand is never evaluated at them, so integrable endpoint
/// singularities are tolerated.
pub fn adaptive<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    points: &[T],
    rel_tol: T,
    abs_tol: T,
    max_panels: usize,
) -> QuadResult<T> {
    assert!(points.len() >= 2, "need at least one interval");
    let mut heap = BinaryHeap::new();
    let mut frozen = Neumaier::new();
    let mut frozen_err = T::zero();
    let mut evaluations = 0;

    for w in points.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (value, error) = gk15(&mut f, w[0], w[1]);
        evaluations += 15;
        heap.push(Panel { a: w[0], b: w[1], value, error });
    }

    let totals = |heap: &BinaryHeap<Panel<T>>, frozen: &Neumaier<T>, frozen_err: T| {
        let mut v = *frozen;
        let mut e = frozen_err;
        for p in heap.iter() {
            v.add(p.value);
            e += p.error;
        }
        (v.total(), e)
    };

    let (mut value, mut error) = totals(&heap, &frozen, frozen_err);
    let mut converged = error <= abs_tol.max(rel_tol * value.abs());
    let mut splits = heap.len();

    while !converged && splits < max_panels {
        let Some(worst) = heap.pop() else { break };
        let mid = T::lit(0.5) * (worst.a + worst.b);
        let width = (worst.b - worst.a).abs();
        let tiny = T::lit(100.0) * T::epsilon() * (worst.a.abs() + worst.b.abs()).max(T::min_positive_value());
        if width <= tiny || mid == worst.a || mid == worst.b {
            frozen.add(worst.value);
            frozen_err += worst.error;
        } else {
            let (v1, e1) = gk15(&mut f, worst.a, mid);
            let (v2, e2) = gk15(&mut f, mid, worst.b);
            evaluations += 30;
            heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
            heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
            splits += 1;
            value += v1 + v2 - worst.value;
            error += e1 + e2 - worst.error;
        }
        if heap.is_empty() {
            break;
        }
        if splits % 64 == 0 || error <= abs_tol.max(rel_tol * value.abs()) {
            (value, error) = totals(&heap, &frozen, frozen_err);
        }
        converged = error <= abs_tol.max(rel_tol * value.abs());
    }
    (value, error) = totals(&heap, &frozen, frozen_err);

    if !(value.is_finite() && error.is_finite()) {
        converged = false;
    }
    QuadResult { value, error, evaluations, converged }
}

/// Double-exponential (tanh-sinh) rule on `[a, b]`.
///
/// The integrand receives `(x, x - a, b - x)` so that endpoint-singular
/// integrands can use the distances without cancellation.
pub fn tanh_sinh<T: Real, F: FnMut(T, T, T) -> T>(
    mut f: F,
    a: T,
    b: T,
    rel_tol: T,
    max_level: usize,
) -> QuadResult<T> {
    let half = T::lit(0.5);
    let d = half * (b - a);
    let pi_2 = T::FRAC_PI_2();
    let t_max = T::lit(6.5);
    let mut h = T::one();
    let mut evaluations = 0;

    let node = |t: T, f: &mut F| -> T {
        let u = pi_2 * t.sinh();
        let cu = u.cosh();
        let w = pi_2 * t.cosh() / (cu * cu);
        if !w.is_finite() || w == T::zero() {
            return T::zero();
        }
        let th = u.tanh();
        let (da, db) = if u >= T::zero() {
            (d * (T::one() + th), d * (-u).exp() / cu)
        } else {
            (d * u.exp() / cu, d * (T::one() - th))
        };
        if da == T::zero() || db == T::zero() {
            return T::zero();
        }
        let x = if u >= T::zero() { b - db } else { a + da };
        let fx = f(x, da, db);
        if fx.is_finite() {
            w * fx
        } else {
            T::zero()
        }
    };

    let mut sum = node(T::zero(), &mut f);
    evaluations += 1;
    let mut k = 1;
    loop {
        let t = T::from_usize_lossy(k) * h;
        if t > t_max {
            break;
        }
        sum += node(t, &mut f) + node(-t, &mut f);
        evaluations += 2;
        k += 1;
    }
    let mut estimate = sum * h * d;
    let mut error = estimate.abs();
    let mut converged = false;

    for _ in 0..max_level {
        h *= half;
        let mut k = 1;
        loop {
            let t = T::from_usize_lossy(k) * h;
            if t > t_max {
                break;
            }
            sum += node(t, &mut f) + node(-t, &mut f);
            evaluations += 2;
            k += 2;
        }
        let next = sum * h * d;
        error = (next - estimate).abs();
        estimate = next;
        if error <= rel_tol * estimate.abs() {
            converged = true;
            break;
        }
    }
    QuadResult { value: estimate, error, evaluations, converged }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0f64; n];
        let mut weights = vec![0.0f64; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let p = if n == 1 { x } else { p1 };
                let pm = if n == 1 { 1.0 } else { p0 };
                dp = nf * (x * p - pm) / (x * x - 1.0);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self {
            nodes: nodes.into_iter().map(T::lit).collect(),
            weights: weights.into_iter().map(T::lit).collect(),
        }
    }

    /// Applies the rule on `[a, b]`.
    pub fn integrate<F: FnMut(T) -> T>(&self, mut f: F, a: T, b: T) -> T {
        let half = T::lit(0.5);
        let c = half * (a + b);
        let d = half * (b - a);
        let mut acc = T::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += *w * f(c + d * *x);
        }
        acc * d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_polynomial_exact() {
        let (v, _) = gk15(&mut |x: f64| x.powi(20), -1.0, 1.0);
        assert!((v - 2.0 / 21.0).abs() < 1e-15);
    }

    #[test]
    fn adaptive_endpoint_singularity() {
        let r = adaptive(|x: f64| 1.0 / x.sqrt(), &[0.0, 1.0], 1e-12, 0.0, 2000);
        assert!(r.converged);
        assert!((r.value - 2.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn adaptive_log_singularity() {
        let r = adaptive(|x: f64| x.ln(), &[0.0, 1.0], 1e-12, 0.0, 2000);
        assert!((r.value + 1.0).abs() < 1e-11);
    }

    #[test]
    fn tanh_sinh_matches_closed_form() {
        let r = tanh_sinh(|_x: f64, da, db| 1.0 / (da * db).sqrt(), 0.0, 1.0, 1e-12, 10);
        assert!((r.value - std::f64::consts::PI).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn gauss_legendre_exactness() {
        let g = GaussLegendre::<f64>::new(10);
        let v = g.integrate(|x| x.powi(19) + x.powi(18), -1.0, 1.0);
        assert!((v - 2.0 / 19.0).abs() < 1e-14);
        let s: f64 = g.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn neumaier_compensates() {
        let mut acc = Neumaier::<f64>::new();
        acc.add(1.0);
        acc.add(1e100);
        acc.add(1.0);
        acc.add(-1e100);
        assert_eq!(acc.total(), 2.0);
    }
}
