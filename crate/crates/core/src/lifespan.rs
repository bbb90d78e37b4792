//! Lifespan integrals `R`, `S` and the derived constants `T±`, `E_∞`, `X_C`.
//!
//! All integrands are `1/√P(v)` with `P(v) = 2E − v² + v⁴/2`. For `E ≤ 1/4`
//! the quartic factors as `½(v² − v₊²)(v² − v₋²)` and integrals starting at
//! a root are written in `w = v − v₊`, then `w = q²`, which removes the
//! inverse-square-root endpoint singularity. Beyond `tail_cut` the
//! substitution `v = 1/ω` maps the infinite tail to a regular integral.

use serde::{Deserialize, Serialize};

use crate::duffing::PhasePoint;
use crate::error::{Error, Result};
use crate::quad::{self, QuadResult};
use crate::roots::brent;
use crate::scalar::{attainable, Real};

/// Quadrature rule used for the lifespan integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadRule {
    GaussKronrod,
    TanhSinh,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Abscissa beyond which the `v = 1/ω` substitution is used.
    pub tail_cut: T,
    pub max_panels: usize,
    pub rule: QuadRule,
}

impl<T: Real> Default for QuadConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: attainable(1e-13),
            abs_tol: attainable(1e-15),
            tail_cut: T::lit(10.0),
            max_panels: 4000,
            rule: QuadRule::GaussKronrod,
        }
    }
}

impl<T: Real> QuadConfig<T> {
    pub fn scaled(mut self, factor: T) -> Self {
        self.rel_tol = (self.rel_tol * factor).max(T::tol_floor());
        self.abs_tol = (self.abs_tol * factor).max(T::min_positive_value());
        self
    }

    pub fn with_rule(mut self, rule: QuadRule) -> Self {
        self.rule = rule;
        self
    }
}

/// Energies closer than this to `1/4` are treated as exactly `1/4`.
pub const SEPARATRIX_BAND: f64 = 1e-12;

/// Maximal existence interval `(T₋, T₊)` of a Duffing solution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lifespan<T> {
    pub t_minus: T,
    pub t_plus: T,
    pub finite_minus: bool,
    pub finite_plus: bool,
}

impl<T: Real> Lifespan<T> {
    pub fn new(t_minus: T, t_plus: T) -> Self {
        Self { t_minus, t_plus, finite_minus: t_minus.is_finite(), finite_plus: t_plus.is_finite() }
    }

    pub fn contains(&self, s: T) -> bool {
        s > self.t_minus && s < self.t_plus
    }

    /// `T₊ + |T₋|`.
    pub fn total(&self) -> T {
        self.t_plus - self.t_minus
    }
}

fn integrate<T: Real, F: Fn(T) -> T>(f: F, points: &[T], cfg: &QuadConfig<T>) -> QuadResult<T> {
    match cfg.rule {
        QuadRule::GaussKronrod => quad::adaptive(&f, points, cfg.rel_tol, cfg.abs_tol, cfg.max_panels),
        QuadRule::TanhSinh => {
            let mut out = QuadResult { value: T::zero(), error: T::zero(), evaluations: 0, converged: true };
            for w in points.windows(2) {
                if w[1] <= w[0] {
                    continue;
                }
                let r = quad::tanh_sinh(|x, _, _| f(x), w[0], w[1], cfg.rel_tol, 12);
                out.value += r.value;
                out.error += r.error;
                out.evaluations += r.evaluations;
                out.converged &= r.converged;
            }
            out
        }
    }
}

/// Sorted, de-duplicated breakpoints within `[lo, hi]`.
fn breakpoints<T: Real>(lo: T, hi: T, interior: &[T]) -> Vec<T> {
    let mut pts = vec![lo];
    let mut inner: Vec<T> = interior.iter().copied().filter(|&x| x > lo && x < hi && x.is_finite()).collect();
    inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
    inner.dedup();
    pts.extend(inner);
    pts.push(hi);
    pts
}

/// Roots of the quartic for `E ≤ 1/4`.
#[derive(Clone, Copy, Debug)]
struct Roots<T> {
    lambda: T,
    v_plus: T,
    /// `v₋² = 1 − λ`, computed without cancellation.
    v_minus_sq: T,
}

fn roots<T: Real>(e: T) -> Roots<T> {
    let lambda = (T::one() - T::lit(4.0) * e).max(T::zero()).sqrt();
    Roots {
        lambda,
        v_plus: (T::one() + lambda).sqrt(),
        v_minus_sq: T::lit(4.0) * e / (T::one() + lambda),
    }
}

/// Tail integrand in `ω = 1/v`.
#[inline]
fn tail_integrand<T: Real>(e: T, w: T) -> T {
    let w2 = w * w;
    T::one() / (T::lit(0.5) - w2 + T::lit(2.0) * e * w2 * w2).sqrt()
}

/// `∫_b^c dv/√P(v)` for `E > 1/4` and `0 ≤ b < c ≤ ∞`.
fn above_separatrix<T: Real>(e: T, b: T, c: T, cfg: &QuadConfig<T>) -> T {
    if c <= b {
        return T::zero();
    }
    let cut = cfg.tail_cut;
    let gap = T::lit(2.0) * e - T::lit(0.5);
    let mut total = T::zero();
    if b < cut {
        let hi = c.min(cut);
        let delta = gap.sqrt();
        let one = T::one();
        let mut interior = vec![one];
        for k in [1.0, 10.0, 100.0] {
            interior.push(one - T::lit(k) * delta);
            interior.push(one + T::lit(k) * delta);
        }
        let pts = breakpoints(b, hi, &interior);
        let f = |v: T| {
            let d = v * v - one;
            one / (T::lit(0.5) * d * d + gap).sqrt()
        };
        total += integrate(f, &pts, cfg).value;
    }
    if c > cut {
        let w_lo = if c.is_finite() { T::one() / c } else { T::zero() };
        let w_hi = T::one() / b.max(cut);
        total += integrate(|w| tail_integrand(e, w), &[w_lo, w_hi], cfg).value;
    }
    total
}

/// `∫ √2 dw/√((w² + 2wv₊)(w² + 2wv₊ + 2λ))` over `[w_lo, w_hi]`, i.e. the
/// integral from `v₊ + w_lo` to `v₊ + w_hi` for `E ≤ 1/4`.
fn from_root<T: Real>(e: T, w_lo: T, w_hi: T, cfg: &QuadConfig<T>) -> T {
    if w_hi <= w_lo {
        return T::zero();
    }
    let rt = roots(e);
    let vp = rt.v_plus;
    let lam = rt.lambda;
    let two = T::lit(2.0);
    let w_cut = cfg.tail_cut.max(two * vp) - vp;
    let mut total = T::zero();
    if w_lo < w_cut {
        let q_lo = w_lo.sqrt();
        let q_hi = w_hi.min(w_cut).sqrt();
        let sl = lam.sqrt();
        let interior = [sl * T::lit(0.1), sl, sl * T::lit(10.0)];
        let pts = breakpoints(q_lo, q_hi, &interior);
        let f = |q: T| {
            let q2 = q * q;
            two * T::SQRT_2() / ((q2 + two * vp) * (q2 * q2 + two * q2 * vp + two * lam)).sqrt()
        };
        total += integrate(f, &pts, cfg).value;
    }
    if w_hi > w_cut {
        let w_lo_tail = if w_hi.is_finite() { T::one() / (vp + w_hi) } else { T::zero() };
        let w_hi_tail = T::one() / (vp + w_lo.max(w_cut));
        total += integrate(|w| tail_integrand(e, w), &[w_lo_tail, w_hi_tail], cfg).value;
    }
    total
}

/// `a − v₊` for a point `a = |X|` on the outer branch with `P(a) = Y²`,
/// via `a² − v₊² = 2Y²/(a² − v₋²)`.
fn offset_from_root<T: Real>(a: T, y: T, rt: &Roots<T>) -> T {
    let two = T::lit(2.0);
    two * y * y / ((a * a - rt.v_minus_sq) * (a + rt.v_plus))
}

/// `R(X, Y) = ∫_{X sign Y}^∞ dv/√(2E − v² + v⁴/2)`, `+∞` where the integral
/// diverges or the radicand turns negative.
pub fn quad_r<T: Real>(p: PhasePoint<T>, cfg: &QuadConfig<T>) -> T {
    let e = p.energy();
    let a = if p.y == T::zero() {
        p.x.abs()
    } else if p.y > T::zero() {
        p.x
    } else {
        -p.x
    };
    if !e.is_finite() || !a.is_finite() {
        return T::infinity();
    }
    if e > T::lit(0.25) {
        if a >= T::zero() {
            above_separatrix(e, a, T::infinity(), cfg)
        } else {
            above_separatrix(e, T::zero(), -a, cfg) + above_separatrix(e, T::zero(), T::infinity(), cfg)
        }
    } else if a > T::one() {
        let rt = roots(e);
        from_root(e, offset_from_root(a, p.y, &rt), T::infinity(), cfg)
    } else {
        T::infinity()
    }
}

/// `S(X, Y) = (∫_{v₊}^{|X|} + ∫_{v₊}^∞) dv/√(2E − v² + v⁴/2)`; `+∞` outside
/// `E < 1/4, |X| > 1`.
pub fn quad_s<T: Real>(p: PhasePoint<T>, cfg: &QuadConfig<T>) -> T {
    let e = p.energy();
    let ax = p.x.abs();
    if !(e < T::lit(0.25)) || !(ax > T::one()) || !ax.is_finite() {
        return T::infinity();
    }
    let rt = roots(e);
    let w_x = offset_from_root(ax, p.y, &rt);
    from_root(e, T::zero(), w_x, cfg) + from_root(e, T::zero(), T::infinity(), cfg)
}

/// Maximal forward existence time `T₊(X, Y)`.
pub fn t_plus<T: Real>(p: PhasePoint<T>, cfg: &QuadConfig<T>) -> T {
    let e = p.energy();
    let quarter = T::lit(0.25);
    let ax = p.x.abs();
    if (e - quarter).abs() <= T::lit(SEPARATRIX_BAND) {
        return if ax > T::one() && p.x * p.y > T::zero() {
            T::SQRT_2() * (T::one() / ax).atanh()
        } else {
            T::infinity()
        };
    }
    if e > quarter {
        quad_r(p, cfg)
    } else if ax <= T::one() {
        T::infinity()
    } else if p.x * p.y >= T::zero() {
        quad_r(p, cfg)
    } else {
        quad_s(p, cfg)
    }
}

/// `T₋(X, Y) = −T₊(X, −Y)`.
pub fn t_minus<T: Real>(p: PhasePoint<T>, cfg: &QuadConfig<T>) -> T {
    -t_plus(p.time_reversed(), cfg)
}

pub fn lifespan<T: Real>(p: PhasePoint<T>, cfg: &QuadConfig<T>) -> Lifespan<T> {
    Lifespan::new(t_minus(p, cfg), t_plus(p, cfg))
}

/// `T₊ + |T₋|` as a function of the energy alone.
pub fn total_lifespan_by_energy<T: Real>(e: T, cfg: &QuadConfig<T>) -> T {
    let quarter = T::lit(0.25);
    if !e.is_finite() || (e - quarter).abs() <= T::lit(SEPARATRIX_BAND) {
        return T::infinity();
    }
    let two = T::lit(2.0);
    if e > quarter {
        two * above_separatrix(e, T::zero(), T::infinity(), cfg)
    } else {
        two * from_root(e, T::zero(), T::infinity(), cfg)
    }
}

/// The energy `E_∞ > 1/4` at which the total lifespan equals `π`.
pub fn e_infinity<T: Real>(cfg: &QuadConfig<T>) -> Result<T> {
    let pi = T::PI();
    let quarter = T::lit(0.25);
    let f = |e: T| total_lifespan_by_energy(e, cfg) - pi;
    let mut lo = quarter + T::lit(1e-2);
    while f(lo) <= T::zero() {
        lo = quarter + (lo - quarter) * T::lit(0.01);
        if lo - quarter < T::lit(1e-10) {
            return Err(Error::Bracket { what: "E_inf (lower)".into(), limit: lo.as_f64() });
        }
    }
    let mut hi = T::one();
    while f(hi) >= T::zero() {
        hi *= T::lit(2.0);
        if hi > T::lit(1e12) {
            return Err(Error::Bracket { what: "E_inf (upper)".into(), limit: hi.as_f64() });
        }
    }
    brent(f, lo, hi, cfg.rel_tol * hi, 200)
}

/// `T₊` on the boundary `Y = 0`, `√2 ∫₀^∞ dw/√(X²(cosh²w + 1) − 2)`.
///
/// Evaluated after the substitution `sinh w = κ sinh z`, `κ² = 2(X² − 1)/X²`,
/// which turns it into `(√2/|X|) ∫₀^∞ dz/√(1 + κ² sinh² z)`.
pub fn boundary_tplus<T: Real>(x: T, cfg: &QuadConfig<T>) -> T {
    let ax = x.abs();
    if !(ax > T::one()) {
        return T::infinity();
    }
    let x2 = ax * ax;
    let kappa2 = T::lit(2.0) * (x2 - T::one()) / x2;
    let kappa = kappa2.sqrt();
    let z1 = (T::one() / kappa).asinh();
    let z_end = z1 + T::lit(40.0);
    let f = |z: T| {
        let sh = z.sinh();
        T::one() / (T::one() + kappa2 * sh * sh).sqrt()
    };
    let pts = breakpoints(T::zero(), z_end, &[z1 * T::lit(0.5), z1, z1 + T::one(), z1 + T::lit(5.0)]);
    let body = integrate(f, &pts, cfg).value;
    // ∫_Z^∞ dz/(κ sinh z) = ln coth(Z/2)/κ, and the correction beyond is negligible
    let tail = (T::one() / (z_end * T::lit(0.5)).tanh()).ln() / kappa;
    T::SQRT_2() / ax * (body + tail)
}

/// The root `X_C ∈ (1, √2)` of `boundary_tplus(X) = π`.
pub fn x_critical<T: Real>(cfg: &QuadConfig<T>) -> Result<T> {
    let pi = T::PI();
    let f = |x: T| boundary_tplus(x, cfg) - pi;
    let mut lo = T::one() + T::lit(1e-3);
    while f(lo) <= T::zero() {
        lo = T::one() + (lo - T::one()) * T::lit(1e-2);
        if lo - T::one() < T::lit(1e-14) {
            return Err(Error::Bracket { what: "X_C".into(), limit: lo.as_f64() });
        }
    }
    brent(f, lo, T::SQRT_2(), cfg.rel_tol, 200)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    fn cfg() -> QuadConfig<f64> {
        QuadConfig::default()
    }

    #[test]
    fn r_at_sqrt2_boundary() {
        let v = quad_r(PhasePoint::new(SQRT_2, 0.0), &cfg());
        assert!((v - FRAC_PI_2).abs() < 1e-12, "{v}");
    }

    #[test]
    fn r_on_ezero_branch() {
        let v = quad_r(PhasePoint::new(2.0, 2.0), &cfg());
        assert!((v - FRAC_PI_4).abs() < 1e-12, "{v}");
    }

    #[test]
    fn separatrix_closed_form() {
        let p = PhasePoint::new(2.0, 3.0 / SQRT_2);
        let exact = SQRT_2 * 0.5f64.atanh();
        assert!((t_plus(p, &cfg()) - exact).abs() < 1e-14);
        // the same integral through the generic quadrature
        assert!((quad_r(p, &cfg()) - exact).abs() < 1e-11);
        assert_eq!(t_minus(p, &cfg()), f64::NEG_INFINITY);
    }

    #[test]
    fn dispatch_infinite_cases() {
        assert_eq!(t_plus(PhasePoint::new(0.5, 0.0), &cfg()), f64::INFINITY);
        assert_eq!(t_plus(PhasePoint::new(1.0, 0.0), &cfg()), f64::INFINITY);
        assert_eq!(t_minus(PhasePoint::new(0.5, 0.0), &cfg()), f64::NEG_INFINITY);
        assert!((t_minus(PhasePoint::new(2.0, -2.0), &cfg()) + FRAC_PI_4).abs() < 1e-12);
        assert_eq!(quad_r(PhasePoint::new(0.5, -0.1), &cfg()), f64::INFINITY);
        assert_eq!(quad_s(PhasePoint::new(0.5, 0.1), &cfg()), f64::INFINITY);
    }

    #[test]
    fn total_at_zero_energy() {
        assert!((total_lifespan_by_energy(0.0, &cfg()) - PI).abs() < 1e-12);
        assert_eq!(total_lifespan_by_energy(0.25, &cfg()), f64::INFINITY);
    }

    #[test]
    fn s_near_zero_energy() {
        // at |X| = √2 the first branch collapses, leaving ∫_{√2}^∞ = π/2
        let v = quad_s(PhasePoint::new(SQRT_2, -1e-6), &cfg());
        assert!((v - FRAC_PI_2).abs() < 1e-5, "{v}");
        // on the E = 0 branch: (π/2 − arcsin(√2/2)) + π/2
        let v = quad_s(PhasePoint::new(2.0, -2.0), &cfg());
        assert!((v - 3.0 * FRAC_PI_4).abs() < 1e-12, "{v}");
    }

    #[test]
    fn boundary_limits() {
        assert!((boundary_tplus(SQRT_2, &cfg()) - FRAC_PI_2).abs() < 1e-13);
        assert!(boundary_tplus(1.0 + 1e-12, &cfg()) > 10.0);
        assert_eq!(boundary_tplus(1.0, &cfg()), f64::INFINITY);
        let q = quad_r(PhasePoint::new(1.2, 0.0), &cfg());
        assert!((boundary_tplus(1.2, &cfg()) - q).abs() < 1e-11);
    }

    #[test]
    fn constants_satisfy_definitions() {
        let xc = x_critical(&cfg()).unwrap();
        assert!(xc > 1.0 && xc < SQRT_2);
        assert!((boundary_tplus(xc, &cfg()) - PI).abs() < 1e-10);
        let einf = e_infinity(&cfg()).unwrap();
        assert!(einf > 0.25);
        assert!((total_lifespan_by_energy(einf, &cfg()) - PI).abs() < 1e-10);
    }

    #[test]
    fn tanh_sinh_agrees() {
        let ts = cfg().with_rule(QuadRule::TanhSinh);
        for p in [(0.3, 1.2), (2.0, 1.5), (-2.0, 1.0), (1.5, -0.2)] {
            let p = PhasePoint::new(p.0, p.1);
            let a = t_plus(p, &cfg());
            let b = t_plus(p, &ts);
            assert!((a - b).abs() < 1e-10, "{p:?}: {a} {b}");
        }
    }
}
