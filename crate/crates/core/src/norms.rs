//! Radial Lebesgue and homogeneous Sobolev norms, the radial Fourier
//! transform `f̂(ρ) = (4π/ρ)∫₀^∞ sin(ρr) f(r) r dr`, and the constants
//! attached to the threshold asymptotics.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interp::CubicSpline;
use crate::penrose::RadialField;
use crate::quad::{adaptive, Neumaier};
use crate::scalar::Real;

/// A norm together with an estimate of the part contributed by modelled
/// (not integrated) tails.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormResult<T> {
    pub value: T,
    pub tail_estimate: T,
    pub divergent: bool,
}

impl<T: Real> NormResult<T> {
    fn divergent() -> Self {
        Self { value: T::infinity(), tail_estimate: T::infinity(), divergent: true }
    }

    pub fn squared(&self) -> T {
        self.value * self.value
    }

    /// From an integral `I` with modelled part `tail`, the norm `I^{1/p}`.
    fn from_power(integral: Integral<T>, p: T) -> Self {
        if integral.divergent {
            return Self::divergent();
        }
        let v = integral.value.max(T::zero());
        let value = v.powf(T::one() / p);
        let inner = (v - integral.tail).max(T::zero()).powf(T::one() / p);
        Self { value, tail_estimate: (value - inner).abs(), divergent: false }
    }
}

/// `f̂` sampled on a sorted grid of frequencies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSamples<T> {
    pub rhos: Vec<T>,
    pub fhat: Vec<T>,
}

/// `Spectral`: `4π∫|f̂|²ρ^{2+2ν}dρ`. `Plancherel`: the same times `(2π)⁻³`,
/// so that `ν = 0` gives `‖f‖²_{L²}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SobolevNormalization {
    Spectral,
    Plancherel,
}

impl SobolevNormalization {
    fn factor<T: Real>(self) -> T {
        match self {
            Self::Spectral => T::one(),
            Self::Plancherel => T::one() / (T::lit(8.0) * T::PI().powi(3)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_panels: usize,
    /// Distance from 0 at which the lower end is replaced by its power law.
    pub probe: T,
    pub max_decades: usize,
    /// Radius beyond which oscillatory integrals are summed panel by panel.
    pub fourier_core: T,
    pub fourier_panels: usize,
}

impl<T: Real> Default for NormConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(1e-10),
            abs_tol: T::lit(1e-300).max(T::min_positive_value()),
            max_panels: 20_000,
            probe: T::lit(1e-9),
            max_decades: 40,
            fourier_core: T::lit(40.0),
            fourier_panels: 48,
        }
    }
}

impl<T: Real> NormConfig<T> {
    pub fn scaled(mut self, factor: T) -> Self {
        self.rel_tol = crate::scalar::attainable((self.rel_tol * factor).as_f64());
        self
    }
}

#[derive(Clone, Copy, Debug)]
struct Integral<T> {
    value: T,
    tail: T,
    divergent: bool,
}

/// Log-slope of a positive function between `x` and `2x`.
fn local_exponent<T: Real>(g: &mut impl FnMut(T) -> T, x: T) -> Option<T> {
    let a = g(x);
    let b = g(x + x);
    if a > T::zero() && b > T::zero() && a.is_finite() && b.is_finite() {
        Some((b / a).ln() / T::LN_2())
    } else {
        None
    }
}

const EXPONENT_MARGIN: f64 = 1e-3;

/// `∫_a^b g` for a non-negative `g`, `0 ≤ a < b ≤ ∞`. Near `0` and `∞` the
/// integrand is replaced by its local power law; a non-summable power law
/// marks the integral divergent.
fn half_line<T: Real>(mut g: impl FnMut(T) -> T, a: T, b: T, breaks: &[T], cfg: &NormConfig<T>) -> Integral<T> {
    let one = T::one();
    let margin = T::lit(EXPONENT_MARGIN);
    let mut inner: Vec<T> = breaks.iter().copied().filter(|&x| x > a && x < b && x.is_finite()).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    inner.dedup();

    let mut tail = T::zero();
    let mut start = a;
    if a == T::zero() {
        let first = inner.first().copied().unwrap_or(if b.is_finite() { b } else { one });
        let eps = cfg.probe.min(first * T::lit(1e-6));
        match local_exponent(&mut g, eps * T::lit(0.5)) {
            Some(alpha) if alpha <= -one + margin => {
                return Integral { value: T::infinity(), tail: T::infinity(), divergent: true }
            }
            Some(alpha) => tail += g(eps) * eps / (alpha + one),
            None => {}
        }
        start = eps;
    }

    let mut pts = vec![start];
    pts.extend(inner.iter().copied());
    let mut top = if b.is_finite() { b } else { pts.last().copied().unwrap().max(one) * T::lit(10.0) };
    if !b.is_finite() && top <= start {
        top = start * T::lit(10.0);
    }
    // geometric refinement so that each panel spans at most a decade
    let mut refined = Vec::with_capacity(pts.len() * 2);
    pts.push(top);
    for w in pts.windows(2) {
        refined.push(w[0]);
        let mut x = w[0];
        while w[0] > T::zero() && x * T::lit(10.0) < w[1] {
            x *= T::lit(10.0);
            refined.push(x);
        }
    }
    refined.push(top);
    let body = adaptive(&mut g, &refined, cfg.rel_tol, cfg.abs_tol, cfg.max_panels);
    let mut total = Neumaier::new();
    total.add(body.value);

    if b.is_finite() {
        return Integral { value: total.total() + tail, tail, divergent: false };
    }

    let mut r = top;
    let mut prev_beta: Option<T> = None;
    for k in 0..cfg.max_decades {
        let beta = local_exponent(&mut g, r);
        let Some(beta) = beta else {
            return Integral { value: total.total() + tail, tail, divergent: false };
        };
        // the modelled tail is trusted once its exponent has stopped moving
        // at the level of the requested accuracy
        let settled = prev_beta.is_some_and(|pb| {
            let model = g(r) * r / (-beta - one).abs().max(margin);
            (pb - beta).abs() < T::lit(1e-3)
                && model * (pb - beta).abs() / (beta + one).abs().max(margin) <= cfg.rel_tol * total.total().abs()
        });
        if settled || k + 1 == cfg.max_decades {
            if beta >= -one - margin {
                return Integral { value: T::infinity(), tail: T::infinity(), divergent: true };
            }
            tail += g(r) * r / (-beta - one);
            return Integral { value: total.total() + tail, tail, divergent: false };
        }
        let piece = adaptive(
            &mut g,
            &[r, r * T::lit(2.0), r * T::lit(5.0), r * T::lit(10.0)],
            cfg.rel_tol,
            cfg.abs_tol,
            cfg.max_panels,
        );
        total.add(piece.value);
        prev_beta = Some(beta);
        r *= T::lit(10.0);
        if piece.value.abs() <= cfg.rel_tol * T::lit(1e-3) * total.total().abs() && beta < -one - margin {
            tail += g(r) * r / (-beta - one);
            return Integral { value: total.total() + tail, tail, divergent: false };
        }
    }
    Integral { value: total.total() + tail, tail, divergent: false }
}

/// `∫_a^b g` for a non-negative `g` on `0 ≤ a < b ≤ ∞`, with power-law
/// models at `0` and `∞`; `+∞` if a modelled end is not summable.
pub fn half_line_integral<T: Real>(g: impl FnMut(T) -> T, a: T, b: T, breaks: &[T], cfg: &NormConfig<T>) -> T {
    let i = half_line(g, a, b, breaks, cfg);
    if i.divergent {
        T::infinity()
    } else {
        i.value
    }
}

/// `‖f‖_{L^p}` of the radial function `f` over `a < |x| < b` (`b` may be
/// infinite); `breaks` marks radii where `f` has structure. For `p < 1`
/// this is the quasi-norm `(∫|f|^p)^{1/p}`.
pub fn lp_norm_fn<T: Real>(f: impl Fn(T) -> T, p: T, a: T, b: T, breaks: &[T], cfg: &NormConfig<T>) -> Result<NormResult<T>> {
    if !(p > T::zero()) || !(a >= T::zero()) || !(b > a) {
        return Err(Error::Parameter("need p > 0 and 0 ≤ a < b".into()));
    }
    let four_pi = T::lit(4.0) * T::PI();
    let g = |r: T| four_pi * f(r).abs().powf(p) * r * r;
    Ok(NormResult::from_power(half_line(g, a, b, breaks, cfg), p))
}

/// Least-squares fit `|f| ≈ c·r^{−k}` over the last decade of a sample set.
fn decay_fit<T: Real>(rs: &[T], fs: &[T]) -> Option<(T, T)> {
    let n = rs.len();
    if n < 2 {
        return None;
    }
    let r_end = rs[n - 1];
    let from = rs.partition_point(|&r| r < r_end / T::lit(10.0)).min(n - 2);
    let pts: Vec<(T, T)> = rs[from..]
        .iter()
        .zip(&fs[from..])
        .filter(|(r, f)| **r > T::zero() && f.abs() > T::zero())
        .map(|(r, f)| (r.ln(), f.abs().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let m = T::from_usize_lossy(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / m;
    let my = pts.iter().map(|p| p.1).sum::<T>() / m;
    let sxx: T = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: T = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= T::zero() {
        return None;
    }
    let slope = sxy / sxx;
    let k = -slope;
    // anchor the amplitude at the last sample
    let c = fs[n - 1].abs() * r_end.powf(k);
    Some((c, k))
}

/// `‖u(t)‖_{L^p}` from a sampled field, optionally restricted to an
/// `r`-interval. Beyond the last sample the decay `|u| ≈ c r^{−k}` fitted on
/// the final decade is integrated analytically.
pub fn lp_norm<T: Real>(field: &RadialField<T>, p: T, region: Option<(T, T)>) -> Result<NormResult<T>> {
    if !(p >= T::one()) {
        return Err(Error::Parameter("need p ≥ 1".into()));
    }
    let (lo, hi) = region.unwrap_or((T::zero(), T::infinity()));
    if !(hi > lo) {
        return Err(Error::Parameter("empty region".into()));
    }
    let four_pi = T::lit(4.0) * T::PI();
    let mut total = Neumaier::new();
    let mut run_r: Vec<T> = Vec::new();
    let mut run_g: Vec<T> = Vec::new();
    let mut any = false;
    let flush = |run_r: &mut Vec<T>, run_g: &mut Vec<T>, total: &mut Neumaier<T>| -> Result<()> {
        if run_r.len() >= 2 {
            let s = CubicSpline::new(run_r, run_g)?;
            total.add(s.integral(*run_r.last().unwrap()));
        }
        run_r.clear();
        run_g.clear();
        Ok(())
    };
    let n = field.rs.len();
    let mut reaches_end = false;
    for i in 0..n {
        let r = field.rs[i];
        let keep = field.in_domain[i] && r >= lo && r <= hi && field.u[i].is_finite();
        if keep {
            any = true;
            run_r.push(r);
            run_g.push(four_pi * field.u[i].abs().powf(p) * r * r);
            reaches_end = i + 1 == n;
        } else {
            flush(&mut run_r, &mut run_g, &mut total)?;
        }
    }
    flush(&mut run_r, &mut run_g, &mut total)?;
    if !any {
        return Err(Error::OutsideDomain {
            t: field.t.as_f64(),
            r: lo.as_f64(),
            lower: f64::NAN,
            upper: f64::NAN,
        });
    }

    let mut tail = T::zero();
    if hi.is_infinite() && reaches_end {
        let start = field.in_domain.iter().rposition(|d| !d).map_or(0, |i| i + 1);
        if let Some((c, k)) = decay_fit(&field.rs[start..], &field.u[start..]) {
            let q = k * p - T::lit(3.0);
            if q <= T::lit(EXPONENT_MARGIN) {
                return Ok(NormResult::divergent());
            }
            let r_end = field.rs[n - 1];
            tail = four_pi * c.powf(p) * r_end.powf(-q) / q;
        }
    }
    let integral = Integral { value: total.total() + tail, tail, divergent: false };
    Ok(NormResult::from_power(integral, p))
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums.
fn wynn_epsilon<T: Real>(s: &[T]) -> (T, T) {
    let n = s.len();
    let mut prev = vec![T::zero(); n + 1];
    let mut cur: Vec<T> = s.to_vec();
    let mut best = *s.last().unwrap();
    let mut best_err = T::infinity();
    let mut last_even: Option<T> = None;
    for k in 1..n {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for j in 0..cur.len() - 1 {
            let d = cur[j + 1] - cur[j];
            let base = if k == 1 { T::zero() } else { prev[j + 1] };
            if d == T::zero() {
                return (cur[j + 1], T::zero());
            }
            next.push(base + T::one() / d);
        }
        prev = cur;
        cur = next;
        if k % 2 == 0 && cur.len() >= 2 {
            let est = cur[cur.len() - 1];
            let err = (est - cur[cur.len() - 2]).abs();
            if let Some(le) = last_even {
                let err = err.max((est - le).abs());
                if err < best_err && est.is_finite() {
                    best = est;
                    best_err = err;
                }
            }
            last_even = Some(est);
        }
        if cur.len() < 2 {
            break;
        }
    }
    (best, best_err)
}

/// `f̂(ρ) = (4π/ρ)∫₀^∞ sin(ρr) f(r) r dr` for a closure `f`.
///
/// The integral is computed panel by panel over half periods `π/ρ`, with
/// the alternating partial sums beyond `fourier_core` accelerated by Wynn's
/// epsilon algorithm.
pub fn radial_fourier_fn<T: Real>(f: impl Fn(T) -> T, rho: T, cfg: &NormConfig<T>) -> Result<T> {
    if !(rho > T::zero() && rho.is_finite()) {
        return Err(Error::Parameter("frequency must be positive".into()));
    }
    let half = T::PI() / rho;
    let h = |r: T| (rho * r).sin() * r * f(r);
    let n0 = (cfg.fourier_core / half).ceil().max(T::one());
    let r0 = n0 * half;
    let mut pts = vec![T::zero()];
    let mut x = T::lit(0.125);
    while x < r0.min(half) {
        pts.push(x);
        x *= T::lit(2.0);
    }
    let mut k = T::one();
    while k <= n0 {
        pts.push(k * half);
        k += T::one();
    }
    pts.dedup();
    let core = adaptive(h, &pts, cfg.rel_tol, cfg.abs_tol, cfg.max_panels.max(4 * pts.len()));

    let m = cfg.fourier_panels;
    let mut partial = Vec::with_capacity(m);
    let mut acc = Neumaier::new();
    let mut first = T::zero();
    let mut last = T::zero();
    for j in 0..m {
        let a = r0 + T::from_usize_lossy(j) * half;
        let b = a + half;
        let mut panel_pts = vec![a];
        let mut y = a + T::lit(0.125);
        while y < b && half > T::lit(0.25) && panel_pts.len() < 64 {
            panel_pts.push(y);
            y = a + (y - a) * T::lit(2.0);
        }
        panel_pts.push(b);
        let term = adaptive(h, &panel_pts, cfg.rel_tol, cfg.abs_tol, cfg.max_panels).value;
        if j == 0 {
            first = term;
        }
        last = term;
        acc.add(term);
        partial.push(acc.total());
    }
    if first != T::zero() && last.abs() >= first.abs() {
        return Err(Error::Accuracy(format!(
            "radial Fourier integrand does not decay at rho = {}",
            rho.as_f64()
        )));
    }
    let (tail, _) = wynn_epsilon(&partial);
    Ok(T::lit(4.0) * T::PI() / rho * (core.value + tail))
}

/// The radial Fourier transform of sampled data on the frequencies `rhos`.
///
/// The samples are interpolated by a cubic spline and continued beyond the
/// grid by the power law `c r^{−k}` fitted on the final decade, which must
/// have `k > 1`.
pub fn radial_fourier<T: Real>(rs: &[T], fs: &[T], rhos: &[T], cfg: &NormConfig<T>) -> Result<SpectralSamples<T>> {
    let spline = CubicSpline::new(rs, fs)?;
    let (_, r_end) = spline.domain();
    let (c, k) = decay_fit(rs, fs).ok_or_else(|| Error::Accuracy("cannot fit a tail model".into()))?;
    if k <= T::one() {
        return Err(Error::Accuracy(format!("tail decays too slowly (exponent {})", k.as_f64())));
    }
    let sign = fs.last().unwrap().signum();
    let f = |r: T| if r <= r_end { spline.eval(r) } else { sign * c * r.powf(-k) };
    let fhat = rhos.iter().map(|&rho| radial_fourier_fn(f, rho, cfg)).collect::<Result<Vec<T>>>()?;
    Ok(SpectralSamples { rhos: rhos.to_vec(), fhat })
}

/// `û₀` for `u₀ = 2X/(1 + r²)`: `4π² X e^{−ρ}/ρ`.
pub fn fourier_u0<T: Real>(x: T, rho: T) -> T {
    T::lit(4.0) * T::PI() * T::PI() * x * (-rho).exp() / rho
}

/// `û₁` for `u₁ = 4Y/(1 + r²)²`: `4π² Y e^{−ρ}`.
pub fn fourier_u1<T: Real>(y: T, rho: T) -> T {
    T::lit(4.0) * T::PI() * T::PI() * y * (-rho).exp()
}

/// One row of the membership table for the initial data
/// `u₀ = 2X/(1 + r²)`, `u₁ = 4Y/(1 + r²)²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Membership<T> {
    /// `"u0 in L^p"`, `"u1 in L^p"`, `"u0 in H^s"` or `"u1 in H^s"`.
    pub statement: &'static str,
    pub critical: T,
    pub exponent: T,
    /// Whether the norm came out finite.
    pub finite: bool,
    /// Whether it should be finite (`exponent > critical`).
    pub expected: bool,
}

/// Checks `u₀ ∈ L^p ⟺ p > 3/2`, `u₁ ∈ L^p ⟺ p > 3/4`, `u₀ ∈ Ḣ^s ⟺ s > −1/2`
/// and `u₁ ∈ Ḣ^s ⟺ s > −3/2` at `critical ± offset`.
pub fn initial_data_membership<T: Real>(x: T, y: T, offset: T, cfg: &NormConfig<T>) -> Result<Vec<Membership<T>>> {
    if x == T::zero() || y == T::zero() {
        return Err(Error::Parameter("membership table needs X ≠ 0 and Y ≠ 0".into()));
    }
    let one = T::one();
    let u0 = |r: T| T::lit(2.0) * x / (one + r * r);
    let u1 = |r: T| {
        let q = one + r * r;
        T::lit(4.0) * y / (q * q)
    };
    let mut rows = Vec::with_capacity(8);
    for (statement, critical) in [
        ("u0 in L^p", T::lit(1.5)),
        ("u1 in L^p", T::lit(0.75)),
        ("u0 in H^s", T::lit(-0.5)),
        ("u1 in H^s", T::lit(-1.5)),
    ] {
        for exponent in [critical - offset, critical + offset] {
            let res = match statement {
                "u0 in L^p" => lp_norm_fn(u0, exponent, T::zero(), T::infinity(), &[one], cfg)?,
                "u1 in L^p" => lp_norm_fn(u1, exponent, T::zero(), T::infinity(), &[one], cfg)?,
                "u0 in H^s" => sobolev_norm_fn(|rho| fourier_u0(x, rho), exponent, SobolevNormalization::Spectral, cfg)?,
                _ => sobolev_norm_fn(|rho| fourier_u1(y, rho), exponent, SobolevNormalization::Spectral, cfg)?,
            };
            rows.push(Membership {
                statement,
                critical,
                exponent,
                finite: !res.divergent && res.value.is_finite(),
                expected: exponent > critical,
            });
        }
    }
    Ok(rows)
}

/// `‖f‖_{Ḣ^ν}` from a closure for `f̂`.
pub fn sobolev_norm_fn<T: Real>(
    fhat: impl Fn(T) -> T,
    nu: T,
    normalization: SobolevNormalization,
    cfg: &NormConfig<T>,
) -> Result<NormResult<T>> {
    if !nu.is_finite() {
        return Err(Error::Parameter("ν must be finite".into()));
    }
    let c = T::lit(4.0) * T::PI() * normalization.factor::<T>();
    let g = |rho: T| {
        let v = fhat(rho);
        c * v * v * rho.powf(T::lit(2.0) + T::lit(2.0) * nu)
    };
    Ok(NormResult::from_power(half_line(g, T::zero(), T::infinity(), &[T::one()], cfg), T::lit(2.0)))
}

/// `‖f‖_{Ḣ^ν}` from spectral samples, with power-law models below the first
/// and beyond the last frequency.
pub fn sobolev_norm<T: Real>(
    spec: &SpectralSamples<T>,
    nu: T,
    normalization: SobolevNormalization,
) -> Result<NormResult<T>> {
    let n = spec.rhos.len();
    if n < 3 || spec.fhat.len() != n {
        return Err(Error::Parameter("need at least three spectral samples".into()));
    }
    let c = T::lit(4.0) * T::PI() * normalization.factor::<T>();
    let g: Vec<T> = spec
        .rhos
        .iter()
        .zip(&spec.fhat)
        .map(|(&rho, &v)| c * v * v * rho.powf(T::lit(2.0) + T::lit(2.0) * nu))
        .collect();
    if g.iter().all(|v| *v == T::zero()) {
        return Ok(NormResult { value: T::zero(), tail_estimate: T::zero(), divergent: false });
    }
    let spline = CubicSpline::new(&spec.rhos, &g)?;
    let body = spline.integral(spec.rhos[n - 1]);
    let margin = T::lit(EXPONENT_MARGIN);
    let mut tail = T::zero();

    let rho0 = spec.rhos[0];
    if rho0 > T::zero() {
        // lower end: exponent from the first decade
        let upto = spec.rhos.partition_point(|&r| r <= rho0 * T::lit(10.0)).clamp(2, n);
        let rev_r: Vec<T> = spec.rhos[..upto].iter().map(|r| T::one() / *r).collect();
        let rev_g: Vec<T> = g[..upto].to_vec();
        let mut pr: Vec<T> = rev_r.into_iter().rev().collect();
        let mut pg: Vec<T> = rev_g.into_iter().rev().collect();
        pr.dedup();
        pg.truncate(pr.len());
        let negligible = g[0] * rho0 <= T::lit(1e-12) * body.abs();
        if let Some((_, k)) = decay_fit(&pr, &pg).filter(|_| !negligible) {
            // g ∝ ρ^{k} near zero
            if k <= -T::one() + margin {
                return Ok(NormResult::divergent());
            }
            tail += g[0] * rho0 / (k + T::one());
        }
    }
    let negligible = g[n - 1] * spec.rhos[n - 1] <= T::lit(1e-12) * body.abs();
    if let Some((_, k)) = decay_fit(&spec.rhos, &g).filter(|_| !negligible) {
        if g[n - 1] > T::zero() {
            if k <= T::one() + margin {
                return Ok(NormResult::divergent());
            }
            tail += g[n - 1] * spec.rhos[n - 1] / (k - T::one());
        }
    }
    Ok(NormResult::from_power(Integral { value: body + tail, tail, divergent: false }, T::lit(2.0)))
}

/// Radial sine transform of samples `w_j = w(jΔ)`, `j = 0..n`, by FFT.
///
/// Returns `ŵ(ρ_k) = (4π/ρ_k) Δ Σ_j sin(ρ_k r_j) r_j w_j` on
/// `ρ_k = kπ/(NΔ)`, `k = 1..N`, where the samples are zero-padded to
/// `N ≥ pad·n` points.
pub fn sine_transform<T: Real>(w: &[T], dr: T, pad: usize) -> Result<SpectralSamples<T>> {
    if w.len() < 2 || !(dr > T::zero()) || pad == 0 {
        return Err(Error::Parameter("need at least two samples and a positive spacing".into()));
    }
    let n_total = (w.len() * pad).next_power_of_two();
    let len = 2 * n_total;
    let mut buf = vec![Complex::new(T::zero(), T::zero()); len];
    for (j, &v) in w.iter().enumerate().skip(1) {
        let x = T::from_usize_lossy(j) * dr * v;
        buf[j].re = x;
        buf[len - j].re = -x;
    }
    let mut planner = FftPlanner::<T>::new();
    let fft: Arc<dyn rustfft::Fft<T>> = planner.plan_fft_forward(len);
    fft.process(&mut buf);
    let scale = T::lit(4.0) * T::PI() * dr;
    let step = T::PI() / (T::from_usize_lossy(n_total) * dr);
    let mut rhos = Vec::with_capacity(n_total - 1);
    let mut fhat = Vec::with_capacity(n_total - 1);
    for (k, z) in buf.iter().enumerate().take(n_total).skip(1) {
        let rho = T::from_usize_lossy(k) * step;
        let dst = -z.im * T::lit(0.5);
        rhos.push(rho);
        fhat.push(scale * dst / rho);
    }
    Ok(SpectralSamples { rhos, fhat })
}

/// `sin σ − σ cos σ`, by its Taylor series for small `σ`.
fn bessel_combination<T: Real>(s: T) -> T {
    if s.abs() < T::lit(0.5) {
        let s2 = s * s;
        let mut term = s * s2;
        let mut total = T::zero();
        let mut fact = T::lit(6.0);
        for n in 1..12 {
            let nn = T::from_usize_lossy(n);
            let sign = if n % 2 == 1 { T::one() } else { -T::one() };
            total += sign * T::lit(2.0) * nn * term / fact;
            term *= s2;
            fact = fact * (T::lit(2.0) * nn + T::lit(2.0)) * (T::lit(2.0) * nn + T::lit(3.0));
        }
        total
    } else {
        s.sin() - s * s.cos()
    }
}

/// `κ_ν = 128π³ ∫₀^∞ (sin σ − σ cos σ)² σ^{−4+2ν} dσ` for `ν ∈ [0, 1/2)`.
pub fn kappa<T: Real>(nu: T, cfg: &NormConfig<T>) -> Result<T> {
    if !(nu >= T::zero() && nu < T::lit(0.5)) {
        return Err(Error::Parameter(format!("ν = {} outside [0, 1/2)", nu.as_f64())));
    }
    let a = T::lit(-4.0) + T::lit(2.0) * nu;
    let n_periods = 64usize;
    let big_r = T::from_usize_lossy(n_periods) * T::PI();
    let g = |s: T| {
        let q = bessel_combination(s);
        q * q * s.powf(a)
    };
    let mut pts = vec![T::zero()];
    for k in 1..=n_periods {
        pts.push(T::from_usize_lossy(k) * T::PI());
    }
    let core = adaptive(g, &pts, cfg.rel_tol, cfg.abs_tol, cfg.max_panels).value;

    // at R = Nπ: C(b) = ∫_R^∞ σ^b cos 2σ = −(b/2) S(b−1),
    //            S(b) = ∫_R^∞ σ^b sin 2σ = R^b/2 + (b/2) C(b−1)
    fn osc<T: Real>(b: T, r: T, depth: usize, cosine: bool) -> T {
        if depth == 0 {
            return if cosine { T::zero() } else { r.powf(b) * T::lit(0.5) };
        }
        let half = b * T::lit(0.5);
        if cosine {
            -half * osc(b - T::one(), r, depth - 1, false)
        } else {
            r.powf(b) * T::lit(0.5) + half * osc(b - T::one(), r, depth - 1, true)
        }
    }
    let depth = 16;
    let power = |b: T| -big_r.powf(b + T::one()) / (b + T::one());
    let half = T::lit(0.5);
    let tail = half * power(a) + half * power(a + T::lit(2.0)) - half * osc(a, big_r, depth, true)
        + half * osc(a + T::lit(2.0), big_r, depth, true)
        - osc(a + T::one(), big_r, depth, false);
    Ok(T::lit(128.0) * T::PI().powi(3) * (core + tail))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> NormConfig<f64> {
        NormConfig::default()
    }

    #[test]
    fn lp_of_initial_data() {
        let x = 0.8;
        let r = lp_norm_fn(|r: f64| 2.0 * x / (1.0 + r * r), 2.0, 0.0, f64::INFINITY, &[], &cfg()).unwrap();
        assert!((r.value - (4.0 * PI * PI * x * x).sqrt()).abs() < 1e-9, "{r:?}");
        let d = lp_norm_fn(|r: f64| 2.0 * x / (1.0 + r * r), 1.45, 0.0, f64::INFINITY, &[], &cfg()).unwrap();
        assert!(d.divergent);
        let c = lp_norm_fn(|r: f64| 2.0 * x / (1.0 + r * r), 1.55, 0.0, f64::INFINITY, &[], &cfg()).unwrap();
        assert!(!c.divergent && c.value.is_finite());
        let z = lp_norm_fn(|_| 0.0f64, 2.0, 0.0, f64::INFINITY, &[], &cfg()).unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn lp_of_samples() {
        let mut rs = vec![0.0];
        let mut r = 1e-3;
        while r < 1e6 {
            rs.push(r);
            r *= 1.02;
        }
        let u: Vec<f64> = rs.iter().map(|r| 1.4 / (1.0 + r * r)).collect();
        let n = rs.len();
        let field = RadialField { t: 0.0, rs, u, ut: vec![0.0; n], in_domain: vec![true; n] };
        let l2 = lp_norm(&field, 2.0, None).unwrap();
        assert!((l2.value - (4.0 * PI * PI * 0.49f64).sqrt()).abs() < 1e-6, "{l2:?}");
        assert!(lp_norm(&field, 1.45, None).unwrap().divergent);
        let part = lp_norm(&field, 2.0, Some((0.0, 3.0))).unwrap();
        assert!(part.value < l2.value);
    }

    #[test]
    fn fourier_closed_forms() {
        for rho in [0.3, 1.0, 4.0] {
            let a = radial_fourier_fn(|r: f64| 1.0 / (1.0 + r * r), rho, &cfg()).unwrap();
            assert!((a - 2.0 * PI * PI * (-rho).exp() / rho).abs() < 1e-8, "{rho} {a}");
            let b = radial_fourier_fn(|r: f64| 1.0 / (1.0 + r * r).powi(2), rho, &cfg()).unwrap();
            assert!((b - PI * PI * (-rho).exp()).abs() < 1e-9, "{rho} {b}");
            let c = radial_fourier_fn(|r: f64| (-r).exp() / r, rho, &cfg()).unwrap();
            assert!((c - 4.0 * PI / (rho * rho + 1.0)).abs() < 1e-9, "{rho} {c}");
        }
    }

    #[test]
    fn sobolev_identity() {
        let (x, y) = (0.7, -1.3);
        let c = cfg();
        let h = sobolev_norm_fn(|r| fourier_u0(x, r), 0.5, SobolevNormalization::Plancherel, &c).unwrap();
        let hm = sobolev_norm_fn(|r| fourier_u1(y, r), -0.5, SobolevNormalization::Plancherel, &c).unwrap();
        let lhs = h.squared() + hm.squared();
        let rhs = 2.0 * PI * PI * (x * x + y * y);
        assert!(((lhs - rhs) / rhs).abs() < 1e-8, "{lhs} {rhs}");
        assert!(sobolev_norm_fn(|r| fourier_u0(x, r), -0.55, SobolevNormalization::Spectral, &c).unwrap().divergent);
        assert!(!sobolev_norm_fn(|r| fourier_u0(x, r), -0.45, SobolevNormalization::Spectral, &c).unwrap().divergent);
    }

    #[test]
    fn sampled_sobolev_matches_closed_form() {
        let rhos: Vec<f64> = (0..4000).map(|k| 1e-4 * 1.004f64.powi(k)).filter(|r| *r < 60.0).collect();
        let fhat: Vec<f64> = rhos.iter().map(|&r| fourier_u0(1.0, r)).collect();
        let spec = SpectralSamples { rhos, fhat };
        let s = sobolev_norm(&spec, 0.5, SobolevNormalization::Plancherel).unwrap();
        assert!((s.squared() - 2.0 * PI * PI).abs() < 1e-6, "{s:?}");
        assert!(sobolev_norm(&spec, -0.6, SobolevNormalization::Plancherel).unwrap().divergent);
    }

    #[test]
    fn fft_sine_transform() {
        let dr = 0.05;
        let w: Vec<f64> = (0..4000).map(|j| (-(j as f64 * dr)).exp()).collect();
        let spec = sine_transform(&w, dr, 2).unwrap();
        for (rho, f) in spec.rhos.iter().zip(&spec.fhat).step_by(97).take(30) {
            let exact = 8.0 * PI / (1.0 + rho * rho).powi(2);
            assert!((f - exact).abs() < 2e-3 * exact.max(1e-3), "{rho} {f} {exact}");
        }
    }

    #[test]
    fn kappa_zero() {
        let k0 = kappa(0.0, &cfg()).unwrap();
        assert!((k0 - 64.0 * PI.powi(4) / 3.0).abs() < 1e-8 * k0, "{k0}");
        let ks: Vec<f64> = (0..5).map(|i| kappa(i as f64 * 0.1, &cfg()).unwrap()).collect();
        assert!(ks.windows(2).all(|w| w[1] > w[0]));
        assert!(kappa(0.5, &cfg()).is_err());
    }

    #[test]
    fn series_matches_direct() {
        for s in [0.1f64, 0.3, 0.49] {
            assert!((bessel_combination(s) - (s.sin() - s * s.cos())).abs() < 1e-15);
        }
    }
}
