//! Quantitative checks of the asymptotic laws: threshold growth, interior
//! self-similarity, exterior radiation, blow-up rates, the blow-up profile
//! and the attractor.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::duffing::{PhasePoint, Sign};
use crate::error::{Error, Result};
use crate::interp::CubicSpline;
use crate::norms::{
    half_line_integral, lp_norm_fn, sine_transform, sobolev_norm, NormConfig, SobolevNormalization, SpectralSamples,
};
use crate::penrose::{conformal_factors, influence_bound, Field, FieldConfig};
use crate::scalar::Real;
use crate::threshold::{classify_forward, Behavior, ThresholdConfig};

/// Outcome of fitting a law along a sequence of times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult<T> {
    pub coefficient: T,
    pub exponent_or_slope: T,
    /// Largest relative deviation between the samples and the fitted law.
    pub residual: T,
    pub window: (T, T),
    /// The paper's value for `coefficient`, where there is one.
    pub reference: Option<T>,
    /// `(t or t₊ − t, measured quantity)`.
    pub samples: Vec<(T, T)>,
}

/// One slice of the blow-up profile in self-similar variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample<T> {
    pub sigma: T,
    pub ys: Vec<T>,
    pub w: Vec<T>,
    pub d: T,
    /// `sup_y |w − √2(1 − d²)^{1/2}/(1 + yd)|`.
    pub deviation: T,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticsConfig<T> {
    pub field: FieldConfig<T>,
    pub norm: NormConfig<T>,
    pub threshold: ThresholdConfig<T>,
    /// Radial step of the FFT grid used for Sobolev norms at large `t`.
    pub spectral_step: T,
    pub spectral_pad: usize,
    /// Uniform step and extent of the inner part of the radiation grid.
    pub linear_step: T,
    pub linear_uniform_end: T,
    /// Geometric ratio and extent of the outer part.
    pub linear_ratio: T,
    pub linear_end: T,
}

impl<T: Real> Default for AsymptoticsConfig<T> {
    fn default() -> Self {
        Self {
            field: FieldConfig::default(),
            norm: NormConfig { rel_tol: T::lit(1e-9), ..NormConfig::default() },
            threshold: ThresholdConfig::default(),
            spectral_step: T::lit(0.1),
            spectral_pad: 2,
            linear_step: T::lit(0.01),
            linear_uniform_end: T::lit(20.0),
            linear_ratio: T::lit(1.002),
            linear_end: T::lit(1e7),
        }
    }
}

impl<T: Real> AsymptoticsConfig<T> {
    pub fn scaled(self, factor: T) -> Self {
        Self {
            field: self.field.scaled(factor),
            norm: self.norm.scaled(factor),
            threshold: ThresholdConfig { quad: self.threshold.quad.scaled(factor), ..self.threshold },
            ..self
        }
    }
}

/// `t₀, t₀·10^{1/k}, …` up to `t₁` (inclusive up to rounding).
pub fn geometric_grid<T: Real>(t0: T, t1: T, per_decade: usize) -> Vec<T> {
    let ratio = T::lit(10.0).powf(T::one() / T::from_usize_lossy(per_decade.max(1)));
    let n = ((t1 / t0).ln() / ratio.ln() + T::lit(1e-9)).floor().to_usize().unwrap_or(0);
    (0..=n).map(|k| t0 * ratio.powi(k as i32)).collect()
}

fn require<T: Real>(p: PhasePoint<T>, want: Behavior, cfg: &AsymptoticsConfig<T>) -> Result<()> {
    let found = classify_forward(p, &cfg.threshold)?;
    if found != want {
        return Err(Error::Classification {
            x: p.x.as_f64(),
            y: p.y.as_f64(),
            found: found.as_str().into(),
            expected: want.as_str().into(),
        });
    }
    Ok(())
}

/// Sign of the profile at its forward end (`±√2/t` at threshold, the sign
/// of `U → ±∞` at blow-up).
fn forward_sign<T: Real>(field: &Field<T>) -> T {
    let t_plus = field.lifespan().t_plus;
    let s = if t_plus.is_finite() { t_plus - T::lit(1e-6) } else { T::PI() - T::lit(1e-6) };
    match field.profile().eval(s) {
        Ok(st) => st.u.signum(),
        Err(_) => T::one(),
    }
}

fn window<T: Real>(xs: &[T]) -> (T, T) {
    let lo = xs.iter().copied().fold(T::infinity(), T::min);
    let hi = xs.iter().copied().fold(T::neg_infinity(), T::max);
    (lo, hi)
}

/// Least squares `y ≈ a + b x`.
fn linear_fit<T: Real>(xs: &[T], ys: &[T]) -> (T, T) {
    let n = T::from_usize_lossy(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxx: T = xs.iter().map(|x| (*x - mx) * (*x - mx)).sum();
    let sxy: T = xs.iter().zip(ys).map(|(x, y)| (*x - mx) * (*y - my)).sum();
    let b = if sxx > T::zero() { sxy / sxx } else { T::zero() };
    (my - b * mx, b)
}

/// Least squares `y ≈ Σ c_k f_k(x)` for a handful of basis functions.
fn basis_fit<T: Real>(xs: &[T], ys: &[T], basis: &[&dyn Fn(T) -> T]) -> Vec<T> {
    let m = basis.len();
    let mut a = vec![vec![T::zero(); m]; m];
    let mut rhs = vec![T::zero(); m];
    for (&x, &y) in xs.iter().zip(ys) {
        let f: Vec<T> = basis.iter().map(|b| b(x)).collect();
        for i in 0..m {
            rhs[i] += f[i] * y;
            for j in 0..m {
                a[i][j] += f[i] * f[j];
            }
        }
    }
    // Gaussian elimination with partial pivoting
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()).unwrap();
        a.swap(col, piv);
        rhs.swap(col, piv);
        if a[col][col] == T::zero() {
            continue;
        }
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            let (top, bottom) = a.split_at_mut(row);
            for (x, &v) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= f * v;
            }
            let v = rhs[col];
            rhs[row] -= f * v;
        }
    }
    let mut c = vec![T::zero(); m];
    for i in (0..m).rev() {
        let mut acc = rhs[i];
        for k in i + 1..m {
            acc -= a[i][k] * c[k];
        }
        c[i] = if a[i][i] != T::zero() { acc / a[i][i] } else { T::zero() };
    }
    c
}

fn log_slope<T: Real>(xs: &[T], ys: &[T]) -> T {
    let lx: Vec<T> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<T> = ys.iter().map(|y| y.abs().ln()).collect();
    linear_fit(&lx, &ly).1
}

/// Weighted interior residuals `t(t−r)²(|u ∓ √2/t| + (t−r)|∂ₜu ± √2/t²|)` for
/// `r ≤ t − 1`; `coefficient` is their supremum and `exponent_or_slope` the
/// log-log slope of the per-time suprema (bounded residuals give slope ≤ 0).
pub fn interior_self_similar_check<T: Real>(
    p: PhasePoint<T>,
    ts: &[T],
    r_fractions: &[T],
    cfg: &AsymptoticsConfig<T>,
) -> Result<FitResult<T>> {
    require(p, Behavior::Threshold, cfg)?;
    let field = Field::new(p, &cfg.field)?;
    let sg = forward_sign(&field);
    let sqrt2 = T::SQRT_2();
    let mut samples = Vec::with_capacity(ts.len());
    for &t in ts {
        let mut sup = T::zero();
        for &frac in r_fractions {
            let r = (frac * t).min(t - T::one()).max(T::zero());
            let fp = field.eval(t, r)?;
            let gap = t - r;
            let a = (fp.u - sg * sqrt2 / t).abs();
            let b = (fp.ut + sg * sqrt2 / (t * t)).abs();
            sup = sup.max(t * gap * gap * (a + gap * b));
        }
        samples.push((t, sup));
    }
    let xs: Vec<T> = samples.iter().map(|s| s.0).collect();
    let ys: Vec<T> = samples.iter().map(|s| s.1).collect();
    let coefficient = ys.iter().copied().fold(T::zero(), T::max);
    let slope = log_slope(&xs, &ys);
    let min = ys.iter().copied().fold(T::infinity(), T::min);
    Ok(FitResult {
        coefficient,
        exponent_or_slope: slope,
        residual: if min > T::zero() { coefficient / min - T::one() } else { T::infinity() },
        window: window(&xs),
        reference: None,
        samples,
    })
}

/// `t³|u(t, 0) ∓ √2/t|` along `ts`.
pub fn center_residuals<T: Real>(p: PhasePoint<T>, ts: &[T], cfg: &AsymptoticsConfig<T>) -> Result<Vec<(T, T)>> {
    let field = Field::new(p, &cfg.field)?;
    let sg = forward_sign(&field);
    ts.iter()
        .map(|&t| Ok((t, t * t * t * (field.value(t, T::zero())? - sg * T::SQRT_2() / t).abs())))
        .collect()
}

fn cone_breaks<T: Real>(t: T) -> Vec<T> {
    let mut v = Vec::new();
    for d in [-30.0, -10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0, 30.0] {
        let r = t + T::lit(d);
        if r > T::zero() {
            v.push(r);
        }
    }
    v
}

/// `‖u(t)‖_{L^p}` by direct radial quadrature.
pub fn field_lp<T: Real>(field: &Field<T>, t: T, p: T, region: (T, T), cfg: &NormConfig<T>) -> Result<T> {
    let mut breaks = cone_breaks(t);
    breaks.push(T::one());
    let res = lp_norm_fn(|r| field.value(t, r).unwrap_or(T::nan()), p, region.0, region.1, &breaks, cfg)?;
    if res.divergent || !res.value.is_finite() {
        return Err(Error::Accuracy(format!("L^{} norm at t = {} not finite", p.as_f64(), t.as_f64())));
    }
    Ok(res.value)
}

/// Fits `‖u(t)‖_{L^p} = a t^{3/p−1}(1 + b t^{−1/p})` and compares `a` to
/// `(4π)^{1/p}√2/3^{1/p}`.
pub fn threshold_lp_asymptotic<T: Real>(
    p: PhasePoint<T>,
    ts: &[T],
    p_exp: T,
    cfg: &AsymptoticsConfig<T>,
) -> Result<FitResult<T>> {
    if !(p_exp > T::lit(1.5)) {
        return Err(Error::Parameter("need p > 3/2".into()));
    }
    require(p, Behavior::Threshold, cfg)?;
    let field = Field::new(p, &cfg.field)?;
    let norms: Vec<T> = ts
        .par_iter()
        .map(|&t| field_lp(&field, t, p_exp, (T::zero(), T::infinity()), &cfg.norm))
        .collect::<Result<_>>()?;
    let e = T::lit(3.0) / p_exp - T::one();
    let scaled: Vec<T> = ts.iter().zip(&norms).map(|(t, n)| *n / t.powf(e)).collect();
    let corr = -T::one() / p_exp;
    let one = |_: T| T::one();
    let lower = |t: T| t.powf(corr);
    let c = basis_fit(ts, &scaled, &[&one, &lower]);
    let reference = (T::lit(4.0) * T::PI()).powf(T::one() / p_exp) * T::SQRT_2() / T::lit(3.0).powf(T::one() / p_exp);
    let residual = ts
        .iter()
        .zip(&scaled)
        .map(|(t, y)| ((c[0] + c[1] * t.powf(corr)) - *y).abs() / y.abs())
        .fold(T::zero(), T::max);
    Ok(FitResult {
        coefficient: c[0],
        exponent_or_slope: log_slope(ts, &norms),
        residual,
        window: window(ts),
        reference: Some(reference),
        samples: ts.iter().copied().zip(norms).collect(),
    })
}

/// `‖u(t)‖_{L^p({|x| > t − m})}`, which is `O(t^{2/p−1})`.
pub fn exterior_lp<T: Real>(p: PhasePoint<T>, ts: &[T], p_exp: T, m: T, cfg: &AsymptoticsConfig<T>) -> Result<FitResult<T>> {
    let field = Field::new(p, &cfg.field)?;
    let norms: Vec<T> = ts
        .par_iter()
        .map(|&t| field_lp(&field, t, p_exp, ((t - m).max(T::zero()), T::infinity()), &cfg.norm))
        .collect::<Result<_>>()?;
    let e = T::lit(2.0) / p_exp - T::one();
    let scaled: Vec<T> = ts.iter().zip(&norms).map(|(t, n)| *n / t.powf(e)).collect();
    let max = scaled.iter().copied().fold(T::zero(), T::max);
    let min = scaled.iter().copied().fold(T::infinity(), T::min);
    Ok(FitResult {
        coefficient: max,
        exponent_or_slope: log_slope(ts, &norms),
        residual: max / min - T::one(),
        window: window(ts),
        reference: None,
        samples: ts.iter().copied().zip(norms).collect(),
    })
}

/// `‖u − √2/t‖_{L^p(|x| ≤ t − t^α)}` scaled by its predicted rate
/// `t^{2/p−1}t^{−α(3−1/p)}`.
pub fn interior_lp_deviation<T: Real>(
    p: PhasePoint<T>,
    ts: &[T],
    p_exp: T,
    alpha: T,
    cfg: &AsymptoticsConfig<T>,
) -> Result<FitResult<T>> {
    require(p, Behavior::Threshold, cfg)?;
    let field = Field::new(p, &cfg.field)?;
    let sg = forward_sign(&field);
    let vals: Vec<T> = ts
        .par_iter()
        .map(|&t| {
            let edge = t - t.powf(alpha);
            let f = |r: T| field.value(t, r).map(|u| u - sg * T::SQRT_2() / t).unwrap_or(T::nan());
            let mut breaks = vec![T::one()];
            breaks.extend(cone_breaks(t).into_iter().filter(|b| *b < edge));
            lp_norm_fn(f, p_exp, T::zero(), edge, &breaks, &cfg.norm).map(|n| n.value)
        })
        .collect::<Result<_>>()?;
    let rate = |t: T| t.powf(T::lit(2.0) / p_exp - T::one() - alpha * (T::lit(3.0) - T::one() / p_exp));
    let scaled: Vec<T> = ts.iter().zip(&vals).map(|(t, v)| *v / rate(*t)).collect();
    let max = scaled.iter().copied().fold(T::zero(), T::max);
    let min = scaled.iter().copied().fold(T::infinity(), T::min);
    Ok(FitResult {
        coefficient: max,
        exponent_or_slope: log_slope(ts, &vals),
        residual: max / min - T::one(),
        window: window(ts),
        reference: None,
        samples: ts.iter().copied().zip(vals).collect(),
    })
}

/// Radial Fourier transform of `u(t)` on a uniform FFT grid.
///
/// The far field `2X/(t² + r²)`, whose transform `4π²X e^{−tρ}/ρ` is known,
/// is subtracted before sampling so that the remainder decays like `r⁻⁴`.
pub fn field_spectrum<T: Real>(field: &Field<T>, t: T, step: T, extent: T, pad: usize) -> Result<SpectralSamples<T>> {
    let x = field.phase_point().x;
    let two = T::lit(2.0);
    let n = (extent / step).ceil().to_usize().unwrap_or(0) + 1;
    let w: Vec<T> = (0..n)
        .into_par_iter()
        .map(|j| {
            let r = T::from_usize_lossy(j) * step;
            field.value(t, r).map(|u| u - two * x / (t * t + r * r))
        })
        .collect::<Result<_>>()?;
    let mut spec = sine_transform(&w, step, pad)?;
    let c = T::lit(4.0) * T::PI() * T::PI() * x;
    for (rho, f) in spec.rhos.iter().zip(spec.fhat.iter_mut()) {
        *f += c * (-t * *rho).exp() / *rho;
    }
    Ok(spec)
}

/// The spectrum of the threshold solution at time `t` with the default
/// grid `Δ`, `L = 8t + 50`.
pub fn threshold_spectrum<T: Real>(field: &Field<T>, t: T, cfg: &AsymptoticsConfig<T>) -> Result<SpectralSamples<T>> {
    field_spectrum(field, t, cfg.spectral_step, T::lit(8.0) * t + T::lit(50.0), cfg.spectral_pad)
}

/// Squared `Ḣ^ν` norms (spectral normalization) of the threshold solution
/// along `ts`, one spectrum per time shared by all `ν`.
pub fn threshold_sobolev_sweep<T: Real>(
    p: PhasePoint<T>,
    nus: &[T],
    ts: &[T],
    cfg: &AsymptoticsConfig<T>,
) -> Result<Vec<Vec<T>>> {
    require(p, Behavior::Threshold, cfg)?;
    let field = Field::new(p, &cfg.field)?;
    let mut out = vec![Vec::with_capacity(ts.len()); nus.len()];
    for &t in ts {
        let spec = threshold_spectrum(&field, t, cfg)?;
        for (k, &nu) in nus.iter().enumerate() {
            let n = sobolev_norm(&spec, nu, SobolevNormalization::Spectral)?;
            if n.divergent {
                return Err(Error::Accuracy(format!("Ḣ^{} norm diverged at t = {}", nu.as_f64(), t.as_f64())));
            }
            out[k].push(n.squared());
        }
    }
    Ok(out)
}

/// Interprets squared `Ḣ^ν` norms along `ts` according to the regime of `ν`:
/// `κ t^{1−2ν}(1 + O(t^{ν−1/2}))` below `1/2`, `slope·log t` at `1/2`, and
/// boundedness (`coefficient = max/min`) above.
pub fn fit_sobolev_growth<T: Real>(nu: T, ts: &[T], squared: &[T], cfg: &AsymptoticsConfig<T>) -> Result<FitResult<T>> {
    let half = T::lit(0.5);
    let samples: Vec<(T, T)> = ts.iter().copied().zip(squared.iter().copied()).collect();
    if (nu - half).abs() < T::lit(1e-12) {
        let lx: Vec<T> = ts.iter().map(|t| t.ln()).collect();
        let (a, b) = linear_fit(&lx, squared);
        let residual = lx
            .iter()
            .zip(squared)
            .map(|(x, y)| (a + b * *x - *y).abs() / y.abs())
            .fold(T::zero(), T::max);
        return Ok(FitResult {
            coefficient: b,
            exponent_or_slope: b,
            residual,
            window: window(ts),
            reference: Some(T::lit(64.0) * T::PI().powi(3)),
            samples,
        });
    }
    if nu < half {
        let e = T::one() - T::lit(2.0) * nu;
        let scaled: Vec<T> = ts.iter().zip(squared).map(|(t, y)| *y / t.powf(e)).collect();
        let corr = nu - half;
        let one = |_: T| T::one();
        let lower = |t: T| t.powf(corr);
        let c = basis_fit(ts, &scaled, &[&one, &lower]);
        let residual = ts
            .iter()
            .zip(&scaled)
            .map(|(t, y)| ((c[0] + c[1] * t.powf(corr)) - *y).abs() / y.abs())
            .fold(T::zero(), T::max);
        let reference = if nu >= T::zero() { Some(crate::norms::kappa(nu, &cfg.norm)?) } else { None };
        return Ok(FitResult {
            coefficient: c[0],
            exponent_or_slope: log_slope(ts, squared),
            residual,
            window: window(ts),
            reference,
            samples,
        });
    }
    let max = squared.iter().copied().fold(T::zero(), T::max);
    let min = squared.iter().copied().fold(T::infinity(), T::min);
    Ok(FitResult {
        coefficient: max / min,
        exponent_or_slope: log_slope(ts, squared),
        residual: max / min - T::one(),
        window: window(ts),
        reference: None,
        samples,
    })
}

pub fn threshold_sobolev_asymptotic<T: Real>(
    p: PhasePoint<T>,
    nu: T,
    ts: &[T],
    cfg: &AsymptoticsConfig<T>,
) -> Result<FitResult<T>> {
    let sq = threshold_sobolev_sweep(p, &[nu], ts, cfg)?;
    fit_sobolev_growth(nu, ts, &sq[0], cfg)
}

/// The radiation profile `g(η) = −(1+η²)^{−1/2} U(π/2 − arctan η)` of a
/// threshold solution, with the linear wave `v_L` built from it.
#[derive(Clone, Debug)]
pub struct Radiation<T> {
    field: Field<T>,
}

/// `(g, g′, g″)` at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiationValue<T> {
    pub g: T,
    pub dg: T,
    pub d2g: T,
}

impl<T: Real> Radiation<T> {
    pub fn new(p: PhasePoint<T>, cfg: &FieldConfig<T>) -> Result<Self> {
        Ok(Self { field: Field::new(p, cfg)? })
    }

    pub fn from_field(field: Field<T>) -> Self {
        Self { field }
    }

    pub fn field(&self) -> &Field<T> {
        &self.field
    }

    /// `g`, `g′` and `g″`; with `c = (1+η²)^{−1/2}` and `θ = π/2 − arctan η`,
    /// `g′ = c³(ηU + U̇)` and
    /// `g″ = −3ηc⁵(ηU + U̇) + c³(U − c²(ηU̇ + U³ − U))`.
    pub fn eval(&self, eta: T) -> Result<RadiationValue<T>> {
        let one = T::one();
        let c = one / (one + eta * eta).sqrt();
        let st = if eta < T::zero() {
            // θ = π − arctan(1/|η|)
            self.field.profile().eval_offset(T::PI(), -(one / -eta).atan())?
        } else {
            self.field.profile().eval(T::FRAC_PI_2() - eta.atan())?
        };
        let (u, ud) = (st.u, st.udot);
        let c2 = c * c;
        let c3 = c2 * c;
        let inner = eta * u + ud;
        Ok(RadiationValue {
            g: -c * u,
            dg: c3 * inner,
            d2g: -T::lit(3.0) * eta * c3 * c2 * inner + c3 * (u - c2 * (eta * ud + u * u * u - u)),
        })
    }

    pub fn g(&self, eta: T) -> Result<T> {
        Ok(self.eval(eta)?.g)
    }

    /// `v₀(r) = (g(−r) − g(r))/r`, `v₁(r) = (g′(r) − g′(−r))/r`, with the
    /// limits `−2g′(0)` and `2g″(0)` at `r = 0`.
    pub fn linear_data_at(&self, r: T) -> Result<(T, T)> {
        if r == T::zero() {
            let z = self.eval(T::zero())?;
            return Ok((-T::lit(2.0) * z.dg, T::lit(2.0) * z.d2g));
        }
        let a = self.eval(r)?;
        let b = self.eval(-r)?;
        Ok(((b.g - a.g) / r, (a.dg - b.dg) / r))
    }

    /// `4π∫_A^B g′(η)² dη`.
    pub fn radiated_energy(&self, a: T, b: T, cfg: &NormConfig<T>) -> Result<T> {
        let res = crate::quad::adaptive(
            |eta| {
                let d = self.eval(eta).map(|v| v.dg).unwrap_or(T::nan());
                d * d
            },
            &[a, b],
            cfg.rel_tol,
            cfg.abs_tol,
            cfg.max_panels,
        );
        Ok(T::lit(4.0) * T::PI() * res.value)
    }
}

pub fn radiation_g<T: Real>(p: PhasePoint<T>, eta: T, cfg: &FieldConfig<T>) -> Result<T> {
    Radiation::new(p, cfg)?.g(eta)
}

/// Sampled initial data `(v₀, v₁)` of the linear wave matching `u` outside
/// the light cone, with the splines needed to evaluate `v_L`.
#[derive(Clone, Debug)]
pub struct LinearData<T> {
    pub rs: Vec<T>,
    pub v0: Vec<T>,
    pub v1: Vec<T>,
    v0_spline: CubicSpline<T>,
    /// `∫₀^r s v₁(s) ds`.
    moment: CubicSpline<T>,
    v1_spline: CubicSpline<T>,
}

impl<T: Real> LinearData<T> {
    pub fn from_samples(rs: Vec<T>, v0: Vec<T>, v1: Vec<T>) -> Result<Self> {
        if rs.first() != Some(&T::zero()) {
            return Err(Error::Parameter("linear data grid must start at r = 0".into()));
        }
        let rv1: Vec<T> = rs.iter().zip(&v1).map(|(r, v)| *r * *v).collect();
        let rv1_spline = CubicSpline::new(&rs, &rv1)?;
        let cumulative: Vec<T> = rs.iter().map(|&r| rv1_spline.integral(r)).collect();
        Ok(Self {
            v0_spline: CubicSpline::new(&rs, &v0)?,
            v1_spline: CubicSpline::new(&rs, &v1)?,
            moment: CubicSpline::new(&rs, &cumulative)?,
            rs,
            v0,
            v1,
        })
    }

    pub fn extent(&self) -> T {
        *self.rs.last().unwrap()
    }

    fn check(&self, eta: T) -> Result<()> {
        if !(eta.abs() <= self.extent()) {
            return Err(Error::Range {
                what: "linear data grid".into(),
                requested: eta.abs().as_f64(),
                available: self.extent().as_f64(),
            });
        }
        Ok(())
    }

    /// `F(η) = (η/2)v₀(|η|) + ½∫₀^{|η|} r v₁(r) dr`.
    pub fn big_f(&self, eta: T) -> Result<T> {
        self.check(eta)?;
        let a = eta.abs();
        let half = T::lit(0.5);
        Ok(half * eta * self.v0_spline.eval(a) + half * self.moment.eval(a))
    }

    /// `F′(η) = ½v₀(|η|) + ½|η|v₀′(|η|) + ½η v₁(|η|)`.
    pub fn big_f_prime(&self, eta: T) -> Result<T> {
        self.check(eta)?;
        let a = eta.abs();
        let half = T::lit(0.5);
        Ok(half * self.v0_spline.eval(a) + half * a * self.v0_spline.derivative(a) + half * eta * self.v1_spline.eval(a))
    }
}

/// The default radiation grid: uniform near `0`, geometric beyond.
pub fn linear_grid<T: Real>(cfg: &AsymptoticsConfig<T>) -> Vec<T> {
    let mut rs = Vec::new();
    let n = (cfg.linear_uniform_end / cfg.linear_step).round().to_usize().unwrap_or(0);
    for j in 0..=n {
        rs.push(T::from_usize_lossy(j) * cfg.linear_step);
    }
    let mut r = *rs.last().unwrap();
    while r < cfg.linear_end {
        r = (r * cfg.linear_ratio).min(cfg.linear_end);
        rs.push(r);
    }
    rs
}

pub fn linear_profile_data<T: Real>(radiation: &Radiation<T>, rs: &[T]) -> Result<LinearData<T>> {
    let pairs: Vec<(T, T)> = rs.par_iter().map(|&r| radiation.linear_data_at(r)).collect::<Result<_>>()?;
    let (v0, v1): (Vec<T>, Vec<T>) = pairs.into_iter().unzip();
    LinearData::from_samples(rs.to_vec(), v0, v1)
}

/// `(v_L, ∂ₜv_L, ∂ᵣv_L)` at `(t, r)` from `v_L = (F(t+r) − F(t−r))/r`.
pub fn free_wave_eval<T: Real>(data: &LinearData<T>, t: T, r: T) -> Result<(T, T, T)> {
    let r = r.abs();
    if r == T::zero() {
        let fp = data.big_f_prime(t)?;
        let h = T::lit(1e-4).max(t.abs() * T::lit(1e-6));
        let dfp = (data.big_f_prime(t + h)? - data.big_f_prime(t - h)?) / (T::lit(2.0) * h);
        return Ok((T::lit(2.0) * fp, T::lit(2.0) * dfp, T::zero()));
    }
    let fa = data.big_f(t + r)?;
    let fb = data.big_f(t - r)?;
    let da = data.big_f_prime(t + r)?;
    let db = data.big_f_prime(t - r)?;
    let v = (fa - fb) / r;
    Ok((v, (da - db) / r, (da + db) / r - v / r))
}

/// `4π∫_{r > t+A} |∂ᵣ(u − v)|² + |∂ₜ(u − v)|² r² dr`, where `v = v_L` or,
/// with `subtract_linear = false`, `v = 0`.
pub fn exterior_energy<T: Real>(
    field: &Field<T>,
    data: &LinearData<T>,
    t: T,
    a: T,
    subtract_linear: bool,
    cfg: &NormConfig<T>,
) -> Result<T> {
    let start = (t + a).max(T::zero());
    let r_max = (data.extent() - t) * T::lit(0.5);
    if r_max <= start {
        return Err(Error::Range { what: "linear data grid".into(), requested: (t + start).as_f64(), available: data.extent().as_f64() });
    }
    let four_pi = T::lit(4.0) * T::PI();
    let g = |r: T| -> T {
        let fp = match field.eval(t, r) {
            Ok(v) => v,
            Err(_) => return T::nan(),
        };
        let (dt, dr) = if subtract_linear {
            match free_wave_eval(data, t, r) {
                Ok((_, vt, vr)) => (fp.ut - vt, fp.ur - vr),
                Err(_) => return T::nan(),
            }
        } else {
            (fp.ut, fp.ur)
        };
        four_pi * (dt * dt + dr * dr) * r * r
    };
    let mut breaks = Vec::new();
    let mut d = T::one();
    while start + d < r_max {
        breaks.push(start + d);
        d *= T::lit(3.0);
    }
    let body = half_line_integral(g, start, r_max, &breaks, cfg);
    // beyond the grid u − v_L ≈ ∓√2/r, whose gradient carries 8π/R
    let tail = if subtract_linear { T::lit(8.0) * T::PI() / r_max } else { T::zero() };
    Ok(body + tail)
}

/// Exterior energy of `u − v_L` along `ts`; `coefficient` is the ratio of
/// the last to the first value.
pub fn exterior_scattering_check<T: Real>(
    radiation: &Radiation<T>,
    data: &LinearData<T>,
    ts: &[T],
    a: T,
    subtract_linear: bool,
    cfg: &AsymptoticsConfig<T>,
) -> Result<FitResult<T>> {
    let vals: Vec<T> = ts
        .par_iter()
        .map(|&t| exterior_energy(radiation.field(), data, t, a, subtract_linear, &cfg.norm))
        .collect::<Result<_>>()?;
    let ratio = *vals.last().unwrap() / vals[0];
    let monotone_violation = vals
        .windows(2)
        .map(|w| ((w[1] - w[0]) / w[0]).max(T::zero()))
        .fold(T::zero(), T::max);
    Ok(FitResult {
        coefficient: ratio,
        exponent_or_slope: log_slope(ts, &vals),
        residual: monotone_violation,
        window: window(ts),
        reference: None,
        samples: ts.iter().copied().zip(vals).collect(),
    })
}

/// `(t+η)(u(t, t+η) − v_L(t, t+η))` along `ts`; `coefficient` is the limit
/// extrapolated from `C + D/t`, `reference` is `±√2`.
pub fn transition_check<T: Real>(
    radiation: &Radiation<T>,
    data: &LinearData<T>,
    ts: &[T],
    eta: T,
) -> Result<FitResult<T>> {
    let field = radiation.field();
    let sg = forward_sign(field);
    let vals: Vec<T> = ts
        .iter()
        .map(|&t| {
            let r = t + eta;
            let u = field.value(t, r)?;
            let (v, _, _) = free_wave_eval(data, t, r)?;
            Ok(r * (u - v))
        })
        .collect::<Result<_>>()?;
    let inv: Vec<T> = ts.iter().map(|t| T::one() / *t).collect();
    let (c, _) = linear_fit(&inv, &vals);
    let reference = sg * T::SQRT_2();
    let residual = vals.iter().map(|v| ((*v - reference) / reference).abs()).fold(T::zero(), T::max);
    Ok(FitResult {
        coefficient: c,
        exponent_or_slope: log_slope(ts, &vals.iter().map(|v| *v - reference).collect::<Vec<_>>()),
        residual,
        window: window(ts),
        reference: Some(reference),
        samples: ts.iter().copied().zip(vals).collect(),
    })
}

/// `(t+η)u(t, t+η)` along `ts`, which tends to `−g(η)`.
pub fn cone_profile<T: Real>(radiation: &Radiation<T>, ts: &[T], eta: T) -> Result<FitResult<T>> {
    let field = radiation.field();
    let vals: Vec<T> = ts.iter().map(|&t| Ok((t + eta) * field.value(t, t + eta)?)).collect::<Result<_>>()?;
    let reference = -radiation.g(eta)?;
    let inv: Vec<T> = ts.iter().map(|t| T::one() / *t).collect();
    let (c, _) = linear_fit(&inv, &vals);
    let residual = vals.iter().map(|v| ((*v - reference) / reference).abs()).fold(T::zero(), T::max);
    Ok(FitResult {
        coefficient: c,
        exponent_or_slope: T::zero(),
        residual,
        window: window(ts),
        reference: Some(reference),
        samples: ts.iter().copied().zip(vals).collect(),
    })
}

/// `C₀ = 2^{7/2}π ∫₀^∞ (1 + ρ² t₊/(1 + t₊²))^{−3} ρ² dρ`.
pub fn c_zero<T: Real>(t_plus: T, cfg: &NormConfig<T>) -> Result<T> {
    if !(t_plus > T::zero() && t_plus.is_finite()) {
        return Err(Error::Parameter("t₊ must be positive and finite".into()));
    }
    let k = t_plus / (T::one() + t_plus * t_plus);
    let g = |rho: T| {
        let q = T::one() + rho * rho * k;
        rho * rho / (q * q * q)
    };
    let scale = T::one() / k.sqrt();
    let integral = half_line_integral(g, T::zero(), T::infinity(), &[scale], cfg);
    Ok(T::lit(2.0).powf(T::lit(3.5)) * T::PI() * integral)
}

/// `2^{7/2}π (π/16) ((1 + t₊²)/t₊)^{3/2}`.
pub fn c_zero_closed_form<T: Real>(t_plus: T) -> T {
    T::lit(2.0).powf(T::lit(3.5)) * T::PI() * T::PI() / T::lit(16.0) * ((T::one() + t_plus * t_plus) / t_plus).powf(T::lit(1.5))
}

/// Which blow-up rate to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateKind {
    /// `‖u‖_{L³}(t₊ − t)^{1/2} → C₀^{1/3}`.
    L3,
    /// `‖u‖_{Ḣ^{1/2}}(t₊ − t)^{1/2}` stays in a fixed band.
    HHalf,
    /// `‖∂ₜu‖_{L^{3/2}}(t₊ − t) → 2^{−1/2}C₀^{2/3}`.
    UtL32,
}

impl RateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RateKind::L3 => "L3",
            RateKind::HHalf => "H_half",
            RateKind::UtL32 => "Ut_L32",
        }
    }
}

/// Blow-up rates along gaps `t₊ − t`. `samples` holds the raw normalized
/// values; `coefficient` is the limit fitted from `C + Dδ^{1/2} + Eδ`
/// (for `HHalf`, the ratio max/min of the band).
pub fn blowup_rate_check<T: Real>(
    p: PhasePoint<T>,
    gaps: &[T],
    which: RateKind,
    cfg: &AsymptoticsConfig<T>,
) -> Result<FitResult<T>> {
    require(p, Behavior::Blowup, cfg)?;
    let field = Field::new(p, &cfg.field)?;
    let tp = field.blowup_time();
    let c0 = c_zero(tp, &cfg.norm)?;
    let k = tp / (T::one() + tp * tp);
    let vals: Vec<T> = gaps
        .par_iter()
        .map(|&gap| {
            let t = tp - gap;
            let scale = (gap / k).sqrt();
            let breaks: Vec<T> = [0.01, 0.1, 0.3, 1.0, 3.0, 10.0, 100.0].iter().map(|m| scale * T::lit(*m)).collect();
            match which {
                RateKind::L3 => {
                    let n = lp_norm_fn(|r| field.value(t, r).unwrap_or(T::nan()), T::lit(3.0), T::zero(), T::infinity(), &breaks, &cfg.norm)?;
                    Ok(n.value * gap.sqrt())
                }
                RateKind::UtL32 => {
                    let n = lp_norm_fn(
                        |r| field.time_derivative(t, r).unwrap_or(T::nan()),
                        T::lit(1.5),
                        T::zero(),
                        T::infinity(),
                        &breaks,
                        &cfg.norm,
                    )?;
                    Ok(n.value * gap)
                }
                RateKind::HHalf => {
                    let step = (scale * T::lit(0.05)).min(cfg.spectral_step);
                    let spec = field_spectrum(&field, t, step, T::lit(8.0) * t + T::lit(50.0), cfg.spectral_pad)?;
                    let n = sobolev_norm(&spec, T::lit(0.5), SobolevNormalization::Spectral)?;
                    Ok(n.value * gap.sqrt())
                }
            }
        })
        .collect::<Result<_>>()?;
    let samples: Vec<(T, T)> = gaps.iter().copied().zip(vals.iter().copied()).collect();
    if which == RateKind::HHalf {
        let max = vals.iter().copied().fold(T::zero(), T::max);
        let min = vals.iter().copied().fold(T::infinity(), T::min);
        return Ok(FitResult {
            coefficient: max / min,
            exponent_or_slope: log_slope(gaps, &vals),
            residual: max / min - T::one(),
            window: window(gaps),
            reference: None,
            samples,
        });
    }
    let reference = match which {
        RateKind::L3 => c0.cbrt(),
        _ => c0.powf(T::lit(2.0) / T::lit(3.0)) / T::SQRT_2(),
    };
    let one = |_: T| T::one();
    let root = |d: T| d.sqrt();
    let lin = |d: T| d;
    let c = basis_fit(gaps, &vals, &[&one, &root, &lin]);
    let residual = vals.iter().map(|v| ((*v - reference) / reference).abs()).fold(T::zero(), T::max);
    Ok(FitResult {
        coefficient: c[0],
        exponent_or_slope: log_slope(gaps, &vals),
        residual,
        window: window(gaps),
        reference: Some(reference),
        samples,
    })
}

/// `d = 2t_*r_*/(1 + t_*² + r_*²)`.
pub fn profile_slope<T: Real>(t_star: T, r_star: T) -> T {
    T::lit(2.0) * t_star * r_star / (T::one() + t_star * t_star + r_star * r_star)
}

/// The point `(M₊(T₊, r_*), r_*)` of the blow-up surface.
pub fn surface_point<T: Real>(field: &Field<T>, r_star: T) -> (T, T) {
    (influence_bound(field.lifespan().t_plus, r_star, Sign::Plus), r_star)
}

/// `w(σ, y) = (t_* − t)u(t, r)` on the backward cone of a blow-up point.
pub fn blowup_profile<T: Real>(
    field: &Field<T>,
    t_star: T,
    r_star: T,
    sigmas: &[T],
    ys: &[T],
) -> Result<Vec<ProfileSample<T>>> {
    let tp = field.lifespan().t_plus;
    let on_surface = influence_bound(tp, r_star, Sign::Plus);
    if !tp.is_finite() || (on_surface - t_star).abs() > T::lit(1e-8) * (T::one() + t_star.abs()) {
        return Err(Error::Parameter(format!(
            "({}, {}) is not on the blow-up surface (t = {} there)",
            t_star.as_f64(),
            r_star.as_f64(),
            on_surface.as_f64()
        )));
    }
    if ys.iter().any(|y| !(y.abs() < T::one())) {
        return Err(Error::Parameter("need |y| < 1".into()));
    }
    let d = profile_slope(t_star, r_star);
    let sg = forward_sign(field);
    let amp = sg * T::SQRT_2() * (T::one() - d * d).sqrt();
    sigmas
        .iter()
        .map(|&sigma| {
            let e = (-sigma).exp();
            let t = t_star - e;
            let mut w = Vec::with_capacity(ys.len());
            let mut dev = T::zero();
            for &y in ys {
                let r = r_star + y * e;
                let val = e * field.value(t, r)?;
                dev = dev.max((val - amp / (T::one() + y * d)).abs());
                w.push(val);
            }
            Ok(ProfileSample { sigma, ys: ys.to_vec(), w, d, deviation: dev })
        })
        .collect()
}

/// `∂M₊(T₊, r)/∂r` at `r_*` by central differences.
pub fn surface_slope_fd<T: Real>(field: &Field<T>, r_star: T, h: T) -> T {
    let tp = field.lifespan().t_plus;
    (influence_bound(tp, r_star + h, Sign::Plus) - influence_bound(tp, r_star - h, Sign::Plus)) / (T::lit(2.0) * h)
}

/// Deviation from the attractor `2√2/(a(1 + r² − t²) − 2bt)`,
/// `a = sin T₊`, `b = cos T₊`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttractorFit<T> {
    pub a: T,
    pub b: T,
    pub fit: FitResult<T>,
}

/// `sup_r |u − attractor|` over the backward light cone `r ≤ t₊ − t` of the
/// tip, along gaps `t₊ − t`; `coefficient` is the largest ratio
/// deviation/gap.
pub fn attractor_deviation<T: Real>(p: PhasePoint<T>, gaps: &[T], cfg: &AsymptoticsConfig<T>) -> Result<AttractorFit<T>> {
    require(p, Behavior::Blowup, cfg)?;
    let field = Field::new(p, &cfg.field)?;
    let big_t = field.lifespan().t_plus;
    let tp = field.blowup_time();
    let (a, b) = big_t.sin_cos();
    let sg = forward_sign(&field);
    let n = 40;
    let devs: Vec<T> = gaps
        .iter()
        .map(|&gap| {
            let t = tp - gap;
            let mut sup = T::zero();
            for j in 0..=n {
                let r = gap * T::from_usize_lossy(j) / T::from_usize_lossy(n);
                let u = field.value(t, r)?;
                let att = sg * T::lit(2.0) * T::SQRT_2() / (a * (T::one() + (r - t) * (r + t)) - T::lit(2.0) * b * t);
                sup = sup.max((u - att).abs());
            }
            Ok(sup)
        })
        .collect::<Result<_>>()?;
    let ratios: Vec<T> = gaps.iter().zip(&devs).map(|(g, d)| *d / *g).collect();
    let max = ratios.iter().copied().fold(T::zero(), T::max);
    let min = ratios.iter().copied().fold(T::infinity(), T::min);
    let slope = if devs.iter().all(|d| *d > T::zero()) { log_slope(gaps, &devs) } else { T::nan() };
    Ok(AttractorFit {
        a,
        b,
        fit: FitResult {
            coefficient: max,
            exponent_or_slope: slope,
            residual: if min > T::zero() { max / min - T::one() } else { T::infinity() },
            window: window(gaps),
            reference: None,
            samples: gaps.iter().copied().zip(devs).collect(),
        },
    })
}

/// `‖∂ₜu(t)‖_{L^p} t^{1−2/p}` along `ts` (`coefficient` = max/min of the
/// band), with `exponent_or_slope` the raw log-log slope. `samples` holds the
/// normalized norms.
pub fn derivative_lp_bounds<T: Real>(
    p: PhasePoint<T>,
    ts: &[T],
    p_exp: T,
    cfg: &AsymptoticsConfig<T>,
) -> Result<FitResult<T>> {
    if !(p_exp >= T::one()) {
        return Err(Error::Parameter("need p ≥ 1".into()));
    }
    require(p, Behavior::Threshold, cfg)?;
    let field = Field::new(p, &cfg.field)?;
    let vals: Vec<T> = ts
        .par_iter()
        .map(|&t| {
            let mut breaks = cone_breaks(t);
            breaks.push(T::one());
            let n = lp_norm_fn(
                |r| field.time_derivative(t, r).unwrap_or(T::nan()),
                p_exp,
                T::zero(),
                T::infinity(),
                &breaks,
                &cfg.norm,
            )?;
            Ok(n.value)
        })
        .collect::<Result<_>>()?;
    let e = T::one() - T::lit(2.0) / p_exp;
    let scaled: Vec<T> = ts.iter().zip(&vals).map(|(t, v)| *v * t.powf(e)).collect();
    let max = scaled.iter().copied().fold(T::zero(), T::max);
    let min = scaled.iter().copied().fold(T::infinity(), T::min);
    Ok(FitResult {
        coefficient: max / min,
        exponent_or_slope: log_slope(ts, &vals),
        residual: max / min - T::one(),
        window: window(ts),
        reference: None,
        samples: ts.iter().copied().zip(scaled).collect(),
    })
}

/// `4π∫_{t−1}^{t+1} |∂ₜu|^p r² dr`, the near-cone lower bound.
pub fn cone_annulus_lp<T: Real>(field: &Field<T>, t: T, p_exp: T, cfg: &NormConfig<T>) -> Result<T> {
    let lo = (t - T::one()).max(T::zero());
    let n = lp_norm_fn(|r| field.time_derivative(t, r).unwrap_or(T::nan()), p_exp, lo, t + T::one(), &[t], cfg)?;
    Ok(n.value.powf(p_exp))
}

/// `s(t, r)` derivative check used by tests: `(∂ₜs, ∂ᵣs)`.
pub fn s_gradient<T: Real>(t: T, r: T) -> (T, T) {
    let cf = conformal_factors(t, r);
    (cf.ds_dt, cf.ds_dr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn c_zero_closed_form_agrees() {
        let cfg = NormConfig::default();
        for tp in [0.5f64, 1.0, 2.0] {
            let q = c_zero(tp, &cfg).unwrap();
            assert!((q - c_zero_closed_form(tp)).abs() < 1e-9 * q, "{tp}");
        }
        let expect = 2f64.powf(3.5) * PI * PI / 16.0 * 2f64.powf(1.5);
        assert!((c_zero(1.0, &cfg).unwrap() - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn grids() {
        let g = geometric_grid(10.0f64, 1000.0, 8);
        assert_eq!(g.len(), 17);
        assert!((g[16] - 1000.0).abs() < 1e-9);
        let c: Vec<f64> = basis_fit(&[1.0, 2.0, 3.0, 4.0], &[3.0, 5.0, 7.0, 9.0], &[&|_| 1.0, &|x| x]);
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn free_wave_of_reciprocal_data() {
        // v₀ = c/r (regularised at 0), v₁ = 0: F(η) = c/2 sign(η) away from 0
        let rs: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.01).collect();
        let v0: Vec<f64> = rs.iter().map(|&r| if r < 1.0 { 3.0 - r * r } else { 2.0 / r }).collect();
        let n = rs.len();
        let data = LinearData::from_samples(rs, v0, vec![0.0; n]).unwrap();
        let (v, _, _) = free_wave_eval(&data, 10.0, 5.0).unwrap();
        assert!(v.abs() < 1e-12);
        assert!(free_wave_eval(&data, 30.0, 20.0).is_err());
    }

    #[test]
    fn attractor_exact_on_e_zero_branch() {
        let cfg = AsymptoticsConfig::<f64>::default();
        let fit = attractor_deviation(PhasePoint::new(2.0, 2.0), &[1e-1, 1e-2, 1e-3], &cfg).unwrap();
        assert!((fit.a * fit.a + fit.b * fit.b - 1.0).abs() < 1e-15);
        for (_, d) in &fit.fit.samples {
            assert!(*d < 1e-8, "{d}");
        }
    }
}
