//! Named verification suites. Each check records what was measured, what it
//! was compared against and whether it passed.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    attractor_deviation, blowup_profile, blowup_rate_check, c_zero, c_zero_closed_form, exterior_scattering_check,
    fit_sobolev_growth, geometric_grid, linear_grid, linear_profile_data, surface_point, surface_slope_fd,
    threshold_lp_asymptotic, threshold_sobolev_sweep, transition_check, AsymptoticsConfig, FitResult, Radiation,
    RateKind,
};
use crate::duffing::PhasePoint;
use crate::error::{Error, Result};
use crate::penrose::Field;
use crate::scalar::Real;
use crate::threshold::beta;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Suite {
    BlowupRates,
    ThresholdGrowth,
    Radiation,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::BlowupRates, Suite::ThresholdGrowth, Suite::Radiation];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::BlowupRates => "blowup-rates",
            Suite::ThresholdGrowth => "threshold-growth",
            Suite::Radiation => "radiation",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Parameter(format!("unknown suite '{s}'")))
    }
}

/// How `measured` is compared with `expected`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `|measured − expected| ≤ tolerance·|expected|`.
    Relative,
    /// `|measured − expected| ≤ tolerance`.
    Absolute,
    /// `measured ≤ tolerance` (`expected` is unused and set to `0`).
    AtMost,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check<T> {
    pub name: String,
    pub measured: T,
    pub expected: T,
    pub tolerance: T,
    pub comparison: Comparison,
    pub passed: bool,
    /// Fit residual or other diagnostic, when there is one.
    pub residual: Option<T>,
}

impl<T: Real> Check<T> {
    pub fn new(name: impl Into<String>, measured: T, expected: T, tolerance: T, comparison: Comparison) -> Self {
        let passed = match comparison {
            Comparison::Relative => (measured - expected).abs() <= tolerance * expected.abs(),
            Comparison::Absolute => (measured - expected).abs() <= tolerance,
            Comparison::AtMost => measured <= tolerance,
        };
        Self { name: name.into(), measured, expected, tolerance, comparison, passed, residual: None }
    }

    pub fn at_most(name: impl Into<String>, measured: T, bound: T) -> Self {
        Self::new(name, measured, T::zero(), bound, Comparison::AtMost)
    }

    pub fn with_residual(mut self, r: T) -> Self {
        self.residual = Some(r);
        self
    }
}

/// Points, windows and tolerances of the suites.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig<T> {
    pub asymptotics: AsymptoticsConfig<T>,
    /// A generic forward blow-up point.
    pub blowup_point: PhasePoint<T>,
    /// A point on the `E = 0` branch, where the attractor is exact.
    pub attractor_exact_point: PhasePoint<T>,
    /// `X` of the threshold point `(X, β(X))`.
    pub threshold_x: T,
    pub gap_range: (T, T),
    pub growth_range: (T, T),
    pub radiation_range: (T, T),
    pub per_decade: usize,
    pub rate_tol: T,
    pub hhalf_band: T,
    pub profile_sigmas: (T, T),
    pub profile_ratio_factor: T,
    pub attractor_bound: T,
    pub attractor_exact_tol: T,
    pub log_slope_tol: T,
    pub l2_tol: T,
    pub bounded_ratio: T,
    pub energy_ratio: T,
    pub transition_tol: T,
}

impl<T: Real> Default for VerifyConfig<T> {
    fn default() -> Self {
        Self {
            asymptotics: AsymptoticsConfig::default(),
            blowup_point: PhasePoint::new(T::lit(1.5), T::one()),
            attractor_exact_point: PhasePoint::new(T::lit(2.0), T::lit(2.0)),
            threshold_x: T::lit(0.5),
            gap_range: (T::lit(1e-3), T::lit(1e-1)),
            growth_range: (T::lit(1e2), T::lit(1e4)),
            radiation_range: (T::lit(10.0), T::lit(1e3)),
            per_decade: 8,
            rate_tol: T::lit(0.01),
            hhalf_band: T::lit(2.0),
            profile_sigmas: (T::lit(2.0), T::lit(6.0)),
            profile_ratio_factor: T::lit(2.0),
            attractor_bound: T::one(),
            attractor_exact_tol: T::lit(1e-8),
            log_slope_tol: T::lit(0.05),
            l2_tol: T::lit(0.02),
            bounded_ratio: T::lit(10.0),
            energy_ratio: T::lit(0.01),
            transition_tol: T::lit(0.01),
        }
    }
}

impl<T: Real> VerifyConfig<T> {
    /// Scales the numerical tolerances, not the acceptance thresholds.
    pub fn scaled(self, factor: T) -> Self {
        Self { asymptotics: self.asymptotics.scaled(factor), ..self }
    }

    pub fn threshold_point(&self) -> Result<PhasePoint<T>> {
        Ok(PhasePoint::new(self.threshold_x, beta(self.threshold_x, &self.asymptotics.threshold)?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport<T> {
    pub suite: Suite,
    pub checks: Vec<Check<T>>,
    pub fits: Vec<(String, FitResult<T>)>,
}

impl<T> SuiteReport<T> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn run_suite<T: Real>(suite: Suite, cfg: &VerifyConfig<T>) -> Result<SuiteReport<T>> {
    let mut report = SuiteReport { suite, checks: Vec::new(), fits: Vec::new() };
    match suite {
        Suite::BlowupRates => {
            blowup_rates(cfg, &mut report)?;
            blowup_profile_checks(cfg, &mut report)?;
            attractor_checks(cfg, &mut report)?;
        }
        Suite::ThresholdGrowth => threshold_growth(cfg, &mut report)?,
        Suite::Radiation => radiation(cfg, &mut report)?,
    }
    Ok(report)
}

fn gaps<T: Real>(cfg: &VerifyConfig<T>) -> Vec<T> {
    geometric_grid(cfg.gap_range.0, cfg.gap_range.1, cfg.per_decade)
}

/// Blow-up rates in `L³`, `Ḣ^{1/2}` and (for `∂ₜu`) `L^{3/2}`.
pub fn blowup_rates<T: Real>(cfg: &VerifyConfig<T>, report: &mut SuiteReport<T>) -> Result<()> {
    let p = cfg.blowup_point;
    let a = &cfg.asymptotics;
    let field = Field::new(p, &a.field)?;
    let tp = field.blowup_time();
    report.checks.push(Check::new(
        "c_zero quadrature vs closed form",
        c_zero(tp, &a.norm)?,
        c_zero_closed_form(tp),
        T::lit(1e-8),
        Comparison::Relative,
    ));
    let gaps = gaps(cfg);
    for kind in [RateKind::L3, RateKind::UtL32] {
        let fit = blowup_rate_check(p, &gaps, kind, a)?;
        let reference = fit.reference.unwrap_or(T::nan());
        report.checks.push(
            Check::new(format!("{} rate limit", kind.as_str()), fit.coefficient, reference, cfg.rate_tol, Comparison::Relative)
                .with_residual(fit.residual),
        );
        let nearest = fit.samples.iter().copied().fold((T::infinity(), T::nan()), |acc, s| if s.0 < acc.0 { s } else { acc });
        report.checks.push(Check::new(
            format!("{} rate at smallest gap", kind.as_str()),
            nearest.1,
            reference,
            cfg.rate_tol,
            Comparison::Relative,
        ));
        report.fits.push((kind.as_str().into(), fit));
    }
    let fit = blowup_rate_check(p, &gaps, RateKind::HHalf, a)?;
    report.checks.push(Check::at_most("H_half rate band max/min", fit.coefficient, cfg.hhalf_band).with_residual(fit.residual));
    report.fits.push((RateKind::HHalf.as_str().into(), fit));
    Ok(())
}

/// Convergence to the self-similar profile at `r_* = 0` and `r_* = 1`.
pub fn blowup_profile_checks<T: Real>(cfg: &VerifyConfig<T>, report: &mut SuiteReport<T>) -> Result<()> {
    let field = Field::new(cfg.blowup_point, &cfg.asymptotics.field)?;
    let (s0, s1) = cfg.profile_sigmas;
    let n_sigma = (s1 - s0).round().to_usize().unwrap_or(0);
    let sigmas: Vec<T> = (0..=n_sigma).map(|k| s0 + T::from_usize_lossy(k)).collect();
    let ys: Vec<T> = (0..=40).map(|i| T::lit(-0.99) + T::lit(1.98) * T::from_usize_lossy(i) / T::lit(40.0)).collect();
    let e = T::one().exp();
    for r_star in [T::zero(), T::one()] {
        let (t_star, _) = surface_point(&field, r_star);
        let prof = blowup_profile(&field, t_star, r_star, &sigmas, &ys)?;
        let k_fit = prof.iter().map(|s| s.deviation * s.sigma.exp()).fold(T::zero(), T::max);
        // consecutive ratios should be e per unit step in σ
        let worst = prof
            .windows(2)
            .map(|w| {
                let r = (w[0].deviation / w[1].deviation).powf(T::one() / (w[1].sigma - w[0].sigma));
                (r / e).max(e / r)
            })
            .fold(T::one(), T::max);
        let label = r_star.as_f64();
        report.checks.push(
            Check::at_most(format!("profile ratio test factor at r*={label}"), worst, cfg.profile_ratio_factor).with_residual(k_fit),
        );
        let d = prof.first().map(|s| s.d).unwrap_or(T::nan());
        report.checks.push(Check::new(
            format!("profile d vs surface slope at r*={label}"),
            d,
            surface_slope_fd(&field, r_star, T::lit(1e-4)),
            T::lit(1e-6),
            Comparison::Absolute,
        ));
        let samples: Vec<(T, T)> = prof.iter().map(|s| (s.sigma, s.deviation)).collect();
        report.fits.push((
            format!("profile r*={label}"),
            FitResult {
                coefficient: k_fit,
                exponent_or_slope: -T::one(),
                residual: worst - T::one(),
                window: (s0, s1),
                reference: None,
                samples,
            },
        ));
    }
    Ok(())
}

/// Distance to the explicit attractor, and exactness on the `E = 0` branch.
pub fn attractor_checks<T: Real>(cfg: &VerifyConfig<T>, report: &mut SuiteReport<T>) -> Result<()> {
    let gaps = gaps(cfg);
    let fit = attractor_deviation(cfg.blowup_point, &gaps, &cfg.asymptotics)?;
    report.checks.push(
        Check::at_most("attractor deviation/gap", fit.fit.coefficient, cfg.attractor_bound).with_residual(fit.fit.residual),
    );
    report.checks.push(Check::new("attractor a²+b²", fit.a * fit.a + fit.b * fit.b, T::one(), T::lit(1e-12), Comparison::Absolute));
    report.fits.push(("attractor".into(), fit.fit));
    // the comparison is against a closed form, so the ODE error is all that remains
    let tight = AsymptoticsConfig { field: cfg.asymptotics.field.scaled(T::lit(0.01)), ..cfg.asymptotics };
    let exact = attractor_deviation(cfg.attractor_exact_point, &gaps, &tight)?;
    let sup = exact.fit.samples.iter().map(|s| s.1).fold(T::zero(), T::max);
    report.checks.push(Check::at_most("attractor exact on E=0 branch", sup, cfg.attractor_exact_tol));
    report.fits.push(("attractor E=0".into(), exact.fit));
    Ok(())
}

/// Critical-norm growth of the threshold solution.
pub fn threshold_growth<T: Real>(cfg: &VerifyConfig<T>, report: &mut SuiteReport<T>) -> Result<()> {
    let p = cfg.threshold_point()?;
    let a = &cfg.asymptotics;
    let ts = geometric_grid(cfg.growth_range.0, cfg.growth_range.1, cfg.per_decade);
    let half = T::lit(0.5);
    let upper = T::lit(0.75);
    let sq = threshold_sobolev_sweep(p, &[half, upper], &ts, a)?;
    let slope = fit_sobolev_growth(half, &ts, &sq[0], a)?;
    report.checks.push(
        Check::new(
            "H_half squared slope vs log t",
            slope.coefficient,
            slope.reference.unwrap_or(T::nan()),
            cfg.log_slope_tol,
            Comparison::Relative,
        )
        .with_residual(slope.residual),
    );
    report.fits.push(("H_half".into(), slope));
    let l2 = threshold_lp_asymptotic(p, &ts, T::lit(2.0), a)?;
    report.checks.push(
        Check::new("L2 coefficient", l2.coefficient, l2.reference.unwrap_or(T::nan()), cfg.l2_tol, Comparison::Relative)
            .with_residual(l2.residual),
    );
    report.fits.push(("L2".into(), l2));
    let bounded = fit_sobolev_growth(upper, &ts, &sq[1], a)?;
    report.checks.push(Check::at_most("H_0.75 squared max/min", bounded.coefficient, cfg.bounded_ratio));
    report.fits.push(("H_0.75".into(), bounded));
    Ok(())
}

/// Scattering outside the light cone and the transition layer.
pub fn radiation<T: Real>(cfg: &VerifyConfig<T>, report: &mut SuiteReport<T>) -> Result<()> {
    let p = cfg.threshold_point()?;
    let a = &cfg.asymptotics;
    let rad = Radiation::new(p, &a.field)?;
    let data = linear_profile_data(&rad, &linear_grid(a))?;
    let ts = geometric_grid(cfg.radiation_range.0, cfg.radiation_range.1, 4);
    let ext = exterior_scattering_check(&rad, &data, &ts, T::zero(), true, a)?;
    report.checks.push(Check::at_most("exterior energy ratio", ext.coefficient, cfg.energy_ratio).with_residual(ext.residual));
    report.fits.push(("exterior energy".into(), ext));
    for eta in [T::lit(-3.0), T::zero(), T::lit(3.0)] {
        let fit = transition_check(&rad, &data, &ts, eta)?;
        let reference = fit.reference.unwrap_or(T::nan());
        let label = eta.as_f64();
        report.checks.push(
            Check::new(format!("transition limit at eta={label}"), fit.coefficient, reference, cfg.transition_tol, Comparison::Relative)
                .with_residual(fit.residual),
        );
        let last = fit.samples.last().map(|s| s.1).unwrap_or(T::nan());
        report.checks.push(Check::new(
            format!("transition at largest t, eta={label}"),
            last,
            reference,
            cfg.transition_tol,
            Comparison::Relative,
        ));
        report.fits.push((format!("transition eta={label}"), fit));
    }
    Ok(())
}
