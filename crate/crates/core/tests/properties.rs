use std::f64::consts::PI;
use std::sync::OnceLock;

use nlw_duffing::asymptotics::Radiation;
use nlw_duffing::duffing::{integrate, state_at, OdeConfig, PhasePoint};
use nlw_duffing::lifespan::{quad_r, quad_s, t_minus, t_plus, total_lifespan_by_energy, QuadConfig};
use nlw_duffing::norms::{lp_norm, NormConfig};
use nlw_duffing::penrose::{conformal_factors, sample_field, FieldConfig};
use nlw_duffing::threshold::{Threshold, ThresholdConfig};
use proptest::prelude::*;

fn ode() -> OdeConfig<f64> {
    OdeConfig::default()
}

fn quad() -> QuadConfig<f64> {
    QuadConfig::default()
}

fn threshold() -> &'static Threshold<f64> {
    static T: OnceLock<Threshold<f64>> = OnceLock::new();
    T.get_or_init(|| Threshold::new(ThresholdConfig::default()).unwrap())
}

fn radiation() -> &'static Radiation<f64> {
    static R: OnceLock<Radiation<f64>> = OnceLock::new();
    R.get_or_init(|| {
        let y = threshold().beta(0.5).unwrap();
        Radiation::new(PhasePoint::new(0.5, y), &FieldConfig::default()).unwrap()
    })
}

/// `Y ≥ 0` with energy `e` at `x`, if there is one.
fn y_for(x: f64, e: f64) -> Option<f64> {
    let y2 = 2.0 * e - x * x + 0.5 * x.powi(4);
    (y2 > 0.0).then(|| y2.sqrt())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn energy_is_conserved(x in -3.0..3.0f64, y in -3.0..3.0f64) {
        let cfg = ode();
        let tr = integrate(PhasePoint::new(x, y), 4.0, &cfg).unwrap();
        prop_assert!(tr.max_energy_drift() <= cfg.energy_tol, "{}", tr.max_energy_drift());
    }

    #[test]
    fn time_reversal(x in -2.5..2.5f64, y in -2.5..2.5f64, frac in 0.05..0.9f64) {
        let p = PhasePoint::new(x, y);
        let s = frac * t_plus(p, &quad()).min(3.0);
        let a = state_at(p, s, &ode()).unwrap();
        let b = state_at(PhasePoint::new(x, -y), -s, &ode()).unwrap();
        let scale = 1.0 + a.u.abs() + a.udot.abs();
        prop_assert!((a.u - b.u).abs() < 1e-7 * scale);
        prop_assert!((a.udot + b.udot).abs() < 1e-7 * scale);
    }

    #[test]
    fn sign_symmetry(x in -2.5..2.5f64, y in -2.5..2.5f64, frac in -0.9..0.9f64) {
        let p = PhasePoint::new(x, y);
        let s = if frac >= 0.0 { frac * t_plus(p, &quad()).min(3.0) } else { -frac * t_minus(p, &quad()).max(-3.0) };
        let a = state_at(p, s, &ode()).unwrap();
        let b = state_at(PhasePoint::new(-x, -y), s, &ode()).unwrap();
        let scale = 1.0 + a.u.abs() + a.udot.abs();
        prop_assert!((a.u + b.u).abs() < 1e-9 * scale && (a.udot + b.udot).abs() < 1e-9 * scale);
    }

    #[test]
    fn ode_and_quadrature_agree_on_blowup(x in -3.0..3.0f64, y in -3.0..3.0f64) {
        let p = PhasePoint::new(x, y);
        let tp = t_plus(p, &quad());
        prop_assume!(tp < 5.0);
        let tr = integrate(p, 6.0, &ode()).unwrap();
        prop_assert!(tr.truncated_at_blowup);
        prop_assert!((tr.blowup_time.unwrap() - tp).abs() <= 1e-6, "{} vs {tp}", tr.blowup_time.unwrap());
    }

    #[test]
    fn total_lifespan_depends_on_energy_only(x in -3.0..3.0f64, y in -3.0..3.0f64) {
        let p = PhasePoint::new(x, y);
        let (tm, tp) = (t_minus(p, &quad()), t_plus(p, &quad()));
        prop_assume!(tm.is_finite() && tp.is_finite());
        let total = total_lifespan_by_energy(p.energy(), &quad());
        prop_assert!((tp - tm - total).abs() < 1e-7, "{} vs {total}", tp - tm);
    }

    #[test]
    fn r_decreases_in_x_and_energy(x in 1.05..3.0f64, dx in 0.01..0.5f64, e in -1.0..3.0f64, de in 0.01..0.5f64) {
        let r = |x: f64, e: f64| y_for(x, e).map(|y| quad_r(PhasePoint::new(x, y), &quad()));
        if let (Some(a), Some(b)) = (r(x, e), r(x + dx, e)) {
            prop_assert!(b < a, "X: {a} {b}");
        }
        if let (Some(a), Some(b)) = (r(x, e), r(x, e + de)) {
            prop_assert!(b < a, "E: {a} {b}");
        }
    }

    #[test]
    fn s_increases_in_modulus_of_x(x in 1.05..3.0f64, dx in 0.01..0.5f64, e in -1.5..0.24f64, flip in any::<bool>()) {
        let s = |x: f64| y_for(x, e).map(|y| {
            let (x, y) = if flip { (-x, y) } else { (x, -y) };
            quad_s(PhasePoint::new(x, y), &quad())
        });
        if let (Some(a), Some(b)) = (s(x), s(x + dx)) {
            prop_assert!(b > a, "{a} {b}");
        }
    }

    #[test]
    fn total_lifespan_monotonicity(e in 0.001..0.24f64, de in 0.001..0.009f64, f in 0.26..4.0f64, df in 0.01..1.0f64) {
        let tot = |e: f64| total_lifespan_by_energy(e, &quad());
        prop_assert!(tot(e + de) > tot(e));
        prop_assert!(tot(f + df) < tot(f));
    }

    #[test]
    fn conformal_derivatives(t in -20.0..20.0f64, r in 0.01..20.0f64) {
        let h = 1e-5 * (1.0 + t.abs() + r);
        let c = conformal_factors(t, r);
        let dt = (conformal_factors(t + h, r).omega - conformal_factors(t - h, r).omega) / (2.0 * h);
        let dr = (conformal_factors(t, r + h).omega - conformal_factors(t, r - h).omega) / (2.0 * h);
        let st = (conformal_factors(t + h, r).s - conformal_factors(t - h, r).s) / (2.0 * h);
        let sr = (conformal_factors(t, r + h).s - conformal_factors(t, r - h).s) / (2.0 * h);
        let tol = 1e-6 * (c.omega + c.ds_dt.abs() + 1e-3);
        prop_assert!((dt - c.domega_dt).abs() < tol && (dr - c.domega_dr).abs() < tol);
        prop_assert!((st - c.ds_dt).abs() < tol && (sr - c.ds_dr).abs() < tol);
        prop_assert!(c.omega > 0.0 && c.s.abs() < PI);
    }

    #[test]
    fn lp_norm_grows_with_the_region(
        x in -2.0..2.0f64, y in -2.0..2.0f64, t in 0.0..0.5f64,
        a in 0.0..3.0f64, b in 0.1..5.0f64, grow in 0.0..3.0f64,
    ) {
        let rs: Vec<f64> = (0..400).map(|k| 0.02 * k as f64).collect();
        let snap = sample_field(PhasePoint::new(x, y), t, &rs, &FieldConfig::default()).unwrap();
        prop_assume!(snap.in_domain.iter().all(|&d| d));
        let inner = lp_norm(&snap, 2.0, Some((a, a + b))).unwrap().value;
        let outer = lp_norm(&snap, 2.0, Some(((a - grow).max(0.0), a + b + grow))).unwrap().value;
        prop_assert!(inner <= outer * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn threshold_curve_has_lifespan_pi(x in -3.0..3.0f64) {
        let b = threshold().beta(x).unwrap();
        prop_assert!((t_plus(PhasePoint::new(x, b), &quad()) - PI).abs() < 1e-6);
    }

    #[test]
    fn beta_is_decreasing_and_dominates_its_reflection(x in -3.0..3.0f64, dx in 0.01..1.0f64) {
        let t = threshold();
        prop_assert!(t.beta(x + dx).unwrap() < t.beta(x).unwrap());
        prop_assert!(t.beta(x).unwrap() > -t.beta(-x).unwrap());
    }

    #[test]
    fn radiated_energy_is_positive(a in -20.0..20.0f64, len in 0.01..10.0f64) {
        let e = radiation().radiated_energy(a, a + len, &NormConfig::default()).unwrap();
        prop_assert!(e > 0.0, "{e}");
    }
}
