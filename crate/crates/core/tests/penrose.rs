use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use nlw_duffing::duffing::{energy, PhasePoint, Sign};
use nlw_duffing::lifespan::{t_plus, QuadConfig};
use nlw_duffing::norms::{lp_norm_fn, radial_fourier_fn, sobolev_norm_fn, NormConfig, SobolevNormalization};
use nlw_duffing::penrose::{
    field_time_derivative, field_value, influence_bound, physical_blowup_time, physical_time_from_conformal,
    sample_field, Field, FieldConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fc() -> FieldConfig<f64> {
    FieldConfig::default()
}

#[test]
fn bound_examples() {
    assert!((influence_bound(FRAC_PI_2, 0.0, Sign::Plus) - 1.0).abs() < 1e-15);
    for tt in [0.4f64, 1.0, 2.0, 3.0] {
        for r in [0.0, 0.5, 2.0, 7.0] {
            let m = influence_bound(tt, r, Sign::Plus);
            assert!((1.0 + r * r - m * m - 2.0 * m / tt.tan()).abs() < 1e-10 * (1.0 + r * r), "{tt} {r}");
        }
    }
}

#[test]
fn blowup_surface_is_spacelike() {
    let h = 1e-6;
    for tt in [0.3, FRAC_PI_4, 1.5, 2.5, 3.1] {
        for k in 1..=100 {
            let r = 0.1 * k as f64;
            let d = (influence_bound(tt, r + h, Sign::Plus) - influence_bound(tt, r - h, Sign::Plus)) / (2.0 * h);
            assert!(d.abs() < 1.0, "T = {tt}, r = {r}: {d}");
        }
    }
}

#[test]
fn initial_data() {
    for (x, y) in [(0.3, 0.0), (2.0, 2.0), (-1.2, 0.7)] {
        let f = Field::new(PhasePoint::new(x, y), &fc()).unwrap();
        for r in [0.0, 0.25, 1.0, 6.0, 300.0] {
            let fp = f.eval(0.0, r).unwrap();
            assert!((fp.u - 2.0 * x / (1.0 + r * r)).abs() < 1e-12);
            assert!((fp.ut - 4.0 * y / (1.0 + r * r).powi(2)).abs() < 1e-12);
        }
    }
    assert_eq!(field_time_derivative(PhasePoint::new(0.9, 0.0), 0.0, 1.3, &fc()).unwrap(), 0.0);
}

#[test]
fn energy_zero_branch_is_the_attractor() {
    for p in [PhasePoint::new(2.0, 2.0), PhasePoint::new(1.6, 1.6f64.powi(2) / 2.0f64.sqrt() * (1.0 - 2.0 / 1.6f64.powi(2)).sqrt())] {
        assert!(energy(p).abs() < 1e-14);
        let tp = t_plus(p, &QuadConfig::default());
        let (a, b) = tp.sin_cos();
        let f = Field::new(p, &fc()).unwrap();
        let t_star = f.blowup_time();
        for t in [-2.0, 0.0, 0.5 * t_star, 0.95 * t_star] {
            for r in [0.0, 0.3, 2.0, 10.0] {
                if !f.in_domain(t, r) {
                    continue;
                }
                let exact = 2.0 * 2f64.sqrt() / (a * (1.0 + r * r - t * t) - 2.0 * b * t);
                let u = f.value(t, r).unwrap();
                assert!((u - exact).abs() < 1e-8 * exact.abs().max(1.0), "({t}, {r}): {u} vs {exact}");
            }
        }
    }
}

fn residual(f: &Field<f64>, t: f64, r: f64, h: f64) -> f64 {
    let u = |t: f64, r: f64| f.value(t, r).unwrap();
    let c = u(t, r);
    let utt = (u(t + h, r) - 2.0 * c + u(t - h, r)) / (h * h);
    let urr = (u(t, r + h) - 2.0 * c + u(t, r - h)) / (h * h);
    let ur = (u(t, r + h) - u(t, r - h)) / (2.0 * h);
    utt - urr - 2.0 * ur / r - c * c * c
}

#[test]
fn pde_residual_is_second_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pts = [PhasePoint::new(1.5, 1.0), PhasePoint::new(0.4, -0.3), PhasePoint::new(-2.0, 0.5)];
    let mut checked = 0;
    while checked < 10 {
        let p = pts[checked % pts.len()];
        let f = Field::new(p, &fc()).unwrap();
        let r = rng.gen_range(0.2..3.0);
        let (lo, hi) = f.bounds(r);
        let (lo, hi) = (lo.max(-4.0) + 0.1, hi.min(4.0) - 0.1);
        let t = rng.gen_range(lo..hi);
        if !(f.in_domain(t - 0.1, r) && f.in_domain(t + 0.1, r)) {
            continue;
        }
        let coarse = residual(&f, t, r, 0.02);
        let fine = residual(&f, t, r, 0.01);
        // the observed order log₂(coarse/fine) should be 2 unless both are at rounding level
        if coarse.abs() > 1e-6 {
            let order = (coarse / fine).abs().log2();
            assert!((order - 2.0).abs() < 0.2, "{p:?} ({t}, {r}): {coarse} {fine}");
        } else {
            assert!(fine.abs() < 1e-6);
        }
        checked += 1;
    }
}

#[test]
fn time_derivative_matches_differences() {
    let p = PhasePoint::new(1.5, 1.0);
    let cfg = fc();
    for (t, r) in [(0.1, 0.5), (-0.8, 2.0), (0.2, 4.0)] {
        let d = field_time_derivative(p, t, r, &cfg).unwrap();
        let err = |h: f64| {
            let fd = (field_value(p, t + h, r, &cfg).unwrap() - field_value(p, t - h, r, &cfg).unwrap()) / (2.0 * h);
            (fd - d).abs()
        };
        let (e1, e2) = (err(1e-2), err(5e-3));
        assert!(e2 < 0.3 * e1 || e2 < 1e-9, "({t}, {r}): {e1} {e2}");
    }
}

#[test]
fn physical_blowup_times() {
    assert!((physical_time_from_conformal(FRAC_PI_2) - 1.0).abs() < 1e-15);
    let t = physical_blowup_time(PhasePoint::new(2.0, 2.0), &QuadConfig::default());
    assert!((t - FRAC_PI_8.tan()).abs() < 1e-12);
    assert_eq!(physical_blowup_time(PhasePoint::new(0.2, 0.1), &QuadConfig::default()), f64::INFINITY);
    let p = PhasePoint::new(1.5f64, 1.0);
    let tp = t_plus(p, &QuadConfig::default());
    assert!((physical_time_from_conformal(tp) - influence_bound(tp, 0.0, Sign::Plus)).abs() < 1e-12);
}

#[test]
fn centre_grows_monotonically_to_blowup() {
    let f = Field::new(PhasePoint::new(1.5, 1.0), &fc()).unwrap();
    let t_star = f.blowup_time();
    let mut prev = 0.0;
    for k in 1..=25 {
        let u = f.value(t_star - 2f64.powi(-k), 0.0).unwrap().abs();
        assert!(u > prev, "k = {k}");
        prev = u;
    }
    assert!(prev > 1e6);
}

#[test]
fn sampling() {
    let rs: Vec<f64> = (0..200).map(|k| 0.05 * k as f64).collect();
    let scat = sample_field(PhasePoint::new(0.3, 0.1), 50.0, &rs, &fc()).unwrap();
    assert!(scat.in_domain.iter().all(|&b| b));

    let p = PhasePoint::new(1.5, 1.0);
    let cfg = fc();
    let f = Field::new(p, &cfg).unwrap();
    let t = 0.9 * f.blowup_time();
    let snap = sample_field(p, t, &rs, &cfg).unwrap();
    assert!(snap.in_domain.iter().any(|&b| !b) || f.bounds(rs[0]).1 > t);
    for (i, &r) in rs.iter().enumerate() {
        let (lo, hi) = f.bounds(r);
        let inside = lo < t && t < hi;
        if (t - hi).abs() > 1e-6 {
            assert_eq!(snap.in_domain[i], inside, "r = {r}");
        }
        if snap.in_domain[i] {
            assert!((snap.u[i] - field_value(p, t, r, &cfg).unwrap()).abs() < 1e-10);
            assert!((snap.ut[i] - field_time_derivative(p, t, r, &cfg).unwrap()).abs() < 1e-10);
        } else {
            assert!(snap.u[i].is_nan());
        }
    }
    assert!(sample_field(p, 0.0, &[1.0, 0.5], &cfg).is_err());
}

#[test]
fn critical_norm_identity_from_the_field() {
    let cfg = NormConfig::default();
    for (x, y) in [(0.7, -0.4), (1.5, 1.0)] {
        let f = Field::new(PhasePoint::new(x, y), &fc()).unwrap();
        // f̂ decays like e^{−ρ}, so frequencies beyond 40 contribute below rounding
        let spectrum = |g: &dyn Fn(f64) -> f64, rho: f64| if rho > 40.0 { 0.0 } else { radial_fourier_fn(g, rho, &cfg).unwrap() };
        let u0 = |r: f64| f.value(0.0, r).unwrap();
        let u1 = |r: f64| f.time_derivative(0.0, r).unwrap();
        let h = sobolev_norm_fn(|rho| spectrum(&u0, rho), 0.5, SobolevNormalization::Plancherel, &cfg).unwrap();
        let hm = sobolev_norm_fn(|rho| spectrum(&u1, rho), -0.5, SobolevNormalization::Plancherel, &cfg).unwrap();
        let lhs = h.squared() + hm.squared();
        let rhs = 2.0 * PI * PI * (x * x + y * y);
        assert!(((lhs - rhs) / rhs).abs() < 1e-6, "({x}, {y}): {lhs} vs {rhs}");
    }
}

#[test]
fn energy_identity_from_the_field() {
    let cfg = NormConfig::default();
    for (x, y) in [(0.7, -0.4), (1.5, 1.0), (2.0, 2.0)] {
        let f = Field::new(PhasePoint::new(x, y), &fc()).unwrap();
        let l2 = |g: &dyn Fn(f64) -> f64| lp_norm_fn(g, 2.0, 0.0, f64::INFINITY, &[1.0], &cfg).unwrap().squared();
        let kinetic = l2(&|r| f.eval(0.0, r).unwrap().ut);
        let gradient = l2(&|r| f.eval(0.0, r).unwrap().ur);
        let quartic = lp_norm_fn(|r| f.value(0.0, r).unwrap(), 4.0, 0.0, f64::INFINITY, &[1.0], &cfg).unwrap().value.powi(4);
        let total = 0.5 * kinetic + 0.5 * gradient - 0.25 * quartic;
        let expected = 2.0 * PI * PI * energy(PhasePoint::new(x, y));
        let scale = 0.5 * (kinetic + gradient) + 0.25 * quartic;
        assert!((total - expected).abs() < 1e-6 * expected.abs().max(1e-3 * scale), "({x}, {y}): {total} vs {expected}");
    }
}
