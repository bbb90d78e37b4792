mod common;

use std::collections::HashSet;
use std::f64::consts::{PI, SQRT_2};

use nlw_duffing::duffing::{DenseSolution, OdeConfig, PhasePoint};
use nlw_duffing::lifespan::{t_plus, QuadConfig};
use nlw_duffing::threshold::{Behavior, GridSpec, Threshold, ThresholdConfig};

fn th() -> Threshold<f64> {
    Threshold::new(ThresholdConfig::default()).unwrap()
}

#[test]
fn beta_oracles() {
    let t = th();
    assert!((t.beta(0.0).unwrap() - common::BETA_AT_0).abs() < 1e-11);
    assert!((t.beta(0.5).unwrap() - common::BETA_AT_HALF).abs() < 1e-11);
    assert!((t.beta(2.0).unwrap() - common::BETA_AT_2).abs() < 1e-11);
    assert!(t.beta(t.x_c()).unwrap().abs() < 1e-12);
    assert!(t.beta(1.0).unwrap() > 0.0 && t.beta(SQRT_2).unwrap() < 0.0);
}

#[test]
fn beta_on_the_level_set() {
    let t = th();
    let b = t.beta(0.0).unwrap();
    assert!((t_plus(PhasePoint::new(0.0, b), &QuadConfig::default()) - PI).abs() < 1e-7);
}

#[test]
fn classification_examples() {
    let t = th();
    assert_eq!(t.classify_forward(PhasePoint::new(0.0, 0.0)).unwrap(), Behavior::Scattering);
    assert_eq!(t.classify_forward(PhasePoint::new(2.0, 2.0)).unwrap(), Behavior::Blowup);
    assert_eq!(t.classify_forward(PhasePoint::new(t.x_c(), 0.0)).unwrap(), Behavior::Threshold);
    let b0 = t.beta(0.0).unwrap();
    for p in [PhasePoint::new(t.x_c(), 0.0), PhasePoint::new(0.0, b0)] {
        let c = t.classify_bidirectional(p).unwrap();
        assert_eq!((c.forward, c.backward), (Behavior::Threshold, Behavior::Threshold));
    }
}

#[test]
fn special_point_parities() {
    let t = th();
    let pts = t.special_points().unwrap();
    for p in pts {
        let c = t.classify_bidirectional(p).unwrap();
        assert_eq!(c.cell(), "threshold/threshold");
    }
    let cfg = OdeConfig::default();
    let even = DenseSolution::new(pts[0], -2.0, 2.0, &cfg).unwrap();
    let odd = DenseSolution::new(pts[2], -2.0, 2.0, &cfg).unwrap();
    for s in [0.3, 1.0, 1.9] {
        assert!((even.eval(s).unwrap().u - even.eval(-s).unwrap().u).abs() < 1e-9);
        assert!((odd.eval(s).unwrap().u + odd.eval(-s).unwrap().u).abs() < 1e-9);
    }
}

#[test]
fn classification_brackets_the_level_set() {
    let t = th();
    let q = QuadConfig::default();
    let delta = 10.0 * t.config().threshold_band;
    for x in [-1.5, 0.0, 0.8, 1.3, 2.2] {
        let b = t.beta(x).unwrap();
        assert!(t_plus(PhasePoint::new(x, b + delta), &q) < PI);
        assert!(t_plus(PhasePoint::new(x, b - delta), &q) > PI);
    }
}

#[test]
fn curve_properties() {
    let t = th();
    let c = t.beta_curve(-3.0, 3.0, 101).unwrap();
    assert!(c.betas.windows(2).all(|w| w[1] < w[0]));
    let n = c.xs.len();
    for i in 0..n {
        // xs is symmetric, so xs[n-1-i] = −xs[i]
        assert!((c.xs[n - 1 - i] + c.xs[i]).abs() < 1e-12);
        assert!(c.betas[i] > -c.betas[n - 1 - i]);
    }
    let fine = t.beta_curve(-3.0, 3.0, 201).unwrap();
    for i in 0..n {
        assert!((fine.betas[2 * i] - c.betas[i]).abs() < 1e-11);
    }
}

#[test]
fn diagram_symmetries() {
    let t = th();
    let d = t.phase_diagram(&GridSpec::square(-3.0, 3.0, 13)).unwrap();
    let n = d.xs.len();
    let mid = n / 2;
    assert_eq!(d.cells[mid][mid].cell(), "scattering/scattering");
    for iy in 0..n {
        for ix in 0..n {
            let c = d.cells[iy][ix];
            assert_eq!(d.cells[n - 1 - iy][ix], c.swapped(), "Y ↦ −Y at ({ix}, {iy})");
            assert_eq!(d.cells[n - 1 - iy][n - 1 - ix], c, "(X, Y) ↦ (−X, −Y) at ({ix}, {iy})");
        }
    }
}

#[test]
fn all_nine_cells_occur() {
    // threshold cells have measure zero, so the grid is completed by points
    // on the forward branches Y = β(X), Y = −β(−X) and their mirror images
    let t = th();
    let d = t.phase_diagram(&GridSpec::square(-3.0, 3.0, 13)).unwrap();
    let mut seen: HashSet<String> = d.cells.iter().flatten().map(|c| c.cell()).collect();
    for &x in &d.xs {
        let (b, bn) = (t.beta(x).unwrap(), t.beta(-x).unwrap());
        for y in [b, -bn, -b, bn] {
            seen.insert(t.classify_bidirectional(PhasePoint::new(x, y)).unwrap().cell());
        }
    }
    assert_eq!(seen.len(), 9, "{seen:?}");
}
