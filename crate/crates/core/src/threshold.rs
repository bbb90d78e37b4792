//! The threshold curve `β(X)` and the blow-up/scattering classification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::duffing::PhasePoint;
use crate::error::{Error, Result};
use crate::lifespan::{quad_r, quad_s, t_plus, x_critical, QuadConfig, SEPARATRIX_BAND};
use crate::roots::brent;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdConfig<T> {
    pub quad: QuadConfig<T>,
    /// Half-width of the band around `β` that is reported as `Threshold`.
    pub threshold_band: T,
    /// Bracket expansion limit for `|β|`.
    pub max_beta: T,
}

impl<T: Real> Default for ThresholdConfig<T> {
    fn default() -> Self {
        Self { quad: QuadConfig::default(), threshold_band: T::lit(1e-9), max_beta: T::lit(1e12) }
    }
}

/// Long-time behaviour in one time direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Behavior {
    Blowup,
    Scattering,
    Threshold,
}

impl Behavior {
    pub fn as_str(self) -> &'static str {
        match self {
            Behavior::Blowup => "blowup",
            Behavior::Scattering => "scattering",
            Behavior::Threshold => "threshold",
        }
    }
}

impl std::fmt::Display for Behavior {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Forward and backward behaviour: one of nine cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Classification {
    pub forward: Behavior,
    pub backward: Behavior,
}

impl Classification {
    /// `"forward/backward"`, e.g. `"blowup/scattering"`.
    pub fn cell(&self) -> String {
        format!("{}/{}", self.forward, self.backward)
    }

    /// The classification of the time-reversed solution.
    pub fn swapped(self) -> Self {
        Self { forward: self.backward, backward: self.forward }
    }
}

/// Sampled threshold curve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdCurve<T> {
    pub xs: Vec<T>,
    pub betas: Vec<T>,
    pub x_c: T,
}

/// Threshold solver with `X_C` computed once.
#[derive(Clone, Debug)]
pub struct Threshold<T> {
    cfg: ThresholdConfig<T>,
    x_c: T,
}

impl<T: Real> Threshold<T> {
    pub fn new(cfg: ThresholdConfig<T>) -> Result<Self> {
        let x_c = x_critical(&cfg.quad)?;
        Ok(Self { cfg, x_c })
    }

    pub fn x_c(&self) -> T {
        self.x_c
    }

    pub fn config(&self) -> &ThresholdConfig<T> {
        &self.cfg
    }

    /// `β(X)`: the nonnegative root of `R(X, Y) = π` for `X ≤ X_C`, the
    /// negative root of `S(X, Y) = π` for `X > X_C`.
    pub fn beta(&self, x: T) -> Result<T> {
        if !x.is_finite() {
            return Err(Error::Parameter("X must be finite".into()));
        }
        let pi = T::PI();
        let q = &self.cfg.quad;
        let tol = q.rel_tol * T::lit(0.1);
        // 1 − π/I is finite, monotone in Y and changes sign at I = π
        let gauge = |i: T| T::one() - pi / i;
        if x <= self.x_c {
            let r_plus = |y: T| {
                if y == T::zero() && x < T::zero() {
                    // limit Y → 0⁺ of the lower limit X·sign(Y) is X itself
                    T::infinity()
                } else {
                    quad_r(PhasePoint::new(x, y), q)
                }
            };
            let g = |y: T| gauge(r_plus(y));
            if g(T::zero()) <= T::zero() {
                return Ok(T::zero());
            }
            let mut hi = T::one().max(x * x);
            while g(hi) > T::zero() {
                hi *= T::lit(2.0);
                if hi > self.cfg.max_beta {
                    return Err(Error::Range {
                        what: format!("beta bracket at X = {}", x.as_f64()),
                        requested: hi.as_f64(),
                        available: self.cfg.max_beta.as_f64(),
                    });
                }
            }
            brent(g, T::zero(), hi, tol * hi.max(T::one()), 300)
        } else {
            // S(X, ·) grows from boundary_tplus(X) < π at Y = 0⁻ to ∞ at E = 1/4
            let y_quarter = (x * x - T::one()) / T::SQRT_2();
            let g = |y: T| {
                if y == T::zero() {
                    gauge(quad_s(PhasePoint::new(x, -T::zero()), q))
                } else {
                    gauge(quad_s(PhasePoint::new(x, y), q))
                }
            };
            let lo = -y_quarter;
            if lo.abs() > self.cfg.max_beta {
                return Err(Error::Range {
                    what: format!("beta bracket at X = {}", x.as_f64()),
                    requested: lo.as_f64(),
                    available: self.cfg.max_beta.as_f64(),
                });
            }
            brent(|y| -g(y), lo, T::zero(), tol * y_quarter.max(T::one()), 300)
        }
    }

    /// Forward behaviour from the comparisons `Y ≷ β(X)`, `Y ≷ −β(−X)`,
    /// given both values.
    pub fn classify_with(&self, p: PhasePoint<T>, beta_x: T, beta_neg_x: T) -> Behavior {
        let band = self.cfg.threshold_band;
        let e = p.energy();
        if (e - T::lit(0.25)).abs() <= T::lit(SEPARATRIX_BAND) {
            let tp = t_plus(p, &self.cfg.quad);
            let pi = T::PI();
            return if (tp - pi).abs() <= band {
                Behavior::Threshold
            } else if tp < pi {
                Behavior::Blowup
            } else {
                Behavior::Scattering
            };
        }
        let upper = beta_x;
        let lower = -beta_neg_x;
        if (p.y - upper).abs() <= band || (p.y - lower).abs() <= band {
            Behavior::Threshold
        } else if p.y > upper || p.y < lower {
            Behavior::Blowup
        } else {
            Behavior::Scattering
        }
    }

    pub fn classify_forward(&self, p: PhasePoint<T>) -> Result<Behavior> {
        Ok(self.classify_with(p, self.beta(p.x)?, self.beta(-p.x)?))
    }

    /// Forward and backward behaviour; the backward behaviour of `(X, Y)`
    /// is the forward behaviour of `(X, −Y)`.
    pub fn classify_bidirectional(&self, p: PhasePoint<T>) -> Result<Classification> {
        let bx = self.beta(p.x)?;
        let bnx = self.beta(-p.x)?;
        Ok(Classification {
            forward: self.classify_with(p, bx, bnx),
            backward: self.classify_with(p.time_reversed(), bx, bnx),
        })
    }

    /// `(X_C, 0)`, `(−X_C, 0)`, `(0, β(0))`, `(0, −β(0))`.
    pub fn special_points(&self) -> Result<[PhasePoint<T>; 4]> {
        let b0 = self.beta(T::zero())?;
        Ok([
            PhasePoint::new(self.x_c, T::zero()),
            PhasePoint::new(-self.x_c, T::zero()),
            PhasePoint::new(T::zero(), b0),
            PhasePoint::new(T::zero(), -b0),
        ])
    }

    /// `β` on a uniform grid of `n ≥ 2` points, checked for monotonicity.
    pub fn beta_curve(&self, x_min: T, x_max: T, n: usize) -> Result<ThresholdCurve<T>> {
        if n < 2 || !(x_max > x_min) {
            return Err(Error::Parameter("beta_curve needs n >= 2 and x_min < x_max".into()));
        }
        let xs = uniform_grid(x_min, x_max, n);
        let betas = xs.par_iter().map(|&x| self.beta(x)).collect::<Result<Vec<T>>>()?;
        if let Some(i) = (1..n).find(|&i| betas[i] >= betas[i - 1]) {
            return Err(Error::Accuracy(format!(
                "beta not decreasing between X = {} and X = {}",
                xs[i - 1].as_f64(),
                xs[i].as_f64()
            )));
        }
        Ok(ThresholdCurve { xs, betas, x_c: self.x_c })
    }

    /// Bidirectional classification of every cell of a rectangular grid.
    pub fn phase_diagram(&self, grid: &GridSpec<T>) -> Result<PhaseDiagram<T>> {
        let xs = grid.xs();
        let ys = grid.ys();
        let pairs = xs
            .par_iter()
            .map(|&x| Ok((self.beta(x)?, self.beta(-x)?)))
            .collect::<Result<Vec<(T, T)>>>()?;
        let cells = ys
            .par_iter()
            .map(|&y| {
                xs.iter()
                    .zip(&pairs)
                    .map(|(&x, &(bx, bnx))| {
                        let p = PhasePoint::new(x, y);
                        Classification {
                            forward: self.classify_with(p, bx, bnx),
                            backward: self.classify_with(p.time_reversed(), bx, bnx),
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(PhaseDiagram { xs, ys, cells })
    }
}

/// `n` equally spaced points from `a` to `b` inclusive.
pub fn uniform_grid<T: Real>(a: T, b: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![a];
    }
    let step = (b - a) / T::from_usize_lossy(n - 1);
    (0..n)
        .map(|i| if i == n - 1 { b } else { a + step * T::from_usize_lossy(i) })
        .collect()
}

/// Rectangular sampling grid in the `(X, Y)` plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub x_min: T,
    pub x_max: T,
    pub nx: usize,
    pub y_min: T,
    pub y_max: T,
    pub ny: usize,
}

impl<T: Real> GridSpec<T> {
    pub fn square(lo: T, hi: T, n: usize) -> Self {
        Self { x_min: lo, x_max: hi, nx: n, y_min: lo, y_max: hi, ny: n }
    }

    pub fn xs(&self) -> Vec<T> {
        uniform_grid(self.x_min, self.x_max, self.nx)
    }

    pub fn ys(&self) -> Vec<T> {
        uniform_grid(self.y_min, self.y_max, self.ny)
    }
}

/// Classification matrix, indexed `cells[iy][ix]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseDiagram<T> {
    pub xs: Vec<T>,
    pub ys: Vec<T>,
    pub cells: Vec<Vec<Classification>>,
}

/// `β(X)` with a freshly computed `X_C`.
pub fn beta<T: Real>(x: T, cfg: &ThresholdConfig<T>) -> Result<T> {
    Threshold::new(*cfg)?.beta(x)
}

pub fn classify_forward<T: Real>(p: PhasePoint<T>, cfg: &ThresholdConfig<T>) -> Result<Behavior> {
    Threshold::new(*cfg)?.classify_forward(p)
}

pub fn classify_bidirectional<T: Real>(p: PhasePoint<T>, cfg: &ThresholdConfig<T>) -> Result<Classification> {
    Threshold::new(*cfg)?.classify_bidirectional(p)
}

pub fn special_points<T: Real>(cfg: &ThresholdConfig<T>) -> Result<[PhasePoint<T>; 4]> {
    Threshold::new(*cfg)?.special_points()
}

pub fn beta_curve<T: Real>(x_min: T, x_max: T, n: usize, cfg: &ThresholdConfig<T>) -> Result<ThresholdCurve<T>> {
    Threshold::new(*cfg)?.beta_curve(x_min, x_max, n)
}

pub fn phase_diagram<T: Real>(grid: &GridSpec<T>, cfg: &ThresholdConfig<T>) -> Result<PhaseDiagram<T>> {
    Threshold::new(*cfg)?.phase_diagram(grid)
}
