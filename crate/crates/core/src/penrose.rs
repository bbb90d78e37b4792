//! From the Duffing profile to the physical field
//! `u(t, r) = Ω(t, r) U(s(t, r))`.

use serde::{Deserialize, Serialize};

use crate::duffing::{DenseSolution, OdeConfig, OdeState, PhasePoint, Sign};
use crate::error::{Error, Result};
use crate::lifespan::{lifespan, Lifespan, QuadConfig};
use crate::scalar::Real;

/// `Ω`, `s` and their first derivatives at a point `(t, r)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalFactors<T> {
    pub omega: T,
    pub s: T,
    pub ds_dt: T,
    pub ds_dr: T,
    pub domega_dt: T,
    pub domega_dr: T,
}

/// `Ω = 2/√((1 + (t+r)²)(1 + (t−r)²))` and `s = arctan(t+r) + arctan(t−r)`,
/// evaluated through `tan s = 2t/(1 + r² − t²)` to stay accurate for large
/// `t ± r`.
pub fn conformal_factors<T: Real>(t: T, r: T) -> ConformalFactors<T> {
    let one = T::one();
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let x = one + (r - t) * (r + t);
    let y = two * t;
    let omega = two / x.hypot(y);
    let s = y.atan2(x);
    let ap = one / (one + (t + r) * (t + r));
    let am = one / (one + (t - r) * (t - r));
    let o3 = omega * omega * omega;
    ConformalFactors {
        omega,
        s,
        ds_dt: ap + am,
        ds_dr: ap - am,
        domega_dt: -half * t * o3 * (one + (t - r) * (t + r)),
        domega_dr: -half * r * o3 * x,
    }
}

/// `M±(T, r) = −cot T ± √(1 + r² + cot² T)`, or `±∞` when `|T| ≥ π`.
pub fn influence_bound<T: Real>(big_t: T, r: T, side: Sign) -> T {
    if !(big_t.abs() < T::PI()) {
        return match side {
            Sign::Plus => T::infinity(),
            Sign::Minus => T::neg_infinity(),
        };
    }
    let a = T::one() + r * r;
    let (sn, cs) = big_t.sin_cos();
    let c = if big_t.abs() == T::FRAC_PI_2() { T::zero() } else { cs / sn };
    if !c.is_finite() {
        // T → 0: one root tends to 0 from the side of T
        return match (side, c > T::zero()) {
            (Sign::Plus, true) => T::zero(),
            (Sign::Plus, false) => T::infinity(),
            (Sign::Minus, true) => T::neg_infinity(),
            (Sign::Minus, false) => T::zero(),
        };
    }
    let root = (a + c * c).sqrt();
    match side {
        Sign::Plus => {
            if c > T::zero() {
                a / (c + root)
            } else {
                root - c
            }
        }
        Sign::Minus => {
            if c < T::zero() {
                -a / (root - c)
            } else {
                -c - root
            }
        }
    }
}

/// `t₊ = (1 − cos T₊)/sin T₊ = tan(T₊/2)`, or `+∞` if `T₊ ≥ π`.
pub fn physical_time_from_conformal<T: Real>(t_plus: T) -> T {
    if t_plus >= T::PI() {
        T::infinity()
    } else {
        (t_plus * T::lit(0.5)).tan()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig<T> {
    pub ode: OdeConfig<T>,
    pub quad: QuadConfig<T>,
    /// Points with `s` this close to `T±` are treated as outside the domain.
    pub boundary_guard: T,
}

impl<T: Real> Default for FieldConfig<T> {
    fn default() -> Self {
        Self { ode: OdeConfig::default(), quad: QuadConfig::default(), boundary_guard: T::lit(1e-9) }
    }
}

impl<T: Real> FieldConfig<T> {
    pub fn scaled(self, factor: T) -> Self {
        Self { ode: self.ode.scaled(factor), quad: self.quad.scaled(factor), ..self }
    }
}

/// Value and first derivatives of `u` at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldPoint<T> {
    pub u: T,
    pub ut: T,
    pub ur: T,
}

/// A radial snapshot of `u` at fixed `t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialField<T> {
    pub t: T,
    pub rs: Vec<T>,
    pub u: Vec<T>,
    pub ut: Vec<T>,
    pub in_domain: Vec<bool>,
}

/// The solution `u_{X,Y}` with its lifespan and a shared dense profile.
#[derive(Clone, Debug)]
pub struct Field<T> {
    p: PhasePoint<T>,
    lifespan: Lifespan<T>,
    sol: DenseSolution<T>,
    guard: T,
}

impl<T: Real> Field<T> {
    pub fn new(p: PhasePoint<T>, cfg: &FieldConfig<T>) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::Parameter("phase point must be finite".into()));
        }
        let ls = lifespan(p, &cfg.quad);
        let pi = T::PI();
        let anchor = |v: T| if v.is_finite() { Some(v) } else { None };
        let sol = DenseSolution::with_anchors(
            p,
            -pi.min(-ls.t_minus),
            pi.min(ls.t_plus),
            anchor(ls.t_minus),
            anchor(ls.t_plus),
            &cfg.ode,
        )?;
        Ok(Self { p, lifespan: ls, sol, guard: cfg.boundary_guard })
    }

    pub fn phase_point(&self) -> PhasePoint<T> {
        self.p
    }

    pub fn lifespan(&self) -> Lifespan<T> {
        self.lifespan
    }

    pub fn profile(&self) -> &DenseSolution<T> {
        &self.sol
    }

    /// Forward physical blow-up time (`+∞` if the solution is global forward).
    pub fn blowup_time(&self) -> T {
        physical_time_from_conformal(self.lifespan.t_plus)
    }

    /// `(M₋(T₋, r), M₊(T₊, r))`.
    pub fn bounds(&self, r: T) -> (T, T) {
        (
            influence_bound(self.lifespan.t_minus, r, Sign::Minus),
            influence_bound(self.lifespan.t_plus, r, Sign::Plus),
        )
    }

    fn guarded(&self, s: T) -> bool {
        s > self.lifespan.t_minus + self.guard && s < self.lifespan.t_plus - self.guard
    }

    pub fn in_domain(&self, t: T, r: T) -> bool {
        t.is_finite() && r.is_finite() && self.guarded(conformal_factors(t, r.abs()).s)
    }

    fn profile_at(&self, t: T, r: T) -> Result<(ConformalFactors<T>, OdeState<T>)> {
        let r = r.abs();
        let cf = conformal_factors(t, r);
        if !(t.is_finite() && r.is_finite()) || !self.guarded(cf.s) {
            let (lower, upper) = self.bounds(r);
            return Err(Error::OutsideDomain { t: t.as_f64(), r: r.as_f64(), lower: lower.as_f64(), upper: upper.as_f64() });
        }
        // near s = ±π the gap to ±π is computed directly for accuracy
        let x = T::one() + (r - t) * (r + t);
        let st = if x < T::zero() {
            let gap = (T::lit(2.0) * t.abs()).atan2(-x);
            if t > T::zero() {
                self.sol.eval_offset(T::PI(), -gap)?
            } else {
                self.sol.eval_offset(-T::PI(), gap)?
            }
        } else {
            self.sol.eval(cf.s)?
        };
        Ok((cf, st))
    }

    /// `u(t, r)`.
    pub fn value(&self, t: T, r: T) -> Result<T> {
        let (cf, st) = self.profile_at(t, r)?;
        Ok(cf.omega * st.u)
    }

    /// `∂ₜu = ∂ₜΩ U(s) + Ω ∂ₜs U̇(s)`.
    pub fn time_derivative(&self, t: T, r: T) -> Result<T> {
        let (cf, st) = self.profile_at(t, r)?;
        Ok(cf.domega_dt * st.u + cf.omega * cf.ds_dt * st.udot)
    }

    /// `u`, `∂ₜu` and `∂ᵣu` at one point.
    pub fn eval(&self, t: T, r: T) -> Result<FieldPoint<T>> {
        let (cf, st) = self.profile_at(t, r)?;
        let sign = if r < T::zero() { -T::one() } else { T::one() };
        Ok(FieldPoint {
            u: cf.omega * st.u,
            ut: cf.domega_dt * st.u + cf.omega * cf.ds_dt * st.udot,
            ur: sign * (cf.domega_dr * st.u + cf.omega * cf.ds_dr * st.udot),
        })
    }

    /// Samples `u`, `∂ₜu` on a radial grid; out-of-domain samples are `NaN`.
    pub fn sample(&self, t: T, rs: &[T]) -> RadialField<T> {
        let mut u = Vec::with_capacity(rs.len());
        let mut ut = Vec::with_capacity(rs.len());
        let mut in_domain = Vec::with_capacity(rs.len());
        for &r in rs {
            match self.eval(t, r) {
                Ok(fp) => {
                    u.push(fp.u);
                    ut.push(fp.ut);
                    in_domain.push(true);
                }
                Err(_) => {
                    u.push(T::nan());
                    ut.push(T::nan());
                    in_domain.push(false);
                }
            }
        }
        RadialField { t, rs: rs.to_vec(), u, ut, in_domain }
    }
}

pub fn field_value<T: Real>(p: PhasePoint<T>, t: T, r: T, cfg: &FieldConfig<T>) -> Result<T> {
    Field::new(p, cfg)?.value(t, r)
}

pub fn field_time_derivative<T: Real>(p: PhasePoint<T>, t: T, r: T, cfg: &FieldConfig<T>) -> Result<T> {
    Field::new(p, cfg)?.time_derivative(t, r)
}

/// Forward physical blow-up time `t₊(X, Y)`.
pub fn physical_blowup_time<T: Real>(p: PhasePoint<T>, cfg: &QuadConfig<T>) -> T {
    physical_time_from_conformal(crate::lifespan::t_plus(p, cfg))
}

/// Samples the field at time `t` on a sorted grid of radii.
pub fn sample_field<T: Real>(p: PhasePoint<T>, t: T, rs: &[T], cfg: &FieldConfig<T>) -> Result<RadialField<T>> {
    if rs.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Parameter("radial grid must be sorted".into()));
    }
    Ok(Field::new(p, cfg)?.sample(t, rs))
}
