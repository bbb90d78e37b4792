//! The Duffing equation `Ü + U = U³`: energy, adaptive integration with
//! blow-up detection, dense evaluation, closed-form families and the
//! near-blow-up asymptote.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{attainable, Real};

/// Initial data `(U(0), U̇(0)) = (X, Y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> PhasePoint<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    /// `(X, −Y)`: the data of the time-reversed solution.
    pub fn time_reversed(self) -> Self {
        Self::new(self.x, -self.y)
    }

    /// `(−X, −Y)`: the data of `−U`.
    pub fn negated(self) -> Self {
        Self::new(-self.x, -self.y)
    }

    pub fn energy(self) -> T {
        energy_of(self.x, self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// `U²/2 − U⁴/4`.
#[inline]
pub fn potential<T: Real>(u: T) -> T {
    let u2 = u * u;
    u2 * T::lit(0.5) - u2 * u2 * T::lit(0.25)
}

/// Energy of a state, `U̇²/2 + U²/2 − U⁴/4`.
#[inline]
pub fn energy_of<T: Real>(u: T, udot: T) -> T {
    udot * udot * T::lit(0.5) + potential(u)
}

/// `E(X, Y) = Y²/2 + X²/2 − X⁴/4`.
pub fn energy<T: Real>(p: PhasePoint<T>) -> T {
    p.energy()
}

/// Scale used to turn an energy difference into a relative drift.
#[inline]
fn energy_scale<T: Real>(u: T, udot: T) -> T {
    let u2 = u * u;
    T::one() + T::lit(0.5) * (udot * udot + u2) + T::lit(0.25) * u2 * u2
}

/// Tolerances for the ODE layer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeConfig<T> {
    /// Relative (and absolute) local error target of the integrator.
    pub ode_tol: T,
    /// Admissible relative energy drift along returned states.
    pub energy_tol: T,
    /// `|U|` beyond which integration stops and the blow-up time is refined.
    pub blowup_cutoff: T,
    pub max_steps: usize,
}

impl<T: Real> Default for OdeConfig<T> {
    fn default() -> Self {
        Self {
            ode_tol: attainable(1e-10),
            energy_tol: attainable(1e-8),
            blowup_cutoff: T::lit(1e8),
            max_steps: 2_000_000,
        }
    }
}

impl<T: Real> OdeConfig<T> {
    /// Multiplies the tolerances by `factor`.
    pub fn scaled(mut self, factor: T) -> Self {
        self.ode_tol = (self.ode_tol * factor).max(T::tol_floor());
        self.energy_tol = (self.energy_tol * factor).max(T::tol_floor());
        self
    }
}

/// Direction of divergence of `U` at a blow-up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn of<T: Real>(x: T) -> Self {
        if x < T::zero() {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn value<T: Real>(self) -> T {
        match self {
            Sign::Plus => T::one(),
            Sign::Minus => -T::one(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeState<T> {
    pub s: T,
    pub u: T,
    pub udot: T,
}

impl<T: Real> OdeState<T> {
    pub fn energy(&self) -> T {
        energy_of(self.u, self.udot)
    }
}

/// Output of [`integrate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OdeTrajectory<T> {
    pub origin: PhasePoint<T>,
    /// Accepted steps, starting with the initial state.
    pub states: Vec<OdeState<T>>,
    pub truncated_at_blowup: bool,
    pub blowup_side: Option<Sign>,
    /// Blow-up time refined with the tail integral, when truncated.
    pub blowup_time: Option<T>,
}

impl<T: Real> OdeTrajectory<T> {
    pub fn last(&self) -> &OdeState<T> {
        self.states.last().expect("trajectory holds the initial state")
    }

    /// Largest relative energy drift over the stored states.
    pub fn max_energy_drift(&self) -> T {
        let e0 = self.origin.energy();
        self.states
            .iter()
            .map(|st| (st.energy() - e0).abs() / energy_scale(st.u, st.udot))
            .fold(T::zero(), T::max)
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn rhs<T: Real>(y: [T; 2]) -> [T; 2] {
    [y[1], y[0] * y[0] * y[0] - y[0]]
}

#[inline]
fn axpy<T: Real>(y: [T; 2], h: T, terms: &[(f64, [T; 2])]) -> [T; 2] {
    let mut out = y;
    for (c, k) in terms {
        let c = T::lit(*c) * h;
        out[0] += c * k[0];
        out[1] += c * k[1];
    }
    out
}

/// Why an internal integration run stopped.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Stop {
    Reached,
    Cutoff,
    Switch,
}

/// Dormand–Prince 5(4) run from `s = 0` toward `s_end`.
///
/// Stops at `|U| ≥ cutoff`, or, when `switch` is given, at the first state
/// with `|U| ≥ switch` moving outward (after which blow-up is certain).
fn run<T: Real>(
    p: PhasePoint<T>,
    s_end: T,
    cfg: &OdeConfig<T>,
    switch: Option<T>,
) -> Result<(Vec<OdeState<T>>, Stop)> {
    let dir = if s_end < T::zero() { -T::one() } else { T::one() };
    let e0 = p.energy();
    let mut s = T::zero();
    let mut y = [p.x, p.y];
    let mut states = vec![OdeState { s, u: y[0], udot: y[1] }];
    let outward = |y: [T; 2]| y[0] * y[1] * dir > T::zero();
    if let Some(sw) = switch {
        if y[0].abs() >= sw && outward(y) {
            return Ok((states, Stop::Switch));
        }
    }
    if y[0].abs() >= cfg.blowup_cutoff {
        return Ok((states, Stop::Cutoff));
    }
    if s_end == T::zero() {
        return Ok((states, Stop::Reached));
    }

    let rtol = cfg.ode_tol;
    let atol = cfg.ode_tol;
    let span = s_end.abs();
    let mut h = dir * T::lit(1e-2).min(span);
    let mut k1 = rhs(y);
    let mut last_rejected = false;
    let two = T::lit(2.0);

    for _ in 0..cfg.max_steps {
        let remaining = (s_end - s) * dir;
        if remaining <= T::zero() {
            return Ok((states, Stop::Reached));
        }
        let mut last = false;
        if h.abs() >= remaining {
            h = dir * remaining;
            last = true;
        }
        let min_step = T::lit(16.0) * T::epsilon() * s.abs().max(T::one());
        if h.abs() < min_step {
            return Err(Error::StepUnderflow { s: s.as_f64() });
        }

        let k2 = rhs(axpy(y, h, &[(A21, k1)]));
        let k3 = rhs(axpy(y, h, &[(A31, k1), (A32, k2)]));
        let k4 = rhs(axpy(y, h, &[(A41, k1), (A42, k2), (A43, k3)]));
        let k5 = rhs(axpy(y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]));
        let k6 = rhs(axpy(y, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]));
        let y_new = axpy(y, h, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
        let k7 = rhs(y_new);

        let mut err = T::zero();
        for i in 0..2 {
            let e = h
                * (T::lit(E1) * k1[i]
                    + T::lit(E3) * k3[i]
                    + T::lit(E4) * k4[i]
                    + T::lit(E5) * k5[i]
                    + T::lit(E6) * k6[i]
                    + T::lit(E7) * k7[i]);
            let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc) * (e / sc);
        }
        let err = (err / two).sqrt();

        if err.is_finite() && err <= T::one() {
            let _ = (C2, C3, C4, C5);
            s = if last { s_end } else { s + h };
            y = y_new;
            k1 = k7;
            let drift = (energy_of(y[0], y[1]) - e0).abs() / energy_scale(y[0], y[1]);
            if drift > cfg.energy_tol {
                return Err(Error::EnergyDrift {
                    s: s.as_f64(),
                    drift: drift.as_f64(),
                    tol: cfg.energy_tol.as_f64(),
                });
            }
            states.push(OdeState { s, u: y[0], udot: y[1] });
            if let Some(sw) = switch {
                if y[0].abs() >= sw && outward(y) {
                    return Ok((states, Stop::Switch));
                }
            }
            if y[0].abs() >= cfg.blowup_cutoff {
                return Ok((states, Stop::Cutoff));
            }
            if last {
                return Ok((states, Stop::Reached));
            }
            let mut fac = if err == T::zero() {
                T::lit(10.0)
            } else {
                T::lit(0.9) * err.powf(T::lit(-0.2))
            };
            fac = fac.min(T::lit(10.0)).max(T::lit(0.2));
            if last_rejected {
                fac = fac.min(T::one());
            }
            h *= fac;
            last_rejected = false;
        } else {
            let fac = if err.is_finite() {
                (T::lit(0.9) * err.powf(T::lit(-0.2))).max(T::lit(0.1))
            } else {
                T::lit(0.1)
            };
            h *= fac.min(T::lit(0.9));
            last_rejected = true;
        }
    }
    Err(Error::Accuracy(format!(
        "step budget of {} exhausted at s = {}",
        cfg.max_steps,
        s.as_f64()
    )))
}

/// Integrates the Duffing equation from `s = 0` toward `s_end`.
///
/// Integration stops early when `|U|` exceeds `cfg.blowup_cutoff`; the
/// blow-up time is then refined with the tail integral
/// `∫_{|U|}^∞ dv / √(2E − v² + v⁴/2)`.
pub fn integrate<T: Real>(p: PhasePoint<T>, s_end: T, cfg: &OdeConfig<T>) -> Result<OdeTrajectory<T>> {
    if !p.is_finite() || !s_end.is_finite() {
        return Err(Error::Parameter("phase point and s_end must be finite".into()));
    }
    let (states, stop) = run(p, s_end, cfg, None)?;
    let mut traj = OdeTrajectory {
        origin: p,
        states,
        truncated_at_blowup: false,
        blowup_side: None,
        blowup_time: None,
    };
    if stop == Stop::Cutoff {
        let last = *traj.last();
        let dir = if s_end < T::zero() { -T::one() } else { T::one() };
        let tail = TailSeries::new(p.energy());
        traj.truncated_at_blowup = true;
        traj.blowup_side = Some(Sign::of(last.u));
        traj.blowup_time = Some(last.s + dir * tail.time(T::one() / last.u.abs()));
    }
    Ok(traj)
}

/// The escape-time function `G(w) = ∫₀^w dω / √(½ − ω² + 2Eω⁴)`, which
/// equals `∫_{1/w}^∞ dv / √(2E − v² + v⁴/2)`, as a power series in `w²`.
#[derive(Clone, Debug)]
pub struct TailSeries<T> {
    energy: T,
    coeffs: Vec<T>,
    /// Largest `w` for which the series is used.
    w_max: T,
}

impl<T: Real> TailSeries<T> {
    pub fn new(energy: T) -> Self {
        // convergence radius in z = w² is 1/max|v²| over the roots of the quartic
        let quarter = T::lit(0.25);
        let rho = if energy <= quarter {
            T::one() / (T::one() + (T::one() - T::lit(4.0) * energy).sqrt())
        } else {
            T::one() / (T::lit(2.0) * energy.sqrt())
        };
        let w_max = (rho / T::lit(16.0)).sqrt().min(T::lit(1.0 / 16.0));
        // (1 − 2z + 4Ez²)^{-1/2} = Σ b_n zⁿ
        let a1 = -T::lit(2.0);
        let a2 = T::lit(4.0) * energy;
        let mut b = vec![T::one(), T::one()];
        let z_max = w_max * w_max;
        let mut zn = z_max;
        for n in 1..200 {
            let nf = T::from_usize_lossy(n);
            let next = -((T::lit(2.0) * nf + T::one()) * a1 * b[n] + T::lit(2.0) * nf * a2 * b[n - 1])
                / (T::lit(2.0) * (nf + T::one()));
            b.push(next);
            zn *= z_max;
            if (next * zn).abs() < T::epsilon() * T::lit(1e-3) && n > 4 {
                break;
            }
        }
        Self { energy, coeffs: b, w_max }
    }

    pub fn w_max(&self) -> T {
        self.w_max
    }

    /// `|U|` above which [`TailSeries::time`] is exact to rounding.
    pub fn u_switch(&self) -> T {
        T::one() / self.w_max
    }

    fn integrand(&self, w: T) -> T {
        let w2 = w * w;
        T::one() / (T::lit(0.5) - w2 + T::lit(2.0) * self.energy * w2 * w2).sqrt()
    }

    /// `G(w)`; for `w > w_max` falls back to adaptive quadrature.
    pub fn time(&self, w: T) -> T {
        if w <= self.w_max {
            let z = w * w;
            let mut acc = T::zero();
            let mut zn = T::one();
            for (n, b) in self.coeffs.iter().enumerate() {
                acc += *b * zn / T::from_usize_lossy(2 * n + 1);
                zn *= z;
            }
            T::SQRT_2() * w * acc
        } else {
            let head = self.time(self.w_max);
            let r = crate::quad::adaptive(
                |x| self.integrand(x),
                &[self.w_max, w],
                T::tol_floor(),
                T::zero(),
                4000,
            );
            head + r.value
        }
    }

    /// Solves `G(w) = tau` for `w ∈ (0, w_max]`.
    pub fn invert(&self, tau: T) -> T {
        let mut w = tau / T::SQRT_2();
        for _ in 0..50 {
            let f = self.time(w) - tau;
            let step = f / self.integrand(w);
            w = (w - step).max(w * T::lit(0.5));
            if step.abs() <= T::lit(4.0) * T::epsilon() * w {
                break;
            }
        }
        w
    }
}

#[derive(Clone, Debug)]
struct TailBranch<T> {
    /// Blow-up time `T±`.
    anchor: T,
    /// Time at which the branch takes over from the stored states.
    start: T,
    /// Sign of `U` on the branch.
    sign: T,
    /// `+1` for the forward end, `−1` for the backward end.
    dir: T,
}

/// Dense evaluation of `U` on an interval of its lifespan.
///
/// Between accepted steps the state is reconstructed by quintic Hermite
/// interpolation using `U, U̇, Ü = U³ − U` (and one more derivative for
/// `U̇`). On the final escape to infinity the solution is instead obtained
/// by inverting the tail integral, anchored at the blow-up time.
#[derive(Clone, Debug)]
pub struct DenseSolution<T> {
    origin: PhasePoint<T>,
    nodes: Vec<OdeState<T>>,
    tail: TailSeries<T>,
    upper: Option<TailBranch<T>>,
    lower: Option<TailBranch<T>>,
}

impl<T: Real> DenseSolution<T> {
    /// Solves on `[s_lo, s_hi] ∋ 0`, with blow-up times detected by the ODE.
    pub fn new(p: PhasePoint<T>, s_lo: T, s_hi: T, cfg: &OdeConfig<T>) -> Result<Self> {
        Self::with_anchors(p, s_lo, s_hi, None, None, cfg)
    }

    /// As [`DenseSolution::new`], but uses externally computed blow-up
    /// times (typically from the lifespan quadratures) as tail anchors.
    pub fn with_anchors(
        p: PhasePoint<T>,
        s_lo: T,
        s_hi: T,
        t_minus: Option<T>,
        t_plus: Option<T>,
        cfg: &OdeConfig<T>,
    ) -> Result<Self> {
        if !p.is_finite() || !(s_lo <= T::zero() && s_hi >= T::zero()) || !s_lo.is_finite() || !s_hi.is_finite() {
            return Err(Error::Parameter("need finite s_lo ≤ 0 ≤ s_hi".into()));
        }
        let tail = TailSeries::new(p.energy());
        let switch = tail.u_switch();
        let (fwd, fstop) = run(p, s_hi, cfg, Some(switch))?;
        let (bwd, bstop) = run(p, s_lo, cfg, Some(switch))?;

        let branch = |states: &Vec<OdeState<T>>, stop: Stop, dir: T, anchor: Option<T>| -> Option<TailBranch<T>> {
            if stop == Stop::Reached {
                return None;
            }
            let last = *states.last().unwrap();
            let own = last.s + dir * tail.time(T::one() / last.u.abs());
            let anchor = match anchor {
                Some(a) if a.is_finite() => a,
                _ => own,
            };
            Some(TailBranch { anchor, start: last.s, sign: last.u.signum(), dir })
        };
        let upper = branch(&fwd, fstop, T::one(), t_plus);
        let lower = branch(&bwd, bstop, -T::one(), t_minus);

        let mut nodes: Vec<OdeState<T>> = bwd.into_iter().skip(1).rev().collect();
        nodes.extend(fwd);
        Ok(Self { origin: p, nodes, tail, upper, lower })
    }

    pub fn origin(&self) -> PhasePoint<T> {
        self.origin
    }

    /// Forward blow-up time if it lies within reach of the solve.
    pub fn t_plus(&self) -> Option<T> {
        self.upper.as_ref().map(|b| b.anchor)
    }

    pub fn t_minus(&self) -> Option<T> {
        self.lower.as_ref().map(|b| b.anchor)
    }

    /// The interval on which [`DenseSolution::eval`] succeeds.
    pub fn range(&self) -> (T, T) {
        let lo = self.lower.as_ref().map_or(self.nodes[0].s, |b| b.anchor);
        let hi = self.upper.as_ref().map_or(self.nodes.last().unwrap().s, |b| b.anchor);
        (lo, hi)
    }

    pub fn nodes(&self) -> &[OdeState<T>] {
        &self.nodes
    }

    fn eval_tail(&self, b: &TailBranch<T>, s: T) -> OdeState<T> {
        self.tail_state(b, s, (b.anchor - s) * b.dir)
    }

    fn tail_state(&self, b: &TailBranch<T>, s: T, tau: T) -> OdeState<T> {
        let w = self.tail.invert(tau);
        let u = b.sign / w;
        let w2 = w * w;
        let root = (T::lit(0.5) - w2 + T::lit(2.0) * self.tail.energy * w2 * w2).sqrt();
        OdeState { s, u, udot: b.sign * b.dir * root / w2 }
    }

    /// `(U(s), U̇(s))`.
    pub fn eval(&self, s: T) -> Result<OdeState<T>> {
        let (lo, hi) = self.range();
        if !(s > lo && s < hi) && !(s == lo && self.lower.is_none()) && !(s == hi && self.upper.is_none()) {
            let t_minus = self.lower.as_ref().map_or(T::neg_infinity(), |b| b.anchor);
            let t_plus = self.upper.as_ref().map_or(T::infinity(), |b| b.anchor);
            if s > t_minus && s < t_plus {
                return Err(Error::Range {
                    what: "dense solution interval".into(),
                    requested: s.as_f64(),
                    available: if s > hi { hi.as_f64() } else { lo.as_f64() },
                });
            }
            return Err(Error::OutsideLifespan {
                s: s.as_f64(),
                t_minus: t_minus.as_f64(),
                t_plus: t_plus.as_f64(),
            });
        }
        if let Some(b) = &self.upper {
            if s >= b.start {
                return Ok(self.eval_tail(b, s));
            }
        }
        if let Some(b) = &self.lower {
            if s <= b.start {
                return Ok(self.eval_tail(b, s));
            }
        }
        Ok(self.hermite(s))
    }

    /// `(U, U̇)` at `s = base + offset`, keeping the precision of a small
    /// `offset` when the point lies on a tail branch anchored near `base`.
    pub fn eval_offset(&self, base: T, offset: T) -> Result<OdeState<T>> {
        let s = base + offset;
        for b in [&self.upper, &self.lower].into_iter().flatten() {
            let inside = if b.dir > T::zero() { s >= b.start } else { s <= b.start };
            if inside && s != b.anchor && (b.anchor - s) * b.dir > T::zero() {
                let tau = ((b.anchor - base) - offset) * b.dir;
                if tau > T::zero() {
                    return Ok(self.tail_state(b, s, tau));
                }
            }
        }
        self.eval(s)
    }

    fn hermite(&self, s: T) -> OdeState<T> {
        let n = self.nodes.len();
        if n == 1 {
            return self.nodes[0];
        }
        let idx = self.nodes.partition_point(|st| st.s <= s);
        let i = idx.clamp(1, n - 1) - 1;
        let a = self.nodes[i];
        let b = self.nodes[i + 1];
        let h = b.s - a.s;
        let t = (s - a.s) / h;
        let acc = |u: T| u * u * u - u;
        let jerk = |u: T, ud: T| (T::lit(3.0) * u * u - T::one()) * ud;
        let u = quintic(t, h, [a.u, a.udot, acc(a.u)], [b.u, b.udot, acc(b.u)]);
        let ud = quintic(
            t,
            h,
            [a.udot, acc(a.u), jerk(a.u, a.udot)],
            [b.udot, acc(b.u), jerk(b.u, b.udot)],
        );
        OdeState { s, u, udot: ud }
    }
}

/// Quintic Hermite interpolant from value, first and second derivative at
/// both ends of a step of length `h`, evaluated at fraction `t`.
#[inline]
fn quintic<T: Real>(t: T, h: T, y0: [T; 3], y1: [T; 3]) -> T {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t3 * t;
    let t5 = t4 * t;
    let c = |x: f64| T::lit(x);
    let h00 = T::one() - c(10.0) * t3 + c(15.0) * t4 - c(6.0) * t5;
    let h10 = t - c(6.0) * t3 + c(8.0) * t4 - c(3.0) * t5;
    let h20 = c(0.5) * t2 - c(1.5) * t3 + c(1.5) * t4 - c(0.5) * t5;
    let h01 = c(10.0) * t3 - c(15.0) * t4 + c(6.0) * t5;
    let h11 = -c(4.0) * t3 + c(7.0) * t4 - c(3.0) * t5;
    let h21 = c(0.5) * t3 - t4 + c(0.5) * t5;
    y0[0] * h00 + h * y0[1] * h10 + h * h * y0[2] * h20 + y1[0] * h01 + h * y1[1] * h11 + h * h * y1[2] * h21
}

/// `(U(s), U̇(s))` by dense integration from the initial data.
pub fn state_at<T: Real>(p: PhasePoint<T>, s: T, cfg: &OdeConfig<T>) -> Result<OdeState<T>> {
    if !s.is_finite() {
        return Err(Error::Parameter("s must be finite".into()));
    }
    let sol = DenseSolution::new(p, s.min(T::zero()), s.max(T::zero()), cfg)?;
    sol.eval(s)
}

/// Near-blow-up approximation `(±√2/(T₊ − s), ±√2/(T₊ − s)²)`.
pub fn blowup_asymptote<T: Real>(t_plus: T, s: T, sign: Sign) -> (T, T) {
    let gap = t_plus - s;
    let sg = sign.value::<T>();
    (sg * T::SQRT_2() / gap, sg * T::SQRT_2() / (gap * gap))
}

/// Complete elliptic integral of the first kind `K(m)` via the AGM.
pub fn elliptic_k<T: Real>(m: T) -> Result<T> {
    if !(m >= T::zero() && m < T::one()) {
        return Err(Error::Parameter(format!("parameter m = {} outside [0, 1)", m.as_f64())));
    }
    let mut a = T::one();
    let mut b = (T::one() - m).sqrt();
    for _ in 0..64 {
        let an = T::lit(0.5) * (a + b);
        b = (a * b).sqrt();
        a = an;
        if (a - b).abs() <= T::epsilon() * a {
            break;
        }
    }
    Ok(T::FRAC_PI_2() / a)
}

/// Jacobi amplitude-based triple `(sn, cn, dn)` by descending Landen
/// (AGM) iteration.
pub fn jacobi_sn_cn_dn<T: Real>(u: T, m: T) -> Result<(T, T, T)> {
    if !(m >= T::zero() && m < T::one()) {
        return Err(Error::Parameter(format!("parameter m = {} outside [0, 1)", m.as_f64())));
    }
    if m == T::zero() {
        return Ok((u.sin(), u.cos(), T::one()));
    }
    let mut a = vec![T::one()];
    let mut c = vec![m.sqrt()];
    let mut b = (T::one() - m).sqrt();
    for _ in 0..64 {
        let an = *a.last().unwrap();
        let cn = T::lit(0.5) * (an - b);
        let next = T::lit(0.5) * (an + b);
        b = (an * b).sqrt();
        a.push(next);
        c.push(cn);
        if cn.abs() <= T::epsilon() * next {
            break;
        }
    }
    let n = a.len() - 1;
    let mut phi = T::lit(2.0).powi(n as i32) * a[n] * u;
    for k in (1..=n).rev() {
        phi = T::lit(0.5) * (phi + (c[k] / a[k] * phi.sin()).asin());
    }
    let sn = phi.sin();
    let cn = phi.cos();
    let dn = (T::one() - m * sn * sn).sqrt();
    Ok((sn, cn, dn))
}

/// Jacobi elliptic sine `sn(u | m)`, `m ∈ [0, 1)`.
pub fn jacobi_sn<T: Real>(u: T, m: T) -> Result<T> {
    jacobi_sn_cn_dn(u, m).map(|t| t.0)
}

/// Closed-form solution families of the Duffing equation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExplicitFamily<T> {
    /// `E = 1/4` separatrix data `Y = σ(1 − X²)/√2`, `|X| ≠ 1`.
    EQuarter { x: T, sigma: Sign },
    /// `E = 0` data `(X, √(X⁴/2 − X²))`, `|X| ≥ √2`.
    EZero { x: T },
    /// `A·sn(ωs + θ | A²/(2 − A²))` with `ω² = 1 − A²/2`, `0 < |A| < √2`, `|A| ≠ 1`.
    EllipticSn { amplitude: T, theta: T },
    /// `U ≡ c` with `c ∈ {−1, 0, 1}`.
    Constant { value: T },
}

impl<T: Real> ExplicitFamily<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Parameter(msg));
        match *self {
            ExplicitFamily::EQuarter { x, .. } => {
                if !x.is_finite() || x.abs() == T::one() {
                    return bad(format!("EQuarter needs |X| != 1, got {}", x.as_f64()));
                }
            }
            ExplicitFamily::EZero { x } => {
                if !(x.abs() >= T::SQRT_2()) || !x.is_finite() {
                    return bad(format!("EZero needs |X| >= sqrt 2, got {}", x.as_f64()));
                }
            }
            ExplicitFamily::EllipticSn { amplitude, theta } => {
                let a = amplitude.abs();
                if !(a > T::zero() && a < T::SQRT_2()) || a == T::one() || !theta.is_finite() {
                    return bad(format!(
                        "EllipticSn needs 0 < |A| < sqrt 2, |A| != 1, got {}",
                        amplitude.as_f64()
                    ));
                }
            }
            ExplicitFamily::Constant { value } => {
                if !(value == T::zero() || value.abs() == T::one()) {
                    return bad(format!("constant solutions are 0, ±1, got {}", value.as_f64()));
                }
            }
        }
        Ok(())
    }

    /// Initial data `(U(0), U̇(0))`.
    pub fn phase_point(&self) -> Result<PhasePoint<T>> {
        let st = self.state(T::zero())?;
        Ok(PhasePoint::new(st.u, st.udot))
    }

    /// Blow-up time in the forward direction, `+∞` if none.
    pub fn forward_blowup(&self) -> T {
        match *self {
            ExplicitFamily::EQuarter { x, sigma } => {
                if x.abs() > T::one() {
                    // coth(artanh(1/X) + σ s/√2) is singular where the argument vanishes
                    let s = -sigma.value::<T>() * T::SQRT_2() * (T::one() / x).atanh();
                    if s > T::zero() {
                        return s;
                    }
                }
                T::infinity()
            }
            ExplicitFamily::EZero { x } => {
                let theta = (T::SQRT_2() / x).asin();
                if theta > T::zero() {
                    theta
                } else {
                    theta + T::PI()
                }
            }
            _ => T::infinity(),
        }
    }

    /// `(U(s), U̇(s))` from the closed form.
    pub fn state(&self, s: T) -> Result<OdeState<T>> {
        self.validate()?;
        let r2 = T::SQRT_2();
        let (u, udot) = match *self {
            ExplicitFamily::EQuarter { x, sigma } => {
                let sg = sigma.value::<T>();
                let u = if x.abs() < T::one() {
                    (sg * s / r2 + x.atanh()).tanh()
                } else {
                    T::one() / ((T::one() / x).atanh() + sg * s / r2).tanh()
                };
                (u, sg * (T::one() - u * u) / r2)
            }
            ExplicitFamily::EZero { x } => {
                let arg = (r2 / x).asin() - s;
                let sn = arg.sin();
                (r2 / sn, r2 * arg.cos() / (sn * sn))
            }
            ExplicitFamily::EllipticSn { amplitude, theta } => {
                let a2 = amplitude * amplitude;
                let omega = (T::one() - a2 / T::lit(2.0)).sqrt();
                let m = a2 / (T::lit(2.0) - a2);
                let arg = omega * s + theta;
                let (sn, cn, dn) = if m < T::one() {
                    jacobi_sn_cn_dn(arg, m)?
                } else {
                    // reciprocal-modulus transformation
                    let k = m.sqrt();
                    let (sn, cn, dn) = jacobi_sn_cn_dn(k * arg, T::one() / m)?;
                    (sn / k, dn, cn)
                };
                (amplitude * sn, amplitude * omega * cn * dn)
            }
            ExplicitFamily::Constant { value } => (value, T::zero()),
        };
        Ok(OdeState { s, u, udot })
    }

    /// `U(s)`.
    pub fn value(&self, s: T) -> Result<T> {
        self.state(s).map(|st| st.u)
    }
}

/// `U(s)` for the chosen closed-form family.
pub fn explicit_solution<T: Real>(family: ExplicitFamily<T>, s: T) -> Result<T> {
    family.value(s)
}
