use thiserror::Error;

/// Errors reported by the library. Numeric payloads are carried as `f64`
/// regardless of the scalar type used for the computation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("s = {s} lies outside the lifespan ({t_minus}, {t_plus})")]
    OutsideLifespan { s: f64, t_minus: f64, t_plus: f64 },

    #[error("(t, r) = ({t}, {r}) lies outside the influence domain {lower} < t < {upper}")]
    OutsideDomain { t: f64, r: f64, lower: f64, upper: f64 },

    #[error("step size underflow at s = {s}")]
    StepUnderflow { s: f64 },

    #[error("energy drift {drift:e} exceeds tolerance {tol:e} at s = {s}")]
    EnergyDrift { s: f64, drift: f64, tol: f64 },

    #[error("no sign change found while bracketing {what} (searched up to {limit})")]
    Bracket { what: String, limit: f64 },

    #[error("{what}: requested {requested} but only {available} is available")]
    Range { what: String, requested: f64, available: f64 },

    #[error("accuracy not reached: {0}")]
    Accuracy(String),

    #[error("point ({x}, {y}) is {found}, expected {expected}")]
    Classification { x: f64, y: f64, found: String, expected: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
