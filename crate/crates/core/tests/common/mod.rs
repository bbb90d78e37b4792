//! Reference values from `tools/oracles.py` (mpmath, 30 digits), computed
//! from the defining integrals independently of this crate.
#![allow(dead_code, clippy::excessive_precision)]

pub const E_INFINITY: f64 = 2.685354344761871874;
pub const X_CRITICAL: f64 = 1.0462006887684694936;
pub const BETA_AT_0: f64 = 0.91221178867515552849;
pub const BETA_AT_HALF: f64 = 0.64253816948769666787;
pub const BETA_AT_2: f64 = -2.0875371938867005905;
pub const S_MINUS2_1: f64 = 1.2443211758093834244;
pub const TOTAL_LIFESPAN_E_MINUS_1_5: f64 = 2.1153509276677398153;
pub const BOUNDARY_TPLUS_1_2: f64 = 2.0858370630768282073;
pub const SN_0_8_HALF: f64 = 0.69093485086643876128;
pub const KAPPA_0: f64 = 2078.0606087253853277;
pub const KAPPA_1: f64 = 2625.8002693914980229;
pub const KAPPA_2: f64 = 3519.3502635096661634;
pub const KAPPA_3: f64 = 5257.7357089446400677;
pub const KAPPA_4: f64 = 10325.246405356397206;
