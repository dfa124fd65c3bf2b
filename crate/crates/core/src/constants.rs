//! CODATA 2018 constants. Every physics module reads these values; nothing
//! else in the crate hard-codes c, ħ, k_B or e.

use serde::Serialize;

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Elementary charge, C (exact).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    pub c: f64,
    pub hbar: f64,
    pub k_b: f64,
    pub e: f64,
}

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    c: SPEED_OF_LIGHT,
    hbar: HBAR,
    k_b: BOLTZMANN,
    e: ELEMENTARY_CHARGE,
};

/// Thermal frequency k_B T / ħ in rad/s.
pub fn thermal_frequency(temperature: f64) -> f64 {
    BOLTZMANN * temperature / HBAR
}
