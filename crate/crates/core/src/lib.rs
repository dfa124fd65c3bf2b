//! Thermal correction to the Casimir pressure between parallel metallic
//! half-spaces.
//!
//! The crate evaluates the real-frequency Lifshitz representation of the
//! thermal pressure, split into the four polarization × sector channels
//! (TE/TM, propagating/evanescent), cross-checks it against the
//! imaginary-frequency Matsubara formula, and extracts the wave-vector and
//! frequency spectra of the dominant TE-evanescent contribution. The
//! [`spectra`] module turns those spectra into wavelength bounds and the
//! sphere–plate applicability report.
//!
//! ```no_run
//! use casimir_spectra::{lifshitz, Gap, Material, NestedSpec};
//!
//! let gold = Material::preset("Au-paper").unwrap();
//! let gap = Gap::new(162e-9, 300.0).unwrap();
//! let breakdown = lifshitz::thermal_pressure_total(&gap, &gold, &NestedSpec::default()).unwrap();
//! println!("{:.4e} Pa", breakdown.total.value);
//! ```

pub mod cli;
pub mod constants;
mod error;
pub mod kernel;
pub mod kv;
pub mod lifshitz;
pub mod materials;
pub mod matsubara;
pub mod quadrature;
pub mod spectra;
pub mod units;

pub use error::{Error, Result};
pub use kernel::{Polarization, Sector, WavePoint};
pub use lifshitz::{Channel, Estimate, Gap, PressureBreakdown};
pub use materials::{DielectricModel, Material};
pub use quadrature::{NestedSpec, QuadratureResult, QuadratureSpec};
