use thiserror::Error;

use crate::quadrature::QuadratureError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{quantity} = {value:e} is out of range: {requirement}")]
    Domain {
        quantity: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("reflection coefficient denominator vanishes at ω = {omega:e} rad/s, k⊥ = {k_perp:e} 1/m")]
    Pole { omega: f64, k_perp: f64 },

    #[error(transparent)]
    Quadrature(#[from] QuadratureError),

    #[error("spectral density changes sign at x = {x:e} (density {density:e})")]
    SignChange { x: f64, density: f64 },

    #[error("unknown material preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid value for `{field}`: {message}")]
    Config { field: String, message: String },
}

impl Error {
    pub(crate) fn domain(quantity: &'static str, value: f64, requirement: &'static str) -> Self {
        Error::Domain {
            quantity,
            value,
            requirement,
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
