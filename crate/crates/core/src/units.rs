//! Parsing of physical quantities with unit suffixes (`162nm`, `300 K`,
//! `9eV`, `5.32e13 rad/s`). Everything converts to SI (or eV for plasma
//! energies) at this boundary; a bare number is taken to be in the base unit.

use crate::{Error, Result};

fn split_number(text: &str) -> (&str, &str) {
    let text = text.trim();
    // The numeric prefix ends at the first character that cannot continue a
    // float literal. An exponent marker only counts when a digit or sign follows.
    let bytes = text.as_bytes();
    let mut end = 0;
    while end < bytes.len() {
        let b = bytes[end];
        let continues = match b {
            b'0'..=b'9' | b'.' => true,
            b'+' | b'-' => end == 0 || matches!(bytes[end - 1], b'e' | b'E'),
            b'e' | b'E' => bytes
                .get(end + 1)
                .is_some_and(|n| n.is_ascii_digit() || *n == b'-' || *n == b'+'),
            _ => false,
        };
        if !continues {
            break;
        }
        end += 1;
    }
    (&text[..end], text[end..].trim())
}

fn parse_with_units(field: &str, text: &str, units: &[(&str, f64)]) -> Result<f64> {
    let (number, suffix) = split_number(text);
    let value: f64 = number
        .parse()
        .map_err(|_| Error::config(field, format!("`{text}` is not a number")))?;
    let scale = units
        .iter()
        .find(|(name, _)| *name == suffix)
        .map(|(_, scale)| *scale)
        .ok_or_else(|| {
            let known: Vec<_> = units.iter().map(|(n, _)| *n).filter(|n| !n.is_empty()).collect();
            Error::config(
                field,
                format!("unknown unit `{suffix}` in `{text}` (expected one of {})", known.join(", ")),
            )
        })?;
    // Dividing by an integral power of ten rounds once, so `162nm` is exactly 1.62e-7.
    let value = if scale < 1.0 { value / (1.0 / scale).round() } else { value * scale };
    if !value.is_finite() {
        return Err(Error::config(field, format!("`{text}` is not finite")));
    }
    Ok(value)
}

/// Length in metres.
pub fn parse_length(field: &str, text: &str) -> Result<f64> {
    parse_with_units(
        field,
        text,
        &[
            ("", 1.0),
            ("m", 1.0),
            ("mm", 1e-3),
            ("um", 1e-6),
            ("µm", 1e-6),
            ("nm", 1e-9),
            ("pm", 1e-12),
        ],
    )
}

/// Temperature in kelvin.
pub fn parse_temperature(field: &str, text: &str) -> Result<f64> {
    parse_with_units(field, text, &[("", 1.0), ("K", 1.0)])
}

/// Photon energy in electronvolts.
pub fn parse_energy_ev(field: &str, text: &str) -> Result<f64> {
    parse_with_units(field, text, &[("", 1.0), ("eV", 1.0), ("meV", 1e-3)])
}

/// Angular frequency in rad/s.
pub fn parse_angular_frequency(field: &str, text: &str) -> Result<f64> {
    parse_with_units(field, text, &[("", 1.0), ("rad/s", 1.0)])
}

/// Parses a plain dimensionless number.
pub fn parse_number(field: &str, text: &str) -> Result<f64> {
    parse_with_units(field, text, &[("", 1.0)])
}
