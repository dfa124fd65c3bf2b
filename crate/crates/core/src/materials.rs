//! Dielectric response of the half-spaces.
//!
//! Only the two analytic free-electron models are supported: the lossy Drude
//! model ε(ω) = 1 − ω_p²/(ω(ω + iν)) and its lossless plasma limit. A
//! `Vacuum` model (ε ≡ 1) is kept for the no-interface checks.

use num_complex::Complex64;
use serde::Serialize;

use crate::constants::{ELEMENTARY_CHARGE, HBAR};
use crate::kv::KeyValues;
use crate::units;
use crate::{Error, Result};

const BUILTIN_PRESETS: &str = include_str!("../data/presets.conf");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DielectricModel {
    Drude,
    Plasma,
    Vacuum,
}

impl std::str::FromStr for DielectricModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "drude" => Ok(Self::Drude),
            "plasma" => Ok(Self::Plasma),
            "vacuum" => Ok(Self::Vacuum),
            other => Err(Error::config(
                "model",
                format!("`{other}` is not one of drude, plasma, vacuum"),
            )),
        }
    }
}

impl std::fmt::Display for DielectricModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Drude => "drude",
            Self::Plasma => "plasma",
            Self::Vacuum => "vacuum",
        })
    }
}

/// A homogeneous, non-magnetic half-space material.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Material {
    pub model: DielectricModel,
    /// Plasma frequency ω_p, rad/s.
    pub plasma_frequency: f64,
    /// Relaxation parameter ν, rad/s. Always zero for the plasma and vacuum models.
    pub relaxation: f64,
}

impl Material {
    pub fn drude(plasma_frequency: f64, relaxation: f64) -> Result<Self> {
        check_plasma_frequency(plasma_frequency)?;
        if !(relaxation >= 0.0 && relaxation.is_finite()) {
            return Err(Error::domain("ν", relaxation, "finite and ≥ 0"));
        }
        Ok(Self {
            model: DielectricModel::Drude,
            plasma_frequency,
            relaxation,
        })
    }

    pub fn plasma(plasma_frequency: f64) -> Result<Self> {
        check_plasma_frequency(plasma_frequency)?;
        Ok(Self {
            model: DielectricModel::Plasma,
            plasma_frequency,
            relaxation: 0.0,
        })
    }

    pub fn vacuum() -> Self {
        Self {
            model: DielectricModel::Vacuum,
            plasma_frequency: 0.0,
            relaxation: 0.0,
        }
    }

    /// Builds a material from the plasma energy ħω_p in eV.
    pub fn from_plasma_energy(model: DielectricModel, plasma_energy_ev: f64, relaxation: f64) -> Result<Self> {
        match model {
            DielectricModel::Vacuum => Ok(Self::vacuum()),
            DielectricModel::Plasma => Self::plasma(ev_to_angular_frequency(plasma_energy_ev)?),
            DielectricModel::Drude => Self::drude(ev_to_angular_frequency(plasma_energy_ev)?, relaxation),
        }
    }

    /// Looks up one of the built-in presets (`Au-paper`, `Au-low-loss`, `Au-plasma`).
    pub fn preset(name: &str) -> Result<Self> {
        Presets::builtin().get(name)
    }

    pub fn is_vacuum(&self) -> bool {
        self.model == DielectricModel::Vacuum
    }

    pub fn is_lossy(&self) -> bool {
        self.model == DielectricModel::Drude && self.relaxation > 0.0
    }

    /// χ(ω) = 1 − ε(ω), evaluated without forming ε.
    pub(crate) fn susceptibility_deficit(&self, omega: f64) -> Complex64 {
        match self.model {
            DielectricModel::Vacuum => Complex64::new(0.0, 0.0),
            DielectricModel::Plasma => Complex64::new(self.plasma_frequency.powi(2) / (omega * omega), 0.0),
            DielectricModel::Drude if self.relaxation == 0.0 => {
                Complex64::new(self.plasma_frequency.powi(2) / (omega * omega), 0.0)
            }
            DielectricModel::Drude => {
                self.plasma_frequency.powi(2) / (omega * Complex64::new(omega, self.relaxation))
            }
        }
    }

    /// Complex permittivity on the real frequency axis, ω > 0.
    pub fn permittivity(&self, omega: f64) -> Result<Complex64> {
        if !(omega > 0.0) {
            return Err(Error::domain("ω", omega, "> 0"));
        }
        Ok(1.0 - self.susceptibility_deficit(omega))
    }

    /// (ε(iξ) − 1)·ξ², which stays finite as ξ → 0: ω_p² for the plasma model,
    /// ω_p²ξ/(ξ + ν) → 0 for a lossy Drude metal.
    pub fn imag_axis_excess(&self, xi: f64) -> f64 {
        let wp2 = self.plasma_frequency.powi(2);
        match self.model {
            DielectricModel::Vacuum => 0.0,
            DielectricModel::Plasma => wp2,
            DielectricModel::Drude if self.relaxation == 0.0 => wp2,
            DielectricModel::Drude => wp2 * xi / (xi + self.relaxation),
        }
    }

    /// Permittivity at imaginary frequency iξ, ξ > 0. Real and > 1.
    pub fn permittivity_imag_axis(&self, xi: f64) -> Result<f64> {
        if !(xi > 0.0) {
            return Err(Error::domain("ξ", xi, "> 0"));
        }
        let wp2 = self.plasma_frequency.powi(2);
        Ok(match self.model {
            DielectricModel::Vacuum => 1.0,
            DielectricModel::Plasma => 1.0 + wp2 / (xi * xi),
            DielectricModel::Drude if self.relaxation == 0.0 => 1.0 + wp2 / (xi * xi),
            DielectricModel::Drude => 1.0 + wp2 / (xi * (xi + self.relaxation)),
        })
    }
}

fn check_plasma_frequency(plasma_frequency: f64) -> Result<()> {
    if plasma_frequency > 0.0 && plasma_frequency.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("ω_p", plasma_frequency, "finite and > 0"))
    }
}

/// ω = E·e/ħ for a photon energy E in eV.
pub fn ev_to_angular_frequency(energy_ev: f64) -> Result<f64> {
    if !(energy_ev > 0.0 && energy_ev.is_finite()) {
        return Err(Error::domain("energy", energy_ev, "finite and > 0 eV"));
    }
    Ok(energy_ev * ELEMENTARY_CHARGE / HBAR)
}

pub fn angular_frequency_to_ev(omega: f64) -> f64 {
    omega * HBAR / ELEMENTARY_CHARGE
}

/// Named materials parsed from a preset file.
#[derive(Debug, Clone)]
pub struct Presets {
    entries: Vec<PresetEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresetEntry {
    pub name: String,
    pub model: DielectricModel,
    pub plasma_energy_ev: f64,
    pub relaxation: f64,
}

impl PresetEntry {
    pub fn material(&self) -> Result<Material> {
        Material::from_plasma_energy(self.model, self.plasma_energy_ev, self.relaxation)
    }
}

impl Presets {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_PRESETS).expect("built-in preset file is valid")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let kv = KeyValues::parse(text)?;
        let mut names: Vec<&str> = Vec::new();
        for (key, _) in kv.iter() {
            let Some((name, _)) = key.rsplit_once('.') else {
                return Err(Error::config(key, "preset keys must look like `<name>.<field>`"));
            };
            if !names.contains(&name) {
                names.push(name);
            }
        }
        let mut entries = Vec::with_capacity(names.len());
        for name in names {
            let field = |f: &str| format!("{name}.{f}");
            for (key, _) in kv.iter().filter(|(k, _)| k.starts_with(&format!("{name}."))) {
                let suffix = &key[name.len() + 1..];
                if !matches!(suffix, "model" | "plasma_energy" | "relaxation") {
                    return Err(Error::config(key, "unknown preset field"));
                }
            }
            let model: DielectricModel = kv
                .get(&field("model"))
                .unwrap_or("drude")
                .parse()
                .map_err(|_| Error::config(field("model"), "expected drude, plasma or vacuum"))?;
            let plasma_energy_ev = match kv.get(&field("plasma_energy")) {
                Some(v) => units::parse_energy_ev(&field("plasma_energy"), v)?,
                None if model == DielectricModel::Vacuum => 0.0,
                None => return Err(Error::config(field("plasma_energy"), "missing")),
            };
            let relaxation = match kv.get(&field("relaxation")) {
                Some(v) => units::parse_angular_frequency(&field("relaxation"), v)?,
                None if model == DielectricModel::Drude => {
                    return Err(Error::config(field("relaxation"), "missing"))
                }
                None => 0.0,
            };
            let entry = PresetEntry {
                name: name.to_string(),
                model,
                plasma_energy_ev,
                relaxation,
            };
            entry.material()?;
            entries.push(entry);
        }
        Ok(Self { entries })
    }

    pub fn entry(&self, name: &str) -> Result<&PresetEntry> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::UnknownPreset(name.to_string()))
    }

    pub fn get(&self, name: &str) -> Result<Material> {
        self.entry(name)?.material()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.name.as_str())
    }
}
