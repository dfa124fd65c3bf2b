//! Run configuration: merging of config files and command-line flags, and
//! resolution of the merged `key = value` set into typed values.
//!
//! Config files are either the flat `key = value` format or the JSON emitted
//! by `--format json` (its `config` object), so a JSON result can be fed back
//! to reproduce the run.

use std::path::{Path, PathBuf};

use crate::kv::KeyValues;
use crate::materials::{DielectricModel, Material, Presets};
use crate::matsubara::MatsubaraSpec;
use crate::quadrature::{NestedSpec, QuadratureSpec};
use crate::spectra::SpectrumVariable;
use crate::units::{parse_angular_frequency, parse_energy_ev, parse_length, parse_number, parse_temperature};
use crate::{Error, Result};

/// Keys a config file may contain.
pub const KNOWN_KEYS: &[&str] = &[
    "preset",
    "presets",
    "epsilon",
    "model",
    "plasma_energy",
    "relaxation",
    "gap",
    "gap_points",
    "temp",
    "radius",
    "format",
    "rel_tol",
    "outer_rel_tol",
    "max_subdivisions",
    "verify",
    "var",
    "fraction",
    "grid",
];

/// Keys that select the material; a material flag on the command line
/// replaces all of them from the config file.
pub const MATERIAL_KEYS: &[&str] = &["preset", "presets", "epsilon", "model", "plasma_energy", "relaxation"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Pretty,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            "pretty" => Ok(Self::Pretty),
            other => Err(Error::config("format", format!("unknown format `{other}` (expected csv, json or pretty)"))),
        }
    }
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
            Self::Pretty => "pretty",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MaterialChoice {
    Preset { name: String, file: Option<PathBuf> },
    Inline { model: DielectricModel, plasma_energy_ev: f64, relaxation: f64 },
    Vacuum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub material_choice: MaterialChoice,
    pub material: Material,
    /// Separations in m, ascending.
    pub gaps: Vec<f64>,
    pub temperature: f64,
    pub radius: Option<f64>,
    pub format: Format,
    pub quadrature: NestedSpec,
    pub matsubara: MatsubaraSpec,
    pub verify: bool,
    pub variable: SpectrumVariable,
    pub fraction: f64,
    pub grid: Option<usize>,
}

/// Reads a config file in either format.
pub fn read_config_file(path: &Path) -> Result<KeyValues> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
    let kv = if text.trim_start().starts_with('{') {
        from_json(&text)?
    } else {
        KeyValues::parse(&text)?
    };
    for (key, _) in kv.iter() {
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::config(key, "unknown configuration key"));
        }
    }
    Ok(kv)
}

fn from_json(text: &str) -> Result<KeyValues> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::config("config", format!("invalid JSON: {e}")))?;
    let object = value
        .get("config")
        .unwrap_or(&value)
        .as_object()
        .ok_or_else(|| Error::config("config", "expected a JSON object"))?;
    let mut kv = KeyValues::default();
    for (key, v) in object {
        let text = match v {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::Bool(b) => b.to_string(),
            _ => return Err(Error::config(key.as_str(), "expected a string, number or boolean")),
        };
        kv.insert(key.as_str(), text);
    }
    Ok(kv)
}

fn parse_usize(field: &str, text: &str) -> Result<usize> {
    text.trim()
        .parse()
        .map_err(|_| Error::config(field, format!("`{text}` is not a non-negative integer")))
}

fn parse_bool(field: &str, text: &str) -> Result<bool> {
    match text.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(Error::config(field, format!("`{other}` is not a boolean"))),
    }
}

fn positive_length(field: &str, text: &str) -> Result<f64> {
    let value = parse_length(field, text)?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(Error::config(field, format!("`{}` must be positive", text.trim())))
    }
}

/// `162nm`, `162nm,400nm` or `162nm..750nm` (with `points` values, inclusive).
pub fn parse_gaps(text: &str, points: usize) -> Result<Vec<f64>> {
    if let Some((a, b)) = text.split_once("..") {
        let lo = positive_length("gap", a)?;
        let hi = positive_length("gap", b)?;
        if !(hi > lo) {
            return Err(Error::config("gap", format!("range `{}` must be strictly increasing", text.trim())));
        }
        if points < 2 {
            return Err(Error::config("gap_points", "a range needs at least 2 points"));
        }
        let step = (hi - lo) / (points - 1) as f64;
        return Ok((0..points)
            .map(|i| if i == points - 1 { hi } else { lo + step * i as f64 })
            .collect());
    }
    let mut gaps = text
        .split(',')
        .map(|part| positive_length("gap", part))
        .collect::<Result<Vec<f64>>>()?;
    gaps.sort_by(f64::total_cmp);
    gaps.dedup();
    Ok(gaps)
}

fn resolve_material(kv: &KeyValues) -> Result<(MaterialChoice, Material)> {
    let preset = kv.get("preset");
    let epsilon = kv.get("epsilon");
    let inline = ["model", "plasma_energy", "relaxation"].iter().any(|k| kv.get(k).is_some());
    let chosen = [preset.is_some(), epsilon.is_some(), inline].iter().filter(|&&b| b).count();
    if chosen == 0 {
        return Err(Error::config(
            "material",
            "give --preset, --epsilon vacuum, or --model with --plasma-energy",
        ));
    }
    if chosen > 1 {
        return Err(Error::config(
            "material",
            "--preset, --epsilon and the inline --model/--plasma-energy/--relaxation flags are mutually exclusive",
        ));
    }
    if let Some(name) = preset {
        let file = kv.get("presets").map(PathBuf::from);
        let presets = match &file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::config("presets", format!("cannot read {}: {e}", path.display())))?;
                Presets::parse(&text)?
            }
            None => Presets::builtin(),
        };
        let material = presets.get(name)?;
        return Ok((
            MaterialChoice::Preset {
                name: name.to_string(),
                file,
            },
            material,
        ));
    }
    if let Some(eps) = epsilon {
        if eps.trim() != "vacuum" && eps.trim() != "1" {
            return Err(Error::config("epsilon", format!("only `vacuum` (ε = 1) is supported, got `{eps}`")));
        }
        return Ok((MaterialChoice::Vacuum, Material::vacuum()));
    }
    let model: DielectricModel = kv.get("model").unwrap_or("drude").parse()?;
    let plasma_energy_ev = parse_energy_ev(
        "plasma_energy",
        kv.get("plasma_energy")
            .ok_or_else(|| Error::config("plasma_energy", "required with an inline material"))?,
    )?;
    let relaxation = match (model, kv.get("relaxation")) {
        (DielectricModel::Drude, None) => return Err(Error::config("relaxation", "required for the Drude model")),
        (_, Some(text)) => parse_angular_frequency("relaxation", text)?,
        (_, None) => 0.0,
    };
    let material = Material::from_plasma_energy(model, plasma_energy_ev, relaxation)?;
    Ok((
        MaterialChoice::Inline {
            model,
            plasma_energy_ev,
            relaxation,
        },
        material,
    ))
}

fn tolerance(kv: &KeyValues, key: &str, default: f64) -> Result<f64> {
    match kv.get(key) {
        Some(text) => {
            let value = parse_number(key, text)?;
            if value > 0.0 && value < 1.0 {
                Ok(value)
            } else {
                Err(Error::config(key, format!("`{text}` must lie in (0, 1)")))
            }
        }
        None => Ok(default),
    }
}

impl RunConfig {
    pub fn resolve(kv: &KeyValues) -> Result<Self> {
        let (material_choice, material) = resolve_material(kv)?;
        let gap_points = kv.get("gap_points").map(|t| parse_usize("gap_points", t)).transpose()?.unwrap_or(5);
        let gaps = parse_gaps(kv.get("gap").ok_or_else(|| Error::config("gap", "required"))?, gap_points)?;
        let temperature = parse_temperature("temp", kv.get("temp").unwrap_or("300K"))?;
        if !(temperature > 0.0) {
            return Err(Error::config("temp", "must be positive"));
        }
        let radius = kv.get("radius").map(|t| positive_length("radius", t)).transpose()?;
        let format = kv.get("format").unwrap_or("pretty").parse()?;

        let max_subdivisions = kv
            .get("max_subdivisions")
            .map(|t| parse_usize("max_subdivisions", t))
            .transpose()?
            .unwrap_or(QuadratureSpec::INNER.max_subdivisions);
        if max_subdivisions == 0 {
            return Err(Error::config("max_subdivisions", "must be positive"));
        }
        let inner = QuadratureSpec::INNER
            .with_rel_tol(tolerance(kv, "rel_tol", QuadratureSpec::INNER.rel_tol)?)
            .with_max_subdivisions(max_subdivisions);
        let outer = QuadratureSpec::OUTER
            .with_rel_tol(tolerance(kv, "outer_rel_tol", QuadratureSpec::OUTER.rel_tol)?)
            .with_max_subdivisions(max_subdivisions);

        let verify = kv.get("verify").map(|t| parse_bool("verify", t)).transpose()?.unwrap_or(false);
        let variable = kv.get("var").unwrap_or("v").parse()?;
        let fraction = match kv.get("fraction") {
            Some(t) => {
                let f = parse_number("fraction", t)?;
                if !(f > 0.0 && f < 1.0) {
                    return Err(Error::config("fraction", format!("`{t}` must lie in (0, 1)")));
                }
                f
            }
            None => 0.9,
        };
        let grid = kv.get("grid").map(|t| parse_usize("grid", t)).transpose()?;
        if grid.is_some_and(|g| g < 2) {
            return Err(Error::config("grid", "at least 2 points are required"));
        }
        Ok(Self {
            material_choice,
            material,
            gaps,
            temperature,
            radius,
            format,
            quadrature: NestedSpec::new(inner, outer),
            matsubara: MatsubaraSpec::default(),
            verify,
            variable,
            fraction,
            grid,
        })
    }

    /// Canonical key/value form. Resolving it again gives the same config.
    pub fn canonical(&self, command: &str) -> KeyValues {
        let mut kv = KeyValues::default();
        match &self.material_choice {
            MaterialChoice::Preset { name, file } => {
                kv.insert("preset", name.clone());
                if let Some(path) = file {
                    kv.insert("presets", path.display().to_string());
                }
            }
            MaterialChoice::Inline {
                model,
                plasma_energy_ev,
                relaxation,
            } => {
                kv.insert("model", model.to_string());
                kv.insert("plasma_energy", format!("{plasma_energy_ev:e} eV"));
                kv.insert("relaxation", format!("{relaxation:e} rad/s"));
            }
            MaterialChoice::Vacuum => kv.insert("epsilon", "vacuum"),
        }
        let gaps: Vec<String> = self.gaps.iter().map(|g| format!("{g:e} m")).collect();
        kv.insert("gap", gaps.join(","));
        kv.insert("temp", format!("{:e} K", self.temperature));
        if let Some(r) = self.radius {
            kv.insert("radius", format!("{r:e} m"));
        }
        kv.insert("format", self.format.to_string());
        kv.insert("rel_tol", format!("{:e}", self.quadrature.inner.rel_tol));
        kv.insert("outer_rel_tol", format!("{:e}", self.quadrature.outer.rel_tol));
        kv.insert("max_subdivisions", self.quadrature.inner.max_subdivisions.to_string());
        match command {
            "force" => kv.insert("verify", self.verify.to_string()),
            "spectrum" => {
                kv.insert("var", self.variable.to_string());
                kv.insert("fraction", format!("{:e}", self.fraction));
                if let Some(g) = self.grid {
                    kv.insert("grid", g.to_string());
                }
            }
            _ => {}
        }
        kv
    }
}
