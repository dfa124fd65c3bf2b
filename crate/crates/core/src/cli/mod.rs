//! Command-line front end: `force`, `spectrum` and `applicability`.
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 when a result did not
//! converge (or `--verify` disagrees with the Matsubara oracle by more than
//! [`VERIFY_TOLERANCE`]).

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::kv::KeyValues;
use crate::lifshitz::{self, Channel, Gap};
use crate::matsubara;
use crate::spectra::{self, LogGrid, SpectrumVariable};
use crate::{Error, Result};
use config::{read_config_file, RunConfig, MATERIAL_KEYS};
use output::{sci, Cell, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_UNCONVERGED: i32 = 2;

/// Largest relative disagreement with the oracle that `--verify` accepts.
pub const VERIFY_TOLERANCE: f64 = 5e-3;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "CASIMIR_SPECTRA_THREADS";

#[derive(Debug, Parser)]
#[command(name = "casimir-spectra", version, about = "Thermal Casimir pressure between metallic half-spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Thermal correction split into TE/TM × evanescent/propagating channels.
    Force {
        #[command(flatten)]
        common: Common,
        /// Cross-check the total against the Matsubara sum.
        #[arg(long)]
        verify: bool,
    },
    /// Wave-vector or frequency spectrum of the TE-evanescent correction.
    Spectrum {
        #[command(flatten)]
        common: Common,
        /// Spectrum variable: v, u or omega.
        #[arg(long)]
        var: Option<String>,
        /// Fraction held by the reported contribution range.
        #[arg(long)]
        fraction: Option<String>,
        /// Initial number of log-spaced grid points.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Wavelength versus interaction-area comparison for a sphere of radius R.
    Applicability {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Config file (`key = value` text or a JSON result from `--format json`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named material preset.
    #[arg(long)]
    preset: Option<String>,
    /// Preset file replacing the built-in presets.
    #[arg(long)]
    presets: Option<String>,
    /// `vacuum` for ε = 1 (no interaction).
    #[arg(long)]
    epsilon: Option<String>,
    /// Inline material model: drude or plasma.
    #[arg(long)]
    model: Option<String>,
    /// Inline plasma energy ħω_p, e.g. 9eV.
    #[arg(long)]
    plasma_energy: Option<String>,
    /// Inline relaxation ν, e.g. 5.32e13rad/s.
    #[arg(long)]
    relaxation: Option<String>,
    /// Separation: `162nm`, `162nm,400nm` or `162nm..750nm`.
    #[arg(long, allow_hyphen_values = true)]
    gap: Option<String>,
    /// Points in a gap range (inclusive, linear).
    #[arg(long)]
    gap_points: Option<String>,
    /// Temperature, default 300K.
    #[arg(long, allow_hyphen_values = true)]
    temp: Option<String>,
    /// Sphere radius for the applicability report.
    #[arg(long, allow_hyphen_values = true)]
    radius: Option<String>,
    /// Output format: csv, json or pretty.
    #[arg(long)]
    format: Option<String>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Relative tolerance of inner integrals.
    #[arg(long)]
    rel_tol: Option<String>,
    /// Relative tolerance of outer integrals.
    #[arg(long)]
    outer_rel_tol: Option<String>,
    /// Subdivision limit of every adaptive integral.
    #[arg(long)]
    max_subdivisions: Option<String>,
}

impl Common {
    /// Config file entries overridden by the flags given on the command line.
    fn merged(&self) -> Result<KeyValues> {
        let file = match &self.config {
            Some(path) => read_config_file(path)?,
            None => KeyValues::default(),
        };
        let material_flags = [&self.preset, &self.presets, &self.epsilon, &self.model, &self.plasma_energy, &self.relaxation];
        let replace_material = material_flags.iter().any(|f| f.is_some());
        let mut kv = KeyValues::default();
        for (k, v) in file.iter() {
            if !(replace_material && MATERIAL_KEYS.contains(&k)) {
                kv.insert(k, v);
            }
        }
        let flags = [
            ("preset", &self.preset),
            ("presets", &self.presets),
            ("epsilon", &self.epsilon),
            ("model", &self.model),
            ("plasma_energy", &self.plasma_energy),
            ("relaxation", &self.relaxation),
            ("gap", &self.gap),
            ("gap_points", &self.gap_points),
            ("temp", &self.temp),
            ("radius", &self.radius),
            ("format", &self.format),
            ("rel_tol", &self.rel_tol),
            ("outer_rel_tol", &self.outer_rel_tol),
            ("max_subdivisions", &self.max_subdivisions),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                kv.insert(key, v.clone());
            }
        }
        Ok(kv)
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Reports go to stdout or `--output`, errors to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_INPUT;
    }
    match execute(cli.command) {
        Ok((text, output, code)) => {
            let written = match output {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| Error::config("output", format!("cannot write {}: {e}", path.display()))),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) => code,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_INPUT
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INPUT
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(text) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::config(THREADS_ENV, format!("`{text}` is not a positive integer")))?;
    // A second call in the same process (tests) keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

type Outcome = (String, Option<PathBuf>, i32);

fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Force { common, verify } => {
            let mut kv = common.merged()?;
            if verify {
                kv.insert("verify", "true");
            }
            let config = RunConfig::resolve(&kv)?;
            let (report, code) = cmd_force(&config)?;
            Ok((report.render(config.format), common.output, code))
        }
        Command::Spectrum {
            common,
            var,
            fraction,
            grid,
        } => {
            let mut kv = common.merged()?;
            for (key, value) in [("var", var), ("fraction", fraction), ("grid", grid)] {
                if let Some(v) = value {
                    kv.insert(key, v);
                }
            }
            let config = RunConfig::resolve(&kv)?;
            let (report, code) = cmd_spectrum(&config)?;
            Ok((report.render(config.format), common.output, code))
        }
        Command::Applicability { common } => {
            let config = RunConfig::resolve(&common.merged()?)?;
            let (report, code) = cmd_applicability(&config)?;
            Ok((report.render(config.format), common.output, code))
        }
    }
}

fn relative_difference(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

struct ForceRow {
    breakdown: lifshitz::PressureBreakdown,
    oracle: Option<crate::Estimate>,
}

/// Channel breakdown at every gap, with the oracle when `verify` is set.
pub fn cmd_force(config: &RunConfig) -> Result<(Report, i32)> {
    let rows: Vec<ForceRow> = config
        .gaps
        .par_iter()
        .map(|&l| -> Result<ForceRow> {
            let gap = Gap::new(l, config.temperature)?;
            let breakdown = lifshitz::thermal_pressure_total(&gap, &config.material, &config.quadrature)?;
            let oracle = if config.verify {
                Some(matsubara::thermal_correction_oracle(
                    &gap,
                    &config.material,
                    &config.matsubara,
                    &config.quadrature.inner,
                )?)
            } else {
                None
            };
            Ok(ForceRow { breakdown, oracle })
        })
        .collect::<Result<_>>()?;

    let mut report = Report::new("force", &config.canonical("force"));
    report.meta("quantity", "thermal correction P(T) - P(0)");
    report.meta("units", "Pa");
    let mut columns: Vec<String> = ["gap_m", "temperature_k", "total", "total_error"].map(String::from).to_vec();
    for c in Channel::ALL {
        columns.push(c.label().to_string());
        columns.push(format!("{}_error", c.label()));
    }
    columns.extend(["te_evanescent_share", "te_evanescent_magnitude_share", "converged"].map(String::from));
    if config.verify {
        columns.extend(["oracle", "oracle_error", "oracle_relative_difference", "oracle_agrees"].map(String::from));
    }
    report.columns = columns;

    let mut code = EXIT_OK;
    for row in &rows {
        let b = &row.breakdown;
        let mut cells = vec![
            Cell::Num(b.gap.separation),
            Cell::Num(b.gap.temperature),
            Cell::Num(b.total.value),
            Cell::Num(b.total.error),
        ];
        for c in Channel::ALL {
            let e = b.get(c);
            cells.push(Cell::Num(e.value));
            cells.push(Cell::Num(e.error));
        }
        let share = b.share(Channel::TE_EVANESCENT);
        let magnitude = b.magnitude_share(Channel::TE_EVANESCENT);
        cells.extend([Cell::Num(share), Cell::Num(magnitude), Cell::Bool(b.converged())]);
        if !b.converged() {
            code = EXIT_UNCONVERGED;
        }
        report.notes.push(format!(
            "gap {} m: total {} Pa, TE-evanescent share {:.2} % signed, {:.2} % of |channels|{}",
            sci(b.gap.separation),
            sci(b.total.value),
            100.0 * share,
            100.0 * magnitude,
            if b.converged() { "" } else { " [NOT CONVERGED]" }
        ));
        if let Some(oracle) = row.oracle {
            let diff = relative_difference(b.total.value, oracle.value);
            let agrees = oracle.converged && diff <= VERIFY_TOLERANCE;
            if !agrees {
                code = EXIT_UNCONVERGED;
            }
            cells.extend([
                Cell::Num(oracle.value),
                Cell::Num(oracle.error),
                Cell::Num(diff),
                Cell::Bool(agrees),
            ]);
            report.notes.push(format!(
                "  Matsubara oracle {} Pa, relative difference {:.3e} ({})",
                sci(oracle.value),
                diff,
                if agrees { "agrees" } else { "DISAGREES" }
            ));
        }
        report.row(cells);
    }
    Ok((report, code))
}

/// Spectrum table at a single gap with its contribution ranges in the header.
pub fn cmd_spectrum(config: &RunConfig) -> Result<(Report, i32)> {
    let [l] = config.gaps[..] else {
        return Err(Error::config("gap", "spectrum takes a single separation"));
    };
    let gap = Gap::new(l, config.temperature)?;
    let groups = lifshitz::DimensionlessGroups::new(&gap, &config.material)?;
    let base = match config.variable {
        SpectrumVariable::V => LogGrid::default_v(),
        SpectrumVariable::U | SpectrumVariable::Omega => LogGrid::default_u(&groups),
    };
    let grid = match config.grid {
        Some(points) => base.with_points(points)?,
        None => base,
    };
    let table = match config.variable {
        SpectrumVariable::V => spectra::wavevector_spectrum(&gap, &config.material, grid, &config.quadrature)?,
        SpectrumVariable::U => spectra::frequency_spectrum(&gap, &config.material, grid, &config.quadrature)?,
        SpectrumVariable::Omega => {
            spectra::frequency_spectrum(&gap, &config.material, grid, &config.quadrature)?.to_omega()?
        }
    };
    let equal = spectra::contribution_range(&table, config.fraction)?;
    let narrow = spectra::minimal_width_range(&table, config.fraction)?;
    let peak = table.peak();

    let mut report = Report::new("spectrum", &config.canonical("spectrum"));
    report.meta("range_lo", equal.x_lo);
    report.meta("range_hi", equal.x_hi);
    report.meta("min_width_lo", narrow.x_lo);
    report.meta("min_width_hi", narrow.x_hi);
    report.meta("normalization", table.normalization.value);
    report.meta("normalization_error", table.normalization.error);
    report.meta("te_evanescent_pressure_pa", table.pressure_scale * table.normalization.value);
    report.meta("a", table.groups.a);
    report.meta("coupling", table.groups.coupling);
    report.meta("peak_x", peak.x);
    report.meta("peak_density", peak.density);
    report.meta("points", table.samples.len());
    report.meta("refinements", table.refinements);
    report.meta("converged", table.converged);

    let with_omega = table.variable == SpectrumVariable::U;
    if with_omega {
        report.columns(&["x", "density", "cumulative", "omega"]);
    } else {
        report.columns(&["x", "density", "cumulative"]);
    }
    for s in &table.samples {
        let mut cells = vec![Cell::Num(s.x), Cell::Num(s.density), Cell::Num(s.cumulative)];
        if with_omega {
            cells.push(Cell::opt(table.omega_of(s.x)));
        }
        report.row(cells);
    }
    report.notes.push(format!(
        "{:.0} % of the TE-evanescent correction: {} in [{}, {}] (equal tails), [{}, {}] (narrowest)",
        100.0 * config.fraction,
        table.variable,
        sci(equal.x_lo),
        sci(equal.x_hi),
        sci(narrow.x_lo),
        sci(narrow.x_hi)
    ));
    let code = if table.converged && table.normalization.converged {
        EXIT_OK
    } else {
        EXIT_UNCONVERGED
    };
    Ok((report, code))
}

/// Wavelength bounds against the sphere–plate interaction area at every gap.
pub fn cmd_applicability(config: &RunConfig) -> Result<(Report, i32)> {
    let radius = config
        .radius
        .ok_or_else(|| Error::config("radius", "required for the applicability report"))?;
    let reports = config
        .gaps
        .iter()
        .map(|&l| spectra::applicability_report(&Gap::new(l, config.temperature)?, &config.material, radius))
        .collect::<Result<Vec<_>>>()?;

    let mut report = Report::new("applicability", &config.canonical("applicability"));
    report.meta("units", "m");
    report.meta("radius", radius);
    report.meta("threshold_separation", 2.0 * radius / std::f64::consts::PI.powi(2));
    report.columns(&[
        "gap_m",
        "lambda_max",
        "spot_size",
        "spot_size_approx",
        "criterion_comment",
        "threshold_separation",
        "ref2_wavelength_estimate",
        "criterion_ref2",
    ]);
    for r in &reports {
        report.row(vec![
            Cell::Num(r.separation),
            Cell::Num(r.lambda_max),
            Cell::Num(r.spot_size),
            Cell::Num(r.spot_size_approx),
            Cell::Bool(r.criterion_comment),
            Cell::Num(r.threshold_separation),
            Cell::opt(r.ref2_wavelength_estimate),
            r.criterion_ref2.map_or(Cell::Missing, Cell::Bool),
        ]);
        let mut verdict = format!(
            "gap {} m: 2πl = {} m {} L = {} m ({})",
            sci(r.separation),
            sci(r.lambda_max),
            if r.criterion_comment { "<" } else { ">=" },
            sci(r.spot_size),
            if r.criterion_comment { "applicable" } else { "NOT applicable" }
        );
        if let (Some(w), Some(ok)) = (r.ref2_wavelength_estimate, r.criterion_ref2) {
            verdict.push_str(&format!(
                "; 2πc/ν = {} m {} L ({})",
                sci(w),
                if ok { "<" } else { ">=" },
                if ok { "applicable" } else { "NOT applicable" }
            ));
        }
        report.notes.push(verdict);
    }
    Ok((report, EXIT_OK))
}
