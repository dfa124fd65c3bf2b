//! Spectral decomposition of the TE-evanescent thermal correction.
//!
//! The dimensionless integral ∫∫ du dv Bose(a u) v² Im[1 − e^{2v}/r_TE²]^{−1}
//! is tabulated either over v (wave vector, density v²g(v)) or over u
//! (frequency, density integrated over v). Tables carry a normalized
//! cumulative so that contribution ranges can be read off, and the
//! applicability report compares the resulting wavelength bound with the
//! spot size of a sphere–plate setup.

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::SPEED_OF_LIGHT;
use crate::lifshitz::{self, DimensionlessGroups, Estimate, Gap};
use crate::materials::Material;
use crate::quadrature::{break_points, try_integrate_points, NestedSpec};
use crate::{Error, Result};

/// Target fraction whose endpoints drive grid refinement.
const REFINEMENT_FRACTION: f64 = 0.9;
/// Refinement stops once both endpoints move by less than this, relatively.
const REFINEMENT_TOLERANCE: f64 = 0.01;
const MAX_REFINEMENTS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumVariable {
    /// v = l q.
    V,
    /// u = ω_p² l² ω/(ν c²).
    U,
    /// ω in rad/s.
    Omega,
}

impl std::str::FromStr for SpectrumVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "v" => Ok(Self::V),
            "u" => Ok(Self::U),
            "omega" | "ω" => Ok(Self::Omega),
            other => Err(Error::config("var", format!("unknown spectrum variable `{other}` (expected v, u or omega)"))),
        }
    }
}

impl std::fmt::Display for SpectrumVariable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::V => "v",
            Self::U => "u",
            Self::Omega => "omega",
        })
    }
}

/// Log-spaced sample positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl LogGrid {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo > 0.0 && lo.is_finite()) {
            return Err(Error::domain("grid lower end", lo, "finite and > 0"));
        }
        if !(hi > lo && hi.is_finite()) {
            return Err(Error::domain("grid upper end", hi, "finite and above the lower end"));
        }
        if points < 2 {
            return Err(Error::config("grid", "at least 2 points are required"));
        }
        Ok(Self { lo, hi, points })
    }

    /// 200 points on [10⁻³, 20].
    pub fn default_v() -> Self {
        Self {
            lo: 1e-3,
            hi: 20.0,
            points: 200,
        }
    }

    /// 200 points on [10⁻⁴, 10³/a].
    pub fn default_u(groups: &DimensionlessGroups) -> Self {
        Self {
            lo: 1e-4,
            hi: 1e3 / groups.a,
            points: 200,
        }
    }

    pub fn with_points(self, points: usize) -> Result<Self> {
        Self::new(self.lo, self.hi, points)
    }

    pub fn values(&self) -> Vec<f64> {
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let n = self.points - 1;
        (0..self.points)
            .map(|i| match i {
                0 => self.lo,
                i if i == n => self.hi,
                i => (a + (b - a) * i as f64 / n as f64).exp(),
            })
            .collect()
    }

    /// Same range with every interval halved.
    pub fn refined(&self) -> Self {
        Self {
            points: 2 * self.points - 1,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumSample {
    pub x: f64,
    pub density: f64,
    pub cumulative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumTable {
    pub variable: SpectrumVariable,
    pub samples: Vec<SpectrumSample>,
    /// Full integral of the density from quadrature (dimensionless for v and u).
    pub normalization: Estimate,
    /// Integral of the sampled density (trapezoid in ln x plus a power-law head),
    /// the denominator of `cumulative`.
    pub grid_integral: f64,
    pub groups: DimensionlessGroups,
    /// Pa per unit of the dimensionless integral.
    pub pressure_scale: f64,
    /// Every per-sample integration met its tolerance.
    pub converged: bool,
    /// Grid doublings performed after the initial grid.
    pub refinements: usize,
}

impl SpectrumTable {
    pub fn xs(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.x).collect()
    }

    /// Sample with the largest density.
    pub fn peak(&self) -> SpectrumSample {
        *self
            .samples
            .iter()
            .max_by(|a, b| a.density.total_cmp(&b.density))
            .expect("tables are never empty")
    }

    pub fn density_at(&self, x: f64) -> Option<f64> {
        self.samples.iter().find(|s| s.x == x).map(|s| s.density)
    }

    /// Cumulative fraction at x, interpolated linearly in ln x.
    pub fn cumulative_at(&self, x: f64) -> f64 {
        let s = &self.samples;
        if x <= s[0].x {
            return s[0].cumulative * (x.max(0.0) / s[0].x);
        }
        if x >= s[s.len() - 1].x {
            return 1.0;
        }
        let i = s.partition_point(|p| p.x <= x) - 1;
        let t = (x / s[i].x).ln() / (s[i + 1].x / s[i].x).ln();
        s[i].cumulative + t * (s[i + 1].cumulative - s[i].cumulative)
    }

    /// Inverse of the cumulative: the x at which it reaches `target`.
    pub fn quantile(&self, target: f64) -> f64 {
        let s = &self.samples;
        if target <= s[0].cumulative {
            return if s[0].cumulative > 0.0 {
                s[0].x * target.max(0.0) / s[0].cumulative
            } else {
                s[0].x
            };
        }
        let i = s.partition_point(|p| p.cumulative < target).min(s.len() - 1);
        let (lo, hi) = (s[i - 1], s[i]);
        let rise = hi.cumulative - lo.cumulative;
        if rise <= 0.0 {
            return lo.x;
        }
        let t = (target - lo.cumulative) / rise;
        (lo.x.ln() + t * (hi.x / lo.x).ln()).exp()
    }

    /// ω for an x of this table (u or ω tables only).
    pub fn omega_of(&self, x: f64) -> Option<f64> {
        match self.variable {
            SpectrumVariable::U => Some(self.groups.omega_of_u(x)),
            SpectrumVariable::Omega => Some(x),
            SpectrumVariable::V => None,
        }
    }

    /// Re-expresses a u table over ω in rad/s, density per rad/s.
    pub fn to_omega(&self) -> Result<Self> {
        if self.variable != SpectrumVariable::U {
            return Err(Error::config("var", format!("cannot convert a {} table to omega", self.variable)));
        }
        let per_omega = self.groups.coupling / self.groups.relaxation;
        let mut table = self.clone();
        table.variable = SpectrumVariable::Omega;
        for s in &mut table.samples {
            s.x = self.groups.omega_of_u(s.x);
            s.density *= per_omega;
        }
        Ok(table)
    }
}

/// Integral of the samples: trapezoid in ln x on the grid, plus the head
/// [0, x₀] from a power law fitted to the first two samples. Returns the
/// running integral at every sample.
fn running_integral(xs: &[f64], density: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(xs.len());
    let head = if density[0] > 0.0 && density[1] > 0.0 {
        let p = (density[1] / density[0]).ln() / (xs[1] / xs[0]).ln();
        if p > -1.0 {
            density[0] * xs[0] / (p + 1.0)
        } else {
            0.0
        }
    } else {
        0.0
    };
    let mut acc = head;
    out.push(acc);
    for i in 1..xs.len() {
        let h = (xs[i] / xs[i - 1]).ln();
        acc += 0.5 * h * (xs[i] * density[i] + xs[i - 1] * density[i - 1]);
        out.push(acc);
    }
    out
}

fn assert_single_sign(xs: &[f64], density: &[f64]) -> Result<()> {
    let max = density.iter().fold(0.0_f64, |m, d| m.max(d.abs()));
    let sign = density.iter().sum::<f64>().signum();
    for (&x, &d) in xs.iter().zip(density) {
        if d * sign < -1e-9 * max {
            return Err(Error::SignChange { x, density: d });
        }
    }
    Ok(())
}

/// Tabulates `density` on `grid`, doubling the grid until the 90% range
/// endpoints settle.
fn build_table<F>(
    variable: SpectrumVariable,
    grid: LogGrid,
    groups: DimensionlessGroups,
    pressure_scale: f64,
    normalization: Estimate,
    density: F,
) -> Result<SpectrumTable>
where
    F: Fn(f64) -> Result<(f64, bool)> + Sync,
{
    let evaluate = |xs: &[f64]| -> Result<Vec<(f64, bool)>> { xs.par_iter().map(|&x| density(x)).collect() };

    let mut current = grid;
    let mut xs = current.values();
    let mut values = evaluate(&xs)?;
    let mut table = assemble(variable, &xs, &values, groups, pressure_scale, normalization, 0)?;
    let mut range = contribution_range(&table, REFINEMENT_FRACTION)?;
    for level in 1..=MAX_REFINEMENTS {
        current = current.refined();
        let finer = current.values();
        // Even indices of the refined grid are the previous samples.
        let midpoints: Vec<f64> = finer.iter().skip(1).step_by(2).copied().collect();
        let fresh = evaluate(&midpoints)?;
        let mut merged = Vec::with_capacity(finer.len());
        for (i, old) in values.iter().enumerate() {
            merged.push(*old);
            if i < fresh.len() {
                merged.push(fresh[i]);
            }
        }
        xs = finer;
        values = merged;
        let next = assemble(variable, &xs, &values, groups, pressure_scale, normalization, level)?;
        let next_range = contribution_range(&next, REFINEMENT_FRACTION)?;
        let moved = ((next_range.x_lo / range.x_lo - 1.0).abs()).max((next_range.x_hi / range.x_hi - 1.0).abs());
        table = next;
        range = next_range;
        if moved < REFINEMENT_TOLERANCE {
            break;
        }
    }
    Ok(table)
}

fn assemble(
    variable: SpectrumVariable,
    xs: &[f64],
    values: &[(f64, bool)],
    groups: DimensionlessGroups,
    pressure_scale: f64,
    normalization: Estimate,
    refinements: usize,
) -> Result<SpectrumTable> {
    let density: Vec<f64> = values.iter().map(|v| v.0).collect();
    assert_single_sign(xs, &density)?;
    let running = running_integral(xs, &density);
    let total = *running.last().expect("at least two samples");
    let samples = xs
        .iter()
        .zip(&density)
        .zip(&running)
        .map(|((&x, &d), &c)| SpectrumSample {
            x,
            density: d,
            cumulative: if total != 0.0 { (c / total).clamp(0.0, 1.0) } else { 0.0 },
        })
        .collect();
    Ok(SpectrumTable {
        variable,
        samples,
        normalization,
        grid_integral: total,
        groups,
        pressure_scale,
        converged: normalization.converged && values.iter().all(|v| v.1),
        refinements,
    })
}

/// Wave-vector spectrum: density v²g(v) over v.
pub fn wavevector_spectrum(gap: &Gap, material: &Material, grid: LogGrid, spec: &NestedSpec) -> Result<SpectrumTable> {
    spec.validate()?;
    let groups = DimensionlessGroups::new(gap, material)?;
    let normalization = lifshitz::dimensionless_integral(&groups, spec)?;
    let inner = spec.inner;
    build_table(
        SpectrumVariable::V,
        grid,
        groups,
        lifshitz::dimensionless_prefactor(gap, material),
        normalization,
        |v| {
            let g = lifshitz::g_of_v(v, &groups, &inner)?;
            Ok((v * v * g.value, g.converged))
        },
    )
}

/// Frequency spectrum over u; use [`SpectrumTable::to_omega`] for ω.
pub fn frequency_spectrum(gap: &Gap, material: &Material, grid: LogGrid, spec: &NestedSpec) -> Result<SpectrumTable> {
    spec.validate()?;
    let groups = DimensionlessGroups::new(gap, material)?;
    let normalization = lifshitz::dimensionless_integral(&groups, spec)?;
    let inner = spec.inner;
    build_table(
        SpectrumVariable::U,
        grid,
        groups,
        lifshitz::dimensionless_prefactor(gap, material),
        normalization,
        |u| {
            let d = lifshitz::u_density(u, &groups, &inner)?;
            Ok((d.value, d.converged))
        },
    )
}

/// Share of the TE-evanescent correction from frequencies below ω, by direct
/// quadrature of the u-density over (0, u(ω)).
pub fn fraction_below_frequency(gap: &Gap, material: &Material, omega: f64, spec: &NestedSpec) -> Result<Estimate> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain("ω", omega, "finite and > 0"));
    }
    spec.validate()?;
    let groups = DimensionlessGroups::new(gap, material)?;
    let total = lifshitz::dimensionless_integral(&groups, spec)?;
    let u_end = groups.u_of_omega(omega);
    let inner = spec.inner;
    let mut inner_ok = true;
    let f = |u: f64| -> Result<f64> {
        if u == 0.0 {
            return Ok(0.0);
        }
        let d = lifshitz::u_density(u, &groups, &inner)?;
        inner_ok &= d.converged;
        Ok(d.value)
    };
    let candidates = [1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0, groups.coupling, 1.0 / groups.a];
    let points = break_points(0.0, u_end, &candidates);
    let below = try_integrate_points(f, &points, &spec.outer)?;
    let value = below.value / total.value;
    Ok(Estimate {
        value,
        error: below.error_estimate / total.value.abs() + value.abs() * total.relative_error(),
        converged: below.converged && inner_ok && total.converged,
        evaluations: below.evaluations + total.evaluations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContributionRange {
    pub x_lo: f64,
    pub x_hi: f64,
    pub fraction: f64,
}

fn check_fraction(fraction: f64) -> Result<()> {
    if fraction > 0.0 && fraction < 1.0 {
        Ok(())
    } else {
        Err(Error::domain("fraction", fraction, "inside (0, 1)"))
    }
}

/// Equal-tail interval: cumulative (1 − f)/2 to (1 + f)/2.
pub fn contribution_range(table: &SpectrumTable, fraction: f64) -> Result<ContributionRange> {
    check_fraction(fraction)?;
    Ok(ContributionRange {
        x_lo: table.quantile(0.5 * (1.0 - fraction)),
        x_hi: table.quantile(0.5 * (1.0 + fraction)),
        fraction,
    })
}

/// Narrowest interval (in x) holding the fraction. Candidate intervals start
/// or end at a sample; the other end comes from the interpolated quantile.
pub fn minimal_width_range(table: &SpectrumTable, fraction: f64) -> Result<ContributionRange> {
    check_fraction(fraction)?;
    let mut best = contribution_range(table, fraction)?;
    for s in &table.samples {
        let candidates = [
            (s.cumulative + fraction <= 1.0).then(|| (s.x, table.quantile(s.cumulative + fraction))),
            (s.cumulative - fraction >= 0.0).then(|| (table.quantile(s.cumulative - fraction), s.x)),
        ];
        for (lo, hi) in candidates.into_iter().flatten() {
            if hi - lo < best.x_hi - best.x_lo {
                best = ContributionRange {
                    x_lo: lo,
                    x_hi: hi,
                    fraction,
                };
            }
        }
    }
    Ok(best)
}

/// Lower end of the interval that ends at `x_hi` and holds the fraction;
/// `None` when everything below `x_hi` is less than the fraction.
pub fn lower_bound_for_upper(table: &SpectrumTable, fraction: f64, x_hi: f64) -> Result<Option<f64>> {
    check_fraction(fraction)?;
    let target = table.cumulative_at(x_hi) - fraction;
    Ok((target >= 0.0).then(|| table.quantile(target)))
}

/// Wavelength 2π/k⊥ of a mode with transverse wave number k⊥.
pub fn wavelength_of(k_perp: f64) -> Result<f64> {
    if !(k_perp > 0.0 && k_perp.is_finite()) {
        return Err(Error::domain("k⊥", k_perp, "finite and > 0"));
    }
    Ok(2.0 * std::f64::consts::PI / k_perp)
}

/// Lateral size of the sphere region within distance l of the plate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpotSize {
    /// Chord 2√(R² − (R − l)²).
    pub exact: f64,
    /// 2√(2Rl).
    pub approximate: f64,
}

pub fn effective_spot_size(radius: f64, separation: f64) -> Result<SpotSize> {
    if !(separation > 0.0 && separation.is_finite()) {
        return Err(Error::domain("l", separation, "finite and > 0"));
    }
    if !(radius > separation && radius.is_finite()) {
        return Err(Error::domain("R", radius, "finite and larger than the separation"));
    }
    Ok(SpotSize {
        // R² − (R − l)² = l(2R − l)
        exact: 2.0 * (separation * (2.0 * radius - separation)).sqrt(),
        approximate: 2.0 * (2.0 * radius * separation).sqrt(),
    })
}

/// ω_c = c/(2l).
pub fn characteristic_frequency(separation: f64) -> Result<f64> {
    if !(separation > 0.0) {
        return Err(Error::domain("l", separation, "> 0"));
    }
    Ok(SPEED_OF_LIGHT / (2.0 * separation))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ApplicabilityReport {
    pub separation: f64,
    pub radius: f64,
    /// 2πl.
    pub lambda_max: f64,
    pub spot_size: f64,
    pub spot_size_approx: f64,
    /// λ_max < L.
    pub criterion_comment: bool,
    /// 2R/π².
    pub threshold_separation: f64,
    /// 2πc/ν; absent for a lossless material.
    pub ref2_wavelength_estimate: Option<f64>,
    /// 2πc/ν < L.
    pub criterion_ref2: Option<bool>,
}

pub fn applicability_report(gap: &Gap, material: &Material, radius: f64) -> Result<ApplicabilityReport> {
    let l = gap.separation;
    let spot = effective_spot_size(radius, l)?;
    let lambda_max = 2.0 * std::f64::consts::PI * l;
    let ref2 = material
        .is_lossy()
        .then(|| 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / material.relaxation);
    Ok(ApplicabilityReport {
        separation: l,
        radius,
        lambda_max,
        spot_size: spot.exact,
        spot_size_approx: spot.approximate,
        criterion_comment: lambda_max < spot.exact,
        threshold_separation: 2.0 * radius / std::f64::consts::PI.powi(2),
        ref2_wavelength_estimate: ref2,
        criterion_ref2: ref2.map(|w| w < spot.exact),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn groups() -> DimensionlessGroups {
        DimensionlessGroups {
            a: 1.0,
            coupling: 1.0,
            relaxation: 1.0,
        }
    }

    /// Table with the given density sampled on a log grid.
    fn synthetic(xs: Vec<f64>, density: impl Fn(f64) -> f64) -> SpectrumTable {
        let values: Vec<(f64, bool)> = xs.iter().map(|&x| (density(x), true)).collect();
        assemble(SpectrumVariable::V, &xs, &values, groups(), 1.0, Estimate::ZERO, 0).unwrap()
    }

    fn uniform_table() -> SpectrumTable {
        // Density 1 on (0, 1], 0 beyond, sampled densely in log space.
        let xs = LogGrid::new(1e-6, 2.0, 4001).unwrap().values();
        synthetic(xs, |x| if x <= 1.0 { 1.0 } else { 0.0 })
    }

    #[test]
    fn log_grid_endpoints_and_refinement() {
        let g = LogGrid::new(1e-3, 20.0, 5).unwrap();
        let v = g.values();
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 1e-3);
        assert_eq!(v[4], 20.0);
        let r = g.refined().values();
        assert_eq!(r.len(), 9);
        for (i, x) in v.iter().enumerate() {
            assert!((r[2 * i] / x - 1.0).abs() < 1e-14);
        }
        assert!(LogGrid::new(0.0, 1.0, 5).is_err());
        assert!(LogGrid::new(1.0, 1.0, 5).is_err());
        assert!(LogGrid::new(1.0, 2.0, 1).is_err());
    }

    #[test]
    fn uniform_density_quantiles() {
        let t = uniform_table();
        let r = contribution_range(&t, 0.9).unwrap();
        assert!((r.x_lo - 0.05).abs() < 2e-3, "{r:?}");
        assert!((r.x_hi - 0.95).abs() < 2e-3, "{r:?}");
    }

    #[test]
    fn fraction_outside_unit_interval_is_rejected() {
        let t = uniform_table();
        for f in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(contribution_range(&t, f).is_err());
            assert!(minimal_width_range(&t, f).is_err());
        }
    }

    #[test]
    fn minimal_width_is_never_wider_than_equal_tail() {
        let xs = LogGrid::new(1e-3, 50.0, 400).unwrap().values();
        let t = synthetic(xs, |x| x * x * (-2.0 * x).exp());
        let eq = contribution_range(&t, 0.9).unwrap();
        let mw = minimal_width_range(&t, 0.9).unwrap();
        assert!(mw.x_hi - mw.x_lo <= eq.x_hi - eq.x_lo);
        let held = t.cumulative_at(mw.x_hi) - t.cumulative_at(mw.x_lo);
        assert!((held - 0.9).abs() < 1e-3, "{held}");
    }

    #[test]
    fn upper_anchored_bound() {
        let t = uniform_table();
        let lo = lower_bound_for_upper(&t, 0.5, 0.8).unwrap().unwrap();
        assert!((lo - 0.3).abs() < 2e-3, "{lo}");
        assert_eq!(lower_bound_for_upper(&t, 0.9, 0.5).unwrap(), None);
    }

    #[test]
    fn sign_change_is_an_error() {
        let xs = LogGrid::new(1e-2, 10.0, 50).unwrap().values();
        let values: Vec<(f64, bool)> = xs.iter().map(|&x| ((1.0 - x).sin(), true)).collect();
        assert!(matches!(
            assemble(SpectrumVariable::V, &xs, &values, groups(), 1.0, Estimate::ZERO, 0),
            Err(Error::SignChange { .. })
        ));
    }

    #[test]
    fn power_law_head_is_integrated() {
        // ∫₀^1 3x² dx = 1, sampled only from 0.1.
        let xs = LogGrid::new(0.1, 1.0, 2001).unwrap().values();
        let d: Vec<f64> = xs.iter().map(|x| 3.0 * x * x).collect();
        let total = *running_integral(&xs, &d).last().unwrap();
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }

    #[test]
    fn wavelength_examples() {
        assert!((wavelength_of(2.0 * std::f64::consts::PI).unwrap() - 1.0).abs() < 1e-15);
        let lambda = wavelength_of(1.0 / 162e-9).unwrap();
        assert!((lambda - 1.018e-6).abs() < 1e-9, "{lambda:e}");
        assert!(wavelength_of(0.0).is_err());
        assert!(wavelength_of(-1.0).is_err());
    }

    #[test]
    fn spot_size_examples() {
        let s = effective_spot_size(150e-6, 162e-9).unwrap();
        assert!((s.exact - 13.9e-6).abs() < 0.05e-6, "{:e}", s.exact);
        assert!((s.exact / s.approximate - 1.0).abs() < 1e-2);
        let s = effective_spot_size(150e-6, 750e-9).unwrap();
        assert!((s.exact - 30.0e-6).abs() < 0.05e-6, "{:e}", s.exact);
        let tiny = effective_spot_size(150e-6, 1e-15).unwrap();
        assert!(tiny.exact < 2e-9 && tiny.exact > 0.0);
        assert!(effective_spot_size(1e-6, 900e-9).is_ok());
        assert!(effective_spot_size(1e-6, 1e-6).is_err());
        assert!(effective_spot_size(1e-6, 2e-6).is_err());
    }

    #[test]
    fn characteristic_frequency_examples() {
        let w = characteristic_frequency(100e-9).unwrap();
        assert!((w / 1.5e15 - 1.0).abs() < 1e-3);
        let w = characteristic_frequency(162e-9).unwrap();
        assert!((w / 9.26e14 - 1.0).abs() < 1e-3);
        assert!(characteristic_frequency(1e6).unwrap() < 1e3);
        assert!(characteristic_frequency(0.0).is_err());
    }

    #[test]
    fn applicability_for_150_um_sphere() {
        let m = Material::preset("Au-paper").unwrap();
        let r = applicability_report(&Gap::new(162e-9, 300.0).unwrap(), &m, 150e-6).unwrap();
        assert!(r.criterion_comment);
        assert_eq!(r.lambda_max, 2.0 * std::f64::consts::PI * 162e-9);
        assert!((r.threshold_separation - 30.4e-6).abs() < 0.05e-6);
        let ref2 = r.ref2_wavelength_estimate.unwrap();
        assert!((ref2 - 35.4e-6).abs() < 0.05e-6, "{ref2:e}");
        assert_eq!(r.criterion_ref2, Some(false));
        let plasma = Material::preset("Au-plasma").unwrap();
        let r = applicability_report(&Gap::new(162e-9, 300.0).unwrap(), &plasma, 150e-6).unwrap();
        assert_eq!(r.ref2_wavelength_estimate, None);
    }

    #[test]
    fn variable_parsing() {
        assert_eq!("v".parse::<SpectrumVariable>().unwrap(), SpectrumVariable::V);
        assert_eq!("Omega".parse::<SpectrumVariable>().unwrap(), SpectrumVariable::Omega);
        assert!("k".parse::<SpectrumVariable>().is_err());
    }

    proptest! {
        #[test]
        fn ranges_nest_with_fraction(f1 in 0.05f64..0.95, df in 0.001f64..0.04, scale in 0.2f64..5.0, power in 0.5f64..4.0) {
            let f2 = (f1 + df).min(0.99);
            let xs = LogGrid::new(1e-3, 60.0, 300).unwrap().values();
            let t = synthetic(xs, |x| x.powf(power) * (-x / scale).exp());
            let inner = contribution_range(&t, f1).unwrap();
            let outer = contribution_range(&t, f2).unwrap();
            prop_assert!(outer.x_lo <= inner.x_lo && inner.x_hi <= outer.x_hi);
            let held = t.cumulative_at(inner.x_hi) - t.cumulative_at(inner.x_lo);
            prop_assert!((held - f1).abs() < 1e-3);
        }

        #[test]
        fn cumulative_is_monotone_from_zero_to_one(scale in 0.2f64..5.0, power in 0.5f64..4.0) {
            let xs = LogGrid::new(1e-3, 80.0, 200).unwrap().values();
            let t = synthetic(xs, |x| x.powf(power) * (-x / scale).exp());
            for w in t.samples.windows(2) {
                prop_assert!(w[1].cumulative >= w[0].cumulative);
            }
            prop_assert!(t.samples[0].cumulative >= 0.0);
            prop_assert!((t.samples.last().unwrap().cumulative - 1.0).abs() < 1e-6);
        }
    }
}
