//! One-dimensional adaptive quadrature.
//!
//! Every panel is integrated with the 21-point Gauss–Kronrod pair; the
//! difference between the embedded 10-point Gauss and the Kronrod result,
//! rescaled as in QUADPACK, is the panel error. Refinement always bisects the
//! panel with the largest error until the summed error meets the tolerance.
//! The rule is open, so integrands are never evaluated at panel endpoints and
//! integrable endpoint singularities are safe.
//!
//! Semi-infinite ranges go through x = a + s·t/(1 − t). Oscillatory ranges
//! are cut into half-period panels; for an infinite upper limit the running
//! partial sums are accelerated by repeated averaging (Euler transform).
//!
//! Integrands come in two flavours: plain `FnMut(f64) -> f64` for the public
//! convenience functions, and fallible `FnMut(f64) -> Result<f64, E>` for the
//! nested physics integrals, where an inner failure must abort the outer one.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("integrand returned {value} at x = {x:e}")]
    NonFinite { x: f64, value: f64 },
    #[error("invalid integration range [{a:e}, {b:e}]")]
    InvalidRange { a: f64, b: f64 },
    #[error("invalid quadrature parameter: {0}")]
    InvalidSpec(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// When set, finite integrations start from panels of half this period.
    pub oscillation_period_hint: Option<f64>,
}

impl QuadratureSpec {
    /// Default for inner integrals.
    pub const INNER: Self = Self {
        rel_tol: 1e-8,
        abs_tol: 0.0,
        max_subdivisions: 2000,
        oscillation_period_hint: None,
    };

    /// Default for outer integrals of nested evaluations.
    pub const OUTER: Self = Self {
        rel_tol: 1e-7,
        abs_tol: 0.0,
        max_subdivisions: 2000,
        oscillation_period_hint: None,
    };

    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self, QuadratureError> {
        let spec = Self {
            rel_tol,
            abs_tol,
            max_subdivisions,
            oscillation_period_hint: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_subdivisions(mut self, max_subdivisions: usize) -> Self {
        self.max_subdivisions = max_subdivisions;
        self
    }

    pub fn with_period_hint(mut self, period: f64) -> Self {
        self.oscillation_period_hint = Some(period);
        self
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(QuadratureError::InvalidSpec("rel_tol must be finite and > 0"));
        }
        if !(self.abs_tol >= 0.0 && self.abs_tol.is_finite()) {
            return Err(QuadratureError::InvalidSpec("abs_tol must be finite and ≥ 0"));
        }
        if self.max_subdivisions < 1 {
            return Err(QuadratureError::InvalidSpec("max_subdivisions must be ≥ 1"));
        }
        if let Some(p) = self.oscillation_period_hint {
            if !(p > 0.0 && p.is_finite()) {
                return Err(QuadratureError::InvalidSpec("oscillation period must be finite and > 0"));
            }
        }
        Ok(())
    }

    pub fn tolerance(&self, value: f64) -> f64 {
        (self.rel_tol * value.abs()).max(self.abs_tol)
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::INNER
    }
}

/// Tolerances for a two-level nested integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NestedSpec {
    pub inner: QuadratureSpec,
    pub outer: QuadratureSpec,
}

impl NestedSpec {
    pub fn new(inner: QuadratureSpec, outer: QuadratureSpec) -> Self {
        Self { inner, outer }
    }

    /// Same subdivision limits as the default, with the given relative tolerances.
    pub fn with_rel_tols(inner: f64, outer: f64) -> Self {
        Self {
            inner: QuadratureSpec::INNER.with_rel_tol(inner),
            outer: QuadratureSpec::OUTER.with_rel_tol(outer),
        }
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        self.inner.validate()?;
        self.outer.validate()
    }
}

impl Default for NestedSpec {
    fn default() -> Self {
        Self {
            inner: QuadratureSpec::INNER,
            outer: QuadratureSpec::OUTER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

// 21-point Kronrod extension of the 10-point Gauss rule. Abscissae are the
// non-negative half, largest first; odd indices are the Gauss nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_892_529_700,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    /// Error floor set by rounding; refining below it is pointless.
    floor: f64,
}

impl Panel {
    fn refinable(&self) -> bool {
        let mid = 0.5 * (self.a + self.b);
        self.error > self.floor && mid > self.a && mid < self.b
    }
}

fn checked<E, F>(f: &mut F, x: f64) -> Result<f64, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    let value = f(x)?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(QuadratureError::NonFinite { x, value }.into())
    }
}

fn gauss_kronrod_21<E, F>(f: &mut F, a: f64, b: f64) -> Result<Panel, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = checked(f, center)?;

    let mut kronrod = f_center * WGK[10];
    let mut gauss = 0.0;
    let mut res_abs = kronrod.abs();
    let mut samples = [(0.0, 0.0); 10];
    for (j, &x) in XGK[..10].iter().enumerate() {
        let dx = half * x;
        let lo = checked(f, center - dx)?;
        let hi = checked(f, center + dx)?;
        samples[j] = (lo, hi);
        kronrod += WGK[j] * (lo + hi);
        res_abs += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[10] * (f_center - mean).abs();
    for (j, (lo, hi)) in samples.iter().enumerate() {
        res_asc += WGK[j] * ((lo - mean).abs() + (hi - mean).abs());
    }

    let scale = half.abs();
    let res_abs = res_abs * scale;
    let res_asc = res_asc * scale;
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * res_abs;
    Ok(Panel {
        a,
        b,
        value: kronrod * half,
        error: error.max(floor),
        floor,
    })
}

/// Globally adaptive integration over consecutive panels `points[i]..points[i+1]`.
fn adaptive<E, F>(f: &mut F, points: &[f64], spec: &QuadratureSpec) -> Result<QuadratureResult, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    spec.validate()?;
    let mut panels = Vec::with_capacity(points.len() + 64);
    for pair in points.windows(2) {
        panels.push(gauss_kronrod_21(f, pair[0], pair[1])?);
    }
    let mut evaluations = 21 * panels.len();
    let mut subdivisions = 0;

    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= spec.tolerance(value) || subdivisions >= spec.max_subdivisions {
            break;
        }
        let worst = panels
            .iter()
            .enumerate()
            .filter(|(_, p)| p.refinable())
            .max_by(|(_, x), (_, y)| x.error.total_cmp(&y.error))
            .map(|(i, _)| i);
        let Some(worst) = worst else { break };
        let Panel { a, b, .. } = panels[worst];
        let mid = 0.5 * (a + b);
        panels[worst] = gauss_kronrod_21(f, a, mid)?;
        panels.push(gauss_kronrod_21(f, mid, b)?);
        evaluations += 42;
        subdivisions += 1;
    }

    // Position order keeps the reduction independent of refinement history.
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value: f64 = panels.iter().map(|p| p.value).sum();
    let error: f64 = panels.iter().map(|p| p.error).sum();
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        evaluations,
        converged: error <= spec.tolerance(value),
    })
}

fn check_points(points: &[f64]) -> Result<(), QuadratureError> {
    if points.len() < 2 {
        return Err(QuadratureError::InvalidSpec("at least two break points are required"));
    }
    for pair in points.windows(2) {
        if !(pair[0] < pair[1]) || !pair[0].is_finite() || !pair[1].is_finite() {
            return Err(QuadratureError::InvalidRange { a: pair[0], b: pair[1] });
        }
    }
    Ok(())
}

/// Builds sorted, de-duplicated break points: `start`, every interior
/// candidate strictly inside (start, end), then `end` if finite.
pub fn break_points(start: f64, end: f64, candidates: &[f64]) -> Vec<f64> {
    let mut points = vec![start];
    let mut inner: Vec<f64> = candidates
        .iter()
        .copied()
        .filter(|&x| x.is_finite() && x > start && x < end)
        .collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    points.extend(inner);
    if end.is_finite() {
        points.push(end);
    }
    points
}

/// ∫ f over [points[0], points[last]] with the given interior break points.
pub fn try_integrate_points<E, F>(mut f: F, points: &[f64], spec: &QuadratureSpec) -> Result<QuadratureResult, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    check_points(points)?;
    match spec.oscillation_period_hint {
        Some(period) => {
            let half = 0.5 * period;
            let mut refined = Vec::new();
            for pair in points.windows(2) {
                let count = (((pair[1] - pair[0]) / half).ceil() as usize).clamp(1, 1000);
                let step = (pair[1] - pair[0]) / count as f64;
                refined.extend((0..count).map(|i| pair[0] + i as f64 * step));
            }
            refined.push(*points.last().unwrap());
            adaptive(&mut f, &refined, spec)
        }
        None => adaptive(&mut f, points, spec),
    }
}

/// ∫ f over [points[0], ∞) through x = a + s·t/(1 − t), keeping the interior
/// break points as panel boundaries in t.
pub fn try_integrate_semi_infinite_points<E, F>(
    mut f: F,
    points: &[f64],
    decay_scale: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    if points.is_empty() {
        return Err(QuadratureError::InvalidSpec("a lower limit is required").into());
    }
    if !(decay_scale > 0.0 && decay_scale.is_finite()) {
        return Err(QuadratureError::InvalidSpec("decay_scale must be finite and > 0").into());
    }
    let a = points[0];
    let to_t = |x: f64| (x - a) / (decay_scale + (x - a));
    let mut mapped: Vec<f64> = points.iter().map(|&x| to_t(x)).collect();
    mapped.push(1.0);
    check_points(&mapped)?;
    let mut g = |t: f64| -> Result<f64, E> {
        let rest = 1.0 - t;
        if rest <= 0.0 {
            return Ok(0.0);
        }
        let x = a + decay_scale * t / rest;
        let fx = checked(&mut f, x)?;
        Ok(fx * decay_scale / (rest * rest))
    };
    adaptive(&mut g, &mapped, spec)
}

/// Maximum averaging depth of the Euler transform.
const EULER_DEPTH: usize = 10;

/// ∫ f over [a, b] for an integrand oscillating with the given period;
/// `b` may be `f64::INFINITY`.
pub fn try_integrate_oscillatory<E, F>(
    mut f: F,
    a: f64,
    b: f64,
    period: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<QuadratureError>,
{
    spec.validate()?;
    if !(period > 0.0 && period.is_finite()) {
        return Err(QuadratureError::InvalidSpec("period must be finite and > 0").into());
    }
    if !(a.is_finite() && b > a) {
        return Err(QuadratureError::InvalidRange { a, b }.into());
    }
    let half = 0.5 * period;
    if b.is_finite() {
        let panel_spec = QuadratureSpec {
            oscillation_period_hint: Some(period),
            ..*spec
        };
        return try_integrate_points(f, &[a, b], &panel_spec);
    }

    let mut partial_sums: Vec<f64> = Vec::new();
    let mut estimates: Vec<f64> = Vec::new();
    let mut panel_error = 0.0;
    let mut evaluations = 0;
    let mut running = 0.0_f64;
    let mut panel_converged = true;
    // Consecutive panels that no longer change the sum.
    let mut quiet_panels = 0usize;
    let mut k = 0usize;
    loop {
        let lo = a + k as f64 * half;
        let hi = a + (k + 1) as f64 * half;
        let panel_spec = QuadratureSpec {
            // Panel errors add up, so each panel gets a small slice of the budget.
            abs_tol: 0.05 * spec.abs_tol.max(spec.rel_tol * running.abs()),
            oscillation_period_hint: None,
            ..*spec
        };
        let panel = adaptive(&mut f, &[lo, hi], &panel_spec)?;
        evaluations += panel.evaluations;
        panel_error += panel.error_estimate;
        panel_converged &= panel.converged;
        let negligible = panel.value.abs() + panel.error_estimate <= f64::EPSILON * running.abs();
        quiet_panels = if negligible { quiet_panels + 1 } else { 0 };
        running += panel.value;
        partial_sums.push(running);
        estimates.push(euler_estimate(&partial_sums));
        k += 1;

        let n = estimates.len();
        if n >= 3 {
            let value = estimates[n - 1];
            let acceleration_error = (estimates[n - 1] - estimates[n - 2]).abs() + (estimates[n - 2] - estimates[n - 3]).abs();
            let error = panel_error + acceleration_error;
            let done = n > EULER_DEPTH && error <= spec.tolerance(value);
            let exhausted = quiet_panels > EULER_DEPTH;
            if done || exhausted || k >= spec.max_subdivisions {
                return Ok(QuadratureResult {
                    value,
                    error_estimate: error,
                    evaluations,
                    converged: panel_converged && error <= spec.tolerance(value),
                });
            }
        }
    }
}

/// Repeated averaging of the trailing partial sums: order-m mean
/// Σ C(m, j) S_{n−m+j} / 2^m with m = min(n, EULER_DEPTH).
fn euler_estimate(partial_sums: &[f64]) -> f64 {
    let n = partial_sums.len() - 1;
    let depth = n.min(EULER_DEPTH);
    let mut row: Vec<f64> = partial_sums[n - depth..].to_vec();
    while row.len() > 1 {
        row = row.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    row[0]
}

fn infallible<F: FnMut(f64) -> f64>(mut f: F) -> impl FnMut(f64) -> Result<f64, QuadratureError> {
    move |x| Ok(f(x))
}

pub fn integrate_finite<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadratureError> {
    if !(a < b && a.is_finite() && b.is_finite()) {
        return Err(QuadratureError::InvalidRange { a, b });
    }
    try_integrate_points(infallible(f), &[a, b], spec)
}

pub fn integrate_semi_infinite<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    spec: &QuadratureSpec,
    decay_scale: f64,
) -> Result<QuadratureResult, QuadratureError> {
    if !a.is_finite() {
        return Err(QuadratureError::InvalidRange { a, b: f64::INFINITY });
    }
    try_integrate_semi_infinite_points(infallible(f), &[a], decay_scale, spec)
}

pub fn integrate_oscillatory<F: FnMut(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    period: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult, QuadratureError> {
    try_integrate_oscillatory(infallible(f), a, b, period, spec)
}
