//! Real-frequency Lifshitz representation of the thermal correction to the
//! Casimir pressure between two identical half-spaces,
//!
//! F = −(ħ/π²) ∫ k⊥ dk⊥ ∫ dω n(ω) Im{ q Σ_s r_s² e^{−2lq} / (1 − r_s² e^{−2lq}) },
//!
//! with n(ω) the Bose occupation. The ω-integral is split at the light cone
//! into evanescent (ω < ck⊥) and propagating (ω > ck⊥) sectors, giving four
//! channels. For a lossy Drude metal the TE-evanescent channel also has a
//! dimensionless form in u = ω_p²l²ω/(νc²) and v = lq, which depends on the
//! material only through P = (ω_p l/c)² and a = ħν/(k_B T P).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{thermal_frequency, HBAR, SPEED_OF_LIGHT};
use crate::kernel::{self, Polarization, Sector, WavePoint};
use crate::materials::Material;
use crate::quadrature::{
    break_points, try_integrate_oscillatory, try_integrate_points, try_integrate_semi_infinite_points, NestedSpec,
    QuadratureResult, QuadratureSpec,
};
use crate::{Error, Result};

/// Beyond ħω/k_BT = this the Bose factor is below 10⁻⁸⁶ and the integrands
/// are truncated.
const BOSE_CUTOFF: f64 = 200.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Gap {
    /// Separation l in m.
    pub separation: f64,
    /// Temperature T in K.
    pub temperature: f64,
}

impl Gap {
    pub fn new(separation: f64, temperature: f64) -> Result<Self> {
        if !(separation > 0.0 && separation.is_finite()) {
            return Err(Error::domain("l", separation, "finite and > 0"));
        }
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::domain("T", temperature, "finite and > 0"));
        }
        Ok(Self {
            separation,
            temperature,
        })
    }

    fn thermal_frequency(&self) -> f64 {
        thermal_frequency(self.temperature)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Channel {
    pub polarization: Polarization,
    pub sector: Sector,
}

impl Channel {
    pub const TE_EVANESCENT: Self = Self::new(Polarization::TE, Sector::Evanescent);
    pub const TE_PROPAGATING: Self = Self::new(Polarization::TE, Sector::Propagating);
    pub const TM_EVANESCENT: Self = Self::new(Polarization::TM, Sector::Evanescent);
    pub const TM_PROPAGATING: Self = Self::new(Polarization::TM, Sector::Propagating);

    pub const ALL: [Self; 4] = [
        Self::TE_EVANESCENT,
        Self::TE_PROPAGATING,
        Self::TM_EVANESCENT,
        Self::TM_PROPAGATING,
    ];

    pub const fn new(polarization: Polarization, sector: Sector) -> Self {
        Self { polarization, sector }
    }

    /// Short label such as `te_evanescent`.
    pub fn label(&self) -> &'static str {
        match (self.polarization, self.sector) {
            (Polarization::TE, Sector::Evanescent) => "te_evanescent",
            (Polarization::TE, Sector::Propagating) => "te_propagating",
            (Polarization::TM, Sector::Evanescent) => "tm_evanescent",
            (Polarization::TM, Sector::Propagating) => "tm_propagating",
        }
    }
}

/// A computed quantity with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
    pub evaluations: usize,
}

impl Estimate {
    pub const ZERO: Self = Self {
        value: 0.0,
        error: 0.0,
        converged: true,
        evaluations: 0,
    };

    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.error / self.value.abs()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChannelPressure {
    pub channel: Channel,
    pub pressure: Estimate,
}

/// Thermal correction split into the four channels, in Pa.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureBreakdown {
    pub gap: Gap,
    pub channels: [ChannelPressure; 4],
    pub total: Estimate,
}

impl PressureBreakdown {
    fn from_channels(gap: Gap, channels: [ChannelPressure; 4]) -> Self {
        let total = channels.iter().fold(Estimate::ZERO, |acc, c| Estimate {
            value: acc.value + c.pressure.value,
            error: acc.error + c.pressure.error,
            converged: acc.converged && c.pressure.converged,
            evaluations: acc.evaluations + c.pressure.evaluations,
        });
        Self { gap, channels, total }
    }

    pub fn get(&self, channel: Channel) -> Estimate {
        self.channels
            .iter()
            .find(|c| c.channel == channel)
            .map(|c| c.pressure)
            .expect("every channel is present")
    }

    pub fn converged(&self) -> bool {
        self.total.converged
    }

    /// Signed ratio channel / total; NaN when the total vanishes.
    pub fn share(&self, channel: Channel) -> f64 {
        self.get(channel).value / self.total.value
    }

    /// |channel| / Σ|channels|; NaN when every channel vanishes.
    pub fn magnitude_share(&self, channel: Channel) -> f64 {
        let sum: f64 = self.channels.iter().map(|c| c.pressure.value.abs()).sum();
        self.get(channel).value.abs() / sum
    }
}

/// Bose occupation 1/(e^{ħω/k_BT} − 1).
pub fn bose_factor(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain("ω", omega, "finite and > 0"));
    }
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::domain("T", temperature, "finite and > 0"));
    }
    Ok(bose(omega / thermal_frequency(temperature)))
}

/// 1/(e^x − 1); expm1 keeps full precision for tiny x and the result
/// underflows cleanly to 0 for large x.
#[inline]
pub(crate) fn bose(x: f64) -> f64 {
    1.0 / x.exp_m1()
}

/// Im{ q r² e^{−2lq} / (1 − r² e^{−2lq}) } at one (ω, k⊥).
///
/// The denominator is divided by q analytically,
/// (1 − x)/q = (1 − r)(1 + r)/q + r²(1 − e^{−2lq})/q, so the expression
/// stays finite and accurate on the light cone where q → 0 and x → 1.
fn channel_kernel(material: &Material, l: f64, point: &WavePoint, pol: Polarization) -> Result<f64> {
    let eps = material.permittivity(point.omega())?;
    let q = kernel::vacuum_momentum_q(point);
    let k = kernel::medium_momentum_k(point, eps);
    let k0 = point.omega() / SPEED_OF_LIGHT;
    let pole = || Error::Pole {
        omega: point.omega(),
        k_perp: point.k_perp(),
    };
    let r = kernel::reflection(q, k, eps, (1.0 - eps) * (k0 * k0), pol).ok_or_else(pole)?;
    let one_minus_r2_over_q = match pol {
        Polarization::TE => 4.0 * k / ((q + k) * (q + k)),
        Polarization::TM => 4.0 * eps * k / ((eps * q + k) * (eps * q + k)),
    };
    let decay = (-2.0 * l * q).exp();
    let lq = l * q;
    let loss_over_q = if lq.norm() < 1e-4 {
        2.0 * l * (1.0 - lq + lq * lq * (2.0 / 3.0))
    } else {
        (1.0 - decay) / q
    };
    let x = r * r * decay;
    let denominator = one_minus_r2_over_q + r * r * loss_over_q;
    if denominator.norm() == 0.0 {
        return Err(pole());
    }
    Ok((x / denominator).im)
}

/// Collects the inner integrations seen by an outer integrand. An inner
/// result counts against convergence only if its error, weighted like the
/// outer integrand, is visible next to the largest weighted inner value.
#[derive(Debug)]
struct InnerStats {
    /// (weighted value, weighted error, converged) per inner call.
    calls: Vec<(f64, f64, bool)>,
    evaluations: usize,
    rel_tol: f64,
}

impl InnerStats {
    fn new(spec: &QuadratureSpec) -> Self {
        Self {
            calls: Vec::new(),
            evaluations: 0,
            rel_tol: spec.rel_tol,
        }
    }

    fn record(&mut self, r: &QuadratureResult, weight: f64) {
        let weight = weight.abs();
        self.calls.push((weight * r.value, weight * r.error_estimate, r.converged));
        self.evaluations += r.evaluations;
    }

    fn combine(&self, outer: QuadratureResult, factor: f64) -> Estimate {
        let peak = self.calls.iter().map(|c| c.0.abs()).fold(0.0, f64::max);
        let (worst, converged) = if peak > 0.0 {
            let worst = self.calls.iter().map(|c| c.1 / peak).fold(0.0, f64::max);
            let converged = self.calls.iter().all(|&(_, err, ok)| ok || err <= self.rel_tol * peak);
            (worst, converged)
        } else {
            (0.0, self.calls.iter().all(|c| c.2))
        };
        let value = factor * outer.value;
        Estimate {
            value,
            error: factor.abs() * outer.error_estimate + worst * value.abs(),
            converged: outer.converged && converged,
            evaluations: outer.evaluations + self.evaluations,
        }
    }
}

/// Reference scale of the evanescent inner variable: ν/P (so that the
/// variable is u) for a lossy Drude metal, k_BT/ħ otherwise.
fn evanescent_frequency_scale(gap: &Gap, material: &Material) -> f64 {
    if material.is_lossy() {
        material.relaxation / kernel::coupling_parameter(material, gap.separation)
    } else {
        gap.thermal_frequency()
    }
}

/// ∫ dω n(ω) Im{…} over 0 < ω < ck⊥ at fixed k⊥.
fn evanescent_inner(
    gap: &Gap,
    material: &Material,
    pol: Polarization,
    k_perp: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    let l = gap.separation;
    let w_t = gap.thermal_frequency();
    let cone = SPEED_OF_LIGHT * k_perp;
    let end = cone.min(BOSE_CUTOFF * w_t);
    let scale = evanescent_frequency_scale(gap, material);

    let nu = material.relaxation;
    let coupling = kernel::coupling_parameter(material, l);
    let v_perp = l * k_perp;
    let mut candidates = vec![w_t, 10.0 * w_t, 100.0 * w_t];
    if material.is_lossy() {
        for u in [v_perp * v_perp, 1.0, 10.0, coupling, 10.0 * coupling] {
            candidates.push(nu * u / coupling);
        }
    }
    // The TM coefficient varies on a scale set by |ε| right below the cone.
    candidates.extend((1..=8).map(|j| cone * (1.0 - 10f64.powi(-j))));
    let points: Vec<f64> = break_points(0.0, end, &candidates).iter().map(|w| w / scale).collect();

    let f = |t: f64| -> Result<f64> {
        let omega = t * scale;
        let point = WavePoint::new(omega, k_perp)?;
        Ok(bose(omega / w_t) * channel_kernel(material, l, &point, pol)?)
    };
    let r = try_integrate_points(f, &points, spec)?;
    Ok(QuadratureResult {
        value: r.value * scale,
        error_estimate: r.error_estimate * scale,
        ..r
    })
}

/// ∫ dω n(ω) Im{…} over ω > ck⊥ at fixed k⊥, written as an integral over
/// k_z = √(ω²/c² − k⊥²), where e^{2ilk_z} has the constant period π/l.
fn propagating_inner(
    gap: &Gap,
    material: &Material,
    pol: Polarization,
    k_perp: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    let l = gap.separation;
    let w_t = gap.thermal_frequency();
    let f = |k_z: f64| -> Result<f64> {
        let omega = SPEED_OF_LIGHT * k_perp.hypot(k_z);
        let x = omega / w_t;
        if x > BOSE_CUTOFF {
            return Ok(0.0);
        }
        let point = WavePoint::new(omega, k_perp)?;
        let jacobian = SPEED_OF_LIGHT * SPEED_OF_LIGHT * k_z / omega;
        Ok(bose(x) * channel_kernel(material, l, &point, pol)? * jacobian)
    };

    let period = std::f64::consts::PI / l;
    let head_end = 0.5 * period;
    let k_t = w_t / SPEED_OF_LIGHT;
    let mut candidates: Vec<f64> = (1..=6).map(|j| k_perp * 10f64.powi(-j)).collect();
    candidates.extend([0.1 * k_t, k_t, 10.0 * k_t]);
    if material.is_lossy() {
        let k_nu = material.relaxation / SPEED_OF_LIGHT;
        if k_nu > k_perp {
            candidates.push((k_nu - k_perp).sqrt() * (k_nu + k_perp).sqrt());
        }
    }
    let mut f = f;
    let head = try_integrate_points(&mut f, &break_points(0.0, head_end, &candidates), spec)?;
    if SPEED_OF_LIGHT * k_perp.hypot(head_end) > BOSE_CUTOFF * w_t {
        return Ok(head);
    }
    let tail_spec = spec.with_abs_tol(spec.abs_tol.max(0.5 * spec.rel_tol * head.value.abs()));
    let tail = try_integrate_oscillatory(&mut f, head_end, f64::INFINITY, period, &tail_spec)?;
    Ok(QuadratureResult {
        value: head.value + tail.value,
        error_estimate: head.error_estimate + tail.error_estimate,
        evaluations: head.evaluations + tail.evaluations,
        converged: head.converged && tail.converged,
    })
}

/// Thermal correction restricted to one channel, in Pa.
///
/// For a lossless metal only the TE evanescent channel is reliable; the other
/// channels come back flagged as not converged.
pub fn thermal_pressure_channel(gap: &Gap, material: &Material, channel: Channel, spec: &NestedSpec) -> Result<Estimate> {
    spec.validate()?;
    if material.is_vacuum() {
        return Ok(Estimate::ZERO);
    }
    let l = gap.separation;
    let k_t = gap.thermal_frequency() / SPEED_OF_LIGHT;
    let prefactor = -HBAR / (std::f64::consts::PI * std::f64::consts::PI);
    let mut stats = InnerStats::new(&spec.inner);

    let outer = match channel.sector {
        Sector::Evanescent => {
            let mut candidates = vec![0.1 * k_t, k_t, 10.0 * k_t, BOSE_CUTOFF * k_t];
            candidates.extend([0.1, 0.3, 1.0, 3.0, 10.0, 30.0].map(|s| s / l));
            if material.is_lossy() {
                candidates.push(material.relaxation / SPEED_OF_LIGHT);
            }
            let points = break_points(0.0, f64::INFINITY, &candidates);
            let f = |k_perp: f64| -> Result<f64> {
                if k_perp == 0.0 {
                    return Ok(0.0);
                }
                let r = evanescent_inner(gap, material, channel.polarization, k_perp, &spec.inner)?;
                stats.record(&r, k_perp);
                Ok(k_perp * r.value)
            };
            try_integrate_semi_infinite_points(f, &points, 0.5 / l, &spec.outer)?
        }
        Sector::Propagating => {
            let end = BOSE_CUTOFF * k_t;
            let mut candidates = vec![0.1 * k_t, k_t, 3.0 * k_t, 10.0 * k_t, 30.0 * k_t, 1.0 / l];
            if material.is_lossy() {
                candidates.push(material.relaxation / SPEED_OF_LIGHT);
            }
            let points = break_points(0.0, end, &candidates);
            let f = |k_perp: f64| -> Result<f64> {
                let r = propagating_inner(gap, material, channel.polarization, k_perp, &spec.inner)?;
                stats.record(&r, k_perp);
                Ok(k_perp * r.value)
            };
            try_integrate_points(f, &points, &spec.outer)?
        }
    };
    let mut estimate = stats.combine(outer, prefactor);
    estimate.converged &= !has_lossless_modes(material, channel);
    Ok(estimate)
}

/// Without absorption the gap modes (coupled surface plasmons for TM
/// evanescent waves, |r| = 1 cavity resonances for propagating waves) are
/// δ-functions on the real axis that quadrature cannot resolve. Only the TE
/// evanescent channel, where |r_TE| < 1, is free of them.
fn has_lossless_modes(material: &Material, channel: Channel) -> bool {
    !material.is_lossy() && !material.is_vacuum() && channel != Channel::TE_EVANESCENT
}

/// All four channels and their sum.
pub fn thermal_pressure_total(gap: &Gap, material: &Material, spec: &NestedSpec) -> Result<PressureBreakdown> {
    let results: Vec<Result<Estimate>> = Channel::ALL
        .par_iter()
        .map(|&channel| thermal_pressure_channel(gap, material, channel, spec))
        .collect();
    let mut channels = [ChannelPressure {
        channel: Channel::TE_EVANESCENT,
        pressure: Estimate::ZERO,
    }; 4];
    for ((slot, channel), result) in channels.iter_mut().zip(Channel::ALL).zip(results) {
        *slot = ChannelPressure {
            channel,
            pressure: result?,
        };
    }
    Ok(PressureBreakdown::from_channels(*gap, channels))
}

/// The same thermal correction with the integration order reversed (outer ω,
/// inner k⊥ over the whole half-line, both polarizations together) and no
/// sector split. Slower; used to check channel additivity.
pub fn thermal_pressure_unsplit(gap: &Gap, material: &Material, spec: &NestedSpec) -> Result<Estimate> {
    spec.validate()?;
    if material.is_vacuum() {
        return Ok(Estimate::ZERO);
    }
    let l = gap.separation;
    let w_t = gap.thermal_frequency();
    let prefactor = -HBAR / (std::f64::consts::PI * std::f64::consts::PI);
    let mut stats = InnerStats::new(&spec.inner);

    let inner = |omega: f64| -> Result<QuadratureResult> {
        let cone = omega / SPEED_OF_LIGHT;
        let mut candidates: Vec<f64> = (1..=8).flat_map(|j| [cone * (1.0 - 10f64.powi(-j)), cone * (1.0 + 10f64.powi(-j))]).collect();
        candidates.extend([cone, 0.1 / l, 1.0 / l, 3.0 / l, 10.0 / l]);
        let points = break_points(0.0, f64::INFINITY, &candidates);
        let f = |k_perp: f64| -> Result<f64> {
            if k_perp == 0.0 {
                return Ok(0.0);
            }
            let point = WavePoint::new(omega, k_perp)?;
            let mut sum = 0.0;
            for pol in [Polarization::TE, Polarization::TM] {
                sum += channel_kernel(material, l, &point, pol)?;
            }
            Ok(k_perp * sum)
        };
        try_integrate_semi_infinite_points(f, &points, 0.5 / l, &spec.inner)
    };

    let mut candidates = vec![1e-6 * w_t, 1e-4 * w_t, 1e-2 * w_t, 0.1 * w_t, w_t, 10.0 * w_t];
    if material.is_lossy() {
        candidates.push(material.relaxation);
    }
    let points = break_points(0.0, BOSE_CUTOFF * w_t, &candidates);
    let f = |omega: f64| -> Result<f64> {
        let r = inner(omega)?;
        let weight = bose(omega / w_t);
        stats.record(&r, weight);
        Ok(weight * r.value)
    };
    let outer = try_integrate_points(f, &points, &spec.outer)?;
    let mut estimate = stats.combine(outer, prefactor);
    estimate.converged &= material.is_lossy();
    Ok(estimate)
}

/// Dimensionless groups of the TE-evanescent integral: the coupling
/// P = (ω_p l/c)² and the Bose scale a = ħν/(k_BT P).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionlessGroups {
    pub a: f64,
    pub coupling: f64,
    /// ν in rad/s, needed to map u back to ω.
    pub relaxation: f64,
}

impl DimensionlessGroups {
    /// Requires a lossy Drude material.
    pub fn new(gap: &Gap, material: &Material) -> Result<Self> {
        if !material.is_lossy() {
            return Err(Error::domain(
                "ν",
                material.relaxation,
                "> 0 with the Drude model (the dimensionless form scales by ν)",
            ));
        }
        let coupling = kernel::coupling_parameter(material, gap.separation);
        Ok(Self {
            a: HBAR * material.relaxation / (crate::constants::BOLTZMANN * gap.temperature) / coupling,
            coupling,
            relaxation: material.relaxation,
        })
    }

    /// ω = νu/P.
    pub fn omega_of_u(&self, u: f64) -> f64 {
        self.relaxation * u / self.coupling
    }

    pub fn u_of_omega(&self, omega: f64) -> f64 {
        omega * self.coupling / self.relaxation
    }
}

/// Im[1 − e^{2v}/r_TE²]^{−1}, evaluated as −Im[x/(1 − x)] with x = r²e^{−2v}.
#[inline]
pub(crate) fn te_im_term(u: f64, v: f64, coupling: f64) -> f64 {
    let r = kernel::te_scaled(u, v, coupling);
    let x: Complex64 = r * r * (-2.0 * v).exp();
    -(x / (1.0 - x)).im
}

/// g(v): the u-integral of Bose(a u) · Im[1 − e^{2v}/r_TE²]^{−1}.
pub fn g_of_v(v: f64, groups: &DimensionlessGroups, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::domain("v", v, "finite and > 0"));
    }
    let DimensionlessGroups { a, coupling, .. } = *groups;
    let f = |u: f64| -> Result<f64> {
        if u == 0.0 {
            return Ok(0.0);
        }
        Ok(bose(a * u) * te_im_term(u, v, coupling))
    };
    let candidates = [
        v * v,
        0.1 * v * v,
        10.0 * v * v,
        1.0,
        10.0,
        coupling,
        10.0 * coupling,
        1.0 / a,
        10.0 / a,
        100.0 / a,
    ];
    let points = break_points(0.0, BOSE_CUTOFF / a, &candidates);
    Ok(try_integrate_points(f, &points, spec)?)
}

/// Frequency density at fixed u: Bose(a u) · ∫₀^∞ dv v² Im[1 − e^{2v}/r_TE²]^{−1}.
pub fn u_density(u: f64, groups: &DimensionlessGroups, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::domain("u", u, "finite and > 0"));
    }
    let DimensionlessGroups { a, coupling, .. } = *groups;
    let weight = bose(a * u);
    if weight == 0.0 {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        });
    }
    let f = |v: f64| -> Result<f64> { Ok(v * v * te_im_term(u, v, coupling)) };
    let candidates = [u.sqrt(), 0.1, 0.3, 1.0, 3.0, 10.0, 30.0];
    let points = break_points(0.0, f64::INFINITY, &candidates);
    let r: QuadratureResult = try_integrate_semi_infinite_points(f, &points, 1.0, spec)?;
    Ok(QuadratureResult {
        value: weight * r.value,
        error_estimate: weight * r.error_estimate,
        ..r
    })
}

/// ∫₀^∞ dv v² g(v), the pure number of the dimensionless TE-evanescent form.
pub fn dimensionless_integral(groups: &DimensionlessGroups, spec: &NestedSpec) -> Result<Estimate> {
    spec.validate()?;
    let mut stats = InnerStats::new(&spec.inner);
    let f = |v: f64| -> Result<f64> {
        if v == 0.0 {
            return Ok(0.0);
        }
        let r = g_of_v(v, groups, &spec.inner)?;
        stats.record(&r, v * v);
        Ok(v * v * r.value)
    };
    let points = break_points(0.0, f64::INFINITY, &[0.01, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0]);
    let outer = try_integrate_semi_infinite_points(f, &points, 1.0, &spec.outer)?;
    Ok(stats.combine(outer, 1.0))
}

/// ħνc²/(π²ω_p²l⁵), converting the dimensionless integral to Pa.
pub fn dimensionless_prefactor(gap: &Gap, material: &Material) -> f64 {
    let l = gap.separation;
    HBAR * material.relaxation * SPEED_OF_LIGHT * SPEED_OF_LIGHT
        / (std::f64::consts::PI.powi(2) * material.plasma_frequency.powi(2) * l.powi(5))
}

/// TE-evanescent thermal correction from the dimensionless (u, v) form, in Pa.
/// Only defined for a lossy Drude metal.
pub fn te_evanescent_dimensionless(gap: &Gap, material: &Material, spec: &NestedSpec) -> Result<Estimate> {
    let groups = DimensionlessGroups::new(gap, material)?;
    let integral = dimensionless_integral(&groups, spec)?;
    let factor = dimensionless_prefactor(gap, material);
    Ok(Estimate {
        value: factor * integral.value,
        error: factor * integral.error,
        ..integral
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::DielectricModel;

    fn gold() -> Material {
        Material::preset("Au-paper").unwrap()
    }

    fn gap162() -> Gap {
        Gap::new(162e-9, 300.0).unwrap()
    }

    #[test]
    fn gap_validation() {
        assert!(Gap::new(0.0, 300.0).is_err());
        assert!(Gap::new(-5e-9, 300.0).is_err());
        assert!(Gap::new(1e-7, 0.0).is_err());
        assert!(Gap::new(f64::NAN, 300.0).is_err());
    }

    #[test]
    fn bose_factor_examples() {
        let t = 300.0;
        let w_t = thermal_frequency(t);
        assert!((bose_factor(std::f64::consts::LN_2 * w_t, t).unwrap() - 1.0).abs() < 1e-14);
        let small = bose_factor(1e-10 * w_t, t).unwrap();
        assert!((small * 1e-10 - 1.0).abs() < 1e-6);
        let tail = bose_factor(40.0 * w_t, t).unwrap();
        assert!((tail / (-40f64).exp() - 1.0).abs() < 1e-12);
        assert_eq!(bose(1e4), 0.0);
        assert!(bose_factor(0.0, t).is_err());
        assert!(bose_factor(1.0, 0.0).is_err());
    }

    #[test]
    fn coupling_and_bose_scale_for_gold() {
        let g = DimensionlessGroups::new(&gap162(), &gold()).unwrap();
        assert!((g.coupling - 54.59).abs() < 0.01, "{}", g.coupling);
        assert!((g.a / 0.0249 - 1.0).abs() < 5e-3, "a = {}", g.a);
        assert!((g.omega_of_u(g.u_of_omega(3e13)) / 3e13 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimensionless_form_requires_relaxation() {
        let plasma = Material::preset("Au-plasma").unwrap();
        assert!(matches!(
            te_evanescent_dimensionless(&gap162(), &plasma, &NestedSpec::default()),
            Err(Error::Domain { .. })
        ));
        assert!(DimensionlessGroups::new(&gap162(), &Material::vacuum()).is_err());
    }

    #[test]
    fn v_density_vanishes_at_both_ends() {
        let g = DimensionlessGroups::new(&gap162(), &gold()).unwrap();
        let spec = QuadratureSpec::INNER;
        let density = |v: f64| v * v * g_of_v(v, &g, &spec).unwrap().value;
        let peak = density(0.6);
        assert!(peak > 0.0);
        assert!(density(1e-4) < 1e-3 * peak);
        assert!(density(40.0) < 1e-12 * peak);
    }

    #[test]
    fn drude_te_integrand_small_at_low_frequency() {
        let m = gold();
        let gap = gap162();
        let k_perp = 1.0 / gap.separation;
        let integrand = |omega: f64| {
            let p = WavePoint::new(omega, k_perp).unwrap();
            bose(omega / gap.thermal_frequency()) * channel_kernel(&m, gap.separation, &p, Polarization::TE).unwrap()
        };
        let max = (0..400)
            .map(|i| integrand(10f64.powf(9.0 + 6.0 * i as f64 / 399.0)).abs())
            .fold(0.0, f64::max);
        assert!(integrand(1e8).abs() * 1e3 <= max, "{} vs {max}", integrand(1e8));
    }

    #[test]
    fn vacuum_gives_exact_zero() {
        let b = thermal_pressure_total(&gap162(), &Material::vacuum(), &NestedSpec::default()).unwrap();
        assert_eq!(b.total, Estimate::ZERO);
        for c in b.channels {
            assert_eq!(c.pressure.value, 0.0);
        }
    }

    #[test]
    fn plasma_te_evanescent_is_negligible() {
        let spec = NestedSpec::default();
        let plasma = Material::preset("Au-plasma").unwrap();
        assert_eq!(plasma.model, DielectricModel::Plasma);
        let p = thermal_pressure_channel(&gap162(), &plasma, Channel::TE_EVANESCENT, &spec).unwrap();
        let d = thermal_pressure_channel(&gap162(), &gold(), Channel::TE_EVANESCENT, &spec).unwrap();
        assert!(p.value.abs() < 1e-3 * d.value.abs(), "{} vs {}", p.value, d.value);
        assert!(p.converged);
        let tm = thermal_pressure_channel(&gap162(), &plasma, Channel::TM_EVANESCENT, &spec).unwrap();
        assert!(!tm.converged);
    }

    #[test]
    fn channel_labels_are_distinct() {
        let mut labels: Vec<_> = Channel::ALL.iter().map(Channel::label).collect();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), 4);
    }
}
