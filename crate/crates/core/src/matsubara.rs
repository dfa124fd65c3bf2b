//! Imaginary-frequency (Matsubara) form of the Casimir pressure, used as an
//! independent oracle for the real-frequency thermal correction.
//!
//! P(T) = −(k_BT/π) Σ'_n ∫_{ξ_n/c}^∞ q² dq Σ_s r_s² e^{−2ql} / (1 − r_s² e^{−2ql}),
//! ξ_n = 2πn k_BT/ħ, with the n = 0 term halved. At T = 0 the sum becomes
//! (ħ/2π k_BT) ∫ dξ. On the imaginary axis ε(iξ) is real, so everything here
//! is evaluated in real arithmetic.

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{thermal_frequency, HBAR, SPEED_OF_LIGHT};
use crate::kernel::Polarization;
use crate::lifshitz::{Estimate, Gap};
use crate::materials::{DielectricModel, Material};
use crate::quadrature::{break_points, try_integrate_semi_infinite_points, QuadratureResult, QuadratureSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MatsubaraSpec {
    /// Terms summed before giving up on the tail criterion.
    pub n_max: usize,
    pub tail_rel_tol: f64,
}

impl MatsubaraSpec {
    pub fn new(n_max: usize, tail_rel_tol: f64) -> Result<Self> {
        let spec = Self { n_max, tail_rel_tol };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max < 1 {
            return Err(Error::config("n_max", "must be at least 1"));
        }
        if !(self.tail_rel_tol > 0.0 && self.tail_rel_tol < 1.0) {
            return Err(Error::config("tail_rel_tol", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

impl Default for MatsubaraSpec {
    fn default() -> Self {
        Self {
            n_max: 2000,
            tail_rel_tol: 1e-9,
        }
    }
}

/// Reflection at imaginary frequency iξ.
pub trait ImaginaryAxisResponse: Sync {
    /// r_s(iξ, q) for q ≥ ξ/c; at ξ = 0 the ξ → 0 limit.
    fn reflection(&self, xi: f64, q: f64, pol: Polarization) -> f64;

    /// True when every reflection coefficient vanishes.
    fn is_transparent(&self) -> bool {
        false
    }
}

impl ImaginaryAxisResponse for Material {
    fn reflection(&self, xi: f64, q: f64, pol: Polarization) -> f64 {
        if self.model == DielectricModel::Vacuum {
            return 0.0;
        }
        // k² − q² = (ε − 1)ξ²/c², finite at ξ = 0.
        let excess = self.imag_axis_excess(xi) / (SPEED_OF_LIGHT * SPEED_OF_LIGHT);
        let k = (q * q + excess).sqrt();
        match pol {
            Polarization::TE => -excess / ((q + k) * (q + k)),
            // ε(iξ) → ∞ as ξ → 0 for both metal models.
            Polarization::TM if xi == 0.0 => 1.0,
            Polarization::TM => {
                let eps = 1.0 + self.imag_axis_excess(xi) / (xi * xi);
                (eps * q - k) / (eps * q + k)
            }
        }
    }

    fn is_transparent(&self) -> bool {
        self.model == DielectricModel::Vacuum
    }
}

/// Perfect reflector: r_TM = 1, r_TE = −1 at every frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IdealMetal;

impl ImaginaryAxisResponse for IdealMetal {
    fn reflection(&self, _xi: f64, _q: f64, pol: Polarization) -> f64 {
        match pol {
            Polarization::TM => 1.0,
            Polarization::TE => -1.0,
        }
    }
}

/// q² r² e^{−2ql}/(1 − r² e^{−2ql}) with the denominator written as
/// (1 − r²) − r² expm1(−2ql) to stay accurate when r² → 1 and q → 0.
#[inline]
fn integrand(r: f64, q: f64, l: f64) -> f64 {
    let r2 = r * r;
    if r2 == 0.0 {
        return 0.0;
    }
    let decay = (-2.0 * q * l).exp();
    let den = (1.0 - r2) - r2 * (-2.0 * q * l).exp_m1();
    q * q * r2 * decay / den
}

/// ∫_{ξ/c}^∞ q² dq r² e^{−2ql}/(1 − r² e^{−2ql}) for one polarization, in 1/m³.
pub fn frequency_integral<R: ImaginaryAxisResponse + ?Sized>(
    gap: &Gap,
    response: &R,
    xi: f64,
    pol: Polarization,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(Error::domain("ξ", xi, "finite and ≥ 0"));
    }
    let l = gap.separation;
    let q0 = xi / SPEED_OF_LIGHT;
    let f = |q: f64| -> Result<f64> {
        if q == 0.0 {
            return Ok(0.0);
        }
        Ok(integrand(response.reflection(xi, q, pol), q, l))
    };
    let points = break_points(q0, f64::INFINITY, &[q0 + 0.1 / l, q0 + 1.0 / l, q0 + 5.0 / l, q0 + 20.0 / l]);
    Ok(try_integrate_semi_infinite_points(f, &points, 0.5 / l, spec)?)
}

fn both_polarizations<R: ImaginaryAxisResponse + ?Sized>(
    gap: &Gap,
    response: &R,
    xi: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    let te = frequency_integral(gap, response, xi, Polarization::TE, spec)?;
    let tm = frequency_integral(gap, response, xi, Polarization::TM, spec)?;
    Ok(QuadratureResult {
        value: te.value + tm.value,
        error_estimate: te.error_estimate + tm.error_estimate,
        evaluations: te.evaluations + tm.evaluations,
        converged: te.converged && tm.converged,
    })
}

/// n-th Matsubara frequency 2πn k_BT/ħ.
pub fn matsubara_frequency(n: usize, temperature: f64) -> f64 {
    2.0 * std::f64::consts::PI * n as f64 * thermal_frequency(temperature)
}

/// Pressure contribution of the n = 0 term of one polarization, in Pa
/// (already carrying the ½ weight).
pub fn zero_frequency_pressure<R: ImaginaryAxisResponse + ?Sized>(
    gap: &Gap,
    response: &R,
    pol: Polarization,
    spec: &QuadratureSpec,
) -> Result<Estimate> {
    let r = frequency_integral(gap, response, 0.0, pol, spec)?;
    let factor = -0.5 * crate::constants::BOLTZMANN * gap.temperature / std::f64::consts::PI;
    Ok(Estimate {
        value: factor * r.value,
        error: factor.abs() * r.error_estimate,
        converged: r.converged,
        evaluations: r.evaluations,
    })
}

/// Terms evaluated per parallel batch; the reduction order stays sequential.
const BATCH: usize = 16;

/// Casimir pressure at temperature T from the Matsubara sum, in Pa.
pub fn pressure_matsubara<R: ImaginaryAxisResponse + ?Sized>(
    gap: &Gap,
    response: &R,
    mspec: &MatsubaraSpec,
    qspec: &QuadratureSpec,
) -> Result<Estimate> {
    mspec.validate()?;
    qspec.validate()?;
    if response.is_transparent() {
        return Ok(Estimate::ZERO);
    }
    let prefactor = -crate::constants::BOLTZMANN * gap.temperature / std::f64::consts::PI;

    let mut sum = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    let mut converged = true;
    let mut previous: Option<f64> = None;
    let mut n = 0;
    let mut tail: Option<f64> = None;
    'outer: while n <= mspec.n_max {
        let upper = (n + BATCH).min(mspec.n_max + 1);
        let terms: Vec<Result<QuadratureResult>> = (n..upper)
            .into_par_iter()
            .map(|j| both_polarizations(gap, response, matsubara_frequency(j, gap.temperature), qspec))
            .collect();
        for (j, term) in (n..upper).zip(terms) {
            let term = term?;
            let weight = if j == 0 { 0.5 } else { 1.0 };
            let value = weight * term.value;
            sum += value;
            error += weight * term.error_estimate;
            evaluations += term.evaluations;
            converged &= term.converged;
            if let Some(prev) = previous {
                let ratio = value / prev;
                if j >= 2 && ratio > 0.0 && ratio < 1.0 {
                    let estimate = value * ratio / (1.0 - ratio);
                    if estimate.abs() < mspec.tail_rel_tol * sum.abs() {
                        tail = Some(estimate);
                        break 'outer;
                    }
                }
            }
            previous = Some(value);
        }
        n = upper;
    }
    let (tail, tail_converged) = match tail {
        Some(t) => (t, true),
        None => (0.0, false),
    };
    Ok(Estimate {
        value: prefactor * (sum + tail),
        error: prefactor.abs() * (error + tail.abs()),
        converged: converged && tail_converged,
        evaluations,
    })
}

/// Casimir pressure at T = 0, in Pa: −(ħ/2π²) ∫₀^∞ dξ (same integrand).
pub fn pressure_zero_temperature<R: ImaginaryAxisResponse + ?Sized>(
    gap: &Gap,
    response: &R,
    qspec: &QuadratureSpec,
) -> Result<Estimate> {
    qspec.validate()?;
    if response.is_transparent() {
        return Ok(Estimate::ZERO);
    }
    let l = gap.separation;
    let scale = SPEED_OF_LIGHT / l;
    let mut inner_error = 0.0_f64;
    let mut inner_converged = true;
    let mut inner_evaluations = 0;
    let f = |xi: f64| -> Result<f64> {
        let r = both_polarizations(gap, response, xi, qspec)?;
        inner_error = inner_error.max(if r.value != 0.0 { r.error_estimate / r.value.abs() } else { 0.0 });
        inner_converged &= r.converged;
        inner_evaluations += r.evaluations;
        Ok(r.value)
    };
    let points = break_points(0.0, f64::INFINITY, &[0.01 * scale, 0.1 * scale, scale, 5.0 * scale, 20.0 * scale]);
    let outer = try_integrate_semi_infinite_points(f, &points, 0.5 * scale, qspec)?;
    let prefactor = -HBAR / (2.0 * std::f64::consts::PI * std::f64::consts::PI);
    let value = prefactor * outer.value;
    Ok(Estimate {
        value,
        error: prefactor.abs() * outer.error_estimate + inner_error * value.abs(),
        converged: outer.converged && inner_converged,
        evaluations: outer.evaluations + inner_evaluations,
    })
}

/// P(T) − P(0), in Pa.
pub fn thermal_correction_oracle<R: ImaginaryAxisResponse + ?Sized>(
    gap: &Gap,
    response: &R,
    mspec: &MatsubaraSpec,
    qspec: &QuadratureSpec,
) -> Result<Estimate> {
    let (finite, zero) = rayon::join(
        || pressure_matsubara(gap, response, mspec, qspec),
        || pressure_zero_temperature(gap, response, qspec),
    );
    let (finite, zero) = (finite?, zero?);
    Ok(Estimate {
        value: finite.value - zero.value,
        error: finite.error + zero.error,
        converged: finite.converged && zero.converged,
        evaluations: finite.evaluations + zero.evaluations,
    })
}
