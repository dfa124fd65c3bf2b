//! Electromagnetic kernel on the real frequency axis: vacuum and medium
//! normal momenta with fixed branch conventions, and the Fresnel reflection
//! coefficients of a single vacuum/medium interface.
//!
//! Branch conventions (normative for the whole crate):
//!
//! * `q = √(k⊥² − ω²/c²)` is real and positive for evanescent points and
//!   `q = −i k_z` with `k_z = √(ω²/c² − k⊥²) > 0` for propagating points, so
//!   that `e^{−2lq}` either decays or is a pure phase.
//! * `k = √(k⊥² − ε ω²/c²)` takes `Re k ≥ 0`, and `Im k < 0` when `Re k = 0`.
//!
//! Both follow from [`branch_sqrt`], which post-corrects the principal
//! square root instead of relying on the host library's branch cut.

use num_complex::Complex64;
use serde::Serialize;

use crate::constants::SPEED_OF_LIGHT;
use crate::materials::Material;
use crate::{Error, Result};

/// A real frequency and transverse wave number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavePoint {
    omega: f64,
    k_perp: f64,
}

impl WavePoint {
    pub fn new(omega: f64, k_perp: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::domain("ω", omega, "finite and > 0"));
        }
        if !(k_perp >= 0.0 && k_perp.is_finite()) {
            return Err(Error::domain("k⊥", k_perp, "finite and ≥ 0"));
        }
        Ok(Self { omega, k_perp })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn k_perp(&self) -> f64 {
        self.k_perp
    }

    /// k⊥² − ω²/c², factored to stay accurate next to the light cone.
    pub fn q_squared(&self) -> f64 {
        let k0 = self.omega / SPEED_OF_LIGHT;
        (self.k_perp - k0) * (self.k_perp + k0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sector {
    Propagating,
    Evanescent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Polarization {
    TM,
    TE,
}

/// Square root with `Re ≥ 0`, and `Im ≤ 0` on the imaginary axis.
pub fn branch_sqrt(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.re < 0.0 || (s.re == 0.0 && s.im > 0.0) {
        -s
    } else {
        s
    }
}

pub fn classify(point: &WavePoint) -> Sector {
    // The light cone itself counts as evanescent.
    if point.k_perp * SPEED_OF_LIGHT >= point.omega {
        Sector::Evanescent
    } else {
        Sector::Propagating
    }
}

pub fn vacuum_momentum_q(point: &WavePoint) -> Complex64 {
    let q2 = point.q_squared();
    if q2 >= 0.0 {
        Complex64::new(q2.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, -(-q2).sqrt())
    }
}

/// Normal wave number inside the medium, k² = k⊥² − ε ω²/c².
pub fn medium_momentum_k(point: &WavePoint, eps: Complex64) -> Complex64 {
    let k0 = point.omega / SPEED_OF_LIGHT;
    branch_sqrt(point.q_squared() + (1.0 - eps) * (k0 * k0))
}

/// Reflection coefficient from already-computed momenta. `excess` is
/// k² − q² = (1 − ε)ω²/c²; the TE numerator q − k is rewritten as
/// −excess/(q + k) so that r_TE keeps full relative precision when it is small.
/// `None` at a pole.
#[inline]
pub(crate) fn reflection(
    q: Complex64,
    k: Complex64,
    eps: Complex64,
    excess: Complex64,
    pol: Polarization,
) -> Option<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    match pol {
        Polarization::TM => {
            let den = eps * q + k;
            (den != zero).then(|| (eps * q - k) / den)
        }
        Polarization::TE => {
            let sum = q + k;
            (sum != zero).then(|| -excess / (sum * sum))
        }
    }
}

pub fn fresnel(point: &WavePoint, eps: Complex64, pol: Polarization) -> Result<Complex64> {
    let q = vacuum_momentum_q(point);
    let k = medium_momentum_k(point, eps);
    let k0 = point.omega / SPEED_OF_LIGHT;
    reflection(q, k, eps, (1.0 - eps) * (k0 * k0), pol).ok_or(Error::Pole {
        omega: point.omega,
        k_perp: point.k_perp,
    })
}

/// (ω_p l / c)², the only material group entering the dimensionless TE
/// coefficient.
pub fn coupling_parameter(material: &Material, separation: f64) -> f64 {
    (material.plasma_frequency * separation / SPEED_OF_LIGHT).powi(2)
}

/// TE coefficient in the scaled variables u = ω_p² l² ω / (ν c²) and v = l q:
///
/// r_TE = (v − w)/(v + w),  w = √(v² + P u / (iP + u)),  P = (ω_p l/c)².
pub fn fresnel_te_dimensionless(u: f64, v: f64, material: &Material, separation: f64) -> Result<Complex64> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::domain("u", u, "finite and > 0"));
    }
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::domain("v", v, "finite and ≥ 0"));
    }
    if !(separation > 0.0) {
        return Err(Error::domain("l", separation, "> 0"));
    }
    Ok(te_scaled(u, v, coupling_parameter(material, separation)))
}

#[inline]
pub(crate) fn te_scaled(u: f64, v: f64, coupling: f64) -> Complex64 {
    let excess = coupling * u / Complex64::new(u, coupling);
    let w = branch_sqrt(v * v + excess);
    // (v − w)/(v + w) without the cancellation in v − w.
    let sum = v + w;
    -excess / (sum * sum)
}
