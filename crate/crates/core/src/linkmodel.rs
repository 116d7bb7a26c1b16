//! Gaussian-beam downlink budget: diffraction spread, aperture capture,
//! zenith-dependent atmospheric transmission, and pair rates.

use crate::error::{Error, Result};

/// Optical hardware and feasibility parameters shared by all links.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OpticalParams {
    /// Receiver aperture radius a_R, m.
    pub aperture_radius: f64,
    /// Transmitter beam waist w_0, m.
    pub beam_waist: f64,
    /// Wavelength, m.
    pub wavelength: f64,
    /// One-pass atmospheric transmission at zenith.
    pub eta_zenith: f64,
    /// Entangled-pair attempt rate R_s, 1/s.
    pub source_rate: f64,
    /// Minimum feasible pair rate R_min, 1/s.
    pub rate_floor: f64,
}

impl Default for OpticalParams {
    fn default() -> Self {
        OpticalParams {
            aperture_radius: 0.5,
            beam_waist: 0.10,
            wavelength: 810e-9,
            eta_zenith: 0.8,
            source_rate: 1e8,
            rate_floor: 1.0,
        }
    }
}

impl OpticalParams {
    pub fn validate(&self) -> Result<()> {
        let positive: [(&str, f64); 4] = [
            ("optical.aperture_radius", self.aperture_radius),
            ("optical.beam_waist", self.beam_waist),
            ("optical.wavelength", self.wavelength),
            ("optical.source_rate", self.source_rate),
        ];
        for (key, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::config(key, "must be finite and > 0"));
            }
        }
        if !(self.eta_zenith > 0.0 && self.eta_zenith <= 1.0) {
            return Err(Error::config("optical.eta_zenith", "must lie in (0, 1]"));
        }
        if !(self.rate_floor >= 0.0) || !self.rate_floor.is_finite() {
            return Err(Error::config("optical.rate_floor", "must be finite and >= 0"));
        }
        Ok(())
    }
}

/// Beam radius after free-space propagation over distance `d`:
/// `w(d) = w0 sqrt(1 + (lambda d / (pi w0^2))^2)`.
pub fn beam_radius(params: &OpticalParams, d: f64) -> Result<f64> {
    if !(d >= 0.0) || !d.is_finite() {
        return Err(Error::Domain(format!("propagation distance {d} must be non-negative")));
    }
    let spread = params.wavelength * d / (std::f64::consts::PI * params.beam_waist.powi(2));
    Ok(params.beam_waist * (1.0 + spread * spread).sqrt())
}

/// Fraction of a Gaussian beam of radius `w(d)` captured by the receiver
/// aperture: `1 - exp(-2 a_R^2 / w(d)^2)`.
pub fn eta_geometric(params: &OpticalParams, d: f64) -> Result<f64> {
    let w = beam_radius(params, d)?;
    Ok(1.0 - (-2.0 * params.aperture_radius.powi(2) / (w * w)).exp())
}

/// Atmospheric transmission through the slab airmass at zenith angle `z`:
/// `eta_zen^sec(z)`. Defined for `z` in `[0, pi/2)`.
pub fn eta_atmospheric(params: &OpticalParams, zenith: f64) -> Result<f64> {
    if !(0.0..std::f64::consts::FRAC_PI_2).contains(&zenith) {
        return Err(Error::Domain(format!("zenith angle {zenith} rad must lie in [0, pi/2)")));
    }
    Ok(params.eta_zenith.powf(1.0 / zenith.cos()))
}

/// Single-downlink efficiency: geometric capture times atmospheric
/// transmission for a slant path `d` arriving at zenith angle `z`.
pub fn downlink_efficiency(params: &OpticalParams, d: f64, zenith: f64) -> Result<f64> {
    Ok(eta_geometric(params, d)? * eta_atmospheric(params, zenith)?)
}

/// Delivered pair rate for a dual-downlink source feeding stations `i`
/// and `j`: `R_s * eta_i * eta_j`.
pub fn pair_rate(
    params: &OpticalParams,
    slant_i: f64,
    zenith_i: f64,
    slant_j: f64,
    zenith_j: f64,
) -> Result<f64> {
    let eta_i = downlink_efficiency(params, slant_i, zenith_i)?;
    let eta_j = downlink_efficiency(params, slant_j, zenith_j)?;
    Ok(params.source_rate * (eta_i * eta_j))
}

/// Edge feasibility: the pair rate meets the floor (closed inequality).
pub fn feasible(params: &OpticalParams, rate: f64) -> bool {
    rate >= params.rate_floor
}
