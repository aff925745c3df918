//! Uniform linear array geometry.
//!
//! Antennas sit on a line with half-wavelength spacing, indexed so that the
//! array is symmetric about the origin: `u_n = (2n - N - 1) d / 2`.

use crate::error::{invalid, Result};

/// Speed of light in vacuum (m/s), SI exact.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Geometry and power budget of a half-wavelength ULA.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayConfig {
    num_antennas: usize,
    carrier_freq: f64,
    wavelength: f64,
    spacing: f64,
    positions: Vec<f64>,
    aperture: f64,
    tx_power: f64,
    rayleigh_dist: f64,
    fresnel_dist: f64,
}

impl ArrayConfig {
    /// Builds the array for `num_antennas` elements at `carrier_freq` (Hz)
    /// with transmit power `tx_power` (W).
    pub fn new(num_antennas: usize, carrier_freq: f64, tx_power: f64) -> Result<Self> {
        if num_antennas < 2 {
            return Err(invalid(format!(
                "num_antennas must be at least 2, got {num_antennas}"
            )));
        }
        if !(carrier_freq.is_finite() && carrier_freq > 0.0) {
            return Err(invalid(format!(
                "carrier_freq must be positive and finite, got {carrier_freq}"
            )));
        }
        if !(tx_power.is_finite() && tx_power > 0.0) {
            return Err(invalid(format!(
                "tx_power must be positive and finite, got {tx_power}"
            )));
        }
        let wavelength = SPEED_OF_LIGHT / carrier_freq;
        let spacing = wavelength / 2.0;
        let n = num_antennas as f64;
        let positions = (1..=num_antennas)
            .map(|i| (2.0 * i as f64 - n - 1.0) / 2.0 * spacing)
            .collect();
        let aperture = (n - 1.0) * spacing;
        Ok(Self {
            num_antennas,
            carrier_freq,
            wavelength,
            spacing,
            positions,
            aperture,
            tx_power,
            rayleigh_dist: 2.0 * aperture * aperture / wavelength,
            fresnel_dist: 0.5 * (aperture.powi(3) / wavelength).sqrt(),
        })
    }

    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    pub fn carrier_freq(&self) -> f64 {
        self.carrier_freq
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Antenna positions `u_n` in meters, strictly increasing.
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Aperture `D = (N - 1) d`.
    pub fn aperture(&self) -> f64 {
        self.aperture
    }

    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }

    /// Rayleigh distance `2 D^2 / lambda`.
    pub fn rayleigh_dist(&self) -> f64 {
        self.rayleigh_dist
    }

    /// Fresnel distance `0.5 sqrt(D^3 / lambda)`.
    pub fn fresnel_dist(&self) -> f64 {
        self.fresnel_dist
    }

    /// Angular resolution `2 / N` in spatial-angle units.
    pub fn resolution(&self) -> f64 {
        2.0 / self.num_antennas as f64
    }

    /// Wavenumber `2 pi / lambda`.
    pub(crate) fn wavenumber(&self) -> f64 {
        std::f64::consts::TAU / self.wavelength
    }
}

/// Convenience wrapper for [`ArrayConfig::new`].
pub fn build_array(num_antennas: usize, carrier_freq: f64, tx_power: f64) -> Result<ArrayConfig> {
    ArrayConfig::new(num_antennas, carrier_freq, tx_power)
}
