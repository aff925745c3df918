//! Weight vectors produced by the design schemes.

use crate::error::{invalid, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Design scheme that produced a weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Roll-off-aware closed form (far field) or the 2D near-field closed form.
    Proposed,
    /// Closed form without the protective zoom.
    Surrogate,
    /// Sampled max-min optimization baseline.
    Sampling,
    /// Superposition of DFT codewords.
    Dft,
    MultiRegion,
    LargeAngle,
    /// Constant-modulus quadratic-phase design.
    Analog,
    /// Weights loaded from a file.
    External,
}

impl Scheme {
    pub const ALL: [Scheme; 8] = [
        Scheme::Proposed,
        Scheme::Surrogate,
        Scheme::Sampling,
        Scheme::Dft,
        Scheme::MultiRegion,
        Scheme::LargeAngle,
        Scheme::Analog,
        Scheme::External,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Surrogate => "surrogate",
            Scheme::Sampling => "sampling",
            Scheme::Dft => "dft",
            Scheme::MultiRegion => "multi-region",
            Scheme::LargeAngle => "large-angle",
            Scheme::Analog => "analog",
            Scheme::External => "external",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Scheme {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.label() == key)
            .ok_or_else(|| invalid(format!("unknown scheme label '{s}'")))
    }
}

/// Real amplitude-shaping sequence applied across the aperture.
///
/// `values` holds the truncated ideal sinc sequence scaled by `alpha`, where
/// `alpha` brings `||values||^2` to the transmit power. The rectangular mask is
/// implicit: only the `mask_width` physical antennas carry a value.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightShape {
    pub values: Vec<f64>,
    pub alpha: f64,
    pub mask_width: usize,
}

impl WeightShape {
    /// Scales the unnormalized sequence `ideal` so that its energy equals `power`.
    pub fn from_ideal(ideal: Vec<f64>, power: f64) -> Self {
        let energy: f64 = ideal.iter().map(|v| v * v).sum();
        let alpha = (power / energy).sqrt();
        let mask_width = ideal.len();
        Self {
            values: ideal.into_iter().map(|v| alpha * v).collect(),
            alpha,
            mask_width,
        }
    }
}

/// A complex beamforming vector with its scheme label.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamWeights {
    pub weights: Vec<Complex64>,
    pub scheme: Scheme,
    /// `||w||^2` in watts.
    pub power: f64,
    /// Non-fatal warnings raised while designing (narrow targets, region
    /// outside the near-field band, fallbacks).
    pub diagnostics: Vec<String>,
}

impl BeamWeights {
    /// Rescales `weights` so that `||w||^2 = power` exactly (to rounding).
    pub fn with_power(weights: Vec<Complex64>, scheme: Scheme, power: f64) -> Result<Self> {
        let energy = energy(&weights);
        if !(energy.is_finite() && energy > 0.0) {
            return Err(invalid(format!(
                "{scheme} design produced a weight vector with energy {energy}"
            )));
        }
        let scale = (power / energy).sqrt();
        let weights: Vec<Complex64> = weights.into_iter().map(|w| w * scale).collect();
        let power = self::energy(&weights);
        Ok(Self {
            weights,
            scheme,
            power,
            diagnostics: Vec::new(),
        })
    }

    /// Wraps weights as given, recording their actual energy.
    pub fn raw(weights: Vec<Complex64>, scheme: Scheme) -> Self {
        let power = energy(&weights);
        Self {
            weights,
            scheme,
            power,
            diagnostics: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub(crate) fn with_diagnostics(mut self, diagnostics: Vec<String>) -> Self {
        self.diagnostics.extend(diagnostics);
        self
    }
}

pub(crate) fn energy(w: &[Complex64]) -> f64 {
    w.iter().map(|x| x.norm_sqr()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scheme_labels_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.label().parse::<Scheme>().unwrap(), s);
        }
        assert_eq!("Multi_Region".parse::<Scheme>().unwrap(), Scheme::MultiRegion);
        assert!("fancy".parse::<Scheme>().is_err());
    }

    #[test]
    fn power_rescaling() {
        let w = vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)];
        let b = BeamWeights::with_power(w, Scheme::Proposed, 2.0).unwrap();
        assert!((b.power - 2.0).abs() < 1e-15);
        assert!((energy(&b.weights) - 2.0).abs() < 1e-15);
        assert!(BeamWeights::with_power(vec![Complex64::default(); 3], Scheme::Dft, 1.0).is_err());
    }

    #[test]
    fn weight_shape_alpha() {
        let shape = WeightShape::from_ideal(vec![1.0, 2.0, 2.0], 9.0);
        assert!((shape.alpha - 1.0).abs() < 1e-15);
        assert_eq!(shape.mask_width, 3);
    }
}
