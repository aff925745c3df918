//! Far-field closed-form coverage designs and the analytical gain models
//! that explain their roll-off.
//!
//! A flat (rectangular) target over `|dtheta| <= mu` inverse-transforms to
//! the ideal antenna sequence `sinc(2 u_n mu / lambda)`. Truncating it to the
//! physical aperture convolves the rectangle with a Dirichlet kernel, which
//! produces a roll-off band of width `4/N` centred on the region edge. The
//! roll-off-aware design widens the window by `2/N` so the band falls outside
//! the target.

use crate::beam::{BeamWeights, Scheme, WeightShape};
use crate::error::{invalid, Error, Result};
use crate::geometry::ArrayConfig;
use crate::quadrature::{gauss_kronrod, QuadOptions};
use crate::special::{si, sin_pi, sinc};
use crate::steering::ff_csv_unchecked;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Closed spatial-angle interval `[theta_min, theta_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularRegion {
    theta_min: f64,
    theta_max: f64,
}

impl AngularRegion {
    pub fn new(theta_min: f64, theta_max: f64) -> Result<Self> {
        if !(theta_min.is_finite() && theta_max.is_finite()) {
            return Err(invalid("angular bounds must be finite"));
        }
        if theta_min < -1.0 {
            return Err(invalid(format!("theta_min = {theta_min} is below -1")));
        }
        if theta_max > 1.0 {
            return Err(invalid(format!("theta_max = {theta_max} is above 1")));
        }
        if theta_min >= theta_max {
            return Err(invalid(format!(
                "theta_min ({theta_min}) must be strictly less than theta_max ({theta_max})"
            )));
        }
        Ok(Self {
            theta_min,
            theta_max,
        })
    }

    /// Region of half-width `mu` around `center`.
    pub fn centered(center: f64, half_width: f64) -> Result<Self> {
        Self::new(center - half_width, center + half_width)
    }

    pub fn theta_min(&self) -> f64 {
        self.theta_min
    }

    pub fn theta_max(&self) -> f64 {
        self.theta_max
    }

    /// Reference angle `theta0`.
    pub fn center(&self) -> f64 {
        (self.theta_min + self.theta_max) / 2.0
    }

    /// Maximum angle deviation `mu`.
    pub fn half_width(&self) -> f64 {
        (self.theta_max - self.theta_min) / 2.0
    }

    /// `mu + 2/N`, the design half-width with the protective zoom.
    pub fn protected_half_width(&self, num_antennas: usize) -> f64 {
        self.half_width() + 2.0 / num_antennas as f64
    }

    pub fn contains(&self, theta: f64) -> bool {
        (self.theta_min..=self.theta_max).contains(&theta)
    }
}

/// Truncated sinc shaping for a far-field window of half-width `mu`.
pub fn weight_shape_ff(cfg: &ArrayConfig, mu: f64) -> WeightShape {
    let lambda = cfg.wavelength();
    let ideal = cfg
        .positions()
        .iter()
        .map(|&u| sinc(2.0 * u * mu / lambda))
        .collect();
    WeightShape::from_ideal(ideal, cfg.tx_power())
}

pub(crate) fn resolution_diagnostic(cfg: &ArrayConfig, mu: f64) -> Option<String> {
    let res = cfg.resolution();
    (mu <= res).then(|| {
        format!(
            "target half-width {mu} does not exceed the angular resolution 2/N = {res}; \
             roll-off will dominate the coverage"
        )
    })
}

fn closed_form_ff(
    cfg: &ArrayConfig,
    region: &AngularRegion,
    design_half_width: f64,
    scheme: Scheme,
) -> Result<BeamWeights> {
    let shape = weight_shape_ff(cfg, design_half_width);
    let steer = ff_csv_unchecked(cfg, region.center());
    let w = steer
        .iter()
        .zip(&shape.values)
        .map(|(a, &v)| a * v)
        .collect();
    let diagnostics = resolution_diagnostic(cfg, region.half_width()).into_iter().collect();
    Ok(BeamWeights::with_power(w, scheme, cfg.tx_power())?.with_diagnostics(diagnostics))
}

/// Inverse-transform design without protective zoom: the region edge sits in
/// the middle of the roll-off band (about -6 dB).
pub fn surrogate_ff(cfg: &ArrayConfig, region: &AngularRegion) -> Result<BeamWeights> {
    closed_form_ff(cfg, region, region.half_width(), Scheme::Surrogate)
}

/// Roll-off-aware design: the window is widened to `mu + 2/N`.
pub fn rolloff_aware_ff(cfg: &ArrayConfig, region: &AngularRegion) -> Result<BeamWeights> {
    closed_form_ff(
        cfg,
        region,
        region.protected_half_width(cfg.num_antennas()),
        Scheme::Proposed,
    )
}

fn check_mu(mu: f64) -> Result<()> {
    if mu.is_finite() && mu > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("half-width mu must be positive, got {mu}")))
    }
}

/// Dirichlet kernel `sum_n exp(-j pi (2n - N - 1) y / 2) = sin(N pi y/2) / sin(pi y/2)`.
pub fn dirichlet_kernel(y: f64, num_antennas: usize) -> f64 {
    let n = num_antennas as f64;
    let den = sin_pi(0.5 * y);
    if den == 0.0 {
        // y = 2k
        n * sin_pi(0.5 * n * y + 0.5) / sin_pi(0.5 * y + 0.5)
    } else {
        sin_pi(0.5 * n * y) / den
    }
}

/// Unconstrained (alpha = 1) gain of the window-`mu` design at angle offset
/// `d_theta`, from the convolution of the flat spectrum with the Dirichlet
/// kernel, integrated by adaptive Gauss–Kronrod quadrature.
pub fn unconstrained_gain_ff(cfg: &ArrayConfig, mu: f64, d_theta: f64) -> Result<f64> {
    check_mu(mu)?;
    let n = cfg.num_antennas();
    let opts = QuadOptions {
        abs_tol: 1e-9,
        rel_tol: 1e-13,
        max_intervals: 4000,
    };
    let r = gauss_kronrod(|x| dirichlet_kernel(d_theta - x, n), -mu, mu, opts);
    if !r.converged {
        return Err(Error::Precondition(format!(
            "convolution quadrature did not converge (error estimate {})",
            r.abs_error
        )));
    }
    Ok(r.value.abs() / (2.0 * mu * n as f64))
}

/// Same quantity as [`unconstrained_gain_ff`] from the explicit finite sum
/// `(1/N) |sum_n sinc(2 u_n mu / lambda) exp(-j 2 pi u_n dtheta / lambda)|`.
pub fn unconstrained_gain_direct(cfg: &ArrayConfig, mu: f64, d_theta: f64) -> Result<f64> {
    check_mu(mu)?;
    let lambda = cfg.wavelength();
    let k = cfg.wavenumber();
    let sum = cfg
        .positions()
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &u| {
            acc + Complex64::from_polar(sinc(2.0 * u * mu / lambda), -k * u * d_theta)
        });
    Ok(sum.norm() / cfg.num_antennas() as f64)
}

/// Large-`N` form of the convolution where the Dirichlet kernel is replaced by
/// `N sinc(N y / 2)`; it integrates to a difference of sine integrals.
pub fn unconstrained_gain_sinc_kernel(num_antennas: usize, mu: f64, d_theta: f64) -> Result<f64> {
    check_mu(mu)?;
    let n = num_antennas as f64;
    let a = n * PI / 2.0;
    Ok((si(a * (d_theta + mu)) - si(a * (d_theta - mu))).abs() / (PI * mu * n))
}

/// Edges `[mu - 2/N, mu + 2/N]` of the roll-off band in `|dtheta|`.
pub fn rolloff_band(num_antennas: usize, mu: f64) -> (f64, f64) {
    let r = 2.0 / num_antennas as f64;
    (mu - r, mu + r)
}

/// Piecewise roll-off model of the unconstrained gain: a plateau of
/// `1/(mu N)`, a sine-integral transition of width `4/N`, and zero beyond.
///
/// Only defined for `mu > 2/N`.
pub fn rolloff_approx(num_antennas: usize, mu: f64, d_theta: f64) -> Result<f64> {
    check_mu(mu)?;
    let n = num_antennas as f64;
    if mu <= 2.0 / n {
        return Err(Error::Precondition(format!(
            "roll-off model requires mu > 2/N = {}, got {mu}",
            2.0 / n
        )));
    }
    let dev = d_theta.abs();
    let (inner, outer) = rolloff_band(num_antennas, mu);
    let scale = 1.0 / (2.0 * mu * n);
    Ok(if dev <= inner {
        2.0 * scale
    } else if dev >= outer {
        0.0
    } else {
        // the bracket dips below zero near the outer edge; the gain is its modulus
        scale * (1.0 - 2.0 / PI * si(n * PI / 2.0 * (dev - mu))).abs()
    })
}
