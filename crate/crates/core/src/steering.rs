//! Channel steering vectors (CSVs) and beamforming gain.
//!
//! Every CSV is unit-norm: element `n` is `exp(j * phase_n) / sqrt(N)`. The
//! far field is the `inv_range = 0` case of the near-field model.

use crate::beam::BeamWeights;
use crate::error::{invalid, Result};
use crate::geometry::ArrayConfig;
use num_complex::Complex64;

/// A point in (spatial angle, inverse range) coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialPoint {
    angle: f64,
    inv_range: f64,
}

impl SpatialPoint {
    pub fn new(angle: f64, inv_range: f64) -> Result<Self> {
        check_angle(angle)?;
        if !(inv_range.is_finite() && inv_range >= 0.0) {
            return Err(invalid(format!(
                "inverse range must be finite and >= 0, got {inv_range}"
            )));
        }
        Ok(Self { angle, inv_range })
    }

    pub fn far_field(angle: f64) -> Result<Self> {
        Self::new(angle, 0.0)
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn inv_range(&self) -> f64 {
        self.inv_range
    }

    /// Range in meters; infinite in the far field.
    pub fn range(&self) -> f64 {
        1.0 / self.inv_range
    }
}

pub(crate) fn check_angle(theta: f64) -> Result<()> {
    if theta.is_finite() && theta.abs() <= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("spatial angle must lie in [-1, 1], got {theta}")))
    }
}

/// First-order expansion of the near-field phase around a reference point.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorCoefficients {
    pub theta0: f64,
    pub xi0: f64,
    /// Phase at the reference point (m).
    pub varphi: Vec<f64>,
    /// Partial derivative of the phase w.r.t. angle (m).
    pub zeta_theta: Vec<f64>,
    /// Partial derivative of the phase w.r.t. inverse range (m^2).
    pub zeta_xi: Vec<f64>,
}

impl TaylorCoefficients {
    pub fn new(cfg: &ArrayConfig, theta0: f64, xi0: f64) -> Result<Self> {
        SpatialPoint::new(theta0, xi0)?;
        let cos2 = 1.0 - theta0 * theta0;
        let u = cfg.positions();
        Ok(Self {
            theta0,
            xi0,
            varphi: u.iter().map(|&u| near_field_phase(u, theta0, xi0)).collect(),
            zeta_theta: u.iter().map(|&u| u + u * u * theta0 * xi0).collect(),
            zeta_xi: u.iter().map(|&u| -u * u * cos2 / 2.0).collect(),
        })
    }
}

/// Alias of [`TaylorCoefficients::new`].
pub fn taylor_coeffs(cfg: &ArrayConfig, theta0: f64, xi0: f64) -> Result<TaylorCoefficients> {
    TaylorCoefficients::new(cfg, theta0, xi0)
}

#[inline]
fn near_field_phase(u: f64, theta: f64, xi: f64) -> f64 {
    u * theta - u * u * (1.0 - theta * theta) * xi / 2.0
}

fn from_phases(cfg: &ArrayConfig, path_lengths: impl Iterator<Item = f64>) -> Vec<Complex64> {
    let amp = 1.0 / (cfg.num_antennas() as f64).sqrt();
    let k = cfg.wavenumber();
    path_lengths.map(|p| Complex64::from_polar(amp, k * p)).collect()
}

/// Far-field CSV toward spatial angle `theta`.
pub fn ff_csv(cfg: &ArrayConfig, theta: f64) -> Result<Vec<Complex64>> {
    check_angle(theta)?;
    Ok(ff_csv_unchecked(cfg, theta))
}

pub(crate) fn ff_csv_unchecked(cfg: &ArrayConfig, theta: f64) -> Vec<Complex64> {
    from_phases(cfg, cfg.positions().iter().map(|&u| near_field_phase(u, theta, 0.0)))
}

/// Near-field CSV under the Fresnel (second-order) distance approximation.
pub fn nf_csv(cfg: &ArrayConfig, point: SpatialPoint) -> Vec<Complex64> {
    nf_csv_unchecked(cfg, point.angle, point.inv_range)
}

pub(crate) fn nf_csv_unchecked(cfg: &ArrayConfig, theta: f64, xi: f64) -> Vec<Complex64> {
    from_phases(cfg, cfg.positions().iter().map(|&u| near_field_phase(u, theta, xi)))
}

/// Near-field CSV with exact spherical-wavefront path lengths.
pub fn nf_csv_exact(cfg: &ArrayConfig, theta: f64, range_m: f64) -> Result<Vec<Complex64>> {
    check_angle(theta)?;
    if !(range_m.is_finite() && range_m > 0.0) {
        return Err(invalid(format!("range must be positive, got {range_m}")));
    }
    let r = range_m;
    Ok(from_phases(
        cfg,
        cfg.positions().iter().map(|&u| {
            // r_n - r, written to avoid cancellation for r >> u
            let s = u * u - 2.0 * r * u * theta;
            let rn = (r * r + s).sqrt();
            -(s / (rn + r))
        }),
    ))
}

/// Linearized near-field CSV at `(theta0 + d_theta, xi0 + d_xi)`.
pub fn nf_csv_approx(
    cfg: &ArrayConfig,
    coeffs: &TaylorCoefficients,
    d_theta: f64,
    d_xi: f64,
) -> Vec<Complex64> {
    from_phases(
        cfg,
        coeffs
            .varphi
            .iter()
            .zip(&coeffs.zeta_theta)
            .zip(&coeffs.zeta_xi)
            .map(|((&p, &zt), &zx)| p + zt * d_theta + zx * d_xi),
    )
}

/// `|a^H w|` for raw vectors.
pub fn inner_gain(csv: &[Complex64], w: &[Complex64]) -> f64 {
    csv.iter()
        .zip(w)
        .fold(Complex64::new(0.0, 0.0), |acc, (a, w)| acc + a.conj() * w)
        .norm()
}

/// Beamforming gain `|a^H w|`.
pub fn gain(csv: &[Complex64], w: &BeamWeights) -> Result<f64> {
    if csv.len() != w.len() {
        return Err(invalid(format!(
            "steering vector has {} elements but weights have {}",
            csv.len(),
            w.len()
        )));
    }
    Ok(inner_gain(csv, &w.weights))
}

/// Gain loss `1 - |a_NF^H a_app|` of the linearized CSV around `ref_point`.
pub fn gain_loss(cfg: &ArrayConfig, ref_point: SpatialPoint, d_theta: f64, d_xi: f64) -> Result<f64> {
    let point = SpatialPoint::new(ref_point.angle + d_theta, ref_point.inv_range + d_xi)?;
    let coeffs = TaylorCoefficients::new(cfg, ref_point.angle, ref_point.inv_range)?;
    let exact = nf_csv(cfg, point);
    let approx = nf_csv_approx(cfg, &coeffs, d_theta, d_xi);
    Ok((1.0 - inner_gain(&exact, &approx)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::Scheme;
    use crate::geometry::build_array;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn norm(v: &[Complex64]) -> f64 {
        v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn broadside_ff_csv_is_flat() {
        let cfg = build_array(16, 30e9, 1.0).unwrap();
        let a = ff_csv(&cfg, 0.0).unwrap();
        for x in &a {
            assert_eq!(*x, Complex64::new(0.25, 0.0));
        }
    }

    #[test]
    fn endfire_two_element_phases() {
        let cfg = build_array(2, 30e9, 1.0).unwrap();
        let a = ff_csv(&cfg, 1.0).unwrap();
        assert!((a[0].arg() + FRAC_PI_2).abs() < 1e-14);
        assert!((a[1].arg() - FRAC_PI_2).abs() < 1e-14);
        assert!((a[0].norm() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_out_of_range_angles() {
        let cfg = build_array(8, 30e9, 1.0).unwrap();
        assert!(ff_csv(&cfg, 1.01).is_err());
        assert!(SpatialPoint::new(0.2, -0.1).is_err());
        assert!(nf_csv_exact(&cfg, 0.0, 0.0).is_err());
        assert!(nf_csv_exact(&cfg, 0.0, -3.0).is_err());
    }

    #[test]
    fn near_field_reduces_to_far_field() {
        let cfg = build_array(64, 30e9, 1.0).unwrap();
        for theta in [-1.0, -0.37, 0.0, 0.5, 1.0] {
            let ff = ff_csv(&cfg, theta).unwrap();
            assert_eq!(nf_csv(&cfg, SpatialPoint::far_field(theta).unwrap()), ff);
        }
        for theta in [-1.0, 1.0] {
            let nf = nf_csv(&cfg, SpatialPoint::new(theta, 0.2).unwrap());
            assert_eq!(nf, ff_csv(&cfg, theta).unwrap());
        }
    }

    #[test]
    fn broadside_near_field_phases() {
        let cfg = build_array(256, 30e9, 1.0).unwrap();
        let xi = 1.0 / 15.0;
        let a = nf_csv(&cfg, SpatialPoint::new(0.0, xi).unwrap());
        let lambda = cfg.wavelength();
        for (x, &u) in a.iter().zip(cfg.positions()) {
            let expected = Complex64::from_polar(1.0 / 16.0, -std::f64::consts::PI * u * u * xi / lambda);
            assert!((x - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn exact_csv_far_limit() {
        let cfg = build_array(64, 30e9, 1.0).unwrap();
        let r = 1e6 * cfg.rayleigh_dist();
        for theta in [-0.6, 0.0, 0.3] {
            let exact = nf_csv_exact(&cfg, theta, r).unwrap();
            let ff = ff_csv(&cfg, theta).unwrap();
            for (e, f) in exact.iter().zip(&ff) {
                assert!((e / f).arg().abs() < 1e-3);
            }
        }
    }

    #[test]
    fn exact_csv_broadside_symmetry() {
        let cfg = build_array(33, 30e9, 1.0).unwrap();
        let a = nf_csv_exact(&cfg, 0.0, 4.0).unwrap();
        let n = a.len();
        for i in 0..n {
            assert!((a[i] - a[n - 1 - i]).norm() < 1e-14);
        }
    }

    #[test]
    fn fresnel_approximation_accurate_in_band() {
        let cfg = build_array(256, 30e9, 1.0).unwrap();
        let exact = nf_csv_exact(&cfg, 0.0, 15.0).unwrap();
        let fresnel = nf_csv(&cfg, SpatialPoint::new(0.0, 1.0 / 15.0).unwrap());
        assert!(inner_gain(&exact, &fresnel) >= 0.99);
    }

    #[test]
    fn approx_csv_identities() {
        let cfg = build_array(128, 30e9, 1.0).unwrap();
        let c = TaylorCoefficients::new(&cfg, 0.2, 0.05).unwrap();
        assert_eq!(
            nf_csv_approx(&cfg, &c, 0.0, 0.0),
            nf_csv(&cfg, SpatialPoint::new(0.2, 0.05).unwrap())
        );
        let c = TaylorCoefficients::new(&cfg, 0.2, 0.0).unwrap();
        assert_eq!(c.zeta_theta, cfg.positions());
        let approx = nf_csv_approx(&cfg, &c, 0.13, 0.0);
        let ff = ff_csv(&cfg, 0.33).unwrap();
        for (a, f) in approx.iter().zip(&ff) {
            assert!((a - f).norm() < 1e-12);
        }
    }

    #[test]
    fn taylor_coefficients_match_geometry() {
        let cfg = build_array(256, 30e9, 1.0).unwrap();
        let c = TaylorCoefficients::new(&cfg, 0.0, 1.0 / 15.0).unwrap();
        for (i, &u) in cfg.positions().iter().enumerate() {
            assert_eq!(c.zeta_xi[i], -u * u / 2.0);
            assert_eq!(c.zeta_theta[i], u);
            assert!((c.varphi[i] + u * u / 30.0).abs() < 1e-16);
        }
        let c = TaylorCoefficients::new(&cfg, 1.0, 0.1).unwrap();
        assert!(c.zeta_xi.iter().all(|&z| z == 0.0));
        let (t0, x0) = (0.3, 0.04);
        let c = TaylorCoefficients::new(&cfg, t0, x0).unwrap();
        for (i, &u) in cfg.positions().iter().enumerate() {
            assert!((c.varphi[i] - (u * t0 - u * u * (1.0 - t0 * t0) * x0 / 2.0)).abs() < 1e-16);
            assert!((c.zeta_theta[i] - (u + u * u * t0 * x0)).abs() < 1e-16);
            assert!((c.zeta_xi[i] + u * u * (1.0 - t0 * t0) / 2.0).abs() < 1e-16);
        }
    }

    #[test]
    fn matched_gain_and_dft_null() {
        let cfg = build_array(64, 30e9, 4.0).unwrap();
        let a = ff_csv(&cfg, 0.0).unwrap();
        let w = BeamWeights::raw(a.iter().map(|x| x * 2.0).collect(), Scheme::External);
        assert!((gain(&a, &w).unwrap() - 2.0).abs() < 1e-14);
        let off = ff_csv(&cfg, 2.0 / 64.0).unwrap();
        assert!(gain(&off, &w).unwrap() < 1e-13);
        let short = BeamWeights::raw(vec![Complex64::new(1.0, 0.0); 3], Scheme::External);
        assert!(gain(&a, &short).is_err());
    }

    #[test]
    fn gain_loss_examples() {
        let cfg = build_array(256, 30e9, 1.0).unwrap();
        let p = SpatialPoint::new(0.0, 1.0 / 15.0).unwrap();
        assert!(gain_loss(&cfg, p, 0.0, 0.0).unwrap().abs() < 1e-12);
        assert!(gain_loss(&cfg, p, 0.1, 0.01).unwrap() <= 0.05);
        let a = gain_loss(&cfg, p, 0.1, -0.01).unwrap();
        let b = gain_loss(&cfg, p, -0.1, 0.01).unwrap();
        assert!((0.0..=1.0).contains(&a) && (0.0..=1.0).contains(&b));
    }

    proptest! {
        #[test]
        fn csvs_have_unit_norm(theta in -1.0f64..=1.0, xi in 0.0f64..0.2, r in 1.0f64..1e4, n in 2usize..300) {
            let cfg = build_array(n, 30e9, 1.0).unwrap();
            prop_assert!((norm(&ff_csv(&cfg, theta).unwrap()) - 1.0).abs() < 1e-12);
            prop_assert!((norm(&nf_csv(&cfg, SpatialPoint::new(theta, xi).unwrap())) - 1.0).abs() < 1e-12);
            prop_assert!((norm(&nf_csv_exact(&cfg, theta, r).unwrap()) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn gain_is_phase_invariant(theta in -1.0f64..=1.0, phi in -10.0f64..10.0, seed in 0u64..1000) {
            let cfg = build_array(32, 30e9, 1.0).unwrap();
            let a = ff_csv(&cfg, theta).unwrap();
            let w: Vec<Complex64> = (0..32)
                .map(|i| Complex64::new(((i as u64 * 7919 + seed) % 97) as f64 / 97.0, ((i as u64 * 31 + seed) % 13) as f64 / 13.0))
                .collect();
            let rot: Vec<Complex64> = w.iter().map(|x| x * Complex64::from_polar(1.0, phi)).collect();
            prop_assert!((inner_gain(&a, &w) - inner_gain(&a, &rot)).abs() < 1e-12);
        }

        #[test]
        fn gain_loss_in_unit_interval(dt in -0.5f64..0.5, dx in -0.05f64..0.05) {
            let cfg = build_array(128, 30e9, 1.0).unwrap();
            let p = SpatialPoint::new(0.1, 0.06).unwrap();
            let l = gain_loss(&cfg, p, dt, dx).unwrap();
            prop_assert!((0.0..=1.0).contains(&l));
        }
    }
}
