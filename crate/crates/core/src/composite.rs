//! Compositions of the closed-form designs: weighted multi-region
//! superposition, angular partitioning for wide regions, and the
//! constant-modulus quadratic-phase (LFM) design for analog arrays.

use crate::beam::{BeamWeights, Scheme};
use crate::error::{invalid, Result};
use crate::ff_design::{rolloff_aware_ff, AngularRegion};
use crate::geometry::ArrayConfig;
use crate::nf_design::{design_nf, design_nf_with_threshold, RangeRegion, DEFAULT_THETA_TH};
use num_complex::Complex64;

/// Disjoint target regions and their nonnegative superposition weights `beta_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiRegionSpec {
    regions: Vec<(AngularRegion, RangeRegion)>,
    betas: Vec<f64>,
}

impl MultiRegionSpec {
    /// Far-field regions with equal weights.
    pub fn equal(regions: Vec<AngularRegion>, num_antennas: usize) -> Result<Self> {
        let k = regions.len();
        Self::new(
            regions.into_iter().map(|a| (a, RangeRegion::far_field())).collect(),
            vec![1.0; k],
            num_antennas,
        )
    }

    /// Validates the weights and the pairwise separation
    /// `|theta0_i - theta0_j| >= mu_i + mu_j + 8/N`.
    pub fn new(
        regions: Vec<(AngularRegion, RangeRegion)>,
        betas: Vec<f64>,
        num_antennas: usize,
    ) -> Result<Self> {
        if regions.is_empty() {
            return Err(invalid("at least one region is required"));
        }
        if betas.len() != regions.len() {
            return Err(invalid(format!(
                "{} regions but {} beta coefficients",
                regions.len(),
                betas.len()
            )));
        }
        if let Some(b) = betas.iter().find(|b| !(b.is_finite() && **b >= 0.0)) {
            return Err(invalid(format!("beta coefficients must be nonnegative, got {b}")));
        }
        if betas.iter().all(|&b| b == 0.0) {
            return Err(invalid("at least one beta coefficient must be positive"));
        }
        let margin = 8.0 / num_antennas as f64;
        for i in 0..regions.len() {
            for j in i + 1..regions.len() {
                let (a, b) = (&regions[i].0, &regions[j].0);
                let sep = (a.center() - b.center()).abs();
                let need = a.half_width() + b.half_width() + margin;
                if sep < need {
                    return Err(invalid(format!(
                        "regions {i} and {j} are too close: center separation {sep} < mu_{i} + mu_{j} + 8/N = {need}"
                    )));
                }
            }
        }
        Ok(Self { regions, betas })
    }

    pub fn regions(&self) -> &[(AngularRegion, RangeRegion)] {
        &self.regions
    }

    pub fn betas(&self) -> &[f64] {
        &self.betas
    }
}

/// `sum_k beta_k w_k` over per-region designs, rescaled to the transmit power.
pub fn multi_region_ff(cfg: &ArrayConfig, spec: &MultiRegionSpec) -> Result<BeamWeights> {
    let mut sum = vec![Complex64::new(0.0, 0.0); cfg.num_antennas()];
    let mut diagnostics = Vec::new();
    for ((ang, rng), &beta) in spec.regions.iter().zip(&spec.betas) {
        let part = if rng.is_far_field() {
            rolloff_aware_ff(cfg, ang)?
        } else {
            design_nf(cfg, ang, rng)?
        };
        for (s, w) in sum.iter_mut().zip(&part.weights) {
            *s += w * beta;
        }
        diagnostics.extend(part.diagnostics);
    }
    Ok(BeamWeights::with_power(sum, Scheme::MultiRegion, cfg.tx_power())?.with_diagnostics(diagnostics))
}

/// Splits `ang` into the fewest equal windows of half-width `h <= theta_th`
/// separated by gaps of `4/N`, so that `M` windows satisfy
/// `2 M h + (M - 1) 4/N = theta_max - theta_min`.
pub fn partition_large_angle(
    ang: &AngularRegion,
    theta_th: f64,
    num_antennas: usize,
) -> Result<Vec<AngularRegion>> {
    let n = num_antennas as f64;
    if !(theta_th.is_finite() && theta_th >= 2.0 / n) {
        return Err(invalid(format!(
            "theta_th = {theta_th} is below the resolution 2/N = {}",
            2.0 / n
        )));
    }
    let mu = ang.half_width();
    if mu <= theta_th {
        return Ok(vec![*ang]);
    }
    let gap = 4.0 / n;
    let span = 2.0 * mu;
    let mut m = 1usize;
    let h = loop {
        let h = (span - (m - 1) as f64 * gap) / (2.0 * m as f64);
        if h <= 0.0 {
            return Err(invalid(format!(
                "region of half-width {mu} cannot be partitioned with theta_th = {theta_th}"
            )));
        }
        if h <= theta_th {
            break h;
        }
        m += 1;
    };
    let pitch = 2.0 * h + gap;
    (0..m)
        .map(|k| {
            let lo = ang.theta_min() + k as f64 * pitch;
            let hi = if k + 1 == m { ang.theta_max() } else { lo + 2.0 * h };
            AngularRegion::new(lo, hi)
        })
        .collect()
}

/// Equal-weight sum of [`design_nf`] over the angular partition, all windows
/// sharing the range center of `rng`.
pub fn large_angle_design(
    cfg: &ArrayConfig,
    ang: &AngularRegion,
    rng: &RangeRegion,
    theta_th: f64,
) -> Result<BeamWeights> {
    let windows = partition_large_angle(ang, theta_th, cfg.num_antennas())?;
    let mut sum = vec![Complex64::new(0.0, 0.0); cfg.num_antennas()];
    let mut diagnostics = Vec::new();
    for window in &windows {
        let part = design_nf_with_threshold(cfg, window, rng, theta_th)?;
        for (s, w) in sum.iter_mut().zip(&part.weights) {
            *s += w;
        }
        diagnostics.extend(part.diagnostics);
    }
    diagnostics.dedup();
    Ok(BeamWeights::with_power(sum, Scheme::LargeAngle, cfg.tx_power())?.with_diagnostics(diagnostics))
}

/// Quadratic-phase coefficient of the analog design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalogParams {
    /// Quadratic phase coefficient `eta` (1/m).
    pub eta: f64,
    /// Beam-center-corrected half-width `mu sqrt(1 - theta0^2 / (1 - mu^2))`.
    pub varpi: f64,
    pub theta_th: f64,
}

impl AnalogParams {
    pub fn new(cfg: &ArrayConfig, ang: &AngularRegion) -> Result<Self> {
        let mu = ang.half_width();
        let theta0 = ang.center();
        if mu >= 1.0 {
            return Err(invalid(format!("analog design needs mu < 1, got {mu}")));
        }
        if theta0 * theta0 >= 1.0 - mu * mu {
            return Err(invalid(format!(
                "analog design needs theta0^2 < 1 - mu^2, got theta0 = {theta0}, mu = {mu}"
            )));
        }
        let varpi = mu * (1.0 - theta0 * theta0 / (1.0 - mu * mu)).sqrt();
        let d = cfg.aperture();
        let lambda = cfg.wavelength();
        let eta = (2.0 * d * varpi + lambda + (lambda * (4.0 * d * varpi + lambda)).sqrt()) / (2.0 * d * d);
        Ok(Self {
            eta,
            varpi,
            theta_th: DEFAULT_THETA_TH,
        })
    }
}

/// `w_n = sqrt(P_t / N) exp(j 2pi/lambda (theta0 u_n + eta u_n^2))`.
pub fn lfm_weights(cfg: &ArrayConfig, theta0: f64, eta: f64) -> BeamWeights {
    let amp = (cfg.tx_power() / cfg.num_antennas() as f64).sqrt();
    let k = cfg.wavenumber();
    let w = cfg
        .positions()
        .iter()
        .map(|&u| snap_modulus(Complex64::from_polar(amp, k * (theta0 * u + eta * u * u)), amp))
        .collect();
    BeamWeights::raw(w, Scheme::Analog)
}

fn ulps(x: f64, k: i32) -> f64 {
    (0..k.unsigned_abs()).fold(x, |v, _| if k > 0 { v.next_up() } else { v.next_down() })
}

/// Moves `z` by at most a few ulps per component so that `|z|` evaluates to
/// exactly `modulus`; `from_polar` alone leaves a rounding-level spread.
fn snap_modulus(z: Complex64, modulus: f64) -> Complex64 {
    const REACH: i32 = 4;
    let mut best = z;
    let mut best_cost = i32::MAX;
    for da in -REACH..=REACH {
        for db in -REACH..=REACH {
            let cost = da.abs() + db.abs();
            if cost >= best_cost {
                continue;
            }
            let c = Complex64::new(ulps(z.re, da), ulps(z.im, db));
            if c.norm() == modulus {
                best = c;
                best_cost = cost;
            }
        }
    }
    best
}

/// Constant-modulus beam broadening for phase-only arrays.
pub fn analog_lfm_design(cfg: &ArrayConfig, ang: &AngularRegion) -> Result<BeamWeights> {
    let params = AnalogParams::new(cfg, ang)?;
    Ok(lfm_weights(cfg, ang.center(), params.eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::energy;
    use crate::geometry::build_array;
    use crate::steering::{ff_csv, inner_gain, nf_csv_unchecked};
    use proptest::prelude::*;

    fn ff_gain(cfg: &ArrayConfig, w: &[Complex64], t: f64) -> f64 {
        inner_gain(&ff_csv(cfg, t).unwrap(), w)
    }

    #[test]
    fn single_region_matches_rolloff_aware() {
        let cfg = build_array(64, 30e9, 1.0).unwrap();
        let ang = AngularRegion::new(-0.2, 0.1).unwrap();
        let spec = MultiRegionSpec::equal(vec![ang], 64).unwrap();
        let a = multi_region_ff(&cfg, &spec).unwrap();
        let b = rolloff_aware_ff(&cfg, &ang).unwrap();
        for (x, y) in a.weights.iter().zip(&b.weights) {
            assert!((x - y).norm() < 1e-12);
        }
        assert_eq!(a.scheme, Scheme::MultiRegion);
    }

    #[test]
    fn separation_margin_enforced() {
        let n = 64;
        let (mu1, mu2) = (0.05, 0.08);
        let c2 = mu1 + mu2 + 7.0 / n as f64;
        let regions = vec![
            AngularRegion::centered(0.0, mu1).unwrap(),
            AngularRegion::centered(c2, mu2).unwrap(),
        ];
        let err = MultiRegionSpec::equal(regions, n).unwrap_err().to_string();
        assert!(err.contains("regions 0 and 1"), "{err}");
        let ok = vec![
            AngularRegion::centered(0.0, mu1).unwrap(),
            AngularRegion::centered(mu1 + mu2 + 8.0 / n as f64 + 1e-12, mu2).unwrap(),
        ];
        assert!(MultiRegionSpec::equal(ok, n).is_ok());
    }

    #[test]
    fn rejects_bad_betas() {
        let r = vec![(AngularRegion::new(-0.1, 0.1).unwrap(), RangeRegion::far_field())];
        assert!(MultiRegionSpec::new(r.clone(), vec![-1.0], 64).is_err());
        assert!(MultiRegionSpec::new(r.clone(), vec![0.0], 64).is_err());
        assert!(MultiRegionSpec::new(r, vec![1.0, 1.0], 64).is_err());
    }

    #[test]
    fn two_region_coverage_and_leakage() {
        let cfg = build_array(64, 30e9, 1.0).unwrap();
        let left = AngularRegion::new(-0.4, -0.2).unwrap();
        let right = AngularRegion::new(0.2, 0.4).unwrap();
        let spec = MultiRegionSpec::equal(vec![left, right], 64).unwrap();
        let w = multi_region_ff(&cfg, &spec).unwrap();
        let single = rolloff_aware_ff(&cfg, &right).unwrap();
        let plateau = ff_gain(&cfg, &single.weights, 0.3);
        for region in [left, right] {
            let min = (0..=400)
                .map(|i| region.theta_min() + 0.2 * i as f64 / 400.0)
                .map(|t| ff_gain(&cfg, &w.weights, t))
                .fold(f64::INFINITY, f64::min);
            assert!(min >= 0.4 * plateau, "min {min} plateau {plateau}");
        }
        let other = rolloff_aware_ff(&cfg, &left).unwrap();
        let own = ff_gain(&cfg, &single.weights, 0.3);
        let leak = ff_gain(&cfg, &other.weights, 0.3);
        assert!(20.0 * (leak / own).log10() <= -13.0);
    }

    #[test]
    fn superposition_is_linear() {
        let cfg = build_array(64, 30e9, 1.0).unwrap();
        let a = AngularRegion::new(-0.5, -0.3).unwrap();
        let b = AngularRegion::new(0.1, 0.3).unwrap();
        let spec = MultiRegionSpec::new(
            vec![(a, RangeRegion::far_field()), (b, RangeRegion::far_field())],
            vec![0.7, 1.3],
            64,
        )
        .unwrap();
        let w = multi_region_ff(&cfg, &spec).unwrap();
        let wa = rolloff_aware_ff(&cfg, &a).unwrap();
        let wb = rolloff_aware_ff(&cfg, &b).unwrap();
        let raw: Vec<Complex64> = wa.weights.iter().zip(&wb.weights).map(|(x, y)| x * 0.7 + y * 1.3).collect();
        let scale = (1.0 / energy(&raw)).sqrt();
        for t in [-0.45, -0.2, 0.0, 0.17, 0.6] {
            let csv = ff_csv(&cfg, t).unwrap();
            let dot = |v: &[Complex64]| csv.iter().zip(v).map(|(a, w)| a.conj() * w).sum::<Complex64>();
            let lhs = dot(&w.weights);
            let rhs = (dot(&wa.weights) * 0.7 + dot(&wb.weights) * 1.3) * scale;
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    #[test]
    fn partition_example() {
        let ang = AngularRegion::new(-0.3, 0.3).unwrap();
        let parts = partition_large_angle(&ang, 0.2, 256).unwrap();
        assert_eq!(parts.len(), 2);
        let h = (0.6 - 4.0 / 256.0) / 4.0;
        for p in &parts {
            assert!((p.half_width() - h).abs() < 1e-15);
        }
        assert!((parts[1].theta_min() - parts[0].theta_max() - 4.0 / 256.0).abs() < 1e-15);
        assert_eq!(parts[0].theta_min(), -0.3);
        assert_eq!(parts[1].theta_max(), 0.3);
    }

    #[test]
    fn partition_unchanged_and_infeasible() {
        let ang = AngularRegion::new(-0.1, 0.1).unwrap();
        assert_eq!(partition_large_angle(&ang, 0.2, 64).unwrap(), vec![ang]);
        assert!(partition_large_angle(&ang, 1.0 / 64.0, 64).is_err());
    }

    proptest! {
        #[test]
        fn partition_covers_region(lo in -0.9f64..0.0, width in 0.05f64..0.9, th in 0.03f64..0.3, n in 64usize..512) {
            let hi = (lo + width).min(0.95);
            let ang = AngularRegion::new(lo, hi).unwrap();
            let parts = partition_large_angle(&ang, th, n).unwrap();
            let gap = 4.0 / n as f64;
            for p in &parts {
                prop_assert!(p.half_width() <= th + 1e-12);
            }
            for pair in parts.windows(2) {
                prop_assert!((pair[1].theta_min() - pair[0].theta_max() - gap).abs() < 1e-12);
            }
            // smallest M: one fewer window would exceed theta_th
            let m = parts.len();
            if m > 1 {
                let h_prev = (2.0 * ang.half_width() - (m - 2) as f64 * gap) / (2.0 * (m - 1) as f64);
                prop_assert!(h_prev > th);
            }
            for i in 0..=200 {
                let t = lo + (hi - lo) * i as f64 / 200.0;
                let covered = parts.iter().any(|p| (t - p.center()).abs() <= p.protected_half_width(n) + 1e-12);
                prop_assert!(covered);
            }
        }
    }

    #[test]
    fn large_angle_single_window_is_design_nf() {
        let cfg = build_array(256, 30e9, 1.0).unwrap();
        let ang = AngularRegion::new(-0.1, 0.1).unwrap();
        let rng = RangeRegion::new(1.0 / 24.0, 1.0 / 16.0).unwrap();
        let a = large_angle_design(&cfg, &ang, &rng, 0.2).unwrap();
        let b = design_nf(&cfg, &ang, &rng).unwrap();
        for (x, y) in a.weights.iter().zip(&b.weights) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn large_angle_ripple() {
        let cfg = build_array(256, 30e9, 1.0).unwrap();
        let ang = AngularRegion::new(-0.3, 0.3).unwrap();
        let rng = RangeRegion::new(1.0 / 24.0, 1.0 / 16.0).unwrap();
        let w = large_angle_design(&cfg, &ang, &rng, 0.2).unwrap();
        assert!((energy(&w.weights) - 1.0).abs() < 1e-12);
        let gains: Vec<f64> = (0..401)
            .map(|i| -0.3 + 0.6 * i as f64 / 400.0)
            .map(|t| inner_gain(&nf_csv_unchecked(&cfg, t, rng.center()), &w.weights))
            .collect();
        let max = gains.iter().copied().fold(0.0, f64::max);
        let min = gains.iter().copied().fold(f64::INFINITY, f64::min);
        assert!(20.0 * (max / min).log10() <= 3.0);
    }

    #[test]
    fn analog_eta_value() {
        let cfg = build_array(64, 30e9, 1.0).unwrap();
        let ang = AngularRegion::new(-0.1, 0.1).unwrap();
        let p = AnalogParams::new(&cfg, &ang).unwrap();
        assert!((p.varpi - 0.1).abs() < 1e-15);
        // independent evaluation of the closed form with D = 63 lambda / 2
        assert!((p.eta - 0.554_065_230_077_237_6).abs() < 1e-12, "{}", p.eta);
    }

    #[test]
    fn analog_constant_modulus() {
        let cfg = build_array(64, 30e9, 3.0).unwrap();
        let ang = AngularRegion::new(0.05, 0.35).unwrap();
        let w = analog_lfm_design(&cfg, &ang).unwrap();
        let target = (3.0f64 / 64.0).sqrt();
        for x in &w.weights {
            assert_eq!(x.norm(), target);
        }
        assert!((w.power - 3.0).abs() <= 1e-12);
    }

    proptest! {
        #[test]
        fn analog_modulus_exact_everywhere(n in 8usize..400, lo in -0.9f64..0.5, width in 0.01f64..0.4, pt in 0.1f64..20.0) {
            let cfg = build_array(n, 30e9, pt).unwrap();
            let ang = AngularRegion::new(lo, (lo + width).min(0.95)).unwrap();
            let w = analog_lfm_design(&cfg, &ang).unwrap();
            let target = (pt / n as f64).sqrt();
            for x in &w.weights {
                prop_assert_eq!(x.norm(), target);
            }
        }
    }

    #[test]
    fn analog_preconditions() {
        let cfg = build_array(64, 30e9, 1.0).unwrap();
        // inside [-1, 1] only the full span reaches mu = 1
        let err = analog_lfm_design(&cfg, &AngularRegion::new(-1.0, 1.0).unwrap()).unwrap_err();
        assert!(err.to_string().contains("mu < 1"));
        assert!(analog_lfm_design(&cfg, &AngularRegion::new(-0.99, 0.99).unwrap()).is_ok());
    }

    #[test]
    fn zero_eta_peaks_at_center() {
        let cfg = build_array(64, 30e9, 1.0).unwrap();
        let w = lfm_weights(&cfg, 0.25, 0.0);
        assert!((ff_gain(&cfg, &w.weights, 0.25) - 1.0).abs() < 1e-12);
        for t in [0.2, 0.24, 0.26, 0.3] {
            assert!(ff_gain(&cfg, &w.weights, t) < 1.0);
        }
    }
}
