//! Ground-truth gain evaluation on dense grids, worst-case reporting, and
//! wall-clock benchmarking of the design schemes.

use crate::baselines::{dft_design, sampling_design, SamplingConfig};
use crate::beam::{BeamWeights, Scheme};
use crate::composite::{analog_lfm_design, large_angle_design, multi_region_ff, MultiRegionSpec};
use crate::error::{invalid, Result};
use crate::ff_design::{rolloff_aware_ff, surrogate_ff, AngularRegion};
use crate::geometry::ArrayConfig;
use crate::nf_design::{design_nf, surrogate_nf, RangeRegion, DEFAULT_THETA_TH};
use crate::steering::{ff_csv_unchecked, inner_gain, nf_csv_unchecked};
use rayon::prelude::*;
use serde::Serialize;
use std::time::{Duration, Instant};

/// Default verification density (grid points per resolution cell).
pub const DEFAULT_POINTS_PER_BEAMWIDTH: usize = 8;

/// Gains on a `theta x xi` grid, stored row-major (`theta` index outer).
#[derive(Debug, Clone, PartialEq)]
pub struct GainGrid {
    pub theta_axis: Vec<f64>,
    pub xi_axis: Vec<f64>,
    pub gains: Vec<f64>,
    pub scheme: Scheme,
}

impl GainGrid {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.gains[i * self.xi_axis.len() + j]
    }

    pub fn min(&self) -> f64 {
        self.gains.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.gains.iter().copied().fold(0.0, f64::max)
    }

    /// `(theta, xi, gain)` triples in storage order.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.theta_axis.iter().enumerate().flat_map(move |(i, &t)| {
            self.xi_axis.iter().enumerate().map(move |(j, &x)| (t, x, self.get(i, j)))
        })
    }
}

/// Amplitude gain in dB (`20 log10`).
pub fn to_db(gain: f64) -> f64 {
    20.0 * gain.log10()
}

fn check_axis(name: &str, axis: &[f64], lo: f64, hi: f64) -> Result<()> {
    if axis.is_empty() {
        return Err(invalid(format!("{name} axis is empty")));
    }
    if let Some(v) = axis.iter().find(|v| !(v.is_finite() && **v >= lo && **v <= hi)) {
        return Err(invalid(format!("{name} axis value {v} outside [{lo}, {hi}]")));
    }
    if axis.windows(2).any(|p| p[1] < p[0]) {
        return Err(invalid(format!("{name} axis is not sorted")));
    }
    Ok(())
}

/// Evaluates `|a(theta_i, xi_j)^H w|` over the grid, in parallel over rows.
pub fn pattern_grid(
    cfg: &ArrayConfig,
    w: &BeamWeights,
    theta_axis: &[f64],
    xi_axis: &[f64],
) -> Result<GainGrid> {
    check_axis("theta", theta_axis, -1.0, 1.0)?;
    check_axis("xi", xi_axis, 0.0, f64::INFINITY)?;
    if w.len() != cfg.num_antennas() {
        return Err(invalid(format!(
            "weight vector has {} entries, array has {}",
            w.len(),
            cfg.num_antennas()
        )));
    }
    let gains: Vec<f64> = theta_axis
        .par_iter()
        .flat_map_iter(|&t| {
            xi_axis.iter().map(move |&x| {
                let csv = if x == 0.0 {
                    ff_csv_unchecked(cfg, t)
                } else {
                    nf_csv_unchecked(cfg, t, x)
                };
                inner_gain(&csv, &w.weights)
            })
        })
        .collect();
    Ok(GainGrid {
        theta_axis: theta_axis.to_vec(),
        xi_axis: xi_axis.to_vec(),
        gains,
        scheme: w.scheme,
    })
}

/// Closed evaluation region; unlike the design regions it may collapse to a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalRegion {
    pub theta_min: f64,
    pub theta_max: f64,
    pub xi_min: f64,
    pub xi_max: f64,
}

impl EvalRegion {
    pub fn new(theta_min: f64, theta_max: f64, xi_min: f64, xi_max: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&theta_min) || !(-1.0..=1.0).contains(&theta_max) {
            return Err(invalid(format!("angles [{theta_min}, {theta_max}] outside [-1, 1]")));
        }
        if theta_min > theta_max {
            return Err(invalid(format!("theta_min ({theta_min}) exceeds theta_max ({theta_max})")));
        }
        if !(xi_min.is_finite() && xi_max.is_finite() && xi_min >= 0.0 && xi_min <= xi_max) {
            return Err(invalid(format!("invalid inverse-range interval [{xi_min}, {xi_max}]")));
        }
        Ok(Self {
            theta_min,
            theta_max,
            xi_min,
            xi_max,
        })
    }

    pub fn point(theta: f64, xi: f64) -> Result<Self> {
        Self::new(theta, theta, xi, xi)
    }

    pub fn from_regions(ang: &AngularRegion, rng: &RangeRegion) -> Self {
        Self {
            theta_min: ang.theta_min(),
            theta_max: ang.theta_max(),
            xi_min: rng.xi_min(),
            xi_max: rng.xi_max(),
        }
    }
}

/// Verification grid layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub theta_min: f64,
    pub theta_max: f64,
    pub theta_points: usize,
    pub xi_min: f64,
    pub xi_max: f64,
    pub xi_points: usize,
    pub points_per_beamwidth: usize,
}

impl GridSpec {
    /// `cells * ppb + 1` points per axis, with angular cell `2/N` and
    /// inverse-range cell `4 lambda / D^2`. Grids for `k * ppb` contain those for `ppb`.
    pub fn for_region(cfg: &ArrayConfig, region: &EvalRegion, points_per_beamwidth: usize) -> Result<Self> {
        if points_per_beamwidth < 4 {
            return Err(invalid(format!(
                "points_per_beamwidth must be at least 4, got {points_per_beamwidth}"
            )));
        }
        let count = |lo: f64, hi: f64, cell: f64| -> usize {
            if hi == lo {
                1
            } else {
                ((hi - lo) / cell).ceil() as usize * points_per_beamwidth + 1
            }
        };
        let xi_cell = 4.0 * cfg.wavelength() / (cfg.aperture() * cfg.aperture());
        Ok(Self {
            theta_min: region.theta_min,
            theta_max: region.theta_max,
            theta_points: count(region.theta_min, region.theta_max, cfg.resolution()),
            xi_min: region.xi_min,
            xi_max: region.xi_max,
            xi_points: count(region.xi_min, region.xi_max, xi_cell),
            points_per_beamwidth,
        })
    }

    pub fn theta_axis(&self) -> Vec<f64> {
        linspace(self.theta_min, self.theta_max, self.theta_points)
    }

    pub fn xi_axis(&self) -> Vec<f64> {
        linspace(self.xi_min, self.xi_max, self.xi_points)
    }
}

/// `n` uniform points from `lo` to `hi`, endpoints exact.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i + 1 == n {
                    hi
                } else {
                    // fraction first so nested grids share points bit for bit
                    lo + (hi - lo) * (i as f64 / (n - 1) as f64)
                }
            })
            .collect(),
    }
}

/// Worst-case gain and timing of one design.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignReport {
    pub scheme: Scheme,
    /// Linear amplitude gain `min |a^H w|` over the grid.
    pub worst_case_gain: f64,
    pub grid: GridSpec,
    pub runtime_ms: f64,
    /// Convergence of iterative baselines; `None` for closed forms.
    pub converged: Option<bool>,
    pub repeats: usize,
    pub diagnostics: Vec<String>,
}

impl DesignReport {
    pub fn worst_case_gain_db(&self) -> f64 {
        to_db(self.worst_case_gain)
    }
}

/// Minimum gain of `w` over the verification grid of `region`.
pub fn worst_case_gain(
    cfg: &ArrayConfig,
    w: &BeamWeights,
    region: &EvalRegion,
    points_per_beamwidth: usize,
) -> Result<DesignReport> {
    let grid = GridSpec::for_region(cfg, region, points_per_beamwidth)?;
    let gains = pattern_grid(cfg, w, &grid.theta_axis(), &grid.xi_axis())?;
    Ok(DesignReport {
        scheme: w.scheme,
        worst_case_gain: gains.min(),
        grid,
        runtime_ms: 0.0,
        converged: None,
        repeats: 0,
        diagnostics: w.diagnostics.clone(),
    })
}

/// Target region plus the scheme-specific options a design run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub ang: AngularRegion,
    pub rng: RangeRegion,
    pub theta_th: f64,
    pub sampling: SamplingConfig,
    pub multi_region: Option<MultiRegionSpec>,
}

impl Scenario {
    pub fn new(cfg: &ArrayConfig, ang: AngularRegion, rng: RangeRegion) -> Self {
        Self {
            ang,
            rng,
            theta_th: DEFAULT_THETA_TH,
            sampling: SamplingConfig::with_samples(cfg, 20),
            multi_region: None,
        }
    }

    pub fn eval_region(&self) -> EvalRegion {
        EvalRegion::from_regions(&self.ang, &self.rng)
    }
}

/// Runs one scheme on the scenario; the flag is the baseline convergence flag.
pub fn run_scheme(cfg: &ArrayConfig, sc: &Scenario, scheme: Scheme) -> Result<(BeamWeights, Option<bool>)> {
    let far = sc.rng.is_far_field();
    let w = match scheme {
        Scheme::Proposed if far => rolloff_aware_ff(cfg, &sc.ang)?,
        Scheme::Proposed => design_nf(cfg, &sc.ang, &sc.rng)?,
        Scheme::Surrogate if far => surrogate_ff(cfg, &sc.ang)?,
        Scheme::Surrogate => surrogate_nf(cfg, &sc.ang, &sc.rng)?,
        Scheme::Sampling => {
            let out = sampling_design(cfg, &sc.ang, &sc.rng, &sc.sampling)?;
            return Ok((out.weights, Some(out.converged)));
        }
        Scheme::Dft => dft_design(cfg, &sc.ang)?,
        Scheme::MultiRegion => {
            let spec = sc
                .multi_region
                .as_ref()
                .ok_or_else(|| invalid("multi-region scheme needs a region list"))?;
            multi_region_ff(cfg, spec)?
        }
        Scheme::LargeAngle => large_angle_design(cfg, &sc.ang, &sc.rng, sc.theta_th)?,
        Scheme::Analog => analog_lfm_design(cfg, &sc.ang)?,
        Scheme::External => return Err(invalid("external weights cannot be designed")),
    };
    Ok((w, None))
}

const MIN_BATCH: Duration = Duration::from_millis(1);

/// Median wall-clock time per call of `f`, batching fast calls to at least 1 ms.
fn median_runtime_ms<F: FnMut() -> Result<()>>(repeats: usize, mut f: F) -> Result<f64> {
    let start = Instant::now();
    f()?;
    let first = start.elapsed();
    let batch = if first >= MIN_BATCH {
        1
    } else {
        (MIN_BATCH.as_secs_f64() / first.as_secs_f64().max(1e-9)).ceil() as usize
    };
    let mut samples = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        for _ in 0..batch {
            f()?;
        }
        samples.push(start.elapsed().as_secs_f64() * 1e3 / batch as f64);
    }
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    Ok(if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        0.5 * (samples[mid - 1] + samples[mid])
    })
}

/// Times every scheme and evaluates it on a shared verification grid.
pub fn benchmark(
    cfg: &ArrayConfig,
    scenario: &Scenario,
    schemes: &[Scheme],
    repeats: usize,
    points_per_beamwidth: usize,
) -> Result<Vec<DesignReport>> {
    if repeats < 3 {
        return Err(invalid(format!("repeats must be at least 3, got {repeats}")));
    }
    let region = scenario.eval_region();
    schemes
        .iter()
        .map(|&scheme| {
            let (w, converged) = run_scheme(cfg, scenario, scheme)?;
            let runtime_ms = median_runtime_ms(repeats, || run_scheme(cfg, scenario, scheme).map(|_| ()))?;
            let mut report = worst_case_gain(cfg, &w, &region, points_per_beamwidth)?;
            report.runtime_ms = runtime_ms;
            report.converged = converged;
            report.repeats = repeats;
            Ok(report)
        })
        .collect()
}

/// Parses a comma-separated scheme list.
pub fn parse_schemes(list: &str) -> Result<Vec<Scheme>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect()
}
