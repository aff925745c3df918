//! Reference schemes: sampled max-min optimization and DFT codeword
//! superposition.
//!
//! The sampling baseline discretizes the target region and maximizes the
//! minimum gain over the samples by successive convex approximation. At
//! iterate `w_t` each constraint `|a_s^H w| >= gamma` is replaced by the
//! inner bound `Re{e^{-j arg(a_s^H w_t)} a_s^H w} >= gamma`, which gives the
//! second-order-cone subproblem
//!
//! ```text
//! max_w min_s Re(b_s^H w)   s.t. ||w||^2 <= P
//! ```
//!
//! Its dual is the minimum-norm point of the convex hull of `{b_s}`:
//! `min_{lambda in simplex} sqrt(P) ||B lambda||`, with the primal recovered as
//! `w = sqrt(P) B lambda / ||B lambda||`. The dual is solved by accelerated
//! projected gradient on the Gram matrix and stopped on the duality gap.

use crate::beam::{BeamWeights, Scheme};
use crate::error::{invalid, Result};
use crate::ff_design::{rolloff_aware_ff, AngularRegion};
use crate::geometry::ArrayConfig;
use crate::nf_design::{design_nf, RangeRegion};
use crate::steering::{ff_csv_unchecked, nf_csv_unchecked};
use num_complex::Complex64;

/// Settings of the sampled max-min baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingConfig {
    /// Samples per dimension `S` (an `S x S` grid for 2D regions).
    pub num_samples: usize,
    /// Outer SCA iterations `I`.
    pub max_iters: usize,
    /// Absolute improvement in `gamma` below which the SCA stops.
    pub tolerance: f64,
    /// Relative duality gap at which the inner subproblem is accepted.
    pub inner_solver_tolerance: f64,
}

impl SamplingConfig {
    /// `S` samples with the default stopping rule `eps = 1e-4 sqrt(P_t)`, `I = 200`.
    pub fn with_samples(cfg: &ArrayConfig, num_samples: usize) -> Self {
        Self {
            num_samples,
            max_iters: 200,
            tolerance: 1e-4 * cfg.tx_power().sqrt(),
            inner_solver_tolerance: 1e-7,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_samples == 0 {
            return Err(invalid("num_samples must be at least 1"));
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters must be at least 1"));
        }
        if !(self.tolerance > 0.0) {
            return Err(invalid(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if !(self.inner_solver_tolerance > 0.0) {
            return Err(invalid("inner_solver_tolerance must be positive"));
        }
        Ok(())
    }
}

/// Result of [`sampling_design`].
#[derive(Debug, Clone)]
pub struct SamplingOutcome {
    pub weights: BeamWeights,
    /// Minimum gain over the sample set achieved by `weights`.
    pub gamma: f64,
    /// Minimum sampled gain after each accepted iterate, starting with the initial point.
    pub history: Vec<f64>,
    pub iterations: usize,
    /// False when the iteration budget ran out before the improvement fell below tolerance.
    pub converged: bool,
}

/// Uniform sample points `(theta, xi)` over the region.
pub fn sample_points(ang: &AngularRegion, rng: &RangeRegion, per_dim: usize) -> Vec<(f64, f64)> {
    let axis = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
        if n == 1 || lo == hi {
            vec![(lo + hi) / 2.0]
        } else {
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        }
    };
    let thetas = axis(ang.theta_min(), ang.theta_max(), per_dim);
    let xis = if rng.is_far_field() {
        vec![0.0]
    } else {
        axis(rng.xi_min(), rng.xi_max(), per_dim)
    };
    thetas
        .iter()
        .flat_map(|&t| xis.iter().map(move |&x| (t, x)))
        .collect()
}

fn min_gain(csvs: &[Vec<Complex64>], w: &[Complex64]) -> (f64, Vec<Complex64>) {
    let products: Vec<Complex64> = csvs
        .iter()
        .map(|a| a.iter().zip(w).fold(Complex64::new(0.0, 0.0), |acc, (a, w)| acc + a.conj() * w))
        .collect();
    let min = products.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min);
    (min, products)
}

/// Sampled max-min baseline, initialized from the closed-form design.
pub fn sampling_design(
    cfg: &ArrayConfig,
    ang: &AngularRegion,
    rng: &RangeRegion,
    sc: &SamplingConfig,
) -> Result<SamplingOutcome> {
    sc.validate()?;
    let points = sample_points(ang, rng, sc.num_samples);
    let csvs: Vec<Vec<Complex64>> = points
        .iter()
        .map(|&(t, x)| {
            if x == 0.0 {
                ff_csv_unchecked(cfg, t)
            } else {
                nf_csv_unchecked(cfg, t, x)
            }
        })
        .collect();
    let init = if rng.is_far_field() {
        rolloff_aware_ff(cfg, ang)?
    } else {
        design_nf(cfg, ang, rng)?
    };
    let power = cfg.tx_power();
    let root_p = power.sqrt();
    let mut w = init.weights;
    let (mut gamma, mut products) = min_gain(&csvs, &w);
    let mut history = vec![gamma];
    let mut lambda = vec![1.0 / csvs.len() as f64; csvs.len()];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < sc.max_iters {
        iterations += 1;
        // rotate each sample so its current product is real and positive
        let rotated: Vec<Vec<Complex64>> = csvs
            .iter()
            .zip(&products)
            .map(|(a, p)| {
                let phase = if p.norm() > 0.0 { p / p.norm() } else { Complex64::new(1.0, 0.0) };
                a.iter().map(|x| x * phase).collect()
            })
            .collect();
        let gram = gram_matrix(&rotated);
        min_norm_on_simplex(&gram, &mut lambda, sc.inner_solver_tolerance, 20_000);
        let mut x = vec![Complex64::new(0.0, 0.0); w.len()];
        for (b, &l) in rotated.iter().zip(&lambda) {
            if l != 0.0 {
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi += bi * l;
                }
            }
        }
        let norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            converged = true;
            break;
        }
        let candidate: Vec<Complex64> = x.iter().map(|v| v * (root_p / norm)).collect();
        let (cand_gamma, cand_products) = min_gain(&csvs, &candidate);
        if cand_gamma <= gamma {
            // no ascent left at the inner-solver accuracy
            converged = true;
            break;
        }
        let step = cand_gamma - gamma;
        w = candidate;
        gamma = cand_gamma;
        products = cand_products;
        history.push(gamma);
        if step < sc.tolerance {
            converged = true;
            break;
        }
    }

    let mut weights = BeamWeights::with_power(w, Scheme::Sampling, power)?;
    if !converged {
        weights.diagnostics.push(format!(
            "sampling baseline stopped after {iterations} iterations without meeting the tolerance"
        ));
    }
    let (gamma, _) = min_gain(&csvs, &weights.weights);
    Ok(SamplingOutcome {
        weights,
        gamma,
        history,
        iterations,
        converged,
    })
}

fn gram_matrix(vectors: &[Vec<Complex64>]) -> Vec<Vec<f64>> {
    let s = vectors.len();
    let mut g = vec![vec![0.0; s]; s];
    for i in 0..s {
        for j in i..s {
            let v = vectors[i]
                .iter()
                .zip(&vectors[j])
                .map(|(a, b)| (a.conj() * b).re)
                .sum::<f64>();
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}

fn mat_vec(g: &[Vec<f64>], x: &[f64], out: &mut [f64]) {
    for (o, row) in out.iter_mut().zip(g) {
        *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
    }
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &mut [f64]) {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cumsum += s;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if s - t > 0.0 {
            tau = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - tau).max(0.0);
    }
}

fn largest_eigenvalue(g: &[Vec<f64>]) -> f64 {
    let n = g.len();
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    let mut y = vec![0.0; n];
    let mut est = 0.0;
    for _ in 0..100 {
        mat_vec(g, &x, &mut y);
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / norm;
        }
        if (norm - est).abs() <= 1e-10 * norm {
            est = norm;
            break;
        }
        est = norm;
    }
    est
}

/// Minimizes `lambda^T G lambda` over the simplex (FISTA with adaptive
/// restart), warm-started from `lambda`. Stops when the relative gap between
/// `sqrt(lambda^T G lambda)` and `min_s (G lambda)_s / sqrt(lambda^T G lambda)`
/// falls below `tol`.
fn min_norm_on_simplex(g: &[Vec<f64>], lambda: &mut [f64], tol: f64, max_iter: usize) {
    let n = lambda.len();
    if n == 1 {
        lambda[0] = 1.0;
        return;
    }
    let lip = largest_eigenvalue(g).max(f64::MIN_POSITIVE) * 1.01;
    let step = 1.0 / lip;
    project_simplex(lambda);
    let mut y = lambda.to_vec();
    let mut prev = lambda.to_vec();
    let mut grad = vec![0.0; n];
    let mut t: f64 = 1.0;
    let mut last_obj = f64::INFINITY;
    for _ in 0..max_iter {
        mat_vec(g, lambda, &mut grad);
        let obj: f64 = lambda.iter().zip(&grad).map(|(a, b)| a * b).sum();
        if obj > 0.0 {
            let min_g = grad.iter().copied().fold(f64::INFINITY, f64::min);
            let dual = obj.sqrt();
            let primal = min_g / dual;
            if dual - primal <= tol * dual {
                return;
            }
        }
        if obj > last_obj {
            // restart momentum
            y.copy_from_slice(lambda);
            t = 1.0;
        }
        last_obj = obj;
        mat_vec(g, &y, &mut grad);
        prev.copy_from_slice(lambda);
        for i in 0..n {
            lambda[i] = y[i] - step * grad[i];
        }
        project_simplex(lambda);
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let beta = (t - 1.0) / t_next;
        for i in 0..n {
            y[i] = lambda[i] + beta * (lambda[i] - prev[i]);
        }
        t = t_next;
    }
}

/// DFT directions `theta_k = -1 + (2k - 1)/N` lying in `[theta_min, theta_max]`.
pub fn dft_directions(num_antennas: usize, ang: &AngularRegion) -> Vec<f64> {
    let n = num_antennas as f64;
    let slack = 1e-12;
    (1..=num_antennas)
        .map(|k| -1.0 + (2.0 * k as f64 - 1.0) / n)
        .filter(|&t| t >= ang.theta_min() - slack && t <= ang.theta_max() + slack)
        .collect()
}

/// Power-normalized sum of the DFT codewords inside the region.
pub fn dft_design(cfg: &ArrayConfig, ang: &AngularRegion) -> Result<BeamWeights> {
    let mut directions = dft_directions(cfg.num_antennas(), ang);
    let mut diagnostics = Vec::new();
    if directions.is_empty() {
        let n = cfg.num_antennas();
        let c = ang.center();
        let nearest = (1..=n)
            .map(|k| -1.0 + (2.0 * k as f64 - 1.0) / n as f64)
            .min_by(|a, b| (a - c).abs().total_cmp(&(b - c).abs()))
            .expect("array has at least two codewords");
        diagnostics.push(format!(
            "no DFT direction inside [{}, {}]; using the nearest codeword at {nearest}",
            ang.theta_min(),
            ang.theta_max()
        ));
        directions.push(nearest);
    }
    let mut w = vec![Complex64::new(0.0, 0.0); cfg.num_antennas()];
    for &t in &directions {
        for (wi, a) in w.iter_mut().zip(ff_csv_unchecked(cfg, t)) {
            *wi += a;
        }
    }
    Ok(BeamWeights::with_power(w, Scheme::Dft, cfg.tx_power())?.with_diagnostics(diagnostics))
}
