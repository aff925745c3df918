//! Numerical integration used by the analytical gain models.
//!
//! Two rules are provided: a globally adaptive 15-point Gauss–Kronrod scheme
//! for oscillatory one-dimensional integrals, and a nested Clenshaw–Curtis
//! rule that doubles its node count until successive estimates agree.

use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// 7-point Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_error: f64,
    pub converged: bool,
}

/// Tolerances for [`gauss_kronrod`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * wk;
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    ((kronrod * half), ((kronrod - gauss) * half).norm())
}

/// Globally adaptive Gauss–Kronrod (G7/K15) integration of a complex-valued
/// integrand over `[a, b]`.
pub fn gauss_kronrod_complex<F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> QuadResult<Complex64>
where
    F: FnMut(f64) -> Complex64,
{
    if a == b {
        return QuadResult {
            value: Complex64::new(0.0, 0.0),
            abs_error: 0.0,
            converged: true,
        };
    }
    let (value, error) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, error });
    let mut total = value;
    let mut total_err = error;
    let mut converged = false;
    while heap.len() < opts.max_intervals {
        if total_err <= opts.abs_tol.max(opts.rel_tol * total.norm()) {
            converged = true;
            break;
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision
            heap.push(worst);
            break;
        }
        let (lv, le) = gk15(&mut f, worst.a, mid);
        let (rv, re) = gk15(&mut f, mid, worst.b);
        total += lv + rv - worst.value;
        total_err += le + re - worst.error;
        heap.push(Segment { a: worst.a, b: mid, value: lv, error: le });
        heap.push(Segment { a: mid, b: worst.b, value: rv, error: re });
    }
    // resum to shed accumulated cancellation in the running totals
    let value = heap.iter().fold(Complex64::new(0.0, 0.0), |acc, s| acc + s.value);
    let abs_error: f64 = heap.iter().map(|s| s.error).sum();
    QuadResult {
        value,
        abs_error,
        converged: converged || abs_error <= opts.abs_tol.max(opts.rel_tol * value.norm()),
    }
}

/// Real-valued variant of [`gauss_kronrod_complex`].
pub fn gauss_kronrod<F>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> QuadResult<f64>
where
    F: FnMut(f64) -> f64,
{
    let r = gauss_kronrod_complex(|x| Complex64::new(f(x), 0.0), a, b, opts);
    QuadResult {
        value: r.value.re,
        abs_error: r.abs_error,
        converged: r.converged,
    }
}

/// Clenshaw–Curtis nodes and weights on `[-1, 1]` for `n` intervals (`n + 1` nodes).
fn clenshaw_curtis_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2 && n.is_multiple_of(2), "Clenshaw-Curtis order must be even");
    let nf = n as f64;
    let mut nodes = Vec::with_capacity(n + 1);
    let mut weights = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let theta = k as f64 * std::f64::consts::PI / nf;
        nodes.push(theta.cos());
        let mut s = 0.0;
        for j in 1..=n / 2 {
            let b = if 2 * j == n { 1.0 } else { 2.0 };
            s += b / (4.0 * (j * j) as f64 - 1.0) * (2.0 * j as f64 * theta).cos();
        }
        let c = if k == 0 || k == n { 1.0 } else { 2.0 };
        weights.push(c / nf * (1.0 - s));
    }
    (nodes, weights)
}

/// Nested Clenshaw–Curtis integration over `[a, b]` starting from
/// `initial_intervals` (129 nodes for 128) and doubling until two successive
/// estimates differ by less than `rel_tol` relative, or `max_intervals` is hit.
pub fn clenshaw_curtis_complex<F>(
    mut f: F,
    a: f64,
    b: f64,
    initial_intervals: usize,
    rel_tol: f64,
    max_intervals: usize,
) -> QuadResult<Complex64>
where
    F: FnMut(f64) -> Complex64,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let estimate = |n: usize, f: &mut F| {
        let (nodes, weights) = clenshaw_curtis_rule(n);
        nodes
            .iter()
            .zip(&weights)
            .fold(Complex64::new(0.0, 0.0), |acc, (&x, &w)| acc + f(center + half * x) * w)
            * half
    };
    let mut n = initial_intervals.max(2);
    if n % 2 == 1 {
        n += 1;
    }
    let mut prev = estimate(n, &mut f);
    loop {
        if 2 * n > max_intervals {
            return QuadResult {
                value: prev,
                abs_error: f64::NAN,
                converged: false,
            };
        }
        n *= 2;
        let next = estimate(n, &mut f);
        let diff = (next - prev).norm();
        if diff <= rel_tol * next.norm() || diff == 0.0 {
            return QuadResult {
                value: next,
                abs_error: diff,
                converged: true,
            };
        }
        prev = next;
    }
}
