//! Special functions: normalized sinc, sine integral, Fresnel integrals and
//! the generalized Fresnel kernel used by the range-defocusing model.
//!
//! Si and the Fresnel pair use a power series below a crossover argument and
//! the auxiliary-function representation above it, where the auxiliary
//! functions are evaluated by a modified-Lentz continued fraction. Over the
//! whole real line both agree with adaptive quadrature to better than 1e-12
//! absolute (see the tests); the public contract is 1e-8.

use crate::error::{invalid, Result};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

const EPS: f64 = 1e-16;
const FPMIN: f64 = 1e-300;
const MAX_ITER: usize = 200;
const SI_SERIES_LIMIT: f64 = 2.0;
const FRESNEL_SERIES_LIMIT: f64 = 1.5;

/// `sin(pi x)` with exact zeros at the integers.
pub fn sin_pi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let quarter = (2.0 * x).round();
    let rem = x - 0.5 * quarter;
    let (s, c) = (PI * rem).sin_cos();
    match (quarter as i64).rem_euclid(4) {
        0 => s,
        1 => c,
        2 => -s,
        _ => -c,
    }
}

/// Normalized sinc, `sin(pi x) / (pi x)`, with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        sin_pi(x) / (PI * x)
    }
}

/// Sine integral `Si(x) = int_0^x sin(t)/t dt`.
pub fn si(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let t = x.abs();
    let value = if t == 0.0 {
        0.0
    } else if t <= SI_SERIES_LIMIT {
        si_series(t)
    } else if t.is_infinite() {
        FRAC_PI_2
    } else {
        si_continued_fraction(t)
    };
    if x < 0.0 {
        -value
    } else {
        value
    }
}

fn si_series(t: f64) -> f64 {
    let t2 = t * t;
    let mut term = t;
    let mut sum = t;
    for k in 1..MAX_ITER {
        let kf = k as f64;
        term *= -t2 / ((2.0 * kf) * (2.0 * kf + 1.0));
        let contrib = term / (2.0 * kf + 1.0);
        sum += contrib;
        if contrib.abs() < EPS * sum.abs() {
            break;
        }
    }
    sum
}

// Si(t) = pi/2 - f(t) cos t - g(t) sin t, with f + j g obtained from the
// continued fraction of E1(jt).
fn si_continued_fraction(t: f64) -> f64 {
    let one = Complex64::new(1.0, 0.0);
    let mut b = Complex64::new(1.0, t);
    let mut c = Complex64::new(1.0 / FPMIN, 0.0);
    let mut d = one / b;
    let mut h = d;
    for i in 2..MAX_ITER {
        let a = -(((i - 1) * (i - 1)) as f64);
        b += 2.0;
        d = one / (d * a + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < EPS {
            break;
        }
    }
    let h = Complex64::new(t.cos(), -t.sin()) * h;
    FRAC_PI_2 + h.im
}

/// Both Fresnel integrals at once, returned as `G(z) = C(z) + j S(z)`.
pub fn fresnel_g(z: f64) -> Complex64 {
    if z.is_nan() {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    let ax = z.abs();
    let g = if ax == 0.0 {
        Complex64::new(0.0, 0.0)
    } else if ax.is_infinite() {
        Complex64::new(0.5, 0.5)
    } else if ax <= FRESNEL_SERIES_LIMIT {
        fresnel_series(ax)
    } else {
        fresnel_continued_fraction(ax)
    };
    if z < 0.0 {
        -g
    } else {
        g
    }
}

/// Fresnel cosine integral `C(z) = int_0^z cos(pi t^2 / 2) dt`.
pub fn fresnel_c(z: f64) -> f64 {
    fresnel_g(z).re
}

/// Fresnel sine integral `S(z) = int_0^z sin(pi t^2 / 2) dt`.
pub fn fresnel_s(z: f64) -> f64 {
    fresnel_g(z).im
}

fn fresnel_series(ax: f64) -> Complex64 {
    // C = sum_{k even} (-1)^{k/2} (pi/2)^k x^{2k+1} / (k! (2k+1)),
    // S = the same over odd k; both share the running term.
    let fact = FRAC_PI_2 * ax * ax;
    let mut term = ax;
    let mut sum_c = ax;
    let mut sum_s = 0.0;
    let mut sign_c = 1.0;
    let mut sign_s = 1.0;
    for k in 1..MAX_ITER {
        term *= fact / k as f64;
        let contrib = term / (2 * k + 1) as f64;
        if k % 2 == 1 {
            sum_s += sign_s * contrib;
            sign_s = -sign_s;
        } else {
            sign_c = -sign_c;
            sum_c += sign_c * contrib;
        }
        if contrib < EPS * sum_c.abs().max(sum_s.abs()) {
            break;
        }
    }
    Complex64::new(sum_c, sum_s)
}

fn fresnel_continued_fraction(ax: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let pix2 = PI * ax * ax;
    let mut b = Complex64::new(1.0, -pix2);
    let mut cc = Complex64::new(1.0 / FPMIN, 0.0);
    let mut d = one / b;
    let mut h = d;
    let mut n = -1.0;
    for _ in 2..MAX_ITER {
        n += 2.0;
        let a = -n * (n + 1.0);
        b += 4.0;
        d = one / (d * a + b);
        cc = b + a / cc;
        let del = cc * d;
        h *= del;
        if (del.re - 1.0).abs() + del.im.abs() < EPS {
            break;
        }
    }
    let h = Complex64::new(ax, -ax) * h;
    let phase = Complex64::from_polar(1.0, 0.5 * pix2);
    Complex64::new(0.5, 0.5) * (one - phase * h)
}

/// Parameters of the generalized Fresnel kernel
/// `I(t) = int_{-D/2}^{D/2} exp(j[(psi + pi kappa varkappa t) x^2 + (pi kappa t) x]) dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelKernelParams {
    /// `2 mu / lambda` (1/m).
    pub kappa: f64,
    /// Product of reference angle and reference inverse range (1/m).
    pub varkappa: f64,
    /// `pi (1 - theta0^2) dxi / lambda` (rad/m^2).
    pub psi: f64,
    /// Aperture `D` (m).
    pub aperture: f64,
}

impl FresnelKernelParams {
    pub fn new(kappa: f64, varkappa: f64, psi: f64, aperture: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(invalid(format!("kappa must be finite and >= 0, got {kappa}")));
        }
        if !(aperture.is_finite() && aperture > 0.0) {
            return Err(invalid(format!("aperture must be positive, got {aperture}")));
        }
        if !(varkappa.is_finite() && psi.is_finite()) {
            return Err(invalid("varkappa and psi must be finite"));
        }
        Ok(Self {
            kappa,
            varkappa,
            psi,
            aperture,
        })
    }

    /// Quadratic coefficient `Q(t)`.
    pub fn quadratic(&self, t: f64) -> f64 {
        self.psi + PI * self.kappa * self.varkappa * t
    }

    /// Linear coefficient `J(t)`.
    pub fn linear(&self, t: f64) -> f64 {
        PI * self.kappa * t
    }

    /// Below this `|Q(t)|` the kernel is evaluated as a pure linear-phase integral.
    pub fn quadratic_threshold(&self) -> f64 {
        if self.kappa > 0.0 {
            1e-9 * PI * self.kappa
        } else {
            1e-12
        }
    }
}

/// Evaluates the generalized Fresnel kernel `I(t)` in closed form.
pub fn generalized_fresnel_i(t: f64, params: &FresnelKernelParams) -> Complex64 {
    let d = params.aperture;
    let q = params.quadratic(t);
    let j = params.linear(t);
    if q.abs() < params.quadratic_threshold() {
        let value = if j == 0.0 {
            d
        } else {
            2.0 * (0.5 * j * d).sin() / j
        };
        return Complex64::new(value, 0.0);
    }
    let scale = (2.0 * q.abs() / PI).sqrt();
    let shift = j / (2.0 * q);
    let z1 = scale * (-0.5 * d + shift);
    let z2 = scale * (0.5 * d + shift);
    let diff = fresnel_g(z2) - fresnel_g(z1);
    let diff = if q > 0.0 { diff } else { diff.conj() };
    let prefactor = (PI / (2.0 * q.abs())).sqrt();
    Complex64::from_polar(prefactor, -j * j / (4.0 * q)) * diff
}
