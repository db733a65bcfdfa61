//! Scalar special functions shared across the crate: the Bessel function
//! J0, log-gamma and binomial helpers, and partial moments of the standard
//! Gaussian.

use statrs::function::erf::erf as statrs_erf;
use statrs::function::gamma::ln_gamma as statrs_ln_gamma;

use crate::quad;

pub fn ln_gamma(x: f64) -> f64 {
    statrs_ln_gamma(x)
}

pub fn erf(x: f64) -> f64 {
    if x.is_infinite() {
        return x.signum();
    }
    statrs_erf(x)
}

/// ln C(n, k) through log-gamma; exact enough for n into the thousands.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    assert!(k <= n);
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Bessel J0. Three regimes; the boundaries overlap the validity ranges of
/// the neighbouring methods so the stitching is tested, not assumed.
pub fn bessel_j0(t: f64) -> f64 {
    let t = t.abs();
    if t <= 12.0 {
        j0_series(t)
    } else if t <= 64.0 {
        j0_integral(t)
    } else {
        j0_asymptotic(t)
    }
}

/// Power series sum_k (-1)^k (t^2/4)^k / (k!)^2. At t = 12 the largest term
/// is ~4e3, so the roundoff floor is ~1e-12 absolute; smaller t is better.
fn j0_series(t: f64) -> f64 {
    let x = 0.25 * t * t;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -x / (kf * kf);
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1.0) {
            break;
        }
    }
    sum
}

/// (1/pi) int_0^pi cos(t sin theta) dtheta on two 128-point panels. The
/// integrand completes ~t/pi oscillations, far below the rule's resolution
/// for t <= 64.
fn j0_integral(t: f64) -> f64 {
    let rule = quad::gauss_legendre(128);
    let pi = std::f64::consts::PI;
    let mut f = |theta: f64| (t * theta.sin()).cos();
    quad::composite(&mut f, 0.0, pi, 2, rule) / pi
}

/// Hankel expansion sqrt(2/(pi t)) [P cos(t - pi/4) - Q sin(t - pi/4)].
/// Truncated so the first dropped term is < 1e-13 for t > 64.
fn j0_asymptotic(t: f64) -> f64 {
    let inv = 1.0 / t;
    let inv2 = inv * inv;
    let p = 1.0
        + inv2 * (-9.0 / 128.0 + inv2 * (3675.0 / 32768.0 + inv2 * (-108_056_025.0 / 188_743_680.0)));
    let q = inv
        * (-1.0 / 8.0
            + inv2 * (75.0 / 1024.0 + inv2 * (-59535.0 / 262_144.0 + inv2 * (57_972_915.0 / 33_554_432.0))));
    let omega = t - std::f64::consts::FRAC_PI_4;
    (2.0 / (std::f64::consts::PI * t)).sqrt() * (p * omega.cos() - q * omega.sin())
}

pub fn std_normal_pdf(t: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub fn std_normal_cdf(t: f64) -> f64 {
    0.5 * (1.0 + erf(t / std::f64::consts::SQRT_2))
}

/// Moments m_k = int_a^b t^k phi(t) dt for k = 0..=k_max, phi the standard
/// normal density. Endpoints may be infinite. Uses m_0 = Phi(b) - Phi(a),
/// m_1 = phi(a) - phi(b), m_k = a^{k-1}phi(a) - b^{k-1}phi(b) + (k-1)m_{k-2}.
pub fn gaussian_partial_moments(k_max: usize, a: f64, b: f64) -> Vec<f64> {
    assert!(a <= b);
    let edge = |x: f64, pow: u32| -> f64 {
        if x.is_finite() {
            x.powi(pow as i32) * std_normal_pdf(x)
        } else {
            0.0
        }
    };
    let mut m = Vec::with_capacity(k_max + 1);
    m.push(std_normal_cdf(b) - std_normal_cdf(a));
    if k_max >= 1 {
        m.push(std_normal_pdf(a) - std_normal_pdf(b));
    }
    for k in 2..=k_max {
        let v = edge(a, (k - 1) as u32) - edge(b, (k - 1) as u32) + (k - 1) as f64 * m[k - 2];
        m.push(v);
    }
    m
}
