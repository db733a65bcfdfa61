//! Closed formulas and deterministic quadrature for projection constants:
//! Lebesgue constants of trigonometric interpolation, Gamma-ratio values on
//! Hilbert sections, the Bessel integral for complex l1 sections, Gaussian
//! absolute moments of polynomials, and the prime product constant.

use num_complex::Complex64;
use std::sync::OnceLock;
use thiserror::Error;

use crate::quad;
use crate::special;

#[derive(Debug, Error)]
pub enum ClosedFormError {
    #[error("quadrature did not converge within the subdivision budget")]
    QuadratureDidNotConverge,
    #[error("polynomial degree {0} exceeds the supported limit {1}")]
    DegreeTooLarge(usize, usize),
    #[error("degenerate coefficients: {0}")]
    DegenerateCoefficients(String),
    #[error("bad argument: {0}")]
    BadArgument(String),
}

/// Tolerances for the nested quadratures.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdiv: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { abs_tol: 1e-12, rel_tol: 1e-7, max_subdiv: 34 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

/// Mean modulus of the degree-m Dirichlet kernel (analytic = one-sided
/// kernel of degrees 0..=m instead of -m..=m). The integrand is split at
/// the kernel zeros so every quadrature panel is smooth; the result is
/// good to ~1e-12 relative, comfortably under the 1e-9 contract.
pub fn lebesgue_constant(m: u32, analytic: bool) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    // Zero spacing of sin(h t): t_k = pi k / h.
    let h = if analytic { (m as f64 + 1.0) / 2.0 } else { m as f64 + 0.5 };
    let limit = if analytic { m as f64 + 1.0 } else { 2.0 * m as f64 + 1.0 };
    let breaks: Vec<f64> = (1..)
        .map(|k| std::f64::consts::PI * k as f64 / h)
        .take_while(|&t| t < two_pi - 1e-12)
        .collect();
    let mut f = |t: f64| {
        let den = (0.5 * t).sin();
        if den.abs() < 1e-9 {
            limit
        } else {
            ((h * t).sin() / den).abs()
        }
    };
    let out = quad::adaptive_split(&mut f, 0.0, two_pi, &breaks, 1e-12, 0.0, 24);
    out.value / two_pi
}

/// Product of Lebesgue constants, one per coordinate degree.
pub fn trig_product(degrees: &[u32]) -> f64 {
    let mut acc = 1.0;
    for &d in degrees {
        acc *= lebesgue_constant(d, false);
    }
    acc
}

/// Gamma(n+m) Gamma(1+m/2) / (Gamma(1+m) Gamma(n+m/2)) through log-gamma.
pub fn proj_hilbert_homog(n: u32, m: u32) -> f64 {
    let n = n as f64;
    let m = m as f64;
    (special::ln_gamma(n + m) + special::ln_gamma(1.0 + m / 2.0)
        - special::ln_gamma(1.0 + m)
        - special::ln_gamma(n + m / 2.0))
        .exp()
}

/// Taylor coefficient count binom(n-1+k, k) of the reproducing kernel.
pub fn radial_coefficient(n: u32, k: u32) -> f64 {
    special::ln_binomial((n - 1 + k) as u64, k as u64).exp()
}

/// Projection constant of the span of the degrees in `degrees` on the
/// n-variable Hilbert-section: radial form
/// (n-1)/pi Int_0^1 (Int_0^2pi |sum c_k r^k e^{ik theta}| dtheta)
/// (1-r^2)^{n-2} r dr.
pub fn proj_hilbert_invariant(
    n: u32,
    degrees: &[u32],
    cfg: &QuadratureConfig,
) -> Result<f64, ClosedFormError> {
    if n < 2 {
        return Err(ClosedFormError::BadArgument("need n >= 2".to_string()));
    }
    if degrees.is_empty() {
        return Err(ClosedFormError::BadArgument("need at least one degree".to_string()));
    }
    if !(cfg.abs_tol > 0.0 && cfg.rel_tol > 0.0) {
        return Err(ClosedFormError::BadArgument("tolerances must be > 0".to_string()));
    }
    let max_deg = *degrees.iter().max().unwrap() as usize;
    let mut coeff = vec![0.0f64; max_deg + 1];
    for &k in degrees {
        coeff[k as usize] = radial_coefficient(n, k);
    }
    let pi = std::f64::consts::PI;
    let mut inner_ok = true;
    let inner_tol = cfg.rel_tol * 0.1;
    let mut outer = |r: f64| -> f64 {
        // Coefficients are positive, so the modulus is even in theta and
        // [0, pi] doubled suffices.
        let mut f = |theta: f64| {
            let w = Complex64::from_polar(r, theta);
            let mut p = Complex64::new(0.0, 0.0);
            for &c in coeff.iter().rev() {
                p = p * w + c;
            }
            p.norm()
        };
        let inner = quad::adaptive(&mut f, 0.0, pi, inner_tol, cfg.abs_tol, cfg.max_subdiv);
        if !inner.converged {
            inner_ok = false;
        }
        2.0 * inner.value * (1.0 - r * r).powi(n as i32 - 2) * r
    };
    let out = quad::adaptive(&mut outer, 0.0, 1.0, cfg.rel_tol, cfg.abs_tol, cfg.max_subdiv);
    if !out.converged || !inner_ok {
        return Err(ClosedFormError::QuadratureDidNotConverge);
    }
    Ok(out.value * (n as f64 - 1.0) / pi)
}

/// Projection constant of the degree-1 coordinate span on l2^n.
pub fn proj_l2(n: u32, field: Field) -> f64 {
    let n = n as f64;
    match field {
        Field::Complex => {
            // sqrt(pi)/2 * n! / Gamma(n + 1/2)
            (std::f64::consts::PI.sqrt() / 2.0).ln().exp()
                * (special::ln_gamma(n + 1.0) - special::ln_gamma(n + 0.5)).exp()
        }
        Field::Real => {
            // 2 Gamma(n/2 + 1) / (sqrt(pi) Gamma((n+1)/2))
            2.0 / std::f64::consts::PI.sqrt()
                * (special::ln_gamma(n / 2.0 + 1.0) - special::ln_gamma((n + 1.0) / 2.0)).exp()
        }
    }
}

/// Projection constant of the degree-1 coordinate span on complex l1^n:
/// Int_0^infty (1 - J0(t)^n) / t^2 dt, default tolerance 1e-9.
pub fn proj_l1_complex(n: u32) -> f64 {
    proj_l1_complex_with_tol(n, 1e-9)
}

/// Same integral with an explicit absolute tolerance. The integral is cut
/// at T with the remainder bounded through |J0(t)| <= sqrt(2/(pi t)):
/// Int_T^infty dt/t^2 = 1/T exactly accounts for the 1, and the J0^n part
/// is below tol/2 by the choice of T. For even n the oscillation average
/// of J0^n is added back, which only sharpens the cut.
pub fn proj_l1_complex_with_tol(n: u32, tol: f64) -> f64 {
    assert!(n >= 1 && tol > 0.0);
    let nf = n as f64;
    let half_n = nf / 2.0;
    // (2/pi)^{n/2} T^{-1-n/2} / (1+n/2) <= tol/2.
    let lead = (2.0 / std::f64::consts::PI).powf(half_n) / (1.0 + half_n);
    let t_cut = (lead / (tol / 2.0)).powf(1.0 / (1.0 + half_n)).max(50.0);
    let half_pi = 0.5 * std::f64::consts::PI;
    let panels = (t_cut / half_pi).ceil() as usize;
    let t_cut = panels as f64 * half_pi;
    let rule = quad::gauss_legendre(16);
    let mut f = |t: f64| (1.0 - special::bessel_j0(t).powi(n as i32)) / (t * t);
    let mut sum = 0.0;
    for i in 0..panels {
        sum += quad::panel(&mut f, i as f64 * half_pi, (i + 1) as f64 * half_pi, rule);
    }
    sum += 1.0 / t_cut;
    if n % 2 == 0 {
        // Mean of cos^n over a period times the asymptotic envelope.
        let mean_cos = (special::ln_binomial(n as u64, (n / 2) as u64)).exp() / 2f64.powi(n as i32);
        sum -= mean_cos * lead * t_cut.powf(-1.0 - half_n);
    }
    sum
}

/// Prime product prod_p (pi/p) / sin(pi/p), truncated at 1e7 with the
/// quadratic tail of the log sum added back; good to ~1e-8.
pub fn kappa() -> f64 {
    static KAPPA: OnceLock<f64> = OnceLock::new();
    *KAPPA.get_or_init(|| {
        const LIMIT: u64 = 10_000_000;
        let primes = crate::indexsets::primes_up_to(LIMIT);
        let pi = std::f64::consts::PI;
        // Ascending summation of descending terms loses accuracy; sum the
        // small terms first.
        let mut ln_sum = 0.0;
        for &p in primes.iter().rev() {
            let x = pi / p as f64;
            let term = if x < 1e-3 {
                let x2 = x * x;
                x2 / 6.0 + 7.0 * x2 * x2 / 360.0
            } else {
                -((x.sin() - x) / x).ln_1p()
            };
            ln_sum += term;
        }
        let pf = LIMIT as f64;
        ln_sum += (pi * pi / 6.0) / (pf * pf.ln());
        ln_sum.exp()
    })
}

const GAUSS_POLY_DEGREE_LIMIT: usize = 20;

/// E |p(Z)| for standard Gaussian Z: real roots are isolated by a Sturm
/// chain and refined by bisection, then each sign-constant piece is
/// integrated exactly through the Gaussian partial-moment recurrence.
pub fn gaussian_abs_moment(coeffs: &[f64]) -> Result<f64, ClosedFormError> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(ClosedFormError::DegenerateCoefficients("non-finite coefficient".to_string()));
    }
    let degree = match coeffs.iter().rposition(|&c| c != 0.0) {
        None => return Ok(0.0),
        Some(d) => d,
    };
    if degree > GAUSS_POLY_DEGREE_LIMIT {
        return Err(ClosedFormError::DegreeTooLarge(degree, GAUSS_POLY_DEGREE_LIMIT));
    }
    let poly = &coeffs[..=degree];
    if degree == 0 {
        return Ok(poly[0].abs());
    }
    let roots = real_roots(poly)?;
    let mut edges = Vec::with_capacity(roots.len() + 2);
    edges.push(f64::NEG_INFINITY);
    edges.extend_from_slice(&roots);
    edges.push(f64::INFINITY);
    let mut total = 0.0;
    for w in edges.windows(2) {
        let moments = special::gaussian_partial_moments(degree, w[0], w[1]);
        let piece: f64 = poly.iter().zip(&moments).map(|(c, m)| c * m).sum();
        total += piece.abs();
    }
    Ok(total)
}

/// Distinct real roots in ascending order, refined to ~1e-12.
fn real_roots(poly: &[f64]) -> Result<Vec<f64>, ClosedFormError> {
    let d = poly.len() - 1;
    let lead = poly[d];
    let bound = 1.0
        + poly[..d]
            .iter()
            .map(|c| (c / lead).abs())
            .fold(0.0, f64::max);
    if !bound.is_finite() {
        return Err(ClosedFormError::DegenerateCoefficients(
            "root bound overflows".to_string(),
        ));
    }
    let chain = sturm_chain(poly);
    let v = |t: f64| sign_changes(&chain, t);
    let tol = 1e-12 * bound.max(1.0);
    let mut roots = Vec::new();
    let mut stack = vec![(-bound, bound, v(-bound).saturating_sub(v(bound)))];
    while let Some((a, b, count)) = stack.pop() {
        if count == 0 {
            continue;
        }
        if b - a <= tol {
            roots.push(0.5 * (a + b));
            continue;
        }
        let mid = 0.5 * (a + b);
        let left = v(a).saturating_sub(v(mid));
        let left = left.min(count);
        stack.push((a, mid, left));
        stack.push((mid, b, count - left));
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots.dedup_by(|a, b| (*a - *b).abs() <= 4.0 * tol);
    Ok(roots)
}

fn sturm_chain(poly: &[f64]) -> Vec<Vec<f64>> {
    let mut chain = vec![poly.to_vec(), poly_derivative(poly)];
    loop {
        let n = chain.len();
        let rem = poly_rem(&chain[n - 2], &chain[n - 1]);
        let max = rem.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if max <= 1e-300 || rem.len() == 0 {
            break;
        }
        // Negate and rescale; positive scaling keeps sign patterns intact.
        chain.push(rem.iter().map(|c| -c / max).collect());
        if chain.last().unwrap().len() == 1 {
            break;
        }
    }
    chain
}

fn poly_derivative(poly: &[f64]) -> Vec<f64> {
    poly.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| k as f64 * c)
        .collect()
}

fn poly_eval(poly: &[f64], t: f64) -> f64 {
    poly.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// Remainder of num / den, trailing (near-)zeros trimmed.
fn poly_rem(num: &[f64], den: &[f64]) -> Vec<f64> {
    let dd = den.len() - 1;
    let lead = den[dd];
    let mut r = num.to_vec();
    while r.len() > dd {
        let k = r.len() - 1;
        let factor = r[k] / lead;
        for i in 0..dd {
            r[k - dd + i] -= factor * den[i];
        }
        r.pop();
    }
    let scale = num.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    while let Some(&c) = r.last() {
        if c.abs() <= 1e-14 * scale.max(1.0) {
            r.pop();
        } else {
            break;
        }
    }
    r
}

fn sign_changes(chain: &[Vec<f64>], t: f64) -> usize {
    let mut changes = 0;
    let mut last = 0i8;
    for poly in chain {
        let v = poly_eval(poly, t);
        let s = if v > 0.0 {
            1i8
        } else if v < 0.0 {
            -1i8
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use approx::assert_relative_eq;

    #[test]
    fn lebesgue_zero_and_one() {
        assert_abs_diff_eq!(lebesgue_constant(0, false), 1.0, epsilon = 1e-12);
        let l1 = 1.0 / 3.0 + 2.0 * 3.0f64.sqrt() / std::f64::consts::PI;
        assert_abs_diff_eq!(lebesgue_constant(1, false), l1, epsilon = 1e-11);
    }

    #[test]
    fn analytic_kernel_identity_small() {
        for m in [1u32, 2, 5, 8] {
            assert_abs_diff_eq!(
                lebesgue_constant(2 * m, true),
                lebesgue_constant(m, false),
                epsilon = 1e-11
            );
        }
    }

    #[test]
    fn hilbert_homog_values() {
        assert_relative_eq!(proj_hilbert_homog(2, 2), 1.5, epsilon = 1e-13);
        for n in [2u32, 3, 7] {
            assert_relative_eq!(proj_hilbert_homog(n, 0), 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn l2_values() {
        assert_relative_eq!(proj_l2(1, Field::Complex), 1.0, epsilon = 1e-13);
        assert_relative_eq!(proj_l2(2, Field::Complex), 4.0 / 3.0, epsilon = 1e-13);
        assert_relative_eq!(proj_l2(3, Field::Real), 1.5, epsilon = 1e-13);
        assert_relative_eq!(
            proj_l2(2, Field::Real),
            4.0 / std::f64::consts::PI,
            epsilon = 1e-13
        );
    }

    #[test]
    fn l1_complex_values() {
        assert_abs_diff_eq!(proj_l1_complex(1), 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(
            proj_l1_complex(2),
            4.0 / std::f64::consts::PI,
            epsilon = 1e-9
        );
    }

    #[test]
    fn trig_product_examples() {
        let l1 = lebesgue_constant(1, false);
        assert_relative_eq!(trig_product(&[1]), l1, epsilon = 1e-12);
        assert_relative_eq!(trig_product(&[1, 1]), l1 * l1, epsilon = 1e-12);
    }

    #[test]
    fn invariant_reproduces_single_degree() {
        let cfg = QuadratureConfig::default();
        let v = proj_hilbert_invariant(2, &[2], &cfg).unwrap();
        assert_relative_eq!(v, 1.5, epsilon = 1e-6);
        let v0 = proj_hilbert_invariant(3, &[0], &cfg).unwrap();
        assert_relative_eq!(v0, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn gaussian_moment_examples() {
        let two_over_pi = (2.0 / std::f64::consts::PI).sqrt();
        assert_abs_diff_eq!(
            gaussian_abs_moment(&[0.0, 1.0]).unwrap(),
            two_over_pi,
            epsilon = 1e-12
        );
        let e = std::f64::consts::E;
        assert_abs_diff_eq!(
            gaussian_abs_moment(&[-0.5, 0.0, 0.5]).unwrap(),
            (2.0 / (std::f64::consts::PI * e)).sqrt(),
            epsilon = 1e-12
        );
        let quintic = [0.0, 30.0 / 120.0, 0.0, -10.0 / 120.0, 0.0, 1.0 / 120.0];
        assert_abs_diff_eq!(
            gaussian_abs_moment(&quintic).unwrap(),
            3.0 / (10.0 * (2.0 * std::f64::consts::PI).sqrt()),
            epsilon = 1e-12
        );
    }

    #[test]
    fn gaussian_moment_constant_and_zero() {
        assert_eq!(gaussian_abs_moment(&[0.0, 0.0]).unwrap(), 0.0);
        assert_abs_diff_eq!(gaussian_abs_moment(&[-2.5]).unwrap(), 2.5, epsilon = 0.0);
    }

    #[test]
    fn root_isolation_catches_double_roots() {
        // (t^2 - 1)^2 has double roots at -1 and 1; no sign change there.
        // A double root is only conditioned to ~sqrt(machine eps), so the
        // location tolerance is 1e-7, not the simple-root 1e-12.
        let p = [1.0, 0.0, -2.0, 0.0, 1.0];
        let roots = real_roots(&p).unwrap();
        assert_eq!(roots.len(), 2);
        assert_abs_diff_eq!(roots[0], -1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(roots[1], 1.0, epsilon = 1e-7);
    }

    #[test]
    fn radial_coefficients_are_binomials() {
        assert_relative_eq!(radial_coefficient(2, 3), 4.0, epsilon = 1e-12);
        assert_relative_eq!(radial_coefficient(3, 2), 6.0, epsilon = 1e-12);
        assert_relative_eq!(radial_coefficient(5, 0), 1.0, epsilon = 1e-12);
    }
}
