//! Finite-dimensional sequence lattices: norms, fundamental functions, and
//! Koethe duals.
//!
//! The Lorentz family uses the weights w_k = k^{s/r} - (k-1)^{s/r}, the
//! renorming whose fundamental function is exactly k^{1/r}. The dual of a
//! Nakano space is carried as its own family evaluating the true dual norm;
//! the pointwise-conjugate Nakano norm is not isometric to it and would
//! break the Hoelder inequality by a few percent.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error("dimension mismatch: space has {expected}, vector has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid exponent: {0}")]
    BadExponent(String),
    #[error("dual not implemented for {0}")]
    DualNotImplemented(String),
    #[error("index {k} out of range 1..={n}")]
    OutOfRange { k: usize, n: usize },
    #[error("vector entries must be finite")]
    NonFinite,
    #[error("cannot parse space descriptor: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpaceFamily {
    /// l_r with 1 <= r < infinity.
    Lr(f64),
    /// Lorentz l_{r,s}; s may be infinite (Marcinkiewicz sup form).
    Lorentz { r: f64, s: f64 },
    /// Minkowski functional of sum |z_i|^{p_i} <= 1.
    Nakano(Vec<f64>),
    /// The Koethe dual of Nakano(p), evaluated exactly.
    NakanoDual(Vec<f64>),
    /// Outer l_p over rows, l_q within each row of length `cols`.
    Mixed { p: f64, q: f64, rows: usize, cols: usize },
    LInfty,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SequenceSpace {
    dimension: usize,
    family: SpaceFamily,
}

/// Conjugate exponent: r / (r - 1) with 1 and infinity swapped.
pub fn conjugate_exponent(r: f64) -> f64 {
    if r == 1.0 {
        f64::INFINITY
    } else if r.is_infinite() {
        1.0
    } else {
        r / (r - 1.0)
    }
}

fn check_exponent(e: f64, what: &str) -> Result<(), SpaceError> {
    if e.is_nan() || e < 1.0 {
        return Err(SpaceError::BadExponent(format!("{what} = {e} must be >= 1")));
    }
    Ok(())
}

impl SequenceSpace {
    pub fn new(family: SpaceFamily, dimension: usize) -> Result<Self, SpaceError> {
        if dimension == 0 {
            return Err(SpaceError::BadExponent("dimension must be >= 1".to_string()));
        }
        match &family {
            SpaceFamily::Lr(r) => {
                check_exponent(*r, "r")?;
                if r.is_infinite() {
                    return Ok(SequenceSpace { dimension, family: SpaceFamily::LInfty });
                }
            }
            SpaceFamily::Lorentz { r, s } => {
                check_exponent(*r, "r")?;
                check_exponent(*s, "s")?;
                if r.is_infinite() {
                    return Err(SpaceError::BadExponent("Lorentz needs finite r".to_string()));
                }
            }
            SpaceFamily::Nakano(p) => {
                if p.len() != dimension {
                    return Err(SpaceError::DimensionMismatch { expected: dimension, got: p.len() });
                }
                for &pi in p {
                    check_exponent(pi, "p_i")?;
                    if pi.is_infinite() {
                        return Err(SpaceError::BadExponent(
                            "Nakano exponents must be finite".to_string(),
                        ));
                    }
                }
            }
            SpaceFamily::NakanoDual(p) => {
                if p.len() != dimension {
                    return Err(SpaceError::DimensionMismatch { expected: dimension, got: p.len() });
                }
                for &pi in p {
                    if !(pi > 1.0) || pi.is_infinite() {
                        return Err(SpaceError::BadExponent(
                            "Nakano dual needs finite exponents > 1".to_string(),
                        ));
                    }
                }
            }
            SpaceFamily::Mixed { p, q, rows, cols } => {
                check_exponent(*p, "p")?;
                check_exponent(*q, "q")?;
                if rows * cols != dimension {
                    return Err(SpaceError::DimensionMismatch {
                        expected: dimension,
                        got: rows * cols,
                    });
                }
            }
            SpaceFamily::LInfty => {}
        }
        Ok(SequenceSpace { dimension, family })
    }

    pub fn lr(r: f64, n: usize) -> Result<Self, SpaceError> {
        SequenceSpace::new(SpaceFamily::Lr(r), n)
    }

    pub fn lorentz(r: f64, s: f64, n: usize) -> Result<Self, SpaceError> {
        SequenceSpace::new(SpaceFamily::Lorentz { r, s }, n)
    }

    pub fn nakano(p: Vec<f64>) -> Result<Self, SpaceError> {
        let n = p.len();
        SequenceSpace::new(SpaceFamily::Nakano(p), n)
    }

    pub fn mixed(p: f64, q: f64, rows: usize, cols: usize) -> Result<Self, SpaceError> {
        SequenceSpace::new(SpaceFamily::Mixed { p, q, rows, cols }, rows * cols)
    }

    pub fn linf(n: usize) -> Result<Self, SpaceError> {
        SequenceSpace::new(SpaceFamily::LInfty, n)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn family(&self) -> &SpaceFamily {
        &self.family
    }

    pub fn norm(&self, z: &[Complex64]) -> Result<f64, SpaceError> {
        let moduli: Vec<f64> = z.iter().map(|c| c.norm()).collect();
        self.norm_abs(&moduli)
    }

    /// Norm of a vector given by its entry moduli.
    pub fn norm_abs(&self, x: &[f64]) -> Result<f64, SpaceError> {
        if x.len() != self.dimension {
            return Err(SpaceError::DimensionMismatch { expected: self.dimension, got: x.len() });
        }
        if x.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(SpaceError::NonFinite);
        }
        Ok(match &self.family {
            SpaceFamily::Lr(r) => lr_norm(x, *r),
            SpaceFamily::LInfty => x.iter().cloned().fold(0.0, f64::max),
            SpaceFamily::Lorentz { r, s } => lorentz_norm(x, *r, *s),
            SpaceFamily::Nakano(p) => nakano_norm(x, p),
            SpaceFamily::NakanoDual(p) => nakano_dual_norm(x, p),
            SpaceFamily::Mixed { p, q, rows, cols } => {
                let mut row_norms = Vec::with_capacity(*rows);
                for i in 0..*rows {
                    row_norms.push(lr_or_max(&x[i * cols..(i + 1) * cols], *q));
                }
                lr_or_max(&row_norms, *p)
            }
        })
    }

    /// phi(k): norm of the vector with k leading ones.
    pub fn fundamental_function(&self, k: usize) -> Result<f64, SpaceError> {
        if k < 1 || k > self.dimension {
            return Err(SpaceError::OutOfRange { k, n: self.dimension });
        }
        let mut ones = vec![0.0; self.dimension];
        for o in ones.iter_mut().take(k) {
            *o = 1.0;
        }
        self.norm_abs(&ones)
    }

    /// phi_{X'}(k). For Lorentz this is k / phi_X(k), the only piece of the
    /// dual exposed for that family; everywhere else it is computed from
    /// the dual space itself.
    pub fn dual_fundamental_function(&self, k: usize) -> Result<f64, SpaceError> {
        if let SpaceFamily::Lorentz { .. } = self.family {
            if k < 1 || k > self.dimension {
                return Err(SpaceError::OutOfRange { k, n: self.dimension });
            }
            return Ok(k as f64 / self.fundamental_function(k)?);
        }
        self.kothe_dual()?.fundamental_function(k)
    }

    pub fn kothe_dual(&self) -> Result<SequenceSpace, SpaceError> {
        let family = match &self.family {
            SpaceFamily::Lr(r) => {
                if *r == 1.0 {
                    SpaceFamily::LInfty
                } else {
                    SpaceFamily::Lr(conjugate_exponent(*r))
                }
            }
            SpaceFamily::LInfty => SpaceFamily::Lr(1.0),
            SpaceFamily::Nakano(p) => {
                if p.iter().any(|&pi| pi == 1.0) {
                    return Err(SpaceError::DualNotImplemented(
                        "Nakano with some p_i = 1".to_string(),
                    ));
                }
                SpaceFamily::NakanoDual(p.clone())
            }
            SpaceFamily::NakanoDual(p) => SpaceFamily::Nakano(p.clone()),
            SpaceFamily::Mixed { p, q, rows, cols } => SpaceFamily::Mixed {
                p: conjugate_exponent(*p),
                q: conjugate_exponent(*q),
                rows: *rows,
                cols: *cols,
            },
            SpaceFamily::Lorentz { .. } => {
                return Err(SpaceError::DualNotImplemented(format!(
                    "{} (only its fundamental function is exposed)",
                    self.descriptor()
                )))
            }
        };
        // Mixed with p or q = infinity stays Mixed; max over rows/entries
        // handles it, so no LInfty normalization is needed there.
        SequenceSpace::new(family, self.dimension)
    }

    pub fn descriptor(&self) -> String {
        match &self.family {
            SpaceFamily::Lr(r) => format!("lr:{r}"),
            SpaceFamily::LInfty => "linf".to_string(),
            SpaceFamily::Lorentz { r, s } => format!("lorentz:{r},{s}"),
            SpaceFamily::Nakano(p) => format!("nakano:{}", join_floats(p)),
            SpaceFamily::NakanoDual(p) => format!("nakano-dual:{}", join_floats(p)),
            SpaceFamily::Mixed { p, q, rows, cols } => format!("mixed:{p},{q},{rows}x{cols}"),
        }
    }

    /// Parse "lr:2", "lorentz:2,1", "nakano:1.5,2,3", "mixed:1,2,4x3",
    /// "linf". `dimension` = 0 means infer it (only possible for Nakano and
    /// Mixed, whose descriptors fix it).
    pub fn parse(desc: &str, dimension: usize) -> Result<Self, SpaceError> {
        let bad = |msg: String| SpaceError::Parse(format!("{msg} in {desc:?}"));
        let num = |t: &str| -> Result<f64, SpaceError> {
            t.trim()
                .parse::<f64>()
                .map_err(|_| bad(format!("bad number {t:?}")))
        };
        let (head, tail) = match desc.split_once(':') {
            Some((h, t)) => (h.trim(), t.trim()),
            None => (desc.trim(), ""),
        };
        match head {
            "linf" => SequenceSpace::linf(dimension.max(1)),
            "lr" => SequenceSpace::lr(num(tail)?, dimension.max(1)),
            "lorentz" => {
                let (r, s) = tail
                    .split_once(',')
                    .ok_or_else(|| bad("expected lorentz:r,s".to_string()))?;
                SequenceSpace::lorentz(num(r)?, num(s)?, dimension.max(1))
            }
            "nakano" | "nakano-dual" => {
                let p: Vec<f64> = tail
                    .split(',')
                    .map(num)
                    .collect::<Result<_, _>>()?;
                if dimension != 0 && dimension != p.len() {
                    return Err(SpaceError::DimensionMismatch { expected: dimension, got: p.len() });
                }
                let n = p.len();
                let family = if head == "nakano" {
                    SpaceFamily::Nakano(p)
                } else {
                    SpaceFamily::NakanoDual(p)
                };
                SequenceSpace::new(family, n)
            }
            "mixed" => {
                let parts: Vec<&str> = tail.split(',').collect();
                if parts.len() != 3 {
                    return Err(bad("expected mixed:p,q,RxC".to_string()));
                }
                let (rows, cols) = parts[2]
                    .split_once('x')
                    .ok_or_else(|| bad("expected RxC".to_string()))?;
                let rows = rows
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| bad("bad row count".to_string()))?;
                let cols = cols
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| bad("bad col count".to_string()))?;
                if dimension != 0 && dimension != rows * cols {
                    return Err(SpaceError::DimensionMismatch {
                        expected: dimension,
                        got: rows * cols,
                    });
                }
                SequenceSpace::mixed(num(parts[0])?, num(parts[1])?, rows, cols)
            }
            _ => Err(bad(format!("unknown family {head:?}"))),
        }
    }
}

fn join_floats(p: &[f64]) -> String {
    p.iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn lr_norm(x: &[f64], r: f64) -> f64 {
    if r == 1.0 {
        return x.iter().sum();
    }
    if r == 2.0 {
        return x.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    // Scale by the max so powf stays in range for extreme inputs.
    let m = x.iter().cloned().fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    m * x.iter().map(|v| (v / m).powf(r)).sum::<f64>().powf(1.0 / r)
}

fn lr_or_max(x: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        x.iter().cloned().fold(0.0, f64::max)
    } else {
        lr_norm(x, r)
    }
}

fn decreasing(x: &[f64]) -> Vec<f64> {
    let mut d = x.to_vec();
    d.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
    d
}

fn lorentz_norm(x: &[f64], r: f64, s: f64) -> f64 {
    let d = decreasing(x);
    if s.is_infinite() {
        // sup_k (x_1* + ... + x_k*) / k^{1 - 1/r}
        let mut best: f64 = 0.0;
        let mut partial = 0.0;
        for (k, v) in d.iter().enumerate() {
            partial += v;
            best = best.max(partial / ((k + 1) as f64).powf(1.0 - 1.0 / r));
        }
        return best;
    }
    let m = d[0];
    if m == 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for (k, v) in d.iter().enumerate() {
        let k1 = (k + 1) as f64;
        let w = k1.powf(s / r) - (k as f64).powf(s / r);
        sum += (v / m).powf(s) * w;
    }
    m * sum.powf(1.0 / s)
}

/// Minkowski functional: the t > 0 with sum (x_i/t)^{p_i} = 1, by bisection
/// on the bracket [max/n, sum]. Relative tolerance 1e-12.
fn nakano_norm(x: &[f64], p: &[f64]) -> f64 {
    let total: f64 = x.iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    let n = x.len() as f64;
    let m = x.iter().cloned().fold(0.0, f64::max);
    let modular = |t: f64| -> f64 { x.iter().zip(p).map(|(&v, &pi)| (v / t).powf(pi)).sum() };
    let mut lo = m / n;
    let mut hi = total;
    if hi == lo {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if modular(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-12 * hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// sup { sum x_i y_i : sum x_i^{p_i} <= 1, x >= 0 } for y = |input|.
/// Stationarity gives x_i = (y_i / (p_i mu))^{1/(p_i - 1)}; the multiplier
/// mu is pinned by bisection on the constraint, which is strictly
/// decreasing in mu.
fn nakano_dual_norm(y: &[f64], p: &[f64]) -> f64 {
    let m = y.iter().cloned().fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    let ys: Vec<f64> = y.iter().map(|v| v / m).collect();
    let constraint = |mu: f64| -> f64 {
        ys.iter()
            .zip(p)
            .map(|(&yi, &pi)| {
                if yi == 0.0 {
                    0.0
                } else {
                    (yi / (pi * mu)).powf(pi / (pi - 1.0))
                }
            })
            .sum()
    };
    let mut lo = 1.0;
    let mut hi = 1.0;
    while constraint(lo) < 1.0 {
        lo *= 0.5;
    }
    while constraint(hi) > 1.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if constraint(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo) <= 1e-14 * hi {
            break;
        }
    }
    let mu = 0.5 * (lo + hi);
    let value: f64 = ys
        .iter()
        .zip(p)
        .map(|(&yi, &pi)| {
            if yi == 0.0 {
                0.0
            } else {
                (yi / (pi * mu)).powf(1.0 / (pi - 1.0)) * yi
            }
        })
        .sum();
    m * value
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn l2_three_four_five() {
        let x = SequenceSpace::lr(2.0, 2).unwrap();
        assert_abs_diff_eq!(x.norm(&[c(3.0, 0.0), c(0.0, 4.0)]).unwrap(), 5.0, epsilon = 1e-14);
    }

    #[test]
    fn lorentz_rr_is_lr() {
        let lor = SequenceSpace::lorentz(2.0, 2.0, 4).unwrap();
        let l2 = SequenceSpace::lr(2.0, 4).unwrap();
        let v = [0.3, 1.7, 0.0, 2.5];
        assert_abs_diff_eq!(lor.norm_abs(&v).unwrap(), l2.norm_abs(&v).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn nakano_constant_exponent_is_lr() {
        let nak = SequenceSpace::nakano(vec![3.0; 5]).unwrap();
        let l3 = SequenceSpace::lr(3.0, 5).unwrap();
        let v = [0.2, 1.4, 0.9, 0.0, 2.2];
        assert_abs_diff_eq!(nak.norm_abs(&v).unwrap(), l3.norm_abs(&v).unwrap(), epsilon = 1e-10);
    }

    #[test]
    fn nakano_dual_constant_exponent_is_dual_lr() {
        let dual = SequenceSpace::new(SpaceFamily::NakanoDual(vec![3.0; 4]), 4).unwrap();
        let l32 = SequenceSpace::lr(1.5, 4).unwrap();
        let v = [0.6, 0.1, 1.9, 0.8];
        assert_abs_diff_eq!(dual.norm_abs(&v).unwrap(), l32.norm_abs(&v).unwrap(), epsilon = 1e-10);
    }

    #[test]
    fn nakano_dual_dominates_conjugate_nakano() {
        // The exact dual norm must be >= the pointwise-conjugate Luxemburg
        // norm; for mixed exponents the gap is strict.
        let dual = SequenceSpace::new(SpaceFamily::NakanoDual(vec![2.0, 4.0]), 2).unwrap();
        let conj = SequenceSpace::nakano(vec![2.0, 4.0 / 3.0]).unwrap();
        let v = [1.0, 1.0];
        let d = dual.norm_abs(&v).unwrap();
        let c = conj.norm_abs(&v).unwrap();
        assert!(d > c + 0.02, "dual {d} conj {c}");
        // Lagrange stationarity of u1 + u2 on u1^2 + u2^4 = 1.
        assert_abs_diff_eq!(d, 1.5768369291726656, epsilon = 1e-10);
    }

    #[test]
    fn fundamental_functions() {
        let l3 = SequenceSpace::lr(3.0, 6).unwrap();
        for k in 1..=6 {
            assert_abs_diff_eq!(
                l3.fundamental_function(k).unwrap(),
                (k as f64).powf(1.0 / 3.0),
                epsilon = 1e-13
            );
        }
        let lor = SequenceSpace::lorentz(3.0, 1.5, 6).unwrap();
        for k in 1..=6 {
            assert_abs_diff_eq!(
                lor.fundamental_function(k).unwrap(),
                (k as f64).powf(1.0 / 3.0),
                epsilon = 1e-12
            );
            assert_abs_diff_eq!(
                lor.dual_fundamental_function(k).unwrap(),
                (k as f64).powf(2.0 / 3.0),
                epsilon = 1e-12
            );
        }
        let li = SequenceSpace::linf(4).unwrap();
        assert_abs_diff_eq!(li.fundamental_function(3).unwrap(), 1.0, epsilon = 0.0);
    }

    #[test]
    fn marcinkiewicz_fundamental_function() {
        let mar = SequenceSpace::lorentz(2.0, f64::INFINITY, 8).unwrap();
        for k in 1..=8 {
            assert_abs_diff_eq!(
                mar.fundamental_function(k).unwrap(),
                (k as f64).sqrt(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn kothe_duals() {
        let l2 = SequenceSpace::lr(2.0, 3).unwrap();
        assert_eq!(l2.kothe_dual().unwrap().family(), &SpaceFamily::Lr(2.0));

        let l1 = SequenceSpace::lr(1.0, 3).unwrap();
        assert_eq!(l1.kothe_dual().unwrap().family(), &SpaceFamily::LInfty);
        assert_eq!(
            SequenceSpace::linf(3).unwrap().kothe_dual().unwrap().family(),
            &SpaceFamily::Lr(1.0)
        );

        let mixed = SequenceSpace::mixed(1.0, 2.0, 2, 3).unwrap();
        let dual = mixed.kothe_dual().unwrap();
        assert_eq!(
            dual.family(),
            &SpaceFamily::Mixed { p: f64::INFINITY, q: 2.0, rows: 2, cols: 3 }
        );

        assert!(SequenceSpace::lorentz(2.0, 1.0, 3)
            .unwrap()
            .kothe_dual()
            .is_err());
    }

    #[test]
    fn descriptor_round_trip() {
        for (desc, dim) in [
            ("lr:2", 5),
            ("lr:1", 3),
            ("linf", 4),
            ("lorentz:2,1", 6),
            ("lorentz:2,inf", 6),
            ("nakano:1.5,2,3", 3),
            ("nakano-dual:1.5,2,3", 3),
            ("mixed:1,2,4x3", 12),
        ] {
            let space = SequenceSpace::parse(desc, dim).unwrap();
            assert_eq!(space.dimension(), dim);
            let again = SequenceSpace::parse(&space.descriptor(), dim).unwrap();
            assert_eq!(space, again);
        }
        // lr:inf normalizes to linf.
        let space = SequenceSpace::parse("lr:inf", 4).unwrap();
        assert_eq!(space.family(), &SpaceFamily::LInfty);
    }

    #[test]
    fn mixed_norm_nested() {
        let x = SequenceSpace::mixed(1.0, 2.0, 2, 2).unwrap();
        // Rows (3,4) and (0,12): l2 row norms 5 and 12, l1 outer -> 17.
        let v = [3.0, 4.0, 0.0, 12.0];
        assert_abs_diff_eq!(x.norm_abs(&v).unwrap(), 17.0, epsilon = 1e-13);
        let xi = SequenceSpace::mixed(f64::INFINITY, 2.0, 2, 2).unwrap();
        assert_abs_diff_eq!(xi.norm_abs(&v).unwrap(), 12.0, epsilon = 1e-13);
    }
}
