//! Projection constants on the Boolean cube: exact sign-vector
//! enumeration for Walsh-character families, the univariate limit
//! polynomials of the central-limit rewriting, and the exact expansion
//! coefficients that drive the limit.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::closedforms::{self, ClosedFormError};
use crate::indexsets::{IndexSet, MultiIndex};
use crate::montecarlo::{self, MCEstimate};

/// Exact enumeration walks all 2^N sign vectors; beyond this the Monte
/// Carlo path is the intended route.
pub const EXACT_CUBE_LIMIT: u32 = 26;

const PD_DEGREE_LIMIT: u32 = 20;

#[derive(Debug, Error)]
pub enum BooleanError {
    #[error("cube dimension {0} exceeds the exact-enumeration cap {EXACT_CUBE_LIMIT}; use the Monte Carlo path")]
    CubeTooLarge(u32),
    #[error("bitmask {mask:#x} does not fit in {n} bits")]
    BadMask { mask: u32, n: u32 },
    #[error("bad argument: {0}")]
    BadArgument(String),
    #[error("cannot parse subset family: {0}")]
    Parse(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    Homog(u32),
    UpTo(u32),
    Custom,
}

/// A family of subsets of {1,..,N} as bitmasks; the function class is
/// the span of the Walsh characters x^S of its members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetFamily {
    n: u32,
    sets: Vec<u32>,
    kind: FamilyKind,
}

fn full_mask(n: u32) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

impl SubsetFamily {
    /// All subsets of size d, ascending as integers.
    pub fn homog(n: u32, d: u32) -> Result<SubsetFamily, BooleanError> {
        if n > 32 || d > n {
            return Err(BooleanError::BadArgument(format!(
                "homogeneity degree {d} out of range for cube dimension {n}"
            )));
        }
        let mut sets = Vec::new();
        if d == 0 {
            sets.push(0);
        } else {
            // Gosper's hack walks the d-subsets in increasing mask order.
            let mut m: u32 = (1u32 << d) - 1;
            let limit = full_mask(n);
            loop {
                sets.push(m);
                if n == 32 && d == 32 {
                    break;
                }
                let c = m & m.wrapping_neg();
                let r = m.wrapping_add(c);
                if r > limit || r < m {
                    break;
                }
                m = (((r ^ m) >> 2) / c) | r;
                if m > limit {
                    break;
                }
            }
        }
        Ok(SubsetFamily { n, sets, kind: FamilyKind::Homog(d) })
    }

    /// All subsets of size at most d.
    pub fn up_to(n: u32, d: u32) -> Result<SubsetFamily, BooleanError> {
        let mut sets = Vec::new();
        for e in 0..=d {
            sets.extend(SubsetFamily::homog(n, e)?.sets);
        }
        sets.sort_unstable();
        Ok(SubsetFamily { n, sets, kind: FamilyKind::UpTo(d) })
    }

    /// Explicit masks; deduplicated and sorted.
    pub fn custom(n: u32, masks: Vec<u32>) -> Result<SubsetFamily, BooleanError> {
        if n > 32 {
            return Err(BooleanError::BadArgument(format!("cube dimension {n} exceeds 32")));
        }
        let limit = full_mask(n);
        let mut sets = masks;
        for &m in &sets {
            if m > limit {
                return Err(BooleanError::BadMask { mask: m, n });
            }
        }
        sets.sort_unstable();
        sets.dedup();
        Ok(SubsetFamily { n, sets, kind: FamilyKind::Custom })
    }

    /// "homog:d", "upto:d", or a JSON list of masks.
    pub fn parse(desc: &str, n: u32) -> Result<SubsetFamily, BooleanError> {
        if let Some(d) = desc.strip_prefix("homog:") {
            let d = d.parse::<u32>().map_err(|e| BooleanError::Parse(e.to_string()))?;
            return SubsetFamily::homog(n, d);
        }
        if let Some(d) = desc.strip_prefix("upto:") {
            let d = d.parse::<u32>().map_err(|e| BooleanError::Parse(e.to_string()))?;
            return SubsetFamily::up_to(n, d);
        }
        if desc.trim_start().starts_with('[') {
            let masks: Vec<u32> =
                serde_json::from_str(desc).map_err(|e| BooleanError::Parse(e.to_string()))?;
            return SubsetFamily::custom(n, masks);
        }
        Err(BooleanError::Parse(format!("unrecognized family descriptor {desc:?}")))
    }

    pub fn descriptor(&self) -> String {
        match self.kind {
            FamilyKind::Homog(d) => format!("homog:{d}"),
            FamilyKind::UpTo(d) => format!("upto:{d}"),
            FamilyKind::Custom => serde_json::to_string(&self.sets).unwrap(),
        }
    }

    pub fn cube_dimension(&self) -> u32 {
        self.n
    }

    pub fn sets(&self) -> &[u32] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    /// Largest member size; the polynomial degree of the span.
    pub fn degree(&self) -> u32 {
        self.sets.iter().map(|s| s.count_ones()).max().unwrap_or(0)
    }
}

/// Exact mean of |sum_S x^S| over all 2^N sign vectors. Workers own
/// disjoint high-bit prefixes; each runs a Gray code over the low bits so
/// a step only re-signs the members containing the flipped coordinate.
/// All arithmetic is integer; the single float rounding is the final
/// division by 2^N.
pub fn boolean_proj_exact(family: &SubsetFamily, workers: usize) -> Result<f64, BooleanError> {
    let total = cube_sum_exact(family, workers, false)?;
    Ok(big_to_f64(&total) / 2f64.powi(family.n as i32))
}

/// Exact mean of (sum_S x^S)^2; equals |family| by Walsh orthonormality.
pub fn boolean_square_mean_exact(
    family: &SubsetFamily,
    workers: usize,
) -> Result<f64, BooleanError> {
    let total = cube_sum_exact(family, workers, true)?;
    Ok(big_to_f64(&total) / 2f64.powi(family.n as i32))
}

fn big_to_f64(v: &u128) -> f64 {
    *v as f64
}

fn cube_sum_exact(
    family: &SubsetFamily,
    workers: usize,
    squared: bool,
) -> Result<u128, BooleanError> {
    let n = family.n;
    if n > EXACT_CUBE_LIMIT {
        return Err(BooleanError::CubeTooLarge(n));
    }
    assert!(workers >= 1);
    if family.sets.is_empty() {
        return Ok(0);
    }
    // Low bits run the Gray code; high bits index the worker chunks.
    let low_bits = n.min(16);
    let prefix_bits = n - low_bits;
    let members_low: Vec<Vec<u32>> = (0..low_bits)
        .map(|i| {
            (0..family.sets.len() as u32)
                .filter(|&idx| family.sets[idx as usize] & (1 << i) != 0)
                .collect()
        })
        .collect();
    let chunk_total: Vec<u128> = (0u32..1 << prefix_bits)
        .into_par_iter()
        .map(|prefix| {
            let neg0 = prefix << low_bits;
            let mut chi: Vec<i32> = family
                .sets
                .iter()
                .map(|&s| if (s & neg0).count_ones() % 2 == 0 { 1 } else { -1 })
                .collect();
            let mut t: i64 = chi.iter().map(|&c| c as i64).sum();
            let mut acc: u128 = 0;
            let steps: u64 = 1 << low_bits;
            for step in 0..steps {
                acc += if squared {
                    (t as i128 * t as i128) as u128
                } else {
                    t.unsigned_abs() as u128
                };
                if step + 1 < steps {
                    let bit = (step + 1).trailing_zeros();
                    for &idx in &members_low[bit as usize] {
                        let c = &mut chi[idx as usize];
                        *c = -*c;
                        t += 2 * *c as i64;
                    }
                }
            }
            acc
        })
        .collect();
    Ok(chunk_total.iter().sum())
}

/// Monte Carlo fallback for cubes too large to enumerate.
pub fn boolean_proj_mc(
    family: &SubsetFamily,
    samples: u64,
    seed: u64,
    workers: usize,
) -> MCEstimate {
    let sets = family.sets.clone();
    let n = family.n;
    montecarlo::run_mc(samples, seed, workers, move |rng| {
        let signs = montecarlo::sample_boolean(n as usize, rng);
        let mut neg: u32 = 0;
        for (i, &s) in signs.iter().enumerate() {
            if s < 0 {
                neg |= 1 << i;
            }
        }
        let mut t: i64 = 0;
        for &s in &sets {
            t += if (s & neg).count_ones() % 2 == 0 { 1 } else { -1 };
        }
        t.unsigned_abs() as f64
    })
}

/// Coefficients (ascending) of the limit polynomial P_d from the
/// recursion P_d = t^d/d! - sum_{k=1}^{floor(d/2)} P_{d-2k}/(k! 2^k),
/// carried exactly in rationals and converted to floats at the end.
pub fn pd_polynomial(d: u32) -> Vec<f64> {
    assert!(d <= PD_DEGREE_LIMIT, "degree {d} exceeds {PD_DEGREE_LIMIT}");
    let table = pd_table(d);
    table[d as usize].iter().map(|c| rational_to_f64(c)).collect()
}

fn pd_table(d: u32) -> Vec<Vec<BigRational>> {
    let mut table: Vec<Vec<BigRational>> = Vec::with_capacity(d as usize + 1);
    for m in 0..=d as usize {
        let mut poly = vec![BigRational::zero(); m + 1];
        poly[m] = BigRational::new(BigUint::one().into(), factorial(m as u32).into());
        for k in 1..=m / 2 {
            let weight =
                BigRational::new(BigUint::one().into(), (factorial(k as u32) << k).into());
            let prev = &table[m - 2 * k];
            for (i, c) in prev.iter().enumerate() {
                let delta = c * &weight;
                poly[i] -= delta;
            }
        }
        table.push(poly);
    }
    table
}

fn factorial(n: u32) -> BigUint {
    (1..=n as u64).map(BigUint::from).fold(BigUint::one(), |a, b| a * b)
}

fn rational_to_f64(r: &BigRational) -> f64 {
    let num = r.numer().abs().to_f64().unwrap();
    let den = r.denom().abs().to_f64().unwrap();
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * num / den
}

/// Gaussian limit of the normalized degree-d projection constant:
/// E |P_d(Z)| for standard normal Z.
pub fn boolean_limit(d: u32) -> Result<f64, ClosedFormError> {
    assert!((1..=PD_DEGREE_LIMIT).contains(&d));
    closedforms::gaussian_abs_moment(&pd_polynomial(d))
}

/// Exact expansion coefficient C_{d,k,N}: the number of degree-d
/// monomials collapsing onto a fixed tetrahedral pattern of degree d-2k
/// when squares are erased, counted with multinomial weight. Computed by
/// summing multiplicities over the even-index layer, and checked to be
/// independent of the tetrahedral representative.
pub fn cdkn_exact(d: u32, k: u32, n: u32) -> Result<u128, BooleanError> {
    if !(1..=d / 2).contains(&k) {
        return Err(BooleanError::BadArgument(format!(
            "need 1 <= k <= floor(d/2), got d={d} k={k}"
        )));
    }
    if !(d <= n && n <= 14) {
        return Err(BooleanError::BadArgument(format!("need d <= N <= 14, got d={d} N={n}")));
    }
    let t = (d - 2 * k) as usize;
    let even_layer = IndexSet::full(k, n as usize)
        .map_err(|e| BooleanError::BadArgument(format!("even-layer enumeration: {e}")))?;
    let sum_for = |tetra: &[u32]| -> BigUint {
        let mut acc = BigUint::zero();
        for beta in even_layer.members() {
            let alpha: Vec<u32> = beta
                .entries()
                .iter()
                .zip(tetra)
                .map(|(&b, &t)| 2 * b + t)
                .collect();
            acc += MultiIndex::new(alpha).multiplicity();
        }
        acc
    };
    let mut first = vec![0u32; n as usize];
    for slot in first.iter_mut().take(t) {
        *slot = 1;
    }
    let value = sum_for(&first);
    if t >= 1 {
        let mut last = vec![0u32; n as usize];
        for slot in last.iter_mut().rev().take(t) {
            *slot = 1;
        }
        let check = sum_for(&last);
        assert_eq!(value, check, "C_{{d,k,N}} must not depend on the tetrahedral representative");
    }
    value
        .to_u128()
        .ok_or_else(|| BooleanError::BadArgument("coefficient exceeds u128".to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn empty_set_character_is_constant_one() {
        let fam = SubsetFamily::custom(3, vec![0]).unwrap();
        assert_abs_diff_eq!(boolean_proj_exact(&fam, 2).unwrap(), 1.0, epsilon = 0.0);
    }

    #[test]
    fn degree_one_three_coordinates() {
        let fam = SubsetFamily::homog(3, 1).unwrap();
        assert_eq!(fam.len(), 3);
        assert_abs_diff_eq!(boolean_proj_exact(&fam, 2).unwrap(), 1.5, epsilon = 0.0);
    }

    #[test]
    fn full_square_is_mean_one() {
        let fam = SubsetFamily::homog(2, 2).unwrap();
        assert_eq!(fam.sets(), &[0b11]);
        assert_abs_diff_eq!(boolean_proj_exact(&fam, 1).unwrap(), 1.0, epsilon = 0.0);
    }

    #[test]
    fn worker_count_does_not_change_exact_value() {
        let fam = SubsetFamily::up_to(10, 2).unwrap();
        let v1 = boolean_proj_exact(&fam, 1).unwrap();
        let v4 = boolean_proj_exact(&fam, 4).unwrap();
        assert_eq!(v1, v4);
    }

    #[test]
    fn square_mean_is_family_size() {
        for fam in [
            SubsetFamily::homog(9, 2).unwrap(),
            SubsetFamily::up_to(7, 3).unwrap(),
            SubsetFamily::custom(5, vec![0b1, 0b11000, 0b101]).unwrap(),
        ] {
            let mean = boolean_square_mean_exact(&fam, 2).unwrap();
            assert_abs_diff_eq!(mean, fam.len() as f64, epsilon = 0.0);
        }
    }

    #[test]
    fn pd_small_degrees() {
        assert_eq!(pd_polynomial(1), vec![0.0, 1.0]);
        assert_eq!(pd_polynomial(2), vec![-0.5, 0.0, 0.5]);
        assert_eq!(pd_polynomial(3), vec![0.0, -0.5, 0.0, 1.0 / 6.0]);
        assert_eq!(
            pd_polynomial(4),
            vec![3.0 / 24.0, 0.0, -6.0 / 24.0, 0.0, 1.0 / 24.0]
        );
    }

    #[test]
    fn pd_leading_coefficient_is_inverse_factorial() {
        for d in 0..=12u32 {
            let p = pd_polynomial(d);
            let mut fact = 1.0;
            for i in 1..=d as u64 {
                fact *= i as f64;
            }
            assert_abs_diff_eq!(p[d as usize], 1.0 / fact, epsilon = 1e-15);
        }
    }

    #[test]
    fn cdkn_square_rewriting_coefficient() {
        for n in [2u32, 5, 9] {
            assert_eq!(cdkn_exact(2, 1, n).unwrap(), n as u128);
        }
    }

    #[test]
    fn boolean_limit_closed_values() {
        let pi = std::f64::consts::PI;
        assert_abs_diff_eq!(boolean_limit(1).unwrap(), (2.0 / pi).sqrt(), epsilon = 1e-10);
        assert_abs_diff_eq!(
            boolean_limit(2).unwrap(),
            (2.0 / (pi * std::f64::consts::E)).sqrt(),
            epsilon = 1e-10
        );
        let d3 = (1.0 + 4.0 * (-1.5f64).exp()) / (3.0 * (2.0 * pi).sqrt());
        assert_abs_diff_eq!(boolean_limit(3).unwrap(), d3, epsilon = 1e-10);
    }

    #[test]
    fn parse_round_trips() {
        let fam = SubsetFamily::parse("homog:2", 6).unwrap();
        assert_eq!(fam.kind(), FamilyKind::Homog(2));
        assert_eq!(fam.len(), 15);
        let upto = SubsetFamily::parse("upto:1", 4).unwrap();
        assert_eq!(upto.len(), 5);
        let custom = SubsetFamily::parse("[3,5]", 4).unwrap();
        assert_eq!(custom.sets(), &[3, 5]);
        let rt = SubsetFamily::parse(&custom.descriptor(), 4).unwrap();
        assert_eq!(rt, custom);
    }

    #[test]
    fn oversized_cube_points_to_monte_carlo() {
        let fam = SubsetFamily::homog(30, 1).unwrap();
        let err = boolean_proj_exact(&fam, 1).unwrap_err();
        assert!(err.to_string().contains("Monte Carlo"));
        let est = boolean_proj_mc(&fam, 4000, 7, 2);
        let target = boolean_limit(1).unwrap() * (30f64).sqrt();
        assert!((est.mean - target).abs() < 4.0 * est.stderr.max(1e-3));
    }

    #[test]
    fn bad_mask_rejected() {
        assert!(SubsetFamily::custom(3, vec![0b1000]).is_err());
    }
}
