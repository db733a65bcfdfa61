//! Seeded Monte Carlo estimators over the compact groups that carry the
//! integral formulas: the torus, the complex sphere, the unitary group,
//! and the Boolean cube. Workers consume disjoint RNG substreams and the
//! partial sums are folded in worker order, so a (seed, samples, workers)
//! triple always reproduces the same mean bit for bit.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::closedforms;
use crate::indexsets::{IndexSet, IndexSetError};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
}

impl MCEstimate {
    pub fn to_json(&self, quantity: &str, params: serde_json::Value) -> serde_json::Value {
        serde_json::json!({
            "quantity": quantity,
            "params": params,
            "mean": self.mean,
            "stderr": self.stderr,
            "samples": self.samples,
            "seed": self.seed,
            "workers": self.workers,
        })
    }

    fn scaled(self, factor: f64) -> MCEstimate {
        MCEstimate { mean: self.mean * factor, stderr: self.stderr * factor, ..self }
    }
}

/// RNG for worker `w`: one generator per substream of the shared seed.
pub fn worker_rng(seed: u64, worker: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(worker);
    rng
}

/// Splits `samples` across workers, runs `f` once per sample, and folds
/// the (sum, sum of squares) pairs in ascending worker order.
pub(crate) fn run_mc<F>(samples: u64, seed: u64, workers: usize, f: F) -> MCEstimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    assert!(samples >= 1 && workers >= 1);
    let base = samples / workers as u64;
    let rem = samples % workers as u64;
    let partials: Vec<(f64, f64)> = (0..workers)
        .into_par_iter()
        .map(|w| {
            let count = base + if (w as u64) < rem { 1 } else { 0 };
            let mut rng = worker_rng(seed, w as u64);
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for _ in 0..count {
                let v = f(&mut rng);
                sum += v;
                sum_sq += v * v;
            }
            (sum, sum_sq)
        })
        .collect();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for (s, s2) in partials {
        sum += s;
        sum_sq += s2;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = if samples > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    MCEstimate { mean, stderr: (var / n).sqrt(), samples, seed, workers }
}

/// Uniform point on the n-torus: independent unit phases.
pub fn sample_torus(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * rng.gen::<f64>()))
        .collect()
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniform point on the unit sphere of complex l2^n.
pub fn sample_sphere_complex(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    loop {
        let g: Vec<Complex64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        let norm = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-150 {
            return g.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Fair signs, one per coordinate.
pub fn sample_boolean(n: usize, rng: &mut ChaCha8Rng) -> Vec<i8> {
    (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect()
}

fn ginibre(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |_, _| complex_gaussian(rng))
}

/// Diagonal phases of the R factor; dividing them out of Q makes the
/// factorization unique (R diagonal positive real) and Q Haar-distributed.
fn r_diag_phases(r: &DMatrix<Complex64>) -> Vec<Complex64> {
    (0..r.nrows())
        .map(|j| {
            let d = r[(j, j)];
            let m = d.norm();
            if m > 0.0 {
                d / m
            } else {
                Complex64::new(1.0, 0.0)
            }
        })
        .collect()
}

/// Haar-distributed unitary: complex Ginibre, QR, then each column of Q
/// multiplied by the conjugate phase of the matching R diagonal entry.
/// The re-phasing pins the result to the unique factorization with
/// positive R diagonal, so the law cannot depend on the backend's
/// Householder sign convention.
pub fn sample_haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let qr = ginibre(n, rng).qr();
    let r = qr.r();
    let phases = r_diag_phases(&r);
    let mut q = qr.q();
    for j in 0..n {
        let ph = phases[j].conj();
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Raw Q factor without the re-phasing. The current backend already
/// normalizes the R diagonal to positive reals, so this coincides with the
/// corrected sampler; a Householder convention that phases the diagonal
/// would make it non-Haar. The tests pin the coincidence, turning it into
/// a tripwire should the backend convention ever change.
pub fn sample_haar_unitary_uncorrected(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    ginibre(n, rng).qr().q()
}

struct SparseSupport {
    dimension: usize,
    // (coordinate, exponent) pairs per index, exponent >= 1.
    terms: Vec<Vec<(usize, u32)>>,
    max_exp: Vec<u32>,
}

impl SparseSupport {
    fn new(j: &IndexSet) -> SparseSupport {
        let dimension = j.dimension() as usize;
        let mut max_exp = vec![0u32; dimension];
        let terms = j
            .members()
            .iter()
            .map(|alpha| {
                alpha
                    .entries()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| {
                        max_exp[i] = max_exp[i].max(e);
                        (i, e)
                    })
                    .collect()
            })
            .collect();
        SparseSupport { dimension, terms, max_exp }
    }

    /// Sum of z^alpha over the set, with per-coordinate power tables.
    fn exp_sum(&self, z: &[Complex64], powers: &mut [Vec<Complex64>]) -> Complex64 {
        for i in 0..self.dimension {
            powers[i][0] = Complex64::new(1.0, 0.0);
            for k in 1..=self.max_exp[i] as usize {
                powers[i][k] = powers[i][k - 1] * z[i];
            }
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for term in &self.terms {
            let mut prod = Complex64::new(1.0, 0.0);
            for &(i, e) in term {
                prod *= powers[i][e as usize];
            }
            sum += prod;
        }
        sum
    }

    fn power_table(&self) -> Vec<Vec<Complex64>> {
        self.max_exp
            .iter()
            .map(|&e| vec![Complex64::new(0.0, 0.0); e as usize + 1])
            .collect()
    }
}

/// MC mean of |sum_{alpha in J} z^alpha| over the torus.
pub fn torus_exp_sum(j: &IndexSet, samples: u64, seed: u64, workers: usize) -> MCEstimate {
    let support = SparseSupport::new(j);
    run_mc(samples, seed, workers, |rng| {
        let z = sample_torus(support.dimension, rng);
        let mut powers = support.power_table();
        support.exp_sum(&z, &mut powers).norm()
    })
}

/// MC mean of |sum_{alpha in J} z^alpha|^2; converges to |J| by
/// character orthonormality.
pub fn torus_exp_sum_squared(j: &IndexSet, samples: u64, seed: u64, workers: usize) -> MCEstimate {
    let support = SparseSupport::new(j);
    run_mc(samples, seed, workers, |rng| {
        let z = sample_torus(support.dimension, rng);
        let mut powers = support.power_table();
        support.exp_sum(&z, &mut powers).norm_sqr()
    })
}

/// n times the MC mean of |tr U| over Haar unitaries; mean and stderr
/// both carry the n factor.
pub fn trace_class(n: u32, samples: u64, seed: u64, workers: usize) -> MCEstimate {
    assert!(n >= 1);
    let est = run_mc(samples, seed, workers, |rng| {
        let qr = ginibre(n as usize, rng).qr();
        let r = qr.r();
        let phases = r_diag_phases(&r);
        let q = qr.q();
        // Only the diagonal of the corrected Q enters the trace.
        let mut tr = Complex64::new(0.0, 0.0);
        for j in 0..n as usize {
            tr += q[(j, j)] * phases[j].conj();
        }
        tr.norm()
    });
    est.scaled(n as f64)
}

/// MC mean of |tr U|^2 over Haar unitaries (variance control; the exact
/// value is 1 for every n >= 1).
pub fn trace_class_second_moment(n: u32, samples: u64, seed: u64, workers: usize) -> MCEstimate {
    assert!(n >= 1);
    run_mc(samples, seed, workers, |rng| {
        let u = sample_haar_unitary(n as usize, rng);
        let mut tr = Complex64::new(0.0, 0.0);
        for j in 0..n as usize {
            tr += u[(j, j)];
        }
        tr.norm_sqr()
    })
}

/// MC mean of |sum_k c_k(n) <z, xi>^k| over the complex sphere at the
/// invariant-theory base point z = e1.
pub fn sphere_invariant(
    n: u32,
    degrees: &[u32],
    samples: u64,
    seed: u64,
    workers: usize,
) -> MCEstimate {
    let e1: Vec<Complex64> = (0..n as usize)
        .map(|i| Complex64::new(if i == 0 { 1.0 } else { 0.0 }, 0.0))
        .collect();
    sphere_invariant_at(n, degrees, &e1, samples, seed, workers)
}

/// Same estimator at an arbitrary unit base point; the result is
/// z-independent by unitary invariance, which the tests exercise.
pub fn sphere_invariant_at(
    n: u32,
    degrees: &[u32],
    z: &[Complex64],
    samples: u64,
    seed: u64,
    workers: usize,
) -> MCEstimate {
    assert!(n >= 2, "need n >= 2");
    assert_eq!(z.len(), n as usize);
    assert!(!degrees.is_empty());
    let max_deg = *degrees.iter().max().unwrap() as usize;
    let mut coeff = vec![0.0f64; max_deg + 1];
    for &k in degrees {
        coeff[k as usize] = closedforms::radial_coefficient(n, k);
    }
    run_mc(samples, seed, workers, |rng| {
        let xi = sample_sphere_complex(n as usize, rng);
        let w: Complex64 = z.iter().zip(&xi).map(|(a, b)| a * b.conj()).sum();
        let mut p = Complex64::new(0.0, 0.0);
        for &c in coeff.iter().rev() {
            p = p * w + c;
        }
        p.norm()
    })
}

/// Monte Carlo value of the Bohr-lifted Dirichlet projection constant:
/// builds the prime-exponent set for x (optionally its degree-m slice)
/// and delegates to the torus estimator.
pub fn dirichlet_projection(
    x: u64,
    homog_degree: Option<u32>,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<MCEstimate, IndexSetError> {
    assert!(x >= 2, "need x >= 2");
    let j = match homog_degree {
        Some(m) => IndexSet::prime_homog(x, m)?,
        None => IndexSet::prime_generated(x)?,
    };
    Ok(torus_exp_sum(&j, samples, seed, workers))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::indexsets::MultiIndex;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reproducible_means() {
        let j = IndexSet::full(2, 2).unwrap();
        let a = torus_exp_sum(&j, 2000, 11, 3);
        let b = torus_exp_sum(&j, 2000, 11, 3);
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.stderr, b.stderr);
    }

    #[test]
    fn single_monomial_has_zero_variance() {
        let j = IndexSet::custom(vec![MultiIndex::new(vec![1, 2, 0])]).unwrap();
        let est = torus_exp_sum(&j, 500, 5, 2);
        assert_abs_diff_eq!(est.mean, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(est.stderr, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn trace_class_dimension_one_is_exact() {
        let est = trace_class(1, 200, 3, 2);
        assert_abs_diff_eq!(est.mean, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(est.stderr, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn sphere_constant_term_is_exact() {
        let est = sphere_invariant(3, &[0], 300, 9, 2);
        assert_abs_diff_eq!(est.mean, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn torus_points_have_unit_modulus() {
        let mut rng = worker_rng(1, 0);
        for z in sample_torus(6, &mut rng) {
            assert_abs_diff_eq!(z.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn sphere_points_are_normalized() {
        let mut rng = worker_rng(1, 0);
        let xi = sample_sphere_complex(5, &mut rng);
        let norm: f64 = xi.iter().map(|z| z.norm_sqr()).sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn boolean_samples_are_signs() {
        let mut rng = worker_rng(2, 0);
        for s in sample_boolean(32, &mut rng) {
            assert!(s == 1 || s == -1);
        }
    }

    #[test]
    fn unitary_sample_is_unitary() {
        let mut rng = worker_rng(4, 0);
        let u = sample_haar_unitary(4, &mut rng);
        let gram = u.adjoint() * &u;
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(gram[(i, j)].re, want, epsilon = 1e-10);
                assert_abs_diff_eq!(gram[(i, j)].im, 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn worker_split_covers_all_samples() {
        let j = IndexSet::full(1, 1).unwrap();
        for workers in [1usize, 2, 3, 7] {
            let est = torus_exp_sum(&j, 1000, 5, workers);
            assert_eq!(est.samples, 1000);
            assert_eq!(est.workers, workers);
        }
    }

    #[test]
    fn estimate_serializes_with_quantity_and_params() {
        let j = IndexSet::full(1, 1).unwrap();
        let est = torus_exp_sum(&j, 100, 5, 1);
        let v = est.to_json("torus-exp-sum", serde_json::json!({"set": "full:1"}));
        assert_eq!(v["quantity"], "torus-exp-sum");
        assert_eq!(v["samples"], 100);
    }
}
