//! The characteristic of a multi-index alpha relative to a sequence
//! lattice X: the reciprocal of sup |z^alpha| over the unit ball.
//!
//! Three routes are kept deliberately independent: closed forms per family,
//! interval bounds where only two-sided estimates exist (Lorentz), and a
//! multistart ascent oracle that knows nothing about the formulas. Tests
//! collide the routes against each other.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::indexsets::MultiIndex;
use crate::spaces::{conjugate_exponent, SequenceSpace, SpaceError, SpaceFamily};
use crate::DEFAULT_SEED;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CharError {
    #[error("no closed form; use brute force ({0})")]
    NoClosedForm(String),
    #[error("dimension {0} too large for the oracle (limit {1})")]
    DimensionTooLarge(usize, usize),
    #[error("oracle inconclusive; best interval [{lo}, {hi}]")]
    OracleInconclusive { lo: f64, hi: f64 },
    #[error("mismatched alpha between operands")]
    AlphaMismatch,
    #[error("interpolation parameter must lie in (0,1), got {0}")]
    BadTheta(f64),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharProvenance {
    ClosedForm,
    Bounds,
    BruteForce,
}

/// c_X(alpha), either a point (lo = hi) or a two-sided bound.
#[derive(Clone, Debug)]
pub struct Characteristic {
    pub space: SequenceSpace,
    pub alpha: MultiIndex,
    pub lo: f64,
    pub hi: f64,
    pub provenance: CharProvenance,
}

impl Characteristic {
    pub fn value(&self) -> Option<f64> {
        (self.lo == self.hi).then_some(self.lo)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Geometric midpoint, a scale-free representative of an interval.
    pub fn mid(&self) -> f64 {
        (self.lo * self.hi).sqrt()
    }
}

/// ln(m^m / alpha^alpha) with 0 ln 0 = 0.
pub fn log_mm_over_aa(alpha: &MultiIndex) -> f64 {
    let m = alpha.degree() as f64;
    let mut s = if m > 0.0 { m * m.ln() } else { 0.0 };
    for &a in alpha.entries() {
        if a > 0 {
            let af = a as f64;
            s -= af * af.ln();
        }
    }
    s
}

fn nakano_log_char(alpha: &MultiIndex, p: &[f64]) -> f64 {
    // (sum a_j)^(sum a_j) / prod a_j^{a_j} with a_j = alpha_j / p_j.
    let a: Vec<f64> = alpha
        .entries()
        .iter()
        .zip(p)
        .map(|(&ai, &pi)| ai as f64 / pi)
        .collect();
    let s: f64 = a.iter().sum();
    let mut ln = if s > 0.0 { s * s.ln() } else { 0.0 };
    for &aj in &a {
        if aj > 0.0 {
            ln -= aj * aj.ln();
        }
    }
    ln
}

/// Sum over ranks of alpha*_k ln k (1-based), the log of prod k^{alpha*_k}.
fn log_rank_product(alpha: &MultiIndex) -> f64 {
    let sorted = alpha.decreasing_rearrangement();
    sorted
        .entries()
        .iter()
        .enumerate()
        .map(|(k, &a)| a as f64 * ((k + 1) as f64).ln())
        .sum()
}

fn point(space: &SequenceSpace, alpha: &MultiIndex, v: f64) -> Characteristic {
    Characteristic {
        space: space.clone(),
        alpha: alpha.clone(),
        lo: v,
        hi: v,
        provenance: CharProvenance::ClosedForm,
    }
}

/// Closed-form characteristic. Lorentz with non-tetrahedral alpha yields a
/// two-sided bound; tetrahedral alpha in any symmetric family is the exact
/// point phi_X(m)^m.
pub fn characteristic_closed(
    space: &SequenceSpace,
    alpha: &MultiIndex,
) -> Result<Characteristic, CharError> {
    check_dims(space, alpha)?;
    let m = alpha.degree() as f64;
    let log_mm = log_mm_over_aa(alpha);
    match space.family() {
        SpaceFamily::Lr(r) => Ok(point(space, alpha, (log_mm / r).exp())),
        SpaceFamily::LInfty => Ok(point(space, alpha, 1.0)),
        SpaceFamily::Nakano(p) => Ok(point(space, alpha, nakano_log_char(alpha, p).exp())),
        SpaceFamily::NakanoDual(p) => {
            Ok(point(space, alpha, (log_mm - nakano_log_char(alpha, p)).exp()))
        }
        SpaceFamily::Mixed { p, q, rows, cols } => {
            let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
            let inv_q = if q.is_infinite() { 0.0 } else { 1.0 / q };
            let mut ln = if m > 0.0 { m * inv_p * m.ln() } else { 0.0 };
            for &a in alpha.entries() {
                if a > 0 {
                    let af = a as f64;
                    ln -= inv_q * af * af.ln();
                }
            }
            for i in 0..*rows {
                let row: u32 = alpha.entries()[i * cols..(i + 1) * cols].iter().sum();
                if row > 0 {
                    let rf = row as f64;
                    ln += (inv_q - inv_p) * rf * rf.ln();
                }
            }
            Ok(point(space, alpha, ln.exp()))
        }
        SpaceFamily::Lorentz { r, s } => {
            if alpha.is_tetrahedral() {
                // phi_X(m)^m = m^{m/r} for this normalization, any s.
                return Ok(point(space, alpha, (m * m.ln() / r).exp()));
            }
            if s.is_infinite() && *r > 1.0 {
                let ln_pi = log_rank_product(alpha) / r;
                let rp = conjugate_exponent(*r);
                return Ok(Characteristic {
                    space: space.clone(),
                    alpha: alpha.clone(),
                    lo: ln_pi.exp(),
                    hi: (ln_pi + m * rp.ln()).exp(),
                    provenance: CharProvenance::Bounds,
                });
            }
            if *s == 1.0 {
                let rp = conjugate_exponent(*r);
                let inv_rp = if rp.is_infinite() { 0.0 } else { 1.0 / rp };
                let ln_q = log_mm - inv_rp * log_rank_product(alpha);
                let lo = (ln_q - m * r.ln()).exp();
                let hi = ln_q.exp();
                return Ok(Characteristic {
                    space: space.clone(),
                    alpha: alpha.clone(),
                    lo,
                    hi,
                    provenance: if lo == hi {
                        CharProvenance::ClosedForm
                    } else {
                        CharProvenance::Bounds
                    },
                });
            }
            Err(CharError::NoClosedForm(format!(
                "{} with non-tetrahedral alpha",
                space.descriptor()
            )))
        }
    }
}

/// Report label naming the closed form that `characteristic_closed` would
/// use. These strings are output data for reports, not computation.
pub fn closed_form_label(space: &SequenceSpace, alpha: &MultiIndex) -> Option<&'static str> {
    Some(match space.family() {
        SpaceFamily::Lr(_) => {
            if alpha.is_tetrahedral() {
                "Eq. (dineen2)"
            } else {
                "Eq. (dineen)"
            }
        }
        SpaceFamily::LInfty => "Eq. (dineen)",
        SpaceFamily::Nakano(_) | SpaceFamily::NakanoDual(_) => "Prop. nakano-ch",
        SpaceFamily::Mixed { .. } => "Prop. mixed",
        SpaceFamily::Lorentz { r: _, s } => {
            if alpha.is_tetrahedral() {
                "Prop. mietek"
            } else if s.is_infinite() {
                "Cor. cMar"
            } else if *s == 1.0 {
                "Cor. cLor"
            } else {
                return None;
            }
        }
    })
}

fn check_dims(space: &SequenceSpace, alpha: &MultiIndex) -> Result<(), CharError> {
    if space.dimension() != alpha.dimension() {
        return Err(CharError::Space(SpaceError::DimensionMismatch {
            expected: space.dimension(),
            got: alpha.dimension(),
        }));
    }
    Ok(())
}

/// |c_X(alpha) c_X'(alpha) - m^m/alpha^alpha| / (m^m/alpha^alpha), both
/// factors from closed forms.
pub fn duality_defect(space: &SequenceSpace, alpha: &MultiIndex) -> Result<f64, CharError> {
    let dual = space.kothe_dual()?;
    let cx = characteristic_closed(space, alpha)?;
    let cxd = characteristic_closed(&dual, alpha)?;
    let (Some(a), Some(b)) = (cx.value(), cxd.value()) else {
        return Err(CharError::NoClosedForm(
            "duality defect needs point values".to_string(),
        ));
    };
    let mm = log_mm_over_aa(alpha).exp();
    Ok((a * b - mm).abs() / mm)
}

/// Same defect with both characteristics taken from the oracle.
pub fn duality_defect_oracle(
    space: &SequenceSpace,
    alpha: &MultiIndex,
    cfg: &OptConfig,
) -> Result<f64, CharError> {
    let dual = space.kothe_dual()?;
    let cx = characteristic_bruteforce(space, alpha, cfg)?;
    let cxd = characteristic_bruteforce(&dual, alpha, cfg)?;
    let mm = log_mm_over_aa(alpha).exp();
    Ok((cx.lo * cxd.lo - mm).abs() / mm)
}

#[derive(Clone, Copy, Debug)]
pub enum CombineOp {
    Product,
    Interpolate(f64),
}

/// Product or geometric interpolation of two characteristics over the same
/// alpha. The space tag of the result is taken from the first operand; the
/// combined lattice has no descriptor of its own.
pub fn characteristic_combine(
    op: CombineOp,
    cx: &Characteristic,
    cy: &Characteristic,
) -> Result<Characteristic, CharError> {
    if cx.alpha != cy.alpha {
        return Err(CharError::AlphaMismatch);
    }
    let (lo, hi) = match op {
        CombineOp::Product => (cx.lo * cy.lo, cx.hi * cy.hi),
        CombineOp::Interpolate(theta) => {
            if !(theta > 0.0 && theta < 1.0) {
                return Err(CharError::BadTheta(theta));
            }
            (
                cx.lo.powf(1.0 - theta) * cy.lo.powf(theta),
                cx.hi.powf(1.0 - theta) * cy.hi.powf(theta),
            )
        }
    };
    let provenance = if cx.is_point() && cy.is_point() {
        CharProvenance::ClosedForm
    } else {
        CharProvenance::Bounds
    };
    Ok(Characteristic {
        space: cx.space.clone(),
        alpha: cx.alpha.clone(),
        lo,
        hi,
        provenance,
    })
}

/// Knobs for the multistart oracle.
#[derive(Clone, Debug)]
pub struct OptConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Gradient 2-norm below which a run counts as converged. Families
    /// without an analytic norm gradient fall back to difference quotients
    /// and a directional stationarity probe instead.
    pub grad_tol: f64,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        OptConfig { restarts: 32, max_iters: 600, grad_tol: 1e-10, seed: DEFAULT_SEED }
    }
}

const ORACLE_DIM_LIMIT: usize = 12;

/// Independent estimate of c_X(alpha): maximize sum alpha_i log z_i over
/// the nonnegative part of the unit sphere (the objective is monotone in
/// each |z_i|, so nothing is lost) and return 1/exp(best).
pub fn characteristic_bruteforce(
    space: &SequenceSpace,
    alpha: &MultiIndex,
    cfg: &OptConfig,
) -> Result<Characteristic, CharError> {
    check_dims(space, alpha)?;
    if space.dimension() > ORACLE_DIM_LIMIT {
        return Err(CharError::DimensionTooLarge(space.dimension(), ORACLE_DIM_LIMIT));
    }
    let term = PosyTerm { coeff: 1.0, alpha: alpha.entries().to_vec() };
    let out = maximize_abs_on_ball(space, &[term], cfg);
    let hi = (-out.log_value).exp();
    if !out.converged {
        return Err(CharError::OracleInconclusive { lo: 1.0, hi });
    }
    Ok(Characteristic {
        space: space.clone(),
        alpha: alpha.clone(),
        lo: hi,
        hi,
        provenance: CharProvenance::BruteForce,
    })
}

/// One monomial with a nonnegative coefficient.
#[derive(Clone, Debug)]
pub(crate) struct PosyTerm {
    pub coeff: f64,
    pub alpha: Vec<u32>,
}

pub(crate) struct MaxOutcome {
    /// ln sup of the term sum over the unit ball.
    pub log_value: f64,
    /// A maximizing vector of moduli on the unit sphere (all-ones for
    /// l_infinity, where the polydisc vertex is optimal).
    pub point: Vec<f64>,
    pub converged: bool,
}

/// Maximize sum_k c_k x^{alpha_k} over the nonnegative unit sphere of the
/// space. Works in u = ln x on the support, where the objective
/// ln sum_k c_k exp(<alpha_k, u> - m_k ln ||e^u||) is scale-free.
pub(crate) fn maximize_abs_on_ball(
    space: &SequenceSpace,
    terms: &[PosyTerm],
    cfg: &OptConfig,
) -> MaxOutcome {
    let n = space.dimension();
    let terms: Vec<PosyTerm> = terms.iter().filter(|t| t.coeff > 0.0).cloned().collect();
    assert!(!terms.is_empty(), "need at least one positive term");
    let total: f64 = terms.iter().map(|t| t.coeff).sum();

    // Polydisc ball: every |z_i| <= 1 independently, so the monotone
    // objective peaks at the all-ones vertex. Exact, no search.
    if space.family() == &SpaceFamily::LInfty {
        return MaxOutcome { log_value: total.ln(), point: vec![1.0; n], converged: true };
    }

    let support: Vec<usize> =
        (0..n).filter(|&i| terms.iter().any(|t| t.alpha[i] > 0)).collect();
    if support.is_empty() {
        return MaxOutcome { log_value: total.ln(), point: vec![0.0; n], converged: true };
    }
    let problem = Problem { space, terms: &terms, support: &support };

    let starts = build_starts(&problem, cfg);
    let results: Vec<RunResult> = starts
        .par_iter()
        .enumerate()
        .map(|(idx, u0)| ascend(&problem, u0.clone(), cfg, idx as u64))
        .collect();

    let mut best = &results[0];
    for r in &results[1..] {
        if r.value > best.value {
            best = r;
        }
    }
    let scale = best.value.abs().max(1.0);
    let converged = results
        .iter()
        .any(|r| r.converged && best.value - r.value <= 1e-9 * scale);

    let x = problem.full_point(&best.u);
    let norm = space.norm_abs(&x).expect("norm of optimizer point");
    let point: Vec<f64> = x.iter().map(|v| v / norm).collect();
    MaxOutcome { log_value: best.value, point, converged }
}

struct Problem<'a> {
    space: &'a SequenceSpace,
    terms: &'a [PosyTerm],
    support: &'a [usize],
}

struct RunResult {
    u: Vec<f64>,
    value: f64,
    converged: bool,
}

impl Problem<'_> {
    fn full_point(&self, u: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.space.dimension()];
        for (j, &i) in self.support.iter().enumerate() {
            x[i] = u[j].clamp(-700.0, 700.0).exp();
        }
        x
    }

    fn value(&self, u: &[f64]) -> f64 {
        let x = self.full_point(u);
        let norm = self.space.norm_abs(&x).expect("norm");
        let ln_norm = norm.ln();
        let mut logs = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            let mut l = t.coeff.ln();
            let mut degree = 0.0;
            // The support covers every coordinate any term touches, so the
            // degree accumulated here is the full term degree.
            for (j, &i) in self.support.iter().enumerate() {
                l += t.alpha[i] as f64 * u[j];
                degree += t.alpha[i] as f64;
            }
            logs.push(l - degree * ln_norm);
        }
        log_sum_exp(&logs)
    }

    /// Value and gradient; analytic when the norm has a closed gradient,
    /// otherwise central differences.
    fn value_grad(&self, u: &[f64]) -> (f64, Vec<f64>) {
        let x = self.full_point(u);
        let norm = self.space.norm_abs(&x).expect("norm");
        if let Some(g) = norm_gradient(self.space, &x, norm) {
            let ln_norm = norm.ln();
            let rho: Vec<f64> = self
                .support
                .iter()
                .map(|&i| x[i] * g[i] / norm)
                .collect();
            let mut logs = Vec::with_capacity(self.terms.len());
            let mut degrees = Vec::with_capacity(self.terms.len());
            for t in self.terms {
                let mut l = t.coeff.ln();
                let mut degree = 0.0;
                for (j, &i) in self.support.iter().enumerate() {
                    l += t.alpha[i] as f64 * u[j];
                    degree += t.alpha[i] as f64;
                }
                logs.push(l - degree * ln_norm);
                degrees.push(degree);
            }
            let value = log_sum_exp(&logs);
            let weights: Vec<f64> = logs.iter().map(|l| (l - value).exp()).collect();
            let mut grad = vec![0.0; self.support.len()];
            for (t, (&w, &deg)) in self.terms.iter().zip(weights.iter().zip(&degrees)) {
                for (j, &i) in self.support.iter().enumerate() {
                    grad[j] += w * (t.alpha[i] as f64 - deg * rho[j]);
                }
            }
            (value, grad)
        } else {
            let value = self.value(u);
            let h = 1e-6;
            let mut grad = vec![0.0; u.len()];
            let mut up = u.to_vec();
            for j in 0..u.len() {
                up[j] = u[j] + h;
                let fp = self.value(&up);
                up[j] = u[j] - h;
                let fm = self.value(&up);
                up[j] = u[j];
                grad[j] = (fp - fm) / (2.0 * h);
            }
            (value, grad)
        }
    }
}

fn log_sum_exp(logs: &[f64]) -> f64 {
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m.is_infinite() {
        return m;
    }
    m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln()
}

/// d norm / d x_i for the families with a usable closed gradient; None
/// routes the caller to difference quotients.
fn norm_gradient(space: &SequenceSpace, x: &[f64], norm: f64) -> Option<Vec<f64>> {
    match space.family() {
        SpaceFamily::Lr(r) => {
            let r = *r;
            Some(
                x.iter()
                    .map(|&v| if v == 0.0 && r > 1.0 { 0.0 } else { (v / norm).powf(r - 1.0) })
                    .collect(),
            )
        }
        SpaceFamily::Lorentz { r, s } if s.is_finite() => {
            let mut order: Vec<usize> = (0..x.len()).collect();
            order.sort_by(|&a, &b| x[b].partial_cmp(&x[a]).unwrap().then(a.cmp(&b)));
            let mut g = vec![0.0; x.len()];
            for (rank, &i) in order.iter().enumerate() {
                let k1 = (rank + 1) as f64;
                let w = k1.powf(s / r) - (rank as f64).powf(s / r);
                let xs = if *s == 1.0 { 1.0 } else { (x[i] / norm).powf(s - 1.0) };
                g[i] = xs * w;
            }
            Some(g)
        }
        SpaceFamily::Nakano(p) => {
            let t = norm;
            let denom: f64 = x
                .iter()
                .zip(p)
                .map(|(&v, &pi)| pi * v.powf(pi) / t.powf(pi + 1.0))
                .sum();
            Some(
                x.iter()
                    .zip(p)
                    .map(|(&v, &pi)| {
                        if v == 0.0 && pi > 1.0 {
                            0.0
                        } else {
                            (pi * v.powf(pi - 1.0) / t.powf(pi)) / denom
                        }
                    })
                    .collect(),
            )
        }
        SpaceFamily::Mixed { p, q, rows, cols } if p.is_finite() && q.is_finite() => {
            let mut g = vec![0.0; x.len()];
            for i in 0..*rows {
                let row = &x[i * cols..(i + 1) * cols];
                let rn = row.iter().map(|v| v.powf(*q)).sum::<f64>().powf(1.0 / q);
                if rn == 0.0 {
                    continue;
                }
                let outer = (rn / norm).powf(p - 1.0);
                for (j, &v) in row.iter().enumerate() {
                    g[i * cols + j] = if v == 0.0 && *q > 1.0 {
                        0.0
                    } else {
                        outer * (v / rn).powf(q - 1.0)
                    };
                }
            }
            Some(g)
        }
        _ => None,
    }
}

fn build_starts(problem: &Problem, cfg: &OptConfig) -> Vec<Vec<f64>> {
    let k = problem.support.len();
    let mut starts: Vec<Vec<f64>> = Vec::new();

    // Envelope exponent per coordinate: the largest power any term uses.
    let hat: Vec<f64> = problem
        .support
        .iter()
        .map(|&i| problem.terms.iter().map(|t| t.alpha[i]).max().unwrap() as f64)
        .collect();
    let hat_total: f64 = hat.iter().sum();
    let mut warm_exps = vec![1.0, 2.0];
    match problem.space.family() {
        SpaceFamily::Lr(r) => warm_exps.push(*r),
        SpaceFamily::Lorentz { r, .. } => warm_exps.push(*r),
        SpaceFamily::Mixed { q, .. } if q.is_finite() => warm_exps.push(*q),
        _ => {}
    }
    for re in warm_exps {
        starts.push(hat.iter().map(|&a| (a / hat_total).ln() / re).collect());
    }
    if let SpaceFamily::Nakano(p) | SpaceFamily::NakanoDual(p) = problem.space.family() {
        starts.push(
            problem
                .support
                .iter()
                .zip(&hat)
                .map(|(&i, &a)| (a / hat_total).ln() / p[i])
                .collect(),
        );
    }
    starts.push(vec![0.0; k]);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.restarts {
        let u: Vec<f64> = (0..k)
            .map(|_| {
                let e: f64 = -(rng.gen::<f64>().max(f64::MIN_POSITIVE)).ln();
                e.max(1e-12).ln()
            })
            .collect();
        starts.push(u);
    }

    // Simplex grid sweep; the best three grid points join the start list.
    // Grid points sit at kinks of rearrangement norms, which gradient
    // starts tend to miss.
    const GRID: u32 = 6;
    let count = crate::indexsets::binomial((GRID as u64) + (k as u64) - 1, (k as u64) - 1);
    if count <= num_bigint::BigUint::from(20_000u32) {
        let mut scored: Vec<(f64, Vec<f64>)> = Vec::new();
        let mut comp = vec![0u32; k];
        grid_rec(problem, &mut comp, 0, GRID, &mut scored);
        scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        for (_, u) in scored.into_iter().take(3) {
            starts.push(u);
        }
    }
    starts
}

fn grid_rec(
    problem: &Problem,
    comp: &mut Vec<u32>,
    pos: usize,
    left: u32,
    out: &mut Vec<(f64, Vec<f64>)>,
) {
    if pos == comp.len() - 1 {
        comp[pos] = left;
        // Zeros are nudged inward so the point has a log representation.
        let fixed: Vec<f64> = comp
            .iter()
            .map(|&c| if c == 0 { (0.01f64).ln() } else { (c as f64).ln() })
            .collect();
        let v = problem.value(&fixed);
        if v.is_finite() {
            out.push((v, fixed));
        }
        comp[pos] = 0;
        return;
    }
    for c in 0..=left {
        comp[pos] = c;
        grid_rec(problem, comp, pos + 1, left - c, out);
    }
    comp[pos] = 0;
}

/// Backtracking gradient ascent with a nonsmooth fallback: when the line
/// search stalls, random directional probes certify (or refute) local
/// stationarity, which is the right notion at rearrangement kinks.
fn ascend(problem: &Problem, mut u: Vec<f64>, cfg: &OptConfig, run_idx: u64) -> RunResult {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(run_idx + 1);
    let (mut value, mut grad) = problem.value_grad(&u);
    let mut converged = false;
    for _ in 0..cfg.max_iters {
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm <= cfg.grad_tol {
            converged = true;
            break;
        }
        let ginf = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        let mut tau = 1.0 / ginf.max(1.0);
        let mut accepted = false;
        while tau >= 1e-14 {
            let trial: Vec<f64> = u.iter().zip(&grad).map(|(ui, gi)| ui + tau * gi).collect();
            let tv = problem.value(&trial);
            if tv >= value + 1e-4 * tau * gnorm * gnorm {
                u = trial;
                let (nv, ng) = problem.value_grad(&u);
                value = nv;
                grad = ng;
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if !accepted {
            converged = probe_stationary(problem, &u, value, &mut rng);
            break;
        }
    }
    if !converged {
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm <= cfg.grad_tol || probe_stationary(problem, &u, value, &mut rng) {
            converged = true;
        }
    }
    RunResult { u, value, converged }
}

fn probe_stationary(problem: &Problem, u: &[f64], value: f64, rng: &mut ChaCha8Rng) -> bool {
    let k = u.len();
    let h = 1e-7;
    let threshold = 1e-6 * value.abs().max(1.0);
    for _ in 0..(2 * k).max(8) {
        let mut d: Vec<f64> = (0..k).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let dn = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if dn == 0.0 {
            continue;
        }
        for v in &mut d {
            *v /= dn;
        }
        for sign in [1.0, -1.0] {
            let probe: Vec<f64> = u
                .iter()
                .zip(&d)
                .map(|(ui, di)| ui + sign * h * di)
                .collect();
            if (problem.value(&probe) - value) / h > threshold {
                return false;
            }
        }
    }
    true
}
