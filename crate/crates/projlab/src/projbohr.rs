//! The polynomial projection constant (a sup of a positive monomial sum
//! over the unit ball), heuristic lower estimation of the monomial
//! unconditional-basis constant, Bohr radii through their reciprocal
//! relation, and the catalog of named bounds assembled per index set.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::characteristics::{
    characteristic_bruteforce, characteristic_closed, maximize_abs_on_ball, CharError, OptConfig,
    PosyTerm,
};
use crate::closedforms;
use crate::indexsets::{binomial, IndexSet};
use crate::montecarlo::MCEstimate;
use crate::spaces::{SequenceSpace, SpaceFamily};

/// Same cap as the characteristics oracle; the two share the optimizer.
pub const POLY_DIM_LIMIT: usize = 12;
/// Budget caps for the biconvex unconditionality heuristic.
pub const UNCOND_DIM_LIMIT: usize = 6;
pub const UNCOND_TERM_LIMIT: usize = 20;

#[derive(Debug, Error)]
pub enum ProjBohrError {
    #[error("dimension {0} exceeds the optimizer limit {POLY_DIM_LIMIT}")]
    DimensionTooLarge(usize),
    #[error("index set must not be empty")]
    EmptyIndexSet,
    #[error(
        "heuristic budget requires dimension <= {UNCOND_DIM_LIMIT} and |J| <= {UNCOND_TERM_LIMIT}, got n={0}, |J|={1}"
    )]
    BudgetExceeded(usize, usize),
    #[error("degree slice m={0} of the index set is empty")]
    EmptyDegreeSlice(u32),
    #[error(transparent)]
    Char(#[from] CharError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundKind {
    Lower,
    Upper,
    Estimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundEntry {
    pub label: String,
    pub kind: BoundKind,
    pub value: f64,
    /// Set only for Monte Carlo entries; consistency uses 3-sigma bands.
    pub stderr: Option<f64>,
    pub provenance: String,
}

/// Named bounds for one quantity. `consistent` is recomputed by
/// `check_consistency`; inconsistent reports keep all entries so the
/// contradiction stays diagnosable.
#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub quantity: String,
    pub entries: Vec<BoundEntry>,
    pub consistent: bool,
}

impl BoundReport {
    pub fn new(quantity: impl Into<String>) -> BoundReport {
        BoundReport { quantity: quantity.into(), entries: Vec::new(), consistent: true }
    }

    pub fn push(
        &mut self,
        label: impl Into<String>,
        kind: BoundKind,
        value: f64,
        stderr: Option<f64>,
        provenance: impl Into<String>,
    ) {
        self.entries.push(BoundEntry {
            label: label.into(),
            kind,
            value,
            stderr,
            provenance: provenance.into(),
        });
    }

    pub fn lowers(&self) -> impl Iterator<Item = &BoundEntry> {
        self.entries.iter().filter(|e| e.kind == BoundKind::Lower)
    }

    pub fn uppers(&self) -> impl Iterator<Item = &BoundEntry> {
        self.entries.iter().filter(|e| e.kind == BoundKind::Upper)
    }

    /// Every lower below every upper (relative tolerance), and every
    /// estimate carrying a stderr inside the bound corridor widened by
    /// three standard errors. Estimates without stderr are informational
    /// and not checked.
    pub fn check_consistency(&mut self, rel_tol: f64) -> bool {
        let mut ok = true;
        for lo in self.lowers() {
            for hi in self.uppers() {
                if lo.value > hi.value * (1.0 + rel_tol) + rel_tol {
                    ok = false;
                }
            }
        }
        let max_lower = self.lowers().map(|e| e.value).fold(f64::NEG_INFINITY, f64::max);
        let min_upper = self.uppers().map(|e| e.value).fold(f64::INFINITY, f64::min);
        for e in &self.entries {
            if e.kind == BoundKind::Estimate {
                if let Some(s) = e.stderr {
                    if e.value < max_lower - 3.0 * s || e.value > min_upper + 3.0 * s {
                        ok = false;
                    }
                }
            }
        }
        self.consistent = ok;
        ok
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).unwrap()
    }

    /// Aligned text table, one entry per row.
    pub fn to_table(&self) -> String {
        let label_w = self.entries.iter().map(|e| e.label.len()).max().unwrap_or(5).max(5);
        let mut out = format!("# {}\n", self.quantity);
        out.push_str(&format!(
            "{:<8} {:<label_w$} {:>18} {:>12} PROVENANCE\n",
            "KIND", "LABEL", "VALUE", "STDERR"
        ));
        for e in &self.entries {
            let kind = match e.kind {
                BoundKind::Lower => "lower",
                BoundKind::Upper => "upper",
                BoundKind::Estimate => "estimate",
            };
            let stderr = match e.stderr {
                Some(s) => format!("{s:.3e}"),
                None => "-".to_string(),
            };
            out.push_str(&format!(
                "{:<8} {:<label_w$} {:>18.12} {:>12} {}\n",
                kind, e.label, e.value, stderr, e.provenance
            ));
        }
        out.push_str(&format!("consistent: {}\n", self.consistent));
        out
    }
}

/// Value of the positive-coefficient sup problem; an interval when some
/// characteristic is only known as an interval (Lorentz bounds).
#[derive(Clone, Copy, Debug)]
pub struct LambdaHat {
    pub lo: f64,
    pub hi: f64,
    /// Every optimizer run backing the value converged; otherwise the
    /// numbers are best-found lower estimates of the two sups.
    pub converged: bool,
}

impl LambdaHat {
    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

/// Characteristic of alpha as a two-sided interval: closed form where
/// available, otherwise the optimizer oracle (whose inconclusive outcome
/// still yields valid bracketing).
fn char_interval(
    space: &SequenceSpace,
    alpha: &crate::indexsets::MultiIndex,
    cfg: &OptConfig,
) -> Result<(f64, f64), ProjBohrError> {
    match characteristic_closed(space, alpha) {
        Ok(c) => Ok((c.lo, c.hi)),
        Err(CharError::NoClosedForm(_)) => match characteristic_bruteforce(space, alpha, cfg) {
            Ok(c) => Ok((c.lo, c.hi)),
            Err(CharError::OracleInconclusive { lo, hi }) => Ok((lo, hi)),
            Err(e) => Err(e.into()),
        },
        Err(e) => Err(e.into()),
    }
}

/// sup over the unit ball of sum_{alpha in J} c_X(alpha) |z^alpha|,
/// the polynomial projection constant upper bound for the span of J.
pub fn poly_proj_const(
    space: &SequenceSpace,
    j: &IndexSet,
    cfg: &OptConfig,
) -> Result<LambdaHat, ProjBohrError> {
    if space.dimension() > POLY_DIM_LIMIT {
        return Err(ProjBohrError::DimensionTooLarge(space.dimension()));
    }
    if j.len() == 0 {
        return Err(ProjBohrError::EmptyIndexSet);
    }
    let mut lo_terms = Vec::with_capacity(j.len());
    let mut hi_terms = Vec::with_capacity(j.len());
    let mut all_points = true;
    for alpha in j.members() {
        let (lo, hi) = char_interval(space, alpha, cfg)?;
        all_points &= lo == hi;
        lo_terms.push(PosyTerm { coeff: lo, alpha: alpha.entries().to_vec() });
        hi_terms.push(PosyTerm { coeff: hi, alpha: alpha.entries().to_vec() });
    }
    let lo_out = maximize_abs_on_ball(space, &lo_terms, cfg);
    if all_points {
        let v = lo_out.log_value.exp();
        return Ok(LambdaHat { lo: v, hi: v, converged: lo_out.converged });
    }
    let hi_out = maximize_abs_on_ball(space, &hi_terms, cfg);
    Ok(LambdaHat {
        lo: lo_out.log_value.exp(),
        hi: hi_out.log_value.exp(),
        converged: lo_out.converged && hi_out.converged,
    })
}

/// Best-found lower estimate of the monomial unconditionality constant.
#[derive(Clone, Copy, Debug)]
pub struct UncondEstimate {
    pub lower: f64,
    /// True when the improvement loop was still finding better sign
    /// patterns at its pass cap; the value is then "lower bound only".
    pub budget_exhausted: bool,
}

/// Alternating heuristic for chi_mon: outer loop over coefficient
/// candidates (structured sign patterns plus seeded random phases), inner
/// evaluation of sup_z sum |c_alpha||z^alpha| divided by the sup norm of
/// sum c_alpha z^alpha, then greedy single-coordinate improvement of the
/// best candidate. The result is clamped into [1, |J|], the two trivial
/// two-sided bounds on the true constant.
pub fn uncond_basis_lower(
    space: &SequenceSpace,
    j: &IndexSet,
    cfg: &OptConfig,
) -> Result<UncondEstimate, ProjBohrError> {
    let n = space.dimension();
    if n > UNCOND_DIM_LIMIT || j.len() > UNCOND_TERM_LIMIT {
        return Err(ProjBohrError::BudgetExceeded(n, j.len()));
    }
    if j.len() == 0 {
        return Err(ProjBohrError::EmptyIndexSet);
    }
    let k = j.len();
    let inner_cfg = OptConfig { restarts: 6, max_iters: 250, ..cfg.clone() };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(0x756e_636f);

    let mut candidates: Vec<Vec<Complex64>> = Vec::new();
    candidates.push(vec![Complex64::new(1.0, 0.0); k]);
    candidates.push(
        j.members()
            .iter()
            .map(|a| Complex64::new(if a.degree() % 2 == 0 { 1.0 } else { -1.0 }, 0.0))
            .collect(),
    );
    // Rudin-Shapiro signs over the member rank: flat polynomials have
    // small sup norm, hence large ratios.
    candidates.push((0..k).map(|i| Complex64::new(rudin_shapiro_sign(i as u64), 0.0)).collect());
    for _ in 0..20 {
        candidates
            .push((0..k).map(|_| Complex64::new(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0)).collect());
    }
    for _ in 0..12 {
        candidates.push(
            (0..k)
                .map(|_| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * rng.gen::<f64>()))
                .collect(),
        );
    }

    let ratio = |c: &[Complex64], rng: &mut ChaCha8Rng| -> f64 {
        let (numer, peak) = majorant_sup(space, j, c, &inner_cfg);
        let denom = sup_norm_estimate(space, j, c, &peak, rng);
        if denom <= 0.0 {
            return 1.0;
        }
        numer / denom
    };

    let mut best_c = candidates[0].clone();
    let mut best = f64::NEG_INFINITY;
    for c in &candidates {
        let v = ratio(c, &mut rng);
        if v > best {
            best = v;
            best_c = c.clone();
        }
    }

    // Greedy coordinate improvement of the best candidate.
    let mut budget_exhausted = false;
    for pass in 0..3 {
        let mut improved = false;
        for i in 0..k {
            for rot in [
                Complex64::new(-1.0, 0.0),
                Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4),
                Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4),
            ] {
                let mut trial = best_c.clone();
                trial[i] *= rot;
                let v = ratio(&trial, &mut rng);
                if v > best * (1.0 + 1e-10) {
                    best = v;
                    best_c = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            break;
        }
        if pass == 2 {
            budget_exhausted = true;
        }
    }

    Ok(UncondEstimate { lower: best.clamp(1.0, k as f64), budget_exhausted })
}

/// sup_z sum |c_alpha| |z^alpha| over the ball, via the posynomial
/// optimizer (exact on the polydisc). Also returns the maximizing moduli,
/// which seed the sup-norm search: aligned phases peak near the same spot.
fn majorant_sup(
    space: &SequenceSpace,
    j: &IndexSet,
    c: &[Complex64],
    cfg: &OptConfig,
) -> (f64, Vec<f64>) {
    let terms: Vec<PosyTerm> = j
        .members()
        .iter()
        .zip(c)
        .filter(|(_, ci)| ci.norm() > 0.0)
        .map(|(a, ci)| PosyTerm { coeff: ci.norm(), alpha: a.entries().to_vec() })
        .collect();
    if terms.is_empty() {
        return (0.0, vec![0.0; space.dimension()]);
    }
    let out = maximize_abs_on_ball(space, &terms, cfg);
    (out.log_value.exp(), out.point)
}

/// Heuristic sup norm of sum c_alpha z^alpha over the unit ball: phase
/// grid plus hill climbing. On the polydisc (and for one variable, where
/// every ball is the disc) only phases matter; otherwise moduli on the
/// unit sphere are searched jointly through their log parametrization.
fn sup_norm_estimate(
    space: &SequenceSpace,
    j: &IndexSet,
    c: &[Complex64],
    peak: &[f64],
    rng: &mut ChaCha8Rng,
) -> f64 {
    let n = space.dimension();
    let phases_only = n == 1 || space.family() == &SpaceFamily::LInfty;

    let eval_phases = |theta: &[f64], moduli: &[f64]| -> f64 {
        let mut s = Complex64::new(0.0, 0.0);
        for (alpha, ci) in j.members().iter().zip(c) {
            let mut log_mod = 0.0;
            let mut phase = 0.0;
            for (i, &e) in alpha.entries().iter().enumerate() {
                if e > 0 {
                    log_mod += e as f64 * moduli[i].max(1e-300).ln();
                    phase += e as f64 * theta[i];
                }
            }
            s += ci * Complex64::from_polar(log_mod.exp(), phase);
        }
        s.norm()
    };

    let ones = vec![1.0; n];
    let mut best = 0.0f64;

    if phases_only {
        // Coarse grid: 64 phases per variable up to three variables.
        let levels: usize = if n == 1 { 256 } else if n == 2 { 64 } else { 24 };
        let mut idx = vec![0usize; n];
        let mut theta = vec![0.0; n];
        let mut best_theta = theta.clone();
        loop {
            for i in 0..n {
                theta[i] = 2.0 * std::f64::consts::PI * idx[i] as f64 / levels as f64;
            }
            let v = eval_phases(&theta, &ones);
            if v > best {
                best = v;
                best_theta = theta.clone();
            }
            let mut carry = 0;
            while carry < n {
                idx[carry] += 1;
                if idx[carry] < levels {
                    break;
                }
                idx[carry] = 0;
                carry += 1;
            }
            if carry == n {
                break;
            }
        }
        let refined = hill_climb(
            &mut |t: &[f64]| eval_phases(t, &ones),
            best_theta,
            200,
        );
        return best.max(refined);
    }

    // Joint (log-moduli, phases) search from seeded random starts.
    let mut eval_joint = |w: &[f64]| -> f64 {
        let (u, theta) = w.split_at(n);
        let x: Vec<f64> = u.iter().map(|&v| v.clamp(-60.0, 60.0).exp()).collect();
        let norm = match space.norm_abs(&x) {
            Ok(v) if v > 0.0 => v,
            _ => return 0.0,
        };
        let moduli: Vec<f64> = x.iter().map(|v| v / norm).collect();
        eval_phases(theta, &moduli)
    };
    for start in 0..13 {
        let w0: Vec<f64> = if start == 0 {
            vec![0.0; 2 * n]
        } else if start == 1 {
            // Majorant peak with aligned phases.
            let mut w = vec![0.0; 2 * n];
            for (i, &p) in peak.iter().enumerate() {
                w[i] = p.max(1e-12).ln().clamp(-60.0, 60.0);
            }
            w
        } else {
            (0..2 * n)
                .map(|i| {
                    if i < n {
                        -rng.gen::<f64>().max(1e-12).ln() * 0.5
                    } else {
                        2.0 * std::f64::consts::PI * rng.gen::<f64>()
                    }
                })
                .collect()
        };
        let v = hill_climb(&mut eval_joint, w0, 250);
        best = best.max(v);
    }
    best
}

/// Derivative-free coordinate ascent with a shrinking step; adequate for
/// the smooth low-dimensional sup-norm landscapes here.
fn hill_climb(f: &mut dyn FnMut(&[f64]) -> f64, mut x: Vec<f64>, iters: usize) -> f64 {
    let mut step = 0.4;
    let mut value = f(&x);
    for _ in 0..iters {
        let mut improved = false;
        for i in 0..x.len() {
            for dir in [1.0, -1.0] {
                let old = x[i];
                x[i] = old + dir * step;
                let v = f(&x);
                if v > value {
                    value = v;
                    improved = true;
                    break;
                }
                x[i] = old;
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-10 {
                break;
            }
        }
    }
    value
}

/// Parity of the number of adjacent 1-1 bit pairs: +1/-1 pattern whose
/// polynomial partial sums stay within sqrt(2 (d+1)) on the circle.
fn rudin_shapiro_sign(k: u64) -> f64 {
    if (k & (k >> 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// K_m upper-bound estimate from the reciprocal relation against the
/// degree-m slice of J.
pub fn bohr_radius_homog(
    space: &SequenceSpace,
    j: &IndexSet,
    m: u32,
    cfg: &OptConfig,
) -> Result<f64, ProjBohrError> {
    assert!(m >= 1, "homogeneity degree must be >= 1");
    let slice = j.degree_slice(m);
    if slice.len() == 0 {
        return Err(ProjBohrError::EmptyDegreeSlice(m));
    }
    let est = uncond_basis_lower(space, &slice, cfg)?;
    Ok(est.lower.powf(-1.0 / m as f64))
}

/// Exact geometric majorant of the Moebius witness at radius r:
/// a + (1-a^2) r / (1 - a r); the function itself has sup norm 1.
pub fn moebius_majorant(a: f64, r: f64) -> f64 {
    assert!((0.0..1.0).contains(&a) && (0.0..1.0).contains(&r));
    a + (1.0 - a * a) * r / (1.0 - a * r)
}

/// Largest radius at which every witness in a dense a-grid keeps its
/// majorant below its sup norm; bisection per witness, minimum over the
/// grid. Approaches 1/3 as the grid closes on a -> 1.
pub fn moebius_witness_radius(grid: usize) -> f64 {
    assert!(grid >= 2);
    let mut min_r = 1.0f64;
    for g in 1..=grid {
        let a = g as f64 / (grid as f64 + 1.0);
        // Majorant is increasing in r; find majorant = 1.
        let (mut lo, mut hi) = (0.0f64, 0.97f64.min(1.0 / a - 1e-9));
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if moebius_majorant(a, mid) <= 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        min_r = min_r.min(0.5 * (lo + hi));
    }
    min_r
}

/// Largest violation of |c_m| <= 1 - |c_0|^2 over random normalized
/// mixtures of rotated witnesses; nonpositive when the coefficient
/// inequality holds for the whole family.
pub fn wiener_defect(trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0x7769_656e);
    let max_coeff = 60usize;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..trials {
        let parts = rng.gen_range(1..=3usize);
        let raw: Vec<f64> = (0..parts).map(|_| rng.gen::<f64>() + 1e-9).collect();
        let total: f64 = raw.iter().sum();
        let witnesses: Vec<(f64, f64, f64)> = raw
            .iter()
            .map(|w| {
                (
                    w / total,
                    0.05 + 0.945 * rng.gen::<f64>(),
                    2.0 * std::f64::consts::PI * rng.gen::<f64>(),
                )
            })
            .collect();
        let global = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * rng.gen::<f64>());
        let coeff = |k: usize| -> Complex64 {
            let mut c = Complex64::new(0.0, 0.0);
            for &(w, a, phi) in &witnesses {
                let base = if k == 0 {
                    Complex64::new(a, 0.0)
                } else {
                    Complex64::new(-(1.0 - a * a) * a.powi(k as i32 - 1), 0.0)
                };
                c += w * base * Complex64::from_polar(1.0, k as f64 * phi);
            }
            global * c
        };
        let c0 = coeff(0).norm();
        for m in 1..=max_coeff {
            worst = worst.max(coeff(m).norm() - (1.0 - c0 * c0));
        }
    }
    worst
}

/// K_m estimates for m <= m_max plus the one-third sandwich; in one
/// variable the Moebius witness numbers are appended.
pub fn bohr_sandwich(
    space: &SequenceSpace,
    j: &IndexSet,
    m_max: u32,
    cfg: &OptConfig,
) -> Result<BoundReport, ProjBohrError> {
    assert!(m_max >= 1 && m_max <= 8, "m_max must be in 1..=8");
    let mut report = BoundReport::new(format!(
        "bohr-radius K(B_{}, {})",
        space.descriptor(),
        j.kind().descriptor()
    ));
    let mut inf_km = f64::INFINITY;
    let mut arg_inf = 0u32;
    for m in 1..=m_max {
        match bohr_radius_homog(space, j, m, cfg) {
            Ok(km) => {
                if km < inf_km {
                    inf_km = km;
                    arg_inf = m;
                }
                report.push(
                    format!("K_{m}"),
                    BoundKind::Estimate,
                    km,
                    None,
                    "Prop. Km vs uncond in Pm",
                );
            }
            Err(ProjBohrError::EmptyDegreeSlice(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    if !inf_km.is_finite() {
        return Err(ProjBohrError::EmptyIndexSet);
    }
    report.push(
        format!("inf_m K_m (at m={arg_inf})"),
        BoundKind::Upper,
        inf_km,
        None,
        "Thm Bohr vs unc",
    );
    report.push("inf_m K_m / 3", BoundKind::Lower, inf_km / 3.0, None, "Thm Bohr vs unc");
    if space.dimension() == 1 {
        report.push(
            "Moebius witness radius",
            BoundKind::Estimate,
            moebius_witness_radius(999),
            None,
            "Eq. (orgB)",
        );
        report.push(
            "Wiener coefficient defect",
            BoundKind::Estimate,
            wiener_defect(200, cfg.seed),
            None,
            "Lemma Wiener",
        );
    }
    report.check_consistency(1e-9);
    Ok(report)
}

/// Every named bound that applies to lambda(P_J(X_n)), plus an optional
/// Monte Carlo estimate checked against the assembled corridor.
pub fn bounds_catalog(
    space: &SequenceSpace,
    j: &IndexSet,
    mc: Option<&MCEstimate>,
    cfg: &OptConfig,
) -> Result<BoundReport, ProjBohrError> {
    if j.len() == 0 {
        return Err(ProjBohrError::EmptyIndexSet);
    }
    let n = space.dimension();
    let k = j.len() as f64;
    let m = j.members().iter().map(|a| a.degree()).max().unwrap();
    let mut report = BoundReport::new(format!(
        "lambda(P_J({})), J = {}, |J| = {}",
        space.descriptor(),
        j.kind().descriptor(),
        j.len()
    ));
    report.push("sqrt(|J|)", BoundKind::Upper, k.sqrt(), None, "Thm conny2 Eq. (AAA)");
    if n <= POLY_DIM_LIMIT {
        let lh = poly_proj_const(space, j, cfg)?;
        report.push("lambda-hat", BoundKind::Upper, lh.hi, None, "Thm lambda-dash");
    }
    if m >= 1 {
        if let Ok(phi) = space.dual_fundamental_function(n) {
            report.push(
                format!("e^{m} phi_dual(n)^{m}"),
                BoundKind::Upper,
                (m as f64).exp() * phi.powi(m as i32),
                None,
                "Prop. lambdaII",
            );
        }
    }
    if space.family() == &SpaceFamily::LInfty && m >= 1 {
        report.push(
            format!("kappa^{m}"),
            BoundKind::Upper,
            closedforms::kappa().powi(m as i32),
            None,
            "Thm OrOuSe",
        );
        report.push(
            "sqrt(|J|) / 2^(m/2)",
            BoundKind::Lower,
            k.sqrt() / 2f64.powf(m as f64 / 2.0),
            None,
            "Cor. corB2 (C2 = 2^(m/2), Weissler)",
        );
    }
    if space.family() == &SpaceFamily::Lr(2.0) {
        if let Some(deg) = j.homogeneous_degree() {
            let full = binomial((n as u64) + deg as u64 - 1, deg as u64);
            if full == j.len().into() {
                report.push(
                    "Gamma-ratio closed value",
                    BoundKind::Estimate,
                    closedforms::proj_hilbert_homog(n as u32, deg),
                    None,
                    "Cor. RW",
                );
            }
        }
    }
    if let SpaceFamily::Lorentz { r, .. } = *space.family() {
        if r > 1.0 && r < 2.0 && j.homogeneous_degree().is_some() {
            // Open-question tracking only; never part of consistency.
            report.push(
                "|J|^(1/r')",
                BoundKind::Estimate,
                k.powf(1.0 - 1.0 / r),
                None,
                "Eq. (want), open",
            );
        }
    }
    if let Some(est) = mc {
        report.push("Monte Carlo", BoundKind::Estimate, est.mean, Some(est.stderr), "MC");
    }
    report.check_consistency(1e-9);
    Ok(report)
}
