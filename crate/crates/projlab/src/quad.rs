//! Gauss-Legendre quadrature: fixed rules, composite sums, and a
//! budget-splitting adaptive driver.
//!
//! Rules are generated by Newton iteration on the Legendre polynomials and
//! cached per node count. The adaptive driver compares a rule against its
//! doubled refinement on each panel and bisects until the local error fits
//! the panel's share of the global budget, so the summation order (left to
//! right) is deterministic.

use std::collections::HashMap;
use std::sync::Mutex;
use std::sync::OnceLock;

/// Nodes and weights on the reference interval [-1, 1].
#[derive(Clone, Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn rule_cache() -> &'static Mutex<HashMap<usize, &'static Rule>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, &'static Rule>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss-Legendre rule with `n` nodes, cached process-wide.
pub fn gauss_legendre(n: usize) -> &'static Rule {
    assert!(n >= 1, "rule needs at least one node");
    let mut cache = rule_cache().lock().unwrap();
    if let Some(rule) = cache.get(&n) {
        return rule;
    }
    let rule = Box::leak(Box::new(compute_rule(n)));
    cache.insert(n, rule);
    rule
}

/// Legendre P_n(x) and its derivative via the three-term recurrence.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
    let dp = (n as f64) * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn compute_rule(n: usize) -> Rule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        // Chebyshev-like initial guess, then Newton. Converges in < 10 steps.
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        nodes[k] = x;
        weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    // Newton's guesses walk from +1 down; store ascending for determinism.
    nodes.reverse();
    weights.reverse();
    Rule { nodes, weights }
}

/// Integral of `f` over [a, b] with a single application of `rule`.
pub fn panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, rule: &Rule) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        sum += w * f(mid + half * x);
    }
    sum * half
}

/// Composite rule: [a, b] cut into `panels` equal panels.
pub fn composite<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, panels: usize, rule: &Rule) -> f64 {
    assert!(panels >= 1);
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for i in 0..panels {
        sum += panel(f, a + i as f64 * h, a + (i + 1) as f64 * h, rule);
    }
    sum
}

/// Outcome of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Adaptive {
    pub value: f64,
    /// Sum of the per-panel error estimates actually incurred.
    pub error_estimate: f64,
    pub converged: bool,
}

/// Adaptive integration of `f` over [a, b].
///
/// The absolute budget is `max(abs_tol, rel_tol * |first estimate|)`,
/// distributed over panels by length. `max_depth` bounds the bisection depth
/// of any single panel; running out of depth is reported, not hidden.
pub fn adaptive<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_depth: usize,
) -> Adaptive {
    let coarse = gauss_legendre(20);
    let fine = gauss_legendre(40);
    let rough = panel(f, a, b, fine);
    let budget = abs_tol.max(rel_tol * rough.abs()).max(f64::MIN_POSITIVE);
    let mut out = Adaptive { value: 0.0, error_estimate: 0.0, converged: true };
    adapt_rec(f, a, b, budget, max_depth, coarse, fine, &mut out);
    out
}

fn adapt_rec<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    budget: f64,
    depth: usize,
    coarse: &Rule,
    fine: &Rule,
    out: &mut Adaptive,
) {
    let v_coarse = panel(f, a, b, coarse);
    let v_fine = panel(f, a, b, fine);
    let err = (v_fine - v_coarse).abs();
    if err <= budget || depth == 0 {
        if err > budget {
            out.converged = false;
        }
        out.value += v_fine;
        out.error_estimate += err;
        return;
    }
    let mid = 0.5 * (a + b);
    adapt_rec(f, a, mid, budget * 0.5, depth - 1, coarse, fine, out);
    adapt_rec(f, mid, b, budget * 0.5, depth - 1, coarse, fine, out);
}

/// Adaptive integration that first splits [a, b] at the given break points
/// (kinks, kernel zeros) so every panel handed to the adaptive driver is
/// smooth inside.
pub fn adaptive_split<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    breaks: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_depth: usize,
) -> Adaptive {
    let mut edges = vec![a];
    for &t in breaks {
        if t > a && t < b {
            edges.push(t);
        }
    }
    edges.push(b);
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    // Rough pass for the global budget.
    let fine = gauss_legendre(40);
    let mut rough = 0.0;
    for w in edges.windows(2) {
        rough += panel(f, w[0], w[1], fine);
    }
    let budget = abs_tol.max(rel_tol * rough.abs()).max(f64::MIN_POSITIVE);
    let coarse = gauss_legendre(20);
    let mut out = Adaptive { value: 0.0, error_estimate: 0.0, converged: true };
    let total_len = b - a;
    for w in edges.windows(2) {
        let share = budget * (w[1] - w[0]) / total_len;
        adapt_rec(f, w[0], w[1], share, max_depth, coarse, fine, &mut out);
    }
    out
}
