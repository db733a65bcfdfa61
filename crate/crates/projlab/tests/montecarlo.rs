//! Statistical checks of the samplers and estimators: Haar moments, left
//! invariance, Parseval consistency, and agreement with closed values.
//! Every tolerance is a multiple of the measured standard error, with wide
//! factors so seeds stay interchangeable.

use nalgebra::DMatrix;
use num_complex::Complex64;
use projlab::closedforms;
use projlab::indexsets::IndexSet;
use projlab::montecarlo::{
    dirichlet_projection, sample_haar_unitary, sample_haar_unitary_uncorrected,
    sample_sphere_complex, sphere_invariant, sphere_invariant_at, torus_exp_sum,
    torus_exp_sum_squared, trace_class, worker_rng,
};

struct Running {
    n: u64,
    sum: f64,
    sumsq: f64,
}

impl Running {
    fn new() -> Running {
        Running { n: 0, sum: 0.0, sumsq: 0.0 }
    }

    fn push(&mut self, v: f64) {
        self.n += 1;
        self.sum += v;
        self.sumsq += v * v;
    }

    fn mean(&self) -> f64 {
        self.sum / self.n as f64
    }

    fn stderr(&self) -> f64 {
        let m = self.mean();
        ((self.sumsq / self.n as f64 - m * m) / self.n as f64).sqrt()
    }
}

#[test]
fn haar_moments_match_weingarten_values() {
    for n in [2usize, 3] {
        let mut rng = worker_rng(2024, n as u64);
        let mut re_u11 = Running::new();
        let mut abs_u11 = Running::new();
        let mut cross_re = Running::new();
        let mut tr_sq = Running::new();
        for _ in 0..20_000 {
            let u = sample_haar_unitary(n, &mut rng);
            re_u11.push(u[(0, 0)].re);
            abs_u11.push(u[(0, 0)].norm_sqr());
            let cross = u[(0, 0)] * u[(1, 1)].conj();
            cross_re.push(cross.re);
            let tr: Complex64 = (0..n).map(|i| u[(i, i)]).sum();
            tr_sq.push(tr.norm_sqr());
        }
        assert!(re_u11.mean().abs() <= 5.0 * re_u11.stderr(), "E Re u11 at n = {n}");
        assert!(
            (abs_u11.mean() - 1.0 / n as f64).abs() <= 5.0 * abs_u11.stderr(),
            "E |u11|^2 at n = {n}: {}",
            abs_u11.mean()
        );
        assert!(cross_re.mean().abs() <= 5.0 * cross_re.stderr(), "E u11 conj(u22) at n = {n}");
        assert!(
            (tr_sq.mean() - 1.0).abs() <= 5.0 * tr_sq.stderr(),
            "E |tr U|^2 at n = {n}: {}",
            tr_sq.mean()
        );
    }
}

#[test]
fn phase_correction_is_the_identity_under_a_normalizing_backend() {
    // The backend QR returns R with a positive real diagonal, so the
    // corrected and raw samplers must coincide on matched draws. If this
    // ever fails, the backend convention changed and only the corrected
    // sampler remains Haar; retire this coincidence check then.
    for n in [2usize, 4] {
        let mut rng_a = worker_rng(314, n as u64);
        let mut rng_b = worker_rng(314, n as u64);
        for _ in 0..50 {
            let a = sample_haar_unitary(n, &mut rng_a);
            let b = sample_haar_unitary_uncorrected(n, &mut rng_b);
            for i in 0..n {
                for j in 0..n {
                    assert!((a[(i, j)] - b[(i, j)]).norm() <= 1e-14);
                }
            }
        }
    }
}

#[test]
fn corrected_sampler_has_uniform_entry_phases() {
    // A QR convention that pins diagonal phases would concentrate
    // arg(u11); under Haar both circular moments vanish. This property
    // holds regardless of the backend because of the re-phasing step.
    let mut rng = worker_rng(99, 0);
    let m = 20_000usize;
    let mut first = Complex64::new(0.0, 0.0);
    let mut second = Complex64::new(0.0, 0.0);
    for _ in 0..m {
        let u = sample_haar_unitary(2, &mut rng);
        let dir = u[(0, 0)] / u[(0, 0)].norm();
        first += dir;
        second += dir * dir;
    }
    // Each circular moment is a mean of unit vectors: stderr <= 1/sqrt(m).
    let tol = 5.0 / (m as f64).sqrt();
    assert!(first.norm() / m as f64 <= tol, "first circular moment {}", first / m as f64);
    assert!(second.norm() / m as f64 <= tol, "second circular moment {}", second / m as f64);
}

#[test]
fn trace_distribution_is_left_invariant() {
    // tr(VU) must be distributed like tr(U) for any fixed unitary V;
    // two-sample Kolmogorov-Smirnov at the 1% level.
    let n = 3usize;
    let m = 4_000usize;
    let angle = |k: u32| Complex64::from_polar(1.0, 0.7 + 1.3 * k as f64);
    let mut v = DMatrix::<Complex64>::zeros(n, n);
    // A fixed rotation mixing all coordinates with uneven phases.
    v[(0, 0)] = angle(0) * 0.6;
    v[(0, 1)] = angle(1) * 0.8;
    v[(1, 0)] = -angle(1).conj() * 0.8;
    v[(1, 1)] = angle(0).conj() * 0.6;
    v[(2, 2)] = angle(2);
    let vv = &v * v.adjoint();
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((vv[(i, j)] - Complex64::new(want, 0.0)).norm() <= 1e-12);
        }
    }
    let mut rng = worker_rng(7, 1);
    let mut xs: Vec<f64> = Vec::with_capacity(m);
    let mut ys: Vec<f64> = Vec::with_capacity(m);
    for _ in 0..m {
        let u = sample_haar_unitary(n, &mut rng);
        let w = &v * &u;
        xs.push((0..n).map(|i| w[(i, i)]).sum::<Complex64>().re);
        ys.push((0..n).map(|i| u[(i, i)]).sum::<Complex64>().re);
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut d: f64 = 0.0;
    let (mut i, mut j) = (0usize, 0usize);
    while i < m && j < m {
        if xs[i] <= ys[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 - j as f64).abs() / m as f64);
    }
    let critical = 1.628 * (2.0 / m as f64).sqrt();
    assert!(d <= critical, "KS statistic {d} above the 1% critical value {critical}");
}

#[test]
fn squared_exponential_sum_recovers_the_set_size() {
    for j in [IndexSet::full(2, 3).unwrap(), IndexSet::prime_generated(10).unwrap()] {
        let est = torus_exp_sum_squared(&j, 100_000, 31, 4);
        let want = j.len() as f64;
        assert!(est.stderr > 0.0);
        assert!(
            (est.mean - want).abs() <= 5.0 * est.stderr,
            "{}: {} vs {}",
            j.kind().descriptor(),
            est.mean,
            want
        );
    }
}

#[test]
fn worker_partition_does_not_move_the_mean() {
    let j = IndexSet::full(2, 2).unwrap();
    let a = torus_exp_sum(&j, 40_000, 5, 1);
    let b = torus_exp_sum(&j, 40_000, 5, 8);
    assert!(
        (a.mean - b.mean).abs() <= 5.0 * (a.stderr + b.stderr),
        "{} vs {}",
        a.mean,
        b.mean
    );
}

#[test]
fn trace_ratios_approach_the_gaussian_limit() {
    let limit = std::f64::consts::PI.sqrt() / 2.0;
    let mut prev = (0.0, 0.0);
    for n in [2u32, 4, 8] {
        let est = trace_class(n, 100_000, 17 + n as u64, 4);
        let ratio = est.mean / n as f64;
        let se = est.stderr / n as f64;
        assert!(
            ratio + 3.0 * (se + prev.1) >= prev.0,
            "ratio fell at n = {n}: {} vs {}",
            ratio,
            prev.0
        );
        prev = (ratio, se);
        if n == 8 {
            assert!((ratio - limit).abs() <= 0.02, "n = 8 ratio {ratio}");
        }
    }
}

#[test]
fn sphere_estimator_is_base_point_independent() {
    let n = 3u32;
    let degrees = [1u32, 2];
    let at_e1 = sphere_invariant(n, &degrees, 50_000, 11, 2);
    let mut z = vec![
        Complex64::new(0.4, 0.3),
        Complex64::new(-0.5, 0.2),
        Complex64::new(0.1, -0.2),
    ];
    let norm: f64 = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in z.iter_mut() {
        *c /= norm;
    }
    let at_z = sphere_invariant_at(n, &degrees, &z, 50_000, 13, 2);
    assert!(
        (at_e1.mean - at_z.mean).abs() <= 5.0 * (at_e1.stderr + at_z.stderr),
        "{} vs {}",
        at_e1.mean,
        at_z.mean
    );
}

#[test]
fn sphere_estimator_hits_the_closed_degree_two_value() {
    let est = sphere_invariant(2, &[2], 100_000, 23, 4);
    assert!(
        (est.mean - 1.5).abs() <= 5.0 * est.stderr,
        "{} +- {}",
        est.mean,
        est.stderr
    );
}

#[test]
fn sphere_samples_live_on_the_sphere() {
    let mut rng = worker_rng(3, 3);
    for _ in 0..100 {
        let z = sample_sphere_complex(4, &mut rng);
        let norm_sq: f64 = z.iter().map(|c| c.norm_sqr()).sum();
        assert!((norm_sq - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn dirichlet_projection_matches_closed_and_stays_under_sqrt_x() {
    let est = dirichlet_projection(2, None, 100_000, 41, 4).unwrap();
    let closed = 4.0 / std::f64::consts::PI;
    assert!(
        (est.mean - closed).abs() <= 5.0 * est.stderr,
        "{} vs {}",
        est.mean,
        closed
    );
    for x in [6u64, 12, 20] {
        let est = dirichlet_projection(x, None, 50_000, 43, 4).unwrap();
        assert!(
            est.mean <= (x as f64).sqrt() + 5.0 * est.stderr,
            "x = {x}: {} vs sqrt = {}",
            est.mean,
            (x as f64).sqrt()
        );
    }
}

#[test]
fn degree_one_torus_sum_matches_the_bessel_quadrature() {
    for n in [2usize, 4] {
        let j = IndexSet::full(1, n).unwrap();
        let est = torus_exp_sum(&j, 200_000, 53, 4);
        let closed = closedforms::proj_l1_complex(n as u32);
        assert!(
            (est.mean - closed).abs() <= 4.0 * est.stderr,
            "n = {n}: {} vs {}",
            est.mean,
            closed
        );
    }
}
