//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::f64::consts::TAU;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use solvgeo_core::beta::{beta_label, beta_properties_check, einstein_nilradical_criterion, git_estimate_sweep, weight_vectors};
use solvgeo_core::curvature::{moment_map_ricci, ric_variation_check, ricci_endomorphism, scal_variation_check};
use solvgeo_core::extension::{
    cohomo1_evolution, einstein_extension, einstein_residual, normality_check, rank_one_invariants, semidirect_metric,
    CartanSplit,
};
use solvgeo_core::helmholtz::{build_torus_grid, discrete_grad, helmholtz_decompose, EdgeField};
use solvgeo_core::lie::{catalog, is_derivation, nice_basis_report, BracketEntry, NiceReport, NiceStructure};
use solvgeo_core::soliton::{nilsoliton_flow, nilsoliton_from_nice, soliton_residual, FlowOptions};
use solvgeo_core::{Error, LieAlgebra, MetricTensor};

const SEED: u64 = 20;

struct Line {
    passed: bool,
    detail: String,
}

fn line(passed: bool, detail: String) -> Line {
    Line { passed, detail }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| scale * normal(rng))
}

fn random_metric(rng: &mut ChaCha8Rng, n: usize) -> MetricTensor {
    let b = random_matrix(rng, n, 0.5);
    MetricTensor::new(DMatrix::identity(n, n) + b.transpose() * b).unwrap()
}

fn nice(l: &LieAlgebra) -> NiceStructure {
    match nice_basis_report(l) {
        NiceReport::Nice(s) => s,
        NiceReport::NotNice(w) => panic!("{} has no nice basis: {w:?}", l.name()),
    }
}

fn nilpotent_catalog() -> Vec<LieAlgebra> {
    vec![catalog::h3(), catalog::n4(), catalog::g31iii()]
}

fn moment_map() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for l in nilpotent_catalog() {
        for _ in 0..50 {
            let h = random_metric(&mut rng, l.dim());
            let e = random_matrix(&mut rng, l.dim(), 1.0);
            let oracle = (ricci_endomorphism(&l, &h).ricci * &e).trace();
            worst = worst.max((moment_map_ricci(&l, &h, &e).unwrap() - oracle).abs());
        }
    }
    line(worst <= 1e-10, format!("max deviation {worst:.2e} (tol 1e-10)"))
}

/// A random diagonal derivation of a nice algebra: `d` projected onto the
/// orthogonal complement of the weight vectors.
fn diagonal_derivation(rng: &mut ChaCha8Rng, s: &NiceStructure) -> DMatrix<f64> {
    let w = weight_vectors(s);
    let a = DMatrix::from_fn(w.len(), s.dim, |r, c| w[r][c]);
    let d = DVector::from_fn(s.dim, |_, _| normal(rng));
    let pinv = a.clone().pseudo_inverse(1e-12).unwrap();
    DMatrix::from_diagonal(&(&d - pinv * (&a * &d)))
}

fn first_variations() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let (mut worst, mut max_dric, mut sharp) = (0.0f64, f64::NEG_INFINITY, true);
    for l in nilpotent_catalog() {
        let n = l.dim();
        let s = nice(&l);
        for k in 0..50 {
            let h = random_metric(&mut rng, n);
            let e = random_matrix(&mut rng, n, 0.5);
            worst = worst.max(scal_variation_check(&l, &h, &e).unwrap().deviation());
            // every fifth draw is a diagonal derivation on a diagonal metric
            let (h, e) = if k % 5 == 0 {
                let diag = DVector::from_fn(n, |_, _| 0.5 + rng.random::<f64>());
                (MetricTensor::new(DMatrix::from_diagonal(&diag)).unwrap(), diagonal_derivation(&mut rng, &s))
            } else {
                let sym = random_matrix(&mut rng, n, 0.5);
                (h.clone(), h.inverse() * (&sym + sym.transpose()))
            };
            let c = ric_variation_check(&l, &h, &e).unwrap();
            worst = worst.max(c.deviation());
            max_dric = max_dric.max(c.analytic);
            let zero = c.analytic.abs() <= 1e-12 * (1.0 + e.norm_squared());
            sharp &= zero == is_derivation(&l, &e).unwrap().is_derivation;
        }
    }
    line(
        worst <= 1e-6 && max_dric <= 1e-12 && sharp,
        format!("max FD deviation {worst:.2e} (tol 1e-6), max dRic {max_dric:.2e}, equality iff derivation: {sharp}"),
    )
}

fn beta_certification() -> Line {
    let (mut trace, mut identity, mut min_plus, mut ineq, mut passed) = (0.0f64, 0.0f64, f64::INFINITY, f64::INFINITY, true);
    for l in nilpotent_catalog() {
        let b = beta_label(&l, &MetricTensor::identity(l.dim())).unwrap();
        let r = beta_properties_check(&b, &l, 50, SEED);
        trace = trace.max((r.trace_beta + 1.0).abs());
        identity = identity.max(r.trace_identity_residual);
        min_plus = min_plus.min(r.beta_plus_min_eigenvalue);
        ineq = ineq.min(r.commutator_min).min(-r.derivation_trace_max);
        passed &= r.passed;
    }
    line(
        passed && trace <= 1e-14 && identity <= 1e-14 && min_plus > 0.0 && ineq >= -1e-12,
        format!("|tr b + 1| {trace:.1e}, trace identity {identity:.1e}, min eig b+ {min_plus:.3}, min inequality {ineq:.1e}"),
    )
}

fn git_estimate() -> Line {
    let mut min = f64::INFINITY;
    let mut h3_identity = None;
    for l in nilpotent_catalog() {
        let b = beta_label(&l, &MetricTensor::identity(l.dim())).unwrap();
        let s = git_estimate_sweep(&l, &b, 100, SEED).unwrap();
        min = min.min(s.min_value);
        if l.name() == "h3" {
            h3_identity = Some(s.identity);
        }
    }
    let id = h3_identity.unwrap();
    line(
        min >= -1e-10 && id.conjugate_is_derivation && id.derivation_residual <= 1e-9,
        format!(
            "min estimate {min:.2e} (>= -1e-10), h3 at q = Id: value {:.1e}, Der residual {:.1e}",
            id.value, id.derivation_residual
        ),
    )
}

fn g31iii_example() -> Line {
    let l = catalog::g31iii();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let mut worst = 0.0f64;
    let mut all = true;
    for _ in 0..10 {
        let (a, b, c): (f64, f64, f64) = (normal(&mut rng), normal(&mut rng), normal(&mut rng));
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![a, b, c, a + b, a + c, b + c, a + b + c]));
        let r = is_derivation(&l, &d).unwrap();
        worst = worst.max(r.residual);
        all &= r.is_derivation;
    }
    let verdict = einstein_nilradical_criterion(&nice(&l)).verdict;
    let flow = nilsoliton_flow(&l, &MetricTensor::identity(7), FlowOptions::default());
    let diverged = matches!(flow, Err(Error::NonConvergence { .. }));
    line(
        all && !verdict && diverged,
        format!("D_abc residual {worst:.1e}, Einstein nilradical {verdict}, flow non-convergence {diverged}"),
    )
}

/// `[e1, e2] = c e3`.
fn h3_scaled(c: f64) -> LieAlgebra {
    LieAlgebra::new("h3", 3, [BracketEntry { i: 0, j: 1, k: 2, c }]).unwrap()
}

fn extension_chain() -> Line {
    let h3 = h3_scaled((2.0f64 / 3.0).sqrt());
    let n4 = catalog::n4();
    let s = nice(&n4);
    let x = einstein_nilradical_criterion(&s).solution.unwrap();
    let n4_sol = nilsoliton_from_nice(&s, &x).unwrap();
    let cases = [(h3, MetricTensor::identity(3)), (n4, n4_sol.metric)];
    let (mut soliton, mut lambda, mut dev, mut einstein, mut ok) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, true);
    for (l, h) in &cases {
        let r = soliton_residual(l, h).unwrap();
        soliton = soliton.max(r.residual);
        lambda = lambda.max((r.lambda + 1.0).abs());
        dev = dev.max(r.beta_plus_deviation.unwrap_or(f64::INFINITY));
        let ext = einstein_extension(l, h).unwrap();
        einstein = einstein.max(einstein_residual(&ext.algebra, &ext.metric).residual);
        ok &= rank_one_invariants(&ext).passed;
    }
    line(
        soliton <= 1e-8 && lambda <= 1e-8 && dev <= 1e-8 && einstein <= 1e-8 && ok,
        format!(
            "soliton residual {soliton:.1e}, |lambda + 1| {lambda:.1e}, |D - b+| {dev:.1e}, Einstein residual {einstein:.1e}, rank-one invariants {ok}"
        ),
    )
}

fn non_normal_example() -> Line {
    let s4 = catalog::s4();
    // e1 unit and orthogonal; e2, e3 + e4, e4 orthonormal
    let p = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0]);
    let pinv = p.try_inverse().unwrap();
    let mut g = DMatrix::identity(4, 4);
    g.view_mut((1, 1), (3, 3)).copy_from(&(pinv.transpose() * pinv));
    let skewed = normality_check(&s4, &MetricTensor::new(g).unwrap(), 0).unwrap();
    let standard = normality_check(&s4, &MetricTensor::identity(4), 0).unwrap();
    line(
        !skewed.normal && standard.normal,
        format!(
            "skewed frame normal = {} (|[A, A*]| {:.3}), standard normal = {}",
            skewed.normal, skewed.commutator_norm, standard.normal
        ),
    )
}

fn cohomogeneity_one() -> Line {
    let h3 = h3_scaled((2.0f64 / 3.0).sqrt());
    let h = MetricTensor::identity(3);
    let d = einstein_extension(&h3, &h).unwrap().derivation;
    let worst = (0..=10)
        .map(|k| cohomo1_evolution(&h3, &h, &d, k as f64 / 10.0).unwrap().deviation)
        .fold(0.0, f64::max);
    line(worst <= 1e-8, format!("max |closed form - RK4| on t in [0, 1]: {worst:.1e} (tol 1e-8)"))
}

fn gradient_error(n: usize) -> f64 {
    let g = build_torus_grid(n, n, TAU / n as f64).unwrap();
    let t = *g.torus().unwrap();
    let u: Vec<f64> = (0..n * n)
        .map(|k| {
            let (x, y) = t.position(k);
            x.sin() + y.cos()
        })
        .collect();
    let d = helmholtz_decompose(&g, &discrete_grad(&g, &u).unwrap()).unwrap();
    let e: Vec<f64> = u.iter().map(|u| (-u).exp()).collect();
    let emax = e.iter().copied().fold(0.0, f64::max);
    d.v.iter()
        .zip(&e)
        .map(|(v, e)| ((v - e / emax) / (e / emax)).abs())
        .fold(0.0, f64::max)
}

fn helmholtz() -> Line {
    let n = 32;
    let g = build_torus_grid(n, n, TAU / n as f64).unwrap();
    let t = *g.torus().unwrap();
    // a generic smooth field
    let x = EdgeField {
        values: g
            .edges()
            .iter()
            .map(|e| {
                let (x0, y0) = t.position(e.u);
                0.2 * (x0 + 2.0 * y0).sin() + 0.1 * y0.cos()
            })
            .collect(),
    };
    let d = helmholtz_decompose(&g, &x).unwrap();
    let positive = d.v.iter().all(|&v| v > 0.0);
    // circulation along the rows: divergence-free
    let circ = EdgeField {
        values: g.edges().iter().enumerate().map(|(k, _)| if k % 2 == 0 { 0.7 } else { 0.0 }).collect(),
    };
    let c = helmholtz_decompose(&g, &circ).unwrap();
    let spread = c.v.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    let (e16, e32) = (gradient_error(16), gradient_error(32));
    let ratio = e16 / e32;
    line(
        d.kernel_dimension == 1
            && positive
            && d.divergence_residual <= 1e-9
            && spread <= 1e-10
            && (3.0..=5.0).contains(&ratio),
        format!(
            "kernel dim {}, v > 0 {positive}, div residual {:.1e}, circulation spread {spread:.1e}, error 16/32 {e16:.3e}/{e32:.3e} ratio {ratio:.2}",
            d.kernel_dimension, d.divergence_residual
        ),
    )
}

fn semidirect_product() -> Line {
    let split = CartanSplit::sl2();
    let s = catalog::hyperbolic_plane();
    let phi = vec![DMatrix::zeros(2, 2); 3];
    let ge = semidirect_metric(&split, &s, &MetricTensor::identity(2), &phi).unwrap();
    // span(H, E)
    let an = DMatrix::from_column_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    let (model, g) = ge.solvable_model(&split, &s, &an).unwrap();
    let e = einstein_residual(&model, &g);
    line(
        e.residual <= 1e-8 && (e.lambda_fit + 1.0).abs() <= 1e-8,
        format!("Einstein residual {:.1e}, lambda {:.12}", e.residual, e.lambda_fit),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Line, Option<Duration>); 10] = [
        ("moment-map identity", moment_map, Some(Duration::from_secs(5))),
        ("first variations", first_variations, None),
        ("beta certification", beta_certification, None),
        ("GIT estimate", git_estimate, None),
        ("g31iii example", g31iii_example, Some(Duration::from_secs(10))),
        ("nilsoliton and extension chain", extension_chain, None),
        ("non-normal example", non_normal_example, None),
        ("cohomogeneity-one ODE", cohomogeneity_one, None),
        ("Helmholtz solver", helmholtz, Some(Duration::from_secs(30))),
        ("semidirect product", semidirect_product, None),
    ];
    let mut failures = 0;
    for (k, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let r = run();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed <= l);
        let passed = r.passed && in_time;
        let budget = limit.map(|l| format!(" / {} s", l.as_secs())).unwrap_or_default();
        println!(
            "criterion {:>2} {} {name}: {} [{:.2} s{budget}]",
            k + 1,
            if passed { "PASS" } else { "FAIL" },
            r.detail,
            elapsed.as_secs_f64()
        );
        failures += usize::from(!passed);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
