use serde_json::{json, Value};
use solvgeo_core::beta::{beta_label, beta_properties_check, einstein_nilradical_criterion, git_estimate_sweep};
use solvgeo_core::curvature::{ricci_endomorphism, ricci_via_killing};
use solvgeo_core::extension::{
    cohomo1_evolution, einstein_extension, einstein_residual, normality_check, rank_one_invariants,
};
use solvgeo_core::helmholtz::{helmholtz_decompose, FieldFile, GraphFile};
use solvgeo_core::lie::catalog::{algebra_to_json, AlgebraFile};
use solvgeo_core::lie::{nice_basis_report, NiceReport, NiceStructure};
use solvgeo_core::metric::MetricFile;
use solvgeo_core::soliton::{nilsoliton_flow, nilsoliton_from_nice, soliton_residual, FlowOptions};
use solvgeo_core::{Error, LieAlgebra, MetricTensor};

use crate::report::{exact_list, exact_matrix, matrix, vector, Outcome};

/// Options shared by all commands.
#[derive(Debug, Clone)]
pub struct Settings {
    pub seed: u64,
    pub tol: Option<f64>,
    pub flow: bool,
    pub exact: bool,
}

/// Failure carrying the process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure {
            code: exit_code(&error),
            error,
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::IndexOutOfRange { .. }
        | Error::DuplicateEntry { .. }
        | Error::DimensionMismatch { .. }
        | Error::NotSymmetric(_)
        | Error::NotPositiveDefinite
        | Error::Graph(_) => 3,
        Error::NonConvergence { .. } | Error::Solver(_) => 2,
        _ => 1,
    }
}

const RANDOM_SAMPLES: usize = 50;
const GIT_SAMPLES: usize = 100;
const KILLING_TOL: f64 = 1e-9;
const EINSTEIN_TOL: f64 = 1e-8;
const ODE_TOL: f64 = 1e-8;

fn nice_structure(l: &LieAlgebra) -> Result<NiceStructure, Error> {
    match nice_basis_report(l) {
        NiceReport::Nice(s) => Ok(s),
        NiceReport::NotNice(w) => Err(Error::NotNice(format!("{w:?}"))),
    }
}

pub fn validate(l: &LieAlgebra) -> Outcome {
    let jacobi = l.validate_jacobi();
    let series = l.lower_central_series();
    let nice = match nice_basis_report(l) {
        NiceReport::Nice(s) => json!({"nice": true, "triples": s.triples.len()}),
        NiceReport::NotNice(w) => json!({"nice": false, "witness": format!("{w:?}")}),
    };
    let result = json!({
        "name": l.name(),
        "dim": l.dim(),
        "brackets": l.entries().len(),
        "rational": l.is_rational(),
        "central_series": series.dimensions,
        "nilpotent": series.nilpotent,
        "unimodular": l.is_unimodular(),
        "nilradical": l.nilradical().map(|n| n.iter().map(|i| i + 1).collect::<Vec<_>>()),
        "violating_triple": jacobi.violating_triple.map(|(a, b, c)| [a + 1, b + 1, c + 1]),
        "basis": nice,
    });
    let mut out = Outcome::new(result)
        .residual("jacobi", jacobi.max_residual)
        .flag("jacobi", jacobi.passed);
    out.exit = if jacobi.passed { 0 } else { 1 };
    out
}

pub fn ricci(l: &LieAlgebra, h: &MetricTensor, s: &Settings) -> Outcome {
    let r = ricci_endomorphism(l, h);
    let killing = ricci_via_killing(l, h);
    let deviation = (&killing - &r.ricci_form).amax();
    let scale = 1.0 + r.ricci_form.amax();
    let mut result = json!({
        "ricci": matrix(&r.ricci),
        "ricci_form": matrix(&r.ricci_form),
        "scal": r.scal,
        "mean_curvature": vector(&r.mean_curvature),
    });
    if s.exact {
        result["ricci_exact"] = exact_matrix(&r.ricci);
        result["scal_exact"] = json!(solvgeo_core::rational::format_exact(r.scal));
    }
    Outcome::new(result)
        .residual("self_adjoint", r.self_adjoint_residual)
        .residual("killing_deviation", deviation)
        .flag("killing_agrees", deviation <= KILLING_TOL * scale)
}

pub fn beta(l: &LieAlgebra, h: &MetricTensor, s: &Settings) -> Result<Outcome, Error> {
    let b = beta_label(l, h)?;
    let props = beta_properties_check(&b, l, RANDOM_SAMPLES, s.seed);
    let git = git_estimate_sweep(l, &b, GIT_SAMPLES, s.seed)?;
    let diag: Vec<f64> = b.beta.diagonal().iter().copied().collect();
    let plus: Vec<f64> = b.beta_plus.diagonal().iter().copied().collect();
    let mut result = json!({
        "beta": diag,
        "beta_plus": plus,
        "eigenvalues": b.eigenvalues,
        "weights": b.weights,
        "trace_beta": b.trace(),
        "abelian": b.abelian,
        "properties": props,
        "git_min": git.min_value,
        "git_identity": git.identity.value,
        "git_identity_in_der": git.identity.conjugate_is_derivation,
    });
    if s.exact || l.is_rational() {
        result["beta_exact"] = exact_list(&diag);
        result["beta_plus_exact"] = exact_list(&plus);
        result["eigenvalues_exact"] = exact_list(&b.eigenvalues);
    }
    Ok(Outcome::new(result)
        .residual("kkt", b.kkt_residual)
        .residual("trace_identity", props.trace_identity_residual)
        .flag("beta_properties", props.passed)
        .flag("git_estimate", git.passed))
}

pub fn einstein_nilradical(l: &LieAlgebra) -> Result<Outcome, Error> {
    let nice = nice_structure(l)?;
    let v = einstein_nilradical_criterion(&nice);
    let result = json!({
        "verdict": v.verdict,
        "degenerate": v.degenerate,
        "margin": if v.margin.is_finite() { json!(v.margin) } else { Value::Null },
        "solution": v.solution,
        "gram": matrix(&v.gram),
    });
    Ok(Outcome::new(result)
        .residual("gram_system", v.residual)
        .flag("einstein_nilradical", v.verdict))
}

/// A nilsoliton metric on `l`, scaled so that `lambda = -1`.
struct Found {
    metric: MetricTensor,
    details: Value,
}

fn find_nilsoliton(l: &LieAlgebra, h0: &MetricTensor, s: &Settings) -> Result<Found, Error> {
    if l.is_abelian() {
        return Ok(Found {
            metric: MetricTensor::identity(l.dim()),
            details: json!({"method": "abelian"}),
        });
    }
    if s.flow {
        let mut opts = FlowOptions::default();
        if let Some(t) = s.tol {
            opts.tol = t;
        }
        let r = nilsoliton_flow(l, h0, opts)?;
        let metric = r.metric.scaled(r.report.lambda.abs())?;
        return Ok(Found {
            metric,
            details: json!({"method": "flow", "iterations": r.iterations, "functional": r.functional.last()}),
        });
    }
    let nice = nice_structure(l)?;
    let v = einstein_nilradical_criterion(&nice);
    let x = match (&v.solution, v.verdict) {
        (Some(x), true) => x.clone(),
        _ => {
            return Err(Error::NoNilsoliton(format!(
                "no positive solution of U x = 1 (margin {:e})",
                v.margin
            )))
        }
    };
    let sol = nilsoliton_from_nice(&nice, &x)?;
    Ok(Found {
        metric: sol.metric.clone(),
        details: json!({"method": "nice", "scaling": sol.scaling, "constants": sol.constants, "x": x}),
    })
}

pub fn nilsoliton(l: &LieAlgebra, h0: &MetricTensor, s: &Settings) -> Result<Outcome, Error> {
    let found = find_nilsoliton(l, h0, s)?;
    let r = soliton_residual(l, &found.metric)?;
    let mut result = json!({
        "metric": matrix(found.metric.matrix()),
        "lambda": r.lambda,
        "derivation": matrix(&r.derivation),
        "beta_plus_deviation": r.beta_plus_deviation,
        "construction": found.details,
    });
    if s.exact {
        result["metric_exact"] = exact_matrix(found.metric.matrix());
        result["derivation_exact"] = exact_matrix(&r.derivation);
    }
    let mut out = Outcome::new(result)
        .residual("soliton", r.residual)
        .residual("soliton_normalized", r.normalized_residual)
        .flag("nilsoliton", r.is_soliton);
    out.artifact = Some(serde_json::to_string_pretty(&MetricFile::from_metric(Some(l.name()), &found.metric))?);
    out.exit = if r.is_soliton { 0 } else { 1 };
    Ok(out)
}

/// The base metric: a given nilsoliton rescaled to `lambda = -1`, or one
/// constructed by the selected method.
fn extension_base(l: &LieAlgebra, h: Option<&MetricTensor>, s: &Settings) -> Result<MetricTensor, Error> {
    match h {
        Some(h) if !l.is_abelian() => {
            let r = soliton_residual(l, h)?;
            if !r.is_soliton || r.lambda >= 0.0 {
                return Err(Error::NotNormalizedSoliton {
                    lambda: r.lambda,
                    residual: r.normalized_residual,
                });
            }
            h.scaled(r.lambda.abs())
        }
        Some(h) => Ok(h.clone()),
        None => Ok(find_nilsoliton(l, &MetricTensor::identity(l.dim()), s)?.metric),
    }
}

pub fn extend(l: &LieAlgebra, h: Option<&MetricTensor>, s: &Settings) -> Result<Outcome, Failure> {
    // Without a nilsoliton base there is nothing to extend; this is reported
    // like a failed invariant.
    let base = extension_base(l, h, s).map_err(|error| Failure { code: 2, error })?;
    let x = einstein_extension(l, &base).map_err(|error| Failure { code: 2, error })?;
    let e = einstein_residual(&x.algebra, &x.metric);
    let inv = rank_one_invariants(&x);
    let normal = normality_check(&x.algebra, &x.metric, x.xi())?;
    let ode = cohomo1_evolution(l, &base, &x.derivation, 1.0)?;
    let algebra: AlgebraFile = serde_json::from_str(&algebra_to_json(&x.algebra)).map_err(Error::from)?;
    let n = l.dim();
    let result = json!({
        "algebra": algebra,
        "metric": matrix(x.metric.matrix()),
        "base_metric": matrix(base.matrix()),
        "derivation": matrix(&x.derivation),
        "beta_plus": matrix(&x.beta_plus),
        "alpha": x.alpha,
        "lambda_fit": e.lambda_fit,
        "mean_curvature_norm_sq": inv.mean_curvature_norm_sq,
        "trace_beta_plus": inv.trace_beta_plus,
        "sigma_plus": inv.sigma_plus,
        "fiber_scal_plus_dim": inv.fiber_scal + n as f64,
    });
    let mut out = Outcome::new(result)
        .residual("einstein", e.residual)
        .residual("fiber_ricci", inv.fiber_ricci_residual)
        .residual("shape_operator", inv.shape_residual)
        .residual("killing_shape", inv.killing_residual)
        .residual("estimate", inv.estimate_residual)
        .residual("normality", normal.commutator_norm)
        .residual("ode", ode.deviation)
        .flag("einstein", e.residual <= EINSTEIN_TOL)
        .flag("fiber_ricci", inv.fiber_ricci_passed)
        .flag("shape_operator", inv.shape_passed)
        .flag("mean_curvature_norm", inv.norm_passed)
        .flag("estimate_equality", inv.estimate_passed)
        .flag("normal", normal.normal)
        .flag("ode", ode.deviation <= ODE_TOL);
    out.exit = if out.flags.values().all(|&f| f) { 0 } else { 2 };
    out.artifact = Some(algebra_to_json(&x.algebra));
    Ok(out)
}

pub fn helmholtz(graph: &str, field: &str) -> Result<Outcome, Error> {
    let g = GraphFile::parse(graph)?.to_graph()?;
    let x = FieldFile::parse(field)?.to_field(&g)?;
    let d = helmholtz_decompose(&g, &x)?;
    let min_v = d.v.iter().copied().fold(f64::INFINITY, f64::min);
    let result = json!({
        "v": d.v,
        "x0": FieldFile::from_field(&g, &d.x0),
        "kernel_dimension": d.kernel_dimension,
        "singular_gap": d.singular_gap,
    });
    let mut out = Outcome::new(result)
        .residual("solver", d.solver_residual)
        .residual("divergence", d.divergence_residual)
        .flag("kernel_simple", d.kernel_dimension == 1)
        .flag("positive", min_v > 0.0)
        .flag("divergence_free", d.divergence_residual <= 1e-9);
    out.exit = if out.flags.values().all(|&f| f) { 0 } else { 1 };
    Ok(out)
}

pub fn catalog_list(entries: &[(String, String)]) -> Result<Outcome, Error> {
    let mut rows = Vec::new();
    for (file, text) in entries {
        let l = solvgeo_core::lie::catalog::parse_algebra(text)?;
        rows.push(json!({"file": file, "name": l.name(), "dim": l.dim(), "nilpotent": l.is_nilpotent()}));
    }
    Ok(Outcome::new(json!({ "algebras": rows })))
}

pub fn catalog_show(l: &LieAlgebra) -> Result<Outcome, Error> {
    let file: AlgebraFile = serde_json::from_str(&algebra_to_json(l))?;
    let mut out = Outcome::new(json!({ "algebra": file }));
    out.artifact = Some(algebra_to_json(l));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Parse("x".into())), 3);
        assert_eq!(exit_code(&Error::NonConvergence { iterations: 1, residual: 1.0 }), 2);
        assert_eq!(exit_code(&Error::NotNilpotent("x".into())), 1);
    }

    #[test]
    fn extension_base_rescales_or_rejects() {
        let s = Settings { seed: 0, tol: None, flow: false, exact: false };
        let n4 = solvgeo_core::lie::catalog::n4();
        let h = extension_base(&n4, Some(&MetricTensor::identity(4)), &s).unwrap();
        assert!((soliton_residual(&n4, &h).unwrap().lambda + 1.0).abs() < 1e-12);
        let g = solvgeo_core::lie::catalog::g31iii();
        let id = MetricTensor::identity(g.dim());
        assert!(extension_base(&g, Some(&id), &s).is_err());
        assert!(extension_base(&g, None, &s).is_err());
    }
}
