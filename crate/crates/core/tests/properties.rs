use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use solvgeo_core::curvature::{moment_map_ricci, ricci_endomorphism, ricci_via_killing};
use solvgeo_core::extension::{cohomo1_evolution, einstein_extension, normality_check};
use solvgeo_core::helmholtz::{discrete_div, discrete_grad, helmholtz_decompose, Edge, EdgeField, FluxGraph};
use solvgeo_core::lie::catalog;
use solvgeo_core::soliton::soliton_residual;
use solvgeo_core::{LieAlgebra, MetricTensor};

fn matrix(n: usize, scale: f64) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-1.0..1.0f64, n * n).prop_map(move |v| DMatrix::from_vec(n, n, v) * scale)
}

fn metric(n: usize) -> impl Strategy<Value = MetricTensor> {
    matrix(n, 0.7).prop_map(move |b| MetricTensor::new(DMatrix::identity(n, n) + b.transpose() * b).unwrap())
}

fn nilpotent() -> impl Strategy<Value = LieAlgebra> {
    prop_oneof![Just(catalog::h3()), Just(catalog::n4()), Just(catalog::g31iii())]
}

fn with_metric() -> impl Strategy<Value = (LieAlgebra, MetricTensor)> {
    nilpotent().prop_flat_map(|l| {
        let n = l.dim();
        (Just(l), metric(n))
    })
}

/// An invertible matrix close to the identity.
fn invertible(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    matrix(n, 0.25).prop_map(move |m| DMatrix::identity(n, n) + m)
}

/// A connected graph: a random spanning path plus extra edges.
fn graph() -> impl Strategy<Value = FluxGraph> {
    (3usize..12).prop_flat_map(|n| {
        (
            prop::collection::vec(0.2..3.0f64, n),
            prop::collection::vec(0.2..3.0f64, n - 1),
            prop::collection::vec((0..n, 0..n, 0.2..3.0f64), 0..2 * n),
        )
            .prop_map(move |(measures, path, extra)| {
                let mut edges: Vec<Edge> = path
                    .iter()
                    .enumerate()
                    .map(|(k, &weight)| Edge { u: k, v: k + 1, weight })
                    .collect();
                edges.extend(extra.into_iter().filter(|(u, v, _)| u != v).map(|(u, v, weight)| Edge { u, v, weight }));
                FluxGraph::new(measures, edges).unwrap()
            })
    })
}

fn graph_with_field() -> impl Strategy<Value = (FluxGraph, Vec<f64>, EdgeField)> {
    graph().prop_flat_map(|g| {
        let (n, m) = (g.vertex_count(), g.edge_count());
        (
            Just(g),
            prop::collection::vec(-2.0..2.0f64, n),
            prop::collection::vec(-1.0..1.0f64, m).prop_map(|values| EdgeField { values }),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ricci_is_self_adjoint_with_trace_scal((l, h) in with_metric()) {
        let r = ricci_endomorphism(&l, &h);
        prop_assert!(r.self_adjoint_residual <= 1e-10 * (1.0 + r.ricci.amax()));
        prop_assert!((r.ricci.trace() - r.scal).abs() <= 1e-10 * (1.0 + r.scal.abs()));
        let k = ricci_via_killing(&l, &h);
        prop_assert!((k - &r.ricci_form).amax() <= 1e-10 * (1.0 + r.ricci_form.amax()));
    }

    #[test]
    fn ricci_scales_inversely((l, h) in with_metric(), c in 0.2..5.0f64) {
        let r = ricci_endomorphism(&l, &h).ricci;
        let rc = ricci_endomorphism(&l, &h.scaled(c).unwrap()).ricci;
        prop_assert!((rc * c - &r).amax() <= 1e-10 * (1.0 + r.amax()));
    }

    #[test]
    fn curvature_is_equivariant((l, h) in with_metric(), q in invertible(3)) {
        // extend q to the whole algebra by the identity
        let n = l.dim();
        let mut big = DMatrix::identity(n, n);
        big.view_mut((0, 0), (3, 3)).copy_from(&q);
        let moved = LieAlgebra::from_tensor("moved", &l.structure().act(&big)).unwrap();
        let r = ricci_endomorphism(&l, &h);
        let rq = ricci_endomorphism(&moved, &h.act(&big).unwrap());
        let qinv = big.clone().try_inverse().unwrap();
        prop_assert!((&rq.ricci - &big * &r.ricci * qinv).amax() <= 1e-9 * (1.0 + r.ricci.amax()));
        prop_assert!((rq.scal - r.scal).abs() <= 1e-9 * (1.0 + r.scal.abs()));
    }

    #[test]
    fn moment_map_vanishes_on_skew_endomorphisms((l, h) in with_metric(), seed in matrix(7, 1.0)) {
        let n = l.dim();
        let e = seed.view((0, 0), (n, n)).into_owned();
        let skew = (&e - h.adjoint(&e)) * 0.5;
        prop_assert!(moment_map_ricci(&l, &h, &skew).unwrap().abs() <= 1e-10 * (1.0 + e.norm_squared()));
    }

    #[test]
    fn soliton_residual_is_scale_invariant(c in 0.2..5.0f64) {
        let l = catalog::n4();
        let h = MetricTensor::identity(4).scaled(c).unwrap();
        let r = soliton_residual(&l, &h).unwrap();
        prop_assert!(r.is_soliton);
        prop_assert!((r.lambda * c + 1.5).abs() <= 1e-12);
    }

    #[test]
    fn normality_is_invariant_under_isometry(r in invertible(3), skewed in any::<bool>()) {
        let s4 = catalog::s4();
        let g = if skewed {
            let p = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0]);
            let pinv = p.try_inverse().unwrap();
            let mut g = DMatrix::identity(4, 4);
            g.view_mut((1, 1), (3, 3)).copy_from(&(pinv.transpose() * pinv));
            MetricTensor::new(g).unwrap()
        } else {
            MetricTensor::identity(4)
        };
        let mut q = DMatrix::identity(4, 4);
        q.view_mut((1, 1), (3, 3)).copy_from(&r);
        let moved = LieAlgebra::from_tensor("moved", &s4.structure().act(&q))
            .unwrap()
            .with_nilradical(vec![1, 2, 3])
            .unwrap();
        let a = normality_check(&s4, &g, 0).unwrap();
        let b = normality_check(&moved, &g.act(&q).unwrap(), 0).unwrap();
        prop_assert_eq!(a.normal, b.normal);
        prop_assert!((a.commutator_norm - b.commutator_norm).abs() <= 1e-9 * (1.0 + a.commutator_norm));
    }

    #[test]
    fn normality_is_invariant_under_orthogonal_frames(angle in 0.0..std::f64::consts::TAU) {
        let s4 = catalog::s4();
        let (c, s) = (angle.cos(), angle.sin());
        let mut q = DMatrix::identity(4, 4);
        q.view_mut((1, 1), (2, 2)).copy_from(&DMatrix::from_row_slice(2, 2, &[c, -s, s, c]));
        let moved = LieAlgebra::from_tensor("rotated", &s4.structure().act(&q))
            .unwrap()
            .with_nilradical(vec![1, 2, 3])
            .unwrap();
        // q is orthogonal, so the identity metric is carried to itself
        let r = normality_check(&moved, &MetricTensor::identity(4), 0).unwrap();
        prop_assert!(r.normal);
    }

    #[test]
    fn cohomogeneity_one_group_law(t in 0.0..1.0f64, s in 0.0..1.0f64) {
        let l = catalog::h3();
        let h = MetricTensor::identity(3).scaled(1.5).unwrap();
        let d = einstein_extension(&l, &h).unwrap().derivation;
        let direct = cohomo1_evolution(&l, &h, &d, t + s).unwrap().closed_form;
        let mid = MetricTensor::new(cohomo1_evolution(&l, &h, &d, t).unwrap().closed_form).unwrap();
        let composed = cohomo1_evolution(&l, &mid, &d, s).unwrap().closed_form;
        prop_assert!((&direct - composed).amax() <= 1e-10 * direct.amax());
    }

    #[test]
    fn grad_and_div_are_adjoint((g, f, y) in graph_with_field()) {
        let div = discrete_div(&g, &y).unwrap();
        let grad = discrete_grad(&g, &f).unwrap();
        let lhs: f64 = g.measures().iter().zip(&f).zip(&div).map(|((m, f), d)| m * f * d).sum();
        let rhs: f64 = g.edges().iter().zip(&grad.values).zip(&y.values).map(|((e, gf), y)| e.weight * gf * y).sum();
        prop_assert!((lhs + rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn helmholtz_kernel_is_positive_and_flux_is_divergence_free((g, _, y) in graph_with_field()) {
        let d = helmholtz_decompose(&g, &y).unwrap();
        prop_assert_eq!(d.kernel_dimension, 1);
        prop_assert!(d.v.iter().all(|&v| v > 0.0));
        prop_assert!(d.divergence_residual <= 1e-9);
        prop_assert!((d.v.iter().copied().fold(0.0, f64::max) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn path_kernel_matches_closed_form(u in prop::collection::vec(-1.0..1.0f64, 2..9)) {
        // on a tree the kernel has the closed form prod (1 - x/2) / (1 + x/2)
        let n = u.len();
        let edges = (0..n - 1).map(|k| Edge { u: k, v: k + 1, weight: 1.0 }).collect();
        let g = FluxGraph::new(vec![1.0; n], edges).unwrap();
        let x = discrete_grad(&g, &u).unwrap();
        let d = helmholtz_decompose(&g, &x).unwrap();
        let mut v = DVector::from_element(n, 1.0);
        for k in 1..n {
            let xk = x.values[k - 1];
            v[k] = v[k - 1] * (1.0 - xk / 2.0) / (1.0 + xk / 2.0);
        }
        v /= v.amax();
        for k in 0..n {
            prop_assert!((d.v[k] - v[k]).abs() <= 1e-10);
        }
    }
}
