//! Discrete modified Helmholtz decomposition on weighted graphs.
//!
//! Vertex functions live on vertices with measures `m_u`, edge fields on
//! oriented edges with weights `w_uv`. With `(grad f)_uv = f_v - f_u` and
//! `(div Y)_u = (1/m_u) sum_v w_uv Y_uv`, `div grad` is the weighted graph
//! Laplacian and `sum m f div Y = -sum w (grad f) Y`.

mod io;
mod kernel;

pub use io::{EdgeRecord, FieldFile, FieldRecord, GraphFile, TorusRecord};
pub use kernel::{helmholtz_decompose, helmholtz_operator, modified_helmholtz_kernel, HelmholtzDecomposition, KernelReport, DENSE_LIMIT, GAP_TOL};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    pub nx: usize,
    pub ny: usize,
    pub spacing: f64,
}

impl TorusGrid {
    /// Index of the vertex at column `i`, row `j`.
    pub fn vertex(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    /// Coordinates `(i h, j h)` of vertex `k`.
    pub fn position(&self, k: usize) -> (f64, f64) {
        ((k % self.nx) as f64 * self.spacing, (k / self.nx) as f64 * self.spacing)
    }
}

#[derive(Debug, Clone)]
pub struct FluxGraph {
    measures: Vec<f64>,
    edges: Vec<Edge>,
    torus: Option<TorusGrid>,
}

impl FluxGraph {
    /// Validates positivity, indices and connectivity. Parallel edges are
    /// allowed; self-loops are not.
    pub fn new(measures: Vec<f64>, edges: Vec<Edge>) -> Result<Self> {
        let n = measures.len();
        if n == 0 {
            return Err(Error::Graph("graph has no vertices".into()));
        }
        if let Some(u) = measures.iter().position(|&m| !(m > 0.0 && m.is_finite())) {
            return Err(Error::Graph(format!("vertex {} has non-positive measure", u + 1)));
        }
        for e in &edges {
            if e.u >= n || e.v >= n {
                return Err(Error::IndexOutOfRange {
                    index: e.u.max(e.v) + 1,
                    dim: n,
                });
            }
            if e.u == e.v {
                return Err(Error::Graph(format!("self-loop at vertex {}", e.u + 1)));
            }
            if !(e.weight > 0.0 && e.weight.is_finite()) {
                return Err(Error::Graph(format!("edge {}-{} has non-positive weight", e.u + 1, e.v + 1)));
            }
        }
        let g = Self {
            measures,
            edges,
            torus: None,
        };
        if !g.is_connected() {
            return Err(Error::Graph("graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn with_torus(mut self, torus: TorusGrid) -> Self {
        self.torus = Some(torus);
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.measures.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn torus(&self) -> Option<&TorusGrid> {
        self.torus.as_ref()
    }

    fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Values on the edges in their stored orientation; the reverse orientation
/// carries the negated value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeField {
    pub values: Vec<f64>,
}

impl EdgeField {
    pub fn zeros(g: &FluxGraph) -> Self {
        Self {
            values: vec![0.0; g.edge_count()],
        }
    }

    /// Value on edge `e` traversed from `e.u` to `e.v` (`forward`) or back.
    pub fn oriented(&self, e: usize, forward: bool) -> f64 {
        if forward {
            self.values[e]
        } else {
            -self.values[e]
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    fn check(&self, g: &FluxGraph) -> Result<()> {
        if self.values.len() != g.edge_count() {
            return Err(Error::DimensionMismatch {
                expected: g.edge_count(),
                found: self.values.len(),
            });
        }
        Ok(())
    }
}

/// Periodic 4-neighbour grid with measure `h^2` and weight `m / h^2 = 1`,
/// consistent with the flat Laplacian on `[0, nx h) x [0, ny h)`.
///
/// Each vertex owns its right and upper edge.
pub fn build_torus_grid(nx: usize, ny: usize, spacing: f64) -> Result<FluxGraph> {
    if nx < 2 || ny < 2 {
        return Err(Error::Graph(format!("torus grid needs at least 2x2 vertices, got {nx}x{ny}")));
    }
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::Graph("grid spacing must be positive".into()));
    }
    let torus = TorusGrid { nx, ny, spacing };
    let m = spacing * spacing;
    let w = m / (spacing * spacing);
    let mut edges = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let u = torus.vertex(i, j);
            edges.push(Edge {
                u,
                v: torus.vertex((i + 1) % nx, j),
                weight: w,
            });
            edges.push(Edge {
                u,
                v: torus.vertex(i, (j + 1) % ny),
                weight: w,
            });
        }
    }
    Ok(FluxGraph::new(vec![m; nx * ny], edges)?.with_torus(torus))
}

pub fn discrete_grad(g: &FluxGraph, f: &[f64]) -> Result<EdgeField> {
    if f.len() != g.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: g.vertex_count(),
            found: f.len(),
        });
    }
    Ok(EdgeField {
        values: g.edges.iter().map(|e| f[e.v] - f[e.u]).collect(),
    })
}

pub fn discrete_div(g: &FluxGraph, y: &EdgeField) -> Result<Vec<f64>> {
    y.check(g)?;
    let mut out = vec![0.0; g.vertex_count()];
    for (e, val) in g.edges.iter().zip(&y.values) {
        out[e.u] += e.weight * val;
        out[e.v] -= e.weight * val;
    }
    for (o, m) in out.iter_mut().zip(&g.measures) {
        *o /= m;
    }
    Ok(out)
}

/// Edge means `(f_u + f_v) / 2`.
pub fn edge_mean(g: &FluxGraph, f: &[f64]) -> Vec<f64> {
    g.edges.iter().map(|e| 0.5 * (f[e.u] + f[e.v])).collect()
}
