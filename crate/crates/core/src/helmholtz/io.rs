//! JSON files for graphs and edge fields. Vertices are numbered from 1.
//!
//! Graph: `{"measures": [..], "edges": [{"u": 1, "v": 2, "weight": 1.0}, ..],
//! "torus": {"nx": .., "ny": .., "spacing": ..}}` with `torus` optional.
//! Field: `{"edges": [{"u": 1, "v": 2, "value": 0.5}, ..]}`; each graph edge
//! appears once, in either orientation.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Edge, EdgeField, FluxGraph, TorusGrid};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TorusRecord {
    pub nx: usize,
    pub ny: usize,
    pub spacing: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub measures: Vec<f64>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub torus: Option<TorusRecord>,
}

fn zero_based(i: usize) -> Result<usize> {
    i.checked_sub(1)
        .ok_or_else(|| Error::Parse("vertex indices start at 1".into()))
}

impl GraphFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_graph(&self) -> Result<FluxGraph> {
        let edges = self
            .edges
            .iter()
            .map(|e| {
                Ok(Edge {
                    u: zero_based(e.u)?,
                    v: zero_based(e.v)?,
                    weight: e.weight,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let g = FluxGraph::new(self.measures.clone(), edges)?;
        Ok(match self.torus {
            Some(t) => g.with_torus(TorusGrid {
                nx: t.nx,
                ny: t.ny,
                spacing: t.spacing,
            }),
            None => g,
        })
    }

    pub fn from_graph(g: &FluxGraph) -> Self {
        Self {
            measures: g.measures().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeRecord {
                    u: e.u + 1,
                    v: e.v + 1,
                    weight: e.weight,
                })
                .collect(),
            torus: g.torus().map(|t| TorusRecord {
                nx: t.nx,
                ny: t.ny,
                spacing: t.spacing,
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldRecord {
    pub u: usize,
    pub v: usize,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldFile {
    pub edges: Vec<FieldRecord>,
}

impl FieldFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Matches records to graph edges. Parallel edges are matched in order,
    /// records in stored orientation first.
    pub fn to_field(&self, g: &FluxGraph) -> Result<EdgeField> {
        let mut slots: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (k, e) in g.edges().iter().enumerate().rev() {
            slots.entry((e.u, e.v)).or_default().push(k);
        }
        let mut values = vec![None; g.edge_count()];
        let mut reversed = Vec::new();
        for r in &self.edges {
            let (u, v) = (zero_based(r.u)?, zero_based(r.v)?);
            match slots.get_mut(&(u, v)).and_then(Vec::pop) {
                Some(k) => values[k] = Some(r.value),
                None => reversed.push(r),
            }
        }
        for r in reversed {
            let (u, v) = (r.u - 1, r.v - 1);
            let k = slots
                .get_mut(&(v, u))
                .and_then(Vec::pop)
                .ok_or_else(|| Error::Parse(format!("field value on {}-{} matches no unused graph edge", r.u, r.v)))?;
            values[k] = Some(-r.value);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(k, v)| {
                v.ok_or_else(|| {
                    let e = g.edges()[k];
                    Error::Parse(format!("field has no value on edge {}-{}", e.u + 1, e.v + 1))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(EdgeField { values })
    }

    pub fn from_field(g: &FluxGraph, x: &EdgeField) -> Self {
        Self {
            edges: g
                .edges()
                .iter()
                .zip(&x.values)
                .map(|(e, &value)| FieldRecord {
                    u: e.u + 1,
                    v: e.v + 1,
                    value,
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::helmholtz::build_torus_grid;

    #[test]
    fn round_trip_and_reversed_orientation() {
        let g = build_torus_grid(3, 3, 0.5).unwrap();
        let text = serde_json::to_string(&GraphFile::from_graph(&g)).unwrap();
        let g2 = GraphFile::parse(&text).unwrap().to_graph().unwrap();
        assert_eq!(g2.edges(), g.edges());
        assert_eq!(g2.torus(), g.torus());

        let mut f = FieldFile::from_field(&g, &EdgeField { values: (0..18).map(f64::from).collect() });
        let r = &mut f.edges[3];
        (r.u, r.v, r.value) = (r.v, r.u, -r.value);
        let x = f.to_field(&g).unwrap();
        assert_eq!(x.values[3], 3.0);
        f.edges.pop();
        assert!(f.to_field(&g).is_err());
    }

    #[test]
    fn rejects_zero_index() {
        let text = r#"{"measures": [1, 1], "edges": [{"u": 0, "v": 1, "weight": 1}]}"#;
        assert!(matches!(GraphFile::parse(text).unwrap().to_graph(), Err(Error::Parse(_))));
    }
}
