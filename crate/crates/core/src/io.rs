//! JSON instance files.
//!
//! Packing/covering instances:
//!
//! ```json
//! { "m": 2, "k": 1,
//!   "variables": [{"id": "a", "column": [[0, 0.9]]}, {"id": 7, "column": [[1, 0.4]]}],
//!   "covering": [{"coeffs": {"a": 1, "7": 1}}],
//!   "certificate": ["7"] }
//! ```
//!
//! Steiner instances, with 0-based vertices:
//!
//! ```json
//! { "vertices": 3, "edges": [[0, 1, 1.0], [1, 2, 2.5]], "bounds": [1, 2, 1],
//!   "demands": [[0, 2]] }
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ompc::{CoveringConstraint, SparsePackingSystem, VarId, VariableSet};
use crate::steiner::{DemandStream, WeightedGraph};
use crate::{Error, Result};

/// Variable names may be written as strings or integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ident {
    Number(u64),
    Text(String),
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ident::Number(n) => write!(f, "{n}"),
            Ident::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableEntry {
    pub id: Ident,
    pub column: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringEntry {
    pub coeffs: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmpcFile {
    pub m: usize,
    pub k: usize,
    pub variables: Vec<VariableEntry>,
    pub covering: Vec<CoveringEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Vec<Ident>>,
}

#[derive(Debug, Clone)]
pub struct OmpcInstance {
    pub system: SparsePackingSystem,
    pub covering: Vec<CoveringConstraint>,
    pub certificate: Option<VariableSet>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteinerFile {
    pub vertices: usize,
    pub edges: Vec<(usize, usize, f64)>,
    pub bounds: Vec<u32>,
    pub demands: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct SteinerInstance {
    pub graph: WeightedGraph,
    pub demands: DemandStream,
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, source: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        source_name: source.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn field_error(source: &str, field: String, message: impl fmt::Display) -> Error {
    Error::Parse {
        source_name: source.to_string(),
        line: 0,
        column: 0,
        message: format!("{field}: {message}"),
    }
}

impl OmpcFile {
    pub fn into_instance(self, source: &str) -> Result<OmpcInstance> {
        let mut system = SparsePackingSystem::new(self.m, self.k).map_err(|e| field_error(source, "m/k".into(), e))?;
        for (i, v) in self.variables.iter().enumerate() {
            system
                .add_variable(v.id.to_string(), &v.column)
                .map_err(|e| field_error(source, format!("variables[{i}]"), e))?;
        }
        let lookup = |field: String, name: &str| -> Result<VarId> {
            system
                .lookup(name)
                .ok_or_else(|| field_error(source, field, format!("unknown variable {name:?}")))
        };
        let mut covering = Vec::with_capacity(self.covering.len());
        for (j, c) in self.covering.iter().enumerate() {
            let coeffs = c
                .coeffs
                .iter()
                .map(|(name, &coeff)| Ok((lookup(format!("covering[{j}].coeffs"), name)?, coeff)))
                .collect::<Result<Vec<_>>>()?;
            covering.push(
                CoveringConstraint::new(coeffs).map_err(|e| field_error(source, format!("covering[{j}]"), e))?,
            );
        }
        let certificate = self
            .certificate
            .as_ref()
            .map(|ids| {
                ids.iter()
                    .map(|id| lookup("certificate".into(), &id.to_string()))
                    .collect::<Result<VariableSet>>()
            })
            .transpose()?;
        Ok(OmpcInstance {
            system,
            covering,
            certificate,
        })
    }
}

pub fn parse_ompc(text: &str, source: &str) -> Result<OmpcInstance> {
    parse_json::<OmpcFile>(text, source)?.into_instance(source)
}

impl SteinerFile {
    pub fn into_instance(self, source: &str) -> Result<SteinerInstance> {
        let graph = WeightedGraph::new(self.vertices, &self.edges, self.bounds)
            .map_err(|e| field_error(source, "edges/bounds".into(), e))?;
        let demands = DemandStream::new(&graph, &self.demands).map_err(|e| field_error(source, "demands".into(), e))?;
        Ok(SteinerInstance { graph, demands })
    }

    pub fn from_instance(graph: &WeightedGraph, demands: &DemandStream) -> Self {
        Self {
            vertices: graph.n(),
            edges: graph.edges().iter().map(|e| (e.u, e.v, e.w)).collect(),
            bounds: graph.bounds().to_vec(),
            demands: demands.pairs(),
        }
    }
}

pub fn parse_steiner(text: &str, source: &str) -> Result<SteinerInstance> {
    parse_json::<SteinerFile>(text, source)?.into_instance(source)
}

pub fn read_ompc(path: &Path) -> Result<OmpcInstance> {
    parse_ompc(&std::fs::read_to_string(path)?, &path.display().to_string())
}

pub fn read_steiner_file(path: &Path) -> Result<SteinerFile> {
    parse_json(&std::fs::read_to_string(path)?, &path.display().to_string())
}

pub fn read_steiner(path: &Path) -> Result<SteinerInstance> {
    read_steiner_file(path)?.into_instance(&path.display().to_string())
}
