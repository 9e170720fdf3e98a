//! Instance file format.
//!
//! ```json
//! {"nodes": [{"id": "Q0", "parent": null, "children": ["L1", "L2"]}, ...],
//!  "mu": {"L1": 1.0, "L2": 1.0},
//!  "nu": {"L1": 1.0, "L2": 1.0}}
//! ```
//!
//! Mass maps are written in leaf order. Floats use shortest round-trip
//! formatting, so `write_model(read_model(s))` reproduces `s` byte for byte
//! when `s` was itself produced by `write_model`.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::{build_model, BuildOptions, DyadicModel};
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: String,
    pub parent: Option<String>,
    #[serde(default)]
    pub children: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct ModelSpec {
    pub nodes: Vec<NodeSpec>,
    pub mu: IndexMap<String, f64>,
    pub nu: IndexMap<String, f64>,
}

impl DyadicModel {
    pub fn to_spec(&self) -> ModelSpec {
        let nodes = self
            .nodes()
            .iter()
            .map(|n| NodeSpec {
                id: n.id().to_string(),
                parent: n.parent().map(|p| self.nodes()[p].id().to_string()),
                children: n.children().iter().map(|&c| self.nodes()[c].id().to_string()).collect(),
            })
            .collect();
        let leaf_map = |masses: &[f64]| -> IndexMap<String, f64> {
            self.leaves()
                .iter()
                .zip(masses)
                .map(|(&l, &m)| (self.nodes()[l].id().to_string(), m))
                .collect()
        };
        ModelSpec {
            nodes,
            mu: leaf_map(self.leaf_masses(super::Measure::Mu)),
            nu: leaf_map(self.leaf_masses(super::Measure::Nu)),
        }
    }
}

pub fn read_model(text: &str, opts: BuildOptions) -> Result<DyadicModel> {
    let spec: ModelSpec = serde_json::from_str(text)?;
    build_model(&spec, opts)
}

pub fn write_model(model: &DyadicModel) -> String {
    serde_json::to_string_pretty(&model.to_spec()).expect("model specs always serialize")
}
