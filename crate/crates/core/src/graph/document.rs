//! JSON graph documents.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Graph, GraphError, WeightSystem};
use crate::rational::{fmt_q, parse_q, FloatPolicy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: String,
    pub src: String,
    pub rng: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<serde_json::Value>,
}

impl GraphDocument {
    pub fn from_json(text: &str) -> Result<GraphDocument, GraphError> {
        serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))
    }

    /// Validates the document; weights are returned only when every edge has one.
    pub fn load(&self, policy: FloatPolicy) -> Result<(Graph, Option<WeightSystem>), GraphError> {
        let triples: Vec<(&str, &str, &str)> =
            self.edges.iter().map(|e| (e.id.as_str(), e.src.as_str(), e.rng.as_str())).collect();
        let g = Graph::new(&self.vertices, &triples)?;
        let given = self.edges.iter().filter(|e| e.lambda.is_some()).count();
        if given == 0 {
            return Ok((g, None));
        }
        if let Some(missing) = self.edges.iter().find(|e| e.lambda.is_none()) {
            return Err(GraphError::PartialWeights(missing.id.clone()));
        }
        let mut named = BTreeMap::new();
        for e in &self.edges {
            let text = match e.lambda.as_ref().unwrap() {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Number(n) => n.to_string(),
                other => return Err(GraphError::Malformed(format!("lambda of {:?} is {other}", e.id))),
            };
            let value =
                parse_q(&text, policy).map_err(|source| GraphError::BadWeight { edge: e.id.clone(), source })?;
            named.insert(e.id.clone(), value);
        }
        let w = WeightSystem::from_named(&g, &named)?;
        Ok((g, Some(w)))
    }

    pub fn from_graph(g: &Graph, w: Option<&WeightSystem>) -> GraphDocument {
        GraphDocument {
            vertices: g.vertices().map(|v| g.vertex_name(v).to_string()).collect(),
            edges: g
                .edges()
                .map(|e| EdgeDoc {
                    id: g.edge_name(e).into(),
                    src: g.vertex_name(g.source(e)).into(),
                    rng: g.vertex_name(g.range(e)).into(),
                    lambda: w.map(|w| serde_json::Value::String(fmt_q(w.get(e)))),
                })
                .collect(),
        }
    }
}
