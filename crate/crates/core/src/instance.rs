//! Bi-valued symmetric multigraph instances.
//!
//! Vertices are agents, edges are goods. Every edge weighs either `alpha`
//! (heavy) or `beta` (light) with `alpha > beta >= 0`, and both endpoints
//! value it identically. Self-loops and parallel edges are allowed; a
//! self-loop is a good only its own vertex values.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

pub type VertexId = usize;
pub type EdgeId = usize;

/// Weight class of an edge.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeClass {
    Heavy,
    Light,
}

impl fmt::Display for EdgeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeClass::Heavy => write!(f, "heavy"),
            EdgeClass::Light => write!(f, "light"),
        }
    }
}

/// A single edge of the multigraph. `id` is its index in the instance's
/// edge list and doubles as the good's identity everywhere else.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Edge {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub class: EdgeClass,
}

impl Edge {
    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    pub fn is_heavy(&self) -> bool {
        self.class == EdgeClass::Heavy
    }

    pub fn is_incident(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }

    /// Endpoints normalized so the lower vertex comes first.
    pub fn key(&self) -> (VertexId, VertexId) {
        (self.u.min(self.v), self.u.max(self.v))
    }

    /// The endpoint opposite `x`, or `None` if `x` is not an endpoint.
    /// For a self-loop at `x` this returns `Some(x)`.
    pub fn other_endpoint(&self, x: VertexId) -> Option<VertexId> {
        if self.u == x {
            Some(self.v)
        } else if self.v == x {
            Some(self.u)
        } else {
            None
        }
    }
}

/// A maximal set of parallel edges: same unordered endpoints, possibly
/// mixed weight classes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParallelClass {
    /// Lower endpoint.
    pub lo: VertexId,
    /// Higher endpoint; equals `lo` for self-loop classes.
    pub hi: VertexId,
    /// Member edge ids in ascending order.
    pub members: Vec<EdgeId>,
    pub heavy_count: usize,
    pub light_count: usize,
}

impl ParallelClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn is_loop(&self) -> bool {
        self.lo == self.hi
    }
}

/// Validation failures when constructing an instance.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("alpha ({alpha}) must be strictly greater than beta ({beta})")]
    AlphaNotGreater { alpha: Rational, beta: Rational },
    #[error("beta ({beta}) must be nonnegative")]
    NegativeBeta { beta: Rational },
    #[error("edge {edge} touches vertex {vertex} but the instance has {vertices} vertices")]
    EndpointOutOfRange {
        edge: EdgeId,
        vertex: VertexId,
        vertices: usize,
    },
}

/// An immutable instance: vertex count, weights, and the edge list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Instance {
    alpha: Rational,
    beta: Rational,
    vertices: usize,
    edges: Vec<Edge>,
}

impl Instance {
    /// Validates weights and endpoints. Edge ids are assigned by position.
    pub fn new(
        vertices: usize,
        alpha: Rational,
        beta: Rational,
        edges: Vec<(VertexId, VertexId, EdgeClass)>,
    ) -> Result<Self, InstanceError> {
        if beta.is_negative() {
            return Err(InstanceError::NegativeBeta { beta });
        }
        if alpha <= beta {
            return Err(InstanceError::AlphaNotGreater { alpha, beta });
        }
        let edges: Vec<Edge> = edges
            .into_iter()
            .enumerate()
            .map(|(id, (u, v, class))| Edge { id, u, v, class })
            .collect();
        for e in &edges {
            for x in [e.u, e.v] {
                if x >= vertices {
                    return Err(InstanceError::EndpointOutOfRange {
                        edge: e.id,
                        vertex: x,
                        vertices,
                    });
                }
            }
        }
        Ok(Instance {
            alpha,
            beta,
            vertices,
            edges,
        })
    }

    pub fn alpha(&self) -> Rational {
        self.alpha
    }

    pub fn beta(&self) -> Rational {
        self.beta
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Panics if `id` is out of range, like slice indexing.
    pub fn edge(&self, id: EdgeId) -> &Edge {
        &self.edges[id]
    }

    /// Weight of an edge under the bi-valued scheme.
    pub fn weight(&self, id: EdgeId) -> Rational {
        match self.edges[id].class {
            EdgeClass::Heavy => self.alpha,
            EdgeClass::Light => self.beta,
        }
    }

    pub fn class_weight(&self, class: EdgeClass) -> Rational {
        match class {
            EdgeClass::Heavy => self.alpha,
            EdgeClass::Light => self.beta,
        }
    }

    /// Groups edges into parallel classes, ordered by endpoint pair.
    pub fn parallel_classes(&self) -> Vec<ParallelClass> {
        let mut map: BTreeMap<(VertexId, VertexId), ParallelClass> = BTreeMap::new();
        for e in &self.edges {
            let key = e.key();
            let entry = map.entry(key).or_insert_with(|| ParallelClass {
                lo: key.0,
                hi: key.1,
                members: Vec::new(),
                heavy_count: 0,
                light_count: 0,
            });
            entry.members.push(e.id);
            match e.class {
                EdgeClass::Heavy => entry.heavy_count += 1,
                EdgeClass::Light => entry.light_count += 1,
            }
        }
        map.into_values().collect()
    }

    /// Largest parallel class size; `0` for an edgeless instance.
    pub fn multiplicity(&self) -> usize {
        self.parallel_classes()
            .iter()
            .map(ParallelClass::size)
            .max()
            .unwrap_or(0)
    }

    /// Edge ids between the unordered pair `{i, j}` in ascending order.
    /// For `i == j` this returns the self-loops at `i`.
    pub fn edges_between(&self, i: VertexId, j: VertexId) -> Vec<EdgeId> {
        let key = (i.min(j), i.max(j));
        self.edges
            .iter()
            .filter(|e| e.key() == key)
            .map(|e| e.id)
            .collect()
    }

    /// Edge ids incident to `v` (self-loops included once), ascending.
    pub fn edges_at(&self, v: VertexId) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|e| e.is_incident(v))
            .map(|e| e.id)
            .collect()
    }

    /// Sorted, deduplicated neighbour lists; self-loops do not contribute.
    pub fn adjacency(&self) -> Vec<Vec<VertexId>> {
        let mut adj = vec![Vec::new(); self.vertices];
        for e in &self.edges {
            if !e.is_loop() {
                adj[e.u].push(e.v);
                adj[e.v].push(e.u);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Canonical JSON form: field order fixed, rationals as strings,
    /// compact separators, trailing newline left to the caller.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(&InstanceJson::from(self)).expect("instance serialization")
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceJsonError> {
        let raw: InstanceJson = serde_json::from_str(text)?;
        raw.try_into().map_err(InstanceJsonError::Invalid)
    }
}

/// Errors surfaced when reading an instance from JSON.
#[derive(Debug, thiserror::Error)]
pub enum InstanceJsonError {
    #[error("malformed instance JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(InstanceError),
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    u: VertexId,
    v: VertexId,
    w: EdgeClass,
}

#[derive(Serialize, Deserialize)]
struct InstanceJson {
    alpha: Rational,
    beta: Rational,
    vertices: usize,
    edges: Vec<EdgeJson>,
}

impl From<&Instance> for InstanceJson {
    fn from(inst: &Instance) -> Self {
        InstanceJson {
            alpha: inst.alpha,
            beta: inst.beta,
            vertices: inst.vertices,
            edges: inst
                .edges
                .iter()
                .map(|e| EdgeJson {
                    u: e.u,
                    v: e.v,
                    w: e.class,
                })
                .collect(),
        }
    }
}

impl TryFrom<InstanceJson> for Instance {
    type Error = InstanceError;

    fn try_from(raw: InstanceJson) -> Result<Self, InstanceError> {
        Instance::new(
            raw.vertices,
            raw.alpha,
            raw.beta,
            raw.edges.into_iter().map(|e| (e.u, e.v, e.w)).collect(),
        )
    }
}
