//! Orientations assign each edge to one of its endpoints (the owner).
//!
//! A partial orientation leaves some edges unassigned; unassigned goods
//! belong to nobody and contribute to no one's utility. The solver builds
//! orientations incrementally, so partiality is first-class here.

use serde::{Deserialize, Serialize};

use crate::instance::{EdgeId, Instance, VertexId};
use crate::rational::Rational;

/// Assignment of edges to owning endpoints, indexed by edge id.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PartialOrientation {
    owners: Vec<Option<VertexId>>,
}

/// Failures when assigning an edge.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrientationError {
    #[error("edge {edge} is not incident to vertex {vertex}")]
    NotAnEndpoint { edge: EdgeId, vertex: VertexId },
    #[error("edge {edge} is already oriented toward {owner}")]
    AlreadyOriented { edge: EdgeId, owner: VertexId },
    #[error("orientation has {got} entries but the instance has {expected} edges")]
    LengthMismatch { got: usize, expected: usize },
}

impl PartialOrientation {
    /// A fully unoriented orientation for `edge_count` edges.
    pub fn empty(edge_count: usize) -> Self {
        PartialOrientation {
            owners: vec![None; edge_count],
        }
    }

    pub fn len(&self) -> usize {
        self.owners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owners.is_empty()
    }

    pub fn owner(&self, e: EdgeId) -> Option<VertexId> {
        self.owners[e]
    }

    pub fn owners(&self) -> &[Option<VertexId>] {
        &self.owners
    }

    /// Orients `e` toward `owner`. Rejects non-endpoints and re-orientation;
    /// the solver never legitimately reassigns an edge.
    pub fn assign(
        &mut self,
        inst: &Instance,
        e: EdgeId,
        owner: VertexId,
    ) -> Result<(), OrientationError> {
        let edge = inst.edge(e);
        if !edge.is_incident(owner) {
            return Err(OrientationError::NotAnEndpoint {
                edge: e,
                vertex: owner,
            });
        }
        if let Some(existing) = self.owners[e] {
            return Err(OrientationError::AlreadyOriented {
                edge: e,
                owner: existing,
            });
        }
        self.owners[e] = Some(owner);
        Ok(())
    }

    /// Reverts an edge to unoriented. Backtracking search support; not part
    /// of the public orientation contract, which only grows.
    pub(crate) fn clear(&mut self, e: EdgeId) {
        self.owners[e] = None;
    }

    pub fn is_complete(&self) -> bool {
        self.owners.iter().all(Option::is_some)
    }

    pub fn unoriented(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.owners
            .iter()
            .enumerate()
            .filter(|(_, o)| o.is_none())
            .map(|(e, _)| e)
    }

    /// Edge ids owned by `i`, ascending.
    pub fn bundle(&self, i: VertexId) -> Vec<EdgeId> {
        self.owners
            .iter()
            .enumerate()
            .filter(|(_, o)| **o == Some(i))
            .map(|(e, _)| e)
            .collect()
    }

    /// Canonical JSON: `{"owners":[0,null,...]}` indexed by edge id.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(&OrientationJson {
            owners: self.owners.clone(),
        })
        .expect("orientation serialization")
    }

    /// Parses the JSON form and validates it against `inst`: entry count
    /// must match and every owner must be an endpoint of its edge.
    pub fn from_json(text: &str, inst: &Instance) -> Result<Self, OrientationJsonError> {
        let raw: OrientationJson = serde_json::from_str(text)?;
        if raw.owners.len() != inst.edge_count() {
            return Err(OrientationJsonError::Invalid(
                OrientationError::LengthMismatch {
                    got: raw.owners.len(),
                    expected: inst.edge_count(),
                },
            ));
        }
        for (e, owner) in raw.owners.iter().enumerate() {
            if let Some(x) = owner {
                if !inst.edge(e).is_incident(*x) {
                    return Err(OrientationJsonError::Invalid(
                        OrientationError::NotAnEndpoint {
                            edge: e,
                            vertex: *x,
                        },
                    ));
                }
            }
        }
        Ok(PartialOrientation { owners: raw.owners })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OrientationJsonError {
    #[error("malformed orientation JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Invalid(OrientationError),
}

#[derive(Serialize, Deserialize)]
struct OrientationJson {
    owners: Vec<Option<VertexId>>,
}

/// `u_i(pi_i)`: total weight of the bundle owned by `i`.
///
/// Panics if `i` is out of range.
pub fn utility(inst: &Instance, pi: &PartialOrientation, i: VertexId) -> Rational {
    assert!(i < inst.vertex_count(), "vertex {i} out of range");
    inst.edges()
        .iter()
        .filter(|e| pi.owner(e.id) == Some(i))
        .map(|e| inst.weight(e.id))
        .sum()
}

/// `u_i(pi_j)`: the value agent `i` places on `j`'s bundle. Only edges
/// incident to `i` count, so everything in `j`'s bundle that does not touch
/// `i` (including `j`'s self-loops) contributes zero.
///
/// Panics if `i == j` or either index is out of range.
pub fn utility_of_bundle_to(
    inst: &Instance,
    pi: &PartialOrientation,
    i: VertexId,
    j: VertexId,
) -> Rational {
    assert!(i != j, "utility_of_bundle_to requires distinct agents");
    assert!(i < inst.vertex_count(), "vertex {i} out of range");
    assert!(j < inst.vertex_count(), "vertex {j} out of range");
    inst.edges()
        .iter()
        .filter(|e| pi.owner(e.id) == Some(j) && e.is_incident(i))
        .map(|e| inst.weight(e.id))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::EdgeClass;

    fn loop_family_q1() -> Instance {
        // Heavy edge 0-1 plus one light loop at each vertex; alpha=2, beta=1.
        Instance::new(
            2,
            Rational::from_integer(2),
            Rational::from_integer(1),
            vec![
                (0, 1, EdgeClass::Heavy),
                (0, 0, EdgeClass::Light),
                (1, 1, EdgeClass::Light),
            ],
        )
        .unwrap()
    }

    #[test]
    fn utilities_count_only_owned_edges() {
        let inst = loop_family_q1();
        let mut pi = PartialOrientation::empty(inst.edge_count());
        pi.assign(&inst, 0, 0).unwrap();
        pi.assign(&inst, 1, 0).unwrap();
        pi.assign(&inst, 2, 1).unwrap();
        assert_eq!(utility(&inst, &pi, 0), Rational::from_integer(3));
        assert_eq!(utility(&inst, &pi, 1), Rational::from_integer(1));
        // Vertex 1 sees only the heavy edge in 0's bundle; 0's loop is worthless to it.
        assert_eq!(
            utility_of_bundle_to(&inst, &pi, 1, 0),
            Rational::from_integer(2)
        );
        assert_eq!(utility_of_bundle_to(&inst, &pi, 0, 1), Rational::zero());
    }

    #[test]
    fn partial_orientation_tracks_unoriented_edges() {
        let inst = loop_family_q1();
        let mut pi = PartialOrientation::empty(inst.edge_count());
        assert!(!pi.is_complete());
        assert_eq!(utility(&inst, &pi, 0), Rational::zero());
        pi.assign(&inst, 0, 1).unwrap();
        assert_eq!(pi.unoriented().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(pi.bundle(1), vec![0]);
    }

    #[test]
    fn assign_rejects_non_endpoints_and_reassignment() {
        let inst = loop_family_q1();
        let mut pi = PartialOrientation::empty(inst.edge_count());
        assert_eq!(
            pi.assign(&inst, 1, 1),
            Err(OrientationError::NotAnEndpoint { edge: 1, vertex: 1 })
        );
        pi.assign(&inst, 0, 0).unwrap();
        assert_eq!(
            pi.assign(&inst, 0, 1),
            Err(OrientationError::AlreadyOriented { edge: 0, owner: 0 })
        );
    }

    #[test]
    fn json_round_trip() {
        let inst = loop_family_q1();
        let mut pi = PartialOrientation::empty(inst.edge_count());
        pi.assign(&inst, 0, 1).unwrap();
        let json = pi.to_canonical_json();
        assert_eq!(json, "{\"owners\":[1,null,null]}");
        let back = PartialOrientation::from_json(&json, &inst).unwrap();
        assert_eq!(back, pi);
        // Wrong length and non-endpoint owners are rejected.
        assert!(PartialOrientation::from_json("{\"owners\":[null]}", &inst).is_err());
        assert!(PartialOrientation::from_json("{\"owners\":[null,1,null]}", &inst).is_err());
    }
}
