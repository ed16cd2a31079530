//! Envy, strong envy, and the fairness predicates built on them.
//!
//! Agent `i` envies `j` when `i` values `j`'s bundle above its own. The envy
//! is *strong* when it survives the removal of some single good from `j`'s
//! bundle; an orientation is EFX when no strong envy exists anywhere. Note
//! the quantifier: removing a good `i` does not care about (a self-loop at
//! `j`, or any edge not incident to `i`) keeps the envy intact, so a bundle
//! containing such "junk" turns plain envy into strong envy immediately.
//! Envy-freeness (EF) implies EFX.
//!
//! All predicates work on partial orientations: unoriented edges simply
//! belong to nobody.

use serde::{Deserialize, Serialize};

use crate::instance::{EdgeId, Instance, VertexId};
use crate::orientation::{utility, utility_of_bundle_to, PartialOrientation};
use crate::rational::Rational;

/// Does `i` envy `j`? Panics if `i == j` or out of range.
pub fn envies(inst: &Instance, pi: &PartialOrientation, i: VertexId, j: VertexId) -> bool {
    utility(inst, pi, i) < utility_of_bundle_to(inst, pi, i, j)
}

/// Does `i` strongly envy `j`: is there a good in `j`'s bundle whose removal
/// still leaves `i` envious? Equivalently, the witness returned by
/// [`strong_envy_witness`] exists.
pub fn strongly_envies(inst: &Instance, pi: &PartialOrientation, i: VertexId, j: VertexId) -> bool {
    strong_envy_witness(inst, pi, i, j).is_some()
}

/// Lowest-id edge `e` in `j`'s bundle with `u_i(pi_i) < u_i(pi_j \ {e})`,
/// if any. Panics if `i == j` or out of range.
pub fn strong_envy_witness(
    inst: &Instance,
    pi: &PartialOrientation,
    i: VertexId,
    j: VertexId,
) -> Option<EdgeId> {
    let own = utility(inst, pi, i);
    let from_j = utility_of_bundle_to(inst, pi, i, j);
    if own >= from_j {
        return None;
    }
    // Envy exists; the margin tells us which removals fail to cure it.
    let margin = from_j - own;
    inst.edges()
        .iter()
        .filter(|e| pi.owner(e.id) == Some(j))
        .find(|e| {
            let value_to_i = if e.is_incident(i) && !e.is_loop() {
                inst.weight(e.id)
            } else {
                Rational::zero()
            };
            value_to_i < margin
        })
        .map(|e| e.id)
}

/// No agent envies another.
pub fn is_ef(inst: &Instance, pi: &PartialOrientation) -> bool {
    ordered_pairs(inst).all(|(i, j)| !envies(inst, pi, i, j))
}

/// No agent strongly envies another.
///
/// Equivalent to checking [`strongly_envies`] over every ordered pair, but
/// organized around incidence: strong envy needs a positive view of the
/// envied bundle, so only pairs joined by an owned shared edge can exhibit
/// it, and the cheapest removal is either a shared edge or free (whenever
/// the envied side owns anything the envier cannot see).
pub fn is_efx(inst: &Instance, pi: &PartialOrientation) -> bool {
    let n = inst.vertex_count();
    let mut utilities = vec![Rational::zero(); n];
    let mut owned_counts = vec![0usize; n];
    for e in inst.edges() {
        if let Some(o) = pi.owner(e.id) {
            utilities[o] += inst.weight(e.id);
            owned_counts[o] += 1;
        }
    }
    for (i, u_i) in utilities.iter().enumerate() {
        let mut views: std::collections::BTreeMap<VertexId, (Rational, Rational, usize)> =
            std::collections::BTreeMap::new();
        for e in inst.edges_at(i) {
            let Some(j) = pi.owner(e) else { continue };
            if j == i {
                continue;
            }
            let weight = inst.weight(e);
            let entry = views.entry(j).or_insert((Rational::zero(), weight, 0));
            entry.0 += weight;
            if weight < entry.1 {
                entry.1 = weight;
            }
            entry.2 += 1;
        }
        for (j, (view, min_shared, shared)) in views {
            let min_removal = if owned_counts[j] > shared {
                Rational::zero()
            } else {
                min_shared
            };
            if *u_i < view - min_removal {
                return false;
            }
        }
    }
    true
}

fn ordered_pairs(inst: &Instance) -> impl Iterator<Item = (VertexId, VertexId)> {
    let n = inst.vertex_count();
    (0..n).flat_map(move |i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
}

/// Envy status of one ordered pair.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct EnvyEntry {
    pub i: VertexId,
    pub j: VertexId,
    pub envies: bool,
    pub strongly_envies: bool,
    /// Present iff `strongly_envies`; lowest-id good in `j`'s bundle whose
    /// removal leaves `i` envious.
    pub witness_edge: Option<EdgeId>,
}

/// Full pairwise report, the payload of `check`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct EnvyReport {
    pub ef: bool,
    pub efx: bool,
    pub pairs: Vec<EnvyEntry>,
}

/// Evaluates every ordered pair. Quadratic in the vertex count, which is
/// fine for a verifier.
pub fn envy_report(inst: &Instance, pi: &PartialOrientation) -> EnvyReport {
    let mut pairs = Vec::new();
    let mut ef = true;
    let mut efx = true;
    for (i, j) in ordered_pairs(inst) {
        let envies = envies(inst, pi, i, j);
        let witness = if envies {
            strong_envy_witness(inst, pi, i, j)
        } else {
            None
        };
        ef &= !envies;
        efx &= witness.is_none();
        pairs.push(EnvyEntry {
            i,
            j,
            envies,
            strongly_envies: witness.is_some(),
            witness_edge: witness,
        });
    }
    EnvyReport { ef, efx, pairs }
}

/// Private envy-freeness between `i` and `j`: restricted to the edges
/// joining them (self-loops are excluded by construction), both agents value
/// their own share at least as much as the other's. With symmetric weights
/// the two directions coincide, but both are checked literally.
///
/// Unoriented edges between the pair are ignored: only assigned shares are
/// compared. Panics if `i == j` or out of range.
pub fn is_pef_pair(inst: &Instance, pi: &PartialOrientation, i: VertexId, j: VertexId) -> bool {
    assert!(i != j, "PEF is defined for distinct agents");
    assert!(i < inst.vertex_count(), "vertex {i} out of range");
    assert!(j < inst.vertex_count(), "vertex {j} out of range");
    let value_of = |owner: VertexId| -> Rational {
        inst.edges()
            .iter()
            .filter(|e| e.key() == (i.min(j), i.max(j)) && !e.is_loop())
            .filter(|e| pi.owner(e.id) == Some(owner))
            .map(|e| inst.weight(e.id))
            .sum()
    };
    let i_own = value_of(i);
    let j_own = value_of(j);
    i_own >= j_own && j_own >= i_own
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::EdgeClass;

    fn inst(n: usize, alpha: i128, beta: i128, edges: Vec<(usize, usize, EdgeClass)>) -> Instance {
        Instance::new(
            n,
            Rational::from_integer(alpha),
            Rational::from_integer(beta),
            edges,
        )
        .unwrap()
    }

    fn orient(inst: &Instance, owners: &[Option<usize>]) -> PartialOrientation {
        let mut pi = PartialOrientation::empty(inst.edge_count());
        for (e, o) in owners.iter().enumerate() {
            if let Some(x) = o {
                pi.assign(inst, e, *x).unwrap();
            }
        }
        pi
    }

    #[test]
    fn single_edge_envy_is_never_strong() {
        // One heavy edge oriented toward 0: vertex 1 envies but removing the
        // only good empties the bundle, so the envy is not strong.
        let g = inst(2, 2, 1, vec![(0, 1, EdgeClass::Heavy)]);
        let pi = orient(&g, &[Some(0)]);
        assert!(envies(&g, &pi, 1, 0));
        assert!(!strongly_envies(&g, &pi, 1, 0));
        assert!(!is_ef(&g, &pi));
        assert!(is_efx(&g, &pi));
    }

    #[test]
    fn junk_in_the_envied_bundle_makes_envy_strong() {
        // Loop-family q=1, both loops and the heavy edge to vertex 0:
        // vertex 1 envies (1 < 2) and 0's loop is removable junk.
        let g = inst(
            2,
            2,
            1,
            vec![
                (0, 1, EdgeClass::Heavy),
                (0, 0, EdgeClass::Light),
                (1, 1, EdgeClass::Light),
            ],
        );
        let pi = orient(&g, &[Some(0), Some(0), Some(1)]);
        assert!(envies(&g, &pi, 1, 0));
        assert!(strongly_envies(&g, &pi, 1, 0));
        // Lowest-id witness: removing the heavy edge leaves envy? 1 < 0 is
        // false, so the witness is the loop (id 1).
        assert_eq!(strong_envy_witness(&g, &pi, 1, 0), Some(1));
        assert!(!is_efx(&g, &pi));
    }

    #[test]
    fn removing_a_light_edge_can_cure_envy() {
        // Two vertices, 3 lights, split 1/2: envy by one light, removal cures.
        let g = inst(
            2,
            2,
            1,
            vec![
                (0, 1, EdgeClass::Light),
                (0, 1, EdgeClass::Light),
                (0, 1, EdgeClass::Light),
            ],
        );
        let pi = orient(&g, &[Some(0), Some(1), Some(1)]);
        assert!(envies(&g, &pi, 0, 1));
        assert!(!strongly_envies(&g, &pi, 0, 1));
        assert!(is_efx(&g, &pi));
        assert!(!is_ef(&g, &pi));
    }

    #[test]
    fn empty_bundles_cannot_be_envied() {
        let g = inst(3, 2, 1, vec![(0, 1, EdgeClass::Heavy)]);
        let pi = PartialOrientation::empty(g.edge_count());
        assert!(is_ef(&g, &pi));
        assert!(is_efx(&g, &pi));
        let report = envy_report(&g, &pi);
        assert_eq!(report.pairs.len(), 6);
        assert!(report.ef && report.efx);
        assert!(report.pairs.iter().all(|p| p.witness_edge.is_none()));
    }

    #[test]
    fn report_flags_match_predicates() {
        let g = inst(
            2,
            2,
            1,
            vec![
                (0, 1, EdgeClass::Heavy),
                (0, 0, EdgeClass::Light),
                (1, 1, EdgeClass::Light),
            ],
        );
        let pi = orient(&g, &[Some(0), Some(0), Some(1)]);
        let report = envy_report(&g, &pi);
        assert!(!report.ef);
        assert!(!report.efx);
        let entry = report.pairs.iter().find(|p| p.i == 1 && p.j == 0).unwrap();
        assert!(entry.envies && entry.strongly_envies);
        assert_eq!(entry.witness_edge, Some(1));
        // strongly_envies implies envies on every row.
        assert!(report.pairs.iter().all(|p| !p.strongly_envies || p.envies));
    }

    #[test]
    fn zero_beta_follows_the_literal_definition() {
        // beta = 0: a worthless light edge in the envied bundle still counts
        // as a removable good, and removing it cures nothing.
        let g = inst(
            2,
            1,
            0,
            vec![(0, 1, EdgeClass::Heavy), (0, 1, EdgeClass::Light)],
        );
        let pi = orient(&g, &[Some(0), Some(0)]);
        assert!(envies(&g, &pi, 1, 0));
        // Removing the light edge leaves the heavy one: still envied.
        assert!(strongly_envies(&g, &pi, 1, 0));
        assert_eq!(strong_envy_witness(&g, &pi, 1, 0), Some(1));
    }

    #[test]
    fn pef_compares_between_edge_shares_only() {
        let g = inst(
            2,
            3,
            1,
            vec![
                (0, 1, EdgeClass::Heavy),
                (0, 1, EdgeClass::Heavy),
                (0, 1, EdgeClass::Light),
                (0, 1, EdgeClass::Light),
                (0, 0, EdgeClass::Light),
            ],
        );
        // Equal shares of the between-edges; the loop at 0 is ignored.
        let pi = orient(&g, &[Some(0), Some(1), Some(0), Some(1), Some(0)]);
        assert!(is_pef_pair(&g, &pi, 0, 1));
        // Tilt the lights: shares differ.
        let pi = orient(&g, &[Some(0), Some(1), Some(1), Some(1), None]);
        assert!(!is_pef_pair(&g, &pi, 0, 1));
        // Nothing oriented between the pair: vacuously PEF.
        let pi = orient(&g, &[None, None, None, None, Some(0)]);
        assert!(is_pef_pair(&g, &pi, 0, 1));
    }

    #[test]
    fn efx_check_agrees_with_pairwise_reference() {
        // The incidence-based is_efx must match the quadratic definition on
        // a spread of dense little instances, loops and parallels included.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x0e5f);
        let mut mismatches = 0;
        for round in 0..300 {
            let n = rng.gen_range(1..=5);
            let m = rng.gen_range(0..=10);
            let (a, b) = *[(3, 1), (5, 2), (2, 1), (1, 0)].get(round % 4).unwrap();
            let edges = (0..m)
                .map(|_| {
                    let u = rng.gen_range(0..n);
                    let v = rng.gen_range(0..n);
                    let class = if rng.gen_bool(0.4) {
                        EdgeClass::Heavy
                    } else {
                        EdgeClass::Light
                    };
                    (u, v, class)
                })
                .collect();
            let g = inst(n, a, b, edges);
            let owners: Vec<Option<usize>> = g
                .edges()
                .iter()
                .map(|e| match rng.gen_range(0..3) {
                    0 => Some(e.u),
                    1 => Some(e.v),
                    _ => None,
                })
                .collect();
            let pi = orient(&g, &owners);
            let reference = ordered_pairs(&g).all(|(i, j)| !strongly_envies(&g, &pi, i, j));
            if is_efx(&g, &pi) != reference {
                mismatches += 1;
            }
        }
        assert_eq!(mismatches, 0);
    }
}
