//! Structural analysis of the heavy part of an instance.
//!
//! A *heavy component* is a maximal set of vertices pairwise connected by
//! all-heavy paths. Collapsing parallel heavy edges between each vertex pair
//! gives the condensed heavy graph of a component; the solver's case split
//! lives on three questions about it:
//!
//! * is the component a single vertex with no heavy self-loop (trivial),
//! * do the heavy edges form a multitree (condensed graph a tree, no heavy
//!   self-loop), and if so, is some condensed multiplicity even (type 1),
//! * otherwise a heavy self-loop or condensed cycle witnesses type 2.
//!
//! Non-trivial multitrees with all-odd multiplicities are the obstruction
//! class: the solver refuses them rather than guessing.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::instance::{EdgeId, Instance, VertexId};

/// Why a component is type 2.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Type2Witness {
    /// A heavy self-loop (edge id); its vertex anchors the orientation.
    HeavySelfLoop(EdgeId),
    /// A heavy edge whose endpoint pair is joined by no spanning-tree edge,
    /// i.e. a condensed cycle edge.
    NonTreeHeavyEdge(EdgeId),
}

/// Outcome of classifying one heavy component.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Classification {
    /// Single vertex, no heavy self-loop (light edges are irrelevant here).
    Trivial,
    /// Heavy multitree with a condensed pair of even multiplicity.
    Type1 { special_pair: (VertexId, VertexId) },
    /// Not a multitree: a heavy self-loop or a condensed cycle exists.
    Type2 { witness: Type2Witness },
    /// Non-trivial multitree, every condensed multiplicity odd.
    ForbiddenOddMultitree,
}

/// A heavy component together with its classification and a heavy spanning
/// tree of its condensed graph (empty for single-vertex components).
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct HeavyComponentInfo {
    /// Sorted member vertices.
    pub vertices: Vec<VertexId>,
    #[serde(flatten)]
    pub classification: Classification,
    /// Heavy non-loop edge ids forming a spanning tree, one per condensed
    /// pair, `|vertices| - 1` in total.
    pub heavy_spanning_tree: Vec<EdgeId>,
}

fn components_by<F: Fn(EdgeId) -> bool>(inst: &Instance, keep: F) -> Vec<Vec<VertexId>> {
    let n = inst.vertex_count();
    let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for e in inst.edges() {
        if !e.is_loop() && keep(e.id) {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
    }
    let mut seen = vec![false; n];
    let mut comps = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    comp.push(y);
                    queue.push_back(y);
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Connected components over all edges. Self-loops connect nothing; every
/// vertex appears in exactly one component. Components are ordered by their
/// smallest vertex and internally sorted.
pub fn connected_components(inst: &Instance) -> Vec<Vec<VertexId>> {
    components_by(inst, |_| true)
}

/// Heavy components: connectivity restricted to heavy non-loop edges.
/// Vertices without heavy neighbours form singletons.
pub fn heavy_components(inst: &Instance) -> Vec<Vec<VertexId>> {
    components_by(inst, |e| inst.edge(e).is_heavy())
}

struct CondensedHeavy {
    /// Per condensed pair `(x, y)` with `x < y`: (multiplicity, lowest edge id).
    pairs: BTreeMap<(VertexId, VertexId), (usize, EdgeId)>,
    /// Heavy self-loop edge ids within the component, ascending.
    loops: Vec<EdgeId>,
}

fn condense_heavy(inst: &Instance, comp: &[VertexId]) -> CondensedHeavy {
    let member = |x: VertexId| comp.binary_search(&x).is_ok();
    let mut pairs: BTreeMap<(VertexId, VertexId), (usize, EdgeId)> = BTreeMap::new();
    let mut loops = Vec::new();
    for e in inst.edges() {
        if !e.is_heavy() || !member(e.u) {
            continue;
        }
        if e.is_loop() {
            loops.push(e.id);
        } else {
            debug_assert!(member(e.v), "heavy edge leaves its heavy component");
            let entry = pairs.entry(e.key()).or_insert((0, e.id));
            entry.0 += 1;
        }
    }
    CondensedHeavy { pairs, loops }
}

/// Spanning tree of the condensed heavy graph via BFS, taking the lowest
/// edge id per condensed pair. `seed` forces one condensed edge into the
/// tree first (the type-1 special pair); otherwise BFS starts at the lowest
/// vertex. Panics if the component is not heavy-connected.
fn heavy_spanning_tree(
    comp: &[VertexId],
    condensed: &CondensedHeavy,
    seed: Option<(VertexId, VertexId)>,
) -> Vec<EdgeId> {
    if comp.len() <= 1 {
        return Vec::new();
    }
    // Condensed adjacency with the representative edge id per pair.
    let mut adj: BTreeMap<VertexId, Vec<(VertexId, EdgeId)>> = BTreeMap::new();
    for (&(x, y), &(_, rep)) in &condensed.pairs {
        adj.entry(x).or_default().push((y, rep));
        adj.entry(y).or_default().push((x, rep));
    }
    for list in adj.values_mut() {
        list.sort_unstable();
    }
    let mut visited: BTreeMap<VertexId, bool> = comp.iter().map(|&v| (v, false)).collect();
    let mut tree = Vec::new();
    let mut queue = VecDeque::new();
    match seed {
        Some((v, w)) => {
            let rep = condensed.pairs[&(v.min(w), v.max(w))].1;
            tree.push(rep);
            visited.insert(v, true);
            visited.insert(w, true);
            queue.push_back(v);
            queue.push_back(w);
        }
        None => {
            let start = comp[0];
            visited.insert(start, true);
            queue.push_back(start);
        }
    }
    while let Some(x) = queue.pop_front() {
        if let Some(list) = adj.get(&x) {
            for &(y, rep) in list {
                if !visited[&y] {
                    visited.insert(y, true);
                    tree.push(rep);
                    queue.push_back(y);
                }
            }
        }
    }
    assert!(
        visited.values().all(|&v| v),
        "component is not heavy-connected"
    );
    tree.sort_unstable();
    tree
}

fn assert_is_heavy_component(inst: &Instance, comp: &[VertexId]) {
    assert!(
        !comp.is_empty(),
        "empty vertex set is not a heavy component"
    );
    assert!(
        heavy_components(inst).iter().any(|c| c == comp),
        "vertex set {comp:?} is not a heavy component of the instance"
    );
}

/// Do the heavy edges within `comp` form a multitree: condensed graph a
/// tree and no heavy self-loop? Single vertices without heavy loops count.
///
/// Panics if `comp` is not a heavy component (sorted vertex set).
pub fn is_multitree(inst: &Instance, comp: &[VertexId]) -> bool {
    assert_is_heavy_component(inst, comp);
    let condensed = condense_heavy(inst, comp);
    condensed.loops.is_empty() && condensed.pairs.len() == comp.len() - 1
}

/// Multitree with every condensed multiplicity odd.
pub fn is_odd_multitree(inst: &Instance, comp: &[VertexId]) -> bool {
    assert_is_heavy_component(inst, comp);
    let condensed = condense_heavy(inst, comp);
    condensed.loops.is_empty()
        && condensed.pairs.len() == comp.len() - 1
        && condensed.pairs.values().all(|&(mult, _)| mult % 2 == 1)
}

/// Classifies one heavy component and constructs its spanning tree.
///
/// Panics if `comp` is not a heavy component of `inst`.
pub fn classify_heavy_component(inst: &Instance, comp: &[VertexId]) -> HeavyComponentInfo {
    assert_is_heavy_component(inst, comp);
    let condensed = condense_heavy(inst, comp);
    if comp.len() == 1 && condensed.loops.is_empty() {
        return HeavyComponentInfo {
            vertices: comp.to_vec(),
            classification: Classification::Trivial,
            heavy_spanning_tree: Vec::new(),
        };
    }
    if let Some(&loop_edge) = condensed.loops.first() {
        let tree = heavy_spanning_tree(comp, &condensed, None);
        return HeavyComponentInfo {
            vertices: comp.to_vec(),
            classification: Classification::Type2 {
                witness: Type2Witness::HeavySelfLoop(loop_edge),
            },
            heavy_spanning_tree: tree,
        };
    }
    if condensed.pairs.len() > comp.len() - 1 {
        // Condensed cycle: some pair is joined by heavy edges but absent
        // from any spanning tree. Find the lowest heavy edge on such a pair.
        let tree = heavy_spanning_tree(comp, &condensed, None);
        let tree_pairs: Vec<(VertexId, VertexId)> =
            tree.iter().map(|&e| inst.edge(e).key()).collect();
        let witness = inst
            .edges()
            .iter()
            .find(|e| {
                e.is_heavy()
                    && !e.is_loop()
                    && comp.binary_search(&e.u).is_ok()
                    && !tree_pairs.contains(&e.key())
            })
            .map(|e| e.id)
            .expect("condensed cycle implies a non-tree pair");
        return HeavyComponentInfo {
            vertices: comp.to_vec(),
            classification: Classification::Type2 {
                witness: Type2Witness::NonTreeHeavyEdge(witness),
            },
            heavy_spanning_tree: tree,
        };
    }
    // Multitree. Even condensed multiplicity anywhere makes it type 1.
    if let Some((&pair, _)) = condensed.pairs.iter().find(|(_, &(mult, _))| mult % 2 == 0) {
        let tree = heavy_spanning_tree(comp, &condensed, Some(pair));
        return HeavyComponentInfo {
            vertices: comp.to_vec(),
            classification: Classification::Type1 { special_pair: pair },
            heavy_spanning_tree: tree,
        };
    }
    HeavyComponentInfo {
        vertices: comp.to_vec(),
        classification: Classification::ForbiddenOddMultitree,
        heavy_spanning_tree: heavy_spanning_tree(comp, &condensed, None),
    }
}

/// Classifies every heavy component, in component order.
pub fn analyze_heavy_components(inst: &Instance) -> Vec<HeavyComponentInfo> {
    heavy_components(inst)
        .iter()
        .map(|comp| classify_heavy_component(inst, comp))
        .collect()
}

/// Does any heavy component fall in the obstruction class?
pub fn has_forbidden_structure(inst: &Instance) -> bool {
    analyze_heavy_components(inst)
        .iter()
        .any(|info| info.classification == Classification::ForbiddenOddMultitree)
}

/// Proper 2-colouring over non-loop edges, if one exists. The lowest vertex
/// of each connected component receives colour 0. Self-loops (any weight)
/// are ignored: bipartiteness here is about the underlying simple graph.
pub fn is_bipartite(inst: &Instance) -> Option<Vec<u8>> {
    let n = inst.vertex_count();
    let adj = inst.adjacency();
    let mut colour: Vec<Option<u8>> = vec![None; n];
    for start in 0..n {
        if colour[start].is_some() {
            continue;
        }
        colour[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            let cx = colour[x].unwrap();
            for &y in &adj[x] {
                match colour[y] {
                    None => {
                        colour[y] = Some(1 - cx);
                        queue.push_back(y);
                    }
                    Some(cy) if cy == cx => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some(colour.into_iter().map(Option::unwrap).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::EdgeClass::{Heavy, Light};
    use crate::rational::Rational;

    fn inst(n: usize, edges: Vec<(usize, usize, crate::instance::EdgeClass)>) -> Instance {
        Instance::new(
            n,
            Rational::from_integer(3),
            Rational::from_integer(1),
            edges,
        )
        .unwrap()
    }

    #[test]
    fn loops_do_not_connect() {
        let g = inst(3, vec![(0, 0, Light), (1, 2, Light)]);
        assert_eq!(connected_components(&g), vec![vec![0], vec![1, 2]]);
    }

    #[test]
    fn heavy_components_ignore_light_edges() {
        // Light path over everything, heavy edge only between 1 and 2.
        let g = inst(4, vec![(0, 1, Light), (1, 2, Heavy), (2, 3, Light)]);
        assert_eq!(connected_components(&g), vec![vec![0, 1, 2, 3]]);
        assert_eq!(heavy_components(&g), vec![vec![0], vec![1, 2], vec![3]]);
    }

    #[test]
    fn classify_trivial_and_loop_singletons() {
        let g = inst(2, vec![(0, 0, Light), (1, 1, Heavy)]);
        let infos = analyze_heavy_components(&g);
        // Vertex 0: light loop only, trivial.
        assert_eq!(infos[0].classification, Classification::Trivial);
        assert!(infos[0].heavy_spanning_tree.is_empty());
        // Vertex 1: heavy loop, type 2 with the loop as witness.
        assert_eq!(
            infos[1].classification,
            Classification::Type2 {
                witness: Type2Witness::HeavySelfLoop(1)
            }
        );
        assert!(infos[1].heavy_spanning_tree.is_empty());
    }

    #[test]
    fn even_pair_makes_type1() {
        // Two vertices, two heavy edges and three lights between them.
        let g = inst(
            2,
            vec![
                (0, 1, Heavy),
                (0, 1, Heavy),
                (0, 1, Light),
                (0, 1, Light),
                (0, 1, Light),
            ],
        );
        let infos = analyze_heavy_components(&g);
        assert_eq!(infos.len(), 1);
        assert_eq!(
            infos[0].classification,
            Classification::Type1 {
                special_pair: (0, 1)
            }
        );
        assert_eq!(infos[0].heavy_spanning_tree, vec![0]);
        assert!(is_multitree(&g, &[0, 1]));
        assert!(!is_odd_multitree(&g, &[0, 1]));
    }

    #[test]
    fn heavy_triangle_is_type2_with_cycle_witness() {
        let g = inst(3, vec![(0, 1, Heavy), (1, 2, Heavy), (0, 2, Heavy)]);
        let info = classify_heavy_component(&g, &[0, 1, 2]);
        // BFS from 0 takes (0,1) and (0,2); the (1,2) edge closes the cycle.
        assert_eq!(info.heavy_spanning_tree, vec![0, 2]);
        assert_eq!(
            info.classification,
            Classification::Type2 {
                witness: Type2Witness::NonTreeHeavyEdge(1)
            }
        );
        assert!(!is_multitree(&g, &[0, 1, 2]));
    }

    #[test]
    fn odd_multitree_is_forbidden() {
        // Single heavy edge plus loop-family lights: the obstruction shape.
        let g = inst(2, vec![(0, 1, Heavy), (0, 0, Light), (1, 1, Light)]);
        let info = classify_heavy_component(&g, &[0, 1]);
        assert_eq!(info.classification, Classification::ForbiddenOddMultitree);
        assert!(has_forbidden_structure(&g));
        assert!(is_odd_multitree(&g, &[0, 1]));
        // A path with multiplicities 1,1 is also forbidden.
        let path = inst(3, vec![(0, 1, Heavy), (1, 2, Heavy)]);
        assert!(is_odd_multitree(&path, &[0, 1, 2]));
        assert!(has_forbidden_structure(&path));
    }

    #[test]
    fn parallel_heavy_pair_count_three_is_still_odd() {
        let g = inst(2, vec![(0, 1, Heavy), (0, 1, Heavy), (0, 1, Heavy)]);
        assert!(is_odd_multitree(&g, &[0, 1]));
        let info = classify_heavy_component(&g, &[0, 1]);
        assert_eq!(info.classification, Classification::ForbiddenOddMultitree);
    }

    #[test]
    fn type1_tree_contains_special_pair_edge() {
        // Star: center 0 with heavy multiplicities 1 (to 1), 2 (to 2), 1 (to 3).
        let g = inst(
            4,
            vec![(0, 1, Heavy), (0, 2, Heavy), (0, 2, Heavy), (0, 3, Heavy)],
        );
        let info = classify_heavy_component(&g, &[0, 1, 2, 3]);
        assert_eq!(
            info.classification,
            Classification::Type1 {
                special_pair: (0, 2)
            }
        );
        // Tree must contain one (0,2) heavy edge; lowest id is 1.
        assert!(info.heavy_spanning_tree.contains(&1));
        assert_eq!(info.heavy_spanning_tree.len(), 3);
    }

    #[test]
    fn bipartite_check_ignores_loops() {
        let g = inst(3, vec![(0, 1, Heavy), (1, 2, Light), (2, 2, Heavy)]);
        assert_eq!(is_bipartite(&g), Some(vec![0, 1, 0]));
        let odd_cycle = inst(3, vec![(0, 1, Light), (1, 2, Light), (0, 2, Light)]);
        assert_eq!(is_bipartite(&odd_cycle), None);
    }
}
