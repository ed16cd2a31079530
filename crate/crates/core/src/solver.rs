//! Constructive EFX orientation pipeline.
//!
//! The solver either produces a complete EFX orientation or refuses,
//! naming a heavy component whose structure makes that impossible. The
//! pipeline keeps one invariant: the partial orientation is envy-free
//! among oriented edges at every step except the last. Only the final
//! matching step trades envy-freeness down to EFX, and it does so on
//! bundles that will never grow again — crucial, because an edge that is
//! worthless to an envious vertex turns weak envy into strong envy.
//!
//! Stages:
//! 1. Each non-trivial heavy component is seeded: type 1 splits an
//!    even-multiplicity pair evenly, type 2 hangs everything off a
//!    cycle/self-loop witness. Every seeded vertex ends with utility at
//!    least alpha.
//! 2. Light edges propagate outward to the remaining vertices of the same
//!    connected component, giving each newcomer one light edge.
//! 3. Components with no heavy edges at all get a dedicated balanced
//!    split (see `all_light_orientation`).
//! 4. Remaining edges are handed out pair by pair via `extend_pair`,
//!    loops go to their only legal owner, and each type-1 component's
//!    reserved matching edge is placed last by `finish_matching`.

use std::collections::VecDeque;

use crate::fairness::is_efx;
use crate::instance::{EdgeId, Instance, VertexId};
use crate::orientation::{utility, PartialOrientation};
use crate::rational::Rational;
use crate::structure::{
    analyze_heavy_components, connected_components, Classification, HeavyComponentInfo,
    Type2Witness,
};

/// Result of [`solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    /// A complete EFX orientation.
    Oriented(PartialOrientation),
    /// No EFX orientation exists; the vertices of an offending heavy
    /// component are returned as evidence.
    Refused(Vec<VertexId>),
}

/// Mutable pipeline bookkeeping shared by the staged orientation steps.
#[derive(Clone, Debug)]
pub struct PipelineState {
    pub orientation: PartialOrientation,
    /// Vertices whose seed bundle has been placed.
    pub processed: Vec<bool>,
    /// Special pairs of the type-1 components, in processing order.
    pub special_pairs: Vec<(VertexId, VertexId)>,
    /// Reserved light edges, one per type-1 component with an odd number
    /// of light edges on its special pair. Oriented by [`finish_matching`].
    pub matching: Vec<EdgeId>,
}

impl PipelineState {
    pub fn new(inst: &Instance) -> Self {
        PipelineState {
            orientation: PartialOrientation::empty(inst.edge_count()),
            processed: vec![false; inst.vertex_count()],
            special_pairs: Vec::new(),
            matching: Vec::new(),
        }
    }
}

/// Orients a type-1 heavy component: the special pair `(v, w)` splits its
/// even heavy multiplicity and its light edges evenly, with an odd light
/// left over as a reserved matching edge, and the heavy spanning tree is
/// oriented away from the pair so every other vertex receives exactly one
/// heavy edge.
///
/// Panics if `info` is not a type-1 component.
pub fn orient_type1(inst: &Instance, state: &mut PipelineState, info: &HeavyComponentInfo) {
    let (v, w) = match info.classification {
        Classification::Type1 { special_pair } => special_pair,
        _ => panic!("component is not type 1"),
    };
    let between = inst.edges_between(v, w);
    let heavies: Vec<EdgeId> = between
        .iter()
        .copied()
        .filter(|&e| inst.edge(e).is_heavy())
        .collect();
    let lights: Vec<EdgeId> = between
        .iter()
        .copied()
        .filter(|&e| !inst.edge(e).is_heavy())
        .collect();
    debug_assert!(heavies.len() >= 2 && heavies.len().is_multiple_of(2));
    for (pos, &e) in heavies.iter().enumerate() {
        let owner = if pos < heavies.len() / 2 { v } else { w };
        state
            .orientation
            .assign(inst, e, owner)
            .expect("heavy split");
    }
    let half = lights.len() / 2;
    for (pos, &e) in lights.iter().enumerate() {
        if pos < half {
            state.orientation.assign(inst, e, v).expect("light split");
        } else if pos < 2 * half {
            state.orientation.assign(inst, e, w).expect("light split");
        } else {
            state.matching.push(e);
        }
    }
    // The spanning tree contains one edge of the special pair itself; it
    // was already oriented as part of the heavy split above.
    let tree: Vec<EdgeId> = info
        .heavy_spanning_tree
        .iter()
        .copied()
        .filter(|&e| inst.edge(e).key() != (v.min(w), v.max(w)))
        .collect();
    orient_tree_away_from(inst, state, &tree, &[v, w]);
    for &x in &info.vertices {
        state.processed[x] = true;
    }
    state.special_pairs.push((v, w));
}

/// Orients a type-2 heavy component: the spanning tree is oriented away
/// from the witness root, and the witness edge (a heavy self-loop or a
/// tree-closing heavy edge) goes to the root, so every vertex receives
/// exactly one heavy edge.
///
/// Panics if `info` is not a type-2 component.
pub fn orient_type2(inst: &Instance, state: &mut PipelineState, info: &HeavyComponentInfo) {
    let witness = match info.classification {
        Classification::Type2 { witness } => witness,
        _ => panic!("component is not type 2"),
    };
    let (root, witness_edge) = match witness {
        Type2Witness::HeavySelfLoop(e) => (inst.edge(e).u, e),
        Type2Witness::NonTreeHeavyEdge(e) => {
            let edge = inst.edge(e);
            (edge.u.min(edge.v), e)
        }
    };
    orient_tree_away_from(inst, state, &info.heavy_spanning_tree, &[root]);
    state
        .orientation
        .assign(inst, witness_edge, root)
        .expect("witness edge");
    for &x in &info.vertices {
        state.processed[x] = true;
    }
}

/// BFS over `tree` from the given sources, orienting every tree edge
/// toward the newly discovered endpoint.
fn orient_tree_away_from(
    inst: &Instance,
    state: &mut PipelineState,
    tree: &[EdgeId],
    sources: &[VertexId],
) {
    let mut adj: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); inst.vertex_count()];
    for &e in tree {
        let edge = inst.edge(e);
        adj[edge.u].push((edge.v, e));
        adj[edge.v].push((edge.u, e));
    }
    let mut visited = vec![false; inst.vertex_count()];
    let mut queue: VecDeque<VertexId> = VecDeque::new();
    for &s in sources {
        visited[s] = true;
        queue.push_back(s);
    }
    while let Some(x) = queue.pop_front() {
        for &(y, e) in &adj[x] {
            if !visited[y] {
                visited[y] = true;
                state.orientation.assign(inst, e, y).expect("tree edge");
                queue.push_back(y);
            }
        }
    }
}

/// Gives every vertex reachable from the processed set one light edge:
/// BFS from all processed vertices, orienting the lowest-id connecting
/// light edge toward each newly reached vertex.
fn propagate(inst: &Instance, state: &mut PipelineState) {
    let mut queue: VecDeque<VertexId> = (0..inst.vertex_count())
        .filter(|&v| state.processed[v])
        .collect();
    while let Some(x) = queue.pop_front() {
        for e in inst.edges_at(x) {
            let edge = inst.edge(e);
            if edge.is_loop() {
                continue;
            }
            let y = edge.other_endpoint(x).expect("incident edge");
            if !state.processed[y] {
                // Unreached vertices belong to no non-trivial heavy
                // component, so every edge into them is light.
                debug_assert!(!edge.is_heavy());
                state.orientation.assign(inst, e, y).expect("propagation");
                state.processed[y] = true;
                queue.push_back(y);
            }
        }
    }
}

/// Splits items with the given values between two agents so that neither
/// strongly envies the other under identical additive valuations. Returns
/// index sets `(a, b)` with `value(b) >= value(a)`; removing the smallest
/// item from `b` brings it to at most `value(a)`.
pub fn two_agent_efx_split(values: &[Rational]) -> (Vec<usize>, Vec<usize>) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&x, &y| values[y].cmp(&values[x]).then(x.cmp(&y)));
    let (mut a, mut b) = (Vec::new(), Vec::new());
    let (mut va, mut vb) = (Rational::zero(), Rational::zero());
    for k in order {
        if va <= vb {
            a.push(k);
            va += values[k];
        } else {
            b.push(k);
            vb += values[k];
        }
    }
    if va > vb {
        std::mem::swap(&mut a, &mut b);
    }
    a.sort_unstable();
    b.sort_unstable();
    (a, b)
}

/// Distributes every unoriented non-loop edge between `a` and `b` without
/// creating envy anywhere.
///
/// Requires labels `(i, j)` (tried in both orders) with
/// `u_i >= owned_j + w_max` and `u_j >= owned_i`, where `owned_x` is the
/// value of the already-oriented edges `x` holds inside the pair and
/// `w_max` is the heaviest edge being added; the pipeline guarantees this
/// for every pair it visits, and the function panics otherwise. The new
/// edges are split as evenly as possible with the larger half going to
/// `j`, which keeps both directions envy-free.
pub fn extend_pair(inst: &Instance, state: &mut PipelineState, a: VertexId, b: VertexId) {
    let between = inst.edges_between(a, b);
    let pending: Vec<EdgeId> = between
        .iter()
        .copied()
        .filter(|e| state.orientation.owner(*e).is_none() && !state.matching.contains(e))
        .collect();
    if pending.is_empty() {
        return;
    }
    let mut owned_a = Rational::zero();
    let mut owned_b = Rational::zero();
    for &e in &between {
        match state.orientation.owner(e) {
            Some(o) if o == a => owned_a += inst.weight(e),
            Some(_) => owned_b += inst.weight(e),
            None => {}
        }
    }
    let w_max = pending
        .iter()
        .map(|&e| inst.weight(e))
        .max()
        .expect("pending edges");
    let u_a = utility(inst, &state.orientation, a);
    let u_b = utility(inst, &state.orientation, b);
    let (i, j) = if u_a >= owned_b + w_max && u_b >= owned_a {
        (a, b)
    } else if u_b >= owned_a + w_max && u_a >= owned_b {
        (b, a)
    } else {
        panic!("pair ({a}, {b}) cannot be extended without creating envy");
    };
    let values: Vec<Rational> = pending.iter().map(|&e| inst.weight(e)).collect();
    let (small, large) = two_agent_efx_split(&values);
    for k in small {
        state
            .orientation
            .assign(inst, pending[k], i)
            .expect("pair split");
    }
    for k in large {
        state
            .orientation
            .assign(inst, pending[k], j)
            .expect("pair split");
    }
}

/// Orients a component that contains no heavy edge.
///
/// Loops go inward and every parallel class is split evenly. The leftover
/// edges of odd classes form a simple graph; within each of its connected
/// components they are arranged so that at most one vertex (a most
/// endowed one, which can afford it) misses out on an extra edge:
/// components with a cycle can grant everyone an extra, trees grant one
/// to all but the root.
fn orient_all_light_component(inst: &Instance, pi: &mut PartialOrientation, comp: &[VertexId]) {
    let mut in_comp = vec![false; inst.vertex_count()];
    for &v in comp {
        in_comp[v] = true;
    }
    // Base endowment per vertex: its loops plus half of each incident class.
    let mut base = vec![0usize; inst.vertex_count()];
    for e in inst.edges() {
        debug_assert!(!in_comp[e.u] || !e.is_heavy());
        if e.is_loop() && in_comp[e.u] {
            pi.assign(inst, e.id, e.u).expect("light loop");
            base[e.u] += 1;
        }
    }
    let mut odd: Vec<(VertexId, VertexId, EdgeId)> = Vec::new();
    for class in inst.parallel_classes() {
        if class.is_loop() || !in_comp[class.lo] {
            continue;
        }
        let half = class.size() / 2;
        for (pos, &e) in class.members.iter().enumerate() {
            if pos < half {
                pi.assign(inst, e, class.lo).expect("class split");
            } else if pos < 2 * half {
                pi.assign(inst, e, class.hi).expect("class split");
            } else {
                odd.push((class.lo, class.hi, e));
            }
        }
        base[class.lo] += half;
        base[class.hi] += half;
    }
    let mut o_adj: Vec<Vec<(VertexId, EdgeId)>> = vec![Vec::new(); inst.vertex_count()];
    for &(lo, hi, e) in &odd {
        o_adj[lo].push((hi, e));
        o_adj[hi].push((lo, e));
    }
    let mut seen = vec![false; inst.vertex_count()];
    for &start in comp {
        if seen[start] || o_adj[start].is_empty() {
            continue;
        }
        let mut verts = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(x) = queue.pop_front() {
            verts.push(x);
            for &(y, _) in &o_adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        verts.sort_unstable();
        let edges: Vec<(VertexId, VertexId, EdgeId)> = odd
            .iter()
            .copied()
            .filter(|&(lo, _, _)| verts.binary_search(&lo).is_ok())
            .collect();
        if edges.len() >= verts.len() {
            orient_cyclic_extras(inst, pi, &o_adj, &verts, &edges);
        } else {
            let root = verts
                .iter()
                .copied()
                .max_by_key(|&v| (base[v], inst.vertex_count() - v))
                .expect("nonempty extras component");
            orient_tree_extras(inst, pi, &o_adj, root);
        }
    }
}

/// Extras component containing a cycle: root a spanning tree at one
/// endpoint of a cycle-closing edge, orient the tree outward, close the
/// cycle back into the root, and drop any further non-tree extras at
/// their lower endpoint. Every vertex receives at least one extra.
fn orient_cyclic_extras(
    inst: &Instance,
    pi: &mut PartialOrientation,
    o_adj: &[Vec<(VertexId, EdgeId)>],
    verts: &[VertexId],
    edges: &[(VertexId, VertexId, EdgeId)],
) {
    let probe = spanning_tree_edges(o_adj, verts[0], None);
    let (root, closing) = edges
        .iter()
        .find(|&&(_, _, e)| !probe.contains(&e))
        .map(|&(lo, _, e)| (lo, e))
        .expect("cycle edge");
    let tree = spanning_tree_edges(o_adj, root, Some(closing));
    let mut assigned = vec![false; inst.edge_count()];
    for &(child, e) in &tree_orientations(o_adj, root, Some(closing)) {
        pi.assign(inst, e, child).expect("extras tree");
        assigned[e] = true;
    }
    debug_assert_eq!(tree.len(), verts.len() - 1);
    pi.assign(inst, closing, root).expect("cycle closer");
    assigned[closing] = true;
    for &(lo, _, e) in edges {
        if !assigned[e] {
            pi.assign(inst, e, lo).expect("surplus extra");
        }
    }
}

/// Extras component that is a tree: orient every extra away from the root.
fn orient_tree_extras(
    inst: &Instance,
    pi: &mut PartialOrientation,
    o_adj: &[Vec<(VertexId, EdgeId)>],
    root: VertexId,
) {
    for &(child, e) in &tree_orientations(o_adj, root, None) {
        pi.assign(inst, e, child).expect("extras tree");
    }
}

/// BFS tree edge ids from `root`, skipping `excluded`.
fn spanning_tree_edges(
    o_adj: &[Vec<(VertexId, EdgeId)>],
    root: VertexId,
    excluded: Option<EdgeId>,
) -> Vec<EdgeId> {
    tree_orientations(o_adj, root, excluded)
        .into_iter()
        .map(|(_, e)| e)
        .collect()
}

/// BFS from `root`, returning `(discovered vertex, tree edge)` pairs.
fn tree_orientations(
    o_adj: &[Vec<(VertexId, EdgeId)>],
    root: VertexId,
    excluded: Option<EdgeId>,
) -> Vec<(VertexId, EdgeId)> {
    let mut out = Vec::new();
    let mut visited = vec![false; o_adj.len()];
    visited[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for &(y, e) in &o_adj[x] {
            if Some(e) == excluded || visited[y] {
                continue;
            }
            visited[y] = true;
            out.push((y, e));
            queue.push_back(y);
        }
    }
    out
}

/// Complete orientation of an instance with no heavy edges.
///
/// Panics if the instance contains a heavy edge.
pub fn all_light_orientation(inst: &Instance) -> PartialOrientation {
    assert!(
        inst.edges().iter().all(|e| !e.is_heavy()),
        "instance has heavy edges"
    );
    let mut pi = PartialOrientation::empty(inst.edge_count());
    for comp in connected_components(inst) {
        orient_all_light_component(inst, &mut pi, &comp);
    }
    pi
}

/// Runs every pipeline stage except the final matching placement. The
/// returned orientation covers all edges apart from the reserved matching
/// edges and is envy-free.
///
/// Panics if the instance contains a forbidden heavy component; callers
/// are expected to consult the structure analysis first (as [`solve`]
/// does).
pub fn orient_all_but_matching(inst: &Instance) -> PipelineState {
    let analysis = analyze_heavy_components(inst);
    let mut state = PipelineState::new(inst);
    for info in &analysis {
        match info.classification {
            Classification::Trivial => {}
            Classification::Type1 { .. } => orient_type1(inst, &mut state, info),
            Classification::Type2 { .. } => orient_type2(inst, &mut state, info),
            Classification::ForbiddenOddMultitree => panic!("forbidden heavy component"),
        }
    }
    propagate(inst, &mut state);
    for comp in connected_components(inst) {
        if !state.processed[comp[0]] {
            debug_assert!(comp.iter().all(|&v| !state.processed[v]));
            orient_all_light_component(inst, &mut state.orientation, &comp);
            for &v in &comp {
                state.processed[v] = true;
            }
        }
    }
    // Hand out whatever is left, one endpoint pair at a time. Matching
    // edges stay reserved, so special pairs have nothing pending.
    let mut pairs: Vec<(VertexId, VertexId)> = Vec::new();
    for e in inst.edges() {
        if e.is_loop() || state.orientation.owner(e.id).is_some() || state.matching.contains(&e.id)
        {
            continue;
        }
        let key = e.key();
        if !pairs.contains(&key) {
            pairs.push(key);
        }
    }
    pairs.sort_unstable();
    for (a, b) in pairs {
        extend_pair(inst, &mut state, a, b);
    }
    for e in inst.edges() {
        if e.is_loop() && state.orientation.owner(e.id).is_none() {
            state.orientation.assign(inst, e.id, e.u).expect("loop");
        }
    }
    state
}

/// Places each reserved matching edge. The receiving endpoint is chosen
/// so the other endpoint either holds value outside the pair (and cannot
/// envy) or the receiver's bundle consists purely of pair edges (so any
/// envy stays weak).
pub fn finish_matching(inst: &Instance, state: &mut PipelineState) {
    for idx in 0..state.matching.len() {
        let m = state.matching[idx];
        let (a, b) = inst.edge(m).key();
        let outside = |x: VertexId| {
            state
                .orientation
                .bundle(x)
                .iter()
                .any(|&e| inst.edge(e).key() != (a, b))
        };
        let receiver = match (outside(a), outside(b)) {
            (true, false) => b,
            (false, true) => a,
            _ => b,
        };
        state
            .orientation
            .assign(inst, m, receiver)
            .expect("matching edge");
    }
}

/// Produces a complete EFX orientation, or refuses with the vertices of
/// the first heavy component whose structure admits none.
pub fn solve(inst: &Instance) -> SolveOutcome {
    let analysis = analyze_heavy_components(inst);
    if let Some(info) = analysis
        .iter()
        .find(|info| info.classification == Classification::ForbiddenOddMultitree)
    {
        return SolveOutcome::Refused(info.vertices.clone());
    }
    let mut state = orient_all_but_matching(inst);
    finish_matching(inst, &mut state);
    debug_assert!(state.orientation.is_complete());
    debug_assert!(is_efx(inst, &state.orientation));
    SolveOutcome::Oriented(state.orientation)
}
