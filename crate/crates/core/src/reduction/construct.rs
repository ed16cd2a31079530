//! Turning a satisfying assignment into a concrete EFX orientation.
//!
//! Value edges are oriented directly from the wire values. Each gadget then
//! needs its internal edges completed, and gadgets interact: weak envy
//! inside one gadget turns strong when a neighbouring gadget drops an edge
//! the envier does not value onto the envied bundle. Completions therefore
//! cannot be chosen one gadget at a time without revisiting choices. The
//! search walks the gadgets in construction order, tries candidate
//! completions (hand-checked patterns first, enumeration as fallback),
//! prunes as soon as a vertex with a finalized bundle strongly envies a
//! neighbour, and accepts only orientations that pass the full EFX check.

use std::collections::BTreeMap;

use num_integer::Integer;

use crate::fairness::is_efx;
use crate::instance::{EdgeId, Instance, VertexId};
use crate::orientation::PartialOrientation;

use super::{GadgetInfo, GadgetKind, ReductionMap};

/// One way to orient a gadget's internal edges.
type Candidate = Vec<(EdgeId, VertexId)>;

/// Weights scaled to integers so envy arithmetic stays exact and cheap.
struct Weights {
    a: i128,
    b: i128,
}

fn scaled_weights(inst: &Instance) -> Weights {
    let alpha = inst.alpha();
    let beta = inst.beta();
    let denom = alpha.denom().lcm(&beta.denom());
    Weights {
        a: alpha.numer() * (denom / alpha.denom()),
        b: beta.numer() * (denom / beta.denom()),
    }
}

/// Positions (into `GadgetInfo::vertices`) whose every incident edge belongs
/// to the gadget itself, so their bundles are final once it is placed.
fn private_positions(kind: GadgetKind) -> &'static [usize] {
    match kind {
        // u2, u3, u4, v2, v3, v4
        GadgetKind::Not => &[1, 2, 3, 6, 7, 8],
        // v, w, u, v', u'
        GadgetKind::Or => &[4, 5, 6, 7, 8],
        GadgetKind::Dup => &[],
        // u1 ... u7
        GadgetKind::True => &[0, 1, 2, 3, 4, 5, 6],
        GadgetKind::Pad => &[0, 1],
    }
}

/// Hand-checked inverter completions, one per feeding direction. The
/// consumed and produced edges always sit at the same end of their rows, so
/// one pattern covers both rows. Fed at `a1`, a row reads: first light
/// toward `a2`, heavy `a2a3` across, spare light back to `a2`, both `a3a4`
/// edges toward `a4`, last light toward `a5`. Fed at `a5`, the mirror
/// image.
fn not_patterns(info: &GadgetInfo) -> [Candidate; 2] {
    let vs = &info.vertices;
    let mut head = Vec::with_capacity(info.internal_edges.len());
    let mut tail = Vec::with_capacity(info.internal_edges.len());
    let mut pos = 0;
    for row in [[0usize, 1, 2, 3, 4], [5, 6, 7, 8, 9]] {
        let a = |i: usize| vs[row[i]];
        let forward = [a(1), a(2), a(1), a(3), a(3), a(4)];
        let mirror = [a(0), a(1), a(1), a(2), a(3), a(3)];
        for i in 0..forward.len() {
            head.push((info.internal_edges[pos], forward[i]));
            tail.push((info.internal_edges[pos], mirror[i]));
            pos += 1;
        }
    }
    [head, tail]
}

/// Hand-checked anchor completion: the tail marches toward the consumed
/// edge, the six-cycle rotates one step except for the light `u2u3`.
fn true_pattern(info: &GadgetInfo) -> Candidate {
    let vs = &info.vertices;
    let owners = [
        vs[1], // u1u2
        vs[2], // u2u3 heavy
        vs[1], // u2u3 light
        vs[3], // u3u4 heavy
        vs[3], // u3u4 light
        vs[4], // u4u5
        vs[5], // u5u6
        vs[0], // u6u1
        vs[6], // u1u7
        vs[7], // u7u8
    ];
    info.internal_edges.iter().copied().zip(owners).collect()
}

/// All `2^k` orientations of the internal edges. Skipped above 20 edges;
/// the pattern candidates cover the gadgets that can grow with q.
fn push_enumerated(inst: &Instance, info: &GadgetInfo, raw: &mut Vec<Candidate>) {
    let k = info.internal_edges.len();
    if k > 20 {
        return;
    }
    for mask in 0u32..(1 << k) {
        let cand = info
            .internal_edges
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                let edge = inst.edge(e);
                let owner = if mask >> i & 1 == 0 { edge.u } else { edge.v };
                (e, owner)
            })
            .collect();
        raw.push(cand);
    }
}

/// Rejects candidates under which a private vertex already strongly envies
/// some gadget vertex. Private utilities are exact here, and external edges
/// can only enlarge the envied bundle, so rejection is final.
fn locally_sound(
    inst: &Instance,
    info: &GadgetInfo,
    pi: &PartialOrientation,
    cand: &Candidate,
    privates: &[VertexId],
    w: &Weights,
) -> bool {
    if privates.is_empty() {
        return true;
    }
    let mut edges: Vec<(EdgeId, VertexId)> = cand.clone();
    for &e in &info.boundary {
        if let Some(owner) = pi.owner(e) {
            edges.push((e, owner));
        }
    }
    let weight = |e: EdgeId| if inst.edge(e).is_heavy() { w.a } else { w.b };
    for &x in privates {
        let u_x: i128 = edges
            .iter()
            .filter(|&&(_, o)| o == x)
            .map(|&(e, _)| weight(e))
            .sum();
        for &y in &info.vertices {
            if y == x {
                continue;
            }
            let mut view = 0i128;
            let mut min_removal = i128::MAX;
            let mut owns_any = false;
            for &(e, o) in &edges {
                if o != y {
                    continue;
                }
                owns_any = true;
                let val = if inst.edge(e).is_incident(x) {
                    weight(e)
                } else {
                    0
                };
                view += val;
                min_removal = min_removal.min(val);
            }
            if owns_any && u_x < view - min_removal {
                return false;
            }
        }
    }
    true
}

/// Candidate completions for one gadget, best guesses first.
fn candidates_for(
    inst: &Instance,
    info: &GadgetInfo,
    pi: &PartialOrientation,
    w: &Weights,
) -> Vec<Candidate> {
    let mut raw: Vec<Candidate> = Vec::new();
    match info.kind {
        GadgetKind::Dup => {
            let vs = &info.vertices;
            let (a, b, c, d) = (vs[0], vs[1], vs[2], vs[3]);
            let (ad, bc) = (info.internal_edges[0], info.internal_edges[1]);
            raw = vec![
                vec![(ad, d), (bc, b)],
                vec![(ad, d), (bc, c)],
                vec![(ad, a), (bc, c)],
                vec![(ad, a), (bc, b)],
            ];
            // Mirror the preference order when the copied value is false.
            if pi.owner(info.boundary[0]) != Some(a) {
                raw.reverse();
            }
        }
        GadgetKind::Not => {
            let [head, tail] = not_patterns(info);
            // The consumed edge feeds the u row's a1 exactly when true.
            if pi.owner(info.boundary[0]) == Some(info.vertices[0]) {
                raw.push(head);
                raw.push(tail);
            } else {
                raw.push(tail);
                raw.push(head);
            }
            push_enumerated(inst, info, &mut raw);
        }
        GadgetKind::True => {
            raw.push(true_pattern(info));
            push_enumerated(inst, info, &mut raw);
        }
        GadgetKind::Or => {
            push_enumerated(inst, info, &mut raw);
        }
        GadgetKind::Pad => {
            // Heavy to one side, lights to the other: neither side strongly
            // envies, whatever q is.
            let (c1, c2) = (info.vertices[0], info.vertices[1]);
            raw.push(
                info.internal_edges
                    .iter()
                    .map(|&e| (e, if inst.edge(e).is_heavy() { c1 } else { c2 }))
                    .collect(),
            );
            push_enumerated(inst, info, &mut raw);
        }
    }
    let privates: Vec<VertexId> = private_positions(info.kind)
        .iter()
        .map(|&p| info.vertices[p])
        .collect();
    let mut out: Vec<Candidate> = Vec::new();
    for cand in raw {
        if locally_sound(inst, info, pi, &cand, &privates, w) && !out.contains(&cand) {
            out.push(cand);
        }
    }
    out
}

/// Strong envy of `x` toward `y` in scaled-integer arithmetic.
fn strong_envy_fast(
    inst: &Instance,
    pi: &PartialOrientation,
    w: &Weights,
    edges_at: &[Vec<EdgeId>],
    x: VertexId,
    y: VertexId,
) -> bool {
    let weight = |e: EdgeId| if inst.edge(e).is_heavy() { w.a } else { w.b };
    let mut u_x = 0i128;
    let mut view = 0i128;
    let mut min_removal = i128::MAX;
    let mut shared = 0usize;
    for &e in &edges_at[x] {
        match pi.owner(e) {
            Some(o) if o == x => u_x += weight(e),
            Some(o) if o == y => {
                view += weight(e);
                min_removal = min_removal.min(weight(e));
                shared += 1;
            }
            _ => {}
        }
    }
    if view == 0 {
        return false;
    }
    let owned = edges_at[y]
        .iter()
        .filter(|&&e| pi.owner(e) == Some(y))
        .count();
    if owned > shared {
        // y also owns something worthless to x; removing that keeps the
        // whole visible value on the table.
        min_removal = 0;
    }
    u_x < view - min_removal
}

/// After a placement, any finalized vertex that strongly envies stays that
/// way: its utility is fixed and envied bundles only grow. Only pairs
/// touching the gadget's vertices can have changed.
fn creates_strong_envy(
    inst: &Instance,
    pi: &PartialOrientation,
    info: &GadgetInfo,
    w: &Weights,
    edges_at: &[Vec<EdgeId>],
    neighbors: &[Vec<VertexId>],
) -> bool {
    let finalized = |v: VertexId| edges_at[v].iter().all(|&e| pi.owner(e).is_some());
    for &v in &info.vertices {
        if finalized(v) {
            for &y in &neighbors[v] {
                if strong_envy_fast(inst, pi, w, edges_at, v, y) {
                    return true;
                }
            }
        }
        for &x in &neighbors[v] {
            if finalized(x) && strong_envy_fast(inst, pi, w, edges_at, x, v) {
                return true;
            }
        }
    }
    false
}

/// Search-node cap; conflicts between gadgets are local, so real searches
/// resolve far below this.
const NODE_LIMIT: u64 = 2_000_000;

#[allow(clippy::too_many_arguments)]
fn dfs(
    inst: &Instance,
    map: &ReductionMap,
    candidates: &[Vec<Candidate>],
    level: usize,
    pi: &mut PartialOrientation,
    w: &Weights,
    edges_at: &[Vec<EdgeId>],
    neighbors: &[Vec<VertexId>],
    nodes: &mut u64,
) -> bool {
    if level == candidates.len() {
        return is_efx(inst, pi);
    }
    for cand in &candidates[level] {
        *nodes += 1;
        if *nodes > NODE_LIMIT {
            return false;
        }
        for &(e, o) in cand {
            pi.assign(inst, e, o)
                .expect("internal edges start unoriented");
        }
        let ok = !creates_strong_envy(inst, pi, &map.gadgets[level], w, edges_at, neighbors)
            && dfs(
                inst,
                map,
                candidates,
                level + 1,
                pi,
                w,
                edges_at,
                neighbors,
                nodes,
            );
        if ok {
            return true;
        }
        for &(e, _) in cand {
            pi.clear(e);
        }
    }
    false
}

/// Builds a complete EFX orientation of the reduced instance realizing the
/// given assignment, or `None` if the assignment does not satisfy the
/// circuit (or misses an input).
pub fn construct_orientation_from_assignment(
    inst: &Instance,
    map: &ReductionMap,
    assignment: &BTreeMap<String, bool>,
) -> Option<PartialOrientation> {
    let values = map.circuit.wire_values(assignment)?;
    if !values[&map.circuit.output] {
        return None;
    }
    let mut pi = PartialOrientation::empty(inst.edge_count());
    for wire in &map.wires {
        let val = values[&wire.name];
        for tap in &wire.taps {
            pi.assign(inst, tap.edge, if val { tap.red } else { tap.black })
                .expect("value edges are distinct");
        }
    }
    let w = scaled_weights(inst);
    let candidates: Vec<Vec<Candidate>> = map
        .gadgets
        .iter()
        .map(|g| candidates_for(inst, g, &pi, &w))
        .collect();
    let edges_at: Vec<Vec<EdgeId>> = (0..inst.vertex_count()).map(|v| inst.edges_at(v)).collect();
    let neighbors = inst.adjacency();
    let mut nodes = 0u64;
    if dfs(
        inst,
        map,
        &candidates,
        0,
        &mut pi,
        &w,
        &edges_at,
        &neighbors,
        &mut nodes,
    ) {
        debug_assert!(pi.is_complete());
        Some(pi)
    } else {
        None
    }
}
