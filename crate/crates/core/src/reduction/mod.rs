//! Circuit-satisfiability reduction.
//!
//! [`build_instance`] turns a boolean circuit over NOT and OR gates into a
//! bi-valued multigraph whose complete EFX orientations correspond exactly
//! to the satisfying assignments of the circuit. Every wire is represented
//! by one or more heavy *value edges*, each joining a red and a black
//! vertex; orienting a value edge toward its red endpoint means the wire
//! carries `true`. Gates become gadgets glued onto the value edges of their
//! operands, fan-out is handled by chains of duplicator gadgets, and a final
//! anchor gadget attached to the output wire only admits EFX completions
//! when that wire is true.
//!
//! The companion [`ReductionMap`] records where everything ended up, so an
//! orientation of the built instance can be decoded back into an assignment
//! ([`extract_assignment`]) and a satisfying assignment can be turned into a
//! concrete EFX orientation ([`construct_orientation_from_assignment`]).

mod construct;
mod gadgets;

pub use construct::construct_orientation_from_assignment;
pub use gadgets::{
    dup_gadget, h_gadget, not_gadget, or_gadget, true_gadget, DupGadget, HGadget, NotGadget,
    OrGadget, TrueGadget,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::circuit::{normalize_circuit, Circuit, GateOp};
use crate::instance::{EdgeId, Instance, InstanceError, VertexId};
use crate::orientation::PartialOrientation;
use crate::rational::Rational;
use crate::structure::{analyze_heavy_components, Classification};

use gadgets::{
    input_edge, instantiate_dup, instantiate_not, instantiate_or, instantiate_pad,
    instantiate_true, Builder,
};

/// Side of the bipartition a vertex lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Color {
    Red,
    Black,
}

/// One usable copy of a wire's value edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tap {
    pub edge: EdgeId,
    pub red: VertexId,
    pub black: VertexId,
}

/// All value edges belonging to one wire.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireInfo {
    pub name: String,
    /// Copies in chain order; index 0 is the wire's defining edge, each
    /// later tap is produced by a duplicator fed from the previous one.
    pub taps: Vec<Tap>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetKind {
    Not,
    Or,
    Dup,
    True,
    /// Detached q-wide parallel class (one heavy, q - 1 lights); present
    /// when q > 2.
    Pad,
}

/// Footprint of one instantiated gadget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetInfo {
    pub kind: GadgetKind,
    /// Gadget vertices in role order; see the `instantiate_*` builders in
    /// `gadgets` for what each position means.
    pub vertices: Vec<VertexId>,
    /// Edges owned by the gadget, excluding consumed and produced value
    /// edges, in the fixed order the completion search relies on.
    pub internal_edges: Vec<EdgeId>,
    /// Consumed value edges, then the produced one (if any).
    pub boundary: Vec<EdgeId>,
}

/// Everything needed to move between circuit and instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReductionMap {
    pub q: usize,
    pub alpha: Rational,
    pub beta: Rational,
    /// The normalized circuit, stored in its text form.
    #[serde(with = "circuit_text")]
    pub circuit: Circuit,
    /// Bipartition side per vertex.
    pub colors: Vec<Color>,
    /// Wires in definition order (inputs first, then gate outputs).
    pub wires: Vec<WireInfo>,
    /// Gadgets in construction order.
    pub gadgets: Vec<GadgetInfo>,
}

impl ReductionMap {
    pub fn wire(&self, name: &str) -> Option<&WireInfo> {
        self.wires.iter().find(|w| w.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("map serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

mod circuit_text {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::circuit::{parse_circuit, Circuit};

    pub fn serialize<S: Serializer>(c: &Circuit, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&c.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Circuit, D::Error> {
        let text = String::deserialize(d)?;
        parse_circuit(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReductionError {
    #[error("parallel budget q must be at least 2, got {0}")]
    MultiplicityTooSmall(usize),
    #[error("gadgets require alpha > q * beta, got alpha {alpha}, beta {beta}, q {q}")]
    WeightsTooClose {
        alpha: Rational,
        beta: Rational,
        q: usize,
    },
    #[error("gadgets require beta > 0, got beta {0}")]
    BetaNotPositive(Rational),
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

fn check_parameters(q: usize, alpha: Rational, beta: Rational) -> Result<(), ReductionError> {
    if q < 2 {
        return Err(ReductionError::MultiplicityTooSmall(q));
    }
    // Forcing leans on strict envy after dropping one light; a worthless
    // light drops for free and the gadget rows stop forcing anything.
    if beta <= Rational::zero() {
        return Err(ReductionError::BetaNotPositive(beta));
    }
    if alpha <= beta.scaled(q) {
        return Err(ReductionError::WeightsTooClose { alpha, beta, q });
    }
    Ok(())
}

struct WireState {
    taps: Vec<Tap>,
    used: usize,
}

fn open_wire(
    name: &str,
    first: Tap,
    fanout: usize,
    bld: &mut Builder,
    gadgets: &mut Vec<GadgetInfo>,
    wires: &mut BTreeMap<String, WireState>,
    order: &mut Vec<String>,
) {
    let mut taps = vec![first];
    for _ in 1..fanout {
        let (next, info) = instantiate_dup(bld, *taps.last().expect("nonempty"));
        gadgets.push(info);
        taps.push(next);
    }
    wires.insert(name.to_string(), WireState { taps, used: 0 });
    order.push(name.to_string());
}

fn consume(wires: &mut BTreeMap<String, WireState>, name: &str) -> Tap {
    let state = wires.get_mut(name).expect("wire defined before use");
    let tap = state.taps[state.used];
    state.used += 1;
    tap
}

/// Builds the multigraph for `circuit` with parallel budget `q` and weights
/// `alpha`, `beta`. The circuit is normalized first, so the result always
/// contains at least one inverter, whose rows realize a parallel class of
/// width two; for q > 2 a detached width pad of q parallel edges realizes
/// the rest of the budget (see the notes on `gadgets::instantiate_not`).
pub fn build_instance(
    circuit: &Circuit,
    q: usize,
    alpha: Rational,
    beta: Rational,
) -> Result<(Instance, ReductionMap), ReductionError> {
    check_parameters(q, alpha, beta)?;
    let circuit = normalize_circuit(circuit.clone());

    // A wire is tapped once per operand use plus once if it is the output.
    let mut fanout: BTreeMap<&str, usize> = BTreeMap::new();
    for gate in &circuit.gates {
        match &gate.op {
            GateOp::Not(a) => *fanout.entry(a.as_str()).or_insert(0) += 1,
            GateOp::Or(a, b) => {
                *fanout.entry(a.as_str()).or_insert(0) += 1;
                *fanout.entry(b.as_str()).or_insert(0) += 1;
            }
        }
    }
    *fanout.entry(circuit.output.as_str()).or_insert(0) += 1;

    let mut bld = Builder::new();
    let mut gadgets: Vec<GadgetInfo> = Vec::new();
    let mut wires: BTreeMap<String, WireState> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();

    for name in &circuit.inputs {
        let tap = input_edge(&mut bld);
        let f = fanout.get(name.as_str()).copied().unwrap_or(0);
        open_wire(name, tap, f, &mut bld, &mut gadgets, &mut wires, &mut order);
    }
    for gate in &circuit.gates {
        let (tap, info) = match &gate.op {
            GateOp::Not(a) => {
                let x = consume(&mut wires, a);
                instantiate_not(&mut bld, x)
            }
            GateOp::Or(a, b) => {
                let x = consume(&mut wires, a);
                let y = consume(&mut wires, b);
                instantiate_or(&mut bld, x, y)
            }
        };
        gadgets.push(info);
        let f = fanout.get(gate.out.as_str()).copied().unwrap_or(0);
        open_wire(
            &gate.out,
            tap,
            f,
            &mut bld,
            &mut gadgets,
            &mut wires,
            &mut order,
        );
    }
    let out_tap = consume(&mut wires, &circuit.output);
    gadgets.push(instantiate_true(&mut bld, out_tap));
    if q > 2 {
        gadgets.push(instantiate_pad(&mut bld, q));
    }

    debug_assert!(wires
        .values()
        .all(|s| s.used == s.taps.len() || (s.used == 0 && s.taps.len() == 1)));

    let inst = bld.finish(alpha, beta)?;
    let map = ReductionMap {
        q,
        alpha,
        beta,
        circuit,
        colors: bld.colors.clone(),
        wires: order
            .iter()
            .map(|name| WireInfo {
                name: name.clone(),
                taps: wires[name].taps.clone(),
            })
            .collect(),
        gadgets,
    };
    Ok((inst, map))
}

/// Reads the input truth values off an orientation: a value edge oriented
/// toward its red endpoint means true. Unoriented value edges read as false.
pub fn extract_assignment(map: &ReductionMap, pi: &PartialOrientation) -> BTreeMap<String, bool> {
    map.circuit
        .inputs
        .iter()
        .map(|name| {
            let wire = map.wire(name).expect("input wire present in map");
            let tap = wire.taps[0];
            (name.clone(), pi.owner(tap.edge) == Some(tap.red))
        })
        .collect()
}

/// Structural invariants every built instance satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionReport {
    /// Every edge joins a red and a black vertex under the map's coloring.
    pub bipartite_consistent: bool,
    /// alpha > q * beta.
    pub weights_separated: bool,
    /// The largest parallel class has exactly q edges.
    pub multiplicity_matches: bool,
    /// Every heavy component is an odd multitree, the shape the direct
    /// solver refuses; existence of EFX orientations is thus governed by
    /// the circuit alone.
    pub heavy_components_forbidden: bool,
}

impl ReductionReport {
    pub fn all_pass(&self) -> bool {
        self.bipartite_consistent
            && self.weights_separated
            && self.multiplicity_matches
            && self.heavy_components_forbidden
    }
}

pub fn verify_reduction_properties(inst: &Instance, map: &ReductionMap) -> ReductionReport {
    let bipartite_consistent = map.colors.len() == inst.vertex_count()
        && inst
            .edges()
            .iter()
            .all(|e| !e.is_loop() && map.colors[e.u] != map.colors[e.v]);
    let weights_separated = inst.alpha() > inst.beta().scaled(map.q);
    let multiplicity_matches = inst.multiplicity() == map.q;
    let infos = analyze_heavy_components(inst);
    let heavy_components_forbidden = !infos.is_empty()
        && infos
            .iter()
            .all(|info| info.classification == Classification::ForbiddenOddMultitree);
    ReductionReport {
        bipartite_consistent,
        weights_separated,
        multiplicity_matches,
        heavy_components_forbidden,
    }
}
