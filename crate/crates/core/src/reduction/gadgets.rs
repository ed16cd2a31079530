//! Gadget constructions.
//!
//! Every gadget is a small bipartite fragment sharing one or more value
//! edges with the rest of the construction. The `instantiate_*` functions
//! are the single source of truth for the layouts: [`super::build_instance`]
//! composes gadgets through them, the standalone builders below wrap them
//! for direct inspection, and the completion search indexes into the
//! `vertices` / `internal_edges` orders they fix.

use crate::instance::{EdgeClass, EdgeId, Instance, VertexId};
use crate::rational::Rational;

use super::{check_parameters, Color, GadgetInfo, GadgetKind, ReductionError, Tap};

/// Accumulates vertices and edges while gadgets are spliced together.
pub(super) struct Builder {
    pub colors: Vec<Color>,
    pub edges: Vec<(VertexId, VertexId, EdgeClass)>,
}

impl Builder {
    pub fn new() -> Self {
        Builder {
            colors: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn vertex(&mut self, color: Color) -> VertexId {
        self.colors.push(color);
        self.colors.len() - 1
    }

    pub fn edge(&mut self, u: VertexId, v: VertexId, class: EdgeClass) -> EdgeId {
        self.edges.push((u, v, class));
        self.edges.len() - 1
    }

    pub fn finish(&self, alpha: Rational, beta: Rational) -> Result<Instance, ReductionError> {
        Ok(Instance::new(
            self.colors.len(),
            alpha,
            beta,
            self.edges.clone(),
        )?)
    }
}

/// Fresh value edge: a heavy edge on two fresh vertices, red endpoint first.
pub(super) fn input_edge(bld: &mut Builder) -> Tap {
    let red = bld.vertex(Color::Red);
    let black = bld.vertex(Color::Black);
    let edge = bld.edge(red, black, EdgeClass::Heavy);
    Tap { edge, red, black }
}

/// Duplicator: copies a value edge so a wire can feed several consumers.
///
/// Vertices `[a, b, c, d]` where `a`/`b` are the consumed edge's red and
/// black endpoints and `c`-`d` is the produced copy; internal edges
/// `[a-d, b-c]`.
pub(super) fn instantiate_dup(bld: &mut Builder, input: Tap) -> (Tap, GadgetInfo) {
    let c = bld.vertex(Color::Red);
    let d = bld.vertex(Color::Black);
    let out = bld.edge(c, d, EdgeClass::Heavy);
    let ad = bld.edge(input.red, d, EdgeClass::Light);
    let bc = bld.edge(input.black, c, EdgeClass::Light);
    let info = GadgetInfo {
        kind: GadgetKind::Dup,
        vertices: vec![input.red, input.black, c, d],
        internal_edges: vec![ad, bc],
        boundary: vec![input.edge, out],
    };
    (
        Tap {
            edge: out,
            red: c,
            black: d,
        },
        info,
    )
}

/// Inverter: two mirrored five-vertex rows joined by the consumed edge on
/// one side and the produced edge on the other.
///
/// Vertices `[u1, u2, u3, u4, u5, v1, v2, v3, v4, v5]` with `u1 = x.red`,
/// `v5 = x.black`; the produced edge runs `u5` (red) to `v1` (black).
/// Internal edges per row, in order: `a1a2` light, `a2a3` heavy, `a2a3`
/// light, `a3a4` heavy, `a3a4` light, `a4a5` light; the `u` row comes
/// first.
///
/// The rows keep this shape for every q. Widening the `a2a3` class to q - 1
/// spare lights would still force the produced edge (the row fed at `a1`
/// stays a path whose boundary lights cannot both point inward), but it
/// destroys the other polarity outright: a row fed at `a5` has no EFX
/// completion at all once the spares outnumber one, because wherever they
/// land some inner vertex strongly envies a neighbour after dropping the
/// cheapest shared edge. Instances that must exhibit a full q-wide parallel
/// class get it from a detached pad instead ([`instantiate_pad`]).
pub(super) fn instantiate_not(bld: &mut Builder, x: Tap) -> (Tap, GadgetInfo) {
    let u1 = x.red;
    let v5 = x.black;
    let u2 = bld.vertex(Color::Black);
    let u3 = bld.vertex(Color::Red);
    let u4 = bld.vertex(Color::Black);
    let u5 = bld.vertex(Color::Red);
    let v1 = bld.vertex(Color::Black);
    let v2 = bld.vertex(Color::Red);
    let v3 = bld.vertex(Color::Black);
    let v4 = bld.vertex(Color::Red);
    let out = bld.edge(u5, v1, EdgeClass::Heavy);
    let mut internal = Vec::with_capacity(12);
    for (a1, a2, a3, a4, a5) in [(u1, u2, u3, u4, u5), (v1, v2, v3, v4, v5)] {
        internal.push(bld.edge(a1, a2, EdgeClass::Light));
        internal.push(bld.edge(a2, a3, EdgeClass::Heavy));
        internal.push(bld.edge(a2, a3, EdgeClass::Light));
        internal.push(bld.edge(a3, a4, EdgeClass::Heavy));
        internal.push(bld.edge(a3, a4, EdgeClass::Light));
        internal.push(bld.edge(a4, a5, EdgeClass::Light));
    }
    let info = GadgetInfo {
        kind: GadgetKind::Not,
        vertices: vec![u1, u2, u3, u4, u5, v1, v2, v3, v4, v5],
        internal_edges: internal,
        boundary: vec![x.edge, out],
    };
    (
        Tap {
            edge: out,
            red: u5,
            black: v1,
        },
        info,
    )
}

/// Disjunction: consumes `x` and `y`, produces the output value edge.
///
/// Vertices `[a, a', b, b', v, w, u, v', u', c, c']` with `a = x.red`,
/// `a' = x.black`, `b = y.red`, `b' = y.black`; the produced edge runs `c`
/// (red) to `c'` (black). Internal edges, in order: heavies `vw`, `wu`,
/// `vv'`, `uu'`, then lights `a'v`, `wc`, `ub'`, `ac'`, `bc'`.
pub(super) fn instantiate_or(bld: &mut Builder, x: Tap, y: Tap) -> (Tap, GadgetInfo) {
    let v = bld.vertex(Color::Red);
    let w = bld.vertex(Color::Black);
    let u = bld.vertex(Color::Red);
    let vp = bld.vertex(Color::Black);
    let up = bld.vertex(Color::Black);
    let c = bld.vertex(Color::Red);
    let cp = bld.vertex(Color::Black);
    let out = bld.edge(c, cp, EdgeClass::Heavy);
    let internal = vec![
        bld.edge(v, w, EdgeClass::Heavy),
        bld.edge(w, u, EdgeClass::Heavy),
        bld.edge(v, vp, EdgeClass::Heavy),
        bld.edge(u, up, EdgeClass::Heavy),
        bld.edge(x.black, v, EdgeClass::Light),
        bld.edge(w, c, EdgeClass::Light),
        bld.edge(u, y.black, EdgeClass::Light),
        bld.edge(x.red, cp, EdgeClass::Light),
        bld.edge(y.red, cp, EdgeClass::Light),
    ];
    let info = GadgetInfo {
        kind: GadgetKind::Or,
        vertices: vec![x.red, x.black, y.red, y.black, v, w, u, vp, up, c, cp],
        internal_edges: internal,
        boundary: vec![x.edge, y.edge, out],
    };
    (
        Tap {
            edge: out,
            red: c,
            black: cp,
        },
        info,
    )
}

/// Anchor: consumes the circuit's output edge and admits EFX completions
/// only when it points at its red endpoint.
///
/// Vertices `[u1, ..., u9]` with `u9 = out.red`, `u8 = out.black`; `u1` to
/// `u6` form a six-cycle and `u7` sits on the tail `u1-u7-u8`. Internal
/// edges, in order: `u1u2`, `u2u3` heavy, `u2u3` light, `u3u4` heavy,
/// `u3u4` light, `u4u5`, `u5u6` heavy, `u6u1`, `u1u7` heavy, `u7u8`.
pub(super) fn instantiate_true(bld: &mut Builder, out: Tap) -> GadgetInfo {
    let u9 = out.red;
    let u8 = out.black;
    let u1 = bld.vertex(Color::Black);
    let u2 = bld.vertex(Color::Red);
    let u3 = bld.vertex(Color::Black);
    let u4 = bld.vertex(Color::Red);
    let u5 = bld.vertex(Color::Black);
    let u6 = bld.vertex(Color::Red);
    let u7 = bld.vertex(Color::Red);
    let internal = vec![
        bld.edge(u1, u2, EdgeClass::Light),
        bld.edge(u2, u3, EdgeClass::Heavy),
        bld.edge(u2, u3, EdgeClass::Light),
        bld.edge(u3, u4, EdgeClass::Heavy),
        bld.edge(u3, u4, EdgeClass::Light),
        bld.edge(u4, u5, EdgeClass::Light),
        bld.edge(u5, u6, EdgeClass::Heavy),
        bld.edge(u6, u1, EdgeClass::Light),
        bld.edge(u1, u7, EdgeClass::Heavy),
        bld.edge(u7, u8, EdgeClass::Light),
    ];
    GadgetInfo {
        kind: GadgetKind::True,
        vertices: vec![u1, u2, u3, u4, u5, u6, u7, u8, u9],
        internal_edges: internal,
        boundary: vec![out.edge],
    }
}

/// Width pad: one heavy and q - 1 light edges in parallel on two fresh
/// vertices, detached from the rest of the instance. Gadget rows cap their
/// parallel classes at two edges, so for q > 2 this is what realizes the
/// full parallel budget. Heavy to one side and lights to the other is EFX
/// whenever alpha > q beta, and the pair is itself a non-trivial odd
/// multitree, keeping the heavy-component picture all-forbidden.
pub(super) fn instantiate_pad(bld: &mut Builder, q: usize) -> GadgetInfo {
    let c1 = bld.vertex(Color::Red);
    let c2 = bld.vertex(Color::Black);
    let mut internal = vec![bld.edge(c1, c2, EdgeClass::Heavy)];
    for _ in 1..q {
        internal.push(bld.edge(c1, c2, EdgeClass::Light));
    }
    GadgetInfo {
        kind: GadgetKind::Pad,
        vertices: vec![c1, c2],
        internal_edges: internal,
        boundary: Vec::new(),
    }
}

/// A five-vertex path whose two boundary lights cannot both point inward.
///
/// Vertices `0..5`; `e` is the light `0-1`, then `1-2` carries one heavy
/// and q-1 lights, `2-3` one heavy and one light, and `e'` is the light
/// `3-4`. When the middle is isolated from everything else, every EFX
/// orientation pushes `e` toward vertex 0 or `e'` toward vertex 4.
pub struct HGadget {
    pub instance: Instance,
    pub e: EdgeId,
    pub e_prime: EdgeId,
}

pub fn h_gadget(q: usize, alpha: Rational, beta: Rational) -> Result<HGadget, ReductionError> {
    check_parameters(q, alpha, beta)?;
    let mut edges = vec![(0, 1, EdgeClass::Light), (1, 2, EdgeClass::Heavy)];
    for _ in 1..q {
        edges.push((1, 2, EdgeClass::Light));
    }
    edges.push((2, 3, EdgeClass::Heavy));
    edges.push((2, 3, EdgeClass::Light));
    edges.push((3, 4, EdgeClass::Light));
    let e_prime = edges.len() - 1;
    Ok(HGadget {
        instance: Instance::new(5, alpha, beta, edges)?,
        e: 0,
        e_prime,
    })
}

/// A standalone inverter with a free consumed edge.
pub struct NotGadget {
    pub instance: Instance,
    pub x: Tap,
    pub not_x: Tap,
    pub info: GadgetInfo,
}

pub fn not_gadget(q: usize, alpha: Rational, beta: Rational) -> Result<NotGadget, ReductionError> {
    check_parameters(q, alpha, beta)?;
    let mut bld = Builder::new();
    let x = input_edge(&mut bld);
    let (not_x, info) = instantiate_not(&mut bld, x);
    Ok(NotGadget {
        instance: bld.finish(alpha, beta)?,
        x,
        not_x,
        info,
    })
}

/// A standalone disjunction with free consumed edges.
pub struct OrGadget {
    pub instance: Instance,
    pub x: Tap,
    pub y: Tap,
    pub out: Tap,
    pub info: GadgetInfo,
}

pub fn or_gadget(alpha: Rational, beta: Rational) -> Result<OrGadget, ReductionError> {
    let mut bld = Builder::new();
    let x = input_edge(&mut bld);
    let y = input_edge(&mut bld);
    let (out, info) = instantiate_or(&mut bld, x, y);
    Ok(OrGadget {
        instance: bld.finish(alpha, beta)?,
        x,
        y,
        out,
        info,
    })
}

/// A standalone duplicator with a free consumed edge.
pub struct DupGadget {
    pub instance: Instance,
    pub input: Tap,
    pub output: Tap,
    pub info: GadgetInfo,
}

pub fn dup_gadget(alpha: Rational, beta: Rational) -> Result<DupGadget, ReductionError> {
    let mut bld = Builder::new();
    let input = input_edge(&mut bld);
    let (output, info) = instantiate_dup(&mut bld, input);
    Ok(DupGadget {
        instance: bld.finish(alpha, beta)?,
        input,
        output,
        info,
    })
}

/// A standalone anchor with a free consumed edge.
pub struct TrueGadget {
    pub instance: Instance,
    pub true_edge: Tap,
    pub info: GadgetInfo,
}

pub fn true_gadget(alpha: Rational, beta: Rational) -> Result<TrueGadget, ReductionError> {
    // The anchor embeds the q = 2 path shape, so the same separation is
    // required of the weights.
    check_parameters(2, alpha, beta)?;
    let mut bld = Builder::new();
    let true_edge = input_edge(&mut bld);
    let info = instantiate_true(&mut bld, true_edge);
    Ok(TrueGadget {
        instance: bld.finish(alpha, beta)?,
        true_edge,
        info,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i128) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn gadget_sizes() {
        let h = h_gadget(2, rat(3), rat(1)).expect("h");
        assert_eq!(h.instance.vertex_count(), 5);
        assert_eq!(h.instance.edge_count(), 6);
        assert_eq!(h.e, 0);
        assert_eq!(h.e_prime, 5);

        let h3 = h_gadget(3, rat(4), rat(1)).expect("h3");
        assert_eq!(h3.instance.edge_count(), 7);
        assert_eq!(h3.instance.multiplicity(), 3);

        let n = not_gadget(2, rat(3), rat(1)).expect("not");
        assert_eq!(n.instance.vertex_count(), 10);
        assert_eq!(n.instance.edge_count(), 14);
        assert_eq!(n.info.internal_edges.len(), 12);

        // The inverter rows are q-independent; built instances realize the
        // parallel budget through the width pad instead.
        let n3 = not_gadget(3, rat(4), rat(1)).expect("not3");
        assert_eq!(n3.instance.edge_count(), 14);
        assert_eq!(n3.instance.multiplicity(), 2);

        let o = or_gadget(rat(3), rat(1)).expect("or");
        assert_eq!(o.instance.vertex_count(), 11);
        assert_eq!(o.instance.edge_count(), 12);

        let d = dup_gadget(rat(3), rat(1)).expect("dup");
        assert_eq!(d.instance.vertex_count(), 4);
        assert_eq!(d.instance.edge_count(), 4);

        let t = true_gadget(rat(3), rat(1)).expect("true");
        assert_eq!(t.instance.vertex_count(), 9);
        assert_eq!(t.instance.edge_count(), 11);
    }

    #[test]
    fn gadgets_are_bipartite() {
        let n = not_gadget(2, rat(3), rat(1)).expect("not");
        assert!(crate::structure::is_bipartite(&n.instance).is_some());
        let o = or_gadget(rat(3), rat(1)).expect("or");
        assert!(crate::structure::is_bipartite(&o.instance).is_some());
        let t = true_gadget(rat(3), rat(1)).expect("true");
        assert!(crate::structure::is_bipartite(&t.instance).is_some());
    }

    #[test]
    fn parameter_checks() {
        assert!(matches!(
            h_gadget(1, rat(3), rat(1)),
            Err(ReductionError::MultiplicityTooSmall(1))
        ));
        assert!(matches!(
            not_gadget(2, rat(2), rat(1)),
            Err(ReductionError::WeightsTooClose { .. })
        ));
        assert!(matches!(
            h_gadget(2, rat(3), rat(0)),
            Err(ReductionError::BetaNotPositive(_))
        ));
    }
}
