//! Exhaustive EFX-existence ground truth for small instances.
//!
//! Enumerating all `2^m` orientations is wasteful: parallel edges of the
//! same weight class are interchangeable goods, so EFX status depends only
//! on *how many* edges of each (endpoint pair, weight class) group go to
//! each side. The oracle therefore enumerates one canonical representative
//! per split profile: for a group of `k` free edges there are `k + 1`
//! choices instead of `2^k`. Self-loops are forced to their only legal
//! owner, and constrained edges are pinned and excluded from the
//! interchangeable pool.
//!
//! The per-candidate check runs on integer-scaled weights to keep the inner
//! loop on machine arithmetic; public verifiers elsewhere stay on exact
//! rationals, and the two agree (see the cross-validation tests).

use std::collections::BTreeMap;

use num_integer::Integer;

use crate::instance::{EdgeClass, EdgeId, Instance, VertexId};
use crate::orientation::PartialOrientation;

/// Default cap on enumerated representatives.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

/// Oracle failures.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("{representatives} representatives exceed the budget of {budget}")]
    BudgetExceeded { representatives: u128, budget: u64 },
    #[error("edge {edge} cannot be owned by vertex {owner}")]
    InvalidConstraint { edge: EdgeId, owner: VertexId },
    #[error("edge {edge} is constrained to both {first} and {second}")]
    ContradictoryConstraint {
        edge: EdgeId,
        first: VertexId,
        second: VertexId,
    },
    #[error("constraint references edge {edge} but the instance has {edges} edges")]
    EdgeOutOfRange { edge: EdgeId, edges: usize },
}

/// A set of forced edge orientations.
#[derive(Clone, Default, Debug, PartialEq, Eq)]
pub struct Constraints {
    fixed: BTreeMap<EdgeId, VertexId>,
}

impl Constraints {
    pub fn none() -> Self {
        Constraints::default()
    }

    /// Pins `edge` to `owner`. Owners must be endpoints; pinning the same
    /// edge twice to different owners is a contradiction.
    pub fn fix(
        &mut self,
        inst: &Instance,
        edge: EdgeId,
        owner: VertexId,
    ) -> Result<(), OracleError> {
        if edge >= inst.edge_count() {
            return Err(OracleError::EdgeOutOfRange {
                edge,
                edges: inst.edge_count(),
            });
        }
        if !inst.edge(edge).is_incident(owner) {
            return Err(OracleError::InvalidConstraint { edge, owner });
        }
        if let Some(&existing) = self.fixed.get(&edge) {
            if existing != owner {
                return Err(OracleError::ContradictoryConstraint {
                    edge,
                    first: existing,
                    second: owner,
                });
            }
            return Ok(());
        }
        self.fixed.insert(edge, owner);
        Ok(())
    }

    pub fn from_pairs(
        inst: &Instance,
        pairs: impl IntoIterator<Item = (EdgeId, VertexId)>,
    ) -> Result<Self, OracleError> {
        let mut c = Constraints::none();
        for (e, v) in pairs {
            c.fix(inst, e, v)?;
        }
        Ok(c)
    }

    pub fn owner_of(&self, edge: EdgeId) -> Option<VertexId> {
        self.fixed.get(&edge).copied()
    }
}

/// How one weight-refined parallel class is divided: `toward_lo` of its
/// edges go to the lower endpoint, the rest to the higher one. Canonical
/// expansion sends the lowest free edge ids toward the lower endpoint.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct ClassSplit {
    pub lo: VertexId,
    pub hi: VertexId,
    pub class: EdgeClass,
    pub toward_lo: usize,
}

struct RefinedClass {
    lo: VertexId,
    hi: VertexId,
    class: EdgeClass,
    /// Unconstrained member edge ids, ascending.
    free: Vec<EdgeId>,
    forced_lo: usize,
    forced_hi: usize,
}

struct Context<'a> {
    inst: &'a Instance,
    constraints: &'a Constraints,
    /// Scaled integer weights: heavy = `a`, light = `b` over a common denominator.
    a: i128,
    b: i128,
    classes: Vec<RefinedClass>,
    /// Pairs with at least one non-loop class: (lo, hi, heavy class index, light class index).
    pairs: Vec<(VertexId, VertexId, Option<usize>, Option<usize>)>,
    /// Per-vertex value/count contributed by self-loops (always owned).
    loop_value: Vec<i128>,
    loop_count: Vec<usize>,
    loop_edges: Vec<(EdgeId, VertexId)>,
}

impl<'a> Context<'a> {
    fn build(inst: &'a Instance, constraints: &'a Constraints) -> Result<Self, OracleError> {
        for (&edge, &owner) in &constraints.fixed {
            if edge >= inst.edge_count() {
                return Err(OracleError::EdgeOutOfRange {
                    edge,
                    edges: inst.edge_count(),
                });
            }
            if !inst.edge(edge).is_incident(owner) {
                return Err(OracleError::InvalidConstraint { edge, owner });
            }
        }
        let alpha = inst.alpha();
        let beta = inst.beta();
        let denom_lcm = alpha.denom().lcm(&beta.denom());
        let a = alpha.numer() * (denom_lcm / alpha.denom());
        let b = beta.numer() * (denom_lcm / beta.denom());

        let n = inst.vertex_count();
        let mut loop_value = vec![0i128; n];
        let mut loop_count = vec![0usize; n];
        let mut loop_edges = Vec::new();
        let mut groups: BTreeMap<(VertexId, VertexId, EdgeClass), RefinedClass> = BTreeMap::new();
        for e in inst.edges() {
            if e.is_loop() {
                loop_value[e.u] += if e.is_heavy() { a } else { b };
                loop_count[e.u] += 1;
                loop_edges.push((e.id, e.u));
                continue;
            }
            let (lo, hi) = e.key();
            let slot = groups
                .entry((lo, hi, e.class))
                .or_insert_with(|| RefinedClass {
                    lo,
                    hi,
                    class: e.class,
                    free: Vec::new(),
                    forced_lo: 0,
                    forced_hi: 0,
                });
            match constraints.owner_of(e.id) {
                Some(owner) if owner == lo => slot.forced_lo += 1,
                Some(_) => slot.forced_hi += 1,
                None => slot.free.push(e.id),
            }
        }
        let classes: Vec<RefinedClass> = groups.into_values().collect();
        let mut pair_index: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
        let mut pairs: Vec<(VertexId, VertexId, Option<usize>, Option<usize>)> = Vec::new();
        for (idx, c) in classes.iter().enumerate() {
            let slot = *pair_index.entry((c.lo, c.hi)).or_insert_with(|| {
                pairs.push((c.lo, c.hi, None, None));
                pairs.len() - 1
            });
            match c.class {
                EdgeClass::Heavy => pairs[slot].2 = Some(idx),
                EdgeClass::Light => pairs[slot].3 = Some(idx),
            }
        }
        Ok(Context {
            inst,
            constraints,
            a,
            b,
            classes,
            pairs,
            loop_value,
            loop_count,
            loop_edges,
        })
    }

    fn representatives(&self) -> u128 {
        self.classes
            .iter()
            .map(|c| c.free.len() as u128 + 1)
            .product()
    }

    /// EFX check for the candidate described by per-class `toward_lo` counts.
    fn is_efx(&self, toward_lo: &[usize], scratch: &mut Scratch) -> bool {
        scratch.reset(self);
        for (idx, c) in self.classes.iter().enumerate() {
            let n_lo = c.forced_lo + toward_lo[idx];
            let n_hi = c.forced_hi + c.free.len() - toward_lo[idx];
            let w = match c.class {
                EdgeClass::Heavy => self.a,
                EdgeClass::Light => self.b,
            };
            scratch.value[c.lo] += w * n_lo as i128;
            scratch.value[c.hi] += w * n_hi as i128;
            scratch.count[c.lo] += n_lo;
            scratch.count[c.hi] += n_hi;
            scratch.n_lo[idx] = n_lo;
            scratch.n_hi[idx] = n_hi;
        }
        for &(lo, hi, heavy, light) in &self.pairs {
            let (h_lo, h_hi) = heavy.map_or((0, 0), |i| (scratch.n_lo[i], scratch.n_hi[i]));
            let (l_lo, l_hi) = light.map_or((0, 0), |i| (scratch.n_lo[i], scratch.n_hi[i]));
            if self.pair_has_strong_envy(scratch, lo, hi, h_hi, l_hi)
                || self.pair_has_strong_envy(scratch, hi, lo, h_lo, l_lo)
            {
                return false;
            }
        }
        true
    }

    /// Strong envy of `i` toward `j`, where `j` owns `h` heavy and `l` light
    /// edges of the pair `{i, j}`.
    fn pair_has_strong_envy(
        &self,
        scratch: &Scratch,
        i: VertexId,
        j: VertexId,
        h: usize,
        l: usize,
    ) -> bool {
        if h == 0 && l == 0 {
            return false;
        }
        let between = self.a * h as i128 + self.b * l as i128;
        let u_i = scratch.value[i];
        if u_i >= between {
            return false;
        }
        // Envy exists. The cheapest removable good from i's perspective:
        // junk (worth 0 to i) if j owns anything outside the pair, else the
        // lightest edge between them.
        let junk = scratch.count[j] > h + l;
        let min_removal = if junk {
            0
        } else if l > 0 {
            self.b
        } else {
            self.a
        };
        u_i < between - min_removal
    }

    /// Canonical expansion of a candidate into a complete orientation.
    fn expand(&self, toward_lo: &[usize]) -> PartialOrientation {
        let mut pi = PartialOrientation::empty(self.inst.edge_count());
        for &(e, v) in &self.loop_edges {
            pi.assign(self.inst, e, v).expect("loop expansion");
        }
        for (&e, &owner) in &self.constraints.fixed {
            if !self.inst.edge(e).is_loop() {
                pi.assign(self.inst, e, owner)
                    .expect("constraint expansion");
            }
        }
        for (idx, c) in self.classes.iter().enumerate() {
            for (pos, &e) in c.free.iter().enumerate() {
                let owner = if pos < toward_lo[idx] { c.lo } else { c.hi };
                pi.assign(self.inst, e, owner).expect("class expansion");
            }
        }
        pi
    }
}

struct Scratch {
    value: Vec<i128>,
    count: Vec<usize>,
    n_lo: Vec<usize>,
    n_hi: Vec<usize>,
}

impl Scratch {
    fn new(ctx: &Context) -> Self {
        Scratch {
            value: vec![0; ctx.inst.vertex_count()],
            count: vec![0; ctx.inst.vertex_count()],
            n_lo: vec![0; ctx.classes.len()],
            n_hi: vec![0; ctx.classes.len()],
        }
    }

    fn reset(&mut self, ctx: &Context) {
        self.value.copy_from_slice(&ctx.loop_value);
        self.count.copy_from_slice(&ctx.loop_count);
    }
}

/// Number of canonical representatives the oracle would enumerate.
pub fn representative_count(
    inst: &Instance,
    constraints: &Constraints,
) -> Result<u128, OracleError> {
    Ok(Context::build(inst, constraints)?.representatives())
}

fn check_budget(ctx: &Context, budget: u64) -> Result<(), OracleError> {
    let reps = ctx.representatives();
    if reps > budget as u128 {
        return Err(OracleError::BudgetExceeded {
            representatives: reps,
            budget,
        });
    }
    Ok(())
}

/// Odometer over per-class split counts. `None` once exhausted.
fn advance(toward_lo: &mut [usize], limits: &[usize]) -> bool {
    for i in (0..toward_lo.len()).rev() {
        if toward_lo[i] < limits[i] {
            toward_lo[i] += 1;
            for t in toward_lo.iter_mut().skip(i + 1) {
                *t = 0;
            }
            return true;
        }
    }
    false
}

/// All canonical representatives, in odometer order. Intended for small
/// instances and tests; `exists`/`all` below avoid materializing
/// non-witnesses.
pub fn enumerate_orientations(
    inst: &Instance,
    constraints: &Constraints,
    budget: u64,
) -> Result<Vec<PartialOrientation>, OracleError> {
    let ctx = Context::build(inst, constraints)?;
    check_budget(&ctx, budget)?;
    let limits: Vec<usize> = ctx.classes.iter().map(|c| c.free.len()).collect();
    let mut toward_lo = vec![0usize; limits.len()];
    let mut out = Vec::new();
    loop {
        out.push(ctx.expand(&toward_lo));
        if !advance(&mut toward_lo, &limits) {
            return Ok(out);
        }
    }
}

fn scan<F: FnMut(&Context, &[usize]) -> bool>(
    inst: &Instance,
    constraints: &Constraints,
    budget: u64,
    mut visit: F,
) -> Result<(), OracleError> {
    let ctx = Context::build(inst, constraints)?;
    check_budget(&ctx, budget)?;
    let limits: Vec<usize> = ctx.classes.iter().map(|c| c.free.len()).collect();
    let mut toward_lo = vec![0usize; limits.len()];
    let mut scratch = Scratch::new(&ctx);
    loop {
        if ctx.is_efx(&toward_lo, &mut scratch) && !visit(&ctx, &toward_lo) {
            return Ok(());
        }
        if !advance(&mut toward_lo, &limits) {
            return Ok(());
        }
    }
}

/// First EFX orientation in canonical order, if any exists within budget.
pub fn exists_efx_orientation(
    inst: &Instance,
    constraints: &Constraints,
    budget: u64,
) -> Result<Option<PartialOrientation>, OracleError> {
    let mut witness = None;
    scan(inst, constraints, budget, |ctx, toward_lo| {
        witness = Some(ctx.expand(toward_lo));
        false
    })?;
    Ok(witness)
}

/// Every EFX representative, in canonical order.
pub fn all_efx_orientations(
    inst: &Instance,
    constraints: &Constraints,
    budget: u64,
) -> Result<Vec<PartialOrientation>, OracleError> {
    let mut out = Vec::new();
    scan(inst, constraints, budget, |ctx, toward_lo| {
        out.push(ctx.expand(toward_lo));
        true
    })?;
    Ok(out)
}

/// Number of EFX representatives.
pub fn count_efx_orientations(
    inst: &Instance,
    constraints: &Constraints,
    budget: u64,
) -> Result<u64, OracleError> {
    let mut count = 0u64;
    scan(inst, constraints, budget, |_, _| {
        count += 1;
        true
    })?;
    Ok(count)
}
