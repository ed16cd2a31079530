//! Seeded random instance generation.
//!
//! Instances are sampled edge by edge with a per-pair multiplicity cap.
//! Connectivity is established by first wiring a random spanning tree;
//! the forbidden-structure filter works by rejection, retrying the whole
//! draw until the structural analysis finds no refusable heavy component.
//! Everything is driven by a fixed-seed ChaCha stream, so a seed fully
//! determines the instance.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{EdgeClass, Instance, VertexId};
use crate::structure::{connected_components, has_forbidden_structure};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenerateError {
    #[error("{edges} edges cannot span {vertices} vertices")]
    TooFewEdges { edges: usize, vertices: usize },
    #[error("edges require at least one vertex")]
    NoVertices,
    #[error("no instance satisfied the filters after {attempts} attempts")]
    Exhausted { attempts: usize },
    #[error(transparent)]
    Invalid(#[from] crate::instance::InstanceError),
}

#[derive(Debug, Clone)]
pub struct GenerateOptions {
    pub vertices: usize,
    pub edges: usize,
    /// Cap on the number of parallel edges sharing an endpoint pair.
    pub max_multiplicity: usize,
    /// Probability that a sampled edge is heavy.
    pub heavy_density: f64,
    pub alpha: crate::rational::Rational,
    pub beta: crate::rational::Rational,
    pub seed: u64,
    /// Wire a random spanning tree first so the result is connected.
    pub connected: bool,
    /// Reject draws containing a heavy component the solver would refuse.
    pub avoid_forbidden: bool,
}

impl GenerateOptions {
    pub fn new(vertices: usize, edges: usize, seed: u64) -> Self {
        GenerateOptions {
            vertices,
            edges,
            max_multiplicity: 3,
            heavy_density: 0.4,
            alpha: crate::rational::Rational::from_integer(3),
            beta: crate::rational::Rational::from_integer(1),
            seed,
            connected: true,
            avoid_forbidden: true,
        }
    }
}

const ATTEMPTS: usize = 10_000;
const PLACEMENT_RETRIES: usize = 200;

pub fn generate(opts: &GenerateOptions) -> Result<Instance, GenerateError> {
    if opts.vertices == 0 && opts.edges > 0 {
        return Err(GenerateError::NoVertices);
    }
    if opts.connected && opts.vertices > 0 && opts.edges + 1 < opts.vertices {
        return Err(GenerateError::TooFewEdges {
            edges: opts.edges,
            vertices: opts.vertices,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..ATTEMPTS {
        let Some(inst) = draw(opts, &mut rng)? else {
            continue;
        };
        if opts.connected && connected_components(&inst).len() > 1 {
            continue;
        }
        if opts.avoid_forbidden && has_forbidden_structure(&inst) {
            continue;
        }
        return Ok(inst);
    }
    Err(GenerateError::Exhausted { attempts: ATTEMPTS })
}

/// One sampling attempt; `None` when edge placement runs out of room
/// under the multiplicity cap.
fn draw(opts: &GenerateOptions, rng: &mut ChaCha8Rng) -> Result<Option<Instance>, GenerateError> {
    let n = opts.vertices;
    let mut counts: BTreeMap<(VertexId, VertexId), usize> = BTreeMap::new();
    let mut edges: Vec<(VertexId, VertexId, EdgeClass)> = Vec::new();
    let push = |counts: &mut BTreeMap<(VertexId, VertexId), usize>,
                edges: &mut Vec<(VertexId, VertexId, EdgeClass)>,
                u: VertexId,
                v: VertexId,
                class: EdgeClass| {
        let key = (u.min(v), u.max(v));
        let slot = counts.entry(key).or_insert(0);
        if *slot >= opts.max_multiplicity {
            return false;
        }
        *slot += 1;
        edges.push((u, v, class));
        true
    };
    if opts.connected {
        for v in 1..n {
            let u = rng.gen_range(0..v);
            let class = sample_class(rng, opts.heavy_density);
            if !push(&mut counts, &mut edges, u, v, class) {
                return Ok(None);
            }
        }
    }
    while edges.len() < opts.edges {
        let mut placed = false;
        for _ in 0..PLACEMENT_RETRIES {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            let class = sample_class(rng, opts.heavy_density);
            if push(&mut counts, &mut edges, u, v, class) {
                placed = true;
                break;
            }
        }
        if !placed {
            return Ok(None);
        }
    }
    Ok(Some(Instance::new(n, opts.alpha, opts.beta, edges)?))
}

fn sample_class(rng: &mut ChaCha8Rng, heavy_density: f64) -> EdgeClass {
    if rng.gen_bool(heavy_density.clamp(0.0, 1.0)) {
        EdgeClass::Heavy
    } else {
        EdgeClass::Light
    }
}
