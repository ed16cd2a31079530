//! EFX orientations of bi-valued symmetric multigraphs.
//!
//! Edges are goods shared by their endpoints: an orientation gives each
//! edge to one endpoint, and a vertex values an edge only if the edge
//! touches it. Every edge weighs either `alpha` (heavy) or `beta`
//! (light), with `alpha > beta >= 0`. The crate decides whether an
//! envy-free-up-to-any-good (EFX) orientation exists, constructs one when
//! it does, and provides the building blocks behind that decision:
//! structural analysis of the heavy subgraph, fairness checking,
//! exhaustive oracles for small instances, instance generation, and a
//! reduction from circuit satisfiability that pins down the hardness of
//! the general question.

pub mod circuit;
pub mod fairness;
pub mod generate;
pub mod instance;
pub mod oracle;
pub mod orientation;
pub mod rational;
pub mod reduction;
pub mod solver;
pub mod structure;
