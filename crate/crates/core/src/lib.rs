//! Toolkit for right-angled Artin groups: graphs, words, automorphisms,
//! abelianized lifts, finite-index subgroups and torsion bounds.

pub mod automorphism;
pub mod error;
pub mod graph;
pub mod intmat;
pub mod lift;
pub mod subgroup;
pub mod torsion;
pub mod word;

pub use error::{Error, Result};
pub use graph::{SimpleGraph, Vertex, VertexSet};
pub use word::{Letter, Word};
