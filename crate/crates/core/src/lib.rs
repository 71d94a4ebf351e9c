//! Untwisted automorphisms of right-angled Artin groups.
//!
//! Words and conjugacy classes ([`word`]), automorphisms built from
//! certified generators ([`automorphism`]), Whitehead partitions
//! ([`partition`]), lexicographic-norm peak reduction ([`mccool`]), and two
//! desk-scale laboratories: balls in the universal cover of the Salvetti
//! complex ([`cube`]) and the Whitehead-move graph of marked Salvettis
//! ([`spine`]).

pub mod automorphism;
pub mod cube;
pub mod error;
pub mod graph;
pub mod mccool;
pub mod partition;
pub mod spine;
pub mod word;

pub use automorphism::{Automorphism, Generator, TransvectionKind};
pub use error::{RaagError, Result};
pub use graph::{Graph, Letter, LetterSet, Vertex, VertexSet};
pub use mccool::{ConstraintFamily, Equivalence, SalvettiState};
pub use partition::{BasedPartition, WhiteheadPartition};
pub use word::{CyclicClass, Word};

/// Three-valued answer for searches that can run out of budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Yes,
    No,
    Unknown,
}
