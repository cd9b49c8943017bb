//! Labeled-edge triangulations and the reduction of edge-flip sequences.
//!
//! Every edge carries a label that survives flips: flipping edge `i` moves the
//! label onto the new diagonal. Sequences of flips are then plain label lists,
//! and rewriting them (commuting independent flips, cancelling `[i, i]`,
//! replacing `[x, y, x]` by `[y, x]` plus a label swap) produces shorter
//! sequences reaching the same triangulation up to labels.
//!
//! The kernel is generic over the coordinate scalar through [`Coordinate`];
//! the aliases below fix the common choices.

pub mod algebra;
pub mod bench;
pub mod io;
pub mod ngon;
pub mod reducer;
pub mod scalar;
pub mod seqgen;
pub mod tri;

pub use algebra::{FlipSequence, RewriteStep, SeqError};
pub use reducer::{reduce, ReductionReport};
pub use scalar::{Coordinate, Point};
pub use tri::{make_fan, EdgeLabel, FlipViolation, LabeledTriangulation, Setting, Support, TriError, VertexId};

/// Integer-grid triangulation, the form read and written by the file formats.
pub type Triangulation = LabeledTriangulation<i64>;

/// Triangulation with exact rational coordinates.
pub type RationalTriangulation = LabeledTriangulation<num_rational::BigRational>;

/// Triangulation with `f64` coordinates; predicates still evaluate exactly.
pub type FloatTriangulation = LabeledTriangulation<f64>;
