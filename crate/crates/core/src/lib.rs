//! Invariants of planar face-up configurations of the Rubik's Magic puzzle.
//!
//! The crate enumerates canonical direction words, their admissible stackings
//! (assemblages), and computes the metric invariant Δ and the linking number L
//! of the boundary curves of the ribbon threaded through the tiles.

pub mod assemblage;
pub mod classify;
pub mod linking;
pub mod ribbon;
pub mod sequence;

pub use sequence::{
    enumerate_canonical, parse_sequence, Cell, Dihedral, Direction, FlapAxis, Sequence,
    SequenceError, TileClass, TileNode, TileType, Transform,
};
pub use assemblage::{
    enumerate_assemblages, format_assemblage, is_admissible_assemblage, parse_assemblage,
    Assemblage, AssemblageError, FlapAttitude, FlapSense, MetricReport,
};
pub use ribbon::{build_ribbon, check_length, twist, Face, HalfInt, RibbonEvent, RibbonPath, TwistReport};
pub use classify::{
    classify, classify_all, table, ClassificationTable, ClassifyError, CuratedSet, SequenceRecord,
    Verdict,
};
pub use linking::{
    embed, link_report, linking_number, signed_crossings, Crossing, EmbeddingParams, LinkReport,
    LinkingError, Polyline3,
};
