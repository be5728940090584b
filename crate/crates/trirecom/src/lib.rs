//! Recombination moves between three-district partitions of a triangular
//! lattice region.
//!
//! The [`pathfinder`] builds, for any two valid nearly balanced partitions, an
//! explicit sequence of recombination steps between them and checks it. The
//! [`oracle`] enumerates small state spaces by brute force for
//! cross-checking.

pub mod cli;
pub mod lattice;
pub mod moves;
pub mod oracle;
pub mod partition;
pub mod pathfinder;
pub mod toolkit;
pub mod trace;

pub use pathfinder::{path, path_with, Granularity, PathError};
pub use trace::{verify_trace, Trace, VerifyError, VerifyReport};
pub use lattice::{build_region, Direction, Slot, Symmetry, TriRegion, Vertex};
pub use moves::{apply_recom, flip_valid, neighborhood_flip_test, recom_valid, reverse, FlipStep, MoveError, RecomStep};
pub use partition::{
    balance_class, case_dispatch, classify, d_neighborhood, exposed_vertices, ground_state, is_cut_vertex,
    is_simply_connected, tricolor_triangles, BalanceClass, Chirality, District, Partition, PartitionError,
    RebalanceCase, SizeTargets, TricolorTriangle,
};
