//! Twin-width machinery for finite totally ordered binary structures.

pub mod error;
pub mod partition;
pub mod structure;

pub use error::{Error, Result};
pub use partition::{
    order_from_contraction, red_degree, verify_contraction_sequence, ContractionSequence,
    ConvexPartition, Partition,
};
pub use structure::{
    is_homogeneous, types_count, AtomicTypeCode, OrderRel, OrderedStructure, Signature,
};
pub mod builder;
pub mod census;
pub mod exact;
pub mod logic;
pub mod minors;
pub mod semigrid;
