//! Circular arc families on a labeled cycle, the shade/shadow operators on
//! them, structural predicates, named extremal constructions, exact averaging
//! over cyclic orders, and an exact branch-and-bound engine that checks
//! extremal bounds on small ground sets.

pub mod averaging;
pub mod circle;
pub mod constructions;
pub mod error;
pub mod operators;
pub mod predicates;
pub mod search;

pub use circle::{
    all_arcs, arc_head_tail, arc_mask, arc_points, complement_arc, complement_family, full_level,
    symmetry_orbit, Arc, ArcFamily, Family, GroundSet, PointSet, SetFamily, MAX_N,
};
pub use error::{Error, Result};
