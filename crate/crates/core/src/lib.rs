//! Fixing-posture planning for assembly on a universal soft jig.
//!
//! The crate is `no_std` (with `alloc`) and holds the pure computational
//! pieces: triangle meshes with a bounding-volume hierarchy, exact distance
//! and penetration queries, uniform-density mass properties, the boolean
//! contact / interference-free / reachable-direction matrices, the
//! step-by-step fixing planner and the jig-displacement metrics.
//!
//! File formats and the command-line front end live in the `jigplan` crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bvh;
pub mod error;
pub mod eval;
pub mod fixtures;
pub mod mass;
pub mod mesh;
pub mod part;
pub mod planner;
pub mod query;
pub mod relations;
mod triangle;

pub use error::{Error, Result};
pub use mesh::{Aabb, TriMesh, Vec3};
pub use part::{AssemblyModel, PartModel, RigidOrientation};
pub use planner::{AssemblySequence, FixingPlan, FixingStep};
pub use relations::{BoolMatrix, Direction, ReachableDirectionList, RelationMatrices, SweepParams};
