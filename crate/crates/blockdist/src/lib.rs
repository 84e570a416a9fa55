//! Exact enumeration and analysis of block-distance tuple sets of integer
//! point sets: under a partition of the ambient dimension into coordinate
//! blocks, every ordered pair of points realizes a tuple of blockwise
//! squared distances, and this crate counts, decomposes, and bounds the set
//! of such tuples.
//!
//! Modules:
//! - [`geometry`]: point sets, partitions, squared block distances, file I/O;
//! - [`bset`]: tuple-set enumeration, multiplicities, quadruple counts, the
//!   second-moment bound, projection bounds, and the product fast path;
//! - [`regularize`]: richness profiles, dyadic pigeonholing, regular subsets,
//!   rich projected points;
//! - [`adaptability`]: discrete energy, minimum separation, greedy thinning;
//! - [`generators`]: deterministic point-set families;
//! - [`exponents`]: predicted growth exponents as exact rationals.

pub mod adaptability;
pub mod bset;
pub mod error;
pub mod exponents;
pub mod generators;
pub mod geometry;
pub mod regularize;

pub use error::{Error, Result};
pub use geometry::{DistanceTuple, Partition, PointSet};
