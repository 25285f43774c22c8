//! Exact arithmetic dynamics over ℚ.
//!
//! Orbits of rational self-maps of affine space, S-unit membership of the
//! values they produce, the arithmetic-progression and torus structure of
//! those membership sets, Weil heights, and rationality certificates for
//! holonomic sequences with values in a finitely generated group.

pub mod exact_numbers;
pub mod lattice;
pub mod linalg;
pub mod multgroup;
pub mod poly;
pub mod upoly;
pub mod dynamics;
pub mod holonomic;
pub mod structure;
pub mod heights;
