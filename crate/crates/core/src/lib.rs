//! Minimal-footprint placement of a rectangular laptop on a rectangular
//! table.
//!
//! The laptop's short side is the unit of length. A placement is stable when
//! the laptop midpoint lies on the (closed) table, and the footprint is the
//! intersection of laptop and table. This crate computes footprints, finds
//! the stable placement of least footprint area, and checks the known facts
//! about that optimum numerically.

pub mod analysis;
pub mod cli;
pub mod geometry;
pub mod optimizer;
pub mod placement;
pub mod report;
