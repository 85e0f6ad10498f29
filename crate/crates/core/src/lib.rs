//! Unitary irreducible representations of SO(3) and the quaquaversal Hecke
//! operator.
//!
//! The crate builds the odd-dimensional irreps `H_{2k+1}` in a fixed weight
//! basis, evaluates words and formal sums in the rotations `S` (a quarter turn
//! about `y`) and `T` (a sixth turn about `x`), decomposes operators along the
//! joint eigenspaces of two half turns, and computes spectra both block by
//! block and densely so the two routes can be compared.
//!
//! Modules:
//! - [`repgen`]: rotation matrices, angular momentum, characters.
//! - [`groupring`]: words, formal sums, the quaquaversal element.
//! - [`blocks`]: projections, partitions, block grids, structural residuals.
//! - [`spectra`]: spectra, multiplicities, gap scans.
//! - [`tiling`]: cousin orientation words and moment checks.
//! - [`linalg`]: shared dense complex linear algebra.

pub mod blocks;
pub mod error;
pub mod groupring;
pub mod linalg;
pub mod repgen;
pub mod spectra;
pub mod tiling;

pub use error::{Error, Result};
pub use linalg::{CMatrix, C64};
pub use repgen::{Axis, IrrepIndex, UnitaryOperator};
