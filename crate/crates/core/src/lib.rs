//! Approximate Vietoris-Rips towers built from shifted dyadic lattices.
//!
//! A point cloud is snapped to a ladder of integer grids whose spacing doubles
//! at every scale and whose origin is shifted by a random half-cell vector.
//! The faces of the grid spanned by occupied cells form a cubical complex at
//! every scale; its barycentric subdivision (or the cubical complex itself)
//! forms a tower whose persistence barcode approximates the Rips barcode of
//! the input within a constant multiplicative factor.
//!
//! The crate is organized bottom-up:
//!
//! * [`geometry`]: point clouds, metrics, closest pair, diameter and spread.
//! * [`lattice`]: the shifted grids, point location and the vertex map between
//!   consecutive grids.
//! * [`cubical`]: elementary cubes, spanned (active) faces, closure and the
//!   cubical boundary.
//! * [`barycentric`]: flags of faces and the order complex.
//! * [`tower`]: the event-stream builder for the simplicial and cubical towers,
//!   and stream replay.
//! * [`persistence`]: exact Rips filtrations, boundary-matrix reduction and
//!   barcodes of towers.
//! * [`diagram`]: barcodes, rescaling and the multiplicative bottleneck distance.
//! * [`pipeline`]: the tower-versus-Rips comparison.

pub mod barycentric;
pub mod cubical;
pub mod diagram;
mod error;
pub mod format;
pub mod geometry;
pub mod gf2;
pub mod lattice;
pub mod persistence;
pub mod pipeline;
pub mod tower;

pub use barycentric::{FlagSimplex, OrderComplex};
pub use cubical::{ActiveVertexMap, CubicalComplex, Face, FaceKind};
pub use diagram::{Barcode, Interval, MultiplicativeDistance};
pub use error::{Error, Result};
pub use geometry::{Metric, PointCloud};
pub use lattice::{GridFrame, GridVertex, Ladder, ShiftSequence};
pub use tower::{Event, EventStream, Mode, ScaleLadder, StreamHeader, Tower};

/// Largest supported ambient dimension; face direction masks are one `u32`.
pub const MAX_DIM: usize = 32;
