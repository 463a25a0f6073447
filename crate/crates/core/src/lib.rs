//! Fat-flow optimal weight functions on square-tiled quadrilaterals, the
//! squared rectangles they determine, and the skinny cut function on weight
//! vectors.

pub mod corpus;
pub mod cuts;
pub mod dumbbell;
pub mod exact;
pub mod grid;
pub mod io;
pub mod layout;
pub mod oracle;
pub mod phi;
pub mod qp;
pub mod solver;
pub mod vector;
pub mod weights;

pub use grid::{BoundaryArcs, ComplexError, GridComplex, Side, TileId, Vertex};
