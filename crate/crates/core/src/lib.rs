//! Combinatorics of veering triangulations.
//!
//! Structure checks on census signatures, lazy development of the universal
//! cover into continents and layerings, the circular order on cusps, branch
//! lines and crowns, and rectangle signatures in the link space.

pub mod continent;
pub mod cover;
pub mod error;
pub mod isosig;
pub mod linkspace;
pub mod order;
pub mod perm;
pub mod report;
pub mod structure;
pub mod svg;
pub mod tracks;
pub mod tri;
pub mod uf;

pub use error::{Error, NotVeeringReason, Result};
pub use isosig::{parse_taut_isosig, serialize_taut_isosig};
pub use perm::Perm4;
pub use structure::{Colour, TetKind, Veering};
pub use tri::{Gluing, Triangulation};
