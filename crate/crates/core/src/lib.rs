//! Online packing of squares into the unit square.
//!
//! Any sequence of squares with total area at most 3/8 is packed without
//! overlap, each square placed on arrival and never moved.
//!
//! ```
//! use squarepack::{Packer, PlacementOutcome};
//!
//! let mut packer = Packer::default();
//! let PlacementOutcome::Placed(p) = packer.place(0.3) else { panic!() };
//! assert_eq!((p.x, p.y), (0.7, 0.0));
//! ```

pub mod adversary;
pub mod classes;
pub mod error;
pub mod generate;
pub mod geometry;
pub mod oracle;
pub mod packer;
pub mod shelf;
pub mod verifier;

pub use classes::{classify, SizeClass};
pub use error::{Error, Result};
pub use generate::{generate, Distribution, SequenceSpec};
pub use geometry::{Rect, EPS, EPS_AREA};
pub use oracle::moon_moser_pack;
pub use packer::{
    Packer, PackerConfig, PlacedSquare, PlacementOutcome, RejectReason, Snapshot, GUARANTEED_AREA,
};
pub use shelf::{Shelf, ShelfId};
pub use verifier::{audit_all, AuditReport};
