use thiserror::Error;

use crate::shelf::ShelfId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("height {0} is outside (0, 1]")]
    InvalidHeight(f64),
    #[error("height {0} is below the resolvable range")]
    HeightBelowResolution(f64),
    #[error("ratio constants inconsistent for subclass {k}: margin {margin}")]
    ConstantsInconsistent { k: u32, margin: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShelfError {
    #[error("shelf {0} is closed")]
    Closed(ShelfId),
    #[error("item of extent {extent} does not fit shelf {shelf} (used {used}, length {length})")]
    NoFit {
        shelf: ShelfId,
        extent: f64,
        used: f64,
        length: f64,
    },
    #[error("square of height {height} outside shelf {shelf} range ({min}, {max}]")]
    ClassMismatch {
        shelf: ShelfId,
        height: f64,
        min: f64,
        max: f64,
    },
}
