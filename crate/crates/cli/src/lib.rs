//! Library side of the `squarepack` command: input parsing, placement
//! records, SVG output, fuzz campaigns and the session protocol.

pub mod fuzz;
pub mod input;
pub mod pack;
pub mod record;
pub mod render;
pub mod serve;
pub mod session;
