//! Offline reference packer: next-fit decreasing height shelves.
//!
//! Sees the whole input at once, sorts it, and stacks shelves bottom to top.
//! Any square set of total area at most 1/2 is packed; beyond that it may
//! report infeasibility.

use thiserror::Error;

use crate::classes::classify;
use crate::geometry::EPS;
use crate::packer::PlacedSquare;
use crate::shelf::ShelfId;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("offline shelf packing ran out of height at square {id} (height {height})")]
pub struct Infeasible {
    pub id: usize,
    pub height: f64,
}

/// Packs `heights` offline. Placements are returned in input order; `shelf_id`
/// holds the index of the horizontal band used.
pub fn moon_moser_pack(heights: &[f64]) -> Result<Vec<PlacedSquare>, Infeasible> {
    let mut order: Vec<usize> = (0..heights.len()).collect();
    order.sort_by(|&a, &b| heights[b].total_cmp(&heights[a]).then(a.cmp(&b)));

    let mut out: Vec<Option<PlacedSquare>> = vec![None; heights.len()];
    let (mut x, mut y, mut band_h, mut band) = (0.0f64, 0.0f64, 0.0f64, 0u32);
    for (n, &id) in order.iter().enumerate() {
        let h = heights[id];
        let class = classify(h).map_err(|_| Infeasible { id, height: h })?;
        if n == 0 {
            band_h = h;
        } else if x + h > 1.0 + EPS {
            y += band_h;
            band_h = h;
            band += 1;
            x = 0.0;
        }
        if y + h > 1.0 + EPS || h > 1.0 + EPS {
            return Err(Infeasible { id, height: h });
        }
        out[id] = Some(PlacedSquare {
            id,
            height: h,
            x,
            y,
            class,
            shelf_id: Some(ShelfId(band)),
        });
        x += h;
    }
    Ok(out.into_iter().map(|p| p.expect("every square placed")).collect())
}
