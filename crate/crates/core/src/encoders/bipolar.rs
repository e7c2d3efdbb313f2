//! Bipolar encoders for binary images and quantized real features.

use crate::error::{Error, Result};
use crate::hypervector::{sign_of_counts, BipolarHypervector};

use super::memory::{ItemMemory, LevelMemory, QuantizationGrid};

fn add_into(counts: &mut [i32], h: &BipolarHypervector) {
    for (c, &e) in counts.iter_mut().zip(h.elements()) {
        *c += i32::from(e);
    }
}

/// `sign(Σ_j X_j P_j)`: bundles the position vectors of active pixels.
///
/// An all-zero image has an empty sum and binarizes to all `+1`.
pub fn encode_image_binary(pixels: &[u8], im: &ItemMemory) -> Result<BipolarHypervector> {
    if pixels.len() != im.len() {
        return Err(Error::DimensionMismatch {
            expected: im.len(),
            found: pixels.len(),
        });
    }
    let mut counts = vec![0i32; im.dim()];
    for (j, &px) in pixels.iter().enumerate() {
        match px {
            0 => {}
            1 => add_into(&mut counts, im.get(j)),
            other => return Err(Error::invalid("pixel", other, "0 or 1")),
        }
    }
    Ok(sign_of_counts(&counts))
}

/// Identification-value chain: `sign(Σ_j ID_j ⊗ L_{v_j})`.
pub fn encode_quantized_features(
    x: &[f64],
    grid: &QuantizationGrid,
    im: &ItemMemory,
    lm: &LevelMemory,
) -> Result<BipolarHypervector> {
    if !grid.is_fitted() {
        return Err(Error::UnfittedGrid);
    }
    if x.len() != grid.features() || x.len() != im.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.features(),
            found: x.len(),
        });
    }
    if grid.levels() != lm.len() {
        return Err(Error::DimensionMismatch {
            expected: lm.len(),
            found: grid.levels(),
        });
    }
    let mut counts = vec![0i32; im.dim()];
    for (j, &value) in x.iter().enumerate() {
        let id = im.get(j).elements();
        let lv = lm.get(grid.level(j, value)).elements();
        for ((c, &a), &b) in counts.iter_mut().zip(id).zip(lv) {
            *c += i32::from(a * b);
        }
    }
    Ok(sign_of_counts(&counts))
}
