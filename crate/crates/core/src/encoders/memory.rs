use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypervector::BipolarHypervector;
use crate::rng;

/// One fixed random bipolar vector per item index (pixel, feature, symbol).
#[derive(Debug, Clone, PartialEq)]
pub struct ItemMemory {
    vectors: Vec<BipolarHypervector>,
    dim: usize,
    seed: u64,
}

impl ItemMemory {
    pub fn new(items: usize, dim: usize, seed: u64) -> Result<Self> {
        if items == 0 {
            return Err(Error::Empty("item memory"));
        }
        let mut rng = rng::seeded(seed);
        let vectors = (0..items)
            .map(|_| BipolarHypervector::random(dim, &mut rng))
            .collect::<Result<_>>()?;
        Ok(Self { vectors, dim, seed })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn get(&self, index: usize) -> &BipolarHypervector {
        &self.vectors[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &BipolarHypervector> {
        self.vectors.iter()
    }
}

/// Correlated level vectors: `L_0` is random and each step flips a fresh,
/// disjoint block of `floor(d / (2(L−1)))` positions, so
/// `d_H(L_u, L_v) = |u − v| · flip_step` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelMemory {
    levels: Vec<BipolarHypervector>,
    flip_step: usize,
    seed: u64,
}

pub const DEFAULT_LEVELS: usize = 21;

impl LevelMemory {
    pub fn new(levels: usize, dim: usize, seed: u64) -> Result<Self> {
        if levels < 2 {
            return Err(Error::invalid("levels", levels, "at least 2"));
        }
        let mut rng = rng::seeded(seed);
        let base = BipolarHypervector::random(dim, &mut rng)?;
        let flip_step = dim / (2 * (levels - 1));
        let mut order: Vec<usize> = (0..dim).collect();
        order.shuffle(&mut rng);

        let mut out = Vec::with_capacity(levels);
        out.push(base);
        for step in 0..levels - 1 {
            let mut next = out[step].clone();
            for &pos in &order[step * flip_step..(step + 1) * flip_step] {
                next.flip(pos);
            }
            out.push(next);
        }
        Ok(Self {
            levels: out,
            flip_step,
            seed,
        })
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn flip_step(&self) -> usize {
        self.flip_step
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn get(&self, level: usize) -> &BipolarHypervector {
        &self.levels[level]
    }
}

/// Per-feature linear bins learned from training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizationGrid {
    mins: Vec<f64>,
    maxs: Vec<f64>,
    levels: usize,
}

impl QuantizationGrid {
    pub fn unfitted(levels: usize) -> Self {
        Self {
            mins: Vec::new(),
            maxs: Vec::new(),
            levels,
        }
    }

    /// Fits per-feature minima and maxima over `rows`.
    pub fn fit<'a>(rows: impl IntoIterator<Item = &'a [f64]>, levels: usize) -> Result<Self> {
        if levels < 2 {
            return Err(Error::invalid("levels", levels, "at least 2"));
        }
        let mut rows = rows.into_iter();
        let first = rows.next().ok_or(Error::Empty("quantization training data"))?;
        let mut mins = first.to_vec();
        let mut maxs = first.to_vec();
        for row in rows {
            if row.len() != mins.len() {
                return Err(Error::DimensionMismatch {
                    expected: mins.len(),
                    found: row.len(),
                });
            }
            for (j, &x) in row.iter().enumerate() {
                mins[j] = mins[j].min(x);
                maxs[j] = maxs[j].max(x);
            }
        }
        Ok(Self { mins, maxs, levels })
    }

    pub fn is_fitted(&self) -> bool {
        !self.mins.is_empty()
    }

    pub fn features(&self) -> usize {
        self.mins.len()
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    /// Level of feature `j` at value `x`; values outside the training range
    /// clip to the boundary levels.
    pub fn level(&self, j: usize, x: f64) -> usize {
        let (lo, hi) = (self.mins[j], self.maxs[j]);
        if hi <= lo || x <= lo {
            return 0;
        }
        let bin = ((x - lo) / (hi - lo) * self.levels as f64).floor() as usize;
        bin.min(self.levels - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn item_memory_is_deterministic() {
        let a = ItemMemory::new(5, 128, 3).unwrap();
        let b = ItemMemory::new(5, 128, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.get(0), a.get(1));
        assert!(ItemMemory::new(0, 128, 3).is_err());
    }

    #[test]
    fn level_memory_distances_are_linear_in_level_gap() {
        let lm = LevelMemory::new(DEFAULT_LEVELS, 10_000, 17).unwrap();
        assert_eq!(lm.flip_step(), 250);
        for u in 0..lm.len() {
            for v in u..lm.len() {
                let dh = lm.get(u).hamming_distance(lm.get(v)).unwrap();
                assert_eq!(dh, (v - u) * lm.flip_step());
            }
        }
    }

    #[test]
    fn level_memory_monotone_for_small_dims() {
        let lm = LevelMemory::new(5, 37, 2).unwrap();
        for u in 0..5 {
            for v in u..5 {
                for w in v..5 {
                    let uv = lm.get(u).hamming_distance(lm.get(v)).unwrap();
                    let uw = lm.get(u).hamming_distance(lm.get(w)).unwrap();
                    assert!(uv <= uw);
                }
            }
        }
    }

    #[test]
    fn grid_quantizes_and_clips() {
        let rows: Vec<Vec<f64>> = vec![vec![0.0, 10.0], vec![1.0, 20.0]];
        let grid = QuantizationGrid::fit(rows.iter().map(Vec::as_slice), 21).unwrap();
        assert_eq!(grid.level(0, 0.0), 0);
        assert_eq!(grid.level(1, 10.0), 0);
        assert_eq!(grid.level(0, 1.0), 20);
        assert_eq!(grid.level(0, 0.5), 10);
        assert_eq!(grid.level(0, -3.0), 0);
        assert_eq!(grid.level(0, 7.0), 20);
        assert!(!QuantizationGrid::unfitted(21).is_fitted());
    }

    #[test]
    fn constant_feature_maps_to_level_zero() {
        let rows = [vec![2.0], vec![2.0]];
        let grid = QuantizationGrid::fit(rows.iter().map(Vec::as_slice), 4).unwrap();
        assert_eq!(grid.level(0, 2.0), 0);
        assert_eq!(grid.level(0, 9.0), 0);
    }
}
