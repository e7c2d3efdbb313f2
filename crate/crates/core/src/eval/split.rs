//! Random train / calibration / test partitions.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitFractions {
    pub train: f64,
    pub cal: f64,
    pub test: f64,
}

impl SplitFractions {
    pub const fn new(train: f64, cal: f64, test: f64) -> Self {
        Self { train, cal, test }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, f) in [("train fraction", self.train), ("calibration fraction", self.cal), ("test fraction", self.test)] {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::invalid(name, f, "a real in (0, 1)"));
            }
        }
        let total = self.train + self.cal + self.test;
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("split fractions", total, "fractions summing to 1"));
        }
        Ok(())
    }

    /// `(train, cal, test)` sizes for `n` points: calibration and test get
    /// `max(1, ⌊f·n⌋)` and the remainder goes to training.
    pub fn sizes(&self, n: usize) -> Result<(usize, usize, usize)> {
        self.validate()?;
        let part = |f: f64| ((f * n as f64 + 1e-9).floor() as usize).max(1);
        let (cal, test) = (part(self.cal), part(self.test));
        match n.checked_sub(cal + test) {
            Some(train) if train >= 1 => Ok((train, cal, test)),
            _ => Err(Error::invalid("dataset size", n, "enough points for non-empty train, calibration and test splits")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub fractions: SplitFractions,
    pub seed: u64,
}

/// Index partition of `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Vec<usize>,
    pub cal: Vec<usize>,
    pub test: Vec<usize>,
}

/// Uniformly random partition of `0..n`, deterministic in the seed.
pub fn split_data(n: usize, spec: &SplitSpec) -> Result<Split> {
    let (train, cal, _) = spec.fractions.sizes(n)?;
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::seeded(spec.seed));
    let test = idx.split_off(train + cal);
    let cal = idx.split_off(train);
    Ok(Split {
        train: idx,
        cal,
        test,
    })
}
