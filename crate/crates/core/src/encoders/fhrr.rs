//! Fractional power encoding and temporal trajectory encoding over FHRR.
//!
//! A column `x ∈ R^p` becomes `e^{iβWx}` where the rows of `W ∈ R^{d×p}` are
//! standard Gaussian. Under this choice the expected complex cosine of two
//! encodings is `(exp(−β²‖x − x′‖²/2) + 1) / 2`, an RBF kernel.
//!
//! A trajectory `X ∈ R^{p×t}` is encoded as `Σ_{j=1}^{t} φ(X·,j) ⊗ ρ^j(P)`
//! with a random phase vector `P` marking time.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypervector::{wrap_phase, ComplexAccumulator, ComplexHypervector};
use crate::rng;

pub const DEFAULT_BETA: f64 = 0.3;

#[derive(Debug, Clone, PartialEq)]
pub struct FpeProjection {
    /// Row-major `d × p`.
    w: Vec<f64>,
    dim: usize,
    inputs: usize,
    beta: f64,
    seed: u64,
}

impl FpeProjection {
    pub fn new(dim: usize, inputs: usize, beta: f64, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ZeroDimension);
        }
        if inputs == 0 {
            return Err(Error::invalid("fpe inputs", inputs, "at least 1"));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::invalid("beta", beta, "a positive finite real"));
        }
        let mut r = rng::seeded(seed);
        let w = (0..dim * inputs).map(|_| StandardNormal.sample(&mut r)).collect();
        Ok(Self {
            w,
            dim,
            inputs,
            beta,
            seed,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn phases(&self, x: &[f64]) -> Vec<f64> {
        self.w
            .chunks_exact(self.inputs)
            .map(|row| {
                let dot: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum();
                wrap_phase(self.beta * dot)
            })
            .collect()
    }
}

/// Cyclic shifts of a temporal indicator `P`, one per time bin `1..=t_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionBank {
    indicator: ComplexHypervector,
    shifted: Vec<ComplexHypervector>,
}

impl PositionBank {
    pub fn new(dim: usize, max_len: usize, seed: u64) -> Result<Self> {
        if max_len == 0 {
            return Err(Error::invalid("max sequence length", max_len, "at least 1"));
        }
        let indicator = ComplexHypervector::random(dim, &mut rng::seeded(seed))?;
        let shifted = (1..=max_len).map(|j| indicator.permute(j)).collect();
        Ok(Self { indicator, shifted })
    }

    pub fn indicator(&self) -> &ComplexHypervector {
        &self.indicator
    }

    pub fn max_len(&self) -> usize {
        self.shifted.len()
    }

    /// `ρ^j(P)` for `1 ≤ j ≤ t_max`.
    pub fn position(&self, j: usize) -> &ComplexHypervector {
        &self.shifted[j - 1]
    }
}

/// `φ(x) = e^{iβWx}` with phases wrapped into `[0, 2π)`.
pub fn encode_fpe(x: &[f64], proj: &FpeProjection) -> Result<ComplexHypervector> {
    if x.len() != proj.inputs {
        return Err(Error::DimensionMismatch {
            expected: proj.inputs,
            found: x.len(),
        });
    }
    ComplexHypervector::from_phases(proj.phases(x))
}

/// Dense `p × t` matrix stored column-major so each time bin is contiguous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let first = columns.first().ok_or(Error::Empty("trajectory"))?;
        let rows = first.len();
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            if c.len() != rows {
                return Err(Error::DimensionMismatch {
                    expected: rows,
                    found: c.len(),
                });
            }
            data.extend_from_slice(c);
        }
        Ok(Self {
            rows,
            cols: columns.len(),
            data,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[col * self.rows + row] = value;
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.rows + row]
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }
}

/// Raw complex accumulation `Σ_j φ(X·,j) ⊗ ρ^j(P)`; not normalized.
pub fn encode_temporal_trajectory(
    x: &FeatureMatrix,
    proj: &FpeProjection,
    bank: &PositionBank,
) -> Result<ComplexAccumulator> {
    if x.cols() == 0 {
        return Err(Error::Empty("trajectory"));
    }
    if x.cols() > bank.max_len() {
        return Err(Error::invalid(
            "trajectory length",
            x.cols(),
            "at most the position bank length",
        ));
    }
    let mut acc = ComplexAccumulator::zeros(proj.dim())?;
    for j in 0..x.cols() {
        let phi = encode_fpe(x.column(j), proj)?;
        acc.add_phasor(&phi.bind(bank.position(j + 1))?)?;
    }
    Ok(acc)
}
