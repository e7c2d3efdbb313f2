//! Encoders `φ: X → H` from raw features to hypervectors.
//!
//! An [`EncoderSpec`] is the serializable recipe (kind, dimension, seeds);
//! [`EncoderSpec::fit`] turns it into a ready [`Encoder`] using training data
//! where needed (only the quantized encoder learns anything from data).

mod bipolar;
mod fhrr;
mod memory;
mod text;

pub use bipolar::{encode_image_binary, encode_quantized_features};
pub use fhrr::{
    encode_fpe, encode_temporal_trajectory, FeatureMatrix, FpeProjection, PositionBank,
    DEFAULT_BETA,
};
pub use memory::{ItemMemory, LevelMemory, QuantizationGrid, DEFAULT_LEVELS};
pub use text::{
    encode_trigram_text, preprocess_text, symbol_index, TrigramEncoder, MAX_TEXT_LEN,
    VOCABULARY_SIZE,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypervector::{Hypervector, RealAccumulator};
use crate::rng::derive_seed;

/// One raw input sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Features {
    Binary(Vec<u8>),
    Real(Vec<f64>),
    Text(String),
    Matrix(FeatureMatrix),
}

impl Features {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Features::Binary(_) => "binary",
            Features::Real(_) => "real",
            Features::Text(_) => "text",
            Features::Matrix(_) => "matrix",
        }
    }
}

/// Passthrough for experiments that operate directly in feature space.
pub fn encode_identity(x: &[f64]) -> Result<RealAccumulator> {
    RealAccumulator::from_elements(x.to_vec())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EncoderSpec {
    Identity,
    BinaryImage {
        pixels: usize,
        dim: usize,
        seed: u64,
    },
    Quantized {
        features: usize,
        levels: usize,
        dim: usize,
        seed: u64,
    },
    Trigram {
        dim: usize,
        seed: u64,
    },
    Temporal {
        inputs: usize,
        max_len: usize,
        dim: usize,
        beta: f64,
        seed: u64,
    },
}

impl EncoderSpec {
    /// Whether [`fit`](Self::fit) depends on the training samples.
    pub fn learns_from_data(&self) -> bool {
        matches!(self, EncoderSpec::Quantized { .. })
    }

    pub fn with_seed(&self, new_seed: u64) -> Self {
        let mut out = self.clone();
        match &mut out {
            EncoderSpec::Identity => {}
            EncoderSpec::BinaryImage { seed, .. }
            | EncoderSpec::Quantized { seed, .. }
            | EncoderSpec::Trigram { seed, .. }
            | EncoderSpec::Temporal { seed, .. } => *seed = new_seed,
        }
        out
    }

    pub fn fit(&self, train: &[Features]) -> Result<Encoder> {
        let grid = match self {
            EncoderSpec::Quantized { levels, .. } => {
                let rows = train
                    .iter()
                    .map(|f| match f {
                        Features::Real(x) => Ok(x.as_slice()),
                        other => Err(Error::FeatureKind {
                            expected: "real",
                            found: other.kind_name(),
                        }),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(QuantizationGrid::fit(rows, *levels)?)
            }
            _ => None,
        };
        self.build(grid)
    }

    /// Rebuilds the encoder from its recipe plus any fitted grid.
    pub fn build(&self, grid: Option<QuantizationGrid>) -> Result<Encoder> {
        Ok(match *self {
            EncoderSpec::Identity => Encoder::Identity,
            EncoderSpec::BinaryImage { pixels, dim, seed } => Encoder::BinaryImage {
                spec: self.clone(),
                positions: ItemMemory::new(pixels, dim, derive_seed(seed, "positions", 0))?,
            },
            EncoderSpec::Quantized {
                features,
                levels,
                dim,
                seed,
            } => {
                let grid = grid.unwrap_or_else(|| QuantizationGrid::unfitted(levels));
                if grid.is_fitted() && grid.features() != features {
                    return Err(Error::DimensionMismatch {
                        expected: features,
                        found: grid.features(),
                    });
                }
                Encoder::Quantized {
                    spec: self.clone(),
                    grid,
                    ids: ItemMemory::new(features, dim, derive_seed(seed, "ids", 0))?,
                    levels: LevelMemory::new(levels, dim, derive_seed(seed, "levels", 0))?,
                }
            }
            EncoderSpec::Trigram { dim, seed } => Encoder::Trigram {
                spec: self.clone(),
                trigrams: TrigramEncoder::new(ItemMemory::new(
                    VOCABULARY_SIZE,
                    dim,
                    derive_seed(seed, "symbols", 0),
                )?),
            },
            EncoderSpec::Temporal {
                inputs,
                max_len,
                dim,
                beta,
                seed,
            } => Encoder::Temporal {
                spec: self.clone(),
                projection: FpeProjection::new(dim, inputs, beta, derive_seed(seed, "projection", 0))?,
                positions: PositionBank::new(dim, max_len, derive_seed(seed, "positions", 0))?,
            },
        })
    }
}

/// A fitted encoder; immutable and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub enum Encoder {
    Identity,
    BinaryImage {
        spec: EncoderSpec,
        positions: ItemMemory,
    },
    Quantized {
        spec: EncoderSpec,
        grid: QuantizationGrid,
        ids: ItemMemory,
        levels: LevelMemory,
    },
    Trigram {
        spec: EncoderSpec,
        trigrams: TrigramEncoder,
    },
    Temporal {
        spec: EncoderSpec,
        projection: FpeProjection,
        positions: PositionBank,
    },
}

impl Encoder {
    pub fn spec(&self) -> EncoderSpec {
        match self {
            Encoder::Identity => EncoderSpec::Identity,
            Encoder::BinaryImage { spec, .. }
            | Encoder::Quantized { spec, .. }
            | Encoder::Trigram { spec, .. }
            | Encoder::Temporal { spec, .. } => spec.clone(),
        }
    }

    pub fn grid(&self) -> Option<&QuantizationGrid> {
        match self {
            Encoder::Quantized { grid, .. } => Some(grid),
            _ => None,
        }
    }

    pub fn encode(&self, x: &Features) -> Result<Hypervector> {
        let mismatch = |expected| Error::FeatureKind {
            expected,
            found: x.kind_name(),
        };
        match (self, x) {
            (Encoder::Identity, Features::Real(v)) => Ok(Hypervector::Real(encode_identity(v)?)),
            (Encoder::Identity, _) => Err(mismatch("real")),
            (Encoder::BinaryImage { positions, .. }, Features::Binary(px)) => {
                Ok(Hypervector::Bipolar(encode_image_binary(px, positions)?))
            }
            (Encoder::BinaryImage { .. }, _) => Err(mismatch("binary")),
            (Encoder::Quantized { grid, ids, levels, .. }, Features::Real(v)) => Ok(
                Hypervector::Bipolar(encode_quantized_features(v, grid, ids, levels)?),
            ),
            (Encoder::Quantized { .. }, _) => Err(mismatch("real")),
            (Encoder::Trigram { trigrams, .. }, Features::Text(s)) => {
                Ok(Hypervector::Bipolar(trigrams.encode(s)?))
            }
            (Encoder::Trigram { .. }, _) => Err(mismatch("text")),
            (
                Encoder::Temporal {
                    projection,
                    positions,
                    ..
                },
                Features::Matrix(m),
            ) => Ok(Hypervector::Complex(encode_temporal_trajectory(
                m, projection, positions,
            )?)),
            (Encoder::Temporal { .. }, _) => Err(mismatch("matrix")),
        }
    }

    pub fn encode_all(&self, xs: &[Features]) -> Result<Vec<Hypervector>> {
        use rayon::prelude::*;
        xs.par_iter().map(|x| self.encode(x)).collect()
    }
}
