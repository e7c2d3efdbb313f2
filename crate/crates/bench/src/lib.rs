//! Fixtures shared by the benchmarks: a bipolar model over random prototypes
//! and a batch of pre-encoded queries, so timings exclude encoding.

use chdc_core::conformal::{calibrate_marginal, set_from_profile};
use chdc_core::hypervector::random_bipolar;
use chdc_core::rng::derive_seed;
use chdc_core::{Calibrator, Encoder, Hypervector, PrototypeStyle, Result, ScoreKind, SimilarityKind, TrainedModel};

pub struct Workload {
    pub model: TrainedModel,
    pub queries: Vec<Hypervector>,
    pub calibrator: Calibrator,
}

impl Workload {
    pub fn new(classes: usize, dim: usize, queries: usize, seed: u64) -> Result<Self> {
        let protos = (0..classes)
            .map(|c| random_bipolar(dim, derive_seed(seed, "prototype", c as u64)).map(Hypervector::Bipolar))
            .collect::<Result<Vec<_>>>()?;
        let labels: Vec<usize> = (0..classes).collect();
        let model = TrainedModel::from_encoded(
            Encoder::Identity,
            &protos,
            &labels,
            classes,
            PrototypeStyle::Binarized,
            SimilarityKind::CosineNormalized,
        )?;
        let queries = (0..queries)
            .map(|i| random_bipolar(dim, derive_seed(seed, "query", i as u64)).map(Hypervector::Bipolar))
            .collect::<Result<Vec<_>>>()?;
        let calibrator = calibrate_marginal(&[-0.6, -0.55, -0.5], 0.5, ScoreKind::Discount)?.into();
        Ok(Self {
            model,
            queries,
            calibrator,
        })
    }

    /// Builds a prediction set for every query; returns the total set size.
    pub fn run(&self) -> Result<usize> {
        let mut total = 0;
        for h in &self.queries {
            let profile = self.model.profile_of(h)?;
            total += set_from_profile(&profile, &self.calibrator, 0.5)?.len();
        }
        Ok(total)
    }
}
