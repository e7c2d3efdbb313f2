//! Synthetic spike-count trajectories standing in for neural recordings.
//!
//! Each sample is a `neurons × bins` matrix of Poisson counts. Classes have
//! their own per-neuron rate profile, and an extra run-state profile supplies
//! out-of-distribution samples under the label [`RUN_STATE`].

use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::DatasetBundle;
use crate::encoders::{FeatureMatrix, Features};
use crate::error::{Error, Result};
use crate::rng::{self, derive_seed};

pub const RUN_STATE: &str = "run";
pub const DEFAULT_BINS: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeSurrogateConfig {
    pub neurons: usize,
    pub bins: usize,
    /// Expected count per bin, one vector of length `neurons` per class.
    pub class_rates: Vec<Vec<f64>>,
    pub run_rates: Vec<f64>,
    pub samples_per_class: usize,
    pub run_samples: usize,
    pub seed: u64,
}

impl SpikeSurrogateConfig {
    /// Class `c` fires at `baseline + separation` on neurons `j ≡ c (mod classes)`
    /// and at `baseline` elsewhere; the run state fires uniformly at twice the baseline
    /// plus half the separation.
    pub fn separated(
        classes: usize,
        neurons: usize,
        separation: f64,
        samples_per_class: usize,
        run_samples: usize,
        seed: u64,
    ) -> Self {
        let baseline = 1.0;
        let class_rates = (0..classes)
            .map(|c| {
                (0..neurons)
                    .map(|j| if classes > 0 && j % classes == c { baseline + separation } else { baseline })
                    .collect()
            })
            .collect();
        Self {
            neurons,
            bins: DEFAULT_BINS,
            class_rates,
            run_rates: vec![2.0 * baseline + separation / 2.0; neurons],
            samples_per_class,
            run_samples,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.neurons == 0 {
            return Err(Error::invalid("neurons", self.neurons, "at least 1"));
        }
        if self.bins == 0 {
            return Err(Error::invalid("bins", self.bins, "at least 1"));
        }
        if self.class_rates.is_empty() {
            return Err(Error::Empty("class rate profiles"));
        }
        for rates in self.class_rates.iter().chain(std::iter::once(&self.run_rates)) {
            if rates.len() != self.neurons {
                return Err(Error::DimensionMismatch {
                    expected: self.neurons,
                    found: rates.len(),
                });
            }
            if let Some(&r) = rates.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
                return Err(Error::invalid("spike rate", r, "a finite real >= 0"));
            }
        }
        Ok(())
    }
}

fn sample_matrix(rates: &[f64], bins: usize, rng: &mut rng::Rng) -> FeatureMatrix {
    let mut m = FeatureMatrix::zeros(rates.len(), bins);
    for t in 0..bins {
        for (j, &rate) in rates.iter().enumerate() {
            if rate > 0.0 {
                let count = Poisson::new(rate).expect("rate validated positive").sample(rng);
                m.set(j, t, count);
            }
        }
    }
    m
}

pub fn generate_spike_surrogate(cfg: &SpikeSurrogateConfig) -> Result<DatasetBundle> {
    cfg.validate()?;
    let classes = cfg.class_rates.len();
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (c, rates) in cfg.class_rates.iter().enumerate() {
        let mut r = rng::seeded(derive_seed(cfg.seed, "spike-class", c as u64));
        for _ in 0..cfg.samples_per_class {
            features.push(Features::Matrix(sample_matrix(rates, cfg.bins, &mut r)));
            labels.push(c);
        }
    }
    let mut r = rng::seeded(derive_seed(cfg.seed, "spike-run", 0));
    for _ in 0..cfg.run_samples {
        features.push(Features::Matrix(sample_matrix(&cfg.run_rates, cfg.bins, &mut r)));
        labels.push(classes);
    }
    let mut names: Vec<String> = (1..=classes).map(|c| format!("odor{c}")).collect();
    names.push(RUN_STATE.to_string());
    DatasetBundle::new("spike_surrogate", features, labels, names, vec![])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_and_labels() {
        let cfg = SpikeSurrogateConfig::separated(3, 6, 4.0, 5, 2, 1);
        let b = generate_spike_surrogate(&cfg).unwrap();
        assert_eq!(b.len(), 17);
        assert_eq!(b.label_names.last().unwrap(), RUN_STATE);
        match &b.features[0] {
            Features::Matrix(m) => {
                assert_eq!((m.rows(), m.cols()), (6, 8));
                assert!(m.values().iter().all(|v| *v >= 0.0 && v.fract() == 0.0));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(generate_spike_surrogate(&cfg).unwrap(), b);
    }

    #[test]
    fn zero_rates_give_zero_counts() {
        let mut cfg = SpikeSurrogateConfig::separated(1, 4, 0.0, 3, 0, 2);
        cfg.class_rates = vec![vec![0.0; 4]];
        let b = generate_spike_surrogate(&cfg).unwrap();
        for f in &b.features {
            match f {
                Features::Matrix(m) => assert!(m.values().iter().all(|v| *v == 0.0)),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn sample_means_track_rates() {
        let mut cfg = SpikeSurrogateConfig::separated(1, 2, 0.0, 2000, 0, 3);
        cfg.class_rates = vec![vec![0.5, 4.0]];
        let b = generate_spike_surrogate(&cfg).unwrap();
        let mut sums = [0.0; 2];
        for f in &b.features {
            if let Features::Matrix(m) = f {
                for t in 0..m.cols() {
                    sums[0] += m.get(0, t);
                    sums[1] += m.get(1, t);
                }
            }
        }
        let n = 2000.0 * 8.0;
        assert!((sums[0] / n - 0.5).abs() < 0.03);
        assert!((sums[1] / n - 4.0).abs() < 0.08);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = SpikeSurrogateConfig::separated(2, 4, 1.0, 1, 1, 0);
        cfg.run_rates[0] = -1.0;
        assert!(generate_spike_surrogate(&cfg).is_err());
        let mut cfg = SpikeSurrogateConfig::separated(2, 4, 1.0, 1, 1, 0);
        cfg.bins = 0;
        assert!(generate_spike_surrogate(&cfg).is_err());
        let mut cfg = SpikeSurrogateConfig::separated(2, 4, 1.0, 1, 1, 0);
        cfg.class_rates[1].pop();
        assert!(generate_spike_surrogate(&cfg).is_err());
    }
}
