//! Three Gaussian blobs on an equilateral triangle plus a displaced OOD blob.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::DatasetBundle;
use crate::encoders::Features;
use crate::error::{Error, Result};
use crate::rng::{self, derive_seed};

/// Distance of the OOD centre below the triangle centroid, in side lengths.
pub const OOD_OFFSET: f64 = 1.8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub p: usize,
    /// Per-class standard deviations.
    pub sigma: [f64; 3],
    pub class_counts: [usize; 3],
    pub n_ood: usize,
    pub seed: u64,
}

impl SyntheticConfig {
    /// `total` inliers split as evenly as possible, earlier classes first.
    pub fn new(sigma3: f64, total: usize, n_ood: usize, seed: u64) -> Self {
        let base = total / 3;
        let rem = total % 3;
        let class_counts = [0, 1, 2].map(|c| base + usize::from(c < rem));
        Self {
            p: 2,
            sigma: [1.0, 2.0, sigma3],
            class_counts,
            n_ood,
            seed,
        }
    }

    pub fn side(&self) -> f64 {
        4.0 * (self.p as f64).sqrt()
    }

    pub fn centers(&self) -> [Vec<f64>; 3] {
        let l = self.side();
        let at = |x: f64, y: f64| {
            let mut v = vec![0.0; self.p];
            v[0] = x;
            if self.p > 1 {
                v[1] = y;
            }
            v
        };
        [at(0.0, 0.0), at(l, 0.0), at(l / 2.0, 3f64.sqrt() / 2.0 * l)]
    }

    pub fn ood_center(&self) -> Vec<f64> {
        let l = self.side();
        let mut c = vec![0.0; self.p];
        c[0] = l / 2.0;
        if self.p > 1 {
            c[1] = 3f64.sqrt() / 6.0 * l - OOD_OFFSET * l;
        }
        c
    }

    fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::invalid("p", self.p, "at least 2"));
        }
        if let Some(&s) = self.sigma.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::invalid("sigma", s, "a finite real > 0"));
        }
        Ok(())
    }
}

fn draw(center: &[f64], sigma: f64, r: &mut rng::Rng) -> Features {
    Features::Real(
        center
            .iter()
            .map(|m| {
                let z: f64 = StandardNormal.sample(r);
                m + sigma * z
            })
            .collect(),
    )
}

/// Returns `(inliers, ood)`; OOD points are drawn from `N(μ_ood, I)`.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<(DatasetBundle, DatasetBundle)> {
    cfg.validate()?;
    let centers = cfg.centers();
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for (c, center) in centers.iter().enumerate() {
        let mut r = rng::seeded(derive_seed(cfg.seed, "synthetic-class", c as u64));
        for _ in 0..cfg.class_counts[c] {
            features.push(draw(center, cfg.sigma[c], &mut r));
            labels.push(c);
        }
    }
    let names = (1..=3).map(|c| c.to_string()).collect();
    let inliers = DatasetBundle::new("synthetic", features, labels, names, vec![])?;
    let mut r = rng::seeded(derive_seed(cfg.seed, "synthetic-ood", 0));
    let center = cfg.ood_center();
    let ood_x: Vec<Features> = (0..cfg.n_ood).map(|_| draw(&center, 1.0, &mut r)).collect();
    let ood = DatasetBundle::new(
        "synthetic-ood",
        ood_x,
        vec![0; cfg.n_ood],
        vec!["ood".into()],
        vec![],
    )?;
    Ok((inliers, ood))
}
