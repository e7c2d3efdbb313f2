//! Flat `key = value` experiment configuration.
//!
//! Lines are `key = value`; `#` starts a comment. Later assignments win, so
//! command-line overrides are simply appended. Choosing a dataset resets
//! every other key to that dataset's defaults before the assignments apply.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classifier::PrototypeStyle;
use crate::conformal::ScoreKind;
use crate::data::{
    generate_spike_surrogate, ingest_isolet, ingest_languages, ingest_mnist, sha256_hex,
    DatasetBundle, SpikeSurrogateConfig, RUN_STATE,
};
use crate::encoders::{EncoderSpec, DEFAULT_BETA, DEFAULT_LEVELS};
use crate::error::{Error, Result};
use crate::eval::{CalibrationMode, DataSource, ExperimentPlan, RunMetadata, SplitFractions, SyntheticConfig};
use crate::hypervector::{SimilarityKind, DEFAULT_DIM};
use crate::rng::derive_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetKind {
    Synthetic,
    Mnist,
    Isolet,
    Languages,
    SpikeSurrogate,
}

impl DatasetKind {
    pub const ALL: [DatasetKind; 5] = [
        DatasetKind::Synthetic,
        DatasetKind::Mnist,
        DatasetKind::Isolet,
        DatasetKind::Languages,
        DatasetKind::SpikeSurrogate,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DatasetKind::Synthetic => "synthetic",
            DatasetKind::Mnist => "mnist",
            DatasetKind::Isolet => "isolet",
            DatasetKind::Languages => "languages",
            DatasetKind::SpikeSurrogate => "spike_surrogate",
        }
    }
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DatasetKind::ALL
            .into_iter()
            .find(|d| d.name() == s || (s == "spike" && *d == DatasetKind::SpikeSurrogate))
            .ok_or_else(|| config_error("dataset", format!("unknown dataset `{s}`; expected one of synthetic, mnist, isolet, languages, spike_surrogate")))
    }
}

fn config_error(field: &str, message: impl Into<String>) -> Error {
    Error::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: DatasetKind,
    pub alpha: f64,
    pub scores: Vec<ScoreKind>,
    pub dim: usize,
    pub split: SplitFractions,
    pub ood_holdout: Vec<String>,
    pub repetitions: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub similarity: SimilarityKind,
    pub set_calibration: CalibrationMode,
    pub point_calibration: CalibrationMode,
    pub allow_empty: bool,
    pub levels: usize,
    pub beta: f64,
    pub mnist_images: Option<PathBuf>,
    pub mnist_labels: Option<PathBuf>,
    pub isolet_path: Option<PathBuf>,
    pub languages_dir: Option<PathBuf>,
    pub checksums: Vec<String>,
    pub sigma3: f64,
    pub synthetic_n: usize,
    pub synthetic_ood: usize,
    pub spike_classes: usize,
    pub spike_neurons: usize,
    pub spike_separation: f64,
    pub spike_samples: usize,
    pub spike_run_samples: usize,
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

impl ExperimentConfig {
    pub fn defaults(dataset: DatasetKind) -> Self {
        let (alpha, split, holdout, similarity) = match dataset {
            DatasetKind::Synthetic => (0.1, (0.4, 0.5, 0.1), vec![], SimilarityKind::InverseEuclidean),
            DatasetKind::Mnist => (0.05, (0.8, 0.15, 0.05), names(&["6", "7", "8", "9"]), SimilarityKind::CosineNormalized),
            DatasetKind::Isolet => (0.02, (0.57, 0.38, 0.05), names(&["W", "X", "Y", "Z"]), SimilarityKind::CosineNormalized),
            DatasetKind::Languages => (
                0.01,
                (0.75, 0.225, 0.025),
                names(&["Finnish", "Estonian", "Hungarian"]),
                SimilarityKind::CosineNormalized,
            ),
            DatasetKind::SpikeSurrogate => (0.2, (0.5, 0.4, 0.1), names(&[RUN_STATE]), SimilarityKind::ComplexCosine),
        };
        Self {
            dataset,
            alpha,
            scores: ScoreKind::ALL.to_vec(),
            dim: DEFAULT_DIM,
            split: SplitFractions::new(split.0, split.1, split.2),
            ood_holdout: holdout,
            repetitions: 100,
            seed: 0,
            out: PathBuf::from("results"),
            similarity,
            set_calibration: CalibrationMode::Marginal,
            point_calibration: CalibrationMode::Conditional,
            allow_empty: false,
            levels: DEFAULT_LEVELS,
            beta: DEFAULT_BETA,
            mnist_images: None,
            mnist_labels: None,
            isolet_path: None,
            languages_dir: None,
            checksums: vec![],
            sigma3: 4.0,
            synthetic_n: 1000,
            synthetic_ood: 100,
            spike_classes: 4,
            spike_neurons: 16,
            spike_separation: 4.0,
            spike_samples: 100,
            spike_run_samples: 100,
        }
    }

    /// Applies assignments over the defaults of the dataset they select
    /// (the last `dataset` assignment, or synthetic), then validates.
    pub fn from_pairs(pairs: &[(String, String)]) -> Result<Self> {
        let dataset = pairs
            .iter()
            .rev()
            .find(|(k, _)| k == "dataset")
            .map(|(_, v)| v.parse())
            .transpose()?
            .unwrap_or(DatasetKind::Synthetic);
        let mut cfg = Self::defaults(dataset);
        for (k, v) in pairs {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_pairs(&parse_pairs(text)?)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        fn num<T: FromStr>(key: &str, v: &str, what: &str) -> Result<T> {
            v.parse().map_err(|_| config_error(key, format!("expected {what}, got `{v}`")))
        }
        let path = |v: &str| (!v.is_empty()).then(|| PathBuf::from(v));
        let list = |v: &str| -> Vec<String> {
            v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
        };
        let mode = |v: &str| match v {
            "marginal" => Ok(CalibrationMode::Marginal),
            "conditional" => Ok(CalibrationMode::Conditional),
            _ => Err(config_error(key, format!("expected marginal or conditional, got `{v}`"))),
        };
        match key {
            "dataset" => self.dataset = v.parse()?,
            "alpha" => self.alpha = num(key, v, "a real number")?,
            "scores" | "score" => {
                self.scores = list(v)
                    .iter()
                    .map(|s| s.parse().map_err(|e: Error| config_error(key, e.to_string())))
                    .collect::<Result<_>>()?
            }
            "d" | "dim" => self.dim = num(key, v, "a positive integer")?,
            "split" => {
                let parts: Vec<f64> = list(v)
                    .iter()
                    .map(|p| num(key, p, "three comma-separated fractions"))
                    .collect::<Result<_>>()?;
                match parts.as_slice() {
                    [a, b, c] => self.split = SplitFractions::new(*a, *b, *c),
                    _ => return Err(config_error(key, "expected three comma-separated fractions train,cal,test")),
                }
            }
            "ood_holdout" => self.ood_holdout = list(v),
            "repetitions" | "reps" => self.repetitions = num(key, v, "a positive integer")?,
            "seed" => self.seed = num(key, v, "an unsigned 64-bit integer")?,
            "out" => self.out = PathBuf::from(v),
            "similarity" => self.similarity = v.parse().map_err(|e: Error| config_error(key, e.to_string()))?,
            "set_calibration" => self.set_calibration = mode(v)?,
            "point_calibration" => self.point_calibration = mode(v)?,
            "allow_empty" => self.allow_empty = num(key, v, "true or false")?,
            "levels" => self.levels = num(key, v, "an integer >= 2")?,
            "beta" => self.beta = num(key, v, "a positive real")?,
            "mnist_images" => self.mnist_images = path(v),
            "mnist_labels" => self.mnist_labels = path(v),
            "isolet_path" => self.isolet_path = path(v),
            "languages_dir" => self.languages_dir = path(v),
            "checksums" => self.checksums = list(v),
            "sigma3" => self.sigma3 = num(key, v, "a positive real")?,
            "synthetic_n" => self.synthetic_n = num(key, v, "a positive integer")?,
            "synthetic_ood" => self.synthetic_ood = num(key, v, "a non-negative integer")?,
            "spike_classes" => self.spike_classes = num(key, v, "a positive integer")?,
            "spike_neurons" => self.spike_neurons = num(key, v, "a positive integer")?,
            "spike_separation" => self.spike_separation = num(key, v, "a non-negative real")?,
            "spike_samples" => self.spike_samples = num(key, v, "a positive integer")?,
            "spike_run_samples" => self.spike_run_samples = num(key, v, "a non-negative integer")?,
            other => return Err(config_error(other, "unknown configuration key")),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, field: &str, message: String| if ok { Ok(()) } else { Err(config_error(field, message)) };
        check(self.alpha > 0.0 && self.alpha < 1.0, "alpha", format!("must lie in the open interval (0, 1), got {}", self.alpha))?;
        check(!self.scores.is_empty(), "scores", "at least one score kind is required".into())?;
        for s in &self.scores {
            s.validate().map_err(|e| config_error("scores", e.to_string()))?;
        }
        check(self.dim >= 1, "d", "must be at least 1".into())?;
        self.split.validate().map_err(|e| config_error("split", format!("{e}; fractions must each lie in (0, 1) and sum to 1")))?;
        check(self.repetitions >= 1, "repetitions", "must be at least 1".into())?;
        check(self.levels >= 2, "levels", format!("must be at least 2, got {}", self.levels))?;
        check(self.beta > 0.0 && self.beta.is_finite(), "beta", format!("must be a positive finite real, got {}", self.beta))?;
        check(self.sigma3 > 0.0 && self.sigma3.is_finite(), "sigma3", format!("must be a positive finite real, got {}", self.sigma3))?;
        check(self.synthetic_n >= 3, "synthetic_n", "must be at least 3".into())?;
        check(self.spike_classes >= 1, "spike_classes", "must be at least 1".into())?;
        check(self.spike_neurons >= 1, "spike_neurons", "must be at least 1".into())?;
        check(
            self.spike_separation >= 0.0 && self.spike_separation.is_finite(),
            "spike_separation",
            "must be a finite real >= 0".into(),
        )?;
        for c in &self.checksums {
            check(c.len() == 64 && c.chars().all(|ch| ch.is_ascii_hexdigit()), "checksums", format!("`{c}` is not a hex SHA-256 digest"))?;
        }
        Ok(())
    }

    /// Canonical echo of every setting that affects results (excludes `out`).
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let opt = |p: &Option<PathBuf>| p.as_ref().map_or(String::new(), |p| p.display().to_string());
        let mode = |m: CalibrationMode| match m {
            CalibrationMode::Marginal => "marginal",
            CalibrationMode::Conditional => "conditional",
        };
        let s = &self.split;
        [
            ("dataset", self.dataset.to_string()),
            ("alpha", self.alpha.to_string()),
            ("scores", self.scores.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")),
            ("d", self.dim.to_string()),
            ("split", format!("{},{},{}", s.train, s.cal, s.test)),
            ("ood_holdout", self.ood_holdout.join(",")),
            ("repetitions", self.repetitions.to_string()),
            ("seed", self.seed.to_string()),
            ("similarity", self.similarity.name().to_string()),
            ("set_calibration", mode(self.set_calibration).to_string()),
            ("point_calibration", mode(self.point_calibration).to_string()),
            ("allow_empty", self.allow_empty.to_string()),
            ("levels", self.levels.to_string()),
            ("beta", self.beta.to_string()),
            ("mnist_images", opt(&self.mnist_images)),
            ("mnist_labels", opt(&self.mnist_labels)),
            ("isolet_path", opt(&self.isolet_path)),
            ("languages_dir", opt(&self.languages_dir)),
            ("checksums", self.checksums.join(",")),
            ("sigma3", self.sigma3.to_string()),
            ("synthetic_n", self.synthetic_n.to_string()),
            ("synthetic_ood", self.synthetic_ood.to_string()),
            ("spike_classes", self.spike_classes.to_string()),
            ("spike_neurons", self.spike_neurons.to_string()),
            ("spike_separation", self.spike_separation.to_string()),
            ("spike_samples", self.spike_samples.to_string()),
            ("spike_run_samples", self.spike_run_samples.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    /// First 16 hex digits of the SHA-256 of the canonical echo.
    pub fn hash(&self) -> String {
        let text: String = self.to_map().iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        sha256_hex(text.as_bytes())[..16].to_string()
    }

    fn required<'a>(&self, field: &str, value: &'a Option<PathBuf>) -> Result<&'a Path> {
        value
            .as_deref()
            .ok_or_else(|| config_error(field, format!("required for dataset {}; pass a path to an existing file", self.dataset)))
    }

    fn load(&self) -> Result<DatasetBundle> {
        let bundle = match self.dataset {
            DatasetKind::Synthetic => unreachable!("synthetic data is generated per repetition"),
            DatasetKind::Mnist => ingest_mnist(
                self.required("mnist_images", &self.mnist_images)?,
                self.required("mnist_labels", &self.mnist_labels)?,
            )?,
            DatasetKind::Isolet => ingest_isolet(self.required("isolet_path", &self.isolet_path)?)?,
            DatasetKind::Languages => ingest_languages(self.required("languages_dir", &self.languages_dir)?)?,
            DatasetKind::SpikeSurrogate => generate_spike_surrogate(&SpikeSurrogateConfig::separated(
                self.spike_classes,
                self.spike_neurons,
                self.spike_separation,
                self.spike_samples,
                self.spike_run_samples,
                derive_seed(self.seed, "spike", 0),
            ))?,
        };
        if !self.checksums.is_empty() {
            bundle.verify_checksums(&self.checksums)?;
        }
        Ok(bundle)
    }

    fn holdout_names(&self, bundle: &DatasetBundle) -> Result<Vec<String>> {
        self.ood_holdout
            .iter()
            .map(|want| {
                bundle
                    .label_names
                    .iter()
                    .find(|n| n.eq_ignore_ascii_case(want))
                    .cloned()
                    .ok_or_else(|| {
                        config_error(
                            "ood_holdout",
                            format!("label `{want}` not found; dataset labels are {}", bundle.label_names.join(",")),
                        )
                    })
            })
            .collect()
    }

    fn encoder(&self, bundle: &DatasetBundle) -> Result<(EncoderSpec, PrototypeStyle)> {
        let seed = derive_seed(self.seed, "encoder", 0);
        let first = bundle.features.first().ok_or(Error::Empty("dataset"))?;
        Ok(match (self.dataset, first) {
            (DatasetKind::Mnist, crate::encoders::Features::Binary(px)) => (
                EncoderSpec::BinaryImage { pixels: px.len(), dim: self.dim, seed },
                PrototypeStyle::Binarized,
            ),
            (DatasetKind::Isolet, crate::encoders::Features::Real(x)) => (
                EncoderSpec::Quantized { features: x.len(), levels: self.levels, dim: self.dim, seed },
                PrototypeStyle::Binarized,
            ),
            (DatasetKind::Languages, _) => (EncoderSpec::Trigram { dim: self.dim, seed }, PrototypeStyle::L2NormalizedReal),
            (DatasetKind::SpikeSurrogate, crate::encoders::Features::Matrix(m)) => (
                EncoderSpec::Temporal { inputs: m.rows(), max_len: m.cols(), dim: self.dim, beta: self.beta, seed },
                PrototypeStyle::RawComplex,
            ),
            (_, other) => {
                return Err(Error::FeatureKind {
                    expected: "features matching the dataset",
                    found: other.kind_name(),
                })
            }
        })
    }

    /// Loads or generates the data and assembles the runnable plan.
    pub fn build_plan(&self) -> Result<(ExperimentPlan, RunMetadata)> {
        self.validate()?;
        let (source, encoder, style, sources) = if self.dataset == DatasetKind::Synthetic {
            (
                DataSource::Synthetic(SyntheticConfig::new(self.sigma3, self.synthetic_n, self.synthetic_ood, self.seed)),
                EncoderSpec::Identity,
                PrototypeStyle::Centroid,
                vec![],
            )
        } else {
            let bundle = self.load()?;
            let holdout = self.holdout_names(&bundle)?;
            let (encoder, style) = self.encoder(&bundle)?;
            let (inliers, ood) = if holdout.is_empty() {
                (bundle.clone(), None)
            } else {
                let (i, o) = bundle.split_holdout(&holdout)?;
                (i, Some(o))
            };
            if inliers.label_names.iter().any(|n| holdout.contains(n)) {
                return Err(config_error("ood_holdout", "holdout labels leaked into the inlier set"));
            }
            (DataSource::Bundle { inliers, ood }, encoder, style, bundle.provenance)
        };
        let plan = ExperimentPlan {
            source,
            encoder,
            style,
            similarity: self.similarity,
            scores: self.scores.clone(),
            alpha: self.alpha,
            split: self.split,
            repetitions: self.repetitions,
            seed: self.seed,
            set_calibration: self.set_calibration,
            point_calibration: self.point_calibration,
            allow_empty: self.allow_empty,
        };
        plan.validate().map_err(|e| config_error("plan", e.to_string()))?;
        let metadata = RunMetadata {
            config_hash: self.hash(),
            config: self.to_map(),
            dataset: self.dataset.to_string(),
            sources,
        };
        Ok((plan, metadata))
    }
}

/// Splits config text into `(key, value)` assignments.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| config_error(&format!("line {}", i + 1), format!("expected `key = value`, got `{line}`")))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(items: &[(&str, &str)]) -> Vec<(String, String)> {
        items.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn dataset_defaults() {
        let m = ExperimentConfig::defaults(DatasetKind::Mnist);
        assert_eq!(m.alpha, 0.05);
        assert_eq!(m.ood_holdout, vec!["6", "7", "8", "9"]);
        let l = ExperimentConfig::defaults(DatasetKind::Languages);
        assert_eq!(l.split, SplitFractions::new(0.75, 0.225, 0.025));
        assert_eq!(ExperimentConfig::defaults(DatasetKind::Isolet).alpha, 0.02);
        assert_eq!(ExperimentConfig::defaults(DatasetKind::SpikeSurrogate).alpha, 0.2);
        assert_eq!(ExperimentConfig::defaults(DatasetKind::Synthetic).dim, 10_000);
    }

    #[test]
    fn text_with_comments_and_overrides() {
        let text = "# demo\ndataset = mnist\nalpha = 0.1 # inline\n\nd=2000\nscores = ratio, discount\n";
        let mut p = parse_pairs(text).unwrap();
        p.push(("alpha".into(), "0.2".into()));
        let cfg = ExperimentConfig::from_pairs(&p).unwrap();
        assert_eq!(cfg.dataset, DatasetKind::Mnist);
        assert_eq!(cfg.alpha, 0.2);
        assert_eq!(cfg.dim, 2000);
        assert_eq!(cfg.scores, vec![ScoreKind::Ratio, ScoreKind::Discount]);
        assert!(parse_pairs("no equals sign").is_err());
    }

    #[test]
    fn validation_names_field_and_range() {
        let err = ExperimentConfig::from_pairs(&pairs(&[("alpha", "1.5")])).unwrap_err().to_string();
        assert!(err.contains("alpha") && err.contains("(0, 1)"), "{err}");
        let err = ExperimentConfig::from_pairs(&pairs(&[("bogus", "1")])).unwrap_err().to_string();
        assert!(err.contains("bogus"));
        let err = ExperimentConfig::from_pairs(&pairs(&[("split", "0.5,0.5,0.5")])).unwrap_err();
        assert!(err.to_string().contains("split"));
        assert!(ExperimentConfig::from_pairs(&pairs(&[("d", "-3")])).is_err());
        assert!(ExperimentConfig::from_pairs(&pairs(&[("dataset", "cifar")])).is_err());
        assert!(ExperimentConfig::from_pairs(&pairs(&[("scores", "nope")])).is_err());
    }

    #[test]
    fn hash_ignores_output_path_but_tracks_settings() {
        let a = ExperimentConfig::from_pairs(&pairs(&[("out", "x")])).unwrap();
        let b = ExperimentConfig::from_pairs(&pairs(&[("out", "y")])).unwrap();
        let c = ExperimentConfig::from_pairs(&pairs(&[("seed", "9")])).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 16);
    }

    #[test]
    fn missing_paths_are_reported() {
        let cfg = ExperimentConfig::from_pairs(&pairs(&[("dataset", "mnist")])).unwrap();
        let err = cfg.build_plan().unwrap_err().to_string();
        assert!(err.contains("mnist_images"), "{err}");
    }

    #[test]
    fn spike_plan_holds_out_run_state() {
        let cfg = ExperimentConfig::from_pairs(&pairs(&[("dataset", "spike_surrogate"), ("d", "64"), ("spike_samples", "5")])).unwrap();
        let (plan, meta) = cfg.build_plan().unwrap();
        match &plan.source {
            DataSource::Bundle { inliers, ood } => {
                assert_eq!(inliers.classes(), 4);
                assert_eq!(ood.as_ref().unwrap().len(), 100);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(meta.config_hash, cfg.hash());
    }
}
