//! Repeated split / train / calibrate / evaluate loop.
//!
//! Each repetition owns seeds derived from the master seed and its index, so
//! results do not depend on scheduling. Repetitions run in parallel and are
//! aggregated in index order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{ood_auc, Summary};
use super::split::{split_data, SplitFractions, SplitSpec};
use super::synthetic::{generate_synthetic, SyntheticConfig};
use crate::classifier::{argmax, PrototypeStyle, TrainedModel};
use crate::conformal::{
    calibrate_conditional, calibrate_marginal, check_alpha, label_scores, min_score, Calibrator,
    PredictionSet, ScoreKind,
};
use crate::data::DatasetBundle;
use crate::encoders::{EncoderSpec, Features};
use crate::error::{Error, Result};
use crate::hypervector::{Hypervector, SimilarityKind};
use crate::rng::{derive_seed, UniformStream};

/// Standard HDC trained on the training and calibration folds together.
pub const HDC: &str = "hdc";
/// Standard HDC trained on the training fold only.
pub const HDC_TRAIN: &str = "hdc_train";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationMode {
    Marginal,
    Conditional,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// Fresh data is drawn for every repetition.
    Synthetic(SyntheticConfig),
    /// Fixed data, re-split every repetition. OOD points are all evaluated.
    Bundle {
        inliers: DatasetBundle,
        ood: Option<DatasetBundle>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub source: DataSource,
    pub encoder: EncoderSpec,
    pub style: PrototypeStyle,
    pub similarity: SimilarityKind,
    pub scores: Vec<ScoreKind>,
    pub alpha: f64,
    pub split: SplitFractions,
    pub repetitions: usize,
    pub seed: u64,
    /// Calibration behind the set-valued rows.
    pub set_calibration: CalibrationMode,
    /// Calibration behind the point-valued accuracy column.
    pub point_calibration: CalibrationMode,
    /// Whether point predictions may abstain.
    pub allow_empty: bool,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        self.split.validate()?;
        if self.repetitions == 0 {
            return Err(Error::invalid("repetitions", 0, "at least 1"));
        }
        for (i, k) in self.scores.iter().enumerate() {
            k.validate()?;
            if self.scores[..i].iter().any(|o| o.name() == k.name()) {
                return Err(Error::invalid("score", k.name(), "each score kind at most once"));
            }
        }
        Ok(())
    }
}

/// One method's metrics within one repetition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepetitionMetrics {
    pub coverage: f64,
    pub size: f64,
    pub accuracy: f64,
    pub auc: Option<f64>,
    /// Fraction of inlier test points given an empty set.
    pub empty_rate: f64,
    pub ood_empty_rate: Option<f64>,
    /// Per true label: test points covered, and test points seen.
    pub label_hits: Vec<usize>,
    pub label_counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub method: String,
    pub coverage: Summary,
    pub size: Summary,
    pub accuracy: Summary,
    pub auc: Option<Summary>,
    pub empty_rate: Summary,
    pub ood_empty_rate: Option<Summary>,
    /// Coverage pooled over every test point of every repetition.
    pub pooled_coverage: f64,
    pub pooled_count: usize,
    /// Pooled per-label coverage; `None` for labels never tested.
    pub label_coverage: Vec<Option<f64>>,
    pub label_counts: Vec<usize>,
    #[serde(skip)]
    pub per_repetition: Vec<RepetitionMetrics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub methods: Vec<MethodResult>,
    pub repetitions: usize,
    pub alpha: f64,
    pub seed: u64,
    pub classes: usize,
    pub n_train: usize,
    pub n_cal: usize,
    pub n_test: usize,
    pub n_ood: usize,
    /// Calibration points per label, averaged over repetitions.
    pub label_cal_counts: Vec<f64>,
}

impl ExperimentResult {
    pub fn method(&self, name: &str) -> Option<&MethodResult> {
        self.methods.iter().find(|m| m.method == name)
    }
}

struct Repetition {
    methods: Vec<RepetitionMetrics>,
    sizes: (usize, usize, usize, usize),
    cal_counts: Vec<usize>,
}

fn pick<T: Clone>(all: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| all[i].clone()).collect()
}

fn profiles(model: &TrainedModel, hs: &[&Hypervector]) -> Result<Vec<Vec<f64>>> {
    hs.par_iter().map(|h| model.profile_of(h)).collect()
}

fn hdc_metrics(test_profiles: &[Vec<f64>], test_y: &[usize], classes: usize) -> RepetitionMetrics {
    let mut hits = vec![0; classes];
    let mut counts = vec![0; classes];
    for (p, &y) in test_profiles.iter().zip(test_y) {
        counts[y] += 1;
        hits[y] += usize::from(argmax(p) == y);
    }
    let accuracy = hits.iter().sum::<usize>() as f64 / test_y.len() as f64;
    RepetitionMetrics {
        coverage: accuracy,
        size: 1.0,
        accuracy,
        auc: None,
        empty_rate: 0.0,
        ood_empty_rate: None,
        label_hits: hits,
        label_counts: counts,
    }
}

fn calibrate(mode: CalibrationMode, cal: &[(f64, usize)], alpha: f64, classes: usize, kind: ScoreKind) -> Result<Calibrator> {
    Ok(match mode {
        CalibrationMode::Marginal => {
            let scores: Vec<f64> = cal.iter().map(|c| c.0).collect();
            calibrate_marginal(&scores, alpha, kind)?.into()
        }
        CalibrationMode::Conditional => calibrate_conditional(cal, alpha, classes, kind)?.into(),
    })
}

struct Evaluation<'a> {
    plan: &'a ExperimentPlan,
    classes: usize,
    cal_profiles: &'a [Vec<f64>],
    cal_y: &'a [usize],
    test_profiles: &'a [Vec<f64>],
    test_y: &'a [usize],
    ood_profiles: Option<&'a [Vec<f64>]>,
    draws: &'a UniformStream,
}

impl Evaluation<'_> {
    fn conformal(&self, kind: ScoreKind) -> Result<RepetitionMetrics> {
        let n_cal = self.cal_profiles.len() as u64;
        let n_test = self.test_profiles.len() as u64;
        let cal = self
            .cal_profiles
            .par_iter()
            .zip(self.cal_y)
            .enumerate()
            .map(|(i, (p, &y))| Ok((label_scores(p, kind, self.draws.draw(i as u64))?[y], y)))
            .collect::<Result<Vec<_>>>()?;
        let set_cal = calibrate(self.plan.set_calibration, &cal, self.plan.alpha, self.classes, kind)?;
        let point_cal = if self.plan.point_calibration == self.plan.set_calibration {
            set_cal.clone()
        } else {
            calibrate(self.plan.point_calibration, &cal, self.plan.alpha, self.classes, kind)?
        };

        let test_scores = self
            .test_profiles
            .par_iter()
            .enumerate()
            .map(|(j, p)| label_scores(p, kind, self.draws.draw(n_cal + j as u64)))
            .collect::<Result<Vec<_>>>()?;
        let mut hits = vec![0; self.classes];
        let mut counts = vec![0; self.classes];
        let (mut size, mut empty, mut correct) = (0usize, 0usize, 0usize);
        let mut inlier_stat = Vec::with_capacity(test_scores.len());
        for (scores, &y) in test_scores.iter().zip(self.test_y) {
            inlier_stat.push(min_score(scores));
            let set = PredictionSet::from_scores(scores.clone(), |k| set_cal.threshold(k));
            counts[y] += 1;
            hits[y] += usize::from(set.contains(y));
            size += set.len();
            empty += usize::from(set.is_empty());
            let point = PredictionSet::from_scores(scores.clone(), |k| point_cal.threshold(k))
                .into_point(self.plan.allow_empty);
            correct += usize::from(point.point() == Some(y));
        }
        let n = test_scores.len() as f64;

        let (auc, ood_empty_rate) = match self.ood_profiles {
            Some(ood) if !ood.is_empty() => {
                let ood_scores = ood
                    .par_iter()
                    .enumerate()
                    .map(|(j, p)| label_scores(p, kind, self.draws.draw(n_cal + n_test + j as u64)))
                    .collect::<Result<Vec<_>>>()?;
                let stat: Vec<f64> = ood_scores.iter().map(|s| min_score(s)).collect();
                let empties = ood_scores
                    .iter()
                    .filter(|s| (0..s.len()).all(|k| s[k] > set_cal.threshold(k)))
                    .count();
                (
                    Some(ood_auc(&inlier_stat, &stat)?),
                    Some(empties as f64 / ood_scores.len() as f64),
                )
            }
            _ => (None, None),
        };
        Ok(RepetitionMetrics {
            coverage: hits.iter().sum::<usize>() as f64 / n,
            size: size as f64 / n,
            accuracy: correct as f64 / n,
            auc,
            empty_rate: empty as f64 / n,
            ood_empty_rate,
            label_hits: hits,
            label_counts: counts,
        })
    }
}

fn run_repetition(plan: &ExperimentPlan, r: usize) -> Result<Repetition> {
    let rep_seed = derive_seed(plan.seed, "repetition", r as u64);
    let generated;
    let (inliers, ood) = match &plan.source {
        DataSource::Synthetic(cfg) => {
            let mut cfg = cfg.clone();
            cfg.seed = derive_seed(rep_seed, "data", 0);
            generated = generate_synthetic(&cfg)?;
            (&generated.0, Some(&generated.1))
        }
        DataSource::Bundle { inliers, ood } => (inliers, ood.as_ref()),
    };
    let classes = inliers.classes();
    let split = split_data(
        inliers.len(),
        &SplitSpec {
            fractions: plan.split,
            seed: derive_seed(rep_seed, "split", 0),
        },
    )?;

    let spec = plan.encoder.with_seed(derive_seed(rep_seed, "encoder", 0));
    let train_x: Vec<Features> = if spec.learns_from_data() {
        pick(&inliers.features, &split.train)
    } else {
        Vec::new()
    };
    let encoder = spec.fit(&train_x)?;
    let encoded = encoder.encode_all(&inliers.features)?;
    let ood_encoded = ood.map(|o| encoder.encode_all(&o.features)).transpose()?;

    let labels = &inliers.labels;
    let train_y = pick(labels, &split.train);
    let cal_y = pick(labels, &split.cal);
    let test_y = pick(labels, &split.test);
    let train_h = pick(&encoded, &split.train);
    let model = TrainedModel::from_encoded(encoder.clone(), &train_h, &train_y, classes, plan.style, plan.similarity)?;
    let mut full_h = train_h;
    full_h.extend(pick(&encoded, &split.cal));
    let full_y: Vec<usize> = train_y.iter().chain(&cal_y).copied().collect();
    let baseline = TrainedModel::from_encoded(encoder, &full_h, &full_y, classes, plan.style, plan.similarity)?;

    let refs = |idx: &[usize]| idx.iter().map(|&i| &encoded[i]).collect::<Vec<_>>();
    let cal_profiles = profiles(&model, &refs(&split.cal))?;
    let test_refs = refs(&split.test);
    let test_profiles = profiles(&model, &test_refs)?;
    let baseline_profiles = profiles(&baseline, &test_refs)?;
    let ood_profiles = ood_encoded
        .as_ref()
        .map(|hs| profiles(&model, &hs.iter().collect::<Vec<_>>()))
        .transpose()?;

    let draws = UniformStream::new(derive_seed(rep_seed, "uniform", 0));
    let eval = Evaluation {
        plan,
        classes,
        cal_profiles: &cal_profiles,
        cal_y: &cal_y,
        test_profiles: &test_profiles,
        test_y: &test_y,
        ood_profiles: ood_profiles.as_deref(),
        draws: &draws,
    };
    let mut methods = vec![
        hdc_metrics(&baseline_profiles, &test_y, classes),
        hdc_metrics(&test_profiles, &test_y, classes),
    ];
    for &kind in &plan.scores {
        methods.push(eval.conformal(kind)?);
    }
    let mut cal_counts = vec![0; classes];
    for &y in &cal_y {
        cal_counts[y] += 1;
    }
    Ok(Repetition {
        methods,
        sizes: (
            split.train.len(),
            split.cal.len(),
            split.test.len(),
            ood.map_or(0, DatasetBundle::len),
        ),
        cal_counts,
    })
}

fn summarize(method: String, reps: Vec<RepetitionMetrics>, classes: usize) -> MethodResult {
    let col = |f: &dyn Fn(&RepetitionMetrics) -> f64| Summary::of(&reps.iter().map(f).collect::<Vec<_>>()).expect("at least one repetition");
    let optional = |f: &dyn Fn(&RepetitionMetrics) -> Option<f64>| {
        reps.iter().map(f).collect::<Option<Vec<f64>>>().and_then(|v| Summary::of(&v))
    };
    let mut hits = vec![0usize; classes];
    let mut counts = vec![0usize; classes];
    for r in &reps {
        for y in 0..classes {
            hits[y] += r.label_hits[y];
            counts[y] += r.label_counts[y];
        }
    }
    let pooled_count: usize = counts.iter().sum();
    MethodResult {
        method,
        coverage: col(&|r| r.coverage),
        size: col(&|r| r.size),
        accuracy: col(&|r| r.accuracy),
        auc: optional(&|r| r.auc),
        empty_rate: col(&|r| r.empty_rate),
        ood_empty_rate: optional(&|r| r.ood_empty_rate),
        pooled_coverage: hits.iter().sum::<usize>() as f64 / pooled_count as f64,
        pooled_count,
        label_coverage: hits
            .iter()
            .zip(&counts)
            .map(|(&h, &c)| (c > 0).then(|| h as f64 / c as f64))
            .collect(),
        label_counts: counts,
        per_repetition: reps,
    }
}

pub fn run_experiment(plan: &ExperimentPlan) -> Result<ExperimentResult> {
    plan.validate()?;
    let reps = (0..plan.repetitions)
        .into_par_iter()
        .map(|r| {
            run_repetition(plan, r).map_err(|e| Error::Repetition {
                repetition: r,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let classes = match &plan.source {
        DataSource::Synthetic(_) => 3,
        DataSource::Bundle { inliers, .. } => inliers.classes(),
    };
    let names: Vec<String> = [HDC, HDC_TRAIN]
        .iter()
        .map(|s| s.to_string())
        .chain(plan.scores.iter().map(|k| k.name().to_string()))
        .collect();
    let mut label_cal_counts = vec![0.0; classes];
    for rep in &reps {
        for (acc, &c) in label_cal_counts.iter_mut().zip(&rep.cal_counts) {
            *acc += c as f64 / reps.len() as f64;
        }
    }
    let (n_train, n_cal, n_test, n_ood) = reps[0].sizes;
    let mut per_method: Vec<Vec<RepetitionMetrics>> = vec![Vec::with_capacity(reps.len()); names.len()];
    for rep in reps {
        for (slot, m) in per_method.iter_mut().zip(rep.methods) {
            slot.push(m);
        }
    }
    Ok(ExperimentResult {
        methods: names
            .into_iter()
            .zip(per_method)
            .map(|(name, reps)| summarize(name, reps, classes))
            .collect(),
        repetitions: plan.repetitions,
        alpha: plan.alpha,
        seed: plan.seed,
        classes,
        n_train,
        n_cal,
        n_test,
        n_ood,
        label_cal_counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypervector::SimilarityKind;

    fn synthetic_plan(reps: usize) -> ExperimentPlan {
        ExperimentPlan {
            source: DataSource::Synthetic(SyntheticConfig::new(4.0, 300, 30, 0)),
            encoder: EncoderSpec::Identity,
            style: PrototypeStyle::Centroid,
            similarity: SimilarityKind::InverseEuclidean,
            scores: ScoreKind::ALL.to_vec(),
            alpha: 0.1,
            split: SplitFractions::new(0.4, 0.5, 0.1),
            repetitions: reps,
            seed: 3,
            set_calibration: CalibrationMode::Marginal,
            point_calibration: CalibrationMode::Conditional,
            allow_empty: false,
        }
    }

    #[test]
    fn deterministic_and_well_formed() {
        let plan = synthetic_plan(4);
        let a = run_experiment(&plan).unwrap();
        let b = run_experiment(&plan).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.methods.len(), 7);
        assert_eq!((a.n_train, a.n_cal, a.n_test, a.n_ood), (120, 150, 30, 30));
        for m in &a.methods {
            assert!((0.0..=1.0).contains(&m.coverage.mean));
            assert!((0.0..=3.0).contains(&m.size.mean));
            assert_eq!(m.pooled_count, 120);
        }
        let hdc = a.method(HDC).unwrap();
        assert_eq!(hdc.size.mean, 1.0);
        assert_eq!(hdc.coverage, hdc.accuracy);
        assert!(hdc.auc.is_none());
        assert!(a.method("discount").unwrap().auc.is_some());
        let total: f64 = a.label_cal_counts.iter().sum();
        assert!((total - 150.0).abs() < 1e-9);
    }

    #[test]
    fn similarity_point_prediction_matches_hdc_train() {
        let mut plan = synthetic_plan(3);
        plan.scores = vec![ScoreKind::Similarity];
        plan.point_calibration = CalibrationMode::Marginal;
        let res = run_experiment(&plan).unwrap();
        let train = res.method(HDC_TRAIN).unwrap();
        let sim = res.method("similarity").unwrap();
        assert_eq!(train.accuracy, sim.accuracy);
    }

    #[test]
    fn invalid_plans() {
        let mut plan = synthetic_plan(1);
        plan.alpha = 1.5;
        assert!(run_experiment(&plan).is_err());
        let mut plan = synthetic_plan(1);
        plan.scores = vec![ScoreKind::Ratio, ScoreKind::Ratio];
        assert!(plan.validate().is_err());
        let mut plan = synthetic_plan(0);
        plan.repetitions = 0;
        assert!(plan.validate().is_err());
    }

    #[test]
    fn failing_repetition_reports_its_index() {
        let mut plan = synthetic_plan(2);
        plan.encoder = EncoderSpec::Trigram { dim: 16, seed: 0 };
        let err = run_experiment(&plan).unwrap_err();
        assert!(matches!(err, Error::Repetition { .. }));
        assert!(err.to_string().contains("repetition"));
    }
}
