//! Prototype construction and argmax-similarity classification.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::encoders::{Encoder, EncoderSpec, Features, QuantizationGrid};
use crate::error::{Error, Result};
use crate::hypervector::{
    similarity, sign_of_counts, ComplexAccumulator, Hypervector, RealAccumulator, SimilarityKind,
};

/// How a class's summed encodings are finalized into its prototype.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrototypeStyle {
    /// `sign(Σ h)`, for bipolar image and feature encodings.
    Binarized,
    /// `Σ h / ‖Σ h‖₂`, for trigram text.
    L2NormalizedReal,
    /// `Σ h` over complex accumulators, for temporal FHRR encodings.
    RawComplex,
    /// `Σ h / n`, the class mean, for feature-space experiments.
    Centroid,
}

enum Sum {
    Counts(Vec<i32>),
    Real(RealAccumulator),
    Complex(ComplexAccumulator),
}

fn mixed(first: &Hypervector, other: &Hypervector) -> Error {
    Error::RepresentationMismatch {
        left: first.repr_name(),
        right: other.repr_name(),
    }
}

fn accumulate(style: PrototypeStyle, members: &[&Hypervector]) -> Result<Hypervector> {
    let first = members[0];
    let d = first.dim();
    let mut sum = match (style, first) {
        (PrototypeStyle::Binarized, Hypervector::Bipolar(_)) => Sum::Counts(vec![0; d]),
        (PrototypeStyle::Binarized, other) => {
            return Err(Error::UnsupportedSimilarity {
                kind: "binarized prototype",
                repr: other.repr_name(),
            })
        }
        (PrototypeStyle::RawComplex, Hypervector::Phase(_) | Hypervector::Complex(_)) => {
            Sum::Complex(ComplexAccumulator::zeros(d)?)
        }
        (PrototypeStyle::RawComplex, other) => {
            return Err(Error::UnsupportedSimilarity {
                kind: "raw complex prototype",
                repr: other.repr_name(),
            })
        }
        (_, Hypervector::Bipolar(_) | Hypervector::Real(_)) => Sum::Real(RealAccumulator::zeros(d)?),
        (_, other) => {
            return Err(Error::UnsupportedSimilarity {
                kind: "real prototype",
                repr: other.repr_name(),
            })
        }
    };
    for h in members {
        if std::mem::discriminant(*h) != std::mem::discriminant(first) {
            return Err(mixed(first, h));
        }
        if h.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: h.dim(),
            });
        }
        match (&mut sum, h) {
            (Sum::Counts(c), Hypervector::Bipolar(b)) => {
                for (acc, &e) in c.iter_mut().zip(b.elements()) {
                    *acc += i32::from(e);
                }
            }
            (Sum::Real(r), Hypervector::Bipolar(b)) => r.add_bipolar(b)?,
            (Sum::Real(r), Hypervector::Real(x)) => r.add(x)?,
            (Sum::Complex(c), Hypervector::Phase(p)) => c.add_phasor(p)?,
            (Sum::Complex(c), Hypervector::Complex(x)) => c.add(x)?,
            _ => return Err(mixed(first, h)),
        }
    }
    Ok(match sum {
        Sum::Counts(c) => Hypervector::Bipolar(sign_of_counts(&c)),
        Sum::Complex(c) => Hypervector::Complex(c),
        Sum::Real(mut r) => {
            match style {
                PrototypeStyle::L2NormalizedReal => {
                    let n = r.norm();
                    if n > 0.0 {
                        r.scale(1.0 / n);
                    }
                }
                PrototypeStyle::Centroid => r.scale(1.0 / members.len() as f64),
                _ => unreachable!(),
            }
            Hypervector::Real(r)
        }
    })
}

/// Builds one prototype per label in `0..classes` from pre-encoded samples.
pub fn build_prototypes(
    encoded: &[Hypervector],
    labels: &[usize],
    classes: usize,
    style: PrototypeStyle,
) -> Result<Vec<Hypervector>> {
    if encoded.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: encoded.len(),
            found: labels.len(),
        });
    }
    let mut groups: Vec<Vec<&Hypervector>> = vec![Vec::new(); classes];
    for (h, &y) in encoded.iter().zip(labels) {
        groups
            .get_mut(y)
            .ok_or(Error::LabelOutOfRange { label: y, classes })?
            .push(h);
    }
    let reference = encoded.first().ok_or(Error::Empty("training data"))?;
    groups
        .iter()
        .enumerate()
        .map(|(y, members)| {
            if members.is_empty() {
                return Err(Error::EmptyClass(y));
            }
            if std::mem::discriminant(members[0]) != std::mem::discriminant(reference) {
                return Err(mixed(reference, members[0]));
            }
            accumulate(style, members)
        })
        .collect()
}

/// Index of the largest value; ties go to the smallest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Index of the smallest value; ties go to the smallest index.
pub fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    encoder: Encoder,
    prototypes: Vec<Hypervector>,
    similarity: SimilarityKind,
    style: PrototypeStyle,
    label_names: Vec<String>,
}

/// Encodes `samples`, accumulates per-class prototypes and wraps the result.
pub fn train_prototypes(
    samples: &[Features],
    labels: &[usize],
    classes: usize,
    encoder: Encoder,
    style: PrototypeStyle,
    similarity_kind: SimilarityKind,
) -> Result<TrainedModel> {
    let encoded = encoder.encode_all(samples)?;
    TrainedModel::from_encoded(encoder, &encoded, labels, classes, style, similarity_kind)
}

impl TrainedModel {
    pub fn from_encoded(
        encoder: Encoder,
        encoded: &[Hypervector],
        labels: &[usize],
        classes: usize,
        style: PrototypeStyle,
        similarity_kind: SimilarityKind,
    ) -> Result<Self> {
        let prototypes = build_prototypes(encoded, labels, classes, style)?;
        Ok(Self {
            encoder,
            prototypes,
            similarity: similarity_kind,
            style,
            label_names: (0..classes).map(|y| y.to_string()).collect(),
        })
    }

    pub fn with_label_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.prototypes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.prototypes.len(),
                found: names.len(),
            });
        }
        self.label_names = names;
        Ok(self)
    }

    pub fn classes(&self) -> usize {
        self.prototypes.len()
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    pub fn prototypes(&self) -> &[Hypervector] {
        &self.prototypes
    }

    pub fn similarity_kind(&self) -> SimilarityKind {
        self.similarity
    }

    pub fn style(&self) -> PrototypeStyle {
        self.style
    }

    pub fn label_names(&self) -> &[String] {
        &self.label_names
    }

    /// `δ_y = similarity(h, H^y)` for every class, with `h` already encoded.
    pub fn profile_of(&self, h: &Hypervector) -> Result<Vec<f64>> {
        self.prototypes
            .iter()
            .map(|p| similarity(h, p, self.similarity))
            .collect()
    }

    pub fn similarity_profile(&self, x: &Features) -> Result<Vec<f64>> {
        self.profile_of(&self.encoder.encode(x)?)
    }

    /// `argmax_y δ_y`, smallest label on ties.
    pub fn predict(&self, x: &Features) -> Result<usize> {
        Ok(argmax(&self.similarity_profile(x)?))
    }

    pub fn to_artifact(&self) -> ModelArtifact {
        ModelArtifact {
            format: MODEL_FORMAT.to_string(),
            encoder: self.encoder.spec(),
            grid: self.encoder.grid().cloned(),
            style: self.style,
            similarity: self.similarity,
            label_names: self.label_names.clone(),
            prototypes: self.prototypes.clone(),
        }
    }

    pub fn from_artifact(artifact: ModelArtifact) -> Result<Self> {
        if artifact.format != MODEL_FORMAT {
            return Err(Error::invalid("model format", artifact.format, MODEL_FORMAT));
        }
        if artifact.label_names.len() != artifact.prototypes.len() {
            return Err(Error::DimensionMismatch {
                expected: artifact.prototypes.len(),
                found: artifact.label_names.len(),
            });
        }
        Ok(Self {
            encoder: artifact.encoder.build(artifact.grid)?,
            prototypes: artifact.prototypes,
            similarity: artifact.similarity,
            style: artifact.style,
            label_names: artifact.label_names,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_vec(&self.to_artifact())?;
        std::fs::write(path, json).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_artifact(serde_json::from_slice(&bytes)?)
    }
}

pub const MODEL_FORMAT: &str = "chdc-model/1";

/// Everything needed to rebuild a [`TrainedModel`] bit-for-bit. Item and
/// level memories are regenerated from the encoder seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub format: String,
    pub encoder: EncoderSpec,
    pub grid: Option<QuantizationGrid>,
    pub style: PrototypeStyle,
    pub similarity: SimilarityKind,
    pub label_names: Vec<String>,
    pub prototypes: Vec<Hypervector>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypervector::{BipolarHypervector, INVERSE_EUCLIDEAN_EPS};

    fn identity_model(points: &[(f64, f64, usize)], classes: usize) -> TrainedModel {
        let xs: Vec<Features> = points.iter().map(|&(a, b, _)| Features::Real(vec![a, b])).collect();
        let ys: Vec<usize> = points.iter().map(|p| p.2).collect();
        train_prototypes(
            &xs,
            &ys,
            classes,
            Encoder::Identity,
            PrototypeStyle::Centroid,
            SimilarityKind::InverseEuclidean,
        )
        .unwrap()
    }

    #[test]
    fn singleton_class_prototype_is_its_encoding() {
        let spec = EncoderSpec::BinaryImage {
            pixels: 4,
            dim: 128,
            seed: 1,
        };
        let enc = spec.fit(&[]).unwrap();
        let xs = vec![Features::Binary(vec![1, 0, 1, 0]), Features::Binary(vec![0, 1, 0, 1])];
        let model = train_prototypes(
            &xs,
            &[0, 1],
            2,
            enc.clone(),
            PrototypeStyle::Binarized,
            SimilarityKind::CosineNormalized,
        )
        .unwrap();
        assert_eq!(model.prototypes()[0], enc.encode(&xs[0]).unwrap());
        let profile = model.similarity_profile(&xs[0]).unwrap();
        assert_eq!(profile[0], 1.0);
        assert_eq!(model.predict(&xs[1]).unwrap(), 1);
    }

    #[test]
    fn duplicating_samples_leaves_binarized_prototypes_unchanged() {
        let spec = EncoderSpec::BinaryImage {
            pixels: 16,
            dim: 256,
            seed: 2,
        };
        let enc = spec.fit(&[]).unwrap();
        let xs: Vec<Features> = (0..6u8)
            .map(|i| Features::Binary((0..16).map(|j| u8::from((j * 7 + i) % 3 == 0)).collect()))
            .collect();
        let ys = [0, 0, 0, 1, 1, 1];
        let base = train_prototypes(&xs, &ys, 2, enc.clone(), PrototypeStyle::Binarized, SimilarityKind::CosineNormalized).unwrap();
        for mult in 2..4 {
            let xs2: Vec<Features> = xs.iter().flat_map(|x| std::iter::repeat_n(x.clone(), mult)).collect();
            let ys2: Vec<usize> = ys.iter().flat_map(|&y| std::iter::repeat_n(y, mult)).collect();
            let dup = train_prototypes(&xs2, &ys2, 2, enc.clone(), PrototypeStyle::Binarized, SimilarityKind::CosineNormalized).unwrap();
            assert_eq!(dup.prototypes(), base.prototypes());
        }
    }

    #[test]
    fn centroid_prototypes_by_hand() {
        let model = identity_model(&[(0.0, 0.0, 0), (2.0, 0.0, 0), (1.0, 3.0, 0), (10.0, 10.0, 1)], 2);
        match &model.prototypes()[0] {
            Hypervector::Real(r) => assert_eq!(r.elements(), &[1.0, 1.0]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn triangle_profile_and_prediction() {
        let l = 4.0 * 2f64.sqrt();
        let mu = [(0.0, 0.0), (l, 0.0), (l / 2.0, 3f64.sqrt() / 2.0 * l)];
        let model = identity_model(&[(mu[0].0, mu[0].1, 0), (mu[1].0, mu[1].1, 1), (mu[2].0, mu[2].1, 2)], 3);
        let profile = model.similarity_profile(&Features::Real(vec![0.0, 0.0])).unwrap();
        assert_eq!(profile[0], 1.0 / INVERSE_EUCLIDEAN_EPS);
        assert!((profile[1] - 1.0 / l).abs() < 1e-12);
        assert!((profile[1] - profile[2]).abs() < 1e-12);
        assert_eq!(model.predict(&Features::Real(vec![0.0, 0.0])).unwrap(), 0);
        // equidistant from prototypes 0 and 1
        let mid = model.similarity_profile(&Features::Real(vec![l / 2.0, -3.0])).unwrap();
        assert_eq!(mid[0], mid[1]);
    }

    #[test]
    fn ties_go_to_smallest_label_and_argmax_is_monotone_invariant() {
        assert_eq!(argmax(&[0.5, 0.5, 0.5]), 0);
        assert_eq!(argmin(&[0.2, 0.1, 0.1]), 1);
        let p = [0.3, 0.9, 0.1, 0.9];
        let transformed: Vec<f64> = p.iter().map(|v: &f64| v.exp() * 3.0 + 1.0).collect();
        assert_eq!(argmax(&p), argmax(&transformed));
    }

    #[test]
    fn two_class_boundary_is_the_perpendicular_bisector() {
        let model = identity_model(&[(-1.0, 0.5, 0), (3.0, 2.5, 1)], 2);
        // bisector of (-1, 0.5) and (3, 2.5): 2x + y = 3.5
        for i in -20..=20 {
            for j in -20..=20 {
                let (x, y) = (i as f64 * 0.37, j as f64 * 0.41);
                let side = 2.0 * x + y - 3.5;
                if side.abs() < 1e-6 {
                    continue;
                }
                let label = model.predict(&Features::Real(vec![x, y])).unwrap();
                assert_eq!(label, usize::from(side > 0.0), "({x}, {y})");
            }
        }
    }

    #[test]
    fn training_errors() {
        let xs = vec![Features::Real(vec![0.0]), Features::Real(vec![1.0])];
        let err = train_prototypes(&xs, &[0, 0], 2, Encoder::Identity, PrototypeStyle::Centroid, SimilarityKind::InverseEuclidean);
        assert!(matches!(err, Err(Error::EmptyClass(1))));
        let encoded = vec![
            Hypervector::Bipolar(BipolarHypervector::ones(2).unwrap()),
            Hypervector::Real(RealAccumulator::zeros(2).unwrap()),
        ];
        assert!(build_prototypes(&encoded, &[0, 0], 1, PrototypeStyle::Centroid).is_err());
        assert!(build_prototypes(&encoded, &[0, 1], 2, PrototypeStyle::Centroid).is_err());
        assert!(build_prototypes(&encoded[..1], &[3], 2, PrototypeStyle::Centroid).is_err());
    }

    #[test]
    fn l2_prototypes_have_unit_norm() {
        let spec = EncoderSpec::Trigram { dim: 512, seed: 9 };
        let enc = spec.fit(&[]).unwrap();
        let xs = vec![Features::Text("the quick brown fox".into()), Features::Text("lazy dogs sleep".into())];
        let model = train_prototypes(&xs, &[0, 0], 1, enc, PrototypeStyle::L2NormalizedReal, SimilarityKind::CosineNormalized).unwrap();
        match &model.prototypes()[0] {
            Hypervector::Real(r) => assert!((r.norm() - 1.0).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn artifact_round_trip_is_bit_identical() {
        let spec = EncoderSpec::Quantized {
            features: 3,
            levels: 5,
            dim: 200,
            seed: 4,
        };
        let xs = vec![
            Features::Real(vec![0.1, 0.7, 3.0]),
            Features::Real(vec![0.9, 0.2, -1.0]),
            Features::Real(vec![0.4, 0.4, 1.5]),
        ];
        let enc = spec.fit(&xs).unwrap();
        let model = train_prototypes(&xs, &[0, 1, 1], 2, enc, PrototypeStyle::Binarized, SimilarityKind::HammingSimilarity)
            .unwrap()
            .with_label_names(vec!["a".into(), "b".into()])
            .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        model.save(&path).unwrap();
        let loaded = TrainedModel::load(&path).unwrap();
        assert_eq!(loaded, model);
        for x in &xs {
            assert_eq!(loaded.similarity_profile(x).unwrap(), model.similarity_profile(x).unwrap());
        }
    }
}
