//! Dataset ingestion and the in-memory [`DatasetBundle`].
//!
//! Files are user supplied and never downloaded. Each bundle records the
//! files it came from with their SHA-256 digests.

mod idx;
mod isolet;
mod languages;
mod spike;

pub use idx::{ingest_mnist, read_idx, IdxArray};
pub use isolet::{ingest_isolet, ISOLET_FEATURES};
pub use languages::ingest_languages;
pub use spike::{generate_spike_surrogate, SpikeSurrogateConfig, RUN_STATE};

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::encoders::Features;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceFile {
    pub path: String,
    pub sha256: String,
}

impl SourceFile {
    pub(crate) fn from_bytes(path: &Path, bytes: &[u8]) -> Self {
        Self {
            path: path.display().to_string(),
            sha256: sha256_hex(bytes),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetBundle {
    pub name: String,
    pub features: Vec<Features>,
    /// Dense indices into `label_names`.
    pub labels: Vec<usize>,
    pub label_names: Vec<String>,
    pub provenance: Vec<SourceFile>,
}

impl DatasetBundle {
    pub fn new(
        name: impl Into<String>,
        features: Vec<Features>,
        labels: Vec<usize>,
        label_names: Vec<String>,
        provenance: Vec<SourceFile>,
    ) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                expected: features.len(),
                found: labels.len(),
            });
        }
        if let Some(&y) = labels.iter().find(|&&y| y >= label_names.len()) {
            return Err(Error::LabelOutOfRange {
                label: y,
                classes: label_names.len(),
            });
        }
        Ok(Self {
            name: name.into(),
            features,
            labels,
            label_names,
            provenance,
        })
    }

    /// Builds dense labels from raw names; indices follow sorted name order.
    pub fn from_named(
        name: impl Into<String>,
        features: Vec<Features>,
        names: &[String],
        provenance: Vec<SourceFile>,
    ) -> Result<Self> {
        let label_names: Vec<String> = names.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let labels = names
            .iter()
            .map(|n| label_names.binary_search(n).expect("name collected above"))
            .collect();
        Self::new(name, features, labels, label_names, provenance)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn classes(&self) -> usize {
        self.label_names.len()
    }

    /// Fails unless each expected digest matches the corresponding source file.
    pub fn verify_checksums(&self, expected: &[String]) -> Result<()> {
        if expected.len() > self.provenance.len() {
            return Err(Error::invalid(
                "checksums",
                expected.len(),
                "at most one per source file",
            ));
        }
        for (want, source) in expected.iter().zip(&self.provenance) {
            if !want.eq_ignore_ascii_case(&source.sha256) {
                return Err(Error::Checksum {
                    path: source.path.clone().into(),
                    expected: want.clone(),
                    actual: source.sha256.clone(),
                });
            }
        }
        Ok(())
    }

    /// Splits off the named classes. The inlier part is relabeled densely,
    /// keeping the relative order of the remaining names.
    pub fn split_holdout(&self, holdout: &[String]) -> Result<(DatasetBundle, DatasetBundle)> {
        for name in holdout {
            if !self.label_names.contains(name) {
                return Err(Error::invalid(
                    "ood holdout label",
                    name,
                    "a label present in the dataset",
                ));
            }
        }
        let is_ood: Vec<bool> = self.label_names.iter().map(|n| holdout.contains(n)).collect();
        let kept: Vec<String> = self
            .label_names
            .iter()
            .zip(&is_ood)
            .filter(|(_, &o)| !o)
            .map(|(n, _)| n.clone())
            .collect();
        if kept.is_empty() {
            return Err(Error::invalid("ood holdout", holdout.join(","), "to leave at least one inlier class"));
        }
        let mut remap = vec![usize::MAX; self.label_names.len()];
        let mut next = 0;
        for (old, &o) in is_ood.iter().enumerate() {
            if !o {
                remap[old] = next;
                next += 1;
            }
        }
        let (mut in_x, mut in_y, mut out_x, mut out_y) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (x, &y) in self.features.iter().zip(&self.labels) {
            if is_ood[y] {
                out_x.push(x.clone());
                out_y.push(y);
            } else {
                in_x.push(x.clone());
                in_y.push(remap[y]);
            }
        }
        let inliers = Self::new(self.name.clone(), in_x, in_y, kept, self.provenance.clone())?;
        let ood = Self::new(
            format!("{}-ood", self.name),
            out_x,
            out_y,
            self.label_names.clone(),
            self.provenance.clone(),
        )?;
        Ok((inliers, ood))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> DatasetBundle {
        let names: Vec<String> = ["b", "a", "c", "a"].iter().map(|s| s.to_string()).collect();
        let xs = (0..4).map(|i| Features::Real(vec![f64::from(i)])).collect();
        DatasetBundle::from_named("toy", xs, &names, vec![]).unwrap()
    }

    #[test]
    fn dense_labels_follow_sorted_names() {
        let b = toy();
        assert_eq!(b.label_names, vec!["a", "b", "c"]);
        assert_eq!(b.labels, vec![1, 0, 2, 0]);
    }

    #[test]
    fn holdout_relabels_inliers() {
        let (inl, ood) = toy().split_holdout(&["b".to_string()]).unwrap();
        assert_eq!(inl.label_names, vec!["a", "c"]);
        assert_eq!(inl.labels, vec![0, 1, 0]);
        assert_eq!(ood.len(), 1);
        assert_eq!(ood.features[0], Features::Real(vec![0.0]));
        assert!(toy().split_holdout(&["zz".to_string()]).is_err());
        let all: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        assert!(toy().split_holdout(&all).is_err());
    }

    #[test]
    fn checksum_verification() {
        let mut b = toy();
        b.provenance.push(SourceFile::from_bytes(Path::new("x"), b"abc"));
        let good = "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad".to_string();
        assert_eq!(b.provenance[0].sha256, good);
        b.verify_checksums(&[good.to_uppercase()]).unwrap();
        assert!(matches!(b.verify_checksums(&["00".into()]), Err(Error::Checksum { .. })));
    }
}
