//! Nonconformity scores over a similarity profile `δ ∈ [0, 1]^K`.
//!
//! Smaller means the input conforms better with the candidate label.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PENALTY: f64 = 0.5;
pub const DEFAULT_TEMPERATURE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScoreKind {
    /// `−δ_y`
    Similarity,
    /// `−δ_y / Σδ`
    Ratio,
    /// `−δ_y² / Σδ`
    Discount,
    /// `−δ_y + λ Σ_{k≠y} δ_k`
    Penalized { lambda: f64 },
    /// Randomized cumulative softmax mass, negated.
    InverseQuantile { temperature: f64 },
}

impl ScoreKind {
    /// The five kinds compared throughout, with default parameters.
    pub const ALL: [ScoreKind; 5] = [
        ScoreKind::Similarity,
        ScoreKind::Ratio,
        ScoreKind::Discount,
        ScoreKind::Penalized {
            lambda: DEFAULT_PENALTY,
        },
        ScoreKind::InverseQuantile {
            temperature: DEFAULT_TEMPERATURE,
        },
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ScoreKind::Similarity => "similarity",
            ScoreKind::Ratio => "ratio",
            ScoreKind::Discount => "discount",
            ScoreKind::Penalized { .. } => "penalized",
            ScoreKind::InverseQuantile { .. } => "inverse_quantile",
        }
    }

    /// Whether scoring consumes a uniform draw.
    pub fn is_randomized(&self) -> bool {
        matches!(self, ScoreKind::InverseQuantile { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ScoreKind::Penalized { lambda } if !(lambda >= 0.0 && lambda.is_finite()) => {
                Err(Error::invalid("lambda", lambda, "a finite real >= 0"))
            }
            ScoreKind::InverseQuantile { temperature }
                if !(temperature > 0.0 && temperature.is_finite()) =>
            {
                Err(Error::invalid("temperature", temperature, "a finite real > 0"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for ScoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreKind::Penalized { lambda } => write!(f, "penalized:{lambda}"),
            ScoreKind::InverseQuantile { temperature } => write!(f, "inverse_quantile:{temperature}"),
            other => f.write_str(other.name()),
        }
    }
}

/// Parses `similarity`, `ratio`, `discount`, `penalized[:λ]` and
/// `inverse_quantile[:T]` (alias `iq`).
impl FromStr for ScoreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let param = |default: f64, field: &'static str| -> Result<f64> {
            arg.map_or(Ok(default), |a| {
                a.parse()
                    .map_err(|_| Error::invalid(field, a, "a real number"))
            })
        };
        let kind = match (name.to_ascii_lowercase().as_str(), arg) {
            ("similarity", None) => ScoreKind::Similarity,
            ("ratio", None) => ScoreKind::Ratio,
            ("discount", None) => ScoreKind::Discount,
            ("penalized", _) => ScoreKind::Penalized {
                lambda: param(DEFAULT_PENALTY, "lambda")?,
            },
            ("inverse_quantile" | "iq", _) => ScoreKind::InverseQuantile {
                temperature: param(DEFAULT_TEMPERATURE, "temperature")?,
            },
            _ => {
                return Err(Error::invalid(
                    "score",
                    s,
                    "one of similarity, ratio, discount, penalized[:lambda], inverse_quantile[:temperature]",
                ))
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// Direction in which softmax mass is accumulated by the inverse-quantile score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CumulativeOrder {
    /// Sum the masses no larger than `π_y`: a conformity score, high for likely labels.
    #[default]
    Ascending,
    /// Sum the masses no smaller than `π_y`: the adaptive-set score, low for likely labels.
    Descending,
}

fn check_profile(profile: &[f64]) -> Result<()> {
    if profile.is_empty() {
        return Err(Error::Empty("similarity profile"));
    }
    if let Some(&bad) = profile.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
        return Err(Error::invalid("similarity", bad, "a finite real >= 0"));
    }
    Ok(())
}

fn check_label(profile: &[f64], y: usize) -> Result<()> {
    if y >= profile.len() {
        return Err(Error::LabelOutOfRange {
            label: y,
            classes: profile.len(),
        });
    }
    Ok(())
}

/// Numerically stable `softmax(profile / temperature)`.
pub fn softmax(profile: &[f64], temperature: f64) -> Vec<f64> {
    let max = profile.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = profile
        .iter()
        .map(|v| ((v - max) / temperature).exp())
        .collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Labels ranked by `π` in the given order; equal masses keep label order.
fn ranking(pi: &[f64], order: CumulativeOrder) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pi.len()).collect();
    idx.sort_by(|&a, &b| {
        let by_mass = match order {
            CumulativeOrder::Ascending => pi[a].total_cmp(&pi[b]),
            CumulativeOrder::Descending => pi[b].total_cmp(&pi[a]),
        };
        by_mass.then(a.cmp(&b))
    });
    idx
}

fn cumulative_scores(pi: &[f64], u: f64, order: CumulativeOrder) -> Vec<f64> {
    let mut out = vec![0.0; pi.len()];
    let mut running = 0.0;
    for y in ranking(pi, order) {
        running += pi[y];
        out[y] = -(running - u * pi[y]);
    }
    out
}

/// Inverse-quantile nonconformity for label `y` with randomization `u ∈ [0, 1]`.
pub fn inverse_quantile_score(
    profile: &[f64],
    y: usize,
    u: f64,
    temperature: f64,
    order: CumulativeOrder,
) -> Result<f64> {
    check_profile(profile)?;
    check_label(profile, y)?;
    ScoreKind::InverseQuantile { temperature }.validate()?;
    check_draw(u)?;
    Ok(cumulative_scores(&softmax(profile, temperature), u, order)[y])
}

fn check_draw(u: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::invalid("uniform draw", u, "a real in [0, 1]"));
    }
    Ok(())
}

/// Nonconformity of every label at once; `u` is used only by randomized kinds.
pub fn label_scores(profile: &[f64], kind: ScoreKind, u: f64) -> Result<Vec<f64>> {
    check_profile(profile)?;
    let total: f64 = profile.iter().sum();
    let need_mass = || {
        if total > 0.0 {
            Ok(())
        } else {
            Err(Error::ZeroProfileSum(kind.name()))
        }
    };
    Ok(match kind {
        ScoreKind::Similarity => profile.iter().map(|d| -d).collect(),
        ScoreKind::Ratio => {
            need_mass()?;
            profile.iter().map(|d| -d / total).collect()
        }
        ScoreKind::Discount => {
            need_mass()?;
            profile.iter().map(|d| -(d / total) * d).collect()
        }
        ScoreKind::Penalized { lambda } => {
            kind.validate()?;
            profile.iter().map(|d| -d + lambda * (total - d)).collect()
        }
        ScoreKind::InverseQuantile { temperature } => {
            kind.validate()?;
            check_draw(u)?;
            cumulative_scores(&softmax(profile, temperature), u, CumulativeOrder::Ascending)
        }
    })
}

/// Nonconformity of a single label.
pub fn nonconformity(profile: &[f64], y: usize, kind: ScoreKind, u: f64) -> Result<f64> {
    check_label(profile, y)?;
    Ok(label_scores(profile, kind, u)?[y])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn hand_scores() {
        let p = [0.8, 0.1, 0.1];
        assert!(close(nonconformity(&p, 0, ScoreKind::Similarity, 0.0).unwrap(), -0.8));
        assert!(close(nonconformity(&p, 0, ScoreKind::Ratio, 0.0).unwrap(), -0.8));
        assert!(close(nonconformity(&p, 0, ScoreKind::Discount, 0.0).unwrap(), -0.64));
        let pen = ScoreKind::Penalized { lambda: 0.5 };
        assert!(close(nonconformity(&p, 0, pen, 0.0).unwrap(), -0.7));
        assert!(close(nonconformity(&[0.5, 0.5], 0, ScoreKind::Discount, 0.0).unwrap(), -0.25));
        let all = label_scores(&p, ScoreKind::Discount, 0.0).unwrap();
        assert!(close(all[1], -0.01) && close(all[2], -0.01));
    }

    #[test]
    fn zero_profile_rejected_for_normalized_scores() {
        let z = [0.0, 0.0];
        assert!(matches!(
            nonconformity(&z, 0, ScoreKind::Ratio, 0.0),
            Err(Error::ZeroProfileSum(_))
        ));
        assert!(nonconformity(&z, 0, ScoreKind::Discount, 0.0).is_err());
        assert_eq!(nonconformity(&z, 0, ScoreKind::Similarity, 0.0).unwrap(), 0.0);
        assert!(nonconformity(&[0.5, -0.1], 0, ScoreKind::Similarity, 0.0).is_err());
        assert!(nonconformity(&[0.5], 1, ScoreKind::Similarity, 0.0).is_err());
    }

    #[test]
    fn descending_inverse_quantile() {
        // shifted logs, so that π = [0.6, 0.3, 0.1]
        let p = [3.0 + 0.6f64.ln(), 3.0 + 0.3f64.ln(), 3.0 + 0.1f64.ln()];
        let d = CumulativeOrder::Descending;
        let s1 = inverse_quantile_score(&p, 0, 1.0, 1.0, d).unwrap();
        assert!(close(s1, 0.0));
        let s0 = inverse_quantile_score(&p, 0, 0.0, 1.0, d).unwrap();
        assert!(close(s0, -0.6));
    }

    #[test]
    fn ascending_inverse_quantile() {
        let p = [3.0 + 0.6f64.ln(), 3.0 + 0.3f64.ln(), 3.0 + 0.1f64.ln()];
        let a = CumulativeOrder::Ascending;
        assert!(close(inverse_quantile_score(&p, 0, 1.0, 1.0, a).unwrap(), -0.4));
        assert!(close(inverse_quantile_score(&p, 0, 0.0, 1.0, a).unwrap(), -1.0));
        assert!(close(inverse_quantile_score(&p, 2, 0.0, 1.0, a).unwrap(), -0.1));
        let kind = ScoreKind::InverseQuantile { temperature: 1.0 };
        assert!(close(nonconformity(&p, 1, kind, 0.5).unwrap(), -(0.4 - 0.15)));
    }

    #[test]
    fn uniform_profile_inverse_quantile_bounds() {
        for order in [CumulativeOrder::Ascending, CumulativeOrder::Descending] {
            for k in 1..6 {
                let p = vec![0.4; k];
                for y in 0..k {
                    let s = -inverse_quantile_score(&p, y, 0.0, 1.0, order).unwrap();
                    assert!(s >= 1.0 / k as f64 - 1e-12 && s <= 1.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("discount".parse::<ScoreKind>().unwrap(), ScoreKind::Discount);
        assert_eq!(
            "penalized".parse::<ScoreKind>().unwrap(),
            ScoreKind::Penalized { lambda: 0.5 }
        );
        assert_eq!(
            "iq:2".parse::<ScoreKind>().unwrap(),
            ScoreKind::InverseQuantile { temperature: 2.0 }
        );
        assert!("penalized:-1".parse::<ScoreKind>().is_err());
        assert!("ratio:3".parse::<ScoreKind>().is_err());
        assert!("bogus".parse::<ScoreKind>().is_err());
        for k in ScoreKind::ALL {
            assert_eq!(k.to_string().parse::<ScoreKind>().unwrap(), k);
        }
    }

    fn profile() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..=1.0, 1..8)
    }

    proptest! {
        #[test]
        fn penalized_zero_is_similarity(p in profile()) {
            let a = label_scores(&p, ScoreKind::Penalized { lambda: 0.0 }, 0.0).unwrap();
            let b = label_scores(&p, ScoreKind::Similarity, 0.0).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn discount_is_ratio_times_similarity(p in profile()) {
            prop_assume!(p.iter().sum::<f64>() > 0.0);
            let r = label_scores(&p, ScoreKind::Ratio, 0.0).unwrap();
            let d = label_scores(&p, ScoreKind::Discount, 0.0).unwrap();
            for y in 0..p.len() {
                prop_assert_eq!(d[y], r[y] * p[y]);
                prop_assert!(d[y] >= r[y]);
                prop_assert!(d[y] <= 0.0);
            }
        }

        #[test]
        fn inverse_quantile_in_unit_range(p in profile(), u in 0.0f64..=1.0) {
            let s = label_scores(&p, ScoreKind::InverseQuantile { temperature: 1.0 }, u).unwrap();
            for v in s {
                prop_assert!((-1.0 - 1e-12..=1e-12).contains(&v));
            }
        }
    }
}
