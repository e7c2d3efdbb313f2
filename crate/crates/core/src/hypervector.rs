//! Hypervector representations and their algebra.
//!
//! Two families are supported:
//!
//! - **Bipolar** vectors over `{-1, +1}^d`, bundled by element-wise addition
//!   into a [`RealAccumulator`] and bound by element-wise multiplication.
//! - **FHRR** vectors on the complex unit circle, stored as phase angles.
//!   Binding adds phases modulo `2π`; bundling sums the unit phasors into a
//!   [`ComplexAccumulator`].
//!
//! Permutation is a right rotation in both families: `permute([a,b,c,d], 1)`
//! is `[d,a,b,c]`.
//!
//! Similarities are standardized to be nonnegative so the nonconformity
//! scores built on them are well defined. Every kind lands in `[0, 1]` except
//! [`SimilarityKind::InverseEuclidean`], which lies in `[0, 1/ε]`.

use std::f64::consts::TAU;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// Default hypervector dimension.
pub const DEFAULT_DIM: usize = 10_000;

/// Added to the Euclidean distance before inversion; also bounds the
/// inverse-Euclidean similarity above by `1 / INVERSE_EUCLIDEAN_EPS`.
pub const INVERSE_EUCLIDEAN_EPS: f64 = 1e-12;

fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        Err(Error::ZeroDimension)
    } else {
        Ok(())
    }
}

fn check_same(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// Maps any finite angle into `[0, 2π)`.
pub fn wrap_phase(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct BipolarHypervector {
    elements: Vec<i8>,
}

impl TryFrom<Vec<i8>> for BipolarHypervector {
    type Error = Error;

    fn try_from(elements: Vec<i8>) -> Result<Self> {
        Self::from_elements(elements)
    }
}

impl From<BipolarHypervector> for Vec<i8> {
    fn from(h: BipolarHypervector) -> Self {
        h.elements
    }
}

impl BipolarHypervector {
    pub fn from_elements(elements: Vec<i8>) -> Result<Self> {
        check_dim(elements.len())?;
        if let Some(bad) = elements.iter().find(|&&e| e != 1 && e != -1) {
            return Err(Error::invalid("bipolar element", bad, "-1 or +1"));
        }
        Ok(Self { elements })
    }

    /// The all-`+1` vector, which is what an empty bundle binarizes to.
    pub fn ones(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Self {
            elements: vec![1; d],
        })
    }

    pub fn random(d: usize, rng: &mut rng::Rng) -> Result<Self> {
        check_dim(d)?;
        let mut elements = Vec::with_capacity(d);
        while elements.len() < d {
            let bits: u64 = rng.random();
            let take = (d - elements.len()).min(64);
            elements.extend((0..take).map(|i| if bits >> i & 1 == 1 { 1i8 } else { -1 }));
        }
        Ok(Self { elements })
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[i8] {
        &self.elements
    }

    pub fn bind(&self, other: &Self) -> Result<Self> {
        check_same(self.dim(), other.dim())?;
        Ok(Self {
            elements: self
                .elements
                .iter()
                .zip(&other.elements)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn permute(&self, k: usize) -> Self {
        let mut elements = self.elements.clone();
        elements.rotate_right(k % self.dim());
        Self { elements }
    }

    pub fn to_real(&self) -> RealAccumulator {
        RealAccumulator {
            elements: self.elements.iter().map(|&e| f64::from(e)).collect(),
        }
    }

    pub fn hamming_distance(&self, other: &Self) -> Result<usize> {
        check_same(self.dim(), other.dim())?;
        Ok(self
            .elements
            .iter()
            .zip(&other.elements)
            .filter(|(a, b)| a != b)
            .count())
    }

    pub(crate) fn dot(&self, other: &Self) -> i64 {
        self.elements
            .iter()
            .zip(&other.elements)
            .map(|(&a, &b)| i32::from(a * b))
            .sum::<i32>()
            .into()
    }

    pub(crate) fn flip(&mut self, index: usize) {
        self.elements[index] = -self.elements[index];
    }
}

/// Draws `d` i.i.d. uniform signs from a dedicated seed.
pub fn random_bipolar(d: usize, seed: u64) -> Result<BipolarHypervector> {
    BipolarHypervector::random(d, &mut rng::seeded(seed))
}

/// Pre-binarization sums of bipolar vectors, or any real-valued hypervector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealAccumulator {
    elements: Vec<f64>,
}

impl RealAccumulator {
    pub fn zeros(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Self {
            elements: vec![0.0; d],
        })
    }

    pub fn from_elements(elements: Vec<f64>) -> Result<Self> {
        check_dim(elements.len())?;
        Ok(Self { elements })
    }

    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[f64] {
        &self.elements
    }

    pub fn add_bipolar(&mut self, h: &BipolarHypervector) -> Result<()> {
        check_same(self.dim(), h.dim())?;
        for (acc, &e) in self.elements.iter_mut().zip(h.elements()) {
            *acc += f64::from(e);
        }
        Ok(())
    }

    pub fn add(&mut self, other: &RealAccumulator) -> Result<()> {
        check_same(self.dim(), other.dim())?;
        for (acc, e) in self.elements.iter_mut().zip(&other.elements) {
            *acc += e;
        }
        Ok(())
    }

    pub fn scale(&mut self, factor: f64) {
        for e in &mut self.elements {
            *e *= factor;
        }
    }

    pub fn norm(&self) -> f64 {
        self.elements.iter().map(|e| e * e).sum::<f64>().sqrt()
    }
}

/// Element-wise sum of a nonempty list of same-dimension bipolar vectors.
pub fn bundle(hs: &[BipolarHypervector]) -> Result<RealAccumulator> {
    let first = hs.first().ok_or(Error::Empty("bundle input"))?;
    let mut acc = RealAccumulator::zeros(first.dim())?;
    for h in hs {
        acc.add_bipolar(h)?;
    }
    Ok(acc)
}

/// Element-wise sign with `0 -> +1`.
pub fn sign_binarize(a: &RealAccumulator) -> BipolarHypervector {
    BipolarHypervector {
        elements: a
            .elements
            .iter()
            .map(|&e| if e < 0.0 { -1 } else { 1 })
            .collect(),
    }
}

/// Integer-sum variant of [`sign_binarize`] used by the encoders' hot loops.
pub(crate) fn sign_of_counts(counts: &[i32]) -> BipolarHypervector {
    BipolarHypervector {
        elements: counts.iter().map(|&c| if c < 0 { -1 } else { 1 }).collect(),
    }
}

/// Unit-modulus complex hypervector `e^{iθ}`, stored as phases in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexHypervector {
    phases: Vec<f64>,
}

impl ComplexHypervector {
    /// Wraps every phase into `[0, 2π)`.
    pub fn from_phases(phases: Vec<f64>) -> Result<Self> {
        check_dim(phases.len())?;
        if let Some(bad) = phases.iter().find(|p| !p.is_finite()) {
            return Err(Error::invalid("phase", bad, "a finite angle"));
        }
        Ok(Self {
            phases: phases.into_iter().map(wrap_phase).collect(),
        })
    }

    pub fn random(d: usize, rng: &mut rng::Rng) -> Result<Self> {
        check_dim(d)?;
        let phases = (0..d).map(|_| wrap_phase(rng.random::<f64>() * TAU)).collect();
        Ok(Self { phases })
    }

    pub fn dim(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn bind(&self, other: &Self) -> Result<Self> {
        check_same(self.dim(), other.dim())?;
        Ok(Self {
            phases: self
                .phases
                .iter()
                .zip(&other.phases)
                .map(|(a, b)| wrap_phase(a + b))
                .collect(),
        })
    }

    pub fn permute(&self, k: usize) -> Self {
        let mut phases = self.phases.clone();
        phases.rotate_right(k % self.dim());
        Self { phases }
    }

    pub fn to_accumulator(&self) -> ComplexAccumulator {
        let (re, im) = self.phases.iter().map(|p| (p.cos(), p.sin())).unzip();
        ComplexAccumulator { re, im }
    }
}

/// Draws `d` i.i.d. `Unif[0, 2π)` phases from a dedicated seed.
pub fn random_phase(d: usize, seed: u64) -> Result<ComplexHypervector> {
    ComplexHypervector::random(d, &mut rng::seeded(seed))
}

/// Unnormalized sum of unit phasors; element magnitudes may exceed 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexAccumulator {
    re: Vec<f64>,
    im: Vec<f64>,
}

impl ComplexAccumulator {
    pub fn zeros(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Self {
            re: vec![0.0; d],
            im: vec![0.0; d],
        })
    }

    pub fn dim(&self) -> usize {
        self.re.len()
    }

    pub fn re(&self) -> &[f64] {
        &self.re
    }

    pub fn im(&self) -> &[f64] {
        &self.im
    }

    pub fn add_phasor(&mut self, h: &ComplexHypervector) -> Result<()> {
        check_same(self.dim(), h.dim())?;
        for ((re, im), p) in self.re.iter_mut().zip(&mut self.im).zip(h.phases()) {
            *re += p.cos();
            *im += p.sin();
        }
        Ok(())
    }

    pub fn add(&mut self, other: &ComplexAccumulator) -> Result<()> {
        check_same(self.dim(), other.dim())?;
        for (a, b) in self.re.iter_mut().zip(&other.re) {
            *a += b;
        }
        for (a, b) in self.im.iter_mut().zip(&other.im) {
            *a += b;
        }
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        self.re
            .iter()
            .zip(&self.im)
            .map(|(r, i)| r * r + i * i)
            .sum::<f64>()
            .sqrt()
    }
}

/// Any hypervector the classifier can store or compare.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "repr", content = "data", rename_all = "snake_case")]
pub enum Hypervector {
    Bipolar(BipolarHypervector),
    Real(RealAccumulator),
    Phase(ComplexHypervector),
    Complex(ComplexAccumulator),
}

impl Hypervector {
    pub fn dim(&self) -> usize {
        match self {
            Hypervector::Bipolar(h) => h.dim(),
            Hypervector::Real(h) => h.dim(),
            Hypervector::Phase(h) => h.dim(),
            Hypervector::Complex(h) => h.dim(),
        }
    }

    pub fn repr_name(&self) -> &'static str {
        match self {
            Hypervector::Bipolar(_) => "bipolar",
            Hypervector::Real(_) => "real",
            Hypervector::Phase(_) => "phase",
            Hypervector::Complex(_) => "complex",
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, Hypervector::Phase(_) | Hypervector::Complex(_))
    }

    pub fn permute(&self, k: usize) -> Result<Self> {
        match self {
            Hypervector::Bipolar(h) => Ok(Hypervector::Bipolar(h.permute(k))),
            Hypervector::Phase(h) => Ok(Hypervector::Phase(h.permute(k))),
            Hypervector::Real(h) => {
                let mut e = h.elements.clone();
                e.rotate_right(k % h.dim());
                Ok(Hypervector::Real(RealAccumulator { elements: e }))
            }
            Hypervector::Complex(h) => {
                let mut re = h.re.clone();
                let mut im = h.im.clone();
                re.rotate_right(k % h.dim());
                im.rotate_right(k % h.dim());
                Ok(Hypervector::Complex(ComplexAccumulator { re, im }))
            }
        }
    }
}

/// Binding of two same-representation hypervectors.
pub fn bind(a: &Hypervector, b: &Hypervector) -> Result<Hypervector> {
    match (a, b) {
        (Hypervector::Bipolar(x), Hypervector::Bipolar(y)) => Ok(Hypervector::Bipolar(x.bind(y)?)),
        (Hypervector::Phase(x), Hypervector::Phase(y)) => Ok(Hypervector::Phase(x.bind(y)?)),
        _ => Err(Error::RepresentationMismatch {
            left: a.repr_name(),
            right: b.repr_name(),
        }),
    }
}

/// Cyclic right rotation by `k` positions.
pub fn permute(h: &Hypervector, k: usize) -> Result<Hypervector> {
    h.permute(k)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityKind {
    /// `(cos(h1, h2) + 1) / 2`.
    CosineNormalized,
    /// `1 / (‖h1 − h2‖₂ + ε)`, capped at `1/ε`.
    InverseEuclidean,
    /// `1 − d_H / d` on bipolar vectors.
    HammingSimilarity,
    /// `(Re[h1ᵀ h̄2] / d + 1) / 2` for FHRR vectors.
    ComplexCosine,
}

impl SimilarityKind {
    pub fn name(self) -> &'static str {
        match self {
            SimilarityKind::CosineNormalized => "cosine_normalized",
            SimilarityKind::InverseEuclidean => "inverse_euclidean",
            SimilarityKind::HammingSimilarity => "hamming_similarity",
            SimilarityKind::ComplexCosine => "complex_cosine",
        }
    }
}

impl std::str::FromStr for SimilarityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "cosine_normalized" | "cosine" => SimilarityKind::CosineNormalized,
            "inverse_euclidean" | "euclidean" => SimilarityKind::InverseEuclidean,
            "hamming_similarity" | "hamming" => SimilarityKind::HammingSimilarity,
            "complex_cosine" => SimilarityKind::ComplexCosine,
            other => {
                return Err(Error::invalid(
                    "similarity",
                    other,
                    "cosine_normalized, inverse_euclidean, hamming_similarity or complex_cosine",
                ))
            }
        })
    }
}

enum RealView<'a> {
    Bipolar(&'a BipolarHypervector),
    Real(&'a [f64]),
}

impl RealView<'_> {
    fn get(&self, i: usize) -> f64 {
        match self {
            RealView::Bipolar(h) => f64::from(h.elements[i]),
            RealView::Real(e) => e[i],
        }
    }

    fn norm(&self) -> f64 {
        match self {
            RealView::Bipolar(h) => (h.dim() as f64).sqrt(),
            RealView::Real(e) => e.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }
}

fn real_view(h: &Hypervector) -> Option<RealView<'_>> {
    match h {
        Hypervector::Bipolar(b) => Some(RealView::Bipolar(b)),
        Hypervector::Real(r) => Some(RealView::Real(&r.elements)),
        _ => None,
    }
}

fn cosine_to_unit(cos: f64) -> f64 {
    (cos.clamp(-1.0, 1.0) + 1.0) / 2.0
}

fn cosine_normalized(a: &RealView, b: &RealView, d: usize) -> f64 {
    if let (RealView::Bipolar(x), RealView::Bipolar(y)) = (a, b) {
        return cosine_to_unit(x.dot(y) as f64 / d as f64);
    }
    let dot: f64 = (0..d).map(|i| a.get(i) * b.get(i)).sum();
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return 0.5;
    }
    cosine_to_unit(dot / denom)
}

fn inverse_euclidean(a: &RealView, b: &RealView, d: usize) -> f64 {
    let dist = (0..d)
        .map(|i| {
            let diff = a.get(i) - b.get(i);
            diff * diff
        })
        .sum::<f64>()
        .sqrt();
    (1.0 / (dist + INVERSE_EUCLIDEAN_EPS)).min(1.0 / INVERSE_EUCLIDEAN_EPS)
}

fn complex_cosine(a: &Hypervector, b: &Hypervector) -> f64 {
    match (a, b) {
        (Hypervector::Phase(x), Hypervector::Phase(y)) => {
            let d = x.dim() as f64;
            let re: f64 = x
                .phases
                .iter()
                .zip(&y.phases)
                .map(|(p, q)| (p - q).cos())
                .sum();
            cosine_to_unit(re / d)
        }
        _ => {
            let x = as_accumulator(a);
            let y = as_accumulator(b);
            // Re[x · conj(y)] = Σ re_x re_y + im_x im_y
            let re: f64 = x
                .re
                .iter()
                .zip(&y.re)
                .map(|(p, q)| p * q)
                .chain(x.im.iter().zip(&y.im).map(|(p, q)| p * q))
                .sum();
            let denom = x.norm() * y.norm();
            if denom == 0.0 {
                0.5
            } else {
                cosine_to_unit(re / denom)
            }
        }
    }
}

fn as_accumulator(h: &Hypervector) -> std::borrow::Cow<'_, ComplexAccumulator> {
    match h {
        Hypervector::Complex(c) => std::borrow::Cow::Borrowed(c),
        Hypervector::Phase(p) => std::borrow::Cow::Owned(p.to_accumulator()),
        _ => unreachable!("complex_cosine called on a real hypervector"),
    }
}

/// Standardized, symmetric, nonnegative similarity between two hypervectors.
///
/// Bipolar and real vectors may be mixed for the real-valued kinds (a bipolar
/// query against an L2-normalized real prototype, say). Phase vectors and
/// complex accumulators may be mixed for `ComplexCosine`; when either side is
/// an accumulator the inner product is divided by the product of norms, which
/// coincides with the `1/d` normalization for unit-modulus inputs.
pub fn similarity(a: &Hypervector, b: &Hypervector, kind: SimilarityKind) -> Result<f64> {
    check_same(a.dim(), b.dim())?;
    let d = a.dim();
    let unsupported = |h: &Hypervector| Error::UnsupportedSimilarity {
        kind: kind.name(),
        repr: h.repr_name(),
    };
    match kind {
        SimilarityKind::ComplexCosine => {
            for h in [a, b] {
                if !h.is_complex() {
                    return Err(unsupported(h));
                }
            }
            Ok(complex_cosine(a, b))
        }
        SimilarityKind::HammingSimilarity => match (a, b) {
            (Hypervector::Bipolar(x), Hypervector::Bipolar(y)) => {
                Ok(1.0 - x.hamming_distance(y)? as f64 / d as f64)
            }
            (Hypervector::Bipolar(_), other) | (other, _) => Err(unsupported(other)),
        },
        SimilarityKind::CosineNormalized | SimilarityKind::InverseEuclidean => {
            let x = real_view(a).ok_or_else(|| unsupported(a))?;
            let y = real_view(b).ok_or_else(|| unsupported(b))?;
            Ok(if kind == SimilarityKind::CosineNormalized {
                cosine_normalized(&x, &y, d)
            } else {
                inverse_euclidean(&x, &y, d)
            })
        }
    }
}
