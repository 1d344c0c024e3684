//! Probability and distortion primitives shared by every computation in the crate.
//!
//! All quantities measured in information units are in bits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entries at or below this value are treated as outside the support.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;
/// Accepted deviation of a distribution's total mass from 1.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Largest total-mass deviation [`Pmf::normalize`] is willing to rescale away.
pub const RESCALE_LIMIT: f64 = 1e-6;
/// Two distortion columns closer than this (entrywise) are considered identical.
pub const REDUNDANCY_TOL: f64 = 1e-12;

/// A probability mass function over a finite alphabet `0..len`.
///
/// Zero-probability symbols stay in the alphabet so indices remain stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf {
    probs: Vec<f64>,
}

impl Pmf {
    /// Validates `probs` as a distribution. Entries in `[-1e-12, 0)` are clamped to zero.
    pub fn new(mut probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPmf("empty alphabet".into()));
        }
        for (i, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidPmf(format!("entry {i} is not finite")));
            }
            if *p < -SUPPORT_THRESHOLD {
                return Err(Error::InvalidPmf(format!("entry {i} is negative ({p})")));
            }
            if *p < 0.0 {
                *p = 0.0;
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidPmf(format!("entries sum to {total}, not 1")));
        }
        Ok(Self { probs })
    }

    /// Rescales `probs` to unit mass, rejecting inputs whose mass is off by more than 1e-6.
    pub fn normalize(probs: Vec<f64>) -> Result<Self> {
        let total: f64 = probs.iter().sum();
        if !total.is_finite() || (total - 1.0).abs() > RESCALE_LIMIT {
            return Err(Error::InvalidPmf(format!(
                "entries sum to {total}; refusing to rescale by more than {RESCALE_LIMIT}"
            )));
        }
        Self::new(probs.into_iter().map(|p| p / total).collect())
    }

    pub fn point_mass(len: usize, at: usize) -> Self {
        assert!(at < len, "point mass index {at} outside alphabet of size {len}");
        let mut probs = vec![0.0; len];
        probs[at] = 1.0;
        Self { probs }
    }

    pub fn uniform(len: usize) -> Self {
        assert!(len > 0);
        Self {
            probs: vec![1.0 / len as f64; len],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Indices whose mass exceeds [`SUPPORT_THRESHOLD`].
    pub fn support(&self) -> Vec<usize> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > SUPPORT_THRESHOLD)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn is_point_mass(&self) -> bool {
        self.support().len() == 1
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.probs)
    }

    /// The mixture `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Pmf, lambda: f64) -> Result<Pmf> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch(format!(
                "cannot mix distributions of sizes {} and {}",
                self.len(),
                other.len()
            )));
        }
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!("mixing weight {lambda} not in [0,1]")));
        }
        Pmf::new(
            self.probs
                .iter()
                .zip(&other.probs)
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect(),
        )
    }

    /// L-infinity distance between two distributions of equal length.
    pub fn linf_distance(&self, other: &Pmf) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = Error;

    fn try_from(probs: Vec<f64>) -> Result<Self> {
        Pmf::new(probs)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(p: Pmf) -> Self {
        p.probs
    }
}

/// `-sum w log2 w` over raw nonnegative weights, with `0 log 0 = 0`.
pub(crate) fn entropy_bits(weights: &[f64]) -> f64 {
    let h: f64 = weights
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum();
    h.max(0.0)
}

/// A finite distortion table `d(x, z)`: rows are source symbols, columns reconstructions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DistortionMatrix {
    /// Builds the matrix from row vectors.
    ///
    /// Rejects non-finite entries, ragged rows and identical columns. Identical
    /// columns are reported by index rather than merged.
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidDistortion("no source rows".into()));
        }
        let cols = rows[0].len();
        let mut values = Vec::with_capacity(rows.len() * cols);
        for (x, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidDistortion(format!(
                    "row {x} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (z, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidDistortion(format!("entry ({x},{z}) is not finite")));
                }
                values.push(v);
            }
        }
        let m = Self {
            rows: rows.len(),
            cols,
            values,
        };
        for a in 0..cols {
            for b in (a + 1)..cols {
                let same = (0..m.rows).all(|x| (m.get(x, a) - m.get(x, b)).abs() <= REDUNDANCY_TOL);
                if same {
                    return Err(Error::RedundantColumns(a, b));
                }
            }
        }
        Ok(m)
    }

    /// Hamming distortion on an alphabet of size `n` (source and reconstruction alike).
    pub fn hamming(n: usize) -> Self {
        let rows = (0..n)
            .map(|x| (0..n).map(|z| if x == z { 0.0 } else { 1.0 }).collect())
            .collect();
        Self::new(rows).expect("hamming matrix is valid")
    }

    pub fn source_len(&self) -> usize {
        self.rows
    }

    pub fn reconstruction_len(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, x: usize, z: usize) -> f64 {
        self.values[x * self.cols + z]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.values[x * self.cols..(x + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|x| self.row(x).to_vec()).collect()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.to_rows()
                .into_iter()
                .map(|r| r.into_iter().map(|v| v * c).collect())
                .collect(),
        )
    }

    pub fn min_entry(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `sum_x w(x) d(x, z)` for every column `z`. `w` need not be normalized.
    pub(crate) fn column_expectations(&self, weights: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (x, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, &v) in out.iter_mut().zip(self.row(x)) {
                *o += w * v;
            }
        }
        out
    }
}

/// A source distribution together with the eavesdropper's distortion table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemInstance {
    pub source: Pmf,
    pub distortion: DistortionMatrix,
}

impl ProblemInstance {
    pub fn new(source: Pmf, distortion: DistortionMatrix) -> Result<Self> {
        if source.len() != distortion.source_len() {
            return Err(Error::DimensionMismatch(format!(
                "source has {} symbols but distortion has {} rows",
                source.len(),
                distortion.source_len()
            )));
        }
        Ok(Self { source, distortion })
    }

    /// Bernoulli-`p` bits under Hamming distortion.
    pub fn binary_hamming(p: f64) -> Result<Self> {
        Self::new(Pmf::new(vec![1.0 - p, p])?, DistortionMatrix::hamming(2))
    }

    /// `sum_x p0(x) min_z d(x,z)`: what the eavesdropper suffers when every symbol is revealed.
    pub fn revealed_distortion(&self) -> f64 {
        self.source
            .probs()
            .iter()
            .enumerate()
            .map(|(x, &p)| p * self.distortion.row(x).iter().copied().fold(f64::INFINITY, f64::min))
            .sum()
    }
}

/// Entropy of `p` in bits.
pub fn entropy(p: &Pmf) -> f64 {
    p.entropy()
}

/// `H(X|U)` in bits for a joint distribution given as rows indexed by `u`, columns by `x`.
pub fn conditional_entropy(joint: &[Vec<f64>]) -> Result<f64> {
    if joint.is_empty() {
        return Err(Error::InvalidPmf("empty joint distribution".into()));
    }
    let width = joint[0].len();
    let mut total = 0.0;
    for (u, row) in joint.iter().enumerate() {
        if row.len() != width {
            return Err(Error::InvalidPmf(format!("joint row {u} has the wrong length")));
        }
        for (x, &v) in row.iter().enumerate() {
            if !v.is_finite() || v < -SUPPORT_THRESHOLD {
                return Err(Error::InvalidPmf(format!("joint entry ({u},{x}) = {v}")));
            }
            total += v;
        }
    }
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::InvalidPmf(format!("joint sums to {total}, not 1")));
    }
    Ok(joint.iter().map(|row| conditional_entropy_term(row)).sum())
}

/// `p(u) H(X | U=u)` for one row of an (unnormalized-by-u) joint.
pub(crate) fn conditional_entropy_term(row: &[f64]) -> f64 {
    let pu: f64 = row.iter().filter(|&&v| v > 0.0).sum();
    if pu <= 0.0 {
        return 0.0;
    }
    let h: f64 = row
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * (v / pu).log2())
        .sum();
    h.max(0.0)
}

/// `E_p d(X, z)`.
pub fn expected_distortion(p: &Pmf, d: &DistortionMatrix, z: usize) -> Result<f64> {
    if p.len() != d.source_len() {
        return Err(Error::DimensionMismatch(format!(
            "distribution has {} symbols but distortion has {} rows",
            p.len(),
            d.source_len()
        )));
    }
    if z >= d.reconstruction_len() {
        return Err(Error::IndexOutOfRange {
            index: z,
            count: d.reconstruction_len(),
        });
    }
    Ok(p.probs().iter().enumerate().map(|(x, &w)| w * d.get(x, z)).sum())
}
