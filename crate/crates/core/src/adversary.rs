//! The eavesdropper's best response to a known posterior.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DistortionMatrix, Pmf};

/// Default absolute tolerance for treating two expected distortions as tied.
///
/// The tolerance is absolute; tables with entries far above 1 should be rescaled.
pub const DEFAULT_TIE_TOL: f64 = 1e-9;

/// Minimum expected distortion together with every reconstruction attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestResponse {
    pub value: f64,
    /// Sorted ascending, never empty.
    pub argmin_set: Vec<usize>,
}

impl BestResponse {
    /// The lowest-index optimal reconstruction.
    pub fn representative(&self) -> usize {
        self.argmin_set[0]
    }
}

pub fn best_response(p: &Pmf, d: &DistortionMatrix, tie_tol: f64) -> Result<BestResponse> {
    if p.len() != d.source_len() {
        return Err(Error::DimensionMismatch(format!(
            "distribution has {} symbols but distortion has {} rows",
            p.len(),
            d.source_len()
        )));
    }
    best_response_weights(p.probs(), d, tie_tol)
}

/// Best response against unnormalized weights (a joint row `p(u, .)` works as well as `p(.|u)`).
pub(crate) fn best_response_weights(
    weights: &[f64],
    d: &DistortionMatrix,
    tie_tol: f64,
) -> Result<BestResponse> {
    if !(tie_tol > 0.0 && tie_tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tie tolerance must be positive, got {tie_tol}")));
    }
    if d.reconstruction_len() == 0 {
        return Err(Error::EmptyReconstruction);
    }
    let expectations = d.column_expectations(weights);
    let value = expectations.iter().copied().fold(f64::INFINITY, f64::min);
    let argmin_set = expectations
        .iter()
        .enumerate()
        .filter(|(_, &e)| e <= value + tie_tol)
        .map(|(z, _)| z)
        .collect();
    Ok(BestResponse { value, argmin_set })
}

/// `min_z sum_x w(x) d(x,z)` without tie bookkeeping.
#[inline]
pub(crate) fn min_weighted(weights: &[f64], d: &DistortionMatrix) -> f64 {
    let cols = d.reconstruction_len();
    let mut best = f64::INFINITY;
    for z in 0..cols {
        let mut e = 0.0;
        for (x, &w) in weights.iter().enumerate() {
            e += w * d.get(x, z);
        }
        if e < best {
            best = e;
        }
    }
    best
}

pub fn min_distortion(p: &Pmf, d: &DistortionMatrix) -> Result<f64> {
    Ok(best_response(p, d, DEFAULT_TIE_TOL)?.value)
}
