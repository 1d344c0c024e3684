//! Enumeration of the distributions where the eavesdropper is maximally confused:
//! at least as many reconstructions tie for the best response as the distribution
//! has support points. These are the atoms of every optimal decomposition of the source.

use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use crate::adversary::{best_response_weights, BestResponse, DEFAULT_TIE_TOL};
use crate::error::{Error, Result};
use crate::model::{DistortionMatrix, Pmf, SUPPORT_THRESHOLD};

/// Default L-infinity distance below which two candidate points are merged.
pub const DEFAULT_DEDUP_TOL: f64 = 1e-7;
/// Largest source or reconstruction alphabet accepted by the enumerator.
pub const MAX_ALPHABET: usize = 12;

const PIVOT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CornerPoint {
    pub p: Pmf,
    /// Entropy of `p` in bits.
    pub alpha: f64,
    /// Minimum expected distortion under `p`.
    pub beta: f64,
    /// Every reconstruction attaining `beta`, ascending.
    pub ties: Vec<usize>,
    /// Source symbols with positive mass, ascending.
    pub support: Vec<usize>,
}

/// Output of the enumerator with its bookkeeping.
#[derive(Debug, Clone)]
pub struct CornerEnumeration {
    pub points: Vec<CornerPoint>,
    /// Square systems skipped because they were singular.
    pub singular_systems: usize,
}

/// All corner points of `d`, sorted by support then tie set.
pub fn enumerate_corner_points(d: &DistortionMatrix, tol: f64) -> Result<Vec<CornerPoint>> {
    Ok(enumerate_with_diagnostics(d, tol)?.points)
}

/// For every support `T` and tie set `S` with `|S| = |T|`, solves
/// `{ sum_T p = 1 ; E_p d(.,s) equal for all s in S }` and keeps the solution
/// when it is strictly positive on `T`, `S` lies in the global argmin, and the
/// argmin is at least as large as `T`.
pub fn enumerate_with_diagnostics(d: &DistortionMatrix, tol: f64) -> Result<CornerEnumeration> {
    let nx = d.source_len();
    let nz = d.reconstruction_len();
    if nx > MAX_ALPHABET || nz > MAX_ALPHABET {
        return Err(Error::SizeGuard(format!(
            "corner enumeration supports alphabets up to {MAX_ALPHABET}, got {nx}x{nz}"
        )));
    }
    if nz == 0 {
        return Err(Error::EmptyReconstruction);
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("dedup tolerance must be positive, got {tol}")));
    }

    let supports: Vec<Vec<usize>> = (1..=nx.min(nz))
        .flat_map(|m| (0..nx).combinations(m))
        .collect();

    let per_support: Vec<Result<(Vec<CornerPoint>, usize)>> = supports
        .par_iter()
        .map(|t| {
            let mut found = Vec::new();
            let mut singular = 0;
            for s in (0..nz).combinations(t.len()) {
                match solve_face(d, t, &s, tol)? {
                    FaceOutcome::Point(c) => found.push(c),
                    FaceOutcome::Singular => singular += 1,
                    FaceOutcome::Rejected => {}
                }
            }
            Ok((found, singular))
        })
        .collect();

    let mut points: Vec<CornerPoint> = Vec::new();
    let mut singular_systems = 0;
    for r in per_support {
        let (found, singular) = r?;
        singular_systems += singular;
        for c in found {
            if points.iter().all(|q| q.p.linf_distance(&c.p) > tol) {
                points.push(c);
            }
        }
    }
    points.sort_by(|a, b| a.support.cmp(&b.support).then_with(|| a.ties.cmp(&b.ties)));
    Ok(CornerEnumeration {
        points,
        singular_systems,
    })
}

enum FaceOutcome {
    Point(CornerPoint),
    Rejected,
    Singular,
}

fn solve_face(d: &DistortionMatrix, t: &[usize], s: &[usize], tol: f64) -> Result<FaceOutcome> {
    let m = t.len();
    // Row 0: sum of masses; row j: E d(., s_j) - E d(., s_0) = 0.
    let mut a = vec![vec![0.0; m + 1]; m];
    for (col, _) in t.iter().enumerate() {
        a[0][col] = 1.0;
    }
    a[0][m] = 1.0;
    for j in 1..m {
        for (col, &x) in t.iter().enumerate() {
            a[j][col] = d.get(x, s[j]) - d.get(x, s[0]);
        }
    }
    let reduced = row_reduce(a);
    if !reduced.consistent {
        return Ok(if reduced.pivots.len() < m {
            FaceOutcome::Singular
        } else {
            FaceOutcome::Rejected
        });
    }
    if reduced.pivots.len() == m {
        let sol = reduced.solve(&[]);
        return Ok(match accept(d, t, s, &sol) {
            Some(c) => FaceOutcome::Point(c),
            None => FaceOutcome::Rejected,
        });
    }

    // Singular but consistent: probe the solution set around its centre. Two
    // distinct accepted probes mean the tie set holds along a continuum.
    let free: Vec<usize> = (0..m).filter(|c| !reduced.pivots.contains(c)).collect();
    let centre = vec![1.0 / m as f64; free.len()];
    let mut probes = vec![centre.clone()];
    for i in 0..free.len() {
        for h in [1e-3, -1e-3] {
            let mut v = centre.clone();
            v[i] += h;
            probes.push(v);
        }
    }
    let mut accepted: Vec<CornerPoint> = Vec::new();
    for probe in probes {
        let sol = reduced.solve(&probe);
        if let Some(c) = accept(d, t, s, &sol) {
            if accepted.iter().all(|q| q.p.linf_distance(&c.p) > tol) {
                accepted.push(c);
            }
        }
    }
    match accepted.len() {
        0 => Ok(FaceOutcome::Singular),
        1 => Ok(FaceOutcome::Point(accepted.pop().unwrap())),
        _ => Err(Error::Degenerate(format!(
            "reconstructions {s:?} tie along a continuum on support {t:?}"
        ))),
    }
}

fn accept(d: &DistortionMatrix, t: &[usize], s: &[usize], sol: &[f64]) -> Option<CornerPoint> {
    if sol.iter().any(|&v| !(v > SUPPORT_THRESHOLD) || v > 1.0 + 1e-9) {
        return None;
    }
    let mut probs = vec![0.0; d.source_len()];
    for (&x, &v) in t.iter().zip(sol) {
        probs[x] = v;
    }
    let p = Pmf::normalize(probs).ok()?;
    let BestResponse { value, argmin_set } = best_response_weights(p.probs(), d, DEFAULT_TIE_TOL).ok()?;
    if !s.iter().all(|z| argmin_set.contains(z)) || argmin_set.len() < t.len() {
        return None;
    }
    Some(CornerPoint {
        alpha: p.entropy(),
        beta: value,
        ties: argmin_set,
        support: t.to_vec(),
        p,
    })
}

struct Reduced {
    /// Rows in reduced row-echelon form, augmented column last.
    rows: Vec<Vec<f64>>,
    pivots: Vec<usize>,
    consistent: bool,
}

impl Reduced {
    /// Solution with free variables (in column order) set to `free_values`.
    fn solve(&self, free_values: &[f64]) -> Vec<f64> {
        let n = self.rows[0].len() - 1;
        let mut x = vec![0.0; n];
        let free: Vec<usize> = (0..n).filter(|c| !self.pivots.contains(c)).collect();
        for (&c, &v) in free.iter().zip(free_values) {
            x[c] = v;
        }
        for (r, &pc) in self.pivots.iter().enumerate() {
            let mut v = self.rows[r][n];
            for &c in &free {
                v -= self.rows[r][c] * x[c];
            }
            x[pc] = v;
        }
        x
    }
}

/// Gauss-Jordan elimination with partial pivoting.
fn row_reduce(mut a: Vec<Vec<f64>>) -> Reduced {
    let rows = a.len();
    let n = a[0].len() - 1;
    let scale = a
        .iter()
        .flat_map(|r| r[..n].iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1.0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == rows {
            break;
        }
        let (best, mag) = (r..rows)
            .map(|i| (i, a[i][c].abs()))
            .fold((r, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if mag <= PIVOT_TOL * scale {
            continue;
        }
        a.swap(r, best);
        let piv = a[r][c];
        for v in a[r].iter_mut() {
            *v /= piv;
        }
        for i in 0..rows {
            if i != r {
                let f = a[i][c];
                if f != 0.0 {
                    for k in 0..=n {
                        a[i][k] -= f * a[r][k];
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let consistent = a[r..].iter().all(|row| row[n].abs() <= 1e-9 * scale);
    Reduced {
        rows: a,
        pivots,
        consistent,
    }
}
