//! Maximum forced distortion as a function of the secret-key rate.
//!
//! The source is written as a mixture `p0 = sum_k mu_k p_k` of corner points.
//! Revealing which component each symbol came from costs `sum_k mu_k H(p_k)`
//! bits of key and forces `sum_k mu_k beta_k` distortion, so
//!
//! ```text
//! D*(R0) = max  mu.beta   s.t.  mu >= 0,  mu.alpha <= R0,  sum_k mu_k p_k = p0.
//! ```

use serde::Serialize;

use crate::corners::{enumerate_corner_points, CornerPoint, DEFAULT_DEDUP_TOL};
use crate::error::{Error, Result};
use crate::model::{Pmf, ProblemInstance};
use crate::simplex::{LinearProgram, LpStatus};

/// Tolerance for the mixture constraint on reported decompositions.
pub const DECOMPOSITION_TOL: f64 = 1e-8;
/// Slack granted to membership queries.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
const COLLINEAR_TOL: f64 = 1e-9;
const REFINE_TOL: f64 = 1e-10;

/// Weights over corner points, in the order of the corner list they were solved against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub mu: Vec<f64>,
}

impl Decomposition {
    pub fn key_rate(&self, corners: &[CornerPoint]) -> f64 {
        self.mu.iter().zip(corners).map(|(m, c)| m * c.alpha).sum()
    }

    pub fn distortion(&self, corners: &[CornerPoint]) -> f64 {
        self.mu.iter().zip(corners).map(|(m, c)| m * c.beta).sum()
    }

    /// `sum_k mu_k p_k`.
    pub fn mixture(&self, corners: &[CornerPoint]) -> Vec<f64> {
        let mut out = vec![0.0; corners.first().map_or(0, |c| c.p.len())];
        for (m, c) in self.mu.iter().zip(corners) {
            for (o, p) in out.iter_mut().zip(c.p.probs()) {
                *o += m * p;
            }
        }
        out
    }

    /// Checks nonnegativity and that the weights reproduce `p0` within [`DECOMPOSITION_TOL`].
    pub fn verify(&self, corners: &[CornerPoint], p0: &Pmf) -> Result<()> {
        if let Some(k) = self.mu.iter().position(|&m| !(m >= 0.0)) {
            return Err(Error::SolverFailure(format!("weight {k} is negative ({})", self.mu[k])));
        }
        let mix = self.mixture(corners);
        for (x, (a, b)) in mix.iter().zip(p0.probs()).enumerate() {
            if (a - b).abs() > DECOMPOSITION_TOL {
                return Err(Error::SolverFailure(format!(
                    "decomposition reproduces p0({x}) as {a}, expected {b}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeyDistortionSolution {
    /// `D*(R0)`.
    pub distortion: f64,
    pub decomposition: Decomposition,
}

fn check_corners(corners: &[CornerPoint], p0: &Pmf) -> Result<()> {
    if corners.is_empty() {
        return Err(Error::InvalidArgument("no corner points supplied".into()));
    }
    if let Some(c) = corners.iter().find(|c| c.p.len() != p0.len()) {
        return Err(Error::DimensionMismatch(format!(
            "corner point over {} symbols, source over {}",
            c.p.len(),
            p0.len()
        )));
    }
    Ok(())
}

fn mixture_rows(corners: &[CornerPoint], p0: &Pmf) -> Vec<(Vec<f64>, f64)> {
    (0..p0.len())
        .map(|x| (corners.iter().map(|c| c.p.probs()[x]).collect(), p0.probs()[x]))
        .collect()
}

fn run(lp: &LinearProgram, corners: &[CornerPoint], p0: &Pmf) -> Result<Decomposition> {
    let sol = lp.solve().map_err(|s| {
        Error::SolverFailure(match s {
            LpStatus::Infeasible => "program reported infeasible".to_string(),
            LpStatus::Unbounded => "program reported unbounded".to_string(),
            LpStatus::IterationLimit => "pivot limit reached".to_string(),
        })
    })?;
    let dec = Decomposition { mu: sol.x };
    dec.verify(corners, p0)?;
    Ok(dec)
}

/// Solves for `D*(R0)` and an optimal decomposition.
pub fn solve_key_distortion_lp(corners: &[CornerPoint], p0: &Pmf, r0: f64) -> Result<KeyDistortionSolution> {
    check_corners(corners, p0)?;
    if !(r0 >= 0.0) {
        return Err(Error::InvalidArgument(format!("key rate must be nonnegative, got {r0}")));
    }
    let lp = LinearProgram {
        objective: corners.iter().map(|c| c.beta).collect(),
        eq_rows: mixture_rows(corners, p0),
        ub_rows: vec![(corners.iter().map(|c| c.alpha).collect(), r0)],
    };
    let decomposition = run(&lp, corners, p0)?;
    let used = decomposition.key_rate(corners);
    if used > r0 + DECOMPOSITION_TOL {
        return Err(Error::SolverFailure(format!("solution spends {used} bits of key, budget {r0}")));
    }
    Ok(KeyDistortionSolution {
        distortion: decomposition.distortion(corners),
        decomposition,
    })
}

/// Maximizes `sum_k mu_k (beta_k - slope * alpha_k)` with no key budget.
fn lagrangian(corners: &[CornerPoint], p0: &Pmf, slope: f64) -> Result<Decomposition> {
    let lp = LinearProgram {
        objective: corners.iter().map(|c| c.beta - slope * c.alpha).collect(),
        eq_rows: mixture_rows(corners, p0),
        ub_rows: vec![],
    };
    run(&lp, corners, p0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Breakpoint {
    pub key_rate: f64,
    pub distortion: f64,
    pub decomposition: Decomposition,
}

/// The concave, nondecreasing, piecewise-linear map `R0 -> D*(R0)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TradeoffCurve {
    /// Strictly increasing in key rate, starting at 0.
    pub breakpoints: Vec<Breakpoint>,
    /// Smallest key rate at which the distortion stops growing.
    pub saturation_rate: f64,
    pub saturation_distortion: f64,
}

impl TradeoffCurve {
    /// Linear interpolation between breakpoints; constant past saturation.
    pub fn distortion_at(&self, r0: f64) -> f64 {
        let bp = &self.breakpoints;
        if r0 <= 0.0 {
            return bp[0].distortion;
        }
        if r0 >= self.saturation_rate {
            return self.saturation_distortion;
        }
        let i = bp.partition_point(|b| b.key_rate <= r0);
        let (a, b) = (&bp[i - 1], &bp[i]);
        let t = (r0 - a.key_rate) / (b.key_rate - a.key_rate);
        a.distortion + t * (b.distortion - a.distortion)
    }
}

/// Computes the exact breakpoints of `D*`.
///
/// Starting from the endpoints `(0, D*(0))` and the saturation point, each
/// segment is tested by maximizing `mu.beta - s mu.alpha` at the segment's
/// slope `s`. A value above the chord exposes a new vertex of the curve, and
/// both halves are refined recursively.
pub fn tradeoff_curve(corners: &[CornerPoint], p0: &Pmf) -> Result<TradeoffCurve> {
    check_corners(corners, p0)?;
    let start = solve_key_distortion_lp(corners, p0, 0.0)?;
    let top = lagrangian(corners, p0, 0.0)?;
    let d_max = top.distortion(corners);

    // Cheapest decomposition that still forces the maximum distortion.
    // The floor is exact: any slack here shortens the saturation rate by slack / slope.
    // The simplex phase-one tolerance absorbs rounding in `d_max`; a small slack is
    // the fallback if that is not enough.
    let sat_lp = |floor: f64| LinearProgram {
        objective: corners.iter().map(|c| -c.alpha).collect(),
        eq_rows: mixture_rows(corners, p0),
        ub_rows: vec![(corners.iter().map(|c| -c.beta).collect(), -floor)],
    };
    let sat = run(&sat_lp(d_max), corners, p0).or_else(|_| run(&sat_lp(d_max - REFINE_TOL), corners, p0))?;
    let sat_rate = sat.key_rate(corners);

    let first = Breakpoint {
        key_rate: 0.0,
        distortion: start.distortion,
        decomposition: start.decomposition,
    };
    if sat_rate <= 1e-12 || d_max - first.distortion <= REFINE_TOL {
        return Ok(TradeoffCurve {
            saturation_rate: 0.0,
            saturation_distortion: first.distortion,
            breakpoints: vec![first],
        });
    }
    let last = Breakpoint {
        key_rate: sat_rate,
        distortion: sat.distortion(corners),
        decomposition: sat,
    };

    let mut points = vec![first.clone()];
    refine(corners, p0, &first, &last, &mut points, 0)?;
    points.push(last);

    // Re-solve at every vertex so reported values are LP optima, then prune.
    let mut solved = Vec::with_capacity(points.len());
    for bp in points {
        let s = solve_key_distortion_lp(corners, p0, bp.key_rate)?;
        solved.push(Breakpoint {
            key_rate: bp.key_rate,
            distortion: s.distortion,
            decomposition: s.decomposition,
        });
    }
    let breakpoints = prune_collinear(solved);
    let tail = breakpoints.last().expect("at least two points");
    Ok(TradeoffCurve {
        saturation_rate: tail.key_rate,
        saturation_distortion: tail.distortion,
        breakpoints,
    })
}

fn refine(
    corners: &[CornerPoint],
    p0: &Pmf,
    a: &Breakpoint,
    b: &Breakpoint,
    out: &mut Vec<Breakpoint>,
    depth: usize,
) -> Result<()> {
    if depth > 64 {
        return Err(Error::SolverFailure("breakpoint refinement did not terminate".into()));
    }
    let slope = (b.distortion - a.distortion) / (b.key_rate - a.key_rate);
    let dec = lagrangian(corners, p0, slope)?;
    let (r, d) = (dec.key_rate(corners), dec.distortion(corners));
    let chord = a.distortion - slope * a.key_rate;
    if d - slope * r <= chord + REFINE_TOL || r <= a.key_rate + 1e-12 || r >= b.key_rate - 1e-12 {
        return Ok(());
    }
    let c = Breakpoint {
        key_rate: r,
        distortion: d,
        decomposition: dec,
    };
    refine(corners, p0, a, &c, out, depth + 1)?;
    out.push(c.clone());
    refine(corners, p0, &c, b, out, depth + 1)
}

fn prune_collinear(points: Vec<Breakpoint>) -> Vec<Breakpoint> {
    let mut out: Vec<Breakpoint> = Vec::with_capacity(points.len());
    for p in points {
        if let Some(last) = out.last() {
            if p.key_rate <= last.key_rate + 1e-12 {
                continue;
            }
        }
        while out.len() >= 2 {
            let (a, b) = (&out[out.len() - 2], &out[out.len() - 1]);
            let cross = (b.key_rate - a.key_rate) * (p.distortion - a.distortion)
                - (b.distortion - a.distortion) * (p.key_rate - a.key_rate);
            if cross.abs() <= COLLINEAR_TOL {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}

/// Minimum public description rate: the source entropy, whatever the key rate.
pub fn rate_requirement(p0: &Pmf) -> f64 {
    p0.entropy()
}

/// A problem instance with its corner points computed once.
#[derive(Debug, Clone)]
pub struct Region {
    pub instance: ProblemInstance,
    pub corners: Vec<CornerPoint>,
}

impl Region {
    pub fn new(instance: ProblemInstance) -> Result<Self> {
        let corners = enumerate_corner_points(&instance.distortion, DEFAULT_DEDUP_TOL)?;
        Ok(Self { instance, corners })
    }

    pub fn max_distortion(&self, r0: f64) -> Result<KeyDistortionSolution> {
        solve_key_distortion_lp(&self.corners, &self.instance.source, r0)
    }

    pub fn curve(&self) -> Result<TradeoffCurve> {
        tradeoff_curve(&self.corners, &self.instance.source)
    }

    /// Whether `(R0, R, D)` is achievable. Negative key rates are never achievable.
    pub fn contains(&self, r0: f64, r: f64, d: f64) -> Result<bool> {
        if !(r0 >= 0.0) {
            return Ok(false);
        }
        if r < rate_requirement(&self.instance.source) - MEMBERSHIP_TOL {
            return Ok(false);
        }
        Ok(d <= self.max_distortion(r0)?.distortion + MEMBERSHIP_TOL)
    }
}

/// Region membership for a single query; see [`Region::contains`] for repeated use.
pub fn in_region(instance: &ProblemInstance, r0: f64, r: f64, d: f64) -> Result<bool> {
    Region::new(instance.clone())?.contains(r0, r, d)
}
