//! Secret-key rate versus eavesdropper distortion for lossless transmission of
//! a finite-alphabet memoryless source.
//!
//! The eavesdropper sees the public message and the past source symbols and
//! reconstructs the next symbol causally. [`lp`] computes the largest
//! distortion a given key rate can force on it, [`oracle`] cross-checks that
//! value by searching auxiliary channels directly, and [`scheme`] simulates the
//! cover-and-bin construction that achieves it.

pub mod adversary;
pub mod corners;
pub mod error;
pub mod info;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod scheme;
mod simplex;

pub use adversary::{best_response, min_distortion, BestResponse, DEFAULT_TIE_TOL};
pub use corners::{enumerate_corner_points, CornerPoint, DEFAULT_DEDUP_TOL};
pub use error::{Error, Result};
pub use lp::{
    in_region, rate_requirement, solve_key_distortion_lp, tradeoff_curve, Breakpoint, Decomposition,
    KeyDistortionSolution, Region, TradeoffCurve,
};
pub use model::{conditional_entropy, entropy, expected_distortion, DistortionMatrix, Pmf, ProblemInstance};
pub use oracle::{evaluate_channel, oracle_max_distortion, AchievablePoint, AuxChannel, OracleResult};
pub use scheme::{
    auto_channel, build_scheme, run_monte_carlo, CoverRule, Encoded, Key, Message, Rates, SchemeConfig,
    SchemeInstance, SimReport,
};
