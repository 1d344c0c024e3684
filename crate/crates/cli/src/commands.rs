//! The subcommands. Each returns its verdict; output goes to stdout or a file.

use std::path::{Path, PathBuf};

use serde::Serialize;

use secrecy_core::{
    auto_channel, evaluate_channel, oracle_max_distortion, rate_requirement, run_monte_carlo, AuxChannel, CoverRule,
    Region, SchemeConfig, SimReport,
};

use crate::instance::{load_channel, load_instance, LoadedInstance};
use crate::output::{emit, real, to_json};
use crate::{CliError, Verdict};

/// Gaps between the oracle and the LP above this are reported on stderr.
pub const ORACLE_GAP_WARNING: f64 = 1e-2;
/// Largest allowed disagreement between interpolated and re-solved grid values.
pub const GRID_CHECK_TOL: f64 = 1e-9;
/// Upper bound on the number of grid rows.
pub const MAX_GRID_ROWS: usize = 1_000_000;

fn region(loaded: &LoadedInstance) -> Result<Region, CliError> {
    Ok(Region::new(loaded.instance.clone())?)
}

fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} must be finite, got {v}")))
    }
}

#[derive(Serialize)]
struct CornerEntry {
    p: Vec<f64>,
    alpha: f64,
    beta: f64,
    ties: Vec<usize>,
    tie_labels: Vec<String>,
    support: Vec<usize>,
}

#[derive(Serialize)]
struct CornersOutput {
    source_alphabet: Vec<String>,
    reconstruction_alphabet: Vec<String>,
    count: usize,
    corners: Vec<CornerEntry>,
}

fn corner_entries(loaded: &LoadedInstance, region: &Region) -> Vec<CornerEntry> {
    region
        .corners
        .iter()
        .map(|c| CornerEntry {
            p: c.p.probs().to_vec(),
            alpha: c.alpha,
            beta: c.beta,
            ties: c.ties.clone(),
            tie_labels: c.ties.iter().map(|&z| loaded.reconstruction_labels[z].clone()).collect(),
            support: c.support.clone(),
        })
        .collect()
}

pub fn corners(instance: &Path, out: Option<&Path>) -> Result<Verdict, CliError> {
    let loaded = load_instance(instance)?;
    let region = region(&loaded)?;
    let corners = corner_entries(&loaded, &region);
    let doc = CornersOutput {
        source_alphabet: loaded.source_labels.clone(),
        reconstruction_alphabet: loaded.reconstruction_labels.clone(),
        count: corners.len(),
        corners,
    };
    emit(out, &to_json(&doc)?)?;
    Ok(Verdict::Success)
}

#[derive(Serialize)]
struct WeightedCorner {
    corner: usize,
    weight: f64,
    p: Vec<f64>,
}

#[derive(Serialize)]
struct BreakpointEntry {
    key_rate: f64,
    distortion: f64,
    decomposition: Vec<WeightedCorner>,
}

#[derive(Serialize)]
struct GridEntry {
    key_rate: f64,
    distortion: f64,
}

#[derive(Serialize)]
struct CurveOutput {
    source_entropy: f64,
    saturation_rate: f64,
    saturation_distortion: f64,
    breakpoints: Vec<BreakpointEntry>,
    grid: Vec<GridEntry>,
    corners: Vec<CornerEntry>,
}

fn grid_rates(step: f64, top: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::Usage(format!("--grid must be a positive step, got {step}")));
    }
    let count = (top / step + 1e-9).floor();
    if count >= MAX_GRID_ROWS as f64 {
        return Err(CliError::Usage(format!("--grid {step} would produce more than {MAX_GRID_ROWS} rows")));
    }
    Ok((0..=count as usize).map(|i| i as f64 * step).collect())
}

pub fn curve(instance: &Path, grid: Option<f64>, csv: Option<&Path>, json: Option<&Path>) -> Result<Verdict, CliError> {
    let loaded = load_instance(instance)?;
    let region = region(&loaded)?;
    let curve = region.curve()?;
    let h = rate_requirement(&loaded.instance.source);

    let mut grid_rows = Vec::new();
    if let Some(step) = grid {
        for r0 in grid_rates(step, h)? {
            let d = curve.distortion_at(r0);
            let lp = region.max_distortion(r0)?.distortion;
            if (d - lp).abs() > GRID_CHECK_TOL {
                return Err(CliError::Numerical(format!(
                    "interpolated D*({r0}) = {d} disagrees with the LP value {lp}"
                )));
            }
            grid_rows.push(GridEntry { key_rate: r0, distortion: d });
        }
    }

    // Breakpoints and grid rows merged by key rate; a breakpoint wins a tie.
    let mut rows: Vec<(f64, f64)> = curve.breakpoints.iter().map(|b| (b.key_rate, b.distortion)).collect();
    rows.extend(
        grid_rows
            .iter()
            .filter(|g| !curve.breakpoints.iter().any(|b| b.key_rate == g.key_rate))
            .map(|g| (g.key_rate, g.distortion)),
    );
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut csv_text = String::from("R0,D\n");
    for (r0, d) in &rows {
        csv_text.push_str(&format!("{},{}\n", real(*r0), real(*d)));
    }

    if csv.is_none() && json.is_none() {
        emit(None, &csv_text)?;
        return Ok(Verdict::Success);
    }
    if let Some(path) = csv {
        emit(Some(path), &csv_text)?;
    }
    if let Some(path) = json {
        let breakpoints = curve
            .breakpoints
            .iter()
            .map(|b| BreakpointEntry {
                key_rate: b.key_rate,
                distortion: b.distortion,
                decomposition: b
                    .decomposition
                    .mu
                    .iter()
                    .enumerate()
                    .filter(|(_, &w)| w > 0.0)
                    .map(|(k, &w)| WeightedCorner {
                        corner: k,
                        weight: w,
                        p: region.corners[k].p.probs().to_vec(),
                    })
                    .collect(),
            })
            .collect();
        let doc = CurveOutput {
            source_entropy: h,
            saturation_rate: curve.saturation_rate,
            saturation_distortion: curve.saturation_distortion,
            breakpoints,
            grid: grid_rows,
            corners: corner_entries(&loaded, &region),
        };
        emit(Some(path), &to_json(&doc)?)?;
    }
    Ok(Verdict::Success)
}

#[derive(Serialize)]
struct CheckOutput {
    r0: f64,
    r: f64,
    d: f64,
    inside: bool,
    /// Smallest admissible public rate, `H(X)`.
    rate_requirement: f64,
    /// `D*(R0)`, absent for negative key rates.
    max_distortion: Option<f64>,
}

pub fn check(instance: &Path, r0: f64, r: f64, d: f64) -> Result<Verdict, CliError> {
    let (r0, r, d) = (finite("r0", r0)?, finite("r", r)?, finite("d", d)?);
    let loaded = load_instance(instance)?;
    let region = region(&loaded)?;
    let inside = region.contains(r0, r, d)?;
    let max_distortion = if r0 >= 0.0 { Some(region.max_distortion(r0)?.distortion) } else { None };
    let doc = CheckOutput {
        r0,
        r,
        d,
        inside,
        rate_requirement: rate_requirement(&loaded.instance.source),
        max_distortion,
    };
    emit(None, &to_json(&doc)?)?;
    Ok(if inside { Verdict::Success } else { Verdict::Negative })
}

#[derive(Serialize)]
struct OracleOutput {
    r0: f64,
    u_size: usize,
    restarts: usize,
    seed: u64,
    d_lower: Option<f64>,
    key_rate: Option<f64>,
    lp_distortion: f64,
    gap: Option<f64>,
    evaluations: u64,
    grid_searched: bool,
    best_channel: Option<AuxChannel>,
}

pub fn oracle(
    instance: &Path,
    r0: f64,
    u_size: Option<usize>,
    restarts: usize,
    seed: u64,
    out: Option<&Path>,
) -> Result<Verdict, CliError> {
    let r0 = finite("r0", r0)?;
    if r0 < 0.0 {
        return Err(CliError::Usage(format!("--r0 must be nonnegative, got {r0}")));
    }
    let loaded = load_instance(instance)?;
    let region = region(&loaded)?;
    let lp = region.max_distortion(r0)?.distortion;
    let u_size = u_size.unwrap_or(region.corners.len());
    let result = oracle_max_distortion(&loaded.instance, r0, u_size, restarts, seed)?;
    let gap = result.d_lower.map(|d| lp - d);
    match gap {
        Some(g) if g > ORACLE_GAP_WARNING => {
            eprintln!("warning: oracle is {g:.3e} below the LP value; try more restarts or a larger --usize")
        }
        None => eprintln!("warning: no channel within the key budget was found"),
        _ => {}
    }
    if let Some(g) = gap.filter(|g| *g < -1e-6) {
        return Err(CliError::Numerical(format!(
            "oracle exceeds the LP value by {:.3e}; the LP solution is wrong",
            -g
        )));
    }
    let doc = OracleOutput {
        r0,
        u_size,
        restarts,
        seed,
        d_lower: result.d_lower,
        key_rate: result.key_rate,
        lp_distortion: lp,
        gap,
        evaluations: result.evaluations,
        grid_searched: result.grid_searched,
        best_channel: result.best,
    };
    emit(out, &to_json(&doc)?)?;
    Ok(Verdict::Success)
}

pub struct SimulateArgs {
    pub channel: Option<PathBuf>,
    pub r0: Option<f64>,
    pub n: usize,
    pub eps: f64,
    pub delta: f64,
    pub rule: CoverRule,
    pub trials: usize,
    pub seed: u64,
    pub exact_causal: bool,
}

#[derive(Serialize)]
struct SimulateOutput {
    channel_source: &'static str,
    /// Key rate the auto channel was derived at.
    r0: Option<f64>,
    /// `D*(R0)` from the LP, for auto channels.
    lp_distortion: Option<f64>,
    channel: AuxChannel,
    report: SimReport,
}

pub fn simulate(instance: &Path, args: SimulateArgs, out: Option<&Path>) -> Result<Verdict, CliError> {
    if args.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let loaded = load_instance(instance)?;
    let (channel, source, r0, lp_distortion) = match (&args.channel, args.r0) {
        (Some(path), _) => (load_channel(path)?, "file", None, None),
        (None, Some(r0)) => {
            let r0 = finite("r0", r0)?;
            let lp = region(&loaded)?.max_distortion(r0)?.distortion;
            (auto_channel(&loaded.instance, r0)?, "auto", Some(r0), Some(lp))
        }
        (None, None) => return Err(CliError::Usage("give --channel or --auto --r0".into())),
    };
    // Validates the channel shape against the source before any heavy work.
    evaluate_channel(&loaded.instance, &channel)?;
    let config = SchemeConfig::new(loaded.instance.clone(), channel.clone(), args.n, args.eps, args.seed)
        .with_delta(args.delta)
        .with_rule(args.rule);
    let report = run_monte_carlo(&config, args.trials, args.exact_causal)?;
    let doc = SimulateOutput {
        channel_source: source,
        r0,
        lp_distortion,
        channel,
        report,
    };
    emit(out, &to_json(&doc)?)?;
    Ok(Verdict::Success)
}
