//! Monte-Carlo runs of the scheme against both eavesdroppers.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{build_scheme, splitmix64, CoverRule, Rates, SchemeConfig};
use crate::error::{Error, Result};
use crate::info::{shuffle_corrected_mi, PairCounts};
use crate::oracle::evaluate_channel;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub eps: f64,
    pub delta: f64,
    pub rule: CoverRule,
    pub rates_used: Rates,
    /// Fraction of trials with `x_hat != x`, decode failures included.
    pub decode_error_rate: f64,
    pub coverage_failure_rate: f64,
    pub per_letter_distortion: f64,
    pub exact_causal_distortion: Option<f64>,
    /// `H(X|U)` of the channel.
    pub channel_key_rate: f64,
    /// `min_{z(u)} E d(X, z(U))`, the single-letter target.
    pub channel_distortion: f64,
    /// Shuffle-corrected estimate of `I(bin; padded bin)` in bits.
    pub pad_mutual_information: f64,
    /// Uncorrected plug-in estimate of the same quantity.
    pub pad_mutual_information_plugin: f64,
    /// Miller-Madow estimate of the same quantity. It is unreliable when the
    /// joint table has more cells than there are trials.
    pub pad_mutual_information_miller_madow: f64,
}

struct Trial {
    decode_error: bool,
    coverage_failure: bool,
    per_letter: f64,
    exact: Option<f64>,
    bin: u64,
    padded_bin: u64,
}

/// Seed for the trial streams, kept apart from the codebook stream.
const TRIAL_DOMAIN: u64 = 0x5EC2_E7A1_0000_0001;
/// Seed domain for the re-pairings behind the pad-independence baseline.
const SHUFFLE_DOMAIN: u64 = 0x5EC2_E7A1_0000_0002;
/// Re-pairings averaged for the pad-independence baseline.
pub const PAD_SHUFFLES: usize = 20;

/// Simulates `trials` independent blocks with fresh keys.
///
/// Trial `t` draws from its own ChaCha stream, so the report depends only on
/// the configuration and seed, not on the thread count.
pub fn run_monte_carlo(config: &SchemeConfig, trials: usize, exact_causal: bool) -> Result<SimReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let target = evaluate_channel(&config.instance, &config.channel)?;
    let scheme = build_scheme(config.clone())?;
    if exact_causal {
        scheme.prepare_exact()?;
    }
    let source = WeightedIndex::new(config.instance.source.probs())
        .map_err(|e| Error::InvalidPmf(format!("cannot sample source: {e}")))?;
    let n = config.n;
    let trial_seed = splitmix64(config.seed ^ TRIAL_DOMAIN);

    let outcomes: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<Trial> {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
            rng.set_stream(t as u64);
            let x: Vec<usize> = (0..n).map(|_| source.sample(&mut rng)).collect();
            let key = scheme.random_key(&mut rng);
            let enc = scheme.encode(&x, key)?;
            let decoded = scheme.decode(&enc.message, key)?;
            let z = scheme.eavesdrop_per_letter(&enc.message)?;
            let exact = if exact_causal {
                let ze = scheme.eavesdrop_exact_block(&enc.message, &x)?;
                Some(scheme.block_distortion(&x, &ze))
            } else {
                None
            };
            Ok(Trial {
                decode_error: decoded.as_deref() != Some(x.as_slice()),
                coverage_failure: enc.coverage_failure,
                per_letter: scheme.block_distortion(&x, &z),
                exact,
                bin: scheme.bin_of(&x),
                padded_bin: enc.message.padded_bin,
            })
        })
        .collect::<Result<_>>()?;

    let mut pad = PairCounts::new();
    let mut pad_pairs = Vec::with_capacity(trials);
    let (mut errors, mut uncovered, mut per_letter, mut exact) = (0usize, 0usize, 0.0, 0.0);
    for o in &outcomes {
        errors += usize::from(o.decode_error);
        uncovered += usize::from(o.coverage_failure);
        per_letter += o.per_letter;
        exact += o.exact.unwrap_or(0.0);
        pad.add(o.bin, o.padded_bin);
        pad_pairs.push((o.bin, o.padded_bin));
    }
    let pad_mi = shuffle_corrected_mi(&pad_pairs, PAD_SHUFFLES, splitmix64(config.seed ^ SHUFFLE_DOMAIN));
    let tf = trials as f64;
    Ok(SimReport {
        n,
        trials,
        seed: config.seed,
        eps: config.eps,
        delta: config.delta,
        rule: config.rule,
        rates_used: scheme.rates(),
        decode_error_rate: errors as f64 / tf,
        coverage_failure_rate: uncovered as f64 / tf,
        per_letter_distortion: per_letter / tf,
        exact_causal_distortion: exact_causal.then_some(exact / tf),
        channel_key_rate: target.key_rate,
        channel_distortion: target.distortion,
        pad_mutual_information: pad_mi.corrected,
        pad_mutual_information_plugin: pad_mi.plugin,
        pad_mutual_information_miller_madow: pad.miller_madow_mi(),
    })
}
