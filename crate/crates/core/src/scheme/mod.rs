//! Cover-and-bin achievability scheme with a one-time-padded bin index.
//!
//! The encoder sends a codeword index `I` from a covering codebook of
//! auxiliary sequences `u^n`, plus the bin of `x^n` padded with the secret key.
//! The receiver undoes the pad and finds `x^n` inside the bin. The
//! eavesdropper sees only `I` and the padded bin. Under a uniform key the
//! padded bin carries no information, so its posterior on `x^n` depends on the
//! cover index alone.

mod sim;
mod typical;

use std::collections::HashMap;
use std::sync::OnceLock;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{best_response_weights, DEFAULT_TIE_TOL};
use crate::error::{Error, Result};
use crate::info::mutual_information;
use crate::lp::Region;
use crate::model::ProblemInstance;
use crate::oracle::AuxChannel;

pub use sim::{run_monte_carlo, SimReport};
use typical::TypicalityBounds;

/// Largest `ceil(n R1) + ceil(n R2)` accepted by [`build_scheme`].
pub const MAX_CODE_BITS: u32 = 30;
/// Largest `|X|^n` for anything that enumerates whole source blocks.
pub const MAX_ENUMERATION: u64 = 1 << 22;
/// Largest block length for the exact causal adversary.
pub const MAX_EXACT_N: usize = 12;
/// Default L∞ typicality radius on joint types.
pub const DEFAULT_DELTA: f64 = 0.25;
/// Default finite-n rate slack in bits per symbol.
pub const DEFAULT_EPS: f64 = 0.15;
/// Weight below which a corner point is dropped when building the auto channel.
const AUTO_WEIGHT_FLOOR: f64 = 1e-12;

/// How the encoder picks a cover index among the jointly typical codewords.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CoverRule {
    /// The lowest-index jointly typical codeword. The receiver accepts the unique
    /// typical sequence in the bin and fails when there are zero or several.
    LowestTypical,
    /// Source blocks are assigned in order of decreasing probability. Each goes to the
    /// lowest-index typical codeword whose (codeword, bin) slot is still free, so
    /// bins never collide within a codeword. The receiver reads the slot owner.
    /// Requires enumerating `X^n`.
    #[default]
    CollisionFree,
}

#[derive(Debug, Clone, Serialize)]
pub struct SchemeConfig {
    pub instance: ProblemInstance,
    pub channel: AuxChannel,
    pub n: usize,
    pub eps: f64,
    pub seed: u64,
    pub delta: f64,
    pub rule: CoverRule,
}

impl SchemeConfig {
    pub fn new(instance: ProblemInstance, channel: AuxChannel, n: usize, eps: f64, seed: u64) -> Self {
        Self {
            instance,
            channel,
            n,
            eps,
            seed,
            delta: DEFAULT_DELTA,
            rule: CoverRule::default(),
        }
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn with_rule(mut self, rule: CoverRule) -> Self {
        self.rule = rule;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("block length n must be at least 1".into()));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::InvalidArgument(format!("delta must be nonnegative, got {}", self.delta)));
        }
        if self.channel.x_size() != self.instance.source.len() {
            return Err(Error::InvalidChannel(format!(
                "channel has {} input columns, source has {} symbols",
                self.channel.x_size(),
                self.instance.source.len()
            )));
        }
        if self.channel.u_size() > u8::MAX as usize + 1 {
            return Err(Error::SizeGuard("auxiliary alphabet above 256 symbols".into()));
        }
        Ok(())
    }
}

/// Secret key: a uniform element of `[2^bin_bits]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Key(pub u64);

/// What the eavesdropper intercepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Message {
    pub cover_index: u64,
    pub padded_bin: u64,
}

/// Encoder output with the coverage flag, which is not part of the message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Encoded {
    pub message: Message,
    /// No codeword was jointly typical with the source block; index 0 was sent.
    pub coverage_failure: bool,
}

/// Rates and sizes actually used by a scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rates {
    /// Cover rate `I(X;U) + eps`.
    pub r1: f64,
    /// Bin and key rate `H(X|U) + eps`.
    pub r2: f64,
    pub cover_bits: u32,
    pub bin_bits: u32,
    /// Public rate actually spent, `(cover_bits + bin_bits) / n`.
    pub public_rate: f64,
    /// Key rate actually spent, `bin_bits / n`.
    pub key_rate: f64,
}

/// Encoder tables for [`CoverRule::CollisionFree`].
#[derive(Debug)]
struct SlotTable {
    cover_of: Vec<u32>,
    uncovered: Vec<bool>,
    owner: HashMap<(u32, u64), u32>,
}

/// A realized code: codebook, bin hash key, and the tables derived from them.
#[derive(Debug)]
pub struct SchemeInstance {
    config: SchemeConfig,
    rates: Rates,
    nx: usize,
    codebook: Vec<u8>,
    bin_hash_key: u64,
    bounds: TypicalityBounds,
    /// Per-letter best response `z*(u)`.
    z_star: Vec<usize>,
    slots: Option<SlotTable>,
    /// Cover index of every source block, built on first use by the exact adversary.
    cover_all: OnceLock<Vec<u32>>,
}

/// `ceil(n * r)` ignoring floating-point noise just above an integer.
fn bits_for(n: usize, rate: f64) -> u32 {
    (n as f64 * rate - 1e-9).ceil().max(0.0) as u32
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn build_scheme(config: SchemeConfig) -> Result<SchemeInstance> {
    config.validate()?;
    let inst = &config.instance;
    let p0 = inst.source.probs();
    let (nu, nx, n) = (config.channel.u_size(), p0.len(), config.n);

    let joint = config.channel.joint(p0);
    let info = mutual_information(&joint);
    let h_cond: f64 = inst.source.entropy() - info;
    let r1 = info + config.eps;
    let r2 = h_cond.max(0.0) + config.eps;
    let (cover_bits, bin_bits) = (bits_for(n, r1), bits_for(n, r2));
    if cover_bits + bin_bits > MAX_CODE_BITS {
        return Err(Error::SizeGuard(format!(
            "code needs {cover_bits} cover bits + {bin_bits} bin bits; at most {MAX_CODE_BITS} supported"
        )));
    }
    let rates = Rates {
        r1,
        r2,
        cover_bits,
        bin_bits,
        public_rate: (cover_bits + bin_bits) as f64 / n as f64,
        key_rate: bin_bits as f64 / n as f64,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(0);
    let pu: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let draw = WeightedIndex::new(&pu).map_err(|e| Error::InvalidChannel(format!("u marginal: {e}")))?;
    let size = 1usize << cover_bits;
    let codebook: Vec<u8> = (0..size * n).map(|_| draw.sample(&mut rng) as u8).collect();
    let bin_hash_key = rng.random();

    let q: Vec<f64> = joint.concat();
    let bounds = TypicalityBounds::new(&q, nu, nx, n, config.delta);

    let z_star = joint
        .iter()
        .map(|row| {
            let weights = if row.iter().sum::<f64>() > 0.0 { row.as_slice() } else { p0 };
            best_response_weights(weights, &inst.distortion, DEFAULT_TIE_TOL).map(|b| b.representative())
        })
        .collect::<Result<Vec<_>>>()?;

    let mut scheme = SchemeInstance {
        config,
        rates,
        nx,
        codebook,
        bin_hash_key,
        bounds,
        z_star,
        slots: None,
        cover_all: OnceLock::new(),
    };
    if scheme.config.rule == CoverRule::CollisionFree {
        scheme.slots = Some(scheme.build_slots()?);
    }
    Ok(scheme)
}

/// Auxiliary channel realizing the optimal decomposition at key rate `r0`.
///
/// Each corner point with positive weight becomes one `u` label, with
/// `p(u_k|x) = mu_k p_k(x) / p0(x)`. Symbols with zero source probability are
/// mapped to the first label.
pub fn auto_channel(instance: &ProblemInstance, r0: f64) -> Result<AuxChannel> {
    let region = Region::new(instance.clone())?;
    let sol = region.max_distortion(r0)?;
    let p0 = instance.source.probs();
    let used: Vec<usize> = (0..region.corners.len())
        .filter(|&k| sol.decomposition.mu[k] > AUTO_WEIGHT_FLOOR)
        .collect();
    let mut rows: Vec<Vec<f64>> = used
        .iter()
        .map(|&k| {
            let pk = region.corners[k].p.probs();
            (0..p0.len())
                .map(|x| if p0[x] > 0.0 { sol.decomposition.mu[k] * pk[x] / p0[x] } else { 0.0 })
                .collect()
        })
        .collect();
    for x in 0..p0.len() {
        let total: f64 = rows.iter().map(|r| r[x]).sum();
        if p0[x] > 0.0 && total > 0.0 {
            rows.iter_mut().for_each(|r| r[x] /= total);
        } else {
            rows.iter_mut().for_each(|r| r[x] = 0.0);
            rows[0][x] = 1.0;
        }
    }
    AuxChannel::new(rows)
}

impl SchemeInstance {
    pub fn config(&self) -> &SchemeConfig {
        &self.config
    }

    pub fn rates(&self) -> Rates {
        self.rates
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn codebook_size(&self) -> usize {
        1 << self.rates.cover_bits
    }

    pub fn bin_count(&self) -> u64 {
        1 << self.rates.bin_bits
    }

    pub fn codeword(&self, index: u64) -> &[u8] {
        let n = self.config.n;
        let i = index as usize;
        &self.codebook[i * n..(i + 1) * n]
    }

    /// Per-letter best response `z*(u)` for each auxiliary label.
    pub fn per_letter_response(&self) -> &[usize] {
        &self.z_star
    }

    /// Uniform key draw.
    pub fn random_key(&self, rng: &mut impl Rng) -> Key {
        Key(rng.random_range(0..self.bin_count()))
    }

    /// Keyed hash of `x^n` into `[2^bin_bits]`.
    pub fn bin_of(&self, x: &[usize]) -> u64 {
        let mut h = self.bin_hash_key;
        for &s in x {
            h = splitmix64(h ^ (s as u64).wrapping_add(1).wrapping_mul(0xD6E8_FEB8_6659_FD93));
        }
        h & (self.bin_count() - 1)
    }

    fn check_block(&self, x: &[usize]) -> Result<()> {
        if x.len() != self.config.n {
            return Err(Error::DimensionMismatch(format!(
                "block has {} symbols, scheme uses n = {}",
                x.len(),
                self.config.n
            )));
        }
        if let Some(&s) = x.iter().find(|&&s| s >= self.nx) {
            return Err(Error::IndexOutOfRange { index: s, count: self.nx });
        }
        Ok(())
    }

    fn check_message(&self, msg: &Message) -> Result<()> {
        if msg.cover_index >= self.codebook_size() as u64 || msg.padded_bin >= self.bin_count() {
            return Err(Error::InvalidArgument(format!("message {msg:?} is outside the code")));
        }
        Ok(())
    }

    fn enumeration_size(&self) -> Result<u64> {
        (self.nx as u64)
            .checked_pow(self.config.n as u32)
            .filter(|&s| s <= MAX_ENUMERATION)
            .ok_or_else(|| {
                Error::SizeGuard(format!(
                    "|X|^n = {}^{} exceeds the enumeration limit {MAX_ENUMERATION}",
                    self.nx, self.config.n
                ))
            })
    }

    /// Source block with lexicographic rank `index` (first symbol most significant).
    fn block_at(&self, mut index: u64, out: &mut [usize]) {
        for s in out.iter_mut().rev() {
            *s = (index % self.nx as u64) as usize;
            index /= self.nx as u64;
        }
    }

    fn rank(&self, x: &[usize]) -> u64 {
        x.iter().fold(0, |acc, &s| acc * self.nx as u64 + s as u64)
    }

    fn lowest_typical(&self, x: &[usize]) -> Option<u32> {
        (0..self.codebook_size()).find(|&i| self.bounds.is_typical(self.codeword(i as u64), x)).map(|i| i as u32)
    }

    fn block_probability(&self, x: &[usize]) -> f64 {
        let p0 = self.config.instance.source.probs();
        x.iter().map(|&s| p0[s]).product()
    }

    fn build_slots(&self) -> Result<SlotTable> {
        let total = self.enumeration_size()?;
        let work = total.saturating_mul(self.codebook_size() as u64);
        if work > 1 << 34 {
            return Err(Error::SizeGuard(format!(
                "collision-free assignment would test {work} (block, codeword) pairs"
            )));
        }
        let n = self.config.n;
        let mut block = vec![0usize; n];
        let mut order: Vec<(f64, u32)> = (0..total)
            .map(|i| {
                self.block_at(i, &mut block);
                (self.block_probability(&block), i as u32)
            })
            .collect();
        // Stable: equal probabilities keep lexicographic order.
        order.sort_by(|a, b| b.0.total_cmp(&a.0));

        let mut cover_of = vec![0u32; total as usize];
        let mut uncovered = vec![false; total as usize];
        let mut owner = HashMap::new();
        for &(_, idx) in &order {
            self.block_at(idx as u64, &mut block);
            let bin = self.bin_of(&block);
            let mut first = None;
            let mut placed = false;
            for i in 0..self.codebook_size() as u32 {
                if !self.bounds.is_typical(self.codeword(i as u64), &block) {
                    continue;
                }
                first.get_or_insert(i);
                if let std::collections::hash_map::Entry::Vacant(e) = owner.entry((i, bin)) {
                    e.insert(idx);
                    cover_of[idx as usize] = i;
                    placed = true;
                    break;
                }
            }
            if !placed {
                match first {
                    Some(i) => cover_of[idx as usize] = i,
                    None => uncovered[idx as usize] = true,
                }
            }
        }
        Ok(SlotTable {
            cover_of,
            uncovered,
            owner,
        })
    }

    pub fn encode(&self, x: &[usize], key: Key) -> Result<Encoded> {
        self.check_block(x)?;
        if key.0 >= self.bin_count() {
            return Err(Error::InvalidArgument(format!("key {} outside [0, {})", key.0, self.bin_count())));
        }
        let (cover, coverage_failure) = match &self.slots {
            Some(t) => {
                let r = self.rank(x) as usize;
                (t.cover_of[r], t.uncovered[r])
            }
            None => match self.lowest_typical(x) {
                Some(i) => (i, false),
                None => (0, true),
            },
        };
        let padded_bin = (self.bin_of(x) + key.0) & (self.bin_count() - 1);
        Ok(Encoded {
            message: Message {
                cover_index: cover as u64,
                padded_bin,
            },
            coverage_failure,
        })
    }

    /// Receiver's estimate of `x^n`; `None` is a decode failure.
    pub fn decode(&self, msg: &Message, key: Key) -> Result<Option<Vec<usize>>> {
        self.check_message(msg)?;
        let bin = msg.padded_bin.wrapping_sub(key.0) & (self.bin_count() - 1);
        if let Some(t) = &self.slots {
            return Ok(t.owner.get(&(msg.cover_index as u32, bin)).map(|&idx| {
                let mut x = vec![0; self.config.n];
                self.block_at(idx as u64, &mut x);
                x
            }));
        }
        let mut found: Option<Vec<usize>> = None;
        let mut count = 0;
        self.bounds.for_each_typical(self.codeword(msg.cover_index), |x| {
            if count < 2 && self.bin_of(x) == bin {
                count += 1;
                found = Some(x.to_vec());
            }
        });
        Ok(if count == 1 { found } else { None })
    }

    /// `z_i = z*(u_i)` along the indexed codeword.
    pub fn eavesdrop_per_letter(&self, msg: &Message) -> Result<Vec<usize>> {
        self.check_message(msg)?;
        Ok(self.codeword(msg.cover_index).iter().map(|&u| self.z_star[u as usize]).collect())
    }

    fn cover_table(&self) -> Result<&[u32]> {
        if let Some(t) = &self.slots {
            return Ok(&t.cover_of);
        }
        if let Some(t) = self.cover_all.get() {
            return Ok(t);
        }
        let total = self.enumeration_size()?;
        let table: Vec<u32> = {
            use rayon::prelude::*;
            (0..total)
                .into_par_iter()
                .map(|i| {
                    let mut x = vec![0; self.config.n];
                    self.block_at(i, &mut x);
                    self.lowest_typical(&x).unwrap_or(0)
                })
                .collect()
        };
        Ok(self.cover_all.get_or_init(|| table))
    }

    fn check_exact(&self) -> Result<()> {
        if self.config.n > MAX_EXACT_N {
            return Err(Error::SizeGuard(format!(
                "exact causal adversary supports n <= {MAX_EXACT_N}, got {}",
                self.config.n
            )));
        }
        self.enumeration_size().map(|_| ())
    }

    /// Source blocks the encoder maps to `cover_index`, with their probabilities.
    fn cover_class(&self, cover_index: u64) -> Result<Vec<(Vec<usize>, f64)>> {
        let table = self.cover_table()?;
        let mut out = Vec::new();
        for (i, &c) in table.iter().enumerate() {
            if c as u64 == cover_index {
                let mut x = vec![0; self.config.n];
                self.block_at(i as u64, &mut x);
                let p = self.block_probability(&x);
                if p > 0.0 {
                    out.push((x, p));
                }
            }
        }
        Ok(out)
    }

    /// Bayes-optimal causal estimate of the next symbol.
    ///
    /// The posterior on `x^n` given the message is proportional to
    /// `p0(x^n) 1{cover(x^n) = I}`. The padded bin drops out because the key
    /// is uniform. The posterior is then restricted to blocks that agree with
    /// `x_prefix`. If no block agrees, the best response to `p0` is returned.
    pub fn eavesdrop_exact_causal(&self, msg: &Message, x_prefix: &[usize]) -> Result<usize> {
        self.check_message(msg)?;
        self.check_exact()?;
        if x_prefix.len() >= self.config.n {
            return Err(Error::InvalidArgument(format!(
                "prefix of length {} leaves no symbol to estimate at n = {}",
                x_prefix.len(),
                self.config.n
            )));
        }
        let class = self.cover_class(msg.cover_index)?;
        let j = x_prefix.len();
        let mut w = vec![0.0; self.nx];
        for (x, p) in &class {
            if x[..j] == *x_prefix {
                w[x[j]] += p;
            }
        }
        self.respond(&w)
    }

    fn respond(&self, w: &[f64]) -> Result<usize> {
        let total: f64 = w.iter().sum();
        let post: Vec<f64> = if total > 0.0 {
            w.iter().map(|v| v / total).collect()
        } else {
            self.config.instance.source.probs().to_vec()
        };
        Ok(best_response_weights(&post, &self.config.instance.distortion, DEFAULT_TIE_TOL)?.representative())
    }

    /// Runs the exact causal adversary over a whole block and returns its estimates.
    pub fn eavesdrop_exact_block(&self, msg: &Message, x: &[usize]) -> Result<Vec<usize>> {
        self.check_message(msg)?;
        self.check_exact()?;
        self.check_block(x)?;
        let mut alive = self.cover_class(msg.cover_index)?;
        let mut z = Vec::with_capacity(x.len());
        for (j, &xj) in x.iter().enumerate() {
            let mut w = vec![0.0; self.nx];
            for (blk, p) in &alive {
                w[blk[j]] += p;
            }
            z.push(self.respond(&w)?);
            alive.retain(|(blk, _)| blk[j] == xj);
        }
        Ok(z)
    }

    /// Eagerly builds the tables the exact adversary needs.
    pub fn prepare_exact(&self) -> Result<()> {
        self.check_exact()?;
        self.cover_table().map(|_| ())
    }

    /// Mean per-symbol distortion of `z` against `x`.
    pub fn block_distortion(&self, x: &[usize], z: &[usize]) -> f64 {
        let d = &self.config.instance.distortion;
        x.iter().zip(z).map(|(&a, &b)| d.get(a, b)).sum::<f64>() / x.len() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn paper_config(n: usize, rule: CoverRule) -> SchemeConfig {
        let inst = ProblemInstance::binary_hamming(0.25).unwrap();
        let ch = auto_channel(&inst, 0.5).unwrap();
        SchemeConfig::new(inst, ch, n, 0.15, 11).with_rule(rule)
    }

    #[test]
    fn auto_channel_is_reveal_or_coin() {
        let inst = ProblemInstance::binary_hamming(0.25).unwrap();
        let ch = auto_channel(&inst, 0.5).unwrap();
        assert_eq!(ch.u_size(), 2);
        let rows = ch.to_rows();
        // delta_0 weight 1/2 -> p(u0|x=0) = (1/2)/(3/4) = 2/3.
        assert_abs_diff_eq!(rows[0][0], 2.0 / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(rows[0][1], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(rows[1][1], 1.0, epsilon = 1e-9);
    }

    #[test]
    fn paper_rates() {
        let s = build_scheme(paper_config(12, CoverRule::LowestTypical)).unwrap();
        let r = s.rates();
        assert_abs_diff_eq!(r.r1, 0.811_278_124_459_132_9 - 0.5 + 0.15, epsilon = 1e-9);
        assert_eq!(r.cover_bits, 6);
        assert_eq!(r.bin_bits, 8);
        assert_eq!(s.codebook_size(), 64);
        assert_eq!(s.per_letter_response(), &[0, 0]);
    }

    #[test]
    fn single_letter_block() {
        let s = build_scheme(paper_config(1, CoverRule::LowestTypical)).unwrap();
        assert_eq!(s.codebook_size(), 1 << s.rates().cover_bits);
        assert_eq!(s.codeword(0).len(), 1);
    }

    #[test]
    fn same_seed_same_codebook() {
        let a = build_scheme(paper_config(12, CoverRule::LowestTypical)).unwrap();
        let b = build_scheme(paper_config(12, CoverRule::LowestTypical)).unwrap();
        assert_eq!(a.codebook, b.codebook);
        assert_eq!(a.bin_of(&[0; 12]), b.bin_of(&[0; 12]));
    }

    #[test]
    fn size_guard() {
        let inst = ProblemInstance::binary_hamming(0.25).unwrap();
        let cfg = SchemeConfig::new(inst, AuxChannel::constant(2), 40, 0.15, 1);
        assert!(matches!(build_scheme(cfg), Err(Error::SizeGuard(_))));
    }

    #[test]
    fn pad_examples() {
        let s = build_scheme(paper_config(12, CoverRule::LowestTypical)).unwrap();
        let x = [0, 1, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0];
        let e0 = s.encode(&x, Key(0)).unwrap();
        assert_eq!(e0.message.padded_bin, s.bin_of(&x));
        let e1 = s.encode(&x, Key(1)).unwrap();
        assert_ne!(e0.message.padded_bin, e1.message.padded_bin);
        assert_eq!(e0.message.cover_index, e1.message.cover_index);
    }

    #[test]
    fn round_trip_both_rules() {
        for rule in [CoverRule::LowestTypical, CoverRule::CollisionFree] {
            let s = build_scheme(paper_config(10, rule)).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let mut ok = 0;
            for _ in 0..200 {
                let x: Vec<usize> = (0..10).map(|_| usize::from(rng.random_bool(0.25))).collect();
                let k = s.random_key(&mut rng);
                let e = s.encode(&x, k).unwrap();
                let decoded = s.decode(&e.message, k).unwrap();
                if let Some(t) = &s.slots {
                    // The slot owner is x exactly when x won its slot.
                    let bin = s.bin_of(&x);
                    let owns = t.owner.get(&(e.message.cover_index as u32, bin)) == Some(&(s.rank(&x) as u32));
                    assert_eq!(decoded.as_deref() == Some(x.as_slice()), owns);
                }
                ok += usize::from(decoded.as_deref() == Some(x.as_slice()));
            }
            let floor = if rule == CoverRule::CollisionFree { 190 } else { 1 };
            assert!(ok >= floor, "{rule:?} decoded {ok}/200");
        }
    }

    #[test]
    fn wrong_key_rarely_decodes() {
        let s = build_scheme(paper_config(12, CoverRule::CollisionFree)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut hits = 0;
        for _ in 0..500 {
            let x: Vec<usize> = (0..12).map(|_| usize::from(rng.random_bool(0.25))).collect();
            let k = s.random_key(&mut rng);
            let wrong = Key((k.0 + 1 + rng.random_range(0..s.bin_count() - 1)) % s.bin_count());
            let e = s.encode(&x, k).unwrap();
            hits += usize::from(s.decode(&e.message, wrong).unwrap().as_deref() == Some(x.as_slice()));
        }
        assert!(hits < 25, "wrong key recovered the block {hits}/500 times");
    }

    #[test]
    fn per_letter_adversary_examples() {
        let inst = ProblemInstance::binary_hamming(0.25).unwrap();
        let ident = build_scheme(SchemeConfig::new(inst.clone(), AuxChannel::identity(2), 4, 0.15, 5)).unwrap();
        assert_eq!(ident.per_letter_response(), &[0, 1]);
        let constant = build_scheme(SchemeConfig::new(inst, AuxChannel::constant(2), 4, 0.15, 5)).unwrap();
        assert_eq!(constant.per_letter_response(), &[0]);
    }

    #[test]
    fn exact_adversary_on_constant_code_plays_prior() {
        let inst = ProblemInstance::binary_hamming(0.25).unwrap();
        let s = build_scheme(
            SchemeConfig::new(inst, AuxChannel::constant(2), 4, 0.15, 5).with_rule(CoverRule::LowestTypical),
        )
        .unwrap();
        let e = s.encode(&[1, 1, 0, 1], Key(0)).unwrap();
        let z = s.eavesdrop_exact_block(&e.message, &[1, 1, 0, 1]).unwrap();
        // All blocks share cover index 0 when U is constant, so the posterior is the prior.
        assert!(z.iter().all(|&v| v == 0));
    }

    #[test]
    fn exact_adversary_guards_block_length() {
        let inst = ProblemInstance::binary_hamming(0.25).unwrap();
        let s = build_scheme(
            SchemeConfig::new(inst, AuxChannel::constant(2), 13, 0.15, 5).with_rule(CoverRule::LowestTypical),
        )
        .unwrap();
        let msg = Message {
            cover_index: 0,
            padded_bin: 0,
        };
        assert!(matches!(s.eavesdrop_exact_causal(&msg, &[]), Err(Error::SizeGuard(_))));
    }

    #[test]
    fn identity_code_reveals_everything() {
        let inst = ProblemInstance::binary_hamming(0.25).unwrap();
        let s = build_scheme(SchemeConfig::new(inst, AuxChannel::identity(2), 1, 0.15, 5)).unwrap();
        for x in 0..2 {
            let e = s.encode(&[x], Key(0)).unwrap();
            if !e.coverage_failure {
                assert_eq!(s.eavesdrop_per_letter(&e.message).unwrap(), vec![x]);
                assert_eq!(s.eavesdrop_exact_causal(&e.message, &[]).unwrap(), x);
            }
        }
    }
}
