//! The random LED code construction: an inner classical code with
//! maximum-likelihood decoding, a random table of candidate lists, and the
//! resulting encoder/decoder pair, plus exact error evaluation on
//! enumerable instances.
//!
//! The encoder looks up the first list that meets the sender set in at
//! least T messages and transmits that list's inner codeword; if no list
//! qualifies, it declares an encoding failure. The decoder ML-decodes the
//! inner code and returns the corresponding list verbatim.

use std::collections::BTreeMap;

use itertools::Itertools;
use rand::Rng;
use thiserror::Error;

use crate::channel::{ChannelError, ChannelModel, DEFAULT_CAPACITY_TOL};
use crate::combinatorics::log_binomial;
use crate::feasibility::CodeParams;
use crate::packing::MessageSet;
use crate::stream::{self, domain};

/// Largest inner codebook the constructor will generate.
pub const INNER_COUNT_GUARD: u64 = 1_000_000;
/// Largest `C(M,K) * |Y|^n` product the exact evaluator will enumerate.
pub const EVALUATION_GUARD: f64 = 1e7;
/// Inner codebooks this much larger than `C(M,L)` necessarily repeat lists
/// heavily; the constructor flags them.
pub const LIST_DUPLICATION_FACTOR: f64 = 1e3;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("inner rate must be positive and finite, got {0}")]
    InvalidInnerRate(f64),
    #[error("inner message count {count} exceeds the construction guard {guard}")]
    InnerCountGuard { count: u64, guard: u64 },
    #[error("exhaustive evaluation needs C(M,K) * |Y|^n <= {guard:.1e}, got {size:.3e}")]
    EvaluationGuard { size: f64, guard: f64 },
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// The inner classical code: i.i.d. codewords over the channel input
/// alphabet, decoded by maximum likelihood.
#[derive(Clone, Debug, PartialEq)]
pub struct InnerCode {
    pub codewords: Vec<Vec<u16>>,
    /// Per-symbol generation distribution (the capacity-achieving input).
    pub input_distribution: Vec<f64>,
}

impl InnerCode {
    pub fn count(&self) -> usize {
        self.codewords.len()
    }
}

/// A constructed LED code: the code parameters, one candidate list per
/// inner message (duplicates allowed), and the inner code.
#[derive(Clone, Debug, PartialEq)]
pub struct LedCode {
    pub params: CodeParams,
    pub list_table: Vec<MessageSet>,
    pub inner: InnerCode,
    /// Set when the inner count exceeds `C(M,L)` by
    /// [`LIST_DUPLICATION_FACTOR`], i.e. the random lists are necessarily
    /// heavily duplicated.
    pub heavy_list_duplication: bool,
}

/// Encoder outcome: the inner message index whose list covers the sender
/// set, or a declared encoding failure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EncodeOutcome {
    /// 0-based index into the codeword/list tables.
    Index(usize),
    Failure,
}

impl EncodeOutcome {
    pub fn is_failure(&self) -> bool {
        matches!(self, EncodeOutcome::Failure)
    }
}

pub(crate) fn sample_categorical<R: Rng>(dist: &[f64], rng: &mut R) -> u16 {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (i, &p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return i as u16;
        }
    }
    (dist.len() - 1) as u16
}

/// Builds an LED code for the channel: `ceil(e^(n * r_inner))` inner
/// codewords drawn i.i.d. from the capacity-achieving input distribution,
/// and as many candidate lists drawn uniformly from the L-subsets of
/// [1..M]. Fully deterministic given the seed; extending the inner rate
/// extends the tables without changing existing entries.
pub fn build_led_code(
    params: &CodeParams,
    r_inner: f64,
    ch: &ChannelModel,
    seed: u64,
) -> Result<LedCode, CodeError> {
    if !(r_inner.is_finite() && r_inner > 0.0) {
        return Err(CodeError::InvalidInnerRate(r_inner));
    }
    let count_f = (params.n as f64 * r_inner).exp().ceil();
    if count_f > INNER_COUNT_GUARD as f64 {
        return Err(CodeError::InnerCountGuard {
            count: count_f as u64,
            guard: INNER_COUNT_GUARD,
        });
    }
    let count = count_f as u64;
    let input_distribution = ch.capacity_achieving_input(DEFAULT_CAPACITY_TOL)?;

    let codewords = (0..count)
        .map(|i| {
            let mut rng = stream::substream(seed, domain::CODEWORD, i);
            (0..params.n)
                .map(|_| sample_categorical(&input_distribution, &mut rng))
                .collect()
        })
        .collect();
    let list_table = (0..count)
        .map(|i| {
            let mut rng = stream::substream(seed, domain::LIST, i);
            MessageSet::sample_uniform(params.m, params.l, &mut rng)
        })
        .collect();

    let heavy_list_duplication =
        (count as f64).ln() > log_binomial(params.m, params.l as i64).ln() + LIST_DUPLICATION_FACTOR.ln();

    Ok(LedCode {
        params: *params,
        list_table,
        inner: InnerCode {
            codewords,
            input_distribution,
        },
        heavy_list_duplication,
    })
}

/// Encodes a sender set: the smallest index whose list meets it in at
/// least T messages, or `Failure` when no list qualifies.
pub fn led_encode(code: &LedCode, lam: &MessageSet) -> EncodeOutcome {
    assert_eq!(
        lam.len() as u64,
        code.params.k,
        "sender set must have exactly K messages"
    );
    code.list_table
        .iter()
        .position(|n_i| n_i.intersection_size(lam) as u64 >= code.params.t)
        .map_or(EncodeOutcome::Failure, EncodeOutcome::Index)
}

/// ML inner decoding; ties go to the smallest index.
pub fn led_decode_index(code: &LedCode, ch: &ChannelModel, y: &[u16]) -> usize {
    let mut best = 0usize;
    let mut best_ll = f64::NEG_INFINITY;
    for (i, u) in code.inner.codewords.iter().enumerate() {
        let ll = ch
            .log_likelihood(u, y)
            .expect("output word must match the block length and alphabet")
            .ln();
        if ll > best_ll {
            best_ll = ll;
            best = i;
        }
    }
    best
}

/// Decodes a channel output to its estimated list (always exactly L
/// messages, since every table entry is an L-subset).
pub fn led_decode<'a>(code: &'a LedCode, ch: &ChannelModel, y: &[u16]) -> &'a MessageSet {
    &code.list_table[led_decode_index(code, ch, y)]
}

/// Exact evaluation of an enumerable instance.
#[derive(Clone, Debug)]
pub struct ExactEvaluation {
    /// Mean error probability over all C(M,K) sender sets.
    pub lambda_avg: f64,
    /// Per-set error probabilities.
    pub lambda_per_set: BTreeMap<MessageSet, f64>,
    /// Fraction of sender sets with no qualifying list.
    pub p_enc_err: f64,
    /// Mean inner ML error probability over successfully encoded sets;
    /// together with `p_enc_err` it union-bounds `lambda_avg`.
    pub p_dec_err: f64,
}

pub(crate) fn all_words(alphabet: usize, n: usize) -> Vec<Vec<u16>> {
    let mut words = Vec::with_capacity(alphabet.pow(n as u32));
    let mut current = vec![0u16; n];
    loop {
        words.push(current.clone());
        let mut pos = n;
        loop {
            if pos == 0 {
                return words;
            }
            pos -= 1;
            current[pos] += 1;
            if (current[pos] as usize) < alphabet {
                break;
            }
            current[pos] = 0;
        }
    }
}

/// Computes the error probability of every sender set exactly by summing
/// channel probabilities over all output words. Encoding failures count
/// as errors with probability 1.
pub fn evaluate_exact(code: &LedCode, ch: &ChannelModel) -> Result<ExactEvaluation, CodeError> {
    let p = &code.params;
    let n_lam = log_binomial(p.m, p.k as i64).linear();
    let n_outputs = (ch.output_size() as f64).powi(p.n as i32);
    let size = n_lam * n_outputs;
    if size > EVALUATION_GUARD || size.is_nan() {
        return Err(CodeError::EvaluationGuard {
            size,
            guard: EVALUATION_GUARD,
        });
    }

    let outputs = all_words(ch.output_size(), p.n as usize);
    let decoded: Vec<usize> = outputs
        .iter()
        .map(|y| led_decode_index(code, ch, y))
        .collect();

    let mut lambda_per_set = BTreeMap::new();
    let mut lambda_sum = 0.0;
    let mut enc_failures = 0u64;
    let mut dec_sum = 0.0;
    let mut total = 0u64;
    for lam_ids in (1..=p.m).combinations(p.k as usize) {
        total += 1;
        let lam = MessageSet::new(lam_ids).expect("combinations are sorted and distinct");
        let lambda = match led_encode(code, &lam) {
            EncodeOutcome::Failure => {
                enc_failures += 1;
                1.0
            }
            EncodeOutcome::Index(i) => {
                let u = &code.inner.codewords[i];
                let mut err = 0.0;
                let mut dec_err = 0.0;
                for (y, &j) in outputs.iter().zip(&decoded) {
                    let prob = ch.likelihood(u, y)?;
                    if (code.list_table[j].intersection_size(&lam) as u64) < p.t {
                        err += prob;
                    }
                    if j != i {
                        dec_err += prob;
                    }
                }
                dec_sum += dec_err;
                err
            }
        };
        lambda_sum += lambda;
        lambda_per_set.insert(lam, lambda);
    }

    let total_f = total as f64;
    Ok(ExactEvaluation {
        lambda_avg: lambda_sum / total_f,
        lambda_per_set,
        p_enc_err: enc_failures as f64 / total_f,
        p_dec_err: dec_sum / total_f,
    })
}
