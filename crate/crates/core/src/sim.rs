//! Seeded Monte Carlo estimation of the average LED error probability, the
//! reduction from an LED code to a classical list-decoding (LD) code
//! through a packing and a random relabeling permutation, and the exact
//! permutation-averaged identity between the two error probabilities.
//!
//! Every trial owns the stream `(seed, TRIAL, trial_index)`, so reports are
//! pure functions of `(code, channel, trials, seed)` regardless of how the
//! trials are scheduled across workers.

use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{ChannelError, ChannelModel};
use crate::codes::{
    all_words, evaluate_exact, led_decode, led_encode, led_decode_index, CodeError, EncodeOutcome,
    LedCode,
};
use crate::combinatorics::binomial_u128;
use crate::feasibility::CodeParams;
use crate::packing::{MessageSet, Packing};
use crate::stream::{self, domain};

/// Permutation-count guard for the exhaustive identity check (5! = 120).
pub const IDENTITY_CHECK_MAX_M: u64 = 5;
/// Output-space guard for the exhaustive identity check.
pub const IDENTITY_CHECK_MAX_OUTPUTS: f64 = 1e4;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("packing (M={pm}, K={pk}, T={pt}) does not match code parameters (M={cm}, K={ck}, T={ct})")]
    PackingMismatch {
        pm: u64,
        pk: u64,
        pt: u64,
        cm: u64,
        ck: u64,
        ct: u64,
    },
    #[error("permutation must be a bijection on [1..{m}], got {got:?}")]
    InvalidPermutation { m: u64, got: Vec<u64> },
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("identity check needs M <= {max_m} and |Y|^n <= {max_outputs:.0}, got M={m}, |Y|^n={outputs:.0}")]
    IdentityGuard {
        m: u64,
        outputs: f64,
        max_m: u64,
        max_outputs: f64,
    },
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// One Monte Carlo run: counts for the error events and the resulting
/// estimate with its 95% confidence half-width.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimReport {
    pub params: CodeParams,
    pub trials: u64,
    /// Trials whose sender set no list covered.
    pub enc_errors: u64,
    /// Trials where ML decoding picked a different inner message.
    pub dec_errors: u64,
    /// Trials that ended with list overlap below T (the LED error event;
    /// includes every encoding failure).
    pub led_errors: u64,
    pub lambda_hat: f64,
    pub ci95_halfwidth: f64,
    pub seed: u64,
}

impl SimReport {
    /// CSV column order used by every simulation emitter.
    pub const CSV_HEADER: &'static str =
        "n,M,K,L,T,trials,enc_errors,dec_errors,led_errors,lambda_hat,ci95_halfwidth,seed";

    pub fn to_csv_row(&self) -> String {
        let p = &self.params;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            p.n,
            p.m,
            p.k,
            p.l,
            p.t,
            self.trials,
            self.enc_errors,
            self.dec_errors,
            self.led_errors,
            self.lambda_hat,
            self.ci95_halfwidth,
            self.seed
        )
    }
}

/// Estimates the average error probability: each trial draws a sender set
/// uniformly, encodes, transmits, decodes, and scores an error when the
/// decoded list meets the sender set in fewer than T messages. Encoding
/// failures score an error outright.
pub fn run_monte_carlo(
    code: &LedCode,
    ch: &ChannelModel,
    trials: u64,
    seed: u64,
) -> Result<SimReport, SimError> {
    if trials == 0 {
        return Err(SimError::NoTrials);
    }
    let p = code.params;
    let (enc_errors, dec_errors, led_errors) = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream::substream(seed, domain::TRIAL, trial);
            let lam = MessageSet::sample_uniform(p.m, p.k, &mut rng);
            match led_encode(code, &lam) {
                EncodeOutcome::Failure => (1u64, 0u64, 1u64),
                EncodeOutcome::Index(i) => {
                    let y = ch
                        .transmit(&code.inner.codewords[i], &mut rng)
                        .expect("codeword symbols lie in the channel alphabet");
                    let j = led_decode_index(code, ch, &y);
                    let dec = u64::from(j != i);
                    let led =
                        u64::from((code.list_table[j].intersection_size(&lam) as u64) < p.t);
                    (0, dec, led)
                }
            }
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));

    let lambda_hat = led_errors as f64 / trials as f64;
    let ci95_halfwidth = 1.96 * (lambda_hat * (1.0 - lambda_hat) / trials as f64).sqrt();
    Ok(SimReport {
        params: p,
        trials,
        enc_errors,
        dec_errors,
        led_errors,
        lambda_hat,
        ci95_halfwidth,
        seed,
    })
}

/// An LD (K = 1) code built from an LED code: message i is transmitted as
/// the LED encoding of the permuted packing set, and the receiver lists
/// every packing index whose permuted set meets the decoded list in at
/// least T messages.
#[derive(Clone, Debug)]
pub struct LdReduction {
    pub base: LedCode,
    pub packing: Packing,
    /// 1-based permutation table; `permutation[i-1]` is the image of id i.
    pub permutation: Vec<u64>,
    pub ld_message_count: u64,
    /// Fixed decoded list size C(L, T); shorter raw lists are padded.
    pub ld_list_size: u64,
    mapped_sets: Vec<MessageSet>,
}

/// Wires an LED code, a packing with matching (M, K, T), and a relabeling
/// permutation into an LD code.
pub fn build_ld_reduction(
    code: &LedCode,
    packing: &Packing,
    psi: &[u64],
) -> Result<LdReduction, SimError> {
    let p = code.params;
    if (packing.m, packing.k, packing.t) != (p.m, p.k, p.t) {
        return Err(SimError::PackingMismatch {
            pm: packing.m,
            pk: packing.k,
            pt: packing.t,
            cm: p.m,
            ck: p.k,
            ct: p.t,
        });
    }
    let mut sorted: Vec<u64> = psi.to_vec();
    sorted.sort_unstable();
    if sorted != (1..=p.m).collect::<Vec<u64>>() {
        return Err(SimError::InvalidPermutation {
            m: p.m,
            got: psi.to_vec(),
        });
    }
    let mapped_sets = packing.sets.iter().map(|s| s.map_through(psi)).collect();
    let ld_list_size = binomial_u128(p.l, p.t)
        .map(|c| u64::try_from(c).unwrap_or(u64::MAX))
        .unwrap_or(u64::MAX);
    Ok(LdReduction {
        base: code.clone(),
        packing: packing.clone(),
        permutation: psi.to_vec(),
        ld_message_count: packing.len() as u64,
        ld_list_size,
        mapped_sets,
    })
}

impl LdReduction {
    /// Encodes LD message i (1-based) as the LED encoding of the permuted
    /// packing set.
    pub fn ld_encode(&self, i: u64) -> EncodeOutcome {
        led_encode(&self.base, &self.mapped_sets[(i - 1) as usize])
    }

    /// The raw decoded list: every LD message whose permuted packing set
    /// meets the decoded LED list in at least T messages. The pairwise
    /// intersection property caps its size at C(L, T).
    pub fn ld_decode_raw(&self, ch: &ChannelModel, y: &[u16]) -> Vec<u64> {
        let decoded = led_decode(&self.base, ch, y);
        self.mapped_sets
            .iter()
            .enumerate()
            .filter(|(_, s)| (s.intersection_size(decoded) as u64) >= self.base.params.t)
            .map(|(idx, _)| idx as u64 + 1)
            .collect()
    }

    /// The raw list padded with the smallest unused LD messages up to the
    /// fixed size C(L, T) (capped at the message count). Padding keeps the
    /// output size constant; error accounting uses the raw list.
    pub fn ld_decode(&self, ch: &ChannelModel, y: &[u16]) -> Vec<u64> {
        let mut list = self.ld_decode_raw(ch, y);
        let target = self.ld_list_size.min(self.ld_message_count) as usize;
        let mut next = 1u64;
        while list.len() < target {
            if !list.contains(&next) {
                list.push(next);
            }
            next += 1;
        }
        list.sort_unstable();
        list
    }

    /// Exact LD error probability for this permutation, uniform over the
    /// LD messages: message i errs on the outputs whose raw decoded list
    /// misses i, plus outright on encoding failure. Enumerates the whole
    /// output space, so it is gated like the identity check.
    pub fn lambda_ld_exact(&self, ch: &ChannelModel) -> Result<f64, SimError> {
        let n = self.base.params.n as usize;
        let output_count = (ch.output_size() as f64).powi(n as i32);
        if output_count > IDENTITY_CHECK_MAX_OUTPUTS {
            return Err(SimError::IdentityGuard {
                m: self.base.params.m,
                outputs: output_count,
                max_m: IDENTITY_CHECK_MAX_M,
                max_outputs: IDENTITY_CHECK_MAX_OUTPUTS,
            });
        }
        let outputs = all_words(ch.output_size(), n);
        let raw_lists: Vec<Vec<u64>> = outputs
            .iter()
            .map(|y| self.ld_decode_raw(ch, y))
            .collect();
        let mut err_sum = 0.0;
        for i in 1..=self.ld_message_count {
            match self.ld_encode(i) {
                EncodeOutcome::Failure => err_sum += 1.0,
                EncodeOutcome::Index(cw) => {
                    let u = &self.base.inner.codewords[cw];
                    for (y, raw) in outputs.iter().zip(&raw_lists) {
                        if !raw.contains(&i) {
                            err_sum += ch.likelihood(u, y).map_err(SimError::Channel)?;
                        }
                    }
                }
            }
        }
        Ok(err_sum / self.ld_message_count as f64)
    }
}

/// Result of the exhaustive permutation-averaged identity check.
#[derive(Clone, Copy, Debug)]
pub struct ReductionIdentityReport {
    /// Mean exact LD error probability over all M! permutations.
    pub mean_lambda_ld: f64,
    /// Exact average LED error probability of the base code.
    pub lambda_avg: f64,
    pub abs_diff: f64,
}

/// Averages the exact LD error probability over every permutation of
/// [1..M] and compares it with the exact LED average: relabeling uniformly
/// at random turns each packing set into a uniform K-subset, so the two
/// means agree exactly.
pub fn reduction_identity_check(
    code: &LedCode,
    packing: &Packing,
    ch: &ChannelModel,
) -> Result<ReductionIdentityReport, SimError> {
    let p = code.params;
    let outputs = (ch.output_size() as f64).powi(p.n as i32);
    if p.m > IDENTITY_CHECK_MAX_M || outputs > IDENTITY_CHECK_MAX_OUTPUTS {
        return Err(SimError::IdentityGuard {
            m: p.m,
            outputs,
            max_m: IDENTITY_CHECK_MAX_M,
            max_outputs: IDENTITY_CHECK_MAX_OUTPUTS,
        });
    }

    let perms = permutations(p.m);
    // Parallel evaluation, sequential reduction: keeps the float sum in a
    // fixed order for bit-stable output.
    let lambdas: Vec<f64> = perms
        .par_iter()
        .map(|psi| {
            let red = build_ld_reduction(code, packing, psi)?;
            red.lambda_ld_exact(ch)
        })
        .collect::<Result<_, _>>()?;
    let mean_lambda_ld = lambdas.iter().sum::<f64>() / lambdas.len() as f64;
    let lambda_avg = evaluate_exact(code, ch)?.lambda_avg;
    Ok(ReductionIdentityReport {
        mean_lambda_ld,
        lambda_avg,
        abs_diff: (mean_lambda_ld - lambda_avg).abs(),
    })
}

/// All permutations of [1..m] in lexicographic order.
fn permutations(m: u64) -> Vec<Vec<u64>> {
    use itertools::Itertools;
    (1..=m).permutations(m as usize).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{build_led_code, InnerCode};
    use crate::packing::greedy_packing;

    fn params(m: u64, k: u64, l: u64, t: u64, n: u32) -> CodeParams {
        CodeParams::new(m, k, l, t, n).unwrap()
    }

    fn set(ids: &[u64]) -> MessageSet {
        MessageSet::new(ids.to_vec()).unwrap()
    }

    #[test]
    fn monte_carlo_zero_error_on_perfect_classical_code() {
        let clean = ChannelModel::bsc(0.0).unwrap();
        let code = LedCode {
            params: params(4, 1, 1, 1, 2),
            list_table: vec![set(&[1]), set(&[2]), set(&[3]), set(&[4])],
            inner: InnerCode {
                codewords: vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]],
                input_distribution: vec![0.5, 0.5],
            },
            heavy_list_duplication: false,
        };
        let report = run_monte_carlo(&code, &clean, 2_000, 5).unwrap();
        assert_eq!(report.led_errors, 0);
        assert_eq!(report.lambda_hat, 0.0);
        assert_eq!(report.ci95_halfwidth, 0.0);
    }

    #[test]
    fn monte_carlo_is_a_pure_function_of_its_inputs() {
        let ch = ChannelModel::bsc(0.1).unwrap();
        let p = params(6, 2, 3, 1, 4);
        let code = build_led_code(&p, 0.4, &ch, 7).unwrap();
        let a = run_monte_carlo(&code, &ch, 4_000, 13).unwrap();
        let b = run_monte_carlo(&code, &ch, 4_000, 13).unwrap();
        assert_eq!(a, b);

        // Same computation pinned to different worker counts.
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| run_monte_carlo(&code, &ch, 4_000, 13).unwrap());
        let eight = rayon::ThreadPoolBuilder::new()
            .num_threads(8)
            .build()
            .unwrap()
            .install(|| run_monte_carlo(&code, &ch, 4_000, 13).unwrap());
        assert_eq!(single, eight);
        assert_eq!(a, single);

        assert!(matches!(
            run_monte_carlo(&code, &ch, 0, 13),
            Err(SimError::NoTrials)
        ));
    }

    #[test]
    fn monte_carlo_tracks_exact_average() {
        let ch = ChannelModel::bsc(0.1).unwrap();
        let p = params(6, 2, 3, 1, 3);
        let code = build_led_code(&p, 0.5, &ch, 3).unwrap();
        let exact = evaluate_exact(&code, &ch).unwrap().lambda_avg;
        let report = run_monte_carlo(&code, &ch, 20_000, 99).unwrap();
        assert!(
            (report.lambda_hat - exact).abs() <= 3.0 * report.ci95_halfwidth.max(1e-3),
            "estimate {} too far from exact {}",
            report.lambda_hat,
            exact
        );
        assert_eq!(report.led_errors as f64 / report.trials as f64, report.lambda_hat);
    }

    #[test]
    fn csv_row_shape() {
        let report = SimReport {
            params: params(6, 2, 3, 1, 4),
            trials: 10,
            enc_errors: 1,
            dec_errors: 2,
            led_errors: 3,
            lambda_hat: 0.3,
            ci95_halfwidth: 0.05,
            seed: 42,
        };
        assert_eq!(
            SimReport::CSV_HEADER.split(',').count(),
            report.to_csv_row().split(',').count()
        );
        assert_eq!(report.to_csv_row(), "4,6,2,3,1,10,1,2,3,0.3,0.05,42");
    }

    fn reduction_fixture() -> (LedCode, Packing, ChannelModel) {
        let ch = ChannelModel::bsc(0.1).unwrap();
        let p = params(4, 2, 2, 1, 2);
        let code = build_led_code(&p, 0.6, &ch, 17).unwrap();
        let packing = greedy_packing(4, 2, 1, 0).unwrap();
        (code, packing, ch)
    }

    #[test]
    fn reduction_validates_inputs() {
        let (code, packing, _ch) = reduction_fixture();
        assert!(build_ld_reduction(&code, &packing, &[1, 2, 3, 4]).is_ok());
        assert!(matches!(
            build_ld_reduction(&code, &packing, &[1, 2, 3]),
            Err(SimError::InvalidPermutation { .. })
        ));
        assert!(matches!(
            build_ld_reduction(&code, &packing, &[1, 2, 2, 4]),
            Err(SimError::InvalidPermutation { .. })
        ));

        let other = greedy_packing(5, 2, 1, 0).unwrap();
        assert!(matches!(
            build_ld_reduction(&code, &other, &[1, 2, 3, 4]),
            Err(SimError::PackingMismatch { .. })
        ));
    }

    #[test]
    fn identity_permutation_reproduces_per_set_errors() {
        let (code, packing, ch) = reduction_fixture();
        let psi: Vec<u64> = (1..=4).collect();
        let red = build_ld_reduction(&code, &packing, &psi).unwrap();
        let exact = evaluate_exact(&code, &ch).unwrap();

        // With psi = id, LD message i is exactly the packing set, so the
        // LD mean equals the mean of those sets' LED error probabilities.
        let expected: f64 = packing
            .sets
            .iter()
            .map(|s| exact.lambda_per_set[s])
            .sum::<f64>()
            / packing.len() as f64;
        let got = red.lambda_ld_exact(&ch).unwrap();
        assert!((got - expected).abs() <= 1e-12);
    }

    #[test]
    fn decoded_list_is_padded_to_fixed_size() {
        let (code, packing, ch) = reduction_fixture();
        let red = build_ld_reduction(&code, &packing, &[2, 4, 1, 3]).unwrap();
        assert_eq!(red.ld_list_size, 2); // C(2,1)
        for y in all_words(2, 2) {
            let raw = red.ld_decode_raw(&ch, &y);
            assert!(raw.len() as u64 <= red.ld_list_size);
            let padded = red.ld_decode(&ch, &y);
            assert_eq!(padded.len() as u64, red.ld_list_size);
            // Raw members survive padding.
            assert!(raw.iter().all(|i| padded.contains(i)));
            // Sorted and distinct.
            assert!(padded.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn identity_check_small_instance() {
        let (code, packing, ch) = reduction_fixture();
        let report = reduction_identity_check(&code, &packing, &ch).unwrap();
        assert!(
            report.abs_diff <= 1e-12,
            "permutation mean {} != exact average {}",
            report.mean_lambda_ld,
            report.lambda_avg
        );
    }

    #[test]
    fn identity_check_with_overlap_threshold_two_and_ternary_output() {
        let ch = ChannelModel::bec(0.3).unwrap();
        let p = params(4, 2, 2, 2, 2);
        let code = build_led_code(&p, 0.7, &ch, 31).unwrap();
        // T = 2 admits every pair of distinct 2-subsets.
        let packing = greedy_packing(4, 2, 2, 1).unwrap();
        assert_eq!(packing.len(), 6);
        let report = reduction_identity_check(&code, &packing, &ch).unwrap();
        assert!(
            report.abs_diff <= 1e-12,
            "permutation mean {} != exact average {}",
            report.mean_lambda_ld,
            report.lambda_avg
        );
    }

    #[test]
    fn identity_check_zero_error_when_clean_and_covered() {
        let clean = ChannelModel::bsc(0.0).unwrap();
        let p = params(4, 2, 2, 1, 3);
        // Large enough table to cover every pair.
        let code = build_led_code(&p, 1.0, &clean, 23).unwrap();
        let exact = evaluate_exact(&code, &clean).unwrap();
        assert_eq!(exact.p_enc_err, 0.0, "fixture needs full coverage");
        let packing = greedy_packing(4, 2, 1, 0).unwrap();
        let report = reduction_identity_check(&code, &packing, &clean).unwrap();
        assert_eq!(report.mean_lambda_ld, 0.0);
        assert_eq!(report.lambda_avg, 0.0);
    }

    #[test]
    fn identity_guard_fires() {
        let ch = ChannelModel::bsc(0.1).unwrap();
        let p = params(6, 2, 2, 1, 2);
        let code = build_led_code(&p, 0.5, &ch, 1).unwrap();
        let packing = greedy_packing(6, 2, 1, 0).unwrap();
        assert!(matches!(
            reduction_identity_check(&code, &packing, &ch),
            Err(SimError::IdentityGuard { .. })
        ));
    }
}
