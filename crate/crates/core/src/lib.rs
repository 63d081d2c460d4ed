//! List encoding/decoding (LED) codes over noisy discrete memoryless
//! channels.
//!
//! A transmitter picks K of M messages and sends one codeword; the
//! receiver answers with an L-message list, and the exchange succeeds when
//! the two sets share at least T messages. This crate implements the
//! machinery for studying when such families of codes can be made
//! asymptotically error-free:
//!
//! - [`combinatorics`]: log-domain binomials, the hypergeometric overlap
//!   law and its tails, term-ratio profiles, and a closed-form asymptotic
//!   approximation.
//! - [`channel`]: BSC/BEC/generic DMC models, sampling, likelihoods, and
//!   Shannon capacity in nats (closed forms plus Blahut-Arimoto).
//! - [`feasibility`]: the finite-n sufficient/necessary statistics, the
//!   rate/gap calculus for exponential parameter schedules, and the
//!   asymptotic classifier.
//! - [`packing`]: families of K-subsets with bounded pairwise overlap,
//!   the Gilbert bound, and greedy/optimal constructions.
//! - [`codes`]: the random LED code construction with ML inner decoding
//!   and exact desk-scale evaluation.
//! - [`sim`]: seeded Monte Carlo estimation, the LED-to-LD reduction, and
//!   the exhaustive permutation-averaged identity check.
//! - [`stream`]: counter-based random stream derivation, so simulations
//!   are reproducible independent of worker count.
//!
//! # Example
//!
//! ```
//! use led_core::channel::ChannelModel;
//! use led_core::codes::build_led_code;
//! use led_core::feasibility::{sufficient_statistic, CodeParams};
//! use led_core::sim::run_monte_carlo;
//!
//! let ch = ChannelModel::bsc(0.05)?;
//! let capacity = ch.capacity(1e-9)?.nats;
//!
//! // 6 messages, sender picks 2, receiver lists 3, success on overlap >= 1.
//! let params = CodeParams::new(6, 2, 3, 1, 8)?;
//! assert!(sufficient_statistic(&params).ln() < capacity);
//!
//! let code = build_led_code(&params, 0.4, &ch, 42)?;
//! let report = run_monte_carlo(&code, &ch, 10_000, 7)?;
//! assert!(report.lambda_hat < 0.1);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod channel;
pub mod codes;
pub mod combinatorics;
pub mod feasibility;
pub mod packing;
pub mod sim;
pub mod stream;

pub use channel::{
    build_channel, CapacityMethod, CapacityResult, ChannelError, ChannelKind, ChannelModel,
    ChannelSpec,
};
pub use codes::{
    build_led_code, evaluate_exact, led_decode, led_encode, CodeError, EncodeOutcome,
    ExactEvaluation, InnerCode, LedCode,
};
pub use combinatorics::{
    log_binomial, stirling_log_binomial, CombinatoricsError, HypergeomParams, LogValue,
    ProfileShape, LogTermApprox, RatioProfile,
};
pub use feasibility::{
    classify, evaluate_schedule_at_n, gap, necessary_statistic, rate, sufficient_statistic,
    AsymptoticProfile, CodeParams, FeasibilityError, GrowthLaw, NecessaryStatistic,
    ParameterSchedule, SchedulePoint, Verdict,
};
pub use packing::{
    gilbert_bound, greedy_packing, optimal_packing_size, verify_packing, GilbertBound, MessageSet,
    Packing, PackingError,
};
pub use sim::{
    build_ld_reduction, reduction_identity_check, run_monte_carlo, LdReduction,
    ReductionIdentityReport, SimError, SimReport,
};
