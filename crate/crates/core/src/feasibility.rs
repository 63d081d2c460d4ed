//! Finite-n feasibility statistics, the rate/gap calculus for exponential
//! parameter schedules, and the asymptotic classifier.
//!
//! The sufficient statistic is the per-use log threshold that the channel
//! capacity must exceed for the random construction to work; the necessary
//! statistic is the per-use log threshold that any feasible family must keep
//! at or below capacity. Both are reported in nats per channel use so they
//! compare directly against [`crate::channel::ChannelModel::capacity`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::{log_binomial, HypergeomParams, LogValue};

#[derive(Debug, Error, PartialEq)]
pub enum FeasibilityError {
    #[error("code parameters need M,K,L,T,n >= 1, K <= M, L <= M and T <= min(K,L); got M={m}, K={k}, L={l}, T={t}, n={n}")]
    InvalidCodeParams { m: u64, k: u64, l: u64, t: u64, n: u32 },
    #[error("growth law needs a finite prefactor c >= 1 and a finite rate rho >= 0, got c={c}, rho={rho}")]
    InvalidGrowthLaw { c: f64, rho: f64 },
    #[error("rate and gap need a bounded threshold schedule (rho_T = 0), got rho_T={rho_t}")]
    DivergentThreshold { rho_t: f64 },
    #[error("the classifier needs K and L dominated by M (rho_K, rho_L <= rho_M); got rho_M={rho_m}, rho_K={rho_k}, rho_L={rho_l}")]
    ListGrowthExceedsUniverse { rho_m: f64, rho_k: f64, rho_l: f64 },
    #[error("capacity must be finite and non-negative, got {0}")]
    InvalidCapacity(f64),
}

/// The five-parameter tuple of a list encoding/decoding code: message
/// universe M, sender set size K, receiver list size L, overlap threshold
/// T, and block length n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CodeParams {
    pub m: u64,
    pub k: u64,
    pub l: u64,
    pub t: u64,
    pub n: u32,
}

impl CodeParams {
    pub fn new(m: u64, k: u64, l: u64, t: u64, n: u32) -> Result<Self, FeasibilityError> {
        let ok = m >= 1
            && (1..=m).contains(&k)
            && (1..=m).contains(&l)
            && (1..=k.min(l)).contains(&t)
            && n >= 1;
        if !ok {
            return Err(FeasibilityError::InvalidCodeParams { m, k, l, t, n });
        }
        Ok(CodeParams { m, k, l, t, n })
    }

    pub(crate) fn overlap_law(&self) -> HypergeomParams {
        HypergeomParams::new(self.m, self.k, self.l).expect("CodeParams imply valid overlap law")
    }

    /// Overlap law of a random K-subset against a fixed K-subset, the
    /// sphere that drives the converse-side counting.
    pub(crate) fn self_overlap_law(&self) -> HypergeomParams {
        HypergeomParams::new(self.m, self.k, self.k).expect("CodeParams imply valid overlap law")
    }
}

/// `(1/n) ln [ C(M,L) / sum_{i=T}^{min(K,L)} C(K,i) C(M-K,L-i) ]` in nats
/// per channel use: feasibility is guaranteed when this stays below
/// capacity.
pub fn sufficient_statistic(p: &CodeParams) -> LogValue {
    LogValue::from_ln(-p.overlap_law().tail_log(p.t).ln() / p.n as f64)
}

/// The converse-side statistics; any feasible family keeps them at or
/// below capacity.
#[derive(Clone, Copy, Debug)]
pub struct NecessaryStatistic {
    /// `(1/n) ln [ (C(M,K)/C(L,T)) / sum_{i=T}^{K} C(K,i) C(M-K,K-i) ]`.
    pub general: LogValue,
    /// The tighter `(1/n) ln (M/(KL))`, defined only for T = 1.
    pub t1: Option<LogValue>,
}

pub fn necessary_statistic(p: &CodeParams) -> NecessaryStatistic {
    // The packing-sphere sum equals C(M,K) times the self-overlap tail, so
    // the C(M,K) factors cancel.
    let w_tail = p.self_overlap_law().tail_log(p.t).ln();
    let general = (-log_binomial(p.l, p.t as i64).ln() - w_tail) / p.n as f64;
    let t1 = (p.t == 1).then(|| {
        let ln_ratio = (p.m as f64).ln() - (p.k as f64).ln() - (p.l as f64).ln();
        LogValue::from_ln(ln_ratio / p.n as f64)
    });
    NecessaryStatistic {
        general: LogValue::from_ln(general),
        t1,
    }
}

/// One parameter's growth law `value(n) = max(1, round(c * e^(rho * n)))`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct GrowthLaw {
    pub c: f64,
    pub rho: f64,
}

impl GrowthLaw {
    pub fn new(c: f64, rho: f64) -> Result<Self, FeasibilityError> {
        if !(c.is_finite() && c >= 1.0 && rho.is_finite() && rho >= 0.0) {
            return Err(FeasibilityError::InvalidGrowthLaw { c, rho });
        }
        Ok(GrowthLaw { c, rho })
    }

    /// Constant law `value(n) = c0`.
    pub fn constant(c0: u64) -> Self {
        GrowthLaw {
            c: c0.max(1) as f64,
            rho: 0.0,
        }
    }

    /// Round-half-up value at block length n, saturating at `u64::MAX`.
    pub fn value_at(&self, n: u32) -> u64 {
        let raw = self.c * (self.rho * n as f64).exp();
        if raw >= u64::MAX as f64 {
            u64::MAX
        } else {
            (raw.round() as u64).max(1)
        }
    }
}

/// Per-parameter growth laws `n -> (M, K, L, T)`.
///
/// Serialized as `{"M":{"c":1,"rho":0.5},"K":...,"L":...,"T":...}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ParameterSchedule {
    #[serde(rename = "M")]
    pub m: GrowthLaw,
    #[serde(rename = "K")]
    pub k: GrowthLaw,
    #[serde(rename = "L")]
    pub l: GrowthLaw,
    #[serde(rename = "T")]
    pub t: GrowthLaw,
}

impl ParameterSchedule {
    pub fn new(
        m: GrowthLaw,
        k: GrowthLaw,
        l: GrowthLaw,
        t: GrowthLaw,
    ) -> Result<Self, FeasibilityError> {
        for law in [m, k, l, t] {
            GrowthLaw::new(law.c, law.rho)?;
        }
        Ok(ParameterSchedule { m, k, l, t })
    }

    /// Validates a deserialized schedule (serde bypasses the constructors).
    pub fn validate(&self) -> Result<(), FeasibilityError> {
        Self::new(self.m, self.k, self.l, self.t).map(|_| ())
    }

    fn constant_threshold(&self) -> Result<u64, FeasibilityError> {
        if self.t.rho > 0.0 {
            return Err(FeasibilityError::DivergentThreshold { rho_t: self.t.rho });
        }
        Ok(self.t.value_at(0))
    }
}

/// Evaluated schedule point plus whether any value had to be clamped to
/// keep the code-parameter constraints.
#[derive(Clone, Copy, Debug)]
pub struct SchedulePoint {
    pub params: CodeParams,
    pub clamped: bool,
}

/// Instantiates `(M, K, L, T)` at block length n. K and L are clamped to
/// M and T to min(K, L); the flag reports whether clamping fired.
pub fn evaluate_schedule_at_n(
    s: &ParameterSchedule,
    n: u32,
) -> Result<SchedulePoint, FeasibilityError> {
    s.validate()?;
    let m = s.m.value_at(n);
    let (raw_k, raw_l, raw_t) = (s.k.value_at(n), s.l.value_at(n), s.t.value_at(n));
    let k = raw_k.min(m);
    let l = raw_l.min(m);
    let t = raw_t.min(k.min(l));
    let clamped = (k, l, t) != (raw_k, raw_l, raw_t);
    Ok(SchedulePoint {
        params: CodeParams::new(m, k, l, t, n.max(1))?,
        clamped,
    })
}

/// Asymptotic rate `lim (T/n) ln(MT/(KL))` in nats; negative when the list
/// sizes outgrow the universe. Requires a bounded threshold (rho_T = 0).
pub fn rate(s: &ParameterSchedule) -> Result<f64, FeasibilityError> {
    s.validate()?;
    let t0 = s.constant_threshold()?;
    Ok(t0 as f64 * (s.m.rho - s.k.rho - s.l.rho))
}

/// Asymptotic gap: 0 for T = 1, otherwise `lim (T/n) ln(K/T)` = T0 * rho_K.
pub fn gap(s: &ParameterSchedule) -> Result<f64, FeasibilityError> {
    s.validate()?;
    let t0 = s.constant_threshold()?;
    if t0 == 1 {
        Ok(0.0)
    } else {
        Ok(t0 as f64 * s.k.rho)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Feasible,
    Infeasible,
    Undetermined,
}

/// Rate, gap, and the classifier verdict for a schedule against a channel
/// of capacity `c` nats.
#[derive(Clone, Copy, Debug)]
pub struct AsymptoticProfile {
    pub rate: f64,
    pub gap: f64,
    pub verdict: Verdict,
}

/// Classifies a schedule: feasible families exist whenever rate < C (with
/// 0 < C), no feasible family exists when rate - gap > C, and the boundary
/// cases stay undetermined. Requires the regime the classifier is proven
/// in: K and L not outgrowing M.
pub fn classify(s: &ParameterSchedule, c: f64) -> Result<AsymptoticProfile, FeasibilityError> {
    if !c.is_finite() || c < 0.0 {
        return Err(FeasibilityError::InvalidCapacity(c));
    }
    if s.k.rho > s.m.rho || s.l.rho > s.m.rho {
        return Err(FeasibilityError::ListGrowthExceedsUniverse {
            rho_m: s.m.rho,
            rho_k: s.k.rho,
            rho_l: s.l.rho,
        });
    }
    let rate = rate(s)?;
    let gap = gap(s)?;
    let verdict = if rate < c && c > 0.0 {
        Verdict::Feasible
    } else if rate - gap > c {
        Verdict::Infeasible
    } else {
        Verdict::Undetermined
    };
    Ok(AsymptoticProfile { rate, gap, verdict })
}
