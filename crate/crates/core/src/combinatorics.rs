//! Exact and asymptotic log-domain combinatorics.
//!
//! Everything downstream (feasibility statistics, Gilbert bounds, encoder
//! coverage) reduces to binomial coefficients far too large for integer or
//! floating-point linear arithmetic, so this module works in the natural-log
//! domain throughout: [`LogValue`] wraps `ln x` with `-inf` encoding zero,
//! [`log_binomial`] is the exact backbone, and [`HypergeomParams`] bundles
//! the overlap distribution of a random L-subset against a fixed K-subset
//! of an M-element universe (terms, tails, ratio profile, and a closed-form
//! asymptotic approximation).

use std::iter::Sum;
use std::ops::{Add, Div, Mul};
use std::sync::LazyLock;

use thiserror::Error;

pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

#[derive(Debug, Error, PartialEq)]
pub enum CombinatoricsError {
    #[error("hypergeometric parameters need 1 <= K <= M and 1 <= L <= M, got M={m}, K={k}, L={l}")]
    InvalidHypergeomParams { m: u64, k: u64, l: u64 },
    #[error("stirling_log_binomial needs 0 < B < A, got A={a}, B={b}")]
    StirlingDomain { a: u64, b: u64 },
    #[error("series approximation needs 0 < j < K, j < L and K+L-j < M, got j={j} for M={m}, K={k}, L={l}")]
    SeriesDomain { m: u64, k: u64, l: u64, j: u64 },
    #[error("series truncation depth k_max must be at least 1")]
    ZeroTruncationDepth,
}

// ---------------------------------------------------------------------------
// LogValue
// ---------------------------------------------------------------------------

/// The natural logarithm of a non-negative quantity; `-inf` encodes zero.
///
/// `+` adds in the linear domain (log-sum-exp), `*` and `/` multiply and
/// divide (add and subtract logs). Summing an iterator uses a running-max
/// log-sum-exp, so probabilities that individually underflow `f64` still
/// combine without overflow.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogValue(f64);

impl LogValue {
    /// Linear 0.
    pub const ZERO: LogValue = LogValue(f64::NEG_INFINITY);
    /// Linear 1.
    pub const ONE: LogValue = LogValue(0.0);

    pub fn from_ln(ln: f64) -> Self {
        debug_assert!(!ln.is_nan(), "LogValue cannot hold NaN");
        LogValue(ln)
    }

    /// Log of a linear-domain value. Panics on negative input.
    pub fn from_linear(x: f64) -> Self {
        assert!(x >= 0.0, "LogValue::from_linear needs x >= 0, got {x}");
        LogValue(x.ln())
    }

    /// The stored logarithm.
    pub fn ln(self) -> f64 {
        self.0
    }

    /// Back to the linear domain (may overflow to `inf` for large logs).
    pub fn linear(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

impl Add for LogValue {
    type Output = LogValue;

    /// Linear-domain addition via log-sum-exp.
    fn add(self, rhs: LogValue) -> LogValue {
        let (hi, lo) = if self.0 >= rhs.0 {
            (self.0, rhs.0)
        } else {
            (rhs.0, self.0)
        };
        if hi == f64::NEG_INFINITY {
            return LogValue::ZERO;
        }
        LogValue(hi + (lo - hi).exp().ln_1p())
    }
}

impl Mul for LogValue {
    type Output = LogValue;

    fn mul(self, rhs: LogValue) -> LogValue {
        if self.is_zero() || rhs.is_zero() {
            return LogValue::ZERO;
        }
        LogValue(self.0 + rhs.0)
    }
}

impl Div for LogValue {
    type Output = LogValue;

    /// Linear-domain division. Dividing by zero is a caller bug.
    fn div(self, rhs: LogValue) -> LogValue {
        assert!(!rhs.is_zero(), "LogValue division by zero");
        LogValue(self.0 - rhs.0)
    }
}

impl Sum for LogValue {
    fn sum<I: Iterator<Item = LogValue>>(iter: I) -> LogValue {
        // Running-max log-sum-exp: rescale the accumulator whenever a new
        // maximum appears.
        let mut max = f64::NEG_INFINITY;
        let mut scaled = 0.0_f64;
        for v in iter {
            if v.0 == f64::NEG_INFINITY {
                continue;
            }
            if v.0 > max {
                scaled = scaled * (max - v.0).exp() + 1.0;
                max = v.0;
            } else {
                scaled += (v.0 - max).exp();
            }
        }
        if max == f64::NEG_INFINITY {
            LogValue::ZERO
        } else {
            LogValue(max + scaled.ln())
        }
    }
}

// ---------------------------------------------------------------------------
// Exact log factorials and binomials
// ---------------------------------------------------------------------------

const LN_FACT_TABLE_LEN: usize = 1025;

/// ln(k!) for k < 1025, built by compensated summation of ln k.
static LN_FACT: LazyLock<Vec<f64>> = LazyLock::new(|| {
    let mut table = vec![0.0_f64; LN_FACT_TABLE_LEN];
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for (k, slot) in table.iter_mut().enumerate().skip(1) {
        let term = (k as f64).ln() - comp;
        let next = sum + term;
        comp = (next - sum) - term;
        sum = next;
        *slot = sum;
    }
    table
});

/// Stirling-series log gamma; accurate to well below 1e-15 relative for
/// x > 1000, which is the only regime it is called in.
fn ln_gamma_stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + LN_SQRT_2PI
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// ln(a!), exact table below 1025, Stirling series above.
pub fn ln_factorial(a: u64) -> f64 {
    if (a as usize) < LN_FACT_TABLE_LEN {
        LN_FACT[a as usize]
    } else {
        ln_gamma_stirling(a as f64 + 1.0)
    }
}

/// ln C(A, B). Out-of-range coefficients (B < 0 or B > A) are zero, i.e.
/// `LogValue::ZERO`, so sums over binomial products stay total.
pub fn log_binomial(a: u64, b: i64) -> LogValue {
    if b < 0 {
        return LogValue::ZERO;
    }
    let b = b as u64;
    if b > a {
        return LogValue::ZERO;
    }
    if b == 0 || b == a {
        return LogValue::ONE;
    }
    LogValue(ln_factorial(a) - ln_factorial(b) - ln_factorial(a - b))
}

/// Exact C(a, b) in integer arithmetic; `None` when the value (or an
/// intermediate product) exceeds `u128`.
pub fn binomial_u128(a: u64, b: u64) -> Option<u128> {
    if b > a {
        return Some(0);
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 1..=b {
        acc = acc.checked_mul((a - b + i) as u128)? / i as u128;
    }
    Some(acc)
}

/// The two-sided Stirling envelope `A^(A+1/2) / (B^(B+1/2) (A-B)^(A-B+1/2))`
/// in log form, with no constant or `e^O(1/B)` correction. It overshoots the
/// exact coefficient by `ln sqrt(2*pi)` as all three arguments grow; exposed
/// for validating that growth, not as a substitute for [`log_binomial`].
pub fn stirling_log_binomial(a: u64, b: u64) -> Result<LogValue, CombinatoricsError> {
    if b == 0 || b >= a {
        return Err(CombinatoricsError::StirlingDomain { a, b });
    }
    let (af, bf, cf) = (a as f64, b as f64, (a - b) as f64);
    Ok(LogValue(
        (af + 0.5) * af.ln() - (bf + 0.5) * bf.ln() - (cf + 0.5) * cf.ln(),
    ))
}

// ---------------------------------------------------------------------------
// Hypergeometric overlap distribution
// ---------------------------------------------------------------------------

/// Parameters of the overlap distribution: a uniform random L-subset of an
/// M-element universe meets a fixed K-subset in `j` elements with
/// probability `v_j = C(K,j) C(M-K,L-j) / C(M,L)`.
///
/// Swapping K and L leaves every `v_j` unchanged; the receiver-side and
/// transmitter-side overlap laws coincide.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HypergeomParams {
    m: u64,
    k: u64,
    l: u64,
}

/// Shape of the `v_j` sequence over its support.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileShape {
    Decreasing,
    Unimodal,
}

/// Consecutive-term ratios `a_j = v_(j+1) / v_j`, the shape they imply, and
/// the exact argmax of the sequence.
///
/// `ratios[j]` is `a_j` for `j = 0 .. min(K,L)`; below the support (where
/// `v_j = 0`) the ratio is `+inf` by convention, which keeps the sequence
/// non-increasing.
#[derive(Clone, Debug)]
pub struct RatioProfile {
    pub ratios: Vec<f64>,
    pub shape: ProfileShape,
    pub mode: u64,
}

/// Truncated asymptotic approximation of `ln v_j` and the correction series
/// value it used.
#[derive(Clone, Copy, Debug)]
pub struct LogTermApprox {
    pub approx: LogValue,
    /// The correction exponent; inspect its magnitude to judge whether the
    /// parameters sit inside the regime the series is meant for.
    pub delta: f64,
}

impl HypergeomParams {
    pub fn new(m: u64, k: u64, l: u64) -> Result<Self, CombinatoricsError> {
        if k == 0 || l == 0 || k > m || l > m {
            return Err(CombinatoricsError::InvalidHypergeomParams { m, k, l });
        }
        Ok(HypergeomParams { m, k, l })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn l(&self) -> u64 {
        self.l
    }

    /// Smallest overlap with positive probability: max(0, K+L-M).
    pub fn support_min(&self) -> u64 {
        (self.k + self.l).saturating_sub(self.m)
    }

    /// Largest overlap with positive probability: min(K, L).
    pub fn support_max(&self) -> u64 {
        self.k.min(self.l)
    }

    /// `ln v_j`; `ZERO` outside the support.
    pub fn log_term(&self, j: u64) -> LogValue {
        if j < self.support_min() || j > self.support_max() {
            return LogValue::ZERO;
        }
        log_binomial(self.k, j as i64) * log_binomial(self.m - self.k, (self.l - j) as i64)
            / log_binomial(self.m, self.l as i64)
    }

    /// `ln sum_{j=t}^{min(K,L)} v_j` by log-sum-exp. With `t = 0` this is
    /// the full (unit) sum, so the result is 0 up to rounding.
    pub fn tail_log(&self, t: u64) -> LogValue {
        let lo = t.max(self.support_min());
        let hi = self.support_max();
        if lo > hi {
            return LogValue::ZERO;
        }
        (lo..=hi).map(|j| self.log_term(j)).sum()
    }

    /// Consecutive-term ratios, shape, and exact argmax of `v_j`.
    ///
    /// The ratios are strictly decreasing on the support, so the argmax is
    /// the first index whose ratio drops to 1 or below. Intended for desk
    /// scale: the ratio vector has `min(K, L)` entries.
    pub fn ratio_profile(&self) -> RatioProfile {
        let s = self.support_max();
        let lo = self.support_min();
        let mut ratios = Vec::with_capacity(s as usize);
        let mut mode = s;
        for j in 0..s {
            let a_j = if j < lo {
                f64::INFINITY
            } else {
                let num = ((self.k - j) as f64) * ((self.l - j) as f64);
                let den = ((self.m + j + 1 - self.k - self.l) as f64) * ((j + 1) as f64);
                num / den
            };
            if mode == s && a_j <= 1.0 {
                mode = j;
            }
            ratios.push(a_j);
        }
        let shape = if ratios.first().is_some_and(|&a0| a0 <= 1.0) {
            ProfileShape::Decreasing
        } else {
            ProfileShape::Unimodal
        };
        RatioProfile { ratios, shape, mode }
    }

    /// Closed-form approximation of `ln v_j`:
    /// `v_j ~ (2*pi*j)^(-1/2) (KLe/(Mj))^j e^(-delta)`, with the Taylor
    /// correction series `delta` truncated after `k_max` terms.
    ///
    /// The envelope carries the full Stirling normalization (the constant
    /// and the first-order `1/12` corrections of each of the three
    /// coefficients), so the approximation tracks the exact log value, not
    /// just its growth rate. Defined where the series converges:
    /// `0 < j < K`, `j < L`, and `K + L - j < M`.
    pub fn approx_log_term(
        &self,
        j: u64,
        k_max: u32,
    ) -> Result<LogTermApprox, CombinatoricsError> {
        if k_max == 0 {
            return Err(CombinatoricsError::ZeroTruncationDepth);
        }
        let (m, k, l) = (self.m, self.k, self.l);
        if j == 0 || j >= k || j >= l || k + l - j >= m {
            return Err(CombinatoricsError::SeriesDomain { m, k, l, j });
        }
        let (mf, kf, lf, jf) = (m as f64, k as f64, l as f64, j as f64);

        // Correction series: each power ratio is < 1 inside the domain, so
        // the terms decay geometrically.
        let union = kf + lf - jf;
        let (ra, rb, rc) = (union / mf, kf / mf, lf / mf);
        let (rk, rl) = (jf / kf, jf / lf);
        let (mut pa, mut pb, mut pc, mut pk, mut pl) = (1.0, 1.0, 1.0, 1.0, 1.0);
        let mut delta = 0.0_f64;
        for i in 1..=k_max {
            pa *= ra;
            pb *= rb;
            pc *= rc;
            pk *= rk;
            pl *= rl;
            let numer = union * pa - kf * pb - lf * pc + jf * pk + jf * pl;
            delta += numer / ((i as f64) * (i as f64 + 1.0));
        }

        let lead = -0.5 * (2.0 * std::f64::consts::PI * jf).ln()
            + jf * (kf.ln() + lf.ln() + 1.0 - mf.ln() - jf.ln());
        let theta = |a: f64, b: f64| (1.0 / a - 1.0 / b - 1.0 / (a - b)) / 12.0;
        let corr = theta(kf, jf) + theta(mf - kf, lf - jf) - theta(mf, lf);

        Ok(LogTermApprox {
            approx: LogValue::from_ln(lead + corr - delta),
            delta,
        })
    }
}
