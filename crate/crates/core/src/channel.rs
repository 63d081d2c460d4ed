//! Discrete memoryless channels: construction, sampling, likelihoods, and
//! Shannon capacity in nats.
//!
//! BSC and BEC get closed-form capacities; arbitrary row-stochastic matrices
//! go through Blahut-Arimoto with the standard divergence bounds as the
//! termination test. All rates in this crate are nats per channel use.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::LogValue;

/// Row-sum slack accepted from channel description files.
pub const ROW_SUM_FILE_TOL: f64 = 1e-9;
/// Default Blahut-Arimoto termination gap.
pub const DEFAULT_CAPACITY_TOL: f64 = 1e-9;
/// Blahut-Arimoto iteration cap.
pub const CAPACITY_MAX_ITERATIONS: u32 = 100_000;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("{name} must lie in [0, 1], got {value}")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },
    #[error("transition matrix must be non-empty and rectangular")]
    MalformedMatrix,
    #[error("row {row} sums to {sum}, not 1")]
    NonStochasticRow { row: usize, sum: f64 },
    #[error("entry W({col}|{row}) = {value} is not a probability")]
    EntryOutOfRange { row: usize, col: usize, value: f64 },
    #[error("capacity tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error(
        "capacity iteration did not reach gap {tol:.3e} within {iterations} iterations \
         (best bounds give {nats} nats with gap {gap_bound:.3e})"
    )]
    CapacityNotConverged {
        nats: f64,
        gap_bound: f64,
        iterations: u32,
        tol: f64,
    },
    #[error("symbol {symbol} at position {pos} exceeds alphabet size {size}")]
    SymbolOutOfRange {
        pos: usize,
        symbol: u16,
        size: usize,
    },
    #[error("input word has length {x_len} but output word has length {y_len}")]
    LengthMismatch { x_len: usize, y_len: usize },
}

/// On-disk channel description.
///
/// ```json
/// {"type":"bsc","p":0.05}
/// {"type":"bec","epsilon":0.3}
/// {"type":"dmc","matrix":[[0.9,0.1],[0.2,0.8]]}
/// ```
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ChannelSpec {
    Bsc { p: f64 },
    Bec { epsilon: f64 },
    Dmc { matrix: Vec<Vec<f64>> },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ChannelKind {
    Bsc(f64),
    Bec(f64),
    GenericDmc,
}

/// How a capacity value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CapacityMethod {
    ClosedForm,
    BlahutArimoto,
}

#[derive(Clone, Copy, Debug)]
pub struct CapacityResult {
    /// Capacity in nats per channel use.
    pub nats: f64,
    pub method: CapacityMethod,
    pub iterations: u32,
    /// Difference between the upper and lower capacity bounds at
    /// termination (0 for closed forms).
    pub gap_bound: f64,
}

impl CapacityResult {
    pub fn bits(&self) -> f64 {
        self.nats / std::f64::consts::LN_2
    }
}

/// An immutable discrete memoryless channel: alphabets plus a
/// row-stochastic transition matrix `W(y|x)`.
#[derive(Clone, Debug)]
pub struct ChannelModel {
    kind: ChannelKind,
    matrix: Vec<Vec<f64>>,
    ln_matrix: Vec<Vec<f64>>,
}

/// Validates a description and builds the channel model.
pub fn build_channel(spec: &ChannelSpec) -> Result<ChannelModel, ChannelError> {
    match spec {
        ChannelSpec::Bsc { p } => ChannelModel::bsc(*p),
        ChannelSpec::Bec { epsilon } => ChannelModel::bec(*epsilon),
        ChannelSpec::Dmc { matrix } => ChannelModel::from_matrix(matrix.clone()),
    }
}

impl ChannelModel {
    /// Binary symmetric channel with flip probability `p`.
    pub fn bsc(p: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ChannelError::ProbabilityOutOfRange { name: "p", value: p });
        }
        Ok(Self::assemble(
            ChannelKind::Bsc(p),
            vec![vec![1.0 - p, p], vec![p, 1.0 - p]],
        ))
    }

    /// Binary erasure channel with erasure probability `epsilon`. Output
    /// symbols are 0, erasure (= 1), 1 (= 2).
    pub fn bec(epsilon: f64) -> Result<Self, ChannelError> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(ChannelError::ProbabilityOutOfRange {
                name: "epsilon",
                value: epsilon,
            });
        }
        Ok(Self::assemble(
            ChannelKind::Bec(epsilon),
            vec![
                vec![1.0 - epsilon, epsilon, 0.0],
                vec![0.0, epsilon, 1.0 - epsilon],
            ],
        ))
    }

    /// Generic DMC from an explicit matrix. Rows must sum to 1 within
    /// [`ROW_SUM_FILE_TOL`]; accepted rows are renormalized so the stored
    /// model is stochastic to machine precision.
    pub fn from_matrix(matrix: Vec<Vec<f64>>) -> Result<Self, ChannelError> {
        if matrix.is_empty() || matrix[0].is_empty() {
            return Err(ChannelError::MalformedMatrix);
        }
        let width = matrix[0].len();
        let mut rows = Vec::with_capacity(matrix.len());
        for (r, row) in matrix.into_iter().enumerate() {
            if row.len() != width {
                return Err(ChannelError::MalformedMatrix);
            }
            for (c, &w) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&w) || w.is_nan() {
                    return Err(ChannelError::EntryOutOfRange {
                        row: r,
                        col: c,
                        value: w,
                    });
                }
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_FILE_TOL {
                return Err(ChannelError::NonStochasticRow { row: r, sum });
            }
            rows.push(row.into_iter().map(|w| w / sum).collect());
        }
        Ok(Self::assemble(ChannelKind::GenericDmc, rows))
    }

    fn assemble(kind: ChannelKind, matrix: Vec<Vec<f64>>) -> Self {
        let ln_matrix = matrix
            .iter()
            .map(|row| row.iter().map(|&w| w.ln()).collect())
            .collect();
        ChannelModel {
            kind,
            matrix,
            ln_matrix,
        }
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn input_size(&self) -> usize {
        self.matrix.len()
    }

    pub fn output_size(&self) -> usize {
        self.matrix[0].len()
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    /// Shannon capacity in nats: closed form for BSC/BEC, Blahut-Arimoto
    /// to within `tol` otherwise.
    pub fn capacity(&self, tol: f64) -> Result<CapacityResult, ChannelError> {
        if tol <= 0.0 || tol.is_nan() {
            return Err(ChannelError::InvalidTolerance(tol));
        }
        match self.kind {
            ChannelKind::Bsc(p) => Ok(CapacityResult {
                nats: std::f64::consts::LN_2 - binary_entropy_nats(p),
                method: CapacityMethod::ClosedForm,
                iterations: 0,
                gap_bound: 0.0,
            }),
            ChannelKind::Bec(epsilon) => Ok(CapacityResult {
                nats: (1.0 - epsilon) * std::f64::consts::LN_2,
                method: CapacityMethod::ClosedForm,
                iterations: 0,
                gap_bound: 0.0,
            }),
            ChannelKind::GenericDmc => {
                let ba = blahut_arimoto(&self.matrix, tol, CAPACITY_MAX_ITERATIONS);
                if ba.gap_bound > tol {
                    return Err(ChannelError::CapacityNotConverged {
                        nats: ba.nats,
                        gap_bound: ba.gap_bound,
                        iterations: ba.iterations,
                        tol,
                    });
                }
                Ok(CapacityResult {
                    nats: ba.nats,
                    method: CapacityMethod::BlahutArimoto,
                    iterations: ba.iterations,
                    gap_bound: ba.gap_bound,
                })
            }
        }
    }

    /// Capacity-achieving input distribution: uniform for the symmetric
    /// closed-form channels, the Blahut-Arimoto optimizer output otherwise.
    pub fn capacity_achieving_input(&self, tol: f64) -> Result<Vec<f64>, ChannelError> {
        if tol <= 0.0 || tol.is_nan() {
            return Err(ChannelError::InvalidTolerance(tol));
        }
        match self.kind {
            ChannelKind::Bsc(_) | ChannelKind::Bec(_) => {
                Ok(vec![0.5; 2])
            }
            ChannelKind::GenericDmc => {
                let ba = blahut_arimoto(&self.matrix, tol, CAPACITY_MAX_ITERATIONS);
                if ba.gap_bound > tol {
                    return Err(ChannelError::CapacityNotConverged {
                        nats: ba.nats,
                        gap_bound: ba.gap_bound,
                        iterations: ba.iterations,
                        tol,
                    });
                }
                Ok(ba.input)
            }
        }
    }

    /// Runs `x` through the channel, one independent draw per symbol.
    /// Deterministic given the stream state.
    pub fn transmit<R: Rng>(&self, x: &[u16], rng: &mut R) -> Result<Vec<u16>, ChannelError> {
        let mut y = Vec::with_capacity(x.len());
        for (pos, &symbol) in x.iter().enumerate() {
            let row = self
                .matrix
                .get(symbol as usize)
                .ok_or(ChannelError::SymbolOutOfRange {
                    pos,
                    symbol,
                    size: self.input_size(),
                })?;
            let u: f64 = rng.gen::<f64>();
            let mut acc = 0.0;
            let mut out = row.len() - 1;
            for (c, &w) in row.iter().enumerate() {
                acc += w;
                if u < acc {
                    out = c;
                    break;
                }
            }
            y.push(out as u16);
        }
        Ok(y)
    }

    /// `sum_t ln W(y_t | x_t)`; `LogValue::ZERO` for impossible transitions.
    pub fn log_likelihood(&self, x: &[u16], y: &[u16]) -> Result<LogValue, ChannelError> {
        if x.len() != y.len() {
            return Err(ChannelError::LengthMismatch {
                x_len: x.len(),
                y_len: y.len(),
            });
        }
        let mut total = 0.0;
        for (pos, (&xs, &ys)) in x.iter().zip(y).enumerate() {
            let row = self
                .ln_matrix
                .get(xs as usize)
                .ok_or(ChannelError::SymbolOutOfRange {
                    pos,
                    symbol: xs,
                    size: self.input_size(),
                })?;
            let lw = *row.get(ys as usize).ok_or(ChannelError::SymbolOutOfRange {
                pos,
                symbol: ys,
                size: self.output_size(),
            })?;
            total += lw;
        }
        Ok(LogValue::from_ln(total))
    }

    /// `prod_t W(y_t | x_t)` in the linear domain; fine at desk-scale block
    /// lengths, used by the exact evaluators.
    pub fn likelihood(&self, x: &[u16], y: &[u16]) -> Result<f64, ChannelError> {
        Ok(self.log_likelihood(x, y)?.linear())
    }
}

/// Binary entropy in nats; 0 at the endpoints.
pub fn binary_entropy_nats(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        return 0.0;
    }
    -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
}

struct BaOutcome {
    nats: f64,
    input: Vec<f64>,
    iterations: u32,
    gap_bound: f64,
}

/// Blahut-Arimoto from the uniform input distribution. Each iteration
/// computes the per-input divergences D_x = D(W(.|x) || p_y); their
/// r-average lower-bounds capacity and their maximum upper-bounds it, and
/// the multiplicative update reweights r by exp(D_x).
fn blahut_arimoto(w: &[Vec<f64>], tol: f64, max_iter: u32) -> BaOutcome {
    let n_in = w.len();
    let n_out = w[0].len();
    let mut r = vec![1.0 / n_in as f64; n_in];
    let mut best = BaOutcome {
        nats: 0.0,
        input: r.clone(),
        iterations: 0,
        gap_bound: f64::INFINITY,
    };

    for iter in 1..=max_iter {
        let mut p_y = vec![0.0_f64; n_out];
        for (x, row) in w.iter().enumerate() {
            for (y, &wyx) in row.iter().enumerate() {
                p_y[y] += r[x] * wyx;
            }
        }
        let mut d = vec![0.0_f64; n_in];
        for (x, row) in w.iter().enumerate() {
            let mut acc = 0.0;
            for (y, &wyx) in row.iter().enumerate() {
                if wyx > 0.0 {
                    acc += wyx * (wyx / p_y[y]).ln();
                }
            }
            d[x] = acc;
        }
        let lower: f64 = r.iter().zip(&d).map(|(&rx, &dx)| rx * dx).sum();
        let upper = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let gap = (upper - lower).max(0.0);
        if gap < best.gap_bound {
            best = BaOutcome {
                nats: lower.max(0.0),
                input: r.clone(),
                iterations: iter,
                gap_bound: gap,
            };
        }
        if gap <= tol {
            break;
        }
        let mut norm = 0.0;
        for (rx, &dx) in r.iter_mut().zip(&d) {
            *rx *= dx.exp();
            norm += *rx;
        }
        for rx in &mut r {
            *rx /= norm;
        }
    }
    best
}
