//! Subcommand implementations: file ingestion, calls into `led_core`, and
//! JSON/CSV emission.

use std::fs;
use std::io::Write;

use serde::Serialize;

use led_core::channel::{build_channel, CapacityMethod, ChannelError, ChannelModel, ChannelSpec};
use led_core::codes::{build_led_code, CodeError};
use led_core::feasibility::{
    self, CodeParams, FeasibilityError, ParameterSchedule, Verdict,
};
use led_core::packing::{gilbert_bound, greedy_packing, PackingError};
use led_core::sim::{run_monte_carlo, SimError, SimReport};
use led_core::stream::{self, domain};

use crate::CliError;

fn channel_err(e: ChannelError) -> CliError {
    match e {
        ChannelError::CapacityNotConverged { .. }
        | ChannelError::SymbolOutOfRange { .. }
        | ChannelError::LengthMismatch { .. } => CliError::runtime(e),
        _ => CliError::validation(e),
    }
}

fn code_err(e: CodeError) -> CliError {
    match e {
        CodeError::InvalidInnerRate(_) => CliError::validation(e),
        CodeError::Channel(inner) => channel_err(inner),
        _ => CliError::runtime(e),
    }
}

fn packing_err(e: PackingError) -> CliError {
    match e {
        PackingError::EnumerationGuard { .. } => CliError::runtime(e),
        _ => CliError::validation(e),
    }
}

fn feasibility_err(e: FeasibilityError) -> CliError {
    CliError::validation(e)
}

fn sim_err(e: SimError) -> CliError {
    match e {
        SimError::Code(inner) => code_err(inner),
        SimError::Channel(inner) => channel_err(inner),
        SimError::IdentityGuard { .. } => CliError::runtime(e),
        _ => CliError::validation(e),
    }
}

fn load_channel(path: &str) -> Result<ChannelModel, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read channel file {path}: {e}")))?;
    let spec: ChannelSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("malformed channel file {path}: {e}")))?;
    build_channel(&spec).map_err(channel_err)
}

fn load_schedule(path: &str) -> Result<ParameterSchedule, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read schedule file {path}: {e}")))?;
    let schedule: ParameterSchedule = serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("malformed schedule file {path}: {e}")))?;
    schedule.validate().map_err(feasibility_err)?;
    Ok(schedule)
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string(value)
        .map_err(|e| CliError::runtime(format!("serialization failed: {e}")))?;
    println!("{text}");
    Ok(())
}

#[derive(Serialize)]
struct CapacityOut {
    capacity_nats: f64,
    capacity_bits: f64,
    method: CapacityMethod,
    iterations: u32,
    gap_bound: f64,
}

pub fn capacity(channel_path: &str, tol: f64) -> Result<(), CliError> {
    let ch = load_channel(channel_path)?;
    let cap = ch.capacity(tol).map_err(channel_err)?;
    print_json(&CapacityOut {
        capacity_nats: cap.nats,
        capacity_bits: cap.bits(),
        method: cap.method,
        iterations: cap.iterations,
        gap_bound: cap.gap_bound,
    })
}

#[derive(Serialize)]
struct FeasibilityOut {
    #[serde(rename = "M")]
    m: u64,
    #[serde(rename = "K")]
    k: u64,
    #[serde(rename = "L")]
    l: u64,
    #[serde(rename = "T")]
    t: u64,
    n: u32,
    capacity_nats: f64,
    sufficient_statistic_nats: f64,
    necessary_general_nats: f64,
    necessary_t1_nats: Option<f64>,
    /// The achievability threshold is strictly below capacity.
    sufficient_condition_holds: bool,
    /// Every converse threshold is at or below capacity.
    necessary_condition_holds: bool,
}

pub fn feasibility(
    m: u64,
    k: u64,
    l: u64,
    t: u64,
    n: u32,
    channel_path: &str,
    tol: f64,
) -> Result<(), CliError> {
    let params = CodeParams::new(m, k, l, t, n).map_err(feasibility_err)?;
    let ch = load_channel(channel_path)?;
    let cap = ch.capacity(tol).map_err(channel_err)?.nats;
    let suff = feasibility::sufficient_statistic(&params).ln();
    let nec = feasibility::necessary_statistic(&params);
    let general = nec.general.ln();
    let t1 = nec.t1.map(|v| v.ln());
    print_json(&FeasibilityOut {
        m,
        k,
        l,
        t,
        n,
        capacity_nats: cap,
        sufficient_statistic_nats: suff,
        necessary_general_nats: general,
        necessary_t1_nats: t1,
        sufficient_condition_holds: suff < cap,
        necessary_condition_holds: general <= cap && t1.is_none_or(|v| v <= cap),
    })
}

#[derive(Serialize)]
struct ClassifyOut {
    rate_nats: f64,
    gap_nats: f64,
    capacity_nats: f64,
    verdict: Verdict,
}

pub fn classify(schedule_path: &str, channel_path: &str, tol: f64) -> Result<(), CliError> {
    let schedule = load_schedule(schedule_path)?;
    let ch = load_channel(channel_path)?;
    let cap = ch.capacity(tol).map_err(channel_err)?.nats;
    let profile = feasibility::classify(&schedule, cap).map_err(feasibility_err)?;
    print_json(&ClassifyOut {
        rate_nats: profile.rate,
        gap_nats: profile.gap,
        capacity_nats: cap,
        verdict: profile.verdict,
    })
}

#[derive(Serialize)]
struct PackingOut {
    #[serde(rename = "M")]
    m: u64,
    #[serde(rename = "K")]
    k: u64,
    #[serde(rename = "T")]
    t: u64,
    gilbert_bound: u64,
    size: u64,
    sets: Vec<Vec<u64>>,
}

pub fn packing(m: u64, k: u64, t: u64, seed: u64) -> Result<(), CliError> {
    let bound = gilbert_bound(m, k, t).map_err(packing_err)?;
    let packing = greedy_packing(m, k, t, seed).map_err(packing_err)?;
    print_json(&PackingOut {
        m,
        k,
        t,
        gilbert_bound: bound.integer_bound,
        size: packing.len() as u64,
        sets: packing
            .sets
            .iter()
            .map(|s| s.as_slice().to_vec())
            .collect(),
    })
}

fn parse_n_grid(text: &str) -> Result<Vec<u32>, CliError> {
    let grid: Vec<u32> = text
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<u32>()
                .map_err(|e| CliError::validation(format!("bad n-grid entry {part:?}: {e}")))
        })
        .collect::<Result<_, _>>()?;
    if grid.is_empty() || grid.contains(&0) {
        return Err(CliError::validation("n-grid must list positive block lengths"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::validation("n-grid must be strictly increasing"));
    }
    Ok(grid)
}

pub fn simulate(
    schedule_path: &str,
    channel_path: &str,
    rate_inner: f64,
    trials: u64,
    n_grid: &str,
    seed: u64,
    out: Option<&str>,
) -> Result<(), CliError> {
    let schedule = load_schedule(schedule_path)?;
    let ch = load_channel(channel_path)?;
    let grid = parse_n_grid(n_grid)?;

    let mut rows = Vec::with_capacity(grid.len() + 1);
    rows.push(SimReport::CSV_HEADER.to_string());
    for &n in &grid {
        let point = feasibility::evaluate_schedule_at_n(&schedule, n).map_err(feasibility_err)?;
        if point.clamped {
            eprintln!("note: schedule values clamped at n={n} to keep parameters valid");
        }
        let code_seed = stream::derive_seed(seed, domain::SWEEP_CODE, n as u64);
        let code = build_led_code(&point.params, rate_inner, &ch, code_seed).map_err(code_err)?;
        if code.heavy_list_duplication {
            eprintln!("note: inner codebook far exceeds C(M,L) at n={n}; lists heavily duplicated");
        }
        let report = run_monte_carlo(&code, &ch, trials, seed).map_err(sim_err)?;
        rows.push(report.to_csv_row());
    }

    let mut body = rows.join("\n");
    body.push('\n');
    match out {
        Some(path) => fs::write(path, body)
            .map_err(|e| CliError::runtime(format!("cannot write {path}: {e}")))?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(body.as_bytes())
                .map_err(|e| CliError::runtime(format!("cannot write output: {e}")))?;
        }
    }
    Ok(())
}

pub fn asymptotics(m: u64, k: u64, l: u64, jmax: u64, kmax: u32) -> Result<(), CliError> {
    let params = led_core::combinatorics::HypergeomParams::new(m, k, l)
        .map_err(CliError::validation)?;
    if kmax == 0 {
        return Err(CliError::validation("kmax must be at least 1"));
    }
    println!("j,exact_ln_vj,approx_ln_vj,delta,abs_error");
    for j in 1..=jmax {
        let Ok(approx) = params.approx_log_term(j, kmax) else {
            continue; // outside the approximation's domain
        };
        let exact = params.log_term(j).ln();
        let a = approx.approx.ln();
        println!("{j},{exact},{a},{},{}", approx.delta, (a - exact).abs());
    }
    Ok(())
}
