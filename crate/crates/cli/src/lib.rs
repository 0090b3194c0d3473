//! Command-line front end: single runs, grid sweeps, message sessions and
//! the switchable-mirror timing bound.
//!
//! Floating-point output carries 12 significant digits. CSV cells hold the
//! digits in scientific notation; JSON holds the same value rounded to those
//! digits, so both parse back to identical numbers.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use cqze_core::noise::DEFAULT_TRIALS;
use cqze_core::session::DEFAULT_MAX_RETRIES;
use cqze_core::{
    build_statistics, monte_carlo, mutual_information, random_message, run_protocol, transmit,
    BobBit, NoiseModel, OutcomeDistribution, ProtocolParams, SessionConfig, SessionResult,
};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const DEFAULT_SEED: u64 = 0;

/// Upper bound on the switchable-mirror control time, `2L / c`.
pub fn sm_timing_bound(distance_m: f64) -> cqze_core::Result<f64> {
    if distance_m.is_nan() || distance_m <= 0.0 || distance_m.is_infinite() {
        return Err(cqze_core::Error::NonPositiveDistance(distance_m));
    }
    Ok(2.0 * distance_m / SPEED_OF_LIGHT)
}

pub fn fmt_sig(x: f64) -> String {
    format!("{x:.11e}")
}

pub fn round_sig(x: f64) -> f64 {
    fmt_sig(x).parse().expect("formatted float parses")
}

/// Invalid flags or configuration; maps to exit status 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn usage_from(err: cqze_core::Error) -> anyhow::Error {
    usage(err.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Defaults read from a TOML key-value file; command-line flags win.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileDefaults {
    #[serde(rename = "M")]
    pub outer_cycles: Option<usize>,
    #[serde(rename = "N")]
    pub inner_cycles: Option<usize>,
    pub s: Option<f64>,
    #[serde(rename = "B")]
    pub noise_rate: Option<f64>,
    pub eta: Option<f64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub max_retries: Option<u32>,
    pub final_inner_chain: Option<bool>,
    pub format: Option<Format>,
}

impl FileDefaults {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).map_err(|e| usage(format!("config {}: {e}", path.display())))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cqze",
    version,
    about = "Chained quantum Zeno counterfactual communication simulator"
)]
pub struct Cli {
    /// TOML file with default values (M, N, s, B, eta, trials, seed, ...)
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Terminal distribution for one parameter set and one bit
    Run(RunArgs),
    /// Table over a parameter grid
    Sweep(SweepArgs),
    /// Send a bit string end to end
    Message(MessageArgs),
    /// Switchable-mirror control-time bound 2L/c
    Timing(TimingArgs),
}

#[derive(Debug, Args)]
pub struct NoiseArgs {
    /// Per-pass channel blocking probability
    #[arg(long = "B")]
    pub noise_rate: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, env = "RUN_SEED")]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long = "M")]
    pub outer_cycles: Option<usize>,
    #[arg(long = "N")]
    pub inner_cycles: Option<usize>,
    #[arg(long = "bob-bit")]
    pub bob_bit: u8,
    /// Rotator imperfection, applied to both chains
    #[arg(long = "s", allow_negative_numbers = true)]
    pub imperfection: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long)]
    pub final_inner_chain: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Click probabilities against M and N
    Fig3,
    /// Rotator imperfection study
    Fig4a,
    /// Channel noise study
    Fig4b,
}

/// Axis values are comma-separated numbers or `start:stop:step` ranges.
#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub preset: Option<Preset>,
    #[arg(long = "M")]
    pub outer_cycles: Option<String>,
    #[arg(long = "N")]
    pub inner_cycles: Option<String>,
    /// Explicit (M, N) pairs such as `25x320,50x1250`
    #[arg(long, conflicts_with_all = ["outer_cycles", "inner_cycles"])]
    pub shape: Option<String>,
    #[arg(long = "s", allow_hyphen_values = true)]
    pub imperfection: Option<String>,
    #[arg(long = "B")]
    pub noise_rate: Option<String>,
    #[arg(long)]
    pub eta: Option<String>,
    #[arg(long = "bob-bit")]
    pub bob_bit: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, env = "RUN_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub final_inner_chain: bool,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write the table here instead of stdout
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Overwrite an existing output file
    #[arg(long)]
    pub force: bool,
}

#[derive(Debug, Args)]
pub struct MessageArgs {
    /// Bit string such as 0110
    #[arg(
        long,
        conflicts_with = "random_bits",
        required_unless_present = "random_bits"
    )]
    pub bits: Option<String>,
    /// Send this many seeded random bits
    #[arg(long)]
    pub random_bits: Option<usize>,
    #[arg(long = "M")]
    pub outer_cycles: Option<usize>,
    #[arg(long = "N")]
    pub inner_cycles: Option<usize>,
    #[arg(long = "s", allow_negative_numbers = true)]
    pub imperfection: Option<f64>,
    #[arg(long = "B")]
    pub noise_rate: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub max_retries: Option<u32>,
    #[arg(long, env = "RUN_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub final_inner_chain: bool,
}

#[derive(Debug, Args)]
pub struct TimingArgs {
    /// Alice-Bob distance in meters
    #[arg(long = "L")]
    pub distance: f64,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// One output record. Field names are the CSV header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    #[serde(rename = "M")]
    pub outer_cycles: usize,
    #[serde(rename = "N")]
    pub inner_cycles: usize,
    pub s: f64,
    #[serde(rename = "B")]
    pub noise_rate: f64,
    pub eta: f64,
    pub bob_bit: u8,
    pub p_d1: f64,
    pub p_d2: f64,
    pub p_d3: f64,
    pub p_bob: f64,
    pub p_noise: f64,
    pub stderr_d1: f64,
    pub stderr_d2: f64,
    pub stderr_d3: f64,
    pub stderr_bob: f64,
    pub stderr_noise: f64,
    pub mutual_information: Option<f64>,
    pub seed: u64,
}

pub const CSV_HEADER: &str = "M,N,s,B,eta,bob_bit,p_d1,p_d2,p_d3,p_bob,p_noise,\
stderr_d1,stderr_d2,stderr_d3,stderr_bob,stderr_noise,mutual_information,seed";

impl Row {
    fn rounded(&self) -> Self {
        let mut r = self.clone();
        for v in [
            &mut r.s,
            &mut r.noise_rate,
            &mut r.eta,
            &mut r.p_d1,
            &mut r.p_d2,
            &mut r.p_d3,
            &mut r.p_bob,
            &mut r.p_noise,
            &mut r.stderr_d1,
            &mut r.stderr_d2,
            &mut r.stderr_d3,
            &mut r.stderr_bob,
            &mut r.stderr_noise,
        ] {
            *v = round_sig(*v);
        }
        r.mutual_information = r.mutual_information.map(round_sig);
        r
    }

    fn csv_line(&self) -> String {
        let mut cells = vec![self.outer_cycles.to_string(), self.inner_cycles.to_string()];
        cells.extend([self.s, self.noise_rate, self.eta].map(fmt_sig));
        cells.push(self.bob_bit.to_string());
        cells.extend(
            [
                self.p_d1,
                self.p_d2,
                self.p_d3,
                self.p_bob,
                self.p_noise,
                self.stderr_d1,
                self.stderr_d2,
                self.stderr_d3,
                self.stderr_bob,
                self.stderr_noise,
            ]
            .map(fmt_sig),
        );
        cells.push(self.mutual_information.map(fmt_sig).unwrap_or_default());
        cells.push(self.seed.to_string());
        cells.join(",")
    }
}

pub fn rows_to_csv(rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

pub fn rows_to_json(rows: &[Row]) -> String {
    let rounded: Vec<Row> = rows.iter().map(Row::rounded).collect();
    serde_json::to_string_pretty(&rounded).expect("rows serialize") + "\n"
}

fn row_to_json(row: &Row) -> String {
    serde_json::to_string_pretty(&row.rounded()).expect("row serializes") + "\n"
}

/// One grid point; both bits are evaluated so the row can carry the
/// wrong-click information.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub params: ProtocolParams,
    pub noise_rate: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, Copy)]
struct Estimate {
    mean: OutcomeDistribution,
    stderr: [f64; 5],
}

fn estimate(point: &GridPoint, bit: BobBit, trials: usize, seed: u64) -> anyhow::Result<Estimate> {
    if point.noise_rate == 0.0 {
        return Ok(Estimate {
            mean: run_protocol(&point.params, bit),
            stderr: [0.0; 5],
        });
    }
    let model = NoiseModel::new(point.noise_rate, seed, trials).map_err(usage_from)?;
    let mc = monte_carlo(&point.params, bit, &model)?;
    Ok(Estimate {
        mean: mc.mean,
        stderr: mc.std_error.to_array(),
    })
}

/// Rows for `bits` at one grid point, in the order given.
pub fn evaluate_point(
    point: &GridPoint,
    bits: &[BobBit],
    trials: usize,
    seed: u64,
) -> anyhow::Result<Vec<Row>> {
    let pass = estimate(point, BobBit::Pass, trials, seed)?;
    let block = estimate(point, BobBit::Block, trials, seed)?;
    let info = build_statistics(&pass.mean, &block.mean, point.eta)
        .and_then(|stats| mutual_information(&stats))
        .ok();
    Ok(bits
        .iter()
        .map(|&bit| {
            let est = if bit == BobBit::Pass { pass } else { block };
            let [stderr_d1, stderr_d2, stderr_d3, stderr_bob, stderr_noise] = est.stderr;
            Row {
                outer_cycles: point.params.outer_cycles(),
                inner_cycles: point.params.inner_cycles(),
                s: point.params.outer_imperfection(),
                noise_rate: point.noise_rate,
                eta: point.eta,
                bob_bit: bit.as_u8(),
                p_d1: est.mean.p_d1,
                p_d2: est.mean.p_d2,
                p_d3: est.mean.p_d3,
                p_bob: est.mean.p_bob,
                p_noise: est.mean.p_noise,
                stderr_d1,
                stderr_d2,
                stderr_d3,
                stderr_bob,
                stderr_noise,
                mutual_information: info,
                seed,
            }
        })
        .collect())
}

/// A validated parameter grid. Row order is shapes, then `s`, then `B`,
/// then `eta`, then bits.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub shapes: Vec<(usize, usize)>,
    pub imperfections: Vec<f64>,
    pub noise_rates: Vec<f64>,
    pub etas: Vec<f64>,
    pub bits: Vec<BobBit>,
    pub trials: usize,
    pub seed: u64,
    pub final_inner_chain: bool,
}

impl SweepSpec {
    pub fn points(&self) -> anyhow::Result<Vec<GridPoint>> {
        if self.shapes.is_empty()
            || self.imperfections.is_empty()
            || self.noise_rates.is_empty()
            || self.etas.is_empty()
            || self.bits.is_empty()
        {
            return Err(usage(
                "sweep grid is empty; give --preset or --M/--N/--shape",
            ));
        }
        if self.trials == 0 {
            return Err(usage_from(cqze_core::Error::ZeroTrials));
        }
        let mut points = Vec::new();
        for &(m, n) in &self.shapes {
            for &s in &self.imperfections {
                let params = ProtocolParams::new(m, n)
                    .and_then(|p| p.with_imperfection(s))
                    .map_err(usage_from)?
                    .with_final_inner_chain(self.final_inner_chain);
                for &noise_rate in &self.noise_rates {
                    check_probability("B", noise_rate)?;
                    for &eta in &self.etas {
                        check_probability("eta", eta)?;
                        points.push(GridPoint {
                            params,
                            noise_rate,
                            eta,
                        });
                    }
                }
            }
        }
        Ok(points)
    }

    pub fn run(&self) -> anyhow::Result<Vec<Row>> {
        let points = self.points()?;
        let chunks = points
            .par_iter()
            .map(|point| evaluate_point(point, &self.bits, self.trials, self.seed))
            .collect::<anyhow::Result<Vec<_>>>()?;
        Ok(chunks.into_iter().flatten().collect())
    }
}

fn check_probability(name: &'static str, value: f64) -> anyhow::Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(usage_from(cqze_core::Error::ProbabilityOutOfRange {
            name,
            value,
        }))
    }
}

fn parse_number<T: std::str::FromStr>(text: &str, axis: &str) -> anyhow::Result<T> {
    text.trim()
        .parse()
        .map_err(|_| usage(format!("--{axis}: cannot parse '{text}'")))
}

/// Parses `1,2,5` or `0:4:0.5` (inclusive) or a mix of both.
pub fn parse_axis(text: &str, axis: &str) -> anyhow::Result<Vec<f64>> {
    let mut values = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [single] => values.push(parse_number(single, axis)?),
            [start, stop, step] => {
                let (start, stop, step): (f64, f64, f64) = (
                    parse_number(start, axis)?,
                    parse_number(stop, axis)?,
                    parse_number(step, axis)?,
                );
                if step.is_nan() || step <= 0.0 || stop < start {
                    return Err(usage(format!("--{axis}: bad range '{item}'")));
                }
                let count = ((stop - start) / step + 1e-9).floor() as usize;
                values.extend((0..=count).map(|k| start + k as f64 * step));
            }
            _ => return Err(usage(format!("--{axis}: bad item '{item}'"))),
        }
    }
    Ok(values)
}

fn parse_int_axis(text: &str, axis: &str) -> anyhow::Result<Vec<usize>> {
    parse_axis(text, axis)?
        .into_iter()
        .map(|v| {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(usage(format!(
                    "--{axis}: {v} is not a non-negative integer"
                )))
            }
        })
        .collect()
}

fn parse_bits_axis(text: &str) -> anyhow::Result<Vec<BobBit>> {
    parse_int_axis(text, "bob-bit")?
        .into_iter()
        .map(|b| {
            u8::try_from(b)
                .map_err(|_| cqze_core::Error::InvalidBit(u8::MAX))
                .and_then(BobBit::try_from)
        })
        .collect::<Result<_, _>>()
        .map_err(usage_from)
}

fn parse_shapes(text: &str) -> anyhow::Result<Vec<(usize, usize)>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|item| match item.split_once('x') {
            Some((m, n)) => Ok((parse_number(m, "shape")?, parse_number(n, "shape")?)),
            None => Err(usage(format!("--shape: expected MxN, got '{item}'"))),
        })
        .collect()
}

fn preset_spec(preset: Option<Preset>) -> SweepSpec {
    let mut spec = SweepSpec {
        shapes: Vec::new(),
        imperfections: vec![0.0],
        noise_rates: vec![0.0],
        etas: vec![1.0],
        bits: BobBit::BOTH.to_vec(),
        trials: DEFAULT_TRIALS,
        seed: DEFAULT_SEED,
        final_inner_chain: false,
    };
    let published = vec![(25, 320), (50, 1250)];
    match preset {
        None => {}
        Some(Preset::Fig3) => {
            let ms = [5, 10, 15, 20, 25, 30, 40, 50, 75, 100, 150];
            let ns = [
                10, 20, 50, 100, 200, 320, 500, 1000, 1250, 2000, 5000, 10000,
            ];
            spec.shapes = ms
                .iter()
                .flat_map(|&m| ns.iter().map(move |&n| (m, n)))
                .collect();
        }
        Some(Preset::Fig4a) => {
            spec.shapes = published;
            spec.imperfections = (0..=16).map(|k| k as f64 * 0.25).collect();
        }
        Some(Preset::Fig4b) => {
            spec.shapes = published;
            spec.noise_rates = vec![
                0.0, 0.0005, 0.001, 0.0015, 0.002, 0.003, 0.005, 0.0075, 0.01,
            ];
        }
    }
    spec
}

pub fn build_sweep_spec(args: &SweepArgs, defaults: &FileDefaults) -> anyhow::Result<SweepSpec> {
    let mut spec = preset_spec(args.preset);
    if let Some(shapes) = &args.shape {
        spec.shapes = parse_shapes(shapes)?;
    } else if args.outer_cycles.is_some() || args.inner_cycles.is_some() {
        let ms = match &args.outer_cycles {
            Some(text) => parse_int_axis(text, "M")?,
            None => defaults.outer_cycles.into_iter().collect(),
        };
        let ns = match &args.inner_cycles {
            Some(text) => parse_int_axis(text, "N")?,
            None => defaults.inner_cycles.into_iter().collect(),
        };
        spec.shapes = ms
            .iter()
            .flat_map(|&m| ns.iter().map(move |&n| (m, n)))
            .collect();
    } else if spec.shapes.is_empty() {
        if let (Some(m), Some(n)) = (defaults.outer_cycles, defaults.inner_cycles) {
            spec.shapes = vec![(m, n)];
        }
    }
    if let Some(text) = &args.imperfection {
        spec.imperfections = parse_axis(text, "s")?;
    } else if let (None, Some(s)) = (args.preset, defaults.s) {
        spec.imperfections = vec![s];
    }
    if let Some(text) = &args.noise_rate {
        spec.noise_rates = parse_axis(text, "B")?;
    } else if let (None, Some(b)) = (args.preset, defaults.noise_rate) {
        spec.noise_rates = vec![b];
    }
    if let Some(text) = &args.eta {
        spec.etas = parse_axis(text, "eta")?;
    } else if let Some(eta) = defaults.eta {
        spec.etas = vec![eta];
    }
    if let Some(text) = &args.bob_bit {
        spec.bits = parse_bits_axis(text)?;
    }
    spec.trials = args.trials.or(defaults.trials).unwrap_or(DEFAULT_TRIALS);
    spec.seed = args.seed.or(defaults.seed).unwrap_or(DEFAULT_SEED);
    spec.final_inner_chain = args.final_inner_chain || defaults.final_inner_chain.unwrap_or(false);
    Ok(spec)
}

fn required<T>(flag: Option<T>, file: Option<T>, name: &str) -> anyhow::Result<T> {
    flag.or(file)
        .ok_or_else(|| usage(format!("missing --{name}")))
}

fn protocol_params(
    outer: Option<usize>,
    inner: Option<usize>,
    s: Option<f64>,
    final_flag: bool,
    defaults: &FileDefaults,
) -> anyhow::Result<ProtocolParams> {
    let m = required(outer, defaults.outer_cycles, "M")?;
    let n = required(inner, defaults.inner_cycles, "N")?;
    let s = s.or(defaults.s).unwrap_or(0.0);
    Ok(ProtocolParams::new(m, n)
        .and_then(|p| p.with_imperfection(s))
        .map_err(usage_from)?
        .with_final_inner_chain(final_flag || defaults.final_inner_chain.unwrap_or(false)))
}

pub fn cmd_run(args: &RunArgs, defaults: &FileDefaults) -> anyhow::Result<String> {
    let params = protocol_params(
        args.outer_cycles,
        args.inner_cycles,
        args.imperfection,
        args.final_inner_chain,
        defaults,
    )?;
    let bit = BobBit::try_from(args.bob_bit).map_err(usage_from)?;
    let noise_rate = args.noise.noise_rate.or(defaults.noise_rate).unwrap_or(0.0);
    check_probability("B", noise_rate)?;
    let eta = args.eta.or(defaults.eta).unwrap_or(1.0);
    check_probability("eta", eta)?;
    let trials = args
        .noise
        .trials
        .or(defaults.trials)
        .unwrap_or(DEFAULT_TRIALS);
    if trials == 0 {
        return Err(usage_from(cqze_core::Error::ZeroTrials));
    }
    let seed = args.noise.seed.or(defaults.seed).unwrap_or(DEFAULT_SEED);
    let point = GridPoint {
        params,
        noise_rate,
        eta,
    };
    let rows = evaluate_point(&point, &[bit], trials, seed)?;
    Ok(
        match args.format.or(defaults.format).unwrap_or(Format::Csv) {
            Format::Csv => rows_to_csv(&rows),
            Format::Json => row_to_json(&rows[0]),
        },
    )
}

pub fn cmd_sweep(args: &SweepArgs, defaults: &FileDefaults) -> anyhow::Result<Option<String>> {
    let spec = build_sweep_spec(args, defaults)?;
    if let Some(path) = &args.output {
        if path.exists() && !args.force {
            bail!("{} exists; pass --force to overwrite", path.display());
        }
    }
    let rows = spec.run()?;
    let text = match args.format.or(defaults.format).unwrap_or(Format::Csv) {
        Format::Csv => rows_to_csv(&rows),
        Format::Json => rows_to_json(&rows),
    };
    match &args.output {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
            Ok(None)
        }
        None => Ok(Some(text)),
    }
}

fn parse_bit_string(text: &str) -> anyhow::Result<Vec<BobBit>> {
    let bits = text
        .chars()
        .map(|c| match c {
            '0' => Ok(BobBit::Pass),
            '1' => Ok(BobBit::Block),
            other => Err(usage(format!("--bits: invalid character '{other}'"))),
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    if bits.is_empty() {
        return Err(usage_from(cqze_core::Error::EmptyMessage));
    }
    Ok(bits)
}

#[derive(Debug, Serialize)]
struct MessageRecord {
    #[serde(rename = "M")]
    outer_cycles: usize,
    #[serde(rename = "N")]
    inner_cycles: usize,
    s: f64,
    #[serde(rename = "B")]
    noise_rate: f64,
    eta: f64,
    max_retries: u32,
    seed: u64,
    bits: String,
    #[serde(flatten)]
    result: SessionResult,
}

pub fn cmd_message(args: &MessageArgs, defaults: &FileDefaults) -> anyhow::Result<String> {
    let params = protocol_params(
        args.outer_cycles,
        args.inner_cycles,
        args.imperfection,
        args.final_inner_chain,
        defaults,
    )?;
    let seed = args.seed.or(defaults.seed).unwrap_or(DEFAULT_SEED);
    let bits = match (&args.bits, args.random_bits) {
        (Some(text), _) => parse_bit_string(text)?,
        (None, Some(n)) if n > 0 => random_message(n, seed),
        _ => return Err(usage_from(cqze_core::Error::EmptyMessage)),
    };
    let noise_rate = args.noise_rate.or(defaults.noise_rate).unwrap_or(0.0);
    let eta = args.eta.or(defaults.eta).unwrap_or(1.0);
    let max_retries = args
        .max_retries
        .or(defaults.max_retries)
        .unwrap_or(DEFAULT_MAX_RETRIES);
    let config = SessionConfig::new(bits.clone(), params, seed)
        .and_then(|c| c.with_noise_rate(noise_rate))
        .and_then(|c| c.with_eta(eta))
        .map_err(usage_from)?
        .with_max_retries(max_retries);
    let mut result = transmit(&config)?;
    result.ber = round_sig(result.ber);
    result.erasure_rate = round_sig(result.erasure_rate);
    result.throughput = round_sig(result.throughput);
    result.mutual_information = round_sig(result.mutual_information);
    let record = MessageRecord {
        outer_cycles: params.outer_cycles(),
        inner_cycles: params.inner_cycles(),
        s: round_sig(params.outer_imperfection()),
        noise_rate: round_sig(noise_rate),
        eta: round_sig(eta),
        max_retries,
        seed,
        bits: bits.iter().map(|b| b.to_string()).collect(),
        result,
    };
    Ok(serde_json::to_string_pretty(&record)? + "\n")
}

pub fn cmd_timing(args: &TimingArgs, defaults: &FileDefaults) -> anyhow::Result<String> {
    let bound = sm_timing_bound(args.distance).map_err(usage_from)?;
    Ok(match args.format.or(defaults.format).unwrap_or(Format::Csv) {
        Format::Csv => format!("L,bound_seconds\n{},{}\n", fmt_sig(args.distance), fmt_sig(bound)),
        Format::Json => {
            serde_json::json!({ "L": round_sig(args.distance), "bound_seconds": round_sig(bound) }).to_string()
                + "\n"
        }
    })
}

/// Runs a parsed command and returns what should go to stdout.
pub fn execute(cli: &Cli) -> anyhow::Result<Option<String>> {
    let defaults = match &cli.config {
        Some(path) => FileDefaults::load(path)?,
        None => FileDefaults::default(),
    };
    match &cli.command {
        Command::Run(args) => cmd_run(args, &defaults).map(Some),
        Command::Sweep(args) => cmd_sweep(args, &defaults),
        Command::Message(args) => cmd_message(args, &defaults).map(Some),
        Command::Timing(args) => cmd_timing(args, &defaults).map(Some),
    }
}
