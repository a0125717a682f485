//! Monte-Carlo sweeps over one network parameter.
//!
//! A sweep is a grid of cells `(value, trial)`. Each cell derives its own
//! seed, draws one channel realization and runs every requested scheme on
//! that same realization, so scheme comparisons are paired. Cells run in
//! parallel; rows are reassembled in grid order, so output never depends on
//! scheduling.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines;
use crate::dual_solver::{self, SolverOptions, SolverReport, TraceRow};
use crate::error::{Error, Result};
use crate::model::{ChannelRealization, NetworkConfig, Topology};
use crate::rate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    PicoPower,
    MacroPower,
    InterferenceThreshold,
    NumUsers,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            Self::PicoPower => "pico_power",
            Self::MacroPower => "macro_power",
            Self::InterferenceThreshold => "interference_threshold",
            Self::NumUsers => "num_users",
        }
    }

    /// `config` with this parameter set to `value`.
    pub fn apply(self, config: &NetworkConfig, value: f64) -> Result<NetworkConfig> {
        let mut out = config.clone();
        match self {
            Self::PicoPower => out.pico_power = value,
            Self::MacroPower => out.macro_power = value,
            Self::InterferenceThreshold => out.interference_threshold = value,
            Self::NumUsers => {
                if value.fract() != 0.0 || value < 1.0 || value > u32::MAX as f64 {
                    return Err(Error::InvalidSweep(format!(
                        "user count must be a positive integer, got {value}"
                    )));
                }
                out.num_users = value as usize;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pico_power" | "pico-power" | "pp" => Ok(Self::PicoPower),
            "macro_power" | "macro-power" | "pm" => Ok(Self::MacroPower),
            "interference_threshold" | "ith" => Ok(Self::InterferenceThreshold),
            "num_users" | "users" => Ok(Self::NumUsers),
            _ => Err(Error::InvalidSweep(format!("unknown sweep parameter {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Oaop,
    Faop,
    Fafp,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Oaop, Scheme::Faop, Scheme::Fafp];

    pub fn name(self) -> &'static str {
        match self {
            Self::Oaop => "OAOP",
            Self::Faop => "FAOP",
            Self::Fafp => "FAFP",
        }
    }

    pub fn solve(
        self,
        config: &NetworkConfig,
        topology: &Topology,
        channels: &ChannelRealization,
        options: &SolverOptions,
    ) -> Result<SolverReport> {
        match self {
            Self::Oaop => dual_solver::solve_oaop(config, topology, channels, options),
            Self::Faop => baselines::solve_faop(config, topology, channels, options),
            Self::Fafp => baselines::solve_fafp(config, topology, channels),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "oaop" => Ok(Self::Oaop),
            "faop" => Ok(Self::Faop),
            "fafp" => Ok(Self::Fafp),
            _ => Err(Error::InvalidSweep(format!("unknown scheme {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Pr,
    SumThroughput,
    MinRate,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Pr, Metric::SumThroughput, Metric::MinRate];

    pub fn name(self) -> &'static str {
        match self {
            Self::Pr => "pr",
            Self::SumThroughput => "sum_throughput",
            Self::MinRate => "min_rate",
        }
    }

    fn label(self) -> &'static str {
        match self {
            Self::Pr => "peak-to-average rate ratio",
            Self::SumThroughput => "sum throughput (bit/s/Hz)",
            Self::MinRate => "minimum rate (bit/s/Hz)",
        }
    }

    pub fn of(self, row: &Row) -> Option<f64> {
        match self {
            Self::Pr => row.pr,
            Self::SumThroughput => row.sum_throughput,
            Self::MinRate => row.min_rate,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pr" => Ok(Self::Pr),
            "sum_throughput" | "sum" => Ok(Self::SumThroughput),
            "min_rate" | "min" => Ok(Self::MinRate),
            _ => Err(Error::InvalidSweep(format!("unknown metric {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub values: Vec<f64>,
    pub trials: usize,
    pub schemes: Vec<Scheme>,
    /// Metrics to summarize and plot; raw rows always carry all of them.
    pub metrics: Vec<Metric>,
    pub base: NetworkConfig,
    pub base_seed: u64,
    pub options: SolverOptions,
}

pub const DEFAULT_TRIALS: usize = 100;

/// Channel count used by the user-count preset: 100 users need at least 50
/// channels (one macro and one pico slot each), and twice that leaves the
/// assignment room to choose at every point.
pub const USER_SWEEP_CHANNELS: usize = 100;

pub const PRESETS: [&str; 7] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];

impl SweepSpec {
    pub fn new(param: SweepParam, values: Vec<f64>) -> Self {
        Self {
            param,
            values,
            trials: DEFAULT_TRIALS,
            schemes: Scheme::ALL.to_vec(),
            metrics: Metric::ALL.to_vec(),
            base: NetworkConfig::default(),
            base_seed: 0,
            options: SolverOptions::default(),
        }
    }

    /// The sweep behind one of the named figures.
    pub fn preset(name: &str) -> Result<Self> {
        let pico = || vec![0.25, 0.5, 1.0, 1.5, 2.0];
        let ith = || vec![20.0, 25.0, 30.0, 35.0, 40.0];
        let macro_ = || vec![10.0, 15.0, 20.0, 25.0, 30.0];
        let (param, values, metric) = match name {
            "fig2" => (SweepParam::PicoPower, pico(), Metric::Pr),
            "fig3" => (SweepParam::InterferenceThreshold, ith(), Metric::Pr),
            "fig4" => (SweepParam::MacroPower, macro_(), Metric::Pr),
            "fig5" => (SweepParam::PicoPower, pico(), Metric::SumThroughput),
            "fig6" => (SweepParam::InterferenceThreshold, ith(), Metric::SumThroughput),
            "fig7" => (SweepParam::MacroPower, macro_(), Metric::SumThroughput),
            "fig8" => (
                SweepParam::NumUsers,
                vec![20.0, 40.0, 60.0, 80.0, 100.0],
                Metric::SumThroughput,
            ),
            _ => {
                return Err(Error::InvalidSweep(format!(
                    "unknown preset {name:?}; expected one of {}",
                    PRESETS.join(", ")
                )))
            }
        };
        let mut spec = Self::new(param, values);
        spec.metrics = vec![metric];
        if param == SweepParam::NumUsers {
            spec.base.num_channels = USER_SWEEP_CHANNELS;
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidSweep(m));
        if self.values.is_empty() {
            return fail("sweep needs at least one value".into());
        }
        if self
            .values
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return fail(format!("sweep values must be strictly increasing: {:?}", self.values));
        }
        if self.trials == 0 {
            return fail("trials must be at least 1".into());
        }
        if self.schemes.is_empty() {
            return fail("at least one scheme is required".into());
        }
        if self.values.len() > u32::MAX as usize || self.trials > u32::MAX as usize {
            return fail("too many cells".into());
        }
        for &v in &self.values {
            self.param.apply(&self.base, v)?.validate()?;
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of cell `(value_index, trial)`. Injective in the cell for a fixed
/// base seed, since every step is a bijection on `u64`.
pub fn cell_seed(base_seed: u64, value_index: usize, trial: usize) -> u64 {
    splitmix64(base_seed ^ splitmix64(((value_index as u64) << 32) | trial as u64))
}

/// One scheme's outcome on one cell. Metrics are `None` when the solve
/// failed (the reason is in `error`) or, for PR, when it is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub value: f64,
    pub trial: usize,
    pub scheme: Scheme,
    pub min_rate: Option<f64>,
    pub sum_throughput: Option<f64>,
    pub pr: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub seed: u64,
    /// Largest budget or interference-cap excess of the reported powers.
    /// Not written to the raw CSV.
    pub max_violation: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    /// Rows that contributed.
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n)`; zero for a single row.
    pub std_error: f64,
}

impl Stat {
    pub fn of(samples: &[f64]) -> Option<Self> {
        let n = samples.len();
        if n == 0 {
            return None;
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Some(Self { n, mean, std_error })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub value: f64,
    pub scheme: Scheme,
    pub metric: Metric,
    pub stat: Option<Stat>,
}

/// Percentage gap between two schemes' means at one sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub value: f64,
    pub metric: Metric,
    pub first: Scheme,
    pub second: Scheme,
    pub gap_percent: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    /// Grid order: value, then trial, then scheme in spec order.
    pub rows: Vec<Row>,
    pub summary: Vec<SummaryRow>,
    pub gaps: Vec<GapRow>,
}

impl SweepResult {
    pub fn stat(&self, value: f64, scheme: Scheme, metric: Metric) -> Option<Stat> {
        self.summary
            .iter()
            .find(|s| s.value == value && s.scheme == scheme && s.metric == metric)
            .and_then(|s| s.stat)
    }

    /// Mean of `metric` for `scheme` at each sweep value, in order.
    pub fn means(&self, scheme: Scheme, metric: Metric) -> Vec<Option<f64>> {
        self.spec
            .values
            .iter()
            .map(|&v| self.stat(v, scheme, metric).map(|s| s.mean))
            .collect()
    }
}

fn run_cell(spec: &SweepSpec, value_index: usize, trial: usize) -> Vec<Row> {
    let value = spec.values[value_index];
    let seed = cell_seed(spec.base_seed, value_index, trial);
    let failed = |scheme: Scheme, e: &Error| Row {
        value,
        trial,
        scheme,
        min_rate: None,
        sum_throughput: None,
        pr: None,
        iterations: 0,
        converged: false,
        seed,
        max_violation: None,
        error: Some(e.to_string()),
    };
    let setup = spec.param.apply(&spec.base, value).and_then(|mut config| {
        config.rng_seed = seed;
        let topology = Topology::build(&config)?;
        let channels = ChannelRealization::draw(&config);
        Ok((config, topology, channels))
    });
    let (config, topology, channels) = match setup {
        Ok(s) => s,
        Err(e) => return spec.schemes.iter().map(|&s| failed(s, &e)).collect(),
    };
    spec.schemes
        .iter()
        .map(|&scheme| {
            match scheme
                .solve(&config, &topology, &channels, &spec.options)
                .and_then(|report| {
                    report.assignment.validate(config.num_users, &topology)?;
                    Ok(report)
                }) {
                Ok(report) => Row {
                    value,
                    trial,
                    scheme,
                    min_rate: Some(report.rates.min_rate),
                    sum_throughput: Some(report.rates.sum_rate),
                    pr: report.rates.pr,
                    iterations: report.iterations,
                    converged: report.converged,
                    seed,
                    max_violation: Some(report.residuals.max_violation()),
                    error: None,
                },
                Err(e) => failed(scheme, &e),
            }
        })
        .collect()
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let cells: Vec<(usize, usize)> = (0..spec.values.len())
        .flat_map(|v| (0..spec.trials).map(move |t| (v, t)))
        .collect();
    let rows: Vec<Row> = cells
        .par_iter()
        .map(|&(v, t)| run_cell(spec, v, t))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let summary = summarize(spec, &rows);
    let gaps = pairwise_gaps(spec, &summary);
    Ok(SweepResult {
        spec: spec.clone(),
        rows,
        summary,
        gaps,
    })
}

fn summarize(spec: &SweepSpec, rows: &[Row]) -> Vec<SummaryRow> {
    let mut out = Vec::new();
    for &value in &spec.values {
        for &scheme in &spec.schemes {
            for &metric in &spec.metrics {
                let samples: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.value == value && r.scheme == scheme)
                    .filter_map(|r| metric.of(r))
                    .collect();
                out.push(SummaryRow {
                    value,
                    scheme,
                    metric,
                    stat: Stat::of(&samples),
                });
            }
        }
    }
    out
}

fn pairwise_gaps(spec: &SweepSpec, summary: &[SummaryRow]) -> Vec<GapRow> {
    let mean = |value: f64, scheme: Scheme, metric: Metric| {
        summary
            .iter()
            .find(|s| s.value == value && s.scheme == scheme && s.metric == metric)
            .and_then(|s| s.stat)
            .map(|s| s.mean)
    };
    let mut out = Vec::new();
    for &value in &spec.values {
        for &metric in &spec.metrics {
            for (i, &first) in spec.schemes.iter().enumerate() {
                for &second in &spec.schemes[i + 1..] {
                    if let (Some(x), Some(y)) = (mean(value, first, metric), mean(value, second, metric)) {
                        out.push(GapRow {
                            value,
                            metric,
                            first,
                            second,
                            gap_percent: rate::percentage_gap(x, y),
                        });
                    }
                }
            }
        }
    }
    out
}

/// One OAOP solve with a per-iteration record of the multipliers.
pub fn convergence_trace(
    config: &NetworkConfig,
    channels: &ChannelRealization,
    options: &SolverOptions,
) -> Result<Vec<TraceRow>> {
    let topology = Topology::build(config)?;
    let options = SolverOptions {
        record_trace: true,
        ..options.clone()
    };
    Ok(dual_solver::solve_oaop(config, &topology, channels, &options)?.trace)
}

pub const RAW_HEADER: [&str; 10] = [
    "sweep_param",
    "value",
    "trial",
    "scheme",
    "min_rate",
    "sum_throughput",
    "pr",
    "iterations",
    "converged",
    "seed",
];

pub const SUMMARY_HEADER: [&str; 7] = [
    "sweep_param",
    "value",
    "scheme",
    "metric",
    "trials",
    "mean",
    "std_error",
];

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes the raw per-trial rows. Failed solves leave their metric fields
/// empty; so does an undefined PR.
pub fn emit_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(RAW_HEADER)?;
    let param = result.spec.param.name();
    for r in &result.rows {
        w.write_record([
            param.to_string(),
            r.value.to_string(),
            r.trial.to_string(),
            r.scheme.name().to_string(),
            opt(r.min_rate),
            opt(r.sum_throughput),
            opt(r.pr),
            r.iterations.to_string(),
            r.converged.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes mean and standard error per (value, scheme, metric).
pub fn emit_summary_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SUMMARY_HEADER)?;
    let param = result.spec.param.name();
    for s in &result.summary {
        w.write_record([
            param.to_string(),
            s.value.to_string(),
            s.scheme.name().to_string(),
            s.metric.name().to_string(),
            s.stat.map_or(0, |st| st.n).to_string(),
            opt(s.stat.map(|st| st.mean)),
            opt(s.stat.map(|st| st.std_error)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub const TRACE_HEADER: [&str; 8] = [
    "iteration",
    "step",
    "lambda_mean",
    "lambda_max",
    "eta",
    "v",
    "min_rate",
    "max_change",
];

/// Writes a convergence trace; per-BS prices are `;`-joined in one field.
pub fn emit_trace_csv(trace: &[TraceRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TRACE_HEADER)?;
    for row in trace {
        let n = row.lambda.len().max(1) as f64;
        let eta: Vec<String> = row.eta.iter().map(f64::to_string).collect();
        w.write_record([
            row.iteration.to_string(),
            row.step.to_string(),
            (row.lambda.iter().sum::<f64>() / n).to_string(),
            row.lambda.iter().copied().fold(0.0, f64::max).to_string(),
            eta.join(";"),
            row.v.to_string(),
            row.min_rate.to_string(),
            row.max_change.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

const SERIES_COLORS: [&str; 3] = ["#1b6ac9", "#d1495b", "#2e933c"];

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Renders `metric` against the swept parameter as an SVG line chart, one
/// polyline per scheme. Points with no data are skipped.
pub fn render_plot(result: &SweepResult, metric: Metric) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 150.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 55.0;
    let values = &result.spec.values;
    let series: Vec<(Scheme, Vec<(f64, f64)>)> = result
        .spec
        .schemes
        .iter()
        .map(|&s| {
            let pts = values
                .iter()
                .zip(result.means(s, metric))
                .filter_map(|(&x, y)| y.map(|y| (x, y)))
                .collect();
            (s, pts)
        })
        .collect();
    let (mut x_lo, mut x_hi) = (values[0], values[values.len() - 1]);
    if x_hi <= x_lo {
        x_lo -= 0.5;
        x_hi += 0.5;
    }
    let ys: Vec<f64> = series.iter().flat_map(|(_, p)| p.iter().map(|q| q.1)).collect();
    let (mut y_lo, mut y_hi) = ys.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
        (lo.min(y), hi.max(y))
    });
    if !y_lo.is_finite() {
        (y_lo, y_hi) = (0.0, 1.0);
    }
    let pad = if y_hi > y_lo { 0.05 * (y_hi - y_lo) } else { 0.5 };
    y_lo -= pad;
    y_hi += pad;
    let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - (y - y_lo) / (y_hi - y_lo) * (H - TOP - BOTTOM);

    let mut svg = String::new();
    let mut line = |s: String| {
        svg.push_str(&s);
        svg.push('\n');
    };
    line(format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" data-x-min="{x_lo}" data-x-max="{x_hi}" data-y-min="{y_lo}" data-y-max="{y_hi}">"#
    ));
    line(format!(r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#));
    line(format!(
        r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{} vs {}</text>"#,
        (LEFT + W - RIGHT) / 2.0,
        xml_escape(metric.label()),
        result.spec.param.name()
    ));
    let (x0, x1, y0, y1) = (px(x_lo), px(x_hi), py(y_lo), py(y_hi));
    line(format!(
        r#"<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black" stroke-width="1"/>"#
    ));
    for &x in values {
        let sx = px(x);
        line(format!(
            r#"<line x1="{sx}" y1="{y0}" x2="{sx}" y2="{}" stroke="black"/>"#,
            y0 + 5.0
        ));
        line(format!(
            r#"<text x="{sx}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="11">{x}</text>"#,
            y0 + 18.0
        ));
    }
    for k in 0..=4 {
        let y = y_lo + (y_hi - y_lo) * k as f64 / 4.0;
        let sy = py(y);
        line(format!(
            r#"<line x1="{}" y1="{sy}" x2="{x0}" y2="{sy}" stroke="black"/>"#,
            x0 - 5.0
        ));
        line(format!(
            r#"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="11">{:.3}</text>"#,
            x0 - 8.0,
            sy + 4.0,
            y
        ));
    }
    line(format!(
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">{}</text>"#,
        (x0 + x1) / 2.0,
        H - 12.0,
        result.spec.param.name()
    ));
    line(format!(
        r#"<text x="16" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {})">{}</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0,
        xml_escape(metric.label())
    ));
    for (i, (scheme, pts)) in series.iter().enumerate() {
        let color = SERIES_COLORS[i % SERIES_COLORS.len()];
        let points: Vec<String> = pts.iter().map(|&(x, y)| format!("{},{}", px(x), py(y))).collect();
        line(format!(
            r#"<polyline data-scheme="{scheme}" points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            points.join(" ")
        ));
        for &(x, y) in pts {
            line(format!(
                r#"<circle cx="{}" cy="{}" r="3" fill="{color}"/>"#,
                px(x),
                py(y)
            ));
        }
        let ly = TOP + 20.0 * i as f64;
        line(format!(
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            W - RIGHT + 15.0,
            W - RIGHT + 40.0
        ));
        line(format!(
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12">{scheme}</text>"#,
            W - RIGHT + 46.0,
            ly + 4.0
        ));
    }
    line("</svg>".to_string());
    svg
}

pub fn emit_plot(result: &SweepResult, metric: Metric, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(render_plot(result, metric).as_bytes())?;
    w.flush()?;
    Ok(())
}
