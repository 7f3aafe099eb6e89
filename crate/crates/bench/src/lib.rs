//! Scaling experiments for behavior graph construction.
//!
//! Three experiments vary one parameter of the synthetic log at a time: trace
//! length, number of traces, or the fraction of events with interval
//! timestamps. At every point the log is generated outside the timer, both
//! constructions are run once untimed and compared trace by trace (any
//! mismatch aborts), and then each construction is timed `reps` times over the
//! whole log on the calling thread. The reported figure is the median.
//!
//! [`fit_scaling_exponent`] fits `log(time) = a + k log(size)` by least
//! squares; `k` is the empirical exponent.

use std::fmt::Write as _;
use std::hint::black_box;
use std::io::{self, Write};
use std::time::Instant;

use bgraph_core::graph::{build_baseline, build_sweep, BehaviorGraph, GraphError};
use bgraph_core::loggen::{generate_log, GenerationSpec, SpecError};
use bgraph_core::model::{UncertainLog, UncertainTrace};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("no measurement points given")]
    NoPoints,
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("fit needs at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("fit needs strictly increasing positive sizes")]
    NotIncreasing,
    #[error("fit needs positive times")]
    NonPositiveTime,
    #[error("baseline and sweep disagree on trace {case}")]
    Mismatch { case: String },
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Baseline,
    Sweep,
}

impl Algorithm {
    pub const ALL: [Algorithm; 2] = [Algorithm::Baseline, Algorithm::Sweep];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Baseline => "baseline",
            Algorithm::Sweep => "sweep",
        }
    }

    pub fn build(self, trace: &UncertainTrace) -> Result<BehaviorGraph, GraphError> {
        match self {
            Algorithm::Baseline => build_baseline(trace),
            Algorithm::Sweep => build_sweep(trace),
        }
    }
}

/// The swept parameter of an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameter {
    Length,
    Traces,
    Uncertainty,
}

impl Parameter {
    pub fn name(self) -> &'static str {
        match self {
            Parameter::Length => "l",
            Parameter::Traces => "n",
            Parameter::Uncertainty => "p",
        }
    }

    fn describe(self) -> &'static str {
        match self {
            Parameter::Length => "trace length",
            Parameter::Traces => "number of traces",
            Parameter::Uncertainty => "fraction of uncertain timestamps",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkPoint {
    pub value: f64,
    pub baseline_seconds: f64,
    pub sweep_seconds: f64,
}

impl BenchmarkPoint {
    pub fn seconds(&self, algorithm: Algorithm) -> f64 {
        match algorithm {
            Algorithm::Baseline => self.baseline_seconds,
            Algorithm::Sweep => self.sweep_seconds,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkResult {
    pub parameter: Parameter,
    pub points: Vec<BenchmarkPoint>,
    pub repetitions: usize,
    pub seed: u64,
}

impl BenchmarkResult {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn seconds(&self, algorithm: Algorithm) -> Vec<f64> {
        self.points.iter().map(|p| p.seconds(algorithm)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub algorithm: Algorithm,
    pub exponent: f64,
    /// Root-mean-square residual in natural-log space.
    pub residual: f64,
}

/// Median of a non-empty sample.
pub fn median(samples: &mut [f64]) -> f64 {
    assert!(!samples.is_empty(), "median of empty sample");
    samples.sort_by(f64::total_cmp);
    let mid = samples.len() / 2;
    if samples.len() % 2 == 1 {
        samples[mid]
    } else {
        (samples[mid - 1] + samples[mid]) / 2.0
    }
}

fn build_all(log: &UncertainLog, algorithm: Algorithm) -> Result<Vec<BehaviorGraph>, GraphError> {
    log.traces.iter().map(|t| algorithm.build(t)).collect()
}

/// Builds both graphs for every trace and fails on the first disagreement.
/// Doubles as the warm-up run.
pub fn check_equivalence(log: &UncertainLog) -> Result<(), BenchError> {
    let baseline = build_all(log, Algorithm::Baseline)?;
    let sweep = build_all(log, Algorithm::Sweep)?;
    for (b, s) in baseline.iter().zip(&sweep) {
        if b != s {
            return Err(BenchError::Mismatch {
                case: b.case_id().to_owned(),
            });
        }
    }
    Ok(())
}

/// Median wall-clock seconds to build every graph of `log`, single-threaded.
pub fn time_construction(
    log: &UncertainLog,
    algorithm: Algorithm,
    reps: usize,
) -> Result<f64, BenchError> {
    if reps == 0 {
        return Err(BenchError::NotPositive("repetitions"));
    }
    let mut samples = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        let graphs = build_all(black_box(log), algorithm)?;
        samples.push(start.elapsed().as_secs_f64());
        drop(black_box(graphs));
    }
    Ok(median(&mut samples))
}

fn measure_point(value: f64, log: &UncertainLog, reps: usize) -> Result<BenchmarkPoint, BenchError> {
    check_equivalence(log)?;
    Ok(BenchmarkPoint {
        value,
        baseline_seconds: time_construction(log, Algorithm::Baseline, reps)?,
        sweep_seconds: time_construction(log, Algorithm::Sweep, reps)?,
    })
}

fn spec(n: usize, l: usize, p: f64, seed: u64) -> GenerationSpec {
    GenerationSpec {
        n_traces: n,
        trace_length: l,
        p_time: p,
        seed,
        ..GenerationSpec::default()
    }
}

fn run<T: Copy>(
    parameter: Parameter,
    values: &[T],
    reps: usize,
    seed: u64,
    as_f64: impl Fn(T) -> f64,
    spec_at: impl Fn(T) -> GenerationSpec,
) -> Result<BenchmarkResult, BenchError> {
    if values.is_empty() {
        return Err(BenchError::NoPoints);
    }
    if reps == 0 {
        return Err(BenchError::NotPositive("repetitions"));
    }
    let points = values
        .iter()
        .map(|&v| {
            let log = generate_log(&spec_at(v))?;
            measure_point(as_f64(v), &log, reps)
        })
        .collect::<Result<_, BenchError>>()?;
    Ok(BenchmarkResult {
        parameter,
        points,
        repetitions: reps,
        seed,
    })
}

/// Varies trace length at fixed `n` and `p`.
pub fn run_length_experiment(
    lengths: &[usize],
    n: usize,
    p: f64,
    reps: usize,
    seed: u64,
) -> Result<BenchmarkResult, BenchError> {
    run(Parameter::Length, lengths, reps, seed, |l| l as f64, |l| spec(n, l, p, seed))
}

/// Varies the number of traces at fixed `l` and `p`.
pub fn run_ntraces_experiment(
    ns: &[usize],
    l: usize,
    p: f64,
    reps: usize,
    seed: u64,
) -> Result<BenchmarkResult, BenchError> {
    run(Parameter::Traces, ns, reps, seed, |n| n as f64, |n| spec(n, l, p, seed))
}

/// Varies the fraction of interval-timestamped events at fixed `n` and `l`.
pub fn run_uncertainty_experiment(
    ps: &[f64],
    n: usize,
    l: usize,
    reps: usize,
    seed: u64,
) -> Result<BenchmarkResult, BenchError> {
    run(Parameter::Uncertainty, ps, reps, seed, |p| p, |p| spec(n, l, p, seed))
}

/// Least-squares slope through `(ln size, ln seconds)`.
pub fn fit_scaling_exponent(
    result: &BenchmarkResult,
    algorithm: Algorithm,
) -> Result<ScalingFit, BenchError> {
    fit_power_law(&result.values(), &result.seconds(algorithm)).map(|(exponent, residual)| {
        ScalingFit {
            algorithm,
            exponent,
            residual,
        }
    })
}

/// Returns `(slope, rms residual)` of the log-log regression.
pub fn fit_power_law(sizes: &[f64], seconds: &[f64]) -> Result<(f64, f64), BenchError> {
    const MIN_POINTS: usize = 3;
    if sizes.len() < MIN_POINTS {
        return Err(BenchError::InsufficientPoints {
            needed: MIN_POINTS,
            got: sizes.len(),
        });
    }
    if sizes[0] <= 0.0 || sizes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(BenchError::NotIncreasing);
    }
    if seconds.iter().any(|&t| t <= 0.0 || !t.is_finite()) {
        return Err(BenchError::NonPositiveTime);
    }
    let xs: Vec<f64> = sizes.iter().map(|s| s.ln()).collect();
    let ys: Vec<f64> = seconds.iter().map(|t| t.ln()).collect();
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mean_x).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (intercept + slope * x)).powi(2))
        .sum();
    Ok((slope, (rss / n).sqrt()))
}

pub const CSV_HEADER: &str = "param,value,algorithm,seconds";

/// Writes the measurements as CSV (one row per point and algorithm).
/// `fits` are accepted so callers can hand over everything at once; they go
/// into [`summary`], not the CSV.
pub fn emit_report<W: Write>(
    result: &BenchmarkResult,
    _fits: &[ScalingFit],
    mut out: W,
) -> Result<usize, BenchError> {
    let mut text = String::new();
    text.push_str(CSV_HEADER);
    text.push('\n');
    for point in &result.points {
        for algorithm in Algorithm::ALL {
            writeln!(
                text,
                "{},{},{},{:.9}",
                result.parameter.name(),
                point.value,
                algorithm.name(),
                point.seconds(algorithm)
            )
            .expect("write to String");
        }
    }
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(text.len())
}

/// Human-readable table plus fitted exponents rounded to two decimals.
pub fn summary(result: &BenchmarkResult, fits: &[ScalingFit]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} ({}): {} points, median of {} runs, seed {}",
        result.parameter.name(),
        result.parameter.describe(),
        result.points.len(),
        result.repetitions,
        result.seed
    );
    let _ = writeln!(s, "{:>10} {:>14} {:>14} {:>8}", result.parameter.name(), "baseline s", "sweep s", "ratio");
    for p in &result.points {
        let _ = writeln!(
            s,
            "{:>10} {:>14.6} {:>14.6} {:>7.2}%",
            p.value,
            p.baseline_seconds,
            p.sweep_seconds,
            100.0 * p.sweep_seconds / p.baseline_seconds
        );
    }
    for fit in fits {
        let _ = writeln!(
            s,
            "fitted exponent {}: {:.2} (rms residual {:.3})",
            fit.algorithm.name(),
            fit.exponent,
            fit.residual
        );
    }
    s
}
