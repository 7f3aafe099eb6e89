//! `bgraph`: generate uncertain logs, build and check behavior graphs,
//! compute directly-follows bounds and run the scaling experiments.
//!
//! Exit codes: 0 success, 1 bad input (usage, parse or validation errors),
//! 2 internal failure (including a failed equivalence check).

use std::fmt;
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bgraph_bench::{
    emit_report, fit_scaling_exponent, run_length_experiment, run_ntraces_experiment,
    run_uncertainty_experiment, summary, Algorithm, BenchError,
};
use bgraph_core::graph::{build_baseline, build_sweep};
use bgraph_core::loggen::{generate_log, GenerationSpec};
use bgraph_core::logio::{export_dot, import_certain_csv, read_log, write_log, ColumnMap};
use bgraph_core::oracle::{covering_relation, udfg_bounds_log};
use bgraph_core::UncertainLog;

#[derive(Debug, Parser)]
#[command(name = "bgraph", version, about = "Behavior graphs for uncertain event logs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic uncertain log
    Generate {
        #[arg(long)]
        traces: usize,
        #[arg(long)]
        length: usize,
        #[arg(long = "p-time")]
        p_time: f64,
        #[arg(long = "p-activity", default_value_t = 0.0)]
        p_activity: f64,
        #[arg(long = "p-indeterminate", default_value_t = 0.0)]
        p_indeterminate: f64,
        #[arg(long, default_value_t = 26)]
        alphabet: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the behavior graph of every trace
    Graph {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum)]
        algorithm: AlgorithmArg,
        /// Write one DOT file per trace into this directory
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Compare sweep and baseline (and optionally the brute-force oracle)
    Check {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        oracle: bool,
        #[arg(long = "max-oracle-events", default_value_t = 8)]
        max_oracle_events: usize,
    },
    /// Exact directly-follows bounds, written as CSV
    Udfg {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a scaling experiment
    Bench {
        #[arg(value_enum)]
        experiment: Experiment,
        /// Comma-separated parameter values
        #[arg(long)]
        points: Option<String>,
        #[arg(long)]
        traces: Option<usize>,
        #[arg(long)]
        length: Option<usize>,
        #[arg(long = "p-time")]
        p_time: Option<f64>,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        report: PathBuf,
    },
    /// Import a certain log from CSV
    #[command(name = "import-csv")]
    ImportCsv {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "case-col")]
        case_col: String,
        #[arg(long = "activity-col")]
        activity_col: String,
        #[arg(long = "time-col")]
        time_col: String,
        #[arg(long = "id-col")]
        id_col: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Sweep,
    Baseline,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Self {
        match a {
            AlgorithmArg::Sweep => Algorithm::Sweep,
            AlgorithmArg::Baseline => Algorithm::Baseline,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Experiment {
    Length,
    Traces,
    Uncertainty,
}

enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 1,
            Failure::Internal(_) => 2,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Input(m) | Failure::Internal(m) => f.write_str(m),
        }
    }
}

fn input<E: fmt::Display>(context: impl fmt::Display) -> impl FnOnce(E) -> Failure {
    move |e| Failure::Input(format!("{context}: {e}"))
}

fn internal<E: fmt::Display>(context: impl fmt::Display) -> impl FnOnce(E) -> Failure {
    move |e| Failure::Internal(format!("{context}: {e}"))
}

fn load(path: &Path) -> Result<UncertainLog, Failure> {
    let file = File::open(path).map_err(input(path.display()))?;
    read_log(BufReader::new(file)).map_err(input(path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(input(path.display()))
}

fn dot_file_name(case: &str) -> String {
    let safe: String = case
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
        .collect();
    format!("{safe}.dot")
}

fn parse_points<T: std::str::FromStr>(raw: &str) -> Result<Vec<T>, Failure>
where
    T::Err: fmt::Display,
{
    raw.split(',')
        .map(|s| s.trim().parse::<T>().map_err(input(format!("--points value {s:?}"))))
        .collect()
}

fn bench_failure(e: BenchError) -> Failure {
    match e {
        BenchError::Mismatch { .. } | BenchError::Graph(_) | BenchError::Io(_) => {
            Failure::Internal(e.to_string())
        }
        _ => Failure::Input(e.to_string()),
    }
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Generate {
            traces,
            length,
            p_time,
            p_activity,
            p_indeterminate,
            alphabet,
            seed,
            out,
        } => {
            let spec = GenerationSpec {
                n_traces: traces,
                trace_length: length,
                p_time,
                p_activity,
                p_indeterminate,
                activity_alphabet_size: alphabet,
                seed,
            };
            let log = generate_log(&spec).map_err(input("generate"))?;
            write_log(&log, create(&out)?).map_err(internal(out.display()))?;
            eprintln!("wrote {} traces, {} events to {}", log.traces.len(), log.event_count(), out.display());
        }
        Command::Graph {
            input: path,
            algorithm,
            dot,
        } => {
            let log = load(&path)?;
            let algorithm = Algorithm::from(algorithm);
            if let Some(dir) = &dot {
                fs::create_dir_all(dir).map_err(input(dir.display()))?;
            }
            let stdout = io::stdout();
            let mut out = stdout.lock();
            for trace in &log.traces {
                let g = algorithm.build(trace).map_err(input(&trace.case_id))?;
                match &dot {
                    Some(dir) => {
                        let file = dir.join(dot_file_name(trace.case_id.as_str()));
                        export_dot(&g, create(&file)?).map_err(internal(file.display()))?;
                    }
                    None => {
                        writeln!(out, "{}\t{}\t{}", trace.case_id, g.vertex_count(), g.edge_count())
                            .map_err(internal("stdout"))?;
                    }
                }
            }
            if let Some(dir) = &dot {
                eprintln!("wrote {} DOT files to {}", log.traces.len(), dir.display());
            }
        }
        Command::Check {
            input: path,
            oracle,
            max_oracle_events,
        } => {
            let log = load(&path)?;
            let mut oracle_checked = 0;
            for trace in &log.traces {
                let sweep = build_sweep(trace).map_err(input(&trace.case_id))?;
                let baseline = build_baseline(trace).map_err(input(&trace.case_id))?;
                if sweep != baseline {
                    return Err(Failure::Internal(format!(
                        "trace {}: sweep and baseline graphs differ",
                        trace.case_id
                    )));
                }
                if oracle && trace.len() <= max_oracle_events {
                    let cover = covering_relation(trace).map_err(input(&trace.case_id))?;
                    if cover != sweep.edge_ids() {
                        return Err(Failure::Internal(format!(
                            "trace {}: graphs differ from the covering relation",
                            trace.case_id
                        )));
                    }
                    oracle_checked += 1;
                }
            }
            let n = log.traces.len();
            if oracle {
                println!("all {n} traces equivalent ({oracle_checked} oracle-checked, {} sweep/baseline only)", n - oracle_checked);
            } else {
                println!("all {n} traces equivalent");
            }
        }
        Command::Udfg { input: path, out } => {
            let log = load(&path)?;
            let bounds = udfg_bounds_log(&log).map_err(input(path.display()))?;
            let mut w = create(&out)?;
            let mut write = || -> io::Result<()> {
                writeln!(w, "activity_a,activity_b,min,max")?;
                for ((a, b), (lo, hi)) in bounds.iter() {
                    writeln!(w, "{a},{b},{lo},{hi}")?;
                }
                w.flush()
            };
            write().map_err(internal(out.display()))?;
        }
        Command::Bench {
            experiment,
            points,
            traces,
            length,
            p_time,
            reps,
            seed,
            report,
        } => {
            let result = match experiment {
                Experiment::Length => {
                    let lengths = match &points {
                        Some(raw) => parse_points::<usize>(raw)?,
                        None => vec![64, 128, 256, 512],
                    };
                    run_length_experiment(&lengths, traces.unwrap_or(50), p_time.unwrap_or(0.4), reps, seed)
                }
                Experiment::Traces => {
                    let ns = match &points {
                        Some(raw) => parse_points::<usize>(raw)?,
                        None => vec![250, 500, 1000, 2000],
                    };
                    run_ntraces_experiment(&ns, length.unwrap_or(50), p_time.unwrap_or(0.4), reps, seed)
                }
                Experiment::Uncertainty => {
                    let ps = match &points {
                        Some(raw) => parse_points::<f64>(raw)?,
                        None => vec![0.0, 0.4, 0.8],
                    };
                    run_uncertainty_experiment(&ps, traces.unwrap_or(100), length.unwrap_or(100), reps, seed)
                }
            }
            .map_err(bench_failure)?;
            let fits: Vec<_> = Algorithm::ALL
                .iter()
                .filter_map(|&a| fit_scaling_exponent(&result, a).ok())
                .collect();
            emit_report(&result, &fits, create(&report)?).map_err(bench_failure)?;
            print!("{}", summary(&result, &fits));
        }
        Command::ImportCsv {
            input: path,
            case_col,
            activity_col,
            time_col,
            id_col,
            out,
        } => {
            let columns = ColumnMap {
                case: case_col,
                activity: activity_col,
                time: time_col,
                id: id_col,
            };
            let file = File::open(&path).map_err(input(path.display()))?;
            let log = import_certain_csv(BufReader::new(file), &columns).map_err(input(path.display()))?;
            write_log(&log, create(&out)?).map_err(internal(out.display()))?;
            eprintln!("imported {} traces, {} events", log.traces.len(), log.event_count());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
