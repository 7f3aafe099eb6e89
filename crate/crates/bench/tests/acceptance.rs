//! Acceptance suite. Each test checks one criterion and prints a single
//! `criterion N ... PASS|FAIL` line. Tests hold a shared lock so timing
//! criteria never run alongside other work in this binary.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use bgraph_bench::{
    fit_scaling_exponent, run_length_experiment, run_ntraces_experiment,
    run_uncertainty_experiment, summary, Algorithm, BenchmarkResult,
};
use bgraph_core::fixtures::{case_872, case_945};
use bgraph_core::graph::{build_baseline, build_sweep};
use bgraph_core::loggen::{generate_log, GenerationSpec};
use bgraph_core::logio::{read_log, render_dot, write_log};
use bgraph_core::model::EventId;
use bgraph_core::oracle::{covering_relation, possible_immediate_successor, udfg_bounds_trace};

static SERIAL: Mutex<()> = Mutex::new(());

const SEED: u64 = 20_200_608;

fn verdict(n: u32, title: &str, started: Instant, limit: Duration, checks: &[(String, bool)]) {
    let elapsed = started.elapsed();
    let in_time = elapsed < limit;
    let ok = in_time && checks.iter().all(|(_, pass)| *pass);
    let detail: Vec<String> = checks
        .iter()
        .map(|(what, pass)| format!("{what}{}", if *pass { "" } else { " [FAILED]" }))
        .collect();
    println!(
        "criterion {n} {title} ... {} ({}; {:.2}s of {}s)",
        if ok { "PASS" } else { "FAIL" },
        detail.join("; "),
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    assert!(ok, "criterion {n} failed");
}

fn edge_set(pairs: &[(&str, &str)]) -> std::collections::BTreeSet<(EventId, EventId)> {
    pairs
        .iter()
        .map(|(a, b)| (EventId::new(*a).unwrap(), EventId::new(*b).unwrap()))
        .collect()
}

#[test]
fn criterion_1_golden_graphs() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let started = Instant::now();
    let expect_872 = edge_set(&[
        ("e1", "e2"),
        ("e1", "e3"),
        ("e2", "e4"),
        ("e2", "e5"),
        ("e3", "e6"),
        ("e4", "e6"),
        ("e5", "e6"),
    ]);
    let expect_945 = edge_set(&[("e1", "e2"), ("e1", "e3"), ("e2", "e4"), ("e3", "e5"), ("e4", "e5")]);
    let (t872, t945) = (case_872(), case_945());
    let checks = vec![
        ("case 872 sweep".to_owned(), build_sweep(&t872).unwrap().edge_ids() == expect_872),
        ("case 872 baseline".to_owned(), build_baseline(&t872).unwrap().edge_ids() == expect_872),
        ("case 945 sweep".to_owned(), build_sweep(&t945).unwrap().edge_ids() == expect_945),
        ("case 945 baseline".to_owned(), build_baseline(&t945).unwrap().edge_ids() == expect_945),
    ];
    verdict(1, "golden graphs", started, Duration::from_secs(1), &checks);
}

fn random_spec(length: usize, p: f64, seed: u64) -> GenerationSpec {
    GenerationSpec {
        n_traces: 1,
        trace_length: length,
        p_time: p,
        p_activity: 0.25,
        p_indeterminate: 0.25,
        activity_alphabet_size: 4,
        seed,
    }
}

#[test]
fn criterion_2_three_way_equivalence() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let started = Instant::now();
    let (mut total, mut agree) = (0, 0);
    for length in 1..=8 {
        for p in [0.0, 0.25, 0.5, 1.0] {
            for s in 0..32 {
                let log = generate_log(&random_spec(length, p, SEED + s)).unwrap();
                for t in &log.traces {
                    total += 1;
                    let sweep = build_sweep(t).unwrap();
                    let baseline = build_baseline(t).unwrap();
                    if sweep == baseline && sweep.edge_ids() == covering_relation(t).unwrap() {
                        agree += 1;
                    }
                }
            }
        }
    }
    let checks = vec![
        (format!("{total} traces"), total >= 1000),
        (format!("{agree}/{total} agree"), agree == total),
    ];
    verdict(2, "sweep = baseline = covering oracle", started, Duration::from_secs(30), &checks);
}

#[test]
fn criterion_3_edge_soundness() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let started = Instant::now();
    let (mut traces, mut edges, mut sound) = (0, 0, 0);
    for length in 1..=6 {
        for p in [0.25, 0.5, 0.75, 1.0] {
            for s in 0..10 {
                let log = generate_log(&random_spec(length, p, SEED ^ (s << 8))).unwrap();
                for t in &log.traces {
                    traces += 1;
                    for (v, w) in build_sweep(t).unwrap().edges() {
                        edges += 1;
                        if possible_immediate_successor(t, v.as_str(), w.as_str()).unwrap() {
                            sound += 1;
                        }
                    }
                }
            }
        }
    }
    let checks = vec![
        (format!("{traces} traces"), traces >= 200),
        (format!("{sound}/{edges} edges realisable"), sound == edges && edges > 0),
    ];
    verdict(3, "edge soundness", started, Duration::from_secs(30), &checks);
}

fn print_summary(result: &BenchmarkResult, fit: bool) {
    let fits: Vec<_> = if fit {
        Algorithm::ALL
            .iter()
            .filter_map(|&a| fit_scaling_exponent(result, a).ok())
            .collect()
    } else {
        vec![]
    };
    print!("{}", summary(result, &fits));
}

#[test]
fn criterion_4_scaling_exponents() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let started = Instant::now();
    let result = run_length_experiment(&[64, 128, 256, 512], 50, 0.4, 5, SEED).unwrap();
    print_summary(&result, true);
    let baseline = fit_scaling_exponent(&result, Algorithm::Baseline).unwrap();
    let sweep = fit_scaling_exponent(&result, Algorithm::Sweep).unwrap();
    let last = result.points.last().unwrap();
    let share = last.sweep_seconds / last.baseline_seconds;
    let checks = vec![
        (
            format!("baseline exponent {:.2} in [2.4, 3.6]", baseline.exponent),
            (2.4..=3.6).contains(&baseline.exponent),
        ),
        (
            format!("sweep exponent {:.2} in [1.3, 2.5]", sweep.exponent),
            (1.3..=2.5).contains(&sweep.exponent),
        ),
        (format!("sweep/baseline at l=512 {:.3}% <= 10%", 100.0 * share), share <= 0.10),
    ];
    verdict(4, "scaling exponents", started, Duration::from_secs(300), &checks);
}

#[test]
fn criterion_5_linear_in_traces() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let started = Instant::now();
    let result = run_ntraces_experiment(&[250, 500, 1000, 2000], 50, 0.4, 5, SEED).unwrap();
    print_summary(&result, true);
    let at = |n: f64| result.points.iter().find(|p| p.value == n).unwrap();
    let checks: Vec<_> = Algorithm::ALL
        .iter()
        .map(|&a| {
            let ratio = at(2000.0).seconds(a) / at(500.0).seconds(a);
            (
                format!("{} t(2000)/t(500) = {ratio:.2} in [2.8, 5.2]", a.name()),
                (2.8..=5.2).contains(&ratio),
            )
        })
        .collect();
    verdict(5, "linearity in n", started, Duration::from_secs(300), &checks);
}

#[test]
fn criterion_6_uncertainty_sensitivity() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let started = Instant::now();
    let result = run_uncertainty_experiment(&[0.0, 0.4, 0.8], 100, 100, 10, SEED).unwrap();
    print_summary(&result, false);
    let sweep = result.seconds(Algorithm::Sweep);
    let baseline = result.seconds(Algorithm::Baseline);
    let spread = sweep.iter().cloned().fold(f64::MIN, f64::max) / sweep.iter().cloned().fold(f64::MAX, f64::min);
    let faster = sweep.iter().zip(&baseline).all(|(s, b)| s < b);
    let non_increasing = baseline.windows(2).all(|w| w[1] <= w[0] * 1.10);
    let checks = vec![
        (format!("sweep max/min {spread:.2} <= 2"), spread <= 2.0),
        ("sweep faster at every p".to_owned(), faster),
        (
            format!(
                "baseline non-increasing within 10% ({})",
                baseline.iter().map(|b| format!("{b:.4}s")).collect::<Vec<_>>().join(" -> ")
            ),
            non_increasing,
        ),
    ];
    verdict(6, "p-sensitivity", started, Duration::from_secs(300), &checks);
}

#[test]
fn criterion_7_udfg_golden() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let started = Instant::now();
    let bounds = udfg_bounds_trace(&case_945()).unwrap();
    let all_zero_one = bounds.iter().all(|(_, &b)| b == (0, 1));
    let checks = vec![
        (format!("{} activity pairs reported", bounds.len()), !bounds.is_empty()),
        ("every pair has bounds (0, 1)".to_owned(), all_zero_one),
    ];
    verdict(7, "UDFG golden", started, Duration::from_secs(5), &checks);
}

#[test]
fn criterion_8_roundtrip_and_determinism() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let started = Instant::now();
    let (mut identical, mut regenerated, mut dot_stable) = (0, 0, 0);
    let logs = 100;
    for i in 0..logs {
        let spec = GenerationSpec {
            n_traces: 1 + (i % 7) as usize,
            trace_length: 1 + (i % 13) as usize,
            p_time: (i % 5) as f64 / 4.0,
            p_activity: (i % 3) as f64 / 2.0,
            p_indeterminate: (i % 4) as f64 / 3.0,
            activity_alphabet_size: 6,
            seed: SEED.wrapping_mul(i + 1),
        };
        let log = generate_log(&spec).unwrap();
        let mut bytes = Vec::new();
        write_log(&log, &mut bytes).unwrap();
        if read_log(bytes.as_slice()).unwrap() == log {
            identical += 1;
        }
        let mut again = Vec::new();
        write_log(&generate_log(&spec).unwrap(), &mut again).unwrap();
        if again == bytes {
            regenerated += 1;
        }
        let stable = log.traces.iter().all(|t| {
            render_dot(&build_sweep(t).unwrap()) == render_dot(&build_sweep(t).unwrap())
                && render_dot(&build_sweep(t).unwrap()) == render_dot(&build_baseline(t).unwrap())
        });
        if stable {
            dot_stable += 1;
        }
    }
    let checks = vec![
        (format!("{identical}/{logs} round trips identical"), identical == logs),
        (format!("{regenerated}/{logs} regenerations byte-identical"), regenerated == logs),
        (format!("{dot_stable}/{logs} DOT exports byte-identical"), dot_stable == logs),
    ];
    verdict(8, "round trip and determinism", started, Duration::from_secs(30), &checks);
}
