//! Sweep cost on its worst case: nested intervals, where every scan runs to
//! the end of the endpoint list without finding a successor.

use bgraph_bench::{fit_power_law, time_construction, Algorithm};
use bgraph_core::graph::{build_baseline, build_sweep};
use bgraph_core::model::{EventId, Timestamp, UncertainEvent, UncertainLog, UncertainTrace};

fn nested(len: usize, case: usize) -> UncertainTrace {
    let span = 10 * len as i64;
    let events = (0..len)
        .map(|i| {
            UncertainEvent::new(
                EventId::new(format!("c{case}-{i:05}")).unwrap(),
                ["a"],
                Timestamp(i as i64),
                Timestamp(span - i as i64),
                true,
            )
            .unwrap()
        })
        .collect();
    UncertainTrace::new(format!("c{case}"), events)
}

#[test]
fn nested_intervals_have_no_edges() {
    let t = nested(30, 0);
    let g = build_sweep(&t).unwrap();
    assert_eq!(g.edge_count(), 0);
    assert_eq!(g, build_baseline(&t).unwrap());
}

#[test]
fn sweep_is_quadratic_on_nested_intervals() {
    let lengths = [1000usize, 2000, 4000, 8000];
    let seconds: Vec<f64> = lengths
        .iter()
        .map(|&l| {
            let log = UncertainLog::new((0..4).map(|c| nested(l, c)).collect());
            time_construction(&log, Algorithm::Sweep, 5).unwrap()
        })
        .collect();
    let sizes: Vec<f64> = lengths.iter().map(|&l| l as f64).collect();
    let (exponent, _) = fit_power_law(&sizes, &seconds).unwrap();
    println!("nested-interval sweep exponent {exponent:.2}");
    assert!((1.6..=2.4).contains(&exponent), "exponent {exponent:.2}");
}
