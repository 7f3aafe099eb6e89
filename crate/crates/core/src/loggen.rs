//! Seeded synthetic uncertain logs.
//!
//! A certain log places event `k` (1-based) of every trace at `k * STRIDE_MS`
//! milliseconds. Uncertainty is then injected per trace: a fixed fraction of
//! events is widened into intervals overlapping both neighbours, gains extra
//! candidate labels, or is marked indeterminate.
//!
//! Each trace draws from its own ChaCha stream (stream = trace index), so
//! traces can be generated in any order or in parallel with identical output.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{EventId, Timestamp, UncertainEvent, UncertainLog, UncertainTrace};

/// Spacing between consecutive generated events.
pub const STRIDE_MS: i64 = 1000;
/// Interval half-width relative to the local stride.
pub const HALF_WIDTH_FACTOR: f64 = 1.5;

const TIME_SALT: u64 = 0x74_69_6d_65;
const ACTIVITY_SALT: u64 = 0x61_63_74_73;
const INDETERMINATE_SALT: u64 = 0x69_6e_64_74;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("{name} = {value} is outside [0, 1]")]
    FractionOutOfRange { name: &'static str, value: f64 },
    #[error("alphabet of {alphabet} labels cannot give {needed} distinct labels per event")]
    AlphabetTooSmall { alphabet: usize, needed: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationSpec {
    pub n_traces: usize,
    pub trace_length: usize,
    pub p_time: f64,
    pub p_activity: f64,
    pub p_indeterminate: f64,
    pub activity_alphabet_size: usize,
    pub seed: u64,
}

impl Default for GenerationSpec {
    fn default() -> Self {
        GenerationSpec {
            n_traces: 1,
            trace_length: 1,
            p_time: 0.0,
            p_activity: 0.0,
            p_indeterminate: 0.0,
            activity_alphabet_size: 26,
            seed: 0,
        }
    }
}

fn check_fraction(name: &'static str, value: f64) -> Result<(), SpecError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(SpecError::FractionOutOfRange { name, value })
    }
}

impl GenerationSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        if self.n_traces == 0 {
            return Err(SpecError::NotPositive("n_traces"));
        }
        if self.trace_length == 0 {
            return Err(SpecError::NotPositive("trace_length"));
        }
        if self.activity_alphabet_size == 0 {
            return Err(SpecError::NotPositive("activity_alphabet_size"));
        }
        check_fraction("p_time", self.p_time)?;
        check_fraction("p_activity", self.p_activity)?;
        check_fraction("p_indeterminate", self.p_indeterminate)?;
        if self.p_activity > 0.0 && self.activity_alphabet_size < 2 {
            return Err(SpecError::AlphabetTooSmall {
                alphabet: self.activity_alphabet_size,
                needed: 2,
            });
        }
        Ok(())
    }
}

/// Label for alphabet position `i`: `a`..`z`, then `aa`, `ab`, ...
pub fn activity_label(mut i: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'a' + (i % 26) as u8);
        if i < 26 {
            break;
        }
        i = i / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

fn trace_rng(seed: u64, trace_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trace_index as u64);
    rng
}

/// Number of events picked out of `len` for fraction `p`.
pub fn selected_count(p: f64, len: usize) -> usize {
    // tolerate representation error such as 0.29 * 100 = 28.999...
    let k = (p * len as f64 + 1e-9).floor() as usize;
    k.min(len)
}

fn case_id(i: usize) -> String {
    format!("case{i:06}")
}

/// Certain, determinate log with uniformly drawn single labels.
pub fn generate_certain_log(spec: &GenerationSpec) -> Result<UncertainLog, SpecError> {
    spec.validate()?;
    let traces = (0..spec.n_traces)
        .map(|t| {
            let mut rng = trace_rng(spec.seed, t);
            let case = case_id(t);
            let events = (1..=spec.trace_length)
                .map(|k| {
                    let label = activity_label(rng.random_range(0..spec.activity_alphabet_size));
                    UncertainEvent::certain(
                        EventId::new(format!("{case}-e{k:04}")).expect("non-empty"),
                        [label],
                        Timestamp(k as i64 * STRIDE_MS),
                        true,
                    )
                    .expect("valid generated event")
                })
                .collect();
            UncertainTrace::new(case, events)
        })
        .collect();
    Ok(UncertainLog::new(traces))
}

/// Full pipeline: certain log, then the three injections with derived seeds.
pub fn generate_log(spec: &GenerationSpec) -> Result<UncertainLog, SpecError> {
    let log = generate_certain_log(spec)?;
    let log = inject_time_uncertainty(&log, spec.p_time, spec.seed ^ TIME_SALT);
    let log = if spec.p_activity > 0.0 {
        inject_activity_uncertainty(
            &log,
            spec.p_activity,
            1,
            spec.activity_alphabet_size,
            spec.seed ^ ACTIVITY_SALT,
        )?
    } else {
        log
    };
    Ok(inject_indeterminacy(&log, spec.p_indeterminate, spec.seed ^ INDETERMINATE_SALT))
}

fn map_selected<F>(log: &UncertainLog, p: f64, seed: u64, mut f: F) -> UncertainLog
where
    F: FnMut(&mut ChaCha8Rng, &UncertainTrace, usize) -> UncertainEvent,
{
    let traces = log
        .traces
        .iter()
        .enumerate()
        .map(|(t, trace)| {
            let mut rng = trace_rng(seed, t);
            let k = selected_count(p, trace.len());
            let mut picked = index::sample(&mut rng, trace.len(), k).into_vec();
            picked.sort_unstable();
            let mut events = trace.events.clone();
            for i in picked {
                events[i] = f(&mut rng, trace, i);
            }
            UncertainTrace::new(trace.case_id.clone(), events)
        })
        .collect();
    UncertainLog::new(traces)
}

/// Widens `floor(p * len)` events per trace to `[t_min - 1.5 s, t_max + 1.5 s]`
/// where `s` is the larger gap to the event's time-neighbours (`STRIDE_MS` when
/// the trace offers no positive gap).
pub fn inject_time_uncertainty(log: &UncertainLog, p: f64, seed: u64) -> UncertainLog {
    map_selected(log, p, seed, |_, trace, i| {
        let stride = local_stride(trace, i);
        let half = (HALF_WIDTH_FACTOR * stride as f64).round() as i64;
        let e = &trace.events[i];
        e.with_interval(Timestamp(e.t_min().0 - half), Timestamp(e.t_max().0 + half))
            .expect("widening keeps t_min <= t_max")
    })
}

fn local_stride(trace: &UncertainTrace, i: usize) -> i64 {
    let t = trace.events[i].t_min().0;
    let before = trace
        .events
        .iter()
        .map(|e| e.t_min().0)
        .filter(|&u| u < t)
        .max();
    let after = trace
        .events
        .iter()
        .map(|e| e.t_min().0)
        .filter(|&u| u > t)
        .min();
    let gap = before
        .map(|b| t - b)
        .into_iter()
        .chain(after.map(|a| a - t))
        .max()
        .unwrap_or(0);
    if gap > 0 {
        gap
    } else {
        STRIDE_MS
    }
}

/// Gives `floor(p * len)` events per trace `extra_labels` additional distinct
/// labels drawn from an alphabet of `alphabet` labels.
pub fn inject_activity_uncertainty(
    log: &UncertainLog,
    p: f64,
    extra_labels: usize,
    alphabet: usize,
    seed: u64,
) -> Result<UncertainLog, SpecError> {
    if extra_labels == 0 {
        return Err(SpecError::NotPositive("extra_labels"));
    }
    let needed = log
        .traces
        .iter()
        .flat_map(|t| &t.events)
        .map(|e| e.activities().len() + extra_labels)
        .max()
        .unwrap_or(0);
    if p > 0.0 && needed > alphabet {
        return Err(SpecError::AlphabetTooSmall { alphabet, needed });
    }
    Ok(map_selected(log, p, seed, |rng, trace, i| {
        let e = &trace.events[i];
        let mut labels = e.activities().clone();
        let target = labels.len() + extra_labels;
        while labels.len() < target {
            labels.insert(activity_label(rng.random_range(0..alphabet)));
        }
        e.with_activities(labels).expect("nonempty")
    }))
}

/// Marks `floor(p * len)` events per trace as indeterminate.
pub fn inject_indeterminacy(log: &UncertainLog, p: f64, seed: u64) -> UncertainLog {
    map_selected(log, p, seed, |_, trace, i| trace.events[i].with_determinate(false))
}
