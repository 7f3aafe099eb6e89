//! Brute-force ground truth for small traces.
//!
//! Everything here trades speed for obviousness: the covering relation is a
//! direct triple loop over `precedes`, orderings are enumerated exhaustively,
//! and directly-follows bounds are computed over every concrete realization.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::model::{precedes, validate_trace, EventId, ModelError, UncertainLog, UncertainTrace};

/// Largest trace accepted by [`linear_extensions`].
pub const MAX_EXTENSION_EVENTS: usize = 10;
/// Largest trace accepted by [`enumerate_realizations`].
pub const MAX_REALIZATION_EVENTS: usize = 8;
/// Upper bound on the realization count estimate.
pub const MAX_REALIZATIONS: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error(transparent)]
    InvalidTrace(#[from] ModelError),
    #[error("trace {case} has {events} events; enumeration is limited to {limit}")]
    TooManyEvents {
        case: String,
        events: usize,
        limit: usize,
    },
    #[error("trace {case} would expand to {estimate} realizations; budget is {limit}")]
    BudgetExceeded {
        case: String,
        estimate: u128,
        limit: u128,
    },
    #[error("unknown event {0}")]
    UnknownEvent(String),
}

fn checked(trace: &UncertainTrace) -> Result<(), OracleError> {
    validate_trace(trace).map_err(|violations| ModelError::InvalidTrace {
        case: trace.case_id.clone(),
        violations,
    })?;
    Ok(())
}

fn size_guard(trace: &UncertainTrace, limit: usize) -> Result<(), OracleError> {
    if trace.len() > limit {
        return Err(OracleError::TooManyEvents {
            case: trace.case_id.clone(),
            events: trace.len(),
            limit,
        });
    }
    Ok(())
}

/// Pairs `(v, w)` with `v` preceding `w` and nothing strictly between them.
pub fn covering_relation(trace: &UncertainTrace) -> Result<BTreeSet<(EventId, EventId)>, OracleError> {
    checked(trace)?;
    let events = &trace.events;
    let mut cover = BTreeSet::new();
    for v in events {
        for w in events {
            if precedes(v, w) && !events.iter().any(|u| precedes(v, u) && precedes(u, w)) {
                cover.insert((v.id().clone(), w.id().clone()));
            }
        }
    }
    Ok(cover)
}

/// Strict-precedence predecessor masks over positions of `events`.
fn predecessor_masks(events: &[&crate::model::UncertainEvent]) -> Vec<u32> {
    events
        .iter()
        .map(|w| {
            events
                .iter()
                .enumerate()
                .filter(|(_, v)| precedes(v, w))
                .fold(0u32, |mask, (i, _)| mask | (1 << i))
        })
        .collect()
}

/// Depth-first enumeration of all topological orders of the subset `members`.
fn extend_orders(preds: &[u32], members: u32, visit: &mut dyn FnMut(&[usize])) {
    fn go(
        preds: &[u32],
        members: u32,
        placed: u32,
        prefix: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if placed == members {
            visit(prefix);
            return;
        }
        for i in 0..preds.len() {
            let bit = 1 << i;
            if members & bit == 0 || placed & bit != 0 {
                continue;
            }
            if preds[i] & members & !placed == 0 {
                prefix.push(i);
                go(preds, members, placed | bit, prefix, visit);
                prefix.pop();
            }
        }
    }
    go(preds, members, 0, &mut Vec::new(), visit);
}

fn count_orders(preds: &[u32], members: u32) -> u128 {
    // memoised over placed subsets
    fn go(preds: &[u32], members: u32, placed: u32, memo: &mut HashMap<u32, u128>) -> u128 {
        if placed == members {
            return 1;
        }
        if let Some(&c) = memo.get(&placed) {
            return c;
        }
        let mut total = 0;
        for (i, &p) in preds.iter().enumerate() {
            let bit = 1 << i;
            if members & bit != 0 && placed & bit == 0 && p & members & !placed == 0 {
                total += go(preds, members, placed | bit, memo);
            }
        }
        memo.insert(placed, total);
        total
    }
    go(preds, members, 0, &mut HashMap::new())
}

/// Every total order of the trace's events consistent with `precedes`.
/// Sequences come out in lexicographic order of event id.
pub fn linear_extensions(trace: &UncertainTrace) -> Result<Vec<Vec<EventId>>, OracleError> {
    checked(trace)?;
    size_guard(trace, MAX_EXTENSION_EVENTS)?;
    let events = trace.sorted_events();
    let preds = predecessor_masks(&events);
    let all = (1u32 << events.len()) - 1;
    let mut out = Vec::new();
    extend_orders(&preds, all, &mut |order| {
        out.push(order.iter().map(|&i| events[i].id().clone()).collect());
    });
    Ok(out)
}

/// Whether some admissible ordering puts `w` right after `v`.
pub fn possible_immediate_successor(
    trace: &UncertainTrace,
    v: &str,
    w: &str,
) -> Result<bool, OracleError> {
    for id in [v, w] {
        if trace.event(id).is_none() {
            return Err(OracleError::UnknownEvent(id.to_owned()));
        }
    }
    Ok(linear_extensions(trace)?.iter().any(|order| {
        order
            .windows(2)
            .any(|pair| pair[0].as_str() == v && pair[1].as_str() == w)
    }))
}

/// One concrete trace: a subset of the events in an admissible order, each
/// with a single activity label.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Realization(pub Vec<(EventId, String)>);

impl Realization {
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(_, a)| a.as_str())
    }
}

/// Expands inclusion choices for indeterminate events, label choices and
/// admissible orderings.
pub fn enumerate_realizations(trace: &UncertainTrace) -> Result<Vec<Realization>, OracleError> {
    let mut out = Vec::new();
    for_each_realization(trace, &mut |r| out.push(Realization(r.to_vec())))?;
    Ok(out)
}

fn for_each_realization(
    trace: &UncertainTrace,
    visit: &mut dyn FnMut(&[(EventId, String)]),
) -> Result<(), OracleError> {
    checked(trace)?;
    size_guard(trace, MAX_REALIZATION_EVENTS)?;
    let events = trace.sorted_events();
    let n = events.len();
    let preds = predecessor_masks(&events);
    let all = (1u32 << n) - 1;

    // Orderings of a subset never outnumber those of the whole trace, so this
    // bounds the actual count from above.
    let labels: u128 = events.iter().map(|e| e.activities().len() as u128).product();
    let optional: Vec<usize> = (0..n).filter(|&i| !events[i].is_determinate()).collect();
    let estimate = labels
        .saturating_mul(1u128 << optional.len())
        .saturating_mul(count_orders(&preds, all));
    if estimate > MAX_REALIZATIONS {
        return Err(OracleError::BudgetExceeded {
            case: trace.case_id.clone(),
            estimate,
            limit: MAX_REALIZATIONS,
        });
    }

    let labels: Vec<Vec<&String>> = events.iter().map(|e| e.activities().iter().collect()).collect();
    for choice in 0u32..(1 << optional.len()) {
        let dropped = optional
            .iter()
            .enumerate()
            .filter(|(b, _)| choice & (1 << b) != 0)
            .fold(0u32, |m, (_, &i)| m | (1 << i));
        let members = all & !dropped;
        extend_orders(&preds, members, &mut |order| {
            label_product(order, &labels, &mut Vec::with_capacity(order.len()), &events, visit);
        });
    }
    Ok(())
}

fn label_product(
    order: &[usize],
    labels: &[Vec<&String>],
    prefix: &mut Vec<(EventId, String)>,
    events: &[&crate::model::UncertainEvent],
    visit: &mut dyn FnMut(&[(EventId, String)]),
) {
    let Some((&first, rest)) = order.split_first() else {
        visit(prefix);
        return;
    };
    for &label in &labels[first] {
        prefix.push((events[first].id().clone(), label.clone()));
        label_product(rest, labels, prefix, events, visit);
        prefix.pop();
    }
}

/// Minimum and maximum directly-follows counts per activity pair.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DirectlyFollowsBounds(pub BTreeMap<(String, String), (u64, u64)>);

impl DirectlyFollowsBounds {
    pub fn get(&self, a: &str, b: &str) -> Option<(u64, u64)> {
        self.0.get(&(a.to_owned(), b.to_owned())).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(String, String), &(u64, u64))> {
        self.0.iter()
    }

    /// Pairwise sum; a pair missing on one side contributes `(0, 0)`.
    pub fn merge(&mut self, other: &DirectlyFollowsBounds) {
        for (pair, &(lo, hi)) in &other.0 {
            let entry = self.0.entry(pair.clone()).or_insert((0, 0));
            entry.0 += lo;
            entry.1 += hi;
        }
    }
}

/// Exact bounds over all realizations of one trace. Pairs that never occur
/// are omitted; a pair absent from some realization has minimum 0.
pub fn udfg_bounds_trace(trace: &UncertainTrace) -> Result<DirectlyFollowsBounds, OracleError> {
    let mut realizations = 0u64;
    let mut seen: BTreeMap<(String, String), (u64, u64, u64)> = BTreeMap::new();
    for_each_realization(trace, &mut |r| {
        realizations += 1;
        let mut counts: HashMap<(&str, &str), u64> = HashMap::new();
        for pair in r.windows(2) {
            *counts.entry((&pair[0].1, &pair[1].1)).or_default() += 1;
        }
        for (&(a, b), &c) in &counts {
            let entry = seen
                .entry((a.to_owned(), b.to_owned()))
                .or_insert((u64::MAX, 0, 0));
            entry.0 = entry.0.min(c);
            entry.1 = entry.1.max(c);
            entry.2 += 1;
        }
    })?;
    Ok(DirectlyFollowsBounds(
        seen.into_iter()
            .map(|(pair, (lo, hi, present))| {
                let lo = if present < realizations { 0 } else { lo };
                (pair, (lo, hi))
            })
            .collect(),
    ))
}

/// Sum of the per-trace bounds.
pub fn udfg_bounds_log(log: &UncertainLog) -> Result<DirectlyFollowsBounds, OracleError> {
    let mut total = DirectlyFollowsBounds::default();
    for trace in &log.traces {
        total.merge(&udfg_bounds_trace(trace)?);
    }
    Ok(total)
}
