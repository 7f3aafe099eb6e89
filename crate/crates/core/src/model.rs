//! Uncertain events, traces and logs.
//!
//! An event carries a nonempty set of candidate activity labels, a closed
//! timestamp interval `[t_min, t_max]` and a determinacy flag. Events whose
//! interval collapses to a single point have a *certain* timestamp.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

/// Milliseconds since the Unix epoch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub const fn millis(self) -> i64 {
        self.0
    }
}

impl From<i64> for Timestamp {
    fn from(ms: i64) -> Self {
        Timestamp(ms)
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ms", self.0)
    }
}

/// Opaque, non-empty event identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(String);

impl EventId {
    pub fn new(id: impl Into<String>) -> Result<Self, ModelError> {
        let id = id.into();
        if id.is_empty() {
            return Err(ModelError::EmptyEventId);
        }
        Ok(EventId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for EventId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("event id must not be empty")]
    EmptyEventId,
    #[error("event {0} has an empty activity set")]
    EmptyActivities(EventId),
    #[error("event {id} has t_min {t_min} after t_max {t_max}")]
    InvertedInterval {
        id: EventId,
        t_min: Timestamp,
        t_max: Timestamp,
    },
    #[error("invalid trace {case}: {}", join_violations(.violations))]
    InvalidTrace {
        case: String,
        violations: Vec<Violation>,
    },
    #[error("invalid log: {}", join_violations(.0))]
    InvalidLog(Vec<Violation>),
}

fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// A simple uncertain event. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UncertainEvent {
    id: EventId,
    activities: BTreeSet<String>,
    t_min: Timestamp,
    t_max: Timestamp,
    determinate: bool,
}

impl UncertainEvent {
    pub fn new<I, S>(
        id: EventId,
        activities: I,
        t_min: Timestamp,
        t_max: Timestamp,
        determinate: bool,
    ) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let activities: BTreeSet<String> = activities.into_iter().map(Into::into).collect();
        if activities.is_empty() {
            return Err(ModelError::EmptyActivities(id));
        }
        if t_min > t_max {
            return Err(ModelError::InvertedInterval { id, t_min, t_max });
        }
        Ok(UncertainEvent {
            id,
            activities,
            t_min,
            t_max,
            determinate,
        })
    }

    /// Event with a point timestamp.
    pub fn certain<I, S>(
        id: EventId,
        activities: I,
        at: Timestamp,
        determinate: bool,
    ) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(id, activities, at, at, determinate)
    }

    pub fn id(&self) -> &EventId {
        &self.id
    }

    pub fn activities(&self) -> &BTreeSet<String> {
        &self.activities
    }

    pub fn t_min(&self) -> Timestamp {
        self.t_min
    }

    pub fn t_max(&self) -> Timestamp {
        self.t_max
    }

    pub fn is_determinate(&self) -> bool {
        self.determinate
    }

    pub fn is_certain(&self) -> bool {
        is_certain(self)
    }

    pub fn with_interval(&self, t_min: Timestamp, t_max: Timestamp) -> Result<Self, ModelError> {
        Self::new(
            self.id.clone(),
            self.activities.iter().cloned(),
            t_min,
            t_max,
            self.determinate,
        )
    }

    pub fn with_activities<I, S>(&self, activities: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(
            self.id.clone(),
            activities,
            self.t_min,
            self.t_max,
            self.determinate,
        )
    }

    pub fn with_determinate(&self, determinate: bool) -> Self {
        UncertainEvent {
            determinate,
            ..self.clone()
        }
    }
}

/// True iff the event's interval is a single point.
pub fn is_certain(e: &UncertainEvent) -> bool {
    e.t_min == e.t_max
}

/// Strict precedence: `v` certainly happened before `w`.
pub fn precedes(v: &UncertainEvent, w: &UncertainEvent) -> bool {
    v.t_max < w.t_min
}

/// A trace is a set of events of one case; event order carries no meaning.
#[derive(Debug, Clone, Default)]
pub struct UncertainTrace {
    pub case_id: String,
    pub events: Vec<UncertainEvent>,
}

impl UncertainTrace {
    pub fn new(case_id: impl Into<String>, events: Vec<UncertainEvent>) -> Self {
        UncertainTrace {
            case_id: case_id.into(),
            events,
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn event(&self, id: &str) -> Option<&UncertainEvent> {
        self.events.iter().find(|e| e.id.as_str() == id)
    }

    /// Events sorted by id, the canonical order used for comparison.
    pub fn sorted_events(&self) -> Vec<&UncertainEvent> {
        let mut events: Vec<_> = self.events.iter().collect();
        events.sort_by(|a, b| a.id.cmp(&b.id));
        events
    }

    /// Validates and returns `self`, or the collected violations as an error.
    pub fn validated(self) -> Result<Self, ModelError> {
        match validate_trace(&self) {
            Ok(()) => Ok(self),
            Err(violations) => Err(ModelError::InvalidTrace {
                case: self.case_id,
                violations,
            }),
        }
    }
}

impl PartialEq for UncertainTrace {
    fn eq(&self, other: &Self) -> bool {
        self.case_id == other.case_id && self.sorted_events() == other.sorted_events()
    }
}

impl Eq for UncertainTrace {}

#[derive(Debug, Clone, Default)]
pub struct UncertainLog {
    pub traces: Vec<UncertainTrace>,
}

impl UncertainLog {
    pub fn new(traces: Vec<UncertainTrace>) -> Self {
        UncertainLog { traces }
    }

    pub fn event_count(&self) -> usize {
        self.traces.iter().map(UncertainTrace::len).sum()
    }

    pub fn validated(self) -> Result<Self, ModelError> {
        match validate_log(&self) {
            Ok(()) => Ok(self),
            Err(violations) => Err(ModelError::InvalidLog(violations)),
        }
    }

    fn sorted_traces(&self) -> Vec<&UncertainTrace> {
        let mut traces: Vec<_> = self.traces.iter().collect();
        traces.sort_by(|a, b| a.case_id.cmp(&b.case_id));
        traces
    }
}

impl PartialEq for UncertainLog {
    fn eq(&self, other: &Self) -> bool {
        self.sorted_traces() == other.sorted_traces()
    }
}

impl Eq for UncertainLog {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    DuplicateEventId,
    DuplicateCaseId,
    EmptyActivities,
    InvertedInterval,
}

/// One broken invariant, tied to the event (or case) that breaks it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub subject: String,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.rule {
            Rule::DuplicateEventId => write!(f, "duplicate event id {}", self.subject),
            Rule::DuplicateCaseId => write!(f, "duplicate case id {}", self.subject),
            Rule::EmptyActivities => write!(f, "empty activity set on event {}", self.subject),
            Rule::InvertedInterval => write!(f, "t_min after t_max on event {}", self.subject),
        }
    }
}

fn event_violations(e: &UncertainEvent, out: &mut Vec<Violation>) {
    if e.activities.is_empty() {
        out.push(Violation {
            subject: e.id.to_string(),
            rule: Rule::EmptyActivities,
        });
    }
    if e.t_min > e.t_max {
        out.push(Violation {
            subject: e.id.to_string(),
            rule: Rule::InvertedInterval,
        });
    }
}

fn collect_trace_violations<'a>(
    trace: &'a UncertainTrace,
    seen: &mut HashSet<&'a str>,
    out: &mut Vec<Violation>,
) {
    for e in &trace.events {
        event_violations(e, out);
        if !seen.insert(e.id.as_str()) {
            out.push(Violation {
                subject: e.id.to_string(),
                rule: Rule::DuplicateEventId,
            });
        }
    }
}

pub fn validate_trace(trace: &UncertainTrace) -> Result<(), Vec<Violation>> {
    let mut seen = HashSet::with_capacity(trace.len());
    let mut out = Vec::new();
    collect_trace_violations(trace, &mut seen, &mut out);
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Event ids must be unique across the whole log. Case ids must be unique too,
/// since the file format groups events by case.
pub fn validate_log(log: &UncertainLog) -> Result<(), Vec<Violation>> {
    let mut seen = HashSet::with_capacity(log.event_count());
    let mut cases = HashSet::with_capacity(log.traces.len());
    let mut out = Vec::new();
    for trace in &log.traces {
        if !cases.insert(trace.case_id.as_str()) {
            out.push(Violation {
                subject: trace.case_id.clone(),
                rule: Rule::DuplicateCaseId,
            });
        }
        collect_trace_violations(trace, &mut seen, &mut out);
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{case_872, case_945, day};
    use proptest::prelude::*;

    fn ev(id: &str, t_min: i64, t_max: i64) -> UncertainEvent {
        UncertainEvent::new(
            EventId::new(id).unwrap(),
            ["x"],
            Timestamp(t_min),
            Timestamp(t_max),
            true,
        )
        .unwrap()
    }

    #[test]
    fn case_945_is_valid() {
        let t = case_945();
        assert_eq!(validate_trace(&t), Ok(()));
        let e3 = t.event("e3").unwrap();
        assert_eq!(e3.t_min(), day(6));
        assert_eq!(e3.t_max(), day(10));
    }

    #[test]
    fn empty_trace_is_valid() {
        assert_eq!(validate_trace(&UncertainTrace::new("c", vec![])), Ok(()));
    }

    #[test]
    fn duplicate_id_is_reported() {
        let t = UncertainTrace::new("c", vec![ev("e1", 0, 0), ev("e1", 5, 5)]);
        let violations = validate_trace(&t).unwrap_err();
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].to_string(), "duplicate event id e1");
    }

    #[test]
    fn duplicates_across_traces_break_the_log_only() {
        let a = UncertainTrace::new("a", vec![ev("e1", 0, 0)]);
        let b = UncertainTrace::new("b", vec![ev("e1", 0, 0)]);
        assert!(validate_trace(&a).is_ok() && validate_trace(&b).is_ok());
        let violations = validate_log(&UncertainLog::new(vec![a, b])).unwrap_err();
        assert_eq!(violations[0].rule, Rule::DuplicateEventId);
    }

    #[test]
    fn constructor_rejects_bad_events() {
        let id = EventId::new("e").unwrap();
        assert_eq!(
            UncertainEvent::new(id.clone(), Vec::<String>::new(), Timestamp(0), Timestamp(0), true),
            Err(ModelError::EmptyActivities(id.clone()))
        );
        assert!(matches!(
            UncertainEvent::new(id, ["a"], Timestamp(2), Timestamp(1), true),
            Err(ModelError::InvertedInterval { .. })
        ));
        assert_eq!(EventId::new(""), Err(ModelError::EmptyEventId));
    }

    #[test]
    fn certainty() {
        let t = case_945();
        assert!(is_certain(t.event("e1").unwrap()));
        assert!(!is_certain(t.event("e3").unwrap()));
        assert!(is_certain(&ev("z", 0, 0)));
    }

    #[test]
    fn precedence_on_case_872() {
        let t = case_872();
        let e = |id| t.event(id).unwrap();
        assert!(precedes(e("e3"), e("e6")));
        assert!(!precedes(e("e3"), e("e4")));
        assert!(!precedes(e("e4"), e("e3")));
        for x in &t.events {
            assert!(!precedes(x, x));
        }
    }

    #[test]
    fn trace_equality_ignores_event_order() {
        let a = UncertainTrace::new("c", vec![ev("e1", 0, 0), ev("e2", 1, 1)]);
        let b = UncertainTrace::new("c", vec![ev("e2", 1, 1), ev("e1", 0, 0)]);
        assert_eq!(a, b);
    }

    fn interval() -> impl Strategy<Value = UncertainEvent> {
        (-50i64..50, 0i64..20, prop::bool::ANY).prop_map(|(lo, w, certain)| {
            let hi = if certain { lo } else { lo + w };
            ev("p", lo, hi)
        })
    }

    proptest! {
        #[test]
        fn precedes_is_a_strict_partial_order(a in interval(), b in interval(), c in interval()) {
            prop_assert!(!precedes(&a, &a));
            prop_assert!(!(precedes(&a, &b) && precedes(&b, &a)));
            if precedes(&a, &b) && precedes(&b, &c) {
                prop_assert!(precedes(&a, &c));
            }
        }

        #[test]
        fn distinct_certain_events_are_comparable(x in -100i64..100, y in -100i64..100) {
            prop_assume!(x != y);
            let (a, b) = (ev("a", x, x), ev("b", y, y));
            prop_assert!(precedes(&a, &b) ^ precedes(&b, &a));
        }
    }
}
