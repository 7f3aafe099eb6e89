//! Two small hand-written traces used throughout the tests and docs.

use chrono::NaiveDate;

use crate::model::{EventId, Timestamp, UncertainEvent, UncertainTrace};

/// Midnight UTC on the given day of December 2011.
pub fn day(d: u32) -> Timestamp {
    let date = NaiveDate::from_ymd_opt(2011, 12, d).expect("valid December day");
    Timestamp(date.and_hms_opt(0, 0, 0).unwrap().and_utc().timestamp_millis())
}

fn event(id: &str, activities: &[&str], from: u32, to: u32, determinate: bool) -> UncertainEvent {
    UncertainEvent::new(
        EventId::new(id).unwrap(),
        activities.iter().copied(),
        day(from),
        day(to),
        determinate,
    )
    .unwrap()
}

/// Case 945: uncertain labels on e2 and e4, an interval on e3, and an
/// indeterminate e5.
pub fn case_945() -> UncertainTrace {
    UncertainTrace::new(
        "945",
        vec![
            event("e1", &["a"], 5, 5, true),
            event("e2", &["b", "c"], 7, 7, true),
            event("e3", &["d"], 6, 10, true),
            event("e4", &["a", "c"], 9, 9, true),
            event("e5", &["e"], 11, 11, false),
        ],
    )
}

/// Case 872: timestamp uncertainty only, exercising every branch of the sweep.
pub fn case_872() -> UncertainTrace {
    UncertainTrace::new(
        "872",
        vec![
            event("e1", &["a"], 5, 5, true),
            event("e2", &["b"], 7, 7, true),
            event("e3", &["c"], 6, 10, true),
            event("e4", &["d"], 8, 11, true),
            event("e5", &["e"], 9, 9, true),
            event("e6", &["f"], 12, 13, true),
        ],
    )
}
