//! File formats: template documents, schedule collection documents, and
//! CSV export. Times are `HH:MM` strings throughout; omitted optional keys
//! mean "not specified" and survive round trips as absent, never as zero.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

use crate::schedule::{
    ActivityId, Schedule, ScheduleCollection, ScheduleEntry, ScheduleTemplate, TemplateEntry,
};
use crate::time::{format_time, parse_time, DurationMin, TimePoint, VarianceMin};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("format error: {0}")]
    Invalid(String),
    #[error("day {day}: intervals `{first}` and `{second}` overlap")]
    Overlap {
        day: usize,
        first: String,
        second: String,
    },
}

fn invalid(msg: impl Into<String>) -> FormatError {
    FormatError::Invalid(msg.into())
}

// ---------------------------------------------------------------------------
// Template schema
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTemplate {
    name: String,
    #[serde(default)]
    #[allow(dead_code)] // accepted and ignored
    version: Option<u64>,
    #[serde(default)]
    day_start: Option<String>,
    #[serde(default)]
    day_end: Option<String>,
    #[serde(default)]
    anchor_day_bounds: Option<bool>,
    entries: Vec<RawTemplateEntry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTemplateEntry {
    activity: String,
    #[serde(default)]
    start: Option<String>,
    #[serde(default)]
    start_variance: Option<String>,
    #[serde(default)]
    duration: Option<String>,
    #[serde(default)]
    duration_variance: Option<String>,
}

fn parse_opt_time(field: &str, value: &Option<String>) -> Result<Option<TimePoint>, FormatError> {
    value
        .as_ref()
        .map(|s| parse_time(s).map_err(|e| invalid(format!("{field}: {e}"))))
        .transpose()
}

/// Parses a template document (see the template schema in the README).
pub fn load_template(document: &str) -> Result<ScheduleTemplate, FormatError> {
    let raw: RawTemplate = serde_json::from_str(document).map_err(|e| invalid(e.to_string()))?;
    if raw.entries.is_empty() {
        return Err(invalid("template has no entries"));
    }
    let day_start = parse_opt_time("day_start", &raw.day_start)?.unwrap_or(TimePoint::DAY_START);
    let day_end = parse_opt_time("day_end", &raw.day_end)?.unwrap_or(TimePoint::DAY_END);
    if day_start >= day_end {
        return Err(invalid(format!(
            "day_start {day_start} must precede day_end {day_end}"
        )));
    }

    let mut entries = Vec::with_capacity(raw.entries.len());
    for (i, e) in raw.entries.iter().enumerate() {
        let activity = ActivityId::new(&e.activity)
            .map_err(|err| invalid(format!("entry {i}: {err}")))?;
        if e.start_variance.is_some() && e.start.is_none() {
            return Err(invalid(format!(
                "entry {i} ({activity}): start_variance without start"
            )));
        }
        if e.duration_variance.is_some() && e.duration.is_none() {
            return Err(invalid(format!(
                "entry {i} ({activity}): duration_variance without duration"
            )));
        }
        let start = parse_opt_time("start", &e.start)?;
        let start_variance = parse_opt_time("start_variance", &e.start_variance)?
            .map(|t| VarianceMin::new(t.minutes()).expect("non-negative"));
        let duration = parse_opt_time("duration", &e.duration)?
            .map(|t| DurationMin::new(t.minutes()).expect("non-negative"));
        let duration_variance = parse_opt_time("duration_variance", &e.duration_variance)?
            .map(|t| VarianceMin::new(t.minutes()).expect("non-negative"));
        entries.push(TemplateEntry {
            activity,
            start,
            start_variance,
            duration,
            duration_variance,
        });
    }

    Ok(ScheduleTemplate {
        name: raw.name,
        day_start,
        day_end,
        anchor_day_bounds: raw.anchor_day_bounds.unwrap_or(true),
        entries,
    })
}

// ---------------------------------------------------------------------------
// Collection schema (shared by generated output and reference ingestion)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCollection {
    label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    #[allow(dead_code)] // accepted and ignored
    version: Option<u64>,
    activities: Vec<String>,
    days: Vec<Vec<RawInterval>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInterval {
    activity: String,
    start: String,
    end: String,
}

/// One day of reference data before gap filling: sorted, non-overlapping,
/// but possibly with uncovered time between intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceDay {
    pub intervals: Vec<(ActivityId, TimePoint, TimePoint)>,
}

/// Serializes a collection. Deterministic field order, sorted vocabulary,
/// zero-duration entries omitted; reloading the output reproduces every
/// positive-duration interval exactly.
pub fn save_schedules(collection: &ScheduleCollection) -> String {
    let raw = RawCollection {
        label: collection.label.clone(),
        version: None,
        activities: collection
            .activity_vocabulary
            .iter()
            .map(|a| a.as_str().to_string())
            .collect(),
        days: collection
            .days
            .iter()
            .map(|day| {
                day.active_entries()
                    .map(|e| RawInterval {
                        activity: e.activity.as_str().to_string(),
                        start: format_time(e.start),
                        end: format_time(e.end),
                    })
                    .collect()
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&raw).expect("serializable");
    text.push('\n');
    text
}

/// Loads a collection document, filling every gap (before the first
/// interval, between intervals, and after the last) with `gap_activity`
/// so each day tiles `[00:00, 24:00)`. The gap activity joins the
/// vocabulary only when at least one gap existed.
pub fn load_reference_collection(
    document: &str,
    gap_activity: &ActivityId,
) -> Result<ScheduleCollection, FormatError> {
    let raw: RawCollection = serde_json::from_str(document).map_err(|e| invalid(e.to_string()))?;

    let mut vocabulary: BTreeSet<ActivityId> = raw
        .activities
        .iter()
        .map(|a| ActivityId::new(a).map_err(|e| invalid(e.to_string())))
        .collect::<Result<_, _>>()?;

    let mut any_gap = false;
    let mut days = Vec::with_capacity(raw.days.len());
    for (day_index, raw_day) in raw.days.iter().enumerate() {
        let mut intervals = Vec::with_capacity(raw_day.len());
        for iv in raw_day {
            let activity = ActivityId::new(&iv.activity)
                .map_err(|e| invalid(format!("day {day_index}: {e}")))?;
            let start = parse_time(&iv.start)
                .map_err(|e| invalid(format!("day {day_index}: {e}")))?;
            let end = parse_time(&iv.end)
                .map_err(|e| invalid(format!("day {day_index}: {e}")))?;
            if start >= end {
                return Err(invalid(format!(
                    "day {day_index}: interval {activity} has start {start} >= end {end}"
                )));
            }
            intervals.push((activity, start, end));
        }
        intervals.sort_by_key(|(_, start, _)| *start);
        for pair in intervals.windows(2) {
            let (ref a, _, a_end) = pair[0];
            let (ref b, b_start, _) = pair[1];
            if b_start < a_end {
                return Err(FormatError::Overlap {
                    day: day_index,
                    first: a.as_str().to_string(),
                    second: b.as_str().to_string(),
                });
            }
        }

        let mut entries = Vec::new();
        let mut cursor = TimePoint::DAY_START;
        for (activity, start, end) in intervals {
            if cursor < start {
                entries.push(gap_entry(gap_activity, cursor, start));
                any_gap = true;
            }
            entries.push(entry(activity, start, end));
            cursor = end;
        }
        if cursor < TimePoint::DAY_END {
            entries.push(gap_entry(gap_activity, cursor, TimePoint::DAY_END));
            any_gap = true;
        }
        for e in &entries {
            vocabulary.insert(e.activity.clone());
        }
        days.push(Schedule {
            template_name: raw.label.clone(),
            day_index,
            entries,
        });
    }
    if any_gap {
        vocabulary.insert(gap_activity.clone());
    }

    Ok(ScheduleCollection {
        label: raw.label,
        activity_vocabulary: vocabulary,
        days,
    })
}

fn entry(activity: ActivityId, start: TimePoint, end: TimePoint) -> ScheduleEntry {
    let duration = DurationMin::new(end.minutes() - start.minutes()).expect("start < end");
    ScheduleEntry::new(activity, start, duration, end).expect("identity holds")
}

fn gap_entry(gap_activity: &ActivityId, start: TimePoint, end: TimePoint) -> ScheduleEntry {
    entry(gap_activity.clone(), start, end)
}

/// CSV export: header `day,activity,start,end`, one row per
/// positive-duration entry.
pub fn to_csv(collection: &ScheduleCollection) -> String {
    let mut out = String::from("day,activity,start,end\n");
    for day in &collection.days {
        for e in day.active_entries() {
            out.push_str(&format!(
                "{},{},{},{}\n",
                day.day_index,
                e.activity,
                format_time(e.start),
                format_time(e.end)
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn act(name: &str) -> ActivityId {
        ActivityId::new(name).unwrap()
    }

    #[test]
    fn loads_fully_specified_entry() {
        let doc = r#"{"name":"p","entries":[
            {"activity":"lunch","start":"12:00","start_variance":"00:00",
             "duration":"00:45","duration_variance":"00:15"}]}"#;
        let t = load_template(doc).unwrap();
        let e = &t.entries[0];
        assert_eq!(e.activity.as_str(), "lunch");
        assert_eq!(e.start.unwrap().minutes(), 720);
        assert_eq!(e.start_variance.unwrap().minutes(), 0);
        assert_eq!(e.duration.unwrap().minutes(), 45);
        assert_eq!(e.duration_variance.unwrap().minutes(), 15);
        assert_eq!(t.day_start, TimePoint::DAY_START);
        assert_eq!(t.day_end, TimePoint::DAY_END);
        assert!(t.anchor_day_bounds);
    }

    #[test]
    fn absent_fields_stay_absent() {
        let doc = r#"{"name":"p","entries":[{"activity":"spare_time"}]}"#;
        let t = load_template(doc).unwrap();
        let e = &t.entries[0];
        assert!(e.start.is_none());
        assert!(e.start_variance.is_none());
        assert!(e.duration.is_none());
        assert!(e.duration_variance.is_none());
    }

    #[test]
    fn variance_without_base_is_an_error() {
        let doc = r#"{"name":"p","entries":[{"activity":"x","start_variance":"00:10"}]}"#;
        assert!(load_template(doc).is_err());
        let doc = r#"{"name":"p","entries":[{"activity":"x","duration_variance":"00:10"}]}"#;
        assert!(load_template(doc).is_err());
    }

    #[test]
    fn rejects_unknown_fields_and_empty_entries() {
        assert!(load_template(r#"{"name":"p","entries":[],"extra":1}"#).is_err());
        assert!(load_template(r#"{"name":"p","entries":[]}"#).is_err());
        assert!(load_template(r#"{"name":"p","entries":[{"activity":"a","when":"07:00"}]}"#).is_err());
    }

    #[test]
    fn gap_fill_matches_manual_trace() {
        let doc = r#"{"label":"d","activities":["sleep","breakfast"],"days":[[
            {"activity":"sleep","start":"00:00","end":"07:00"},
            {"activity":"breakfast","start":"08:00","end":"08:30"}]]}"#;
        let c = load_reference_collection(doc, &act("other")).unwrap();
        let got: Vec<_> = c.days[0]
            .entries
            .iter()
            .map(|e| (e.activity.as_str(), e.start.minutes(), e.end.minutes()))
            .collect();
        assert_eq!(
            got,
            vec![
                ("sleep", 0, 420),
                ("other", 420, 480),
                ("breakfast", 480, 510),
                ("other", 510, 1440),
            ]
        );
        assert!(c.activity_vocabulary.contains(&act("other")));
    }

    #[test]
    fn full_day_needs_no_gap_activity() {
        let doc = r#"{"label":"d","activities":["sleep"],"days":[[
            {"activity":"sleep","start":"00:00","end":"24:00"}]]}"#;
        let c = load_reference_collection(doc, &act("other")).unwrap();
        assert_eq!(c.days[0].entries.len(), 1);
        assert!(!c.activity_vocabulary.contains(&act("other")));
    }

    #[test]
    fn overlap_reports_day_and_pair() {
        let doc = r#"{"label":"d","activities":["a","b"],"days":[[
            {"activity":"a","start":"07:00","end":"09:00"},
            {"activity":"b","start":"08:00","end":"10:00"}]]}"#;
        match load_reference_collection(doc, &act("other")) {
            Err(FormatError::Overlap { day, first, second }) => {
                assert_eq!(day, 0);
                assert_eq!((first.as_str(), second.as_str()), ("a", "b"));
            }
            other => panic!("expected overlap error, got {other:?}"),
        }
    }

    #[test]
    fn gap_fill_is_idempotent() {
        let doc = r#"{"label":"d","activities":["sleep"],"days":[[
            {"activity":"sleep","start":"01:00","end":"07:00"}]]}"#;
        let once = load_reference_collection(doc, &act("other")).unwrap();
        let twice = load_reference_collection(&save_schedules(&once), &act("other")).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn save_empty_collection() {
        let c = ScheduleCollection {
            label: "e".into(),
            activity_vocabulary: BTreeSet::new(),
            days: vec![],
        };
        assert!(save_schedules(&c).contains("\"days\": []"));
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let doc = r#"{"label":"d","activities":["sleep","eat"],"days":[
            [{"activity":"sleep","start":"00:00","end":"08:00"},
             {"activity":"eat","start":"08:00","end":"09:00"}],
            [{"activity":"sleep","start":"00:00","end":"06:00"}],
            [{"activity":"eat","start":"12:00","end":"13:00"}]]}"#;
        let c = load_reference_collection(doc, &act("other")).unwrap();
        let saved = save_schedules(&c);
        let resaved = save_schedules(&load_reference_collection(&saved, &act("other")).unwrap());
        assert_eq!(saved, resaved);
    }

    #[test]
    fn csv_rows_skip_zero_duration() {
        let doc = r#"{"label":"d","activities":["sleep"],"days":[
            [{"activity":"sleep","start":"00:00","end":"24:00"}],
            [{"activity":"sleep","start":"00:00","end":"24:00"}]]}"#;
        let c = load_reference_collection(doc, &act("other")).unwrap();
        let csv = to_csv(&c);
        assert_eq!(
            csv,
            "day,activity,start,end\n0,sleep,00:00,24:00\n1,sleep,00:00,24:00\n"
        );
    }
}
