//! Domain model: schedule templates, resolved schedules, and collections.

use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

use crate::time::{DurationMin, TimePoint, VarianceMin};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScheduleError {
    #[error("invalid activity name `{0}`: expected non-empty [A-Za-z0-9_-]+")]
    InvalidActivity(String),
    #[error("entry times inconsistent: {start} + {duration} min != {end}")]
    TimeIdentity {
        start: TimePoint,
        duration: DurationMin,
        end: TimePoint,
    },
}

/// Case-sensitive activity identifier. Token characters only.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActivityId(String);

impl ActivityId {
    pub fn new(name: &str) -> Result<Self, ScheduleError> {
        if !name.is_empty()
            && name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            Ok(ActivityId(name.to_string()))
        } else {
            Err(ScheduleError::InvalidActivity(name.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ActivityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One designer-authored constraint row: an activity with optional
/// start time and duration, each with an optional ± variance.
///
/// A variance without its base value is a format error, enforced at load
/// time; this type assumes the pairing holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateEntry {
    pub activity: ActivityId,
    pub start: Option<TimePoint>,
    pub start_variance: Option<VarianceMin>,
    pub duration: Option<DurationMin>,
    pub duration_variance: Option<VarianceMin>,
}

impl TemplateEntry {
    /// Entry with only an activity; start and end are left to propagation.
    pub fn unconstrained(activity: ActivityId) -> Self {
        TemplateEntry {
            activity,
            start: None,
            start_variance: None,
            duration: None,
            duration_variance: None,
        }
    }
}

/// An ordered sequence of template entries describing one persona's day.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleTemplate {
    pub name: String,
    pub day_start: TimePoint,
    pub day_end: TimePoint,
    /// When a propagation round stalls, pin the first entry's start to
    /// `day_start` and the last entry's end to `day_end` (once).
    pub anchor_day_bounds: bool,
    pub entries: Vec<TemplateEntry>,
}

/// A fully resolved entry: `start + duration = end` always holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleEntry {
    pub activity: ActivityId,
    pub start: TimePoint,
    pub duration: DurationMin,
    pub end: TimePoint,
}

impl ScheduleEntry {
    pub fn new(
        activity: ActivityId,
        start: TimePoint,
        duration: DurationMin,
        end: TimePoint,
    ) -> Result<Self, ScheduleError> {
        if start.minutes() + duration.minutes() != end.minutes() {
            return Err(ScheduleError::TimeIdentity {
                start,
                duration,
                end,
            });
        }
        Ok(ScheduleEntry {
            activity,
            start,
            duration,
            end,
        })
    }

    pub fn is_zero_length(&self) -> bool {
        self.duration.minutes() == 0
    }
}

/// One resolved day. Positive-duration entries tile a contiguous interval;
/// zero-duration entries remain as markers for activities squeezed out by
/// conflict resolution and are ignored by discretization and tracing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub template_name: String,
    pub day_index: usize,
    pub entries: Vec<ScheduleEntry>,
}

impl Schedule {
    /// Entries that actually occupy time, in order.
    pub fn active_entries(&self) -> impl Iterator<Item = &ScheduleEntry> {
        self.entries.iter().filter(|e| !e.is_zero_length())
    }

    /// Span from the first positive-duration start to the last end, if any.
    pub fn span(&self) -> Option<(TimePoint, TimePoint)> {
        let first = self.active_entries().next()?;
        let last = self.active_entries().last()?;
        Some((first.start, last.end))
    }
}

/// A set of daily schedules for one persona, generated or ingested.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScheduleCollection {
    pub label: String,
    pub activity_vocabulary: BTreeSet<ActivityId>,
    pub days: Vec<Schedule>,
}

impl ScheduleCollection {
    /// Intersection of all days' spans; `None` when empty or disjoint.
    pub fn common_span(&self) -> Option<(TimePoint, TimePoint)> {
        let mut spans = self.days.iter().filter_map(Schedule::span);
        let (mut lo, mut hi) = spans.next()?;
        for (s, e) in spans {
            lo = lo.max(s);
            hi = hi.min(e);
        }
        (lo < hi).then_some((lo, hi))
    }
}
