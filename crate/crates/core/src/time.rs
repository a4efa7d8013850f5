//! Minute-resolution time arithmetic for a single day.
//!
//! All times are integer minutes since midnight. A full day spans
//! `[0, 1440)`; the value 1440 is allowed only as an exclusive day-end
//! bound (rendered as "24:00").

use std::fmt;
use thiserror::Error;

/// Exclusive upper bound of a day, in minutes.
pub const DAY_END_MINUTES: i64 = 1440;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TimeError {
    #[error("malformed time `{0}`: expected zero-padded HH:MM")]
    Malformed(String),
    #[error("time `{0}` is outside 00:00..=24:00")]
    OutOfRange(String),
}

/// A point in time within one day, in minutes since midnight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimePoint(i64);

impl TimePoint {
    pub const DAY_START: TimePoint = TimePoint(0);
    pub const DAY_END: TimePoint = TimePoint(DAY_END_MINUTES);

    pub fn new(minutes: i64) -> Result<Self, TimeError> {
        if (0..=DAY_END_MINUTES).contains(&minutes) {
            Ok(TimePoint(minutes))
        } else {
            Err(TimeError::OutOfRange(minutes.to_string()))
        }
    }

    pub fn minutes(self) -> i64 {
        self.0
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_time(*self))
    }
}

/// A non-negative span of minutes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DurationMin(i64);

impl fmt::Display for DurationMin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl DurationMin {
    pub fn new(minutes: i64) -> Result<Self, TimeError> {
        if minutes >= 0 {
            Ok(DurationMin(minutes))
        } else {
            Err(TimeError::OutOfRange(minutes.to_string()))
        }
    }

    pub fn minutes(self) -> i64 {
        self.0
    }
}

/// A non-negative variance bound (±v) around a nominal start or duration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarianceMin(i64);

impl VarianceMin {
    pub const ZERO: VarianceMin = VarianceMin(0);

    pub fn new(minutes: i64) -> Result<Self, TimeError> {
        if minutes >= 0 {
            Ok(VarianceMin(minutes))
        } else {
            Err(TimeError::OutOfRange(minutes.to_string()))
        }
    }

    pub fn minutes(self) -> i64 {
        self.0
    }
}

/// Parses a zero-padded `HH:MM` string into a [`TimePoint`].
///
/// "24:00" is accepted as the exclusive day end.
pub fn parse_time(text: &str) -> Result<TimePoint, TimeError> {
    let bytes = text.as_bytes();
    if bytes.len() != 5 || bytes[2] != b':' || !bytes.iter().enumerate().all(|(i, b)| i == 2 || b.is_ascii_digit()) {
        return Err(TimeError::Malformed(text.to_string()));
    }
    let hours: i64 = text[..2].parse().map_err(|_| TimeError::Malformed(text.to_string()))?;
    let mins: i64 = text[3..].parse().map_err(|_| TimeError::Malformed(text.to_string()))?;
    if mins > 59 {
        return Err(TimeError::Malformed(text.to_string()));
    }
    let total = hours * 60 + mins;
    if total > DAY_END_MINUTES {
        return Err(TimeError::OutOfRange(text.to_string()));
    }
    Ok(TimePoint(total))
}

/// Formats a [`TimePoint`] back to zero-padded `HH:MM`; inverse of [`parse_time`].
pub fn format_time(t: TimePoint) -> String {
    format!("{:02}:{:02}", t.minutes() / 60, t.minutes() % 60)
}
