//! Template-driven daily activity schedules for home-robot simulation:
//! constraint-propagation generation, design-time validation, Levenshtein
//! similarity metrics, and grid-based location traces.

pub mod environment;
pub mod generator;
pub mod io;
pub mod schedule;
pub mod similarity;
pub mod time;
pub mod validator;

pub use schedule::{
    ActivityId, Schedule, ScheduleCollection, ScheduleEntry, ScheduleTemplate, TemplateEntry,
};
pub use time::{format_time, parse_time, DurationMin, TimePoint, VarianceMin};
