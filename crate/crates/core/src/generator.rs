//! Schedule generation by iterative bidirectional constraint propagation.
//!
//! Generation runs in two phases. First, start times and durations that
//! carry a variance are jittered by a uniform integer draw from
//! `{-v, ..., +v}` (negative durations clamp to zero, modelling activities
//! that occasionally get skipped). Second, the partially known entries are
//! completed by alternating sweeps of two rules:
//!
//! * duration rule: `start + duration = end` fills the missing one of the
//!   three, shortened against the earliest later defined start (forward)
//!   or the latest earlier defined end (backward) to resolve conflicts;
//! * adjacency rule: consecutive activities share a boundary time, and an
//!   earlier activity is extended forward to close a gap.
//!
//! A sweep round that changes nothing means the template is
//! underconstrained; a pair of fixed times that cannot coexist means it is
//! overconstrained. When `anchor_day_bounds` is set, one stalled round may
//! instead pin the first entry's start to `day_start` and the last entry's
//! end to `day_end` before giving up.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use thiserror::Error;

use crate::schedule::{
    ActivityId, Schedule, ScheduleCollection, ScheduleEntry, ScheduleTemplate,
};
use crate::time::{DurationMin, TimePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// A full propagation round produced no updates.
    Underconstrained,
    /// Two already-defined times conflicted irreconcilably.
    Overconstrained,
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorKind::Underconstrained => f.write_str("underconstrained"),
            ErrorKind::Overconstrained => f.write_str("overconstrained"),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{kind} at entry {entry_index}: {detail}")]
pub struct GenerationError {
    pub kind: ErrorKind,
    pub entry_index: usize,
    pub detail: String,
}

/// Source of the per-entry jitter applied during initialization.
///
/// The generator itself is deterministic given the delta sequence, which
/// lets the validator re-run it with all deltas pinned to an extreme.
pub trait DeltaSampler {
    /// A delta in `{-variance, ..., +variance}` (inclusive, integer minutes).
    fn delta(&mut self, variance: i64) -> i64;
}

/// Seeded RNG wrapper. Same seed, same sample sequence.
#[derive(Debug, Clone)]
pub struct RandomSource {
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn from_seed(seed: u64) -> Self {
        RandomSource {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent per-day stream derived from (seed, day).
    pub fn for_day(seed: u64, day: usize) -> Self {
        RandomSource::from_seed(splitmix64(
            seed.wrapping_add((day as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        ))
    }

    /// Uniform index in `0..n`.
    pub fn pick(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl DeltaSampler for RandomSource {
    fn delta(&mut self, variance: i64) -> i64 {
        if variance == 0 {
            0
        } else {
            self.rng.random_range(-variance..=variance)
        }
    }
}

/// A schedule entry mid-propagation. Times are raw minutes; absent fields
/// are still unresolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialEntry {
    pub activity: ActivityId,
    pub start: Option<i64>,
    pub duration: Option<i64>,
    pub end: Option<i64>,
    /// Whether the start came from the template (sampled in step 1) rather
    /// than from propagation. Zero-width entries whose boundary times are
    /// purely propagated are squeeze markers, not constraints, and are
    /// skipped by the conflict look-ahead.
    start_sampled: bool,
}

impl PartialEntry {
    fn is_complete(&self) -> bool {
        self.start.is_some() && self.end.is_some()
    }

    fn is_squeeze_marker(&self) -> bool {
        !self.start_sampled
            && matches!((self.start, self.end), (Some(s), Some(e)) if s == e)
    }
}

/// Step 1: copy activities and jitter the defined starts and durations.
/// Durations sampled below zero clamp to zero; sampled starts clamp into
/// the day bounds. End times all begin unresolved.
pub fn initialize_partial(
    template: &ScheduleTemplate,
    sampler: &mut impl DeltaSampler,
) -> Vec<PartialEntry> {
    template
        .entries
        .iter()
        .map(|e| {
            let start = e.start.map(|s| {
                let v = e.start_variance.map_or(0, |v| v.minutes());
                (s.minutes() + sampler.delta(v))
                    .clamp(template.day_start.minutes(), template.day_end.minutes())
            });
            let duration = e.duration.map(|d| {
                let v = e.duration_variance.map_or(0, |v| v.minutes());
                (d.minutes() + sampler.delta(v)).max(0)
            });
            PartialEntry {
                activity: e.activity.clone(),
                start,
                duration,
                end: None,
                start_sampled: start.is_some(),
            }
        })
        .collect()
}

/// One duration-rule step on entry `i`. Returns whether anything changed.
pub fn apply_duration_constraints(
    entries: &mut [PartialEntry],
    i: usize,
    day_start: TimePoint,
    day_end: TimePoint,
) -> Result<bool, GenerationError> {
    let e = &entries[i];
    match (e.start, e.duration, e.end) {
        (Some(start), Some(duration), None) => {
            // Shorten against the earliest defined start further ahead;
            // uninitialized entries may lie between the conflicting pair.
            let bound = entries[i + 1..]
                .iter()
                .filter(|x| !x.is_squeeze_marker())
                .filter_map(|x| x.start)
                .min();
            let end = match bound {
                Some(b) => (start + duration).min(b),
                None => (start + duration).min(day_end.minutes()),
            };
            if end < start {
                return Err(GenerationError {
                    kind: ErrorKind::Overconstrained,
                    entry_index: i,
                    detail: format!(
                        "{}: a later fixed start at {end} precedes this start at {start}",
                        entries[i].activity
                    ),
                });
            }
            entries[i].end = Some(end);
            Ok(true)
        }
        (None, Some(duration), Some(end)) => {
            let bound = entries[..i]
                .iter()
                .filter(|x| !x.is_squeeze_marker())
                .filter_map(|x| x.end)
                .max();
            let start = match bound {
                Some(b) => (end - duration).max(b),
                None => (end - duration).max(day_start.minutes()),
            };
            if start > end {
                return Err(GenerationError {
                    kind: ErrorKind::Overconstrained,
                    entry_index: i,
                    detail: format!(
                        "{}: an earlier fixed end at {start} passes this end at {end}",
                        entries[i].activity
                    ),
                });
            }
            entries[i].start = Some(start);
            Ok(true)
        }
        _ => Ok(false),
    }
}

/// One adjacency-rule step on entry `i`: share boundaries with both
/// neighbors, extend forward over gaps, fail on defined overlaps.
pub fn apply_adjacency_constraints(
    entries: &mut [PartialEntry],
    i: usize,
) -> Result<bool, GenerationError> {
    let mut changed = false;

    if let Some(end) = entries[i].end {
        if i + 1 < entries.len() {
            match entries[i + 1].start {
                None => {
                    entries[i + 1].start = Some(end);
                    changed = true;
                }
                Some(next_start) if next_start > end => {
                    // Extend current activity to fill gap.
                    entries[i].end = Some(next_start);
                    changed = true;
                }
                Some(next_start) if next_start < end => {
                    return Err(GenerationError {
                        kind: ErrorKind::Overconstrained,
                        entry_index: i + 1,
                        detail: format!(
                            "{} starts at {next_start}, before {} ends at {end}",
                            entries[i + 1].activity,
                            entries[i].activity
                        ),
                    });
                }
                Some(_) => {}
            }
        }
    }

    if let Some(start) = entries[i].start {
        if i > 0 {
            match entries[i - 1].end {
                None => {
                    entries[i - 1].end = Some(start);
                    changed = true;
                }
                Some(prev_end) if prev_end < start => {
                    // Extend previous activity to fill gap.
                    entries[i - 1].end = Some(start);
                    changed = true;
                }
                Some(prev_end) if prev_end > start => {
                    return Err(GenerationError {
                        kind: ErrorKind::Overconstrained,
                        entry_index: i,
                        detail: format!(
                            "{} starts at {start}, before {} ends at {prev_end}",
                            entries[i].activity,
                            entries[i - 1].activity
                        ),
                    });
                }
                Some(_) => {}
            }
        }
    }

    Ok(changed)
}

/// Generates one day from a template with the given jitter source.
pub fn generate_schedule(
    template: &ScheduleTemplate,
    sampler: &mut impl DeltaSampler,
) -> Result<Schedule, GenerationError> {
    let mut entries = initialize_partial(template, sampler);
    let n = entries.len();
    let mut anchors_available = template.anchor_day_bounds;

    while !entries.iter().all(PartialEntry::is_complete) {
        let mut changed = false;
        for i in 0..n {
            changed |=
                apply_duration_constraints(&mut entries, i, template.day_start, template.day_end)?;
        }
        for i in 0..n {
            changed |= apply_adjacency_constraints(&mut entries, i)?;
        }
        if !changed && anchors_available {
            anchors_available = false;
            if entries[0].start.is_none() {
                entries[0].start = Some(template.day_start.minutes());
                changed = true;
            }
            if entries[n - 1].end.is_none() {
                entries[n - 1].end = Some(template.day_end.minutes());
                changed = true;
            }
        }
        if !changed {
            let stuck = entries
                .iter()
                .position(|e| !e.is_complete())
                .expect("loop condition");
            return Err(GenerationError {
                kind: ErrorKind::Underconstrained,
                entry_index: stuck,
                detail: format!(
                    "{}: no progress in a full propagation round",
                    entries[stuck].activity
                ),
            });
        }
    }

    finalize(template, entries)
}

fn finalize(
    template: &ScheduleTemplate,
    entries: Vec<PartialEntry>,
) -> Result<Schedule, GenerationError> {
    let mut resolved = Vec::with_capacity(entries.len());
    for (i, e) in entries.into_iter().enumerate() {
        let (start, end) = (e.start.expect("complete"), e.end.expect("complete"));
        if end < start {
            return Err(GenerationError {
                kind: ErrorKind::Overconstrained,
                entry_index: i,
                detail: format!("{}: resolved to end {end} before start {start}", e.activity),
            });
        }
        let make = || -> Result<ScheduleEntry, crate::time::TimeError> {
            Ok(ScheduleEntry::new(
                e.activity.clone(),
                TimePoint::new(start)?,
                DurationMin::new(end - start)?,
                TimePoint::new(end)?,
            )
            .expect("start + duration = end by construction"))
        };
        resolved.push(make().map_err(|err| GenerationError {
            kind: ErrorKind::Overconstrained,
            entry_index: i,
            detail: format!("{}: {err}", e.activity),
        })?);
    }
    Ok(Schedule {
        template_name: template.name.clone(),
        day_index: 0,
        entries: resolved,
    })
}

/// Generates `days` independent days. Day `k` draws from its own stream
/// derived from `(seed, k)`, so results do not depend on evaluation order.
pub fn generate_collection(
    template: &ScheduleTemplate,
    days: usize,
    seed: u64,
) -> Result<ScheduleCollection, GenerationError> {
    assert!(days >= 1, "days must be >= 1");
    let mut out = Vec::with_capacity(days);
    for k in 0..days {
        let mut rng = RandomSource::for_day(seed, k);
        let mut day = generate_schedule(template, &mut rng).map_err(|mut e| {
            e.detail = format!("day {k}: {}", e.detail);
            e
        })?;
        day.day_index = k;
        out.push(day);
    }
    let vocabulary = template
        .entries
        .iter()
        .map(|e| e.activity.clone())
        .collect();
    Ok(ScheduleCollection {
        label: template.name.clone(),
        activity_vocabulary: vocabulary,
        days: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::load_template;
    use crate::time::VarianceMin;
    use crate::schedule::TemplateEntry;

    /// Fixed-delta sampler used to make step-level tests deterministic.
    struct Fixed(i64);
    impl DeltaSampler for Fixed {
        fn delta(&mut self, variance: i64) -> i64 {
            self.0.clamp(-variance, variance)
        }
    }

    fn act(name: &str) -> ActivityId {
        ActivityId::new(name).unwrap()
    }

    fn partial(
        name: &str,
        start: Option<i64>,
        duration: Option<i64>,
        end: Option<i64>,
    ) -> PartialEntry {
        PartialEntry {
            activity: act(name),
            start,
            duration,
            end,
            start_sampled: start.is_some(),
        }
    }

    fn template(name: &str, entries: Vec<TemplateEntry>) -> ScheduleTemplate {
        ScheduleTemplate {
            name: name.into(),
            day_start: TimePoint::DAY_START,
            day_end: TimePoint::DAY_END,
            anchor_day_bounds: true,
            entries,
        }
    }

    fn entry(
        name: &str,
        start: Option<i64>,
        start_v: Option<i64>,
        duration: Option<i64>,
        duration_v: Option<i64>,
    ) -> TemplateEntry {
        TemplateEntry {
            activity: act(name),
            start: start.map(|m| TimePoint::new(m).unwrap()),
            start_variance: start_v.map(|m| VarianceMin::new(m).unwrap()),
            duration: duration.map(|m| DurationMin::new(m).unwrap()),
            duration_variance: duration_v.map(|m| VarianceMin::new(m).unwrap()),
        }
    }

    #[test]
    fn init_zero_variance_copies_values() {
        let t = template("t", vec![entry("a", Some(420), Some(0), Some(60), Some(0))]);
        let got = initialize_partial(&t, &mut Fixed(5));
        assert_eq!(got[0].start, Some(420));
        assert_eq!(got[0].duration, Some(60));
        assert_eq!(got[0].end, None);
    }

    #[test]
    fn init_clamps_negative_duration_to_zero() {
        let t = template("t", vec![entry("a", None, None, Some(30), Some(45))]);
        let got = initialize_partial(&t, &mut Fixed(-40));
        assert_eq!(got[0].duration, Some(0));
    }

    #[test]
    fn init_leaves_unconstrained_entry_empty() {
        let t = template("t", vec![TemplateEntry::unconstrained(act("a"))]);
        let got = initialize_partial(&t, &mut Fixed(0));
        assert_eq!(got[0], partial("a", None, None, None));
    }

    #[test]
    fn duration_forward_shortens_against_lookahead() {
        let mut entries = vec![
            partial("a", Some(420), Some(180), None),
            partial("b", None, None, None),
            partial("c", Some(540), None, None),
        ];
        let changed = apply_duration_constraints(
            &mut entries,
            0,
            TimePoint::DAY_START,
            TimePoint::DAY_END,
        )
        .unwrap();
        assert!(changed);
        assert_eq!(entries[0].end, Some(540));
    }

    #[test]
    fn duration_backward_pushes_start_back() {
        let mut entries = vec![partial("cooking", None, Some(60), Some(1110))];
        apply_duration_constraints(&mut entries, 0, TimePoint::DAY_START, TimePoint::DAY_END)
            .unwrap();
        assert_eq!(entries[0].start, Some(1050));
    }

    #[test]
    fn duration_forward_fails_when_fixed_times_conflict() {
        let mut entries = vec![
            partial("a", Some(480), Some(60), None),
            partial("b", Some(420), None, None),
        ];
        let err = apply_duration_constraints(
            &mut entries,
            0,
            TimePoint::DAY_START,
            TimePoint::DAY_END,
        )
        .unwrap_err();
        assert_eq!(err.kind, ErrorKind::Overconstrained);
    }

    #[test]
    fn adjacency_propagates_start_to_previous_end() {
        let mut entries = vec![
            partial("cooking", None, Some(60), None),
            partial("dinner", Some(1110), Some(30), None),
        ];
        apply_adjacency_constraints(&mut entries, 1).unwrap();
        assert_eq!(entries[0].end, Some(1110));
    }

    #[test]
    fn adjacency_extends_over_gap() {
        let mut entries = vec![
            partial("a", Some(420), None, Some(480)),
            partial("b", Some(600), None, None),
        ];
        apply_adjacency_constraints(&mut entries, 0).unwrap();
        assert_eq!(entries[0].end, Some(600));
    }

    #[test]
    fn adjacency_fails_on_defined_overlap() {
        let mut entries = vec![
            partial("a", Some(420), None, Some(540)),
            partial("b", Some(500), None, None),
        ];
        let err = apply_adjacency_constraints(&mut entries, 0).unwrap_err();
        assert_eq!(err.kind, ErrorKind::Overconstrained);
    }

    #[test]
    fn backward_propagation_places_cooking_before_dinner() {
        let t = template(
            "t",
            vec![
                entry("cooking", None, None, Some(60), None),
                entry("dinner", Some(1110), None, Some(30), None),
            ],
        );
        let s = generate_schedule(&t, &mut Fixed(0)).unwrap();
        assert_eq!(s.entries[0].start.minutes(), 1050);
        assert_eq!(s.entries[0].end.minutes(), 1110);
        assert_eq!(s.entries[1].start.minutes(), 1110);
        assert_eq!(s.entries[1].end.minutes(), 1140);
    }

    #[test]
    fn free_entry_fills_gap_between_fixed_neighbors() {
        let t = template(
            "t",
            vec![
                entry("a", Some(420), Some(0), Some(60), Some(0)),
                TemplateEntry::unconstrained(act("b")),
                entry("c", Some(600), Some(0), Some(30), Some(0)),
            ],
        );
        let s = generate_schedule(&t, &mut Fixed(0)).unwrap();
        assert_eq!(s.entries[1].start.minutes(), 480);
        assert_eq!(s.entries[1].end.minutes(), 600);
    }

    #[test]
    fn conflict_squeezes_middle_entry_to_zero() {
        let t = template(
            "t",
            vec![
                entry("a", Some(420), None, Some(180), None),
                TemplateEntry::unconstrained(act("b")),
                entry("c", Some(540), None, Some(60), None),
            ],
        );
        let s = generate_schedule(&t, &mut Fixed(0)).unwrap();
        assert_eq!(s.entries[0].end.minutes(), 540);
        assert_eq!(s.entries[1].duration.minutes(), 0);
        assert_eq!(s.entries[2].start.minutes(), 540);
        assert_eq!(s.entries[2].end.minutes(), 600);
    }

    #[test]
    fn stall_without_anchor_is_underconstrained() {
        let mut t = template(
            "t",
            vec![
                entry("a", None, None, Some(60), None),
                entry("b", None, None, Some(60), None),
            ],
        );
        t.anchor_day_bounds = false;
        let err = generate_schedule(&t, &mut Fixed(0)).unwrap_err();
        assert_eq!(err.kind, ErrorKind::Underconstrained);
    }

    #[test]
    fn whole_day_single_entry() {
        let t = template("t", vec![entry("sleep", Some(0), Some(0), Some(1440), Some(0))]);
        let s = generate_schedule(&t, &mut Fixed(0)).unwrap();
        assert_eq!(s.entries[0].start.minutes(), 0);
        assert_eq!(s.entries[0].end.minutes(), 1440);
    }

    #[test]
    fn collection_is_deterministic_per_seed() {
        let doc = r#"{"name":"p","entries":[
            {"activity":"sleep","start":"00:00","duration":"07:00","duration_variance":"00:30"},
            {"activity":"spare_time"},
            {"activity":"lunch","start":"12:00","start_variance":"00:20","duration":"00:45","duration_variance":"00:15"},
            {"activity":"afternoon"}]}"#;
        let t = load_template(doc).unwrap();
        let a = generate_collection(&t, 3, 7).unwrap();
        let b = generate_collection(&t, 3, 7).unwrap();
        assert_eq!(a, b);
        let c = generate_collection(&t, 3, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_variance_collection_days_are_identical() {
        let doc = r#"{"name":"p","entries":[
            {"activity":"sleep","start":"00:00","duration":"07:00"},
            {"activity":"rest"}]}"#;
        let t = load_template(doc).unwrap();
        let c = generate_collection(&t, 5, 1).unwrap();
        for day in &c.days {
            assert_eq!(day.entries, c.days[0].entries);
        }
    }
}
