//! Minute-sampled state chains and Levenshtein-based similarity metrics,
//! plus the 30-minute random baseline used as a practical lower bound.

use std::collections::BTreeSet;
use thiserror::Error;

use crate::generator::RandomSource;
use crate::schedule::{ActivityId, Schedule, ScheduleCollection, ScheduleEntry};
use crate::time::{DurationMin, TimePoint};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimilarityError {
    #[error("day {day}: minute {minute} not covered by any entry")]
    Uncovered { day: usize, minute: i64 },
    #[error("chain lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("empty state chain")]
    EmptyChain,
    #[error("collection `{0}` is empty")]
    EmptyCollection(String),
    #[error("self-similarity needs at least two days, got {0}")]
    TooFewDays(usize),
    #[error("empty activity vocabulary")]
    EmptyVocabulary,
    #[error("invalid window: start must precede end")]
    InvalidWindow,
}

/// One activity symbol per minute of a comparison window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateChain {
    pub states: Vec<ActivityId>,
    pub window: (TimePoint, TimePoint),
}

/// Samples a schedule at 1-minute steps over `window`. Minute `t` takes
/// the activity of the entry whose half-open `[start, end)` contains it;
/// zero-duration entries are never selected.
pub fn discretize(
    schedule: &Schedule,
    window: (TimePoint, TimePoint),
) -> Result<StateChain, SimilarityError> {
    let (lo, hi) = (window.0.minutes(), window.1.minutes());
    if lo >= hi {
        return Err(SimilarityError::InvalidWindow);
    }
    let mut states = Vec::with_capacity((hi - lo) as usize);
    let mut entries = schedule.active_entries().peekable();
    for minute in lo..hi {
        while let Some(e) = entries.peek() {
            if e.end.minutes() <= minute {
                entries.next();
            } else {
                break;
            }
        }
        match entries.peek() {
            Some(e) if e.start.minutes() <= minute => states.push(e.activity.clone()),
            _ => {
                return Err(SimilarityError::Uncovered {
                    day: schedule.day_index,
                    minute,
                })
            }
        }
    }
    Ok(StateChain { states, window })
}

/// Classic edit distance (insert/delete/substitute, unit cost) with
/// two-row memory.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, sa) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, sb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(sa != sb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - L/n` over two equal-length chains.
pub fn sim_lev(a: &StateChain, b: &StateChain) -> Result<f64, SimilarityError> {
    if a.states.len() != b.states.len() {
        return Err(SimilarityError::LengthMismatch(
            a.states.len(),
            b.states.len(),
        ));
    }
    let n = a.states.len();
    if n == 0 {
        return Err(SimilarityError::EmptyChain);
    }
    let l = levenshtein(&a.states, &b.states);
    Ok(1.0 - l as f64 / n as f64)
}

fn discretize_all(
    c: &ScheduleCollection,
    window: (TimePoint, TimePoint),
) -> Result<Vec<StateChain>, SimilarityError> {
    if c.days.is_empty() {
        return Err(SimilarityError::EmptyCollection(c.label.clone()));
    }
    c.days.iter().map(|d| discretize(d, window)).collect()
}

/// Mean of `sim_lev` over all ordered day pairs of two collections.
/// Summation runs in fixed pair order, so results are bit-stable.
pub fn sim_cross(
    c1: &ScheduleCollection,
    c2: &ScheduleCollection,
    window: (TimePoint, TimePoint),
) -> Result<f64, SimilarityError> {
    let a = discretize_all(c1, window)?;
    let b = discretize_all(c2, window)?;
    let mut sum = 0.0;
    for x in &a {
        for y in &b {
            sum += sim_lev(x, y)?;
        }
    }
    Ok(sum / (a.len() * b.len()) as f64)
}

/// Mean of `sim_lev` over all unordered day pairs within one collection.
pub fn sim_self(
    c: &ScheduleCollection,
    window: (TimePoint, TimePoint),
) -> Result<f64, SimilarityError> {
    let chains = discretize_all(c, window)?;
    let n = chains.len();
    if n < 2 {
        return Err(SimilarityError::TooFewDays(n));
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            sum += sim_lev(&chains[i], &chains[j])?;
        }
    }
    Ok(sum * 2.0 / (n * (n - 1)) as f64)
}

/// Random lower-bound collection: 48 consecutive 30-minute entries per
/// day, each activity drawn uniformly (repeats allowed) from the sorted
/// vocabulary. Deterministic per `(seed, day)`.
pub fn baseline_collection(
    vocabulary: &BTreeSet<ActivityId>,
    days: usize,
    seed: u64,
) -> Result<ScheduleCollection, SimilarityError> {
    if vocabulary.is_empty() {
        return Err(SimilarityError::EmptyVocabulary);
    }
    let sorted: Vec<&ActivityId> = vocabulary.iter().collect();
    let mut out = Vec::with_capacity(days);
    for k in 0..days {
        let mut rng = RandomSource::for_day(seed, k);
        let entries = (0..48)
            .map(|slot| {
                let activity = sorted[rng.pick(sorted.len())].clone();
                let start = TimePoint::new(slot * 30).expect("in range");
                let end = TimePoint::new((slot + 1) * 30).expect("in range");
                ScheduleEntry::new(activity, start, DurationMin::new(30).expect("positive"), end)
                    .expect("identity holds")
            })
            .collect();
        out.push(Schedule {
            template_name: "baseline".into(),
            day_index: k,
            entries,
        });
    }
    Ok(ScheduleCollection {
        label: "baseline".into(),
        activity_vocabulary: vocabulary.clone(),
        days: out,
    })
}
