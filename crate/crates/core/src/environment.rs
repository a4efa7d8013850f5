//! Occupancy-grid floorplans, A* path planning, and 1 Hz location traces.
//!
//! Traces stand in for a full robot simulator: an agent sits at the
//! mapped cell center of its current activity and, at each activity
//! transition, walks a planned path to the new location at constant speed.

use serde::Deserialize;
use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use thiserror::Error;

use crate::schedule::{ActivityId, Schedule};

#[derive(Debug, Error)]
pub enum EnvironmentError {
    #[error("floorplan format error: {0}")]
    Format(String),
    #[error("no path from ({0}, {1}) to ({2}, {3})")]
    NoPath(usize, usize, usize, usize),
    #[error("activity `{0}` has no mapped location")]
    UnmappedActivity(String),
    #[error("cell ({0}, {1}) is out of bounds or blocked")]
    BadCell(usize, usize),
}

/// Row-major boolean occupancy grid; `true` means blocked.
#[derive(Debug, Clone)]
pub struct OccupancyGrid {
    pub width: usize,
    pub height: usize,
    cells: Vec<bool>,
    pub cell_size: f64,
}

impl OccupancyGrid {
    pub fn new(
        width: usize,
        height: usize,
        cells: Vec<bool>,
        cell_size: f64,
    ) -> Result<Self, EnvironmentError> {
        if width == 0 || height == 0 || cells.len() != width * height {
            return Err(EnvironmentError::Format(format!(
                "grid dimensions {width}x{height} do not match {} cells",
                cells.len()
            )));
        }
        Ok(OccupancyGrid {
            width,
            height,
            cells,
            cell_size,
        })
    }

    pub fn blocked(&self, x: usize, y: usize) -> bool {
        self.cells[y * self.width + x]
    }

    pub fn in_bounds(&self, x: usize, y: usize) -> bool {
        x < self.width && y < self.height
    }

    /// Center of cell (x, y) in meters.
    pub fn cell_center(&self, x: usize, y: usize) -> (f64, f64) {
        (
            (x as f64 + 0.5) * self.cell_size,
            (y as f64 + 0.5) * self.cell_size,
        )
    }
}

/// Parses an ASCII floorplan: `#` blocked, `.` free, row 0 on top,
/// x = column index.
pub fn load_floorplan(text: &str, cell_size: f64) -> Result<OccupancyGrid, EnvironmentError> {
    let rows: Vec<&str> = text.lines().collect();
    if rows.is_empty() {
        return Err(EnvironmentError::Format("empty floorplan".into()));
    }
    let width = rows[0].len();
    let mut cells = Vec::with_capacity(width * rows.len());
    for (y, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(EnvironmentError::Format(format!(
                "row {y} has length {}, expected {width}",
                row.len()
            )));
        }
        for (x, ch) in row.chars().enumerate() {
            match ch {
                '#' => cells.push(true),
                '.' => cells.push(false),
                other => {
                    return Err(EnvironmentError::Format(format!(
                        "illegal character {other:?} at ({x}, {y})"
                    )))
                }
            }
        }
    }
    OccupancyGrid::new(width, rows.len(), cells, cell_size)
}

/// Per-floorplan assignment of activities to free cells.
#[derive(Debug, Clone, Default)]
pub struct LocationMap {
    pub entries: BTreeMap<ActivityId, (usize, usize)>,
}

impl LocationMap {
    pub fn insert(
        &mut self,
        grid: &OccupancyGrid,
        activity: ActivityId,
        x: usize,
        y: usize,
    ) -> Result<(), EnvironmentError> {
        if !grid.in_bounds(x, y) || grid.blocked(x, y) {
            return Err(EnvironmentError::BadCell(x, y));
        }
        self.entries.insert(activity, (x, y));
        Ok(())
    }

    pub fn get(&self, activity: &ActivityId) -> Option<(usize, usize)> {
        self.entries.get(activity).copied()
    }
}

/// JSON sidecar carried next to the ASCII floorplan file.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSidecar {
    cell_size_m: f64,
    locations: BTreeMap<String, (usize, usize)>,
}

/// Parses the `{"cell_size_m": ..., "locations": {...}}` sidecar and
/// validates every location against the grid.
pub fn load_location_sidecar(
    grid_text: &str,
    sidecar_text: &str,
) -> Result<(OccupancyGrid, LocationMap), EnvironmentError> {
    let raw: RawSidecar =
        serde_json::from_str(sidecar_text).map_err(|e| EnvironmentError::Format(e.to_string()))?;
    let grid = load_floorplan(grid_text, raw.cell_size_m)?;
    let mut map = LocationMap::default();
    for (name, (x, y)) in raw.locations {
        let activity =
            ActivityId::new(&name).map_err(|e| EnvironmentError::Format(e.to_string()))?;
        map.insert(&grid, activity, x, y)?;
    }
    Ok((grid, map))
}

/// Shortest 4-connected path, unit step cost, Manhattan heuristic.
/// Neighbors expand in +x, -x, +y, -y order; equal-f nodes pop FIFO.
pub fn plan_path(
    grid: &OccupancyGrid,
    from: (usize, usize),
    to: (usize, usize),
) -> Result<Vec<(usize, usize)>, EnvironmentError> {
    for &(x, y) in [&from, &to] {
        if !grid.in_bounds(x, y) || grid.blocked(x, y) {
            return Err(EnvironmentError::BadCell(x, y));
        }
    }
    let idx = |(x, y): (usize, usize)| y * grid.width + x;
    let manhattan = |(x, y): (usize, usize)| {
        (x as i64 - to.0 as i64).unsigned_abs() + (y as i64 - to.1 as i64).unsigned_abs()
    };

    let mut dist = vec![u64::MAX; grid.width * grid.height];
    let mut parent = vec![usize::MAX; grid.width * grid.height];
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    dist[idx(from)] = 0;
    heap.push(Reverse((manhattan(from), seq, from)));

    while let Some(Reverse((_, _, cell))) = heap.pop() {
        if cell == to {
            let mut path = vec![to];
            let mut at = idx(to);
            while at != idx(from) {
                at = parent[at];
                path.push((at % grid.width, at / grid.width));
            }
            path.reverse();
            return Ok(path);
        }
        let g = dist[idx(cell)];
        let (x, y) = cell;
        let neighbors = [
            (x.wrapping_add(1), y),
            (x.wrapping_sub(1), y),
            (x, y.wrapping_add(1)),
            (x, y.wrapping_sub(1)),
        ];
        for next in neighbors {
            if !grid.in_bounds(next.0, next.1) || grid.blocked(next.0, next.1) {
                continue;
            }
            if g + 1 < dist[idx(next)] {
                dist[idx(next)] = g + 1;
                parent[idx(next)] = idx(cell);
                seq += 1;
                heap.push(Reverse((g + 1 + manhattan(next), seq, next)));
            }
        }
    }
    Err(EnvironmentError::NoPath(from.0, from.1, to.0, to.1))
}

/// A 1 Hz-class location trace for one day.
#[derive(Debug, Clone)]
pub struct Trace {
    /// (seconds since day start, x meters, y meters, activity).
    pub samples: Vec<(f64, f64, f64, ActivityId)>,
    /// Transitions whose walk outlasted the activity they belong to.
    pub warnings: Vec<String>,
}

/// Renders a schedule onto a floorplan as timed positions.
///
/// The agent departs at the new activity's start time and walks the
/// planned path at constant `speed`; positions are linearly interpolated
/// along cell centers. A walk that outlasts its activity continues into
/// subsequent samples and is recorded as a warning.
pub fn generate_trace(
    schedule: &Schedule,
    grid: &OccupancyGrid,
    locations: &LocationMap,
    speed: f64,
    sample_hz: f64,
) -> Result<Trace, EnvironmentError> {
    assert!(speed > 0.0, "speed must be positive");
    assert!(sample_hz > 0.0, "sample_hz must be positive");

    let entries: Vec<_> = schedule.active_entries().cloned().collect();
    if entries.is_empty() {
        return Err(EnvironmentError::Format("schedule has no entries".into()));
    }
    for e in &entries {
        if locations.get(&e.activity).is_none() {
            return Err(EnvironmentError::UnmappedActivity(
                e.activity.as_str().to_string(),
            ));
        }
    }

    // One walk per activity transition, departing at the new start.
    struct Walk {
        depart_s: f64,
        arrive_s: f64,
        waypoints: Vec<(f64, f64)>,
        cumulative: Vec<f64>,
    }
    let mut walks: Vec<Walk> = Vec::new();
    let mut warnings = Vec::new();
    for pair in entries.windows(2) {
        let from = locations.get(&pair[0].activity).expect("checked");
        let to = locations.get(&pair[1].activity).expect("checked");
        if from == to {
            continue;
        }
        let cells = plan_path(grid, from, to)?;
        let waypoints: Vec<(f64, f64)> =
            cells.iter().map(|&(x, y)| grid.cell_center(x, y)).collect();
        let mut cumulative = vec![0.0];
        for w in waypoints.windows(2) {
            let d = ((w[1].0 - w[0].0).powi(2) + (w[1].1 - w[0].1).powi(2)).sqrt();
            cumulative.push(cumulative.last().unwrap() + d);
        }
        let depart_s = pair[1].start.minutes() as f64 * 60.0;
        let travel_s = cumulative.last().unwrap() / speed;
        let duration_s = pair[1].duration.minutes() as f64 * 60.0;
        if travel_s > duration_s {
            warnings.push(format!(
                "walk to {} takes {travel_s:.1} s, longer than its {duration_s:.0} s duration",
                pair[1].activity
            ));
        }
        walks.push(Walk {
            depart_s,
            arrive_s: depart_s + travel_s,
            waypoints,
            cumulative,
        });
    }

    let span_start = entries[0].start.minutes() as f64 * 60.0;
    let span_end = entries[entries.len() - 1].end.minutes() as f64 * 60.0;
    let period = 1.0 / sample_hz;
    let count = ((span_end - span_start) * sample_hz).round() as usize;

    let position_at = |t: f64| -> (f64, f64) {
        // Most recent walk that has departed decides the position.
        let walk = walks.iter().rev().find(|w| t >= w.depart_s);
        match walk {
            None => {
                let (x, y) = locations.get(&entries[0].activity).expect("checked");
                grid.cell_center(x, y)
            }
            Some(w) if t >= w.arrive_s => *w.waypoints.last().unwrap(),
            Some(w) => {
                let travelled = (t - w.depart_s) * speed;
                let seg = w
                    .cumulative
                    .windows(2)
                    .position(|c| travelled < c[1])
                    .unwrap_or(w.waypoints.len() - 2);
                let seg_len = w.cumulative[seg + 1] - w.cumulative[seg];
                let frac = if seg_len > 0.0 {
                    (travelled - w.cumulative[seg]) / seg_len
                } else {
                    0.0
                };
                let (ax, ay) = w.waypoints[seg];
                let (bx, by) = w.waypoints[seg + 1];
                (ax + (bx - ax) * frac, ay + (by - ay) * frac)
            }
        }
    };

    let mut samples = Vec::with_capacity(count);
    let mut owner = entries.iter().peekable();
    for k in 0..count {
        let t = span_start + k as f64 * period;
        while let Some(e) = owner.peek() {
            if (e.end.minutes() as f64 * 60.0) <= t && owner.clone().nth(1).is_some() {
                owner.next();
            } else {
                break;
            }
        }
        let activity = owner.peek().expect("non-empty").activity.clone();
        let (x, y) = position_at(t);
        samples.push((t, x, y, activity));
    }

    Ok(Trace { samples, warnings })
}

/// CSV rendering: header `t_s,x_m,y_m,activity`, 3-decimal times and
/// positions.
pub fn trace_to_csv(trace: &Trace) -> String {
    let mut out = String::from("t_s,x_m,y_m,activity\n");
    for (t, x, y, activity) in &trace.samples {
        out.push_str(&format!("{t:.3},{x:.3},{y:.3},{activity}\n"));
    }
    out
}
