//! Deterministic SVG timeline rendering: one horizontal band per day,
//! colored blocks per activity, one panel per input collection.

use std::collections::BTreeSet;
use std::fmt::Write;

use persona_sched_core::schedule::{ActivityId, ScheduleCollection};

/// Fixed 20-color palette, cycled by sorted-vocabulary index.
const PALETTE: [&str; 20] = [
    "#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c", "#98df8a", "#d62728", "#ff9896",
    "#9467bd", "#c5b0d5", "#8c564b", "#c49c94", "#e377c2", "#f7b6d2", "#7f7f7f", "#c7c7c7",
    "#bcbd22", "#dbdb8d", "#17becf", "#9edae5",
];

const PLOT_WIDTH: f64 = 960.0;
const LEFT_MARGIN: f64 = 70.0;
const BAND_HEIGHT: f64 = 18.0;
const BAND_GAP: f64 = 4.0;
const PANEL_TITLE_HEIGHT: f64 = 24.0;
const AXIS_HEIGHT: f64 = 22.0;
const LEGEND_ROW_HEIGHT: f64 = 20.0;

fn x_of(minutes: i64) -> f64 {
    LEFT_MARGIN + minutes as f64 / 1440.0 * PLOT_WIDTH
}

/// Renders collections as stacked panels sharing one activity palette
/// and one legend. Output bytes are deterministic for identical input.
pub fn render_timeline(collections: &[ScheduleCollection]) -> String {
    let vocabulary: BTreeSet<&ActivityId> = collections
        .iter()
        .flat_map(|c| c.activity_vocabulary.iter())
        .collect();
    let color_of = |activity: &ActivityId| -> &str {
        let idx = vocabulary
            .iter()
            .position(|a| *a == activity)
            .unwrap_or(0);
        PALETTE[idx % PALETTE.len()]
    };

    let band_count: usize = collections.iter().map(|c| c.days.len()).sum();
    let panels_height: f64 = collections.len() as f64 * PANEL_TITLE_HEIGHT
        + band_count as f64 * (BAND_HEIGHT + BAND_GAP);
    let legend_height = vocabulary.len() as f64 * LEGEND_ROW_HEIGHT + 10.0;
    let total_height = panels_height + AXIS_HEIGHT + legend_height + 10.0;
    let total_width = LEFT_MARGIN + PLOT_WIDTH + 20.0;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total_width:.0}" height="{total_height:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(
        svg,
        r##"<rect width="{total_width:.0}" height="{total_height:.0}" fill="#ffffff"/>"##
    );

    let mut y = 4.0;
    for c in collections {
        let _ = writeln!(
            svg,
            r#"<text x="{LEFT_MARGIN:.1}" y="{:.1}" font-weight="bold">{}</text>"#,
            y + 14.0,
            escape(&c.label)
        );
        y += PANEL_TITLE_HEIGHT;
        for day in &c.days {
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" text-anchor="end">day {}</text>"#,
                LEFT_MARGIN - 6.0,
                y + BAND_HEIGHT - 5.0,
                day.day_index
            );
            for e in day.active_entries() {
                let x0 = x_of(e.start.minutes());
                let x1 = x_of(e.end.minutes());
                let _ = writeln!(
                    svg,
                    r#"<rect x="{x0:.2}" y="{y:.2}" width="{:.2}" height="{BAND_HEIGHT:.1}" fill="{}"><title>{} {}-{}</title></rect>"#,
                    x1 - x0,
                    color_of(&e.activity),
                    escape(e.activity.as_str()),
                    e.start,
                    e.end
                );
            }
            y += BAND_HEIGHT + BAND_GAP;
        }
    }

    // Hour axis, ticks every 3 hours.
    let axis_y = y + 12.0;
    for hour in (0..=24).step_by(3) {
        let x = x_of(hour * 60);
        let _ = writeln!(
            svg,
            r##"<line x1="{x:.1}" y1="{y:.1}" x2="{x:.1}" y2="{:.1}" stroke="#888888"/>"##,
            y + 4.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{x:.1}" y="{axis_y:.1}" text-anchor="middle">{hour:02}:00</text>"#
        );
    }
    y += AXIS_HEIGHT;

    for activity in &vocabulary {
        let _ = writeln!(
            svg,
            r#"<rect x="{LEFT_MARGIN:.1}" y="{y:.1}" width="14" height="14" fill="{}"/>"#,
            color_of(activity)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            LEFT_MARGIN + 20.0,
            y + 11.0,
            escape(activity.as_str())
        );
        y += LEGEND_ROW_HEIGHT;
    }

    svg.push_str("</svg>\n");
    svg
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
