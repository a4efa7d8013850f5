//! Benchmark-only crate; see `benches/pipeline.rs`.

use persona_sched_core::generator::RandomSource;
use persona_sched_core::environment::OccupancyGrid;
use persona_sched_core::io::load_template;
use persona_sched_core::ScheduleTemplate;

/// Twelve-activity day used across the benchmarks.
pub fn sample_template() -> ScheduleTemplate {
    load_template(
        r#"{"name":"bench","entries":[
        {"activity":"sleep","start":"00:00","duration":"06:30","duration_variance":"00:20"},
        {"activity":"wake_routine","duration":"00:30","duration_variance":"00:10"},
        {"activity":"breakfast","duration":"00:30","duration_variance":"00:10"},
        {"activity":"morning_walk","duration":"01:00","duration_variance":"00:20"},
        {"activity":"reading"},
        {"activity":"lunch","start":"12:00","start_variance":"00:20","duration":"00:45","duration_variance":"00:15"},
        {"activity":"nap","duration":"01:00","duration_variance":"00:30"},
        {"activity":"hobby"},
        {"activity":"cooking","duration":"01:00","duration_variance":"00:15"},
        {"activity":"dinner","start":"18:30","start_variance":"00:15","duration":"00:45","duration_variance":"00:15"},
        {"activity":"tv"},
        {"activity":"night_routine","start":"22:30","start_variance":"00:20"}]}"#,
    )
    .expect("valid template")
}

/// 30x30 grid with ~30% blocked cells, seeded.
pub fn sample_grid(seed: u64) -> OccupancyGrid {
    let mut rng = RandomSource::from_seed(seed);
    let cells = (0..900).map(|_| rng.pick(10) < 3).collect();
    OccupancyGrid::new(30, 30, cells, 1.0).expect("well-formed grid")
}
