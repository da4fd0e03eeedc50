//! Free-floating period extraction inside the season windows.

use thermokit_core::ffp::{extract_ffps, FfpMode, FfpSegment};
use thermokit_core::ingest::{segment_seasons, HouseTrace, HvacMode, SeasonDefinition, SeasonWindow};

use super::{per_house, room_name, Ctx};
use crate::config::SeasonDef;
use crate::error::{Error, Result};
use crate::fmt::sig6;
use crate::manifest::Manifest;
use crate::report::{Cell, OutDir, Table};

/// A trace split by season. Heating-night segments come from the heating
/// windows, cooling-day and DR-afternoon segments from the cooling windows.
pub struct Seasonal {
    pub windows: Vec<SeasonWindow>,
    pub heating: Option<HouseTrace>,
    pub cooling: Option<HouseTrace>,
}

pub fn definition(ctx: &Ctx) -> SeasonDefinition {
    ctx.config.season_def.unwrap_or(SeasonDef::Paramid).into()
}

pub fn split(trace: &HouseTrace, def: SeasonDefinition) -> Result<Seasonal> {
    let windows = segment_seasons(trace, def).map_err(|e| Error::core(&trace.house_id, e))?;
    let part = |mode: HvacMode| {
        let w: Vec<SeasonWindow> = windows.iter().filter(|w| w.mode == mode).copied().collect();
        (!w.is_empty()).then(|| trace.restrict(&w))
    };
    Ok(Seasonal { heating: part(HvacMode::Heating), cooling: part(HvacMode::Cooling), windows })
}

/// Segments of every sensor, ordered by sensor, mode, then time.
pub fn extract(s: &Seasonal) -> Vec<FfpSegment> {
    let sensors = [&s.heating, &s.cooling].iter().filter_map(|t| t.as_ref().map(|t| t.num_sensors())).max();
    let mut out = Vec::new();
    for sensor in 0..sensors.unwrap_or(0) {
        for mode in FfpMode::ALL {
            let source = if mode == FfpMode::HeatingNight { &s.heating } else { &s.cooling };
            if let Some(t) = source {
                out.extend(extract_ffps(t, sensor, mode));
            }
        }
    }
    out
}

fn payload(seg: &FfpSegment) -> String {
    let points: Vec<String> = seg
        .samples
        .iter()
        .zip(&seg.outdoor)
        .map(|((t, v), o)| format!("[{},{},{}]", sig6(*t), sig6(*v), sig6(*o)))
        .collect();
    format!("[{}]", points.join(","))
}

pub fn segment_table(segments: &[FfpSegment]) -> Table {
    let mut t = Table::new(&[
        "house_id",
        "sensor",
        "room",
        "mode",
        "start",
        "end",
        "hours",
        "samples",
        "initial_temp",
        "mean_outdoor",
        "payload",
    ]);
    for s in segments {
        t.push(vec![
            Cell::text(&s.house_id),
            s.sensor.into(),
            Cell::text(room_name(s.sensor)),
            Cell::text(s.mode.as_str()),
            Cell::text(s.start.to_string()),
            Cell::text(s.end.to_string()),
            Cell::num(s.hours()),
            s.samples.len().into(),
            Cell::num(s.initial_temp),
            Cell::num(s.mean_outdoor),
            Cell::text(payload(s)),
        ]);
    }
    t
}

/// Segment counts and hours per house, sensor and mode.
pub fn count_table(segments: &[FfpSegment]) -> Table {
    let mut t = Table::new(&["house_id", "sensor", "room", "mode", "segments", "hours"]);
    let mut i = 0;
    while i < segments.len() {
        let s = &segments[i];
        let n = segments[i..]
            .iter()
            .take_while(|x| x.house_id == s.house_id && x.sensor == s.sensor && x.mode == s.mode)
            .count();
        let hours: f64 = segments[i..i + n].iter().map(FfpSegment::hours).sum();
        t.push(vec![
            Cell::text(&s.house_id),
            s.sensor.into(),
            Cell::text(room_name(s.sensor)),
            Cell::text(s.mode.as_str()),
            n.into(),
            Cell::num(hours),
        ]);
        i += n;
    }
    t
}

/// Segments are written per house as they are produced by the caller; this
/// writes the already formatted tables.
pub fn write(ctx: &Ctx, segments: &Table, counts: &Table, manifest: Manifest) -> Result<()> {
    let mut out = OutDir::create(ctx.stage_dir("ffp"))?;
    out.csv_only("segments.csv", segments)?;
    out.table("counts", counts)?;
    manifest.write(&mut out)
}

pub fn run(ctx: &Ctx) -> Result<()> {
    let def = definition(ctx);
    let input = ctx.config.require_input()?;
    let (houses, inputs) = per_house(input, &ctx.mapping, |t| {
        let segs = extract(&split(&t.trace, def)?);
        Ok((segment_table(&segs), count_table(&segs)))
    })?;
    let (mut segments, mut counts) = (segment_table(&[]), count_table(&[]));
    for (s, c) in houses {
        segments.rows.extend(s.rows);
        counts.rows.extend(c.rows);
    }
    write(ctx, &segments, &counts, Manifest::new("ffp", &ctx.config, inputs))
}
