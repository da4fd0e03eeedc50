//! Trace normalization, season windows and metadata summaries.

use serde::Serialize;
use thermokit_core::ingest::{segment_seasons, summarize_metadata, HouseTrace, SeasonDefinition, SeasonWindow};

use super::{per_house, Ctx};
use crate::error::{Error, Result};
use crate::io::{read_metadata_file, write_metadata_file, write_trace_file, ParsedTrace};
use crate::manifest::Manifest;
use crate::mapping::ColumnMapping;
use crate::report::{Cell, OutDir, Table};

#[derive(Debug, Clone, Serialize)]
pub struct HouseSummary {
    pub house_id: String,
    pub records: usize,
    pub interval_seconds: u32,
    pub first: Option<chrono::NaiveDateTime>,
    pub last: Option<chrono::NaiveDateTime>,
    pub gaps: usize,
    pub duplicates_dropped: usize,
    pub remote_sensors: usize,
    pub seasons: Vec<SeasonWindow>,
}

pub fn summarize(p: &ParsedTrace) -> Result<HouseSummary> {
    let t: &HouseTrace = &p.trace;
    let span = t.span();
    let mut seasons = Vec::new();
    for def in [SeasonDefinition::ComfortExclusive, SeasonDefinition::ParamidSpan] {
        seasons.extend(segment_seasons(t, def).map_err(|e| Error::core(&t.house_id, e))?);
    }
    Ok(HouseSummary {
        house_id: t.house_id.clone(),
        records: t.records.len(),
        interval_seconds: t.interval_seconds,
        first: span.map(|s| s.0),
        last: span.map(|s| s.1),
        gaps: t.gaps().len(),
        duplicates_dropped: p.duplicates_dropped,
        remote_sensors: t.num_sensors() - 1,
        seasons,
    })
}

/// Writes the normalized trace of one house in the default column layout.
pub fn normalize(ctx: &Ctx, p: &ParsedTrace) -> Result<()> {
    let dir = ctx.stage_dir("ingest").join("traces");
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    write_trace_file(&dir.join(format!("{}.csv", p.trace.house_id)), &p.trace, &ColumnMapping::default())
}

fn time(t: Option<chrono::NaiveDateTime>) -> Cell {
    Cell::text(t.map(|t| t.to_string()).unwrap_or_default())
}

pub fn house_table(houses: &[HouseSummary]) -> Table {
    let mut t = Table::new(&[
        "house_id",
        "records",
        "interval_seconds",
        "first",
        "last",
        "gaps",
        "duplicates_dropped",
        "remote_sensors",
    ]);
    for h in houses {
        t.push(vec![
            Cell::text(&h.house_id),
            h.records.into(),
            (h.interval_seconds as usize).into(),
            time(h.first),
            time(h.last),
            h.gaps.into(),
            h.duplicates_dropped.into(),
            h.remote_sensors.into(),
        ]);
    }
    t
}

pub fn season_table(houses: &[HouseSummary]) -> Table {
    let mut t = Table::new(&["house_id", "definition", "mode", "start", "end", "days"]);
    for h in houses {
        for w in &h.seasons {
            t.push(vec![
                Cell::text(&h.house_id),
                Cell::text(match w.definition {
                    SeasonDefinition::ComfortExclusive => "comfort",
                    SeasonDefinition::ParamidSpan => "paramid",
                }),
                Cell::text(w.mode.as_str()),
                Cell::text(w.start.to_string()),
                Cell::text(w.end.to_string()),
                Cell::num(w.duration().num_seconds() as f64 / 86_400.0),
            ]);
        }
    }
    t
}

pub fn write(ctx: &Ctx, houses: &[HouseSummary], manifest: Manifest) -> Result<()> {
    let mut out = OutDir::create(ctx.stage_dir("ingest"))?;
    out.note("traces/", houses.len());
    out.table("houses", &house_table(houses))?;
    out.table("seasons", &season_table(houses))?;
    if let Some(path) = &ctx.config.metadata {
        let records = read_metadata_file(path)?;
        write_metadata_file(&out.path("metadata.csv"), &records)?;
        out.note("metadata.csv", records.len());
        let report = summarize_metadata(&records).map_err(|e| Error::core("metadata", e))?;
        log::info!("{}", report.headline());
        let mut hist = Table::new(&["remote_sensors", "houses", "share", "cumulative_share"]);
        for b in &report.sensor_histogram {
            hist.push(vec![
                Cell::Int(b.value),
                b.count.into(),
                Cell::num(b.share),
                Cell::num(b.cumulative_share),
            ]);
        }
        out.table("sensor_histogram", &hist)?;
        out.json("penetration.json", &report)?;
    }
    manifest.write(&mut out)
}

pub fn run(ctx: &Ctx) -> Result<()> {
    let input = ctx.config.require_input()?;
    let (houses, inputs) = per_house(input, &ctx.mapping, |p| {
        normalize(ctx, p)?;
        summarize(p)
    })?;
    write(ctx, &houses, Manifest::new("ingest", &ctx.config, inputs))
}
