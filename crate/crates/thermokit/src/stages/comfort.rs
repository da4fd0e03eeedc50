//! Comfort indices, room deviation statistics and demand-response comfort
//! durations.

use serde::Serialize;
use thermokit_core::comfort::{
    auto_setpoint, cci, coi, deviation_stats, dr_comfort_summary, rf_histogram, BoundPolicy, DeviationReference,
    DeviationStats, DrComfortSummary, RfHistogram, RoomSeries,
};
use thermokit_core::ffp::{extract_ffps, FfpMode};
use thermokit_core::ingest::{segment_seasons, HouseTrace, HvacMode, SeasonDefinition, SeasonWindow, TraceRecord};
use thermokit_core::stats::Summary;

use super::{per_house, sensor_series, Ctx};
use crate::config::SeasonDef;
use crate::error::{Error, Result};
use crate::manifest::Manifest;
use crate::report::{summary_cells, Cell, OutDir, Table};
use crate::schema;

#[derive(Debug, Clone, Copy)]
pub struct ComfortParams {
    pub definition: SeasonDefinition,
    pub bin_width: f64,
    pub c: f64,
    pub cdrd_threshold: f64,
}

impl ComfortParams {
    pub fn from_ctx(ctx: &Ctx) -> ComfortParams {
        ComfortParams {
            definition: ctx.config.season_def.unwrap_or(SeasonDef::Comfort).into(),
            bin_width: ctx.params.bin_width,
            c: ctx.params.comfort_c,
            cdrd_threshold: ctx.params.cdrd_threshold,
        }
    }
}

/// Whole trace, or the records inside one mode's season windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    All,
    Cooling,
    Heating,
}

impl Scope {
    fn as_str(self) -> &'static str {
        match self {
            Scope::All => "all",
            Scope::Cooling => "cooling",
            Scope::Heating => "heating",
        }
    }

    fn setpoint(self, r: &TraceRecord) -> Option<f64> {
        match self {
            Scope::All => match (r.heat_setpoint, r.cool_setpoint) {
                (Some(h), Some(c)) => Some(auto_setpoint(h, c)),
                (h, c) => h.or(c),
            },
            Scope::Cooling => r.cool_setpoint,
            Scope::Heating => r.heat_setpoint,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RoomComfort {
    pub room: String,
    pub scope: Scope,
    pub histogram: RfHistogram,
    pub coi: f64,
    pub cci: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SeasonDeviations {
    pub scope: Scope,
    pub setpoint: DeviationStats,
    pub average: DeviationStats,
}

#[derive(Debug, Clone, Serialize)]
pub struct DrEvent {
    pub start: chrono::NaiveDateTime,
    pub end: chrono::NaiveDateTime,
    pub summary: DrComfortSummary,
}

#[derive(Debug, Clone, Serialize)]
pub struct HouseComfort {
    pub house_id: String,
    pub windows: Vec<SeasonWindow>,
    pub rooms: Vec<RoomComfort>,
    pub deviations: Vec<SeasonDeviations>,
    pub dr_event: Option<DrEvent>,
}

fn scoped(trace: &HouseTrace, windows: &[SeasonWindow], scope: Scope) -> Option<HouseTrace> {
    let mode = match scope {
        Scope::All => return Some(trace.clone()),
        Scope::Cooling => HvacMode::Cooling,
        Scope::Heating => HvacMode::Heating,
    };
    let w: Vec<SeasonWindow> = windows.iter().filter(|w| w.mode == mode).copied().collect();
    (!w.is_empty()).then(|| trace.restrict(&w))
}

fn room_indices(rooms: &[RoomSeries], setpoint: &[Option<f64>], p: &ComfortParams, scope: Scope) -> Vec<RoomComfort> {
    rooms
        .iter()
        .filter_map(|room| {
            let devs: Vec<f64> =
                room.temps.iter().zip(setpoint).filter_map(|(t, s)| Some((*t)? - (*s)?)).collect();
            let hist = rf_histogram(&devs, p.bin_width, BoundPolicy::DatasetMax).ok()?;
            Some(RoomComfort {
                room: room.room.clone(),
                scope,
                coi: coi(&hist, p.c),
                cci: (scope == Scope::Cooling).then(|| cci(&hist)),
                histogram: hist,
            })
        })
        .collect()
}

/// Longest thermostat-probe DR-afternoon free-floating period in the cooling
/// season, with every room's rise measured from the event start.
fn dr_event(trace: &HouseTrace, p: &ComfortParams) -> Option<DrEvent> {
    let seg = extract_ffps(trace, 0, FfpMode::DrAfternoon)
        .into_iter()
        .fold(None::<thermokit_core::ffp::FfpSegment>, |best, s| match best {
            Some(b) if b.duration() >= s.duration() => Some(b),
            _ => Some(s),
        })?;
    let records: Vec<&TraceRecord> =
        trace.records.iter().filter(|r| r.timestamp >= seg.start && r.timestamp <= seg.end).collect();
    let series: Vec<(String, Vec<(f64, Option<f64>)>)> = (0..trace.num_sensors())
        .map(|s| {
            let points = records
                .iter()
                .map(|r| ((r.timestamp - seg.start).num_seconds() as f64 / 60.0, r.sensor_temp(s)))
                .collect();
            (super::room_name(s), points)
        })
        .filter(|(_, pts): &(String, Vec<(f64, Option<f64>)>)| pts.iter().any(|(_, v)| v.is_some()))
        .collect();
    let refs: Vec<(&str, &[(f64, Option<f64>)])> = series.iter().map(|(n, s)| (n.as_str(), s.as_slice())).collect();
    let summary = dr_comfort_summary(&refs, p.cdrd_threshold).ok()?;
    Some(DrEvent { start: seg.start, end: seg.end, summary })
}

pub fn analyze(trace: &HouseTrace, p: &ComfortParams) -> Result<HouseComfort> {
    let windows = segment_seasons(trace, p.definition).map_err(|e| Error::core(&trace.house_id, e))?;
    let mut rooms = Vec::new();
    let mut deviations = Vec::new();
    let mut dr = None;
    for scope in [Scope::All, Scope::Cooling, Scope::Heating] {
        let Some(t) = scoped(trace, &windows, scope) else { continue };
        let series = sensor_series(&t);
        let setpoint: Vec<Option<f64>> = t.records.iter().map(|r| scope.setpoint(r)).collect();
        rooms.extend(room_indices(&series, &setpoint, p, scope));
        if scope != Scope::All {
            let stats = |reference| deviation_stats(&series, &setpoint, reference).ok();
            if let (Some(setpoint), Some(average)) =
                (stats(DeviationReference::Setpoint), stats(DeviationReference::ControlAverage))
            {
                deviations.push(SeasonDeviations { scope, setpoint, average });
            }
        }
        if scope == Scope::Cooling {
            dr = dr_event(&t, p);
        }
    }
    Ok(HouseComfort { house_id: trace.house_id.clone(), windows, rooms, deviations, dr_event: dr })
}

fn summary(xs: &[f64]) -> Option<Summary> {
    Summary::of(xs)
}

/// Table 1: CDRD and maximum-rise statistics across houses' DR events.
pub fn table1(houses: &[HouseComfort]) -> Table {
    let mut t = Table::new(&schema::TABLE1.headers);
    let events: Vec<&DrComfortSummary> = houses.iter().filter_map(|h| h.dr_event.as_ref().map(|e| &e.summary)).collect();
    let cdrd_of = |s: &DrComfortSummary, room: &Option<String>| -> Option<f64> {
        let room = room.as_ref()?;
        s.rooms.iter().find(|r| &r.room == room)?.cdrd.minutes()
    };
    let thermostat = |s: &DrComfortSummary| s.rooms.iter().find(|r| r.room == super::room_name(0)).cloned();
    let dev_of = |s: &DrComfortSummary, room: &str| s.rooms.iter().find(|r| r.room == room).map(|r| r.max_deviation);
    let collect = |f: &dyn Fn(&DrComfortSummary) -> Option<f64>| -> Vec<f64> { events.iter().filter_map(|s| f(s)).collect() };
    let rows: [(&str, &str, Vec<f64>); 8] = [
        ("durations_min", "fast_reacting_rooms", collect(&|s| cdrd_of(s, &s.fast_reacting_room))),
        ("durations_min", "slow_reacting_rooms", collect(&|s| cdrd_of(s, &s.slow_reacting_room))),
        ("durations_min", "thermostat", collect(&|s| thermostat(s)?.cdrd.minutes())),
        ("durations_min", "comfort_gap", collect(&|s| s.comfort_gap_duration)),
        ("deviations_f", "least_varying_rooms", collect(&|s| dev_of(s, &s.least_varying_room))),
        ("deviations_f", "most_varying_rooms", collect(&|s| dev_of(s, &s.most_varying_room))),
        ("deviations_f", "thermostat", collect(&|s| Some(thermostat(s)?.max_deviation))),
        ("deviations_f", "comfort_gap", collect(&|s| Some(s.comfort_gap_deviation))),
    ];
    for (section, parameter, xs) in rows {
        let mut row = vec![Cell::text(section), Cell::text(parameter)];
        row.extend(summary_cells(summary(&xs).as_ref()));
        t.push(row);
    }
    t
}

/// Table 2: cooling-season CCI of the thermostat room and of each house's
/// least and most comfortable rooms.
pub fn table2(houses: &[HouseComfort]) -> Table {
    let mut t = Table::new(&schema::TABLE2.headers);
    let mut thermostat = Vec::new();
    let mut lowest = Vec::new();
    let mut highest = Vec::new();
    for h in houses {
        let cooling: Vec<(&str, f64)> = h
            .rooms
            .iter()
            .filter(|r| r.scope == Scope::Cooling)
            .filter_map(|r| Some((r.room.as_str(), r.cci?)))
            .collect();
        if cooling.len() < 2 {
            continue;
        }
        if let Some((_, v)) = cooling.iter().find(|(n, _)| *n == super::room_name(0)) {
            thermostat.push(*v);
        }
        lowest.push(cooling.iter().map(|c| c.1).fold(f64::INFINITY, f64::min));
        highest.push(cooling.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max));
    }
    for (label, xs) in
        [("thermostat_room_comfort", thermostat), ("lowest_room_comfort", lowest), ("highest_room_comfort", highest)]
    {
        let mut row = vec![Cell::text(label)];
        row.extend(summary_cells(summary(&xs).as_ref()));
        t.push(row);
    }
    t
}

/// Pooled mean and sample std of several samples given their summaries.
fn pooled(parts: &[Summary]) -> (Option<f64>, Option<f64>) {
    let n: usize = parts.iter().map(|s| s.n).sum();
    if n == 0 {
        return (None, None);
    }
    let sum: f64 = parts.iter().map(|s| s.n as f64 * s.mean).sum();
    let mean = sum / n as f64;
    let ss: f64 = parts
        .iter()
        .map(|s| (s.n as f64 - 1.0).max(0.0) * s.std * s.std + s.n as f64 * (s.mean - mean).powi(2))
        .sum();
    (Some(mean), (n > 1).then(|| (ss / (n as f64 - 1.0)).sqrt()))
}

/// Table 3: deviations of each house's coldest and hottest rooms from the
/// setpoint and from the room average, pooled over houses per season.
pub fn table3(houses: &[HouseComfort]) -> Table {
    let mut t = Table::new(&schema::TABLE3.headers);
    let pick = |scope: Scope, average: bool, hottest: bool| -> Vec<Summary> {
        houses
            .iter()
            .flat_map(|h| h.deviations.iter().filter(move |d| d.scope == scope))
            .filter_map(|d| {
                let stats = if average { &d.average } else { &d.setpoint };
                let name = if hottest { &stats.hottest_room } else { &stats.coldest_room };
                stats.rooms.iter().find(|r| &r.room == name)?.summary
            })
            .collect()
    };
    for (reference, average) in [("setpoint", false), ("average", true)] {
        for (room, hottest) in [("coldest_room", false), ("hottest_room", true)] {
            let (cm, cs) = pooled(&pick(Scope::Cooling, average, hottest));
            let (hm, hs) = pooled(&pick(Scope::Heating, average, hottest));
            t.push(vec![Cell::text(reference), Cell::text(room), cm.into(), cs.into(), hm.into(), hs.into()]);
        }
    }
    t
}

pub fn room_table(houses: &[HouseComfort]) -> Table {
    let mut t = Table::new(&[
        "house_id",
        "room",
        "scope",
        "samples",
        "coi",
        "cci",
        "setpoint_dev_mean",
        "setpoint_dev_std",
        "average_dev_mean",
        "average_dev_std",
    ]);
    for h in houses {
        for r in &h.rooms {
            let dev = |average: bool| -> Option<Summary> {
                let d = h.deviations.iter().find(|d| d.scope == r.scope)?;
                let stats = if average { &d.average } else { &d.setpoint };
                stats.rooms.iter().find(|x| x.room == r.room)?.summary
            };
            let (sp, av) = (dev(false), dev(true));
            t.push(vec![
                Cell::text(&h.house_id),
                Cell::text(&r.room),
                Cell::text(r.scope.as_str()),
                r.histogram.total_samples.into(),
                Cell::num(r.coi),
                r.cci.into(),
                sp.map(|s| s.mean).into(),
                sp.map(|s| s.std).into(),
                av.map(|s| s.mean).into(),
                av.map(|s| s.std).into(),
            ]);
        }
    }
    t
}

pub fn write(ctx: &Ctx, houses: &[HouseComfort], manifest: Manifest) -> Result<()> {
    let mut out = OutDir::create(ctx.stage_dir("comfort"))?;
    out.table("rooms", &room_table(houses))?;
    out.table("table1_dr_comfort", &table1(houses))?;
    out.table("table2_cci", &table2(houses))?;
    out.table("table3_deviations", &table3(houses))?;
    for h in houses {
        out.json(&format!("houses/{}.json", h.house_id), h)?;
    }
    manifest.write(&mut out)
}

pub fn run(ctx: &Ctx) -> Result<()> {
    let p = ComfortParams::from_ctx(ctx);
    let input = ctx.config.require_input()?;
    let (houses, inputs) = per_house(input, &ctx.mapping, |t| analyze(&t.trace, &p))?;
    write(ctx, &houses, Manifest::new("comfort", &ctx.config, inputs))
}
