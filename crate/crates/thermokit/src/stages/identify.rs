//! RC/RQ fits on free-floating periods, RK from balance nights, outlier
//! filtering and per-sensor parameters.

use serde::Serialize;
use thermokit_core::ffp::{FfpMode, FfpSegment};
use thermokit_core::thermal::{
    combine_params, filter_fits, filter_rk_fits, fit_rk_balance, fit_segment, nightly_aggregate, FilterOptions,
    Filtered, RcFit, RkFit, ThermalParams,
};

use super::ffp::{definition, extract, split, Seasonal};
use super::{per_house, room_name, Ctx};
use crate::error::Result;
use crate::manifest::Manifest;
use crate::report::{Cell, OutDir, Table};

#[derive(Debug, Clone, Serialize)]
pub struct FitFailure {
    pub house_id: String,
    pub sensor: usize,
    pub kind: &'static str,
    pub start: Option<chrono::NaiveDateTime>,
    pub error: String,
}

#[derive(Debug, Clone, Default)]
pub struct HouseFits {
    pub rc: Vec<RcFit>,
    pub rk: Vec<RkFit>,
    pub failures: Vec<FitFailure>,
}

pub fn fit_house(house_id: &str, seasonal: &Seasonal, segments: &[FfpSegment]) -> HouseFits {
    let mut out = HouseFits::default();
    for seg in segments.iter().filter(|s| s.mode != FfpMode::DrAfternoon) {
        match fit_segment(seg) {
            Ok(f) => out.rc.push(f),
            Err(e) => out.failures.push(FitFailure {
                house_id: house_id.into(),
                sensor: seg.sensor,
                kind: if seg.mode == FfpMode::HeatingNight { "rc-heating" } else { "rc-cooling" },
                start: Some(seg.start),
                error: e.to_string(),
            }),
        }
    }
    if let Some(t) = &seasonal.heating {
        for sensor in 0..t.num_sensors() {
            match fit_rk_balance(house_id, sensor, &nightly_aggregate(t, sensor)) {
                Ok(f) => out.rk.push(f),
                Err(e) => out.failures.push(FitFailure {
                    house_id: house_id.into(),
                    sensor,
                    kind: "rk",
                    start: None,
                    error: e.to_string(),
                }),
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentifySummary {
    pub houses: usize,
    pub rc_fits: usize,
    pub rc_kept: usize,
    pub rk_fits: usize,
    pub rk_kept: usize,
    pub failures: usize,
    pub filter: FilterOptions,
    /// Standard deviation convention of the two-sigma filter.
    pub filter_std: &'static str,
}

pub struct Identified {
    pub rc: Filtered<RcFit>,
    pub rk: Filtered<RkFit>,
    pub params: Vec<ThermalParams>,
    pub failures: Vec<FitFailure>,
    pub summary: IdentifySummary,
}

pub fn filter_options(ctx: &Ctx) -> FilterOptions {
    FilterOptions {
        grouping: ctx.params.filter_grouping,
        sigmas: ctx.params.filter_sigmas,
        ..FilterOptions::default()
    }
}

pub fn join(houses: Vec<HouseFits>, opts: FilterOptions) -> Identified {
    let n = houses.len();
    let (mut rc, mut rk, mut failures) = (Vec::new(), Vec::new(), Vec::new());
    for h in houses {
        rc.extend(h.rc);
        rk.extend(h.rk);
        failures.extend(h.failures);
    }
    let (rc_fits, rk_fits) = (rc.len(), rk.len());
    let rc = filter_fits(rc, &opts);
    let rk = filter_rk_fits(rk, &opts);
    let params = combine_params(&rc.kept, &rk.kept);
    let summary = IdentifySummary {
        houses: n,
        rc_fits,
        rc_kept: rc.kept.len(),
        rk_fits,
        rk_kept: rk.kept.len(),
        failures: failures.len(),
        filter: opts,
        filter_std: "population",
    };
    Identified { rc, rk, params, failures, summary }
}

fn kebab<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

pub fn fit_table(id: &Identified) -> Table {
    let mut t = Table::new(&[
        "house_id", "sensor", "room", "season", "start", "rc_hours", "rq_f", "rk_f", "rmse", "r_value", "n",
        "filtered", "reason",
    ]);
    let mut rows: Vec<(String, usize, u8, String, Vec<Cell>)> = Vec::new();
    let rc_row = |f: &RcFit, reason: Option<String>| {
        vec![
            Cell::text(&f.house_id),
            f.sensor.into(),
            Cell::text(room_name(f.sensor)),
            Cell::text(f.season.as_str()),
            Cell::text(f.start.to_string()),
            Cell::num(f.rc_hours),
            f.rq.into(),
            Cell::Num(None),
            Cell::num(f.rmse),
            Cell::Num(None),
            f.segments.into(),
            Cell::text(reason.is_some().to_string()),
            Cell::text(reason.unwrap_or_default()),
        ]
    };
    let rk_row = |f: &RkFit, reason: Option<String>| {
        vec![
            Cell::text(&f.house_id),
            f.sensor.into(),
            Cell::text(room_name(f.sensor)),
            Cell::text("balance"),
            Cell::text(""),
            Cell::Num(None),
            Cell::Num(None),
            Cell::num(f.rk),
            Cell::Num(None),
            Cell::num(f.r_value),
            f.nights.into(),
            Cell::text(reason.is_some().to_string()),
            Cell::text(reason.unwrap_or_default()),
        ]
    };
    let rc_all = id.rc.kept.iter().map(|f| (f, None)).chain(id.rc.removed.iter().map(|(f, r)| (f, Some(kebab(r)))));
    for (f, reason) in rc_all {
        rows.push((f.house_id.clone(), f.sensor, 0, f.start.to_string(), rc_row(f, reason)));
    }
    let rk_all = id.rk.kept.iter().map(|f| (f, None)).chain(id.rk.removed.iter().map(|(f, r)| (f, Some(kebab(r)))));
    for (f, reason) in rk_all {
        rows.push((f.house_id.clone(), f.sensor, 1, String::new(), rk_row(f, reason)));
    }
    rows.sort_by(|a, b| (&a.0, a.1, a.2, &a.3).cmp(&(&b.0, b.1, b.2, &b.3)));
    t.rows = rows.into_iter().map(|r| r.4).collect();
    t
}

pub const PARAM_HEADERS: [&str; 9] = [
    "house_id",
    "sensor",
    "room",
    "rc_heating_h",
    "rc_cooling_h",
    "rq_f",
    "rk_f",
    "heating_segments",
    "cooling_segments",
];

pub fn param_table(params: &[ThermalParams]) -> Table {
    let mut t = Table::new(&PARAM_HEADERS);
    for p in params {
        t.push(vec![
            Cell::text(&p.house_id),
            p.sensor.into(),
            Cell::text(room_name(p.sensor)),
            p.rc_heating.into(),
            p.rc_cooling.into(),
            p.rq.into(),
            p.rk.into(),
            p.heating_segments.into(),
            p.cooling_segments.into(),
        ]);
    }
    t
}

fn failure_table(failures: &[FitFailure]) -> Table {
    let mut t = Table::new(&["house_id", "sensor", "room", "kind", "start", "error"]);
    for f in failures {
        t.push(vec![
            Cell::text(&f.house_id),
            f.sensor.into(),
            Cell::text(room_name(f.sensor)),
            Cell::text(f.kind),
            Cell::text(f.start.map(|s| s.to_string()).unwrap_or_default()),
            Cell::text(&f.error),
        ]);
    }
    t
}

pub fn write(ctx: &Ctx, id: &Identified, manifest: Manifest) -> Result<()> {
    let mut out = OutDir::create(ctx.stage_dir("identify"))?;
    out.table("fits", &fit_table(id))?;
    out.table("params", &param_table(&id.params))?;
    out.table("failures", &failure_table(&id.failures))?;
    out.json("summary.json", &id.summary)?;
    manifest.write(&mut out)
}

pub fn run(ctx: &Ctx) -> Result<()> {
    let def = definition(ctx);
    let input = ctx.config.require_input()?;
    let (houses, inputs) = per_house(input, &ctx.mapping, |t| {
        let seasonal = split(&t.trace, def)?;
        Ok(fit_house(&t.trace.house_id, &seasonal, &extract(&seasonal)))
    })?;
    let id = join(houses, filter_options(ctx));
    write(ctx, &id, Manifest::new("identify", &ctx.config, inputs))
}
