//! Within-house deficiency flags and thermostat representativeness from
//! identified parameters.

use std::collections::BTreeMap;
use std::path::PathBuf;

use thermokit_core::deficiency::{
    classify_house, representativeness, rollup, DeficiencyReport, HouseRooms, ParamDifference, RoomParams,
};
use thermokit_core::thermal::ThermalParams;

use super::identify::PARAM_HEADERS;
use super::{room_name, Ctx};
use crate::error::{Error, Result};
use crate::manifest::{InputFile, Manifest};
use crate::report::{read_table, summary_cells, Cell, OutDir, Table};
use crate::schema;

pub fn houses_from_params(params: &[ThermalParams]) -> Vec<HouseRooms> {
    let mut by_house: BTreeMap<&str, Vec<&ThermalParams>> = BTreeMap::new();
    for p in params {
        by_house.entry(&p.house_id).or_default().push(p);
    }
    by_house
        .into_iter()
        .map(|(id, ps)| HouseRooms {
            house_id: id.into(),
            thermostat_room: room_name(0),
            rooms: ps
                .iter()
                .map(|p| RoomParams { room: room_name(p.sensor), rc_heating: p.rc_heating, rq: p.rq, rk: p.rk })
                .collect(),
        })
        .collect()
}

/// Reads a `params.csv` written by the identify stage.
pub fn read_params(path: &std::path::Path) -> Result<Vec<ThermalParams>> {
    let t = read_table(path)?;
    let missing = PARAM_HEADERS.iter().find(|h| !t.headers.iter().any(|x| x == *h));
    if let Some(h) = missing {
        return Err(Error::Data(format!("{}: missing column '{h}'", path.display())));
    }
    let col = |name: &str| t.headers.iter().position(|h| h == name).unwrap();
    let text = |row: &[Cell], name: &str| match &row[col(name)] {
        Cell::Text(s) => s.clone(),
        _ => String::new(),
    };
    let bad = |line: usize, name: &str, v: &str| {
        Error::Data(format!("{}: line {}, column '{name}': cannot parse '{v}'", path.display(), line + 2))
    };
    let opt = |i: usize, row: &[Cell], name: &str| -> Result<Option<f64>> {
        let v = text(row, name);
        if v.is_empty() {
            return Ok(None);
        }
        v.parse::<f64>().map(Some).map_err(|_| bad(i, name, &v))
    };
    let count = |i: usize, row: &[Cell], name: &str| -> Result<usize> {
        let v = text(row, name);
        v.parse::<usize>().map_err(|_| bad(i, name, &v))
    };
    t.rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            Ok(ThermalParams {
                house_id: text(row, "house_id"),
                sensor: count(i, row, "sensor")?,
                rc_heating: opt(i, row, "rc_heating_h")?,
                rc_cooling: opt(i, row, "rc_cooling_h")?,
                rq: opt(i, row, "rq_f")?,
                rk: opt(i, row, "rk_f")?,
                heating_segments: count(i, row, "heating_segments")?,
                cooling_segments: count(i, row, "cooling_segments")?,
            })
        })
        .collect()
}

pub fn table4(reports: &[DeficiencyReport]) -> Table {
    let mut t = Table::new(&schema::TABLE4.headers);
    for (row, label) in rollup(reports).iter().zip(&schema::TABLE4.rows) {
        t.push(vec![
            Cell::text(&label[0]),
            row.one_room.into(),
            Cell::num(row.pct(row.one_room)),
            row.two_rooms.into(),
            Cell::num(row.pct(row.two_rooms)),
            row.total.into(),
            Cell::num(row.pct(row.total)),
        ]);
    }
    t
}

pub fn table5(houses: &[HouseRooms]) -> Table {
    let s = representativeness(houses);
    let mut t = Table::new(&schema::TABLE5.headers);
    let rows: [Option<ParamDifference>; 3] = [s.rc, s.rk, s.rq];
    for (p, label) in rows.iter().zip(&schema::TABLE5.rows) {
        let mut row = vec![Cell::text(&label[0])];
        row.extend(summary_cells(p.as_ref().map(|p| &p.summary)));
        row.push(p.map(|p| p.coeff_of_variation).filter(|v| v.is_finite()).into());
        t.push(row);
    }
    t
}

pub fn flag_table(reports: &[DeficiencyReport]) -> Table {
    let mut t = Table::new(&[
        "house_id",
        "room",
        "low_solar_gain",
        "high_solar_gain",
        "low_heating_input",
        "poor_insulation",
    ]);
    for r in reports {
        for f in &r.rooms {
            t.push(vec![
                Cell::text(&r.house_id),
                Cell::text(&f.room),
                Cell::text(f.low_solar_gain.to_string()),
                Cell::text(f.high_solar_gain.to_string()),
                Cell::text(f.low_heating_input.to_string()),
                Cell::text(f.poor_insulation.to_string()),
            ]);
        }
    }
    t
}

pub fn write(ctx: &Ctx, params: &[ThermalParams], manifest: Manifest) -> Result<()> {
    let houses = houses_from_params(params);
    let reports: Vec<DeficiencyReport> = houses.iter().map(|h| classify_house(&h.house_id, &h.rooms)).collect();
    let mut out = OutDir::create(ctx.stage_dir("deficiency"))?;
    out.table("flags", &flag_table(&reports))?;
    out.table("table4_deficiency", &table4(&reports))?;
    out.table("table5_representativeness", &table5(&houses))?;
    out.json("deficiency.json", &reports)?;
    manifest.write(&mut out)
}

pub fn params_path(ctx: &Ctx) -> PathBuf {
    match &ctx.config.input {
        Some(p) => p.clone(),
        None => ctx.stage_dir("identify").join("params.csv"),
    }
}

pub fn run(ctx: &Ctx) -> Result<()> {
    let path = params_path(ctx);
    if !path.is_file() {
        return Err(Error::Config(format!(
            "{}: parameter file not found; run the identify stage or pass --input params.csv",
            path.display()
        )));
    }
    let params = read_params(&path)?;
    let input = InputFile {
        path: path.display().to_string(),
        houses: houses_from_params(&params).len(),
        records: params.len(),
    };
    write(ctx, &params, Manifest::new("deficiency", &ctx.config, vec![input]))
}
