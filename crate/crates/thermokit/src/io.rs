//! Trace and metadata files.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDateTime;
use csv::{ReaderBuilder, StringRecord, WriterBuilder};
use thermokit_core::ingest::{HouseMetadata, HouseTrace, TraceRecord};

use crate::error::{Error, Result};
use crate::mapping::ColumnMapping;

const TIMESTAMP_FORMATS: [&str; 4] = ["%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M", "%Y-%m-%dT%H:%M"];
const WRITE_FORMAT: &str = "%Y-%m-%d %H:%M:%S";

/// One house parsed from a trace file.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTrace {
    pub trace: HouseTrace,
    pub duplicates_dropped: usize,
}

fn missing(cell: &str) -> bool {
    matches!(cell, "" | "NA" | "NaN" | "nan" | "null" | "NULL")
}

struct Cells<'a> {
    record: &'a StringRecord,
    line: u64,
}

impl Cells<'_> {
    fn number(&self, idx: Option<usize>, name: &str) -> Result<Option<f64>> {
        let Some(cell) = idx.and_then(|i| self.record.get(i)) else {
            return Ok(None);
        };
        if missing(cell) {
            return Ok(None);
        }
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            _ => Err(Error::Data(format!(
                "line {}, column '{name}': cannot parse '{cell}' as a number",
                self.line
            ))),
        }
    }

    fn flag(&self, idx: Option<usize>, name: &str) -> Result<Option<bool>> {
        let Some(cell) = idx.and_then(|i| self.record.get(i)) else {
            return Ok(None);
        };
        parse_bool(cell).map_err(|_| {
            Error::Data(format!("line {}, column '{name}': cannot parse '{cell}' as a flag", self.line))
        })
    }
}

fn parse_bool(cell: &str) -> std::result::Result<Option<bool>, ()> {
    if missing(cell) {
        return Ok(None);
    }
    match cell {
        "true" | "True" | "TRUE" => Ok(Some(true)),
        "false" | "False" | "FALSE" => Ok(Some(false)),
        _ => cell.parse::<f64>().map(|v| Some(v != 0.0)).map_err(|_| ()),
    }
}

fn parse_timestamp(cell: &str, format: Option<&str>) -> Option<NaiveDateTime> {
    match format {
        Some(f) => NaiveDateTime::parse_from_str(cell, f).ok(),
        None => TIMESTAMP_FORMATS.iter().find_map(|f| NaiveDateTime::parse_from_str(cell, f).ok()),
    }
}

/// Most frequent positive spacing between consecutive timestamps; ties go to
/// the shorter spacing.
pub fn modal_interval(records: &[TraceRecord]) -> Option<u32> {
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for w in records.windows(2) {
        let dt = (w[1].timestamp - w[0].timestamp).num_seconds();
        if dt > 0 {
            *counts.entry(dt).or_default() += 1;
        }
    }
    let best = counts.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))?;
    u32::try_from(*best.0).ok()
}

/// Parses a delimited trace file. Records are sorted by timestamp and a
/// repeated timestamp keeps its first row. Houses are split on the mapped
/// house-id column, or the whole file belongs to `default_house`.
pub fn parse_trace(bytes: &[u8], mapping: &ColumnMapping, default_house: &str) -> Result<Vec<ParsedTrace>> {
    let mut reader = ReaderBuilder::new()
        .delimiter(mapping.delimiter as u8)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let headers = reader.headers()?.clone();
    let index: HashMap<&str, usize> = headers.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let col = |name: &str| index.get(name).copied();
    let required = |name: &str| col(name).ok_or_else(|| Error::Data(format!("missing mandatory column '{name}'")));

    let ts_col = required(&mapping.timestamp)?;
    let thermostat = required(&mapping.thermostat_temp)?;
    let outdoor = required(&mapping.outdoor_temp)?;
    let house_col = mapping.house_id.as_deref().map(required).transpose()?;
    let control = col(&mapping.control_temp);
    let cool_sp = col(&mapping.cool_setpoint);
    let heat_sp = col(&mapping.heat_setpoint);
    let stages = |names: &[String]| -> Vec<(usize, String)> {
        names.iter().filter_map(|n| col(n).map(|i| (i, n.clone()))).collect()
    };
    let heat_stages = stages(&mapping.heat_stages);
    let cool_stages = stages(&mapping.cool_stages);
    let remote = (1..=mapping.max_remote_sensors)
        .rev()
        .find(|n| col(&mapping.sensor_temp(*n)).is_some())
        .unwrap_or(0);
    let sensors: Vec<(Option<usize>, String, Option<usize>, String)> = (1..=remote)
        .map(|n| {
            let (t, m) = (mapping.sensor_temp(n), mapping.sensor_motion(n));
            (col(&t), t, col(&m), m)
        })
        .collect();
    let unit = mapping.unit;
    let temp = |v: Option<f64>| v.map(|x| unit.to_fahrenheit(x));

    let mut by_house: BTreeMap<String, Vec<TraceRecord>> = BTreeMap::new();
    let mut record = StringRecord::new();
    while reader.read_record(&mut record)? {
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let cells = Cells { record: &record, line };
        let raw_ts = record.get(ts_col).unwrap_or("");
        let timestamp = parse_timestamp(raw_ts, mapping.timestamp_format.as_deref()).ok_or_else(|| {
            Error::Data(format!("line {line}, column '{}': cannot parse timestamp '{raw_ts}'", mapping.timestamp))
        })?;
        let mut r = TraceRecord::empty(timestamp);
        r.control_temp = temp(cells.number(control, &mapping.control_temp)?);
        r.cool_setpoint = temp(cells.number(cool_sp, &mapping.cool_setpoint)?);
        r.heat_setpoint = temp(cells.number(heat_sp, &mapping.heat_setpoint)?);
        r.outdoor_temp = temp(cells.number(Some(outdoor), &mapping.outdoor_temp)?);
        r.thermostat_temp = temp(cells.number(Some(thermostat), &mapping.thermostat_temp)?);
        r.heat_runtimes = heat_stages.iter().map(|(i, n)| cells.number(Some(*i), n)).collect::<Result<_>>()?;
        r.cool_runtimes = cool_stages.iter().map(|(i, n)| cells.number(Some(*i), n)).collect::<Result<_>>()?;
        r.sensor_temps = sensors.iter().map(|(i, n, _, _)| cells.number(*i, n).map(temp)).collect::<Result<_>>()?;
        r.motion_flags = sensors.iter().map(|(_, _, i, n)| cells.flag(*i, n)).collect::<Result<_>>()?;
        let house = match house_col {
            Some(i) => record.get(i).unwrap_or("").to_string(),
            None => default_house.to_string(),
        };
        if house.is_empty() {
            return Err(Error::Data(format!("line {line}: empty house id")));
        }
        by_house.entry(house).or_default().push(r);
    }

    by_house
        .into_iter()
        .map(|(house, mut records)| {
            records.sort_by_key(|r| r.timestamp);
            let before = records.len();
            records.dedup_by_key(|r| r.timestamp);
            let duplicates_dropped = before - records.len();
            if duplicates_dropped > 0 {
                log::warn!("{house}: dropped {duplicates_dropped} rows with duplicated timestamps");
            }
            let interval = modal_interval(&records).unwrap_or(mapping.default_interval_seconds);
            let trace = HouseTrace::new(house.clone(), records, interval)
                .map_err(|e| Error::core(format!("house {house}"), e))?;
            Ok(ParsedTrace { trace, duplicates_dropped })
        })
        .collect()
}

/// House id implied by a file name: the stem up to the first '.'.
pub fn house_id_from_path(path: &Path) -> String {
    let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("house");
    name.split('.').next().unwrap_or(name).to_string()
}

pub fn read_trace_file(path: &Path, mapping: &ColumnMapping) -> Result<Vec<ParsedTrace>> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    parse_trace(&bytes, mapping, &house_id_from_path(path)).map_err(|e| match e {
        Error::Data(m) => Error::Data(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Trace files under `input`: the file itself, or the `.csv`/`.txt` files of
/// a directory in name order.
pub fn trace_files(input: &Path) -> Result<Vec<PathBuf>> {
    if input.is_file() {
        return Ok(vec![input.to_path_buf()]);
    }
    let entries = std::fs::read_dir(input).map_err(|e| Error::io(input, e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && matches!(p.extension().and_then(|x| x.to_str()), Some("csv" | "txt")))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::Config(format!("{}: no trace files", input.display())));
    }
    Ok(files)
}

fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes `trace` with the columns named by `mapping`, temperatures in the
/// mapping's unit and floats in shortest round-trip form.
pub fn write_trace<W: Write>(out: W, trace: &HouseTrace, mapping: &ColumnMapping) -> Result<()> {
    let width = |f: fn(&TraceRecord) -> usize| trace.records.iter().map(f).max().unwrap_or(0);
    let heat = width(|r| r.heat_runtimes.len());
    let cool = width(|r| r.cool_runtimes.len());
    let remote = width(|r| r.sensor_temps.len().max(r.motion_flags.len()));
    if heat > mapping.heat_stages.len() || cool > mapping.cool_stages.len() {
        return Err(Error::Data(format!("{}: more runtime stages than mapped columns", trace.house_id)));
    }
    let mut header: Vec<String> = Vec::new();
    header.extend(mapping.house_id.clone());
    header.extend(
        [&mapping.timestamp, &mapping.control_temp, &mapping.cool_setpoint, &mapping.heat_setpoint, &mapping.outdoor_temp]
            .map(String::clone),
    );
    header.extend(mapping.heat_stages[..heat].iter().cloned());
    header.extend(mapping.cool_stages[..cool].iter().cloned());
    header.push(mapping.thermostat_temp.clone());
    header.extend((1..=remote).map(|n| mapping.sensor_temp(n)));
    header.extend((1..=remote).map(|n| mapping.sensor_motion(n)));

    let back = |v: Option<f64>| match mapping.unit {
        crate::mapping::TemperatureUnit::F => v,
        crate::mapping::TemperatureUnit::C => v.map(|f| (f - 32.0) * 5.0 / 9.0),
    };
    let format = mapping.timestamp_format.as_deref().unwrap_or(WRITE_FORMAT);
    let mut w = WriterBuilder::new().delimiter(mapping.delimiter as u8).from_writer(BufWriter::new(out));
    w.write_record(&header)?;
    let mut row: Vec<String> = Vec::with_capacity(header.len());
    for r in &trace.records {
        row.clear();
        if mapping.house_id.is_some() {
            row.push(trace.house_id.clone());
        }
        row.push(r.timestamp.format(format).to_string());
        for v in [r.control_temp, r.cool_setpoint, r.heat_setpoint, r.outdoor_temp] {
            row.push(num(back(v)));
        }
        let stage = |xs: &[Option<f64>], i: usize| num(xs.get(i).copied().flatten());
        row.extend((0..heat).map(|i| stage(&r.heat_runtimes, i)));
        row.extend((0..cool).map(|i| stage(&r.cool_runtimes, i)));
        row.push(num(back(r.thermostat_temp)));
        row.extend((0..remote).map(|i| num(back(r.sensor_temps.get(i).copied().flatten()))));
        row.extend((0..remote).map(|i| match r.motion_flags.get(i).copied().flatten() {
            Some(true) => "1".to_string(),
            Some(false) => "0".to_string(),
            None => String::new(),
        }));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::Data(e.to_string()))?;
    Ok(())
}

pub fn write_trace_file(path: &Path, trace: &HouseTrace, mapping: &ColumnMapping) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_trace(f, trace, mapping)
}

/// Canonical metadata headers, in file order.
pub const METADATA_HEADERS: [&str; 8] = [
    "house_id",
    "floor_area",
    "num_occupants",
    "num_floors",
    "num_remote_sensors",
    "state_code",
    "eco_plus_enrolled",
    "eco_plus_slider",
];

/// Parses metadata with the canonical headers. `house_id` and
/// `num_remote_sensors` are mandatory; other columns may be absent.
pub fn parse_metadata(bytes: &[u8], delimiter: u8) -> Result<Vec<HouseMetadata>> {
    let mut reader = ReaderBuilder::new().delimiter(delimiter).trim(csv::Trim::All).from_reader(bytes);
    let headers = reader.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let required = |name: &str| col(name).ok_or_else(|| Error::Data(format!("missing mandatory column '{name}'")));
    let id = required("house_id")?;
    let sensors = required("num_remote_sensors")?;
    let [area, occupants, floors, state, eco, slider] =
        ["floor_area", "num_occupants", "num_floors", "state_code", "eco_plus_enrolled", "eco_plus_slider"].map(col);

    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let cells = Cells { record: &rec, line };
        let int = |idx: Option<usize>, name: &str| -> Result<Option<i64>> {
            match cells.number(idx, name)? {
                Some(v) if v.fract() == 0.0 => Ok(Some(v as i64)),
                Some(v) => Err(Error::Data(format!("line {line}, column '{name}': '{v}' is not an integer"))),
                None => Ok(None),
            }
        };
        let non_negative = |v: Option<i64>, name: &str| -> Result<Option<u32>> {
            v.map(|x| u32::try_from(x).map_err(|_| Error::Data(format!("line {line}, column '{name}': negative count"))))
                .transpose()
        };
        let house_id = rec.get(id).unwrap_or("").to_string();
        if house_id.is_empty() {
            return Err(Error::Data(format!("line {line}: empty house_id")));
        }
        let remote = non_negative(int(Some(sensors), "num_remote_sensors")?, "num_remote_sensors")?
            .ok_or_else(|| Error::Data(format!("line {line}: num_remote_sensors is empty")))?;
        let mut m = HouseMetadata::new(house_id, remote);
        m.floor_area = cells.number(area, "floor_area")?;
        m.num_occupants = non_negative(int(occupants, "num_occupants")?, "num_occupants")?;
        m.num_floors = non_negative(int(floors, "num_floors")?, "num_floors")?;
        m.state_code = state.and_then(|i| rec.get(i)).filter(|s| !missing(s)).map(str::to_string);
        m.eco_plus_enrolled = cells.flag(eco, "eco_plus_enrolled")?;
        m.eco_plus_slider = int(slider, "eco_plus_slider")?.map(|v| v as i32);
        out.push(m);
    }
    Ok(out)
}

pub fn read_metadata_file(path: &Path) -> Result<Vec<HouseMetadata>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_metadata(&bytes, b',').map_err(|e| match e {
        Error::Data(m) => Error::Data(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn write_metadata<W: Write>(out: W, records: &[HouseMetadata]) -> Result<()> {
    let mut w = WriterBuilder::new().from_writer(BufWriter::new(out));
    w.write_record(METADATA_HEADERS)?;
    for m in records {
        let opt = |v: Option<String>| v.unwrap_or_default();
        w.write_record([
            m.house_id.clone(),
            opt(m.floor_area.map(|v| v.to_string())),
            opt(m.num_occupants.map(|v| v.to_string())),
            opt(m.num_floors.map(|v| v.to_string())),
            m.num_remote_sensors.to_string(),
            opt(m.state_code.clone()),
            opt(m.eco_plus_enrolled.map(|v| v.to_string())),
            opt(m.eco_plus_slider.map(|v| v.to_string())),
        ])?;
    }
    w.flush().map_err(|e| Error::Data(e.to_string()))?;
    Ok(())
}

pub fn write_metadata_file(path: &Path, records: &[HouseMetadata]) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_metadata(f, records)
}
