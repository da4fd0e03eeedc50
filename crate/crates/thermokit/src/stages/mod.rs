//! Pipeline stages. Each stage reads traces (or an upstream artifact),
//! works per house on the worker pool, joins, and writes its outputs and a
//! manifest under `<out>/<stage>/`.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thermokit_core::ingest::HouseTrace;

use crate::config::{Resolved, RunConfig};
use crate::error::{Error, Result};
use crate::io::{read_trace_file, trace_files, ParsedTrace};
use crate::manifest::InputFile;
use crate::mapping::ColumnMapping;

pub mod all;
pub mod comfort;
pub mod deficiency;
pub mod ffp;
pub mod identify;
pub mod ingest;
pub mod panel;
pub mod synth;

pub struct Ctx {
    pub config: RunConfig,
    pub params: Resolved,
    pub mapping: ColumnMapping,
}

impl Ctx {
    pub fn new(config: RunConfig) -> Result<Ctx> {
        let params = config.resolve()?;
        let mapping = match &config.mapping {
            Some(p) => ColumnMapping::load(p)?,
            None => ColumnMapping::default(),
        };
        Ok(Ctx { config, params, mapping })
    }

    pub fn stage_dir(&self, stage: &str) -> PathBuf {
        self.params.out.join(stage)
    }
}

/// Sensor display name: the thermostat probe, then remote sensors by number.
pub fn room_name(sensor: usize) -> String {
    thermokit_core::synth::room_name(sensor)
}

/// Parses every trace file under `input` and maps each house through `f` on
/// the worker pool. Results come back sorted by house id; a house id that
/// appears in two files is a data error.
pub fn per_house<T, F>(input: &Path, mapping: &ColumnMapping, f: F) -> Result<(Vec<T>, Vec<InputFile>)>
where
    T: Send,
    F: Fn(&ParsedTrace) -> Result<T> + Sync,
{
    let files = trace_files(input)?;
    let per_file: Vec<(InputFile, Vec<(String, T)>)> = files
        .par_iter()
        .map(|path| {
            let parsed = read_trace_file(path, mapping)?;
            let input = InputFile {
                path: path.display().to_string(),
                houses: parsed.len(),
                records: parsed.iter().map(|p| p.trace.records.len()).sum(),
            };
            log::info!("{}: {} houses, {} records", input.path, input.houses, input.records);
            let results = parsed
                .iter()
                .map(|p| Ok((p.trace.house_id.clone(), f(p)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok((input, results))
        })
        .collect::<Result<_>>()?;
    let mut inputs = Vec::new();
    let mut results = Vec::new();
    for (i, r) in per_file {
        inputs.push(i);
        results.extend(r);
    }
    results.sort_by(|a, b| a.0.cmp(&b.0));
    let mut seen = BTreeSet::new();
    for (id, _) in &results {
        if !seen.insert(id.as_str()) {
            return Err(Error::Data(format!("house {id} appears in more than one input file")));
        }
    }
    Ok((results.into_iter().map(|(_, t)| t).collect(), inputs))
}

/// Temperature series of every sensor, aligned to the trace records.
pub fn sensor_series(trace: &HouseTrace) -> Vec<thermokit_core::comfort::RoomSeries> {
    (0..trace.num_sensors())
        .map(|s| thermokit_core::comfort::RoomSeries {
            room: room_name(s),
            temps: trace.records.iter().map(|r| r.sensor_temp(s)).collect(),
        })
        .collect()
}
