//! Column mapping from a delimited trace file to trace record fields.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TemperatureUnit {
    F,
    C,
}

impl TemperatureUnit {
    pub fn to_fahrenheit(self, v: f64) -> f64 {
        match self {
            TemperatureUnit::F => v,
            TemperatureUnit::C => v * 9.0 / 5.0 + 32.0,
        }
    }
}

/// Names of the columns carrying each field. The defaults follow the
/// Donate-Your-Data export. Remote sensor columns are found by substituting
/// `{n}` = 1, 2, ... into the patterns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ColumnMapping {
    pub delimiter: char,
    pub unit: TemperatureUnit,
    /// chrono format; `None` accepts `%Y-%m-%d %H:%M:%S`, the `T`-separated
    /// form, and either without seconds.
    pub timestamp_format: Option<String>,
    /// Column holding the house id; `None` takes the id from the file stem.
    pub house_id: Option<String>,
    pub timestamp: String,
    pub control_temp: String,
    pub cool_setpoint: String,
    pub heat_setpoint: String,
    pub outdoor_temp: String,
    pub thermostat_temp: String,
    pub heat_stages: Vec<String>,
    pub cool_stages: Vec<String>,
    pub sensor_temp_pattern: String,
    pub sensor_motion_pattern: String,
    pub max_remote_sensors: usize,
    /// Interval used when a file has a single record.
    pub default_interval_seconds: u32,
}

impl Default for ColumnMapping {
    fn default() -> Self {
        let names = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        ColumnMapping {
            delimiter: ',',
            unit: TemperatureUnit::F,
            timestamp_format: None,
            house_id: None,
            timestamp: "DateTime".into(),
            control_temp: "T_ctrl".into(),
            cool_setpoint: "T_stp_cool".into(),
            heat_setpoint: "T_stp_heat".into(),
            outdoor_temp: "T_out".into(),
            thermostat_temp: "Thermostat_Temperature".into(),
            heat_stages: names(&["auxHeat1", "auxHeat2", "auxHeat3", "compHeat1", "compHeat2"]),
            cool_stages: names(&["compCool1", "compCool2"]),
            sensor_temp_pattern: "RemoteSensor{n}_Temperature".into(),
            sensor_motion_pattern: "RemoteSensor{n}_Motion".into(),
            max_remote_sensors: 10,
            default_interval_seconds: 300,
        }
    }
}

impl ColumnMapping {
    pub fn load(path: &Path) -> Result<ColumnMapping> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let m: ColumnMapping =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delimiter.is_ascii() {
            return Err(Error::Config("mapping: delimiter must be a single ASCII character".into()));
        }
        for p in [&self.sensor_temp_pattern, &self.sensor_motion_pattern] {
            if !p.contains("{n}") {
                return Err(Error::Config(format!("mapping: pattern '{p}' lacks {{n}}")));
            }
        }
        Ok(())
    }

    pub fn sensor_temp(&self, n: usize) -> String {
        self.sensor_temp_pattern.replace("{n}", &n.to_string())
    }

    pub fn sensor_motion(&self, n: usize) -> String {
        self.sensor_motion_pattern.replace("{n}", &n.to_string())
    }
}
