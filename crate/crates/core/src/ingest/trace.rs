use alloc::string::String;
use alloc::vec::Vec;
use alloc::format;

use chrono::{Duration, NaiveDateTime};
use serde::{Deserialize, Serialize};

use super::season::SeasonWindow;
use crate::error::{Error, Result};

/// One sampling interval of a thermostat trace. Temperatures are °F and
/// runtimes are seconds within the interval, one entry per equipment stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub timestamp: NaiveDateTime,
    pub control_temp: Option<f64>,
    pub cool_setpoint: Option<f64>,
    pub heat_setpoint: Option<f64>,
    pub outdoor_temp: Option<f64>,
    pub heat_runtimes: Vec<Option<f64>>,
    pub cool_runtimes: Vec<Option<f64>>,
    pub thermostat_temp: Option<f64>,
    /// Remote sensor readings, in sensor order (sensor index `k + 1`).
    pub sensor_temps: Vec<Option<f64>>,
    pub motion_flags: Vec<Option<bool>>,
}

fn stage_sum(stages: &[Option<f64>]) -> Option<f64> {
    if stages.is_empty() {
        return Some(0.0);
    }
    if stages.iter().all(Option::is_none) {
        return None;
    }
    Some(stages.iter().flatten().sum())
}

impl TraceRecord {
    /// Empty record at `timestamp` with every field absent.
    pub fn empty(timestamp: NaiveDateTime) -> Self {
        TraceRecord {
            timestamp,
            control_temp: None,
            cool_setpoint: None,
            heat_setpoint: None,
            outdoor_temp: None,
            heat_runtimes: Vec::new(),
            cool_runtimes: Vec::new(),
            thermostat_temp: None,
            sensor_temps: Vec::new(),
            motion_flags: Vec::new(),
        }
    }

    /// Combined heating runtime over all stages. `None` when every stage
    /// reading is absent; a house with no heating stages reports zero.
    pub fn heat_seconds(&self) -> Option<f64> {
        stage_sum(&self.heat_runtimes)
    }

    pub fn cool_seconds(&self) -> Option<f64> {
        stage_sum(&self.cool_runtimes)
    }

    /// Sensor 0 is the thermostat probe, sensor `k >= 1` is remote sensor `k`.
    pub fn sensor_temp(&self, sensor: usize) -> Option<f64> {
        if sensor == 0 {
            self.thermostat_temp
        } else {
            self.sensor_temps.get(sensor - 1).copied().flatten()
        }
    }

    pub fn remote_sensors_present(&self) -> usize {
        self.sensor_temps.iter().filter(|t| t.is_some()).count()
    }
}

/// A data gap: consecutive records further apart than the base interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    /// Index of the record after the gap.
    pub index: usize,
    pub seconds: i64,
}

/// Time-ordered trace of one house at a constant base interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseTrace {
    pub house_id: String,
    pub records: Vec<TraceRecord>,
    pub interval_seconds: u32,
}

impl HouseTrace {
    /// Builds a trace after checking ordering, runtimes and temperatures.
    pub fn new(house_id: impl Into<String>, records: Vec<TraceRecord>, interval_seconds: u32) -> Result<Self> {
        let trace = HouseTrace {
            house_id: house_id.into(),
            records,
            interval_seconds,
        };
        trace.validate()?;
        Ok(trace)
    }

    pub fn validate(&self) -> Result<()> {
        if self.interval_seconds == 0 {
            return Err(Error::InvalidInput("interval must be positive".into()));
        }
        let limit = self.interval_seconds as f64;
        for (i, w) in self.records.windows(2).enumerate() {
            if w[1].timestamp <= w[0].timestamp {
                return Err(Error::InvalidInput(format!(
                    "timestamps not strictly increasing at record {}",
                    i + 1
                )));
            }
        }
        for (i, r) in self.records.iter().enumerate() {
            for rt in r.heat_runtimes.iter().chain(&r.cool_runtimes).flatten() {
                if !(0.0..=limit).contains(rt) {
                    return Err(Error::InvalidInput(format!(
                        "record {i}: runtime {rt} outside [0, {limit}]"
                    )));
                }
            }
            let temps = [r.control_temp, r.cool_setpoint, r.heat_setpoint, r.outdoor_temp, r.thermostat_temp];
            if temps.iter().chain(&r.sensor_temps).flatten().any(|t| !t.is_finite()) {
                return Err(Error::InvalidInput(format!("record {i}: non-finite temperature")));
            }
        }
        Ok(())
    }

    pub fn interval(&self) -> Duration {
        Duration::seconds(self.interval_seconds as i64)
    }

    /// Number of temperature sources including the thermostat probe.
    pub fn num_sensors(&self) -> usize {
        1 + self.records.iter().map(|r| r.sensor_temps.len()).max().unwrap_or(0)
    }

    pub fn gaps(&self) -> Vec<Gap> {
        let step = self.interval_seconds as i64;
        self.records
            .windows(2)
            .enumerate()
            .filter_map(|(i, w)| {
                let dt = (w[1].timestamp - w[0].timestamp).num_seconds();
                (dt > step).then_some(Gap { index: i + 1, seconds: dt })
            })
            .collect()
    }

    /// Copy holding only the records that fall inside any of `windows`.
    pub fn restrict(&self, windows: &[SeasonWindow]) -> HouseTrace {
        HouseTrace {
            house_id: self.house_id.clone(),
            records: self
                .records
                .iter()
                .filter(|r| windows.iter().any(|w| w.contains(r.timestamp)))
                .cloned()
                .collect(),
            interval_seconds: self.interval_seconds,
        }
    }

    pub fn span(&self) -> Option<(NaiveDateTime, NaiveDateTime)> {
        Some((self.records.first()?.timestamp, self.records.last()?.timestamp))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn ts(h: u32, m: u32) -> NaiveDateTime {
        NaiveDate::from_ymd_opt(2017, 1, 1).unwrap().and_hms_opt(h, m, 0).unwrap()
    }

    #[test]
    fn stage_sums() {
        let mut r = TraceRecord::empty(ts(0, 0));
        assert_eq!(r.heat_seconds(), Some(0.0));
        r.heat_runtimes = alloc::vec![Some(120.0), None];
        assert_eq!(r.heat_seconds(), Some(120.0));
        r.heat_runtimes = alloc::vec![None, None];
        assert_eq!(r.heat_seconds(), None);
    }

    #[test]
    fn sensor_indexing() {
        let mut r = TraceRecord::empty(ts(0, 0));
        r.thermostat_temp = Some(70.0);
        r.sensor_temps = alloc::vec![Some(68.0), None];
        assert_eq!(r.sensor_temp(0), Some(70.0));
        assert_eq!(r.sensor_temp(1), Some(68.0));
        assert_eq!(r.sensor_temp(2), None);
        assert_eq!(r.sensor_temp(9), None);
        assert_eq!(r.remote_sensors_present(), 1);
    }

    #[test]
    fn rejects_unordered_and_bad_runtime() {
        let a = TraceRecord::empty(ts(0, 5));
        let b = TraceRecord::empty(ts(0, 0));
        assert!(HouseTrace::new("h", alloc::vec![a.clone(), b], 300).is_err());
        let mut c = TraceRecord::empty(ts(0, 10));
        c.cool_runtimes = alloc::vec![Some(301.0)];
        assert!(HouseTrace::new("h", alloc::vec![a, c], 300).is_err());
    }

    #[test]
    fn gaps_are_reported() {
        let recs = alloc::vec![
            TraceRecord::empty(ts(0, 0)),
            TraceRecord::empty(ts(0, 5)),
            TraceRecord::empty(ts(0, 30)),
        ];
        let t = HouseTrace::new("h", recs, 300).unwrap();
        assert_eq!(t.gaps(), alloc::vec![Gap { index: 2, seconds: 1500 }]);
    }
}
