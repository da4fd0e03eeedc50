use alloc::vec;
use alloc::vec::Vec;

use chrono::{Duration, NaiveDateTime, Timelike};
use serde::{Deserialize, Serialize};

use super::trace::{HouseTrace, TraceRecord};

/// Arithmetic mean of the readings present in one hour.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Averaged {
    pub mean: Option<f64>,
    pub count: u32,
}

#[derive(Default, Clone, Copy)]
struct Acc {
    sum: f64,
    count: u32,
}

impl Acc {
    fn push(&mut self, v: Option<f64>) {
        if let Some(v) = v {
            self.sum += v;
            self.count += 1;
        }
    }

    fn finish(self) -> Averaged {
        Averaged {
            mean: (self.count > 0).then(|| self.sum / self.count as f64),
            count: self.count,
        }
    }
}

/// One clock hour of a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HourlyRecord {
    pub hour: NaiveDateTime,
    /// Records observed in the hour; zero marks an absent hour.
    pub rows: u32,
    /// Records expected in a complete hour.
    pub slots: u32,
    /// Combined heating seconds over stages and sub-intervals, clamped to [0, 3600].
    pub heat_runtime: f64,
    pub cool_runtime: f64,
    pub control_temp: Averaged,
    pub thermostat_temp: Averaged,
    pub outdoor_temp: Averaged,
    pub heat_setpoint: Averaged,
    pub cool_setpoint: Averaged,
    pub sensor_temps: Vec<Averaged>,
}

impl HourlyRecord {
    pub fn is_absent(&self) -> bool {
        self.rows == 0
    }

    /// Remote sensors with at least one reading in the hour.
    pub fn remote_sensors_present(&self) -> usize {
        self.sensor_temps.iter().filter(|a| a.count > 0).count()
    }

    /// Fraction of expected slots carrying a reading of `field`.
    pub fn coverage(&self, field: &Averaged) -> f64 {
        field.count as f64 / self.slots.max(1) as f64
    }
}

fn truncate_hour(t: NaiveDateTime) -> NaiveDateTime {
    t.date().and_hms_opt(t.hour(), 0, 0).expect("valid hour")
}

struct HourAcc {
    rows: u32,
    heat: f64,
    cool: f64,
    control: Acc,
    thermostat: Acc,
    outdoor: Acc,
    heat_sp: Acc,
    cool_sp: Acc,
    sensors: Vec<Acc>,
}

impl HourAcc {
    fn new(n_remote: usize) -> Self {
        HourAcc {
            rows: 0,
            heat: 0.0,
            cool: 0.0,
            control: Acc::default(),
            thermostat: Acc::default(),
            outdoor: Acc::default(),
            heat_sp: Acc::default(),
            cool_sp: Acc::default(),
            sensors: vec![Acc::default(); n_remote],
        }
    }

    fn push(&mut self, r: &TraceRecord) {
        self.rows += 1;
        self.heat += r.heat_seconds().unwrap_or(0.0);
        self.cool += r.cool_seconds().unwrap_or(0.0);
        self.control.push(r.control_temp);
        self.thermostat.push(r.thermostat_temp);
        self.outdoor.push(r.outdoor_temp);
        self.heat_sp.push(r.heat_setpoint);
        self.cool_sp.push(r.cool_setpoint);
        for (acc, v) in self.sensors.iter_mut().zip(&r.sensor_temps) {
            acc.push(*v);
        }
    }

    fn finish(self, hour: NaiveDateTime, slots: u32) -> HourlyRecord {
        HourlyRecord {
            hour,
            rows: self.rows,
            slots,
            heat_runtime: self.heat.clamp(0.0, 3600.0),
            cool_runtime: self.cool.clamp(0.0, 3600.0),
            control_temp: self.control.finish(),
            thermostat_temp: self.thermostat.finish(),
            outdoor_temp: self.outdoor.finish(),
            heat_setpoint: self.heat_sp.finish(),
            cool_setpoint: self.cool_sp.finish(),
            sensor_temps: self.sensors.into_iter().map(Acc::finish).collect(),
        }
    }
}

/// Aggregates a trace to clock hours. Every hour between the first and last
/// record is emitted; hours without records come back with `rows == 0`.
/// Runtimes of absent stage readings contribute nothing.
pub fn resample_hourly(trace: &HouseTrace) -> Vec<HourlyRecord> {
    let Some((first, last)) = trace.span() else {
        return Vec::new();
    };
    let n_remote = trace.num_sensors() - 1;
    let slots = (3600 / trace.interval_seconds.max(1)).max(1);
    let mut out = Vec::new();
    let mut hour = truncate_hour(first);
    let end = truncate_hour(last);
    let mut it = trace.records.iter().peekable();
    while hour <= end {
        let next = hour + Duration::hours(1);
        let mut acc = HourAcc::new(n_remote);
        while let Some(r) = it.next_if(|r| r.timestamp < next) {
            acc.push(r);
        }
        out.push(acc.finish(hour, slots));
        hour = next;
    }
    out
}
