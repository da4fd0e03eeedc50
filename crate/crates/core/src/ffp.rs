//! Free-floating period extraction.
//!
//! A free-floating period (FFP) is a maximal run of records with no heating
//! or cooling runtime, inside the mode's daily window, with the outdoor
//! temperature on the correct side of the sensor temperature. Runs shorter
//! than the minimum duration, or (for the heating-night and cooling-day
//! modes) whose net temperature change is too small, are discarded.

use alloc::string::String;
use alloc::vec::Vec;

use chrono::{Duration, NaiveDate, NaiveDateTime, NaiveTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::ingest::{HouseTrace, TraceRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FfpMode {
    /// 22:00 to 07:00, outdoor colder than indoor, temperature falling.
    HeatingNight,
    /// 10:00 to 17:00, outdoor warmer than indoor, temperature rising.
    CoolingDay,
    /// 12:00 to 17:00, outdoor warmer than indoor, no amplitude requirement.
    DrAfternoon,
}

impl FfpMode {
    pub const ALL: [FfpMode; 3] = [FfpMode::HeatingNight, FfpMode::CoolingDay, FfpMode::DrAfternoon];

    /// Daily window as (start hour, end hour); end is exclusive and may wrap
    /// past midnight.
    pub fn window_hours(self) -> (u32, u32) {
        match self {
            FfpMode::HeatingNight => (22, 7),
            FfpMode::CoolingDay => (10, 17),
            FfpMode::DrAfternoon => (12, 17),
        }
    }

    /// Date that owns the window containing `t`, or `None` outside the window.
    /// Night windows belong to the evening's date.
    pub fn window_date(self, t: NaiveDateTime) -> Option<NaiveDate> {
        let (start, end) = self.window_hours();
        let h = t.hour();
        if start < end {
            (start..end).contains(&h).then(|| t.date())
        } else if h >= start {
            Some(t.date())
        } else if h < end {
            t.date().pred_opt()
        } else {
            None
        }
    }

    /// True when outdoor must be colder than indoor throughout.
    pub fn outdoor_below(self) -> bool {
        matches!(self, FfpMode::HeatingNight)
    }

    /// Required net change in the relaxation direction, if any.
    pub fn needs_amplitude(self) -> bool {
        !matches!(self, FfpMode::DrAfternoon)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FfpMode::HeatingNight => "heating-night",
            FfpMode::CoolingDay => "cooling-day",
            FfpMode::DrAfternoon => "dr-afternoon",
        }
    }

    pub fn window_start(self, date: NaiveDate) -> NaiveDateTime {
        date.and_time(NaiveTime::from_hms_opt(self.window_hours().0, 0, 0).unwrap())
    }
}

/// Thresholds applied by [`extract_ffps`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FfpConstraints {
    pub min_duration_minutes: i64,
    /// Net change (°F) required for the heating-night and cooling-day modes.
    pub min_change: f64,
    /// Largest tolerated spacing between samples, in base intervals.
    pub max_gap_intervals: i64,
}

impl Default for FfpConstraints {
    fn default() -> Self {
        FfpConstraints { min_duration_minutes: 60, min_change: 2.0, max_gap_intervals: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FfpSegment {
    pub house_id: String,
    /// 0 is the thermostat probe.
    pub sensor: usize,
    pub mode: FfpMode,
    pub start: NaiveDateTime,
    pub end: NaiveDateTime,
    /// (hours since `start`, sensor °F).
    pub samples: Vec<(f64, f64)>,
    pub outdoor: Vec<f64>,
    pub mean_outdoor: f64,
    pub initial_temp: f64,
}

impl FfpSegment {
    pub fn duration(&self) -> Duration {
        self.end - self.start
    }

    pub fn hours(&self) -> f64 {
        self.duration().num_seconds() as f64 / 3600.0
    }

    /// Assembles a segment from (timestamp, sensor °F, outdoor °F) samples.
    pub fn from_samples(
        house_id: &str,
        sensor: usize,
        mode: FfpMode,
        points: &[(NaiveDateTime, f64, f64)],
    ) -> Option<FfpSegment> {
        let (start, initial_temp, _) = *points.first()?;
        let end = points.last()?.0;
        let outdoor: Vec<f64> = points.iter().map(|p| p.2).collect();
        Some(FfpSegment {
            house_id: house_id.into(),
            sensor,
            mode,
            start,
            end,
            samples: points
                .iter()
                .map(|(t, v, _)| ((*t - start).num_seconds() as f64 / 3600.0, *v))
                .collect(),
            mean_outdoor: outdoor.iter().sum::<f64>() / outdoor.len() as f64,
            outdoor,
            initial_temp,
        })
    }
}

/// Per-record admissibility: returns (window date, sensor °F, outdoor °F).
fn admissible(r: &TraceRecord, sensor: usize, mode: FfpMode) -> Option<(NaiveDate, f64, f64)> {
    let date = mode.window_date(r.timestamp)?;
    if r.heat_seconds()? != 0.0 || r.cool_seconds()? != 0.0 {
        return None;
    }
    let t_in = r.sensor_temp(sensor)?;
    let t_out = r.outdoor_temp?;
    let ordered = if mode.outdoor_below() { t_out < t_in } else { t_out > t_in };
    ordered.then_some((date, t_in, t_out))
}

fn accept(points: &[(NaiveDateTime, f64, f64)], mode: FfpMode, c: &FfpConstraints) -> bool {
    let (Some(first), Some(last)) = (points.first(), points.last()) else {
        return false;
    };
    if (last.0 - first.0).num_minutes() < c.min_duration_minutes {
        return false;
    }
    if mode.needs_amplitude() {
        let change = if mode.outdoor_below() { first.1 - last.1 } else { last.1 - first.1 };
        if change < c.min_change {
            return false;
        }
    }
    true
}

/// Extracts the free-floating periods of one sensor. Segments never overlap
/// and are returned in time order.
pub fn extract_ffps(trace: &HouseTrace, sensor: usize, mode: FfpMode) -> Vec<FfpSegment> {
    extract_ffps_with(trace, sensor, mode, &FfpConstraints::default())
}

pub fn extract_ffps_with(
    trace: &HouseTrace,
    sensor: usize,
    mode: FfpMode,
    constraints: &FfpConstraints,
) -> Vec<FfpSegment> {
    let max_gap = trace.interval() * constraints.max_gap_intervals as i32;
    let mut out = Vec::new();
    let mut run: Vec<(NaiveDateTime, f64, f64)> = Vec::new();
    let mut run_date: Option<NaiveDate> = None;

    let mut flush = |run: &mut Vec<(NaiveDateTime, f64, f64)>| {
        if accept(run, mode, constraints) {
            if let Some(seg) = FfpSegment::from_samples(&trace.house_id, sensor, mode, run) {
                out.push(seg);
            }
        }
        run.clear();
    };

    for r in &trace.records {
        match admissible(r, sensor, mode) {
            Some((date, t_in, t_out)) => {
                let continues = run
                    .last()
                    .is_some_and(|last| run_date == Some(date) && r.timestamp - last.0 <= max_gap);
                if !continues {
                    flush(&mut run);
                    run_date = Some(date);
                }
                run.push((r.timestamp, t_in, t_out));
            }
            None => flush(&mut run),
        }
    }
    flush(&mut run);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use chrono::NaiveDate;

    fn at(d: u32, h: u32, m: u32) -> NaiveDateTime {
        NaiveDate::from_ymd_opt(2017, 1, d).unwrap().and_hms_opt(h, m, 0).unwrap()
    }

    /// 5-minute trace; `f` returns (indoor, outdoor, runtime) per timestamp.
    fn trace(start: NaiveDateTime, n: usize, f: impl Fn(usize) -> (f64, f64, f64)) -> HouseTrace {
        let recs = (0..n)
            .map(|i| {
                let (t_in, t_out, rt) = f(i);
                let mut r = TraceRecord::empty(start + Duration::minutes(5 * i as i64));
                r.thermostat_temp = Some(t_in);
                r.outdoor_temp = Some(t_out);
                r.heat_runtimes = vec![Some(rt)];
                r.cool_runtimes = vec![Some(0.0)];
                r
            })
            .collect();
        HouseTrace::new("h", recs, 300).unwrap()
    }

    fn falling(i: usize) -> (f64, f64, f64) {
        (68.0 - 3.0 * i as f64 / 36.0, 40.0, 0.0)
    }

    #[test]
    fn overnight_decay_is_one_segment() {
        let t = trace(at(1, 23, 0), 37, falling);
        let segs = extract_ffps(&t, 0, FfpMode::HeatingNight);
        assert_eq!(segs.len(), 1);
        let s = &segs[0];
        assert_eq!(s.start, at(1, 23, 0));
        assert_eq!(s.end, at(2, 2, 0));
        assert_eq!(s.samples.len(), 37);
        assert_eq!(s.mean_outdoor, 40.0);
        assert_eq!(s.initial_temp, 68.0);
    }

    #[test]
    fn afternoon_run_is_not_heating_night() {
        let t = trace(at(1, 14, 0), 37, falling);
        assert!(extract_ffps(&t, 0, FfpMode::HeatingNight).is_empty());
    }

    #[test]
    fn short_run_rejected() {
        let t = trace(at(1, 23, 0), 10, |i| (68.0 - 0.3 * i as f64, 40.0, 0.0));
        assert!(extract_ffps(&t, 0, FfpMode::HeatingNight).is_empty());
    }

    #[test]
    fn small_change_rejected_except_dr() {
        let t = trace(at(1, 12, 0), 37, |i| (74.0 + 0.01 * i as f64, 90.0, 0.0));
        assert!(extract_ffps(&t, 0, FfpMode::CoolingDay).is_empty());
        let dr = extract_ffps(&t, 0, FfpMode::DrAfternoon);
        assert_eq!(dr.len(), 1);
    }

    #[test]
    fn runtime_cuts_segment() {
        let t = trace(at(1, 22, 0), 100, |i| {
            let (a, b, _) = falling(i % 50);
            (a, b, if i == 50 { 120.0 } else { 0.0 })
        });
        let segs = extract_ffps(&t, 0, FfpMode::HeatingNight);
        assert_eq!(segs.len(), 2);
        assert!(segs[0].end < segs[1].start);
    }

    #[test]
    fn window_boundary_cuts_at_seven() {
        // 05:00 to 09:00; only 05:00..06:55 is inside the window
        let t = trace(at(2, 5, 0), 48, |i| (70.0 - 0.1 * i as f64, 40.0, 0.0));
        let segs = extract_ffps(&t, 0, FfpMode::HeatingNight);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].end, at(2, 6, 55));
    }

    #[test]
    fn gaps_split_runs() {
        let mut t = trace(at(1, 22, 0), 100, falling);
        t.records.drain(40..45);
        let segs = extract_ffps(&t, 0, FfpMode::HeatingNight);
        for s in &segs {
            for w in s.samples.windows(2) {
                assert!(w[1].0 - w[0].0 <= 10.0 / 60.0 + 1e-9);
            }
        }
        assert!(segs.len() == 2);
    }

    #[test]
    fn night_windows_attach_to_evening() {
        assert_eq!(FfpMode::HeatingNight.window_date(at(2, 3, 0)), NaiveDate::from_ymd_opt(2017, 1, 1));
        assert_eq!(FfpMode::HeatingNight.window_date(at(2, 22, 0)), NaiveDate::from_ymd_opt(2017, 1, 2));
        assert_eq!(FfpMode::HeatingNight.window_date(at(2, 7, 0)), None);
        assert_eq!(FfpMode::CoolingDay.window_date(at(2, 17, 0)), None);
    }
}
