//! Seeded synthetic data with known parameters: free-floating segments,
//! balance-point nights, regression panels and whole-house traces.
//!
//! Every generator draws from a ChaCha8 stream seeded by [`SynthConfig::seed`];
//! per-house work uses its own stream index so output does not depend on
//! generation order.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffp::{FfpMode, FfpSegment};
use crate::ingest::{HouseMetadata, HouseTrace, TraceRecord};
use crate::panel::{Panel, PanelRow, SeasonMap, SENSOR_LEVELS};
use crate::thermal::NightAggregate;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomTruth {
    pub room: String,
    pub rc_hours: f64,
    pub rq: f64,
    pub rk: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentShape {
    pub date: NaiveDate,
    /// Length in hours; `None` uses the whole daily window.
    pub hours: Option<f64>,
    pub heating_indoor: f64,
    pub heating_outdoor: f64,
    pub cooling_indoor: f64,
    pub cooling_outdoor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NightShape {
    pub count: usize,
    pub indoor: f64,
    /// Indoor-outdoor difference range (°F).
    pub diff_low: f64,
    pub diff_high: f64,
    pub start: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelShape {
    pub houses: usize,
    pub hours: usize,
    pub start: NaiveDateTime,
    /// Share of houses that change sensor count once mid-panel.
    pub switch_share: f64,
    pub temp_mean: f64,
    pub seasonal_amplitude: f64,
    pub diurnal_amplitude: f64,
    pub temp_noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseShape {
    pub count: usize,
    pub start: NaiveDate,
    pub days: usize,
    /// Remote sensor counts cycle through this range by house index.
    pub min_remote_sensors: usize,
    pub max_remote_sensors: usize,
    /// Share of houses with a sensor outage.
    pub outage_share: f64,
    /// Outage length range in days.
    pub outage_days: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    /// Temperature noise (°F).
    pub noise_std: f64,
    /// Duty-cycle noise for balance nights and panels.
    pub duty_noise_std: f64,
    pub interval_seconds: u32,
    pub rooms: Vec<RoomTruth>,
    pub segment: SegmentShape,
    pub nights: NightShape,
    pub panel: PanelShape,
    pub houses: HouseShape,
}

fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            noise_std: 0.0,
            duty_noise_std: 0.0,
            interval_seconds: 300,
            rooms: vec![RoomTruth { room: "Thermostat".into(), rc_hours: 10.0, rq: 2.0, rk: 100.0 }],
            segment: SegmentShape {
                date: date(2017, 1, 10),
                hours: None,
                heating_indoor: 70.0,
                heating_outdoor: 30.0,
                cooling_indoor: 70.0,
                cooling_outdoor: 98.0,
            },
            nights: NightShape { count: 50, indoor: 70.0, diff_low: 20.0, diff_high: 60.0, start: date(2017, 1, 1) },
            panel: PanelShape {
                houses: 50,
                hours: 8760,
                start: date(2017, 1, 1).and_hms_opt(0, 0, 0).unwrap(),
                switch_share: 0.5,
                temp_mean: 40.0,
                seasonal_amplitude: 8.0,
                diurnal_amplitude: 3.0,
                temp_noise: 2.0,
            },
            houses: HouseShape {
                count: 10,
                start: date(2017, 1, 1),
                days: 365,
                min_remote_sensors: 0,
                max_remote_sensors: 5,
                outage_share: 0.3,
                outage_days: (60, 120),
            },
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidInput(m.into()));
        if !(self.noise_std >= 0.0) || !(self.duty_noise_std >= 0.0) {
            return bad("noise std must be non-negative");
        }
        if self.interval_seconds == 0 {
            return bad("sampling interval must be positive");
        }
        if self.rooms.iter().any(|r| !(r.rc_hours > 0.0) || !(r.rk > 0.0)) {
            return bad("room RC and RK must be positive");
        }
        if self.houses.min_remote_sensors > self.houses.max_remote_sensors {
            return bad("remote sensor range is empty");
        }
        if self.houses.outage_days.0 > self.houses.outage_days.1 {
            return bad("outage length range is empty");
        }
        Ok(())
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

fn normal(std: f64) -> Normal<f64> {
    Normal::new(0.0, std).unwrap_or_else(|_| Normal::new(0.0, 0.0).unwrap())
}

/// Free-floating segment following the closed-form relaxation from the shape's
/// starting temperatures. Heating segments use no gain term.
pub fn gen_ffp_segment(cfg: &SynthConfig, room: &RoomTruth, mode: FfpMode) -> Result<FfpSegment> {
    cfg.validate()?;
    let (start_h, end_h) = mode.window_hours();
    let window = ((end_h + 24 - start_h) % 24) as f64;
    let hours = cfg.segment.hours.unwrap_or(window).min(window);
    let step = cfg.interval_seconds as i64;
    let last = ((hours * 3600.0) as i64 - 1) / step;
    if hours < 1.0 || last + 1 < 4 {
        return Err(Error::InvalidInput("segment shorter than 1 h or 4 samples".into()));
    }
    let (t0, to, rq) = match mode {
        FfpMode::HeatingNight => (cfg.segment.heating_indoor, cfg.segment.heating_outdoor, 0.0),
        _ => (cfg.segment.cooling_indoor, cfg.segment.cooling_outdoor, room.rq),
    };
    let mut rng = cfg.rng(0);
    let noise = normal(cfg.noise_std);
    let start = mode.window_start(cfg.segment.date);
    let points: Vec<(NaiveDateTime, f64, f64)> = (0..=last)
        .map(|k| {
            let t = (k * step) as f64 / 3600.0;
            let v = to + rq + (t0 - to - rq) * libm::exp(-t / room.rc_hours);
            (start + Duration::seconds(k * step), v + noise.sample(&mut rng), to)
        })
        .collect();
    Ok(FfpSegment::from_samples("synth", 0, mode, &points).expect("non-empty"))
}

/// Nightly duty cycles `F = (T_i - T_o) / RK + noise`, clamped to [0, 1],
/// with differences drawn uniformly from the configured range.
pub fn gen_balance_nights(cfg: &SynthConfig, rk: f64) -> Vec<NightAggregate> {
    let mut rng = cfg.rng(0);
    let noise = normal(cfg.duty_noise_std);
    let n = &cfg.nights;
    (0..n.count)
        .map(|i| {
            let x = if n.diff_high > n.diff_low { rng.random_range(n.diff_low..n.diff_high) } else { n.diff_low };
            NightAggregate {
                date: n.start + Duration::days(i as i64),
                duty_cycle: (x / rk + noise.sample(&mut rng)).clamp(0.0, 1.0),
                mean_indoor: n.indoor,
                mean_outdoor: n.indoor - x,
            }
        })
        .collect()
}

/// Standard deviations of the drawn fixed effects and of the outcome noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeMagnitudes {
    pub house: f64,
    pub hour: f64,
    pub month: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthPanel {
    pub panel: Panel,
    pub clamp_rate: f64,
    pub warning: Option<String>,
    pub house_effects: Vec<f64>,
    pub hour_effects: Vec<f64>,
    pub month_effects: Vec<f64>,
    /// Constant keeping duty cycles mid-range.
    pub baseline: f64,
}

pub const CLAMP_WARNING_RATE: f64 = 0.2;

/// Panel drawn from the sensor-count × outdoor-temperature model. `beta` has 6
/// entries (base) or 24 (seasonal, index `j * 4 + season`).
pub fn gen_panel(cfg: &SynthConfig, beta: &[f64], fe: &FeMagnitudes) -> Result<SynthPanel> {
    cfg.validate()?;
    let seasonal = match beta.len() {
        n if n == SENSOR_LEVELS => false,
        n if n == SENSOR_LEVELS * 4 => true,
        n => return Err(Error::InvalidInput(format!("beta must have 6 or 24 entries, got {n}"))),
    };
    let shape = &cfg.panel;
    let seasons = SeasonMap::default();
    let mut rng = cfg.rng(0);
    let draw = |rng: &mut ChaCha8Rng, n: usize, sd: f64| -> Vec<f64> {
        let d = normal(sd);
        (0..n).map(|_| d.sample(rng)).collect()
    };
    let hour_effects = draw(&mut rng, 24, fe.hour);
    let month_effects = draw(&mut rng, 12, fe.month);
    let house_effects = draw(&mut rng, shape.houses, fe.house);
    let beta_mean = beta.iter().sum::<f64>() / beta.len() as f64;
    let baseline = 0.5 - beta_mean * shape.temp_mean;

    let mut panel = Panel::default();
    let mut clamped = 0usize;
    for h in 0..shape.houses {
        let mut rng = cfg.rng(h as u64 + 1);
        let noise = normal(cfg.duty_noise_std);
        let temp_noise = normal(shape.temp_noise);
        let first = rng.random_range(0..SENSOR_LEVELS);
        let switch = (rng.random::<f64>() < shape.switch_share).then(|| {
            let at = rng.random_range(shape.hours / 4..=(3 * shape.hours / 4).max(shape.hours / 4));
            let to = (first + rng.random_range(1..SENSOR_LEVELS)) % SENSOR_LEVELS;
            (at, to)
        });
        panel.houses.push(format!("synth{h:04}"));
        for t in 0..shape.hours {
            let ts = shape.start + Duration::hours(t as i64);
            let sensors = match switch {
                Some((at, to)) if t >= at => to,
                _ => first,
            };
            let doy = ts.ordinal0() as f64;
            let temp = shape.temp_mean
                - shape.seasonal_amplitude * libm::cos(core::f64::consts::TAU * (doy - 15.0) / 365.0)
                - shape.diurnal_amplitude * libm::cos(core::f64::consts::TAU * (ts.hour() as f64 - 3.0) / 24.0)
                + temp_noise.sample(&mut rng);
            let mut row = PanelRow::new(h as u32, ts, 0.0, 0.0, temp, sensors, &seasons);
            let col = if seasonal { sensors * 4 + row.season.index() } else { sensors };
            let dc = baseline
                + beta[col] * temp
                + house_effects[h]
                + hour_effects[row.hour as usize]
                + month_effects[row.month as usize - 1]
                + noise.sample(&mut rng);
            let dc_c = dc.clamp(0.0, 1.0);
            if dc_c != dc {
                clamped += 1;
            }
            row.dc_combined = dc_c;
            row.dc_cool = dc_c;
            panel.rows.push(row);
        }
    }
    let clamp_rate = if panel.rows.is_empty() { 0.0 } else { clamped as f64 / panel.rows.len() as f64 };
    let warning = (clamp_rate > CLAMP_WARNING_RATE).then(|| {
        format!("{:.1}% of duty cycles clamped to [0, 1]; slope recovery is biased", 100.0 * clamp_rate)
    });
    Ok(SynthPanel { panel, clamp_rate, warning, house_effects, hour_effects, month_effects, baseline })
}

/// Ground truth for one simulated house.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseTruth {
    pub house_id: String,
    /// Index 0 is the thermostat room.
    pub rooms: Vec<RoomTruth>,
    /// Remote sensors still reporting during the outage.
    pub outage_remote_sensors: usize,
    /// Half-open outage interval.
    pub outage: Option<(NaiveDateTime, NaiveDateTime)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthHouse {
    pub trace: HouseTrace,
    pub metadata: HouseMetadata,
    pub truth: HouseTruth,
}

const HEAT_SETPOINT: f64 = 70.0;
const HEAT_SETBACK: f64 = 45.0;
const COOL_SETPOINT: f64 = 75.0;
const COOL_SETUP: f64 = 95.0;
const HYSTERESIS: f64 = 0.5;
const STATES: [&str; 6] = ["TX", "CA", "NY", "IL", "ON", "FL"];

pub fn room_name(index: usize) -> String {
    if index == 0 {
        "Thermostat".into()
    } else {
        format!("RemoteSensor{index}")
    }
}

/// Simulates a house of first-order rooms sharing one HVAC system controlled
/// from the thermostat room.
///
/// Outdoor temperature is constant within 22:00-07:00 and within 07:00-22:00,
/// solar gain applies 08:00-20:00. Every other heating night the heating is
/// switched off and every other cooling day the setpoint is moved out of
/// reach, so the house floats freely.
pub fn gen_house(cfg: &SynthConfig, index: usize) -> Result<SynthHouse> {
    cfg.validate()?;
    let shape = &cfg.houses;
    let mut rng = cfg.rng(10_000 + index as u64);
    let house_id = format!("synth{index:04}");
    let remote = shape.min_remote_sensors + index % (shape.max_remote_sensors - shape.min_remote_sensors + 1);
    let rooms: Vec<RoomTruth> = (0..=remote)
        .map(|i| RoomTruth {
            room: room_name(i),
            rc_hours: rng.random_range(5.0..40.0),
            rq: rng.random_range(0.5..5.0),
            rk: if i == 0 { rng.random_range(80.0..200.0) } else { rng.random_range(40.0..204.0) },
        })
        .collect();
    let start = shape.start.and_hms_opt(0, 0, 0).unwrap();
    let (outage_remote, outage) = if rng.random::<f64>() < shape.outage_share && remote > 0 {
        let (lo, hi) = shape.outage_days;
        let len = rng.random_range(lo..=hi.max(lo));
        let from = start + Duration::days(rng.random_range(0..shape.days.max(1)) as i64);
        (rng.random_range(0..remote), Some((from, from + Duration::days(len as i64))))
    } else {
        (remote, None)
    };

    let step = cfg.interval_seconds as i64;
    let dt_h = step as f64 / 3600.0;
    let decay: Vec<f64> = rooms.iter().map(|r| libm::exp(-dt_h / r.rc_hours)).collect();
    let noise = normal(cfg.noise_std);
    let day_noise = normal(4.0);
    let parity = index % 2;

    // Daily mean outdoor temperature, indexed from the day before `start` so
    // that early-morning hours can use the previous evening's value.
    let day_means: Vec<f64> = (0..=shape.days)
        .map(|i| {
            let d = shape.start + Duration::days(i as i64 - 1);
            let doy = d.ordinal0() as f64;
            57.0 - 25.0 * libm::cos(core::f64::consts::TAU * (doy - 20.0) / 365.0) + day_noise.sample(&mut rng)
        })
        .collect();

    let mut temps = vec![HEAT_SETPOINT; rooms.len()];
    let (mut heating_on, mut cooling_on) = (false, false);
    let steps = shape.days as i64 * 86_400 / step;
    let mut records = Vec::with_capacity(steps as usize);
    for k in 0..steps {
        let ts = start + Duration::seconds(k * step);
        let hour = ts.hour();
        let night = !(7..22).contains(&hour);
        // Nights belong to the evening's date.
        let owner = if hour < 7 { ts.date() - Duration::days(1) } else { ts.date() };
        let day_mean = day_means[((owner - shape.start).num_days() + 1) as usize];
        let outdoor = if night { day_mean - 8.0 } else { day_mean + 8.0 };
        let sun = if (8..20).contains(&hour) { 1.0 } else { 0.0 };
        let free_day = (owner.num_days_from_ce() as usize + parity) % 2 == 0;
        let heating = day_mean < 55.0;
        let cooling = day_mean > 68.0;
        // Free-floating nights switch the heating off behind a setback.
        let heat_enabled = !(heating && free_day && night);
        let heat_sp = if !heating {
            50.0
        } else if !heat_enabled {
            HEAT_SETBACK
        } else {
            HEAT_SETPOINT
        };
        let cool_sp = if !cooling {
            90.0
        } else if free_day && (10..17).contains(&hour) {
            COOL_SETUP
        } else {
            COOL_SETPOINT
        };

        let ctrl = temps[0];
        heating_on = heat_enabled
            && if heating_on { ctrl < heat_sp + HYSTERESIS } else { ctrl < heat_sp - HYSTERESIS };
        cooling_on = if cooling_on { ctrl > cool_sp - HYSTERESIS } else { ctrl > cool_sp + HYSTERESIS };
        if heating_on && cooling_on {
            cooling_on = false;
        }

        let mut rec = TraceRecord::empty(ts);
        let active = match outage {
            Some((a, b)) if a <= ts && ts < b => outage_remote,
            _ => remote,
        };
        let read = |v: f64, rng: &mut ChaCha8Rng| v + noise.sample(rng);
        rec.control_temp = Some(read(temps[0], &mut rng));
        rec.thermostat_temp = rec.control_temp;
        rec.heat_setpoint = Some(heat_sp);
        rec.cool_setpoint = Some(cool_sp);
        rec.outdoor_temp = Some(outdoor);
        rec.heat_runtimes = vec![Some(if heating_on { step as f64 } else { 0.0 })];
        rec.cool_runtimes = vec![Some(if cooling_on { step as f64 } else { 0.0 })];
        rec.sensor_temps = (1..=remote).map(|i| (i <= active).then(|| read(temps[i], &mut rng))).collect();
        rec.motion_flags = (1..=remote).map(|i| (i <= active).then(|| rng.random::<f64>() < 0.2)).collect();
        records.push(rec);

        let drive = if heating_on { 1.0 } else if cooling_on { -1.0 } else { 0.0 };
        for (i, r) in rooms.iter().enumerate() {
            let eq = outdoor + r.rq * sun + r.rk * drive;
            temps[i] = eq + (temps[i] - eq) * decay[i];
        }
    }

    let mut metadata = HouseMetadata::new(house_id.clone(), remote as u32);
    metadata.floor_area = Some(libm::round(rng.random_range(800.0..4000.0)));
    metadata.num_occupants = Some(rng.random_range(1..=5));
    metadata.num_floors = Some(rng.random_range(1..=3));
    metadata.state_code = Some(STATES[rng.random_range(0..STATES.len())].into());
    let enrolled = rng.random::<f64>() < 0.4;
    metadata.eco_plus_enrolled = Some(enrolled);
    metadata.eco_plus_slider = enrolled.then(|| rng.random_range(1..=5));

    Ok(SynthHouse {
        trace: HouseTrace::new(house_id.clone(), records, cfg.interval_seconds)?,
        metadata,
        truth: HouseTruth { house_id, rooms, outage_remote_sensors: outage_remote, outage },
    })
}
