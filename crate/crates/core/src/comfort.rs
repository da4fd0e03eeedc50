//! Deviation histograms and the comfort indices built on them, per-room
//! deviation statistics, and demand-response comfort durations.
//!
//! A histogram assigns each deviation `d` to the bin `floor(d / w + 0.5)`,
//! so bins are centred on integer multiples of the bin width `w`. Relative
//! frequencies are counts divided by the full sample length, and the
//! analysis bound `M` limits which bins enter the denominator of an index.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{self, Summary};

pub const DEFAULT_BIN_WIDTH: f64 = 1.0;
pub const DEFAULT_COMFORT_HALF_WIDTH: f64 = 2.0;
pub const DEFAULT_CDRD_THRESHOLD: f64 = 2.0;

/// How the analysis bound `M` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BoundPolicy {
    /// `M` is the largest absolute deviation in the sample (denominator 1).
    DatasetMax,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfHistogram {
    pub bin_width: f64,
    /// Bin index to relative frequency.
    pub bins: BTreeMap<i64, f64>,
    /// Analysis bound `M` in °F.
    pub bound: f64,
    pub total_samples: usize,
}

fn bin_index(d: f64, width: f64) -> i64 {
    libm::floor(d / width + 0.5) as i64
}

/// Tolerant `a <= b` for comparing bin centres against thresholds.
fn le(a: f64, b: f64) -> bool {
    a <= b + 1e-9 * (1.0 + libm::fabs(b))
}

impl RfHistogram {
    /// Largest bin index magnitude inside the analysis bound.
    pub fn bound_index(&self) -> i64 {
        bin_index(self.bound, self.bin_width)
    }

    fn within_bound(&self, x: i64) -> bool {
        x.abs() <= self.bound_index()
    }

    fn mass(&self, pred: impl Fn(i64) -> bool) -> f64 {
        self.bins.iter().filter(|(x, _)| pred(**x)).map(|(_, r)| *r).sum()
    }

    /// Relative frequency inside the analysis bound.
    pub fn bounded_mass(&self) -> f64 {
        self.mass(|x| self.within_bound(x))
    }

    /// Relative frequency of bins strictly above zero deviation.
    pub fn mass_above_zero(&self) -> f64 {
        self.mass(|x| x > 0 && self.within_bound(x)) / self.bounded_mass()
    }
}

pub fn rf_histogram(samples: &[f64], bin_width: f64, policy: BoundPolicy) -> Result<RfHistogram> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("deviation samples"));
    }
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(Error::InvalidInput("bin width must be positive".into()));
    }
    if samples.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidInput("non-finite deviation".into()));
    }
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for &d in samples {
        *counts.entry(bin_index(d, bin_width)).or_default() += 1;
    }
    let n = samples.len() as f64;
    let bound = match policy {
        BoundPolicy::DatasetMax => samples.iter().fold(0.0_f64, |m, d| m.max(libm::fabs(*d))),
        BoundPolicy::Fixed(m) => {
            if !(m >= 0.0) {
                return Err(Error::InvalidInput("analysis bound must be non-negative".into()));
            }
            m
        }
    };
    Ok(RfHistogram {
        bin_width,
        bins: counts.into_iter().map(|(x, c)| (x, c as f64 / n)).collect(),
        bound,
        total_samples: samples.len(),
    })
}

/// Comfortable Operation Index: the share of bounded mass whose bin centre
/// lies within `±c` of the setpoint.
pub fn coi(hist: &RfHistogram, c: f64) -> f64 {
    let den = hist.bounded_mass();
    if den <= 0.0 {
        return 0.0;
    }
    let w = hist.bin_width;
    let num = hist.mass(|x| hist.within_bound(x) && le(x.unsigned_abs() as f64 * w, c));
    (num / den).clamp(0.0, 1.0)
}

/// Comfortable Cooling Index: the share of bounded mass at or below the
/// cooling setpoint. `hist` must hold deviations from the cooling setpoint.
pub fn cci(hist: &RfHistogram) -> f64 {
    let den = hist.bounded_mass();
    if den <= 0.0 {
        return 0.0;
    }
    (hist.mass(|x| x <= 0 && hist.within_bound(x)) / den).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComfortIndices {
    pub coi: f64,
    pub cci: Option<f64>,
    pub comfort_half_width: f64,
}

/// Setpoint used for COI when both heating and cooling setpoints apply.
pub fn auto_setpoint(heat: f64, cool: f64) -> f64 {
    0.5 * (heat + cool)
}

/// Temperature series of one room aligned to a shared time axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomSeries {
    pub room: String,
    pub temps: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeviationReference {
    Setpoint,
    /// Mean of the rooms present at each timestamp.
    ControlAverage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomDeviation {
    pub room: String,
    pub summary: Option<Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationStats {
    pub reference: DeviationReference,
    pub rooms: Vec<RoomDeviation>,
    pub coldest_room: String,
    pub hottest_room: String,
}

/// Per-room deviations from the setpoint or from the instantaneous room
/// average. `setpoint` must align with the room series; it is ignored for
/// the control-average reference.
pub fn room_deviations(
    rooms: &[RoomSeries],
    setpoint: &[Option<f64>],
    reference: DeviationReference,
) -> Vec<Vec<Option<f64>>> {
    let len = rooms.iter().map(|r| r.temps.len()).max().unwrap_or(0);
    let mut out: Vec<Vec<Option<f64>>> = rooms.iter().map(|_| alloc::vec![None; len]).collect();
    for t in 0..len {
        let base = match reference {
            DeviationReference::Setpoint => setpoint.get(t).copied().flatten(),
            DeviationReference::ControlAverage => {
                let present: Vec<f64> = rooms.iter().filter_map(|r| r.temps.get(t).copied().flatten()).collect();
                stats::mean(&present)
            }
        };
        let Some(base) = base else { continue };
        for (i, r) in rooms.iter().enumerate() {
            if let Some(v) = r.temps.get(t).copied().flatten() {
                out[i][t] = Some(v - base);
            }
        }
    }
    out
}

pub fn deviation_stats(
    rooms: &[RoomSeries],
    setpoint: &[Option<f64>],
    reference: DeviationReference,
) -> Result<DeviationStats> {
    if rooms.is_empty() {
        return Err(Error::EmptyInput("rooms"));
    }
    let devs = room_deviations(rooms, setpoint, reference);
    let per_room: Vec<RoomDeviation> = rooms
        .iter()
        .zip(&devs)
        .map(|(r, d)| {
            let xs: Vec<f64> = d.iter().flatten().copied().collect();
            RoomDeviation { room: r.room.clone(), summary: Summary::of(&xs) }
        })
        .collect();
    let with_data = || per_room.iter().filter_map(|r| r.summary.map(|s| (r, s.mean)));
    let coldest = with_data()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::EmptyInput("room deviations"))?
        .0
        .room
        .clone();
    let hottest = with_data().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap().0.room.clone();
    Ok(DeviationStats {
        reference,
        rooms: per_room,
        coldest_room: coldest,
        hottest_room: hottest,
    })
}

/// Comfortable demand-response duration of one room.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Cdrd {
    Reached { minutes: f64 },
    /// Threshold never reached within `observed_minutes`.
    Censored { observed_minutes: f64 },
}

impl Cdrd {
    pub fn minutes(&self) -> Option<f64> {
        match self {
            Cdrd::Reached { minutes } => Some(*minutes),
            Cdrd::Censored { .. } => None,
        }
    }
}

/// Event samples as (minutes since event start, temperature °F).
pub type EventSeries = [(f64, Option<f64>)];

fn event_start(series: &EventSeries) -> Result<(f64, f64)> {
    if series.is_empty() {
        return Err(Error::EmptyInput("event series"));
    }
    series
        .iter()
        .find_map(|(t, v)| v.map(|v| (*t, v)))
        .ok_or(Error::EmptyInput("event series has no readings"))
}

/// Minutes until the room first sits `threshold` °F above its start temperature.
pub fn cdrd(series: &EventSeries, threshold: f64) -> Result<Cdrd> {
    let (t0, v0) = event_start(series)?;
    for (t, v) in series {
        if let Some(v) = v {
            if v - v0 >= threshold - 1e-12 {
                return Ok(Cdrd::Reached { minutes: t - t0 });
            }
        }
    }
    Ok(Cdrd::Censored {
        observed_minutes: series.last().map(|s| s.0).unwrap_or(t0) - t0,
    })
}

/// Largest rise above the start temperature during the event (may be negative).
pub fn max_deviation(series: &EventSeries) -> Result<f64> {
    let (_, v0) = event_start(series)?;
    Ok(series
        .iter()
        .filter_map(|(_, v)| *v)
        .map(|v| v - v0)
        .fold(f64::NEG_INFINITY, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomEvent {
    pub room: String,
    pub cdrd: Cdrd,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DrComfortSummary {
    pub rooms: Vec<RoomEvent>,
    pub fast_reacting_room: Option<String>,
    pub slow_reacting_room: Option<String>,
    pub least_varying_room: String,
    pub most_varying_room: String,
    /// Max minus min uncensored CDRD; absent when every room is censored.
    pub comfort_gap_duration: Option<f64>,
    pub comfort_gap_deviation: f64,
}

/// Room series for one event: (room id, samples).
pub type RoomEventSeries<'a> = (&'a str, &'a EventSeries);

pub fn dr_comfort_summary(rooms: &[RoomEventSeries<'_>], threshold: f64) -> Result<DrComfortSummary> {
    if rooms.len() < 2 {
        return Err(Error::InsufficientData { needed: 2, got: rooms.len() });
    }
    let events: Vec<RoomEvent> = rooms
        .iter()
        .map(|(room, s)| {
            Ok(RoomEvent {
                room: (*room).into(),
                cdrd: cdrd(s, threshold)?,
                max_deviation: max_deviation(s)?,
            })
        })
        .collect::<Result<_>>()?;

    let uncensored = || events.iter().filter_map(|e| e.cdrd.minutes().map(|m| (e, m)));
    let fast = uncensored().min_by(|a, b| a.1.total_cmp(&b.1));
    let slow = uncensored().max_by(|a, b| a.1.total_cmp(&b.1));
    let least = events.iter().min_by(|a, b| a.max_deviation.total_cmp(&b.max_deviation)).unwrap();
    let most = events.iter().max_by(|a, b| a.max_deviation.total_cmp(&b.max_deviation)).unwrap();

    Ok(DrComfortSummary {
        fast_reacting_room: fast.map(|(e, _)| e.room.clone()),
        slow_reacting_room: slow.map(|(e, _)| e.room.clone()),
        least_varying_room: least.room.clone(),
        most_varying_room: most.room.clone(),
        comfort_gap_duration: fast.zip(slow).map(|(f, s)| s.1 - f.1),
        comfort_gap_deviation: most.max_deviation - least.max_deviation,
        rooms: events,
    })
}
