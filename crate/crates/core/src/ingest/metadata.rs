use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::format;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floor areas below this (ft²) are treated as data-entry errors.
pub const MIN_FLOOR_AREA: f64 = 100.0;
/// Occupant counts below this are treated as data-entry errors.
pub const MIN_OCCUPANTS: u32 = 1;

/// House attributes as self-reported in the thermostat metadata export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseMetadata {
    pub house_id: String,
    pub floor_area: Option<f64>,
    pub num_occupants: Option<u32>,
    pub num_floors: Option<u32>,
    pub num_remote_sensors: u32,
    pub state_code: Option<String>,
    pub eco_plus_enrolled: Option<bool>,
    pub eco_plus_slider: Option<i32>,
}

impl HouseMetadata {
    pub fn new(house_id: impl Into<String>, num_remote_sensors: u32) -> Self {
        HouseMetadata {
            house_id: house_id.into(),
            floor_area: None,
            num_occupants: None,
            num_floors: None,
            num_remote_sensors,
            state_code: None,
            eco_plus_enrolled: None,
            eco_plus_slider: None,
        }
    }

    /// Floor area if it survives the cleaning rule.
    pub fn clean_floor_area(&self) -> Option<f64> {
        self.floor_area.filter(|a| a.is_finite() && *a >= MIN_FLOOR_AREA)
    }

    pub fn clean_occupants(&self) -> Option<u32> {
        self.num_occupants.filter(|n| *n >= MIN_OCCUPANTS)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub value: i64,
    pub count: usize,
    pub share: f64,
    /// Share of records with this value or more.
    pub cumulative_share: f64,
}

fn histogram(values: impl Iterator<Item = i64>) -> Vec<HistogramBin> {
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for v in values {
        *counts.entry(v).or_default() += 1;
    }
    let total: usize = counts.values().sum();
    let mut out: Vec<HistogramBin> = counts
        .into_iter()
        .map(|(value, count)| HistogramBin {
            value,
            count,
            share: count as f64 / total as f64,
            cumulative_share: 0.0,
        })
        .collect();
    let mut tail = 0usize;
    for bin in out.iter_mut().rev() {
        tail += bin.count;
        bin.cumulative_share = tail as f64 / total as f64;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcoPlusSummary {
    /// Houses reporting an enrollment status.
    pub reported: usize,
    pub enrolled: usize,
    pub enrollment_rate: f64,
    pub enrolled_with_sensor: usize,
    pub enrolled_two_plus_sensors: usize,
    pub slider_histogram: Vec<HistogramBin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossTabRow {
    pub level: String,
    pub houses: usize,
    /// Houses per remote-sensor count within the level.
    pub counts: BTreeMap<u32, usize>,
    pub shares: BTreeMap<u32, f64>,
}

/// Sensor-count distribution broken down by one cleaned attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossTab {
    pub attribute: String,
    /// Records surviving the attribute's cleaning rule.
    pub kept: usize,
    pub rows: Vec<CrossTabRow>,
}

fn cross_tab<K: Ord + Clone + ToString>(
    attribute: &str,
    items: impl Iterator<Item = (K, u32)>,
) -> CrossTab {
    let mut levels: BTreeMap<K, BTreeMap<u32, usize>> = BTreeMap::new();
    for (k, sensors) in items {
        *levels.entry(k).or_default().entry(sensors).or_default() += 1;
    }
    let rows: Vec<CrossTabRow> = levels
        .into_iter()
        .map(|(k, counts)| {
            let houses: usize = counts.values().sum();
            let shares = counts.iter().map(|(s, c)| (*s, *c as f64 / houses as f64)).collect();
            CrossTabRow { level: k.to_string(), houses, counts, shares }
        })
        .collect();
    CrossTab {
        attribute: attribute.into(),
        kept: rows.iter().map(|r| r.houses).sum(),
        rows,
    }
}

/// Floor-area bins (ft²) used by the cross-tab; `upper == None` is open-ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct AreaBin {
    pub lower: u32,
    pub upper: Option<u32>,
}

const AREA_EDGES: [u32; 7] = [100, 1000, 1500, 2000, 2500, 3000, 4000];

impl AreaBin {
    pub fn of(area: f64) -> AreaBin {
        let i = AREA_EDGES.iter().rposition(|e| area >= *e as f64).unwrap_or(0);
        AreaBin { lower: AREA_EDGES[i], upper: AREA_EDGES.get(i + 1).copied() }
    }
}

impl core::fmt::Display for AreaBin {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self.upper {
            Some(u) => write!(f, "{}-{}", self.lower, u),
            None => write!(f, "{}+", self.lower),
        }
    }
}

/// Capped integer level, rendered as "N+" at the cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Capped(u32, u32);

impl core::fmt::Display for Capped {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        if self.0 >= self.1 {
            write!(f, "{}+", self.1)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

/// Remote-sensor penetration across a metadata population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenetrationReport {
    pub houses: usize,
    pub sensor_histogram: Vec<HistogramBin>,
    pub at_least_one_sensor: usize,
    pub at_least_one_share: f64,
    pub eco_plus: EcoPlusSummary,
    pub by_occupants: CrossTab,
    pub by_floors: CrossTab,
    pub by_floor_area: CrossTab,
}

pub fn summarize_metadata(records: &[HouseMetadata]) -> Result<PenetrationReport> {
    if records.is_empty() {
        return Err(Error::EmptyInput("metadata list"));
    }
    let houses = records.len();
    let sensor_histogram = histogram(records.iter().map(|m| m.num_remote_sensors as i64));
    let at_least_one_sensor = records.iter().filter(|m| m.num_remote_sensors >= 1).count();

    let reported: Vec<&HouseMetadata> = records.iter().filter(|m| m.eco_plus_enrolled.is_some()).collect();
    let enrolled: Vec<&HouseMetadata> = reported
        .iter()
        .copied()
        .filter(|m| m.eco_plus_enrolled == Some(true))
        .collect();
    let eco_plus = EcoPlusSummary {
        reported: reported.len(),
        enrolled: enrolled.len(),
        enrollment_rate: if reported.is_empty() {
            0.0
        } else {
            enrolled.len() as f64 / reported.len() as f64
        },
        enrolled_with_sensor: enrolled.iter().filter(|m| m.num_remote_sensors >= 1).count(),
        enrolled_two_plus_sensors: enrolled.iter().filter(|m| m.num_remote_sensors >= 2).count(),
        slider_histogram: histogram(enrolled.iter().filter_map(|m| m.eco_plus_slider.map(i64::from))),
    };

    let by_occupants = cross_tab(
        "num_occupants",
        records
            .iter()
            .filter_map(|m| m.clean_occupants().map(|o| (Capped(o.min(5), 5), m.num_remote_sensors))),
    );
    let by_floors = cross_tab(
        "num_floors",
        records
            .iter()
            .filter_map(|m| m.num_floors.map(|f| (Capped(f.min(4), 4), m.num_remote_sensors))),
    );
    let by_floor_area = cross_tab(
        "floor_area",
        records
            .iter()
            .filter_map(|m| m.clean_floor_area().map(|a| (AreaBin::of(a), m.num_remote_sensors))),
    );

    Ok(PenetrationReport {
        houses,
        sensor_histogram,
        at_least_one_sensor,
        at_least_one_share: at_least_one_sensor as f64 / houses as f64,
        eco_plus,
        by_occupants,
        by_floors,
        by_floor_area,
    })
}

impl PenetrationReport {
    /// Human-readable one-liner used in logs.
    pub fn headline(&self) -> String {
        format!(
            "{} of {} houses ({:.1}%) have at least one remote sensor",
            self.at_least_one_sensor,
            self.houses,
            100.0 * self.at_least_one_share
        )
    }
}
