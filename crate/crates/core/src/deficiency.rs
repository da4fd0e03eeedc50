//! Within-house deficiency flags and thermostat representativeness.
//!
//! Each category compares a room's parameter with the mean μ and population
//! standard deviation σ of that parameter over the rooms of the same house:
//! RQ below μ−σ flags low solar gain, above μ+σ high solar gain; RK below
//! μ−σ flags low heating input; heating-season RC below μ−σ flags poor
//! insulation. Rooms without the parameter do not enter μ or σ.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::stats::{self, Summary};

/// Minimum rooms carrying a parameter for its category to be evaluated.
pub const MIN_ROOMS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deficiency {
    LowSolarGain,
    HighSolarGain,
    LowHeatingInput,
    PoorInsulation,
}

impl Deficiency {
    pub const ALL: [Deficiency; 4] = [
        Deficiency::LowSolarGain,
        Deficiency::HighSolarGain,
        Deficiency::LowHeatingInput,
        Deficiency::PoorInsulation,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Deficiency::LowSolarGain => "Low solar gain",
            Deficiency::HighSolarGain => "High solar gain",
            Deficiency::LowHeatingInput => "Low heating input",
            Deficiency::PoorInsulation => "Poor insulation",
        }
    }

    fn parameter(self, room: &RoomParams) -> Option<f64> {
        match self {
            Deficiency::LowSolarGain | Deficiency::HighSolarGain => room.rq,
            Deficiency::LowHeatingInput => room.rk,
            Deficiency::PoorInsulation => room.rc_heating,
        }
    }

    fn above(self) -> bool {
        matches!(self, Deficiency::HighSolarGain)
    }
}

/// Identified parameters of one room.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomParams {
    pub room: String,
    pub rc_heating: Option<f64>,
    pub rq: Option<f64>,
    pub rk: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoomFlags {
    pub room: String,
    pub low_solar_gain: bool,
    pub high_solar_gain: bool,
    pub low_heating_input: bool,
    pub poor_insulation: bool,
}

impl RoomFlags {
    pub fn get(&self, d: Deficiency) -> bool {
        match d {
            Deficiency::LowSolarGain => self.low_solar_gain,
            Deficiency::HighSolarGain => self.high_solar_gain,
            Deficiency::LowHeatingInput => self.low_heating_input,
            Deficiency::PoorInsulation => self.poor_insulation,
        }
    }

    fn set(&mut self, d: Deficiency) {
        match d {
            Deficiency::LowSolarGain => self.low_solar_gain = true,
            Deficiency::HighSolarGain => self.high_solar_gain = true,
            Deficiency::LowHeatingInput => self.low_heating_input = true,
            Deficiency::PoorInsulation => self.poor_insulation = true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeficiencyReport {
    pub house_id: String,
    pub rooms: Vec<RoomFlags>,
    /// Flagged rooms per evaluated category.
    pub counts: BTreeMap<Deficiency, usize>,
    /// Categories skipped for lack of rooms with the parameter.
    pub skipped: Vec<Deficiency>,
}

/// Mean and population std, with σ snapped to zero when it is rounding noise.
fn moments(xs: &[f64]) -> (f64, f64) {
    let m = stats::mean(xs).unwrap_or(0.0);
    let s = stats::std_pop(xs).unwrap_or(0.0);
    let scale = xs.iter().fold(0.0_f64, |a, x| a.max(libm::fabs(*x)));
    (m, if s <= 1e-12 * scale.max(1e-300) { 0.0 } else { s })
}

pub fn classify_house(house_id: &str, rooms: &[RoomParams]) -> DeficiencyReport {
    let mut flags: Vec<RoomFlags> = rooms
        .iter()
        .map(|r| RoomFlags {
            room: r.room.clone(),
            low_solar_gain: false,
            high_solar_gain: false,
            low_heating_input: false,
            poor_insulation: false,
        })
        .collect();
    let mut counts = BTreeMap::new();
    let mut skipped = Vec::new();
    for d in Deficiency::ALL {
        let values: Vec<f64> = rooms.iter().filter_map(|r| d.parameter(r)).collect();
        if values.len() < MIN_ROOMS {
            skipped.push(d);
            continue;
        }
        let (mu, sigma) = moments(&values);
        let mut n = 0;
        for (r, f) in rooms.iter().zip(flags.iter_mut()) {
            let Some(v) = d.parameter(r) else { continue };
            let hit = if d.above() { v > mu + sigma } else { v < mu - sigma };
            if hit && sigma > 0.0 {
                f.set(d);
                n += 1;
            }
        }
        counts.insert(d, n);
    }
    DeficiencyReport { house_id: house_id.into(), rooms: flags, counts, skipped }
}

/// One row of the deficiency roll-up: houses with exactly one or two flagged
/// rooms, and with any, over the houses where the category was evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollupRow {
    pub category: Deficiency,
    pub evaluated_houses: usize,
    pub one_room: usize,
    pub two_rooms: usize,
    pub total: usize,
}

impl RollupRow {
    pub fn pct(&self, n: usize) -> f64 {
        if self.evaluated_houses == 0 {
            0.0
        } else {
            100.0 * n as f64 / self.evaluated_houses as f64
        }
    }
}

pub fn rollup(reports: &[DeficiencyReport]) -> Vec<RollupRow> {
    Deficiency::ALL
        .iter()
        .map(|&d| {
            let counts: Vec<usize> = reports.iter().filter_map(|r| r.counts.get(&d).copied()).collect();
            RollupRow {
                category: d,
                evaluated_houses: counts.len(),
                one_room: counts.iter().filter(|c| **c == 1).count(),
                two_rooms: counts.iter().filter(|c| **c == 2).count(),
                total: counts.iter().filter(|c| **c >= 1).count(),
            }
        })
        .collect()
}

/// Rooms of one house with the id of the thermostat room.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseRooms {
    pub house_id: String,
    pub thermostat_room: String,
    pub rooms: Vec<RoomParams>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamDifference {
    pub summary: Summary,
    /// 100 · |std / mean|.
    pub coeff_of_variation: f64,
}

/// Pooled room-minus-thermostat differences per parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentativenessStats {
    pub rc: Option<ParamDifference>,
    pub rk: Option<ParamDifference>,
    pub rq: Option<ParamDifference>,
}

pub fn thermostat_differences(houses: &[HouseRooms], param: impl Fn(&RoomParams) -> Option<f64>) -> Vec<f64> {
    let mut out = Vec::new();
    for h in houses {
        let Some(reference) = h.rooms.iter().find(|r| r.room == h.thermostat_room).and_then(&param) else {
            continue;
        };
        out.extend(
            h.rooms
                .iter()
                .filter(|r| r.room != h.thermostat_room)
                .filter_map(&param)
                .map(|v| v - reference),
        );
    }
    out
}

pub fn representativeness(houses: &[HouseRooms]) -> RepresentativenessStats {
    let describe = |xs: Vec<f64>| {
        Summary::of(&xs).map(|summary| ParamDifference {
            summary,
            coeff_of_variation: if summary.mean == 0.0 {
                if summary.std == 0.0 { 0.0 } else { f64::INFINITY }
            } else {
                100.0 * libm::fabs(summary.std / summary.mean)
            },
        })
    };
    RepresentativenessStats {
        rc: describe(thermostat_differences(houses, |r| r.rc_heating)),
        rk: describe(thermostat_differences(houses, |r| r.rk)),
        rq: describe(thermostat_differences(houses, |r| r.rq)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use alloc::vec;

    fn rooms_rq(rq: &[f64]) -> Vec<RoomParams> {
        rq.iter()
            .enumerate()
            .map(|(i, v)| RoomParams { room: format!("r{i}"), rc_heating: None, rq: Some(*v), rk: None })
            .collect()
    }

    #[test]
    fn identical_rooms_have_no_flags() {
        let r = classify_house("h", &rooms_rq(&[0.1; 6]));
        assert_eq!(r.counts[&Deficiency::HighSolarGain], 0);
        assert_eq!(r.counts[&Deficiency::LowSolarGain], 0);
        assert!(r.skipped.contains(&Deficiency::PoorInsulation));
    }

    #[test]
    fn single_high_solar_gain() {
        let r = classify_house("h", &rooms_rq(&[2.0, 2.0, 2.0, 2.0, 2.0, 6.0]));
        assert_eq!(r.counts[&Deficiency::HighSolarGain], 1);
        assert!(r.rooms[5].high_solar_gain);
        assert_eq!(r.counts[&Deficiency::LowSolarGain], 0);
    }

    #[test]
    fn too_few_rooms_skipped() {
        let r = classify_house("h", &rooms_rq(&[1.0, 5.0]));
        assert!(r.counts.is_empty());
        assert_eq!(r.skipped.len(), 4);
    }

    #[test]
    fn rollup_denominators() {
        let a = classify_house("a", &rooms_rq(&[2.0, 2.0, 2.0, 2.0, 2.0, 6.0]));
        let b = classify_house("b", &rooms_rq(&[1.0, 1.0, 1.0]));
        let c = classify_house("c", &rooms_rq(&[1.0]));
        let rows = rollup(&[a, b, c]);
        let high = rows.iter().find(|r| r.category == Deficiency::HighSolarGain).unwrap();
        assert_eq!(high.evaluated_houses, 2);
        assert_eq!(high.one_room, 1);
        assert_eq!(high.total, 1);
        assert_eq!(high.pct(high.total), 50.0);
    }

    #[test]
    fn representativeness_differences() {
        let house = HouseRooms {
            house_id: "h".into(),
            thermostat_room: "t".into(),
            rooms: vec![
                RoomParams { room: "t".into(), rc_heating: Some(10.0), rq: None, rk: None },
                RoomParams { room: "a".into(), rc_heating: Some(14.0), rq: None, rk: None },
            ],
        };
        let s = representativeness(&[house]);
        let rc = s.rc.unwrap();
        assert_eq!(rc.summary.n, 1);
        assert_eq!(rc.summary.mean, 4.0);
        assert!(s.rk.is_none());
    }

    #[test]
    fn identity_rooms_give_zero_differences() {
        let rooms: Vec<_> = (0..3)
            .map(|i| RoomParams { room: format!("r{i}"), rc_heating: Some(5.0), rq: Some(1.0), rk: Some(50.0) })
            .collect();
        let s = representativeness(&[HouseRooms { house_id: "h".into(), thermostat_room: "r0".into(), rooms }]);
        for p in [s.rc, s.rk, s.rq] {
            let p = p.unwrap();
            assert_eq!((p.summary.mean, p.summary.std, p.coeff_of_variation), (0.0, 0.0, 0.0));
        }
    }
}
