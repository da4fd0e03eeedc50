use alloc::vec::Vec;

use chrono::{Datelike, Duration, NaiveDateTime};
use serde::{Deserialize, Serialize};

use super::trace::HouseTrace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HvacMode {
    Heating,
    Cooling,
}

impl HvacMode {
    pub fn opposite(self) -> HvacMode {
        match self {
            HvacMode::Heating => HvacMode::Cooling,
            HvacMode::Cooling => HvacMode::Heating,
        }
    }

    /// Months in which the parameter-identification span may lie: every
    /// month except the three of the opposite season.
    pub fn eligible_month(self, month: u32) -> bool {
        match self {
            HvacMode::Heating => !(6..=8).contains(&month),
            HvacMode::Cooling => !matches!(month, 12 | 1 | 2),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            HvacMode::Heating => "heating",
            HvacMode::Cooling => "cooling",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeasonDefinition {
    /// Longest run during which only this mode was active.
    ComfortExclusive,
    /// First to last activation inside the nine-month eligibility window.
    ParamidSpan,
}

/// Half-open interval `[start, end)` of one season.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeasonWindow {
    pub mode: HvacMode,
    pub start: NaiveDateTime,
    pub end: NaiveDateTime,
    pub definition: SeasonDefinition,
}

impl SeasonWindow {
    pub fn contains(&self, t: NaiveDateTime) -> bool {
        self.start <= t && t < self.end
    }

    pub fn duration(&self) -> Duration {
        self.end - self.start
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Activation {
    Idle,
    Only(HvacMode),
    Both,
}

fn activation(heat: Option<f64>, cool: Option<f64>) -> Activation {
    let h = heat.unwrap_or(0.0) > 0.0;
    let c = cool.unwrap_or(0.0) > 0.0;
    match (h, c) {
        (true, true) => Activation::Both,
        (true, false) => Activation::Only(HvacMode::Heating),
        (false, true) => Activation::Only(HvacMode::Cooling),
        (false, false) => Activation::Idle,
    }
}

/// Splits a trace into heating and cooling seasons. Comfort-exclusive yields
/// at most one window per mode; paramid-span yields one window per contiguous
/// eligibility block that contains an activation. A mode that never runs
/// produces no window.
pub fn segment_seasons(trace: &HouseTrace, definition: SeasonDefinition) -> Result<Vec<SeasonWindow>> {
    let (first, last) = trace
        .span()
        .ok_or(Error::EmptyInput("trace has no records"))?;
    if last - first < Duration::days(1) {
        return Err(Error::InvalidInput("trace spans less than one day".into()));
    }
    Ok(match definition {
        SeasonDefinition::ComfortExclusive => comfort_exclusive(trace),
        SeasonDefinition::ParamidSpan => {
            let mut out = paramid_span(trace, HvacMode::Heating);
            out.extend(paramid_span(trace, HvacMode::Cooling));
            out
        }
    })
}

fn comfort_exclusive(trace: &HouseTrace) -> Vec<SeasonWindow> {
    let step = trace.interval();
    let mut best: [Option<(NaiveDateTime, NaiveDateTime)>; 2] = [None, None];
    let mut run: Option<(HvacMode, NaiveDateTime, NaiveDateTime)> = None;

    let mut close = |run: &mut Option<(HvacMode, NaiveDateTime, NaiveDateTime)>| {
        if let Some((mode, s, e)) = run.take() {
            let slot = &mut best[mode as usize];
            let longer = match slot {
                Some((bs, be)) => (e - s) > (*be - *bs),
                None => true,
            };
            if longer {
                *slot = Some((s, e));
            }
        }
    };

    for r in &trace.records {
        match activation(r.heat_seconds(), r.cool_seconds()) {
            Activation::Idle => {}
            Activation::Both => close(&mut run),
            Activation::Only(mode) => match &mut run {
                Some((m, _, end)) if *m == mode => *end = r.timestamp + step,
                _ => {
                    close(&mut run);
                    run = Some((mode, r.timestamp, r.timestamp + step));
                }
            },
        }
    }
    close(&mut run);

    [HvacMode::Heating, HvacMode::Cooling]
        .into_iter()
        .filter_map(|mode| {
            best[mode as usize].map(|(start, end)| SeasonWindow {
                mode,
                start,
                end,
                definition: SeasonDefinition::ComfortExclusive,
            })
        })
        .collect()
}

/// Identifies which eligibility block a timestamp belongs to. Heating blocks
/// run September to May and straddle the new year.
fn block_key(mode: HvacMode, t: NaiveDateTime) -> i32 {
    match mode {
        HvacMode::Heating if t.month() >= 9 => t.year(),
        HvacMode::Heating => t.year() - 1,
        HvacMode::Cooling => t.year(),
    }
}

fn paramid_span(trace: &HouseTrace, mode: HvacMode) -> Vec<SeasonWindow> {
    let step = trace.interval();
    let mut out: Vec<SeasonWindow> = Vec::new();
    let mut current: Option<(i32, NaiveDateTime, NaiveDateTime)> = None;
    for r in &trace.records {
        if !mode.eligible_month(r.timestamp.month()) {
            continue;
        }
        let runtime = match mode {
            HvacMode::Heating => r.heat_seconds(),
            HvacMode::Cooling => r.cool_seconds(),
        };
        if runtime.unwrap_or(0.0) <= 0.0 {
            continue;
        }
        let key = block_key(mode, r.timestamp);
        match &mut current {
            Some((k, _, end)) if *k == key => *end = r.timestamp + step,
            _ => {
                if let Some((_, s, e)) = current.take() {
                    out.push(SeasonWindow { mode, start: s, end: e, definition: SeasonDefinition::ParamidSpan });
                }
                current = Some((key, r.timestamp, r.timestamp + step));
            }
        }
    }
    if let Some((_, s, e)) = current {
        out.push(SeasonWindow { mode, start: s, end: e, definition: SeasonDefinition::ParamidSpan });
    }
    out
}
