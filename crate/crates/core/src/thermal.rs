//! Gray-box room parameters from free-floating periods and nightly heating
//! balance.
//!
//! During a free-floating period the room relaxes exponentially toward the
//! mean outdoor temperature plus a gain offset:
//!
//! ```text
//! T(t) = T_out + RQ + (T(0) - T_out - RQ) * exp(-t / RC)
//! ```
//!
//! Heating-night segments fix `RQ = 0` and fit only `RC`; cooling-day
//! segments fit both. `T(0)` is the first observation of the segment. The
//! nightly balance relates heating duty cycle to the indoor-outdoor gap,
//! `F = (T_in - T_out) / RK`, fitted by least squares with an intercept.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use chrono::{NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffp::{FfpMode, FfpSegment};
use crate::ingest::{HouseTrace, HvacMode};
use crate::lsq::{self, LmOptions, Model};
use crate::stats;

pub const RC_MIN_HOURS: f64 = 0.1;
pub const RC_MAX_HOURS: f64 = 500.0;
pub const RQ_BOUND: f64 = 20.0;
pub const RC_START_HOURS: f64 = 12.0;
pub const RQ_START: f64 = 2.0;
/// Fits with a larger RMSE (°F) are discarded.
pub const MAX_RMSE: f64 = 1.0;
/// Balance fits with a lower correlation are discarded.
pub const MIN_R_VALUE: f64 = 0.7;
pub const MIN_NIGHTS: usize = 10;
/// Fraction of the 22:00-07:00 window a night must cover to be aggregated.
pub const MIN_NIGHT_COVERAGE: f64 = 0.9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RcFit {
    pub house_id: String,
    pub sensor: usize,
    pub season: HvacMode,
    pub start: NaiveDateTime,
    pub rc_hours: f64,
    /// Present only for cooling-season fits.
    pub rq: Option<f64>,
    pub rmse: f64,
    pub segments: usize,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RkFit {
    pub house_id: String,
    pub sensor: usize,
    pub rk: f64,
    pub r_value: f64,
    pub intercept: f64,
    pub nights: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NightAggregate {
    /// Evening date owning the night.
    pub date: NaiveDate,
    pub duty_cycle: f64,
    pub mean_indoor: f64,
    pub mean_outdoor: f64,
}

struct Decay<'a> {
    samples: &'a [(f64, f64)],
    outdoor: f64,
    initial: f64,
}

impl Model<1> for Decay<'_> {
    fn len(&self) -> usize {
        self.samples.len()
    }

    fn residual(&self, k: usize, p: &[f64; 1]) -> (f64, [f64; 1]) {
        let (t, obs) = self.samples[k];
        let rc = p[0];
        let e = libm::exp(-t / rc);
        let theta0 = self.initial - self.outdoor;
        let model = self.outdoor + theta0 * e;
        (obs - model, [-theta0 * e * t / (rc * rc)])
    }
}

struct DecayWithGain<'a> {
    samples: &'a [(f64, f64)],
    outdoor: f64,
    initial: f64,
}

impl Model<2> for DecayWithGain<'_> {
    fn len(&self) -> usize {
        self.samples.len()
    }

    fn residual(&self, k: usize, p: &[f64; 2]) -> (f64, [f64; 2]) {
        let (t, obs) = self.samples[k];
        let (rc, rq) = (p[0], p[1]);
        let e = libm::exp(-t / rc);
        let amp = self.initial - self.outdoor - rq;
        let model = self.outdoor + rq + amp * e;
        (obs - model, [-amp * e * t / (rc * rc), -(1.0 - e)])
    }
}

fn rmse(cost: f64, n: usize) -> f64 {
    libm::sqrt(cost / n as f64)
}

/// Log-linear first guess for the heating decay, falling back to the default.
fn heating_start(seg: &FfpSegment) -> f64 {
    let theta0 = seg.initial_temp - seg.mean_outdoor;
    let pts: Vec<(f64, f64)> = seg
        .samples
        .iter()
        .filter(|(_, v)| v - seg.mean_outdoor > 0.0)
        .map(|(t, v)| (*t, libm::log((v - seg.mean_outdoor) / theta0)))
        .collect();
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    match stats::linregress(&xs, &ys) {
        Some(f) if f.slope < 0.0 => (-1.0 / f.slope).clamp(RC_MIN_HOURS, RC_MAX_HOURS),
        _ => RC_START_HOURS,
    }
}

/// Fits RC to a heating-night segment with no gain term.
pub fn fit_rc_heating(seg: &FfpSegment) -> Result<RcFit> {
    fit_rc_heating_with(seg, &LmOptions::default())
}

pub fn fit_rc_heating_with(seg: &FfpSegment, opts: &LmOptions) -> Result<RcFit> {
    if seg.mode != FfpMode::HeatingNight {
        return Err(Error::InvalidInput("RC-only fit needs a heating-night segment".into()));
    }
    if seg.samples.len() < 4 {
        return Err(Error::InsufficientData { needed: 4, got: seg.samples.len() });
    }
    let theta0 = seg.initial_temp - seg.mean_outdoor;
    if !(theta0 > 0.0) {
        return Err(Error::NoDecaySignal(theta0));
    }
    let model = Decay { samples: &seg.samples, outdoor: seg.mean_outdoor, initial: seg.initial_temp };
    let rep = lsq::minimize(&model, [heating_start(seg)], [RC_MIN_HOURS], [RC_MAX_HOURS], opts)?;
    Ok(RcFit {
        house_id: seg.house_id.clone(),
        sensor: seg.sensor,
        season: HvacMode::Heating,
        start: seg.start,
        rc_hours: rep.params[0],
        rq: None,
        rmse: rmse(rep.cost, seg.samples.len()),
        segments: 1,
        iterations: rep.iterations,
    })
}

/// Fits RC and RQ jointly to a cooling-day segment.
pub fn fit_rc_rq_cooling(seg: &FfpSegment) -> Result<RcFit> {
    fit_rc_rq_cooling_with(seg, &LmOptions::default())
}

pub fn fit_rc_rq_cooling_with(seg: &FfpSegment, opts: &LmOptions) -> Result<RcFit> {
    if seg.mode != FfpMode::CoolingDay {
        return Err(Error::InvalidInput("RC/RQ fit needs a cooling-day segment".into()));
    }
    if seg.samples.len() < 5 {
        return Err(Error::InsufficientData { needed: 5, got: seg.samples.len() });
    }
    let model = DecayWithGain { samples: &seg.samples, outdoor: seg.mean_outdoor, initial: seg.initial_temp };
    let rep = lsq::minimize(
        &model,
        [RC_START_HOURS, RQ_START],
        [RC_MIN_HOURS, -RQ_BOUND],
        [RC_MAX_HOURS, RQ_BOUND],
        opts,
    )?;
    Ok(RcFit {
        house_id: seg.house_id.clone(),
        sensor: seg.sensor,
        season: HvacMode::Cooling,
        start: seg.start,
        rc_hours: rep.params[0],
        rq: Some(rep.params[1]),
        rmse: rmse(rep.cost, seg.samples.len()),
        segments: 1,
        iterations: rep.iterations,
    })
}

/// Dispatches on the segment mode.
pub fn fit_segment(seg: &FfpSegment) -> Result<RcFit> {
    match seg.mode {
        FfpMode::HeatingNight => fit_rc_heating(seg),
        FfpMode::CoolingDay => fit_rc_rq_cooling(seg),
        FfpMode::DrAfternoon => Err(Error::InvalidInput("dr-afternoon segments are not fitted".into())),
    }
}

/// Population over which the two-sigma rule is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Grouping {
    /// All fits of one season together.
    Population,
    House,
    HouseSensor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RemovalReason {
    Rmse,
    LowCorrelation,
    Outlier,
    GroupTooSmall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Filtered<T> {
    pub kept: Vec<T>,
    pub removed: Vec<(T, RemovalReason)>,
}

/// Options for [`filter_fits`]. `repeat_sigma` re-applies the two-sigma rule
/// until nothing more is removed, which makes the filter idempotent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FilterOptions {
    pub grouping: Grouping,
    pub min_group: usize,
    pub sigmas: f64,
    pub repeat_sigma: bool,
}

impl Default for FilterOptions {
    fn default() -> Self {
        FilterOptions { grouping: Grouping::Population, min_group: 3, sigmas: 2.0, repeat_sigma: false }
    }
}

fn group_key(grouping: Grouping, house: &str, sensor: usize) -> (String, usize) {
    match grouping {
        Grouping::Population => (String::new(), 0),
        Grouping::House => (house.into(), 0),
        Grouping::HouseSensor => (house.into(), sensor),
    }
}

/// Two-sigma trimming over groups. `params` extracts the values tested; an
/// item is removed when any of them leaves mean ± sigmas·std (population std).
fn sigma_filter<T: Clone>(
    items: Vec<T>,
    key: impl Fn(&T) -> (String, usize),
    params: impl Fn(&T) -> Vec<f64>,
    opts: &FilterOptions,
    removed: &mut Vec<(T, RemovalReason)>,
) -> Vec<T> {
    let mut groups: BTreeMap<(String, usize), Vec<T>> = BTreeMap::new();
    for it in items {
        groups.entry(key(&it)).or_default().push(it);
    }
    let mut kept = Vec::new();
    for (_, mut group) in groups {
        if group.len() < opts.min_group {
            removed.extend(group.into_iter().map(|g| (g, RemovalReason::GroupTooSmall)));
            continue;
        }
        loop {
            let width = params(&group[0]).len();
            let bounds: Vec<(f64, f64)> = (0..width)
                .map(|i| {
                    let xs: Vec<f64> = group.iter().map(|g| params(g)[i]).collect();
                    let m = stats::mean(&xs).unwrap_or(0.0);
                    let s = stats::std_pop(&xs).unwrap_or(0.0);
                    let slack = 1e-12 * (1.0 + libm::fabs(m));
                    (m - opts.sigmas * s - slack, m + opts.sigmas * s + slack)
                })
                .collect();
            let before = group.len();
            let (inside, outside): (Vec<T>, Vec<T>) = group.into_iter().partition(|g| {
                params(g).iter().zip(&bounds).all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
            });
            removed.extend(outside.into_iter().map(|g| (g, RemovalReason::Outlier)));
            group = inside;
            if !opts.repeat_sigma || group.len() == before || group.is_empty() {
                break;
            }
        }
        kept.extend(group);
    }
    kept
}

/// Drops fits with RMSE above 1 °F, then applies the two-sigma rule per
/// group to RC (and RQ when present). Groups left with fewer than
/// `min_group` fits after the RMSE pass are dropped.
pub fn filter_fits(fits: Vec<RcFit>, opts: &FilterOptions) -> Filtered<RcFit> {
    let mut removed = Vec::new();
    let mut passing = Vec::new();
    for f in fits {
        if f.rmse > MAX_RMSE || !f.rmse.is_finite() {
            removed.push((f, RemovalReason::Rmse));
        } else {
            passing.push(f);
        }
    }
    let grouping = opts.grouping;
    let kept = sigma_filter(
        passing,
        |f: &RcFit| {
            let (h, s) = group_key(grouping, &f.house_id, f.sensor);
            (alloc::format!("{h}/{}", f.season.as_str()), s)
        },
        |f: &RcFit| {
            let mut v = alloc::vec![f.rc_hours];
            v.extend(f.rq);
            v
        },
        opts,
        &mut removed,
    );
    Filtered { kept, removed }
}

/// Drops balance fits with correlation below 0.7, then applies the
/// two-sigma rule to RK per group.
pub fn filter_rk_fits(fits: Vec<RkFit>, opts: &FilterOptions) -> Filtered<RkFit> {
    let mut removed = Vec::new();
    let mut passing = Vec::new();
    for f in fits {
        if f.r_value < MIN_R_VALUE {
            removed.push((f, RemovalReason::LowCorrelation));
        } else {
            passing.push(f);
        }
    }
    let grouping = opts.grouping;
    let kept = sigma_filter(
        passing,
        |f: &RkFit| group_key(grouping, &f.house_id, f.sensor),
        |f: &RkFit| alloc::vec![f.rk],
        opts,
        &mut removed,
    );
    Filtered { kept, removed }
}

/// Nightly heating duty cycle and mean temperatures for one sensor. A night
/// qualifies when heating ran, no cooling ran, and the records cover at
/// least 90% of the 22:00-07:00 window.
pub fn nightly_aggregate(trace: &HouseTrace, sensor: usize) -> Vec<NightAggregate> {
    #[derive(Default)]
    struct Night {
        records: usize,
        heat: f64,
        cool: f64,
        indoor: Vec<f64>,
        outdoor: Vec<f64>,
    }
    let mut nights: BTreeMap<NaiveDate, Night> = BTreeMap::new();
    for r in &trace.records {
        let Some(date) = FfpMode::HeatingNight.window_date(r.timestamp) else {
            continue;
        };
        let n = nights.entry(date).or_default();
        n.records += 1;
        n.heat += r.heat_seconds().unwrap_or(0.0);
        n.cool += r.cool_seconds().unwrap_or(0.0);
        n.indoor.extend(r.sensor_temp(sensor));
        n.outdoor.extend(r.outdoor_temp);
    }
    let window_seconds = 9.0 * 3600.0;
    let step = trace.interval_seconds as f64;
    nights
        .into_iter()
        .filter_map(|(date, n)| {
            let observed = n.records as f64 * step;
            if observed < MIN_NIGHT_COVERAGE * window_seconds || n.heat <= 0.0 || n.cool > 0.0 {
                return None;
            }
            Some(NightAggregate {
                date,
                duty_cycle: (n.heat / observed).clamp(0.0, 1.0),
                mean_indoor: stats::mean(&n.indoor)?,
                mean_outdoor: stats::mean(&n.outdoor)?,
            })
        })
        .collect()
}

/// Regresses nightly duty cycle on the indoor-outdoor difference; RK is the
/// reciprocal slope.
pub fn fit_rk_balance(house_id: &str, sensor: usize, nights: &[NightAggregate]) -> Result<RkFit> {
    if nights.len() < MIN_NIGHTS {
        return Err(Error::InsufficientData { needed: MIN_NIGHTS, got: nights.len() });
    }
    let x: Vec<f64> = nights.iter().map(|n| n.mean_indoor - n.mean_outdoor).collect();
    let y: Vec<f64> = nights.iter().map(|n| n.duty_cycle).collect();
    let fit = stats::linregress(&x, &y).ok_or(Error::ZeroVariance)?;
    if !(fit.slope > 0.0) {
        return Err(Error::NonPhysicalSlope(fit.slope));
    }
    Ok(RkFit {
        house_id: house_id.into(),
        sensor,
        rk: 1.0 / fit.slope,
        r_value: fit.r_value,
        intercept: fit.intercept,
        nights: nights.len(),
    })
}

/// Identified parameters of one (house, sensor): medians of the surviving
/// per-segment fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalParams {
    pub house_id: String,
    pub sensor: usize,
    pub rc_heating: Option<f64>,
    pub rc_cooling: Option<f64>,
    pub rq: Option<f64>,
    pub rk: Option<f64>,
    pub heating_segments: usize,
    pub cooling_segments: usize,
}

pub fn combine_params(rc_fits: &[RcFit], rk_fits: &[RkFit]) -> Vec<ThermalParams> {
    let mut map: BTreeMap<(String, usize), ThermalParams> = BTreeMap::new();
    let entry = |map: &mut BTreeMap<(String, usize), ThermalParams>, h: &str, s: usize| {
        map.entry((h.into(), s))
            .or_insert_with(|| ThermalParams {
                house_id: h.into(),
                sensor: s,
                rc_heating: None,
                rc_cooling: None,
                rq: None,
                rk: None,
                heating_segments: 0,
                cooling_segments: 0,
            })
            .clone()
    };
    let mut keys: Vec<(String, usize)> = rc_fits
        .iter()
        .map(|f| (f.house_id.clone(), f.sensor))
        .chain(rk_fits.iter().map(|f| (f.house_id.clone(), f.sensor)))
        .collect();
    keys.sort();
    keys.dedup();
    for (h, s) in keys {
        let mut p = entry(&mut map, &h, s);
        let pick = |season: HvacMode| -> Vec<&RcFit> {
            rc_fits.iter().filter(|f| f.house_id == h && f.sensor == s && f.season == season).collect()
        };
        let heat = pick(HvacMode::Heating);
        let cool = pick(HvacMode::Cooling);
        p.rc_heating = stats::median(&heat.iter().map(|f| f.rc_hours).collect::<Vec<_>>());
        p.rc_cooling = stats::median(&cool.iter().map(|f| f.rc_hours).collect::<Vec<_>>());
        p.rq = stats::median(&cool.iter().filter_map(|f| f.rq).collect::<Vec<_>>());
        p.rk = rk_fits.iter().find(|f| f.house_id == h && f.sensor == s).map(|f| f.rk);
        p.heating_segments = heat.len();
        p.cooling_segments = cool.len();
        map.insert((h, s), p);
    }
    map.into_values().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use chrono::{Duration, NaiveDate};

    fn segment(mode: FfpMode, rc: f64, rq: f64, t_in0: f64, t_out: f64, hours: f64) -> FfpSegment {
        let start = NaiveDate::from_ymd_opt(2017, 1, 1).unwrap().and_hms_opt(23, 0, 0).unwrap();
        let n = (hours * 12.0) as i64;
        let pts: Vec<_> = (0..=n)
            .map(|k| {
                let t = k as f64 / 12.0;
                let v = t_out + rq + (t_in0 - t_out - rq) * libm::exp(-t / rc);
                (start + Duration::minutes(5 * k), v, t_out)
            })
            .collect();
        FfpSegment::from_samples("h", 1, mode, &pts).unwrap()
    }

    #[test]
    fn heating_fit_recovers_rc() {
        let seg = segment(FfpMode::HeatingNight, 10.0, 0.0, 45.0, 40.0, 2.0);
        let fit = fit_rc_heating(&seg).unwrap();
        assert!((fit.rc_hours - 10.0).abs() / 10.0 < 1e-6, "{}", fit.rc_hours);
        assert!(fit.rmse < 1e-9);
        assert_eq!(fit.rq, None);
    }

    #[test]
    fn heating_fit_needs_signal() {
        let seg = segment(FfpMode::HeatingNight, 10.0, 0.0, 40.0, 40.0, 2.0);
        assert!(matches!(fit_rc_heating(&seg), Err(Error::NoDecaySignal(_))));
        let mut short = segment(FfpMode::HeatingNight, 10.0, 0.0, 50.0, 40.0, 2.0);
        short.samples.truncate(3);
        assert!(matches!(fit_rc_heating(&short), Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn cooling_fit_recovers_rc_and_rq() {
        let seg = segment(FfpMode::CoolingDay, 8.0, 3.0, 74.0, 90.0, 3.0);
        let fit = fit_rc_rq_cooling(&seg).unwrap();
        assert!((fit.rc_hours - 8.0).abs() / 8.0 < 1e-6, "{}", fit.rc_hours);
        assert!((fit.rq.unwrap() - 3.0).abs() / 3.0 < 1e-6);
    }

    #[test]
    fn mode_mismatch_rejected() {
        let seg = segment(FfpMode::CoolingDay, 8.0, 3.0, 74.0, 90.0, 3.0);
        assert!(fit_rc_heating(&seg).is_err());
        let seg = segment(FfpMode::HeatingNight, 8.0, 0.0, 74.0, 40.0, 3.0);
        assert!(fit_rc_rq_cooling(&seg).is_err());
    }

    fn rc_fit(rc: f64, rmse: f64) -> RcFit {
        RcFit {
            house_id: "h".into(),
            sensor: 0,
            season: HvacMode::Heating,
            start: NaiveDate::from_ymd_opt(2017, 1, 1).unwrap().and_hms_opt(0, 0, 0).unwrap(),
            rc_hours: rc,
            rq: None,
            rmse,
            segments: 1,
            iterations: 1,
        }
    }

    #[test]
    fn rmse_filter() {
        let mut fits = vec![rc_fit(10.0, 0.1); 3];
        fits.push(rc_fit(10.0, 1.5));
        let out = filter_fits(fits, &FilterOptions::default());
        assert_eq!(out.kept.len(), 3);
        assert_eq!(out.removed.len(), 1);
        assert_eq!(out.removed[0].1, RemovalReason::Rmse);
    }

    #[test]
    fn sigma_filter_removes_outlier() {
        let mut fits = vec![rc_fit(10.0, 0.1); 10];
        fits.push(rc_fit(200.0, 0.1));
        let out = filter_fits(fits, &FilterOptions::default());
        assert_eq!(out.kept.len(), 10);
        assert_eq!(out.removed[0].0.rc_hours, 200.0);
        assert_eq!(out.removed[0].1, RemovalReason::Outlier);
        let again = filter_fits(out.kept.clone(), &FilterOptions::default());
        assert_eq!(again.kept, out.kept);
    }

    #[test]
    fn identical_fits_survive() {
        let fits = vec![rc_fit(7.3, 0.2); 6];
        let out = filter_fits(fits.clone(), &FilterOptions::default());
        assert_eq!(out.kept, fits);
    }

    #[test]
    fn small_group_dropped() {
        let out = filter_fits(vec![rc_fit(7.3, 0.2); 2], &FilterOptions::default());
        assert!(out.kept.is_empty());
        assert_eq!(out.removed[0].1, RemovalReason::GroupTooSmall);
    }

    fn night(day: u32, diff: f64, duty: f64) -> NightAggregate {
        NightAggregate {
            date: NaiveDate::from_ymd_opt(2017, 1, day).unwrap(),
            duty_cycle: duty,
            mean_indoor: 70.0,
            mean_outdoor: 70.0 - diff,
        }
    }

    #[test]
    fn balance_fit_exact_line() {
        let nights: Vec<_> = (1..=12).map(|d| night(d, 10.0 + 2.0 * d as f64, (10.0 + 2.0 * d as f64) / 100.0)).collect();
        let fit = fit_rk_balance("h", 0, &nights).unwrap();
        assert!((fit.rk - 100.0).abs() < 1e-9);
        assert!((fit.r_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn balance_fit_errors() {
        let two: Vec<_> = (1..=2).map(|d| night(d, d as f64, 0.1)).collect();
        assert!(matches!(fit_rk_balance("h", 0, &two), Err(Error::InsufficientData { .. })));
        let flat: Vec<_> = (1..=12).map(|d| night(d, 20.0, 0.1 + d as f64 * 0.01)).collect();
        assert_eq!(fit_rk_balance("h", 0, &flat).unwrap_err(), Error::ZeroVariance);
        let neg: Vec<_> = (1..=12).map(|d| night(d, d as f64, 0.5 - d as f64 * 0.01)).collect();
        assert!(matches!(fit_rk_balance("h", 0, &neg), Err(Error::NonPhysicalSlope(_))));
    }

    #[test]
    fn rk_filter_drops_weak_correlation() {
        let fit = |rk: f64, r: f64| RkFit { house_id: "h".into(), sensor: 0, rk, r_value: r, intercept: 0.0, nights: 20 };
        let out = filter_rk_fits(vec![fit(50.0, 0.9), fit(51.0, 0.95), fit(49.0, 0.8), fit(60.0, 0.5)], &FilterOptions::default());
        assert_eq!(out.kept.len(), 3);
        assert_eq!(out.removed[0].1, RemovalReason::LowCorrelation);
    }

    mod nights {
        use super::*;
        use crate::ingest::TraceRecord;

        fn trace(heat: impl Fn(NaiveDateTime) -> f64, cool: impl Fn(NaiveDateTime) -> f64) -> HouseTrace {
            let start = NaiveDate::from_ymd_opt(2017, 1, 1).unwrap().and_hms_opt(12, 0, 0).unwrap();
            let recs = (0..24 * 12)
                .map(|i| {
                    let t = start + Duration::minutes(5 * i);
                    let mut r = TraceRecord::empty(t);
                    r.thermostat_temp = Some(68.0);
                    r.outdoor_temp = Some(30.0);
                    r.heat_runtimes = vec![Some(heat(t))];
                    r.cool_runtimes = vec![Some(cool(t))];
                    r
                })
                .collect();
            HouseTrace::new("h", recs, 300).unwrap()
        }

        use chrono::Timelike;

        #[test]
        fn duty_cycle_ratio() {
            // heat for the first 3 hours of the night
            let t = trace(|t| if (22..24).contains(&t.hour()) || t.hour() == 0 { 300.0 } else { 0.0 }, |_| 0.0);
            let n = nightly_aggregate(&t, 0);
            assert_eq!(n.len(), 1);
            assert!((n[0].duty_cycle - 1.0 / 3.0).abs() < 1e-12);
            assert_eq!(n[0].mean_indoor, 68.0);
            assert_eq!(n[0].mean_outdoor, 30.0);
        }

        #[test]
        fn cooling_or_idle_nights_excluded() {
            let t = trace(|_| 60.0, |t| if t.hour() == 2 { 30.0 } else { 0.0 });
            assert!(nightly_aggregate(&t, 0).is_empty());
            let t = trace(|_| 0.0, |_| 0.0);
            assert!(nightly_aggregate(&t, 0).is_empty());
        }
    }
}
