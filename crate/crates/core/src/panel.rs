//! Hourly duty-cycle panels and the sensor-count × outdoor-temperature
//! regression with house, hour-of-day and month fixed effects.
//!
//! The model regresses a duty cycle on `s_j · T` (one column per sensor
//! count `j`, or per sensor count and season) plus three additive fixed
//! effects. The fixed effects are absorbed by alternating within-group
//! demeaning; the slopes then come from least squares on the demeaned data,
//! which equals the dummy-variable solution. Standard errors are clustered
//! by house with the `G/(G-1) · (N-1)/(N-K)` small-sample factor and p
//! values use a t distribution with `G-1` degrees of freedom.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use chrono::{Datelike, NaiveDateTime, Timelike};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::ingest::HourlyRecord;

/// Sensor counts above this share the top dummy.
pub const MAX_SENSOR_DUMMY: u8 = 5;
pub const SENSOR_LEVELS: usize = MAX_SENSOR_DUMMY as usize + 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Season {
    Spring,
    Summer,
    Autumn,
    Winter,
}

impl Season {
    pub const ALL: [Season; 4] = [Season::Spring, Season::Summer, Season::Autumn, Season::Winter];

    pub fn name(self) -> &'static str {
        match self {
            Season::Spring => "Spring",
            Season::Summer => "Summer",
            Season::Autumn => "Autumn",
            Season::Winter => "Winter",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Month (1-12) to season assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeasonMap(pub [Season; 12]);

impl Default for SeasonMap {
    /// Meteorological seasons: Mar-May spring, Jun-Aug summer, Sep-Nov autumn.
    fn default() -> Self {
        use Season::*;
        SeasonMap([
            Winter, Winter, Spring, Spring, Spring, Summer, Summer, Summer, Autumn, Autumn, Autumn, Winter,
        ])
    }
}

impl SeasonMap {
    pub fn season(&self, month: u32) -> Season {
        self.0[(month.clamp(1, 12) - 1) as usize]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelRow {
    /// Index into [`Panel::houses`].
    pub house: u32,
    pub timestamp: NaiveDateTime,
    pub hour: u8,
    pub month: u8,
    pub season: Season,
    pub dc_cool: f64,
    pub dc_heat: f64,
    pub dc_combined: f64,
    pub outdoor: f64,
    /// Remote sensors reporting in the hour, capped at 5.
    pub sensors: u8,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub houses: Vec<String>,
    pub rows: Vec<PanelRow>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PanelBuild {
    pub panel: Panel,
    pub dropped_absent_hours: usize,
    pub dropped_missing_outdoor: usize,
}

impl PanelRow {
    pub fn new(house: u32, timestamp: NaiveDateTime, heat_s: f64, cool_s: f64, outdoor: f64, sensors: usize, seasons: &SeasonMap) -> Self {
        let dc_heat = (heat_s / 3600.0).clamp(0.0, 1.0);
        let dc_cool = (cool_s / 3600.0).clamp(0.0, 1.0);
        PanelRow {
            house,
            timestamp,
            hour: timestamp.hour() as u8,
            month: timestamp.month() as u8,
            season: seasons.season(timestamp.month()),
            dc_cool,
            dc_heat,
            dc_combined: (dc_cool + dc_heat).min(1.0),
            outdoor,
            sensors: sensors.min(MAX_SENSOR_DUMMY as usize) as u8,
        }
    }
}

/// Builds panel rows from hourly records; absent hours and hours without an
/// outdoor temperature are dropped and counted.
pub fn build_panel(houses: &[(String, Vec<HourlyRecord>)], seasons: &SeasonMap) -> PanelBuild {
    let mut out = PanelBuild::default();
    for (i, (id, hours)) in houses.iter().enumerate() {
        out.panel.houses.push(id.clone());
        for h in hours {
            if h.is_absent() {
                out.dropped_absent_hours += 1;
                continue;
            }
            let Some(t_out) = h.outdoor_temp.mean else {
                out.dropped_missing_outdoor += 1;
                continue;
            };
            out.panel.rows.push(PanelRow::new(
                i as u32,
                h.hour,
                h.heat_runtime,
                h.cool_runtime,
                t_out,
                h.remote_sensors_present(),
                seasons,
            ));
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelSpec {
    /// One `s_j · T` slope per sensor count.
    Base,
    /// One slope per sensor count and season.
    Seasonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Cool,
    Heat,
    Combined,
}

impl Outcome {
    pub fn value(self, r: &PanelRow) -> f64 {
        match self {
            Outcome::Cool => r.dc_cool,
            Outcome::Heat => r.dc_heat,
            Outcome::Combined => r.dc_combined,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterBy {
    House,
    /// Every observation its own cluster (heteroskedasticity-robust).
    Observation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeOptions {
    /// Demeaning stops when a sweep changes no value by more than this.
    pub tolerance: f64,
    pub max_sweeps: usize,
    pub cluster: ClusterBy,
}

impl Default for FeOptions {
    fn default() -> Self {
        FeOptions { tolerance: 1e-10, max_sweeps: 10_000, cluster: ClusterBy::House }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    pub sensors: u8,
    pub season: Option<Season>,
}

impl ModelSpec {
    pub fn terms(self) -> Vec<Term> {
        match self {
            ModelSpec::Base => (0..SENSOR_LEVELS as u8)
                .map(|j| Term { name: format!("beta_{j}"), sensors: j, season: None })
                .collect(),
            ModelSpec::Seasonal => (0..SENSOR_LEVELS as u8)
                .flat_map(|j| {
                    Season::ALL.into_iter().map(move |k| Term {
                        name: format!("beta_{j}:{}", k.name()),
                        sensors: j,
                        season: Some(k),
                    })
                })
                .collect(),
        }
    }

    /// Column of the single non-zero regressor of a row.
    pub fn column(self, r: &PanelRow) -> usize {
        match self {
            ModelSpec::Base => r.sensors as usize,
            ModelSpec::Seasonal => r.sensors as usize * 4 + r.season.index(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub term: Term,
    pub estimate: f64,
    pub std_error: f64,
    pub t_value: f64,
    pub p_value: f64,
}

impl Coefficient {
    pub fn significance(&self) -> &'static str {
        significance_code(self.p_value)
    }
}

pub fn significance_code(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else if p < 0.1 {
        "."
    } else {
        ""
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedEffectDim {
    pub name: String,
    pub levels: usize,
    /// A single level absorbs nothing beyond a constant.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub observations: usize,
    pub clusters: usize,
    pub fixed_effects: Vec<FixedEffectDim>,
    pub demean_sweeps: usize,
    pub rank: usize,
    /// Ratio of extreme eigenvalues of the scaled normal matrix.
    pub condition_number: f64,
    /// Houses whose sensor count changes during the panel.
    pub houses_switching_sensors: usize,
    /// Set when no house switches sensor count: slopes are then compared only
    /// across houses.
    pub weak_identification: bool,
    pub r_squared_within: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub spec: ModelSpec,
    pub outcome: Outcome,
    pub coefficients: Vec<Coefficient>,
    /// Cluster-robust covariance, row-major K×K.
    pub covariance: Vec<f64>,
    pub diagnostics: Diagnostics,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

/// Compact 0-based level ids for a factor.
fn factor(values: impl Iterator<Item = u32>) -> (Vec<u32>, usize) {
    let raw: Vec<u32> = values.collect();
    let levels: BTreeSet<u32> = raw.iter().copied().collect();
    let lookup: Vec<u32> = levels.iter().copied().collect();
    let ids = raw.iter().map(|v| lookup.binary_search(v).unwrap() as u32).collect();
    (ids, levels.len())
}

/// Subtracts group means along every factor in turn until a full sweep moves
/// no value by more than `tol`. Returns the number of sweeps.
pub fn demean(v: &mut [f64], factors: &[(&[u32], usize)], tol: f64, max_sweeps: usize) -> usize {
    let mut sums: Vec<f64> = Vec::new();
    let mut counts: Vec<u32> = Vec::new();
    for sweep in 1..=max_sweeps {
        let mut change = 0.0_f64;
        for (ids, levels) in factors {
            sums.clear();
            sums.resize(*levels, 0.0);
            counts.clear();
            counts.resize(*levels, 0);
            for (x, g) in v.iter().zip(ids.iter()) {
                sums[*g as usize] += x;
                counts[*g as usize] += 1;
            }
            for (s, c) in sums.iter_mut().zip(&counts) {
                if *c > 0 {
                    *s /= *c as f64;
                }
                change = change.max(libm::fabs(*s));
            }
            for (x, g) in v.iter_mut().zip(ids.iter()) {
                *x -= sums[*g as usize];
            }
        }
        if change <= tol {
            return sweep;
        }
    }
    max_sweeps
}

pub fn fit_fe_model(panel: &Panel, spec: ModelSpec, outcome: Outcome, opts: &FeOptions) -> Result<RegressionResult> {
    let rows = &panel.rows;
    let n = rows.len();
    let terms = spec.terms();
    let k = terms.len();
    if n == 0 {
        return Err(Error::EmptyInput("panel"));
    }

    let (house_ids, n_houses) = factor(rows.iter().map(|r| r.house));
    let (hour_ids, n_hours) = factor(rows.iter().map(|r| r.hour as u32));
    let (month_ids, n_months) = factor(rows.iter().map(|r| r.month as u32));
    let clusters = match opts.cluster {
        ClusterBy::House => n_houses,
        ClusterBy::Observation => n,
    };
    if clusters < 2 {
        return Err(Error::DegenerateClusters(clusters));
    }
    if n <= k {
        return Err(Error::InsufficientData { needed: k + 1, got: n });
    }

    let mut columns = vec![vec![0.0; n]; k];
    let mut filled = vec![0usize; k];
    for (i, r) in rows.iter().enumerate() {
        let c = spec.column(r);
        columns[c][i] = r.outdoor;
        filled[c] += 1;
    }
    if let Some(c) = filled.iter().position(|f| *f == 0) {
        return Err(Error::EmptyCell(terms[c].name.clone()));
    }

    let factors: [(&[u32], usize); 3] = [(&house_ids, n_houses), (&hour_ids, n_hours), (&month_ids, n_months)];
    let mut y: Vec<f64> = rows.iter().map(|r| outcome.value(r)).collect();
    let mut sweeps = demean(&mut y, &factors, opts.tolerance, opts.max_sweeps);
    for col in columns.iter_mut() {
        sweeps = sweeps.max(demean(col, &factors, opts.tolerance, opts.max_sweeps));
    }

    let mut xtx = DMatrix::<f64>::zeros(k, k);
    let mut xty = DVector::<f64>::zeros(k);
    for a in 0..k {
        xty[a] = columns[a].iter().zip(&y).map(|(x, y)| x * y).sum();
        for b in a..k {
            let v: f64 = columns[a].iter().zip(&columns[b]).map(|(x, z)| x * z).sum();
            xtx[(a, b)] = v;
            xtx[(b, a)] = v;
        }
    }

    let (rank, condition_number) = rank_of(&xtx);
    if rank < k {
        return Err(Error::RankDeficient { rank, columns: k });
    }
    let inv = xtx.clone().cholesky().ok_or(Error::RankDeficient { rank, columns: k })?.inverse();
    let beta = &inv * &xty;

    let mut residuals = y.clone();
    for (a, col) in columns.iter().enumerate() {
        for (e, x) in residuals.iter_mut().zip(col) {
            *e -= beta[a] * x;
        }
    }

    let mut meat = DMatrix::<f64>::zeros(k, k);
    let mut add_score = |score: &DVector<f64>| meat.ger(1.0, score, score, 1.0);
    match opts.cluster {
        ClusterBy::House => {
            let mut scores = vec![DVector::<f64>::zeros(k); n_houses];
            for i in 0..n {
                let s = &mut scores[house_ids[i] as usize];
                for a in 0..k {
                    s[a] += columns[a][i] * residuals[i];
                }
            }
            scores.iter().for_each(&mut add_score);
        }
        ClusterBy::Observation => {
            let mut s = DVector::<f64>::zeros(k);
            for i in 0..n {
                for a in 0..k {
                    s[a] = columns[a][i] * residuals[i];
                }
                add_score(&s);
            }
        }
    }
    let g = clusters as f64;
    let scale = g / (g - 1.0) * (n as f64 - 1.0) / (n as f64 - k as f64);
    let cov = (&inv * meat * &inv) * scale;

    let dist = StudentsT::new(0.0, 1.0, g - 1.0).map_err(|_| Error::DegenerateClusters(clusters))?;
    let coefficients = terms
        .into_iter()
        .enumerate()
        .map(|(a, term)| {
            let se = libm::sqrt(cov[(a, a)].max(0.0));
            let t = beta[a] / se;
            Coefficient {
                term,
                estimate: beta[a],
                std_error: se,
                t_value: t,
                p_value: if t.is_finite() { 2.0 * (1.0 - dist.cdf(libm::fabs(t))) } else { 0.0 },
            }
        })
        .collect();

    let tss: f64 = y.iter().map(|v| v * v).sum();
    let rss: f64 = residuals.iter().map(|v| v * v).sum();
    let switching = {
        let mut first: Vec<Option<u8>> = vec![None; n_houses];
        let mut switched = vec![false; n_houses];
        for (r, h) in rows.iter().zip(&house_ids) {
            let slot = &mut first[*h as usize];
            match slot {
                Some(s) if *s != r.sensors => switched[*h as usize] = true,
                None => *slot = Some(r.sensors),
                _ => {}
            }
        }
        switched.iter().filter(|s| **s).count()
    };
    let dim = |name: &str, levels: usize| FixedEffectDim { name: name.into(), levels, degenerate: levels < 2 };

    Ok(RegressionResult {
        spec,
        outcome,
        coefficients,
        covariance: (0..k).flat_map(|a| (0..k).map(move |b| (a, b))).map(|(a, b)| cov[(a, b)]).collect(),
        diagnostics: Diagnostics {
            observations: n,
            clusters,
            fixed_effects: vec![dim("id", n_houses), dim("hour", n_hours), dim("month", n_months)],
            demean_sweeps: sweeps,
            rank,
            condition_number,
            houses_switching_sensors: switching,
            weak_identification: switching == 0,
            r_squared_within: if tss > 0.0 { 1.0 - rss / tss } else { 0.0 },
        },
        residuals,
    })
}

/// Numerical rank and condition number of a symmetric PSD matrix after
/// scaling it to unit diagonal.
fn rank_of(a: &DMatrix<f64>) -> (usize, f64) {
    let k = a.nrows();
    let d: Vec<f64> = (0..k).map(|i| libm::sqrt(a[(i, i)].max(0.0))).collect();
    let scaled = DMatrix::from_fn(k, k, |i, j| {
        if d[i] > 0.0 && d[j] > 0.0 {
            a[(i, j)] / (d[i] * d[j])
        } else {
            0.0
        }
    });
    let eig = scaled.symmetric_eigenvalues();
    let max = eig.iter().copied().fold(0.0_f64, f64::max);
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let rank = eig.iter().filter(|e| **e > 1e-10 * max).count();
    (rank, if min > 0.0 { max / min } else { f64::INFINITY })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Effect {
    pub term: String,
    pub estimate: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercentChange {
    pub from: String,
    pub to: String,
    /// `100 · (β_to − β_from) / β_from`; absent when the 95% interval of
    /// `β_from` covers zero.
    pub percent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectSummary {
    pub effects: Vec<Effect>,
    pub changes: Vec<PercentChange>,
}

pub const Z_95: f64 = 1.96;

/// Marginal effect of 1 °F per term with 95% intervals, and percent changes
/// between every pair of sensor counts (within each season for the seasonal
/// model).
pub fn effect_summary(result: &RegressionResult) -> EffectSummary {
    let cs = &result.coefficients;
    let effects = cs
        .iter()
        .map(|c| Effect {
            term: c.term.name.clone(),
            estimate: c.estimate,
            std_error: c.std_error,
            ci_low: c.estimate - Z_95 * c.std_error,
            ci_high: c.estimate + Z_95 * c.std_error,
        })
        .collect();
    let mut changes = Vec::new();
    for a in cs {
        for b in cs {
            if a.term.season != b.term.season || a.term.sensors >= b.term.sensors {
                continue;
            }
            changes.push(PercentChange {
                from: a.term.name.clone(),
                to: b.term.name.clone(),
                percent: percent_change(a.estimate, a.std_error, b.estimate),
            });
        }
    }
    EffectSummary { effects, changes }
}

pub fn percent_change(from: f64, from_se: f64, to: f64) -> Option<f64> {
    if libm::fabs(from) <= Z_95 * from_se || from == 0.0 {
        return None;
    }
    Some(100.0 * (to - from) / from)
}

impl EffectSummary {
    pub fn change(&self, from: &str, to: &str) -> Option<&PercentChange> {
        self.changes.iter().find(|c| c.from == from && c.to == to)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{Duration, NaiveDate};

    fn panel(houses: usize, hours: usize, f: impl Fn(usize, usize) -> (u8, f64, f64)) -> Panel {
        let start = NaiveDate::from_ymd_opt(2017, 1, 1).unwrap().and_hms_opt(0, 0, 0).unwrap();
        let seasons = SeasonMap::default();
        let mut p = Panel::default();
        for h in 0..houses {
            p.houses.push(format!("h{h}"));
            for t in 0..hours {
                let ts = start + Duration::hours((t * 24 * 7) as i64 % 8760 + t as i64 % 24);
                let (s, temp, dc) = f(h, t);
                let mut row = PanelRow::new(h as u32, ts, 0.0, 0.0, temp, s as usize, &seasons);
                row.dc_combined = dc;
                p.rows.push(row);
            }
        }
        p
    }

    const BETA: [f64; 6] = [0.010, 0.011, 0.012, 0.013, 0.014, 0.015];

    fn temp(h: usize, t: usize) -> f64 {
        50.0 + 20.0 * libm::sin(t as f64 * 0.37 + h as f64) + (t % 7) as f64
    }

    #[test]
    fn noise_free_recovery_with_fixed_effects() {
        let p = panel(6, 200, |h, t| {
            let s = ((h + t / 40) % 6) as u8;
            let x = temp(h, t);
            (s, x, BETA[s as usize] * x + 0.1 * h as f64 + 0.01 * (t % 24) as f64)
        });
        let r = fit_fe_model(&p, ModelSpec::Base, Outcome::Combined, &FeOptions { tolerance: 1e-13, ..Default::default() }).unwrap();
        for (c, b) in r.coefficients.iter().zip(BETA) {
            assert!((c.estimate - b).abs() < 1e-9, "{} vs {b}", c.estimate);
        }
        assert!(!r.diagnostics.weak_identification);
    }

    #[test]
    fn house_constant_is_absorbed() {
        let base = |h: usize, t: usize| {
            let s = ((h * 7 + t / 13) % 6) as u8;
            let x = temp(h, t);
            (s, x, BETA[s as usize] * x + 0.02 * libm::cos(t as f64 * 1.3 + h as f64))
        };
        let opts = FeOptions { tolerance: 1e-13, ..Default::default() };
        let a = fit_fe_model(&panel(4, 150, base), ModelSpec::Base, Outcome::Combined, &opts).unwrap();
        let b = fit_fe_model(
            &panel(4, 150, |h, t| {
                let (s, x, y) = base(h, t);
                (s, x, y + if h == 2 { 0.3 } else { 0.0 })
            }),
            ModelSpec::Base,
            Outcome::Combined,
            &opts,
        )
        .unwrap();
        for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
            assert!((x.estimate - y.estimate).abs() < 1e-9);
        }
    }

    #[test]
    fn single_house_is_degenerate() {
        let p = panel(1, 100, |_, t| ((t % 6) as u8, temp(0, t), 0.5));
        assert_eq!(
            fit_fe_model(&p, ModelSpec::Base, Outcome::Combined, &FeOptions::default()).unwrap_err(),
            Error::DegenerateClusters(1)
        );
    }

    #[test]
    fn empty_cell_is_reported() {
        let p = panel(3, 100, |h, t| ((t % 5) as u8, temp(h, t), 0.5));
        assert_eq!(
            fit_fe_model(&p, ModelSpec::Base, Outcome::Combined, &FeOptions::default()).unwrap_err(),
            Error::EmptyCell("beta_5".into())
        );
    }

    #[test]
    fn percent_changes() {
        assert!((percent_change(0.0128, 0.000262, 0.0151).unwrap() - 17.96875).abs() < 1e-9);
        assert_eq!(percent_change(0.013, 0.0001, 0.013), Some(0.0));
        assert_eq!(percent_change(0.001, 0.001, 0.002), None);
    }

    #[test]
    fn season_map() {
        let m = SeasonMap::default();
        assert_eq!(m.season(1), Season::Winter);
        assert_eq!(m.season(3), Season::Spring);
        assert_eq!(m.season(8), Season::Summer);
        assert_eq!(m.season(11), Season::Autumn);
        assert_eq!(m.season(12), Season::Winter);
    }

    #[test]
    fn duty_cycle_rules() {
        let ts = NaiveDate::from_ymd_opt(2017, 7, 1).unwrap().and_hms_opt(13, 0, 0).unwrap();
        let r = PanelRow::new(0, ts, 900.0, 900.0, 80.0, 0, &SeasonMap::default());
        assert_eq!(r.dc_combined, 0.5);
        let r = PanelRow::new(0, ts, 0.0, 1800.0, 80.0, 7, &SeasonMap::default());
        assert_eq!(r.dc_cool, 0.5);
        assert_eq!(r.sensors, 5);
        assert_eq!(r.hour, 13);
    }
}
