//! Slow, direct reference implementations. Each one recomputes a quantity
//! from its definition without sharing code with the estimator under test.

use std::collections::BTreeMap;

use chrono::NaiveDateTime;
use nalgebra::{DMatrix, DVector};
use thermokit_core::ffp::{FfpConstraints, FfpMode, FfpSegment};
use thermokit_core::ingest::HouseTrace;
use thermokit_core::panel::{Panel, PanelRow};

/// Interaction layout of the regression: base has one column per sensor
/// count, seasonal one per (sensor count, season) with season varying fastest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Base,
    Seasonal,
}

impl Layout {
    pub fn width(self) -> usize {
        match self {
            Layout::Base => 6,
            Layout::Seasonal => 24,
        }
    }

    fn slot(self, r: &PanelRow) -> usize {
        let season = match r.month {
            3..=5 => 0,
            6..=8 => 1,
            9..=11 => 2,
            _ => 3,
        };
        match self {
            Layout::Base => r.sensors as usize,
            Layout::Seasonal => r.sensors as usize * 4 + season,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LsdvFit {
    pub beta: Vec<f64>,
    /// Cluster-by-house sandwich with the G/(G-1)·(N-1)/(N-K) factor.
    pub cluster_se: Vec<f64>,
    /// HC1: Σ e_i² x_i x_iᵀ sandwich scaled by N/(N-K).
    pub hc1_se: Vec<f64>,
    pub residuals: Vec<f64>,
}

fn levels<T: Ord + Copy>(xs: impl Iterator<Item = T>) -> Vec<T> {
    let mut v: Vec<T> = xs.collect();
    v.sort();
    v.dedup();
    v
}

/// Explicit dummy-variable least squares: intercept, interaction columns, and
/// one dummy per non-reference level of house, hour and month.
pub fn lsdv(panel: &Panel, layout: Layout, outcome: impl Fn(&PanelRow) -> f64) -> LsdvFit {
    let rows = &panel.rows;
    let n = rows.len();
    let k = layout.width();
    let houses = levels(rows.iter().map(|r| r.house));
    let hours = levels(rows.iter().map(|r| r.hour));
    let months = levels(rows.iter().map(|r| r.month));
    let p = 1 + k + houses.len() - 1 + hours.len() - 1 + months.len() - 1;

    let mut x = DMatrix::<f64>::zeros(n, p);
    let mut y = DVector::<f64>::zeros(n);
    for (i, r) in rows.iter().enumerate() {
        y[i] = outcome(r);
        x[(i, 0)] = 1.0;
        x[(i, 1 + layout.slot(r))] = r.outdoor;
        let mut col = 1 + k;
        for (lv, v) in [
            (houses.iter().map(|h| *h as u64).collect::<Vec<_>>(), r.house as u64),
            (hours.iter().map(|h| *h as u64).collect(), r.hour as u64),
            (months.iter().map(|h| *h as u64).collect(), r.month as u64),
        ] {
            if let Some(pos) = lv.iter().skip(1).position(|l| *l == v) {
                x[(i, col + pos)] = 1.0;
            }
            col += lv.len() - 1;
        }
    }

    let xtx = x.transpose() * &x;
    let bread = xtx.clone().try_inverse().expect("LSDV design is singular");
    let coef = &bread * x.transpose() * &y;
    let e = &y - &x * &coef;

    let sandwich = |groups: &[usize], scale: f64| -> Vec<f64> {
        let g_count = groups.iter().copied().max().map_or(0, |m| m + 1);
        let mut scores = vec![DVector::<f64>::zeros(p); g_count];
        for i in 0..n {
            scores[groups[i]] += x.row(i).transpose() * e[i];
        }
        let mut meat = DMatrix::<f64>::zeros(p, p);
        for s in &scores {
            meat += s * s.transpose();
        }
        let v = &bread * meat * &bread * scale;
        (0..k).map(|j| v[(1 + j, 1 + j)].sqrt()).collect()
    };

    let house_groups: Vec<usize> = rows.iter().map(|r| houses.binary_search(&r.house).unwrap()).collect();
    let g = houses.len() as f64;
    let (nf, kf) = (n as f64, k as f64);
    let cluster_se = sandwich(&house_groups, g / (g - 1.0) * (nf - 1.0) / (nf - kf));

    let mut meat = DMatrix::<f64>::zeros(p, p);
    for i in 0..n {
        let xi = x.row(i).transpose();
        meat += &xi * xi.transpose() * (e[i] * e[i]);
    }
    let v = &bread * meat * &bread * (nf / (nf - kf));
    let hc1_se = (0..k).map(|j| v[(1 + j, 1 + j)].sqrt()).collect();

    LsdvFit {
        beta: (0..k).map(|j| coef[1 + j]).collect(),
        cluster_se,
        hc1_se,
        residuals: e.iter().copied().collect(),
    }
}

/// Checks a segment against the raw trace: every record between its first
/// and last timestamp must be inside one daily window, have zero runtime, a
/// sensor reading on the correct side of outdoor, and no spacing wider than
/// the gap limit; the run must meet the duration and amplitude rules.
pub fn rescan_segment(trace: &HouseTrace, seg: &FfpSegment, c: &FfpConstraints) -> Result<(), String> {
    let recs: Vec<_> = trace.records.iter().filter(|r| r.timestamp >= seg.start && r.timestamp <= seg.end).collect();
    if recs.len() != seg.samples.len() {
        return Err(format!("{} records in span, {} samples", recs.len(), seg.samples.len()));
    }
    let (h0, h1) = seg.mode.window_hours();
    let window_start = |t: NaiveDateTime| {
        let d = if h0 > h1 && t.time() < chrono::NaiveTime::from_hms_opt(h1, 0, 0).unwrap() {
            t.date().pred_opt().unwrap()
        } else {
            t.date()
        };
        d.and_hms_opt(h0, 0, 0).unwrap()
    };
    let span = |h0: u32, h1: u32| if h1 > h0 { h1 - h0 } else { h1 + 24 - h0 };
    let opening = window_start(seg.start);
    let closing = opening + chrono::Duration::hours(span(h0, h1) as i64);
    let gap = chrono::Duration::seconds(trace.interval_seconds as i64 * c.max_gap_intervals);
    for (i, r) in recs.iter().enumerate() {
        if r.timestamp < opening || r.timestamp >= closing {
            return Err(format!("{} outside window starting {opening}", r.timestamp));
        }
        let heat: f64 = r.heat_runtimes.iter().map(|x| x.unwrap_or(f64::NAN)).sum();
        let cool: f64 = r.cool_runtimes.iter().map(|x| x.unwrap_or(f64::NAN)).sum();
        if heat != 0.0 || cool != 0.0 {
            return Err(format!("runtime at {}", r.timestamp));
        }
        let v = if seg.sensor == 0 { r.thermostat_temp } else { r.sensor_temps[seg.sensor - 1] };
        let (Some(v), Some(o)) = (v, r.outdoor_temp) else {
            return Err(format!("missing reading at {}", r.timestamp));
        };
        if v != seg.samples[i].1 {
            return Err(format!("sample mismatch at {}", r.timestamp));
        }
        let ok = if seg.mode == FfpMode::HeatingNight { o < v } else { o > v };
        if !ok {
            return Err(format!("outdoor on wrong side at {}", r.timestamp));
        }
        if i > 0 && r.timestamp - recs[i - 1].timestamp > gap {
            return Err(format!("gap before {}", r.timestamp));
        }
    }
    if (seg.end - seg.start).num_minutes() < c.min_duration_minutes {
        return Err("too short".into());
    }
    let first = seg.samples[0].1;
    let last = seg.samples[seg.samples.len() - 1].1;
    let change = match seg.mode {
        FfpMode::HeatingNight => first - last,
        FfpMode::CoolingDay => last - first,
        FfpMode::DrAfternoon => f64::INFINITY,
    };
    if change < c.min_change {
        return Err(format!("net change {change}"));
    }
    Ok(())
}

/// Flags values strictly beyond one population standard deviation from the
/// mean of the present values; σ comes from pairwise differences. Fewer than
/// `min_rooms` present values flag nothing.
pub fn threshold_flags(values: &[Option<f64>], above: bool, min_rooms: usize) -> Vec<bool> {
    let xs: Vec<f64> = values.iter().flatten().copied().collect();
    let n = xs.len();
    if n < min_rooms {
        return vec![false; values.len()];
    }
    let mu = xs.iter().sum::<f64>() / n as f64;
    let mut pair = 0.0;
    for a in &xs {
        for b in &xs {
            pair += (a - b) * (a - b);
        }
    }
    let sigma = (pair / (2.0 * (n * n) as f64)).sqrt();
    values
        .iter()
        .map(|v| match v {
            Some(v) if sigma > 0.0 => {
                if above {
                    *v > mu + sigma
                } else {
                    *v < mu - sigma
                }
            }
            _ => false,
        })
        .collect()
}

/// Counts per bin by scanning candidate intervals `[(k-0.5)w, (k+0.5)w)`.
pub fn bin_counts(samples: &[f64], w: f64) -> BTreeMap<i64, usize> {
    let lo = samples.iter().fold(f64::INFINITY, |a, b| a.min(*b));
    let hi = samples.iter().fold(f64::NEG_INFINITY, |a, b| a.max(*b));
    let mut out = BTreeMap::new();
    let (k0, k1) = ((lo / w).floor() as i64 - 1, (hi / w).ceil() as i64 + 1);
    for k in k0..=k1 {
        let (a, b) = ((k as f64 - 0.5) * w, (k as f64 + 0.5) * w);
        let c = samples.iter().filter(|d| **d >= a && **d < b).count();
        if c > 0 {
            out.insert(k, c);
        }
    }
    out
}

/// COI straight from counts: bins with `|k·w| <= c` over bins with `|k| <= m_bins`.
pub fn coi_from_counts(counts: &BTreeMap<i64, usize>, w: f64, c: f64, m_bins: i64) -> f64 {
    let inside = |k: i64| k.abs() <= m_bins;
    let den: usize = counts.iter().filter(|(k, _)| inside(**k)).map(|(_, n)| n).sum();
    let num: usize = counts
        .iter()
        .filter(|(k, _)| inside(**k) && (**k as f64 * w).abs() <= c + 1e-9)
        .map(|(_, n)| n)
        .sum();
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Mean of a residual vector within every level of a grouping.
pub fn group_means(residuals: &[f64], groups: &[u32]) -> BTreeMap<u32, f64> {
    let mut acc: BTreeMap<u32, (f64, usize)> = BTreeMap::new();
    for (e, g) in residuals.iter().zip(groups) {
        let a = acc.entry(*g).or_default();
        a.0 += e;
        a.1 += 1;
    }
    acc.into_iter().map(|(g, (s, n))| (g, s / n as f64)).collect()
}

/// Randomized 5-minute trace with Markov HVAC switching, occasional dropped
/// records and missing readings, and temperatures drifting toward outdoor
/// when the equipment is idle.
pub fn random_trace(seed: u64, days: usize, remote_sensors: usize) -> HouseTrace {
    use rand::{Rng, SeedableRng};
    use thermokit_core::ingest::TraceRecord;

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let start = chrono::NaiveDate::from_ymd_opt(2018, 1 + rng.random_range(0..12), 1)
        .unwrap()
        .and_hms_opt(rng.random_range(0..24), 0, 0)
        .unwrap();
    let mut temps = vec![70.0; remote_sensors + 1];
    let mut outdoor: f64 = rng.random_range(10.0..100.0);
    let (mut heat, mut cool) = (false, false);
    let mut records = Vec::new();
    for k in 0..days * 288 {
        if k % 36 == 0 {
            outdoor = (outdoor + rng.random_range(-8.0..8.0)).clamp(-10.0, 110.0);
        }
        if rng.random::<f64>() < 0.05 {
            heat = !heat && outdoor < 60.0;
            cool = !cool && !heat && outdoor > 70.0;
        }
        for t in temps.iter_mut() {
            let target = if heat { 90.0 } else if cool { 55.0 } else { outdoor };
            *t += (target - *t) * rng.random_range(0.0..0.08) + rng.random_range(-0.3..0.3);
        }
        if rng.random::<f64>() < 0.03 {
            continue;
        }
        let mut r = TraceRecord::empty(start + chrono::Duration::minutes(5 * k as i64));
        let maybe = |v: f64, rng: &mut rand_chacha::ChaCha8Rng| (rng.random::<f64>() > 0.01).then_some(v);
        r.thermostat_temp = maybe(temps[0], &mut rng);
        r.control_temp = r.thermostat_temp;
        r.outdoor_temp = maybe(outdoor, &mut rng);
        let run = |on: bool, rng: &mut rand_chacha::ChaCha8Rng| if on { rng.random_range(1.0..=300.0_f64).floor() } else { 0.0 };
        r.heat_runtimes = vec![Some(run(heat, &mut rng))];
        r.cool_runtimes = vec![Some(run(cool, &mut rng))];
        r.sensor_temps = temps[1..].iter().map(|v| maybe(*v, &mut rng)).collect();
        r.motion_flags = vec![None; remote_sensors];
        records.push(r);
    }
    HouseTrace::new(format!("rand{seed}"), records, 300).expect("generated trace is valid")
}
