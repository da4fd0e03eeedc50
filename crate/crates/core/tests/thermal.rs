use chrono::{Duration, NaiveDate};
use proptest::prelude::*;
use thermokit_core::ffp::{FfpMode, FfpSegment};
use thermokit_core::ingest::HvacMode;
use thermokit_core::synth::{gen_balance_nights, gen_ffp_segment, RoomTruth, SynthConfig};
use thermokit_core::thermal::{
    filter_fits, fit_rc_heating, fit_rc_rq_cooling, fit_rk_balance, FilterOptions, Grouping, NightAggregate, RcFit,
};

fn room(rc: f64, rq: f64) -> RoomTruth {
    RoomTruth { room: "r".into(), rc_hours: rc, rq, rk: 100.0 }
}

#[test]
fn noise_free_grid_is_recovered() {
    let cfg = SynthConfig::default();
    for rc in [2.0, 10.0, 50.0, 150.0] {
        for rq in [0.0, 2.0, 5.0] {
            let heat = fit_rc_heating(&gen_ffp_segment(&cfg, &room(rc, rq), FfpMode::HeatingNight).unwrap()).unwrap();
            assert!((heat.rc_hours - rc).abs() / rc < 1e-6, "heating rc {rc}: {}", heat.rc_hours);
            let cool = fit_rc_rq_cooling(&gen_ffp_segment(&cfg, &room(rc, rq), FfpMode::CoolingDay).unwrap()).unwrap();
            assert!((cool.rc_hours - rc).abs() / rc < 1e-6, "cooling rc {rc} rq {rq}: {}", cool.rc_hours);
            assert!((cool.rq.unwrap() - rq).abs() < 1e-6, "cooling rq {rq}: {:?}", cool.rq);
        }
    }
}

#[test]
fn very_slow_decay_fails_amplitude_rule() {
    let seg = gen_ffp_segment(&SynthConfig::default(), &room(500.0, 0.0), FfpMode::HeatingNight).unwrap();
    assert!(seg.samples[0].1 - seg.samples[seg.samples.len() - 1].1 < 2.0);
}

fn shifted(seg: &FfpSegment, days: i64) -> FfpSegment {
    let points: Vec<_> = seg
        .samples
        .iter()
        .zip(&seg.outdoor)
        .map(|((t, v), o)| (seg.start + Duration::days(days) + Duration::seconds((t * 3600.0).round() as i64), *v, *o))
        .collect();
    FfpSegment::from_samples(&seg.house_id, seg.sensor, seg.mode, &points).unwrap()
}

fn nights(rows: &[(f64, f64)], offset: f64) -> Vec<NightAggregate> {
    rows.iter()
        .enumerate()
        .map(|(i, (x, f))| NightAggregate {
            date: NaiveDate::from_ymd_opt(2017, 1, 1).unwrap() + Duration::days(i as i64),
            duty_cycle: *f,
            mean_indoor: 70.0 + offset,
            mean_outdoor: 70.0 - x + offset,
        })
        .collect()
}

fn fit(rc: f64, rq: Option<f64>, house: &str) -> RcFit {
    RcFit {
        house_id: house.into(),
        sensor: 0,
        season: if rq.is_some() { HvacMode::Cooling } else { HvacMode::Heating },
        start: NaiveDate::from_ymd_opt(2017, 1, 1).unwrap().and_hms_opt(22, 0, 0).unwrap(),
        rc_hours: rc,
        rq,
        rmse: 0.1,
        segments: 1,
        iterations: 1,
    }
}

proptest! {
    #[test]
    fn time_origin_does_not_matter(seed in any::<u64>(), rc in 2.0f64..60.0, days in -400i64..400) {
        let cfg = SynthConfig { seed, noise_std: 0.05, ..Default::default() };
        let seg = gen_ffp_segment(&cfg, &room(rc, 0.0), FfpMode::HeatingNight).unwrap();
        let a = fit_rc_heating(&seg).unwrap();
        let b = fit_rc_heating(&shifted(&seg, days)).unwrap();
        prop_assert_eq!(a.rc_hours, b.rc_hours);
    }

    #[test]
    fn balance_fit_ignores_temperature_offset(
        rows in prop::collection::vec((5.0f64..60.0, 0.0f64..1.0), 10..40),
        offset in -40.0f64..40.0,
    ) {
        let a = fit_rk_balance("h", 0, &nights(&rows, 0.0));
        let b = fit_rk_balance("h", 0, &nights(&rows, offset));
        match (a, b) {
            (Ok(a), Ok(b)) => {
                prop_assert!((a.rk - b.rk).abs() <= 1e-9 * a.rk.abs());
                prop_assert!((a.r_value - b.r_value).abs() < 1e-9);
            }
            (a, b) => prop_assert_eq!(a.is_ok(), b.is_ok()),
        }
    }

    #[test]
    fn balance_slope_matches_closed_form(rows in prop::collection::vec((5.0f64..60.0, 0.0f64..1.0), 10..40)) {
        let n = rows.len() as f64;
        let xm = rows.iter().map(|r| r.0).sum::<f64>() / n;
        let ym = rows.iter().map(|r| r.1).sum::<f64>() / n;
        let sxy: f64 = rows.iter().map(|(x, y)| (x - xm) * (y - ym)).sum();
        let sxx: f64 = rows.iter().map(|(x, _)| (x - xm) * (x - xm)).sum();
        let slope = sxy / sxx;
        match fit_rk_balance("h", 0, &nights(&rows, 0.0)) {
            Ok(f) => prop_assert!((1.0 / f.rk - slope).abs() <= 1e-12 * slope.abs().max(1e-3)),
            Err(_) => prop_assert!(slope <= 0.0),
        }
    }

    #[test]
    fn noise_free_balance_nights_are_exact(rk in 26.0f64..204.0) {
        let mut cfg = SynthConfig::default();
        cfg.nights.diff_low = 5.0;
        cfg.nights.diff_high = 0.9 * rk;
        let f = fit_rk_balance("h", 0, &gen_balance_nights(&cfg, rk)).unwrap();
        prop_assert!((f.rk - rk).abs() < 1e-9 * rk);
        prop_assert!((f.r_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn repeated_filter_is_idempotent(
        values in prop::collection::vec((0.5f64..200.0, prop::option::of(-5.0f64..5.0), 0usize..3), 0..40),
        grouping in prop::sample::select(vec![Grouping::Population, Grouping::House]),
    ) {
        let fits: Vec<RcFit> = values.iter().map(|(rc, rq, h)| fit(*rc, *rq, &format!("h{h}"))).collect();
        let opts = FilterOptions { grouping, repeat_sigma: true, ..Default::default() };
        let once = filter_fits(fits.clone(), &opts);
        let twice = filter_fits(once.kept.clone(), &opts);
        prop_assert_eq!(&twice.kept, &once.kept);
        prop_assert!(twice.removed.is_empty());
        prop_assert_eq!(once.kept.len() + once.removed.len(), fits.len());
    }

    #[test]
    fn single_pass_filter_partitions_input(values in prop::collection::vec(0.5f64..200.0, 0..40)) {
        let fits: Vec<RcFit> = values.iter().map(|rc| fit(*rc, None, "h")).collect();
        let out = filter_fits(fits.clone(), &FilterOptions::default());
        prop_assert_eq!(out.kept.len() + out.removed.len(), fits.len());
        for k in &out.kept {
            prop_assert!(fits.contains(k));
        }
    }
}
