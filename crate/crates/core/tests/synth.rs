use proptest::prelude::*;
use thermokit_core::ffp::{extract_ffps, FfpMode};
use thermokit_core::panel::MAX_SENSOR_DUMMY;
use thermokit_core::stats::median;
use thermokit_core::synth::{gen_ffp_segment, gen_house, gen_panel, FeMagnitudes, RoomTruth, SynthConfig};
use thermokit_core::thermal::{fit_rc_heating, fit_rc_rq_cooling, fit_rk_balance, nightly_aggregate};

fn short_year() -> SynthConfig {
    let mut cfg = SynthConfig::default();
    cfg.houses.days = 120;
    cfg
}

#[test]
fn house_traces_close_the_loop() {
    let cfg = short_year();
    for i in 0..2 {
        let house = gen_house(&cfg, i).unwrap();
        let t = &house.trace;
        for (s, room) in house.truth.rooms.iter().enumerate() {
            let heat: Vec<f64> =
                extract_ffps(t, s, FfpMode::HeatingNight).iter().map(|g| fit_rc_heating(g).unwrap().rc_hours).collect();
            assert!(!heat.is_empty());
            for rc in heat {
                assert!((rc - room.rc_hours).abs() < 1e-6 * room.rc_hours);
            }
            for g in extract_ffps(t, s, FfpMode::CoolingDay) {
                let f = fit_rc_rq_cooling(&g).unwrap();
                assert!((f.rc_hours - room.rc_hours).abs() < 1e-6 * room.rc_hours);
                assert!((f.rq.unwrap() - room.rq).abs() < 1e-6);
            }
        }
        let rk = fit_rk_balance(&house.truth.house_id, 0, &nightly_aggregate(t, 0)).unwrap();
        let truth = house.truth.rooms[0].rk;
        assert!((rk.rk - truth).abs() < 0.1 * truth, "thermostat rk {} vs {truth}", rk.rk);
    }
}

#[test]
fn noisy_balance_nights_center_on_truth() {
    let ests: Vec<f64> = (0..100)
        .map(|seed| {
            let cfg = SynthConfig { seed, duty_noise_std: 0.05, ..Default::default() };
            fit_rk_balance("h", 0, &thermokit_core::synth::gen_balance_nights(&cfg, 80.0)).unwrap().rk
        })
        .collect();
    assert!((median(&ests).unwrap() - 80.0).abs() < 0.05 * 80.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn identical_configs_give_identical_output(seed in any::<u64>(), noise in 0.0f64..0.5) {
        let mut cfg = SynthConfig { seed, noise_std: noise, duty_noise_std: noise / 10.0, ..Default::default() };
        cfg.houses.days = 3;
        cfg.panel.houses = 3;
        cfg.panel.hours = 100;
        let room = RoomTruth { room: "r".into(), rc_hours: 12.0, rq: 2.0, rk: 90.0 };
        let fe = FeMagnitudes { house: 0.05, hour: 0.05, month: 0.05 };
        let beta = [0.01; 6];
        prop_assert_eq!(
            format!("{:?}", gen_ffp_segment(&cfg, &room, FfpMode::CoolingDay).unwrap()),
            format!("{:?}", gen_ffp_segment(&cfg, &room, FfpMode::CoolingDay).unwrap())
        );
        prop_assert_eq!(
            format!("{:?}", gen_panel(&cfg, &beta, &fe).unwrap()),
            format!("{:?}", gen_panel(&cfg, &beta, &fe).unwrap())
        );
        prop_assert_eq!(format!("{:?}", gen_house(&cfg, 0).unwrap()), format!("{:?}", gen_house(&cfg, 0).unwrap()));
    }

    #[test]
    fn generated_segments_satisfy_extractor_rules(rc in 1.0f64..60.0, seed in any::<u64>()) {
        let cfg = SynthConfig { seed, ..Default::default() };
        let seg = gen_ffp_segment(&cfg, &RoomTruth { room: "r".into(), rc_hours: rc, rq: 0.0, rk: 90.0 }, FfpMode::HeatingNight).unwrap();
        prop_assert!(seg.hours() >= 1.0);
        prop_assert!(seg.samples[0].1 - seg.samples[seg.samples.len() - 1].1 >= 2.0);
        prop_assert!(seg.samples.iter().all(|(_, v)| *v > seg.mean_outdoor));
    }

    #[test]
    fn panel_rows_respect_invariants(seed in any::<u64>(), scale in 0.0f64..3.0) {
        let mut cfg = SynthConfig { seed, duty_noise_std: 0.05 * scale, ..Default::default() };
        cfg.panel.houses = 4;
        cfg.panel.hours = 300;
        let p = gen_panel(&cfg, &[0.012; 6], &FeMagnitudes { house: 0.1 * scale, hour: 0.05, month: 0.05 }).unwrap();
        let clamped = p.panel.rows.iter().filter(|r| r.dc_combined == 0.0 || r.dc_combined == 1.0).count();
        prop_assert!(p.clamp_rate <= clamped as f64 / p.panel.rows.len() as f64 + 1e-12);
        prop_assert_eq!(p.warning.is_some(), p.clamp_rate > 0.2);
        for r in &p.panel.rows {
            prop_assert!((0.0..=1.0).contains(&r.dc_combined));
            prop_assert!(r.sensors <= MAX_SENSOR_DUMMY);
        }
    }
}
