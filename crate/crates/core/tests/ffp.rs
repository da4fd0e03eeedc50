use std::collections::BTreeMap;

use proptest::prelude::*;
use thermokit_core::ffp::{extract_ffps, FfpConstraints, FfpMode, FfpSegment};
use thermokit_core::ingest::HouseTrace;
use thermokit_core::synth::{gen_house, SynthConfig};
use thermokit_oracles::{random_trace, rescan_segment};

fn all_segments(trace: &HouseTrace) -> Vec<FfpSegment> {
    let mut out = Vec::new();
    for sensor in 0..trace.num_sensors() {
        for mode in FfpMode::ALL {
            out.extend(extract_ffps(trace, sensor, mode));
        }
    }
    out
}

fn sub_trace(trace: &HouseTrace, from: usize, to: usize) -> HouseTrace {
    HouseTrace::new(trace.house_id.clone(), trace.records[from..to].to_vec(), trace.interval_seconds).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn segments_pass_rescan_and_never_overlap(seed in any::<u64>()) {
        let trace = random_trace(seed, 4, 2);
        let segs = all_segments(&trace);
        let mut by_key: BTreeMap<(usize, FfpMode), Vec<&FfpSegment>> = BTreeMap::new();
        for s in &segs {
            if let Err(e) = rescan_segment(&trace, s, &FfpConstraints::default()) {
                prop_assert!(false, "{}", e);
            }
            by_key.entry((s.sensor, s.mode)).or_default().push(s);
        }
        for list in by_key.values() {
            for w in list.windows(2) {
                prop_assert!(w[0].end < w[1].start);
            }
        }
    }

    #[test]
    fn contained_segments_survive_truncation(seed in any::<u64>(), a in 0.0f64..0.5, b in 0.5f64..1.0) {
        let trace = random_trace(seed, 4, 1);
        let n = trace.records.len();
        let (from, to) = ((a * n as f64) as usize, ((b * n as f64) as usize).max((a * n as f64) as usize + 1));
        let sub = sub_trace(&trace, from, to);
        let (lo, hi) = (sub.records[0].timestamp, sub.records[sub.records.len() - 1].timestamp);
        let inner = all_segments(&sub);
        for s in all_segments(&trace) {
            let strictly_inside = trace.records.iter().any(|r| r.timestamp < s.start && r.timestamp >= lo)
                && trace.records.iter().any(|r| r.timestamp > s.end && r.timestamp <= hi);
            if strictly_inside {
                prop_assert!(inner.contains(&s), "segment at {} lost", s.start);
            }
        }
    }
}

#[test]
fn shorter_window_never_adds_hours() {
    let mut cfg = SynthConfig::default();
    cfg.houses.days = 150;
    let house = gen_house(&cfg, 1).unwrap();
    let hours = |t: &HouseTrace| {
        extract_ffps(t, 0, FfpMode::HeatingNight).iter().map(|s| s.hours()).sum::<f64>()
    };
    let full = hours(&house.trace);
    let quarter = sub_trace(&house.trace, 10 * 288, 100 * 288);
    assert!(full > 0.0);
    assert!(hours(&quarter) <= full);
}
