use proptest::prelude::*;
use thermokit_core::comfort::{
    cci, cdrd, coi, rf_histogram, room_deviations, BoundPolicy, Cdrd, DeviationReference, RoomSeries,
};
use thermokit_oracles::{bin_counts, coi_from_counts};

fn widths() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.5, 1.0, 2.0])
}

fn samples() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-15.0f64..15.0, 1..200)
}

fn minutes(c: &Cdrd) -> f64 {
    match c {
        Cdrd::Reached { minutes } => *minutes,
        Cdrd::Censored { .. } => f64::INFINITY,
    }
}

#[test]
fn uniform_twenty_one_bins() {
    let s: Vec<f64> = (-10..=10).map(f64::from).collect();
    let h = rf_histogram(&s, 1.0, BoundPolicy::DatasetMax).unwrap();
    assert!((coi(&h, 2.0) - 5.0 / 21.0).abs() < 1e-12);
}

proptest! {
    #[test]
    fn coi_is_a_share_and_monotone(s in samples(), w in widths(), c1 in 0.0f64..12.0, c2 in 0.0f64..12.0) {
        let h = rf_histogram(&s, w, BoundPolicy::DatasetMax).unwrap();
        let (lo, hi) = if c1 <= c2 { (c1, c2) } else { (c2, c1) };
        let (a, b) = (coi(&h, lo), coi(&h, hi));
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(a <= b);
        prop_assert_eq!(coi(&h, h.bound_index() as f64 * w), 1.0);
    }

    #[test]
    fn histogram_matches_direct_count(s in samples(), w in widths(), c in 0.0f64..8.0, m in 0.0f64..20.0) {
        let counts = bin_counts(&s, w);
        let h = rf_histogram(&s, w, BoundPolicy::Fixed(m)).unwrap();
        prop_assert_eq!(h.bins.len(), counts.len());
        for (k, n) in &counts {
            prop_assert!((h.bins[k] - *n as f64 / s.len() as f64).abs() < 1e-15);
        }
        let expected = coi_from_counts(&counts, w, c, (m / w + 0.5).floor() as i64);
        prop_assert!((coi(&h, c) - expected).abs() < 1e-12);
    }

    #[test]
    fn duplication_leaves_indices_unchanged(s in samples(), w in widths(), c in 0.0f64..8.0) {
        let doubled: Vec<f64> = s.iter().chain(s.iter()).copied().collect();
        let a = rf_histogram(&s, w, BoundPolicy::DatasetMax).unwrap();
        let b = rf_histogram(&doubled, w, BoundPolicy::DatasetMax).unwrap();
        prop_assert!((coi(&a, c) - coi(&b, c)).abs() < 1e-12);
        prop_assert!((cci(&a) - cci(&b)).abs() < 1e-12);
    }

    #[test]
    fn cci_complements_mass_above_zero(s in samples(), w in widths()) {
        let h = rf_histogram(&s, w, BoundPolicy::DatasetMax).unwrap();
        prop_assert!((cci(&h) + h.mass_above_zero() - 1.0).abs() < 1e-9);
        prop_assert!((h.bins.values().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hotter_traces_reach_threshold_no_later(
        base in prop::collection::vec(-1.0f64..1.5, 2..60),
        extra in prop::collection::vec(0.0f64..1.0, 60),
        threshold in 0.5f64..4.0,
    ) {
        let mut level = 70.0;
        let cool: Vec<(f64, Option<f64>)> = base
            .iter()
            .enumerate()
            .map(|(i, d)| {
                if i > 0 {
                    level += d;
                }
                (5.0 * i as f64, Some(level))
            })
            .collect();
        let hot: Vec<(f64, Option<f64>)> = cool
            .iter()
            .enumerate()
            .map(|(i, (t, v))| (*t, v.map(|v| if i == 0 { v } else { v + extra[i] })))
            .collect();
        let a = cdrd(&cool, threshold).unwrap();
        let b = cdrd(&hot, threshold).unwrap();
        prop_assert!(minutes(&b) <= minutes(&a));
    }

    #[test]
    fn control_average_deviations_sum_to_zero(
        rooms in prop::collection::vec(prop::collection::vec(prop::option::of(60.0f64..80.0), 30), 2..6)
    ) {
        let series: Vec<RoomSeries> =
            rooms.iter().enumerate().map(|(i, t)| RoomSeries { room: format!("r{i}"), temps: t.clone() }).collect();
        let dev = room_deviations(&series, &[], DeviationReference::ControlAverage);
        for t in 0..30 {
            let sum: f64 = dev.iter().filter_map(|d| d[t]).sum();
            prop_assert!(sum.abs() < 1e-9);
        }
    }
}
