use proptest::prelude::*;
use thermokit_core::deficiency::{classify_house, rollup, Deficiency, RoomParams, MIN_ROOMS};
use thermokit_oracles::threshold_flags;

fn house() -> impl Strategy<Value = Vec<RoomParams>> {
    prop::collection::vec(
        (prop::option::of(1.0f64..150.0), prop::option::of(-5.0f64..8.0), prop::option::of(20.0f64..220.0)),
        1..=6,
    )
    .prop_map(|rooms| {
        rooms
            .into_iter()
            .enumerate()
            .map(|(i, (rc, rq, rk))| RoomParams { room: format!("r{i}"), rc_heating: rc, rq, rk })
            .collect()
    })
}

fn column(rooms: &[RoomParams], d: Deficiency) -> Vec<Option<f64>> {
    rooms
        .iter()
        .map(|r| match d {
            Deficiency::LowSolarGain | Deficiency::HighSolarGain => r.rq,
            Deficiency::LowHeatingInput => r.rk,
            Deficiency::PoorInsulation => r.rc_heating,
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn flags_match_threshold_oracle(rooms in house()) {
        let rep = classify_house("h", &rooms);
        for d in Deficiency::ALL {
            let expected = threshold_flags(&column(&rooms, d), d == Deficiency::HighSolarGain, MIN_ROOMS);
            let got: Vec<bool> = rep.rooms.iter().map(|f| f.get(d)).collect();
            prop_assert_eq!(got, expected, "{:?}", d);
            if let Some(n) = rep.counts.get(&d) {
                prop_assert!(*n <= rooms.len());
            }
        }
    }

    #[test]
    fn flags_survive_positive_affine_maps(rooms in house(), a in 0.1f64..10.0, b in -50.0f64..50.0) {
        let mapped: Vec<RoomParams> = rooms
            .iter()
            .map(|r| RoomParams {
                room: r.room.clone(),
                rc_heating: r.rc_heating.map(|v| a * v + b),
                rq: r.rq.map(|v| a * v + b),
                rk: r.rk.map(|v| a * v + b),
            })
            .collect();
        prop_assert_eq!(classify_house("h", &rooms).rooms, classify_house("h", &mapped).rooms);
    }

    #[test]
    fn rollup_uses_category_denominators(houses in prop::collection::vec(house(), 1..20)) {
        let reports: Vec<_> = houses.iter().enumerate().map(|(i, r)| classify_house(&format!("h{i}"), r)).collect();
        for row in rollup(&reports) {
            let evaluated = houses
                .iter()
                .filter(|h| column(h, row.category).iter().flatten().count() >= MIN_ROOMS)
                .count();
            prop_assert_eq!(row.evaluated_houses, evaluated);
            prop_assert!(row.one_room + row.two_rooms <= row.total);
            prop_assert!(row.total <= row.evaluated_houses);
        }
    }
}
