use proptest::prelude::*;
use thermokit::io::{parse_metadata, parse_trace, write_metadata, write_trace};
use thermokit::mapping::{ColumnMapping, TemperatureUnit};
use thermokit::Error;
use thermokit_core::ingest::HouseMetadata;

const HEADER: &str = "DateTime,Thermostat_Temperature,T_out,T_stp_cool,T_stp_heat,compCool1,RemoteSensor1_Temperature,RemoteSensor1_Motion";

fn rows(n: usize) -> String {
    let mut s = format!("{HEADER}\n");
    for k in 0..n {
        s += &format!("2018-07-01 {:02}:{:02}:00,{},85,72,65,300,71.5,1\n", k / 12, (k % 12) * 5, 72.0 + k as f64 * 0.1);
    }
    s
}

#[test]
fn twelve_rows_at_five_minutes() {
    let parsed = parse_trace(rows(12).as_bytes(), &ColumnMapping::default(), "h1").unwrap();
    assert_eq!(parsed.len(), 1);
    let t = &parsed[0].trace;
    assert_eq!(t.house_id, "h1");
    assert_eq!(t.records.len(), 12);
    assert_eq!(t.interval_seconds, 300);
    assert_eq!(parsed[0].duplicates_dropped, 0);
    assert_eq!(t.records[3].thermostat_temp, Some(72.3));
    assert_eq!(t.records[0].sensor_temps, vec![Some(71.5)]);
    assert_eq!(t.records[0].motion_flags, vec![Some(true)]);
}

#[test]
fn repeated_timestamp_keeps_first_row() {
    let mut text = rows(3);
    text += "2018-07-01 00:05:00,99,85,72,65,300,71.5,0\n";
    let parsed = parse_trace(text.as_bytes(), &ColumnMapping::default(), "h1").unwrap();
    assert_eq!(parsed[0].duplicates_dropped, 1);
    assert_eq!(parsed[0].trace.records.len(), 3);
    assert_eq!(parsed[0].trace.records[1].thermostat_temp, Some(72.1));
}

#[test]
fn missing_outdoor_column_is_named() {
    let text = rows(4).replace("T_out", "Outside");
    match parse_trace(text.as_bytes(), &ColumnMapping::default(), "h1") {
        Err(e @ Error::Data(_)) => {
            assert!(e.to_string().contains("T_out"));
            assert_eq!(e.exit_code(), 2);
        }
        other => panic!("expected a data error, got {other:?}"),
    }
}

#[test]
fn unparsable_cell_is_a_data_error() {
    let text = rows(4).replace(",85,", ",hot,");
    assert!(matches!(parse_trace(text.as_bytes(), &ColumnMapping::default(), "h1"), Err(Error::Data(_))));
}

#[test]
fn celsius_and_house_column() {
    let mapping = ColumnMapping {
        delimiter: ';',
        unit: TemperatureUnit::C,
        house_id: Some("id".into()),
        ..ColumnMapping::default()
    };
    let text = "id;DateTime;Thermostat_Temperature;T_out\n\
                a;2018-01-01T00:00;20;0\n\
                b;2018-01-01T00:00;25;10\n\
                a;2018-01-01T00:05;21;0\n";
    let parsed = parse_trace(text.as_bytes(), &mapping, "unused").unwrap();
    let ids: Vec<&str> = parsed.iter().map(|p| p.trace.house_id.as_str()).collect();
    assert_eq!(ids, ["a", "b"]);
    assert_eq!(parsed[0].trace.records.len(), 2);
    assert_eq!(parsed[0].trace.records[0].thermostat_temp, Some(68.0));
    assert_eq!(parsed[1].trace.records[0].outdoor_temp, Some(50.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trace_round_trip(seed in any::<u64>(), days in 1usize..4, sensors in 0usize..4) {
        let trace = thermokit_oracles::random_trace(seed, days, sensors);
        let mapping = ColumnMapping::default();
        let mut buf = Vec::new();
        write_trace(&mut buf, &trace, &mapping).unwrap();
        let parsed = parse_trace(&buf, &mapping, &trace.house_id).unwrap();
        prop_assert_eq!(parsed.len(), 1);
        prop_assert_eq!(&parsed[0].trace, &trace);
    }
}

#[test]
fn metadata_round_trip() {
    let mut a = HouseMetadata::new("a", 3);
    a.floor_area = Some(1850.0);
    a.num_occupants = Some(4);
    a.num_floors = Some(2);
    a.state_code = Some("TX".into());
    a.eco_plus_enrolled = Some(true);
    a.eco_plus_slider = Some(4);
    let b = HouseMetadata::new("b", 0);
    let mut buf = Vec::new();
    write_metadata(&mut buf, &[a.clone(), b.clone()]).unwrap();
    assert_eq!(parse_metadata(&buf, b',').unwrap(), vec![a, b]);
}
