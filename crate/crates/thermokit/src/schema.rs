//! Shapes of the eight summary tables.
//!
//! Each table has fixed headers and a fixed set of leading label columns
//! whose values identify the rows, in order. Numeric cells are either empty
//! (no data) or parse as finite floats; significance cells hold one of the
//! codes `***`, `**`, `*`, `.` or nothing.
//!
//! | file | rows |
//! |---|---|
//! | `comfort/table1_dr_comfort.csv` | durations (fast, slow, thermostat, gap) then deviations (least, most, thermostat, gap) |
//! | `comfort/table2_cci.csv` | thermostat, lowest, highest room comfort |
//! | `comfort/table3_deviations.csv` | setpoint/average × coldest/hottest |
//! | `deficiency/table4_deficiency.csv` | the four deficiency categories |
//! | `deficiency/table5_representativeness.csv` | RC, RK, RQ |
//! | `panel/table6_combined.csv` | `beta_0` … `beta_5` |
//! | `panel/table7_cool_heat.csv` | `beta_0` … `beta_5`, cooling and heating side by side |
//! | `panel/table8_seasonal.csv` | `beta_j:Season` for j = 0..5 and the four seasons |

use std::path::Path;

use crate::report::{read_table, Cell};

pub struct TableSchema {
    pub name: &'static str,
    /// Path relative to the output directory.
    pub file: &'static str,
    pub headers: Vec<String>,
    /// Number of leading label columns.
    pub label_columns: usize,
    pub rows: Vec<Vec<String>>,
}

const SUMMARY: [&str; 5] = ["mean", "median", "std_dev", "min", "max"];
const FIT: [&str; 5] = ["estimate", "std_error", "t_value", "p_value", "signif"];

fn strings(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn labels(rows: &[&[&str]]) -> Vec<Vec<String>> {
    rows.iter().map(|r| strings(r)).collect()
}

fn terms() -> Vec<Vec<String>> {
    (0..6).map(|j| vec![format!("beta_{j}")]).collect()
}

pub static TABLE1: std::sync::LazyLock<TableSchema> = std::sync::LazyLock::new(|| TableSchema {
    name: "Table 1",
    file: "comfort/table1_dr_comfort.csv",
    headers: strings(&[&["section", "parameter"][..], &SUMMARY].concat()),
    label_columns: 2,
    rows: labels(&[
        &["durations_min", "fast_reacting_rooms"],
        &["durations_min", "slow_reacting_rooms"],
        &["durations_min", "thermostat"],
        &["durations_min", "comfort_gap"],
        &["deviations_f", "least_varying_rooms"],
        &["deviations_f", "most_varying_rooms"],
        &["deviations_f", "thermostat"],
        &["deviations_f", "comfort_gap"],
    ]),
});

pub static TABLE2: std::sync::LazyLock<TableSchema> = std::sync::LazyLock::new(|| TableSchema {
    name: "Table 2",
    file: "comfort/table2_cci.csv",
    headers: strings(&[&["room_type"][..], &SUMMARY].concat()),
    label_columns: 1,
    rows: labels(&[&["thermostat_room_comfort"], &["lowest_room_comfort"], &["highest_room_comfort"]]),
});

pub static TABLE3: std::sync::LazyLock<TableSchema> = std::sync::LazyLock::new(|| TableSchema {
    name: "Table 3",
    file: "comfort/table3_deviations.csv",
    headers: strings(&["reference", "room", "cooling_average", "cooling_std_dev", "heating_average", "heating_std_dev"]),
    label_columns: 2,
    rows: labels(&[
        &["setpoint", "coldest_room"],
        &["setpoint", "hottest_room"],
        &["average", "coldest_room"],
        &["average", "hottest_room"],
    ]),
});

pub static TABLE4: std::sync::LazyLock<TableSchema> = std::sync::LazyLock::new(|| TableSchema {
    name: "Table 4",
    file: "deficiency/table4_deficiency.csv",
    headers: strings(&["category", "one_room", "one_room_pct", "two_rooms", "two_rooms_pct", "total", "total_pct"]),
    label_columns: 1,
    rows: labels(&[&["low_solar_gain"], &["high_solar_gain"], &["low_heating_input"], &["poor_insulation"]]),
});

pub static TABLE5: std::sync::LazyLock<TableSchema> = std::sync::LazyLock::new(|| TableSchema {
    name: "Table 5",
    file: "deficiency/table5_representativeness.csv",
    headers: strings(&[&["parameter"][..], &SUMMARY, &["coeff_of_var_pct"]].concat()),
    label_columns: 1,
    rows: labels(&[&["rc_h"], &["rk_f"], &["rq_f"]]),
});

pub static TABLE6: std::sync::LazyLock<TableSchema> = std::sync::LazyLock::new(|| TableSchema {
    name: "Table 6",
    file: "panel/table6_combined.csv",
    headers: strings(&[&["term"][..], &FIT].concat()),
    label_columns: 1,
    rows: terms(),
});

fn two_sided() -> Vec<String> {
    let mut h = vec!["term".to_string()];
    for side in ["cooling", "heating"] {
        h.extend(FIT.iter().map(|f| format!("{side}_{f}")));
    }
    h
}

pub static TABLE7: std::sync::LazyLock<TableSchema> = std::sync::LazyLock::new(|| TableSchema {
    name: "Table 7",
    file: "panel/table7_cool_heat.csv",
    headers: two_sided(),
    label_columns: 1,
    rows: terms(),
});

pub static TABLE8: std::sync::LazyLock<TableSchema> = std::sync::LazyLock::new(|| TableSchema {
    name: "Table 8",
    file: "panel/table8_seasonal.csv",
    headers: two_sided(),
    label_columns: 1,
    rows: (0..6)
        .flat_map(|j| {
            thermokit_core::panel::Season::ALL.iter().map(move |s| vec![format!("beta_{j}:{}", s.name())])
        })
        .collect(),
});

pub fn all() -> [&'static TableSchema; 8] {
    [&TABLE1, &TABLE2, &TABLE3, &TABLE4, &TABLE5, &TABLE6, &TABLE7, &TABLE8]
}

const SIGNIF: [&str; 5] = ["***", "**", "*", ".", ""];

/// Checks one table file against its schema; returns every violation.
pub fn check(schema: &TableSchema, out_dir: &Path) -> Vec<String> {
    let path = out_dir.join(schema.file);
    let table = match read_table(&path) {
        Ok(t) => t,
        Err(e) => return vec![format!("{}: {e}", schema.name)],
    };
    let mut problems = Vec::new();
    if table.headers != schema.headers {
        problems.push(format!("{}: headers {:?}, expected {:?}", schema.name, table.headers, schema.headers));
        return problems;
    }
    if table.rows.len() != schema.rows.len() {
        problems.push(format!("{}: {} rows, expected {}", schema.name, table.rows.len(), schema.rows.len()));
    }
    for (i, (row, want)) in table.rows.iter().zip(&schema.rows).enumerate() {
        let text = |c: &Cell| match c {
            Cell::Text(s) => s.clone(),
            other => format!("{other:?}"),
        };
        let got: Vec<String> = row[..schema.label_columns].iter().map(text).collect();
        if &got != want {
            problems.push(format!("{}: row {i} labelled {got:?}, expected {want:?}", schema.name));
        }
        for (h, c) in schema.headers.iter().zip(row).skip(schema.label_columns) {
            let v = text(c);
            let ok = if h.ends_with("signif") {
                SIGNIF.contains(&v.as_str())
            } else {
                v.is_empty() || v.parse::<f64>().is_ok_and(f64::is_finite)
            };
            if !ok {
                problems.push(format!("{}: row {i}, column {h}: bad value '{v}'", schema.name));
            }
        }
    }
    problems
}

/// Checks all eight tables under `out_dir`.
pub fn check_all(out_dir: &Path) -> Vec<String> {
    all().iter().flat_map(|s| check(s, out_dir)).collect()
}
