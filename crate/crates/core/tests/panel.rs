use chrono::{Datelike, Duration, NaiveDate};
use proptest::prelude::*;
use thermokit_core::panel::{
    effect_summary, fit_fe_model, ClusterBy, FeOptions, ModelSpec, Outcome, Panel, PanelRow, SeasonMap,
};
use thermokit_core::synth::{gen_panel, FeMagnitudes, SynthConfig};
use thermokit_oracles::{group_means, lsdv, Layout};

/// (house, day-of-year, hour, sensors, outdoor, duty cycle) per row.
type RawRow = (u32, u32, u32, u8, f64, f64);

fn build(rows: &[RawRow]) -> Panel {
    let start = NaiveDate::from_ymd_opt(2019, 1, 1).unwrap().and_hms_opt(0, 0, 0).unwrap();
    let houses = rows.iter().map(|r| r.0).max().unwrap_or(0) + 1;
    Panel {
        houses: (0..houses).map(|h| format!("h{h}")).collect(),
        rows: rows
            .iter()
            .map(|(h, day, hour, s, t, dc)| {
                let ts = start + Duration::days(*day as i64) + Duration::hours(*hour as i64);
                let mut r = PanelRow::new(*h, ts, 0.0, 0.0, *t, *s as usize, &SeasonMap::default());
                r.dc_combined = *dc;
                r
            })
            .collect(),
    }
}

/// Small unbalanced panels with every sensor count present.
fn small_panel() -> impl Strategy<Value = Vec<RawRow>> {
    (2u32..=5, 16usize..=48).prop_flat_map(|(houses, hours)| {
        prop::collection::vec(
            (prop::sample::select(vec![3u32, 40, 100]), 0u32..4, 20.0f64..90.0, 0.0f64..1.0),
            30.max(hours)..=houses as usize * hours,
        )
        .prop_map(move |raw| {
            raw.into_iter()
                .enumerate()
                .map(|(i, (day, hour, t, dc))| (i as u32 % houses, day, hour, (i / 2 % 6) as u8, t, dc))
                .collect()
        })
    })
}

fn opts(tol: f64) -> FeOptions {
    FeOptions { tolerance: tol, ..Default::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn absorbed_fit_matches_dummy_variables(rows in small_panel()) {
        let panel = build(&rows);
        let fe = fit_fe_model(&panel, ModelSpec::Base, Outcome::Combined, &FeOptions::default()).unwrap();
        let oracle = lsdv(&panel, Layout::Base, |r| r.dc_combined);
        for (c, (b, se)) in fe.coefficients.iter().zip(oracle.beta.iter().zip(&oracle.cluster_se)) {
            prop_assert!((c.estimate - b).abs() < 1e-8, "{} vs {}", c.estimate, b);
            prop_assert!((c.std_error - se).abs() < 1e-10, "{} vs {}", c.std_error, se);
            prop_assert!(c.std_error > 0.0);
        }
    }

    #[test]
    fn one_observation_clusters_give_hc1(rows in small_panel()) {
        let panel = build(&rows);
        let o = FeOptions { cluster: ClusterBy::Observation, ..opts(1e-14) };
        let fe = fit_fe_model(&panel, ModelSpec::Base, Outcome::Combined, &o).unwrap();
        let oracle = lsdv(&panel, Layout::Base, |r| r.dc_combined);
        for (c, se) in fe.coefficients.iter().zip(&oracle.hc1_se) {
            prop_assert!((c.std_error - se).abs() < 1e-12, "{} vs {}", c.std_error, se);
        }
    }

    #[test]
    fn residuals_are_orthogonal_to_every_dimension(rows in small_panel()) {
        let panel = build(&rows);
        let fe = fit_fe_model(&panel, ModelSpec::Base, Outcome::Combined, &FeOptions::default()).unwrap();
        let dims: [Vec<u32>; 3] = [
            panel.rows.iter().map(|r| r.house).collect(),
            panel.rows.iter().map(|r| r.hour as u32).collect(),
            panel.rows.iter().map(|r| r.month as u32).collect(),
        ];
        for groups in &dims {
            for m in group_means(&fe.residuals, groups).values() {
                prop_assert!(m.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn additive_constants_are_absorbed(rows in small_panel(), which in 0usize..3, shift in -1.0f64..1.0) {
        let base = build(&rows);
        let mut moved = base.clone();
        for r in moved.rows.iter_mut() {
            let hit = match which {
                0 => r.house == 1,
                1 => r.hour == 2,
                _ => r.month == 2,
            };
            if hit {
                r.dc_combined += shift;
            }
        }
        let a = fit_fe_model(&base, ModelSpec::Base, Outcome::Combined, &opts(1e-13)).unwrap();
        let b = fit_fe_model(&moved, ModelSpec::Base, Outcome::Combined, &opts(1e-13)).unwrap();
        for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
            prop_assert!((x.estimate - y.estimate).abs() < 1e-9);
        }
    }
}

#[test]
fn seasonal_fit_matches_dummy_variables() {
    let mut cfg = SynthConfig { seed: 3, duty_noise_std: 0.02, ..Default::default() };
    cfg.panel.houses = 30;
    cfg.panel.hours = 8760;
    let beta: Vec<f64> = (0..24).map(|i| 0.01 + 0.0002 * i as f64).collect();
    let mut p = gen_panel(&cfg, &beta, &FeMagnitudes { house: 0.05, hour: 0.05, month: 0.05 }).unwrap().panel;
    p.rows.retain(|r| r.hour % 6 == 0 && r.timestamp.ordinal() % 7 == 0);
    let fe = fit_fe_model(&p, ModelSpec::Seasonal, Outcome::Combined, &opts(1e-13)).unwrap();
    let oracle = lsdv(&p, Layout::Seasonal, |r| r.dc_combined);
    assert_eq!(fe.coefficients.len(), 24);
    for (c, b) in fe.coefficients.iter().zip(&oracle.beta) {
        assert!((c.estimate - b).abs() < 1e-8);
    }
    assert_eq!(fe.diagnostics.rank, 24);
}


#[test]
fn noise_free_synthetic_panel_is_exact() {
    let mut cfg = SynthConfig::default();
    cfg.panel.houses = 30;
    cfg.panel.hours = 1000;
    let beta = [0.010, 0.011, 0.012, 0.013, 0.014, 0.015];
    let p = gen_panel(&cfg, &beta, &FeMagnitudes { house: 0.0, hour: 0.0, month: 0.0 }).unwrap();
    assert_eq!(p.clamp_rate, 0.0);
    let fe = fit_fe_model(&p.panel, ModelSpec::Base, Outcome::Combined, &FeOptions::default()).unwrap();
    for (c, b) in fe.coefficients.iter().zip(beta) {
        assert!((c.estimate - b).abs() < 1e-9);
    }
}

#[test]
fn constant_sensor_counts_flag_weak_identification() {
    let mut cfg = SynthConfig { duty_noise_std: 0.02, ..Default::default() };
    cfg.panel.houses = 24;
    cfg.panel.hours = 1000;
    cfg.panel.switch_share = 0.0;
    let p = gen_panel(&cfg, &[0.012; 6], &FeMagnitudes { house: 0.05, hour: 0.05, month: 0.05 }).unwrap();
    let fe = fit_fe_model(&p.panel, ModelSpec::Base, Outcome::Combined, &FeOptions::default()).unwrap();
    assert!(fe.diagnostics.weak_identification);
    assert_eq!(fe.diagnostics.houses_switching_sensors, 0);
}

#[test]
fn single_level_dimension_is_reported_degenerate() {
    let rows: Vec<RawRow> = (0..60).map(|i| (i % 3, 10, (i % 4), (i % 6) as u8, 30.0 + i as f64, 0.3)).collect();
    let fe = fit_fe_model(&build(&rows), ModelSpec::Base, Outcome::Combined, &FeOptions::default()).unwrap();
    let month = fe.diagnostics.fixed_effects.iter().find(|d| d.name == "month").unwrap();
    assert!(month.degenerate);
}

#[test]
fn effect_summary_on_published_table() {
    let rows: Vec<RawRow> = (0..120).map(|i| (i % 4, i * 3, i % 5, (i % 6) as u8, 30.0 + (i * 7 % 50) as f64, 0.3)).collect();
    let mut fe = fit_fe_model(&build(&rows), ModelSpec::Base, Outcome::Combined, &FeOptions::default()).unwrap();
    let table = [(0.0128, 0.000262), (0.0136, 0.000252), (0.0141, 0.000261), (0.0143, 0.000265), (0.0146, 0.000302), (0.0151, 0.000356)];
    for (c, (b, se)) in fe.coefficients.iter_mut().zip(table) {
        c.estimate = b;
        c.std_error = se;
    }
    let s = effect_summary(&fe);
    let pct = s.change("beta_0", "beta_5").unwrap().percent.unwrap();
    assert!((pct - 17.96875).abs() < 1e-9);
    assert_eq!(s.changes.len(), 15);
    assert!((s.effects[0].ci_low - (0.0128 - 1.96 * 0.000262)).abs() < 1e-15);
}
