//! Hourly duty-cycle panel and the fixed-effects regressions.

use serde::Serialize;
use thermokit_core::ingest::resample_hourly;
use thermokit_core::panel::{
    build_panel, effect_summary, fit_fe_model, FeOptions, ModelSpec, Outcome, Panel, PanelRow, RegressionResult,
    SeasonMap,
};

use super::{per_house, Ctx};
use crate::error::{Error, Result};
use crate::manifest::Manifest;
use crate::report::{Cell, OutDir, Table};
use crate::schema;

/// Panel rows of one house, with `house == 0` until merged.
#[derive(Debug, Clone, Default)]
pub struct HousePanel {
    pub house_id: String,
    pub rows: Vec<PanelRow>,
    pub dropped_absent_hours: usize,
    pub dropped_missing_outdoor: usize,
}

pub fn house_panel(trace: &thermokit_core::ingest::HouseTrace) -> HousePanel {
    let hours = resample_hourly(trace);
    let b = build_panel(&[(trace.house_id.clone(), hours)], &SeasonMap::default());
    HousePanel {
        house_id: trace.house_id.clone(),
        rows: b.panel.rows,
        dropped_absent_hours: b.dropped_absent_hours,
        dropped_missing_outdoor: b.dropped_missing_outdoor,
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PanelSummary {
    pub houses: usize,
    pub rows: usize,
    pub dropped_absent_hours: usize,
    pub dropped_missing_outdoor: usize,
    pub failures: Vec<ModelFailure>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelFailure {
    pub model: String,
    pub error: String,
}

/// Concatenates per-house panels (already sorted by house id).
pub fn merge(houses: Vec<HousePanel>) -> (Panel, PanelSummary) {
    let mut panel = Panel::default();
    let mut s = PanelSummary { houses: houses.len(), ..Default::default() };
    for (i, h) in houses.into_iter().enumerate() {
        s.dropped_absent_hours += h.dropped_absent_hours;
        s.dropped_missing_outdoor += h.dropped_missing_outdoor;
        panel.houses.push(h.house_id);
        panel.rows.extend(h.rows.into_iter().map(|mut r| {
            r.house = i as u32;
            r
        }));
    }
    s.rows = panel.rows.len();
    (panel, s)
}

fn spec_name(spec: ModelSpec) -> &'static str {
    match spec {
        ModelSpec::Base => "base",
        ModelSpec::Seasonal => "seasonal",
    }
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Cool => "cool",
        Outcome::Heat => "heat",
        Outcome::Combined => "combined",
    }
}

pub fn model_name(spec: ModelSpec, outcome: Outcome) -> String {
    format!("{}_{}", spec_name(spec), outcome_name(outcome))
}

pub fn panel_table(panel: &Panel) -> Table {
    let mut t = Table::new(&[
        "house_id", "timestamp", "hour", "month", "season", "dc_cool", "dc_heat", "dc_combined", "outdoor", "sensors",
    ]);
    for r in &panel.rows {
        t.push(vec![
            Cell::text(&panel.houses[r.house as usize]),
            Cell::text(r.timestamp.to_string()),
            (r.hour as usize).into(),
            (r.month as usize).into(),
            Cell::text(r.season.name()),
            Cell::num(r.dc_cool),
            Cell::num(r.dc_heat),
            Cell::num(r.dc_combined),
            Cell::num(r.outdoor),
            (r.sensors as usize).into(),
        ]);
    }
    t
}

/// Estimate, std error, t, p and significance of a term, empty when the
/// model or the term is missing.
fn fit_cells(fit: Option<&RegressionResult>, term: &str) -> Vec<Cell> {
    match fit.and_then(|f| f.coefficients.iter().find(|c| c.term.name == term)) {
        Some(c) => vec![
            Cell::num(c.estimate),
            Cell::num(c.std_error),
            Cell::num(c.t_value),
            Cell::num(c.p_value),
            Cell::text(c.significance()),
        ],
        None => vec![Cell::Num(None), Cell::Num(None), Cell::Num(None), Cell::Num(None), Cell::text("")],
    }
}

pub fn coefficient_table(fit: &RegressionResult) -> Table {
    let mut t = Table::new(&schema::TABLE6.headers);
    for c in &fit.coefficients {
        let mut row = vec![Cell::text(&c.term.name)];
        row.extend(fit_cells(Some(fit), &c.term.name));
        t.push(row);
    }
    t
}

fn one_sided(schema: &schema::TableSchema, fit: Option<&RegressionResult>) -> Table {
    let mut t = Table::new(&schema.headers);
    for label in &schema.rows {
        let mut row = vec![Cell::text(&label[0])];
        row.extend(fit_cells(fit, &label[0]));
        t.push(row);
    }
    t
}

fn two_sided(schema: &schema::TableSchema, cool: Option<&RegressionResult>, heat: Option<&RegressionResult>) -> Table {
    let mut t = Table::new(&schema.headers);
    for label in &schema.rows {
        let mut row = vec![Cell::text(&label[0])];
        row.extend(fit_cells(cool, &label[0]));
        row.extend(fit_cells(heat, &label[0]));
        t.push(row);
    }
    t
}

fn write_fit(out: &mut OutDir, fit: &RegressionResult) -> Result<()> {
    let name = model_name(fit.spec, fit.outcome);
    out.table(&format!("regression_{name}"), &coefficient_table(fit))?;
    out.json(&format!("regression_{name}_full.json"), fit)?;
    let effects = effect_summary(fit);
    let mut t = Table::new(&["from", "to", "percent_change"]);
    for c in &effects.changes {
        t.push(vec![Cell::text(&c.from), Cell::text(&c.to), c.percent.into()]);
    }
    out.table(&format!("effects_{name}"), &t)?;
    out.json(&format!("effects_{name}_full.json"), &effects)
}

/// Models fitted when neither `--model` nor `--outcome` is given.
pub const DEFAULT_MODELS: [(ModelSpec, Outcome); 5] = [
    (ModelSpec::Base, Outcome::Combined),
    (ModelSpec::Base, Outcome::Cool),
    (ModelSpec::Base, Outcome::Heat),
    (ModelSpec::Seasonal, Outcome::Cool),
    (ModelSpec::Seasonal, Outcome::Heat),
];

/// Fits the requested model, or the five table models. A failing table
/// model leaves its cells empty and is listed in `summary.json`; the stage
/// fails only when every model failed.
pub fn write(ctx: &Ctx, panel: &Panel, mut summary: PanelSummary, manifest: Manifest) -> Result<()> {
    let mut out = OutDir::create(ctx.stage_dir("panel"))?;
    out.csv_only("panel.csv", &panel_table(panel))?;
    let opts = FeOptions::default();
    let single = ctx.config.model.is_some() || ctx.config.outcome.is_some();
    let models: Vec<(ModelSpec, Outcome)> = if single {
        vec![(
            ctx.config.model.map(Into::into).unwrap_or(ModelSpec::Base),
            ctx.config.outcome.map(Into::into).unwrap_or(Outcome::Combined),
        )]
    } else {
        DEFAULT_MODELS.to_vec()
    };
    let mut fits = Vec::new();
    let mut first_error = None;
    for &(spec, outcome) in &models {
        let name = model_name(spec, outcome);
        match fit_fe_model(panel, spec, outcome, &opts) {
            Ok(f) => {
                write_fit(&mut out, &f)?;
                fits.push(f);
            }
            Err(e) => {
                log::warn!("panel model {name}: {e}");
                summary.failures.push(ModelFailure { model: name.clone(), error: e.to_string() });
                first_error.get_or_insert(Error::core(format!("panel model {name}"), e));
            }
        }
    }
    let get = |spec, outcome| fits.iter().find(|f| f.spec == spec && f.outcome == outcome);
    if !single {
        out.table("table6_combined", &one_sided(&schema::TABLE6, get(ModelSpec::Base, Outcome::Combined)))?;
        out.table(
            "table7_cool_heat",
            &two_sided(&schema::TABLE7, get(ModelSpec::Base, Outcome::Cool), get(ModelSpec::Base, Outcome::Heat)),
        )?;
        out.table(
            "table8_seasonal",
            &two_sided(
                &schema::TABLE8,
                get(ModelSpec::Seasonal, Outcome::Cool),
                get(ModelSpec::Seasonal, Outcome::Heat),
            ),
        )?;
    }
    out.json("summary.json", &summary)?;
    manifest.write(&mut out)?;
    match first_error {
        Some(e) if fits.is_empty() => Err(e),
        _ => Ok(()),
    }
}

pub fn run(ctx: &Ctx) -> Result<()> {
    let input = ctx.config.require_input()?;
    let (houses, inputs) = per_house(input, &ctx.mapping, |t| Ok(house_panel(&t.trace)))?;
    let (panel, summary) = merge(houses);
    write(ctx, &panel, summary, Manifest::new("panel", &ctx.config, inputs))
}
