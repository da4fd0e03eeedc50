//! Every trace stage in one pass over the input, then deficiency on the
//! written parameter file. Outputs match the stages run one by one.

use super::comfort::{self, ComfortParams, HouseComfort};
use super::ffp::{self, count_table, definition, segment_table, split};
use super::identify::{self, fit_house, filter_options, HouseFits};
use super::ingest::{self, HouseSummary};
use super::panel::{self, house_panel, HousePanel};
use super::{deficiency, per_house, Ctx};
use crate::error::Result;
use crate::manifest::{InputFile, Manifest};
use crate::report::Table;

struct House {
    summary: HouseSummary,
    comfort: HouseComfort,
    segments: Table,
    counts: Table,
    fits: HouseFits,
    panel: HousePanel,
}

pub fn run(ctx: &Ctx) -> Result<()> {
    let input = ctx.config.require_input()?;
    let comfort_params = ComfortParams::from_ctx(ctx);
    let def = definition(ctx);
    let (houses, inputs) = per_house(input, &ctx.mapping, |p| {
        ingest::normalize(ctx, p)?;
        let seasonal = split(&p.trace, def)?;
        let segs = ffp::extract(&seasonal);
        Ok(House {
            summary: ingest::summarize(p)?,
            comfort: comfort::analyze(&p.trace, &comfort_params)?,
            segments: segment_table(&segs),
            counts: count_table(&segs),
            fits: fit_house(&p.trace.house_id, &seasonal, &segs),
            panel: house_panel(&p.trace),
        })
    })?;
    let manifest = |stage: &str, inputs: Vec<InputFile>| Manifest::new(stage, &ctx.config, inputs);

    let mut summaries = Vec::new();
    let mut comforts = Vec::new();
    let (mut segments, mut counts) = (segment_table(&[]), count_table(&[]));
    let mut fits = Vec::new();
    let mut panels = Vec::new();
    for h in houses {
        summaries.push(h.summary);
        comforts.push(h.comfort);
        segments.rows.extend(h.segments.rows);
        counts.rows.extend(h.counts.rows);
        fits.push(h.fits);
        panels.push(h.panel);
    }

    ingest::write(ctx, &summaries, manifest("ingest", inputs.clone()))?;
    comfort::write(ctx, &comforts, manifest("comfort", inputs.clone()))?;
    ffp::write(ctx, &segments, &counts, manifest("ffp", inputs.clone()))?;
    drop(segments);
    let id = identify::join(fits, filter_options(ctx));
    identify::write(ctx, &id, manifest("identify", inputs.clone()))?;

    let params_file = ctx.stage_dir("identify").join("params.csv");
    let params = deficiency::read_params(&params_file)?;
    let def_input = InputFile {
        path: params_file.display().to_string(),
        houses: deficiency::houses_from_params(&params).len(),
        records: params.len(),
    };
    deficiency::write(ctx, &params, manifest("deficiency", vec![def_input]))?;

    let (p, summary) = panel::merge(panels);
    panel::write(ctx, &p, summary, manifest("panel", inputs))
}
