//! Synthetic houses with known room parameters.

use rayon::prelude::*;
use thermokit_core::synth::{gen_house, HouseTruth, SynthConfig};

use super::Ctx;
use crate::error::{Error, Result};
use crate::io::{write_metadata_file, write_trace_file};
use crate::manifest::Manifest;
use crate::report::OutDir;

pub fn synth_config(ctx: &Ctx) -> SynthConfig {
    let mut cfg = SynthConfig { seed: ctx.params.seed, noise_std: ctx.params.noise, ..SynthConfig::default() };
    cfg.houses.count = ctx.params.houses;
    cfg.houses.days = ctx.params.days;
    cfg
}

pub fn run(ctx: &Ctx) -> Result<()> {
    let cfg = synth_config(ctx);
    cfg.validate().map_err(|e| Error::core("synth", e))?;
    let mut out = OutDir::create(ctx.stage_dir("synth"))?;
    let traces = out.path("traces");
    std::fs::create_dir_all(&traces).map_err(|e| Error::io(&traces, e))?;
    let houses: Vec<_> = (0..cfg.houses.count)
        .into_par_iter()
        .map(|i| {
            let h = gen_house(&cfg, i).map_err(|e| Error::core(format!("house {i}"), e))?;
            write_trace_file(&traces.join(format!("{}.csv", h.trace.house_id)), &h.trace, &ctx.mapping)?;
            Ok((h.metadata, h.truth, h.trace.records.len()))
        })
        .collect::<Result<_>>()?;
    let metadata: Vec<_> = houses.iter().map(|h| h.0.clone()).collect();
    let truth: Vec<HouseTruth> = houses.iter().map(|h| h.1.clone()).collect();
    out.note("traces/", houses.iter().map(|h| h.2).sum());
    write_metadata_file(&out.path("metadata.csv"), &metadata)?;
    out.note("metadata.csv", metadata.len());
    out.json("truth.json", &truth)?;
    Manifest::new("synth", &ctx.config, Vec::new()).write(&mut out)
}
