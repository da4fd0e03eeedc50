//! In-memory trace and metadata records, hourly resampling and season
//! segmentation. Parsing of delimiter-separated files lives in the `thermokit`
//! crate; everything here is pure.

mod metadata;
mod resample;
mod season;
mod trace;

pub use metadata::{
    summarize_metadata, AreaBin, CrossTab, CrossTabRow, EcoPlusSummary, HistogramBin,
    HouseMetadata, PenetrationReport, MIN_FLOOR_AREA, MIN_OCCUPANTS,
};
pub use resample::{resample_hourly, Averaged, HourlyRecord};
pub use season::{segment_seasons, HvacMode, SeasonDefinition, SeasonWindow};
pub use trace::{Gap, HouseTrace, TraceRecord};
