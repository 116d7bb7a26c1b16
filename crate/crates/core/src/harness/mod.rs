//! Scenario configuration, sweep enumeration, execution, and export: the
//! plumbing that turns a declarative config file into result tables.

mod config;
mod export;
mod run;
mod sweep;

pub use config::{
    load_config, parse_config, resolve_cities, resolve_mask, ClockSection, ConstellationSection,
    LatticeSection, MetricsSection, OpticalSection, OutputSection, ScenarioConfig,
    VisibilitySection,
};
pub use export::{export_bundle, write_long_csv, write_manifest};
pub use run::{
    run_scenario, run_scenario_sink, run_sweep, Emit, Inputs, ResultBundle, RunOptions,
    SweepOutcome, ThresholdStats, WindowStats,
};
pub use sweep::{enumerate_sweep, Scenario, SweepPlan};
