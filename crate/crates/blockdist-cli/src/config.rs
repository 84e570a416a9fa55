//! Experiment configuration: a generator template, a size ladder, and a
//! partition, mirrored as a JSON document.

use serde::{Deserialize, Serialize};

use blockdist::error::Result;
use blockdist::exponents::exponent_report;
use blockdist::generators::GeneratorSpec;
use blockdist::geometry::Partition;

use crate::compare::{compare, CompareOptions};
use crate::scaling::{run_scaling, ScanOptions};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanConfig {
    pub generator: GeneratorSpec,
    pub ladder: Vec<u64>,
    pub partition: Vec<usize>,
}

/// Full scan pipeline: run the ladder, fit, and attach the comparison
/// against the exponent table. This is the exact JSON the CLI prints.
pub fn scan(
    config: &ScanConfig,
    opts: &ScanOptions,
    cmp: &CompareOptions,
) -> Result<serde_json::Value> {
    let partition = Partition::new(config.partition.clone())?;
    let run = run_scaling(&config.generator, &partition, &config.ladder, opts)?;
    let table = exponent_report(&partition)?;
    let mut out = run.to_json();
    out["comparison"] = compare(&run, &table, cmp).to_json();
    Ok(out)
}
