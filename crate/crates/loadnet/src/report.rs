//! Plot-ready CSV and JSON result files. Every file starts with the resolved
//! run configuration: `# key=value` lines in CSV, a `config` object in JSON.

use std::collections::BTreeMap;
use std::fmt::Write;

use loadnet_core::experiments::{AblationResult, HiddenSearchResult, RepeatedResult, SweepResult};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

/// A result together with the configuration that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document<T> {
    pub config: BTreeMap<String, String>,
    pub result: T,
}

impl<T> Document<T> {
    pub fn new(config: &RunConfig, result: T) -> Self {
        let config = config
            .pairs()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        Self { config, result }
    }
}

pub fn provenance(config: &RunConfig) -> String {
    config
        .pairs()
        .into_iter()
        .map(|(k, v)| format!("# {k}={v}\n"))
        .collect()
}

/// Config lines of a result CSV, parsed back.
pub fn read_provenance(csv: &str) -> BTreeMap<String, String> {
    csv.lines()
        .map_while(|l| l.strip_prefix("# "))
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn means(out: &mut String, r: &RepeatedResult) {
    let m = &r.mean;
    let _ = write!(
        out,
        "{},{},{},{}",
        m.accuracy_pct,
        m.mse_kwh2,
        m.mse_norm,
        r.trials.len()
    );
}

pub const SWEEP_HEADER: &str =
    "grid_value,context,mean_accuracy,mean_mse_kwh2,mean_mse_norm,n_trials";

/// One row per sweep cell; `grid_value` is the lag count.
pub fn sweep_csv(config: &RunConfig, sweep: &SweepResult) -> String {
    let mut out = provenance(config);
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for cell in &sweep.cells {
        let _ = write!(out, "{},{},", cell.lag_count, cell.include_context);
        means(&mut out, &cell.result);
        out.push('\n');
    }
    out
}

pub const ABLATION_HEADER: &str =
    "dropped,mean_accuracy,mean_mse_kwh2,mean_mse_norm,n_trials,accuracy_delta";

/// Baseline row (`dropped = none`) then one row per removed factor.
pub fn ablation_csv(config: &RunConfig, ablation: &AblationResult) -> String {
    let mut out = provenance(config);
    out.push_str(ABLATION_HEADER);
    out.push('\n');
    out.push_str("none,");
    means(&mut out, &ablation.baseline);
    out.push_str(",0\n");
    for e in &ablation.drops {
        let _ = write!(out, "{},", e.dropped);
        means(&mut out, &e.result);
        let _ = writeln!(out, ",{}", e.accuracy_delta);
    }
    out
}

pub const HIDDEN_HEADER: &str =
    "n_hidden,mean_accuracy,mean_mse_kwh2,mean_mse_norm,n_trials,capacity_violations";

pub fn hidden_csv(config: &RunConfig, search: &HiddenSearchResult) -> String {
    let mut out = provenance(config);
    out.push_str(HIDDEN_HEADER);
    out.push('\n');
    for t in &search.tried {
        let _ = write!(out, "{},", t.n_hidden);
        means(&mut out, &t.result);
        let _ = writeln!(out, ",{}", t.violations.len());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn provenance_round_trip() {
        let config = RunConfig {
            lags: 3,
            ..RunConfig::default()
        };
        let text = format!("{}{SWEEP_HEADER}\n", provenance(&config));
        let back = read_provenance(&text);
        assert_eq!(back["lags"], "3");
        assert_eq!(back.len(), config.pairs().len());
    }
}
