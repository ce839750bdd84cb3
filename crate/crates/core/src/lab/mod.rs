//! Experiment orchestration and Monte Carlo validators.

mod anticoncentration;
mod pip;
mod sweep;
mod toughness;
mod validate;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use anticoncentration::{anticoncentration_bound, anticoncentration_mc, AnticoncentrationReport, TailEstimate};
pub use pip::{
    aggregated_cut, aggregated_cut_frequency, order_statistics_mc, pip_lemma_checks, AggregatedCut, AlmostFeasibleRow,
    CutFrequency, MembershipCheck, OrderStat, OrderStatistics, PipChecks, RowConcentration,
};
pub use sweep::{sweep, write_sweep_csv, SweepOptions, SweepRow};
pub use toughness::{toughness_audit, FacetToughness, MaxAlpha, ToughnessReport};
pub use validate::{validate, Check, ValidationReport};

/// Parameters shared by every subcommand.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub subcommand: String,
    pub instances: Vec<PathBuf>,
    pub seed: Option<u64>,
    pub k_range: Option<(usize, usize)>,
    pub trials: usize,
    pub dirs: usize,
    pub budget_vertices: usize,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            subcommand: String::new(),
            instances: Vec::new(),
            seed: None,
            k_range: None,
            trials: 100_000,
            dirs: 1000,
            budget_vertices: 20_000,
            out: None,
        }
    }
}

impl ExperimentConfig {
    /// The seed, which every randomized run must supply.
    pub fn require_seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| Error::Precondition(format!("{} needs --seed", self.subcommand)))
    }

    pub fn check_caps(&self) -> Result<()> {
        for (name, v) in [("trials", self.trials), ("dirs", self.dirs), ("budget-vertices", self.budget_vertices)] {
            if v == 0 {
                return Err(Error::Precondition(format!("{name} must be positive")));
            }
        }
        Ok(())
    }

    /// The k range clipped to `1..=n`, defaulting to all of it.
    pub fn ks(&self, n: usize) -> Result<Vec<usize>> {
        let (lo, hi) = self.k_range.unwrap_or((1, n));
        if lo == 0 || lo > hi || hi > n {
            return Err(Error::Precondition(format!("k range {lo}..{hi} outside 1..{n}")));
        }
        Ok((lo..=hi).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let mut c = ExperimentConfig { subcommand: "sweep".into(), ..Default::default() };
        assert!(c.require_seed().is_err());
        c.seed = Some(3);
        assert_eq!(c.require_seed().unwrap(), 3);
        assert_eq!(c.ks(3).unwrap(), vec![1, 2, 3]);
        c.k_range = Some((2, 5));
        assert!(c.ks(4).is_err());
        c.trials = 0;
        assert!(c.check_caps().is_err());
    }
}
