//! Discovery plans executed stage by stage on the simulated cluster.
//!
//! | algorithm | ldp 1 | ldp 2 |
//! |-----------|-------|-------|
//! | TANE      | ship partitions, intersect | broadcast data, rehash each level |
//! | FastFDs   | compare pairs sharing a block | full self-join |
//! | HyFD      | focused window sampling | random group pairs |

mod common;
mod costs;
mod fastfds;
mod hyfd;
mod naive;
mod tane;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cluster::{ClusterConfig, CostLedger};
use crate::error::{Error, Result};
use crate::model::{Dependency, DependencyKind, Relation};

pub use costs::{estimate_phase_costs, PhaseCostInput, PhaseCosts};
pub use fastfds::run_fastfds;
pub use hyfd::run_hyfd;
pub use naive::{naive_intersection_of_parts, run_naive_intersection, NaiveOutcome};
pub use tane::run_tane;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Tane,
    #[serde(rename = "fastfds")]
    FastFds,
    #[serde(rename = "hyfd")]
    HyFd,
    /// FastFDs' self-join plan over the full predicate space.
    DatadrivenDc,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Tane => "tane",
            Algorithm::FastFds => "fastfds",
            Algorithm::HyFd => "hyfd",
            Algorithm::DatadrivenDc => "datadriven_dc",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tane" => Ok(Algorithm::Tane),
            "fastfds" => Ok(Algorithm::FastFds),
            "hyfd" => Ok(Algorithm::HyFd),
            "datadriven" | "datadriven_dc" => Ok(Algorithm::DatadrivenDc),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// When a hybrid plan moves between sampling and validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwitchPolicy {
    /// Keep sampling while (tree changes / pairs compared) is at least this.
    pub epsilon: f64,
    /// After a validation level with failures, go back to sampling once
    /// the level validated more than this many candidates.
    pub validation_budget: usize,
    /// Bytes charged per work unit when comparing phase costs.
    pub lambda: f64,
}

impl Default for SwitchPolicy {
    fn default() -> Self {
        SwitchPolicy {
            epsilon: 0.01,
            validation_budget: 16,
            lambda: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanConfig {
    pub algorithm: Algorithm,
    /// 1 or 2.
    pub ldp: u8,
    pub kind: DependencyKind,
    pub cluster: ClusterConfig,
    pub sampling_seed: u64,
    pub switch_policy: SwitchPolicy,
    /// Keep DCs no pair of values could ever satisfy.
    pub keep_trivial: bool,
}

impl PlanConfig {
    pub fn new(algorithm: Algorithm, ldp: u8, kind: DependencyKind, cluster: ClusterConfig) -> Self {
        PlanConfig {
            algorithm,
            ldp,
            kind,
            cluster,
            sampling_seed: 0,
            switch_policy: SwitchPolicy::default(),
            keep_trivial: false,
        }
    }

    pub fn validate(&self, r: &Relation) -> Result<()> {
        self.cluster.validate()?;
        if self.ldp != 1 && self.ldp != 2 {
            return Err(Error::Config(format!("ldp must be 1 or 2, got {}", self.ldp)));
        }
        use Algorithm::*;
        use DependencyKind::*;
        let ok = matches!(
            (self.algorithm, self.kind),
            (Tane, Fd | Ucc | Od) | (FastFds, Fd | Ucc | Dc) | (HyFd, Fd | Ucc) | (DatadrivenDc, Dc)
        );
        if !ok {
            return Err(Error::Config(format!(
                "{} does not discover {}",
                self.algorithm,
                self.kind.as_str()
            )));
        }
        if self.kind == Dc && self.ldp != 2 {
            return Err(Error::Config(
                "DC discovery needs every ordered pair, which only ldp 2's full self-join provides".into(),
            ));
        }
        if self.algorithm == HyFd && self.kind == Ucc && r.arity() >= 64 {
            return Err(Error::Config("hyfd ucc mode supports at most 63 attributes".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    DataDriven,
    SchemaDriven,
}

/// A run of consecutive rounds in one phase of a hybrid plan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseStep {
    pub phase: Phase,
    /// Sampling rounds or validated lattice levels.
    pub rounds: usize,
    /// Pair comparisons made while sampling.
    pub comparisons: u64,
    /// Candidates checked against the data while validating.
    pub validations: u64,
}

#[derive(Debug)]
pub struct DiscoveryResult {
    /// Canonically ordered minimal dependencies.
    pub dependencies: Vec<Dependency>,
    pub ledger: CostLedger,
    pub phase_trace: Vec<PhaseStep>,
    /// Plan-specific tallies (pairs compared, evidence sets, levels, ...).
    pub counters: BTreeMap<String, u64>,
}

impl DiscoveryResult {
    pub fn render(&self, r: &Relation) -> Vec<String> {
        self.dependencies
            .iter()
            .map(|d| d.render(r.attribute_names()))
            .collect()
    }

    /// Cost summary: job totals plus one row per stage.
    pub fn metrics_json(&self) -> serde_json::Value {
        json!({
            "X_bytes": self.ledger.x_bytes(),
            "Y_units": self.ledger.y_units(),
            "total_bytes": self.ledger.total_bytes(),
            "total_units": self.ledger.total_units(),
            "stages": self.ledger.report(),
        })
    }

    /// The full result document. Only `metrics` carries wall-clock
    /// times; everything else is a function of the input and config.
    pub fn to_json(&self, r: &Relation, config: &PlanConfig) -> serde_json::Value {
        let mut counts = serde_json::Map::new();
        counts.insert("dependencies".into(), self.dependencies.len().into());
        counts.insert("rows".into(), r.len().into());
        counts.insert("columns".into(), r.arity().into());
        for (name, v) in &self.counters {
            counts.insert(name.clone(), (*v).into());
        }
        json!({
            "config": config,
            "dependencies": self.render(r),
            "counts": counts,
            "phase_trace": self.phase_trace,
            "metrics": self.metrics_json(),
        })
    }
}

/// Run whichever plan `config` names.
pub fn run(r: &Relation, config: &PlanConfig) -> Result<DiscoveryResult> {
    config.validate(r)?;
    match config.algorithm {
        Algorithm::Tane => run_tane(r, config),
        Algorithm::FastFds | Algorithm::DatadrivenDc => run_fastfds(r, config),
        Algorithm::HyFd => run_hyfd(r, config),
    }
}
