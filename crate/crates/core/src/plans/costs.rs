use serde::Serialize;

use crate::cluster::wire;

/// What the hybrid plan knows when deciding its next phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseCostInput {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// Whether every worker already caches the relation.
    pub relation_cached: bool,
    /// Candidates at the next unvalidated tree level.
    pub next_level_candidates: usize,
    /// Bytes per work unit.
    pub lambda: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhaseCosts {
    pub data_driven: f64,
    pub schema_driven: f64,
}

/// One more sampling round ships two groups of `n/k` rows to each worker
/// and compares `(n/k)²` pairs on `m` attributes. One more validation
/// level sends whatever of the relation is not yet cached and hashes all
/// `n` rows once per candidate.
pub fn estimate_phase_costs(s: &PhaseCostInput) -> PhaseCosts {
    let group = s.n as f64 / s.k.max(1) as f64;
    let m = s.m as f64;
    let data_bytes = 2.0 * group * m * wire::CODE as f64;
    let data_work = m * group * group;
    let schema_bytes = if s.relation_cached {
        0.0
    } else {
        wire::relation(s.n, s.m) as f64
    };
    let schema_work = s.next_level_candidates as f64 * s.n as f64;
    PhaseCosts {
        data_driven: data_bytes + s.lambda * data_work,
        schema_driven: schema_bytes + s.lambda * schema_work,
    }
}
