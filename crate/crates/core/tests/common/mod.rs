//! Seeded corpus shared by the acceptance and determinism suites.
#![allow(dead_code)]

use depdisc::cluster::ClusterConfig;
use depdisc::datagen::{random_relation, RandomSpec};
use depdisc::model::{DependencyKind, Relation};
use depdisc::plans::{Algorithm, PlanConfig};

pub const FD_ALGORITHMS: [Algorithm; 3] = [Algorithm::Tane, Algorithm::FastFds, Algorithm::HyFd];

/// Small enough that every spilling strategy is exercised.
pub const TIGHT_BUDGET: u64 = 256;

/// Relation `i` of a corpus capped at `max_rows` x `max_cols`. Row
/// count, width, domain size, skew and null rate all vary with `i`.
pub fn corpus_relation(i: u64, max_rows: usize, max_cols: usize) -> Relation {
    let rows = 2 + (i as usize * 37) % (max_rows - 1);
    let cols = 1 + (i as usize) % max_cols;
    let domain = 2 + (i as u32 * 7) % 9;
    let skew = (i % 4) as f64 * 0.6;
    let mut spec = RandomSpec::new(rows, cols, domain).skew(skew);
    if i.is_multiple_of(5) {
        spec = spec.nulls(0.1);
    }
    random_relation(&spec, 1000 + i)
}

pub fn fd_corpus() -> Vec<Relation> {
    (0..100).map(|i| corpus_relation(i, 150, 6)).collect()
}

pub fn od_corpus() -> Vec<Relation> {
    (0..100).map(|i| corpus_relation(i, 80, 5)).collect()
}

pub fn dc_corpus() -> Vec<Relation> {
    (0..100).map(|i| corpus_relation(i, 40, 3)).collect()
}

pub fn plan(alg: Algorithm, ldp: u8, kind: DependencyKind, k: usize, budget: u64, threads: usize) -> PlanConfig {
    let cluster = ClusterConfig::new(k)
        .expect("k >= 1")
        .with_budget(budget)
        .with_threads(threads);
    PlanConfig::new(alg, ldp, kind, cluster)
}
