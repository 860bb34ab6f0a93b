use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::common::{column_partitions, DataCounter};
use super::{DiscoveryResult, PlanConfig};
use crate::cluster::{scatter_round_robin, split_ranges, triangle_self_join, wire, Cluster};
use crate::error::Result;
use crate::lattice::{
    compute_dependencies, generate_next, Evaluator, LatticeLevel, NodeInfo, OrderTest, PruneState,
};
use crate::model::{canonicalize, AttributeSet, Partition, Relation};
use crate::primitives::{intersect_partitions, intersection_work};

type Shared = Arc<Partition>;

/// Level-wise lattice search. LDP1 keeps every node's partition and
/// builds the next level by intersecting the two prefix parents; LDP2
/// keeps only counts and recomputes each level from the data.
pub fn run_tane(r: &Relation, config: &PlanConfig) -> Result<DiscoveryResult> {
    config.validate(r)?;
    let mut exec = Exec {
        r,
        cluster: Cluster::new(config.cluster.clone())?,
        keep_partitions: config.ldp == 1,
        counter: DataCounter::default(),
        level_one: Vec::new(),
        prev_parts: HashMap::new(),
        stage: String::new(),
    };
    let mut counters = BTreeMap::new();
    let mut state = PruneState::new(config.kind, r.arity(), r.len())?;
    let mut prev = LatticeLevel::zero(r.len());
    let mut level = exec.first_level()?;
    let mut found = Vec::new();
    while !level.is_empty() {
        *counters.entry("levels".to_owned()).or_insert(0) += 1;
        *counters.entry("lattice_nodes".to_owned()).or_insert(0) += level.len() as u64;
        exec.stage = format!("tane/l{}", level.level);
        exec.prev_parts = partitions_of(&prev);
        found.extend(compute_dependencies(&mut level, &prev, &mut state, &mut exec)?);
        let candidates = generate_next(&level);
        let next = exec.next_level(&level, candidates)?;
        prev = level;
        level = next;
    }
    canonicalize(&mut found);
    Ok(DiscoveryResult {
        dependencies: found,
        ledger: exec.cluster.into_ledger(),
        phase_trace: Vec::new(),
        counters,
    })
}

fn partitions_of(level: &LatticeLevel) -> HashMap<AttributeSet, Shared> {
    level
        .nodes
        .iter()
        .filter_map(|(&x, n)| n.partition.clone().map(|p| (x, p)))
        .collect()
}

struct Exec<'a> {
    r: &'a Relation,
    cluster: Cluster,
    keep_partitions: bool,
    counter: DataCounter,
    level_one: Vec<Shared>,
    prev_parts: HashMap<AttributeSet, Shared>,
    stage: String,
}

impl Exec<'_> {
    fn first_level(&mut self) -> Result<LatticeLevel> {
        let m = self.r.arity();
        let mut level = LatticeLevel::new(1);
        if self.keep_partitions {
            let parts = column_partitions(&mut self.cluster, "tane/l1/partitions", self.r)?;
            self.level_one = parts.into_iter().map(Arc::new).collect();
            for (a, p) in self.level_one.iter().enumerate() {
                level.insert(AttributeSet::singleton(a), NodeInfo::new(p.class_count(), Some(p.clone())));
            }
        } else {
            let sets: Vec<AttributeSet> = (0..m).map(AttributeSet::singleton).collect();
            let counts = self.counter.counts(&mut self.cluster, "tane/l1/counts", self.r, &sets)?;
            for (x, c) in sets.into_iter().zip(counts) {
                level.insert(x, NodeInfo::new(c, None));
            }
        }
        Ok(level)
    }

    fn next_level(&mut self, level: &LatticeLevel, candidates: Vec<AttributeSet>) -> Result<LatticeLevel> {
        let mut next = LatticeLevel::new(level.level + 1);
        if candidates.is_empty() {
            return Ok(next);
        }
        let stage = format!("tane/l{}", next.level);
        if self.keep_partitions {
            let parts = if self.cluster.config().spilling() {
                let jobs = candidates
                    .iter()
                    .map(|&x| {
                        let (y, z) = prefix_parents(x);
                        (part(level, y), part(level, z))
                    })
                    .collect();
                self.intersect_streamed(&format!("{stage}/intersect"), jobs)?
            } else {
                self.intersect_triangle(&format!("{stage}/intersect"), level, &candidates)?
            };
            for (x, p) in candidates.into_iter().zip(parts) {
                next.insert(x, NodeInfo::new(p.class_count(), Some(Arc::new(p))));
            }
        } else {
            let counts = self
                .counter
                .counts(&mut self.cluster, &format!("{stage}/counts"), self.r, &candidates)?;
            for (x, c) in candidates.into_iter().zip(counts) {
                next.insert(x, NodeInfo::new(c, None));
            }
        }
        Ok(next)
    }

    /// Level nodes are cut into `l` chunks; the worker owning cell
    /// `(p, q)` receives chunks `p` and `q` and intersects every candidate
    /// whose two parents fall in them.
    fn intersect_triangle(
        &mut self,
        stage: &str,
        level: &LatticeLevel,
        candidates: &[AttributeSet],
    ) -> Result<Vec<Partition>> {
        let k = self.cluster.k();
        let sets = level.sets();
        let side = crate::cluster::TriangleLayout::new(k)?.side();
        let ranges = split_ranges(sets.len(), side);
        let mut chunk_of = HashMap::new();
        let mut chunks: Vec<Vec<AttributeSet>> = vec![Vec::new(); side];
        for (c, range) in ranges.iter().enumerate() {
            for &x in &sets[range.clone()] {
                chunk_of.insert(x, c);
                chunks[c].push(x);
            }
        }
        let (tasks, layout) = triangle_self_join(&chunks, k)?;
        let mut inputs: Vec<Vec<(usize, Shared, Shared)>> = vec![Vec::new(); tasks.len()];
        for (i, &x) in candidates.iter().enumerate() {
            let (y, z) = prefix_parents(x);
            let w = layout.worker_of(chunk_of[&y], chunk_of[&z]);
            inputs[w].push((i, part(level, y), part(level, z)));
        }
        let chunk_bytes: Vec<u64> = chunks
            .iter()
            .map(|c| wire::LEN + c.iter().map(|&x| wire::partition(&part(level, x))).sum::<u64>())
            .collect();
        let mut ship = self.cluster.shipment();
        for task in &tasks {
            if !inputs[task.worker].is_empty() {
                for c in task.chunk_ids() {
                    ship.from_storage(task.worker, chunk_bytes[c]);
                }
            }
        }
        let n = self.r.len();
        let out = self.cluster.run_stage(stage, ship, inputs, |ctx, jobs| {
            jobs.into_iter()
                .map(|(i, y, z)| {
                    ctx.add_work(intersection_work(&y, &z));
                    (i, intersect_partitions(&y, &z, n))
                })
                .collect::<Vec<_>>()
        })?;
        Ok(collect_indexed(out, candidates.len()))
    }

    /// One intersection per job, jobs dealt round-robin. Both operands
    /// are streamed in; when they do not fit the budget together, the
    /// left one is re-read once per pass over the right one.
    fn intersect_streamed(&mut self, stage: &str, jobs: Vec<(Shared, Shared)>) -> Result<Vec<Partition>> {
        let total = jobs.len();
        let budget = self.cluster.config().memory_budget;
        let assignment = scatter_round_robin(jobs.into_iter().enumerate(), self.cluster.k());
        let mut ship = self.cluster.shipment();
        for (w, items) in assignment.iter().enumerate() {
            for (_, (y, z)) in items {
                let (by, bz) = (wire::partition(y), wire::partition(z));
                let bytes = if self.cluster.config().fits(by + bz) {
                    by + bz
                } else {
                    by * (by + bz).div_ceil(budget) + bz
                };
                ship.from_storage(w, bytes);
            }
        }
        let n = self.r.len();
        let out = self.cluster.run_stage(stage, ship, assignment, |ctx, jobs| {
            jobs.into_iter()
                .map(|(i, (y, z))| {
                    ctx.add_work(intersection_work(&y, &z));
                    (i, intersect_partitions(&y, &z, n))
                })
                .collect::<Vec<_>>()
        })?;
        Ok(collect_indexed(out, total))
    }
}

impl Evaluator for Exec<'_> {
    /// Counts for key pruning: `Y ∪ {A}` with `Y` on the previous level.
    fn counts(&mut self, sets: &[AttributeSet]) -> Result<Vec<usize>> {
        let stage = format!("{}/key-counts", self.stage);
        if !self.keep_partitions {
            return self.counter.counts(&mut self.cluster, &stage, self.r, sets);
        }
        let jobs = sets
            .iter()
            .map(|&x| {
                let (a, left) = x
                    .iter()
                    .find_map(|a| self.prev_parts.get(&x.without(a)).map(|p| (a, p.clone())))
                    .expect("some parent kept on the previous level");
                (left, self.level_one[a].clone())
            })
            .collect();
        Ok(self
            .intersect_streamed(&stage, jobs)?
            .iter()
            .map(Partition::class_count)
            .collect())
    }

    fn order_checks(&mut self, tests: &[OrderTest]) -> Result<Vec<bool>> {
        let stage = format!("{}/order", self.stage);
        let broadcast = !self.keep_partitions;
        self.counter
            .order_checks(&mut self.cluster, &stage, self.r, tests, broadcast)
    }
}

/// The two sets of the level below that share all but their last element.
fn prefix_parents(x: AttributeSet) -> (AttributeSet, AttributeSet) {
    let last = x.last().expect("candidate has at least two attributes");
    let second = x.without(last).last().expect("candidate has at least two attributes");
    (x.without(last), x.without(second))
}

fn part(level: &LatticeLevel, x: AttributeSet) -> Shared {
    level.nodes[&x]
        .partition
        .clone()
        .expect("partition kept for every node")
}

fn collect_indexed<T>(per_worker: Vec<Vec<(usize, T)>>, len: usize) -> Vec<T> {
    let mut slots: Vec<Option<T>> = (0..len).map(|_| None).collect();
    for (i, t) in per_worker.into_iter().flatten() {
        slots[i] = Some(t);
    }
    slots.into_iter().map(|t| t.expect("every job ran")).collect()
}
