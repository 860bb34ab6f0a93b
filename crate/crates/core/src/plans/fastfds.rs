use std::collections::{BTreeMap, HashSet};
use std::ops::Range;

use super::common::{column_partitions, difference, merge_evidence};
use super::{DiscoveryResult, PlanConfig};
use crate::cluster::{block_distribute, split_ranges, triangle_self_join, wire, BlockTask, Cluster, TriangleLayout};
use crate::error::Result;
use crate::model::{canonicalize, AttributeSet, DependencyKind, EvidenceSet, PredicateSpace, Relation, RowId};
use crate::primitives::{dcs_from_evidence, fds_from_evidence, gen_ev_set, uccs_from_evidence};

/// Evidence collected by one worker.
#[derive(Default)]
struct Found {
    diffs: HashSet<AttributeSet>,
    preds: HashSet<EvidenceSet>,
}

/// What a pair contributes.
#[derive(Clone, Copy)]
enum Mode<'a> {
    Difference,
    /// Both orientations of the pair in the full predicate space.
    Predicates(&'a PredicateSpace),
}

impl Mode<'_> {
    fn record(self, r: &Relation, i: RowId, j: RowId, out: &mut Found) {
        match self {
            Mode::Difference => {
                out.diffs.insert(difference(r, i, j));
            }
            Mode::Predicates(space) => {
                out.preds.insert(gen_ev_set(i, j, r, space));
                out.preds.insert(gen_ev_set(j, i, r, space));
            }
        }
    }
}

/// Pair-comparison discovery: gather evidence from tuple pairs, then
/// derive minimal covers at the driver. LDP1 compares only pairs that
/// share a value on some attribute; LDP2 compares every pair.
pub fn run_fastfds(r: &Relation, config: &PlanConfig) -> Result<DiscoveryResult> {
    config.validate(r)?;
    let mut cluster = Cluster::new(config.cluster.clone())?;
    let m = r.arity();
    let space = (config.kind == DependencyKind::Dc).then(|| PredicateSpace::dc_full(r));
    let mode = match &space {
        Some(s) => Mode::Predicates(s),
        None => Mode::Difference,
    };
    let (found, pairs) = if config.ldp == 1 {
        block_evidence(&mut cluster, r, mode)?
    } else {
        self_join_evidence(&mut cluster, r, mode)?
    };

    let mut counters = BTreeMap::new();
    counters.insert("pair_comparisons".to_owned(), pairs);
    let mut dependencies = match config.kind {
        DependencyKind::Dc => {
            let evidence = merge_evidence(found.into_iter().map(|f| f.preds).collect());
            counters.insert("evidence_sets".to_owned(), evidence.len() as u64);
            dcs_from_evidence(&evidence, space.as_ref().expect("dc space"), config.keep_trivial)
        }
        kind => {
            let mut evidence = merge_evidence(found.into_iter().map(|f| f.diffs).collect());
            counters.insert("evidence_sets".to_owned(), evidence.len() as u64);
            if config.ldp == 1 && kind == DependencyKind::Fd {
                // pairs sharing no value were never compared; stand in for
                // them with the widest difference any pair could have
                let varying: AttributeSet = (0..m).filter(|&a| r.column(a).distinct_count() > 1).collect();
                if !varying.is_empty() && r.len() >= 2 {
                    evidence.push(varying);
                }
            }
            if kind == DependencyKind::Ucc {
                uccs_from_evidence(&evidence, m)
            } else {
                fds_from_evidence(&evidence, m)
            }
        }
    };
    canonicalize(&mut dependencies);
    Ok(DiscoveryResult {
        dependencies,
        ledger: cluster.into_ledger(),
        phase_trace: Vec::new(),
        counters,
    })
}

/// Every class of every single-attribute partition is a block; pairs
/// inside a block are compared. Blocks are placed by weight; without a
/// budget a whole task is held in memory, with one, oversized blocks are
/// cut into row chunks that fit half the budget and streamed pairwise.
fn block_evidence(cluster: &mut Cluster, r: &Relation, mode: Mode<'_>) -> Result<(Vec<Found>, u64)> {
    let k = cluster.k();
    let parts = column_partitions(cluster, "fastfds/partitions", r)?;
    let blocks: Vec<Vec<RowId>> = parts.into_iter().flat_map(|p| p.into_classes()).collect();
    let row_bytes = wire::row(r.arity());
    let tasks = if cluster.config().spilling() {
        let chunk_rows = ((cluster.config().memory_budget / 2) / row_bytes).max(1) as usize;
        chunked_block_tasks(&blocks, k, chunk_rows)
    } else {
        block_distribute(&blocks, k)
    };
    let pairs: u64 = tasks.iter().flatten().map(BlockTask::pair_count).sum();
    let mut ship = cluster.shipment();
    for (w, ts) in tasks.iter().enumerate() {
        for t in ts {
            ship.from_storage(w, t.row_count() as u64 * row_bytes);
        }
    }
    let blocks = &blocks;
    let found = cluster.run_stage("fastfds/evidence", ship, tasks, |ctx, ts| {
        let mut out = Found::default();
        for t in ts {
            ctx.add_work(t.pair_count());
            t.for_each_pair(&blocks[t.block], |i, j| mode.record(r, i, j, &mut out));
        }
        out
    })?;
    Ok((found, pairs))
}

/// Split blocks larger than `chunk_rows` into chunks and emit one task
/// per unordered chunk pair (diagonal included), then pack all tasks
/// heaviest first onto the least-loaded worker.
fn chunked_block_tasks(blocks: &[Vec<RowId>], k: usize, chunk_rows: usize) -> Vec<Vec<BlockTask>> {
    let mut all = Vec::new();
    for (b, rows) in blocks.iter().enumerate() {
        let c = rows.len().div_ceil(chunk_rows).max(1);
        let ranges = split_ranges(rows.len(), c);
        for p in 0..c {
            for q in p..c {
                all.push(BlockTask {
                    block: b,
                    left: ranges[p].clone(),
                    right: ranges[q].clone(),
                });
            }
        }
    }
    all.sort_by(|a, b| b.pair_count().cmp(&a.pair_count()).then(a.block.cmp(&b.block)));
    let mut load = vec![0u64; k];
    let mut out: Vec<Vec<BlockTask>> = vec![Vec::new(); k];
    for t in all.into_iter().filter(|t| t.pair_count() > 0) {
        let w = (0..k).min_by_key(|&w| (load[w], w)).expect("k >= 1");
        load[w] += t.pair_count();
        out[w].push(t);
    }
    out
}

/// All pairs of the relation. Without a budget this is the triangle
/// layout over `l` row chunks; with one, rows are cut into chunks that
/// fit half the budget and every chunk pair `(i, j)`, `i <= j`, is a
/// task streamed on its own.
fn self_join_evidence(cluster: &mut Cluster, r: &Relation, mode: Mode<'_>) -> Result<(Vec<Found>, u64)> {
    let k = cluster.k();
    let n = r.len();
    let row_bytes = wire::row(r.arity());
    let rows: Vec<RowId> = (0..n as RowId).collect();
    if !cluster.config().spilling() {
        let side = TriangleLayout::new(k)?.side();
        let chunks: Vec<Vec<RowId>> = split_ranges(n, side).into_iter().map(|c| rows[c].to_vec()).collect();
        let (tasks, _) = triangle_self_join(&chunks, k)?;
        let pairs = tasks.iter().map(|t| t.pair_count(&chunks)).sum();
        let mut ship = cluster.shipment();
        for t in &tasks {
            for c in t.chunk_ids() {
                ship.from_storage(t.worker, chunks[c].len() as u64 * row_bytes);
            }
        }
        let chunks = &chunks;
        let found = cluster.run_stage("fastfds/self-join", ship, tasks, |ctx, t| {
            let mut out = Found::default();
            ctx.add_work(t.pair_count(chunks));
            t.for_each_pair(chunks, |i, j| mode.record(r, i, j, &mut out));
            out
        })?;
        return Ok((found, pairs));
    }
    let chunk_rows = ((cluster.config().memory_budget / 2) / row_bytes).max(1) as usize;
    let ranges: Vec<Range<usize>> = split_ranges(n, n.div_ceil(chunk_rows).max(1));
    let c = ranges.len();
    let whole = BlockTask {
        block: 0,
        left: 0..0,
        right: 0..0,
    };
    let mut tasks: Vec<Vec<BlockTask>> = vec![Vec::new(); k];
    let mut next = 0;
    for p in 0..c {
        for q in p..c {
            tasks[next % k].push(BlockTask {
                left: ranges[p].clone(),
                right: ranges[q].clone(),
                ..whole.clone()
            });
            next += 1;
        }
    }
    let pairs = tasks.iter().flatten().map(BlockTask::pair_count).sum();
    let mut ship = cluster.shipment();
    for (w, ts) in tasks.iter().enumerate() {
        for t in ts {
            ship.from_storage(w, t.row_count() as u64 * row_bytes);
        }
    }
    let rows = &rows;
    let found = cluster.run_stage("fastfds/self-join", ship, tasks, |ctx, ts| {
        let mut out = Found::default();
        for t in ts {
            ctx.add_work(t.pair_count());
            t.for_each_pair(rows, |i, j| mode.record(r, i, j, &mut out));
        }
        out
    })?;
    Ok((found, pairs))
}
