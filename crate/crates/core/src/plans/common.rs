use std::collections::HashSet;

use crate::cluster::{distributed_group_by_many, scatter_round_robin, wire, BroadcastHandle, Cluster};
use crate::error::Result;
use crate::lattice::OrderTest;
use crate::model::{AttributeSet, Partition, Relation, RowId};
use crate::primitives::{gen_eq_class, order_holds};

/// Attributes on which two rows differ.
#[inline]
pub(crate) fn difference(r: &Relation, i: RowId, j: RowId) -> AttributeSet {
    let mut bits = 0u64;
    for (a, col) in r.columns().iter().enumerate() {
        let c = col.codes();
        if c[i as usize] != c[j as usize] {
            bits |= 1 << a;
        }
    }
    AttributeSet::from_bits(bits)
}

/// `π_A` for every attribute. Without a memory budget whole columns are
/// sent round-robin to workers; with one, each partition comes from a
/// hash exchange.
pub(crate) fn column_partitions(cluster: &mut Cluster, stage: &str, r: &Relation) -> Result<Vec<Partition>> {
    let m = r.arity();
    let sets: Vec<AttributeSet> = (0..m).map(AttributeSet::singleton).collect();
    if cluster.config().spilling() {
        return distributed_group_by_many(cluster, stage, r, &sets);
    }
    let assignment = scatter_round_robin(0..m, cluster.k());
    let mut ship = cluster.shipment();
    for (w, attrs) in assignment.iter().enumerate() {
        for _ in attrs {
            ship.from_storage(w, r.len() as u64 * wire::CODE);
        }
    }
    let per_worker = cluster.run_stage(stage, ship, assignment, |ctx, attrs| {
        attrs
            .into_iter()
            .map(|a| {
                ctx.add_work(r.len() as u64);
                (a, gen_eq_class(AttributeSet::singleton(a), r))
            })
            .collect::<Vec<_>>()
    })?;
    let mut out: Vec<Option<Partition>> = vec![None; m];
    for (a, p) in per_worker.into_iter().flatten() {
        out[a] = Some(p);
    }
    Ok(out.into_iter().map(|p| p.expect("every attribute assigned")).collect())
}

/// Merge per-worker evidence into one sorted, duplicate-free list.
pub(crate) fn merge_evidence<T: Ord + Clone + std::hash::Hash>(parts: Vec<HashSet<T>>) -> Vec<T> {
    let mut all: Vec<T> = parts.into_iter().flatten().collect();
    all.sort();
    all.dedup();
    all
}

/// Counts `|π_X|` straight from the data. Without a budget the relation
/// is broadcast once and each worker hashes its share of the sets; with
/// one, every level is a hash exchange.
#[derive(Debug, Default)]
pub(crate) struct DataCounter {
    relation: Option<BroadcastHandle>,
}

impl DataCounter {
    pub(crate) fn is_cached(&self, cluster: &Cluster) -> bool {
        self.relation
            .is_some_and(|h| (0..cluster.k()).all(|w| cluster.is_cached(h, w)))
    }

    pub(crate) fn counts(
        &mut self,
        cluster: &mut Cluster,
        stage: &str,
        r: &Relation,
        sets: &[AttributeSet],
    ) -> Result<Vec<usize>> {
        if sets.is_empty() {
            return Ok(Vec::new());
        }
        if cluster.config().spilling() {
            let parts = distributed_group_by_many(cluster, stage, r, sets)?;
            return Ok(parts.iter().map(Partition::class_count).collect());
        }
        let handle = *self
            .relation
            .get_or_insert_with(|| cluster.broadcast(wire::relation(r.len(), r.arity())));
        let assignment = scatter_round_robin(sets.iter().copied().enumerate(), cluster.k());
        let mut ship = cluster.shipment();
        for (w, items) in assignment.iter().enumerate() {
            if !items.is_empty() {
                cluster.use_broadcast(handle, &mut ship, w);
                ship.from_storage(w, items.len() as u64 * wire::ATTRSET);
            }
        }
        let n = r.len() as u64;
        let per_worker = cluster.run_stage(stage, ship, assignment, |ctx, items| {
            items
                .into_iter()
                .map(|(i, x)| {
                    ctx.add_work(n);
                    (i, gen_eq_class(x, r).class_count())
                })
                .collect::<Vec<_>>()
        })?;
        let mut out = vec![0; sets.len()];
        for (i, c) in per_worker.into_iter().flatten() {
            out[i] = c;
        }
        Ok(out)
    }

    /// Order checks: each needs the rows sorted on its left-hand side, so
    /// the worker reads the columns involved (or uses the broadcast copy).
    pub(crate) fn order_checks(
        &mut self,
        cluster: &mut Cluster,
        stage: &str,
        r: &Relation,
        tests: &[OrderTest],
        use_broadcast: bool,
    ) -> Result<Vec<bool>> {
        if tests.is_empty() {
            return Ok(Vec::new());
        }
        let broadcast = (use_broadcast && !cluster.config().spilling()).then(|| {
            *self
                .relation
                .get_or_insert_with(|| cluster.broadcast(wire::relation(r.len(), r.arity())))
        });
        let assignment = scatter_round_robin(tests.iter().copied().enumerate(), cluster.k());
        let mut ship = cluster.shipment();
        for (w, items) in assignment.iter().enumerate() {
            for (_, t) in items {
                match broadcast {
                    Some(h) => cluster.use_broadcast(h, &mut ship, w),
                    None => ship.from_storage(w, (r.len() * (t.lhs.len() + 1)) as u64 * wire::CODE),
                }
            }
        }
        let n = r.len() as u64;
        let per_worker = cluster.run_stage(stage, ship, assignment, |ctx, items| {
            items
                .into_iter()
                .map(|(i, t)| {
                    ctx.add_work(n);
                    (i, order_holds(r, t.lhs, t.rhs, t.direction))
                })
                .collect::<Vec<_>>()
        })?;
        let mut out = vec![false; tests.len()];
        for (i, ok) in per_worker.into_iter().flatten() {
            out[i] = ok;
        }
        Ok(out)
    }
}
