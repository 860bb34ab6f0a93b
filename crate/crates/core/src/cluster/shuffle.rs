use std::collections::HashMap;

use super::layout::split_ranges;
use super::runtime::Cluster;
use super::wire;
use crate::error::Result;
use crate::model::{AttributeSet, Partition, Relation, RowId};

/// Fixed 64-bit mix (splitmix64 finalizer); stable across platforms and
/// runs, unlike the std hasher.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn hash_codes(codes: impl IntoIterator<Item = u32>) -> u64 {
    codes
        .into_iter()
        .fold(0x51_7cc1_b727_220a, |h, c| mix64(h ^ c as u64))
}

/// `π_X` by a hash exchange: each worker hashes the rows it stores on
/// their X codes, ships `(row id, codes)` to reducer `hash mod k`, and
/// reducers group what they receive. Runs as two stages named
/// `{stage}/map` and `{stage}/reduce`.
pub fn distributed_group_by(
    cluster: &mut Cluster,
    stage: &str,
    r: &Relation,
    x: AttributeSet,
) -> Result<Partition> {
    Ok(distributed_group_by_many(cluster, stage, r, &[x])?.remove(0))
}

/// Several independent group-bys sharing one map and one reduce stage.
pub fn distributed_group_by_many(
    cluster: &mut Cluster,
    stage: &str,
    r: &Relation,
    sets: &[AttributeSet],
) -> Result<Vec<Partition>> {
    let k = cluster.k();
    let n = r.len();
    let attrs: Vec<Vec<usize>> = sets.iter().map(|x| x.iter().collect()).collect();
    let key = |s: usize, row: RowId| attrs[s].iter().map(move |&a| r.code(row, a));

    // rows rest on workers in contiguous ranges; routing reads them locally
    let ranges = split_ranges(n, k);
    let routed: Vec<Vec<Vec<(u32, RowId)>>> =
        cluster.run_stage(&format!("{stage}/map"), cluster.shipment(), ranges, |ctx, range| {
            let mut out = vec![Vec::new(); k];
            for s in 0..sets.len() {
                for row in range.clone() {
                    let row = row as RowId;
                    let h = mix64(hash_codes(key(s, row)) ^ s as u64);
                    out[(h % k as u64) as usize].push((s as u32, row));
                }
            }
            ctx.add_work((sets.len() * range.len()) as u64);
            out
        })?;

    let mut ship = cluster.shipment();
    let mut inbound: Vec<Vec<(u32, RowId)>> = vec![Vec::new(); k];
    for (from, parts) in routed.into_iter().enumerate() {
        for (to, records) in parts.into_iter().enumerate() {
            let bytes: u64 = records.iter().map(|&(s, _)| wire::row(attrs[s as usize].len())).sum();
            ship.shuffle(from, to, bytes);
            inbound[to].extend(records);
        }
    }
    let groups: Vec<Vec<(u32, Vec<RowId>)>> =
        cluster.run_stage(&format!("{stage}/reduce"), ship, inbound, |ctx, records| {
            ctx.add_work(records.len() as u64);
            let mut by_key: HashMap<(u32, Vec<u32>), Vec<RowId>> = HashMap::new();
            for (s, row) in records {
                by_key.entry((s, key(s as usize, row).collect())).or_default().push(row);
            }
            by_key.into_iter().map(|((s, _), rows)| (s, rows)).collect()
        })?;
    let mut per_set: Vec<Vec<Vec<RowId>>> = vec![Vec::new(); sets.len()];
    for (s, rows) in groups.into_iter().flatten() {
        per_set[s as usize].push(rows);
    }
    Ok(sets
        .iter()
        .zip(per_set)
        .map(|(&x, g)| Partition::from_groups(x, g))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::ClusterConfig;
    use crate::fixtures;
    use crate::primitives::gen_eq_class;

    #[test]
    fn matches_local_partition() {
        let r = fixtures::four_rows();
        let mut c = Cluster::new(ClusterConfig::new(2).unwrap()).unwrap();
        let a = AttributeSet::singleton(0);
        assert_eq!(distributed_group_by(&mut c, "g", &r, a).unwrap(), gen_eq_class(a, &r));
    }

    #[test]
    fn constant_column_lands_on_one_reducer() {
        let n = 40;
        let r = Relation::from_int_columns("c", ["A"], vec![vec![7; n]]);
        let mut c = Cluster::new(ClusterConfig::new(4).unwrap()).unwrap();
        let p = distributed_group_by(&mut c, "g", &r, AttributeSet::singleton(0)).unwrap();
        assert_eq!(p.class_count(), 1);
        let reduce = &c.ledger().stages()[1];
        assert_eq!(reduce.x_bytes(), n as u64 * wire::row(1));
        assert_eq!(reduce.total_bytes(), n as u64 * wire::row(1));
        assert_eq!(reduce.bytes_received.iter().filter(|&&b| b > 0).count(), 1);
    }
}
