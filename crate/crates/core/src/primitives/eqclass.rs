use std::collections::HashMap;

use crate::model::{AttributeSet, Partition, Relation, RowId};

/// Compute `π_X` directly from the data by hashing each row's X-codes.
///
/// The empty attribute set yields a single class holding every row.
pub fn gen_eq_class(attrs: AttributeSet, r: &Relation) -> Partition {
    let n = r.len();
    let labels = row_labels(attrs, r);
    let mut groups: Vec<Vec<RowId>> = Vec::new();
    for (row, &label) in labels.iter().enumerate().take(n) {
        let label = label as usize;
        if label == groups.len() {
            groups.push(Vec::new());
        }
        groups[label].push(row as RowId);
    }
    // labels are handed out in first-appearance order, so groups are
    // already ordered by their smallest row and internally sorted
    let mut stripped = 0;
    let classes = groups
        .into_iter()
        .filter(|g| {
            if g.len() == 1 {
                stripped += 1;
                false
            } else {
                true
            }
        })
        .collect();
    Partition::from_canonical(attrs, classes, stripped)
}

/// Dense per-row labels such that two rows share a label iff they agree on
/// every attribute in `attrs`. Labels are numbered by first appearance.
pub fn row_labels(attrs: AttributeSet, r: &Relation) -> Vec<u32> {
    let n = r.len();
    let mut iter = attrs.iter();
    let Some(first) = iter.next() else {
        return vec![0; n];
    };
    let mut labels = relabel(r.column(first).codes().iter().copied(), n);
    for a in iter {
        let codes = r.column(a).codes();
        labels = relabel(labels.iter().zip(codes).map(|(&l, &c)| ((l as u64) << 32) | c as u64), n);
    }
    labels
}

fn relabel<K: std::hash::Hash + Eq + Copy>(keys: impl Iterator<Item = K>, n: usize) -> Vec<u32> {
    let mut map: HashMap<K, u32> = HashMap::with_capacity(n.min(1 << 16));
    keys.map(|k| {
        let next = map.len() as u32;
        *map.entry(k).or_insert(next)
    })
    .collect()
}

/// Intersect two stripped partitions of the same `n` rows with a probe
/// table: rows are labelled by their class in `left`, then regrouped inside
/// each class of `right`.
pub fn intersect_partitions(left: &Partition, right: &Partition, n: usize) -> Partition {
    let attrs = left.attributes().union(right.attributes());
    let labels = left.labels(n);
    let mut buckets: Vec<Vec<RowId>> = vec![Vec::new(); left.classes().len()];
    let mut classes = Vec::new();
    for class in right.classes() {
        for &row in class {
            let l = labels[row as usize];
            if l != u32::MAX {
                buckets[l as usize].push(row);
            }
        }
        for &row in class {
            let l = labels[row as usize];
            if l == u32::MAX {
                continue;
            }
            let bucket = &mut buckets[l as usize];
            if bucket.len() >= 2 {
                classes.push(std::mem::take(bucket));
            } else {
                bucket.clear();
            }
        }
    }
    // rows inside each class are ascending because `right`'s classes are
    let stored: usize = classes.iter().map(Vec::len).sum();
    classes.sort_unstable_by_key(|c: &Vec<RowId>| c[0]);
    Partition::from_canonical(attrs, classes, n - stored)
}

/// Rows scanned by [`intersect_partitions`]; used as its work measure.
pub fn intersection_work(left: &Partition, right: &Partition) -> u64 {
    (left.stored_rows() + right.stored_rows()) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn partitions_of_worked_example() {
        let r = fixtures::four_rows();
        let p = |a| gen_eq_class(AttributeSet::singleton(a), &r);
        // rows are 0-based here, 1-based in the worked example
        assert_eq!(p(0).classes(), &[vec![0, 2], vec![1, 3]]);
        assert_eq!(p(0).class_count(), 2);
        assert_eq!(p(1).classes(), &[vec![2, 3]]);
        assert_eq!(p(1).stripped_singletons(), 2);
        assert_eq!(p(1).class_count(), 3);
        assert_eq!(p(2).classes(), &[vec![0, 1, 2]]);
        assert_eq!(p(3).class_count(), 3);
    }

    #[test]
    fn intersection_of_c_and_d() {
        let r = fixtures::four_rows();
        let pc = gen_eq_class(AttributeSet::singleton(2), &r);
        let pd = gen_eq_class(AttributeSet::singleton(3), &r);
        let cd = intersect_partitions(&pc, &pd, r.len());
        assert_eq!(cd.classes(), &[vec![0, 1]]);
        assert_eq!(cd.stripped_singletons(), 2);
        assert_eq!(cd.class_count(), 3);
        assert_eq!(cd.attributes(), AttributeSet::from_indices([2, 3]));
    }

    #[test]
    fn intersection_is_idempotent() {
        let r = fixtures::tax();
        for a in 0..r.arity() {
            let p = gen_eq_class(AttributeSet::singleton(a), &r);
            assert_eq!(intersect_partitions(&p, &p, r.len()), p);
        }
    }

    #[test]
    fn empty_relation_has_no_classes() {
        let r = fixtures::four_rows().select_rows("empty", &[]);
        let p = gen_eq_class(AttributeSet::singleton(0), &r);
        assert_eq!(p.class_count(), 0);
        assert_eq!(gen_eq_class(AttributeSet::EMPTY, &r).class_count(), 0);
    }

    #[test]
    fn empty_attribute_set_is_one_class() {
        let r = fixtures::four_rows();
        assert_eq!(gen_eq_class(AttributeSet::EMPTY, &r).class_count(), 1);
    }
}
