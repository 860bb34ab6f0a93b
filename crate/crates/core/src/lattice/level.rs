use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::fdtree::FdTree;
use crate::error::{Error, Result};
use crate::model::{AttributeSet, Dependency, DependencyKind, Direction, Partition, Relation};
use crate::primitives::{check_refinement, gen_eq_class, intersect_partitions, is_ucc, order_holds, RefinementInput};

#[derive(Clone, Debug)]
pub struct NodeInfo {
    /// `|π_X|`.
    pub class_count: usize,
    /// Kept only by plans that intersect partitions level to level.
    pub partition: Option<Arc<Partition>>,
    /// Attributes for which this node or a superset may still yield a
    /// minimal dependency.
    pub rhs_candidates: AttributeSet,
    pub is_key: bool,
}

impl NodeInfo {
    pub fn new(class_count: usize, partition: Option<Arc<Partition>>) -> Self {
        NodeInfo {
            class_count,
            partition,
            rhs_candidates: AttributeSet::EMPTY,
            is_key: false,
        }
    }
}

/// Nodes of one lattice level, keyed by attribute set.
#[derive(Clone, Debug, Default)]
pub struct LatticeLevel {
    pub level: usize,
    pub nodes: BTreeMap<AttributeSet, NodeInfo>,
}

impl LatticeLevel {
    pub fn new(level: usize) -> Self {
        LatticeLevel {
            level,
            nodes: BTreeMap::new(),
        }
    }

    /// The empty set's node: one class when there are rows, none otherwise.
    pub fn zero(n: usize) -> Self {
        let mut l = LatticeLevel::new(0);
        l.nodes.insert(AttributeSet::EMPTY, NodeInfo::new(usize::from(n > 0), None));
        l
    }

    pub fn insert(&mut self, set: AttributeSet, info: NodeInfo) {
        debug_assert_eq!(set.len(), self.level);
        self.nodes.insert(set, info);
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node sets in canonical order.
    pub fn sets(&self) -> Vec<AttributeSet> {
        let mut v: Vec<AttributeSet> = self.nodes.keys().copied().collect();
        v.sort_by(AttributeSet::canonical_cmp);
        v
    }

    pub fn count(&self, set: AttributeSet) -> Option<usize> {
        self.nodes.get(&set).map(|n| n.class_count)
    }
}

/// Level 1 computed locally; `keep_partitions` retains each `π_A`.
pub fn first_level(r: &Relation, keep_partitions: bool) -> LatticeLevel {
    let mut level = LatticeLevel::new(1);
    for a in 0..r.arity() {
        let p = gen_eq_class(AttributeSet::singleton(a), r);
        let count = p.class_count();
        level.insert(
            AttributeSet::singleton(a),
            NodeInfo::new(count, keep_partitions.then(|| Arc::new(p))),
        );
    }
    level
}

/// Prefix join: two sets of the level that agree on everything but their
/// last attribute combine into a set one larger, kept only if all its
/// subsets one smaller are in the level. Canonical order, no duplicates.
pub fn generate_next(level: &LatticeLevel) -> Vec<AttributeSet> {
    let sets = level.sets();
    let mut groups: BTreeMap<AttributeSet, Vec<AttributeSet>> = BTreeMap::new();
    for &s in &sets {
        let last = s.last().expect("generate_next needs non-empty sets");
        groups.entry(s.without(last)).or_default().push(s);
    }
    let mut out = Vec::new();
    for members in groups.values() {
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                let joined = a.union(*b);
                if joined.iter().all(|x| level.nodes.contains_key(&joined.without(x))) {
                    out.push(joined);
                }
            }
        }
    }
    out.sort_by(AttributeSet::canonical_cmp);
    out
}

/// One order check requested by the lattice: `lhs ~> rhs [direction]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrderTest {
    pub lhs: AttributeSet,
    pub rhs: usize,
    pub direction: Direction,
}

/// Work the lattice cannot do from the counts it already holds.
pub trait Evaluator {
    /// `|π_X|` for sets that are not nodes of the current level.
    fn counts(&mut self, sets: &[AttributeSet]) -> Result<Vec<usize>>;
    fn order_checks(&mut self, tests: &[OrderTest]) -> Result<Vec<bool>>;
}

/// Evaluates directly on a relation; used by tests and single-node runs.
pub struct LocalEvaluator<'a>(pub &'a Relation);

impl Evaluator for LocalEvaluator<'_> {
    fn counts(&mut self, sets: &[AttributeSet]) -> Result<Vec<usize>> {
        Ok(sets.iter().map(|&s| gen_eq_class(s, self.0).class_count()).collect())
    }

    fn order_checks(&mut self, tests: &[OrderTest]) -> Result<Vec<bool>> {
        Ok(tests
            .iter()
            .map(|t| order_holds(self.0, t.lhs, t.rhs, t.direction))
            .collect())
    }
}

/// What has been discovered so far; drives candidate pruning.
#[derive(Clone, Debug)]
pub struct PruneState {
    pub kind: DependencyKind,
    pub m: usize,
    pub n: usize,
    pub fds: FdTree,
    /// Order dependencies per direction (asc, desc).
    pub ods: [FdTree; 2],
    pub keys: Vec<AttributeSet>,
    /// Key pruning for FDs; unsound for ODs and never used there.
    pub key_pruning: bool,
}

impl PruneState {
    pub fn new(kind: DependencyKind, m: usize, n: usize) -> Result<Self> {
        if kind == DependencyKind::Dc {
            return Err(Error::Config("the lattice search does not discover DCs".into()));
        }
        Ok(PruneState {
            kind,
            m,
            n,
            fds: FdTree::new(m),
            ods: [FdTree::new(m), FdTree::new(m)],
            keys: Vec::new(),
            key_pruning: kind == DependencyKind::Fd,
        })
    }

    fn od_tree(&self, d: Direction) -> &FdTree {
        &self.ods[d as usize]
    }
}

/// Evaluate every node of `level` against `prev` (the level below, with
/// counts for each `X∖A`), record minimal dependencies, then drop keys
/// and nodes with no candidates left. The survivors feed
/// [`generate_next`].
pub fn compute_dependencies(
    level: &mut LatticeLevel,
    prev: &LatticeLevel,
    state: &mut PruneState,
    eval: &mut dyn Evaluator,
) -> Result<Vec<Dependency>> {
    let mut found = Vec::new();
    let n = state.n;
    for node in level.nodes.values_mut() {
        node.is_key = is_ucc(AttributeSet::EMPTY, node.class_count, n);
    }
    match state.kind {
        DependencyKind::Fd => fd_level(level, prev, state, eval, &mut found)?,
        DependencyKind::Ucc => {
            for (&x, node) in &level.nodes {
                if node.is_key && !x.is_empty() {
                    state.keys.push(x);
                    found.push(Dependency::ucc(x));
                }
            }
            level.nodes.retain(|_, node| !node.is_key);
        }
        DependencyKind::Od => od_level(level, state, eval, &mut found)?,
        DependencyKind::Dc => unreachable!("rejected by PruneState::new"),
    }
    Ok(found)
}

fn fd_level(
    level: &mut LatticeLevel,
    prev: &LatticeLevel,
    state: &mut PruneState,
    eval: &mut dyn Evaluator,
    found: &mut Vec<Dependency>,
) -> Result<()> {
    let m = state.m;
    for x in level.sets() {
        let count = level.nodes[&x].class_count;
        for a in x.iter() {
            let lhs = x.without(a);
            if state.fds.contains_generalization(lhs, a) {
                continue;
            }
            let left_count = prev.count(lhs).ok_or_else(|| {
                Error::Contract(format!("lattice node {x:?} has no parent {lhs:?}"))
            })?;
            let input = RefinementInput::CountBased {
                left_count,
                combined_count: count,
            };
            if check_refinement(lhs, a, input) {
                state.fds.insert(lhs, a);
                found.push(Dependency::fd(lhs, a));
            }
        }
    }

    if state.key_pruning {
        let keys: Vec<AttributeSet> = level
            .sets()
            .into_iter()
            .filter(|x| level.nodes[x].is_key && !x.is_empty())
            .collect();
        // (key, rhs) pairs still open, and the counts they need
        let mut open = Vec::new();
        let mut missing: Vec<AttributeSet> = Vec::new();
        for &x in &keys {
            for a in (0..m).filter(|&a| !x.contains(a)) {
                if state.fds.contains_generalization(x, a) {
                    continue;
                }
                for b in x.iter() {
                    let probe = x.without(b).with(a);
                    if level.count(probe).is_none() && !missing.contains(&probe) {
                        missing.push(probe);
                    }
                }
                open.push((x, a));
            }
        }
        let fetched: HashMap<AttributeSet, usize> = if missing.is_empty() {
            HashMap::new()
        } else {
            missing.iter().copied().zip(eval.counts(&missing)?).collect()
        };
        for (x, a) in open {
            let minimal = x.iter().all(|b| {
                let y = x.without(b);
                let combined = level
                    .count(y.with(a))
                    .or_else(|| fetched.get(&y.with(a)).copied())
                    .expect("count fetched above");
                let left = prev.count(y).expect("parent present");
                left != combined
            });
            if minimal {
                state.fds.insert(x, a);
                found.push(Dependency::fd(x, a));
            }
        }
        state.keys.extend(keys);
    }

    for (&x, node) in level.nodes.iter_mut() {
        node.rhs_candidates = (0..m)
            .filter(|&a| !state.fds.contains_generalization(x.without(a), a))
            .collect();
    }
    let prune_keys = state.key_pruning;
    level
        .nodes
        .retain(|&x, node| !(prune_keys && node.is_key && !x.is_empty()) && !node.rhs_candidates.is_empty());
    Ok(())
}

fn od_level(
    level: &mut LatticeLevel,
    state: &mut PruneState,
    eval: &mut dyn Evaluator,
    found: &mut Vec<Dependency>,
) -> Result<()> {
    let m = state.m;
    let mut tests = Vec::new();
    for x in level.sets() {
        if x.len() < 2 {
            continue;
        }
        for a in x.iter() {
            for direction in Direction::BOTH {
                let lhs = x.without(a);
                if !state.od_tree(direction).contains_generalization(lhs, a) {
                    tests.push(OrderTest { lhs, rhs: a, direction });
                }
            }
        }
    }
    let results = if tests.is_empty() {
        Vec::new()
    } else {
        eval.order_checks(&tests)?
    };
    for (t, holds) in tests.into_iter().zip(results) {
        if holds {
            state.ods[t.direction as usize].insert(t.lhs, t.rhs);
            found.push(Dependency::od(t.lhs, t.rhs, t.direction));
        }
    }
    for (&x, node) in level.nodes.iter_mut() {
        node.rhs_candidates = (0..m)
            .filter(|&a| {
                let lhs = x.without(a);
                Direction::BOTH
                    .iter()
                    .any(|&d| !state.od_tree(d).contains_generalization(lhs, a))
            })
            .collect();
    }
    level.nodes.retain(|_, node| !node.rhs_candidates.is_empty());
    Ok(())
}

/// Whole lattice search on one machine: the reference TANE loop the
/// distributed plans follow level by level. Partitions are kept and each
/// node's is the intersection of its two prefix parents'.
pub fn search_local(r: &Relation, kind: DependencyKind) -> Result<Vec<Dependency>> {
    let n = r.len();
    let mut state = PruneState::new(kind, r.arity(), n)?;
    let mut prev = LatticeLevel::zero(n);
    let mut level = first_level(r, true);
    let singles: Vec<Arc<Partition>> = level.nodes.values().map(partition_of).collect();
    let mut out = Vec::new();
    while !level.is_empty() {
        let mut eval = PartitionEvaluator {
            r,
            prev: &prev,
            singles: &singles,
        };
        out.extend(compute_dependencies(&mut level, &prev, &mut state, &mut eval)?);
        let mut next = LatticeLevel::new(level.level + 1);
        for s in generate_next(&level) {
            let last = s.last().expect("joined sets are non-empty");
            let second = s.without(last).last().expect("joined sets have two attributes");
            let p = intersect_partitions(
                &partition_of(&level.nodes[&s.without(last)]),
                &partition_of(&level.nodes[&s.without(second)]),
                n,
            );
            next.insert(s, NodeInfo::new(p.class_count(), Some(Arc::new(p))));
        }
        prev = level;
        level = next;
    }
    crate::model::canonicalize(&mut out);
    Ok(out)
}

fn partition_of(node: &NodeInfo) -> Arc<Partition> {
    node.partition.clone().expect("local search keeps partitions")
}

struct PartitionEvaluator<'a> {
    r: &'a Relation,
    prev: &'a LatticeLevel,
    singles: &'a [Arc<Partition>],
}

impl Evaluator for PartitionEvaluator<'_> {
    fn counts(&mut self, sets: &[AttributeSet]) -> Result<Vec<usize>> {
        Ok(sets
            .iter()
            .map(|&x| {
                let found = x.iter().find_map(|a| {
                    let node = self.prev.nodes.get(&x.without(a))?;
                    Some((a, node.partition.clone()?))
                });
                match found {
                    Some((a, left)) => intersect_partitions(&left, &self.singles[a], self.r.len()).class_count(),
                    None => gen_eq_class(x, self.r).class_count(),
                }
            })
            .collect())
    }

    fn order_checks(&mut self, tests: &[OrderTest]) -> Result<Vec<bool>> {
        LocalEvaluator(self.r).order_checks(tests)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn s(ix: &[usize]) -> AttributeSet {
        AttributeSet::from_indices(ix.iter().copied())
    }

    #[test]
    fn first_level_counts() {
        let l = first_level(&fixtures::four_rows(), false);
        let counts: Vec<usize> = (0..4).map(|a| l.count(s(&[a])).unwrap()).collect();
        assert_eq!(counts, vec![2, 3, 2, 3]);
        assert_eq!(first_level(&fixtures::tax(), false).len(), 11);
    }

    #[test]
    fn prefix_join_of_singletons() {
        let l = first_level(&fixtures::four_rows(), false);
        let next = generate_next(&l);
        assert_eq!(
            next,
            vec![s(&[0, 1]), s(&[0, 2]), s(&[0, 3]), s(&[1, 2]), s(&[1, 3]), s(&[2, 3])]
        );
    }

    #[test]
    fn worked_example_level_two() {
        let r = fixtures::four_rows();
        let mut state = PruneState::new(DependencyKind::Fd, 4, 4).unwrap();
        let mut eval = LocalEvaluator(&r);
        let zero = LatticeLevel::zero(4);
        let mut l1 = first_level(&r, false);
        compute_dependencies(&mut l1, &zero, &mut state, &mut eval).unwrap();
        let mut l2 = LatticeLevel::new(2);
        for x in generate_next(&l1) {
            l2.insert(x, NodeInfo::new(gen_eq_class(x, &r).class_count(), None));
        }
        let found = compute_dependencies(&mut l2, &l1, &mut state, &mut eval).unwrap();
        assert!(found.contains(&Dependency::fd(s(&[3]), 2)));
        assert!(!found.contains(&Dependency::fd(s(&[2]), 3)));
        for key in [s(&[0, 1]), s(&[0, 3]), s(&[1, 2]), s(&[1, 3])] {
            assert!(state.keys.contains(&key));
            assert!(!l2.nodes.contains_key(&key));
        }
        assert!(generate_next(&l2).is_empty());
    }

    #[test]
    fn ucc_mode_finds_area_code_phone() {
        let r = fixtures::tax();
        let uccs = search_local(&r, DependencyKind::Ucc).unwrap();
        let ac = r.attribute_index("AC").unwrap();
        let ph = r.attribute_index("PH").unwrap();
        assert!(uccs.contains(&Dependency::ucc(s(&[ac, ph]))));
    }

    #[test]
    fn od_mode_finds_salary_exemption() {
        let r = fixtures::tax();
        let ods = search_local(&r, DependencyKind::Od).unwrap();
        let sal = r.attribute_index("SAL").unwrap();
        let stx = r.attribute_index("STX").unwrap();
        assert!(ods.contains(&Dependency::od(s(&[sal]), stx, Direction::Desc)));
    }
}
