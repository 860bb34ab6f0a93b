//! Brute-force reference discovery. Everything here checks definitions
//! pair by pair and enumerates candidates exhaustively; it shares no
//! search code with the plans.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::model::{
    canonicalize, AttributeSet, ColumnKind, Dependency, DependencyKind, Direction, Op, Predicate,
    Relation,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_rows: usize,
    pub max_cols: usize,
    pub max_dc_predicates: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_rows: 500,
            max_cols: 8,
            max_dc_predicates: 3,
        }
    }
}

impl OracleLimits {
    pub fn check(&self, r: &Relation) -> Result<()> {
        if r.len() > self.max_rows {
            return Err(Error::Limit(format!(
                "{} rows exceeds the oracle limit of {}",
                r.len(),
                self.max_rows
            )));
        }
        if r.arity() > self.max_cols {
            return Err(Error::Limit(format!(
                "{} columns exceeds the oracle limit of {}",
                r.arity(),
                self.max_cols
            )));
        }
        Ok(())
    }
}

fn agree(r: &Relation, i: usize, j: usize, x: AttributeSet) -> bool {
    x.iter().all(|a| {
        let c = r.column(a).codes();
        c[i] == c[j]
    })
}

/// Lexicographic comparison of two rows on `x`, attributes in column
/// order. Codes are order-preserving with nulls lowest.
fn lex(r: &Relation, i: usize, j: usize, x: AttributeSet) -> Ordering {
    x.iter()
        .map(|a| {
            let c = r.column(a).codes();
            c[i].cmp(&c[j])
        })
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn predicate_true(r: &Relation, p: Predicate, i: usize, j: usize) -> bool {
    let col = r.column(p.attribute);
    let (a, b) = (col.codes()[i], col.codes()[j]);
    let ordered = !col.is_null(a) && !col.is_null(b);
    match p.op {
        Op::Eq => a == b,
        Op::Ne => a != b,
        Op::Lt => ordered && a < b,
        Op::Le => ordered && a <= b,
        Op::Gt => ordered && a > b,
        Op::Ge => ordered && a >= b,
    }
}

/// Check a dependency against its definition over every pair of rows.
pub fn holds(dep: &Dependency, r: &Relation) -> bool {
    let n = r.len();
    match dep {
        Dependency::Fd { lhs, rhs } => {
            let a = AttributeSet::singleton(*rhs);
            (0..n).all(|i| (i + 1..n).all(|j| !agree(r, i, j, *lhs) || agree(r, i, j, a)))
        }
        Dependency::Ucc { columns } => {
            (0..n).all(|i| (i + 1..n).all(|j| !agree(r, i, j, *columns)))
        }
        Dependency::Od {
            lhs,
            rhs,
            direction,
        } => {
            let a = AttributeSet::singleton(*rhs);
            (0..n).all(|i| {
                (0..n).all(|j| {
                    lex(r, i, j, *lhs) != Ordering::Less
                        || match direction {
                            Direction::Asc => lex(r, i, j, a) != Ordering::Greater,
                            Direction::Desc => lex(r, i, j, a) != Ordering::Less,
                        }
                })
            })
        }
        Dependency::Dc { predicates } => (0..n).all(|i| {
            (0..n).all(|j| i == j || !predicates.iter().all(|&p| predicate_true(r, p, i, j)))
        }),
    }
}

/// Same answer as [`holds`]; FDs and UCCs are checked by grouping rows
/// instead of comparing all pairs, so it scales to large relations.
pub fn holds_fast(dep: &Dependency, r: &Relation) -> bool {
    let key = |row: usize, x: AttributeSet| -> Vec<u32> {
        x.iter().map(|a| r.column(a).codes()[row]).collect()
    };
    match dep {
        Dependency::Fd { lhs, rhs } => {
            let mut seen: HashMap<Vec<u32>, u32> = HashMap::new();
            (0..r.len()).all(|i| {
                let v = r.column(*rhs).codes()[i];
                *seen.entry(key(i, *lhs)).or_insert(v) == v
            })
        }
        Dependency::Ucc { columns } => {
            let mut seen = std::collections::HashSet::new();
            (0..r.len()).all(|i| seen.insert(key(i, *columns)))
        }
        _ => holds(dep, r),
    }
}

/// Fraction of `found` that holds on `r`; 1.0 for an empty list.
pub fn precision(found: &[Dependency], r: &Relation) -> f64 {
    if found.is_empty() {
        return 1.0;
    }
    let ok = found.iter().filter(|d| holds_fast(d, r)).count();
    ok as f64 / found.len() as f64
}

/// Every subset of `universe`, smallest first, then lexicographic.
fn subsets(universe: AttributeSet) -> Vec<AttributeSet> {
    let items: Vec<usize> = universe.iter().collect();
    let mut out: Vec<AttributeSet> = (0u64..1 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, &a)| a)
                .collect()
        })
        .collect();
    out.sort_by(AttributeSet::canonical_cmp);
    out
}

pub fn brute_fds(r: &Relation, limits: &OracleLimits) -> Result<Vec<Dependency>> {
    limits.check(r)?;
    let m = r.arity();
    let mut out = Vec::new();
    for a in 0..m {
        let mut accepted: Vec<AttributeSet> = Vec::new();
        for x in subsets(AttributeSet::full(m).without(a)) {
            if accepted.iter().any(|z| z.is_subset_of(x)) {
                continue;
            }
            if holds(&Dependency::fd(x, a), r) {
                accepted.push(x);
                out.push(Dependency::fd(x, a));
            }
        }
    }
    canonicalize(&mut out);
    Ok(out)
}

/// Minimal non-empty unique column combinations.
pub fn brute_uccs(r: &Relation, limits: &OracleLimits) -> Result<Vec<Dependency>> {
    limits.check(r)?;
    let mut accepted: Vec<AttributeSet> = Vec::new();
    for x in subsets(AttributeSet::full(r.arity())) {
        if x.is_empty() || accepted.iter().any(|z| z.is_subset_of(x)) {
            continue;
        }
        if holds(&Dependency::ucc(x), r) {
            accepted.push(x);
        }
    }
    let mut out: Vec<Dependency> = accepted.into_iter().map(Dependency::ucc).collect();
    canonicalize(&mut out);
    Ok(out)
}

/// Minimal ODs `X ~> A` with non-empty `X` not containing `A`, per
/// direction.
pub fn brute_ods(r: &Relation, limits: &OracleLimits) -> Result<Vec<Dependency>> {
    limits.check(r)?;
    let m = r.arity();
    let mut out = Vec::new();
    for a in 0..m {
        for direction in Direction::BOTH {
            let mut accepted: Vec<AttributeSet> = Vec::new();
            for x in subsets(AttributeSet::full(m).without(a)) {
                if x.is_empty() || accepted.iter().any(|z| z.is_subset_of(x)) {
                    continue;
                }
                let od = Dependency::od(x, a, direction);
                if holds(&od, r) {
                    accepted.push(x);
                    out.push(od);
                }
            }
        }
    }
    canonicalize(&mut out);
    Ok(out)
}

/// True when no two values could satisfy every predicate at once, found
/// by trying each comparison outcome per attribute.
pub fn is_trivial(predicates: &[Predicate]) -> bool {
    let mut attrs: Vec<usize> = predicates.iter().map(|p| p.attribute).collect();
    attrs.dedup();
    attrs.iter().any(|&a| {
        [Ordering::Less, Ordering::Equal, Ordering::Greater]
            .iter()
            .all(|&o| {
                !predicates.iter().filter(|p| p.attribute == a).all(|p| match p.op {
                    Op::Eq => o.is_eq(),
                    Op::Ne => o.is_ne(),
                    Op::Lt => o.is_lt(),
                    Op::Le => o.is_le(),
                    Op::Gt => o.is_gt(),
                    Op::Ge => o.is_ge(),
                })
            })
    })
}

/// Minimal DCs with at most `limits.max_dc_predicates` predicates over
/// single-attribute predicates (`=, !=` on categorical columns, all six
/// operators on numeric ones).
pub fn brute_dcs(r: &Relation, limits: &OracleLimits, keep_trivial: bool) -> Result<Vec<Dependency>> {
    limits.check(r)?;
    let mut space = Vec::new();
    for (a, col) in r.columns().iter().enumerate() {
        let ops: &[Op] = match col.kind() {
            ColumnKind::Categorical => &[Op::Eq, Op::Ne],
            ColumnKind::Numeric => &[Op::Eq, Op::Ne, Op::Lt, Op::Le, Op::Gt, Op::Ge],
        };
        space.extend(ops.iter().map(|&op| Predicate::new(a, op)));
    }
    let mut accepted: Vec<Vec<usize>> = Vec::new();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _size in 1..=limits.max_dc_predicates {
        let mut next = Vec::new();
        for base in &frontier {
            let start = base.last().map_or(0, |&l| l + 1);
            for p in start..space.len() {
                let mut cand = base.clone();
                cand.push(p);
                next.push(cand);
            }
        }
        for cand in &next {
            if accepted.iter().any(|acc| acc.iter().all(|x| cand.contains(x))) {
                continue;
            }
            let preds: Vec<Predicate> = cand.iter().map(|&i| space[i]).collect();
            if holds(&Dependency::dc(preds), r) {
                accepted.push(cand.clone());
            }
        }
        frontier = next;
    }
    let mut out: Vec<Dependency> = accepted
        .into_iter()
        .map(|c| c.into_iter().map(|i| space[i]).collect::<Vec<_>>())
        .filter(|preds| keep_trivial || !is_trivial(preds))
        .map(Dependency::dc)
        .collect();
    canonicalize(&mut out);
    Ok(out)
}

pub fn brute(kind: DependencyKind, r: &Relation, limits: &OracleLimits) -> Result<Vec<Dependency>> {
    match kind {
        DependencyKind::Fd => brute_fds(r, limits),
        DependencyKind::Ucc => brute_uccs(r, limits),
        DependencyKind::Od => brute_ods(r, limits),
        DependencyKind::Dc => brute_dcs(r, limits, false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn tax_limits() -> OracleLimits {
        OracleLimits {
            max_cols: 11,
            ..OracleLimits::default()
        }
    }

    #[test]
    fn definitional_checks() {
        let tax = fixtures::tax();
        let idx = |n| tax.attribute_index(n).unwrap();
        let zip_st = Dependency::fd(AttributeSet::singleton(idx("ZIP")), idx("ST"));
        assert!(holds(&zip_st, &tax));
        let fig = fixtures::four_rows();
        assert!(!holds(&Dependency::fd(AttributeSet::singleton(2), 3), &fig));
        let one = fig.select_rows("one", &[0]);
        assert!(holds(&Dependency::fd(AttributeSet::singleton(2), 3), &one));
    }

    #[test]
    fn worked_example_fds() {
        let fds = brute_fds(&fixtures::four_rows(), &OracleLimits::default()).unwrap();
        let s = |ix: &[usize]| AttributeSet::from_indices(ix.iter().copied());
        assert!(fds.contains(&Dependency::fd(s(&[3]), 2)));
        assert!(fds.contains(&Dependency::fd(s(&[1, 2]), 0)));
        assert!(fds.contains(&Dependency::fd(s(&[1, 3]), 0)));
        assert!(!fds.contains(&Dependency::fd(s(&[2]), 3)));
    }

    #[test]
    fn tax_uccs_need_raised_column_limit() {
        let tax = fixtures::tax();
        assert!(matches!(brute_uccs(&tax, &OracleLimits::default()), Err(Error::Limit(_))));
        let uccs = brute_uccs(&tax, &tax_limits()).unwrap();
        let idx = |n| tax.attribute_index(n).unwrap();
        assert!(uccs.contains(&Dependency::ucc(AttributeSet::from_indices([idx("AC"), idx("PH")]))));
        assert!(!uccs.contains(&Dependency::ucc(AttributeSet::singleton(idx("AC")))));
    }

    #[test]
    fn trivial_predicate_sets() {
        assert!(is_trivial(&[Predicate::new(0, Op::Lt), Predicate::new(0, Op::Gt)]));
        assert!(!is_trivial(&[Predicate::new(0, Op::Le), Predicate::new(0, Op::Ge)]));
        assert!(!is_trivial(&[Predicate::new(0, Op::Lt), Predicate::new(1, Op::Gt)]));
    }

    #[test]
    fn precision_of_empty_is_one() {
        assert_eq!(precision(&[], &fixtures::four_rows()), 1.0);
    }
}
