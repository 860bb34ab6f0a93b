use std::cmp::Ordering;

use crate::model::{AttributeSet, Direction, Relation, RowId};

/// What [`check_refinement`] needs to decide `X -> A` (or `X ~> A`).
#[derive(Clone, Copy, Debug)]
pub enum RefinementInput<'a> {
    /// `|π_X|` and `|π_{X∪A}|` over the same rows.
    CountBased {
        left_count: usize,
        combined_count: usize,
    },
    /// The rows themselves; an order dependency needs the order of X
    /// values, which a partition does not keep.
    OrderBased {
        relation: &'a Relation,
        direction: Direction,
    },
}

pub fn check_refinement(x: AttributeSet, a: usize, input: RefinementInput<'_>) -> bool {
    match input {
        RefinementInput::CountBased {
            left_count,
            combined_count,
        } => left_count == combined_count,
        RefinementInput::OrderBased {
            relation,
            direction,
        } => order_holds(relation, x, a, direction),
    }
}

/// Pairwise OD check: whenever row i is strictly before row j on the
/// lexicographic X codes, A(i) <= A(j) (asc) or A(i) >= A(j) (desc).
/// Nulls hold the lowest codes, so they sort first.
pub fn order_holds(r: &Relation, x: AttributeSet, a: usize, direction: Direction) -> bool {
    let rows = sorted_rows(r, x);
    let rhs = r.column(a).codes();
    // extremes of A over every group strictly before the current one
    let mut prev: Option<(u32, u32)> = None;
    let mut i = 0;
    while i < rows.len() {
        let mut j = i + 1;
        while j < rows.len() && compare_on(r, x, rows[i], rows[j]) == Ordering::Equal {
            j += 1;
        }
        let group = rows[i..j].iter().map(|&t| rhs[t as usize]);
        let (lo, hi) = group.fold((u32::MAX, 0), |(lo, hi), c| (lo.min(c), hi.max(c)));
        if let Some((plo, phi)) = prev {
            let ok = match direction {
                Direction::Asc => phi <= lo,
                Direction::Desc => plo >= hi,
            };
            if !ok {
                return false;
            }
            prev = Some((plo.min(lo), phi.max(hi)));
        } else {
            prev = Some((lo, hi));
        }
        i = j;
    }
    true
}

/// Row ids sorted lexicographically by their X codes (ties by row id).
pub fn sorted_rows(r: &Relation, x: AttributeSet) -> Vec<RowId> {
    let mut rows: Vec<RowId> = (0..r.len() as RowId).collect();
    rows.sort_by(|&i, &j| compare_on(r, x, i, j).then(i.cmp(&j)));
    rows
}

fn compare_on(r: &Relation, x: AttributeSet, i: RowId, j: RowId) -> Ordering {
    for attr in x.iter() {
        let codes = r.column(attr).codes();
        match codes[i as usize].cmp(&codes[j as usize]) {
            Ordering::Equal => {}
            other => return other,
        }
    }
    Ordering::Equal
}

pub fn is_ucc(_x: AttributeSet, class_count: usize, n: usize) -> bool {
    class_count == n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::primitives::gen_eq_class;

    fn count(r: &Relation, x: AttributeSet) -> usize {
        gen_eq_class(x, r).class_count()
    }

    #[test]
    fn fd_checks_on_worked_example() {
        let r = fixtures::four_rows();
        let (c, d) = (AttributeSet::singleton(2), AttributeSet::singleton(3));
        let cd = c.union(d);
        let d_to_c = RefinementInput::CountBased {
            left_count: count(&r, d),
            combined_count: count(&r, cd),
        };
        assert!(check_refinement(d, 2, d_to_c));
        let c_to_d = RefinementInput::CountBased {
            left_count: count(&r, c),
            combined_count: count(&r, cd),
        };
        assert!(!check_refinement(c, 3, c_to_d));
    }

    #[test]
    fn salary_orders_tax_rate_descending() {
        let r = fixtures::tax();
        let sal = r.attribute_index("SAL").unwrap();
        let stx = r.attribute_index("STX").unwrap();
        let x = AttributeSet::singleton(sal);
        let desc = RefinementInput::OrderBased {
            relation: &r,
            direction: Direction::Desc,
        };
        assert!(check_refinement(x, stx, desc));
        assert!(!order_holds(&r, x, stx, Direction::Asc));
    }

    #[test]
    fn ucc_on_tax() {
        let r = fixtures::tax();
        let ac = r.attribute_index("AC").unwrap();
        let ph = r.attribute_index("PH").unwrap();
        let both = AttributeSet::from_indices([ac, ph]);
        assert!(is_ucc(both, count(&r, both), r.len()));
        let only = AttributeSet::singleton(ac);
        assert!(!is_ucc(only, count(&r, only), r.len()));
        assert!(is_ucc(only, 0, 0));
    }
}
