use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::attrset::AttributeSet;
use super::bitset::Bitset;
use super::relation::{ColumnKind, Relation};

/// Comparison operator of a two-tuple predicate `t0.A op t1.A`.
///
/// Declaration order is the canonical operator order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Op {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

const LT: u8 = 1;
const EQ: u8 = 2;
const GT: u8 = 4;

impl Op {
    pub const ALL: [Op; 6] = [Op::Eq, Op::Ne, Op::Lt, Op::Le, Op::Gt, Op::Ge];
    pub const EQUALITY: [Op; 2] = [Op::Eq, Op::Ne];

    pub fn symbol(self) -> &'static str {
        match self {
            Op::Eq => "==",
            Op::Ne => "!=",
            Op::Lt => "<",
            Op::Le => "<=",
            Op::Gt => ">",
            Op::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Op> {
        Op::ALL.into_iter().find(|op| op.symbol() == s)
    }

    /// The operator that holds on `(t1, t0)` whenever `self` holds on `(t0, t1)`.
    pub fn mirror(self) -> Op {
        match self {
            Op::Lt => Op::Gt,
            Op::Le => Op::Ge,
            Op::Gt => Op::Lt,
            Op::Ge => Op::Le,
            other => other,
        }
    }

    pub fn is_order(self) -> bool {
        matches!(self, Op::Lt | Op::Le | Op::Gt | Op::Ge)
    }

    /// Outcomes of comparing two values (less / equal / greater) this
    /// operator accepts, as a 3-bit mask.
    pub(crate) fn outcomes(self) -> u8 {
        match self {
            Op::Eq => EQ,
            Op::Ne => LT | GT,
            Op::Lt => LT,
            Op::Le => LT | EQ,
            Op::Gt => GT,
            Op::Ge => EQ | GT,
        }
    }

    /// Evaluate on two codes of the same column. Order operators are false
    /// when either side is null.
    #[inline]
    pub fn holds(self, left: u32, right: u32, null_codes: u32) -> bool {
        match self {
            Op::Eq => left == right,
            Op::Ne => left != right,
            _ if left < null_codes || right < null_codes => false,
            Op::Lt => left < right,
            Op::Le => left <= right,
            Op::Gt => left > right,
            Op::Ge => left >= right,
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// `t0.attribute op t1.attribute`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Predicate {
    pub attribute: usize,
    pub op: Op,
}

impl Predicate {
    pub fn new(attribute: usize, op: Op) -> Self {
        Predicate { attribute, op }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceMode {
    /// One "values differ" predicate per attribute; enough for FDs and UCCs.
    FdInequality,
    /// `{=, ≠}` per categorical attribute, all six operators per numeric one.
    DcFull,
}

#[derive(Clone, Debug)]
pub struct PredicateSpace {
    mode: SpaceMode,
    predicates: Vec<Predicate>,
    index: HashMap<Predicate, usize>,
    null_codes: Vec<u32>,
}

impl PredicateSpace {
    pub fn fd_inequality(r: &Relation) -> Self {
        let predicates = (0..r.arity()).map(|a| Predicate::new(a, Op::Ne)).collect();
        Self::build(SpaceMode::FdInequality, predicates, r)
    }

    pub fn dc_full(r: &Relation) -> Self {
        let mut predicates = Vec::new();
        for (a, col) in r.columns().iter().enumerate() {
            let ops: &[Op] = match col.kind() {
                ColumnKind::Categorical => &Op::EQUALITY,
                ColumnKind::Numeric => &Op::ALL,
            };
            predicates.extend(ops.iter().map(|&op| Predicate::new(a, op)));
        }
        Self::build(SpaceMode::DcFull, predicates, r)
    }

    fn build(mode: SpaceMode, predicates: Vec<Predicate>, r: &Relation) -> Self {
        let index = predicates.iter().enumerate().map(|(i, p)| (*p, i)).collect();
        PredicateSpace {
            mode,
            predicates,
            index,
            null_codes: r.columns().iter().map(|c| c.null_codes()).collect(),
        }
    }

    pub fn mode(&self) -> SpaceMode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn predicate(&self, i: usize) -> Predicate {
        self.predicates[i]
    }

    pub fn position(&self, p: &Predicate) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub(crate) fn null_codes(&self, attr: usize) -> u32 {
        self.null_codes[attr]
    }

    /// Predicate positions grouped per attribute, in space order.
    pub fn positions_by_attribute(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.null_codes.len()];
        for (i, p) in self.predicates.iter().enumerate() {
            out[p.attribute].push(i);
        }
        out
    }

    /// True when no pair of values could satisfy every predicate at once,
    /// e.g. `{A <, A >}`.
    pub fn is_trivially_unsatisfiable(&self, preds: &Bitset) -> bool {
        let mut accepted: HashMap<usize, u8> = HashMap::new();
        for i in preds.iter() {
            let p = self.predicates[i];
            let mask = accepted.entry(p.attribute).or_insert(LT | EQ | GT);
            *mask &= p.op.outcomes();
            if *mask == 0 {
                return true;
            }
        }
        false
    }
}

/// Predicates satisfied by one (ordered) tuple pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EvidenceSet(pub Bitset);

impl EvidenceSet {
    pub fn bits(&self) -> &Bitset {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// In the inequality space bit `a` is "values differ on attribute `a`".
    pub fn as_attribute_set(&self) -> AttributeSet {
        AttributeSet::from_bits(self.0.first_word())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::relation::LoadOptions;

    #[test]
    fn dc_space_layout() {
        let r = Relation::from_csv_str("t", "c,x\na,1\nb,2\n", &LoadOptions::default()).unwrap();
        let space = PredicateSpace::dc_full(&r);
        assert_eq!(space.len(), 8);
        assert_eq!(space.predicate(0), Predicate::new(0, Op::Eq));
        assert_eq!(space.predicate(1), Predicate::new(0, Op::Ne));
        assert_eq!(space.predicate(2), Predicate::new(1, Op::Eq));
        assert_eq!(space.predicate(7), Predicate::new(1, Op::Ge));
        assert_eq!(space.position(&Predicate::new(1, Op::Lt)), Some(4));
        assert_eq!(PredicateSpace::fd_inequality(&r).len(), 2);
    }

    #[test]
    fn trivial_combinations() {
        let r = Relation::from_csv_str("t", "x,y\n1,1\n", &LoadOptions::default()).unwrap();
        let space = PredicateSpace::dc_full(&r);
        let pos = |a, op| space.position(&Predicate::new(a, op)).unwrap();
        let set = |ps: &[usize]| Bitset::from_indices(space.len(), ps.iter().copied());
        assert!(space.is_trivially_unsatisfiable(&set(&[pos(0, Op::Lt), pos(0, Op::Gt)])));
        assert!(space.is_trivially_unsatisfiable(&set(&[pos(0, Op::Eq), pos(0, Op::Ne)])));
        assert!(space.is_trivially_unsatisfiable(&set(&[pos(0, Op::Le), pos(0, Op::Gt)])));
        assert!(!space.is_trivially_unsatisfiable(&set(&[pos(0, Op::Le), pos(0, Op::Ge)])));
        assert!(!space.is_trivially_unsatisfiable(&set(&[pos(0, Op::Lt), pos(1, Op::Gt)])));
    }

    #[test]
    fn nulls_fail_order_operators() {
        assert!(!Op::Lt.holds(0, 3, 1));
        assert!(Op::Ne.holds(0, 3, 1));
        assert!(Op::Eq.holds(0, 0, 1));
        assert!(Op::Ge.holds(3, 3, 1));
    }
}
