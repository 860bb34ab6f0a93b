use crate::model::{Bitset, EvidenceSet, PredicateSpace, Relation, RowId, SpaceMode};

/// Predicates of `space` satisfied by the ordered pair `(t_i, t_j)`.
pub fn gen_ev_set(i: RowId, j: RowId, r: &Relation, space: &PredicateSpace) -> EvidenceSet {
    let (i, j) = (i as usize, j as usize);
    let mut bits = Bitset::new(space.len());
    match space.mode() {
        SpaceMode::FdInequality => {
            for (a, col) in r.columns().iter().enumerate() {
                if col.codes()[i] != col.codes()[j] {
                    bits.insert(a);
                }
            }
        }
        SpaceMode::DcFull => {
            for (pos, p) in space.predicates().iter().enumerate() {
                let codes = r.column(p.attribute).codes();
                if p.op.holds(codes[i], codes[j], space.null_codes(p.attribute)) {
                    bits.insert(pos);
                }
            }
        }
    }
    EvidenceSet(bits)
}
