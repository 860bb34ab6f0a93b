use crate::model::{AttributeSet, Bitset, Dependency, EvidenceSet, Predicate, PredicateSpace};

use super::cover::{minimal_covers, minimal_covers_filtered};

/// Minimal left-hand sides for `X -> rhs` given difference sets over `m`
/// attributes. Only sets containing `rhs` constrain the left-hand side.
pub fn fd_lhs_for_rhs(evidence: &[AttributeSet], m: usize, rhs: usize) -> Vec<AttributeSet> {
    let sets: Vec<Bitset> = evidence
        .iter()
        .filter(|d| d.contains(rhs))
        .map(|d| Bitset::from_word(d.without(rhs).bits()))
        .collect();
    minimal_covers(&sets, m)
        .into_iter()
        .map(|c| AttributeSet::from_bits(c.first_word()))
        .collect()
}

/// Minimal FDs from deduplicated inequality evidence. A column that never
/// differs yields `TRUE -> A`.
pub fn fds_from_evidence(evidence: &[AttributeSet], m: usize) -> Vec<Dependency> {
    (0..m)
        .flat_map(|a| {
            fd_lhs_for_rhs(evidence, m, a)
                .into_iter()
                .map(move |lhs| Dependency::fd(lhs, a))
        })
        .collect()
}

/// Minimal non-empty column sets on which every pair differs.
pub fn uccs_from_evidence(evidence: &[AttributeSet], m: usize) -> Vec<Dependency> {
    let mut sets: Vec<Bitset> = evidence.iter().map(|d| Bitset::from_word(d.bits())).collect();
    // stands for a pair differing everywhere; rules out the empty key
    sets.push(Bitset::from_word(AttributeSet::full(m).bits()));
    minimal_covers(&sets, m)
        .into_iter()
        .map(|c| Dependency::ucc(AttributeSet::from_bits(c.first_word())))
        .collect()
}

/// Minimal DCs from ordered-pair evidence in the full predicate space.
/// Predicate sets that no pair could satisfy are skipped unless
/// `keep_trivial` is set.
pub fn dcs_from_evidence(
    evidence: &[EvidenceSet],
    space: &PredicateSpace,
    keep_trivial: bool,
) -> Vec<Dependency> {
    let width = space.len();
    let all = Bitset::full(width);
    let mut complements: Vec<Bitset> = evidence.iter().map(|e| all.difference(e.bits())).collect();
    // an all-false pair: forces at least one predicate
    complements.push(all);
    let covers = if keep_trivial {
        minimal_covers(&complements, width)
    } else {
        minimal_covers_filtered(&complements, width, |path, e| {
            let mut next = path.clone();
            next.insert(e);
            !space.is_trivially_unsatisfiable(&next)
        })
    };
    covers
        .into_iter()
        .map(|c| Dependency::dc(c.iter().map(|i| space.predicate(i)).collect::<Vec<Predicate>>()))
        .collect()
}
