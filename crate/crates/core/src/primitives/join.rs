/// All `(a, b)` from `s1 × s2` accepted by `p` (every pair when `p` is
/// `None`).
pub fn local_join<A: Clone, B: Clone>(
    s1: &[A],
    s2: &[B],
    p: Option<&dyn Fn(&A, &B) -> bool>,
) -> Vec<(A, B)> {
    let mut out = Vec::new();
    for a in s1 {
        for b in s2 {
            if p.is_none_or(|p| p(a, b)) {
                out.push((a.clone(), b.clone()));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairMode {
    /// `(s[i], s[j])` for `i < j` only.
    Unordered,
    /// Both `(s[i], s[j])` and `(s[j], s[i])` for `i != j`.
    Ordered,
}

/// Self-join of one sequence. The predicate sees positions as well as
/// items, which is what window joins need.
pub fn self_join<T: Clone>(
    s: &[T],
    mode: PairMode,
    p: Option<&dyn Fn(usize, &T, usize, &T) -> bool>,
) -> Vec<(T, T)> {
    let mut out = Vec::new();
    for i in 0..s.len() {
        for j in 0..s.len() {
            let keep = match mode {
                PairMode::Unordered => i < j,
                PairMode::Ordered => i != j,
            };
            if keep && p.is_none_or(|p| p(i, &s[i], j, &s[j])) {
                out.push((s[i].clone(), s[j].clone()));
            }
        }
    }
    out
}

/// Pairs `window` positions apart inside one sorted class.
pub fn window_pairs<T: Copy>(class: &[T], window: usize) -> Vec<(T, T)> {
    if window == 0 {
        return Vec::new();
    }
    class
        .iter()
        .zip(class.iter().skip(window))
        .map(|(&a, &b)| (a, b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AttributeSet;

    #[test]
    fn prefix_self_join_of_singletons() {
        let level: Vec<AttributeSet> = (0..4).map(AttributeSet::singleton).collect();
        let pairs = self_join(&level, PairMode::Unordered, None);
        let joined: Vec<AttributeSet> = pairs.iter().map(|(a, b)| a.union(*b)).collect();
        assert_eq!(joined.len(), 6);
        assert_eq!(joined[0], AttributeSet::from_indices([0, 1]));
        assert_eq!(joined[5], AttributeSet::from_indices([2, 3]));
    }

    #[test]
    fn window_join_matches_predicate_form() {
        let class = [1u32, 5, 8];
        let direct = window_pairs(&class, 1);
        assert_eq!(direct, vec![(1, 5), (5, 8)]);
        let pred = |i: usize, _: &u32, j: usize, _: &u32| j == i + 1;
        assert_eq!(self_join(&class, PairMode::Unordered, Some(&pred)), direct);
    }

    #[test]
    fn empty_side_gives_nothing() {
        let empty: [u8; 0] = [];
        assert!(local_join(&[1, 2, 3], &empty, None).is_empty());
        assert_eq!(self_join(&[1, 2], PairMode::Ordered, None).len(), 2);
    }
}
