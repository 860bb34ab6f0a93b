use crate::model::Bitset;

/// Stable sort by a caller-supplied comparator.
pub fn sort<T, F>(items: &mut [T], cmp: F)
where
    F: FnMut(&T, &T) -> std::cmp::Ordering,
{
    items.sort_by(cmp);
}

/// Every inclusion-minimal hitting set of `sets` over `universe` elements.
///
/// An empty family has the empty set as its only cover; a family holding
/// an empty set has none.
pub fn minimal_covers(sets: &[Bitset], universe: usize) -> Vec<Bitset> {
    minimal_covers_filtered(sets, universe, |_, _| true)
}

/// Like [`minimal_covers`] but branches where `allow(path, element)` is
/// false are never entered. The filter must be monotone: if it rejects
/// `path + e`, it must also reject every superset of that.
pub fn minimal_covers_filtered<F>(sets: &[Bitset], universe: usize, allow: F) -> Vec<Bitset>
where
    F: Fn(&Bitset, usize) -> bool,
{
    if sets.is_empty() {
        return vec![Bitset::new(universe)];
    }
    if sets.iter().any(Bitset::is_empty) {
        return Vec::new();
    }
    let family = minimize_family(sets);
    let remaining: Vec<u32> = (0..family.len() as u32).collect();
    let all = Bitset::full(universe);
    let Some(ordering) = element_order(&family, &remaining, &all) else {
        return Vec::new();
    };
    let mut search = Search {
        family: &family,
        allow: &allow,
        out: Vec::new(),
    };
    search.dfs(&remaining, &Bitset::new(universe), &ordering, universe);
    search.out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    search.out.dedup();
    search.out
}

/// Sort ascending by cardinality, drop duplicates and proper supersets:
/// hitting a subset already hits every superset.
fn minimize_family(sets: &[Bitset]) -> Vec<Bitset> {
    let mut sorted = sets.to_vec();
    sort(&mut sorted, |a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sorted.dedup();
    let mut kept: Vec<Bitset> = Vec::with_capacity(sorted.len());
    for s in sorted {
        if !kept.iter().any(|k| k.is_subset_of(&s)) {
            kept.push(s);
        }
    }
    kept
}

/// Elements of `candidates` ordered by how many `remaining` sets they hit,
/// most first, ties by index. `None` when some remaining set cannot be hit
/// by any candidate.
fn element_order(family: &[Bitset], remaining: &[u32], candidates: &Bitset) -> Option<Vec<usize>> {
    let mut freq = vec![0u32; candidates.iter().last().map_or(0, |l| l + 1)];
    for &s in remaining {
        let set = &family[s as usize];
        let mut hit = false;
        for e in set.iter() {
            if candidates.contains(e) {
                freq[e] += 1;
                hit = true;
            }
        }
        if !hit {
            return None;
        }
    }
    let mut order: Vec<usize> = candidates.iter().filter(|&e| freq[e] > 0).collect();
    order.sort_by(|&a, &b| freq[b].cmp(&freq[a]).then(a.cmp(&b)));
    Some(order)
}

struct Search<'a, F> {
    family: &'a [Bitset],
    allow: &'a F,
    out: Vec<Bitset>,
}

impl<F: Fn(&Bitset, usize) -> bool> Search<'_, F> {
    fn dfs(&mut self, remaining: &[u32], path: &Bitset, ordering: &[usize], universe: usize) {
        for (idx, &e) in ordering.iter().enumerate() {
            if !(self.allow)(path, e) {
                continue;
            }
            let mut next_path = path.clone();
            next_path.insert(e);
            let next_remaining: Vec<u32> = remaining
                .iter()
                .copied()
                .filter(|&s| !self.family[s as usize].contains(e))
                .collect();
            if next_remaining.is_empty() {
                if self.is_minimal(&next_path) {
                    self.out.push(next_path);
                }
                continue;
            }
            let rest = Bitset::from_indices(universe, ordering[idx + 1..].iter().copied());
            if let Some(next_order) = element_order(self.family, &next_remaining, &rest) {
                self.dfs(&next_remaining, &next_path, &next_order, universe);
            }
        }
    }

    /// Every element of `path` is the only one hitting some set.
    fn is_minimal(&self, path: &Bitset) -> bool {
        let mut needed = Bitset::new(path.word_count() * 64);
        for set in self.family {
            let hit = set.intersection(path);
            if hit.len() == 1 {
                needed.insert(hit.iter().next().unwrap());
            }
        }
        needed == *path
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ix: &[usize]) -> Bitset {
        Bitset::from_indices(4, ix.iter().copied())
    }

    #[test]
    fn worked_example_covers() {
        // A=0, B=1, C=2, D=3
        let sets = [set(&[1]), set(&[1, 2, 3]), set(&[1, 3]), set(&[2, 3])];
        let covers = minimal_covers(&sets, 4);
        assert_eq!(covers, vec![set(&[1, 2]), set(&[1, 3])]);
    }

    #[test]
    fn degenerate_families() {
        assert_eq!(minimal_covers(&[set(&[0])], 4), vec![set(&[0])]);
        assert_eq!(minimal_covers(&[], 4), vec![set(&[])]);
        assert!(minimal_covers(&[set(&[]), set(&[1])], 4).is_empty());
    }
}
