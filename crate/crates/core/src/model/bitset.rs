use std::fmt;

use smallvec::SmallVec;

/// Variable-width bitset used for evidence sets and cover search.
///
/// Two bitsets are only comparable when they were created with the same
/// width; every operation assumes equal word counts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitset {
    words: SmallVec<[u64; 2]>,
}

impl Bitset {
    pub fn new(width: usize) -> Self {
        Bitset {
            words: SmallVec::from_elem(0, width.div_ceil(64).max(1)),
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(width: usize, indices: I) -> Self {
        let mut b = Bitset::new(width);
        for i in indices {
            b.insert(i);
        }
        b
    }

    /// Single-word bitset from a mask; used for attribute-level evidence.
    pub fn from_word(word: u64) -> Self {
        let mut words = SmallVec::new();
        words.push(word);
        Bitset { words }
    }

    /// Bits `0..width` set.
    pub fn full(width: usize) -> Self {
        let mut b = Bitset::new(width);
        for i in 0..width {
            b.insert(i);
        }
        b
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1u64 << (i % 64));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words
            .get(i / 64)
            .is_some_and(|w| w & (1u64 << (i % 64)) != 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn first_word(&self) -> u64 {
        self.words[0]
    }

    pub fn intersects(&self, other: &Bitset) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .any(|(a, b)| a & b != 0)
    }

    pub fn is_subset_of(&self, other: &Bitset) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    /// Bits of `self` that are not in `other`.
    pub fn difference(&self, other: &Bitset) -> Bitset {
        Bitset {
            words: self
                .words
                .iter()
                .zip(other.words.iter())
                .map(|(a, b)| a & !b)
                .collect(),
        }
    }

    pub fn intersection(&self, other: &Bitset) -> Bitset {
        Bitset {
            words: self
                .words
                .iter()
                .zip(other.words.iter())
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// Number of common bits.
    pub fn intersection_len(&self, other: &Bitset) -> usize {
        self.words
            .iter()
            .zip(other.words.iter())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + tz)
            })
        })
    }
}

impl fmt::Debug for Bitset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multiword_operations() {
        let a = Bitset::from_indices(130, [0, 64, 129]);
        let b = Bitset::from_indices(130, [64, 100]);
        assert_eq!(a.word_count(), 3);
        assert!(a.intersects(&b));
        assert_eq!(a.intersection_len(&b), 1);
        assert_eq!(a.difference(&b).iter().collect::<Vec<_>>(), vec![0, 129]);
        assert!(Bitset::from_indices(130, [64]).is_subset_of(&a));
        assert!(!b.is_subset_of(&a));
        assert_eq!(Bitset::full(70).len(), 70);
        assert!(Bitset::new(5).is_empty());
    }
}
