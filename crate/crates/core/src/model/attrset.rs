use std::fmt;

use serde::{Deserialize, Serialize};

/// Largest schema width an [`AttributeSet`] can address.
pub const MAX_ATTRIBUTES: usize = 64;

/// A set of attribute indices, stored as a 64-bit mask.
///
/// Ordering is by the raw mask, which is only used to get a stable order in
/// maps; use [`AttributeSet::canonical_cmp`] for the size-then-lexicographic
/// order used when printing results.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AttributeSet(u64);

impl AttributeSet {
    pub const EMPTY: AttributeSet = AttributeSet(0);

    #[inline]
    pub const fn from_bits(bits: u64) -> Self {
        AttributeSet(bits)
    }

    #[inline]
    pub const fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn singleton(attr: usize) -> Self {
        debug_assert!(attr < MAX_ATTRIBUTES);
        AttributeSet(1u64 << attr)
    }

    /// All attributes `0..m`.
    pub fn full(m: usize) -> Self {
        debug_assert!(m <= MAX_ATTRIBUTES);
        if m == MAX_ATTRIBUTES {
            AttributeSet(u64::MAX)
        } else {
            AttributeSet((1u64 << m) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices
            .into_iter()
            .fold(AttributeSet::EMPTY, |acc, a| acc.with(a))
    }

    #[inline]
    pub fn contains(self, attr: usize) -> bool {
        attr < MAX_ATTRIBUTES && self.0 & (1u64 << attr) != 0
    }

    #[inline]
    pub fn with(self, attr: usize) -> Self {
        AttributeSet(self.0 | (1u64 << attr))
    }

    #[inline]
    pub fn without(self, attr: usize) -> Self {
        AttributeSet(self.0 & !(1u64 << attr))
    }

    #[inline]
    pub fn insert(&mut self, attr: usize) {
        self.0 |= 1u64 << attr;
    }

    #[inline]
    pub fn remove(&mut self, attr: usize) {
        self.0 &= !(1u64 << attr);
    }

    #[inline]
    pub fn union(self, other: Self) -> Self {
        AttributeSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: Self) -> Self {
        AttributeSet(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: Self) -> Self {
        AttributeSet(self.0 & !other.0)
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_proper_subset_of(self, other: Self) -> bool {
        self.is_subset_of(other) && self != other
    }

    #[inline]
    pub fn intersects(self, other: Self) -> bool {
        self.0 & other.0 != 0
    }

    /// Smallest attribute index in the set.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Largest attribute index in the set.
    pub fn last(self) -> Option<usize> {
        (self.0 != 0).then(|| 63 - self.0.leading_zeros() as usize)
    }

    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    /// Size first, then lexicographic over ascending attribute indices.
    pub fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

pub struct Iter(u64);

impl Iterator for Iter {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let tz = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(tz)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

impl IntoIterator for AttributeSet {
    type Item = usize;
    type IntoIter = Iter;

    fn into_iter(self) -> Iter {
        self.iter()
    }
}

impl FromIterator<usize> for AttributeSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        AttributeSet::from_indices(iter)
    }
}

impl fmt::Debug for AttributeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
