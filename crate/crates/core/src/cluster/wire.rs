//! Canonical byte sizes used for metering. Codes and row ids are 4 bytes,
//! lists carry a 4-byte length prefix, attribute sets are 8 bytes.

use crate::model::{Bitset, Partition};

pub const CODE: u64 = 4;
pub const ROW_ID: u64 = 4;
pub const LEN: u64 = 4;
pub const ATTRSET: u64 = 8;
pub const COUNT: u64 = 8;

/// A row carrying its id and `width` codes.
pub fn row(width: usize) -> u64 {
    ROW_ID + width as u64 * CODE
}

pub fn rows(count: usize, width: usize) -> u64 {
    count as u64 * row(width)
}

/// A whole relation shipped positionally: `n · m` codes.
pub fn relation(n: usize, m: usize) -> u64 {
    (n * m) as u64 * CODE
}

/// Attribute set, class list and the stripped-singleton count.
pub fn partition(p: &Partition) -> u64 {
    ATTRSET
        + LEN
        + p.classes()
            .iter()
            .map(|c| LEN + c.len() as u64 * ROW_ID)
            .sum::<u64>()
        + COUNT
}

pub fn class(len: usize) -> u64 {
    LEN + len as u64 * ROW_ID
}

pub fn bitset(b: &Bitset) -> u64 {
    LEN + b.word_count() as u64 * 8
}
