//! The two small relations used throughout the docs and tests.

use crate::model::{LoadOptions, Relation};

pub const FOUR_ROWS_CSV: &str = include_str!("../data/four_rows.csv");
pub const TAX_CSV: &str = include_str!("../data/tax.csv");

/// Four rows over `A,B,C,D`.
pub fn four_rows() -> Relation {
    Relation::from_csv_str("four_rows", FOUR_ROWS_CSV, &LoadOptions::default()).expect("bundled fixture")
}

/// Eight tax records with a leading `tid` column.
pub fn tax() -> Relation {
    Relation::from_csv_str("tax", TAX_CSV, &LoadOptions::default()).expect("bundled fixture")
}
