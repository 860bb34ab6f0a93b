//! Dictionary-encoded columnar relations.
//!
//! Every column keeps a sorted dictionary and stores one `u32` code per row.
//! Codes are order preserving, so every comparison the discovery code needs
//! (equality for partitions, `<`/`>` for order and denial constraints) runs
//! on plain integers. Null cells occupy the lowest codes of a column: a
//! single shared code when nulls compare equal, or one code per null cell
//! when they do not.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::io::Read;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::attrset::MAX_ATTRIBUTES;
use crate::error::{Error, Result};

pub type RowId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Categorical,
    Numeric,
}

/// A decoded cell value.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Null,
    Number(f64),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => Ok(()),
            Value::Number(x) => write!(f, "{x}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Column {
    kind: ColumnKind,
    codes: Vec<u32>,
    dictionary: Vec<Value>,
    null_codes: u32,
}

impl Column {
    pub fn kind(&self) -> ColumnKind {
        self.kind
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn dictionary(&self) -> &[Value] {
        &self.dictionary
    }

    /// Number of leading codes that stand for null cells.
    pub fn null_codes(&self) -> u32 {
        self.null_codes
    }

    #[inline]
    pub fn is_null(&self, code: u32) -> bool {
        code < self.null_codes
    }

    pub fn has_nulls(&self) -> bool {
        self.null_codes > 0
    }

    pub fn value(&self, code: u32) -> &Value {
        &self.dictionary[code as usize]
    }

    pub fn distinct_count(&self) -> usize {
        self.dictionary.len()
    }

    fn encode(kind: ColumnKind, cells: &[Option<Value>], nulls_equal: bool) -> Column {
        let mut distinct: Vec<&Value> = cells.iter().flatten().collect();
        distinct.sort_by(|a, b| compare_values(a, b));
        distinct.dedup_by(|a, b| compare_values(a, b) == Ordering::Equal);

        let null_cells = cells.iter().filter(|c| c.is_none()).count() as u32;
        let null_codes = match (null_cells, nulls_equal) {
            (0, _) => 0,
            (_, true) => 1,
            (k, false) => k,
        };

        let mut dictionary: Vec<Value> = Vec::with_capacity(null_codes as usize + distinct.len());
        dictionary.extend((0..null_codes).map(|_| Value::Null));
        dictionary.extend(distinct.iter().map(|v| (*v).clone()));

        let mut next_null = 0u32;
        let codes = cells
            .iter()
            .map(|cell| match cell {
                None if nulls_equal => 0,
                None => {
                    next_null += 1;
                    next_null - 1
                }
                Some(v) => {
                    let idx = distinct
                        .binary_search_by(|probe| compare_values(probe, v))
                        .expect("value present in its own dictionary");
                    null_codes + idx as u32
                }
            })
            .collect();

        Column {
            kind,
            codes,
            dictionary,
            null_codes,
        }
    }

    fn select(&self, rows: &[RowId]) -> Column {
        Column {
            kind: self.kind,
            codes: rows.iter().map(|&r| self.codes[r as usize]).collect(),
            dictionary: self.dictionary.clone(),
            null_codes: self.null_codes,
        }
    }
}

fn compare_values(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => x.total_cmp(y),
        (Value::Text(x), Value::Text(y)) => x.as_bytes().cmp(y.as_bytes()),
        (Value::Null, Value::Null) => Ordering::Equal,
        (Value::Null, _) => Ordering::Less,
        (_, Value::Null) => Ordering::Greater,
        (Value::Number(_), Value::Text(_)) => Ordering::Less,
        (Value::Text(_), Value::Number(_)) => Ordering::Greater,
    }
}

/// Options controlling how raw cells are typed and encoded.
#[derive(Clone, Debug)]
pub struct LoadOptions {
    /// Per-column kind overrides, keyed by attribute name.
    pub type_hints: HashMap<String, ColumnKind>,
    /// When false every null cell gets its own code, so nulls never agree.
    pub nulls_equal: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            type_hints: HashMap::new(),
            nulls_equal: true,
        }
    }
}

/// An instance of a relation schema: `m` columns of `n` codes each.
#[derive(Clone, Debug)]
pub struct Relation {
    name: String,
    attribute_names: Vec<String>,
    columns: Vec<Column>,
    row_count: usize,
}

impl Relation {
    pub fn load_csv(path: impl AsRef<Path>, options: &LoadOptions) -> Result<Relation> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::Input {
            row: 0,
            message: format!("cannot open {}: {e}", path.display()),
        })?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "relation".to_owned());
        Relation::from_reader(name, file, options)
    }

    pub fn from_csv_str(name: &str, csv: &str, options: &LoadOptions) -> Result<Relation> {
        Relation::from_reader(name.to_owned(), csv.as_bytes(), options)
    }

    pub fn from_reader<R: Read>(name: String, reader: R, options: &LoadOptions) -> Result<Relation> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(reader);
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| csv_error(e, 1))?
            .iter()
            .map(|h| h.trim().to_owned())
            .collect();
        let mut records = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| csv_error(e, i + 2))?;
            records.push(rec.iter().map(str::to_owned).collect::<Vec<_>>());
        }
        Relation::from_records(name, header, &records, options)
    }

    /// Build a relation from raw string cells. Empty cells are nulls.
    pub fn from_records(
        name: impl Into<String>,
        attribute_names: Vec<String>,
        records: &[Vec<String>],
        options: &LoadOptions,
    ) -> Result<Relation> {
        let m = attribute_names.len();
        if m == 0 {
            return Err(Error::Input {
                row: 1,
                message: "header names no attributes".into(),
            });
        }
        if m > MAX_ATTRIBUTES {
            return Err(Error::Input {
                row: 1,
                message: format!("{m} attributes exceed the supported maximum of {MAX_ATTRIBUTES}"),
            });
        }
        for (i, rec) in records.iter().enumerate() {
            if rec.len() != m {
                return Err(Error::Input {
                    row: i + 2,
                    message: format!("expected {m} fields, found {}", rec.len()),
                });
            }
        }

        let mut columns = Vec::with_capacity(m);
        for (a, attr) in attribute_names.iter().enumerate() {
            let raw: Vec<&str> = records.iter().map(|r| r[a].as_str()).collect();
            let parsed: Vec<Option<f64>> = raw
                .iter()
                .map(|s| {
                    let t = s.trim();
                    if t.is_empty() {
                        None
                    } else {
                        t.parse::<f64>().ok().filter(|x| x.is_finite())
                    }
                })
                .collect();
            let all_numeric = raw
                .iter()
                .zip(&parsed)
                .all(|(s, p)| s.trim().is_empty() || p.is_some());
            let kind = match options.type_hints.get(attr) {
                Some(&k) => k,
                None if all_numeric => ColumnKind::Numeric,
                None => ColumnKind::Categorical,
            };
            let cells: Vec<Option<Value>> = match kind {
                ColumnKind::Numeric => {
                    let mut cells = Vec::with_capacity(raw.len());
                    for (i, (s, p)) in raw.iter().zip(&parsed).enumerate() {
                        if s.trim().is_empty() {
                            cells.push(None);
                        } else if let Some(x) = p {
                            // fold -0.0 into 0.0 so they share a code
                            cells.push(Some(Value::Number(if *x == 0.0 { 0.0 } else { *x })));
                        } else {
                            return Err(Error::Input {
                                row: i + 2,
                                message: format!("attribute {attr}: {s:?} is not a number"),
                            });
                        }
                    }
                    cells
                }
                ColumnKind::Categorical => raw
                    .iter()
                    .map(|s| (!s.is_empty()).then(|| Value::Text((*s).to_owned())))
                    .collect(),
            };
            columns.push(Column::encode(kind, &cells, options.nulls_equal));
        }

        Ok(Relation {
            name: name.into(),
            attribute_names,
            columns,
            row_count: records.len(),
        })
    }

    /// Build an all-numeric relation from integer columns.
    pub fn from_int_columns(
        name: impl Into<String>,
        attribute_names: impl IntoIterator<Item = impl Into<String>>,
        columns: Vec<Vec<i64>>,
    ) -> Relation {
        let attribute_names: Vec<String> = attribute_names.into_iter().map(Into::into).collect();
        assert_eq!(attribute_names.len(), columns.len());
        assert!(!columns.is_empty() && columns.len() <= MAX_ATTRIBUTES);
        let n = columns[0].len();
        assert!(columns.iter().all(|c| c.len() == n), "ragged columns");
        let columns = columns
            .iter()
            .map(|c| {
                let cells: Vec<Option<Value>> =
                    c.iter().map(|&x| Some(Value::Number(x as f64))).collect();
                Column::encode(ColumnKind::Numeric, &cells, true)
            })
            .collect();
        Relation {
            name: name.into(),
            attribute_names,
            columns,
            row_count: n,
        }
    }

    /// Build from typed cells, one vector per column; `None` is null.
    pub fn from_columns(
        name: impl Into<String>,
        attribute_names: Vec<String>,
        kinds: Vec<ColumnKind>,
        cells: Vec<Vec<Option<Value>>>,
        nulls_equal: bool,
    ) -> Relation {
        assert_eq!(attribute_names.len(), cells.len());
        assert_eq!(kinds.len(), cells.len());
        assert!(!cells.is_empty() && cells.len() <= MAX_ATTRIBUTES);
        let n = cells[0].len();
        assert!(cells.iter().all(|c| c.len() == n), "ragged columns");
        let columns = kinds
            .iter()
            .zip(&cells)
            .map(|(&kind, c)| Column::encode(kind, c, nulls_equal))
            .collect();
        Relation {
            name: name.into(),
            attribute_names,
            columns,
            row_count: n,
        }
    }

    pub fn rename(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of attributes `m`.
    pub fn arity(&self) -> usize {
        self.columns.len()
    }

    /// Number of tuples `n`.
    pub fn len(&self) -> usize {
        self.row_count
    }

    pub fn is_empty(&self) -> bool {
        self.row_count == 0
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attribute_names.iter().position(|a| a == name)
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, attr: usize) -> &Column {
        &self.columns[attr]
    }

    #[inline]
    pub fn code(&self, row: RowId, attr: usize) -> u32 {
        self.columns[attr].codes[row as usize]
    }

    /// Access two distinct rows side by side.
    pub fn project_pair(&self, i: RowId, j: RowId) -> Result<(TupleView<'_>, TupleView<'_>)> {
        if i == j {
            return Err(Error::Contract(format!("reflexive pair ({i}, {i})")));
        }
        let n = self.row_count as RowId;
        if i >= n || j >= n {
            return Err(Error::Contract(format!(
                "row pair ({i}, {j}) out of range for {n} rows"
            )));
        }
        Ok((self.tuple(i), self.tuple(j)))
    }

    pub fn tuple(&self, row: RowId) -> TupleView<'_> {
        TupleView {
            relation: self,
            row,
        }
    }

    /// Keep only the given rows, in the given order. Dictionaries are shared
    /// with the parent so codes stay comparable.
    pub fn select_rows(&self, name: impl Into<String>, rows: &[RowId]) -> Relation {
        Relation {
            name: name.into(),
            attribute_names: self.attribute_names.clone(),
            columns: self.columns.iter().map(|c| c.select(rows)).collect(),
            row_count: rows.len(),
        }
    }

    /// Split the rows into `parts` near-equal blocks of a seeded permutation.
    pub fn horizontal_split(&self, parts: usize, seed: u64) -> Result<Vec<Relation>> {
        if parts == 0 {
            return Err(Error::Contract("part count must be at least 1".into()));
        }
        let mut perm: Vec<RowId> = (0..self.row_count as RowId).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        perm.shuffle(&mut rng);
        let base = self.row_count / parts;
        let extra = self.row_count % parts;
        let mut out = Vec::with_capacity(parts);
        let mut start = 0;
        for p in 0..parts {
            let len = base + usize::from(p < extra);
            out.push(self.select_rows(format!("{}#{p}", self.name), &perm[start..start + len]));
            start += len;
        }
        Ok(out)
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.attribute_names).map_err(io)?;
        for row in 0..self.row_count as RowId {
            let rec: Vec<String> = self
                .columns
                .iter()
                .map(|c| c.value(c.codes[row as usize]).to_string())
                .collect();
            w.write_record(&rec).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

fn csv_error(e: csv::Error, fallback_row: usize) -> Error {
    let row = e
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or(fallback_row);
    Error::Input {
        row,
        message: e.to_string(),
    }
}

/// Constant-time access to one row's codes.
#[derive(Clone, Copy)]
pub struct TupleView<'a> {
    relation: &'a Relation,
    row: RowId,
}

impl<'a> TupleView<'a> {
    pub fn row(&self) -> RowId {
        self.row
    }

    #[inline]
    pub fn code(&self, attr: usize) -> u32 {
        self.relation.code(self.row, attr)
    }

    pub fn value(&self, attr: usize) -> &'a Value {
        let col = self.relation.column(attr);
        col.value(col.codes[self.row as usize])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(csv: &str) -> Relation {
        Relation::from_csv_str("t", csv, &LoadOptions::default()).unwrap()
    }

    #[test]
    fn numeric_detection_and_order_preserving_codes() {
        let r = load("a,b\n10,x\n9,y\n-1.5,x\n10,\n");
        assert_eq!(r.column(0).kind(), ColumnKind::Numeric);
        assert_eq!(r.column(1).kind(), ColumnKind::Categorical);
        // -1.5 < 9 < 10, so codes follow numeric order, not text order
        assert_eq!(r.column(0).codes(), &[2, 1, 0, 2]);
        assert_eq!(r.column(1).codes(), &[1, 2, 1, 0]);
        assert!(r.column(1).is_null(0));
        assert_eq!(r.column(1).value(0), &Value::Null);
    }

    #[test]
    fn header_only_is_empty_relation() {
        let r = load("a,b,c\n");
        assert_eq!(r.len(), 0);
        assert_eq!(r.arity(), 3);
    }

    #[test]
    fn ragged_rows_report_row_number() {
        let err = Relation::from_csv_str("t", "a,b\n1,2\n3\n", &LoadOptions::default()).unwrap_err();
        match err {
            Error::Input { row, .. } => assert_eq!(row, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hint_forces_categorical() {
        let mut opts = LoadOptions::default();
        opts.type_hints.insert("a".into(), ColumnKind::Categorical);
        let r = Relation::from_csv_str("t", "a\n10\n9\n", &opts).unwrap();
        assert_eq!(r.column(0).kind(), ColumnKind::Categorical);
        // "10" < "9" bytewise
        assert_eq!(r.column(0).codes(), &[0, 1]);
    }

    #[test]
    fn nulls_unequal_get_distinct_codes() {
        let opts = LoadOptions {
            nulls_equal: false,
            ..LoadOptions::default()
        };
        let r = Relation::from_csv_str("t", "a,b\n,x\n1,y\n,z\n", &opts).unwrap();
        let col = r.column(0);
        assert_eq!(col.null_codes(), 2);
        assert_eq!(col.codes(), &[0, 2, 1]);
    }

    #[test]
    fn project_pair_rejects_reflexive_and_out_of_range() {
        let r = load("a\n1\n2\n");
        assert!(r.project_pair(0, 0).is_err());
        assert!(r.project_pair(0, 2).is_err());
        let (x, y) = r.project_pair(0, 1).unwrap();
        assert_ne!(x.code(0), y.code(0));
    }

    #[test]
    fn split_is_balanced_and_covers_rows() {
        let csv: String = std::iter::once("a\n".to_owned())
            .chain((0..23).map(|i| format!("{i}\n")))
            .collect();
        let r = load(&csv);
        let parts = r.horizontal_split(5, 7).unwrap();
        let sizes: Vec<usize> = parts.iter().map(Relation::len).collect();
        assert_eq!(sizes, vec![5, 5, 5, 4, 4]);
        let mut all: Vec<u32> = parts.iter().flat_map(|p| p.column(0).codes().to_vec()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
        assert_eq!(r.horizontal_split(1, 3).unwrap()[0].len(), 23);
        assert!(r.horizontal_split(0, 3).is_err());
    }
}
