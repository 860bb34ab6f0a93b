//! Seeded synthetic relations: random skewed tables, a lineitem-like
//! table following the TPC-H generator's column rules, and wide/deep
//! shapes with planted dependencies.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{ColumnKind, LoadOptions, Relation, Value};

/// Shape of a random relation.
#[derive(Clone, Debug)]
pub struct RandomSpec {
    pub rows: usize,
    pub cols: usize,
    /// Distinct values per column, cycled if shorter than `cols`.
    pub domains: Vec<u32>,
    /// Zipf-like exponent; 0 is uniform.
    pub skew: f64,
    pub null_rate: f64,
}

impl RandomSpec {
    pub fn new(rows: usize, cols: usize, domain: u32) -> Self {
        RandomSpec {
            rows,
            cols,
            domains: vec![domain.max(1)],
            skew: 0.0,
            null_rate: 0.0,
        }
    }

    pub fn skew(mut self, s: f64) -> Self {
        self.skew = s;
        self
    }

    pub fn domains(mut self, d: Vec<u32>) -> Self {
        assert!(!d.is_empty());
        self.domains = d;
        self
    }

    pub fn nulls(mut self, rate: f64) -> Self {
        self.null_rate = rate;
        self
    }
}

fn column_names(m: usize) -> Vec<String> {
    (0..m)
        .map(|i| {
            let letter = (b'A' + (i % 26) as u8) as char;
            if i < 26 {
                letter.to_string()
            } else {
                format!("{letter}{}", i / 26)
            }
        })
        .collect()
}

/// Integer-valued random relation named `rand_{seed}` with columns `A, B, ...`.
pub fn random_relation(spec: &RandomSpec, seed: u64) -> Relation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns: Vec<Vec<Option<Value>>> = (0..spec.cols)
        .map(|c| {
            let d = spec.domains[c % spec.domains.len()].max(1);
            let weights: Vec<f64> = (1..=d).map(|v| (v as f64).powf(-spec.skew)).collect();
            let dist = WeightedIndex::new(&weights).expect("positive weights");
            (0..spec.rows)
                .map(|_| {
                    if spec.null_rate > 0.0 && rng.gen_bool(spec.null_rate) {
                        None
                    } else {
                        Some(Value::Number(dist.sample(&mut rng) as f64))
                    }
                })
                .collect()
        })
        .collect();
    let kinds = vec![ColumnKind::Numeric; spec.cols];
    Relation::from_columns(format!("rand_{seed}"), column_names(spec.cols), kinds, columns, true)
}

/// Random relation where every third column is a function of the two
/// before it, so there are FDs to find at several levels.
pub fn planted_relation(rows: usize, cols: usize, domain: u32, seed: u64) -> Relation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let domain = domain.max(2);
    let mut data: Vec<Vec<i64>> = Vec::with_capacity(cols);
    for c in 0..cols {
        let col = if c % 3 == 2 {
            let (x, y) = (&data[c - 2], &data[c - 1]);
            let salt = rng.gen_range(1..1000i64);
            x.iter()
                .zip(y)
                .map(|(&a, &b)| (a * 31 + b * 17 + salt) % domain as i64)
                .collect()
        } else {
            (0..rows).map(|_| rng.gen_range(0..domain as i64)).collect()
        };
        data.push(col);
    }
    let mut r = Relation::from_int_columns(format!("planted_{seed}"), column_names(cols), data);
    r.rename(format!("planted_{rows}x{cols}_{seed}"));
    r
}

/// Many columns, few rows.
pub fn wide(rows: usize, cols: usize, seed: u64) -> Relation {
    planted_relation(rows, cols, 6, seed)
}

/// Few columns, many rows.
pub fn deep(rows: usize, cols: usize, seed: u64) -> Relation {
    planted_relation(rows, cols, 40, seed)
}

pub const LINEITEM_COLUMNS: [&str; 16] = [
    "L_ORDERKEY",
    "L_PARTKEY",
    "L_SUPPKEY",
    "L_LINENUMBER",
    "L_QUANTITY",
    "L_EXTENDEDPRICE",
    "L_DISCOUNT",
    "L_TAX",
    "L_RETURNFLAG",
    "L_LINESTATUS",
    "L_SHIPDATE",
    "L_COMMITDATE",
    "L_RECEIPTDATE",
    "L_SHIPINSTRUCT",
    "L_SHIPMODE",
    "L_COMMENT",
];

const SHIP_INSTRUCT: [&str; 4] = ["DELIVER IN PERSON", "COLLECT COD", "NONE", "TAKE BACK RETURN"];
const SHIP_MODE: [&str; 7] = ["REG AIR", "AIR", "RAIL", "SHIP", "TRUCK", "MAIL", "FOB"];
const WORDS: [&str; 24] = [
    "furiously", "quickly", "carefully", "blithely", "slyly", "regular", "final", "express",
    "pending", "ironic", "bold", "even", "special", "packages", "deposits", "requests",
    "accounts", "instructions", "theodolites", "pinto", "beans", "foxes", "sleep", "haggle",
];

/// Day number (days since 1970-01-01) of a civil date.
fn days_from_civil(y: i64, m: i64, d: i64) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = y.div_euclid(400);
    let yoe = y - era * 400;
    let mp = (m + 9) % 12;
    let doy = (153 * mp + 2) / 5 + d - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

fn civil_from_days(z: i64) -> String {
    let z = z + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z - era * 146_097;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = doy - (153 * mp + 2) / 5 + 1;
    let m = if mp < 10 { mp + 3 } else { mp - 9 };
    let y = yoe + era * 400 + i64::from(m <= 2);
    format!("{y:04}-{m:02}-{d:02}")
}

/// Lineitem-like rows generated order by order with the TPC-H rules:
/// 1-7 lines per order, supplier derived from part, price from part and
/// quantity, ship/commit/receipt dates offset from the order date, return
/// flag and line status from the receipt and ship dates. Scale follows
/// `rows` (6M rows per scale unit).
pub fn lineitem(rows: usize, seed: u64) -> Relation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sf = rows as f64 / 6_000_000.0;
    let parts = ((200_000.0 * sf) as i64).max(200);
    let suppliers = ((10_000.0 * sf) as i64).max(10);
    let start = days_from_civil(1992, 1, 1);
    let end = days_from_civil(1998, 12, 31);
    let current = days_from_civil(1995, 6, 17);

    let mut cells: Vec<Vec<Option<Value>>> = (0..16).map(|_| Vec::with_capacity(rows)).collect();
    let mut order = 0i64;
    while cells[0].len() < rows {
        order += 1;
        // sparse order keys: 8 used out of every 32
        let orderkey = (order - 1) / 8 * 32 + (order - 1) % 8 + 1;
        let orderdate = rng.gen_range(start..=end - 151);
        let lines = rng.gen_range(1..=7);
        for line in 1..=lines {
            if cells[0].len() == rows {
                break;
            }
            let partkey = rng.gen_range(1..=parts);
            let i = rng.gen_range(0..4);
            let suppkey = (partkey + i * (suppliers / 4 + (partkey - 1) / suppliers)) % suppliers + 1;
            let quantity = rng.gen_range(1..=50i64);
            let retail = (90_000 + (partkey / 10) % 20_001 + 100 * (partkey % 1000)) as f64 / 100.0;
            let price = (quantity as f64 * retail * 100.0).round() / 100.0;
            let discount = rng.gen_range(0..=10) as f64 / 100.0;
            let tax = rng.gen_range(0..=8) as f64 / 100.0;
            let ship = orderdate + rng.gen_range(1..=121);
            let commit = orderdate + rng.gen_range(30..=90);
            let receipt = ship + rng.gen_range(1..=30);
            let flag = if receipt <= current {
                if rng.gen_bool(0.5) { "R" } else { "A" }
            } else {
                "N"
            };
            let status = if ship > current { "O" } else { "F" };
            let words = rng.gen_range(2..=6);
            let comment: Vec<&str> = (0..words).map(|_| WORDS[rng.gen_range(0..WORDS.len())]).collect();

            let row: [Value; 16] = [
                Value::Number(orderkey as f64),
                Value::Number(partkey as f64),
                Value::Number(suppkey as f64),
                Value::Number(line as f64),
                Value::Number(quantity as f64),
                Value::Number(price),
                Value::Number(discount),
                Value::Number(tax),
                Value::Text(flag.into()),
                Value::Text(status.into()),
                Value::Text(civil_from_days(ship)),
                Value::Text(civil_from_days(commit)),
                Value::Text(civil_from_days(receipt)),
                Value::Text(SHIP_INSTRUCT[rng.gen_range(0..4)].into()),
                Value::Text(SHIP_MODE[rng.gen_range(0..7)].into()),
                Value::Text(comment.join(" ")),
            ];
            for (c, v) in row.into_iter().enumerate() {
                cells[c].push(Some(v));
            }
        }
    }
    let kinds = (0..16)
        .map(|c| if c < 8 { ColumnKind::Numeric } else { ColumnKind::Categorical })
        .collect();
    let names = LINEITEM_COLUMNS.iter().map(|s| s.to_string()).collect();
    Relation::from_columns(format!("lineitem_{rows}"), names, kinds, cells, true)
}

/// Round-trip a relation through CSV text, e.g. to write fixtures.
pub fn to_csv_string(r: &Relation) -> String {
    let mut buf = Vec::new();
    r.write_csv(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

/// Options matching how generated relations were typed.
pub fn load_options() -> LoadOptions {
    LoadOptions::default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn civil_dates_round_trip() {
        assert_eq!(civil_from_days(days_from_civil(1995, 6, 17)), "1995-06-17");
        assert_eq!(civil_from_days(days_from_civil(1992, 2, 29)), "1992-02-29");
        assert_eq!(days_from_civil(1970, 1, 1), 0);
    }

    #[test]
    fn lineitem_rules_hold() {
        let r = lineitem(2000, 1);
        assert_eq!(r.len(), 2000);
        assert_eq!(r.arity(), 16);
        let flag = r.attribute_index("L_RETURNFLAG").unwrap();
        let status = r.attribute_index("L_LINESTATUS").unwrap();
        for row in 0..r.len() as u32 {
            let t = r.tuple(row);
            if t.value(status).to_string() == "O" {
                assert_eq!(t.value(flag).to_string(), "N");
            }
        }
    }

    #[test]
    fn random_is_seeded() {
        let spec = RandomSpec::new(30, 4, 5).skew(1.0);
        let a = to_csv_string(&random_relation(&spec, 9));
        let b = to_csv_string(&random_relation(&spec, 9));
        assert_eq!(a, b);
        assert_ne!(a, to_csv_string(&random_relation(&spec, 10)));
    }
}
