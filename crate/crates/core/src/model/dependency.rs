//! Discovered dependencies and their canonical text form.
//!
//! | kind | rendering |
//! |------|-----------|
//! | FD   | `B,C -> A` (empty LHS renders as `TRUE -> A`) |
//! | UCC  | `UNIQUE(AC,PH)` |
//! | OD   | `SAL ~> STX [desc]` |
//! | DC   | `!( t0.ST == t1.ST & t0.SAL < t1.SAL )` |
//!
//! Attribute lists follow column order; DC predicates are sorted by
//! attribute, then operator.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::attrset::AttributeSet;
use super::predicate::{Op, Predicate};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DependencyKind {
    Fd,
    Ucc,
    Od,
    Dc,
}

impl DependencyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DependencyKind::Fd => "fd",
            DependencyKind::Ucc => "ucc",
            DependencyKind::Od => "od",
            DependencyKind::Dc => "dc",
        }
    }
}

impl std::str::FromStr for DependencyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fd" => Ok(DependencyKind::Fd),
            "ucc" => Ok(DependencyKind::Ucc),
            "od" => Ok(DependencyKind::Od),
            "dc" => Ok(DependencyKind::Dc),
            other => Err(Error::Config(format!("unknown dependency kind {other:?}"))),
        }
    }
}

/// Direction the right-hand side of an order dependency is sorted in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Asc,
    Desc,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Asc, Direction::Desc];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Asc => "asc",
            Direction::Desc => "desc",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Dependency {
    Fd {
        lhs: AttributeSet,
        rhs: usize,
    },
    Ucc {
        columns: AttributeSet,
    },
    Od {
        lhs: AttributeSet,
        rhs: usize,
        direction: Direction,
    },
    /// Always read as `!( t0.a op t1.a & ... )`; predicates kept sorted.
    Dc {
        predicates: Vec<Predicate>,
    },
}

impl Dependency {
    pub fn fd(lhs: AttributeSet, rhs: usize) -> Self {
        Dependency::Fd { lhs, rhs }
    }

    pub fn ucc(columns: AttributeSet) -> Self {
        Dependency::Ucc { columns }
    }

    pub fn od(lhs: AttributeSet, rhs: usize, direction: Direction) -> Self {
        Dependency::Od {
            lhs,
            rhs,
            direction,
        }
    }

    pub fn dc(mut predicates: Vec<Predicate>) -> Self {
        predicates.sort();
        predicates.dedup();
        Dependency::Dc { predicates }
    }

    pub fn kind(&self) -> DependencyKind {
        match self {
            Dependency::Fd { .. } => DependencyKind::Fd,
            Dependency::Ucc { .. } => DependencyKind::Ucc,
            Dependency::Od { .. } => DependencyKind::Od,
            Dependency::Dc { .. } => DependencyKind::Dc,
        }
    }

    /// Total order used for every printed result list.
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        use Dependency::*;
        self.kind().cmp(&other.kind()).then_with(|| match (self, other) {
            (Fd { lhs: l1, rhs: r1 }, Fd { lhs: l2, rhs: r2 }) => {
                l1.canonical_cmp(l2).then(r1.cmp(r2))
            }
            (Ucc { columns: c1 }, Ucc { columns: c2 }) => c1.canonical_cmp(c2),
            (
                Od {
                    lhs: l1,
                    rhs: r1,
                    direction: d1,
                },
                Od {
                    lhs: l2,
                    rhs: r2,
                    direction: d2,
                },
            ) => l1.canonical_cmp(l2).then(r1.cmp(r2)).then(d1.cmp(d2)),
            (Dc { predicates: p1 }, Dc { predicates: p2 }) => {
                p1.len().cmp(&p2.len()).then_with(|| p1.cmp(p2))
            }
            _ => Ordering::Equal,
        })
    }

    pub fn render(&self, names: &[String]) -> String {
        let list = |set: AttributeSet| {
            set.iter()
                .map(|a| names[a].as_str())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            Dependency::Fd { lhs, rhs } => {
                let left = if lhs.is_empty() {
                    "TRUE".to_owned()
                } else {
                    list(*lhs)
                };
                format!("{left} -> {}", names[*rhs])
            }
            Dependency::Ucc { columns } => format!("UNIQUE({})", list(*columns)),
            Dependency::Od {
                lhs,
                rhs,
                direction,
            } => format!("{} ~> {} [{}]", list(*lhs), names[*rhs], direction.as_str()),
            Dependency::Dc { predicates } => {
                let body = predicates
                    .iter()
                    .map(|p| {
                        let a = &names[p.attribute];
                        format!("t0.{a} {} t1.{a}", p.op.symbol())
                    })
                    .collect::<Vec<_>>()
                    .join(" & ");
                format!("!( {body} )")
            }
        }
    }

    pub fn parse(text: &str, names: &[String]) -> Result<Dependency> {
        let fail = |message: &str| Error::Parse {
            text: text.to_owned(),
            message: message.to_owned(),
        };
        let attr = |name: &str| {
            names
                .iter()
                .position(|n| n == name.trim())
                .ok_or_else(|| fail(&format!("unknown attribute {:?}", name.trim())))
        };
        let attr_list = |s: &str| -> Result<AttributeSet> {
            if s.trim().is_empty() {
                return Ok(AttributeSet::EMPTY);
            }
            s.split(',').map(attr).collect::<Result<AttributeSet>>()
        };
        let t = text.trim();

        if let Some(body) = t.strip_prefix("UNIQUE(").and_then(|s| s.strip_suffix(')')) {
            return Ok(Dependency::ucc(attr_list(body)?));
        }
        if let Some(body) = t.strip_prefix("!(").and_then(|s| s.strip_suffix(')')) {
            let mut preds = Vec::new();
            for part in body.split(" & ") {
                let part = part.trim();
                let rest = part
                    .strip_prefix("t0.")
                    .ok_or_else(|| fail("predicate must start with t0."))?;
                let (lhs_name, op, rhs_name) = Op::ALL
                    .iter()
                    .find_map(|op| {
                        let sep = format!(" {} t1.", op.symbol());
                        rest.split_once(sep.as_str()).map(|(l, r)| (l, *op, r))
                    })
                    .ok_or_else(|| fail("missing operator"))?;
                if lhs_name != rhs_name {
                    return Err(fail("cross-attribute predicates are not supported"));
                }
                preds.push(Predicate::new(attr(lhs_name)?, op));
            }
            return Ok(Dependency::dc(preds));
        }
        if let Some((lhs, rest)) = t.split_once(" ~> ") {
            let (rhs, dir) = rest
                .rsplit_once(" [")
                .ok_or_else(|| fail("missing direction"))?;
            let direction = match dir.strip_suffix(']') {
                Some("asc") => Direction::Asc,
                Some("desc") => Direction::Desc,
                _ => return Err(fail("direction must be [asc] or [desc]")),
            };
            return Ok(Dependency::od(attr_list(lhs)?, attr(rhs)?, direction));
        }
        if let Some((lhs, rhs)) = t.split_once(" -> ") {
            let lhs = if lhs.trim() == "TRUE" {
                AttributeSet::EMPTY
            } else {
                attr_list(lhs)?
            };
            return Ok(Dependency::fd(lhs, attr(rhs)?));
        }
        Err(fail("unrecognised dependency form"))
    }
}

/// Sort into canonical order and drop duplicates.
pub fn canonicalize(deps: &mut Vec<Dependency>) {
    deps.sort_by(Dependency::canonical_cmp);
    deps.dedup();
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(ns: &[&str]) -> Vec<String> {
        ns.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn renders_exact_forms() {
        let n = names(&["A", "B", "C", "ST", "SAL", "TR"]);
        assert_eq!(
            Dependency::fd(AttributeSet::from_indices([2, 1]), 0).render(&n),
            "B,C -> A"
        );
        assert_eq!(Dependency::fd(AttributeSet::EMPTY, 0).render(&n), "TRUE -> A");
        assert_eq!(
            Dependency::ucc(AttributeSet::from_indices([0, 3])).render(&n),
            "UNIQUE(A,ST)"
        );
        assert_eq!(
            Dependency::od(AttributeSet::singleton(4), 5, Direction::Desc).render(&n),
            "SAL ~> TR [desc]"
        );
        let dc = Dependency::dc(vec![
            Predicate::new(5, Op::Gt),
            Predicate::new(3, Op::Eq),
            Predicate::new(4, Op::Lt),
        ]);
        assert_eq!(
            dc.render(&n),
            "!( t0.ST == t1.ST & t0.SAL < t1.SAL & t0.TR > t1.TR )"
        );
    }

    #[test]
    fn parse_rejects_garbage() {
        let n = names(&["A", "B"]);
        assert!(Dependency::parse("A => B", &n).is_err());
        assert!(Dependency::parse("Z -> A", &n).is_err());
        assert!(Dependency::parse("!( t0.A == t1.B )", &n).is_err());
        assert!(Dependency::parse("A ~> B [up]", &n).is_err());
    }
}
