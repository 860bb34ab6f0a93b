//! Relational data model shared by every other module.

pub mod attrset;
pub mod bitset;
pub mod dependency;
pub mod partition;
pub mod predicate;
pub mod relation;

pub use attrset::{AttributeSet, MAX_ATTRIBUTES};
pub use bitset::Bitset;
pub use dependency::{canonicalize, Dependency, DependencyKind, Direction};
pub use partition::{EquivalenceClass, Partition};
pub use predicate::{EvidenceSet, Op, Predicate, PredicateSpace, SpaceMode};
pub use relation::{Column, ColumnKind, LoadOptions, Relation, RowId, TupleView, Value};
