use super::attrset::AttributeSet;
use super::relation::RowId;

/// Row ids sharing one value combination, ascending.
pub type EquivalenceClass = Vec<RowId>;

/// A stripped partition `π_X`: classes of size one are dropped but counted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    attributes: AttributeSet,
    classes: Vec<EquivalenceClass>,
    stripped_singletons: usize,
}

impl Partition {
    /// Normalize arbitrary groups into the canonical stripped form.
    ///
    /// Groups may be in any order and need not be sorted; singleton groups
    /// are stripped and counted. Empty groups are ignored.
    pub fn from_groups(attributes: AttributeSet, groups: Vec<Vec<RowId>>) -> Partition {
        let mut stripped_singletons = 0;
        let mut classes = Vec::with_capacity(groups.len());
        for mut g in groups {
            match g.len() {
                0 => {}
                1 => stripped_singletons += 1,
                _ => {
                    g.sort_unstable();
                    classes.push(g);
                }
            }
        }
        classes.sort_unstable_by_key(|c| c[0]);
        Partition {
            attributes,
            classes,
            stripped_singletons,
        }
    }

    /// Assemble from classes that are already stripped and canonically
    /// ordered.
    pub(crate) fn from_canonical(
        attributes: AttributeSet,
        classes: Vec<EquivalenceClass>,
        stripped_singletons: usize,
    ) -> Partition {
        debug_assert!(classes.iter().all(|c| c.len() >= 2));
        debug_assert!(classes.windows(2).all(|w| w[0][0] < w[1][0]));
        Partition {
            attributes,
            classes,
            stripped_singletons,
        }
    }

    pub fn attributes(&self) -> AttributeSet {
        self.attributes
    }

    pub fn classes(&self) -> &[EquivalenceClass] {
        &self.classes
    }

    pub fn into_classes(self) -> Vec<EquivalenceClass> {
        self.classes
    }

    pub fn stripped_singletons(&self) -> usize {
        self.stripped_singletons
    }

    /// `|π_X|`, singletons included.
    pub fn class_count(&self) -> usize {
        self.classes.len() + self.stripped_singletons
    }

    /// Rows held in stored (non-singleton) classes.
    pub fn stored_rows(&self) -> usize {
        self.classes.iter().map(Vec::len).sum()
    }

    /// Number of rows of the relation this partition was built over.
    pub fn row_count(&self) -> usize {
        self.stored_rows() + self.stripped_singletons
    }

    /// True iff every class is a singleton.
    pub fn is_unique(&self) -> bool {
        self.classes.is_empty()
    }

    /// Class label per row; rows in stripped singletons get `u32::MAX`.
    pub fn labels(&self, n: usize) -> Vec<u32> {
        let mut labels = vec![u32::MAX; n];
        for (ci, class) in self.classes.iter().enumerate() {
            for &r in class {
                labels[r as usize] = ci as u32;
            }
        }
        labels
    }
}
