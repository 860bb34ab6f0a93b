//! Prefix tree over sorted attribute lists. Each node's `rhs` holds the
//! attributes `A` for which the root-to-node path `X` is stored as `X -> A`.

use crate::model::AttributeSet;

#[derive(Clone, Debug)]
struct Node {
    /// Child per next attribute, kept sorted by attribute.
    children: Vec<(u8, u32)>,
    rhs: u64,
    /// Superset of the rhs bits anywhere in this subtree; only ever grows.
    below: u64,
}

impl Node {
    fn new() -> Self {
        Node {
            children: Vec::new(),
            rhs: 0,
            below: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct FdTree {
    m: usize,
    nodes: Vec<Node>,
    len: usize,
}

impl FdTree {
    pub fn new(m: usize) -> Self {
        assert!(m <= 64);
        FdTree {
            m,
            nodes: vec![Node::new()],
            len: 0,
        }
    }

    pub fn arity(&self) -> usize {
        self.m
    }

    /// Number of stored `X -> A` pairs.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Store `lhs -> rhs` without any minimality maintenance. Returns false
    /// if it was already present.
    pub fn add(&mut self, lhs: AttributeSet, rhs: usize) -> bool {
        let bit = 1u64 << rhs;
        let mut at = 0usize;
        self.nodes[0].below |= bit;
        for a in lhs.iter() {
            at = match self.child(at, a) {
                Some(c) => c,
                None => {
                    let id = self.nodes.len() as u32;
                    self.nodes.push(Node::new());
                    let kids = &mut self.nodes[at].children;
                    let pos = kids.partition_point(|&(x, _)| (x as usize) < a);
                    kids.insert(pos, (a as u8, id));
                    id as usize
                }
            };
            self.nodes[at].below |= bit;
        }
        let fresh = self.nodes[at].rhs & bit == 0;
        self.nodes[at].rhs |= bit;
        self.len += usize::from(fresh);
        fresh
    }

    /// Store `lhs -> rhs` and drop every stored specialization of it.
    /// Returns false (and stores nothing) when a generalization already
    /// exists.
    pub fn insert(&mut self, lhs: AttributeSet, rhs: usize) -> bool {
        if self.contains_generalization(lhs, rhs) {
            return false;
        }
        for spec in self.specializations(lhs, rhs) {
            self.remove(spec, rhs);
        }
        self.add(lhs, rhs)
    }

    pub fn contains(&self, lhs: AttributeSet, rhs: usize) -> bool {
        self.find(lhs)
            .is_some_and(|n| self.nodes[n].rhs & (1u64 << rhs) != 0)
    }

    pub fn remove(&mut self, lhs: AttributeSet, rhs: usize) -> bool {
        match self.find(lhs) {
            Some(n) if self.nodes[n].rhs & (1u64 << rhs) != 0 => {
                self.nodes[n].rhs &= !(1u64 << rhs);
                self.len -= 1;
                true
            }
            _ => false,
        }
    }

    /// True iff some stored `Z -> rhs` has `Z ⊆ lhs`.
    pub fn contains_generalization(&self, lhs: AttributeSet, rhs: usize) -> bool {
        self.any_generalization(0, lhs.bits(), 1u64 << rhs)
    }

    fn any_generalization(&self, at: usize, allowed: u64, bit: u64) -> bool {
        let node = &self.nodes[at];
        if node.rhs & bit != 0 {
            return true;
        }
        node.children.iter().any(|&(a, c)| {
            allowed & (1u64 << a) != 0
                && self.nodes[c as usize].below & bit != 0
                && self.any_generalization(c as usize, allowed, bit)
        })
    }

    /// Every stored `Z -> A` with `Z ⊆ lhs` and `A ∈ rhs`, as `(Z, A-bits)`.
    pub fn generalizations(&self, lhs: AttributeSet, rhs: AttributeSet) -> Vec<(AttributeSet, AttributeSet)> {
        let mut out = Vec::new();
        self.collect_generalizations(0, 0, lhs.bits(), rhs.bits(), &mut out);
        out
    }

    fn collect_generalizations(
        &self,
        at: usize,
        path: u64,
        allowed: u64,
        mask: u64,
        out: &mut Vec<(AttributeSet, AttributeSet)>,
    ) {
        let node = &self.nodes[at];
        if node.rhs & mask != 0 {
            out.push((AttributeSet::from_bits(path), AttributeSet::from_bits(node.rhs & mask)));
        }
        for &(a, c) in &node.children {
            if allowed & (1u64 << a) != 0 && self.nodes[c as usize].below & mask != 0 {
                self.collect_generalizations(c as usize, path | (1u64 << a), allowed, mask, out);
            }
        }
    }

    /// Stored left-hand sides `Z ⊇ lhs` with `Z -> rhs`.
    pub fn specializations(&self, lhs: AttributeSet, rhs: usize) -> Vec<AttributeSet> {
        let mut out = Vec::new();
        let need: Vec<usize> = lhs.iter().collect();
        self.collect_specializations(0, 0, &need, 1u64 << rhs, &mut out);
        out
    }

    fn collect_specializations(&self, at: usize, path: u64, need: &[usize], bit: u64, out: &mut Vec<AttributeSet>) {
        let node = &self.nodes[at];
        if need.is_empty() && node.rhs & bit != 0 {
            out.push(AttributeSet::from_bits(path));
        }
        for &(a, c) in &node.children {
            let a = a as usize;
            let rest = match need.first() {
                Some(&first) if a > first => break,
                Some(&first) if a == first => &need[1..],
                _ => need,
            };
            if self.nodes[c as usize].below & bit != 0 {
                self.collect_specializations(c as usize, path | (1u64 << a), rest, bit, out);
            }
        }
    }

    /// All stored `(X, rhs-bits)` with `|X| = level`, in canonical order.
    pub fn get_level(&self, level: usize) -> Vec<(AttributeSet, AttributeSet)> {
        let mut out = Vec::new();
        self.collect_level(0, 0, 0, level, &mut out);
        out.sort_by(|a, b| a.0.canonical_cmp(&b.0));
        out
    }

    fn collect_level(&self, at: usize, path: u64, depth: usize, level: usize, out: &mut Vec<(AttributeSet, AttributeSet)>) {
        let node = &self.nodes[at];
        if depth == level {
            if node.rhs != 0 {
                out.push((AttributeSet::from_bits(path), AttributeSet::from_bits(node.rhs)));
            }
            return;
        }
        for &(a, c) in &node.children {
            self.collect_level(c as usize, path | (1u64 << a), depth + 1, level, out);
        }
    }

    /// Deepest level holding a stored pair, or `None` when empty.
    pub fn depth(&self) -> Option<usize> {
        let mut best = None;
        self.walk(0, 0, &mut |lhs, _| {
            let d = lhs.len();
            best = Some(best.map_or(d, |b: usize| b.max(d)));
        });
        best
    }

    /// Every stored `(X, A)` in canonical order.
    pub fn all(&self) -> Vec<(AttributeSet, usize)> {
        let mut out = Vec::new();
        self.walk(0, 0, &mut |lhs, rhs| {
            out.extend(rhs.iter().map(|a| (lhs, a)));
        });
        out.sort_by(|a, b| a.0.canonical_cmp(&b.0).then(a.1.cmp(&b.1)));
        out
    }

    fn walk(&self, at: usize, path: u64, f: &mut impl FnMut(AttributeSet, AttributeSet)) {
        let node = &self.nodes[at];
        if node.rhs != 0 {
            f(AttributeSet::from_bits(path), AttributeSet::from_bits(node.rhs));
        }
        for &(a, c) in &node.children {
            self.walk(c as usize, path | (1u64 << a), f);
        }
    }

    fn child(&self, at: usize, a: usize) -> Option<usize> {
        let kids = &self.nodes[at].children;
        kids.binary_search_by_key(&(a as u8), |&(x, _)| x)
            .ok()
            .map(|i| kids[i].1 as usize)
    }

    fn find(&self, lhs: AttributeSet) -> Option<usize> {
        let mut at = 0;
        for a in lhs.iter() {
            at = self.child(at, a)?;
        }
        Some(at)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(ix: &[usize]) -> AttributeSet {
        AttributeSet::from_indices(ix.iter().copied())
    }

    #[test]
    fn generalization_query() {
        let mut t = FdTree::new(4);
        t.insert(s(&[1]), 0);
        assert!(t.contains_generalization(s(&[1, 2]), 0));
        assert!(!t.contains_generalization(s(&[2, 3]), 0));
        assert!(!t.contains_generalization(s(&[1, 2]), 3));
    }

    #[test]
    fn insert_drops_specializations() {
        let mut t = FdTree::new(4);
        t.insert(s(&[1, 2]), 0);
        t.insert(s(&[1, 3]), 0);
        t.insert(s(&[2, 3]), 1);
        assert!(t.insert(s(&[1]), 0));
        assert!(!t.contains(s(&[1, 2]), 0));
        assert!(!t.contains(s(&[1, 3]), 0));
        assert!(t.contains(s(&[2, 3]), 1));
        assert_eq!(t.len(), 2);
        assert!(!t.insert(s(&[1, 2]), 0));
    }

    #[test]
    fn levels_and_generalizations() {
        let mut t = FdTree::new(4);
        t.insert(s(&[1, 2]), 0);
        t.insert(s(&[1, 3]), 0);
        t.insert(s(&[]), 2);
        assert_eq!(t.get_level(2), vec![(s(&[1, 2]), s(&[0])), (s(&[1, 3]), s(&[0]))]);
        assert_eq!(t.get_level(0), vec![(s(&[]), s(&[2]))]);
        let g = t.generalizations(s(&[0, 1, 2]), s(&[0, 2]));
        assert_eq!(g.len(), 2);
        assert_eq!(t.depth(), Some(2));
    }
}
