//! How work is placed on workers: round-robin, the triangle layout for
//! self-joins, skew-aware block placement and grouped class placement.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::model::RowId;

/// Item `i` goes to worker `i mod k`.
pub fn scatter_round_robin<T>(items: impl IntoIterator<Item = T>, k: usize) -> Vec<Vec<T>> {
    assert!(k >= 1, "k must be at least 1");
    let mut out: Vec<Vec<T>> = (0..k).map(|_| Vec::new()).collect();
    for (i, item) in items.into_iter().enumerate() {
        out[i % k].push(item);
    }
    out
}

/// Split into `parts` contiguous runs whose lengths differ by at most one;
/// the longer runs come first.
pub fn split_even<T: Clone>(items: &[T], parts: usize) -> Vec<Vec<T>> {
    split_ranges(items.len(), parts)
        .into_iter()
        .map(|r| items[r].to_vec())
        .collect()
}

pub fn split_ranges(len: usize, parts: usize) -> Vec<Range<usize>> {
    assert!(parts >= 1);
    let base = len / parts;
    let extra = len % parts;
    let mut start = 0;
    (0..parts)
        .map(|p| {
            let size = base + usize::from(p < extra);
            let r = start..start + size;
            start += size;
            r
        })
        .collect()
}

/// A list of items with its serialized size.
#[derive(Clone, Debug, PartialEq)]
pub struct Chunk<T> {
    pub id: usize,
    pub items: Vec<T>,
    pub byte_size: u64,
}

impl<T> Chunk<T> {
    pub fn new(id: usize, items: Vec<T>, item_bytes: impl Fn(&T) -> u64) -> Self {
        let byte_size = super::wire::LEN + items.iter().map(item_bytes).sum::<u64>();
        Chunk {
            id,
            items,
            byte_size,
        }
    }
}

/// Upper-triangular placement of chunk pairs on workers. With `l` chunks,
/// cell `(p, q)`, `p <= q`, is handled by one worker; cells are numbered
/// row by row. Workers beyond `l(l+1)/2` stay idle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleLayout {
    l: usize,
    cells: Vec<(usize, usize)>,
}

impl TriangleLayout {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Contract("triangle layout needs k >= 1".into()));
        }
        let mut l = 1;
        while (l + 1) * (l + 2) / 2 <= k {
            l += 1;
        }
        let cells = (0..l).flat_map(|p| (p..l).map(move |q| (p, q))).collect();
        Ok(TriangleLayout { l, cells })
    }

    /// Number of chunks the input must be split into.
    pub fn side(&self) -> usize {
        self.l
    }

    /// Workers that receive a cell.
    pub fn busy_workers(&self) -> usize {
        self.cells.len()
    }

    /// The `(p, q)` cell of a worker, if it has one.
    pub fn cell(&self, worker: usize) -> Option<(usize, usize)> {
        self.cells.get(worker).copied()
    }

    pub fn worker_of(&self, p: usize, q: usize) -> usize {
        let (p, q) = if p <= q { (p, q) } else { (q, p) };
        // rows above p hold l + (l-1) + ... + (l-p+1) cells
        p * self.l - p * (p.saturating_sub(1)) / 2 + (q - p)
    }

    pub fn cells(&self) -> &[(usize, usize)] {
        &self.cells
    }
}

/// One worker's share of a triangle self-join.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TriangleTask {
    pub worker: usize,
    pub p: usize,
    pub q: usize,
}

impl TriangleTask {
    /// Chunks this worker must receive.
    pub fn chunk_ids(&self) -> Vec<usize> {
        if self.p == self.q {
            vec![self.p]
        } else {
            vec![self.p, self.q]
        }
    }

    /// Calls `f` on every pair this worker generates: cross-chunk pairs off
    /// the diagonal, unordered intra-chunk pairs on it.
    pub fn for_each_pair<T: Copy>(&self, chunks: &[Vec<T>], mut f: impl FnMut(T, T)) {
        let a = &chunks[self.p];
        if self.p == self.q {
            for i in 0..a.len() {
                for j in i + 1..a.len() {
                    f(a[i], a[j]);
                }
            }
        } else {
            for &x in a {
                for &y in &chunks[self.q] {
                    f(x, y);
                }
            }
        }
    }

    pub fn pair_count<T>(&self, chunks: &[Vec<T>]) -> u64 {
        let a = chunks[self.p].len() as u64;
        if self.p == self.q {
            a * a.saturating_sub(1) / 2
        } else {
            a * chunks[self.q].len() as u64
        }
    }
}

/// Tasks for a self-join of `chunks`, which must number exactly the
/// layout's side length for `k`.
pub fn triangle_self_join<T>(chunks: &[Vec<T>], k: usize) -> Result<(Vec<TriangleTask>, TriangleLayout)> {
    let layout = TriangleLayout::new(k)?;
    if chunks.len() != layout.side() {
        return Err(Error::Contract(format!(
            "triangle join over k={k} needs {} chunks, got {}",
            layout.side(),
            chunks.len()
        )));
    }
    let tasks = layout
        .cells()
        .iter()
        .enumerate()
        .map(|(worker, &(p, q))| TriangleTask { worker, p, q })
        .collect();
    Ok((tasks, layout))
}

/// Part of one block handled by one worker: the pairs between two ranges
/// of the block's rows, or the unordered pairs within one range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockTask {
    pub block: usize,
    pub left: Range<usize>,
    pub right: Range<usize>,
}

impl BlockTask {
    pub fn is_diagonal(&self) -> bool {
        self.left == self.right
    }

    pub fn pair_count(&self) -> u64 {
        let a = self.left.len() as u64;
        if self.is_diagonal() {
            a * a.saturating_sub(1) / 2
        } else {
            a * self.right.len() as u64
        }
    }

    /// Rows of the block this task needs.
    pub fn row_count(&self) -> usize {
        if self.is_diagonal() {
            self.left.len()
        } else {
            self.left.len() + self.right.len()
        }
    }

    pub fn for_each_pair(&self, rows: &[RowId], mut f: impl FnMut(RowId, RowId)) {
        if self.is_diagonal() {
            let s = &rows[self.left.clone()];
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    f(s[i], s[j]);
                }
            }
        } else {
            for &x in &rows[self.left.clone()] {
                for &y in &rows[self.right.clone()] {
                    f(x, y);
                }
            }
        }
    }
}

/// Place the intra-block pair comparisons of `blocks` on `k` workers.
///
/// A block of `B` rows weighs `B(B-1)/2`. Blocks heavier than `W/k` are
/// given `⌊k·w/W⌋` workers' worth of triangle cells; the rest are packed
/// whole, heaviest first, onto the least-loaded worker.
pub fn block_distribute(blocks: &[Vec<RowId>], k: usize) -> Vec<Vec<BlockTask>> {
    assert!(k >= 1);
    let weight = |b: &Vec<RowId>| {
        let n = b.len() as u64;
        n * n.saturating_sub(1) / 2
    };
    let total: u64 = blocks.iter().map(weight).sum();
    let mut tasks: Vec<Vec<BlockTask>> = vec![Vec::new(); k];
    let mut load = vec![0u64; k];
    if total == 0 {
        return tasks;
    }
    let mut order: Vec<usize> = (0..blocks.len()).filter(|&b| weight(&blocks[b]) > 0).collect();
    order.sort_by(|&a, &b| weight(&blocks[b]).cmp(&weight(&blocks[a])).then(a.cmp(&b)));

    let mut place = |task: BlockTask, tasks: &mut Vec<Vec<BlockTask>>| {
        let w = (0..k).min_by_key(|&w| (load[w], w)).unwrap();
        load[w] += task.pair_count();
        tasks[w].push(task);
    };
    for &b in &order {
        let w = weight(&blocks[b]);
        let len = blocks[b].len();
        if w as u128 * k as u128 > total as u128 {
            let share = ((w as u128 * k as u128) / total as u128).max(1) as usize;
            let layout = TriangleLayout::new(share).expect("share >= 1");
            let ranges = split_ranges(len, layout.side().min(len));
            for &(p, q) in layout.cells() {
                if p < ranges.len() && q < ranges.len() {
                    place(
                        BlockTask {
                            block: b,
                            left: ranges[p].clone(),
                            right: ranges[q].clone(),
                        },
                        &mut tasks,
                    );
                }
            }
        } else {
            place(
                BlockTask {
                    block: b,
                    left: 0..len,
                    right: 0..len,
                },
                &mut tasks,
            );
        }
    }
    tasks
}

/// Sort classes by size (ties by position), then deal them out in
/// consecutive groups of `k`, one per worker. Returns class indices.
pub fn grouped_class_assignment(sizes: &[usize], k: usize) -> Vec<Vec<usize>> {
    assert!(k >= 1);
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by_key(|&c| (sizes[c], c));
    scatter_round_robin(order, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_robin_shapes() {
        let sizes: Vec<usize> = scatter_round_robin(0..16, 5).iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![4, 3, 3, 3, 3]);
        let one = scatter_round_robin([7], 55);
        assert_eq!(one.iter().filter(|w| !w.is_empty()).count(), 1);
        assert_eq!(scatter_round_robin(0..4, 2), vec![vec![0, 2], vec![1, 3]]);
    }

    #[test]
    fn triangle_layouts() {
        let t = TriangleLayout::new(3).unwrap();
        assert_eq!(t.side(), 2);
        assert_eq!(t.cells(), &[(0, 0), (0, 1), (1, 1)]);
        assert_eq!(TriangleLayout::new(1).unwrap().side(), 1);
        assert_eq!(TriangleLayout::new(55).unwrap().side(), 10);
        assert_eq!(TriangleLayout::new(54).unwrap().side(), 9);
        assert!(TriangleLayout::new(0).is_err());
        let t = TriangleLayout::new(10).unwrap();
        for (w, &(p, q)) in t.cells().iter().enumerate() {
            assert_eq!(t.worker_of(p, q), w);
            assert_eq!(t.worker_of(q, p), w);
        }
    }

    #[test]
    fn grouped_assignment_example() {
        let sizes = [1, 3, 4, 5, 7, 9];
        let got: Vec<Vec<usize>> = grouped_class_assignment(&sizes, 3)
            .into_iter()
            .map(|w| w.into_iter().map(|c| sizes[c]).collect())
            .collect();
        assert_eq!(got, vec![vec![1, 5], vec![3, 7], vec![4, 9]]);
        assert!(grouped_class_assignment(&[], 4).iter().all(Vec::is_empty));
    }

    #[test]
    fn split_ranges_balanced() {
        assert_eq!(split_ranges(7, 3), vec![0..3, 3..5, 5..7]);
        assert_eq!(split_ranges(1, 3), vec![0..1, 1..1, 1..1]);
    }
}
