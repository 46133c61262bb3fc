//! Ordered partitions of the vertex set.
//!
//! A coloring keeps all vertices in one array, grouped contiguously by cell.
//! A cell's id is the index of its first vertex in that array, which makes
//! ids stable under splitting (a fragment that keeps the front keeps the id)
//! and isomorphism-invariant (refinement orders fragments invariantly), the
//! two properties the trace and the cell selector rely on.

use crate::graph::{Graph, Permutation};
use crate::Error;

pub(crate) const NO_CELL: u32 = u32::MAX;

/// One fragment produced by splitting a cell, in ascending-count order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Fragment {
    pub start: u32,
    pub len: u32,
    /// Neighbor count against the splitting cell, shared by all members.
    pub count: u32,
}

/// An ordered partition of `0..n` into cells.
#[derive(Debug, Clone)]
pub struct Coloring {
    /// All vertices, grouped contiguously by cell.
    order: Vec<u32>,
    /// Inverse of `order`: `pos[order[i]] == i`.
    pos: Vec<u32>,
    /// Cell id (start index) of each vertex.
    cell: Vec<u32>,
    /// Cell length, valid at indices that are cell starts.
    len: Vec<u32>,
    num_cells: usize,
    /// Cached id of the first largest non-singleton cell; `NO_CELL` iff
    /// the coloring is discrete. Kept valid by every mutation.
    largest: u32,
}

impl PartialEq for Coloring {
    fn eq(&self, other: &Self) -> bool {
        // `order` and `cell` determine the partition, ids and intra-cell
        // order completely; everything else is derived or scratch.
        self.order == other.order && self.cell == other.cell
    }
}

impl Eq for Coloring {}

impl Coloring {
    /// The initial coloring of a graph: one cell with all vertices, or, for
    /// colored graphs, one cell per distinct color in ascending color order.
    pub fn unit(g: &Graph) -> Coloring {
        let n = g.n();
        match g.colors() {
            None => Coloring::single_cell(n),
            Some(colors) => {
                let mut order: Vec<u32> = (0..n as u32).collect();
                order.sort_by_key(|&v| (colors[v as usize], v));
                let mut c = Coloring {
                    order,
                    pos: vec![0; n],
                    cell: vec![0; n],
                    len: vec![0; n],
                    num_cells: 0,
                    largest: NO_CELL,
                };
                let mut start = 0usize;
                while start < n {
                    let color = colors[c.order[start] as usize];
                    let mut end = start;
                    while end < n && colors[c.order[end] as usize] == color {
                        end += 1;
                    }
                    c.len[start] = (end - start) as u32;
                    for i in start..end {
                        let v = c.order[i];
                        c.pos[v as usize] = i as u32;
                        c.cell[v as usize] = start as u32;
                    }
                    c.num_cells += 1;
                    start = end;
                }
                c.rescan_largest();
                c
            }
        }
    }

    fn single_cell(n: usize) -> Coloring {
        let order: Vec<u32> = (0..n as u32).collect();
        let pos = order.clone();
        let mut len = vec![0u32; n];
        if n > 0 {
            len[0] = n as u32;
        }
        Coloring {
            order,
            pos,
            cell: vec![0; n],
            len,
            num_cells: usize::from(n > 0),
            largest: if n > 1 { 0 } else { NO_CELL },
        }
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn num_cells(&self) -> usize {
        self.num_cells
    }

    pub fn is_discrete(&self) -> bool {
        self.num_cells == self.n()
    }

    /// The cell id (start index) of vertex `v`.
    pub fn cell_of(&self, v: u32) -> u32 {
        self.cell[v as usize]
    }

    pub fn cell_len(&self, cell: u32) -> u32 {
        self.len[cell as usize]
    }

    pub fn members(&self, cell: u32) -> &[u32] {
        let s = cell as usize;
        &self.order[s..s + self.len[s] as usize]
    }

    pub fn vertex_order(&self) -> &[u32] {
        &self.order
    }

    pub fn position_of(&self, v: u32) -> u32 {
        self.pos[v as usize]
    }

    /// Iterates cell ids in positional order.
    pub fn cell_ids(&self) -> CellIds<'_> {
        CellIds {
            coloring: self,
            next: 0,
        }
    }

    /// The positional sequence of cell sizes.
    pub fn cell_sizes(&self) -> Vec<u32> {
        self.cell_ids().map(|c| self.cell_len(c)).collect()
    }

    /// Cached id of the first largest non-singleton cell, `NO_CELL` if
    /// discrete.
    pub(crate) fn largest_cell(&self) -> u32 {
        self.largest
    }

    /// Splits `v` off as a singleton at the front of its cell. The singleton
    /// keeps the old cell id; the remainder cell starts right after it.
    pub fn individualize(&mut self, v: u32) -> Result<(), Error> {
        let s = self.cell[v as usize];
        let l = self.len[s as usize];
        if l < 2 {
            return Err(Error::Contract(format!(
                "individualize: vertex {v} is already a singleton"
            )));
        }
        let vp = self.pos[v as usize];
        let front = self.order[s as usize];
        self.order[s as usize] = v;
        self.order[vp as usize] = front;
        self.pos[v as usize] = s;
        self.pos[front as usize] = vp;
        self.len[s as usize] = 1;
        let rem = s + 1;
        self.len[rem as usize] = l - 1;
        for i in rem..s + l {
            self.cell[self.order[i as usize] as usize] = rem;
        }
        self.num_cells += 1;
        if self.largest == s {
            self.rescan_largest();
        }
        Ok(())
    }

    /// Replaces cell `cell` by the fragments described in `sorted`, which
    /// must hold exactly the cell's members as `(count, vertex)` pairs in
    /// ascending count order (ties keeping their previous relative order).
    /// Fragment descriptors are appended to `frags`.
    pub(crate) fn apply_split(
        &mut self,
        cell: u32,
        sorted: &[(u32, u32)],
        frags: &mut Vec<Fragment>,
    ) {
        let s = cell as usize;
        debug_assert_eq!(sorted.len(), self.len[s] as usize);
        debug_assert!(sorted.windows(2).all(|w| w[0].0 <= w[1].0));
        let mut start = 0usize;
        while start < sorted.len() {
            let count = sorted[start].0;
            let mut end = start;
            while end < sorted.len() && sorted[end].0 == count {
                end += 1;
            }
            let frag_start = (s + start) as u32;
            self.len[frag_start as usize] = (end - start) as u32;
            for (i, &(_, v)) in sorted.iter().enumerate().take(end).skip(start) {
                self.order[s + i] = v;
                self.pos[v as usize] = (s + i) as u32;
                self.cell[v as usize] = frag_start;
            }
            frags.push(Fragment {
                start: frag_start,
                len: (end - start) as u32,
                count,
            });
            start = end;
        }
        let added = frags.len() - 1;
        debug_assert!(added >= 1, "apply_split requires at least two fragments");
        self.num_cells += added;
        if self.largest == cell {
            self.rescan_largest();
        }
    }

    fn rescan_largest(&mut self) {
        let mut best = NO_CELL;
        let mut best_len = 1u32;
        let n = self.n();
        let mut s = 0usize;
        while s < n {
            let l = self.len[s];
            if l > best_len {
                best = s as u32;
                best_len = l;
            }
            s += l as usize;
        }
        self.largest = best;
    }

    /// The image coloring under `phi`: same cell ids and sizes, members
    /// mapped pointwise.
    pub fn apply_permutation(&self, phi: &Permutation) -> Result<Coloring, Error> {
        if phi.len() != self.n() {
            return Err(Error::SizeMismatch(format!(
                "permutation on {} points applied to coloring of {} vertices",
                phi.len(),
                self.n()
            )));
        }
        let order: Vec<u32> = self.order.iter().map(|&v| phi.apply(v)).collect();
        let mut pos = vec![0u32; self.n()];
        let mut cell = vec![0u32; self.n()];
        for (i, &v) in order.iter().enumerate() {
            pos[v as usize] = i as u32;
            cell[v as usize] = self.cell[self.order[i] as usize];
        }
        Ok(Coloring {
            order,
            pos,
            cell,
            len: self.len.clone(),
            num_cells: self.num_cells,
            largest: self.largest,
        })
    }

    /// The cell partition as a sorted list of sorted member lists, keyed by
    /// cell id. Intended for set-wise comparisons in tests and the oracle.
    pub fn cells_as_sets(&self) -> Vec<(u32, Vec<u32>)> {
        self.cell_ids()
            .map(|c| {
                let mut m = self.members(c).to_vec();
                m.sort_unstable();
                (c, m)
            })
            .collect()
    }

    #[cfg(test)]
    pub(crate) fn debug_validate(&self) {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut cells = 0usize;
        let mut s = 0usize;
        let mut best = NO_CELL;
        let mut best_len = 1u32;
        while s < n {
            let l = self.len[s] as usize;
            assert!(l >= 1, "zero-length cell at {s}");
            for i in s..s + l {
                let v = self.order[i] as usize;
                assert!(!seen[v]);
                seen[v] = true;
                assert_eq!(self.pos[v] as usize, i);
                assert_eq!(self.cell[v] as usize, s);
            }
            if l as u32 > best_len {
                best = s as u32;
                best_len = l as u32;
            }
            cells += 1;
            s += l;
        }
        assert_eq!(cells, self.num_cells);
        assert_eq!(self.largest, best, "stale largest-cell cache");
    }
}

/// Iterator over cell ids in positional order.
pub struct CellIds<'a> {
    coloring: &'a Coloring,
    next: usize,
}

impl Iterator for CellIds<'_> {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.next >= self.coloring.n() {
            return None;
        }
        let c = self.next as u32;
        self.next += self.coloring.len[self.next] as usize;
        Some(c)
    }
}
