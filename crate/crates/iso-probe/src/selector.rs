//! Target cell selection.
//!
//! Both selectors are isomorphism-invariant because they depend only on
//! cell ids and sizes, which refinement assigns invariantly. They return
//! `None` exactly on discrete colorings.

use crate::coloring::{Coloring, NO_CELL};

/// Which selection rule a walk uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectorKind {
    /// The non-singleton cell of maximum size with the smallest id.
    #[default]
    FirstLargest,
    /// The non-singleton cell of minimum size with the smallest id.
    Smallest,
}

impl SelectorKind {
    pub fn select(self, pi: &Coloring) -> Option<u32> {
        match self {
            SelectorKind::FirstLargest => select_cell(pi),
            SelectorKind::Smallest => select_cell_smallest(pi),
        }
    }
}

/// The first largest cell. O(1): the coloring tracks the candidate across
/// splits and only rescans when the tracked cell itself splits.
pub fn select_cell(pi: &Coloring) -> Option<u32> {
    match pi.largest_cell() {
        NO_CELL => None,
        c => Some(c),
    }
}

/// The first smallest non-singleton cell.
pub fn select_cell_smallest(pi: &Coloring) -> Option<u32> {
    let mut best: Option<(u32, u32)> = None;
    for c in pi.cell_ids() {
        let l = pi.cell_len(c);
        if l >= 2 && best.is_none_or(|(_, bl)| l < bl) {
            best = Some((c, l));
        }
    }
    best.map(|(c, _)| c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn colored(colors: Vec<u32>) -> Coloring {
        let n = colors.len();
        let g = Graph::new(n, []).unwrap().with_colors(colors).unwrap();
        Coloring::unit(&g)
    }

    #[test]
    fn discrete_selects_nothing() {
        let pi = colored(vec![1, 2, 3]);
        assert_eq!(select_cell(&pi), None);
        assert_eq!(select_cell_smallest(&pi), None);
    }

    #[test]
    fn first_largest_picks_unique_largest() {
        // Cells {0}, {1, 2}, {3, 4, 5} at ids 0, 1, 3.
        let pi = colored(vec![1, 2, 2, 3, 3, 3]);
        assert_eq!(select_cell(&pi), Some(3));
        assert_eq!(select_cell_smallest(&pi), Some(1));
    }

    #[test]
    fn ties_break_to_smallest_id() {
        // Cells {0, 1}, {2}, {3, 4} at ids 0, 2, 3.
        let pi = colored(vec![1, 1, 2, 3, 3]);
        assert_eq!(select_cell(&pi), Some(0));
        // Cells {0, 1, 2}, {3, 4, 5} tie for smallest.
        let pi = colored(vec![1, 1, 1, 2, 2, 2]);
        assert_eq!(select_cell_smallest(&pi), Some(0));
        assert_eq!(select_cell(&pi), Some(0));
    }

    #[test]
    fn selected_cell_is_a_whole_non_singleton_cell() {
        let pi = colored(vec![1, 1, 2, 2, 2, 3]);
        for sel in [select_cell(&pi), select_cell_smallest(&pi)] {
            let c = sel.unwrap();
            assert!(pi.cell_len(c) >= 2);
            assert!(pi.cell_ids().any(|id| id == c));
        }
    }
}
