//! Brute-force ground truth at desk scale.
//!
//! Deliberately naive: exhaustive permutation search with degree pruning for
//! isomorphism and automorphism counting, and a full depth-first
//! materialization of the search tree for checking the leaf-occurrence
//! arithmetic (every leaf equivalence class has exactly `|Aut(G)|` members,
//! and there are `leaves / |Aut(G)|` classes).

use crate::coloring::Coloring;
use crate::graph::{is_automorphism, Graph, Permutation};
use crate::refinement::{RefineMode, Refiner, Trace};
use crate::selector::SelectorKind;
use crate::walk::leaf_permutation;
use crate::Error;

/// Largest vertex count the permutation search accepts.
pub const MAX_BRUTE_FORCE_N: usize = 10;
/// Largest leaf count the tree enumerator materializes.
pub const MAX_TREE_LEAVES: usize = 100_000;

fn guard_n(n: usize) -> Result<(), Error> {
    if n > MAX_BRUTE_FORCE_N {
        return Err(Error::OracleLimit(format!(
            "brute force is guarded to n <= {MAX_BRUTE_FORCE_N}, got {n}"
        )));
    }
    Ok(())
}

/// Backtracking over vertex images in lexicographic order. `count_all`
/// exhausts the space and reports the number of completions; otherwise the
/// first completion is returned as a witness.
fn search(g1: &Graph, g2: &Graph, count_all: bool) -> (u64, Option<Permutation>) {
    struct Backtrack<'a> {
        g1: &'a Graph,
        g2: &'a Graph,
        count_all: bool,
        image: Vec<u32>,
        used: Vec<bool>,
        found: u64,
        witness: Option<Permutation>,
    }

    impl Backtrack<'_> {
        fn consistent(&self, v: usize, u: u32) -> bool {
            if self.g1.degree(v as u32) != self.g2.degree(u) {
                return false;
            }
            if let (Some(c1), Some(c2)) = (self.g1.colors(), self.g2.colors()) {
                if c1[v] != c2[u as usize] {
                    return false;
                }
            }
            self.image[..v]
                .iter()
                .enumerate()
                .all(|(w, &img)| self.g1.has_edge(v as u32, w as u32) == self.g2.has_edge(u, img))
        }

        fn go(&mut self, v: usize) -> bool {
            let n = self.g1.n();
            if v == n {
                self.found += 1;
                if self.witness.is_none() {
                    self.witness = Some(
                        Permutation::from_images(self.image.clone())
                            .expect("search builds bijections"),
                    );
                }
                return !self.count_all;
            }
            for u in 0..n as u32 {
                if self.used[u as usize] || !self.consistent(v, u) {
                    continue;
                }
                self.image[v] = u;
                self.used[u as usize] = true;
                let stop = self.go(v + 1);
                self.used[u as usize] = false;
                self.image[v] = u32::MAX;
                if stop {
                    return true;
                }
            }
            false
        }
    }

    let n = g1.n();
    let mut state = Backtrack {
        g1,
        g2,
        count_all,
        image: vec![u32::MAX; n],
        used: vec![false; n],
        found: 0,
        witness: None,
    };
    if n == g2.n() {
        state.go(0);
    }
    (state.found, state.witness)
}

/// Exhaustive isomorphism search; `None` is a proof of non-isomorphism.
pub fn brute_force_iso(g1: &Graph, g2: &Graph) -> Result<Option<Permutation>, Error> {
    guard_n(g1.n().max(g2.n()))?;
    if g1.n() != g2.n() {
        return Ok(None);
    }
    let (_, witness) = search(g1, g2, false);
    if let Some(w) = &witness {
        debug_assert!(crate::graph::is_isomorphism(g1, g2, w).unwrap());
    }
    Ok(witness)
}

/// Exact `|Aut(G)|` by exhaustive search.
pub fn brute_force_aut_count(g: &Graph) -> Result<u64, Error> {
    guard_n(g.n())?;
    let (count, _) = search(g, g, true);
    Ok(count)
}

/// One materialized leaf of the search tree.
#[derive(Debug, Clone)]
pub struct TreeLeaf {
    pub base: Vec<u32>,
    pub permutation: Permutation,
    pub trace_hash: u64,
}

/// Every leaf of the search tree, grouped into equivalence classes under
/// certified automorphisms.
#[derive(Debug)]
pub struct TreeEnumeration {
    pub leaves: Vec<TreeLeaf>,
    pub node_count: u64,
    /// Leaf indices grouped by equivalence; class representatives are the
    /// first members.
    pub classes: Vec<Vec<usize>>,
}

/// Depth-first materialization of the whole tree with the same refinement
/// and selector the walker uses.
pub fn enumerate_tree(g: &Graph, selector: SelectorKind) -> Result<TreeEnumeration, Error> {
    let mut refiner = Refiner::new(g.n());
    let mut leaves: Vec<TreeLeaf> = Vec::new();
    let mut node_count = 0u64;

    struct Dfs<'a> {
        g: &'a Graph,
        selector: SelectorKind,
        refiner: &'a mut Refiner,
        leaves: &'a mut Vec<TreeLeaf>,
        node_count: &'a mut u64,
    }

    impl Dfs<'_> {
        fn node(&mut self, pi: Coloring, trace: Trace, base: &mut Vec<u32>) -> Result<(), Error> {
            *self.node_count += 1;
            match self.selector.select(&pi) {
                None => {
                    if self.leaves.len() >= MAX_TREE_LEAVES {
                        return Err(Error::OracleLimit(format!(
                            "tree has more than {MAX_TREE_LEAVES} leaves \
                             ({} nodes expanded)",
                            self.node_count
                        )));
                    }
                    self.leaves.push(TreeLeaf {
                        base: base.clone(),
                        permutation: leaf_permutation(&pi)?,
                        trace_hash: trace.hash(),
                    });
                    Ok(())
                }
                Some(cell) => {
                    let members = pi.members(cell).to_vec();
                    for v in members {
                        let mut child_pi = pi.clone();
                        let mut child_trace = trace.clone();
                        child_pi.individualize(v)?;
                        self.refiner.refine(
                            self.g,
                            &mut child_pi,
                            &[v],
                            &mut child_trace,
                            RefineMode::Record,
                        )?;
                        base.push(v);
                        self.node(child_pi, child_trace, base)?;
                        base.pop();
                    }
                    Ok(())
                }
            }
        }
    }

    let mut pi = Coloring::unit(g);
    let mut trace = Trace::new();
    refiner.refine(g, &mut pi, &[], &mut trace, RefineMode::Record)?;
    let mut base = Vec::new();
    Dfs {
        g,
        selector,
        refiner: &mut refiner,
        leaves: &mut leaves,
        node_count: &mut node_count,
    }
    .node(pi, trace, &mut base)?;

    // Group leaves by certified equivalence with class representatives;
    // transitivity makes one representative per class sufficient.
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for (i, leaf) in leaves.iter().enumerate() {
        let mut placed = false;
        for class in classes.iter_mut() {
            let rep = &leaves[class[0]];
            let phi = rep
                .permutation
                .invert()
                .compose(&leaf.permutation)
                .expect("equal sizes");
            if is_automorphism(g, &phi)? {
                class.push(i);
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(vec![i]);
        }
    }

    Ok(TreeEnumeration {
        leaves,
        node_count,
        classes,
    })
}

/// Outcome of the leaf-occurrence check on one graph.
#[derive(Debug)]
pub struct OccurrenceReport {
    pub leaf_count: usize,
    pub class_count: usize,
    pub aut_order: u64,
    pub class_sizes: Vec<usize>,
    pub pass: bool,
}

impl std::fmt::Display for OccurrenceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: leaves={} classes={} |Aut|={}",
            if self.pass { "pass" } else { "FAIL" },
            self.leaf_count,
            self.class_count,
            self.aut_order
        )
    }
}

/// Checks that every leaf class has exactly `|Aut(G)|` members and that the
/// class count is `leaves / |Aut(G)|`.
pub fn verify_occurrences(g: &Graph) -> Result<OccurrenceReport, Error> {
    let enumeration = enumerate_tree(g, SelectorKind::FirstLargest)?;
    let aut_order = brute_force_aut_count(g)?;
    let class_sizes: Vec<usize> = enumeration.classes.iter().map(Vec::len).collect();
    let leaf_count = enumeration.leaves.len();
    let class_count = enumeration.classes.len();
    let pass = class_sizes.iter().all(|&s| s as u64 == aut_order)
        && class_count as u64 * aut_order == leaf_count as u64;
    Ok(OccurrenceReport {
        leaf_count,
        class_count,
        aut_order,
        class_sizes,
        pass,
    })
}

/// Standard library of small graphs used by the verification suite.
pub mod graphs {
    use super::Graph;

    pub fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| ((i - 1) as u32, i as u32))).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        assert!(n >= 3);
        Graph::new(n, (0..n).map(|i| (i as u32, ((i + 1) % n) as u32))).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for v in u + 1..n as u32 {
                edges.push((u, v));
            }
        }
        Graph::new(n, edges).unwrap()
    }

    pub fn hypercube(dim: u32) -> Graph {
        let n = 1usize << dim;
        let mut edges = Vec::new();
        for u in 0..n as u32 {
            for b in 0..dim {
                let v = u ^ (1 << b);
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        Graph::new(n, edges).unwrap()
    }

    pub fn grid(rows: usize, cols: usize) -> Graph {
        let idx = |r: usize, c: usize| (r * cols + c) as u32;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((idx(r, c), idx(r, c + 1)));
                }
                if r + 1 < rows {
                    edges.push((idx(r, c), idx(r + 1, c)));
                }
            }
        }
        Graph::new(rows * cols, edges).unwrap()
    }

    pub fn petersen() -> Graph {
        let mut edges = Vec::new();
        for i in 0..5u32 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, ((i + 2) % 5) + 5));
        }
        Graph::new(10, edges).unwrap()
    }

    pub fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
        let offset = a.n() as u32;
        let edges = a
            .edges()
            .iter()
            .copied()
            .chain(b.edges().iter().map(|&(u, v)| (u + offset, v + offset)));
        Graph::new(a.n() + b.n(), edges).unwrap()
    }
}

/// The named instances of the occurrence-verification suite, filtered to
/// `n <= max_n`. Always includes twenty seeded G(8, 0.4) graphs when they
/// fit the bound.
pub fn verification_suite(max_n: usize) -> Vec<(String, Graph)> {
    use crate::walk::SplitMix64;
    let mut out: Vec<(String, Graph)> = Vec::new();
    for n in 2..=6 {
        out.push((format!("P_{n}"), graphs::path(n)));
    }
    for n in 3..=8 {
        out.push((format!("C_{n}"), graphs::cycle(n)));
    }
    for n in 2..=6 {
        out.push((format!("K_{n}"), graphs::complete(n)));
    }
    out.push(("Q_2".into(), graphs::hypercube(2)));
    out.push(("Q_3".into(), graphs::hypercube(3)));
    out.push(("grid_3x3".into(), graphs::grid(3, 3)));
    let mut rng = SplitMix64::new(0x8404);
    for i in 0..20 {
        let mut edges = Vec::new();
        for u in 0..8u32 {
            for v in u + 1..8 {
                if rng.next_f64() < 0.4 {
                    edges.push((u, v));
                }
            }
        }
        out.push((format!("gnp_8_04_{i}"), Graph::new(8, edges).unwrap()));
    }
    out.retain(|(_, g)| g.n() <= max_n);
    out
}
