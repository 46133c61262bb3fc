//! The probabilistic bidirectional search.
//!
//! Each round samples one random leaf per tree and consults the leaf store:
//! a certified cross-tree match ends the run with an isomorphism witness, a
//! certified same-tree match is an automorphism and bumps the collision
//! counter, and once the counter passes the quota derived from the error
//! bound the graphs are declared non-isomorphic with one-sided error below
//! that bound.
//!
//! An optional pre-phase runs the same scheme on a pruned tree: walks
//! compare their traces against a fixed target leaf and stop at fake leaves
//! on deviation. Repeated same-tree deviations condemn the pair cheaply;
//! a cross-tree deviation match sends the search back to the full trees.

use crate::graph::{is_automorphism, is_isomorphism, Graph, Permutation};
use crate::leafstore::{LeafInsert, LeafStore, RecordId, TreeId};
use crate::refinement::{RefineMode, Refiner, Trace};
use crate::selector::SelectorKind;
use crate::walk::{
    leaf_permutation, random_walk, random_walk_deviation, DeviationTarget, Leaf, SplitMix64,
    WalkOutcome,
};
use crate::{coloring::Coloring, Error};

/// Tuning knobs of one solver run. `Default` gives the stock configuration
/// with a 1% error bound and seed 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// One-sided error bound in (0, 1).
    pub epsilon: f64,
    /// Deviation extension: extra worklist pops refined past a mismatch.
    pub k: u32,
    /// Consecutive same-tree deviation repeats that end the pre-phase;
    /// defaults to the automorphism quota.
    pub d_threshold: Option<u32>,
    pub use_deviation_phase: bool,
    pub use_blueprint: bool,
    pub selector: SelectorKind,
    pub seed: u64,
    /// Full-coloring records kept per tree before falling back to paths.
    pub full_leaf_budget: usize,
    /// Safety cap; exceeding it yields `Verdict::Inconclusive`.
    pub max_walks: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            epsilon: 0.01,
            k: 4,
            d_threshold: None,
            use_deviation_phase: true,
            use_blueprint: true,
            selector: SelectorKind::FirstLargest,
            seed: 0,
            full_leaf_budget: 64,
            max_walks: 1_000_000,
        }
    }
}

impl SolverConfig {
    /// The automorphism quota `ceil(-log2(epsilon))`, at least 1.
    pub fn quota(&self) -> u32 {
        ((-self.epsilon.log2()).ceil() as u32).max(1)
    }

    /// The consecutive-deviation threshold of the pre-phase.
    pub fn deviation_threshold(&self) -> u32 {
        self.d_threshold.unwrap_or_else(|| self.quota()).max(1)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Parameter(format!(
                "epsilon must lie in (0, 1), got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// Why a pair is non-isomorphic for certain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertifiedReason {
    VertexCount,
    EdgeCount,
    DegreeMultiset,
    ColorMultiset,
    /// The root stable colorings have different cell-size sequences.
    RootPartition,
    /// Both root colorings are discrete and the induced map fails.
    DiscreteRootMismatch,
}

impl std::fmt::Display for CertifiedReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CertifiedReason::VertexCount => "vertex counts differ",
            CertifiedReason::EdgeCount => "edge counts differ",
            CertifiedReason::DegreeMultiset => "degree multisets differ",
            CertifiedReason::ColorMultiset => "color multisets differ",
            CertifiedReason::RootPartition => "root refinement partitions differ",
            CertifiedReason::DiscreteRootMismatch => {
                "root colorings are discrete and do not correspond"
            }
        };
        f.write_str(s)
    }
}

/// Counters of one solver run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub walks: u64,
    pub nodes_visited: u64,
    pub leaves_full: u64,
    pub leaves_path_only: u64,
    pub leaves_fake: u64,
    pub automorphisms_found: u64,
    /// The collision counter `c` at exit.
    pub collisions: u32,
    /// Whether the run sampled the full (unpruned) trees at any point.
    pub full_phase_entered: bool,
}

/// The solver's answer. An `Isomorphic` witness always satisfies
/// `is_isomorphism(g1, g2, witness)`; non-isomorphic answers are either
/// certified or carry a one-sided error bound.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Isomorphic {
        witness: Permutation,
        stats: SolverStats,
    },
    NonIsomorphicCertified {
        reason: CertifiedReason,
        stats: SolverStats,
    },
    ProbablyNonIsomorphic {
        error_bound: f64,
        stats: SolverStats,
    },
    Inconclusive {
        stats: SolverStats,
    },
}

impl Verdict {
    pub fn stats(&self) -> &SolverStats {
        match self {
            Verdict::Isomorphic { stats, .. }
            | Verdict::NonIsomorphicCertified { stats, .. }
            | Verdict::ProbablyNonIsomorphic { stats, .. }
            | Verdict::Inconclusive { stats } => stats,
        }
    }

    pub fn is_isomorphic(&self) -> bool {
        matches!(self, Verdict::Isomorphic { .. })
    }
}

/// Certified fast rejection: vertex/edge counts, degree and color
/// multisets, and the root stable partitions.
pub fn precheck(g1: &Graph, g2: &Graph) -> Option<CertifiedReason> {
    if g1.n() != g2.n() {
        return Some(CertifiedReason::VertexCount);
    }
    if g1.edge_count() != g2.edge_count() {
        return Some(CertifiedReason::EdgeCount);
    }
    let degrees = |g: &Graph| {
        let mut d: Vec<usize> = (0..g.n()).map(|v| g.degree(v as u32)).collect();
        d.sort_unstable();
        d
    };
    if degrees(g1) != degrees(g2) {
        return Some(CertifiedReason::DegreeMultiset);
    }
    let colors = |g: &Graph| {
        g.colors().map(|c| {
            let mut c = c.to_vec();
            c.sort_unstable();
            c
        })
    };
    if colors(g1) != colors(g2) {
        return Some(CertifiedReason::ColorMultiset);
    }
    let root_sizes = |g: &Graph| {
        let mut refiner = Refiner::new(g.n());
        let mut pi = Coloring::unit(g);
        let mut trace = Trace::new();
        refiner
            .refine(g, &mut pi, &[], &mut trace, RefineMode::Record)
            .expect("root refinement cannot violate contracts");
        pi.cell_sizes()
    };
    if root_sizes(g1) != root_sizes(g2) {
        return Some(CertifiedReason::RootPartition);
    }
    None
}

/// Candidate map between two materialized leaves, oriented so that success
/// means `is_isomorphism(g_a, g_b, result)`.
pub fn derive_candidate(
    store: &mut LeafStore,
    refiner: &mut Refiner,
    selector: SelectorKind,
    g_a: &Graph,
    a: RecordId,
    g_b: &Graph,
    b: RecordId,
) -> Result<Permutation, Error> {
    let p_a = store.materialize(g_a, refiner, selector, a)?;
    let p_b = store.materialize(g_b, refiner, selector, b)?;
    p_b.invert().compose(&p_a)
}

/// Decides isomorphism of `g1` and `g2` under `cfg`. All failure modes are
/// verdicts; `Err` only reports an invalid configuration.
pub fn random_iso(g1: &Graph, g2: &Graph, cfg: &SolverConfig) -> Result<Verdict, Error> {
    cfg.validate()?;
    let mut search = Search::new(g1, g2, cfg);
    Ok(search.run())
}

enum PhaseOutcome {
    Terminate(Verdict),
    SwitchToFull,
}

enum LeafEvent {
    Iso(Permutation),
    Aut,
    Fresh,
}

struct Search<'g> {
    g1: &'g Graph,
    g2: &'g Graph,
    cfg: &'g SolverConfig,
    q: u32,
    c: u32,
    store: LeafStore,
    refiner: Refiner,
    rng: SplitMix64,
    stats: SolverStats,
}

impl<'g> Search<'g> {
    fn new(g1: &'g Graph, g2: &'g Graph, cfg: &'g SolverConfig) -> Search<'g> {
        Search {
            g1,
            g2,
            cfg,
            q: cfg.quota(),
            c: 0,
            store: LeafStore::new(cfg.full_leaf_budget),
            refiner: Refiner::new(g1.n().max(g2.n())),
            rng: SplitMix64::new(cfg.seed),
            stats: SolverStats::default(),
        }
    }

    fn graph(&self, tree: TreeId) -> &'g Graph {
        match tree {
            TreeId::T1 => self.g1,
            TreeId::T2 => self.g2,
        }
    }

    fn verdict(&mut self, make: impl FnOnce(SolverStats) -> Verdict) -> Verdict {
        let counters = self.store.counters();
        self.stats.leaves_full = counters.full;
        self.stats.leaves_path_only = counters.path_only;
        self.stats.leaves_fake = counters.fake;
        self.stats.collisions = self.c;
        make(self.stats)
    }

    fn probably_non_isomorphic(&mut self, exponent: u32) -> Verdict {
        let bound = 0.5f64.powi(exponent as i32);
        self.verdict(|stats| Verdict::ProbablyNonIsomorphic {
            error_bound: bound,
            stats,
        })
    }

    fn budget_left(&self, next_walks: u64) -> bool {
        self.stats.walks + next_walks <= self.cfg.max_walks
    }

    fn run(&mut self) -> Verdict {
        if let Some(reason) = precheck(self.g1, self.g2) {
            return self.verdict(|stats| Verdict::NonIsomorphicCertified { reason, stats });
        }

        // Trivial trees: a discrete root pins the only possible map.
        let root1 = self.root_coloring(self.g1);
        if root1.is_discrete() {
            let root2 = self.root_coloring(self.g2);
            debug_assert!(root2.is_discrete(), "precheck compared root partitions");
            let p1 = leaf_permutation(&root1).expect("discrete root");
            let p2 = leaf_permutation(&root2).expect("discrete root");
            let witness = p2.invert().compose(&p1).expect("equal sizes");
            let ok = is_isomorphism(self.g1, self.g2, &witness).expect("equal sizes");
            return if ok {
                self.verdict(|stats| Verdict::Isomorphic { witness, stats })
            } else {
                self.verdict(|stats| Verdict::NonIsomorphicCertified {
                    reason: CertifiedReason::DiscreteRootMismatch,
                    stats,
                })
            };
        }

        if self.cfg.use_deviation_phase {
            match self.deviation_phase() {
                PhaseOutcome::Terminate(v) => return v,
                PhaseOutcome::SwitchToFull => {}
            }
        }
        self.stats.full_phase_entered = true;
        self.full_phase()
    }

    fn root_coloring(&mut self, g: &Graph) -> Coloring {
        let mut pi = Coloring::unit(g);
        let mut trace = Trace::new();
        self.refiner
            .refine(g, &mut pi, &[], &mut trace, RefineMode::Record)
            .expect("root refinement cannot violate contracts");
        pi
    }

    fn walk(&mut self, tree: TreeId) -> Leaf {
        let leaf = random_walk(
            self.graph(tree),
            &mut self.refiner,
            self.cfg.selector,
            &mut self.rng,
        );
        self.stats.walks += 1;
        self.stats.nodes_visited += leaf.base.len() as u64 + 1;
        leaf
    }

    fn walk_deviation(&mut self, tree: TreeId, target: &Trace) -> WalkOutcome {
        let out = random_walk_deviation(
            self.graph(tree),
            &mut self.refiner,
            self.cfg.selector,
            DeviationTarget {
                trace: target,
                k: self.cfg.k,
                blueprint: self.cfg.use_blueprint,
            },
            &mut self.rng,
        );
        self.stats.walks += 1;
        self.stats.nodes_visited += out.nodes_visited();
        out
    }

    /// The cross-pair check of a freshly sampled leaf pair.
    fn try_pair(&mut self, l1: &Leaf, l2: &Leaf) -> Option<Permutation> {
        let p1 = leaf_permutation(&l1.coloring).expect("walk leaves are discrete");
        let p2 = leaf_permutation(&l2.coloring).expect("walk leaves are discrete");
        let w = p2.invert().compose(&p1).expect("equal sizes");
        match is_isomorphism(self.g1, self.g2, &w) {
            Ok(true) => Some(w),
            _ => None,
        }
    }

    /// Stages `leaf`, certifies its key candidates (cross-tree first), and
    /// resolves the staged insert. Every returned `Iso` witness satisfies
    /// `is_isomorphism(g1, g2, ·)`; `Aut` leaves the duplicate unstored.
    fn process_actual(&mut self, tree: TreeId, leaf: &Leaf) -> LeafEvent {
        let p_fresh = leaf_permutation(&leaf.coloring).expect("walk leaves are discrete");
        let candidates = self
            .store
            .insert_or_candidates(tree, LeafInsert::Actual(leaf));

        for &h in &candidates {
            if self.store.record(h).origin == tree {
                continue;
            }
            let other = tree.other();
            let p_other = match self.store.materialize(
                self.graph(other),
                &mut self.refiner,
                self.cfg.selector,
                h,
            ) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let (p_t1, p_t2) = match tree {
                TreeId::T1 => (&p_fresh, &p_other),
                TreeId::T2 => (&p_other, &p_fresh),
            };
            let w = p_t2.invert().compose(p_t1).expect("equal sizes");
            if is_isomorphism(self.g1, self.g2, &w).unwrap_or(false) {
                self.store.discard_pending();
                return LeafEvent::Iso(w);
            }
        }

        for &h in &candidates {
            if self.store.record(h).origin != tree {
                continue;
            }
            let p_same = match self.store.materialize(
                self.graph(tree),
                &mut self.refiner,
                self.cfg.selector,
                h,
            ) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let phi = p_same.invert().compose(&p_fresh).expect("equal sizes");
            if is_automorphism(self.graph(tree), &phi).unwrap_or(false) {
                self.store.discard_pending();
                self.stats.automorphisms_found += 1;
                return LeafEvent::Aut;
            }
        }

        self.store.confirm_insert();
        LeafEvent::Fresh
    }

    /// Probing on the tree pruned by the target leaf's trace.
    fn deviation_phase(&mut self) -> PhaseOutcome {
        if !self.budget_left(1) {
            let v = self.verdict(|stats| Verdict::Inconclusive { stats });
            return PhaseOutcome::Terminate(v);
        }
        let tau = self.walk(TreeId::T1);
        let target = tau.trace.clone();
        let staged = self
            .store
            .insert_or_candidates(TreeId::T1, LeafInsert::Actual(&tau));
        debug_assert!(staged.is_empty());
        self.store.confirm_insert();

        let d = self.cfg.deviation_threshold();
        let mut consecutive = [0u32; 2];

        loop {
            if !self.budget_left(2) {
                let v = self.verdict(|stats| Verdict::Inconclusive { stats });
                return PhaseOutcome::Terminate(v);
            }
            let w1 = self.walk_deviation(TreeId::T1, &target);
            let w2 = self.walk_deviation(TreeId::T2, &target);

            if let (WalkOutcome::Actual(l1), WalkOutcome::Actual(l2)) = (&w1, &w2) {
                if let Some(w) = self.try_pair(l1, l2) {
                    let v = self.verdict(|stats| Verdict::Isomorphic { witness: w, stats });
                    return PhaseOutcome::Terminate(v);
                }
            }

            let mut round_aut = false;
            let mut cross_fake = false;
            for (tree, outcome) in [(TreeId::T1, &w1), (TreeId::T2, &w2)] {
                let slot = match tree {
                    TreeId::T1 => 0,
                    TreeId::T2 => 1,
                };
                match outcome {
                    WalkOutcome::Actual(leaf) => {
                        consecutive[slot] = 0;
                        match self.process_actual(tree, leaf) {
                            LeafEvent::Iso(w) => {
                                let v =
                                    self.verdict(|stats| Verdict::Isomorphic { witness: w, stats });
                                return PhaseOutcome::Terminate(v);
                            }
                            LeafEvent::Aut => round_aut = true,
                            LeafEvent::Fresh => {}
                        }
                    }
                    WalkOutcome::Fake(fakeleaf) => {
                        let candidates = self
                            .store
                            .insert_or_candidates(tree, LeafInsert::Fake(fakeleaf));
                        let mut same_tree_repeat = false;
                        for &h in &candidates {
                            if self.store.record(h).origin == tree {
                                same_tree_repeat = true;
                            } else {
                                cross_fake = true;
                            }
                        }
                        if same_tree_repeat {
                            // The value is already on file; keep one copy.
                            self.store.discard_pending();
                            consecutive[slot] += 1;
                        } else {
                            self.store.confirm_insert();
                            consecutive[slot] = 0;
                        }
                    }
                }
            }

            if cross_fake {
                // The same deviation showed up in both trees: the pruned
                // tree cannot separate the pair, so search the full trees.
                return PhaseOutcome::SwitchToFull;
            }
            if round_aut {
                self.c += 1;
            }
            if self.c > self.q {
                let v = self.probably_non_isomorphic(self.q);
                return PhaseOutcome::Terminate(v);
            }
            if consecutive[0] >= d || consecutive[1] >= d {
                let v = self.probably_non_isomorphic(d);
                return PhaseOutcome::Terminate(v);
            }
        }
    }

    fn full_phase(&mut self) -> Verdict {
        while self.c <= self.q {
            if !self.budget_left(2) {
                return self.verdict(|stats| Verdict::Inconclusive { stats });
            }
            let l1 = self.walk(TreeId::T1);
            let l2 = self.walk(TreeId::T2);

            if let Some(w) = self.try_pair(&l1, &l2) {
                return self.verdict(|stats| Verdict::Isomorphic { witness: w, stats });
            }

            let mut round_aut = false;
            for (tree, leaf) in [(TreeId::T1, &l1), (TreeId::T2, &l2)] {
                match self.process_actual(tree, leaf) {
                    LeafEvent::Iso(w) => {
                        return self.verdict(|stats| Verdict::Isomorphic { witness: w, stats });
                    }
                    LeafEvent::Aut => round_aut = true,
                    LeafEvent::Fresh => {}
                }
            }
            if round_aut {
                self.c += 1;
            }
        }
        self.probably_non_isomorphic(self.q)
    }
}
