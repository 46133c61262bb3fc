//! Random root-to-leaf walks of the search tree.
//!
//! A walk alternates refinement and individualization of a uniformly random
//! vertex from the selected cell until the coloring is discrete. In
//! deviation mode the walk compares its trace against a fixed target and
//! stops at a fake leaf as soon as refinement reports a mismatch.

use crate::coloring::Coloring;
use crate::graph::{Graph, Permutation};
use crate::refinement::{
    DeviationValue, RefineMode, RefinementOutcome, Refiner, Trace, TRACE_SEED,
};
use crate::selector::SelectorKind;
use crate::Error;

/// splitmix64: 64-bit state, one additive constant, three xor-multiply
/// finalizer steps. Deterministic per seed.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> SplitMix64 {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform integer in `0..bound` via Lemire's multiply-shift rejection;
    /// no modulo bias.
    pub fn bounded(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let mut x = self.next_u64();
        let mut m = (x as u128) * (bound as u128);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                x = self.next_u64();
                m = (x as u128) * (bound as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.bounded(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }
}

/// An actual leaf: a discrete coloring together with the path that reached
/// it and the full walk trace.
#[derive(Debug, Clone)]
pub struct Leaf {
    pub base: Vec<u32>,
    pub coloring: Coloring,
    pub trace: Trace,
}

/// A fake leaf: the walk prefix that deviated from the target trace.
#[derive(Debug, Clone)]
pub struct FakeLeaf {
    pub base_prefix: Vec<u32>,
    pub deviation: DeviationValue,
}

#[derive(Debug, Clone)]
pub enum WalkOutcome {
    Actual(Leaf),
    Fake(FakeLeaf),
}

impl WalkOutcome {
    /// Tree nodes this walk visited (root included).
    pub fn nodes_visited(&self) -> u64 {
        match self {
            WalkOutcome::Actual(l) => l.base.len() as u64 + 1,
            WalkOutcome::Fake(f) => f.base_prefix.len() as u64 + 1,
        }
    }
}

/// One random root-to-leaf walk; always reaches an actual leaf.
pub fn random_walk(
    g: &Graph,
    refiner: &mut Refiner,
    selector: SelectorKind,
    rng: &mut SplitMix64,
) -> Leaf {
    match walk(g, refiner, selector, rng, None) {
        WalkOutcome::Actual(leaf) => leaf,
        WalkOutcome::Fake(_) => unreachable!("recording walks cannot deviate"),
    }
}

/// Parameters of a deviation-mode walk: the target trace, the extension
/// constant and whether blueprint skipping is on.
#[derive(Debug, Clone, Copy)]
pub struct DeviationTarget<'t> {
    pub trace: &'t Trace,
    pub k: u32,
    pub blueprint: bool,
}

/// A random walk comparing against a target leaf's trace; returns a fake
/// leaf at the first trace deviation, an actual leaf otherwise.
pub fn random_walk_deviation(
    g: &Graph,
    refiner: &mut Refiner,
    selector: SelectorKind,
    target: DeviationTarget<'_>,
    rng: &mut SplitMix64,
) -> WalkOutcome {
    walk(g, refiner, selector, rng, Some(target))
}

fn walk(
    g: &Graph,
    refiner: &mut Refiner,
    selector: SelectorKind,
    rng: &mut SplitMix64,
    target: Option<DeviationTarget<'_>>,
) -> WalkOutcome {
    fn mode_for<'t>(t: &Option<DeviationTarget<'t>>) -> RefineMode<'t> {
        match t {
            None => RefineMode::Record,
            Some(DeviationTarget {
                trace,
                k,
                blueprint: false,
            }) => RefineMode::CompareAgainst {
                target: trace,
                k: *k,
            },
            Some(DeviationTarget {
                trace,
                k,
                blueprint: true,
            }) => RefineMode::Blueprint {
                target: trace,
                k: *k,
            },
        }
    }

    let mut pi = Coloring::unit(g);
    let mut trace = Trace::new();
    let mut base: Vec<u32> = Vec::new();
    let outcome = refiner
        .refine(g, &mut pi, &[], &mut trace, mode_for(&target))
        .expect("root refinement cannot violate contracts");
    if let RefinementOutcome::Deviated(d) = outcome {
        return WalkOutcome::Fake(FakeLeaf {
            base_prefix: base,
            deviation: d,
        });
    }
    while let Some(cell) = selector.select(&pi) {
        let members = pi.members(cell);
        let v = members[rng.bounded(members.len() as u64) as usize];
        pi.individualize(v)
            .expect("selected cells are non-singletons");
        base.push(v);
        debug_assert!(base.len() <= g.n());
        let outcome = refiner
            .refine(g, &mut pi, &[v], &mut trace, mode_for(&target))
            .expect("walk refinement cannot violate contracts");
        if let RefinementOutcome::Deviated(d) = outcome {
            return WalkOutcome::Fake(FakeLeaf {
                base_prefix: base,
                deviation: d,
            });
        }
    }
    debug_assert!(pi.is_discrete());
    if let Some(t) = &target {
        // All tokens matched but one stream ended short: that is still a
        // deviation, keyed at the length cut-off.
        if trace.len() != t.trace.len() {
            let d = DeviationValue {
                position: trace.len().min(t.trace.len()),
                value: TRACE_SEED,
            };
            return WalkOutcome::Fake(FakeLeaf {
                base_prefix: base,
                deviation: d,
            });
        }
    }
    WalkOutcome::Actual(Leaf {
        base,
        coloring: pi,
        trace,
    })
}

/// Deterministically recomputes the leaf coloring of a stored path.
pub fn replay_path(
    g: &Graph,
    refiner: &mut Refiner,
    selector: SelectorKind,
    base: &[u32],
) -> Result<Coloring, Error> {
    let mut pi = Coloring::unit(g);
    let mut trace = Trace::new();
    refiner.refine(g, &mut pi, &[], &mut trace, RefineMode::Record)?;
    for (depth, &v) in base.iter().enumerate() {
        let cell = selector.select(&pi).ok_or_else(|| {
            Error::Contract(format!(
                "replay_path: coloring already discrete at depth {depth}"
            ))
        })?;
        if !pi.members(cell).contains(&v) {
            return Err(Error::Contract(format!(
                "replay_path: vertex {v} is not in the selected cell at depth {depth}"
            )));
        }
        pi.individualize(v)?;
        refiner.refine(g, &mut pi, &[v], &mut trace, RefineMode::Record)?;
    }
    if !pi.is_discrete() {
        return Err(Error::Contract(
            "replay_path: base does not reach a leaf".into(),
        ));
    }
    Ok(pi)
}

/// The permutation a discrete coloring induces: each vertex maps to its
/// position in the vertex order.
pub fn leaf_permutation(coloring: &Coloring) -> Result<Permutation, Error> {
    if !coloring.is_discrete() {
        return Err(Error::Contract(
            "leaf_permutation requires a discrete coloring".into(),
        ));
    }
    let image: Vec<u32> = (0..coloring.n() as u32)
        .map(|v| coloring.position_of(v))
        .collect();
    Permutation::from_images(image)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::is_automorphism;

    fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i as u32, ((i + 1) % n) as u32))).unwrap()
    }

    #[test]
    fn splitmix_reference_vectors() {
        let cases: [(u64, [u64; 4]); 3] = [
            (
                0,
                [
                    0xe220a8397b1dcdaf,
                    0x6e789e6aa1b965f4,
                    0x06c45d188009454f,
                    0xf88bb8a8724c81ec,
                ],
            ),
            (
                1,
                [
                    0x910a2dec89025cc1,
                    0xbeeb8da1658eec67,
                    0xf893a2eefb32555e,
                    0x71c18690ee42c90b,
                ],
            ),
            (
                0xDEADBEEF,
                [
                    0x4adfb90f68c9eb9b,
                    0xde586a3141a10922,
                    0x021fbc2f8e1cfc1d,
                    0x7466ce737be16790,
                ],
            ),
        ];
        for (seed, expected) in cases {
            let mut rng = SplitMix64::new(seed);
            for want in expected {
                assert_eq!(rng.next_u64(), want);
            }
        }
    }

    #[test]
    fn bounded_is_in_range_and_roughly_uniform() {
        let mut rng = SplitMix64::new(17);
        let mut buckets = [0u32; 6];
        for _ in 0..60_000 {
            buckets[rng.bounded(6) as usize] += 1;
        }
        for &b in &buckets {
            assert!((9_300..=10_700).contains(&b), "buckets skewed: {buckets:?}");
        }
    }

    #[test]
    fn same_seed_same_walk() {
        let g = cycle(8);
        let mut refiner = Refiner::new(8);
        let l1 = random_walk(
            &g,
            &mut refiner,
            SelectorKind::FirstLargest,
            &mut SplitMix64::new(5),
        );
        let l2 = random_walk(
            &g,
            &mut refiner,
            SelectorKind::FirstLargest,
            &mut SplitMix64::new(5),
        );
        assert_eq!(l1.base, l2.base);
        assert_eq!(l1.coloring, l2.coloring);
        assert_eq!(l1.trace, l2.trace);
    }

    #[test]
    fn single_vertex_walk_has_empty_base() {
        let g = Graph::new(1, []).unwrap();
        let mut refiner = Refiner::new(1);
        let leaf = random_walk(
            &g,
            &mut refiner,
            SelectorKind::FirstLargest,
            &mut SplitMix64::new(0),
        );
        assert!(leaf.base.is_empty());
        assert!(leaf.coloring.is_discrete());
    }

    #[test]
    fn c4_walk_depth_two_with_neighbor_second_pick() {
        let g = cycle(4);
        let mut refiner = Refiner::new(4);
        for seed in 0..20 {
            let leaf = random_walk(
                &g,
                &mut refiner,
                SelectorKind::FirstLargest,
                &mut SplitMix64::new(seed),
            );
            assert_eq!(leaf.base.len(), 2);
            // After individualizing v, the selected 2-cell is N(v).
            assert!(g.has_edge(leaf.base[0], leaf.base[1]));
        }
    }

    #[test]
    fn p3_walk_depth_one() {
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let mut refiner = Refiner::new(3);
        for seed in 0..10 {
            let leaf = random_walk(
                &g,
                &mut refiner,
                SelectorKind::FirstLargest,
                &mut SplitMix64::new(seed),
            );
            assert_eq!(leaf.base.len(), 1);
            assert!(leaf.base[0] == 0 || leaf.base[0] == 2);
        }
    }

    #[test]
    fn walk_depth_is_bounded_by_n() {
        let mut rng = SplitMix64::new(1);
        for n in [2usize, 5, 9, 16] {
            let mut edges = Vec::new();
            for u in 0..n as u32 {
                for v in u + 1..n as u32 {
                    if rng.next_f64() < 0.3 {
                        edges.push((u, v));
                    }
                }
            }
            let g = Graph::new(n, edges).unwrap();
            let mut refiner = Refiner::new(n);
            let leaf = random_walk(&g, &mut refiner, SelectorKind::FirstLargest, &mut rng);
            assert!(leaf.base.len() <= n);
        }
    }

    #[test]
    fn self_targeted_walks_on_single_class_tree_stay_actual() {
        // Every leaf of a cycle's tree is equivalent, so no walk can deviate
        // from a recorded leaf of the same graph.
        let g = cycle(6);
        let mut refiner = Refiner::new(6);
        let tau = random_walk(
            &g,
            &mut refiner,
            SelectorKind::FirstLargest,
            &mut SplitMix64::new(3),
        );
        for seed in 0..30 {
            let out = random_walk_deviation(
                &g,
                &mut refiner,
                SelectorKind::FirstLargest,
                DeviationTarget {
                    trace: &tau.trace,
                    k: 4,
                    blueprint: seed % 2 == 0,
                },
                &mut SplitMix64::new(seed),
            );
            match out {
                WalkOutcome::Actual(l) => {
                    assert_eq!(l.trace.hash(), tau.trace.hash());
                }
                WalkOutcome::Fake(f) => panic!("unexpected deviation {f:?}"),
            }
        }
    }

    #[test]
    fn cross_graph_walks_always_deviate() {
        let c6 = cycle(6);
        let cc = Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        let mut refiner = Refiner::new(6);
        let tau = random_walk(
            &c6,
            &mut refiner,
            SelectorKind::FirstLargest,
            &mut SplitMix64::new(9),
        );
        let mut positions = std::collections::HashSet::new();
        for seed in 0..20 {
            let out = random_walk_deviation(
                &cc,
                &mut refiner,
                SelectorKind::FirstLargest,
                DeviationTarget {
                    trace: &tau.trace,
                    k: 1,
                    blueprint: false,
                },
                &mut SplitMix64::new(seed),
            );
            match out {
                WalkOutcome::Fake(f) => {
                    assert_eq!(f.base_prefix.len(), 1, "deviation at depth 1");
                    positions.insert(f.deviation.position);
                }
                WalkOutcome::Actual(_) => panic!("walks on the other graph must deviate"),
            }
        }
        assert_eq!(
            positions.len(),
            1,
            "symmetric branches share the deviation position"
        );
    }

    #[test]
    fn replay_reproduces_walk_colorings() {
        let mut rng = SplitMix64::new(123);
        let mut edges = Vec::new();
        for u in 0..20u32 {
            for v in u + 1..20 {
                if rng.next_f64() < 0.3 {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::new(20, edges).unwrap();
        let mut refiner = Refiner::new(20);
        for _ in 0..100 {
            let leaf = random_walk(&g, &mut refiner, SelectorKind::FirstLargest, &mut rng);
            let replayed =
                replay_path(&g, &mut refiner, SelectorKind::FirstLargest, &leaf.base).unwrap();
            assert_eq!(replayed, leaf.coloring);
        }
    }

    #[test]
    fn hypercube_walks_replay_exactly() {
        // Q_3: vertices are 3-bit strings, edges flip one bit.
        let edges = (0..8u32)
            .flat_map(|u| (0..3).map(move |b| (u, u ^ (1 << b))))
            .filter(|&(u, v)| u < v);
        let g = Graph::new(8, edges).unwrap();
        let mut refiner = Refiner::new(8);
        for seed in 0..10 {
            let leaf = random_walk(
                &g,
                &mut refiner,
                SelectorKind::FirstLargest,
                &mut SplitMix64::new(seed),
            );
            let replayed =
                replay_path(&g, &mut refiner, SelectorKind::FirstLargest, &leaf.base).unwrap();
            assert_eq!(replayed, leaf.coloring);
        }
    }

    #[test]
    fn replay_rejects_invalid_bases() {
        let g = cycle(6);
        let mut refiner = Refiner::new(6);
        // 0 then 1: after individualizing 0, the selected cell is {2, 4} or
        // similar; vertex 0 can never be picked twice.
        let err = replay_path(&g, &mut refiner, SelectorKind::FirstLargest, &[0, 0]);
        assert!(matches!(err, Err(Error::Contract(_))));
        let err = replay_path(&g, &mut refiner, SelectorKind::FirstLargest, &[0]);
        assert!(
            matches!(err, Err(Error::Contract(_))),
            "short base must not reach a leaf"
        );
    }

    #[test]
    fn leaf_permutation_is_position_map() {
        // Colors force the discrete order [1, 0, 2].
        let g = Graph::new(3, [])
            .unwrap()
            .with_colors(vec![2, 1, 3])
            .unwrap();
        let pi = Coloring::unit(&g);
        assert!(pi.is_discrete());
        let p = leaf_permutation(&pi).unwrap();
        assert_eq!(p.images(), &[1, 0, 2]);

        let single = Coloring::unit(&Graph::new(1, []).unwrap());
        assert!(leaf_permutation(&single).unwrap().is_identity());

        let non_discrete = Coloring::unit(&Graph::new(3, []).unwrap());
        assert!(leaf_permutation(&non_discrete).is_err());
    }

    #[test]
    fn leaf_pairs_of_one_graph_give_automorphisms() {
        let g = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let mut refiner = Refiner::new(3);
        let mut rng = SplitMix64::new(77);
        let l1 = random_walk(&g, &mut refiner, SelectorKind::FirstLargest, &mut rng);
        let l2 = random_walk(&g, &mut refiner, SelectorKind::FirstLargest, &mut rng);
        let p1 = leaf_permutation(&l1.coloring).unwrap();
        let p2 = leaf_permutation(&l2.coloring).unwrap();
        let phi = p2.invert().compose(&p1).unwrap();
        assert!(is_automorphism(&g, &phi).unwrap());
    }

    #[test]
    fn smallest_selector_walks_terminate() {
        let g = cycle(8);
        let mut refiner = Refiner::new(8);
        let leaf = random_walk(
            &g,
            &mut refiner,
            SelectorKind::Smallest,
            &mut SplitMix64::new(2),
        );
        assert!(leaf.coloring.is_discrete());
    }
}
