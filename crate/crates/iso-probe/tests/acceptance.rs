//! Acceptance suite.
//!
//! Each test covers one numbered criterion and prints one pass line with
//! the measured quantities; assertions pin the stated tolerances exactly.

use iso_probe::coloring::Coloring;
use iso_probe::graph::{is_isomorphism, Graph, Permutation};
use iso_probe::leafstore::{LeafInsert, LeafStore, TreeId};
use iso_probe::oracle::{self, graphs};
use iso_probe::refinement::{RefineMode, RefinementOutcome, Refiner, Trace};
use iso_probe::selector::SelectorKind;
use iso_probe::solver::{random_iso, SolverConfig, Verdict};
use iso_probe::toolkit::{generate, Family, PairSpec, Relation};
use iso_probe::walk::{random_walk, SplitMix64};

fn gnp(n: usize, p: f64, rng: &mut SplitMix64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in u + 1..n as u32 {
            if rng.next_f64() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).unwrap()
}

fn random_perm(n: usize, rng: &mut SplitMix64) -> Permutation {
    let mut image: Vec<u32> = (0..n as u32).collect();
    rng.shuffle(&mut image);
    Permutation::from_images(image).unwrap()
}

/// Circular ladder (prism over C_k): two k-cycles joined by rungs.
fn prism(k: usize) -> Graph {
    let k32 = k as u32;
    let mut edges = Vec::new();
    for i in 0..k32 {
        edges.push((i, (i + 1) % k32));
        edges.push((i + k32, ((i + 1) % k32) + k32));
        edges.push((i, i + k32));
    }
    Graph::new(2 * k, edges).unwrap()
}

/// Moebius ladder: the 2k-cycle plus its k main diagonals.
fn moebius_ladder(k: usize) -> Graph {
    let n = (2 * k) as u32;
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push((i, (i + 1) % n));
    }
    for i in 0..k as u32 {
        edges.push((i, i + k as u32));
    }
    Graph::new(2 * k, edges).unwrap()
}

/// Record-mode refinement from the unit coloring, individualizing `picks`.
fn refine_sequence(g: &Graph, picks: &[u32]) -> (Coloring, Trace) {
    let mut refiner = Refiner::new(g.n());
    let mut pi = Coloring::unit(g);
    let mut trace = Trace::new();
    refiner
        .refine(g, &mut pi, &[], &mut trace, RefineMode::Record)
        .unwrap();
    for &v in picks {
        pi.individualize(v).unwrap();
        refiner
            .refine(g, &mut pi, &[v], &mut trace, RefineMode::Record)
            .unwrap();
    }
    (pi, trace)
}

#[test]
fn criterion_01_refinement_invariance() {
    let mut rng = SplitMix64::new(0xAC01);
    let mut checked_deep = 0usize;
    for trial in 0..200 {
        let n = 2 + (trial % 49);
        let p = [0.1, 0.3, 0.5][trial % 3];
        let g = gnp(n, p, &mut rng);
        let phi = random_perm(n, &mut rng);
        let h = g.apply_permutation(&phi).unwrap();

        let (pi_g, t_g) = refine_sequence(&g, &[]);
        let (pi_h, t_h) = refine_sequence(&h, &[]);
        assert_eq!(
            t_g.tokens(),
            t_h.tokens(),
            "trial {trial}: root streams differ"
        );
        assert_eq!(
            pi_g.apply_permutation(&phi).unwrap().cells_as_sets(),
            pi_h.cells_as_sets(),
            "trial {trial}: root partitions do not correspond"
        );

        // One individualization level deeper where a non-singleton exists.
        let v = (rng.bounded(n as u64)) as u32;
        if pi_g.cell_len(pi_g.cell_of(v)) >= 2 {
            let (pi_g2, t_g2) = refine_sequence(&g, &[v]);
            let (pi_h2, t_h2) = refine_sequence(&h, &[phi.apply(v)]);
            assert_eq!(
                t_g2.tokens(),
                t_h2.tokens(),
                "trial {trial}: deep streams differ"
            );
            assert_eq!(
                pi_g2.apply_permutation(&phi).unwrap().cells_as_sets(),
                pi_h2.cells_as_sets(),
                "trial {trial}: deep partitions do not correspond"
            );
            checked_deep += 1;
        }
    }
    println!(
        "acceptance 1 (refinement invariance): PASS — 200 pairs exact, \
         {checked_deep} also checked one level deep"
    );
}

#[test]
fn criterion_02_leaf_occurrence_arithmetic() {
    let suite = oracle::verification_suite(9);
    assert_eq!(
        suite.len(),
        5 + 6 + 5 + 2 + 1 + 20,
        "suite must hold P_2..P_6, C_3..C_8, K_2..K_6, Q_2, Q_3, grid, 20 gnp"
    );
    for (name, g) in &suite {
        let report = oracle::verify_occurrences(g).unwrap();
        assert!(
            report.pass,
            "{name}: {report} (class sizes {:?})",
            report.class_sizes
        );
    }
    println!(
        "acceptance 2 (leaf occurrence arithmetic): PASS — {} graphs, all \
         class sizes equal |Aut| and classes = leaves/|Aut|",
        suite.len()
    );
}

/// Oracle-verified non-isomorphic pairs across the generator families, all
/// with n <= 8.
fn non_isomorphic_corpus(count: usize) -> Vec<(Graph, Graph)> {
    let mut corpus: Vec<(Graph, Graph)> = Vec::new();
    let mut specs: Vec<Family> = vec![
        Family::Cycle { n: 6 },
        Family::Cycle { n: 7 },
        Family::Cycle { n: 8 },
        Family::Path { n: 5 },
        Family::Path { n: 6 },
        Family::Path { n: 7 },
        Family::Path { n: 8 },
        Family::RandomRegular { n: 6, degree: 2 },
        Family::RandomRegular { n: 8, degree: 3 },
        Family::RandomTree { n: 6 },
        Family::RandomTree { n: 7 },
        Family::RandomTree { n: 8 },
        Family::Grid { rows: 2, cols: 3 },
        Family::Grid { rows: 2, cols: 4 },
    ];
    for n in 5..=8 {
        for p in [0.3, 0.5] {
            specs.push(Family::Gnp { n, p });
        }
    }
    let mut seed = 0u64;
    'fill: loop {
        for &family in &specs {
            if corpus.len() >= count {
                break 'fill;
            }
            let spec = PairSpec {
                family,
                relation: Relation::NonIsomorphic,
                seed,
            };
            if let Ok(pair) = generate(&spec) {
                assert!(pair.oracle_checked, "corpus pairs must be oracle-verified");
                corpus.push((pair.g1, pair.g2));
            }
        }
        seed += 1;
    }
    corpus
}

#[test]
fn criterion_03_one_sided_error() {
    let mut corpus = non_isomorphic_corpus(200);
    // Structural regular pairs on top of the generated ones.
    corpus.push((
        graphs::cycle(6),
        graphs::disjoint_union(&graphs::cycle(3), &graphs::cycle(3)),
    ));
    corpus.push((prism(3), moebius_ladder(3)));
    corpus.push((prism(4), moebius_ladder(4)));
    let mut runs = 0u64;
    for (i, (g1, g2)) in corpus.iter().enumerate() {
        for (seed, use_dev) in [(i as u64, true), (i as u64 + 1000, false)] {
            let cfg = SolverConfig {
                seed,
                use_deviation_phase: use_dev,
                ..SolverConfig::default()
            };
            let verdict = random_iso(g1, g2, &cfg).unwrap();
            assert!(
                !verdict.is_isomorphic(),
                "pair {i}: one-sided error violated with seed {seed}"
            );
            runs += 1;
        }
    }
    println!(
        "acceptance 3 (one-sided error): PASS — {} non-isomorphic pairs, \
         {runs} runs, zero isomorphic verdicts",
        corpus.len()
    );
}

/// Mixed-family isomorphic pair specs with n <= 10 so the oracle can
/// confirm every instance.
fn small_iso_families() -> Vec<Family> {
    let mut fams = vec![
        Family::Cycle { n: 5 },
        Family::Cycle { n: 8 },
        Family::Cycle { n: 10 },
        Family::Path { n: 6 },
        Family::Path { n: 9 },
        Family::Grid { rows: 2, cols: 3 },
        Family::Grid { rows: 2, cols: 5 },
        Family::Grid { rows: 3, cols: 3 },
        Family::Hypercube { dim: 2 },
        Family::Hypercube { dim: 3 },
        Family::RandomRegular { n: 6, degree: 2 },
        Family::RandomRegular { n: 8, degree: 3 },
        Family::RandomRegular { n: 10, degree: 3 },
        Family::RandomTree { n: 7 },
        Family::RandomTree { n: 10 },
        Family::Complete { n: 4 },
        Family::Complete { n: 6 },
    ];
    for n in 6..=10 {
        for p in [0.25, 0.5] {
            fams.push(Family::Gnp { n, p });
        }
    }
    fams
}

#[test]
fn criterion_04_completeness_bound() {
    let fams = small_iso_families();
    let mut trials = 0u32;
    let mut failures = 0u32;
    let mut seed = 0u64;
    while trials < 500 {
        let family = fams[trials as usize % fams.len()];
        let spec = PairSpec {
            family,
            relation: Relation::Isomorphic,
            seed,
        };
        seed += 1;
        let Ok(pair) = generate(&spec) else { continue };
        assert!(
            oracle::brute_force_iso(&pair.g1, &pair.g2)
                .unwrap()
                .is_some(),
            "corpus pair must be isomorphic"
        );
        let cfg = SolverConfig {
            epsilon: 0.01,
            seed,
            ..SolverConfig::default()
        };
        match random_iso(&pair.g1, &pair.g2, &cfg).unwrap() {
            Verdict::Isomorphic { witness, .. } => {
                assert!(is_isomorphism(&pair.g1, &pair.g2, &witness).unwrap());
            }
            Verdict::ProbablyNonIsomorphic { .. } | Verdict::Inconclusive { .. } => {
                failures += 1;
            }
            Verdict::NonIsomorphicCertified { reason, .. } => {
                panic!("certified rejection of an isomorphic pair: {reason}");
            }
        }
        trials += 1;
    }
    let rate = failures as f64 / trials as f64;
    assert!(
        rate <= 0.03,
        "failure rate {rate} above the 3% budget ({failures}/{trials})"
    );
    println!(
        "acceptance 4 (completeness bound): PASS — {trials} isomorphic trials \
         at epsilon 0.01, {failures} failures (rate {rate:.4} <= 0.03)"
    );
}

#[test]
fn criterion_05_implicit_automorphism_exploitation() {
    let mut means = Vec::new();
    for n in [4usize, 8, 16] {
        let g = graphs::complete(n);
        let mut total_walks = 0u64;
        for seed in 0..100u64 {
            let mut rng = SplitMix64::new(seed * 31 + n as u64);
            let h = g.apply_permutation(&random_perm(n, &mut rng)).unwrap();
            let cfg = SolverConfig {
                seed,
                ..SolverConfig::default()
            };
            let verdict = random_iso(&g, &h, &cfg).unwrap();
            assert!(verdict.is_isomorphic(), "K_{n} pair must certify");
            total_walks += verdict.stats().walks;
        }
        means.push(total_walks as f64 / 100.0);
    }
    for (i, &m) in means.iter().enumerate() {
        assert!(m <= 4.0, "mean walks {m} for K_ exceeds 4 (index {i})");
    }
    let max = means.iter().cloned().fold(f64::MIN, f64::max);
    let min = means.iter().cloned().fold(f64::MAX, f64::min);
    assert!(
        max <= 2.0 * min,
        "means {means:?} spread beyond a factor of 2"
    );
    println!(
        "acceptance 5 (implicit automorphism exploitation): PASS — mean walks \
         {means:?} for K_4, K_8, K_16 (<= 4, spread factor {:.2})",
        max / min
    );
}

#[test]
fn criterion_06_sublinear_sampling_trend() {
    let mut medians = Vec::new();
    for &n in &[50usize, 100, 200] {
        let mut walk_counts: Vec<u64> = Vec::new();
        for seed in 0..30u64 {
            let spec = PairSpec {
                family: Family::RandomRegular { n, degree: 3 },
                relation: Relation::Isomorphic,
                seed: seed * 7 + n as u64,
            };
            let pair = generate(&spec).unwrap();
            let cfg = SolverConfig {
                seed,
                ..SolverConfig::default()
            };
            let verdict = random_iso(&pair.g1, &pair.g2, &cfg).unwrap();
            assert!(
                verdict.is_isomorphic(),
                "3-regular relabeling must certify (n={n})"
            );
            walk_counts.push(verdict.stats().walks);
        }
        walk_counts.sort_unstable();
        medians.push(walk_counts[walk_counts.len() / 2] as f64);
    }
    for w in medians.windows(2) {
        assert!(
            w[1] <= 2.5 * w[0],
            "median leaves explored grew by more than 2.5x per doubling: {medians:?}"
        );
    }
    println!(
        "acceptance 6 (sublinear sampling trend): PASS — median walks {medians:?} \
         for n = 50, 100, 200 (growth factors {:.2}, {:.2})",
        medians[1] / medians[0],
        medians[2] / medians[1]
    );
}

#[test]
fn criterion_07_blueprint_soundness() {
    let fams = small_iso_families();
    let mut refiner = Refiner::new(64);
    let mut replay_checks = 0u64;
    for trial in 0..100u64 {
        let family = fams[trial as usize % fams.len()];
        let spec = PairSpec {
            family,
            relation: Relation::Isomorphic,
            seed: trial,
        };
        let pair = generate(&spec).unwrap();
        let on = SolverConfig {
            seed: trial,
            use_blueprint: true,
            ..SolverConfig::default()
        };
        let off = SolverConfig {
            seed: trial,
            use_blueprint: false,
            ..SolverConfig::default()
        };
        let v_on = random_iso(&pair.g1, &pair.g2, &on).unwrap();
        let v_off = random_iso(&pair.g1, &pair.g2, &off).unwrap();
        match (&v_on, &v_off) {
            (Verdict::Isomorphic { witness: w1, .. }, Verdict::Isomorphic { witness: w2, .. }) => {
                assert_eq!(w1, w2, "trial {trial}: witnesses diverged")
            }
            (a, b) => panic!("trial {trial}: verdicts diverged: {a:?} vs {b:?}"),
        }

        // Stable colorings along replayed bases: a blueprint replay of a
        // recorded walk must reproduce the coloring exactly.
        let mut rng = SplitMix64::new(trial);
        let leaf = random_walk(&pair.g1, &mut refiner, SelectorKind::FirstLargest, &mut rng);
        let mut pi = Coloring::unit(&pair.g1);
        let mut trace = Trace::new();
        let mode = RefineMode::Blueprint {
            target: &leaf.trace,
            k: 4,
        };
        let mut out = refiner
            .refine(&pair.g1, &mut pi, &[], &mut trace, mode)
            .unwrap();
        for &v in &leaf.base {
            assert_eq!(out, RefinementOutcome::Stable);
            pi.individualize(v).unwrap();
            out = refiner
                .refine(&pair.g1, &mut pi, &[v], &mut trace, mode)
                .unwrap();
        }
        assert_eq!(out, RefinementOutcome::Stable);
        assert_eq!(
            pi, leaf.coloring,
            "trial {trial}: blueprint replay diverged"
        );
        assert_eq!(trace, leaf.trace, "trial {trial}: blueprint trace diverged");
        replay_checks += 1;
    }
    println!(
        "acceptance 7 (blueprint soundness): PASS — 100 pairs, identical \
         verdicts and witnesses, {replay_checks} byte-identical replays"
    );
}

#[test]
fn criterion_08_path_replay_fidelity() {
    let fams = small_iso_families();
    let mut refiner = Refiner::new(64);
    let mut rng = SplitMix64::new(0xAC08);
    for trial in 0..100u64 {
        let family = fams[trial as usize % fams.len()];
        let mut frng = SplitMix64::new(trial);
        let g = match family {
            Family::Gnp { n, p } => gnp(n, p, &mut frng),
            _ => {
                generate(&PairSpec {
                    family,
                    relation: Relation::Isomorphic,
                    seed: trial,
                })
                .unwrap()
                .g1
            }
        };
        let leaf = random_walk(&g, &mut refiner, SelectorKind::FirstLargest, &mut rng);
        // Budget 1: the first copy stores the coloring, the second only the path.
        let mut store = LeafStore::new(1);
        store.insert_or_candidates(TreeId::T1, LeafInsert::Actual(&leaf));
        store.confirm_insert();
        store.insert_or_candidates(TreeId::T1, LeafInsert::Actual(&leaf));
        store.confirm_insert();
        let full = store
            .materialize(&g, &mut refiner, SelectorKind::FirstLargest, 0)
            .unwrap();
        let path = store
            .materialize(&g, &mut refiner, SelectorKind::FirstLargest, 1)
            .unwrap();
        assert_eq!(full, path, "trial {trial}: replayed permutation diverged");
        assert_eq!(store.counters().replays, 1);
    }
    println!(
        "acceptance 8 (path replay fidelity): PASS — 100 walks, path-only \
         materialization equals full materialization exactly"
    );
}

#[test]
fn criterion_09_deviation_phase_effectiveness() {
    let mut pairs: Vec<(String, Graph, Graph)> = Vec::new();
    pairs.push((
        "C_6 vs 2C_3".into(),
        graphs::cycle(6),
        graphs::disjoint_union(&graphs::cycle(3), &graphs::cycle(3)),
    ));
    for m in 4..=13 {
        pairs.push((
            format!("C_{} vs 2C_{}", 2 * m, m),
            graphs::cycle(2 * m),
            graphs::disjoint_union(&graphs::cycle(m), &graphs::cycle(m)),
        ));
    }
    for k in 3..=12 {
        pairs.push((
            format!("prism_{k} vs moebius_{k}"),
            prism(k),
            moebius_ladder(k),
        ));
    }
    assert_eq!(pairs.len(), 21);

    let mut runs = 0u32;
    let mut stayed_in_phase = 0u32;
    let mut walks_with = 0u64;
    let mut walks_without = 0u64;
    for (i, (name, g1, g2)) in pairs.iter().enumerate() {
        for seed_step in 0..3u64 {
            let seed = i as u64 * 17 + seed_step;
            let with = SolverConfig {
                seed,
                ..SolverConfig::default()
            };
            let without = SolverConfig {
                seed,
                use_deviation_phase: false,
                ..SolverConfig::default()
            };
            let v_with = random_iso(g1, g2, &with).unwrap();
            let v_without = random_iso(g1, g2, &without).unwrap();
            assert!(!v_with.is_isomorphic(), "{name}: one-sided error violated");
            assert!(
                !v_without.is_isomorphic(),
                "{name}: one-sided error violated"
            );
            runs += 1;
            if !v_with.stats().full_phase_entered {
                stayed_in_phase += 1;
            }
            walks_with += v_with.stats().walks;
            walks_without += v_without.stats().walks;
        }
    }
    let in_phase_rate = stayed_in_phase as f64 / runs as f64;
    assert!(
        in_phase_rate >= 0.9,
        "deviation phase resolved only {stayed_in_phase}/{runs} runs in-phase"
    );
    assert!(
        walks_with < walks_without,
        "deviation phase needed {walks_with} walks, full search {walks_without}"
    );
    println!(
        "acceptance 9 (deviation phase effectiveness): PASS — {runs} runs over \
         21 pairs, {:.1}% resolved in-phase, {walks_with} walks with the phase \
         vs {walks_without} without",
        in_phase_rate * 100.0
    );
}

#[test]
fn criterion_10_determinism() {
    let mut rng = SplitMix64::new(0xAC10);
    let g_iso = gnp(16, 0.3, &mut rng);
    let h_iso = g_iso.apply_permutation(&random_perm(16, &mut rng)).unwrap();
    let g_non = graphs::cycle(8);
    let h_non = graphs::disjoint_union(&graphs::cycle(4), &graphs::cycle(4));
    let configs = [
        SolverConfig::default(),
        SolverConfig {
            seed: 99,
            ..SolverConfig::default()
        },
        SolverConfig {
            use_deviation_phase: false,
            seed: 3,
            ..SolverConfig::default()
        },
        SolverConfig {
            use_blueprint: false,
            seed: 4,
            ..SolverConfig::default()
        },
        SolverConfig {
            selector: SelectorKind::Smallest,
            seed: 5,
            ..SolverConfig::default()
        },
        SolverConfig {
            epsilon: 0.001,
            k: 0,
            seed: 6,
            ..SolverConfig::default()
        },
        SolverConfig {
            full_leaf_budget: 0,
            seed: 7,
            ..SolverConfig::default()
        },
    ];
    let mut checked = 0u32;
    for (g1, g2) in [(&g_iso, &h_iso), (&g_non, &h_non)] {
        for cfg in &configs {
            let a = random_iso(g1, g2, cfg).unwrap();
            let b = random_iso(g1, g2, cfg).unwrap();
            assert_eq!(a, b, "verdict, witness or stats differ under {cfg:?}");
            checked += 1;
        }
    }
    println!(
        "acceptance 10 (determinism): PASS — {checked} (pair, config) repeats \
         with identical verdicts, witnesses and stats"
    );
}

/// Cross-check on top of the numbered criteria: solver verdicts agree with
/// the brute-force oracle on a mixed corpus, with the error budget spent
/// only on isomorphic pairs.
#[test]
fn invariant_oracle_solver_agreement() {
    let mut corpus: Vec<(Graph, Graph, bool)> = Vec::new();
    let mut rng = SplitMix64::new(0xA63E);
    // 100 relabeling pairs.
    for _ in 0..100 {
        let n = 4 + rng.bounded(5) as usize;
        let g = gnp(n, 0.4, &mut rng);
        let h = g.apply_permutation(&random_perm(n, &mut rng)).unwrap();
        assert!(oracle::brute_force_iso(&g, &h).unwrap().is_some());
        corpus.push((g, h, true));
    }
    // 100 oracle-verified non-isomorphic pairs.
    for (g, h) in non_isomorphic_corpus(100) {
        corpus.push((g, h, false));
    }
    let mut missed_isomorphic = 0u32;
    for (i, (g1, g2, iso)) in corpus.iter().enumerate() {
        let cfg = SolverConfig {
            seed: i as u64,
            ..SolverConfig::default()
        };
        let verdict = random_iso(g1, g2, &cfg).unwrap();
        match (iso, verdict.is_isomorphic()) {
            (true, true) | (false, false) => {}
            (true, false) => missed_isomorphic += 1,
            (false, true) => panic!("pair {i}: isomorphic verdict on non-isomorphic pair"),
        }
    }
    assert!(
        missed_isomorphic <= 6,
        "{missed_isomorphic}/100 isomorphic pairs missed (budget 6 = 2x the 3% slack)"
    );
    println!(
        "oracle agreement invariant: PASS — 200 mixed pairs, {missed_isomorphic} \
         isomorphic misses within budget, zero false isomorphisms"
    );
}
