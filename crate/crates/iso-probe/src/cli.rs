//! The `iso-probe` command line.
//!
//! Exit codes: 0 isomorphic, 1 non-isomorphic (certified or probabilistic),
//! 2 usage or parse errors, 3 inconclusive (walk budget exhausted).

use std::fs;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::oracle;
use crate::selector::SelectorKind;
use crate::solver::{random_iso, SolverConfig, Verdict};
use crate::toolkit::{generate, Family, PairSpec, Relation};
use crate::Graph;

pub const EXIT_ISOMORPHIC: i32 = 0;
pub const EXIT_NON_ISOMORPHIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Parser)]
#[command(
    name = "iso-probe",
    version,
    about = "Probabilistic graph isomorphism tester",
    subcommand_negates_reqs = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Test two DIMACS graphs for isomorphism (the default subcommand).
    Test(TestArgs),
    /// Generate a benchmark graph pair as DIMACS files.
    Gen(GenArgs),
    /// Run the brute-force verification suite on small graphs.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct TestArgs {
    /// One-sided error bound for non-isomorphic answers.
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Deviation extension: extra worklist pops refined past a mismatch.
    #[arg(long, default_value_t = 4)]
    k: u32,
    #[arg(long, value_enum, default_value_t = SelectorArg::FirstLargest)]
    selector: SelectorArg,
    /// Skip the deviation pre-phase.
    #[arg(long)]
    no_deviation: bool,
    /// Disable blueprint cell skipping.
    #[arg(long)]
    no_blueprint: bool,
    /// Full-coloring leaf records kept per tree.
    #[arg(long, default_value_t = 64)]
    full_leaf_budget: usize,
    /// Walk budget before giving up as inconclusive.
    #[arg(long, default_value_t = 1_000_000)]
    max_walks: u64,
    /// Print solver counters after the verdict.
    #[arg(long)]
    stats: bool,
    /// First graph (DIMACS edge format).
    g1: PathBuf,
    /// Second graph (DIMACS edge format).
    g2: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SelectorArg {
    FirstLargest,
    Smallest,
}

impl From<SelectorArg> for SelectorKind {
    fn from(s: SelectorArg) -> SelectorKind {
        match s {
            SelectorArg::FirstLargest => SelectorKind::FirstLargest,
            SelectorArg::Smallest => SelectorKind::Smallest,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    /// Graph family.
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Vertex count (complete, cycle, path, gnp, random-regular, random-tree).
    #[arg(long)]
    n: Option<usize>,
    /// Edge probability (gnp).
    #[arg(long)]
    p: Option<f64>,
    /// Vertex degree (random-regular).
    #[arg(long)]
    degree: Option<usize>,
    /// Grid rows.
    #[arg(long)]
    rows: Option<usize>,
    /// Grid columns.
    #[arg(long)]
    cols: Option<usize>,
    /// Hypercube dimension.
    #[arg(long)]
    dim: Option<u32>,
    #[arg(long, value_enum)]
    relation: RelationArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output prefix; writes <prefix>_1.dimacs and <prefix>_2.dimacs.
    #[arg(long)]
    out: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Complete,
    Cycle,
    Path,
    Grid,
    Hypercube,
    Gnp,
    RandomRegular,
    RandomTree,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelationArg {
    Isomorphic,
    Nonisomorphic,
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest graph order to include.
    #[arg(long, default_value_t = 9)]
    max_n: usize,
}

/// Entry point used by the binary; returns the process exit code.
pub fn cli_main<I>(args: I) -> i32
where
    I: IntoIterator,
    I::Item: Into<String>,
{
    let mut argv: Vec<String> = args.into_iter().map(Into::into).collect();
    if argv.is_empty() {
        argv.push("iso-probe".into());
    }
    // `iso-probe a.dimacs b.dimacs` is shorthand for the test subcommand.
    if let Some(first) = argv.get(1) {
        let known = [
            "test",
            "gen",
            "verify",
            "-h",
            "--help",
            "-V",
            "--version",
            "help",
        ];
        if !known.contains(&first.as_str()) {
            argv.insert(1, "test".into());
        }
    }
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Test(args) => run_test(args),
        Command::Gen(args) => run_gen(args),
        Command::Verify(args) => run_verify(args),
    }
}

fn load_graph(path: &PathBuf) -> Result<Graph, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    Graph::parse_dimacs(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn run_test(args: TestArgs) -> i32 {
    let g1 = match load_graph(&args.g1) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let g2 = match load_graph(&args.g2) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let cfg = SolverConfig {
        epsilon: args.epsilon,
        k: args.k,
        d_threshold: None,
        use_deviation_phase: !args.no_deviation,
        use_blueprint: !args.no_blueprint,
        selector: args.selector.into(),
        seed: args.seed,
        full_leaf_budget: args.full_leaf_budget,
        max_walks: args.max_walks,
    };
    let verdict = match random_iso(&g1, &g2, &cfg) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let code = match &verdict {
        Verdict::Isomorphic { witness, .. } => {
            println!("isomorphic");
            let images: Vec<String> = witness
                .images()
                .iter()
                .map(|&x| (x + 1).to_string())
                .collect();
            println!("witness: {}", images.join(" "));
            EXIT_ISOMORPHIC
        }
        Verdict::NonIsomorphicCertified { reason, .. } => {
            println!("non-isomorphic (certified)");
            if args.stats {
                println!("reason: {reason}");
            }
            EXIT_NON_ISOMORPHIC
        }
        Verdict::ProbablyNonIsomorphic { .. } => {
            println!("non-isomorphic (error < {})", args.epsilon);
            EXIT_NON_ISOMORPHIC
        }
        Verdict::Inconclusive { .. } => {
            println!("inconclusive (walk budget exhausted)");
            EXIT_INCONCLUSIVE
        }
    };
    if args.stats {
        let s = verdict.stats();
        println!("walks: {}", s.walks);
        println!("nodes visited: {}", s.nodes_visited);
        println!(
            "leaves stored: full={} path={} fake={}",
            s.leaves_full, s.leaves_path_only, s.leaves_fake
        );
        println!("automorphisms certified: {}", s.automorphisms_found);
        println!("c at exit: {}", s.collisions);
    }
    code
}

fn family_from_args(args: &GenArgs) -> Result<Family, String> {
    let need_n = || args.n.ok_or_else(|| "missing --n".to_string());
    match args.family {
        FamilyArg::Complete => Ok(Family::Complete { n: need_n()? }),
        FamilyArg::Cycle => Ok(Family::Cycle { n: need_n()? }),
        FamilyArg::Path => Ok(Family::Path { n: need_n()? }),
        FamilyArg::Grid => Ok(Family::Grid {
            rows: args.rows.ok_or("missing --rows")?,
            cols: args.cols.ok_or("missing --cols")?,
        }),
        FamilyArg::Hypercube => Ok(Family::Hypercube {
            dim: args.dim.ok_or("missing --dim")?,
        }),
        FamilyArg::Gnp => Ok(Family::Gnp {
            n: need_n()?,
            p: args.p.ok_or("missing --p")?,
        }),
        FamilyArg::RandomRegular => Ok(Family::RandomRegular {
            n: need_n()?,
            degree: args.degree.ok_or("missing --degree")?,
        }),
        FamilyArg::RandomTree => Ok(Family::RandomTree { n: need_n()? }),
    }
}

fn run_gen(args: GenArgs) -> i32 {
    let family = match family_from_args(&args) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    let relation = match args.relation {
        RelationArg::Isomorphic => Relation::Isomorphic,
        RelationArg::Nonisomorphic => Relation::NonIsomorphic,
    };
    let spec = PairSpec {
        family,
        relation,
        seed: args.seed,
    };
    let pair = match generate(&spec) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if !pair.oracle_checked && relation == Relation::NonIsomorphic {
        eprintln!(
            "warning: pair too large for the oracle; non-isomorphism rests on \
             the degree-preserving swap construction"
        );
    }
    for (suffix, g) in [("1", &pair.g1), ("2", &pair.g2)] {
        let path = format!("{}_{suffix}.dimacs", args.out);
        if let Err(e) = fs::write(&path, g.to_dimacs()) {
            eprintln!("error: cannot write {path}: {e}");
            return EXIT_USAGE;
        }
        println!("wrote {path}");
    }
    EXIT_ISOMORPHIC
}

fn run_verify(args: VerifyArgs) -> i32 {
    let suite = oracle::verification_suite(args.max_n.min(oracle::MAX_BRUTE_FORCE_N));
    let mut failures = 0usize;
    for (name, g) in &suite {
        match oracle::verify_occurrences(g) {
            Ok(report) => {
                println!("{name}: {report}");
                if !report.pass {
                    failures += 1;
                }
            }
            Err(e) => {
                println!("{name}: error: {e}");
                failures += 1;
            }
        }
    }
    println!("verified {} graphs, {} failure(s)", suite.len(), failures);
    if failures == 0 {
        0
    } else {
        1
    }
}
