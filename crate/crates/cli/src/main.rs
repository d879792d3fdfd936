//! `spim`: generate instances, solve them, replay cascades and run the benchmark.
//!
//! Exit codes: 0 success, 1 I/O or parse failure, 2 invalid instance,
//! 3 contract or assumption violation, 4 oracle refusal.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use spim_core::bench::run_bench;
use spim_core::generate::{
    gen_bipartite_family, gen_random_digraph, gen_random_forest, BipartiteSpec, ThresholdMode,
};
use spim_core::io::{load_instance, save_instance, save_solution, SolutionFile};
use spim_core::oracle::DEFAULT_LIMIT;
use spim_core::tree_dp::Choice;
use spim_core::{
    brute_force_solve, check_assumptions, evaluate_solution, simulate_cascade, solve_approx,
    solve_forest, validate_instance, Budgets, Error, Instance, OracleOptions, Result, Solution,
};

#[derive(Parser)]
#[command(name = "spim", version, about = "Seed and physical-node selection on socio-physical networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random instance.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
    },
    /// Pick seeds and physical nodes for an instance.
    Solve(SolveArgs),
    /// Run the cascade for given seeds and opened physical nodes.
    Simulate(SimulateArgs),
    /// Check an instance and report which structural assumptions hold.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Time the oracle against the approximation on the bipartite family.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    k_s: usize,
    #[arg(long, default_value_t = 1)]
    k_p: usize,
    #[arg(long, default_value_t = 1)]
    w_min: u32,
    #[arg(long, default_value_t = 9)]
    w_max: u32,
}

#[derive(Subcommand)]
enum GenFamily {
    /// One row of the growing two-layer family (budgets come from the row).
    Bipartite {
        /// Zero-based row index.
        #[arg(long, default_value_t = 0)]
        row: usize,
        #[arg(long, default_value_t = 3)]
        base_i: usize,
        #[arg(long, default_value_t = 7)]
        start_n: usize,
        #[arg(long, default_value_t = 0.3)]
        edge_prob: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Forest of random out-trees with unit thresholds.
    Forest {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        components: usize,
        #[arg(long, default_value_t = 2)]
        max_out_degree: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Random digraph.
    Digraph {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        edge_prob: f64,
        #[arg(long, value_enum, default_value_t = Thresholds::Unit)]
        thresholds: Thresholds,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Thresholds {
    Unit,
    General,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    Greedy,
    Dp,
    Oracle,
    /// `dp` on forests of out-trees, `greedy` otherwise.
    Auto,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    algorithm: Algorithm,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Print the greedy picks and the chosen case.
    #[arg(long)]
    trace: bool,
    /// Write every defined DP entry to this JSON file.
    #[arg(long)]
    dump_tables: Option<PathBuf>,
    /// Run the oracle past its limit.
    #[arg(long)]
    force: bool,
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: u128,
    /// Spread the oracle over all cores.
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated social node ids.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    seeds: Vec<String>,
    /// Comma-separated physical node ids.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    opened: Vec<String>,
    /// Print one JSON line per round.
    #[arg(long)]
    trace: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    #[value(name = "bipartite_t1")]
    BipartiteT1,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value_t = Family::BipartiteT1)]
    family: Family,
    #[arg(long, default_value_t = 5)]
    rows: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    force: bool,
    #[arg(long, default_value_t = DEFAULT_LIMIT)]
    limit: u128,
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Validation(_) => 2,
        Error::Contract(_)
        | Error::Assumption(_)
        | Error::UnknownSocialNode(_)
        | Error::UnknownPhysicalNode(_) => 3,
        Error::OracleRefused { .. } => 4,
        Error::Parse(_) | Error::Json(_) | Error::Csv(_) | Error::Io(_) => 1,
    }
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("JSON values serialize"));
}

fn gen(family: GenFamily) -> Result<()> {
    let (instance, out): (Instance, PathBuf) = match family {
        GenFamily::Bipartite {
            row,
            base_i,
            start_n,
            edge_prob,
            seed,
            out,
        } => {
            let spec = BipartiteSpec {
                base_i,
                start_n,
                rows: row + 1,
                extra_edge_prob: edge_prob,
                seed,
                ..BipartiteSpec::default()
            };
            let mut family = gen_bipartite_family(&spec)?;
            (family.pop().expect("rows >= 1"), out)
        }
        GenFamily::Forest {
            n,
            components,
            max_out_degree,
            common,
        } => {
            let inst = gen_random_forest(n, components, max_out_degree, common.w_min..=common.w_max, common.seed)?;
            (inst.with_budgets(Budgets::new(common.k_s, common.k_p)), common.out)
        }
        GenFamily::Digraph {
            n,
            edge_prob,
            thresholds,
            common,
        } => {
            let mode = match thresholds {
                Thresholds::Unit => ThresholdMode::Unit,
                Thresholds::General => ThresholdMode::General,
            };
            let inst = gen_random_digraph(n, edge_prob, common.w_min..=common.w_max, mode, common.seed)?;
            (inst.with_budgets(Budgets::new(common.k_s, common.k_p)), common.out)
        }
    };
    let report = validate_instance(&instance);
    if !report.is_valid() {
        return Err(Error::Validation(report));
    }
    save_instance(&instance, &out)?;
    eprintln!("wrote {} ({} social nodes)", out.display(), instance.n());
    Ok(())
}

fn dump_tables(path: &Path, outcome: &spim_core::ForestOutcome) -> Result<()> {
    let forest = &outcome.forest;
    let records: Vec<_> = outcome
        .table
        .entries()
        .map(|(v, k, l, variant, cell)| {
            let split = match cell.choice {
                Choice::Split(parts) => json!(parts
                    .iter()
                    .zip(forest.children(v))
                    .filter_map(|(p, &c)| p.map(|p| json!({
                        "child": forest.node(c).id,
                        "k": p.k,
                        "l": p.l,
                        "variant": p.variant,
                    })))
                    .collect::<Vec<_>>()),
                Choice::Pick(from) => json!({ "pick": from }),
                Choice::Base => serde_json::Value::Null,
            };
            json!({
                "node": forest.node(v).id,
                "k": k,
                "l": l,
                "variant": variant,
                "value": cell.value,
                "split": split,
            })
        })
        .collect();
    std::fs::write(path, serde_json::to_string_pretty(&records)? + "\n")?;
    Ok(())
}

fn solve(args: SolveArgs) -> Result<()> {
    let instance = load_instance(&args.input)?;
    let algorithm = match args.algorithm {
        Algorithm::Auto => {
            if check_assumptions(&instance)?.a4_forest_of_out_trees {
                eprintln!("notice: forest of out-trees detected, using the exact DP");
                Algorithm::Dp
            } else {
                eprintln!("notice: not a forest of out-trees, using the greedy approximation");
                Algorithm::Greedy
            }
        }
        other => other,
    };

    let solution: Solution = match algorithm {
        Algorithm::Greedy => {
            let outcome = solve_approx(&instance)?;
            if args.trace {
                print_json(&json!({
                    "picks": outcome.trace.picks,
                    "sigma": outcome.trace.sigma_value,
                    "sigma_w": outcome.trace.sigma_w_value,
                    "case": outcome.case.label(),
                }));
            }
            outcome.solution
        }
        Algorithm::Dp => {
            let outcome = solve_forest(&instance)?;
            if let Some(path) = &args.dump_tables {
                dump_tables(path, &outcome)?;
            }
            outcome.solution
        }
        Algorithm::Oracle => {
            let options = OracleOptions {
                limit: args.limit,
                force: args.force,
                parallel: args.parallel,
            };
            let result = brute_force_solve(&instance, options)?;
            eprintln!(
                "evaluated {} combinations in {:.3}s",
                result.evaluated_count,
                result.elapsed.as_secs_f64()
            );
            result.best
        }
        Algorithm::Auto => unreachable!("resolved above"),
    };

    let cascade = evaluate_solution(&instance, &solution)?;
    let file = SolutionFile::new(&solution, &cascade);
    save_solution(&file, &args.output)?;
    eprintln!("value {}", file.value);
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let instance = load_instance(&args.input)?;
    let result = simulate_cascade(&instance, &args.seeds, &args.opened)?;
    if args.trace {
        let mut cumulative = 0usize;
        for (t, round) in result.rounds.iter().enumerate() {
            cumulative += round.len();
            println!("{}", json!({ "round": t, "activated": round, "total_active": cumulative }));
        }
    }
    print_json(&json!({
        "activated": result.activated,
        "total_weight": result.total_weight,
        "rounds": result.rounds.len(),
    }));
    Ok(())
}

fn validate(input: &Path) -> Result<()> {
    let instance = load_instance(input)?;
    let profile = check_assumptions(&instance)?;
    print_json(&json!({ "valid": true, "assumptions": profile }));
    Ok(())
}

fn bench(args: BenchArgs) -> Result<()> {
    let Family::BipartiteT1 = args.family;
    let spec = BipartiteSpec {
        rows: args.rows,
        seed: args.seed,
        ..BipartiteSpec::default()
    };
    let options = OracleOptions {
        limit: args.limit,
        force: args.force,
        parallel: false,
    };
    let report = run_bench(&spec, options, Some(&args.out))?;
    println!(
        "{:>4} {:>4} {:>4} {:>14} {:>14} {:>8} {:>8} {:>7} {:>7}",
        "n", "k_s", "k_p", "oracle_s", "approx_s", "oracle", "approx", "ratio", "bound"
    );
    for r in &report.rows {
        println!(
            "{:>4} {:>4} {:>4} {:>14.6e} {:>14.6e} {:>8} {:>8} {:>7.4} {:>7.4}",
            r.n, r.k_s, r.k_p, r.oracle_seconds, r.approx_seconds, r.oracle_value, r.approx_value, r.ratio, r.bound
        );
    }
    for s in &report.skipped {
        println!("row {} (n = {}) skipped: {}", s.row, s.n, s.reason);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen { family } => gen(family),
        Command::Solve(args) => solve(args),
        Command::Simulate(args) => simulate(args),
        Command::Validate { input } => validate(&input),
        Command::Bench(args) => bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
