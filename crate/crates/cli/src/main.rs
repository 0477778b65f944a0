mod chernoff;
mod input;
mod scaling;

use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use discfair::discrepancy::{
    check_discrepancy_at_most, discrepancy, min_discrepancy_exact, min_discrepancy_search, size_lower_bound,
    DEFAULT_STATE_CAP,
};
use discfair::fairness::{exact_min_over_allocations, min_d, Notion};
use discfair::generators::{
    gen_disc_system, gen_ef_instance, gen_prop_instance, gen_propnew_instance, ConstructionKind, ConstructionParams,
};
use discfair::rational::{format_fraction, parse_fraction};
use discfair::{Allocation, Coloring, Error, Rational, Threshold};

use input::{load_fair_instance, load_set_system, read_file, write_file, Failure};

#[derive(Parser)]
#[command(name = "discfair", version, about = "Multi-color discrepancy and group fair division lower-bound toolkit")]
struct Cli {
    /// Worker threads for solvers and sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random instance from one of the lower-bound constructions.
    Gen(GenArgs),
    /// Evaluate a coloring or allocation against a threshold.
    Check(CheckArgs),
    /// Find a minimum-discrepancy coloring or a fairest allocation.
    Solve(SolveArgs),
    /// Exact minimum values over seeded instances for a list of sizes, as CSV.
    Scaling(scaling::ScalingArgs),
    /// Compare exact binomial tails with the reverse Chernoff bound over a grid, as CSV.
    Chernoff(chernoff::ChernoffArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    Disc,
    Ef,
    Prop,
    Propnew,
}

impl Construction {
    fn kind(self) -> ConstructionKind {
        match self {
            Construction::Disc => ConstructionKind::Disc,
            Construction::Ef => ConstructionKind::Ef,
            Construction::Prop => ConstructionKind::Prop,
            Construction::Propnew => ConstructionKind::PropNew,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NotionArg {
    Disc,
    Cd,
    Ef,
    Prop,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    construction: Construction,
    /// Sets (disc) or agents.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: usize,
    /// Agents per group, comma separated.
    #[arg(long, value_delimiter = ',')]
    group_sizes: Option<Vec<usize>>,
    /// Replaces the theorem's constant in the formula for m.
    #[arg(long)]
    constant: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    /// Set system (disc, cd) or grouped instance (cd, ef, prop), as JSON.
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    notion: NotionArg,
    #[arg(long, required_if_eq("notion", "disc"))]
    coloring: Option<PathBuf>,
    #[arg(long)]
    allocation: Option<PathBuf>,
    /// Threshold as `p/q`, an integer, or a decimal.
    #[arg(long)]
    d: String,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    notion: NotionArg,
    /// Colors (disc) or bundles (cd); ef and prop use one bundle per group.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, conflicts_with = "search")]
    exact: bool,
    /// Local search (disc only).
    #[arg(long)]
    search: bool,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: u64,
    /// Local search restarts.
    #[arg(long, default_value_t = 1000)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Witness coloring or allocation, as JSON.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot start {threads} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Check(args) => run_check(args),
        Command::Solve(args) => run_solve(args),
        Command::Scaling(args) => scaling::run(args),
        Command::Chernoff(args) => chernoff::run(args),
    };
    match outcome {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

/// `PASS` or `FAIL`, colored when stdout is a terminal and `NO_COLOR` is unset.
fn verdict(pass: bool) -> String {
    let word = if pass { "PASS" } else { "FAIL" };
    let color = std::io::stdout().is_terminal() && std::env::var_os("NO_COLOR").is_none();
    match (color, pass) {
        (false, _) => word.to_string(),
        (true, true) => format!("\x1b[32m{word}\x1b[0m"),
        (true, false) => format!("\x1b[31m{word}\x1b[0m"),
    }
}

pub fn threshold_text(d: &Threshold) -> String {
    match d.as_rational() {
        Some(r) if r.is_integer() => r.to_string(),
        Some(r) => format!("{}/{}", r.numer(), r.denom()),
        None => {
            let sq = d.square();
            if sq.is_integer() {
                format!("sqrt({})", sq.numer())
            } else {
                format!("sqrt({}/{})", sq.numer(), sq.denom())
            }
        }
    }
}

fn run_gen(args: GenArgs) -> Result<ExitCode, Failure> {
    let n = match (args.n, &args.group_sizes) {
        (Some(n), _) => n,
        (None, Some(sizes)) if args.construction != Construction::Disc => sizes.iter().sum(),
        _ => return Err(Failure::usage("--n is required")),
    };
    let params = ConstructionParams { n, k: args.k, constant_c: args.constant, group_sizes: args.group_sizes, seed: args.seed };
    let (json, m, d, warnings) = match args.construction {
        Construction::Disc => {
            let built = gen_disc_system(&params)?;
            (built.system.to_json(), built.m, built.d, Vec::new())
        }
        kind => {
            let built = match kind {
                Construction::Ef => gen_ef_instance(&params)?,
                Construction::Prop => gen_prop_instance(&params)?,
                _ => gen_propnew_instance(&params)?,
            };
            (built.instance.to_json(), built.m, built.d, built.warnings)
        }
    };
    write_file(&args.out, &json)?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    println!("construction {}", args.construction.kind().name());
    println!("m {m}");
    println!("d {}", threshold_text(&d));
    Ok(ExitCode::SUCCESS)
}

fn fair_notion(notion: NotionArg, bundles: usize) -> Notion {
    match notion {
        NotionArg::Cd | NotionArg::Disc => Notion::Cd { bundles },
        NotionArg::Ef => Notion::Ef,
        NotionArg::Prop => Notion::Prop,
    }
}

fn run_check(args: CheckArgs) -> Result<ExitCode, Failure> {
    let d = parse_fraction(&args.d)?;
    if d < Rational::from_integer(0) {
        return Err(Failure::usage(format!("threshold {} is negative", args.d)));
    }
    let pass = match args.notion {
        NotionArg::Disc => {
            let system = load_set_system(&args.instance)?;
            let path = args.coloring.as_deref().expect("clap enforces --coloring for disc");
            let coloring = Coloring::from_json(&read_file(path)?)?;
            let result = discrepancy(&coloring, &system)?;
            println!("discrepancy {}", format_fraction(&result.value));
            println!("witness set {} color {}", result.witness_set + 1, result.witness_color + 1);
            println!("threshold {}", format_fraction(&d));
            check_discrepancy_at_most(&coloring, &system, &d)?
        }
        notion => {
            let inst = load_fair_instance(&args.instance, notion)?;
            let alloc = match (&args.allocation, &args.coloring) {
                (Some(path), _) => Allocation::from_json(&read_file(path)?)?,
                (None, Some(path)) => Allocation::from_coloring(&Coloring::from_json(&read_file(path)?)?),
                (None, None) => return Err(Failure::usage("--allocation is required")),
            };
            let value = min_d(&inst, &alloc, fair_notion(notion, alloc.num_bundles()))?;
            println!("min_d {value}");
            println!("threshold {}", format_fraction(&d));
            Rational::from_integer(value as i64) <= d
        }
    };
    println!("{}", verdict(pass));
    Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run_solve(args: SolveArgs) -> Result<ExitCode, Failure> {
    if args.exact == args.search {
        return Err(Failure::usage("choose exactly one of --exact and --search"));
    }
    match args.notion {
        NotionArg::Disc => {
            let k = args.k.ok_or_else(|| Failure::usage("--k is required for disc"))?;
            let system = load_set_system(&args.instance)?;
            let (coloring, result, optimal) = if args.exact {
                let (c, r) = min_discrepancy_exact(&system, k, args.state_cap)?;
                (c, r, true)
            } else {
                let (c, r) = min_discrepancy_search(&system, k, args.budget, args.seed)?;
                // the size bound certifies optimality when it is attained
                let optimal = r.value == size_lower_bound(&system, k);
                (c, r, optimal)
            };
            write_file(&args.out, &coloring.to_json())?;
            println!("value {}", format_fraction(&result.value));
            println!("optimal {optimal}");
        }
        notion => {
            if args.search {
                return Err(Failure::usage("--search is only available for --notion disc"));
            }
            let inst = load_fair_instance(&args.instance, notion)?;
            let bundles = match notion {
                NotionArg::Cd => args.k.ok_or_else(|| Failure::usage("--k is required for cd"))?,
                _ => inst.num_groups(),
            };
            let (alloc, d) = exact_min_over_allocations(&inst, fair_notion(notion, bundles), args.state_cap)?;
            write_file(&args.out, &alloc.to_json())?;
            println!("value {d}");
            println!("optimal true");
        }
    }
    Ok(ExitCode::SUCCESS)
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Capacity { .. } => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}
