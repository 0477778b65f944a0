//! Grid sweep of exact binomial tails against `exp(-9ε²t/2)`.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Args;
use discfair::probability::chernoff::{chernoff_grid, eps_decimal};
use discfair::rational::{parse_fraction, to_big};

use crate::input::{write_file, Failure};

pub const HEADER: &str = "t,eps,exact_tail_log,bound_log,holds";

#[derive(Args)]
pub struct ChernoffArgs {
    #[arg(long, default_value_t = 24)]
    t_min: u64,
    #[arg(long, default_value_t = 400)]
    t_max: u64,
    /// Spacing of the ε grid, as a decimal or `p/q`.
    #[arg(long, default_value = "0.05")]
    eps_step: String,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    report: Option<PathBuf>,
}

pub fn run(args: ChernoffArgs) -> Result<ExitCode, Failure> {
    if args.t_min > args.t_max {
        return Err(Failure::usage(format!("--t-min {} exceeds --t-max {}", args.t_min, args.t_max)));
    }
    let step = to_big(&parse_fraction(&args.eps_step)?);
    let points = chernoff_grid(args.t_min, args.t_max, &step)?;
    let mut csv = format!("{HEADER}\n");
    let (mut held, mut failed, mut skipped) = (0usize, 0usize, 0usize);
    for p in &points {
        let eps = eps_decimal(&p.eps);
        match (p.exact_tail_log, p.bound_log, p.holds) {
            (Some(tail), Some(bound), Some(holds)) => {
                if holds {
                    held += 1;
                } else {
                    failed += 1;
                }
                writeln!(csv, "{},{eps},{tail},{bound},{holds}", p.t).unwrap();
            }
            _ => {
                skipped += 1;
                writeln!(csv, "{},{eps},,,skipped", p.t).unwrap();
            }
        }
    }
    match &args.report {
        Some(path) => {
            write_file(path, &csv)?;
            println!("points {} hold {held} fail {failed} skipped {skipped}", points.len());
        }
        None => print!("{csv}"),
    }
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
