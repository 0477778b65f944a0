//! Exact minimum values over seeded instances, one CSV row per sample and a
//! median row per size.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Args;
use discfair::discrepancy::{min_discrepancy_exact, DEFAULT_STATE_CAP};
use discfair::fairness::{exact_min_over_allocations, Notion};
use discfair::generators::{
    gen_disc_system, gen_ef_instance, gen_prop_instance, gen_propnew_instance, ConstructionParams,
};
use discfair::rational::format_fraction;
use discfair::rng::mix_seed;
use discfair::{Error, Rational};
use rayon::prelude::*;

use crate::input::{write_file, Failure};
use crate::{threshold_text, Construction};

pub const HEADER: &str = "construction,n,k,sample_index,m,d_threshold,exact_min_value";

#[derive(Args)]
pub struct ScalingArgs {
    #[arg(long, value_enum, default_value = "disc")]
    construction: Construction,
    #[arg(long)]
    k: usize,
    /// Sizes to sweep, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 1.0)]
    constant: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    state_cap: u64,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Sample {
    m: usize,
    d: String,
    value: Rational,
}

fn solve_sample(args: &ScalingArgs, n: usize, index: usize) -> Result<Sample, Error> {
    let params = ConstructionParams::new(n, args.k, args.constant, mix_seed(mix_seed(args.seed, n as u64), index as u64));
    if args.construction == Construction::Disc {
        let built = gen_disc_system(&params)?;
        let (_, result) = min_discrepancy_exact(&built.system, args.k, args.state_cap)?;
        return Ok(Sample { m: built.m, d: threshold_text(&built.d), value: result.value });
    }
    let (built, notion) = match args.construction {
        Construction::Ef => (gen_ef_instance(&params)?, Notion::Ef),
        Construction::Prop => (gen_prop_instance(&params)?, Notion::Prop),
        _ => (gen_propnew_instance(&params)?, Notion::Prop),
    };
    let (_, d) = exact_min_over_allocations(&built.instance, notion, args.state_cap)?;
    Ok(Sample { m: built.m, d: threshold_text(&built.d), value: Rational::from_integer(d as i64) })
}

/// Middle value, or the mean of the two middle values for an even count.
pub fn median(values: &mut [Rational]) -> Rational {
    values.sort();
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2
    }
}

pub fn run(args: ScalingArgs) -> Result<ExitCode, Failure> {
    if args.samples == 0 {
        return Err(Failure::usage("--samples must be at least 1"));
    }
    let name = args.construction.kind().name();
    let mut csv = format!("{HEADER}\n");
    for &n in &args.n_list {
        let samples: Vec<Sample> = (0..args.samples)
            .into_par_iter()
            .map(|i| solve_sample(&args, n, i))
            .collect::<Result<_, _>>()?;
        for (i, s) in samples.iter().enumerate() {
            writeln!(csv, "{name},{n},{},{i},{},{},{}", args.k, s.m, s.d, format_fraction(&s.value)).unwrap();
        }
        let mut values: Vec<Rational> = samples.iter().map(|s| s.value).collect();
        let (m, d) = (samples[0].m, &samples[0].d);
        writeln!(csv, "{name},{n},{},median,{m},{d},{}", args.k, format_fraction(&median(&mut values))).unwrap();
    }
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_of_even_count_averages() {
        let mut v = vec![Rational::new(3, 2), Rational::from_integer(1), Rational::from_integer(2), Rational::new(1, 2)];
        assert_eq!(median(&mut v), Rational::new(5, 4));
        let mut odd = vec![Rational::from_integer(4), Rational::from_integer(1), Rational::from_integer(2)];
        assert_eq!(median(&mut odd), Rational::from_integer(2));
    }
}
