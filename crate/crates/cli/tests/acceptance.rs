//! Acceptance gate: one line per criterion, `PASS` or `FAIL`, with the
//! measured numbers. Runs without the libtest harness so the lines always
//! reach the terminal.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use discfair::discrepancy::{min_discrepancy_exact, DEFAULT_STATE_CAP};
use discfair::fairness::{cd_min_d, ef_min_d, exact_min_over_allocations, prop_min_d, set_system_to_instance, Notion};
use discfair::probability::chernoff::chernoff_grid;
use discfair::probability::events::disc_event_holds;
use discfair::probability::{
    disc_chain_report, ef_event_chain_report, jensen_link, lemma2_check, prop_event_chain_report,
    propnew_event_chain_report, ChainOptions, DiscChainInput, FairChainInput, Side,
};
use discfair::{Allocation, BoundReport, Coloring, GroupedInstance, LinkKind, Rational, SetSystem, Threshold};
use num_bigint::BigUint;
use num_rational::BigRational;
use rand::Rng;

const BIN: &str = env!("CARGO_BIN_EXE_discfair");

/// Wall-clock limits per criterion.
const ORACLE_BUDGET: Duration = Duration::from_secs(5 * 60);
const CHERNOFF_BUDGET: Duration = Duration::from_secs(60);
const SCALING_BUDGET: Duration = Duration::from_secs(10 * 60);
/// Relative log error allowed on identity links.
const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Criteria whose failure is analysed in the decisions notes and does not fail
/// the run. They still print `FAIL`.
const KNOWN_FAILURES: &[usize] = &[8];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn main() {
    let criteria: [(usize, &str, fn() -> Outcome); 9] = [
        (1, "discrepancy oracle equivalence", oracle_discrepancy),
        (2, "fairness oracle equivalence", oracle_fairness),
        (3, "reverse Chernoff grid", chernoff_sweep),
        (4, "two-sided events force discrepancy above d", two_sided_witnesses),
        (5, "CD/DISC sandwich", sandwich),
        (6, "chain reports", chain_reports),
        (7, "Jensen aggregation", jensen),
        (8, "scaling experiment", scaling),
        (9, "determinism", determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        let started = Instant::now();
        let result = run();
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {id} {verdict}: {name}; {} ({:.1}s)", result.detail, started.elapsed().as_secs_f64());
        if result.pass == KNOWN_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}

fn oracle_discrepancy() -> Outcome {
    let started = Instant::now();
    let mut rng = support::rng(101);
    let mut mismatches = 0;
    for case in 0..200 {
        let m = rng.gen_range(1..=10);
        let n = rng.gen_range(1..=6);
        let k = 2 + case % 2;
        let (system, sets) = support::random_system(&mut rng, m, n);
        let exact = min_discrepancy_exact(&system, k, DEFAULT_STATE_CAP).expect("small instance").1.value;
        if exact != support::min_discrepancy_unpruned(&sets, m, k) {
            mismatches += 1;
        }
    }
    let elapsed = started.elapsed();
    outcome(
        mismatches == 0 && elapsed < ORACLE_BUDGET,
        format!("200 systems, {mismatches} mismatches, {:.1}s of {}s", elapsed.as_secs_f64(), ORACLE_BUDGET.as_secs()),
    )
}

fn oracle_fairness() -> Outcome {
    let mut rng = support::rng(202);
    let mut mismatches = 0;
    let mut cases = 0;
    while cases < 500 {
        let k = rng.gen_range(2..=4);
        let m = rng.gen_range(1..=14);
        let bundles = support::random_bundles(&mut rng, m, k);
        if bundles.iter().any(|b| b.len() > 8) {
            continue;
        }
        let n = k + rng.gen_range(0..=4);
        let groups: Vec<usize> = (0..n).map(|i| if i < k { i } else { rng.gen_range(0..k) }).collect();
        let rows: Vec<Vec<u64>> = (0..n).map(|_| (0..m).map(|_| rng.gen_range(0..=1)).collect()).collect();
        let inst = GroupedInstance::new(m, groups.clone(), Vec::new(), rows.clone()).unwrap();
        let alloc = Allocation::new(bundles.clone()).unwrap();
        let agree = cd_min_d(&inst, &alloc).unwrap() == support::cd_by_subsets(&rows, &bundles)
            && ef_min_d(&inst, &alloc).unwrap() == support::ef_by_subsets(&rows, &groups, &bundles)
            && prop_min_d(&inst, &alloc).unwrap() == support::prop_by_subsets(&rows, &groups, &bundles);
        if !agree {
            mismatches += 1;
        }
        cases += 1;
    }
    outcome(mismatches == 0, format!("500 cases x 3 notions, {mismatches} mismatches"))
}

fn chernoff_sweep() -> Outcome {
    let started = Instant::now();
    let points = chernoff_grid(24, 400, &BigRational::new(1.into(), 20.into())).unwrap();
    let admissible: Vec<_> = points.iter().filter_map(|p| p.holds).collect();
    let failed = admissible.iter().filter(|h| !**h).count();
    let elapsed = started.elapsed();
    outcome(
        failed == 0 && !admissible.is_empty() && elapsed < CHERNOFF_BUDGET,
        format!(
            "{} admissible points of {}, {failed} below the bound, {:.1}s of {}s",
            admissible.len(),
            points.len(),
            elapsed.as_secs_f64(),
            CHERNOFF_BUDGET.as_secs()
        ),
    )
}

fn two_sided_witnesses() -> Outcome {
    let (m, k) = (20usize, 4usize);
    let d = Threshold::sqrt_ratio(1, 1).unwrap();
    let mut rng = support::rng(404);
    let (mut witnesses, mut exceptions) = (0, 0);
    while witnesses < 1000 {
        let sets = support::random_sets(&mut rng, m, 4);
        let system = SetSystem::from_lists(m, &sets).unwrap();
        let coloring = Coloring::new(k, (0..m).map(|_| rng.gen_range(0..k)).collect()).unwrap();
        for i in 0..sets.len() {
            for h1 in 0..k / 2 {
                for h2 in k / 2..k {
                    if witnesses < 1000
                        && disc_event_holds(&coloring, &system, i, h1, &d, Side::Low)
                        && disc_event_holds(&coloring, &system, i, h2, &d, Side::High)
                    {
                        witnesses += 1;
                        if !lemma2_check(&coloring, &system, k, &d, i, h1, h2).unwrap_or(false) {
                            exceptions += 1;
                        }
                    }
                }
            }
        }
    }
    outcome(exceptions == 0, format!("{witnesses} witnesses at m=20, k=4, d=1; {exceptions} exceptions"))
}

fn sandwich() -> Outcome {
    let mut rng = support::rng(505);
    let mut violations = 0;
    for case in 0..100 {
        let m = rng.gen_range(1..=8);
        let k = 2 + case % 2;
        let n = rng.gen_range(1..=5);
        let (system, _) = support::random_system(&mut rng, m, n);
        let disc = min_discrepancy_exact(&system, k, DEFAULT_STATE_CAP).unwrap().1.value;
        let inst = set_system_to_instance(&system);
        let (_, cd) = exact_min_over_allocations(&inst, Notion::Cd { bundles: k }, 1 << 24).unwrap();
        let cd = Rational::from_integer(cd as i64);
        if !(disc <= cd && cd <= disc * 2) {
            violations += 1;
        }
    }
    outcome(violations == 0, format!("100 systems, {violations} violations of d* <= d_cd <= 2d*"))
}

/// Counts algebra links that fail and identity links outside tolerance.
#[derive(Default)]
struct LinkTally {
    algebra: usize,
    algebra_failed: usize,
    identity: usize,
    identity_failed: usize,
}

impl LinkTally {
    fn add(&mut self, links: &[BoundReport]) {
        for l in links {
            match l.kind {
                LinkKind::Algebra => {
                    self.algebra += 1;
                    self.algebra_failed += usize::from(!l.holds);
                }
                LinkKind::Identity => {
                    self.identity += 1;
                    let rel = (l.lhs_log - l.rhs_log).abs() / l.lhs_log.abs().max(l.rhs_log.abs()).max(1.0);
                    self.identity_failed += usize::from(!l.holds || rel > IDENTITY_TOLERANCE);
                }
                _ => {}
            }
        }
    }
}

fn fair_input(params: support::ChainParams) -> FairChainInput {
    FairChainInput {
        // a population far above every theorem's requirement
        agents: BigUint::from(10u32).pow(200),
        bundle_sizes: params.sizes,
        own: params.own,
        other: params.other,
        d: Threshold::sqrt_ratio(params.d_square.0, params.d_square.1).unwrap(),
    }
}

fn chain_reports() -> Outcome {
    let options = ChainOptions { exact_cap: 0 };
    let mut rng = support::rng(606);
    let mut tally = LinkTally::default();
    let mut errors = 0;
    for _ in 0..1000 {
        let k = rng.gen_range(2u64..=20);
        let m = k * rng.gen_range(49u64..=2000) + rng.gen_range(0..k);
        let n = rng.gen_range(2u64..=1_000_000);
        let input = DiscChainInput::new(n.into(), k.into(), m.into()).unwrap();
        tally.add(&disc_chain_report(&input, &options));
        for report in [
            ef_event_chain_report(&fair_input(support::ef_params(&mut rng)), &options),
            prop_event_chain_report(&fair_input(support::prop_params(&mut rng)), &options),
            propnew_event_chain_report(&fair_input(support::propnew_params(&mut rng)), &options),
        ] {
            match report {
                Ok(links) => tally.add(&links),
                Err(_) => errors += 1,
            }
        }
    }
    let theorem = disc_chain_report(&DiscChainInput::theorem_scale(), &ChainOptions::default());
    let theorem_analytic: Vec<&BoundReport> = theorem.iter().filter(|l| l.kind == LinkKind::Analytic).collect();
    let theorem_ok = theorem.iter().all(|l| l.skipped || (l.holds && l.preconditions_met));
    let pass = errors == 0 && tally.algebra_failed == 0 && tally.identity_failed == 0 && theorem_ok;
    outcome(
        pass,
        format!(
            "4000 parameterizations, {errors} rejected; algebra {}/{} hold; identity {}/{} within {IDENTITY_TOLERANCE:e}; \
             theorem scale: {} links ({} analytic), all hold = {theorem_ok}",
            tally.algebra - tally.algebra_failed,
            tally.algebra,
            tally.identity - tally.identity_failed,
            tally.identity,
            theorem.len(),
            theorem_analytic.len(),
        ),
    )
}

fn jensen() -> Outcome {
    let c = BigRational::from_integer(6.into());
    let mut rng = support::rng(707);
    let mut vectors: Vec<Vec<BigRational>> = Vec::new();
    for k in 4..=8usize {
        let mut corner = vec![BigRational::from_integer(0.into()); k];
        corner[0] = BigRational::from_integer(k.into());
        vectors.push(corner);
        vectors.push(vec![BigRational::from_integer(1.into()); k]);
    }
    for _ in 0..1000 {
        let k = rng.gen_range(4..=8);
        vectors.push(
            support::zeta_vector(&mut rng, k, 1 << 20)
                .into_iter()
                .map(|(p, q)| BigRational::new(p.into(), q.into()))
                .collect(),
        );
    }
    let failed = vectors.iter().filter(|z| !jensen_link(&c, z).map_or(false, |l| l.holds)).count();
    outcome(failed == 0, format!("c = 6, {} vectors including 10 boundary vectors, {failed} failures", vectors.len()))
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("NO_COLOR", "1").output().expect("binary runs")
}

/// Per-size median values from a scaling CSV.
fn medians(csv: &str) -> Vec<(u64, Rational)> {
    csv.lines()
        .filter(|l| l.split(',').nth(3) == Some("median"))
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            (cols[1].parse().unwrap(), discfair::rational::parse_fraction(cols[6]).unwrap())
        })
        .collect()
}

fn scaling() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scaling.csv");
    let started = Instant::now();
    let base = ["scaling", "--construction", "disc", "--k", "2", "--samples", "20", "--constant", "1", "--seed", "0"];
    let full = run(&[&base[..], &["--n-list", "4,8,16,32", "--out", out.to_str().unwrap()]].concat());
    let elapsed = started.elapsed();
    if full.status.success() {
        let found = medians(&std::fs::read_to_string(&out).unwrap());
        let values: Vec<Rational> = found.iter().map(|(_, v)| *v).collect();
        let monotone = values.windows(2).all(|w| w[0] <= w[1]);
        let strict = values.len() == 4 && values[3] > values[0];
        let listing: Vec<String> = found.iter().map(|(n, v)| format!("n={n}: {v}")).collect();
        return outcome(
            monotone && strict && elapsed < SCALING_BUDGET,
            format!(
                "medians {}; non-decreasing = {monotone}, n=32 above n=4 = {strict}; {:.1}s of {}s",
                listing.join(", "),
                elapsed.as_secs_f64(),
                SCALING_BUDGET.as_secs()
            ),
        );
    }
    // report what the exact solver could settle
    let partial = run(&[&base[..], &["--n-list", "4,8,16", "--out", out.to_str().unwrap()]].concat());
    let settled = if partial.status.success() {
        let found = medians(&std::fs::read_to_string(&out).unwrap());
        found.iter().map(|(n, v)| format!("n={n}: {v}")).collect::<Vec<_>>().join(", ")
    } else {
        "none".into()
    };
    let reason = String::from_utf8_lossy(&full.stderr).trim().to_string();
    outcome(
        false,
        format!("exit {:?} at n=32 ({reason}); medians for smaller n: {settled}", full.status.code()),
    )
}

fn same_bytes(a: &Path, b: &Path) -> bool {
    std::fs::read(a).ok() == std::fs::read(b).ok()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let instance = p("disc.json");
    let commands: Vec<(String, Vec<String>)> = vec![
        ("gen disc", vec!["gen", "--construction", "disc", "--n", "12", "--k", "3", "--constant", "1", "--seed", "5"]),
        ("gen ef", vec!["gen", "--construction", "ef", "--n", "14", "--k", "2", "--constant", "1", "--seed", "5"]),
        ("gen prop", vec!["gen", "--construction", "prop", "--n", "14", "--k", "2", "--constant", "1", "--seed", "5"]),
        (
            "gen propnew",
            vec!["gen", "--construction", "propnew", "--group-sizes", "5,5,5,5", "--k", "4", "--constant", "1", "--seed", "5"],
        ),
        ("solve search", vec!["solve", "--instance", &instance, "--notion", "disc", "--k", "3", "--search", "--seed", "9"]),
        ("solve exact", vec!["solve", "--instance", &instance, "--notion", "disc", "--k", "3", "--exact"]),
        (
            "scaling",
            vec!["scaling", "--k", "2", "--n-list", "4,8", "--samples", "5", "--constant", "1", "--seed", "3"],
        ),
        ("chernoff", vec!["chernoff", "--t-max", "60"]),
    ]
    .into_iter()
    .map(|(name, args)| (name.to_string(), args.into_iter().map(String::from).collect()))
    .collect();
    // the solvers read the instance written by the first command
    let setup = run(&["gen", "--construction", "disc", "--n", "12", "--k", "3", "--constant", "1", "--seed", "5", "--out", &instance]);
    if !setup.status.success() {
        return outcome(false, "could not generate the instance for the solver runs");
    }
    let mut differing = Vec::new();
    for (index, (name, args)) in commands.iter().enumerate() {
        let flag = if name == "chernoff" { "--report" } else { "--out" };
        let (first, second) = (p(&format!("{index}a.out")), p(&format!("{index}b.out")));
        let outputs: Vec<Output> = [&first, &second]
            .iter()
            .map(|target| {
                let mut full: Vec<&str> = args.iter().map(String::as_str).collect();
                full.extend([flag, target.as_str()]);
                run(&full)
            })
            .collect();
        let ok = outputs[0].status.success()
            && outputs[0].status == outputs[1].status
            && outputs[0].stdout == outputs[1].stdout
            && same_bytes(Path::new(&first), Path::new(&second))
            && std::fs::metadata(&first).is_ok();
        if !ok {
            differing.push(name.clone());
        }
    }
    outcome(
        differing.is_empty(),
        format!("{} seeded commands run twice, differing: {differing:?}", commands.len()),
    )
}
