//! Brute-force oracles, written against the definitions and sharing no code
//! with the library's solvers.

#![allow(dead_code)]

use discfair::{Rational, SetSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Discrepancy of a raw assignment: `max_{i,h} | |χ^-1(h) ∩ S_i| - |S_i|/k |`.
pub fn discrepancy_of(sets: &[Vec<usize>], assignment: &[usize], k: usize) -> Rational {
    let mut worst = Rational::from_integer(0);
    for set in sets {
        for h in 0..k {
            let count = set.iter().filter(|&&e| assignment[e] == h).count() as i64;
            let dev = Rational::from_integer(count) - Rational::new(set.len() as i64, k as i64);
            let dev = if dev < Rational::from_integer(0) { -dev } else { dev };
            if dev > worst {
                worst = dev;
            }
        }
    }
    worst
}

/// Minimum discrepancy over all `k^m` assignments, with no symmetry pruning.
pub fn min_discrepancy_unpruned(sets: &[Vec<usize>], m: usize, k: usize) -> Rational {
    let mut assignment = vec![0usize; m];
    let mut best = discrepancy_of(sets, &assignment, k);
    loop {
        // odometer increment
        let mut pos = 0;
        while pos < m {
            assignment[pos] += 1;
            if assignment[pos] < k {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
        if pos == m {
            return best;
        }
        let d = discrepancy_of(sets, &assignment, k);
        if d < best {
            best = d;
        }
    }
}

pub fn random_sets(rng: &mut impl Rng, m: usize, n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|_| (0..m).filter(|_| rng.gen_bool(0.5)).collect())
        .collect()
}

pub fn random_system(rng: &mut impl Rng, m: usize, n: usize) -> (SetSystem, Vec<Vec<usize>>) {
    let sets = random_sets(rng, m, n);
    (SetSystem::from_lists(m, &sets).expect("valid lists"), sets)
}

/// Fewest items to drop from `bundle` so that its value is at most `target`.
pub fn min_removals_by_subsets(values: &[u64], bundle: &[usize], target: u64) -> usize {
    let b = bundle.len();
    let mut best = usize::MAX;
    for mask in 0u32..(1 << b) {
        let kept: u64 = (0..b).filter(|&t| mask >> t & 1 == 0).map(|t| values[bundle[t]]).sum();
        if kept <= target {
            best = best.min(mask.count_ones() as usize);
        }
    }
    best
}

/// Smallest `d` for CD: every agent and ordered pair `(h, l)`, dropping at
/// most `d` items of `A_l` brings it down to `v(A_h)`.
pub fn cd_by_subsets(rows: &[Vec<u64>], bundles: &[Vec<usize>]) -> usize {
    let mut worst = 0;
    for v in rows {
        for a in bundles {
            let target: u64 = a.iter().map(|&j| v[j]).sum();
            for b in bundles {
                worst = worst.max(min_removals_by_subsets(v, b, target));
            }
        }
    }
    worst
}

/// Smallest `d` for EF: agent in group `g` and every other bundle `h`.
pub fn ef_by_subsets(rows: &[Vec<u64>], groups: &[usize], bundles: &[Vec<usize>]) -> usize {
    let mut worst = 0;
    for (v, &g) in rows.iter().zip(groups) {
        let own: u64 = bundles[g].iter().map(|&j| v[j]).sum();
        for (h, b) in bundles.iter().enumerate() {
            if h != g {
                worst = worst.max(min_removals_by_subsets(v, b, own));
            }
        }
    }
    worst
}

/// Smallest `d` for PROP: some `d` items outside the own bundle lift its
/// value to a `1/k` share.
pub fn prop_by_subsets(rows: &[Vec<u64>], groups: &[usize], bundles: &[Vec<usize>]) -> usize {
    let k = bundles.len() as u64;
    let mut worst = 0;
    for (v, &g) in rows.iter().zip(groups) {
        let total: u64 = v.iter().sum();
        let own: u64 = bundles[g].iter().map(|&j| v[j]).sum();
        let outside: Vec<usize> = (0..v.len()).filter(|j| !bundles[g].contains(j)).collect();
        let mut best = usize::MAX;
        for mask in 0u64..(1 << outside.len()) {
            let extra: u64 = (0..outside.len()).filter(|&t| mask >> t & 1 == 1).map(|t| v[outside[t]]).sum();
            if k * (own + extra) >= total {
                best = best.min(mask.count_ones() as usize);
            }
        }
        worst = worst.max(best);
    }
    worst
}

/// Random partition of `0..m` into `k` bundles.
pub fn random_bundles(rng: &mut impl Rng, m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut bundles = vec![Vec::new(); k];
    for j in 0..m {
        bundles[rng.gen_range(0..k)].push(j);
    }
    bundles
}

/// Bundle sizes summing to `m`, each within `[lo, hi]`, starting from the
/// balanced split and moving single items between random bundles.
pub fn sizes_within(rng: &mut impl Rng, m: u64, k: u64, lo: u64, hi: u64) -> Vec<u64> {
    let mut sizes: Vec<u64> = (0..k).map(|h| m / k + u64::from(h < m % k)).collect();
    for _ in 0..4 * k {
        let (from, to) = (rng.gen_range(0..k as usize), rng.gen_range(0..k as usize));
        let step = rng.gen_range(0..=(hi - lo) / 2 + 1);
        if from != to && sizes[from] >= lo + step && sizes[to] + step <= hi {
            sizes[from] -= step;
            sizes[to] += step;
        }
    }
    sizes
}

/// Largest `x` with `x^2 <= n`.
pub fn isqrt(n: u64) -> u64 {
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// A parameterization inside the regime each chain assumes, with `d^2` as a
/// fraction. `other` differs from `own`.
pub struct ChainParams {
    pub sizes: Vec<u64>,
    pub own: usize,
    pub other: usize,
    pub d_square: (u64, u64),
}

fn pick_pair(rng: &mut impl Rng, k: u64) -> (usize, usize) {
    let own = rng.gen_range(0..k as usize);
    let other = (own + rng.gen_range(1..k as usize)) % k as usize;
    (own, other)
}

/// Envy-freeness: `d = sqrt(m/k) >= 11`, sizes within `m/k ± d`.
pub fn ef_params(rng: &mut impl Rng) -> ChainParams {
    let k = rng.gen_range(2u64..=5);
    let m = k * rng.gen_range(121u64..=600) + rng.gen_range(0..k);
    // integer bounds inside [m/k - d, m/k + d]
    let slack = isqrt(m / k);
    let lo = (m / k + 1).saturating_sub(slack);
    let hi = m / k + slack;
    let (own, other) = pick_pair(rng, k);
    ChainParams { sizes: sizes_within(rng, m, k, lo, hi), own, other, d_square: (m, k) }
}

/// Proportionality: `d = sqrt(m/k^3)`, `m >= 81k`, sizes at least `m/k - d`.
pub fn prop_params(rng: &mut impl Rng) -> ChainParams {
    let k = rng.gen_range(2u64..=5);
    let m = rng.gen_range(81 * k..=81 * k + 3000);
    let lo = (m / k + 1).saturating_sub(isqrt(m / (k * k * k)));
    let (own, other) = pick_pair(rng, k);
    ChainParams { sizes: sizes_within(rng, m, k, lo, m), own, other, d_square: (m, k * k * k) }
}

/// Proportionality with per-group counts: `k >= 4`, `d = sqrt(m/k)`, `m >= 16k^3`,
/// sizes at least `m/k - d`.
pub fn propnew_params(rng: &mut impl Rng) -> ChainParams {
    let k = rng.gen_range(4u64..=6);
    let m = rng.gen_range(16 * k * k * k..=16 * k * k * k + 3000);
    let lo = (m / k + 1).saturating_sub(isqrt(m / k));
    let (own, other) = pick_pair(rng, k);
    ChainParams { sizes: sizes_within(rng, m, k, lo, m), own, other, d_square: (m, k) }
}

/// `k` nonnegative rationals with denominator `scale` summing to `k`.
pub fn zeta_vector(rng: &mut impl Rng, k: usize, scale: u64) -> Vec<(u64, u64)> {
    let total = k as u64 * scale;
    let mut cuts: Vec<u64> = (0..k - 1).map(|_| rng.gen_range(0..=total)).collect();
    cuts.sort_unstable();
    let mut prev = 0;
    let mut out = Vec::with_capacity(k);
    for c in cuts.into_iter().chain(std::iter::once(total)) {
        out.push((c - prev, scale));
        prev = c;
    }
    out
}
