//! Relaxed fairness notions up to `d` items: consensus division (CD), envy-freeness
//! (EF) and proportionality (PROP), per allocation and minimized over all allocations.
//!
//! Each minimal `d` comes from removing an agent's most valuable items first
//! (ties by ascending item index). For additive valuations this greedy choice
//! needs the fewest removals.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Allocation, GroupedInstance, SetSystem};

/// Which notion to minimize over allocations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Notion {
    /// Consensus division into `bundles` unlabeled bundles.
    Cd { bundles: usize },
    /// One bundle per group.
    Ef,
    /// One bundle per group.
    Prop,
}

/// Items in each agent's removal order: value descending, index ascending.
struct Profile<'a> {
    inst: &'a GroupedInstance,
    order: Vec<Vec<usize>>,
}

impl<'a> Profile<'a> {
    fn new(inst: &'a GroupedInstance) -> Self {
        let order = (0..inst.num_agents())
            .map(|i| {
                let v = inst.valuation(i);
                let mut items: Vec<usize> = (0..inst.num_items()).collect();
                items.sort_by(|&a, &b| v[b].cmp(&v[a]).then(a.cmp(&b)));
                items
            })
            .collect();
        Profile { inst, order }
    }

    /// Values of agent `i`'s items in `owner == bundle`, in removal order.
    fn ranked_values(&self, i: usize, owners: &[usize], bundle: usize) -> Vec<u64> {
        let v = self.inst.valuation(i);
        self.order[i].iter().filter(|&&j| owners[j] == bundle).map(|&j| v[j]).collect()
    }

    fn bundle_values(&self, i: usize, owners: &[usize], k: usize) -> Vec<u64> {
        let mut totals = vec![0u64; k];
        for (j, &v) in self.inst.valuation(i).iter().enumerate() {
            totals[owners[j]] += v;
        }
        totals
    }

    fn cd(&self, owners: &[usize], k: usize) -> usize {
        let mut worst = 0;
        for i in 0..self.inst.num_agents() {
            let totals = self.bundle_values(i, owners, k);
            let floor = *totals.iter().min().unwrap_or(&0);
            for (l, &richer) in totals.iter().enumerate() {
                // the poorest bundle is the binding target for A_l
                if richer > floor {
                    let ranked = self.ranked_values(i, owners, l);
                    worst = worst.max(removals(&ranked, richer - floor));
                }
            }
        }
        worst
    }

    fn ef(&self, owners: &[usize], k: usize) -> usize {
        let mut worst = 0;
        for i in 0..self.inst.num_agents() {
            let totals = self.bundle_values(i, owners, k);
            let own = totals[self.inst.group_of(i)];
            for (h, &other) in totals.iter().enumerate() {
                if other > own {
                    let ranked = self.ranked_values(i, owners, h);
                    worst = worst.max(removals(&ranked, other - own));
                }
            }
        }
        worst
    }

    fn prop(&self, owners: &[usize], k: usize) -> usize {
        let mut worst = 0;
        for i in 0..self.inst.num_agents() {
            let v = self.inst.valuation(i);
            let g = self.inst.group_of(i);
            let total: u64 = v.iter().sum();
            let own: u64 = (0..v.len()).filter(|&j| owners[j] == g).map(|j| v[j]).sum();
            let scaled_own = k as u64 * own;
            if scaled_own >= total {
                continue;
            }
            let outside: Vec<u64> = self.order[i]
                .iter()
                .filter(|&&j| owners[j] != g)
                .map(|&j| k as u64 * v[j])
                .collect();
            worst = worst.max(removals(&outside, total - scaled_own));
        }
        worst
    }
}

/// Fewest leading entries of `ranked` whose sum reaches `excess`.
fn removals(ranked: &[u64], excess: u64) -> usize {
    let mut acc = 0u64;
    for (c, &v) in ranked.iter().enumerate() {
        if acc >= excess {
            return c;
        }
        acc += v;
    }
    ranked.len()
}

fn check_items(inst: &GroupedInstance, alloc: &Allocation) -> Result<()> {
    if alloc.num_items() != inst.num_items() {
        return Err(Error::Dimension { expected: inst.num_items(), found: alloc.num_items() });
    }
    Ok(())
}

fn check_groups(inst: &GroupedInstance, alloc: &Allocation) -> Result<()> {
    check_items(inst, alloc)?;
    if alloc.num_bundles() != inst.num_groups() {
        return Err(Error::Dimension { expected: inst.num_groups(), found: alloc.num_bundles() });
    }
    Ok(())
}

/// Smallest `d` such that every agent, for every ordered pair of bundles `(h, l)`,
/// values `A_h` at least as much as `A_l` minus some `d` of its items.
pub fn cd_min_d(inst: &GroupedInstance, alloc: &Allocation) -> Result<usize> {
    check_items(inst, alloc)?;
    Ok(Profile::new(inst).cd(&alloc.owners(), alloc.num_bundles()))
}

/// Smallest `d` such that no agent envies another group's bundle after
/// removing `d` items from it.
pub fn ef_min_d(inst: &GroupedInstance, alloc: &Allocation) -> Result<usize> {
    check_groups(inst, alloc)?;
    Ok(Profile::new(inst).ef(&alloc.owners(), alloc.num_bundles()))
}

/// Smallest `d` such that each agent's own-group bundle plus the agent's `d` best items
/// from the other bundles reaches a `1/k` share of the agent's total value.
pub fn prop_min_d(inst: &GroupedInstance, alloc: &Allocation) -> Result<usize> {
    check_groups(inst, alloc)?;
    Ok(Profile::new(inst).prop(&alloc.owners(), alloc.num_bundles()))
}

pub fn is_cd(inst: &GroupedInstance, alloc: &Allocation, d: usize) -> Result<bool> {
    Ok(cd_min_d(inst, alloc)? <= d)
}

pub fn is_ef(inst: &GroupedInstance, alloc: &Allocation, d: usize) -> Result<bool> {
    Ok(ef_min_d(inst, alloc)? <= d)
}

pub fn is_prop(inst: &GroupedInstance, alloc: &Allocation, d: usize) -> Result<bool> {
    Ok(prop_min_d(inst, alloc)? <= d)
}

/// Minimal `d` for `notion` on one allocation.
pub fn min_d(inst: &GroupedInstance, alloc: &Allocation, notion: Notion) -> Result<usize> {
    match notion {
        Notion::Cd { .. } => cd_min_d(inst, alloc),
        Notion::Ef => ef_min_d(inst, alloc),
        Notion::Prop => prop_min_d(inst, alloc),
    }
}

type Best = Option<(usize, Vec<Vec<usize>>)>;

fn better(a: Best, b: Best) -> Best {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => Some(if y < x { y } else { x }),
    }
}

fn bundles_of(owners: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut bundles = vec![Vec::new(); k];
    for (j, &b) in owners.iter().enumerate() {
        bundles[b].push(j);
    }
    bundles
}

/// Exact minimum of the per-allocation `d` over all `k^m` ordered allocations.
///
/// Returns the lexicographically smallest optimal allocation (bundles compared
/// as sorted item lists). For CD, bundles are unlabeled and only canonical
/// assignments (bundles opened in order of first item) are evaluated; the
/// returned representative lists its bundles in ascending order.
pub fn exact_min_over_allocations(
    inst: &GroupedInstance,
    notion: Notion,
    state_cap: u64,
) -> Result<(Allocation, usize)> {
    let m = inst.num_items();
    let k = match notion {
        Notion::Cd { bundles } => bundles,
        Notion::Ef | Notion::Prop => inst.num_groups(),
    };
    if k == 0 {
        return Err(Error::Parameter("at least one bundle is required".into()));
    }
    let required = BigUint::from(k).pow(m as u32);
    if required > BigUint::from(state_cap) {
        return Err(Error::Capacity { required, cap: state_cap });
    }
    let total = required.to_u64().expect("bounded by state_cap");
    let profile = Profile::new(inst);
    let best = match notion {
        Notion::Cd { .. } => cd_canonical_search(&profile, m, k),
        Notion::Ef | Notion::Prop => {
            let eval = |owners: &[usize]| match notion {
                Notion::Ef => profile.ef(owners, k),
                _ => profile.prop(owners, k),
            };
            let chunk = 4096u64;
            (0..total.div_ceil(chunk))
                .into_par_iter()
                .map(|c| {
                    let mut best: Best = None;
                    let mut owners = vec![0usize; m];
                    for index in c * chunk..((c + 1) * chunk).min(total) {
                        // item 0 is the most significant digit, so index order is lexicographic
                        let mut rest = index;
                        for slot in owners.iter_mut().rev() {
                            *slot = (rest % k as u64) as usize;
                            rest /= k as u64;
                        }
                        let d = eval(&owners);
                        if best.as_ref().map_or(true, |(b, _)| d < *b) {
                            best = Some((d, bundles_of(&owners, k)));
                        } else if best.as_ref().is_some_and(|(b, _)| d == *b) {
                            best = better(best, Some((d, bundles_of(&owners, k))));
                        }
                    }
                    best
                })
                .reduce(|| None, better)
        }
    };
    let (d, bundles) = best.expect("at least one allocation exists");
    Ok((Allocation::new(bundles)?, d))
}

fn cd_canonical_search(profile: &Profile<'_>, m: usize, k: usize) -> Best {
    fn walk(
        profile: &Profile<'_>,
        owners: &mut Vec<usize>,
        used: usize,
        m: usize,
        k: usize,
        best: &mut Best,
    ) {
        if owners.len() == m {
            let d = profile.cd(owners, k);
            let mut bundles = bundles_of(owners, k);
            bundles.sort();
            *best = better(best.take(), Some((d, bundles)));
            return;
        }
        for b in 0..(used + 1).min(k) {
            owners.push(b);
            walk(profile, owners, used.max(b + 1), m, k, best);
            owners.pop();
        }
    }
    let mut best = None;
    walk(profile, &mut Vec::with_capacity(m), 0, m, k, &mut best);
    best
}

/// One agent per set, valuing the items of her set at 1 and all others at 0.
pub fn set_system_to_instance(system: &SetSystem) -> GroupedInstance {
    let m = system.universe_size();
    let rows = system
        .sets()
        .iter()
        .map(|s| {
            let mut row = vec![0u64; m];
            for e in s.iter() {
                row[e] = 1;
            }
            row
        })
        .collect();
    GroupedInstance::ungrouped(m, rows).expect("a set system has at least one set")
}
