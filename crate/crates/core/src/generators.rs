//! Seeded random hard instances.
//!
//! `disc`: one set holding every element, plus `n-1` sets that contain each
//! element with probability 1/2. `ef`, `prop`, `propnew`: agents in `k` groups;
//! each group's first agent is its leader and values every item at 1, every
//! other agent values each item at 0 or 1 by a fair coin.
//!
//! Row `r` (set or agent) draws from its own stream of the seeded generator,
//! so rows can be produced in any order.

use rand::RngCore;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hp::{exp_int, Real};
use crate::model::{ElementSet, GroupedInstance, SetSystem};
use crate::rational::Threshold;
use crate::rng::substream;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstructionKind {
    Disc,
    Ef,
    Prop,
    PropNew,
}

impl ConstructionKind {
    pub fn name(self) -> &'static str {
        match self {
            ConstructionKind::Disc => "disc",
            ConstructionKind::Ef => "ef",
            ConstructionKind::Prop => "prop",
            ConstructionKind::PropNew => "propnew",
        }
    }

    /// Default constant in the denominator of `m`: `3e^48`, `2e^124`, `2e^77`, `2e^96`.
    pub fn default_constant(self) -> Real {
        let (factor, power) = match self {
            ConstructionKind::Disc => (3, 48),
            ConstructionKind::Ef => (2, 124),
            ConstructionKind::Prop => (2, 77),
            ConstructionKind::PropNew => (2, 96),
        };
        Real::from_u64(factor) * exp_int(power)
    }
}

impl std::str::FromStr for ConstructionKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disc" => Ok(ConstructionKind::Disc),
            "ef" => Ok(ConstructionKind::Ef),
            "prop" => Ok(ConstructionKind::Prop),
            "propnew" => Ok(ConstructionKind::PropNew),
            _ => Err(Error::Parameter(format!("unknown construction {s:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConstructionParams {
    /// Sets (disc) or agents (the fair-division constructions).
    pub n: usize,
    pub k: usize,
    /// Replaces the default constant in the formula for `m`; `None` keeps it.
    pub constant_c: Option<f64>,
    /// Agents per group; defaults to near-equal contiguous groups.
    pub group_sizes: Option<Vec<usize>>,
    pub seed: u64,
}

impl ConstructionParams {
    pub fn new(n: usize, k: usize, constant_c: f64, seed: u64) -> Self {
        ConstructionParams { n, k, constant_c: Some(constant_c), group_sizes: None, seed }
    }

    fn constant(&self, kind: ConstructionKind) -> Result<Real> {
        match self.constant_c {
            None => Ok(kind.default_constant()),
            Some(c) if c.is_finite() && c > 0.0 => Ok(Real::from_f64(c)),
            Some(c) => Err(Error::Parameter(format!("constant must be positive and finite, got {c}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DiscConstruction {
    pub system: SetSystem,
    pub m: usize,
    pub d: Threshold,
}

#[derive(Clone, Debug)]
pub struct FairConstruction {
    pub instance: GroupedInstance,
    pub m: usize,
    pub d: Threshold,
    pub warnings: Vec<String>,
}

/// `floor(numerator / (c · ln k))` together with the smallest numerator giving `m >= 1`.
fn derive_m(numerator: usize, c: &Real, k: usize) -> (u64, Real) {
    let denom = c * Real::from_u64(k as u64).ln();
    let m = (Real::from_u64(numerator as u64) / &denom).floor();
    let m = m.to_biguint_floor().and_then(|v| u64::try_from(v).ok()).unwrap_or(u64::MAX);
    (m, denom)
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Parameter(format!("k must be at least 2, got {k}")));
    }
    Ok(())
}

fn too_small(what: &str, bound: String) -> Error {
    Error::Parameter(format!("derived m is 0; need {what} >= {bound}"))
}

fn ceil_string(r: &Real) -> String {
    match r.ceil().to_biguint_floor() {
        Some(v) => v.to_string(),
        None => format!("{:e}", r.to_f64()),
    }
}

fn usable_m(m: u64) -> Result<usize> {
    usize::try_from(m)
        .ok()
        .filter(|&m| m <= 1 << 24)
        .ok_or_else(|| Error::Parameter(format!("derived m = {m} is too large to materialize")))
}

fn coin_row(seed: u64, index: u64, len: usize) -> Vec<bool> {
    let mut rng = substream(seed, index);
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        let word = rng.next_u64();
        for bit in 0..64.min(len - out.len()) {
            out.push(word >> bit & 1 == 1);
        }
    }
    out
}

/// Random set system: `S_0` is the whole universe, `S_1..S_{n-1}` are fair-coin subsets.
///
/// `m = floor((n-1)·k / (c·ln k))` and `d = sqrt(m/k)`.
pub fn gen_disc_system(p: &ConstructionParams) -> Result<DiscConstruction> {
    check_k(p.k)?;
    if p.n < 1 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    let c = p.constant(ConstructionKind::Disc)?;
    let (m, denom) = derive_m((p.n - 1) * p.k, &c, p.k);
    if m == 0 {
        // (n-1)k >= c ln k  <=>  n >= 1 + c ln k / k
        let bound = Real::from_u64(1) + denom / Real::from_u64(p.k as u64);
        return Err(too_small("n", ceil_string(&bound)));
    }
    let m = usable_m(m)?;
    let mut sets = Vec::with_capacity(p.n);
    let mut full = ElementSet::empty(m);
    (0..m).for_each(|e| full.insert(e));
    sets.push(full);
    let rest: Vec<ElementSet> = (1..p.n)
        .into_par_iter()
        .map(|i| {
            let mut s = ElementSet::empty(m);
            for (e, _) in coin_row(p.seed, i as u64, m).iter().enumerate().filter(|(_, &b)| b) {
                s.insert(e);
            }
            s
        })
        .collect();
    sets.extend(rest);
    let d = Threshold::sqrt_ratio(m as u64, p.k as u64)?;
    Ok(DiscConstruction { system: SetSystem::new(m, sets)?, m, d })
}

fn group_layout(p: &ConstructionParams) -> Result<Vec<usize>> {
    match &p.group_sizes {
        Some(sizes) => {
            if sizes.len() != p.k {
                return Err(Error::Parameter(format!(
                    "{} group sizes given for k = {}",
                    sizes.len(),
                    p.k
                )));
            }
            if let Some(h) = sizes.iter().position(|&s| s == 0) {
                return Err(Error::Parameter(format!("group {h} is empty")));
            }
            let total: usize = sizes.iter().sum();
            if p.n != 0 && p.n != total {
                return Err(Error::Parameter(format!(
                    "group sizes sum to {total}, but n = {}",
                    p.n
                )));
            }
            Ok(sizes.clone())
        }
        None => {
            if p.n < p.k {
                return Err(Error::Parameter(format!(
                    "n = {} agents cannot fill k = {} non-empty groups",
                    p.n, p.k
                )));
            }
            Ok((0..p.k).map(|h| p.n / p.k + usize::from(h < p.n % p.k)).collect())
        }
    }
}

fn leader_follower(sizes: &[usize], m: usize, seed: u64) -> Result<GroupedInstance> {
    let mut group_of = Vec::new();
    let mut leaders = Vec::new();
    for (h, &size) in sizes.iter().enumerate() {
        leaders.push(group_of.len());
        group_of.extend(std::iter::repeat(h).take(size));
    }
    let rows: Vec<Vec<u64>> = (0..group_of.len())
        .into_par_iter()
        .map(|i| {
            if leaders.binary_search(&i).is_ok() {
                vec![1; m]
            } else {
                coin_row(seed, i as u64, m).into_iter().map(u64::from).collect()
            }
        })
        .collect();
    GroupedInstance::new(m, group_of, leaders, rows)
}

fn gen_grouped(p: &ConstructionParams, kind: ConstructionKind) -> Result<FairConstruction> {
    check_k(p.k)?;
    let sizes = group_layout(p)?;
    let n: usize = sizes.iter().sum();
    let c = p.constant(kind)?;
    let k = p.k as u64;
    let mut warnings = Vec::new();
    let (numerator, what) = match kind {
        ConstructionKind::PropNew => {
            if let Some(h) = sizes.iter().position(|&s| s < 2) {
                return Err(Error::Parameter(format!("group {h} needs at least 2 agents")));
            }
            if p.k < 4 {
                warnings.push(format!("k = {} < 4: the lower-bound argument needs k >= 4", p.k));
            }
            let min = *sizes.iter().min().expect("k >= 2 groups");
            ((min - 1) * p.k, "the smallest group size")
        }
        _ => (n - p.k, "n"),
    };
    let (m, denom) = derive_m(numerator, &c, p.k);
    if m == 0 {
        let bound = match kind {
            // (min - 1) k >= c ln k
            ConstructionKind::PropNew => Real::from_u64(1) + denom / Real::from_u64(k),
            // n - k >= c ln k
            _ => Real::from_u64(k) + denom,
        };
        return Err(too_small(what, ceil_string(&bound)));
    }
    let m = usable_m(m)?;
    let d = match kind {
        ConstructionKind::Prop => Threshold::sqrt_ratio(m as u64, k * k * k)?,
        _ => Threshold::sqrt_ratio(m as u64, k)?,
    };
    let instance = leader_follower(&sizes, m, p.seed)?;
    Ok(FairConstruction { instance, m, d, warnings })
}

/// `m = floor((n-k) / (c·ln k))`, `d = sqrt(m/k)`.
pub fn gen_ef_instance(p: &ConstructionParams) -> Result<FairConstruction> {
    gen_grouped(p, ConstructionKind::Ef)
}

/// `m = floor((n-k) / (c·ln k))`, `d = sqrt(m/k³)`.
pub fn gen_prop_instance(p: &ConstructionParams) -> Result<FairConstruction> {
    gen_grouped(p, ConstructionKind::Prop)
}

/// `m = floor((min_h n_h - 1)·k / (c·ln k))`, `d = sqrt(m/k)`. Warns when `k < 4`.
pub fn gen_propnew_instance(p: &ConstructionParams) -> Result<FairConstruction> {
    gen_grouped(p, ConstructionKind::PropNew)
}
