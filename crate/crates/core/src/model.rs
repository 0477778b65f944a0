//! Shared domain types and their JSON encodings.
//!
//! All ids are 0-based. Every type validates its invariants on construction
//! and is immutable afterwards.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Membership bitset over `{0, …, universe_size-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ElementSet {
    words: Vec<u64>,
}

impl ElementSet {
    pub fn empty(universe_size: usize) -> Self {
        ElementSet { words: vec![0; universe_size.div_ceil(64)] }
    }

    pub fn insert(&mut self, e: usize) {
        self.words[e / 64] |= 1 << (e % 64);
    }

    pub fn contains(&self, e: usize) -> bool {
        self.words.get(e / 64).is_some_and(|w| w >> (e % 64) & 1 == 1)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * 64 + bit)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetSystem {
    universe_size: usize,
    sets: Vec<ElementSet>,
}

impl SetSystem {
    pub fn new(universe_size: usize, sets: Vec<ElementSet>) -> Result<Self> {
        if universe_size == 0 {
            return Err(Error::Validation("universe_size must be at least 1".into()));
        }
        if sets.is_empty() {
            return Err(Error::Validation("a set system needs at least one set".into()));
        }
        for (i, s) in sets.iter().enumerate() {
            if let Some(bad) = s.iter().find(|&e| e >= universe_size) {
                return Err(Error::Validation(format!(
                    "set {i} contains element {bad}, universe_size is {universe_size}"
                )));
            }
        }
        Ok(SetSystem { universe_size, sets })
    }

    pub fn from_lists(universe_size: usize, lists: &[Vec<usize>]) -> Result<Self> {
        let mut sets = Vec::with_capacity(lists.len());
        for (i, list) in lists.iter().enumerate() {
            let mut set = ElementSet::empty(universe_size);
            for &e in list {
                if e >= universe_size {
                    return Err(Error::Validation(format!(
                        "set {i} contains element {e}, universe_size is {universe_size}"
                    )));
                }
                if set.contains(e) {
                    return Err(Error::Validation(format!("set {i} lists element {e} twice")));
                }
                set.insert(e);
            }
            sets.push(set);
        }
        SetSystem::new(universe_size, sets)
    }

    pub fn universe_size(&self) -> usize {
        self.universe_size
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[ElementSet] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> &ElementSet {
        &self.sets[i]
    }

    /// The same system with one more set appended.
    pub fn with_set(&self, set: ElementSet) -> Result<Self> {
        let mut sets = self.sets.clone();
        sets.push(set);
        SetSystem::new(self.universe_size, sets)
    }

    /// For every element, the indices of the sets containing it.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.universe_size];
        for (i, s) in self.sets.iter().enumerate() {
            for e in s.iter() {
                inc[e].push(i);
            }
        }
        inc
    }

    pub fn to_json(&self) -> String {
        let raw = RawSetSystem {
            universe_size: self.universe_size,
            sets: self.sets.iter().map(ElementSet::to_vec).collect(),
        };
        serde_json::to_string(&raw).expect("set system serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let raw: RawSetSystem = decode(bytes)?;
        SetSystem::from_lists(raw.universe_size, &raw.sets)
    }
}

/// Assignment of one of `k` colors to every element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coloring {
    k: usize,
    assignment: Vec<usize>,
}

impl Coloring {
    pub fn new(k: usize, assignment: Vec<usize>) -> Result<Self> {
        if k < 2 {
            return Err(Error::Validation(format!("a coloring needs k >= 2 colors, got {k}")));
        }
        if let Some((j, c)) = assignment.iter().enumerate().find(|(_, &c)| c >= k) {
            return Err(Error::Validation(format!("element {j} has color {c}, k is {k}")));
        }
        Ok(Coloring { k, assignment })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn color(&self, element: usize) -> usize {
        self.assignment[element]
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// Relabels colors so they appear in order of first use.
    pub fn canonical(&self) -> Coloring {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        let assignment = self
            .assignment
            .iter()
            .map(|&c| {
                if map[c] == usize::MAX {
                    map[c] = next;
                    next += 1;
                }
                map[c]
            })
            .collect();
        Coloring { k: self.k, assignment }
    }

    pub fn permuted(&self, perm: &[usize]) -> Result<Coloring> {
        Coloring::new(self.k, self.assignment.iter().map(|&c| perm[c]).collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&RawColoring { k: self.k, assignment: self.assignment.clone() })
            .expect("coloring serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let raw: RawColoring = decode(bytes)?;
        Coloring::new(raw.k, raw.assignment)
    }
}

/// Agents in groups with additive nonnegative integer valuations over items.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupedInstance {
    num_items: usize,
    group_of: Vec<usize>,
    leaders: Vec<usize>,
    valuations: Vec<Vec<u64>>,
    num_groups: usize,
}

impl GroupedInstance {
    pub fn new(
        num_items: usize,
        group_of: Vec<usize>,
        mut leaders: Vec<usize>,
        valuations: Vec<Vec<u64>>,
    ) -> Result<Self> {
        let n = group_of.len();
        if n == 0 {
            return Err(Error::Validation("an instance needs at least one agent".into()));
        }
        if valuations.len() != n {
            return Err(Error::Validation(format!(
                "{} valuation rows for {n} agents",
                valuations.len()
            )));
        }
        if let Some(i) = valuations.iter().position(|row| row.len() != num_items) {
            return Err(Error::Validation(format!(
                "agent {i} has {} values, expected {num_items}",
                valuations[i].len()
            )));
        }
        let num_groups = group_of.iter().max().map_or(0, |g| g + 1);
        let mut seen = vec![false; num_groups];
        for &g in &group_of {
            seen[g] = true;
        }
        if let Some(g) = seen.iter().position(|s| !s) {
            return Err(Error::Validation(format!("group {g} has no agents")));
        }
        leaders.sort_unstable();
        let mut led = vec![false; num_groups];
        for (pos, &a) in leaders.iter().enumerate() {
            if a >= n {
                return Err(Error::Validation(format!("leader {a} is not an agent")));
            }
            if pos > 0 && leaders[pos - 1] == a {
                return Err(Error::Validation(format!("leader {a} listed twice")));
            }
            let g = group_of[a];
            if led[g] {
                return Err(Error::Validation(format!("group {g} has more than one leader")));
            }
            led[g] = true;
            if let Some(j) = valuations[a].iter().position(|&v| v != 1) {
                return Err(Error::Validation(format!(
                    "leader {a} values item {j} at {}, leaders value every item at 1",
                    valuations[a][j]
                )));
            }
        }
        Ok(GroupedInstance { num_items, group_of, leaders, valuations, num_groups })
    }

    /// One agent per row, all in a single group, no leaders.
    pub fn ungrouped(num_items: usize, valuations: Vec<Vec<u64>>) -> Result<Self> {
        let n = valuations.len();
        GroupedInstance::new(num_items, vec![0; n], Vec::new(), valuations)
    }

    pub fn num_items(&self) -> usize {
        self.num_items
    }

    pub fn num_agents(&self) -> usize {
        self.group_of.len()
    }

    pub fn num_groups(&self) -> usize {
        self.num_groups
    }

    pub fn group_of(&self, agent: usize) -> usize {
        self.group_of[agent]
    }

    pub fn groups(&self) -> &[usize] {
        &self.group_of
    }

    pub fn leaders(&self) -> &[usize] {
        &self.leaders
    }

    pub fn is_leader(&self, agent: usize) -> bool {
        self.leaders.binary_search(&agent).is_ok()
    }

    pub fn valuation(&self, agent: usize) -> &[u64] {
        &self.valuations[agent]
    }

    pub fn valuations(&self) -> &[Vec<u64>] {
        &self.valuations
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_groups];
        for &g in &self.group_of {
            sizes[g] += 1;
        }
        sizes
    }

    pub fn to_json(&self) -> String {
        let raw = RawGroupedInstance {
            num_items: self.num_items,
            groups: self.group_of.clone(),
            leaders: self.leaders.clone(),
            valuations: self.valuations.clone(),
        };
        serde_json::to_string(&raw).expect("instance serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let raw: RawGroupedInstance = decode(bytes)?;
        GroupedInstance::new(raw.num_items, raw.groups, raw.leaders, raw.valuations)
    }
}

/// Ordered partition of the items `{0, …, m-1}` into `k` bundles (empty bundles allowed).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Allocation {
    bundles: Vec<Vec<usize>>,
}

impl Allocation {
    pub fn new(mut bundles: Vec<Vec<usize>>) -> Result<Self> {
        if bundles.is_empty() {
            return Err(Error::Validation("an allocation needs at least one bundle".into()));
        }
        let total: usize = bundles.iter().map(Vec::len).sum();
        let mut owner = vec![usize::MAX; total];
        for (b, bundle) in bundles.iter_mut().enumerate() {
            bundle.sort_unstable();
            for &item in bundle.iter() {
                if item >= total {
                    return Err(Error::Validation(format!(
                        "bundle {b} holds item {item}, but only {total} items are allocated"
                    )));
                }
                if owner[item] != usize::MAX {
                    return Err(Error::Validation(format!(
                        "item {item} is in bundles {} and {b}",
                        owner[item]
                    )));
                }
                owner[item] = b;
            }
        }
        Ok(Allocation { bundles })
    }

    /// Bundle `assignment[j]` receives item `j`.
    pub fn from_assignment(k: usize, assignment: &[usize]) -> Result<Self> {
        let mut bundles = vec![Vec::new(); k];
        for (item, &b) in assignment.iter().enumerate() {
            if b >= k {
                return Err(Error::Validation(format!("item {item} assigned to bundle {b} of {k}")));
            }
            bundles[b].push(item);
        }
        Ok(Allocation { bundles })
    }

    pub fn from_coloring(coloring: &Coloring) -> Self {
        Allocation::from_assignment(coloring.k(), coloring.assignment())
            .expect("coloring entries are below k")
    }

    pub fn num_bundles(&self) -> usize {
        self.bundles.len()
    }

    pub fn num_items(&self) -> usize {
        self.bundles.iter().map(Vec::len).sum()
    }

    pub fn bundles(&self) -> &[Vec<usize>] {
        &self.bundles
    }

    pub fn bundle(&self, b: usize) -> &[usize] {
        &self.bundles[b]
    }

    /// `owner[j]` is the bundle holding item `j`.
    pub fn owners(&self) -> Vec<usize> {
        let mut owner = vec![0; self.num_items()];
        for (b, bundle) in self.bundles.iter().enumerate() {
            for &j in bundle {
                owner[j] = b;
            }
        }
        owner
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&RawAllocation { bundles: self.bundles.clone() })
            .expect("allocation serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let raw: RawAllocation = decode(bytes)?;
        Allocation::new(raw.bundles)
    }
}

/// What kind of comparison a [`BoundReport`] records.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    /// An exact probability (from binomial tails) against a bound.
    ExactTail,
    /// Two closed-form expressions compared in extended-precision log space.
    Analytic,
    /// An inequality between exact rationals (or exact surds), zero tolerance.
    Algebra,
    /// Two evaluations of the same quantity; holds within a relative tolerance.
    Identity,
}

/// One evaluated link `lhs <= rhs` of an inequality chain, both sides as natural logs.
///
/// Links stated as `A >= B` are stored with `lhs = B`, `rhs = A`. `holds` comes
/// from the extended-precision or exact comparison, so it stays correct when the
/// two sides agree to more digits than an `f64` carries. Identity links compare
/// `|lhs - rhs|` against a relative tolerance instead.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub label: String,
    pub kind: LinkKind,
    pub lhs_log: f64,
    pub rhs_log: f64,
    pub holds: bool,
    pub preconditions_met: bool,
    /// Set when the link was not evaluated (e.g. binomial support too large).
    pub skipped: bool,
}

#[derive(Serialize, Deserialize)]
struct RawSetSystem {
    universe_size: usize,
    sets: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct RawColoring {
    k: usize,
    assignment: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct RawGroupedInstance {
    num_items: usize,
    groups: Vec<usize>,
    leaders: Vec<usize>,
    valuations: Vec<Vec<u64>>,
}

#[derive(Serialize, Deserialize)]
struct RawAllocation {
    bundles: Vec<Vec<usize>>,
}

fn decode<'a, T: Deserialize<'a>>(bytes: &'a [u8]) -> Result<T> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        offset: byte_offset(bytes, e.line(), e.column()),
        message: e.to_string(),
    })
}

/// serde_json reports 1-based line and column; convert to a byte offset.
fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    let line_start: usize = bytes
        .split(|&b| b == b'\n')
        .take(line.saturating_sub(1))
        .map(|l| l.len() + 1)
        .sum();
    (line_start + column.saturating_sub(1)).min(bytes.len())
}
