//! Random events of the constructions: exact probabilities, the two-color
//! witness condition for high discrepancy, and Monte Carlo estimates.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::RngCore;
use rayon::prelude::*;

use crate::discrepancy::discrepancy_exceeds;
use crate::error::{Error, Result};
use crate::model::{Coloring, SetSystem};
use crate::rational::{big_int, big_ratio, Threshold};
use crate::rng::substream;

use super::binomial::{BinomialRow, Dyadic};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Count strictly below `m/(2k) - d`.
    Low,
    /// Count strictly above `m/(2k) + d`.
    High,
}

/// Exact probability that `X ~ B(class_size, 1/2)` falls strictly below
/// `center - d` (low) or strictly above `center + d` (high).
pub fn event_prob_around(class_size: u64, center: &BigRational, d: &Threshold, side: Side) -> Dyadic {
    let row = BinomialRow::new(class_size);
    match side {
        Side::Low => row.le(&d.affine(center.clone(), -BigRational::one()).largest_int_below()),
        Side::High => row.ge(&d.affine(center.clone(), BigRational::one()).smallest_int_above()),
    }
}

/// Probability of the per-set color-class event for a class of `color_class_size`
/// elements, with threshold `m/(2k) ∓ d`.
pub fn event_prob_disc(color_class_size: u64, m: u64, k: u64, d: &Threshold, side: Side) -> BigRational {
    event_prob_around(color_class_size, &big_ratio(m, 2 * k), d, side).to_rational()
}

/// Whether the per-set event holds for a concrete coloring and set.
pub fn disc_event_holds(
    coloring: &Coloring,
    system: &SetSystem,
    set: usize,
    color: usize,
    d: &Threshold,
    side: Side,
) -> bool {
    let count = system.set(set).iter().filter(|&e| coloring.color(e) == color).count();
    let center = big_ratio(system.universe_size() as u64, 2 * coloring.k() as u64);
    let count = big_int(count as u64);
    match side {
        Side::Low => d.affine(center, -BigRational::one()).cmp_rational(&count) == Ordering::Greater,
        Side::High => d.affine(center, BigRational::one()).cmp_rational(&count) == Ordering::Less,
    }
}

/// For a set `S_i` on which color `h1` (first half, `h1 < ⌊k/2⌋`) is below
/// `m/(2k) - d` and color `h2` (second half) is above `m/(2k) + d`, returns
/// whether the coloring's discrepancy exceeds `d`. That is always the case,
/// which is what this function exists to test.
pub fn lemma2_check(
    coloring: &Coloring,
    system: &SetSystem,
    k: usize,
    d: &Threshold,
    set: usize,
    h1: usize,
    h2: usize,
) -> Result<bool> {
    if coloring.k() != k {
        return Err(Error::Precondition(format!("coloring uses {} colors, not {k}", coloring.k())));
    }
    if coloring.len() != system.universe_size() {
        return Err(Error::Dimension { expected: system.universe_size(), found: coloring.len() });
    }
    if set >= system.num_sets() {
        return Err(Error::Precondition(format!("set {set} does not exist")));
    }
    let split = k / 2;
    if h1 >= split || h2 < split || h2 >= k {
        return Err(Error::Precondition(format!(
            "need color {h1} < {split} <= color {h2} < {k}"
        )));
    }
    if !disc_event_holds(coloring, system, set, h1, d, Side::Low) {
        return Err(Error::Precondition(format!("color {h1} is not below m/(2k) - d on set {set}")));
    }
    if !disc_event_holds(coloring, system, set, h2, d, Side::High) {
        return Err(Error::Precondition(format!("color {h2} is not above m/(2k) + d on set {set}")));
    }
    discrepancy_exceeds(coloring, system, d)
}

/// Events for one follower of the fair-division constructions under a fixed
/// allocation, given by its bundle sizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FairEvent {
    /// The fairness condition itself holds for the agent.
    Fair,
    /// Low value for the own bundle.
    First,
    /// High value for the other bundle(s).
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FairConstructionKind {
    /// Own bundle `g`, comparison bundle `other`; `d = sqrt(m/k)`.
    Ef { other: usize },
    /// `d = sqrt(m/k³)`.
    Prop,
    /// `d = sqrt(m/k)`, own-bundle threshold from `m/(2k)`.
    PropNew,
}

/// Exact probabilities of the follower events. Bundle values are independent
/// binomials with one fair coin per item.
#[derive(Clone, Debug)]
pub struct FairEventModel {
    pub kind: FairConstructionKind,
    pub sizes: Vec<u64>,
    pub own: usize,
    pub d: Threshold,
}

impl FairEventModel {
    pub fn new(kind: FairConstructionKind, sizes: Vec<u64>, own: usize, d: Threshold) -> Result<Self> {
        if sizes.len() < 2 {
            return Err(Error::Parameter("need at least two bundles".into()));
        }
        if own >= sizes.len() {
            return Err(Error::Parameter(format!("own bundle {own} of {}", sizes.len())));
        }
        if let FairConstructionKind::Ef { other } = kind {
            if other >= sizes.len() || other == own {
                return Err(Error::Parameter(format!("comparison bundle {other} must differ from {own}")));
            }
        }
        Ok(FairEventModel { kind, sizes, own, d })
    }

    pub fn m(&self) -> u64 {
        self.sizes.iter().sum()
    }

    pub fn k(&self) -> u64 {
        self.sizes.len() as u64
    }

    fn own_size(&self) -> u64 {
        self.sizes[self.own]
    }

    fn rest_size(&self) -> u64 {
        self.m() - self.own_size()
    }

    /// Largest own-bundle value for which the first event holds.
    pub fn first_cutoff(&self) -> BigInt {
        let k = big_int(self.k());
        let a = big_int(self.own_size());
        let half = big_ratio(1, 2);
        let form = match self.kind {
            // |A_other|/2 - 3d/2
            FairConstructionKind::Ef { other } => {
                self.d.affine(big_int(self.sizes[other]) * &half, big_ratio(-3, 2))
            }
            // |A_g|/2 - 2kd
            FairConstructionKind::Prop => self.d.affine(a * &half, -(k * big_int(2))),
            // m/(2k) - 2d
            FairConstructionKind::PropNew => {
                self.d.affine(big_ratio(self.m(), 2 * self.k()), big_int(-2))
            }
        };
        form.floor()
    }

    /// Smallest value of the other bundle(s) for which the second event holds.
    pub fn second_cutoff(&self) -> BigInt {
        match self.kind {
            FairConstructionKind::Ef { other } => big_ratio(self.sizes[other], 2).ceil().to_integer(),
            FairConstructionKind::Prop => big_ratio(self.rest_size(), 2).ceil().to_integer(),
            // m(k-1)/(2k) - (k-1)d/2
            FairConstructionKind::PropNew => {
                let k = self.k();
                self.d
                    .affine(big_ratio(self.m() * (k - 1), 2 * k), big_ratio(-(k as i64 - 1), 2))
                    .ceil()
            }
        }
    }

    fn second_trials(&self) -> u64 {
        match self.kind {
            FairConstructionKind::Ef { other } => self.sizes[other],
            _ => self.rest_size(),
        }
    }

    pub fn first(&self) -> Dyadic {
        BinomialRow::new(self.own_size()).le(&self.first_cutoff())
    }

    pub fn second(&self) -> Dyadic {
        BinomialRow::new(self.second_trials()).ge(&self.second_cutoff())
    }

    /// Probability that the fairness condition holds for this agent.
    pub fn fair(&self) -> Dyadic {
        let own = BinomialRow::new(self.own_size());
        match self.kind {
            FairConstructionKind::Ef { .. } => {
                // own value x must be at least every other bundle's value minus d,
                // i.e. v_h <= x + floor(d)
                let slack = self.d.floor();
                let rows: Vec<BinomialRow> = self
                    .sizes
                    .iter()
                    .enumerate()
                    .filter(|&(h, _)| h != self.own)
                    .map(|(_, &s)| BinomialRow::new(s))
                    .collect();
                (0..=self.own_size()).fold(Dyadic::zero(), |acc, x| {
                    let cap = BigInt::from(x) + &slack;
                    let term = rows.iter().fold(own.pmf(x), |p, row| p.mul(&row.le(&cap)));
                    acc.add(&term)
                })
            }
            FairConstructionKind::Prop | FairConstructionKind::PropNew => {
                // x >= (x + rest)/k - d  <=>  rest <= (k-1)x + kd
                let k = self.k();
                let rest = BinomialRow::new(self.rest_size());
                (0..=self.own_size()).fold(Dyadic::zero(), |acc, x| {
                    let cap = self
                        .d
                        .affine(big_int((k - 1) * x), big_int(k))
                        .floor();
                    acc.add(&own.pmf(x).mul(&rest.le(&cap)))
                })
            }
        }
    }

    pub fn probability(&self, event: FairEvent) -> Dyadic {
        match event {
            FairEvent::Fair => self.fair(),
            FairEvent::First => self.first(),
            FairEvent::Second => self.second(),
        }
    }

    /// Draws one agent's bundle values and evaluates `event`.
    fn sample(&self, event: FairEvent, rng: &mut impl RngCore) -> bool {
        let values: Vec<u64> = self.sizes.iter().map(|&s| coin_count(s, rng)).collect();
        let own = values[self.own];
        let rest: u64 = values.iter().sum::<u64>() - own;
        match event {
            FairEvent::First => BigInt::from(own) <= self.first_cutoff(),
            FairEvent::Second => {
                let v = match self.kind {
                    FairConstructionKind::Ef { other } => values[other],
                    _ => rest,
                };
                BigInt::from(v) >= self.second_cutoff()
            }
            FairEvent::Fair => match self.kind {
                FairConstructionKind::Ef { .. } => {
                    let slack = self.d.floor();
                    values.iter().all(|&v| BigInt::from(v) <= BigInt::from(own) + &slack)
                }
                _ => {
                    let k = self.k();
                    let cap = self.d.affine(big_int((k - 1) * own), big_int(k)).floor();
                    BigInt::from(rest) <= cap
                }
            },
        }
    }
}

/// Number of heads in `t` fair coins.
fn coin_count(t: u64, rng: &mut impl RngCore) -> u64 {
    let mut left = t;
    let mut heads = 0u64;
    while left > 0 {
        let take = left.min(64);
        let word = rng.next_u64();
        let mask = if take == 64 { u64::MAX } else { (1u64 << take) - 1 };
        heads += u64::from((word & mask).count_ones());
        left -= take;
    }
    heads
}

/// An event whose rate can be estimated by resampling the random construction.
#[derive(Clone, Debug)]
pub enum EventSpec {
    /// A color class of `class_size` elements meets a fresh fair-coin set.
    Disc { class_size: u64, m: u64, k: u64, d: Threshold, side: Side },
    /// One follower's valuation under a fixed allocation shape.
    Fair { model: FairEventModel, event: FairEvent },
}

impl EventSpec {
    pub fn exact_probability(&self) -> BigRational {
        match self {
            EventSpec::Disc { class_size, m, k, d, side } => {
                event_prob_disc(*class_size, *m, *k, d, *side)
            }
            EventSpec::Fair { model, event } => model.probability(*event).to_rational(),
        }
    }

    fn sample(&self, rng: &mut impl RngCore) -> bool {
        match self {
            EventSpec::Disc { class_size, m, k, d, side } => {
                let count = big_int(coin_count(*class_size, rng));
                let center = big_ratio(*m, 2 * *k);
                match side {
                    Side::Low => d.affine(center, -BigRational::one()).cmp_rational(&count) == Ordering::Greater,
                    Side::High => d.affine(center, BigRational::one()).cmp_rational(&count) == Ordering::Less,
                }
            }
            EventSpec::Fair { model, event } => model.sample(*event, rng),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateEstimate {
    pub rate: f64,
    /// Half-width of the normal-approximation 95% confidence interval.
    pub ci_halfwidth: f64,
}

/// Empirical frequency of `spec` over `trials` resamples; trial `t` draws from
/// stream `t` of the seeded generator.
pub fn estimate_event_rate(spec: &EventSpec, trials: u64, seed: u64) -> Result<RateEstimate> {
    if trials < 100 {
        return Err(Error::Precondition(format!("need at least 100 trials, got {trials}")));
    }
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|t| u64::from(spec.sample(&mut substream(seed, t))))
        .sum();
    let rate = hits as f64 / trials as f64;
    let ci_halfwidth = 1.96 * (rate * (1.0 - rate) / trials as f64).sqrt();
    Ok(RateEstimate { rate, ci_halfwidth })
}
