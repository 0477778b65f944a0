//! Link-by-link evaluation of the inequality chains behind the lower bounds.
//!
//! Every link is reported as `lhs <= rhs` (strict links say so in the label).
//! A failed link never stops the chain.

mod disc;
mod fair;

pub use disc::{disc_chain_report, disc_hypotheses_hold, DiscChainInput};
pub use fair::{
    ef_event_chain_report, jensen_link, prop_event_chain_report, propnew_event_chain_report, FairChainInput,
};

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_rational::BigRational;

use crate::hp::Real;
use crate::model::{BoundReport, LinkKind};
use crate::rational::Affine;

use super::binomial::Dyadic;

/// Relative tolerance for identity links.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// Largest binomial support for which exact probabilities are computed.
pub const DEFAULT_EXACT_CAP: u64 = 4096;

#[derive(Clone, Copy, Debug)]
pub struct ChainOptions {
    pub exact_cap: u64,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions { exact_cap: DEFAULT_EXACT_CAP }
    }
}

fn log_or_neg_inf(v: &Real) -> f64 {
    if *v > Real::zero() {
        v.ln().to_f64()
    } else {
        f64::NEG_INFINITY
    }
}

fn report(label: impl Into<String>, kind: LinkKind, lhs_log: f64, rhs_log: f64, holds: bool, pre: bool) -> BoundReport {
    BoundReport { label: label.into(), kind, lhs_log, rhs_log, holds, preconditions_met: pre, skipped: false }
}

/// `lhs <= rhs` for two log-space values.
pub(crate) fn analytic(label: impl Into<String>, lhs_log: &Real, rhs_log: &Real, pre: bool) -> BoundReport {
    report(label, LinkKind::Analytic, lhs_log.to_f64(), rhs_log.to_f64(), lhs_log <= rhs_log, pre)
}

/// Exact comparison of two values affine in the same threshold. Nonpositive
/// sides are reported with a log of `-inf`.
pub(crate) fn algebra(label: impl Into<String>, lhs: &Affine, rhs: &Affine, strict: bool, pre: bool) -> BoundReport {
    let ord = lhs.cmp_affine(rhs);
    let holds = if strict { ord == Ordering::Less } else { ord != Ordering::Greater };
    report(label, LinkKind::Algebra, log_or_neg_inf(&lhs.to_real()), log_or_neg_inf(&rhs.to_real()), holds, pre)
}

pub(crate) fn algebra_eq(label: impl Into<String>, lhs: &Affine, rhs: &Affine, pre: bool) -> BoundReport {
    let holds = lhs.cmp_affine(rhs) == Ordering::Equal;
    report(label, LinkKind::Algebra, log_or_neg_inf(&lhs.to_real()), log_or_neg_inf(&rhs.to_real()), holds, pre)
}

/// An algebra link whose hypothesis is impossible, so it holds vacuously.
pub(crate) fn vacuous(label: impl Into<String>, pre: bool) -> BoundReport {
    report(label, LinkKind::Algebra, f64::NAN, f64::NAN, true, pre)
}

/// A link whose sides are undefined at these parameters.
pub(crate) fn undefined(label: impl Into<String>, kind: LinkKind, pre: bool) -> BoundReport {
    report(label, kind, f64::NAN, f64::NAN, false, pre)
}

pub(crate) fn skipped(label: impl Into<String>, kind: LinkKind, pre: bool) -> BoundReport {
    BoundReport {
        label: label.into(),
        kind,
        lhs_log: f64::NAN,
        rhs_log: f64::NAN,
        holds: false,
        preconditions_met: pre,
        skipped: true,
    }
}

/// Two log-space evaluations of one quantity.
pub(crate) fn identity(label: impl Into<String>, lhs_log: &Real, rhs_log: &Real, pre: bool) -> BoundReport {
    let holds = Real::relative_difference(lhs_log, rhs_log) <= Real::from_f64(IDENTITY_TOLERANCE);
    report(label, LinkKind::Identity, lhs_log.to_f64(), rhs_log.to_f64(), holds, pre)
}

/// `bound <= Pr[event]`, skipped when the probability was not computed.
pub(crate) fn exact_at_least(label: impl Into<String>, bound_log: &Real, prob: Option<&Dyadic>, pre: bool) -> BoundReport {
    match prob {
        Some(p) => {
            let ln_p = p.ln();
            report(label, LinkKind::ExactTail, bound_log.to_f64(), ln_p.to_f64(), *bound_log <= ln_p, pre)
        }
        None => skipped(label, LinkKind::ExactTail, pre),
    }
}

/// `Pr[event] <= bound`.
pub(crate) fn exact_at_most(label: impl Into<String>, prob: Option<&Dyadic>, bound_log: &Real, pre: bool) -> BoundReport {
    match prob {
        Some(p) => {
            let ln_p = p.ln();
            report(label, LinkKind::ExactTail, ln_p.to_f64(), bound_log.to_f64(), ln_p <= *bound_log, pre)
        }
        None => skipped(label, LinkKind::ExactTail, pre),
    }
}

pub(crate) fn real(r: &BigRational) -> Real {
    Real::from_big_rational(r)
}

/// `-m ln k`, and the identity link against an independent evaluation of `ln k^-m`.
pub(crate) fn k_to_minus_m(m: &BigUint, k: &BigUint) -> (Real, BoundReport) {
    let log = -(Real::from_biguint(m) * Real::from_biguint(k).ln());
    let link = match Real::from_biguint(k).ln_pow(m) {
        Some(ln_pow) => identity("exp(-m ln k) = k^-m", &log, &-ln_pow, true),
        None => undefined("exp(-m ln k) = k^-m", LinkKind::Identity, true),
    };
    (log, link)
}
