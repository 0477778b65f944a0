use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hp::{exp_int, Real};
use crate::model::{BoundReport, LinkKind};
use crate::rational::{big_int, big_ratio, biguint_to_rational, Threshold};

use super::super::binomial::Dyadic;
use super::super::events::{event_prob_around, Side};
use super::{algebra, analytic, exact_at_least, k_to_minus_m, real, skipped, undefined, ChainOptions};

/// Parameters of the random set system: `n` sets over `m` elements, `k` colors,
/// threshold `d`.
#[derive(Clone, Debug)]
pub struct DiscChainInput {
    pub n: BigUint,
    pub k: BigUint,
    pub m: BigUint,
    pub d: Threshold,
}

impl DiscChainInput {
    /// Uses `d = sqrt(m/k)`.
    pub fn new(n: BigUint, k: BigUint, m: BigUint) -> Result<Self> {
        if k < BigUint::from(2u32) {
            return Err(Error::Parameter(format!("k = {k} must be at least 2")));
        }
        let d = Threshold::sqrt_ratio(BigInt::from(m.clone()), BigInt::from(k.clone()))?;
        Ok(DiscChainInput { n, k, m, d })
    }

    /// `m = floor((n-1)k / (c ln k))` and `d = sqrt(m/k)`.
    pub fn from_constant(n: BigUint, k: BigUint, c: &Real) -> Result<Self> {
        if k < BigUint::from(2u32) || n.is_zero() {
            return Err(Error::Parameter(format!("need n >= 1 and k >= 2, got n = {n}, k = {k}")));
        }
        let kr = Real::from_biguint(&k);
        let raw = Real::from_biguint(&(&n - 1u32)) * &kr / (c * &kr.ln());
        let m = raw
            .to_biguint_floor()
            .ok_or_else(|| Error::Parameter("element count is not finite".into()))?;
        Self::new(n, k, m)
    }

    /// The smallest integers meeting the hypotheses with the theorem's constant:
    /// `k = ceil(3 + 6e^48)`, `n = ceil(1 + 147 e^48 ln k)`.
    pub fn theorem_scale() -> Self {
        let e48 = exp_int(48);
        let k = (Real::from_u64(3) + Real::from_u64(6) * &e48)
            .ceil()
            .to_biguint_floor()
            .expect("finite");
        let ln_k = Real::from_biguint(&k).ln();
        let n = (Real::from_u64(1) + Real::from_u64(147) * &e48 * &ln_k)
            .ceil()
            .to_biguint_floor()
            .expect("finite");
        Self::from_constant(n, k, &(Real::from_u64(3) * e48)).expect("valid theorem-scale parameters")
    }
}

/// `k >= 3 + 6e^48` and `n >= 1 + 147 e^48 ln k`.
pub fn disc_hypotheses_hold(input: &DiscChainInput) -> bool {
    let e48 = exp_int(48);
    let k = Real::from_biguint(&input.k);
    let n = Real::from_biguint(&input.n);
    k >= Real::from_u64(3) + Real::from_u64(6) * &e48 && n >= Real::from_u64(1) + Real::from_u64(147) * &e48 * k.ln()
}

fn to_u64(x: &BigInt) -> Option<u64> {
    x.to_u64()
}

/// The chain showing that a fixed balanced coloring has discrepancy at most `d`
/// with probability below `k^-m`.
///
/// Color class sizes range over `[max(1, ceil(m/k - d)), floor(m/k + d)]`; exact
/// event probabilities are computed for every size when there are at most 64 of
/// them and for the two ends otherwise.
pub fn disc_chain_report(input: &DiscChainInput, options: &ChainOptions) -> Vec<BoundReport> {
    let hyp = disc_hypotheses_hold(input);
    let d = &input.d;
    let k_q = biguint_to_rational(&input.k);
    let m_q = biguint_to_rational(&input.m);
    let mk = &m_q / &k_q;
    let center = &mk / big_int(2);
    let d2 = d.square().clone();
    let ln2 = Real::from_u64(2).ln();
    let mut out = Vec::new();

    out.push(algebra("d <= m/(7k)", &d.value(), &d.constant(&mk / big_int(7)), false, hyp));
    let class_min = d.affine(mk.clone(), -BigRational::one());
    let class_max = d.affine(mk.clone(), BigRational::one());
    let eps_half = algebra("6d <= m/k - d (eps <= 1/2)", &d.affine(BigRational::zero(), big_int(6)), &class_min, false, hyp);
    let eps_t = algebra(
        "m/k + d <= 3d^2/2 (eps^2 t >= 6)",
        &class_max,
        &d.constant(&d2 * big_ratio(3, 2)),
        false,
        hyp,
    );
    out.push(eps_half);
    out.push(eps_t);

    let s_lo = class_min.ceil().max(BigInt::one());
    let s_hi = class_max.floor();
    let half = big_ratio(1, 2);
    let at = |s: &BigInt| big_int(s.clone());
    out.push(algebra(
        "s/2 - 3d/2 <= m/(2k) - d at the largest class",
        &d.affine(at(&s_hi) * &half, big_ratio(-3, 2)),
        &d.affine(center.clone(), -BigRational::one()),
        false,
        true,
    ));
    out.push(algebra(
        "m/(2k) + d <= s/2 + 3d/2 at the smallest class",
        &d.affine(center.clone(), BigRational::one()),
        &d.affine(at(&s_lo) * &half, big_ratio(3, 2)),
        false,
        true,
    ));

    let sizes: Vec<BigInt> = if s_hi < s_lo {
        Vec::new()
    } else if &s_hi - &s_lo < BigInt::from(64) {
        let mut v = Vec::new();
        let mut s = s_lo.clone();
        while s <= s_hi {
            v.push(s.clone());
            s += 1;
        }
        v
    } else {
        vec![s_lo.clone(), s_hi.clone()]
    };
    let mut min_prob: Option<Dyadic> = None;
    let mut all_exact = !sizes.is_empty();
    for s in &sizes {
        let s_q = at(s);
        let claim = d.affine(BigRational::zero(), big_int(6)).cmp_rational(&s_q).is_le()
            && &d2 * big_int(9) >= &s_q * big_int(6);
        let bound = -real(&(&d2 * big_int(81) / (&s_q * big_int(2))));
        for side in [Side::Low, Side::High] {
            let name = match side {
                Side::Low => "low",
                Side::High => "high",
            };
            let label = format!("Pr[{name} event] >= exp(-81d^2/(2s)) at s = {s}");
            match to_u64(s).filter(|&s| s <= options.exact_cap) {
                Some(size) => {
                    let p = event_prob_around(size, &center, d, side);
                    out.push(exact_at_least(label, &bound, Some(&p), claim));
                    if min_prob.as_ref().map_or(true, |q| p < *q) {
                        min_prob = Some(p);
                    }
                }
                None => {
                    all_exact = false;
                    out.push(skipped(label, LinkKind::ExactTail, claim));
                }
            }
        }
    }

    let smallest_bound = -real(&(&d2 * big_int(81) / (at(&s_lo) * big_int(2))));
    if class_min.signum().is_gt() {
        let worst = -(real(&(&d2 * big_int(81) / big_int(2))) / class_min.to_real());
        out.push(analytic("exp(-81d^2/(2(m/k - d))) <= exp(-81d^2/(2s))", &worst, &smallest_bound, true));
    } else {
        out.push(undefined("exp(-81d^2/(2(m/k - d))) <= exp(-81d^2/(2s))", LinkKind::Analytic, false));
    }
    out.push(algebra(
        "1/(m/k - d) <= 7k/(6m)",
        &d.constant(&mk * big_int(6)),
        &class_min.scale(&big_int(7)),
        false,
        hyp,
    ));
    if m_q.is_zero() {
        out.push(undefined("(81/2)(7d^2 k/(6m)) < 48", LinkKind::Algebra, hyp));
    } else {
        out.push(algebra(
            "(81/2)(7d^2 k/(6m)) < 48",
            &d.constant(&d2 * big_ratio(567, 12) * &k_q / &m_q),
            &d.constant(big_int(48)),
            true,
            hyp,
        ));
    }
    let label = "min event probability >= exp(-48)";
    if all_exact {
        out.push(exact_at_least(label, &Real::from_i64(-48), min_prob.as_ref(), hyp));
    } else {
        out.push(skipped(label, LinkKind::ExactTail, hyp));
    }

    let tiny = exp_int(-48);
    out.push(analytic("1 - exp(-48) <= exp(-exp(-48))", &tiny.ln_one_minus(), &-&tiny, true));

    let k_floor_half = &input.k / 2u32;
    let k_ceil_half = &input.k - &k_floor_half;
    out.push(algebra(
        "(k-1)/2 <= floor(k/2)",
        &d.constant((&k_q - big_int(1)) * &half),
        &d.constant(biguint_to_rational(&k_floor_half)),
        false,
        true,
    ));

    let per_color = -&tiny;
    let per_set = Real::log_add_exp(
        &(Real::from_biguint(&k_floor_half) * &per_color),
        &(Real::from_biguint(&k_ceil_half) * &per_color),
    );
    let spread = Real::from_big_rational(&((&k_q - big_int(1)) * &half)) * &tiny;
    let per_set_bound = &ln2 - &spread;
    out.push(analytic(
        "q^floor(k/2) + q^ceil(k/2) <= 2 exp(-((k-1)/2) exp(-48)), q = exp(-exp(-48))",
        &per_set,
        &per_set_bound,
        hyp,
    ));

    let sets = if input.n.is_zero() { Real::zero() } else { Real::from_biguint(&(&input.n - 1u32)) };
    let one = Real::from_u64(1);
    let step2 = &sets * (&one - &spread);
    out.push(analytic("(n-1)(ln 2 - s) <= (n-1)(1 - s)", &(&sets * &per_set_bound), &step2, true));
    let step3 = -(&sets * Real::from_biguint(&input.k) / Real::from_u64(3) * &tiny);
    out.push(analytic("(n-1)(1 - ((k-1)/2) exp(-48)) <= -(n-1)(k/3) exp(-48)", &step2, &step3, hyp));
    let (target, identity) = k_to_minus_m(&input.m, &input.k);
    out.push(analytic("-(n-1)(k/3) exp(-48) <= -m ln k", &step3, &target, hyp));
    out.push(identity);
    out.push(analytic("Pr[coloring has discrepancy <= d] < k^-m", &(&sets * &per_set), &target, hyp));
    out
}
