use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hp::{exp_int, Real};
use crate::model::{BoundReport, LinkKind};
use crate::rational::{big_int, big_ratio, Affine, Threshold};

use super::super::binomial::{BinomialRow, Dyadic};
use super::super::events::{FairConstructionKind, FairEventModel};
use super::{
    algebra, algebra_eq, analytic, exact_at_least, exact_at_most, identity, k_to_minus_m, real, undefined,
    vacuous, ChainOptions,
};

/// One allocation of the leader/follower construction, seen from a follower
/// whose group owns bundle `own`.
#[derive(Clone, Debug)]
pub struct FairChainInput {
    /// Number of agents `n` (EF, PROP) or the smallest group size (PROP with
    /// per-group counts).
    pub agents: BigUint,
    pub bundle_sizes: Vec<u64>,
    pub own: usize,
    /// Comparison bundle for EF; ignored otherwise.
    pub other: usize,
    pub d: Threshold,
}

impl FairChainInput {
    fn m(&self) -> u64 {
        self.bundle_sizes.iter().sum()
    }

    fn k(&self) -> u64 {
        self.bundle_sizes.len() as u64
    }

    fn validate(&self, needs_other: bool) -> Result<()> {
        let k = self.bundle_sizes.len();
        if k < 2 {
            return Err(Error::Parameter(format!("need at least 2 bundles, got {k}")));
        }
        if self.own >= k {
            return Err(Error::Parameter(format!("own bundle {} out of range for {k} bundles", self.own)));
        }
        if needs_other && (self.other >= k || self.other == self.own) {
            return Err(Error::Parameter(format!(
                "comparison bundle {} must be a bundle other than {}",
                self.other, self.own
            )));
        }
        if self.d.square().is_zero() {
            return Err(Error::Parameter("d must be positive".into()));
        }
        Ok(())
    }

    /// Every bundle has at least `m/k - d` items, and at most `m/k + d` when
    /// `two_sided`.
    fn check_sizes(&self, two_sided: bool) -> Result<()> {
        let mk = big_ratio(self.m(), self.k());
        let lower = self.d.affine(mk.clone(), -BigRational::one());
        let upper = self.d.affine(mk, BigRational::one());
        for (h, &s) in self.bundle_sizes.iter().enumerate() {
            let s_q = big_int(s);
            let below = lower.cmp_rational(&s_q).is_gt();
            let above = two_sided && upper.cmp_rational(&s_q).is_lt();
            if below || above {
                let range = if two_sided { "[m/k - d, m/k + d]" } else { "[m/k - d, m]" };
                return Err(Error::Precondition(format!("bundle {h} has {s} items, outside {range}")));
            }
        }
        Ok(())
    }

    fn model(&self, kind: FairConstructionKind) -> FairEventModel {
        FairEventModel {
            kind,
            sizes: self.bundle_sizes.clone(),
            own: self.own,
            d: self.d.clone(),
        }
    }
}

/// Exact event probabilities, when the supports are small enough.
struct Exact {
    first: Option<Dyadic>,
    second: Option<Dyadic>,
    fair: Option<Dyadic>,
}

impl Exact {
    fn compute(model: &FairEventModel, cap: u64) -> Self {
        if model.m() > cap {
            return Exact { first: None, second: None, fair: None };
        }
        Exact { first: Some(model.first()), second: Some(model.second()), fair: Some(model.fair()) }
    }

    fn both(&self) -> Option<Dyadic> {
        Some(self.first.as_ref()?.mul(self.second.as_ref()?))
    }
}

fn ln_k(k: u64) -> Real {
    Real::from_u64(k).ln()
}

/// `n >= k + factor · e^power · k ln k`.
fn population_hypothesis(agents: &BigUint, k: u64, factor: u64, power: i64) -> bool {
    Real::from_biguint(agents) >= Real::from_u64(k) + Real::from_u64(factor) * exp_int(power) * Real::from_u64(k) * ln_k(k)
}

/// Links shared by all three constructions once `Pr[E1]` and `Pr[E2]` are bounded.
fn closing_links(out: &mut Vec<BoundReport>, exact: &Exact, per_agent_log: &Real, pre: bool) {
    let one_minus = exact.both().map(|b| b.complement().ln());
    let label = "Pr[E] <= 1 - Pr[E1] Pr[E2]";
    match one_minus {
        Some(bound) => out.push(exact_at_most(label, exact.fair.as_ref(), &bound, true)),
        None => out.push(exact_at_most(label, None, &Real::zero(), true)),
    }
    out.push(exact_at_most("Pr[E] <= lemma bound", exact.fair.as_ref(), per_agent_log, pre));
}

fn union_links(out: &mut Vec<BoundReport>, label: &str, total_log: &Real, m: u64, k: u64, pre: bool) {
    let (target, identity) = k_to_minus_m(&BigUint::from(m), &BigUint::from(k));
    out.push(analytic(label, total_log, &target, pre));
    out.push(identity);
}

/// Extremes of the two events: the largest own value allowed by `E1` and the
/// smallest rest value allowed by `E2`. `None` when one event is impossible.
fn extremes(model: &FairEventModel, rest_trials: u64) -> Option<(BigInt, BigInt)> {
    let v_max = model.first_cutoff();
    let r_min = model.second_cutoff().max(BigInt::zero());
    (!v_max.is_negative() && r_min <= BigInt::from(rest_trials)).then_some((v_max, r_min))
}

/// The chain for envy-freeness with `d = sqrt(m/k)`. Bundle sizes must lie in
/// `[m/k - d, m/k + d]`.
pub fn ef_event_chain_report(input: &FairChainInput, options: &ChainOptions) -> Result<Vec<BoundReport>> {
    input.validate(true)?;
    input.check_sizes(true)?;
    let (m, k) = (input.m(), input.k());
    let d = &input.d;
    let d2 = d.square().clone();
    let hyp = population_hypothesis(&input.agents, k, 242, 124);
    let mk = big_ratio(m, k);
    let a = input.bundle_sizes[input.own];
    let a_q = big_int(a);
    let b_q = big_int(input.bundle_sizes[input.other]);
    let zero = BigRational::zero();
    let ln2 = Real::from_u64(2).ln();
    let mut out = Vec::new();

    out.push(algebra("11 <= d", &d.constant(big_int(11)), &d.value(), false, hyp));
    out.push(algebra("11kd <= m", &d.affine(zero.clone(), big_int(11 * k)), &d.constant(big_int(m)), false, hyp));
    out.push(algebra("|A_own| - 2d <= |A_other|", &d.affine(a_q.clone(), big_int(-2)), &d.constant(b_q), false, true));
    let eps_half = algebra("10d <= |A_own| (eps <= 1/2)", &d.affine(zero.clone(), big_int(10)), &d.constant(a_q.clone()), false, true);
    let eps_t = algebra(
        "6|A_own| <= 25d^2 (eps^2 t >= 6)",
        &d.constant(&a_q * big_int(6)),
        &d.constant(&d2 * big_int(25)),
        false,
        true,
    );
    let claim = eps_half.holds && eps_t.holds;
    out.push(eps_half);
    out.push(eps_t);

    let chernoff = -real(&(&d2 * big_int(225) / (&a_q * big_int(2))));
    let model = input.model(FairConstructionKind::Ef { other: input.other });
    let exact = Exact::compute(&model, options.exact_cap);
    let lemma_point = (a <= options.exact_cap)
        .then(|| BinomialRow::new(a).le(&d.affine(&a_q * big_ratio(1, 2), big_ratio(-5, 2)).floor()));
    out.push(exact_at_least(
        "Pr[v(A_own) <= |A_own|/2 - 5d/2] >= exp(-225d^2/(2|A_own|))",
        &chernoff,
        lemma_point.as_ref(),
        claim,
    ));
    out.push(exact_at_least("Pr[E1] >= exp(-225d^2/(2|A_own|))", &chernoff, exact.first.as_ref(), claim));

    let class_min = d.affine(mk.clone(), -BigRational::one());
    let sqrt_form = "225d^2/(2(m/k - d)) = 225 sqrt(m/k)/(2(sqrt(m/k) - 1))";
    if class_min.signum().is_gt() {
        let worst = -(real(&(&d2 * big_int(225) / big_int(2))) / class_min.to_real());
        out.push(analytic("exp(-225d^2/(2(m/k - d))) <= exp(-225d^2/(2|A_own|))", &worst, &chernoff, true));
        let root = real(&mk).sqrt();
        let one = Real::from_u64(1);
        if root > one {
            let alt = -(Real::from_u64(225) * &root / (Real::from_u64(2) * (&root - one)));
            out.push(identity(sqrt_form, &worst, &alt, d2 == mk));
        } else {
            out.push(undefined(sqrt_form, LinkKind::Identity, d2 == mk));
        }
    } else {
        out.push(undefined("exp(-225d^2/(2(m/k - d))) <= exp(-225d^2/(2|A_own|))", LinkKind::Analytic, false));
        out.push(undefined(sqrt_form, LinkKind::Identity, d2 == mk));
    }
    out.push(algebra(
        "225d/(2(d - 1)) <= 2475/20",
        &d.constant(big_int(4950)),
        &d.affine(zero.clone(), big_int(450)),
        false,
        hyp,
    ));
    out.push(algebra("2475/20 < 124", &d.constant(big_ratio(2475, 20)), &d.constant(big_int(124)), true, true));
    out.push(exact_at_least("Pr[E2] >= 1/2", &-&ln2, exact.second.as_ref(), true));
    out.push(exact_at_least("Pr[E1] Pr[E2] >= exp(-124)/2", &(Real::from_i64(-124) - &ln2), exact.both().as_ref(), hyp));

    let x = exp_int(-124).mul_pow2(-1);
    out.push(analytic("1 - exp(-124)/2 <= exp(-exp(-124)/2)", &x.ln_one_minus(), &-&x, true));
    closing_links(&mut out, &exact, &-&x, hyp);
    let followers = if input.agents > BigUint::from(k) { &input.agents - k } else { BigUint::zero() };
    union_links(&mut out, "-(n-k)/2 exp(-124) <= -m ln k", &-(Real::from_biguint(&followers) * &x), m, k, hyp);
    Ok(out)
}

/// The chain for proportionality with `d = sqrt(m/k^3)`. Every bundle must
/// have at least `m/k - d` items.
pub fn prop_event_chain_report(input: &FairChainInput, options: &ChainOptions) -> Result<Vec<BoundReport>> {
    input.validate(false)?;
    input.check_sizes(false)?;
    let (m, k) = (input.m(), input.k());
    let d = &input.d;
    let d2 = d.square().clone();
    let hyp = population_hypothesis(&input.agents, k, 162, 77);
    let mk = big_ratio(m, k);
    let a = input.bundle_sizes[input.own];
    let a_q = big_int(a);
    let k_q = big_int(k);
    let km1 = big_int(k - 1);
    let zero = BigRational::zero();
    let half = big_ratio(1, 2);
    let ln2 = Real::from_u64(2).ln();
    let mut out = Vec::new();

    out.push(algebra("9k^2 d <= m", &d.affine(zero.clone(), big_int(9 * k * k)), &d.constant(big_int(m)), false, hyp));
    out.push(algebra("|A_own| <= m/k + (k-1)d", &d.constant(a_q.clone()), &d.affine(mk.clone(), km1.clone()), false, true));
    let eps_half = algebra("8kd <= |A_own| (eps <= 1/2)", &d.affine(zero.clone(), big_int(8 * k)), &d.constant(a_q.clone()), false, true);
    let eps_t = algebra(
        "6|A_own| <= 16k^2 d^2 (eps^2 t >= 6)",
        &d.constant(&a_q * big_int(6)),
        &d.constant(&d2 * big_int(16 * k * k)),
        false,
        true,
    );
    let claim = eps_half.holds && eps_t.holds;
    out.push(eps_half);
    out.push(eps_t);
    out.push(algebra("17m/(18k) <= |A_own|", &d.constant(&mk * big_ratio(17, 18)), &d.constant(a_q.clone()), false, hyp));

    let chernoff = -real(&(&d2 * big_int(72 * k * k) / &a_q));
    let model = input.model(FairConstructionKind::Prop);
    let exact = Exact::compute(&model, options.exact_cap);
    out.push(exact_at_least("Pr[E1] >= exp(-72k^2 d^2/|A_own|)", &chernoff, exact.first.as_ref(), claim));
    let scaled = &d2 * big_int(1296 * k * k * k) / big_int(17 * m);
    out.push(analytic("exp(-1296k^3 d^2/(17m)) <= exp(-72k^2 d^2/|A_own|)", &-real(&scaled), &chernoff, true));
    out.push(algebra("1296k^3 d^2/(17m) < 77", &d.constant(scaled), &d.constant(big_int(77)), true, hyp));
    out.push(exact_at_least("Pr[E2] >= 1/2", &-&ln2, exact.second.as_ref(), true));
    out.push(exact_at_least("Pr[E1] Pr[E2] >= exp(-77)/2", &(Real::from_i64(-77) - &ln2), exact.both().as_ref(), hyp));

    let kk1 = &k_q * &km1;
    // m/2 - k|A_own|/2 + 2k(k-1)d
    let deficit = d.affine(big_int(m) * &half - &k_q * &a_q * &half, &kk1 * big_int(2));
    out.push(algebra("3k(k-1)d/2 <= m/2 - k|A_own|/2 + 2k(k-1)d", &d.affine(zero.clone(), &kk1 * big_ratio(3, 2)), &deficit, false, true));
    out.push(algebra("kd < 3k(k-1)d/2", &d.affine(zero.clone(), k_q.clone()), &d.affine(zero.clone(), &kk1 * big_ratio(3, 2)), true, true));
    deficit_at_extremes(&mut out, &model, m - a, k, d, &big_ratio(3 * (k as i64 - 1), 2));

    let x = exp_int(-77).mul_pow2(-1);
    out.push(analytic("1 - exp(-77)/2 <= exp(-exp(-77)/2)", &x.ln_one_minus(), &-&x, true));
    closing_links(&mut out, &exact, &-&x, hyp);
    let followers = if input.agents > BigUint::from(k) { &input.agents - k } else { BigUint::zero() };
    union_links(&mut out, "-(n-k)/2 exp(-77) <= -m ln k", &-(Real::from_biguint(&followers) * &x), m, k, hyp);
    Ok(out)
}

/// For integer values at the edges of both events, the average value exceeds
/// the own value by at least `ratio · d`, and that exceeds `d`.
fn deficit_at_extremes(
    out: &mut Vec<BoundReport>,
    model: &FairEventModel,
    rest_trials: u64,
    k: u64,
    d: &Threshold,
    ratio: &BigRational,
) {
    let zero = BigRational::zero();
    let label_mid = "(k-1)d·c <= (rest - (k-1)v_own)/k at the event edges";
    let label_strict = "d < (rest - (k-1)v_own)/k at the event edges";
    match extremes(model, rest_trials) {
        Some((v_max, r_min)) => {
            let gap = (BigRational::from_integer(r_min) - big_int(k - 1) * BigRational::from_integer(v_max)) / big_int(k);
            let gap = d.constant(gap);
            let label_mid = label_mid.replace('c', &format!("{ratio}/(k-1)"));
            let scaled = ratio / big_int(k);
            out.push(algebra(label_mid, &d.affine(zero.clone(), scaled), &gap, false, true));
            out.push(algebra(label_strict, &d.value(), &gap, true, true));
        }
        None => {
            out.push(vacuous(format!("{label_mid} (an event is impossible)"), true));
            out.push(vacuous(format!("{label_strict} (an event is impossible)"), true));
        }
    }
}

/// `ζ_h = 1 + (|A_h| - m/k)/d`, exact in the threshold.
fn zeta<'t>(d: &'t Threshold, size: u64, mk: &BigRational) -> Affine<'t> {
    d.affine(BigRational::one(), (big_int(size) - mk) / d.square())
}

/// Jensen step for `f(z) = exp(-c(3+z)^2)`: `Σ_h f(ζ_h) >= k·f(Σζ_h/k)`, i.e.
/// `>= k·exp(-16c)` when the `ζ_h` sum to `k`. Ties within working precision
/// count as holding.
fn jensen_report(c: &Real, zetas: &[Real], pre: bool) -> BoundReport {
    let k = Real::from_u64(zetas.len() as u64);
    let three = Real::from_u64(3);
    let mut sum = Real::zero();
    for z in zetas {
        let s = &three + z;
        sum = sum + (-(c * &s * &s)).exp();
    }
    let floor = &k * (-(c * Real::from_u64(16))).exp();
    let tie = Real::relative_difference(&sum, &floor) < Real::from_f64(2f64.powi(-300));
    let mut link = analytic("k exp(-16c) <= sum_h exp(-c(3 + zeta_h)^2)", &floor.ln(), &sum.ln(), pre);
    link.holds = link.holds || tie;
    link
}

/// The Jensen link for exact `c` and `ζ` with `Σζ_h = k` (the vector length).
/// `preconditions_met` records `c >= 1/18`.
pub fn jensen_link(c: &BigRational, zetas: &[BigRational]) -> Result<BoundReport> {
    if zetas.is_empty() {
        return Err(Error::Parameter("need at least one zeta".into()));
    }
    if let Some(z) = zetas.iter().find(|z| z.is_negative()) {
        return Err(Error::Parameter(format!("zeta {z} is negative")));
    }
    let total: BigRational = zetas.iter().sum();
    if total != big_int(zetas.len() as u64) {
        return Err(Error::Parameter(format!("zetas sum to {total}, not {}", zetas.len())));
    }
    let reals: Vec<Real> = zetas.iter().map(real).collect();
    Ok(jensen_report(&real(c), &reals, *c >= big_ratio(1, 18)))
}

/// The chain for proportionality with per-group counts, `d = sqrt(m/k)`.
/// `agents` is the smallest group size; every bundle must have at least
/// `m/k - d` items.
pub fn propnew_event_chain_report(input: &FairChainInput, options: &ChainOptions) -> Result<Vec<BoundReport>> {
    input.validate(false)?;
    input.check_sizes(false)?;
    let (m, k) = (input.m(), input.k());
    let d = &input.d;
    let d2 = d.square().clone();
    let k_real = Real::from_u64(k);
    let hyp = k >= 4
        && Real::from_biguint(&input.agents)
            >= Real::from_u64(1) + Real::from_u64(32) * exp_int(96) * &k_real * &k_real * ln_k(k);
    let mk = big_ratio(m, k);
    let a = input.bundle_sizes[input.own];
    let a_q = big_int(a);
    let k_q = big_int(k);
    let km1 = big_int(k - 1);
    let zero = BigRational::zero();
    let half = big_ratio(1, 2);
    let ln2 = Real::from_u64(2).ln();
    let mut out = Vec::new();

    out.push(algebra("4 <= k", &d.constant(big_int(4)), &d.constant(k_q.clone()), false, true));
    out.push(algebra("d <= m/(4k^2)", &d.value(), &d.constant(big_ratio(m, 4 * k * k)), false, hyp));
    let zetas: Vec<Affine> = input.bundle_sizes.iter().map(|&s| zeta(d, s, &mk)).collect();
    let total = zetas.iter().skip(1).fold(zetas[0].clone(), |acc, z| acc.add(z));
    out.push(algebra_eq("sum_h zeta_h = k", &total, &d.constant(k_q.clone()), true));
    let z_own = &zetas[input.own];
    out.push(algebra("0 <= zeta_own", &d.constant(zero.clone()), z_own, false, true));
    out.push(algebra("zeta_own <= k", z_own, &d.constant(k_q.clone()), false, true));

    // (3 + ζ)d = 4d + |A_own| - m/k
    let spread = z_own.add_rational(&big_int(3)).mul(&d.value());
    out.push(algebra_eq(
        "m/(2k) - 2d = |A_own|/2 - (3 + zeta_own)d/2",
        &d.affine(&mk * &half, big_int(-2)),
        &d.constant(&a_q * &half).sub(&spread.scale(&half)),
        true,
    ));
    let eps_half = algebra("8d + |A_own| <= 2m/k (eps <= 1/2)", &d.affine(a_q.clone(), big_int(8)), &d.constant(&mk * big_int(2)), false, true);
    let eps_t = algebra(
        "6|A_own| <= ((3 + zeta_own)d)^2 (eps^2 t >= 6)",
        &d.constant(&a_q * big_int(6)),
        &spread.mul(&spread),
        false,
        true,
    );
    let claim = eps_half.holds && eps_t.holds;
    out.push(eps_half);
    out.push(eps_t);
    out.push(algebra("3m/(4k) <= |A_own|", &d.constant(&mk * big_ratio(3, 4)), &d.constant(a_q.clone()), false, hyp));

    let spread_sq = spread.mul(&spread).to_real();
    let chernoff = -(Real::from_u64(9) * &spread_sq / Real::from_u64(2 * a));
    let model = input.model(FairConstructionKind::PropNew);
    let exact = Exact::compute(&model, options.exact_cap);
    out.push(exact_at_least("Pr[E1] >= exp(-9(3 + zeta_own)^2 d^2/(2|A_own|))", &chernoff, exact.first.as_ref(), claim));
    let own_exponent = -(Real::from_u64(6 * k) * &spread_sq / Real::from_u64(m));
    out.push(analytic(
        "exp(-6(3 + zeta_own)^2 d^2 k/m) <= exp(-9(3 + zeta_own)^2 d^2/(2|A_own|))",
        &own_exponent,
        &chernoff,
        true,
    ));
    out.push(algebra(
        "m(k-1)/(2k) - (k-1)d/2 <= (m - |A_own|)/2",
        &d.affine(big_ratio(m * (k - 1), 2 * k), -(&km1 * &half)),
        &d.constant(big_int(m - a) * &half),
        false,
        true,
    ));
    out.push(exact_at_least("Pr[E2] >= 1/2", &-&ln2, exact.second.as_ref(), true));
    let ratio = big_ratio(3 * (k as i64 - 1), 2 * k as i64);
    out.push(algebra("d < 3(k-1)d/(2k)", &d.value(), &d.affine(zero.clone(), ratio.clone()), true, true));
    deficit_at_extremes(&mut out, &model, m - a, k, d, &(ratio * &k_q));

    let per_agent = -(own_exponent.exp().mul_pow2(-1));
    closing_links(&mut out, &exact, &per_agent, claim);

    let c = &d2 * big_int(6 * k) / big_int(m);
    let c_ok = c >= big_ratio(1, 18);
    out.push(algebra("1/18 <= c = 6d^2 k/m", &d.constant(big_ratio(1, 18)), &d.constant(c.clone()), false, true));
    let zeta_reals: Vec<Real> = zetas.iter().map(Affine::to_real).collect();
    let c_real = real(&c);
    out.push(jensen_report(&c_real, &zeta_reals, c_ok));

    let ell = input.agents.clone().max(BigUint::one()) - 1u32;
    let ell_half = Real::from_biguint(&ell).mul_pow2(-1);
    let three = Real::from_u64(3);
    let mut sum = Real::zero();
    for z in &zeta_reals {
        let s = &three + z;
        sum = sum + (-(&c_real * &s * &s)).exp();
    }
    let aggregated = -(&ell_half * &sum);
    let flattened = -(&ell_half * &k_real * (-(&c_real * Real::from_u64(16))).exp());
    out.push(analytic(
        "-(l/2) sum_h exp(-c(3 + zeta_h)^2) <= -(kl/2) exp(-16c)",
        &aggregated,
        &flattened,
        c_ok,
    ));
    union_links(&mut out, "-(kl/2) exp(-16c) <= -m ln k", &flattened, m, k, hyp);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn input(sizes: Vec<u64>, own: usize, other: usize, d: Threshold) -> FairChainInput {
        FairChainInput { agents: BigUint::from(1000u32), bundle_sizes: sizes, own, other, d }
    }

    fn algebra_links_hold(links: &[BoundReport]) {
        for l in links.iter().filter(|l| l.kind == LinkKind::Algebra) {
            // links that depend on the theorem's population bound may fail at desk scale
            if l.preconditions_met {
                assert!(l.holds, "{l:?}");
            }
        }
    }

    #[test]
    fn ef_chain_at_admissible_sizes() {
        // m/k = 121, d = 11
        let d = Threshold::sqrt_ratio(242, 2).unwrap();
        let links = ef_event_chain_report(&input(vec![126, 116], 0, 1, d), &ChainOptions::default()).unwrap();
        for l in &links {
            if l.kind != LinkKind::Analytic || l.preconditions_met {
                assert!(l.holds || !l.preconditions_met, "{l:?}");
            }
        }
        algebra_links_hold(&links);
        assert!(links.iter().filter(|l| l.kind == LinkKind::Identity).all(|l| l.holds));
    }

    #[test]
    fn ef_restriction_names_bundle() {
        let d = Threshold::sqrt_ratio(242, 2).unwrap();
        let err = ef_event_chain_report(&input(vec![140, 102], 0, 1, d), &ChainOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Precondition(ref s) if s.contains("bundle 0")));
    }

    #[test]
    fn prop_chain_deficit() {
        // m = 162, k = 2: d = sqrt(162/8) = 4.5
        let d = Threshold::sqrt_ratio(162, 8).unwrap();
        let links = prop_event_chain_report(&input(vec![85, 77], 0, 0, d), &ChainOptions::default()).unwrap();
        algebra_links_hold(&links);
        let deficit = links.iter().find(|l| l.label.starts_with("d < (rest")).unwrap();
        assert!(deficit.holds);
        let e = links.iter().find(|l| l.label == "Pr[E] <= 1 - Pr[E1] Pr[E2]").unwrap();
        assert!(e.holds && !e.skipped);
    }

    #[test]
    fn propnew_chain_zetas() {
        // k = 4, m = 1024: d = 16 = m/(4k^2)
        let d = Threshold::sqrt_ratio(1024, 4).unwrap();
        let links = propnew_event_chain_report(&input(vec![256, 240, 260, 268], 1, 0, d), &ChainOptions::default()).unwrap();
        algebra_links_hold(&links);
        let sum = links.iter().find(|l| l.label == "sum_h zeta_h = k").unwrap();
        assert!(sum.holds);
        let jensen = links.iter().find(|l| l.label.starts_with("k exp(-16c)")).unwrap();
        assert!(jensen.holds && jensen.preconditions_met);
    }

    #[test]
    fn jensen_boundaries() {
        let c = big_int(6);
        let flat = jensen_link(&c, &vec![big_int(1); 5]).unwrap();
        assert!(flat.holds);
        let corner = jensen_link(&c, &[big_int(5), big_int(0), big_int(0), big_int(0), big_int(0)]).unwrap();
        assert!(corner.holds && corner.rhs_log > corner.lhs_log);
        assert!(jensen_link(&c, &[big_int(1), big_int(2)]).is_err());
        assert!(!jensen_link(&big_ratio(1, 20), &[big_int(1), big_int(1)]).unwrap().preconditions_met);
    }
}
