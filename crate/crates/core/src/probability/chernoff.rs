//! Reverse Chernoff bound for `B(t, 1/2)`: for `ε ∈ (0, 1/2]` with `ε²t >= 6`,
//! both `Pr[X <= (t/2)(1-ε)]` and `Pr[X >= (t/2)(1+ε)]` are at least `exp(-9ε²t/2)`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hp::Real;
use crate::model::{BoundReport, LinkKind};

use super::binomial::BinomialRow;

fn check_domain(t: u64, eps: &BigRational) -> Result<()> {
    if !eps.is_positive() || *eps > BigRational::new(1.into(), 2.into()) {
        return Err(Error::Domain(format!("eps = {eps} is outside (0, 1/2]")));
    }
    let eps2t = eps * eps * BigRational::from_integer(t.into());
    if eps2t < BigRational::from_integer(6.into()) {
        return Err(Error::Domain(format!("eps^2 t = {eps2t} is below 6")));
    }
    Ok(())
}

/// `-9ε²t/2`, the log of the bound.
pub fn reverse_chernoff_log_bound(t: u64, eps: &BigRational) -> Result<Real> {
    check_domain(t, eps)?;
    let exponent = eps * eps * BigRational::from_integer(BigInt::from(9 * t as i128)) / BigRational::from_integer(2.into());
    Ok(-Real::from_big_rational(&exponent))
}

/// `exp(-9ε²t/2)`.
pub fn reverse_chernoff_bound(t: u64, eps: &BigRational) -> Result<Real> {
    Ok(reverse_chernoff_log_bound(t, eps)?.exp())
}

/// Checks both tails exactly. Returns `[lower, upper]`.
///
/// The lower tail is taken at `floor((t/2)(1-ε))`, the upper at `ceil((t/2)(1+ε))`.
pub fn verify_reverse_chernoff(t: u64, eps: &BigRational) -> Result<[BoundReport; 2]> {
    let bound = reverse_chernoff_log_bound(t, eps)?;
    let half_t = BigRational::new(BigInt::from(t), 2.into());
    let one = BigRational::one();
    let low_point = (&half_t * (&one - eps)).floor().to_integer();
    let high_point = (&half_t * (&one + eps)).ceil().to_integer();
    let row = BinomialRow::new(t);
    let report = |label: String, tail: Real| BoundReport {
        label,
        kind: LinkKind::ExactTail,
        lhs_log: bound.to_f64(),
        rhs_log: tail.to_f64(),
        holds: bound <= tail,
        preconditions_met: true,
        skipped: false,
    };
    Ok([
        report(format!("lower tail t={t} eps={eps}"), row.le(&low_point).ln()),
        report(format!("upper tail t={t} eps={eps}"), row.ge(&high_point).ln()),
    ])
}

/// One grid point of the sweep. `holds` is `None` when `(t, ε)` is outside the domain.
#[derive(Clone, Debug)]
pub struct GridPoint {
    pub t: u64,
    pub eps: BigRational,
    /// Log of the exact lower tail; the upper tail is equal by symmetry.
    pub exact_tail_log: Option<f64>,
    pub bound_log: Option<f64>,
    pub holds: Option<bool>,
}

/// Sweeps `t` in `t_min..=t_max` and `ε = step, 2·step, …, <= 1/2`.
pub fn chernoff_grid(t_min: u64, t_max: u64, eps_step: &BigRational) -> Result<Vec<GridPoint>> {
    if !eps_step.is_positive() {
        return Err(Error::Parameter(format!("eps step must be positive, got {eps_step}")));
    }
    let half = BigRational::new(1.into(), 2.into());
    let mut eps_values = Vec::new();
    let mut eps = eps_step.clone();
    while eps <= half {
        eps_values.push(eps.clone());
        eps += eps_step;
    }
    let points: Vec<(u64, BigRational)> = (t_min..=t_max)
        .flat_map(|t| eps_values.iter().map(move |e| (t, e.clone())))
        .collect();
    Ok(points
        .into_par_iter()
        .map(|(t, eps)| match verify_reverse_chernoff(t, &eps) {
            Ok([lower, upper]) => GridPoint {
                t,
                exact_tail_log: Some(lower.rhs_log),
                bound_log: Some(lower.lhs_log),
                holds: Some(lower.holds && upper.holds),
                eps,
            },
            Err(_) => GridPoint { t, eps, exact_tail_log: None, bound_log: None, holds: None },
        })
        .collect())
}

/// A nonnegative `ε` as a decimal string for reports, e.g. `0.05`, rounded to 12 places.
pub fn eps_decimal(eps: &BigRational) -> String {
    let scale = BigInt::from(10u64.pow(12));
    let scaled = (eps * BigRational::from_integer(scale.clone())).round().to_integer();
    let (int, frac) = (&scaled / &scale, &scaled % &scale);
    if frac.is_zero() {
        int.to_string()
    } else {
        format!("{int}.{}", format!("{:0>12}", frac.to_string()).trim_end_matches('0'))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn bound_values() {
        let b = reverse_chernoff_log_bound(100, &r(3, 10)).unwrap();
        assert!((b.to_f64() + 40.5).abs() < 1e-12);
        let b = reverse_chernoff_log_bound(24, &r(1, 2)).unwrap();
        assert!((b.to_f64() + 27.0).abs() < 1e-12);
        assert!(matches!(reverse_chernoff_bound(20, &r(1, 2)), Err(Error::Domain(_))));
        assert!(matches!(reverse_chernoff_bound(1000, &r(3, 4)), Err(Error::Domain(_))));
    }

    #[test]
    fn verified_points() {
        for (t, e) in [(100, r(3, 10)), (24, r(1, 2))] {
            let [lo, hi] = verify_reverse_chernoff(t, &e).unwrap();
            assert!(lo.holds && hi.holds);
            assert_eq!(lo.rhs_log, hi.rhs_log);
        }
        // t=100, eps=0.3: Pr[X <= 35] is about 1.8e-3
        let [lo, _] = verify_reverse_chernoff(100, &r(3, 10)).unwrap();
        assert!((lo.rhs_log.exp() - 1.76e-3).abs() < 1e-4);
    }

    #[test]
    fn grid_marks_inadmissible_points() {
        let grid = chernoff_grid(20, 30, &r(1, 20)).unwrap();
        let p = grid.iter().find(|g| g.t == 20 && g.eps == r(1, 2)).unwrap();
        assert_eq!(p.holds, None);
        assert!(grid.iter().filter_map(|g| g.holds).all(|h| h));
    }

    #[test]
    fn decimal_formatting() {
        assert_eq!(eps_decimal(&r(1, 20)), "0.05");
        assert_eq!(eps_decimal(&r(1, 2)), "0.5");
        assert_eq!(eps_decimal(&r(1, 1)), "1");
    }
}
