//! Exact tails of `X ~ B(t, 1/2)`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::hp::Real;

/// `num / 2^shift`. Every probability here has a power-of-two denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    pub num: BigUint,
    pub shift: u64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { num: BigUint::zero(), shift: 0 }
    }

    pub fn one() -> Self {
        Dyadic { num: BigUint::one(), shift: 0 }
    }

    pub fn half() -> Self {
        Dyadic { num: BigUint::one(), shift: 1 }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic { num: &self.num * &other.num, shift: self.shift + other.shift }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        let shift = self.shift.max(other.shift);
        let a = &self.num << (shift - self.shift) as usize;
        let b = &other.num << (shift - other.shift) as usize;
        Dyadic { num: a + b, shift }
    }

    /// `1 - self`; saturates at zero.
    pub fn complement(&self) -> Dyadic {
        let whole = BigUint::one() << self.shift as usize;
        if self.num >= whole {
            return Dyadic::zero();
        }
        Dyadic { num: whole - &self.num, shift: self.shift }
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num.clone()), BigInt::from(BigUint::one() << self.shift as usize))
    }

    /// Natural log, computed as `ln(num) - shift·ln 2`; `-inf` for zero.
    pub fn ln(&self) -> Real {
        Real::from_biguint(&self.num).ln() - Real::from_u64(self.shift) * Real::from_u64(2).ln()
    }

    pub fn to_real(&self) -> Real {
        Real::from_biguint(&self.num).mul_pow2(-(self.shift as i64))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        let shift = self.shift.max(other.shift);
        let a = &self.num << (shift - self.shift) as usize;
        let b = &other.num << (shift - other.shift) as usize;
        Some(a.cmp(&b))
    }
}

/// Binomial coefficients `C(t, 0..=t)` with running sums.
#[derive(Clone, Debug)]
pub struct BinomialRow {
    t: u64,
    pmf: Vec<BigUint>,
    cdf: Vec<BigUint>,
}

impl BinomialRow {
    pub fn new(t: u64) -> Self {
        let mut pmf = Vec::with_capacity(t as usize + 1);
        let mut c = BigUint::one();
        pmf.push(c.clone());
        for i in 1..=t {
            c = c * BigUint::from(t - i + 1) / BigUint::from(i);
            pmf.push(c.clone());
        }
        let mut cdf = Vec::with_capacity(pmf.len());
        let mut acc = BigUint::zero();
        for p in &pmf {
            acc += p;
            cdf.push(acc.clone());
        }
        BinomialRow { t, pmf, cdf }
    }

    pub fn trials(&self) -> u64 {
        self.t
    }

    /// `Pr[X = x]`.
    pub fn pmf(&self, x: u64) -> Dyadic {
        match self.pmf.get(x as usize) {
            Some(c) => Dyadic { num: c.clone(), shift: self.t },
            None => Dyadic::zero(),
        }
    }

    /// `Pr[X <= j]` for any integer `j`.
    pub fn le(&self, j: &BigInt) -> Dyadic {
        if j.is_negative() {
            return Dyadic::zero();
        }
        match j.to_u64() {
            Some(j) if j < self.t => Dyadic { num: self.cdf[j as usize].clone(), shift: self.t },
            _ => Dyadic::one(),
        }
    }

    /// `Pr[X >= j]` for any integer `j`, by symmetry `Pr[X <= t - j]`.
    pub fn ge(&self, j: &BigInt) -> Dyadic {
        self.le(&(BigInt::from(self.t) - j))
    }
}

/// Exact `Pr[X <= j]` for `X ~ B(t, 1/2)`: 0 when `j < 0`, 1 when `j >= t`.
pub fn binom_tail_le(t: u64, j: i64) -> BigRational {
    BinomialRow::new(t).le(&BigInt::from(j)).to_rational()
}

/// Exact `Pr[X >= j]` for `X ~ B(t, 1/2)`.
pub fn binom_tail_ge(t: u64, j: i64) -> BigRational {
    BinomialRow::new(t).ge(&BigInt::from(j)).to_rational()
}
