//! Extended-precision reals for log-space bound evaluation.
//!
//! Quantities such as `k^-m` with `k ~ 4e21` and the comparison
//! `k >= 3 + 6e^48` need far more than 53 bits of mantissa. [`Real`] wraps an
//! arbitrary-precision binary float at a fixed working precision.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;

/// Working precision in bits.
pub const PRECISION: usize = 320;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

#[derive(Clone)]
pub struct Real(BigFloat);

impl Real {
    pub fn zero() -> Self {
        Real(BigFloat::from_u64(0, PRECISION))
    }

    pub fn from_u64(v: u64) -> Self {
        Real(BigFloat::from_u64(v, PRECISION))
    }

    pub fn from_i64(v: i64) -> Self {
        Real(BigFloat::from_i64(v, PRECISION))
    }

    pub fn from_u128(v: u128) -> Self {
        Real(BigFloat::from_u128(v, PRECISION))
    }

    /// Exact conversion of a finite double.
    pub fn from_f64(v: f64) -> Self {
        Real(BigFloat::from_f64(v, PRECISION))
    }

    pub fn from_biguint(v: &BigUint) -> Self {
        let digits = v.to_u64_digits();
        let mut acc = Real::zero();
        for (i, w) in digits.iter().enumerate() {
            let part = Real::from_u64(*w).mul_pow2(64 * i as i64);
            acc = acc + part;
        }
        acc
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        let mag = Real::from_biguint(v.magnitude());
        if v.sign() == num_bigint::Sign::Minus {
            -mag
        } else {
            mag
        }
    }

    pub fn from_big_rational(r: &BigRational) -> Self {
        Real::from_bigint(r.numer()) / Real::from_bigint(r.denom())
    }

    /// `self · 2^shift`.
    pub fn mul_pow2(&self, shift: i64) -> Self {
        if shift == 0 || self.is_zero() {
            return self.clone();
        }
        let two = BigFloat::from_u64(2, PRECISION);
        let factor = two.powi(shift.unsigned_abs() as usize, PRECISION, RM);
        if shift > 0 {
            Real(self.0.mul(&factor, PRECISION, RM))
        } else {
            Real(self.0.div(&factor, PRECISION, RM))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_nan() && !self.0.is_inf()
    }

    pub fn exp(&self) -> Self {
        with_consts(|cc| Real(self.0.exp(PRECISION, RM, cc)))
    }

    /// Natural log; `ln 0 = -inf`.
    pub fn ln(&self) -> Self {
        with_consts(|cc| Real(self.0.ln(PRECISION, RM, cc)))
    }

    pub fn sqrt(&self) -> Self {
        Real(self.0.sqrt(PRECISION, RM))
    }

    pub fn abs(&self) -> Self {
        Real(self.0.abs())
    }

    pub fn floor(&self) -> Self {
        Real(self.0.floor())
    }

    pub fn ceil(&self) -> Self {
        Real(self.0.ceil())
    }

    /// `ln(exp(a) + exp(b))` without leaving log space.
    pub fn log_add_exp(a: &Real, b: &Real) -> Real {
        let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
        if !lo.is_finite() {
            return hi.clone();
        }
        let gap = lo - hi;
        // exp(gap) underflows far above this; ln(1+x) ~ x is then exact to working precision
        if gap < Real::from_i64(-1_000_000) {
            return hi.clone();
        }
        hi + &(Real::from_u64(1) + gap.exp()).ln()
    }

    /// Integer part of a nonnegative value, rounded toward zero.
    pub fn to_biguint_floor(&self) -> Option<BigUint> {
        let floor = self.0.floor();
        if floor.is_zero() {
            return Some(BigUint::zero());
        }
        let (words, _bits, sign, exp, _) = floor.as_raw_parts()?;
        if sign == Sign::Neg {
            return None;
        }
        let mantissa = BigUint::from_slice(
            &words
                .iter()
                .flat_map(|w| [*w as u32, (*w >> 32) as u32])
                .collect::<Vec<_>>(),
        );
        let shift = exp as i64 - 64 * words.len() as i64;
        Some(if shift >= 0 {
            mantissa << shift as usize
        } else {
            mantissa >> (-shift) as usize
        })
    }

    pub fn to_f64(&self) -> f64 {
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf_pos() {
            return f64::INFINITY;
        }
        if self.0.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        let Some((words, _bits, sign, exp, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        let Some(top) = words.last() else {
            return 0.0;
        };
        if *top == 0 {
            return 0.0;
        }
        // value = 0.m * 2^exp, with the top word holding the leading bits
        let lead = (*top as f64) * 2f64.powi(-63); // in [1, 2)
        let scale = exp as i64 - 1;
        let magnitude = if scale > 1023 {
            f64::INFINITY
        } else if scale < -1075 {
            0.0
        } else if scale < -1021 {
            lead * 2f64.powi(-1021) * 2f64.powi((scale + 1021) as i32)
        } else {
            lead * 2f64.powi(scale as i32)
        };
        if sign == Sign::Neg {
            -magnitude
        } else {
            magnitude
        }
    }

    /// `ln(1 - self)` for `0 <= self < 1`, keeping full relative precision for tiny arguments.
    pub fn ln_one_minus(&self) -> Real {
        if *self > Real::from_f64(2f64.powi(-20)) {
            return (Real::from_u64(1) - self).ln();
        }
        if self.is_zero() {
            return Real::zero();
        }
        // -(x + x^2/2 + x^3/3 + ...); each term is below 2^-20 of the previous one
        let cutoff = self.mul_pow2(-(PRECISION as i64) - 8);
        let mut sum = Real::zero();
        let mut power = self.clone();
        let mut j = 1u64;
        loop {
            let term = &power / &Real::from_u64(j);
            if term < cutoff {
                break;
            }
            sum = sum + term;
            power = power * self;
            j += 1;
        }
        -sum
    }

    /// Splits a positive finite value as `mantissa · 2^exponent`, mantissa in `[1/2, 1)`.
    pub fn frexp(&self) -> Option<(Real, i64)> {
        let exponent = self.0.exponent()?;
        let mut mantissa = self.0.clone();
        mantissa.set_exponent(0);
        Some((Real(mantissa), i64::from(exponent)))
    }

    /// `ln(self^power)` by square-and-multiply with the binary exponent tracked
    /// separately, so `power` may be far too large for the value to be representable.
    pub fn ln_pow(&self, power: &BigUint) -> Option<Real> {
        let (base, base_exp) = self.frexp()?;
        let mut mantissa = Real::from_u64(1);
        let mut exp2 = BigInt::zero();
        for bit in (0..power.bits()).rev() {
            mantissa = &mantissa * &mantissa;
            exp2 *= 2;
            if power.bit(bit) {
                mantissa = mantissa * &base;
                exp2 += base_exp;
            }
            let (m, e) = mantissa.frexp()?;
            mantissa = m;
            exp2 += e;
        }
        Some(mantissa.ln() + Real::from_bigint(&exp2) * Real::from_u64(2).ln())
    }

    /// Relative difference `|a-b| / max(|a|,|b|)`, zero when both are zero.
    pub fn relative_difference(a: &Real, b: &Real) -> Real {
        let scale = if a.abs() >= b.abs() { a.abs() } else { b.abs() };
        if scale.is_zero() {
            return Real::zero();
        }
        (a - b).abs() / scale
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({:e})", self.to_f64())
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.0.cmp(&other.0) == Some(0)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.cmp(&other.0).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real(self.0.$method(&rhs.0, PRECISION, RM))
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                Real(self.0.$method(&rhs.0, PRECISION, RM))
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real(self.0.$method(&rhs.0, PRECISION, RM))
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                Real(self.0.$method(&rhs.0, PRECISION, RM))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(self.0.neg())
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(self.0.clone().neg())
    }
}

/// `e^48`, `e^77`, ... as extended-precision reals.
pub fn exp_int(power: i64) -> Real {
    Real::from_i64(power).exp()
}
