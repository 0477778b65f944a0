//! Exact numbers: small fractions for discrepancy values, and square-root
//! thresholds `d = sqrt(q)` with exact comparisons against affine forms in `d`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::hp::Real;

/// Exact fraction in lowest terms with a positive denominator.
pub type Rational = Ratio<i64>;

/// Formats a fraction as `p/q`, always with a denominator.
pub fn format_fraction(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q`, a plain integer, or a finite decimal such as `0.25`.
pub fn parse_fraction(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Validation(format!("not a fraction: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(Error::Validation(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let int_part: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 15 {
            return Err(bad());
        }
        let scale = 10i64.pow(frac.len() as u32);
        let frac_part: i64 = frac.parse().map_err(|_| bad())?;
        let magnitude = int_part.abs() * scale + frac_part;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(numer, scale));
    }
    let p: i64 = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

pub fn to_big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

pub fn big_ratio(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> BigRational {
    BigRational::new(numer.into(), denom.into())
}

pub fn big_int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

/// Floor of a nonnegative rational square root.
fn floor_sqrt(r: &BigRational) -> BigInt {
    debug_assert!(!r.is_negative());
    // sqrt(p/q) = sqrt(p*q)/q, and floor(x/q) = floor(floor(x)/q) for integer q > 0.
    let pq = r.numer() * r.denom();
    let root = pq.sqrt();
    root / r.denom()
}

fn floor_big(r: &BigRational) -> BigInt {
    r.floor().to_integer()
}

/// A nonnegative real threshold stored exactly as the square root of a rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Threshold {
    square: BigRational,
}

impl Threshold {
    pub fn sqrt_of(square: BigRational) -> Result<Self> {
        if square.is_negative() {
            return Err(Error::Domain(format!("square root of negative value {square}")));
        }
        Ok(Threshold { square })
    }

    /// `sqrt(numer / denom)`.
    pub fn sqrt_ratio(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Result<Self> {
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::Domain("zero denominator".into()));
        }
        Self::sqrt_of(BigRational::new(numer.into(), denom))
    }

    pub fn from_rational(r: &BigRational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::Domain(format!("negative threshold {r}")));
        }
        Ok(Threshold { square: r * r })
    }

    pub fn from_fraction(r: &Rational) -> Result<Self> {
        Self::from_rational(&to_big(r))
    }

    pub fn square(&self) -> &BigRational {
        &self.square
    }

    /// The value itself when it is rational.
    pub fn as_rational(&self) -> Option<BigRational> {
        let n = self.square.numer().sqrt();
        let d = self.square.denom().sqrt();
        (&n * &n == *self.square.numer() && &d * &d == *self.square.denom())
            .then(|| BigRational::new(n, d))
    }

    pub fn to_f64(&self) -> f64 {
        self.to_real().to_f64()
    }

    pub fn to_real(&self) -> Real {
        Real::from_big_rational(&self.square).sqrt()
    }

    /// Compares `d` with `x`.
    pub fn cmp_rational(&self, x: &BigRational) -> Ordering {
        if x.is_negative() {
            return Ordering::Greater;
        }
        self.square.cmp(&(x * x))
    }

    pub fn floor(&self) -> BigInt {
        floor_sqrt(&self.square)
    }

    /// Affine form `a + b·d` for this threshold.
    pub fn affine(&self, a: BigRational, b: BigRational) -> Affine<'_> {
        Affine { a, b, d: self }
    }

    pub fn constant(&self, a: BigRational) -> Affine<'_> {
        self.affine(a, BigRational::zero())
    }

    /// The form `1·d`.
    pub fn value(&self) -> Affine<'_> {
        self.affine(BigRational::zero(), BigRational::one())
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Some(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            None if self.square.is_integer() => write!(f, "sqrt({})", self.square.numer()),
            None => write!(f, "sqrt({}/{})", self.square.numer(), self.square.denom()),
        }
    }
}

/// `a + b·d`, where `d` is a fixed [`Threshold`]. All comparisons are exact.
#[derive(Clone, Debug)]
pub struct Affine<'t> {
    pub a: BigRational,
    pub b: BigRational,
    d: &'t Threshold,
}

impl<'t> Affine<'t> {
    pub fn add(&self, other: &Affine<'t>) -> Affine<'t> {
        Affine { a: &self.a + &other.a, b: &self.b + &other.b, d: self.d }
    }

    pub fn sub(&self, other: &Affine<'t>) -> Affine<'t> {
        Affine { a: &self.a - &other.a, b: &self.b - &other.b, d: self.d }
    }

    pub fn add_rational(&self, r: &BigRational) -> Affine<'t> {
        Affine { a: &self.a + r, b: self.b.clone(), d: self.d }
    }

    pub fn scale(&self, s: &BigRational) -> Affine<'t> {
        Affine { a: &self.a * s, b: &self.b * s, d: self.d }
    }

    /// Product, reduced to affine form using `d² = square`.
    pub fn mul(&self, other: &Affine<'t>) -> Affine<'t> {
        Affine {
            a: &self.a * &other.a + &self.b * &other.b * self.d.square(),
            b: &self.a * &other.b + &self.b * &other.a,
            d: self.d,
        }
    }

    /// Sign of the value, as an ordering against zero.
    pub fn signum(&self) -> Ordering {
        if self.b.is_zero() {
            return self.a.cmp(&BigRational::zero());
        }
        // a + b d = b (d + a/b)
        let pivot = -(&self.a / &self.b);
        let ord = self.d.cmp_rational(&pivot);
        if self.b.is_positive() {
            ord
        } else {
            ord.reverse()
        }
    }

    pub fn cmp_affine(&self, other: &Affine<'t>) -> Ordering {
        self.sub(other).signum()
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        self.add_rational(&-r).signum()
    }

    pub fn floor(&self) -> BigInt {
        let scaled = Threshold { square: &self.b * &self.b * self.d.square() };
        let root_floor = scaled.floor();
        let bd_floor = if self.b.is_negative() {
            // floor(-y) = -ceil(y)
            let exact = BigRational::from_integer(root_floor.clone());
            if &exact * &exact == *scaled.square() {
                -root_floor
            } else {
                -root_floor - 1
            }
        } else {
            root_floor
        };
        let base = floor_big(&self.a) + bd_floor;
        let next = BigRational::from_integer(&base + 1);
        if self.cmp_rational(&next) != Ordering::Less {
            base + 1
        } else {
            base
        }
    }

    pub fn ceil(&self) -> BigInt {
        let neg = Affine { a: -&self.a, b: -&self.b, d: self.d };
        -neg.floor()
    }

    /// Largest integer strictly below the value.
    pub fn largest_int_below(&self) -> BigInt {
        self.ceil() - 1
    }

    /// Smallest integer strictly above the value.
    pub fn smallest_int_above(&self) -> BigInt {
        self.floor() + 1
    }

    pub fn to_real(&self) -> Real {
        Real::from_big_rational(&self.a) + Real::from_big_rational(&self.b) * self.d.to_real()
    }

    pub fn to_f64(&self) -> f64 {
        self.to_real().to_f64()
    }
}

/// Clamps a big integer into `[lo, hi]` and converts to `u64`.
pub fn clamp_to_u64(x: &BigInt, lo: u64, hi: u64) -> u64 {
    if x.sign() == Sign::Minus {
        return lo;
    }
    match x.to_u64() {
        Some(v) => v.clamp(lo, hi),
        None => hi,
    }
}

pub fn biguint_to_rational(x: &BigUint) -> BigRational {
    BigRational::from_integer(BigInt::from(x.clone()))
}
