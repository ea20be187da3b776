//! Exact rational arithmetic with a separated binary exponent.
//!
//! Every value is stored as `odd * 2^exp` where `odd` is a reduced fraction
//! whose numerator and denominator are both odd. Products of dyadic weights
//! such as `2^-j * 2^j` then cost a couple of word operations instead of
//! `j`-bit big-integer work, which is what makes million-term transcripts
//! practical.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer `{0}` in rational literal")]
    Integer(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// An exact rational number.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exact {
    odd: BigRational,
    exp: i64,
}

fn strip_twos(n: &BigInt) -> (BigInt, i64) {
    match n.trailing_zeros() {
        Some(tz) if tz > 0 => (n >> tz, tz as i64),
        _ => (n.clone(), 0),
    }
}

impl Exact {
    pub fn zero() -> Self {
        Exact {
            odd: BigRational::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Exact::from_integer(1)
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Exact::from_parts(n.into(), BigInt::one(), 0)
    }

    /// `num / den`. Panics on a zero denominator.
    pub fn ratio(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Exact::from_parts(num.into(), den.into(), 0)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        Exact {
            odd: BigRational::one(),
            exp: k,
        }
    }

    pub fn from_big_rational(r: &BigRational) -> Self {
        Exact::from_parts(r.numer().clone(), r.denom().clone(), 0)
    }

    fn from_parts(num: BigInt, den: BigInt, exp: i64) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Exact::zero();
        }
        let r = BigRational::new(num, den);
        let (n, tn) = strip_twos(r.numer());
        let (d, td) = strip_twos(r.denom());
        Exact {
            odd: BigRational::new_raw(n, d),
            exp: exp + tn - td,
        }
    }

    fn from_odd(odd: BigRational, exp: i64) -> Self {
        if odd.is_zero() {
            Exact::zero()
        } else {
            Exact { odd, exp }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.odd.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.odd.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.odd.is_negative()
    }

    pub fn abs(&self) -> Self {
        Exact {
            odd: self.odd.abs(),
            exp: self.exp,
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Exact {
            odd: self.odd.recip(),
            exp: -self.exp,
        }
    }

    /// Multiply by `2^k`.
    pub fn shl(&self, k: i64) -> Self {
        if self.is_zero() {
            return Exact::zero();
        }
        Exact {
            odd: self.odd.clone(),
            exp: self.exp + k,
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Materialize as an ordinary reduced fraction.
    pub fn to_big_rational(&self) -> BigRational {
        let (n, d) = (self.odd.numer(), self.odd.denom());
        if self.exp >= 0 {
            BigRational::new_raw(n << (self.exp as u64), d.clone())
        } else {
            BigRational::new_raw(n.clone(), d << (self.exp.unsigned_abs()))
        }
    }

    pub fn numer(&self) -> BigInt {
        self.to_big_rational().numer().clone()
    }

    pub fn denom(&self) -> BigInt {
        self.to_big_rational().denom().clone()
    }

    /// Smallest integer not below `self`.
    pub fn ceil(&self) -> BigInt {
        self.to_big_rational().ceil().to_integer()
    }

    pub fn is_integer(&self) -> bool {
        self.exp >= 0 && self.odd.is_integer() || self.is_zero()
    }

    /// Lossy conversion, for display only.
    pub fn to_f64(&self) -> f64 {
        let base = self.odd.to_f64().unwrap_or(f64::NAN);
        base * 2f64.powi(self.exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    /// log2 estimate `L` with `L - 1 < log2|self| < L + 1`.
    fn log2_estimate(&self) -> i64 {
        let bn = self.odd.numer().bits() as i64;
        let bd = self.odd.denom().bits() as i64;
        bn - bd + self.exp
    }

    fn aligned(&self, other: &Exact) -> (BigRational, BigRational, i64) {
        let e = self.exp.min(other.exp);
        let lift = |x: &Exact| -> BigRational {
            let shift = (x.exp - e) as u64;
            if shift == 0 {
                x.odd.clone()
            } else {
                BigRational::new_raw(x.odd.numer() << shift, x.odd.denom().clone())
            }
        };
        (lift(self), lift(other), e)
    }
}

impl Default for Exact {
    fn default() -> Self {
        Exact::zero()
    }
}

impl From<i64> for Exact {
    fn from(n: i64) -> Self {
        Exact::from_integer(n)
    }
}

impl From<u64> for Exact {
    fn from(n: u64) -> Self {
        Exact::from_integer(n)
    }
}

impl From<BigInt> for Exact {
    fn from(n: BigInt) -> Self {
        Exact::from_integer(n)
    }
}

impl Ord for Exact {
    fn cmp(&self, other: &Self) -> Ordering {
        let (sa, sb) = (self.odd.numer().sign(), other.odd.numer().sign());
        if sa != sb || self.is_zero() {
            return sa.cmp(&sb);
        }
        // same nonzero sign
        let (la, lb) = (self.log2_estimate(), other.log2_estimate());
        let magnitude = if la + 2 <= lb {
            Ordering::Less
        } else if lb + 2 <= la {
            Ordering::Greater
        } else {
            let (a, b, _) = self.abs().aligned(&other.abs());
            a.cmp(&b)
        };
        if self.is_negative() {
            magnitude.reverse()
        } else {
            magnitude
        }
    }
}

impl PartialOrd for Exact {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add<&Exact> for &Exact {
    type Output = Exact;
    fn add(self, rhs: &Exact) -> Exact {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let (a, b, e) = self.aligned(rhs);
        let s = a + b;
        if s.is_zero() {
            return Exact::zero();
        }
        Exact::from_parts(s.numer().clone(), s.denom().clone(), e)
    }
}

impl Sub<&Exact> for &Exact {
    type Output = Exact;
    fn sub(self, rhs: &Exact) -> Exact {
        self + &(-rhs)
    }
}

impl Mul<&Exact> for &Exact {
    type Output = Exact;
    fn mul(self, rhs: &Exact) -> Exact {
        if self.is_zero() || rhs.is_zero() {
            return Exact::zero();
        }
        // odd * odd stays odd after reduction
        Exact::from_odd(&self.odd * &rhs.odd, self.exp + rhs.exp)
    }
}

impl Div<&Exact> for &Exact {
    type Output = Exact;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Exact) -> Exact {
        self * &rhs.recip()
    }
}

impl Neg for &Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        Exact {
            odd: -&self.odd,
            exp: self.exp,
        }
    }
}

impl Neg for Exact {
    type Output = Exact;
    fn neg(self) -> Exact {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Exact> for Exact {
            type Output = Exact;
            fn $m(self, rhs: Exact) -> Exact {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Exact> for Exact {
            type Output = Exact;
            fn $m(self, rhs: &Exact) -> Exact {
                (&self).$m(rhs)
            }
        }
        impl $tr<Exact> for &Exact {
            type Output = Exact;
            fn $m(self, rhs: Exact) -> Exact {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Exact> for Exact {
    fn add_assign(&mut self, rhs: &Exact) {
        *self = &*self + rhs;
    }
}

impl AddAssign<Exact> for Exact {
    fn add_assign(&mut self, rhs: Exact) {
        *self = &*self + &rhs;
    }
}

impl Sum for Exact {
    fn sum<I: Iterator<Item = Exact>>(iter: I) -> Exact {
        iter.fold(Exact::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Exact> for Exact {
    fn sum<I: Iterator<Item = &'a Exact>>(iter: I) -> Exact {
        iter.fold(Exact::zero(), |acc, x| acc + x)
    }
}

/// Always `p/q` in lowest terms, `q >= 1`.
impl fmt::Display for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.to_big_rational();
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Debug for Exact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp.unsigned_abs() > 256 {
            write!(f, "({}/{})*2^{}", self.odd.numer(), self.odd.denom(), self.exp)
        } else {
            fmt::Display::fmt(self, f)
        }
    }
}

impl FromStr for Exact {
    type Err = ParseRationalError;

    /// Accepts `p/q` or a bare integer `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(ParseRationalError::Empty);
        }
        let int = |t: &str| -> Result<BigInt, ParseRationalError> {
            let ok = !t.is_empty()
                && t.strip_prefix('-')
                    .unwrap_or(t)
                    .chars()
                    .all(|c| c.is_ascii_digit())
                && t != "-";
            if !ok {
                return Err(ParseRationalError::Integer(t.to_string()));
            }
            t.parse::<BigInt>()
                .map_err(|_| ParseRationalError::Integer(t.to_string()))
        };
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (int(n)?, int(d)?),
            None => (int(s)?, BigInt::one()),
        };
        if d.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        Ok(Exact::from_parts(n, d, 0))
    }
}

impl Serialize for Exact {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Exact {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A non-negative quantity that may be `+inf`: the value of a series of
/// non-negative terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Extended {
    Finite(Exact),
    Infinite,
}

impl Extended {
    pub fn zero() -> Self {
        Extended::Finite(Exact::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn finite(&self) -> Option<&Exact> {
        match self {
            Extended::Finite(x) => Some(x),
            Extended::Infinite => None,
        }
    }

    pub fn into_finite(self) -> Option<Exact> {
        match self {
            Extended::Finite(x) => Some(x),
            Extended::Infinite => None,
        }
    }

    /// Product with the `0 * inf = 0` convention.
    pub fn scale(&self, k: &Exact) -> Extended {
        match self {
            _ if k.is_zero() => Extended::zero(),
            Extended::Finite(x) => Extended::Finite(x * k),
            Extended::Infinite => Extended::Infinite,
        }
    }
}

impl Add<&Extended> for &Extended {
    type Output = Extended;
    fn add(self, rhs: &Extended) -> Extended {
        match (self, rhs) {
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(a + b),
            _ => Extended::Infinite,
        }
    }
}

impl Add<&Exact> for &Extended {
    type Output = Extended;
    fn add(self, rhs: &Exact) -> Extended {
        match self {
            Extended::Finite(a) => Extended::Finite(a + rhs),
            Extended::Infinite => Extended::Infinite,
        }
    }
}

impl Add for Extended {
    type Output = Extended;
    fn add(self, rhs: Extended) -> Extended {
        &self + &rhs
    }
}

impl From<Exact> for Extended {
    fn from(x: Exact) -> Self {
        Extended::Finite(x)
    }
}

impl Ord for Extended {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.cmp(b),
            (Extended::Finite(_), Extended::Infinite) => Ordering::Less,
            (Extended::Infinite, Extended::Finite(_)) => Ordering::Greater,
            (Extended::Infinite, Extended::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(x) => fmt::Display::fmt(x, f),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> Exact {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print_lowest_terms() {
        assert_eq!(q("6/8").to_string(), "3/4");
        assert_eq!(q("5").to_string(), "5/1");
        assert_eq!(q("-2/4").to_string(), "-1/2");
        assert_eq!(q("0/7").to_string(), "0/1");
        assert_eq!(q("3/-6").to_string(), "-1/2");
        assert!("1/0".parse::<Exact>().is_err());
        assert!("".parse::<Exact>().is_err());
        assert!("a/2".parse::<Exact>().is_err());
        assert!("1.5".parse::<Exact>().is_err());
    }

    #[test]
    fn dyadic_products_cancel_cheaply() {
        let big = Exact::pow2(1_000_000);
        let small = Exact::pow2(-1_000_000);
        assert_eq!(&big * &small, Exact::one());
        assert!(small < big);
        assert!(small > Exact::zero());
    }

    #[test]
    fn ceil_and_integer() {
        assert_eq!(q("49/9").ceil(), BigInt::from(6));
        assert_eq!(q("4").ceil(), BigInt::from(4));
        assert_eq!(q("-1/2").ceil(), BigInt::from(0));
        assert!(q("8").is_integer());
        assert!(!q("1/2").is_integer());
    }

    #[test]
    fn extended_convention() {
        assert_eq!(Extended::Infinite.scale(&Exact::zero()), Extended::zero());
        assert_eq!(
            Extended::Finite(q("1/2")) + Extended::Infinite,
            Extended::Infinite
        );
        assert!(Extended::Finite(Exact::pow2(4000)) < Extended::Infinite);
    }

    fn arb_exact() -> impl Strategy<Value = Exact> {
        (-1000i64..1000, 1i64..1000, -80i64..80)
            .prop_map(|(n, d, e)| Exact::ratio(n, d).shl(e))
    }

    proptest! {
        #[test]
        fn agrees_with_big_rational(a in arb_exact(), b in arb_exact()) {
            let (ra, rb) = (a.to_big_rational(), b.to_big_rational());
            prop_assert_eq!((&a + &b).to_big_rational(), &ra + &rb);
            prop_assert_eq!((&a - &b).to_big_rational(), &ra - &rb);
            prop_assert_eq!((&a * &b).to_big_rational(), &ra * &rb);
            prop_assert_eq!(a.cmp(&b), ra.cmp(&rb));
            if !b.is_zero() {
                prop_assert_eq!((&a / &b).to_big_rational(), &ra / &rb);
            }
        }

        #[test]
        fn display_round_trips(a in arb_exact()) {
            let s = a.to_string();
            prop_assert_eq!(s.parse::<Exact>().unwrap(), a);
        }
    }
}
