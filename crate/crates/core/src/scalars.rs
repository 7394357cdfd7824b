//! Exact coefficients: rationals and prime fields.
//!
//! Every [`Scalar`] carries its own characteristic, so values over several
//! primes can live side by side in one process. Arithmetic between values of
//! different characteristic is rejected: the `checked_*` methods return
//! [`Error::CharacteristicMismatch`], the operator impls panic.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The coefficient field: `Q` or `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Prime(u64),
}

/// Largest modulus accepted, so that products of residues fit in a `u64`.
pub const MAX_PRIME: u64 = u32::MAX as u64;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        if !is_prime(p) || p > MAX_PRIME {
            return Err(Error::NotPrime(p));
        }
        Ok(Field::Prime(p))
    }

    /// Characteristic, with `0` for the rationals.
    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => p,
        }
    }

    pub fn from_characteristic(c: u64) -> Result<Field> {
        if c == 0 {
            Ok(Field::Rational)
        } else {
            Field::prime(c)
        }
    }

    pub fn zero(self) -> Scalar {
        self.int(0)
    }

    pub fn one(self) -> Scalar {
        self.int(1)
    }

    pub fn int(self, n: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(Rat::int(n)),
            Field::Prime(p) => Scalar::Modular(Fp::new(n.rem_euclid(p as i64) as u64, p)),
        }
    }

    pub fn big_int(self, n: &BigInt) -> Scalar {
        match self {
            Field::Rational => Scalar::Rational(Rat::from_big(BigRational::from_integer(n.clone()))),
            Field::Prime(p) => {
                let r = n.mod_floor(&BigInt::from(p));
                Scalar::Modular(Fp::new(r.to_u64().expect("residue fits"), p))
            }
        }
    }

    /// Image of a rational number; fails when `p` divides the denominator.
    pub fn rational(self, q: &BigRational) -> Result<Scalar> {
        match self {
            Field::Rational => Ok(Scalar::Rational(Rat::from_big(q.clone()))),
            Field::Prime(p) => reduce_rational(q, p),
        }
    }

    /// Parses `"-3"`, `"1/2"` etc. into this field.
    pub fn parse(self, s: &str) -> Result<Scalar> {
        let q = parse_rational(s)?;
        self.rational(&q)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "0"),
            Field::Prime(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for Field {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u64(self.characteristic())
    }
}

impl<'de> Deserialize<'de> for Field {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let c = u64::deserialize(d)?;
        Field::from_characteristic(c).map_err(serde::de::Error::custom)
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(s).map_err(|_| bad())?,
        )),
    }
}

/// An element of `F_p`, stored as its canonical representative in `0..p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp {
    value: u64,
    p: u64,
}

impl Fp {
    pub fn new(value: u64, p: u64) -> Fp {
        Fp { value: value % p, p }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    pub fn pow(self, mut e: u64) -> Fp {
        let mut base = self.value;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        Fp::new(acc, self.p)
    }

    pub fn inv(self) -> Option<Fp> {
        if self.value == 0 {
            None
        } else {
            Some(self.pow(self.p - 2))
        }
    }
}

/// A rational number, held in machine words while it fits.
///
/// The representation is canonical (reduced, positive denominator, small
/// whenever possible), so the derived equality and hash agree with value
/// equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rat(Q);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Q {
    Small(i64, i64),
    Big(Box<BigRational>),
}

impl Rat {
    pub fn int(n: i64) -> Rat {
        Rat(Q::Small(n, 1))
    }

    pub fn from_big(q: BigRational) -> Rat {
        match (q.numer().to_i64(), q.denom().to_i64()) {
            (Some(n), Some(d)) => Rat(Q::Small(n, d)),
            _ => Rat(Q::Big(Box::new(q))),
        }
    }

    fn from_i128(n: i128, d: i128) -> Rat {
        let g = n.gcd(&d);
        let (mut n, mut d) = if g > 1 { (n / g, d / g) } else { (n, d) };
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => Rat(Q::Small(n, d)),
            _ => Rat(Q::Big(Box::new(BigRational::new(BigInt::from(n), BigInt::from(d))))),
        }
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Q::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Q::Big(q) => (**q).clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Q::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Q::Small(1, 1))
    }

    fn add(&self, other: &Rat) -> Rat {
        match (&self.0, &other.0) {
            (Q::Small(a, b), Q::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    Rat::from_i128(a + c, b)
                } else {
                    match (a * d).checked_add(c * b) {
                        Some(n) => Rat::from_i128(n, b * d),
                        None => Rat::from_big(self.to_big() + other.to_big()),
                    }
                }
            }
            _ => Rat::from_big(self.to_big() + other.to_big()),
        }
    }

    fn mul(&self, other: &Rat) -> Rat {
        match (&self.0, &other.0) {
            (Q::Small(a, b), Q::Small(c, d)) => {
                Rat::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rat::from_big(self.to_big() * other.to_big()),
        }
    }

    fn neg(&self) -> Rat {
        match &self.0 {
            Q::Small(n, d) => Rat::from_i128(-(*n as i128), *d as i128),
            Q::Big(q) => Rat::from_big(-&**q),
        }
    }

    fn recip(&self) -> Rat {
        match &self.0 {
            Q::Small(n, d) => Rat::from_i128(*d as i128, *n as i128),
            Q::Big(q) => Rat::from_big(q.recip()),
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Q::Small(n, 1) => write!(f, "{n}"),
            Q::Small(n, d) => write!(f, "{n}/{d}"),
            Q::Big(q) => write!(f, "{q}"),
        }
    }
}

/// An exact coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rational(Rat),
    Modular(Fp),
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Rational(_) => Field::Rational,
            Scalar::Modular(x) => Field::Prime(x.p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_zero(),
            Scalar::Modular(x) => x.value == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(q) => q.is_one(),
            Scalar::Modular(x) => x.value == 1,
        }
    }

    fn mismatch(&self, other: &Scalar) -> Error {
        Error::CharacteristicMismatch {
            left: self.field().characteristic(),
            right: other.field().characteristic(),
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a.add(b))),
            (Scalar::Modular(a), Scalar::Modular(b)) if a.p == b.p => {
                Ok(Scalar::Modular(Fp::new(a.value + b.value, a.p)))
            }
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Ok(Scalar::Rational(a.mul(b))),
            (Scalar::Modular(a), Scalar::Modular(b)) if a.p == b.p => {
                Ok(Scalar::Modular(Fp::new(a.value * b.value, a.p)))
            }
            _ => Err(self.mismatch(other)),
        }
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.checked_add(&-other)
    }

    pub fn inv(&self) -> Result<Scalar> {
        match self {
            Scalar::Rational(q) if !q.is_zero() => Ok(Scalar::Rational(q.recip())),
            Scalar::Modular(x) => x.inv().map(Scalar::Modular).ok_or(Error::DivisionByZero),
            _ => Err(Error::DivisionByZero),
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        self.checked_mul(&other.inv()?)
    }

    pub fn pow(&self, e: u64) -> Scalar {
        match self {
            Scalar::Rational(q) => {
                let mut acc = Rat::int(1);
                for _ in 0..e {
                    acc = acc.mul(q);
                }
                Scalar::Rational(acc)
            }
            Scalar::Modular(x) => Scalar::Modular(x.pow(e)),
        }
    }

    /// The integer value when this is `F_p` or an integral rational.
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Rational(Rat(Q::Small(n, 1))) => Some(*n),
            Scalar::Rational(_) => None,
            Scalar::Modular(x) => Some(x.value as i64),
        }
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            Scalar::Rational(q) => Some(q.to_big()),
            Scalar::Modular(_) => None,
        }
    }

    /// Reduction of a rational value to `F_p`; identity on `F_p` values of the same `p`.
    pub fn reduce(&self, p: u64) -> Result<Scalar> {
        match self {
            Scalar::Rational(q) => reduce_rational(&q.to_big(), p),
            Scalar::Modular(x) if x.p == p => Ok(self.clone()),
            Scalar::Modular(x) => Err(Error::CharacteristicMismatch { left: x.p, right: p }),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(q) => write!(f, "{q}"),
            Scalar::Modular(x) => write!(f, "{}", x.value),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(q) => Scalar::Rational(q.neg()),
            Scalar::Modular(x) => Scalar::Modular(Fp::new(x.p - x.value, x.p)),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("scalar characteristic mismatch")
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        match (&mut *self, rhs) {
            (Scalar::Modular(a), Scalar::Modular(b)) if a.p == b.p => {
                *a = Fp::new(a.value + b.value, a.p);
            }
            (Scalar::Rational(a), Scalar::Rational(b)) => *a = a.add(b),
            _ => panic!("scalar characteristic mismatch"),
        }
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self += &-rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

/// `(numerator mod p) * (denominator mod p)^-1`.
pub fn reduce_rational(q: &BigRational, p: u64) -> Result<Scalar> {
    let field = Field::prime(p)?;
    let den = field.big_int(q.denom());
    if den.is_zero() {
        return Err(Error::DenominatorDivisibleByP { value: q.to_string(), p });
    }
    field.big_int(q.numer()).checked_div(&den)
}

/// `n(n-1)...(n-j+1)/j!` for an integer `n` of either sign.
pub fn binomial_int(n: i64, j: u64) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for t in 0..j {
        num *= BigInt::from(n) - BigInt::from(t);
        den *= BigInt::from(t + 1);
    }
    num / den
}

/// Small-argument binomial in machine integers; `None` on overflow.
pub fn binomial_i128(n: i64, j: u64) -> Option<i128> {
    let mut acc: i128 = 1;
    for t in 0..j as i128 {
        // acc * (n - t) is divisible by t + 1 at every step
        acc = acc.checked_mul(n as i128 - t)? / (t + 1);
    }
    Some(acc)
}

/// `binomial_int(n, j)` as an element of `field`.
pub fn binomial(n: i64, j: u64, field: Field) -> Scalar {
    match binomial_i128(n, j) {
        Some(v) => match field {
            Field::Prime(p) => Scalar::Modular(Fp::new(v.rem_euclid(p as i128) as u64, p)),
            Field::Rational => field.big_int(&BigInt::from(v)),
        },
        None => field.big_int(&binomial_int(n, j)),
    }
}

/// `binomial_int(n, j) mod p`.
pub fn binomial_mod(n: i64, j: u64, p: u64) -> Result<Scalar> {
    Ok(binomial(n, j, Field::prime(p)?))
}

/// Lucas' theorem: product of digit-wise binomials in base `p`; `n >= 0` only.
pub fn binomial_lucas(n: u64, j: u64, p: u64) -> Result<Scalar> {
    let field = Field::prime(p)?;
    let (mut n, mut j) = (n, j);
    let mut acc = field.one();
    while n > 0 || j > 0 {
        let (nd, jd) = (n % p, j % p);
        if jd > nd {
            return Ok(field.zero());
        }
        acc = acc * binomial(nd as i64, jd, field);
        n /= p;
        j /= p;
    }
    Ok(acc)
}

/// Base-`p` digits, least significant first.
pub fn p_adic_digits(mut n: u64, p: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while n > 0 {
        out.push(n % p);
        n /= p;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(reduce_rational(&q(1, 2), 5).unwrap(), Field::Prime(5).int(3));
        assert_eq!(reduce_rational(&q(0, 1), 7).unwrap(), Field::Prime(7).zero());
        assert!(matches!(
            reduce_rational(&q(1, 5), 5),
            Err(Error::DenominatorDivisibleByP { p: 5, .. })
        ));
        assert_eq!(reduce_rational(&q(1, 2), 4), Err(Error::NotPrime(4)));
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial_int(4, 2), BigInt::from(6));
        assert_eq!(binomial_int(-1, 3), BigInt::from(-1));
        for n in [-7, 0, 3, 100] {
            assert_eq!(binomial_int(n, 0), BigInt::from(1));
        }
        assert!(binomial_mod(5, 2, 5).unwrap().is_zero());
        assert!(binomial_mod(8, 1, 7).unwrap().is_one());
        assert!(binomial_mod(6, 3, 5).unwrap().is_zero());
        assert!(binomial_lucas(6, 3, 5).unwrap().is_zero());
    }

    #[test]
    fn mixing_characteristics_is_rejected() {
        let a = Field::Prime(5).int(1);
        let b = Field::Prime(7).int(1);
        assert_eq!(
            a.checked_add(&b),
            Err(Error::CharacteristicMismatch { left: 5, right: 7 })
        );
        assert!(a.checked_mul(&Field::Rational.one()).is_err());
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(Field::Rational.parse("-3/6").unwrap().to_string(), "-1/2");
        assert_eq!(Field::Prime(5).parse("-2").unwrap().to_string(), "3");
        assert!(Field::Prime(5).parse("1/10").is_err());
        assert!(Field::Rational.parse("x").is_err());
    }

    #[test]
    fn primes() {
        assert!(Field::prime(1).is_err());
        assert!(Field::prime(9).is_err());
        assert!(Field::prime(7).is_ok());
    }

    fn small_prime() -> impl Strategy<Value = u64> {
        prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])
    }

    proptest! {
        #[test]
        fn lucas_agrees_with_direct(n in 0u64..200, j in 0u64..200, p in small_prime()) {
            prop_assume!(j <= n);
            prop_assert_eq!(binomial_mod(n as i64, j, p).unwrap(), binomial_lucas(n, j, p).unwrap());
        }

        #[test]
        fn pascal_any_sign(n in -60i64..60, j in 1u64..20) {
            prop_assert_eq!(binomial_int(n, j), binomial_int(n - 1, j) + binomial_int(n - 1, j - 1));
        }

        #[test]
        fn reduction_is_a_ring_map(
            a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50,
            p in prop::sample::select(vec![53u64, 59, 61])
        ) {
            let (x, y) = (q(a, b), q(c, d));
            let r = |v: &BigRational| reduce_rational(v, p).unwrap();
            prop_assert_eq!(r(&(&x + &y)), r(&x) + r(&y));
            prop_assert_eq!(r(&(&x * &y)), r(&x) * r(&y));
        }

        #[test]
        fn machine_binomial_matches_bigint(n in -40i64..40, j in 0u64..15) {
            prop_assert_eq!(BigInt::from(binomial_i128(n, j).unwrap()), binomial_int(n, j));
        }
    }
}
