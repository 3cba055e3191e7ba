//! Exact rationals with an inline fast path.
//!
//! Values whose reduced numerator and denominator fit in an `i64` are stored
//! inline; everything else falls back to `BigRational`. The representation is
//! canonical, so structural equality is numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::modarith::{gcd_u128, gcd_u64, inv_mod, strip_p};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Rational(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// Reduced, `den > 0`.
    Small { num: i64, den: i64 },
    /// Only used when the reduced value does not fit `Small`.
    Big(BigRational),
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small { num: 0, den: 1 })
    }

    pub fn one() -> Self {
        Rational(Repr::Small { num: 1, den: 1 })
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Repr::Small { num: n, den: 1 })
    }

    /// `num / den`, reduced. Fails on a zero denominator.
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::from_i128(num as i128, den as i128))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize_big(BigRational::new(num, den)))
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        if num == 0 {
            return Self::zero();
        }
        if let (Ok(n), Ok(d)) = (i64::try_from(num), i64::try_from(den)) {
            if n != i64::MIN {
                let g = gcd_u64(n.unsigned_abs(), d as u64) as i64;
                return Rational(Repr::Small { num: n / g, den: d / g });
            }
        }
        let g = gcd_u128(num.unsigned_abs(), den as u128) as i128;
        let (num, den) = (num / g, den / g);
        match (i64::try_from(num), i64::try_from(den)) {
            (Ok(n), Ok(d)) => Rational(Repr::Small { num: n, den: d }),
            _ => Rational(Repr::Big(BigRational::new_raw(
                BigInt::from(num),
                BigInt::from(den),
            ))),
        }
    }

    fn normalize_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => Rational(Repr::Small { num: n, den: d }),
            _ => Rational(Repr::Big(r)),
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => {
                BigRational::new_raw(BigInt::from(*num), BigInt::from(*den))
            }
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => BigInt::from(*num),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => BigInt::from(*den),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small { den, .. } => *den == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn to_i64(&self) -> Option<i64> {
        match self.0 {
            Repr::Small { num, den: 1 } => Some(num),
            _ => None,
        }
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small { num, .. } => num.signum() as i32,
            Repr::Big(r) => {
                if r.is_negative() {
                    -1
                } else {
                    1
                }
            }
        }
    }

    pub fn neg(&self) -> Self {
        match &self.0 {
            Repr::Small { num, den } => Self::from_i128(-(*num as i128), *den as i128),
            Repr::Big(r) => Self::normalize_big(-r.clone()),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &other.0)
        {
            if b == d {
                return Self::from_i128(*a as i128 + *c as i128, *b as i128);
            }
            let n = (*a as i128) * (*d as i128) + (*c as i128) * (*b as i128);
            return Self::from_i128(n, (*b as i128) * (*d as i128));
        }
        Self::normalize_big(self.to_big() + other.to_big())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &other.0)
        {
            return Self::from_i128((*a as i128) * (*c as i128), (*b as i128) * (*d as i128));
        }
        Self::normalize_big(self.to_big() * other.to_big())
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.0 {
            Repr::Small { num, den } => Self::from_i128(*den as i128, *num as i128),
            Repr::Big(r) => Self::normalize_big(r.recip()),
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    /// Integer power; negative exponents invert (and fail on zero).
    pub fn pow(&self, exp: i64) -> Result<Self> {
        let base = if exp < 0 { self.recip()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Ok(acc)
    }

    /// `p^k` for any integer `k`.
    pub fn prime_power(p: u64, k: i64) -> Self {
        Rational::from_integer(p as i64)
            .pow(k)
            .expect("p is nonzero")
    }

    /// The p-adic valuation, `None` for zero.
    pub fn valuation(&self, p: u64) -> Option<i64> {
        match &self.0 {
            Repr::Small { num: 0, .. } => None,
            Repr::Small { num, den } => {
                let (vn, _) = strip_p(num.unsigned_abs(), p);
                let (vd, _) = strip_p(*den as u64, p);
                Some(vn as i64 - vd as i64)
            }
            Repr::Big(r) => {
                let pb = BigInt::from(p);
                Some(big_valuation(r.numer(), &pb) - big_valuation(r.denom(), &pb))
            }
        }
    }

    /// For `x = p^v * u / w` with `u, w` prime to `p`, returns `u * w^{-1} mod modulus`.
    ///
    /// `modulus` must be a power of `p` below 2^63. Zero maps to 0.
    pub fn unit_residue(&self, p: u64, modulus: u64) -> u64 {
        if modulus == 1 {
            return 0;
        }
        match &self.0 {
            Repr::Small { num: 0, .. } => 0,
            Repr::Small { num, den } => {
                let (_, u) = strip_p(num.unsigned_abs(), p);
                let (_, w) = strip_p(*den as u64, p);
                let r = crate::modarith::mul_mod(
                    u % modulus,
                    inv_mod(w % modulus, modulus).expect("unit is invertible"),
                    modulus,
                );
                if *num < 0 && r != 0 {
                    modulus - r
                } else {
                    r
                }
            }
            Repr::Big(r) => {
                let pb = BigInt::from(p);
                let mb = BigInt::from(modulus);
                let u = strip_big(r.numer(), &pb).mod_floor(&mb).to_u64().unwrap();
                let w = strip_big(r.denom(), &pb).mod_floor(&mb).to_u64().unwrap();
                crate::modarith::mul_mod(u, inv_mod(w, modulus).expect("unit is invertible"), modulus)
            }
        }
    }

    /// Residue of an integer-valued p-adic (`valuation >= 0`) modulo `modulus`.
    pub fn residue(&self, p: u64, modulus: u64) -> Option<u64> {
        match self.valuation(p) {
            None => Some(0),
            Some(v) if v < 0 => None,
            Some(v) => {
                let mut shift = 1u64;
                for _ in 0..v {
                    shift = shift.saturating_mul(p);
                    if shift >= modulus {
                        return Some(0);
                    }
                }
                Some(crate::modarith::mul_mod(
                    self.unit_residue(p, modulus),
                    shift % modulus,
                    modulus,
                ))
            }
        }
    }
}

fn big_valuation(n: &BigInt, p: &BigInt) -> i64 {
    let mut v = 0;
    let mut m = n.abs();
    while (&m % p).is_zero() {
        m /= p;
        v += 1;
    }
    v
}

fn strip_big(n: &BigInt, p: &BigInt) -> BigInt {
    let mut m = n.clone();
    while (&m % p).is_zero() {
        m /= p;
    }
    m
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &other.0)
        {
            return ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128)));
        }
        self.to_big().cmp(&other.to_big())
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den: 1 } => write!(f, "{num}"),
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
            Repr::Big(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `"a"` or `"a/b"` with an optional sign on either part.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseRational(s.to_string());
        let t = s.trim();
        let (n, d) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: BigInt = n.parse().map_err(|_| bad())?;
        let den: BigInt = d.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Rational::from_big(num, den)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Lit {
            Str(String),
            Int(i64),
        }
        match Lit::deserialize(d)? {
            Lit::Str(s) => s.parse().map_err(serde::de::Error::custom),
            Lit::Int(n) => Ok(Rational::from_integer(n)),
        }
    }
}
