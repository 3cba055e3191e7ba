use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

/// A truncated p-adic number `p^ord * unit + O(p^(ord + digits))`.
///
/// `unit` is reduced modulo `p^digits` and is prime to `p`. When `digits == 0`
/// the value is only known to be divisible by `p^ord`, i.e. it is zero to
/// absolute precision `ord`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ApproxNum {
    pub(crate) p: u64,
    pub(crate) ord: i64,
    pub(crate) unit: u64,
    pub(crate) digits: u32,
}

impl ApproxNum {
    pub fn zero_to(p: u64, abs_precision: i64) -> Self {
        ApproxNum {
            p,
            ord: abs_precision,
            unit: 0,
            digits: 0,
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_indistinguishable_from_zero(&self) -> bool {
        self.digits == 0
    }

    /// Valuation, or `None` when indistinguishable from zero.
    pub fn ord(&self) -> Option<i64> {
        (self.digits > 0).then_some(self.ord)
    }

    pub fn unit(&self) -> u64 {
        self.unit
    }

    /// Relative precision (number of known unit digits).
    pub fn relative_precision(&self) -> u32 {
        self.digits
    }

    pub fn absolute_precision(&self) -> i64 {
        self.ord + self.digits as i64
    }

    /// Base-p digits of the unit part, least significant first.
    pub fn unit_digits(&self) -> Vec<u64> {
        let mut u = self.unit;
        (0..self.digits)
            .map(|_| {
                let d = u % self.p;
                u /= self.p;
                d
            })
            .collect()
    }

    pub fn from_digits(p: u64, ord: i64, digits: &[u64]) -> Option<Self> {
        if digits.is_empty() {
            return Some(Self::zero_to(p, ord));
        }
        if digits[0] == 0 || digits.iter().any(|&d| d >= p) {
            return None;
        }
        let mut unit: u64 = 0;
        for &d in digits.iter().rev() {
            unit = unit.checked_mul(p)?.checked_add(d)?;
        }
        crate::modarith::checked_pow(p, digits.len() as u32)?;
        Some(ApproxNum {
            p,
            ord,
            unit,
            digits: digits.len() as u32,
        })
    }
}

/// An element of Q_p: exact rational, or truncated with explicit precision.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum PadicScalar {
    Exact(Rational),
    Approx(ApproxNum),
}

impl PadicScalar {
    pub fn zero() -> Self {
        PadicScalar::Exact(Rational::zero())
    }

    pub fn one() -> Self {
        PadicScalar::Exact(Rational::one())
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            PadicScalar::Exact(r) => Some(r),
            PadicScalar::Approx(_) => None,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self, PadicScalar::Exact(r) if r.is_zero())
    }

    /// `None` means exact (infinite absolute precision).
    pub fn absolute_precision(&self) -> Option<i64> {
        match self {
            PadicScalar::Exact(_) => None,
            PadicScalar::Approx(a) => Some(a.absolute_precision()),
        }
    }
}

impl From<Rational> for PadicScalar {
    fn from(r: Rational) -> Self {
        PadicScalar::Exact(r)
    }
}

impl From<i64> for PadicScalar {
    fn from(n: i64) -> Self {
        PadicScalar::Exact(Rational::from_integer(n))
    }
}

impl fmt::Display for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PadicScalar::Exact(r) => write!(f, "{r}"),
            PadicScalar::Approx(a) if a.digits == 0 => write!(f, "O({}^{})", a.p, a.ord),
            PadicScalar::Approx(a) => {
                let digits: Vec<String> = a.unit_digits().iter().map(|d| d.to_string()).collect();
                write!(
                    f,
                    "{}^{} * [{}] + O({}^{})",
                    a.p,
                    a.ord,
                    digits.join(","),
                    a.p,
                    a.absolute_precision()
                )
            }
        }
    }
}

impl fmt::Debug for PadicScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct ApproxWire {
    ord: i64,
    digits: Vec<u64>,
    p: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarWire {
    Exact(Rational),
    Approx(ApproxWire),
}

impl Serialize for PadicScalar {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            PadicScalar::Exact(r) => ScalarWire::Exact(r.clone()).serialize(s),
            PadicScalar::Approx(a) => ScalarWire::Approx(ApproxWire {
                ord: a.ord,
                digits: a.unit_digits(),
                p: a.p,
            })
            .serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for PadicScalar {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match ScalarWire::deserialize(d)? {
            ScalarWire::Exact(r) => Ok(PadicScalar::Exact(r)),
            ScalarWire::Approx(w) => ApproxNum::from_digits(w.p, w.ord, &w.digits)
                .map(PadicScalar::Approx)
                .ok_or_else(|| serde::de::Error::custom("malformed approximate p-adic digits")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_round_trip() {
        let a = ApproxNum::from_digits(5, -1, &[1, 3, 0, 4]).unwrap();
        assert_eq!(a.unit, 1 + 3 * 5 + 4 * 125);
        assert_eq!(a.unit_digits(), vec![1, 3, 0, 4]);
        assert_eq!(a.absolute_precision(), 3);
        assert!(ApproxNum::from_digits(5, 0, &[0, 1]).is_none());
        assert!(ApproxNum::from_digits(5, 0, &[1, 5]).is_none());
    }

    #[test]
    fn wire_format() {
        let a = PadicScalar::Approx(ApproxNum::from_digits(3, 2, &[2, 1]).unwrap());
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(json, r#"{"ord":2,"digits":[2,1],"p":3}"#);
        let back: PadicScalar = serde_json::from_str(&json).unwrap();
        assert_eq!(back, a);
        let e: PadicScalar = serde_json::from_str(r#""-2/3""#).unwrap();
        assert_eq!(e.to_string(), "-2/3");
    }
}
