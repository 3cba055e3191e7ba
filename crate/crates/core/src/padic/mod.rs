//! Arithmetic in Q_p: valuation, norm, angular components, cosets of
//! `Q_{m,n}` and root extraction.
//!
//! Everything goes through a [`Qp`] context which fixes the prime. Exact
//! rationals stay exact; as soon as an operand is truncated the result is
//! truncated too, and its reported precision is never larger than what the
//! inputs justify.

mod hensel;
mod scalar;

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use scalar::{ApproxNum, PadicScalar};

use crate::error::{Error, Result};
use crate::modarith::{checked_pow, inv_mod, is_prime, max_digits, mul_mod, strip_p};
use crate::rational::Rational;

/// `ord(x)`, with `ord(0) = +inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    PlusInfinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::PlusInfinity => None,
        }
    }

    pub fn add(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::PlusInfinity,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::PlusInfinity => write!(f, "+inf"),
        }
    }
}

/// A non-negative real of the form `p^k` or `0`.
///
/// Used for norms (`|x| = p^(-ord x)`), distances, Lipschitz ratios and
/// constants. Ordering is the ordering of the reals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Norm {
    Zero,
    Pow(i64),
}

impl Norm {
    pub const ONE: Norm = Norm::Pow(0);

    pub fn from_valuation(v: Valuation) -> Norm {
        match v {
            Valuation::Finite(v) => Norm::Pow(-v),
            Valuation::PlusInfinity => Norm::Zero,
        }
    }

    /// The closed-ball radius `p^(-k)`.
    pub fn radius(k: i64) -> Norm {
        Norm::Pow(-k)
    }

    pub fn exponent(self) -> Option<i64> {
        match self {
            Norm::Zero => None,
            Norm::Pow(k) => Some(k),
        }
    }

    pub fn mul(self, other: Norm) -> Norm {
        match (self, other) {
            (Norm::Pow(a), Norm::Pow(b)) => Norm::Pow(a + b),
            _ => Norm::Zero,
        }
    }

    pub fn to_rational(self, p: u64) -> Rational {
        match self {
            Norm::Zero => Rational::zero(),
            Norm::Pow(k) => Rational::prime_power(p, k),
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Norm::Zero => write!(f, "0"),
            Norm::Pow(k) => write!(f, "p^{k}"),
        }
    }
}

impl Serialize for Norm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Norm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        if s == "0" {
            return Ok(Norm::Zero);
        }
        s.strip_prefix("p^")
            .and_then(|k| k.parse().ok())
            .map(Norm::Pow)
            .ok_or_else(|| serde::de::Error::custom(format!("bad p-power {s:?}")))
    }
}

/// An element of `O/(p^depth)` that is either 0 or a unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AngularClass {
    pub p: u64,
    pub depth: u32,
    pub residue: u64,
}

impl AngularClass {
    pub fn new(p: u64, depth: u32, residue: u64) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidAngularClass("depth must be at least 1".into()));
        }
        let modulus = checked_pow(p, depth).ok_or_else(|| Error::PrecisionTooLarge {
            requested: depth,
            max: max_digits(p),
        })?;
        if residue >= modulus || (residue != 0 && residue.is_multiple_of(p)) {
            return Err(Error::InvalidAngularClass(format!(
                "residue {residue} at depth {depth} for p = {p}"
            )));
        }
        Ok(AngularClass { p, depth, residue })
    }

    pub fn modulus(&self) -> u64 {
        checked_pow(self.p, self.depth).expect("validated at construction")
    }

    pub fn is_zero(&self) -> bool {
        self.residue == 0
    }

    pub fn mul(&self, other: &AngularClass) -> AngularClass {
        debug_assert_eq!((self.p, self.depth), (other.p, other.depth));
        AngularClass {
            residue: mul_mod(self.residue, other.residue, self.modulus()),
            ..*self
        }
    }

    pub fn inverse(&self) -> Result<AngularClass> {
        let residue = inv_mod(self.residue, self.modulus()).ok_or(Error::ZeroClass)?;
        Ok(AngularClass { residue, ..*self })
    }

    /// Reduce to a shallower depth.
    pub fn truncate(&self, depth: u32) -> AngularClass {
        let depth = depth.min(self.depth).max(1);
        let modulus = checked_pow(self.p, depth).expect("shallower than a valid depth");
        AngularClass {
            depth,
            residue: self.residue % modulus,
            ..*self
        }
    }
}

/// The coset `xi * Q_{m,n}`, or `{0}` when `xi = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CosetSpec {
    pub xi: Rational,
    pub m: u32,
    pub n: u32,
}

impl CosetSpec {
    pub fn new(xi: Rational, m: u32, n: u32) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::InvalidCell(format!("coset needs m, n >= 1 (m={m}, n={n})")));
        }
        Ok(CosetSpec { xi, m, n })
    }

    pub fn zero() -> Self {
        CosetSpec {
            xi: Rational::zero(),
            m: 1,
            n: 1,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.xi.is_zero()
    }

    pub fn ord_xi(&self, p: u64) -> Valuation {
        match self.xi.valuation(p) {
            Some(v) => Valuation::Finite(v),
            None => Valuation::PlusInfinity,
        }
    }

    /// The residue class of admissible orders, `ord(xi) mod n`.
    pub fn order_class(&self, p: u64) -> Option<i64> {
        self.xi.valuation(p).map(|v| v.rem_euclid(self.n as i64))
    }

    pub fn ac_xi(&self, qp: &Qp) -> Result<AngularClass> {
        qp.ac(&PadicScalar::Exact(self.xi.clone()), self.m)
    }
}

/// The field Q_p for a fixed prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Qp {
    p: u64,
    max_digits: u32,
}

impl Qp {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) || p >= 1 << 31 {
            return Err(Error::NotPrime(p));
        }
        Ok(Qp {
            p,
            max_digits: max_digits(p),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Largest relative precision a truncated value can carry.
    pub fn max_digits(&self) -> u32 {
        self.max_digits
    }

    pub fn modulus(&self, k: u32) -> Result<u64> {
        checked_pow(self.p, k).ok_or(Error::PrecisionTooLarge {
            requested: k,
            max: self.max_digits,
        })
    }

    pub fn prime_power(&self, k: i64) -> Rational {
        Rational::prime_power(self.p, k)
    }

    pub fn ord(&self, x: &PadicScalar) -> Result<Valuation> {
        match x {
            PadicScalar::Exact(r) => Ok(match r.valuation(self.p) {
                Some(v) => Valuation::Finite(v),
                None => Valuation::PlusInfinity,
            }),
            PadicScalar::Approx(a) => a
                .ord()
                .map(Valuation::Finite)
                .ok_or(Error::IndeterminateValuation(a.ord)),
        }
    }

    /// `ord` of a value required to be nonzero.
    pub fn ord_finite(&self, x: &PadicScalar) -> Result<i64> {
        self.ord(x)?
            .finite()
            .ok_or_else(|| Error::OutsideDomain(format!("{x} (zero has no finite order)")))
    }

    pub fn norm(&self, x: &PadicScalar) -> Result<Norm> {
        Ok(Norm::from_valuation(self.ord(x)?))
    }

    /// Max-norm of a tuple.
    pub fn norm_tuple(&self, xs: &[PadicScalar]) -> Result<Norm> {
        xs.iter().try_fold(Norm::Zero, |acc, x| Ok(acc.max(self.norm(x)?)))
    }

    /// The angular component `x p^(-ord x) mod p^m`, and 0 for 0.
    pub fn ac(&self, x: &PadicScalar, m: u32) -> Result<AngularClass> {
        let modulus = self.modulus(m)?;
        let residue = match x {
            PadicScalar::Exact(r) => r.unit_residue(self.p, modulus),
            PadicScalar::Approx(a) => {
                if a.digits == 0 {
                    return Err(Error::IndeterminateValuation(a.ord));
                }
                if a.digits < m {
                    return Err(Error::InsufficientPrecision {
                        needed: m as i64,
                        available: a.digits as i64,
                    });
                }
                a.unit % modulus
            }
        };
        AngularClass::new(self.p, m, residue)
    }

    /// The canonical representative of a nonzero class: the integer in `[1, p^m)`.
    pub fn lift_ac(&self, a: &AngularClass) -> Result<PadicScalar> {
        if a.is_zero() {
            return Err(Error::ZeroClass);
        }
        Ok(PadicScalar::Exact(Rational::from_integer(a.residue as i64)))
    }

    pub fn in_coset(&self, x: &PadicScalar, coset: &CosetSpec) -> Result<bool> {
        if coset.is_zero() {
            return match x {
                PadicScalar::Exact(r) => Ok(r.is_zero()),
                PadicScalar::Approx(a) if a.digits == 0 => Err(Error::IndeterminateValuation(a.ord)),
                PadicScalar::Approx(_) => Ok(false),
            };
        }
        let v = match self.ord(x)? {
            Valuation::PlusInfinity => return Ok(false),
            Valuation::Finite(v) => v,
        };
        let vxi = coset.xi.valuation(self.p).expect("nonzero xi");
        if (v - vxi).rem_euclid(coset.n as i64) != 0 {
            return Ok(false);
        }
        Ok(self.ac(x, coset.m)? == coset.ac_xi(self)?)
    }

    /// Truncate to `digits` of relative precision. Exact zero has no relative
    /// precision and is returned as zero to absolute precision `zero_abs`.
    pub fn to_approx(&self, x: &PadicScalar, digits: u32, zero_abs: i64) -> Result<ApproxNum> {
        let digits = digits.min(self.max_digits);
        match x {
            PadicScalar::Approx(a) => {
                if a.digits <= digits {
                    Ok(*a)
                } else {
                    Ok(ApproxNum {
                        unit: a.unit % self.modulus(digits)?,
                        digits,
                        ..*a
                    })
                }
            }
            PadicScalar::Exact(r) => match r.valuation(self.p) {
                None => Ok(ApproxNum::zero_to(self.p, zero_abs)),
                Some(v) => Ok(ApproxNum {
                    p: self.p,
                    ord: v,
                    unit: r.unit_residue(self.p, self.modulus(digits)?),
                    digits,
                }),
            },
        }
    }

    pub fn neg(&self, x: &PadicScalar) -> PadicScalar {
        match x {
            PadicScalar::Exact(r) => PadicScalar::Exact(r.neg()),
            PadicScalar::Approx(a) if a.digits == 0 => PadicScalar::Approx(*a),
            PadicScalar::Approx(a) => {
                let m = self.modulus(a.digits).expect("valid approx");
                PadicScalar::Approx(ApproxNum {
                    unit: m - a.unit,
                    ..*a
                })
            }
        }
    }

    pub fn add(&self, x: &PadicScalar, y: &PadicScalar) -> PadicScalar {
        if let (PadicScalar::Exact(a), PadicScalar::Exact(b)) = (x, y) {
            return PadicScalar::Exact(a.add(b));
        }
        let abs = match (x.absolute_precision(), y.absolute_precision()) {
            (Some(a), Some(b)) => a.min(b),
            (Some(a), None) | (None, Some(a)) => a,
            (None, None) => unreachable!(),
        };
        // Lowest order among operands that are known to be nonzero.
        let base = [x, y]
            .iter()
            .filter_map(|s| self.ord(s).ok().and_then(Valuation::finite))
            .min();
        let base = match base {
            Some(v) if v < abs => v,
            _ => return PadicScalar::Approx(ApproxNum::zero_to(self.p, abs)),
        };
        let abs = abs.min(base + self.max_digits as i64);
        let width = (abs - base) as u32;
        let modulus = self.modulus(width).expect("width within limits");
        let shifted = |s: &PadicScalar| -> u64 {
            let (v, unit) = match s {
                PadicScalar::Exact(r) => match r.valuation(self.p) {
                    None => return 0,
                    Some(v) if v - base >= width as i64 => return 0,
                    Some(v) => (v, r.unit_residue(self.p, modulus)),
                },
                PadicScalar::Approx(a) => {
                    if a.digits == 0 || a.ord - base >= width as i64 {
                        return 0;
                    }
                    (a.ord, a.unit)
                }
            };
            let shift = checked_pow(self.p, (v - base) as u32).expect("below width");
            mul_mod(unit % modulus, shift, modulus)
        };
        let sum = (shifted(x) as u128 + shifted(y) as u128) % modulus as u128;
        self.normalize(base, sum as u64, width)
    }

    fn normalize(&self, base: i64, value: u64, width: u32) -> PadicScalar {
        if value == 0 {
            return PadicScalar::Approx(ApproxNum::zero_to(self.p, base + width as i64));
        }
        let (w, unit) = strip_p(value, self.p);
        PadicScalar::Approx(ApproxNum {
            p: self.p,
            ord: base + w as i64,
            unit,
            digits: width - w,
        })
    }

    pub fn sub(&self, x: &PadicScalar, y: &PadicScalar) -> PadicScalar {
        self.add(x, &self.neg(y))
    }

    pub fn mul(&self, x: &PadicScalar, y: &PadicScalar) -> PadicScalar {
        match (x, y) {
            (PadicScalar::Exact(a), PadicScalar::Exact(b)) => PadicScalar::Exact(a.mul(b)),
            (PadicScalar::Exact(r), PadicScalar::Approx(a))
            | (PadicScalar::Approx(a), PadicScalar::Exact(r)) => match r.valuation(self.p) {
                None => PadicScalar::zero(),
                Some(v) if a.digits == 0 => PadicScalar::Approx(ApproxNum::zero_to(self.p, a.ord + v)),
                Some(v) => {
                    let m = self.modulus(a.digits).expect("valid approx");
                    PadicScalar::Approx(ApproxNum {
                        ord: a.ord + v,
                        unit: mul_mod(a.unit, r.unit_residue(self.p, m), m),
                        ..*a
                    })
                }
            },
            (PadicScalar::Approx(a), PadicScalar::Approx(b)) => {
                match (a.digits, b.digits) {
                    (0, 0) => PadicScalar::Approx(ApproxNum::zero_to(self.p, a.ord + b.ord)),
                    // zero to precision A times a unit of order v is zero to A + v
                    (0, _) | (_, 0) => PadicScalar::Approx(ApproxNum::zero_to(self.p, a.ord + b.ord)),
                    (da, db) => {
                        let digits = da.min(db);
                        let m = self.modulus(digits).expect("valid approx");
                        PadicScalar::Approx(ApproxNum {
                            p: self.p,
                            ord: a.ord + b.ord,
                            unit: mul_mod(a.unit % m, b.unit % m, m),
                            digits,
                        })
                    }
                }
            }
        }
    }

    pub fn inv(&self, x: &PadicScalar) -> Result<PadicScalar> {
        match x {
            PadicScalar::Exact(r) => Ok(PadicScalar::Exact(r.recip()?)),
            PadicScalar::Approx(a) if a.digits == 0 => Err(Error::IndeterminateValuation(a.ord)),
            PadicScalar::Approx(a) => {
                let m = self.modulus(a.digits)?;
                Ok(PadicScalar::Approx(ApproxNum {
                    ord: -a.ord,
                    unit: inv_mod(a.unit, m).expect("unit"),
                    ..*a
                }))
            }
        }
    }

    pub fn div(&self, x: &PadicScalar, y: &PadicScalar) -> Result<PadicScalar> {
        if y.is_exact_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.mul(x, &self.inv(y)?))
    }

    pub fn pow(&self, x: &PadicScalar, exp: i64) -> Result<PadicScalar> {
        if let PadicScalar::Exact(r) = x {
            return Ok(PadicScalar::Exact(r.pow(exp)?));
        }
        let base = if exp < 0 { self.inv(x)? } else { x.clone() };
        let mut acc = PadicScalar::one();
        for _ in 0..exp.unsigned_abs() {
            acc = self.mul(&acc, &base);
        }
        Ok(acc)
    }

    /// `ord(x - y)`; `Err` when the difference is below the known precision.
    pub fn ord_diff(&self, x: &PadicScalar, y: &PadicScalar) -> Result<Valuation> {
        self.ord(&self.sub(x, y))
    }

    /// Whether `x` and `y` agree to their common absolute precision.
    pub fn agrees(&self, x: &PadicScalar, y: &PadicScalar) -> bool {
        match self.sub(x, y) {
            PadicScalar::Exact(r) => r.is_zero(),
            PadicScalar::Approx(a) => a.digits == 0,
        }
    }

    /// Compare two norms given as valuations (larger valuation = smaller norm).
    pub fn cmp_norm(&self, x: &PadicScalar, y: &PadicScalar) -> Result<Ordering> {
        Ok(self.norm(x)?.cmp(&self.norm(y)?))
    }

    pub fn is_unit_integer(&self, x: &PadicScalar) -> Result<bool> {
        Ok(self.ord(x)? == Valuation::Finite(0))
    }
}
