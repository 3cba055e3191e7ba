//! b-th roots in Q_p by Newton/Hensel lifting, for `gcd(b, p) = 1`.

use super::{AngularClass, ApproxNum, PadicScalar, Qp};
use crate::error::{Error, Result};
use crate::modarith::{inv_mod, mul_mod, pow_mod};

impl Qp {
    /// All b-th roots of `u` in Q_p, each to `digits` of relative precision
    /// (capped by the precision of `u`). Sorted by unit residue.
    pub fn hensel_roots(&self, u: &PadicScalar, b: u32, digits: u32) -> Result<Vec<ApproxNum>> {
        if b == 0 {
            return Err(Error::NoRoot("exponent must be positive".into()));
        }
        if (b as u64).is_multiple_of(self.p()) {
            return Err(Error::UnsupportedRamifiedRoot { b });
        }
        let v = self
            .ord(u)?
            .finite()
            .ok_or_else(|| Error::NoRoot("zero has no unit root".into()))?;
        if v.rem_euclid(b as i64) != 0 {
            return Err(Error::NoRoot(format!("ord {v} is not divisible by {b}")));
        }
        let digits = match u {
            PadicScalar::Approx(a) => a.digits.min(digits),
            PadicScalar::Exact(_) => digits,
        }
        .min(self.max_digits())
        .max(1);
        let modulus = self.modulus(digits)?;
        let w = self.to_approx(u, digits, 0)?.unit;
        let p = self.p();
        let seeds: Vec<u64> = (1..p).filter(|&r| pow_mod(r, b as u64, p) == w % p).collect();
        if seeds.is_empty() {
            return Err(Error::NoRoot(format!(
                "unit part is not a {b}-th power modulo {p}"
            )));
        }
        let mut roots: Vec<ApproxNum> = seeds
            .into_iter()
            .map(|seed| ApproxNum {
                p,
                ord: v / b as i64,
                unit: newton_lift(seed, w, b, modulus),
                digits,
            })
            .collect();
        roots.sort_by_key(|r| r.unit);
        Ok(roots)
    }

    /// The b-th root of `u` whose angular class at the target's depth matches
    /// `target`; with no target the root must be unique.
    pub fn hensel_root(
        &self,
        u: &PadicScalar,
        b: u32,
        target: Option<&AngularClass>,
        digits: u32,
    ) -> Result<PadicScalar> {
        let roots = self.hensel_roots(u, b, digits)?;
        let chosen: Vec<&ApproxNum> = match target {
            None => roots.iter().collect(),
            Some(t) => {
                if t.depth > roots[0].digits {
                    return Err(Error::InsufficientPrecision {
                        needed: t.depth as i64,
                        available: roots[0].digits as i64,
                    });
                }
                let m = t.modulus();
                roots.iter().filter(|r| r.unit % m == t.residue).collect()
            }
        };
        match chosen.as_slice() {
            [one] => Ok(PadicScalar::Approx(**one)),
            [] => Err(Error::NoRoot("no root has the requested angular class".into())),
            many => Err(Error::AmbiguousRoot { count: many.len() }),
        }
    }
}

/// Lift `r` with `r^b = w mod p` to a root mod `modulus`.
fn newton_lift(seed: u64, w: u64, b: u32, modulus: u64) -> u64 {
    let mut r = seed % modulus;
    let w = w % modulus;
    // quadratic convergence; 64 rounds is far more than enough for 63-bit moduli
    for _ in 0..64 {
        let f = (pow_mod(r, b as u64, modulus) + modulus - w) % modulus;
        if f == 0 {
            break;
        }
        let df = mul_mod(b as u64 % modulus, pow_mod(r, b as u64 - 1, modulus), modulus);
        let step = mul_mod(f, inv_mod(df, modulus).expect("derivative is a unit"), modulus);
        r = (r + modulus - step) % modulus;
    }
    r
}
