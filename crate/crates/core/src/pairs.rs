//! Batched valuation of pairwise differences.
//!
//! Values are encoded once as residues modulo a power of `p` relative to a
//! common base valuation, so `ord(v_i - v_j)` costs a subtraction and a few
//! divisions. Exact values that collide in the residue fall back to exact
//! rational subtraction.

use crate::modarith::{checked_pow, mul_mod};
use crate::padic::{PadicScalar, Qp};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PairOrd {
    Finite(i64),
    /// Equal values.
    Infinite,
    /// Difference is zero to this absolute precision.
    AtLeast(i64),
}

pub(crate) struct Encoded<'a> {
    p: u64,
    base: i64,
    residues: Vec<u64>,
    digits: Vec<u32>,
    exact: Vec<Option<&'a Rational>>,
    powers: Vec<u64>,
}

impl<'a> Encoded<'a> {
    pub(crate) fn new(qp: &Qp, values: &'a [PadicScalar]) -> Self {
        let p = qp.p();
        let max = qp.max_digits();
        let lows = values.iter().filter_map(|v| match v {
            PadicScalar::Exact(r) => r.valuation(p),
            PadicScalar::Approx(a) => Some(a.ord),
        });
        let base = lows.min().unwrap_or(0);
        let powers: Vec<u64> = (0..=max).map(|k| checked_pow(p, k).expect("below cap")).collect();
        let mut residues = Vec::with_capacity(values.len());
        let mut digits = Vec::with_capacity(values.len());
        let mut exact = Vec::with_capacity(values.len());
        for v in values {
            let (r, d) = match v {
                PadicScalar::Exact(x) => match x.valuation(p) {
                    None => (0, max),
                    Some(o) => shifted(x.unit_residue(p, powers[max as usize]), o - base, max, &powers),
                },
                PadicScalar::Approx(a) => {
                    let d = (a.absolute_precision() - base).clamp(0, max as i64) as u32;
                    if a.digits == 0 {
                        (0, d)
                    } else {
                        let (r, _) = shifted(a.unit, a.ord - base, d, &powers);
                        (r, d)
                    }
                }
            };
            residues.push(r);
            digits.push(d);
            exact.push(v.as_exact());
        }
        Encoded {
            p,
            base,
            residues,
            digits,
            exact,
            powers,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.residues.len()
    }

    pub(crate) fn ord_diff(&self, i: usize, j: usize) -> PairOrd {
        let d = self.digits[i].min(self.digits[j]);
        let m = self.powers[d as usize];
        let (a, b) = (self.residues[i] % m, self.residues[j] % m);
        if a != b {
            let diff = if a > b { a - b } else { m - (b - a) };
            return PairOrd::Finite(self.base + ord_u64(diff, self.p));
        }
        match (self.exact[i], self.exact[j]) {
            (Some(x), Some(y)) => match x.sub(y).valuation(self.p) {
                Some(v) => PairOrd::Finite(v),
                None => PairOrd::Infinite,
            },
            _ => PairOrd::AtLeast(self.base + d as i64),
        }
    }
}

/// `unit * p^shift` reduced modulo `p^digits`, where `shift >= 0`.
fn shifted(unit: u64, shift: i64, digits: u32, powers: &[u64]) -> (u64, u32) {
    let m = powers[digits as usize];
    if shift >= digits as i64 {
        return (0, digits);
    }
    (mul_mod(unit % m, powers[shift as usize], m), digits)
}

fn ord_u64(mut n: u64, p: u64) -> i64 {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}
