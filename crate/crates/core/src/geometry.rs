//! Balls of cells, cell fibers, and exact ultrametric distances to finite
//! unions of them.
//!
//! A 1-cell fiber over a parameter `y` is
//! `{x : l_min <= ord(x - c) <= l_max, x - c in xi * Q_{m,n}}`; its maximal
//! balls are `B_{l,c,m,xi} = {x : ord(x - c) = l, ac_m(x - c) = ac_m(xi)}`,
//! one for each admissible order `l = ord(xi) mod n` in the bounds. A ball
//! is the closed ball of radius `p^-(l+m)` around its canonical point
//! `c + lift(ac_m(xi)) p^l`, which is what every distance computation below
//! relies on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{AngularClass, CosetSpec, Norm, PadicScalar, Qp, Valuation};
use crate::rational::Rational;

/// An inclusive range of orders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "(i64, i64)", into = "(i64, i64)")]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Self {
        Window { lo, hi }
    }

    pub fn contains(&self, l: i64) -> bool {
        self.lo <= l && l <= self.hi
    }
}

impl From<(i64, i64)> for Window {
    fn from((lo, hi): (i64, i64)) -> Self {
        Window { lo, hi }
    }
}

impl From<Window> for (i64, i64) {
    fn from(w: Window) -> Self {
        (w.lo, w.hi)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ball {
    pub l: i64,
    pub center: Rational,
    pub m: u32,
    pub ac: AngularClass,
}

impl Ball {
    pub fn new(qp: &Qp, l: i64, center: Rational, m: u32, residue: u64) -> Result<Self> {
        let ac = AngularClass::new(qp.p(), m, residue)?;
        if ac.is_zero() {
            return Err(Error::InvalidCell("ball needs a nonzero angular class".into()));
        }
        Ok(Ball { l, center, m, ac })
    }

    /// Balls are closed balls of radius `p^-(l+m)`.
    pub fn radius(&self) -> Norm {
        Norm::radius(self.l + self.m as i64)
    }

    pub fn canonical_point(&self, qp: &Qp) -> Rational {
        self.center
            .add(&Rational::from_integer(self.ac.residue as i64).mul(&qp.prime_power(self.l)))
    }

    pub fn contains(&self, qp: &Qp, x: &PadicScalar) -> Result<bool> {
        let t = qp.sub(x, &PadicScalar::Exact(self.center.clone()));
        match qp.ord(&t) {
            Ok(Valuation::Finite(v)) if v == self.l => Ok(qp.ac(&t, self.m)? == self.ac),
            Ok(_) => Ok(false),
            Err(Error::IndeterminateValuation(a)) if a > self.l => Ok(false),
            Err(Error::IndeterminateValuation(a)) => Err(Error::InsufficientPrecision {
                needed: self.l + 1,
                available: a,
            }),
            Err(e) => Err(e),
        }
    }

    /// Distance from `x` to the ball: 0 inside, otherwise `|x - w|` for the
    /// canonical point `w` (all members are equidistant from an outside point).
    pub fn distance(&self, qp: &Qp, x: &PadicScalar) -> Result<Norm> {
        let w = PadicScalar::Exact(self.canonical_point(qp));
        let d = qp.sub(x, &w);
        let r = self.l + self.m as i64;
        match qp.ord(&d) {
            Ok(v) => {
                let n = Norm::from_valuation(v);
                Ok(if n <= self.radius() { Norm::Zero } else { n })
            }
            Err(Error::IndeterminateValuation(a)) if a >= r => Ok(Norm::Zero),
            Err(Error::IndeterminateValuation(a)) => Err(Error::InsufficientPrecision {
                needed: r,
                available: a,
            }),
            Err(e) => Err(e),
        }
    }

    /// All members modulo `p^(l+m+k)`: `c + p^l (a + p^m j)` for `j < p^k`.
    pub fn points(&self, qp: &Qp, k: u32) -> Result<Vec<Rational>> {
        let count = qp.modulus(k)?;
        let scale = qp.prime_power(self.l);
        let step = qp.modulus(self.m)?;
        Ok((0..count)
            .map(|j| {
                let u = Rational::from_integer((self.ac.residue + step * j) as i64);
                self.center.add(&u.mul(&scale))
            })
            .collect())
    }
}

/// The fiber of a cell over one parameter tuple.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "FiberWire", into = "FiberWire")]
pub struct CellFiber {
    pub center: Rational,
    pub coset: CosetSpec,
    /// Inclusive lower bound on `ord(x - c)`; `|x - c| < |beta|` gives `ord(beta) + 1`.
    pub l_min: Option<i64>,
    /// Inclusive upper bound on `ord(x - c)`; `|alpha| < |x - c|` gives `ord(alpha) - 1`.
    pub l_max: Option<i64>,
}

#[derive(Serialize, Deserialize)]
struct FiberWire {
    center: Rational,
    xi: Rational,
    m: u32,
    n: u32,
    l_min: Option<i64>,
    l_max: Option<i64>,
}

impl From<FiberWire> for CellFiber {
    fn from(w: FiberWire) -> Self {
        CellFiber {
            center: w.center,
            coset: CosetSpec {
                xi: w.xi,
                m: w.m,
                n: w.n,
            },
            l_min: w.l_min,
            l_max: w.l_max,
        }
    }
}

impl From<CellFiber> for FiberWire {
    fn from(f: CellFiber) -> Self {
        FiberWire {
            center: f.center,
            xi: f.coset.xi,
            m: f.coset.m,
            n: f.coset.n,
            l_min: f.l_min,
            l_max: f.l_max,
        }
    }
}

impl CellFiber {
    pub fn new(
        qp: &Qp,
        center: Rational,
        coset: CosetSpec,
        l_min: Option<i64>,
        l_max: Option<i64>,
    ) -> Result<Self> {
        let f = CellFiber {
            center,
            coset,
            l_min,
            l_max,
        };
        f.validate(qp)?;
        Ok(f)
    }

    /// The 0-cell fiber `{c}`.
    pub fn point(center: Rational) -> Self {
        CellFiber {
            center,
            coset: CosetSpec::zero(),
            l_min: None,
            l_max: None,
        }
    }

    pub fn validate(&self, qp: &Qp) -> Result<()> {
        if self.coset.m == 0 || self.coset.n == 0 {
            return Err(Error::InvalidCell("coset needs m, n >= 1".into()));
        }
        if self.is_zero_cell() {
            if self.l_max.is_some() {
                return Err(Error::EmptyFiber(
                    "a 0-cell cannot satisfy |alpha| < |x - c|".into(),
                ));
            }
            return Ok(());
        }
        qp.modulus(self.coset.m)?;
        if let (Some(lo), Some(hi)) = (self.l_min, self.l_max) {
            if lo > hi {
                return Err(Error::EmptyFiber(format!("l_min {lo} > l_max {hi}")));
            }
        }
        if self.with_bounds(qp.p(), self.l_min, self.l_max).is_none() {
            return Err(Error::EmptyFiber(format!(
                "no order in [{:?}, {:?}] is congruent to ord(xi) mod {}",
                self.l_min, self.l_max, self.coset.n
            )));
        }
        Ok(())
    }

    pub fn is_zero_cell(&self) -> bool {
        self.coset.is_zero()
    }

    fn order_class(&self, p: u64) -> i64 {
        self.coset.order_class(p).expect("1-cell")
    }

    pub fn admissible(&self, p: u64, l: i64) -> bool {
        !self.is_zero_cell()
            && (l - self.order_class(p)).rem_euclid(self.coset.n as i64) == 0
            && self.l_min.is_none_or(|lo| l >= lo)
            && self.l_max.is_none_or(|hi| l <= hi)
    }

    /// Smallest admissible order `>= l`.
    pub fn admissible_at_or_above(&self, p: u64, l: i64) -> Option<i64> {
        if self.is_zero_cell() {
            return None;
        }
        let l = self.l_min.map_or(l, |lo| l.max(lo));
        let n = self.coset.n as i64;
        let cand = l + (self.order_class(p) - l).rem_euclid(n);
        self.l_max.is_none_or(|hi| cand <= hi).then_some(cand)
    }

    /// Largest admissible order `<= l`.
    pub fn admissible_at_or_below(&self, p: u64, l: i64) -> Option<i64> {
        if self.is_zero_cell() {
            return None;
        }
        let l = self.l_max.map_or(l, |hi| l.min(hi));
        let n = self.coset.n as i64;
        let cand = l - (l - self.order_class(p)).rem_euclid(n);
        self.l_min.is_none_or(|lo| cand >= lo).then_some(cand)
    }

    /// `None` when unbounded below (or a 0-cell).
    pub fn lowest_admissible(&self, p: u64) -> Option<i64> {
        self.l_min.and_then(|lo| self.admissible_at_or_above(p, lo))
    }

    /// `None` when unbounded above (or a 0-cell).
    pub fn highest_admissible(&self, p: u64) -> Option<i64> {
        self.l_max.and_then(|hi| self.admissible_at_or_below(p, hi))
    }

    pub fn contains(&self, qp: &Qp, x: &PadicScalar) -> Result<bool> {
        let t = qp.sub(x, &PadicScalar::Exact(self.center.clone()));
        if self.is_zero_cell() {
            return qp.in_coset(&t, &self.coset);
        }
        match qp.ord(&t) {
            Ok(Valuation::Finite(v)) => {
                Ok(self.admissible(qp.p(), v) && qp.ac(&t, self.coset.m)? == self.coset.ac_xi(qp)?)
            }
            Ok(Valuation::PlusInfinity) => Ok(false),
            Err(Error::IndeterminateValuation(a)) => match self.highest_admissible(qp.p()) {
                Some(top) if top < a => Ok(false),
                _ => Err(Error::InsufficientPrecision {
                    needed: a + 1,
                    available: a,
                }),
            },
            Err(e) => Err(e),
        }
    }

    pub fn ball_at(&self, qp: &Qp, l: i64) -> Result<Ball> {
        if self.is_zero_cell() {
            return Err(Error::ZeroCellHasNoBalls);
        }
        if !self.admissible(qp.p(), l) {
            return Err(Error::InvalidCell(format!("order {l} is not admissible")));
        }
        Ok(Ball {
            l,
            center: self.center.clone(),
            m: self.coset.m,
            ac: self.coset.ac_xi(qp)?,
        })
    }

    /// The unique maximal ball of the fiber containing `x`.
    pub fn ball_containing(&self, qp: &Qp, x: &PadicScalar) -> Result<Option<Ball>> {
        if self.is_zero_cell() || !self.contains(qp, x)? {
            return Ok(None);
        }
        let t = qp.sub(x, &PadicScalar::Exact(self.center.clone()));
        let l = qp.ord_finite(&t)?;
        self.ball_at(qp, l).map(Some)
    }

    /// Balls with order in the window, ascending.
    pub fn balls(&self, qp: &Qp, window: Window) -> Result<Vec<Ball>> {
        if self.is_zero_cell() {
            return Err(Error::ZeroCellHasNoBalls);
        }
        let mut out = Vec::new();
        let mut l = self.admissible_at_or_above(qp.p(), window.lo);
        while let Some(cur) = l.filter(|&c| c <= window.hi) {
            out.push(self.ball_at(qp, cur)?);
            l = self.admissible_at_or_above(qp.p(), cur + 1);
        }
        Ok(out)
    }

    /// Restrict the order bounds; `None` if the result is empty.
    pub fn with_bounds(&self, p: u64, l_min: Option<i64>, l_max: Option<i64>) -> Option<Self> {
        let f = CellFiber {
            l_min,
            l_max,
            ..self.clone()
        };
        let nonempty = match (l_min, l_max) {
            (Some(lo), _) => f.admissible_at_or_above(p, lo).is_some(),
            (None, Some(hi)) => f.admissible_at_or_below(p, hi).is_some(),
            (None, None) => true,
        };
        nonempty.then_some(f)
    }

    /// Exact `inf |x - a|` over the fiber, using the nearest admissible orders.
    pub fn distance(&self, qp: &Qp, x: &PadicScalar) -> Result<Norm> {
        let c = PadicScalar::Exact(self.center.clone());
        if self.is_zero_cell() {
            return qp.norm(&qp.sub(x, &c));
        }
        let p = qp.p();
        let t = qp.sub(x, &c);
        let v = match qp.ord(&t) {
            Ok(Valuation::Finite(v)) => v,
            Ok(Valuation::PlusInfinity) => {
                return Ok(self.highest_admissible(p).map_or(Norm::Zero, Norm::radius))
            }
            Err(Error::IndeterminateValuation(a)) => {
                return Err(Error::InsufficientPrecision {
                    needed: a + 1,
                    available: a,
                })
            }
            Err(e) => return Err(e),
        };
        let mut best: Option<Norm> = None;
        let mut consider = |d: Norm| best = Some(best.map_or(d, |b| b.min(d)));
        if let Some(l) = self.admissible_at_or_below(p, v - 1) {
            consider(Norm::radius(l));
        }
        if self.admissible(p, v) {
            consider(self.ball_at(qp, v)?.distance(qp, x)?);
        }
        if self.admissible_at_or_above(p, v + 1).is_some() {
            consider(Norm::radius(v));
        }
        best.ok_or_else(|| Error::EmptyFiber("no admissible order".into()))
    }

    /// The lowest-order ball of the fiber inside the closed ball `B(x, radius)`.
    /// This depends only on `B(x, radius)`, not on `x` itself.
    pub fn lowest_ball_within(&self, qp: &Qp, x: &PadicScalar, radius: Norm) -> Result<Option<Ball>> {
        if self.is_zero_cell() {
            return Err(Error::ZeroCellHasNoBalls);
        }
        let Norm::Pow(k) = radius else {
            return Ok(None);
        };
        let delta = -k;
        let p = qp.p();
        let t = qp.sub(x, &PadicScalar::Exact(self.center.clone()));
        let v = qp.ord(&t)?.finite().unwrap_or(delta);
        let m = self.coset.m as i64;
        let mut l = self.admissible_at_or_above(p, v.min(delta - m));
        let stop = v.max(delta) + self.coset.n as i64;
        while let Some(cur) = l.filter(|&c| c <= stop) {
            let ball = self.ball_at(qp, cur)?;
            let w = PadicScalar::Exact(ball.canonical_point(qp));
            if cur + m >= delta && qp.norm(&qp.sub(x, &w))? <= radius {
                return Ok(Some(ball));
            }
            l = self.admissible_at_or_above(p, cur + 1);
        }
        Ok(None)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Constituent {
    Point(Rational),
    Ball(Ball),
    Fiber(CellFiber),
}

impl Constituent {
    pub fn contains(&self, qp: &Qp, x: &PadicScalar) -> Result<bool> {
        match self {
            Constituent::Point(a) => Ok(qp.agrees(x, &PadicScalar::Exact(a.clone()))),
            Constituent::Ball(b) => b.contains(qp, x),
            Constituent::Fiber(f) => f.contains(qp, x),
        }
    }

    pub fn distance(&self, qp: &Qp, x: &PadicScalar) -> Result<Norm> {
        match self {
            Constituent::Point(a) => qp.norm(&qp.sub(x, &PadicScalar::Exact(a.clone()))),
            Constituent::Ball(b) => b.distance(qp, x),
            Constituent::Fiber(f) => f.distance(qp, x),
        }
    }
}

/// A finite union of points, balls and cell fibers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointSet {
    pub parts: Vec<Constituent>,
}

impl PointSet {
    pub fn new(parts: Vec<Constituent>) -> Self {
        PointSet { parts }
    }

    pub fn single(part: Constituent) -> Self {
        PointSet { parts: vec![part] }
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        PointSet {
            parts: self.parts.iter().chain(&other.parts).cloned().collect(),
        }
    }

    pub fn contains(&self, qp: &Qp, x: &PadicScalar) -> Result<bool> {
        for part in &self.parts {
            if part.contains(qp, x)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn distance(&self, qp: &Qp, x: &PadicScalar) -> Result<Norm> {
        if self.parts.is_empty() {
            return Err(Error::EmptyDomain);
        }
        self.parts
            .iter()
            .try_fold(None::<Norm>, |acc, part| {
                let d = part.distance(qp, x)?;
                Ok(Some(acc.map_or(d, |a| a.min(d))))
            })
            .map(|d| d.expect("nonempty"))
    }
}
