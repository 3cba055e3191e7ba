//! Lipschitz extensions of prepared functions from a cell fiber to all of
//! Q_p: gluing by nearest domain, the center extension, the angular
//! rescaling `phi`, and the constant-preserving construction that splits a
//! fiber at the order where `l' >= l` starts to hold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::PreparedFunction;
use crate::geometry::{Ball, CellFiber, Constituent, PointSet, Window};
use crate::padic::{AngularClass, Norm, PadicScalar, Qp, Valuation};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "glue")]
    Glue,
    #[serde(rename = "center")]
    Center,
    #[serde(rename = "phi")]
    Phi,
    #[serde(rename = "iso-q1")]
    IsoQ1,
    #[serde(rename = "iso-qgt1")]
    IsoQgt1,
    #[serde(rename = "iso-qlt1")]
    IsoQlt1,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Region {
    Everywhere,
    Set { set: PointSet },
    /// Points with `ord(x - c)` an admissible order of the fiber.
    Strata { fiber: CellFiber },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluePart {
    pub domain: PointSet,
    pub function: Piecewise,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Rule {
    Prepared { function: PreparedFunction },
    Constant { value: PadicScalar },
    /// `f(phi(x))` with `phi` rescaling angular classes onto the fiber's coset.
    PhiComposed { fiber: CellFiber, function: PreparedFunction },
    /// Evaluate the part whose domain is nearest; ties go to the earlier part.
    Glue { parts: Vec<GluePart> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub domain: Region,
    pub rule: Rule,
    pub provenance: Provenance,
}

/// Ordered pieces; the first piece whose region contains `x` applies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Piecewise {
    pub pieces: Vec<Piece>,
}

impl Region {
    pub fn contains(&self, qp: &Qp, x: &PadicScalar) -> Result<bool> {
        match self {
            Region::Everywhere => Ok(true),
            Region::Set { set } => set.contains(qp, x),
            Region::Strata { fiber } => {
                let t = qp.sub(x, &PadicScalar::Exact(fiber.center.clone()));
                match qp.ord(&t)? {
                    Valuation::Finite(l) => Ok(fiber.admissible(qp.p(), l)),
                    Valuation::PlusInfinity => Ok(false),
                }
            }
        }
    }
}

impl Piecewise {
    pub fn eval(&self, qp: &Qp, x: &PadicScalar, digits: u32) -> Result<PadicScalar> {
        for piece in &self.pieces {
            if piece.domain.contains(qp, x)? {
                return piece.rule.eval(qp, x, digits);
            }
        }
        Err(Error::OutsideDomain(x.to_string()))
    }

    fn map_rules(&self, f: &dyn Fn(&Rule) -> Result<Rule>) -> Result<Piecewise> {
        Ok(Piecewise {
            pieces: self
                .pieces
                .iter()
                .map(|p| {
                    Ok(Piece {
                        rule: f(&p.rule)?,
                        ..p.clone()
                    })
                })
                .collect::<Result<_>>()?,
        })
    }

    /// Multiply every output by `s`.
    pub fn scaled(&self, qp: &Qp, s: &Rational) -> Result<Piecewise> {
        self.map_rules(&|rule| rule.scaled(qp, s))
    }
}

impl Rule {
    pub fn eval(&self, qp: &Qp, x: &PadicScalar, digits: u32) -> Result<PadicScalar> {
        match self {
            Rule::Prepared { function } => function.eval(qp, x, digits),
            Rule::Constant { value } => Ok(value.clone()),
            Rule::PhiComposed { fiber, function } => {
                function.eval(qp, &phi_rescale(qp, fiber, x)?, digits)
            }
            Rule::Glue { parts } => {
                let mut best: Option<(Norm, usize)> = None;
                for (i, part) in parts.iter().enumerate() {
                    let d = part.domain.distance(qp, x)?;
                    if best.is_none_or(|(b, _)| d < b) {
                        best = Some((d, i));
                    }
                }
                let (_, i) = best.ok_or(Error::EmptyDomain)?;
                parts[i].function.eval(qp, x, digits)
            }
        }
    }

    fn scaled(&self, qp: &Qp, s: &Rational) -> Result<Rule> {
        Ok(match self {
            Rule::Prepared { function } => Rule::Prepared {
                function: function.scaled(s)?,
            },
            Rule::Constant { value } => Rule::Constant {
                value: qp.mul(&PadicScalar::Exact(s.clone()), value),
            },
            Rule::PhiComposed { fiber, function } => Rule::PhiComposed {
                fiber: fiber.clone(),
                function: function.scaled(s)?,
            },
            Rule::Glue { parts } => Rule::Glue {
                parts: parts
                    .iter()
                    .map(|p| {
                        Ok(GluePart {
                            domain: p.domain.clone(),
                            function: p.function.scaled(qp, s)?,
                        })
                    })
                    .collect::<Result<_>>()?,
            },
        })
    }
}

/// A total function on Q_p extending a function on `domain`, with the
/// Lipschitz constant its construction guarantees.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendedFunction {
    pub domain: PointSet,
    pub function: Piecewise,
    pub claimed_lipschitz: Norm,
}

impl ExtendedFunction {
    pub fn eval(&self, qp: &Qp, x: &PadicScalar) -> Result<PadicScalar> {
        self.function.eval(qp, x, qp.max_digits())
    }

    /// Multiply outputs by `s`; the constant scales by `|s|`.
    pub fn scale_output(&self, qp: &Qp, s: &Rational) -> Result<ExtendedFunction> {
        let k = s.valuation(qp.p()).ok_or(Error::DivisionByZero)?;
        Ok(ExtendedFunction {
            domain: self.domain.clone(),
            function: self.function.scaled(qp, s)?,
            claimed_lipschitz: self.claimed_lipschitz.mul(Norm::radius(k)),
        })
    }

    pub fn provenances(&self) -> Vec<Provenance> {
        fn walk(pw: &Piecewise, out: &mut Vec<Provenance>) {
            for piece in &pw.pieces {
                if !out.contains(&piece.provenance) {
                    out.push(piece.provenance);
                }
                if let Rule::Glue { parts } = &piece.rule {
                    for part in parts {
                        walk(&part.function, out);
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.function, &mut out);
        out
    }
}

/// One parameter tuple `y` and the prepared pieces of `f_y`, one per cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberFunction {
    pub y: Vec<Rational>,
    pub pieces: Vec<PreparedFunction>,
}

impl FiberFunction {
    pub fn domain(&self) -> PointSet {
        PointSet::new(self.pieces.iter().map(source_constituent).collect())
    }

    /// `f_y(x)` from the piece whose cell contains `x`.
    pub fn eval(&self, qp: &Qp, x: &PadicScalar) -> Result<PadicScalar> {
        for g in &self.pieces {
            if g.source.contains(qp, x)? {
                return g.eval(qp, x, qp.max_digits());
            }
        }
        Err(Error::OutsideDomain(x.to_string()))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    pub fibers: Vec<FiberFunction>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberExtension {
    pub y: Vec<Rational>,
    pub extension: ExtendedFunction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyExtension {
    pub fibers: Vec<FiberExtension>,
}

impl FamilyExtension {
    pub fn claimed_lipschitz(&self) -> Norm {
        self.fibers
            .iter()
            .map(|f| f.extension.claimed_lipschitz)
            .max()
            .unwrap_or(Norm::Zero)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Center,
    Phi,
    Isometric,
}

fn source_constituent(g: &PreparedFunction) -> Constituent {
    if g.source.is_zero_cell() {
        Constituent::Point(g.source.center.clone())
    } else {
        Constituent::Fiber(g.source.clone())
    }
}

/// `lambda` must be `p^k`; returns the family with outputs multiplied by
/// `lambda`, which turns a `p^k`-Lipschitz family into a 1-Lipschitz one,
/// together with the factor to undo with [`unscale`].
pub fn rescale_to_unit(qp: &Qp, family: &Family, lambda: &Rational) -> Result<(Family, Rational)> {
    let k = lambda
        .valuation(qp.p())
        .filter(|&k| &qp.prime_power(k) == lambda)
        .ok_or_else(|| Error::UnsupportedLambda(lambda.to_string()))?;
    let s = qp.prime_power(k);
    let fibers = family
        .fibers
        .iter()
        .map(|f| {
            Ok(FiberFunction {
                y: f.y.clone(),
                pieces: f.pieces.iter().map(|g| g.scaled(&s)).collect::<Result<_>>()?,
            })
        })
        .collect::<Result<_>>()?;
    Ok((Family { fibers }, s))
}

/// Undo [`rescale_to_unit`] on an extension built for the rescaled family.
pub fn unscale(qp: &Qp, ext: &ExtendedFunction, s: &Rational) -> Result<ExtendedFunction> {
    ext.scale_output(qp, &s.recip()?)
}

/// The smallest `p^k >= lambda` (as real numbers), for `lambda > 0`.
pub fn round_lambda_up(qp: &Qp, lambda: &Rational) -> Result<Rational> {
    if lambda.signum() <= 0 {
        return Err(Error::UnsupportedLambda(lambda.to_string()));
    }
    let mut k = 0i64;
    while &qp.prime_power(k) < lambda {
        k += 1;
    }
    while &qp.prime_power(k - 1) >= lambda {
        k -= 1;
    }
    Ok(qp.prime_power(k))
}

/// Glue extensions of one function on the pieces of a cover: left fold of
/// `T_1 = {d(x, X_1) <= d(x, X_2)}`, which amounts to evaluating the first
/// part at minimal distance. The constant is the maximum of the parts'.
pub fn glue(qp: &Qp, parts: Vec<ExtendedFunction>) -> Result<ExtendedFunction> {
    match parts.len() {
        0 => return Err(Error::EmptyDomain),
        1 => return Ok(parts.into_iter().next().expect("one part")),
        _ => {}
    }
    for (i, pi) in parts.iter().enumerate() {
        for x in probe_points(qp, &pi.domain)? {
            for pj in parts.iter().skip(i + 1) {
                if pj.domain.contains(qp, &x)? {
                    let (vi, vj) = (pi.eval(qp, &x)?, pj.eval(qp, &x)?);
                    if !qp.agrees(&vi, &vj) {
                        return Err(Error::DisagreementOnSharedDomain(format!("{x}: {vi} vs {vj}")));
                    }
                }
            }
        }
    }
    let claimed = parts.iter().map(|p| p.claimed_lipschitz).max().expect("nonempty");
    let domain = parts
        .iter()
        .fold(PointSet::default(), |acc, p| acc.union(&p.domain));
    let glue_parts = parts
        .into_iter()
        .map(|p| GluePart {
            domain: p.domain,
            function: p.function,
        })
        .collect();
    Ok(ExtendedFunction {
        domain,
        function: Piecewise {
            pieces: vec![Piece {
                domain: Region::Everywhere,
                rule: Rule::Glue { parts: glue_parts },
                provenance: Provenance::Glue,
            }],
        },
        claimed_lipschitz: claimed,
    })
}

/// A few points of each constituent, used to detect disagreement on overlaps.
fn probe_points(qp: &Qp, set: &PointSet) -> Result<Vec<PadicScalar>> {
    let mut out = Vec::new();
    for part in &set.parts {
        match part {
            Constituent::Point(a) => out.push(PadicScalar::Exact(a.clone())),
            Constituent::Ball(b) => out.push(PadicScalar::Exact(b.canonical_point(qp))),
            Constituent::Fiber(f) if f.is_zero_cell() => {
                out.push(PadicScalar::Exact(f.center.clone()))
            }
            Constituent::Fiber(f) => {
                let p = qp.p();
                let start = f
                    .lowest_admissible(p)
                    .or_else(|| f.highest_admissible(p).map(|h| h - 3 * f.coset.n as i64))
                    .unwrap_or(0);
                let balls = f.balls(qp, Window::new(start, start + 4 * f.coset.n as i64))?;
                out.extend(balls.iter().map(|b| PadicScalar::Exact(b.canonical_point(qp))));
            }
        }
    }
    Ok(out)
}

fn constant(domain: PointSet, value: PadicScalar, provenance: Provenance) -> ExtendedFunction {
    ExtendedFunction {
        domain,
        function: Piecewise {
            pieces: vec![Piece {
                domain: Region::Everywhere,
                rule: Rule::Constant { value },
                provenance,
            }],
        },
        claimed_lipschitz: Norm::ONE,
    }
}

/// For a constant piece (or a 0-cell image) the extension is that constant.
fn constant_extension(qp: &Qp, g: &PreparedFunction, provenance: Provenance) -> Option<ExtendedFunction> {
    if !(g.is_constant() || g.target.is_zero()) {
        return None;
    }
    let value = if g.is_constant() {
        qp.add(
            &PadicScalar::Exact(g.c_prime.clone()),
            &PadicScalar::Exact(g.e.clone()),
        )
    } else {
        PadicScalar::Exact(g.c_prime.clone())
    };
    Some(constant(PointSet::single(source_constituent(g)), value, provenance))
}

/// `f` on the fiber and `c'` elsewhere, with constant `p^{m'}`.
pub fn extend_by_center(qp: &Qp, g: &PreparedFunction, window: Window) -> Result<ExtendedFunction> {
    if let Some(ext) = constant_extension(qp, g, Provenance::Center) {
        return Ok(ext);
    }
    g.check_unit_lipschitz(qp, window)?;
    Ok(ExtendedFunction {
        domain: PointSet::single(source_constituent(g)),
        function: Piecewise {
            pieces: vec![
                Piece {
                    domain: Region::Set {
                        set: PointSet::single(source_constituent(g)),
                    },
                    rule: Rule::Prepared { function: g.clone() },
                    provenance: Provenance::Center,
                },
                Piece {
                    domain: Region::Everywhere,
                    rule: Rule::Constant {
                        value: PadicScalar::Exact(g.c_prime.clone()),
                    },
                    provenance: Provenance::Center,
                },
            ],
        },
        claimed_lipschitz: Norm::Pow(g.target.m as i64),
    })
}

/// `phi(x) = (x - c) lift(ac_m(x - c)^{-1} ac_m(xi)) + c`, and `phi(c) = c`.
pub fn phi_rescale(qp: &Qp, fiber: &CellFiber, x: &PadicScalar) -> Result<PadicScalar> {
    let c = PadicScalar::Exact(fiber.center.clone());
    let t = qp.sub(x, &c);
    if qp.ord(&t)? == Valuation::PlusInfinity {
        return Ok(c);
    }
    let m = fiber.coset.m;
    let ac: AngularClass = qp.ac(&t, m)?;
    let target = fiber.coset.ac_xi(qp)?;
    let factor = qp.lift_ac(&ac.inverse()?.mul(&target))?;
    Ok(qp.add(&qp.mul(&t, &factor), &c))
}

fn phi_pieces(g: &PreparedFunction, fiber: &CellFiber, provenance: Provenance) -> Piecewise {
    Piecewise {
        pieces: vec![
            Piece {
                domain: Region::Strata { fiber: fiber.clone() },
                rule: Rule::PhiComposed {
                    fiber: fiber.clone(),
                    function: g.clone(),
                },
                provenance,
            },
            Piece {
                domain: Region::Everywhere,
                rule: Rule::Constant {
                    value: PadicScalar::Exact(g.c_prime.clone()),
                },
                provenance,
            },
        ],
    }
}

/// `f(phi(x))` on the order strata of the fiber, `c'` elsewhere, with
/// constant `p^{m' - m}`.
pub fn extend_with_phi(qp: &Qp, g: &PreparedFunction, window: Window) -> Result<ExtendedFunction> {
    if let Some(ext) = constant_extension(qp, g, Provenance::Phi) {
        return Ok(ext);
    }
    g.check_unit_lipschitz(qp, window)?;
    let gap = (g.target.m as i64 - g.source.coset.m as i64).max(0);
    Ok(ExtendedFunction {
        domain: PointSet::single(source_constituent(g)),
        function: phi_pieces(g, &g.source, Provenance::Phi),
        claimed_lipschitz: Norm::Pow(gap),
    })
}

/// Orders `l` of the fiber split by where `l' >= l` holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    /// Sub-fiber on which `l' >= l`, if nonempty.
    pub upper: Option<CellFiber>,
    /// Remaining balls, ascending by order.
    pub balls: Vec<Ball>,
}

/// Exact threshold for `l' >= l`: `(m' - m - K)/(q - 1)` for `q > 1` (a lower
/// bound on `l`) and `(K - (m' - m))/(1 - q)` for `q < 1` (an upper bound),
/// with `K = ord(e)/b + ord(a/b)`.
pub fn threshold(qp: &Qp, g: &PreparedFunction) -> Result<Option<Rational>> {
    let q = g.exp_ratio();
    if q == Rational::one() {
        return Ok(None);
    }
    let k = g.derivative_order(qp)?.constant_part;
    let gap = Rational::from_integer(g.target.m as i64 - g.source.coset.m as i64);
    let q1 = q.sub(&Rational::one());
    Ok(Some(gap.sub(&k).div(&q1)?))
}

/// Validity bound from `ord(f') >= 0`: `-K/(q - 1)`, a lower bound for
/// `q > 1` and an upper bound for `q < 1`.
pub fn validity_bound(qp: &Qp, g: &PreparedFunction) -> Result<Option<Rational>> {
    let q = g.exp_ratio();
    if q == Rational::one() {
        return Ok(None);
    }
    let k = g.derivative_order(qp)?.constant_part;
    Ok(Some(k.neg().div(&q.sub(&Rational::one()))?))
}

fn ceil(r: &Rational) -> i64 {
    let f = floor(r);
    if Rational::from_integer(f) == *r {
        f
    } else {
        f + 1
    }
}

fn floor(r: &Rational) -> i64 {
    let n = r.numer();
    let d = r.denom();
    num_integer::Integer::div_floor(&n, &d)
        .try_into()
        .expect("threshold fits in i64")
}

pub fn split_at_threshold(qp: &Qp, g: &PreparedFunction) -> Result<Split> {
    let p = qp.p();
    let fiber = &g.source;
    let Some(t) = threshold(qp, g)? else {
        return Ok(Split {
            upper: Some(fiber.clone()),
            balls: Vec::new(),
        });
    };
    let increasing = g.exp_ratio() > Rational::one();
    let (upper, low_range) = if increasing {
        let cut = ceil(&t);
        let lo = fiber.l_min.map_or(cut, |l| l.max(cut));
        let upper = fiber.with_bounds(p, Some(lo), fiber.l_max);
        match fiber.l_min {
            None if fiber.admissible_at_or_below(p, cut - 1).is_some() => {
                return Err(Error::NotUnitLipschitz(format!(
                    "fiber is unbounded below but ord(f') >= 0 needs l >= {}",
                    validity_bound(qp, g)?.expect("q != 1")
                )))
            }
            None => (upper, None),
            Some(l) => (upper, Some((l, cut - 1))),
        }
    } else {
        let cut = floor(&t);
        let hi = fiber.l_max.map_or(cut, |l| l.min(cut));
        let upper = fiber.with_bounds(p, fiber.l_min, Some(hi));
        match fiber.l_max {
            None if fiber.admissible_at_or_above(p, cut + 1).is_some() => {
                return Err(Error::NotUnitLipschitz(format!(
                    "fiber is unbounded above but ord(f') >= 0 needs l <= {}",
                    validity_bound(qp, g)?.expect("q != 1")
                )))
            }
            None => (upper, None),
            Some(h) => (upper, Some((cut + 1, h))),
        }
    };
    let balls = match low_range {
        Some((lo, hi)) if lo <= hi => fiber.balls(qp, Window::new(lo, hi))?,
        _ => Vec::new(),
    };
    Ok(Split { upper, balls })
}

/// Extension with constant 1 for a 1-Lipschitz prepared function.
///
/// For `a = b` this is the `phi` extension (there `m = m'` and `l' >= l`).
/// Otherwise the fiber is split at the threshold: the part with `l' >= l`
/// gets the `phi` extension, each of the finitely many remaining balls `B`
/// gets `f` on `B` and `f(h)` off `B` for its canonical point `h`, and the
/// parts are glued.
pub fn extend_isometric(qp: &Qp, g: &PreparedFunction, window: Window) -> Result<ExtendedFunction> {
    g.validate(qp)?;
    if let Some(ext) = constant_extension(qp, g, Provenance::IsoQ1) {
        return Ok(ext);
    }
    if g.source.balls(qp, window)?.is_empty() {
        return Err(Error::EmptyWindow(window.lo, window.hi));
    }
    g.check_unit_lipschitz(qp, window)?;
    let q = g.exp_ratio();
    if q == Rational::one() {
        return Ok(ExtendedFunction {
            domain: PointSet::single(source_constituent(g)),
            function: phi_pieces(g, &g.source, Provenance::IsoQ1),
            claimed_lipschitz: Norm::ONE,
        });
    }
    let tag = if q > Rational::one() {
        Provenance::IsoQgt1
    } else {
        Provenance::IsoQlt1
    };
    let split = split_at_threshold(qp, g)?;
    let mut parts = Vec::new();
    if let Some(upper) = &split.upper {
        let restricted = PreparedFunction {
            source: upper.clone(),
            ..g.clone()
        };
        parts.push(ExtendedFunction {
            domain: PointSet::single(Constituent::Fiber(upper.clone())),
            function: phi_pieces(&restricted, upper, tag),
            claimed_lipschitz: Norm::ONE,
        });
    }
    for ball in &split.balls {
        let h = PadicScalar::Exact(ball.canonical_point(qp));
        let fh = g.eval(qp, &h, qp.max_digits())?;
        let set = PointSet::single(Constituent::Ball(ball.clone()));
        parts.push(ExtendedFunction {
            domain: set.clone(),
            function: Piecewise {
                pieces: vec![
                    Piece {
                        domain: Region::Set { set },
                        rule: Rule::Prepared { function: g.clone() },
                        provenance: tag,
                    },
                    Piece {
                        domain: Region::Everywhere,
                        rule: Rule::Constant { value: fh },
                        provenance: tag,
                    },
                ],
            },
            claimed_lipschitz: Norm::ONE,
        });
    }
    let mut ext = glue(qp, parts)?;
    ext.domain = PointSet::single(source_constituent(g));
    Ok(ext)
}

pub fn extend(qp: &Qp, g: &PreparedFunction, method: Method, window: Window) -> Result<ExtendedFunction> {
    match method {
        Method::Center => extend_by_center(qp, g, window),
        Method::Phi => extend_with_phi(qp, g, window),
        Method::Isometric => extend_isometric(qp, g, window),
    }
}

/// Extend every cell piece of one fiber and glue the results.
pub fn extend_fiber(qp: &Qp, f: &FiberFunction, method: Method, window: Window) -> Result<ExtendedFunction> {
    let parts = f
        .pieces
        .iter()
        .map(|g| extend(qp, g, method, window))
        .collect::<Result<Vec<_>>>()?;
    glue(qp, parts)
}

pub fn extend_family(qp: &Qp, family: &Family, method: Method, window: Window) -> Result<FamilyExtension> {
    if family.fibers.is_empty() {
        return Err(Error::EmptyDomain);
    }
    Ok(FamilyExtension {
        fibers: family
            .fibers
            .iter()
            .map(|f| {
                Ok(FiberExtension {
                    y: f.y.clone(),
                    extension: extend_fiber(qp, f, method, window)?,
                })
            })
            .collect::<Result<_>>()?,
    })
}

/// Componentwise extension of a map into `Q_p^s`; with the max-norm the
/// constant is the largest component constant.
pub fn extend_components(
    qp: &Qp,
    components: &[FiberFunction],
    method: Method,
    window: Window,
) -> Result<(Vec<ExtendedFunction>, Norm)> {
    let exts = components
        .iter()
        .map(|f| extend_fiber(qp, f, method, window))
        .collect::<Result<Vec<_>>>()?;
    let claimed = exts
        .iter()
        .map(|e| e.claimed_lipschitz)
        .max()
        .ok_or(Error::EmptyDomain)?;
    Ok((exts, claimed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::CosetSpec;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn ex(s: &str) -> PadicScalar {
        PadicScalar::Exact(r(s))
    }

    fn fiber(qp: &Qp, xi: &str, m: u32, n: u32, lo: Option<i64>, hi: Option<i64>) -> CellFiber {
        CellFiber::new(qp, r("0"), CosetSpec::new(r(xi), m, n).unwrap(), lo, hi).unwrap()
    }

    fn prepared(qp: &Qp, a: i64, b: u32, e: &str, cp: &str, source: CellFiber) -> PreparedFunction {
        PreparedFunction::with_inferred_target(qp, a, b, r(e), r(cp), source, Window::new(-10, 10)).unwrap()
    }

    const W: Window = Window { lo: -10, hi: 10 };

    #[test]
    fn lambda_handling() {
        let q3 = Qp::new(3).unwrap();
        let g = prepared(&q3, 1, 1, "1/3", "0", fiber(&q3, "1", 1, 1, Some(0), None));
        let fam = Family {
            fibers: vec![FiberFunction { y: vec![], pieces: vec![g] }],
        };
        let (same, s) = rescale_to_unit(&q3, &fam, &r("1")).unwrap();
        assert_eq!(s, r("1"));
        assert_eq!(same, fam);
        let (unit, s) = rescale_to_unit(&q3, &fam, &r("3")).unwrap();
        assert_eq!(unit.fibers[0].eval(&q3, &ex("7")).unwrap(), ex("7"));
        assert!(unit.fibers[0].pieces[0].check_unit_lipschitz(&q3, W).is_ok());
        let ext = extend_fiber(&q3, &unit.fibers[0], Method::Isometric, W).unwrap();
        let back = unscale(&q3, &ext, &s).unwrap();
        assert_eq!(back.claimed_lipschitz, Norm::Pow(1));
        assert_eq!(back.eval(&q3, &ex("7")).unwrap(), ex("7/3"));

        let q5 = Qp::new(5).unwrap();
        assert!(matches!(
            rescale_to_unit(&q5, &Family::default(), &r("2")),
            Err(Error::UnsupportedLambda(_))
        ));
        assert_eq!(round_lambda_up(&q5, &r("2")).unwrap(), r("5"));
        assert_eq!(round_lambda_up(&q5, &r("1/7")).unwrap(), r("1/5"));
        assert_eq!(round_lambda_up(&q5, &r("25")).unwrap(), r("25"));
    }

    #[test]
    fn phi_examples() {
        let q3 = Qp::new(3).unwrap();
        let f = fiber(&q3, "1", 1, 1, None, None);
        assert_eq!(phi_rescale(&q3, &f, &ex("0")).unwrap(), ex("0"));
        assert_eq!(phi_rescale(&q3, &f, &ex("2")).unwrap(), ex("4"));
        for x in ["1", "4", "7/2", "3", "10/9"] {
            let x = ex(x);
            if f.contains(&q3, &x).unwrap() {
                assert_eq!(phi_rescale(&q3, &f, &x).unwrap(), x);
            }
        }
    }

    #[test]
    fn center_extension_values() {
        let q3 = Qp::new(3).unwrap();
        let g = prepared(&q3, 1, 1, "1", "0", fiber(&q3, "1", 1, 1, Some(0), None));
        let ext = extend_by_center(&q3, &g, W).unwrap();
        assert_eq!(ext.claimed_lipschitz, Norm::Pow(1));
        assert_eq!(ext.eval(&q3, &ex("1")).unwrap(), ex("1"));
        assert_eq!(ext.eval(&q3, &ex("2")).unwrap(), ex("0"));
    }

    #[test]
    fn zero_cell_target_is_constant() {
        let q3 = Qp::new(3).unwrap();
        let g = PreparedFunction {
            a: 0,
            b: 1,
            e: r("0"),
            c: r("0"),
            c_prime: r("5"),
            source: fiber(&q3, "1", 1, 1, Some(0), None),
            target: CosetSpec::zero(),
        };
        for method in [Method::Center, Method::Phi, Method::Isometric] {
            let ext = extend(&q3, &g, method, W).unwrap();
            assert_eq!(ext.claimed_lipschitz, Norm::ONE);
            assert_eq!(ext.eval(&q3, &ex("1/9")).unwrap(), ex("5"));
        }
    }

    #[test]
    fn phi_constant_for_equal_depths() {
        let q3 = Qp::new(3).unwrap();
        let g = prepared(&q3, 1, 1, "1", "0", fiber(&q3, "1", 1, 1, Some(0), None));
        assert_eq!(extend_with_phi(&q3, &g, W).unwrap().claimed_lipschitz, Norm::ONE);
    }

    #[test]
    fn threshold_for_squaring() {
        let q5 = Qp::new(5).unwrap();
        let g = prepared(&q5, 2, 1, "1", "0", fiber(&q5, "1", 1, 1, Some(0), None));
        assert_eq!(threshold(&q5, &g).unwrap(), Some(r("0")));
        assert_eq!(validity_bound(&q5, &g).unwrap(), Some(r("0")));
        let split = split_at_threshold(&q5, &g).unwrap();
        assert!(split.balls.is_empty());
        assert_eq!(split.upper.unwrap().l_min, Some(0));
    }

    #[test]
    fn isometric_dispatch() {
        let q3 = Qp::new(3).unwrap();
        let single = prepared(&q3, 3, 1, "1/3", "0", fiber(&q3, "1", 1, 1, Some(0), Some(0)));
        let ext = extend_isometric(&q3, &single, W).unwrap();
        assert_eq!(ext.claimed_lipschitz, Norm::ONE);
        assert!(ext.provenances().contains(&Provenance::IsoQgt1));

        let inv = prepared(&q3, -3, 1, "1/3", "0", fiber(&q3, "1", 1, 1, Some(-2), Some(0)));
        let split = split_at_threshold(&q3, &inv).unwrap();
        assert_eq!(split.balls.iter().map(|b| b.l).collect::<Vec<_>>(), vec![0]);
        assert_eq!(split.upper.as_ref().unwrap().l_max, Some(-1));
        let ext = extend_isometric(&q3, &inv, W).unwrap();
        assert!(ext.provenances().contains(&Provenance::IsoQlt1));
        for x in ["1", "1/3", "4/9", "7/3"] {
            let x = ex(x);
            assert_eq!(ext.eval(&q3, &x).unwrap(), inv.eval(&q3, &x, 30).unwrap());
        }
    }

    #[test]
    fn unbounded_against_validity_bound() {
        let q5 = Qp::new(5).unwrap();
        let g = PreparedFunction {
            source: fiber(&q5, "1", 1, 1, None, Some(3)),
            ..prepared(&q5, 2, 1, "1", "0", fiber(&q5, "1", 1, 1, Some(0), Some(3)))
        };
        assert!(matches!(split_at_threshold(&q5, &g), Err(Error::NotUnitLipschitz(_))));
    }

    #[test]
    fn glue_two_constants() {
        let q3 = Qp::new(3).unwrap();
        let b1 = Ball::new(&q3, 0, r("0"), 1, 1).unwrap();
        let b2 = Ball::new(&q3, 0, r("0"), 1, 2).unwrap();
        let e1 = constant(PointSet::single(Constituent::Ball(b1)), ex("1"), Provenance::Center);
        let mut e2 = constant(PointSet::single(Constituent::Ball(b2)), ex("4"), Provenance::Center);
        e2.claimed_lipschitz = Norm::Pow(1);
        let g = glue(&q3, vec![e1.clone(), e2]).unwrap();
        assert_eq!(g.claimed_lipschitz, Norm::Pow(1));
        assert_eq!(g.eval(&q3, &ex("4")).unwrap(), ex("1"));
        assert_eq!(g.eval(&q3, &ex("5")).unwrap(), ex("4"));
        // 0 and 3 are equidistant from both balls; ties go to the first part
        assert_eq!(g.eval(&q3, &ex("3")).unwrap(), ex("1"));
        assert_eq!(glue(&q3, vec![e1.clone()]).unwrap(), e1);
    }

    #[test]
    fn glue_detects_disagreement() {
        let q3 = Qp::new(3).unwrap();
        let b = Ball::new(&q3, 0, r("0"), 1, 1).unwrap();
        let e1 = constant(PointSet::single(Constituent::Ball(b.clone())), ex("1"), Provenance::Center);
        let e2 = constant(PointSet::single(Constituent::Ball(b)), ex("2"), Provenance::Center);
        assert!(matches!(glue(&q3, vec![e1, e2]), Err(Error::DisagreementOnSharedDomain(_))));
    }

    #[test]
    fn extension_serializes_with_tags() {
        let q3 = Qp::new(3).unwrap();
        let g = prepared(&q3, 1, 1, "1", "0", fiber(&q3, "1", 1, 1, Some(0), None));
        let ext = extend_isometric(&q3, &g, W).unwrap();
        let j = serde_json::to_string(&ext).unwrap();
        assert!(j.contains("\"iso-q1\""));
        let back: ExtendedFunction = serde_json::from_str(&j).unwrap();
        assert_eq!(back, ext);
    }
}
