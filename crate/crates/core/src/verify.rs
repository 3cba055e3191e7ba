//! Certification by exhaustion or seeded sampling over finite lattices of
//! Q_p, and an independent nearest-point extension oracle.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::{check_chain_rule, check_image_ball, check_jacobian, check_offset_order, PreparedFunction};
use crate::geometry::{Constituent, PointSet, Window};
use crate::pairs::{Encoded, PairOrd};
use crate::padic::{Norm, PadicScalar, Qp};
use crate::rational::Rational;
use crate::report::{Check, VerificationReport, Witness};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub seed: u64,
    /// Points drawn when a lattice is too large to exhaust.
    pub samples: usize,
    /// Lattice depth: points `offset + p^base k` with `k < p^precision`.
    pub precision: u32,
    pub window: Window,
    /// Lattices up to this many points are exhausted.
    pub exhaustive_cap: u64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            seed: 0,
            samples: 400,
            precision: 5,
            window: Window::new(0, 4),
            exhaustive_cap: 3125,
        }
    }
}

/// `offset + p^base k` for `0 <= k < p^digits`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    pub offset: Rational,
    pub base: i64,
    pub digits: u32,
}

impl Lattice {
    pub fn new(offset: Rational, base: i64, digits: u32) -> Self {
        Lattice { offset, base, digits }
    }

    pub fn size(&self, qp: &Qp) -> Result<u64> {
        qp.modulus(self.digits)
    }

    pub fn point(&self, qp: &Qp, k: u64) -> Rational {
        self.offset
            .add(&Rational::from_integer(k as i64).mul(&qp.prime_power(self.base)))
    }

    pub fn points(&self, qp: &Qp) -> Result<Vec<Rational>> {
        Ok((0..self.size(qp)?).map(|k| self.point(qp, k)).collect())
    }

    /// Seeded subset stratified by `ord(k)`: each valuation in
    /// `0..digits` gets an equal share, plus the offset itself.
    pub fn sample(&self, qp: &Qp, samples: usize, seed: u64) -> Result<Vec<Rational>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = qp.p();
        let mut ks = std::collections::BTreeSet::new();
        ks.insert(0u64);
        let per = samples.div_ceil(self.digits.max(1) as usize);
        for v in 0..self.digits {
            let span = qp.modulus(self.digits - v)?;
            let scale = qp.modulus(v)?;
            for _ in 0..per {
                let mut u = rng.gen_range(1..span);
                if u % p == 0 {
                    u += 1;
                }
                if u < span {
                    ks.insert(u * scale);
                }
            }
        }
        Ok(ks.into_iter().map(|k| self.point(qp, k)).collect())
    }
}

/// Result of a pairwise Lipschitz estimate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LipschitzEstimate {
    /// Largest `|f(x) - f(y)| / |x - y|` over determinate pairs; `0` if none.
    pub ratio: Norm,
    pub argmax: Option<(Rational, Rational)>,
    pub pairs: u64,
    pub indeterminate: u64,
    pub exhaustive: bool,
    pub claimed: Option<Norm>,
    /// First pair violating `claimed` (including indeterminate pairs whose
    /// precision cannot rule a violation out).
    pub violation: Option<(Rational, Rational, String)>,
}

impl LipschitzEstimate {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }

    pub fn to_check(&self, name: &str) -> Check {
        let mut check = Check::new(name);
        check.ratio = Some(self.ratio);
        check.count = self.pairs;
        let mode = if self.exhaustive { "exhaustive" } else { "sampled" };
        check.note = Some(match self.claimed {
            Some(c) => format!("{mode}, claimed {c}, {} indeterminate", self.indeterminate),
            None => format!("{mode}, {} indeterminate", self.indeterminate),
        });
        if let Some((x, y, why)) = &self.violation {
            check.fail(Witness {
                x: PadicScalar::Exact(x.clone()),
                y: Some(PadicScalar::Exact(y.clone())),
                detail: why.clone(),
            });
        } else if let Some((x, y)) = &self.argmax {
            check.witness = Some(Witness {
                x: PadicScalar::Exact(x.clone()),
                y: Some(PadicScalar::Exact(y.clone())),
                detail: format!("attains {}", self.ratio),
            });
        }
        check
    }
}

/// Max of `p^{ord(x-y) - ord(f(x)-f(y))}` over all pairs of `points`.
pub fn estimate_on_points(
    qp: &Qp,
    f: &dyn Fn(&PadicScalar) -> Result<PadicScalar>,
    points: &[Rational],
    claimed: Option<Norm>,
) -> Result<LipschitzEstimate> {
    let xs: Vec<PadicScalar> = points.iter().cloned().map(PadicScalar::Exact).collect();
    let values = xs.iter().map(f).collect::<Result<Vec<_>>>()?;
    let ex = Encoded::new(qp, &xs);
    let ev = Encoded::new(qp, &values);
    let mut est = LipschitzEstimate {
        ratio: Norm::Zero,
        argmax: None,
        pairs: 0,
        indeterminate: 0,
        exhaustive: true,
        claimed,
        violation: None,
    };
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            est.pairs += 1;
            let ox = match ex.ord_diff(i, j) {
                PairOrd::Finite(v) => v,
                _ => continue,
            };
            let ratio = match ev.ord_diff(i, j) {
                PairOrd::Finite(v) => Norm::Pow(ox - v),
                PairOrd::Infinite => Norm::Zero,
                PairOrd::AtLeast(a) => {
                    est.indeterminate += 1;
                    let bound = Norm::Pow(ox - a);
                    if let (Some(c), None) = (claimed, &est.violation) {
                        if bound > c {
                            est.violation = Some((
                                points[i].clone(),
                                points[j].clone(),
                                format!("values agree to precision {a}; cannot certify ratio <= {c}"),
                            ));
                        }
                    }
                    continue;
                }
            };
            if ratio > est.ratio {
                est.ratio = ratio;
                est.argmax = Some((points[i].clone(), points[j].clone()));
            }
            if let (Some(c), None) = (claimed, &est.violation) {
                if ratio > c {
                    est.violation = Some((
                        points[i].clone(),
                        points[j].clone(),
                        format!("ratio {ratio} exceeds claimed {c}"),
                    ));
                }
            }
        }
    }
    Ok(est)
}

/// Exhaust `lattice` when it has at most `cfg.exhaustive_cap` points,
/// otherwise use a stratified seeded subset of it.
pub fn estimate_lipschitz(
    qp: &Qp,
    f: &dyn Fn(&PadicScalar) -> Result<PadicScalar>,
    lattice: &Lattice,
    claimed: Option<Norm>,
    cfg: &SampleConfig,
) -> Result<LipschitzEstimate> {
    let exhaustive = lattice.size(qp)? <= cfg.exhaustive_cap;
    let points = if exhaustive {
        lattice.points(qp)?
    } else {
        lattice.sample(qp, cfg.samples, cfg.seed)?
    };
    let mut est = estimate_on_points(qp, f, &points, claimed)?;
    est.exhaustive = exhaustive;
    Ok(est)
}

/// Every lattice point of `domain` is mapped as `f` maps it.
pub fn check_restriction(
    qp: &Qp,
    extended: &dyn Fn(&PadicScalar) -> Result<PadicScalar>,
    original: &dyn Fn(&PadicScalar) -> Result<PadicScalar>,
    domain: &PointSet,
    points: &[Rational],
) -> Result<Check> {
    let mut check = Check::new("restriction");
    for x in points {
        let x = PadicScalar::Exact(x.clone());
        if !domain.contains(qp, &x)? {
            continue;
        }
        check.count += 1;
        let (a, b) = (extended(&x)?, original(&x)?);
        if a != b {
            check.fail(Witness {
                x,
                y: None,
                detail: format!("extension gives {a}, function gives {b}"),
            });
        }
    }
    Ok(check)
}

/// `f(nearest(x))` with the nearest point chosen canonically: the first
/// constituent at minimal distance, and in it the canonical point of the
/// lowest-order ball inside `B(x, d(x, X))`. The choice depends only on
/// that closed ball, which makes the result 1-Lipschitz when `f` is.
pub struct NearestPointOracle<'a> {
    pub set: &'a PointSet,
    pub f: &'a dyn Fn(&PadicScalar) -> Result<PadicScalar>,
}

impl<'a> NearestPointOracle<'a> {
    pub fn new(set: &'a PointSet, f: &'a dyn Fn(&PadicScalar) -> Result<PadicScalar>) -> Result<Self> {
        if set.is_empty() {
            return Err(Error::EmptyDomain);
        }
        Ok(NearestPointOracle { set, f })
    }

    pub fn nearest(&self, qp: &Qp, x: &PadicScalar) -> Result<PadicScalar> {
        if self.set.contains(qp, x)? {
            return Ok(x.clone());
        }
        let d = self.set.distance(qp, x)?;
        for part in &self.set.parts {
            if part.distance(qp, x)? != d {
                continue;
            }
            return match part {
                Constituent::Point(a) => Ok(PadicScalar::Exact(a.clone())),
                Constituent::Ball(b) => Ok(PadicScalar::Exact(b.canonical_point(qp))),
                Constituent::Fiber(f) if f.is_zero_cell() => Ok(PadicScalar::Exact(f.center.clone())),
                Constituent::Fiber(f) => match f.lowest_ball_within(qp, x, d)? {
                    Some(b) => Ok(PadicScalar::Exact(b.canonical_point(qp))),
                    None => Err(Error::NotClosed(x.to_string())),
                },
            };
        }
        unreachable!("some constituent attains the minimum")
    }

    pub fn eval(&self, qp: &Qp, x: &PadicScalar) -> Result<PadicScalar> {
        (self.f)(&self.nearest(qp, x)?)
    }
}

/// Finite differences against the derivative order, the image-ball
/// bookkeeping, `ord(g - c')`, and the chain-rule identity on every ball of
/// the window.
pub fn verify_identities(qp: &Qp, g: &PreparedFunction, cfg: &SampleConfig) -> VerificationReport {
    let mut report = VerificationReport::default();
    let balls = match g.source.balls(qp, cfg.window) {
        Ok(b) if !b.is_empty() => b,
        Ok(_) => {
            report.push(Check::failed(
                "balls",
                Error::EmptyWindow(cfg.window.lo, cfg.window.hi).to_string(),
            ));
            return report;
        }
        Err(e) => {
            report.push(Check::failed("balls", e.to_string()));
            return report;
        }
    };
    let mut chain = Check::new("chain-rule");
    let mut offset = Check::new("offset-order");
    for ball in &balls {
        report.push(check_jacobian(qp, g, ball, cfg.samples, cfg.seed));
        if g.is_constant() {
            continue;
        }
        report.push(check_image_ball(qp, g, ball));
        let points = match ball.points(qp, 2) {
            Ok(p) => p,
            Err(e) => {
                chain.fail(Witness {
                    x: PadicScalar::Exact(ball.canonical_point(qp)),
                    y: None,
                    detail: e.to_string(),
                });
                continue;
            }
        };
        for x in points {
            let x = PadicScalar::Exact(x);
            for (check, outcome) in [
                (&mut chain, check_chain_rule(qp, g, &x)),
                (&mut offset, check_offset_order(qp, g, &x)),
            ] {
                check.count += 1;
                let detail = match outcome {
                    Ok(Ok(())) => continue,
                    Ok(Err(why)) => why,
                    Err(e) => e.to_string(),
                };
                check.fail(Witness {
                    x: x.clone(),
                    y: None,
                    detail,
                });
            }
        }
    }
    if !g.is_constant() {
        report.push(chain);
        report.push(offset);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Ball, CellFiber};
    use crate::padic::CosetSpec;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn cfg() -> SampleConfig {
        SampleConfig::default()
    }

    #[test]
    fn identity_constant_and_square() {
        let q3 = Qp::new(3).unwrap();
        let z3 = Lattice::new(r("0"), 0, 4);
        let id = |x: &PadicScalar| Ok(x.clone());
        let est = estimate_lipschitz(&q3, &id, &z3, Some(Norm::ONE), &cfg()).unwrap();
        assert_eq!(est.ratio, Norm::ONE);
        assert!(est.passed() && est.exhaustive);

        let constant = |_: &PadicScalar| Ok(PadicScalar::from(7));
        let est = estimate_lipschitz(&q3, &constant, &z3, Some(Norm::ONE), &cfg()).unwrap();
        assert_eq!(est.ratio, Norm::Zero);

        let one_plus = Lattice::new(r("1"), 1, 3);
        let sq = |x: &PadicScalar| Ok(q3.mul(x, x));
        let est = estimate_lipschitz(&q3, &sq, &one_plus, Some(Norm::ONE), &cfg()).unwrap();
        assert_eq!(est.ratio, Norm::ONE);
        assert!(est.passed());
    }

    #[test]
    fn violation_has_witness() {
        let q3 = Qp::new(3).unwrap();
        let div = |x: &PadicScalar| q3.div(x, &PadicScalar::from(3));
        let est = estimate_lipschitz(&q3, &div, &Lattice::new(r("0"), 0, 2), Some(Norm::ONE), &cfg()).unwrap();
        assert_eq!(est.ratio, Norm::Pow(1));
        assert!(!est.passed());
        let check = est.to_check("lipschitz");
        assert!(!check.passed());
        let w = check.witness.unwrap();
        assert_eq!((w.x, w.y), (PadicScalar::from(0), Some(PadicScalar::from(1))));
    }

    #[test]
    fn sampled_never_exceeds_exhaustive() {
        let q5 = Qp::new(5).unwrap();
        let lat = Lattice::new(r("0"), 0, 4);
        let f = |x: &PadicScalar| q5.pow(x, 3);
        let full = estimate_lipschitz(&q5, &f, &lat, None, &cfg()).unwrap();
        let small = SampleConfig {
            exhaustive_cap: 10,
            samples: 40,
            ..cfg()
        };
        let part = estimate_lipschitz(&q5, &f, &lat, None, &small).unwrap();
        assert!(!part.exhaustive);
        assert!(part.ratio <= full.ratio);
    }

    #[test]
    fn sampling_is_deterministic() {
        let q7 = Qp::new(7).unwrap();
        let lat = Lattice::new(r("1/7"), -1, 6);
        assert_eq!(lat.sample(&q7, 50, 9).unwrap(), lat.sample(&q7, 50, 9).unwrap());
        assert_ne!(lat.sample(&q7, 50, 9).unwrap(), lat.sample(&q7, 50, 10).unwrap());
    }

    #[test]
    fn oracle_examples() {
        let q3 = Qp::new(3).unwrap();
        let origin = PointSet::single(Constituent::Point(r("0")));
        let f = |x: &PadicScalar| Ok(q3.add(x, &PadicScalar::from(5)));
        let oracle = NearestPointOracle::new(&origin, &f).unwrap();
        for x in ["1", "1/3", "81", "0"] {
            assert_eq!(oracle.eval(&q3, &PadicScalar::Exact(r(x))).unwrap(), PadicScalar::from(5));
        }

        let two = PointSet::new(vec![
            Constituent::Ball(Ball::new(&q3, 0, r("0"), 2, 1).unwrap()),
            Constituent::Ball(Ball::new(&q3, 1, r("0"), 1, 2).unwrap()),
        ]);
        let g = |x: &PadicScalar| Ok(q3.mul(x, x));
        let oracle = NearestPointOracle::new(&two, &g).unwrap();
        assert_eq!(oracle.eval(&q3, &PadicScalar::from(10)).unwrap(), PadicScalar::from(100));
        let h = |x: &PadicScalar| oracle.eval(&q3, x);
        let est = estimate_lipschitz(&q3, &h, &Lattice::new(r("0"), 0, 4), Some(Norm::ONE), &cfg()).unwrap();
        assert!(est.passed(), "{est:?}");

        assert!(NearestPointOracle::new(&PointSet::default(), &g).is_err());
    }

    #[test]
    fn oracle_reports_open_fibers() {
        let q3 = Qp::new(3).unwrap();
        let fiber = CellFiber::new(&q3, r("0"), CosetSpec::new(r("1"), 1, 1).unwrap(), Some(0), None).unwrap();
        let set = PointSet::single(Constituent::Fiber(fiber));
        let id = |x: &PadicScalar| Ok(x.clone());
        let oracle = NearestPointOracle::new(&set, &id).unwrap();
        assert!(matches!(oracle.eval(&q3, &PadicScalar::from(0)), Err(Error::NotClosed(_))));
        assert_eq!(oracle.eval(&q3, &PadicScalar::from(2)).unwrap(), PadicScalar::from(1));
    }

    #[test]
    fn identities_report() {
        let q3 = Qp::new(3).unwrap();
        let source = CellFiber::new(&q3, r("0"), CosetSpec::new(r("1"), 1, 1).unwrap(), None, None).unwrap();
        let g = PreparedFunction::with_inferred_target(&q3, 2, 1, r("1"), r("0"), source.clone(), Window::new(0, 2)).unwrap();
        let c = SampleConfig {
            window: Window::new(0, 2),
            ..cfg()
        };
        let rep = verify_identities(&q3, &g, &c);
        assert!(rep.overall().passed(), "{}", rep.summary());
        assert_eq!(rep.to_json(), verify_identities(&q3, &g, &c).to_json());

        let lin = PreparedFunction::with_inferred_target(&q3, 1, 1, r("9"), r("2"), source, Window::new(0, 2)).unwrap();
        assert!(verify_identities(&q3, &lin, &c).overall().passed());

        let q2 = Qp::new(2).unwrap();
        let s2 = CellFiber::new(&q2, r("0"), CosetSpec::new(r("1"), 1, 1).unwrap(), None, None).unwrap();
        let sq2 = PreparedFunction::with_inferred_target(&q2, 2, 1, r("1"), r("0"), s2, Window::new(0, 2)).unwrap();
        let rep = verify_identities(&q2, &sq2, &c);
        assert!(!rep.overall().passed());
        assert!(rep.checks.iter().any(|ch| ch.name.starts_with("jacobian") && !ch.passed()));
    }
}
