//! Browser demo. Each explorer takes a JSON query and returns a JSON view;
//! the `wasm_bindgen` exports only forward strings.

use serde::{Deserialize, Serialize};
use ultralip::extension::{extend, Method};
use ultralip::functions::PreparedFunction;
use ultralip::geometry::{Ball, CellFiber, Window};
use ultralip::verify::{estimate_on_points, Lattice};
use ultralip::{CosetSpec, Norm, PadicScalar, Qp, Rational};
use wasm_bindgen::prelude::*;

/// Largest lattice the extension explorer will exhaust.
pub const MAX_POINTS: u64 = 2401;

fn err(e: impl ToString) -> String {
    e.to_string()
}

/// Position of `x` in `[0, 1)` under the Monna map of `(x - offset) p^(-base)`
/// truncated to `digits` digits: `sum a_i p^i` goes to `sum a_i p^(-i-1)`.
pub fn monna(qp: &Qp, x: &PadicScalar, base: i64, digits: u32) -> Option<f64> {
    let a = qp.to_approx(x, digits, base + digits as i64).ok()?;
    let Some(ord) = a.ord() else {
        return Some(0.0);
    };
    let shift = ord - base;
    if shift < 0 {
        return None;
    }
    if shift >= digits as i64 {
        return Some(0.0);
    }
    let p = qp.p();
    let mut r = a.unit();
    let mut pos = 0.0;
    let mut scale = 1.0 / p as f64;
    for _ in 0..shift {
        scale /= p as f64;
    }
    for _ in shift..digits as i64 {
        pos += (r % p) as f64 * scale;
        r /= p;
        scale /= p as f64;
    }
    Some(pos)
}

#[derive(Deserialize)]
pub struct BallQuery {
    pub p: u64,
    pub l: i64,
    #[serde(default = "Rational::zero")]
    pub center: Rational,
    pub m: u32,
    pub residue: u64,
    /// Extra digits below the radius used to list members.
    #[serde(default = "two")]
    pub depth: u32,
    #[serde(default)]
    pub probe: Option<Rational>,
}

fn two() -> u32 {
    2
}

#[derive(Serialize)]
pub struct PointView {
    pub x: Rational,
    pub monna: f64,
}

#[derive(Serialize)]
pub struct ProbeView {
    pub x: Rational,
    pub contains: bool,
    pub distance: Norm,
}

#[derive(Serialize)]
pub struct BallView {
    pub radius: Norm,
    pub canonical_point: Rational,
    pub members: Vec<PointView>,
    pub probe: Option<ProbeView>,
}

pub fn ball_explorer(query: &str) -> Result<String, String> {
    let q: BallQuery = serde_json::from_str(query).map_err(err)?;
    let qp = Qp::new(q.p).map_err(err)?;
    let ball = Ball::new(&qp, q.l, q.center.clone(), q.m, q.residue).map_err(err)?;
    if qp.modulus(q.depth).map_err(err)? > MAX_POINTS {
        return Err(format!("depth {} lists too many points", q.depth));
    }
    let digits = q.m + q.depth;
    let members = ball
        .points(&qp, q.depth)
        .map_err(err)?
        .into_iter()
        .map(|x| {
            let shifted = PadicScalar::Exact(x.sub(&q.center));
            let monna = monna(&qp, &shifted, q.l, digits).unwrap_or(0.0);
            PointView { x, monna }
        })
        .collect();
    let probe = match q.probe {
        None => None,
        Some(x) => {
            let px = PadicScalar::Exact(x.clone());
            Some(ProbeView {
                contains: ball.contains(&qp, &px).map_err(err)?,
                distance: ball.distance(&qp, &px).map_err(err)?,
                x,
            })
        }
    };
    let view = BallView {
        radius: ball.radius(),
        canonical_point: ball.canonical_point(&qp),
        members,
        probe,
    };
    serde_json::to_string(&view).map_err(err)
}

#[derive(Deserialize)]
pub struct ExtensionQuery {
    pub p: u64,
    pub a: i64,
    #[serde(default = "one")]
    pub b: u32,
    pub e: Rational,
    #[serde(default = "Rational::zero")]
    pub c: Rational,
    #[serde(default = "Rational::zero")]
    pub c_prime: Rational,
    pub xi: Rational,
    pub m: u32,
    #[serde(default = "one")]
    pub n: u32,
    pub l_min: i64,
    pub l_max: i64,
    pub method: Method,
    #[serde(default = "four")]
    pub digits: u32,
}

fn one() -> u32 {
    1
}

fn four() -> u32 {
    4
}

#[derive(Serialize)]
pub struct SamplePoint {
    pub x: Rational,
    pub value: String,
    pub in_domain: bool,
    pub monna_x: f64,
    pub monna_y: f64,
}

#[derive(Serialize)]
pub struct ExtensionView {
    pub claimed: Norm,
    pub estimate: Norm,
    pub input_estimate: Norm,
    pub pass: bool,
    pub witness: Option<(Rational, Rational)>,
    pub pairs: u64,
    pub target: CosetSpec,
    pub points: Vec<SamplePoint>,
}

pub fn extension_explorer(query: &str) -> Result<String, String> {
    let q: ExtensionQuery = serde_json::from_str(query).map_err(err)?;
    let qp = Qp::new(q.p).map_err(err)?;
    let window = Window::new(q.l_min, q.l_max);
    let coset = CosetSpec::new(q.xi.clone(), q.m, q.n).map_err(err)?;
    let fiber = CellFiber::new(&qp, q.c.clone(), coset, Some(q.l_min), Some(q.l_max)).map_err(err)?;
    let g = PreparedFunction::with_inferred_target(&qp, q.a, q.b, q.e.clone(), q.c_prime.clone(), fiber, window)
        .map_err(err)?;
    let ext = extend(&qp, &g, q.method, window).map_err(err)?;
    let lattice = Lattice::new(q.c.clone(), q.l_min - 1, q.digits);
    if lattice.size(&qp).map_err(err)? > MAX_POINTS {
        return Err(format!("{}^{} points is too many for the browser", q.p, q.digits));
    }
    let xs = lattice.points(&qp).map_err(err)?;
    let f = |x: &PadicScalar| ext.eval(&qp, x);
    let est = estimate_on_points(&qp, &f, &xs, Some(ext.claimed_lipschitz)).map_err(err)?;
    let mut inside = Vec::new();
    let mut points = Vec::with_capacity(xs.len());
    let mut values = Vec::with_capacity(xs.len());
    for x in &xs {
        let px = PadicScalar::Exact(x.clone());
        let in_domain = g.source.contains(&qp, &px).map_err(err)?;
        if in_domain {
            inside.push(x.clone());
        }
        values.push((x.clone(), ext.eval(&qp, &px).map_err(err)?, in_domain));
    }
    let own = estimate_on_points(&qp, &|x| g.eval(&qp, x, qp.max_digits()), &inside, None).map_err(err)?;
    let low = values
        .iter()
        .filter_map(|(_, v, _)| qp.ord(v).ok().and_then(|o| o.finite()))
        .min()
        .unwrap_or(0);
    let plot_digits = q.digits + 2;
    for (x, v, in_domain) in values {
        let shifted = PadicScalar::Exact(x.sub(&q.c));
        points.push(SamplePoint {
            monna_x: monna(&qp, &shifted, q.l_min - 1, q.digits).unwrap_or(0.0),
            monna_y: monna(&qp, &v, low, plot_digits).unwrap_or(0.0),
            value: v.to_string(),
            in_domain,
            x,
        });
    }
    let view = ExtensionView {
        claimed: ext.claimed_lipschitz,
        estimate: est.ratio,
        input_estimate: own.ratio,
        pass: est.passed(),
        witness: est.argmax.clone(),
        pairs: est.pairs,
        target: g.target.clone(),
        points,
    };
    serde_json::to_string(&view).map_err(err)
}

#[derive(Deserialize)]
pub struct HenselQuery {
    pub p: u64,
    pub u: Rational,
    pub b: u32,
    #[serde(default = "eight")]
    pub digits: u32,
}

fn eight() -> u32 {
    8
}

#[derive(Serialize)]
pub struct RootView {
    pub value: String,
    pub ord: i64,
    /// Base-p digits of the unit part, least significant first.
    pub unit_digits: Vec<u64>,
    pub verified: bool,
}

#[derive(Serialize)]
pub struct HenselView {
    pub roots: Vec<RootView>,
}

pub fn hensel_explorer(query: &str) -> Result<String, String> {
    let q: HenselQuery = serde_json::from_str(query).map_err(err)?;
    let qp = Qp::new(q.p).map_err(err)?;
    let u = PadicScalar::Exact(q.u);
    let roots = qp.hensel_roots(&u, q.b, q.digits).map_err(err)?;
    let roots = roots
        .into_iter()
        .map(|r| {
            let z = PadicScalar::Approx(r);
            let verified = qp.pow(&z, q.b as i64).map(|zb| qp.agrees(&zb, &u)).unwrap_or(false);
            RootView {
                value: z.to_string(),
                ord: r.ord().unwrap_or(0),
                unit_digits: r.unit_digits(),
                verified,
            }
        })
        .collect();
    serde_json::to_string(&HenselView { roots }).map_err(err)
}

#[wasm_bindgen(js_name = exploreBall)]
pub fn explore_ball(query: &str) -> Result<String, JsValue> {
    ball_explorer(query).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = exploreExtension)]
pub fn explore_extension(query: &str) -> Result<String, JsValue> {
    extension_explorer(query).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = exploreHensel)]
pub fn explore_hensel(query: &str) -> Result<String, JsValue> {
    hensel_explorer(query).map_err(|e| JsValue::from_str(&e))
}
