//! Task execution and reports.

use serde::Serialize;
use ultralip::extension::{extend_family, ExtendedFunction, FamilyExtension, FiberFunction};
use ultralip::functions::check_jacobian;
use ultralip::geometry::PointSet;
use ultralip::report::{Check, Status, VerificationReport};
use ultralip::verify::{check_restriction, estimate_lipschitz, estimate_on_points, verify_identities, Lattice, SampleConfig};
use ultralip::{Norm, PadicScalar, Qp, Rational};

use crate::problem::{ConfigOverride, Problem, Subject, Task, SCHEMA};

#[derive(Clone, Debug, Serialize)]
pub struct TaskReport {
    pub task: String,
    pub config: SampleConfig,
    pub checks: Vec<Check>,
    pub overall: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub claimed_lipschitz: Option<Norm>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub p: u64,
    pub tasks: Vec<TaskReport>,
    pub overall: Status,
}

/// An extension produced by an extend or glue task.
#[derive(Clone, Debug, Serialize, serde::Deserialize)]
pub struct SavedExtension {
    pub schema: u32,
    pub p: u64,
    pub task: String,
    pub window: ultralip::geometry::Window,
    pub extension: FamilyExtension,
}

pub struct RunOutput {
    pub report: RunReport,
    /// `(task index, extension)` for every extend or glue task that succeeded.
    pub extensions: Vec<(usize, SavedExtension)>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("ultralip report, p = {}\n", self.p);
        for t in &self.tasks {
            out.push_str(&format!("\n== {} (seed {}, precision {}) ==\n", t.task, t.config.seed, t.config.precision));
            if let Some(c) = t.claimed_lipschitz {
                out.push_str(&format!("claimed Lipschitz constant {c}\n"));
            }
            out.push_str(&VerificationReport::new(t.checks.clone()).summary());
        }
        out.push_str(&format!("\noverall: {}\n", self.overall));
        out
    }
}

/// Run every task in order. Flags override per-task settings, which
/// override the problem's defaults.
pub fn run(problem: &Problem, flags: &ConfigOverride) -> RunOutput {
    let qp = &problem.qp;
    let mut tasks = Vec::new();
    let mut extensions = Vec::new();
    let mut latest: Option<FamilyExtension> = None;
    for (index, task) in problem.spec.tasks.iter().enumerate() {
        let mut cfg = problem.spec.base_config();
        if let Some(o) = task.config() {
            o.apply(&mut cfg);
        }
        flags.apply(&mut cfg);
        let mut claimed = None;
        let checks = match task {
            Task::CheckJacobian { .. } => jacobian_checks(qp, problem, &cfg),
            Task::VerifyIdentities { .. } => each_piece(problem, |g| verify_identities(qp, g, &cfg).checks),
            Task::Extend { method, .. } | Task::Glue { method, .. } => {
                match extend_family(qp, &problem.family, *method, cfg.window) {
                    Err(e) => vec![Check::failed(task.label(), e.to_string())],
                    Ok(ext) => {
                        claimed = Some(ext.claimed_lipschitz());
                        let checks = extension_checks(qp, problem, &ext, &cfg, matches!(task, Task::Glue { .. }));
                        extensions.push((
                            index,
                            SavedExtension {
                                schema: SCHEMA,
                                p: qp.p(),
                                task: task.label(),
                                window: cfg.window,
                                extension: ext.clone(),
                            },
                        ));
                        latest = Some(ext);
                        checks
                    }
                }
            }
            Task::VerifyLipschitz { claimed: c, of, .. } => {
                claimed = Some(*c);
                match of {
                    Subject::Input => input_lipschitz(qp, problem, *c, &cfg),
                    Subject::Extension => match &latest {
                        None => vec![Check::failed(task.label(), "no extension has been built yet")],
                        Some(ext) => ext
                            .fibers
                            .iter()
                            .zip(&problem.family.fibers)
                            .map(|(fe, f)| {
                                let lat = fiber_lattice(f, &cfg);
                                let g = |x: &PadicScalar| fe.extension.eval(qp, x);
                                estimate_check(qp, &g, &lat, Some(*c), &cfg, &format!("lipschitz y={}", ys(&f.y)))
                            })
                            .collect(),
                    },
                }
            }
        };
        let overall = VerificationReport::new(checks.clone()).overall();
        tasks.push(TaskReport {
            task: task.label(),
            config: cfg,
            checks,
            overall,
            claimed_lipschitz: claimed,
        });
    }
    let overall = Status::from_bool(tasks.iter().all(|t| t.overall.passed()));
    RunOutput {
        report: RunReport {
            schema: SCHEMA,
            p: qp.p(),
            tasks,
            overall,
        },
        extensions,
    }
}

fn ys(y: &[Rational]) -> String {
    let parts: Vec<String> = y.iter().map(|r| r.to_string()).collect();
    format!("[{}]", parts.join(","))
}

fn each_piece(problem: &Problem, mut f: impl FnMut(&ultralip::functions::PreparedFunction) -> Vec<Check>) -> Vec<Check> {
    let mut out = Vec::new();
    for fiber in &problem.family.fibers {
        for (j, g) in fiber.pieces.iter().enumerate() {
            for mut c in f(g) {
                c.name = format!("y={} piece {j} {}", ys(&fiber.y), c.name);
                out.push(c);
            }
        }
    }
    out
}

fn jacobian_checks(qp: &Qp, problem: &Problem, cfg: &SampleConfig) -> Vec<Check> {
    each_piece(problem, |g| match g.source.balls(qp, cfg.window) {
        Err(e) => vec![Check::failed("jacobian", e.to_string())],
        Ok(balls) if balls.is_empty() => vec![Check::failed("jacobian", "no balls in the window")],
        Ok(balls) => balls
            .iter()
            .map(|b| check_jacobian(qp, g, b, cfg.samples, cfg.seed))
            .collect(),
    })
}

/// `c + p^(lo - 1) k` for `k < p^precision`, centered on the first piece.
fn fiber_lattice(f: &FiberFunction, cfg: &SampleConfig) -> Lattice {
    Lattice::new(f.pieces[0].c.clone(), cfg.window.lo - 1, cfg.precision)
}

fn lattice_points(qp: &Qp, lat: &Lattice, cfg: &SampleConfig) -> ultralip::Result<(Vec<Rational>, bool)> {
    if lat.size(qp)? <= cfg.exhaustive_cap {
        Ok((lat.points(qp)?, true))
    } else {
        Ok((lat.sample(qp, cfg.samples, cfg.seed)?, false))
    }
}

fn estimate_check(
    qp: &Qp,
    f: &dyn Fn(&PadicScalar) -> ultralip::Result<PadicScalar>,
    lat: &Lattice,
    claimed: Option<Norm>,
    cfg: &SampleConfig,
    name: &str,
) -> Check {
    match estimate_lipschitz(qp, f, lat, claimed, cfg) {
        Ok(est) => est.to_check(name),
        Err(e) => Check::failed(name, e.to_string()),
    }
}

fn extension_checks(qp: &Qp, problem: &Problem, ext: &FamilyExtension, cfg: &SampleConfig, glued: bool) -> Vec<Check> {
    let mut out = Vec::new();
    for (fe, f) in ext.fibers.iter().zip(&problem.family.fibers) {
        let lat = fiber_lattice(f, cfg);
        let e: &ExtendedFunction = &fe.extension;
        let g = |x: &PadicScalar| e.eval(qp, x);
        let label = if glued { "glued extension" } else { "extension" };
        out.push(estimate_check(
            qp,
            &g,
            &lat,
            Some(e.claimed_lipschitz),
            cfg,
            &format!("y={} {label} within claimed {}", ys(&f.y), e.claimed_lipschitz),
        ));
        let original = |x: &PadicScalar| f.eval(qp, x);
        let restriction = lattice_points(qp, &lat, cfg)
            .and_then(|(pts, _)| check_restriction(qp, &g, &original, &f.domain(), &pts));
        out.push(match restriction {
            Ok(mut c) => {
                c.name = format!("y={} restriction", ys(&f.y));
                c
            }
            Err(err) => Check::failed(format!("y={} restriction", ys(&f.y)), err.to_string()),
        });
    }
    out
}

fn input_lipschitz(qp: &Qp, problem: &Problem, claimed: Norm, cfg: &SampleConfig) -> Vec<Check> {
    problem
        .family
        .fibers
        .iter()
        .map(|f| {
            let name = format!("y={} input lipschitz", ys(&f.y));
            let lat = fiber_lattice(f, cfg);
            let domain: PointSet = f.domain();
            let run = || -> ultralip::Result<Check> {
                let (pts, exhaustive) = lattice_points(qp, &lat, cfg)?;
                let mut inside = Vec::new();
                for x in pts {
                    if domain.contains(qp, &PadicScalar::Exact(x.clone()))? {
                        inside.push(x);
                    }
                }
                let g = |x: &PadicScalar| f.eval(qp, x);
                let mut est = estimate_on_points(qp, &g, &inside, Some(claimed))?;
                est.exhaustive = exhaustive;
                Ok(est.to_check(&name))
            };
            run().unwrap_or_else(|e| Check::failed(name.clone(), e.to_string()))
        })
        .collect()
}

/// The fiber's representable region: `c` itself and points with
/// `ord(x - c)` at or above the window's lower end.
pub fn representable(qp: &Qp, f: &FiberFunction, window_lo: i64, x: &Rational) -> bool {
    let c = &f.pieces[0].c;
    match x.sub(c).valuation(qp.p()) {
        None => true,
        Some(v) => v >= window_lo,
    }
}
