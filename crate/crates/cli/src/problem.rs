//! Problem files: the prime, default sampling, a family of prepared
//! functions and the tasks to run on it.

use serde::{Deserialize, Serialize};
use ultralip::extension::{Family, FiberFunction, Method};
use ultralip::functions::PreparedFunction;
use ultralip::geometry::{CellFiber, Window};
use ultralip::verify::SampleConfig;
use ultralip::{CosetSpec, Norm, Qp, Rational};

use crate::CliError;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub schema: u32,
    pub p: u64,
    /// Lattice depth used by exhaustive and sampled estimates.
    pub precision: u32,
    pub window: Window,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub family: FamilySpec,
    pub tasks: Vec<Task>,
}

fn default_samples() -> usize {
    SampleConfig::default().samples
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub fibers: Vec<FiberSpec>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSpec {
    #[serde(default)]
    pub y: Vec<Rational>,
    pub pieces: Vec<PieceSpec>,
}

/// `c' + (e (x - c)^a)^(1/b)` on `source`; the center `c` is the source's.
/// Without `target` the image coset is inferred from the function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub a: i64,
    #[serde(default = "one")]
    pub b: u32,
    pub e: Rational,
    pub c_prime: Rational,
    pub source: CellFiber,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<CosetSpec>,
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Task {
    CheckJacobian {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        config: Option<ConfigOverride>,
    },
    VerifyIdentities {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        config: Option<ConfigOverride>,
    },
    Extend {
        method: Method,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        config: Option<ConfigOverride>,
    },
    /// Extend every piece of a fiber with `method` and glue the pieces.
    Glue {
        #[serde(default = "isometric")]
        method: Method,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        config: Option<ConfigOverride>,
    },
    VerifyLipschitz {
        claimed: Norm,
        #[serde(default)]
        of: Subject,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        config: Option<ConfigOverride>,
    },
}

fn isometric() -> Method {
    Method::Isometric
}

/// What `verify-lipschitz` measures: the input on its domain, or the
/// extension built by the most recent extend or glue task.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subject {
    #[default]
    Input,
    Extension,
}

impl Task {
    pub fn label(&self) -> String {
        match self {
            Task::CheckJacobian { .. } => "check-jacobian".into(),
            Task::VerifyIdentities { .. } => "verify-identities".into(),
            Task::Extend { method, .. } => format!("extend:{}", method_name(*method)),
            Task::Glue { method, .. } => format!("glue:{}", method_name(*method)),
            Task::VerifyLipschitz { claimed, of, .. } => {
                format!("verify-lipschitz:{claimed}:{}", if *of == Subject::Input { "input" } else { "extension" })
            }
        }
    }

    pub fn config(&self) -> Option<&ConfigOverride> {
        match self {
            Task::CheckJacobian { config }
            | Task::VerifyIdentities { config }
            | Task::Extend { config, .. }
            | Task::Glue { config, .. }
            | Task::VerifyLipschitz { config, .. } => config.as_ref(),
        }
    }
}

pub fn method_name(m: Method) -> &'static str {
    match m {
        Method::Center => "center",
        Method::Phi => "phi",
        Method::Isometric => "isometric",
    }
}

/// Per-task or command-line overrides of the sampling defaults.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhaustive_cap: Option<u64>,
}

impl ConfigOverride {
    pub fn apply(&self, cfg: &mut SampleConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(s) = self.samples {
            cfg.samples = s;
        }
        if let Some(n) = self.precision {
            cfg.precision = n;
        }
        if let Some(w) = self.window {
            cfg.window = w;
        }
        if let Some(c) = self.exhaustive_cap {
            cfg.exhaustive_cap = c;
        }
    }
}

/// A validated problem: the field, the family with every target resolved,
/// and the tasks.
#[derive(Clone, Debug)]
pub struct Problem {
    pub spec: ProblemSpec,
    pub qp: Qp,
    pub family: Family,
}

impl ProblemSpec {
    pub fn parse(text: &str) -> Result<ProblemSpec, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    /// Canonical JSON: defaults filled in, fixed key order.
    pub fn canonical(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }

    pub fn base_config(&self) -> SampleConfig {
        SampleConfig {
            seed: self.seed,
            samples: self.samples,
            precision: self.precision,
            window: self.window,
            ..SampleConfig::default()
        }
    }

    pub fn validate(self) -> Result<Problem, CliError> {
        let bad = |msg: String| CliError::Parse(msg);
        if self.schema != SCHEMA {
            return Err(bad(format!("unsupported schema {} (expected {SCHEMA})", self.schema)));
        }
        let qp = Qp::new(self.p).map_err(|e| bad(e.to_string()))?;
        if self.window.lo > self.window.hi {
            return Err(bad(format!("empty window [{}, {}]", self.window.lo, self.window.hi)));
        }
        if self.family.fibers.is_empty() {
            return Err(bad("family has no fibers".into()));
        }
        let mut fibers = Vec::new();
        for (i, f) in self.family.fibers.iter().enumerate() {
            if f.pieces.is_empty() {
                return Err(bad(format!("fiber {i} has no pieces")));
            }
            let mut pieces = Vec::new();
            for (j, piece) in f.pieces.iter().enumerate() {
                let g = piece
                    .build(&qp, self.window)
                    .map_err(|e| bad(format!("fiber {i} piece {j}: {e}")))?;
                let need = g.source.coset.m.max(g.target.m) + 4;
                if self.precision < need {
                    return Err(bad(format!(
                        "precision {} is below max(m, m') + 4 = {need} for fiber {i} piece {j}",
                        self.precision
                    )));
                }
                pieces.push(g);
            }
            fibers.push(FiberFunction { y: f.y.clone(), pieces });
        }
        Ok(Problem {
            qp,
            family: Family { fibers },
            spec: self,
        })
    }
}

impl PieceSpec {
    pub fn build(&self, qp: &Qp, window: Window) -> ultralip::Result<PreparedFunction> {
        self.source.validate(qp)?;
        match &self.target {
            None => PreparedFunction::with_inferred_target(
                qp,
                self.a,
                self.b,
                self.e.clone(),
                self.c_prime.clone(),
                self.source.clone(),
                window,
            ),
            Some(target) => {
                let g = PreparedFunction {
                    a: self.a,
                    b: self.b,
                    e: self.e.clone(),
                    c: self.source.center.clone(),
                    c_prime: self.c_prime.clone(),
                    source: self.source.clone(),
                    target: target.clone(),
                };
                g.validate(qp)?;
                Ok(g)
            }
        }
    }
}
