//! Batch front end: parse a problem file, run its tasks, emit reports.

pub mod problem;
pub mod run;

use ultralip::extension::{extend_family, FamilyExtension};
use ultralip::{PadicScalar, Rational};

use problem::{Problem, ProblemSpec, Task};
use run::{representable, SavedExtension};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("problem file error: {0}")]
    Parse(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Library(#[from] ultralip::Error),
    #[error("{0} is outside the representable precision of the window")]
    OutsideRepresentablePrecision(String),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            _ => 1,
        }
    }
}

pub fn load(path: &std::path::Path) -> Result<Problem, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    ProblemSpec::parse(&text)?.validate()
}

/// `f_y(x)` for the extension built by the problem's first extend or glue
/// task, or by a saved extension file.
pub fn eval(problem: &Problem, saved: Option<SavedExtension>, x: &str, y_index: usize) -> Result<PadicScalar, CliError> {
    let x: Rational = x.parse()?;
    let fiber = problem
        .family
        .fibers
        .get(y_index)
        .ok_or_else(|| CliError::Usage(format!("no fiber with index {y_index}")))?;
    let (ext, window): (FamilyExtension, _) = match saved {
        Some(s) => {
            if s.p != problem.qp.p() {
                return Err(CliError::Usage(format!("extension is over Q_{}, problem over Q_{}", s.p, problem.qp.p())));
            }
            (s.extension, s.window)
        }
        None => {
            let method = problem
                .spec
                .tasks
                .iter()
                .find_map(|t| match t {
                    Task::Extend { method, .. } | Task::Glue { method, .. } => Some(*method),
                    _ => None,
                })
                .ok_or_else(|| CliError::Usage("the problem has no extend task; pass --extension".into()))?;
            (extend_family(&problem.qp, &problem.family, method, problem.spec.window)?, problem.spec.window)
        }
    };
    if !representable(&problem.qp, fiber, window.lo, &x) {
        return Err(CliError::OutsideRepresentablePrecision(format!(
            "x = {x} (ord(x - c) below the window's lower end {})",
            window.lo
        )));
    }
    let fe = ext
        .fibers
        .get(y_index)
        .ok_or_else(|| CliError::Usage(format!("extension has no fiber {y_index}")))?;
    Ok(fe.extension.eval(&problem.qp, &PadicScalar::Exact(x))?)
}
