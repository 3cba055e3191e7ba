//! Structured check results shared by the function and verification layers.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::padic::{Norm, PadicScalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Status::Pass
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub x: PadicScalar,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub y: Option<PadicScalar>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    /// First failing pair, or the first pair attaining `ratio`.
    pub witness: Option<Witness>,
    /// Attained ratio, when the check measures one.
    pub ratio: Option<Norm>,
    /// Number of pairs or points examined.
    pub count: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl Check {
    pub fn new(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Pass,
            witness: None,
            ratio: None,
            count: 0,
            note: None,
        }
    }

    pub fn failed(name: impl Into<String>, note: impl Into<String>) -> Self {
        Check {
            status: Status::Fail,
            note: Some(note.into()),
            ..Check::new(name)
        }
    }

    /// Record a failure; only the first witness is kept.
    pub fn fail(&mut self, witness: Witness) {
        if self.status == Status::Pass {
            self.status = Status::Fail;
            self.witness = Some(witness);
        }
    }

    pub fn passed(&self) -> bool {
        self.status.passed()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn new(checks: Vec<Check>) -> Self {
        VerificationReport { checks }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
    }

    pub fn overall(&self) -> Status {
        Status::from_bool(self.checks.iter().all(Check::passed))
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            checks: &'a [Check],
            overall: Status,
        }
        serde_json::to_string_pretty(&Out {
            checks: &self.checks,
            overall: self.overall(),
        })
        .expect("report serializes")
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("{:<4} {} ({} examined)", c.status, c.name, c.count));
            if let Some(r) = c.ratio {
                out.push_str(&format!(", ratio {r}"));
            }
            if let Some(w) = &c.witness {
                match &w.y {
                    Some(y) => out.push_str(&format!(", witness x={} y={}: {}", w.x, y, w.detail)),
                    None => out.push_str(&format!(", witness x={}: {}", w.x, w.detail)),
                }
            }
            if let Some(n) = &c.note {
                out.push_str(&format!(" [{n}]"));
            }
            out.push('\n');
        }
        out.push_str(&format!("overall: {}\n", self.overall()));
        out
    }
}
