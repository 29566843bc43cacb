use std::fmt;

use serde::{Deserialize, Serialize};

use crate::funcalg::IntervalSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Holds,
    Fails,
    ConditionalOn,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Holds => "Holds",
            Status::Fails => "Fails",
            Status::ConditionalOn => "ConditionalOn",
            Status::Unknown => "Unknown",
        };
        f.write_str(s)
    }
}

/// Where a relation breaks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A set of positive measure on which the two sides differ.
    Set { set: IntervalSet, point: f64 },
    /// A concrete test function and a point where the sides differ.
    Function { x: String, t: f64, lhs: f64, rhs: f64 },
}

impl Witness {
    /// Representative point of the witness.
    pub fn point(&self) -> f64 {
        match self {
            Witness::Set { point, .. } => *point,
            Witness::Function { t, .. } => *t,
        }
    }

    /// A witness set represented by the midpoint of its largest component.
    pub fn on_set(set: IntervalSet) -> Self {
        let point = set.largest_component().map_or(f64::NAN, |iv| iv.midpoint());
        Witness::Set { set, point }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Set { set, point } => write!(f, "sides differ on {set} (e.g. t = {point})"),
            Witness::Function { x, t, lhs, rhs } => {
                write!(f, "x(t) = {x}, t = {t}: lhs = {lhs}, rhs = {rhs}")
            }
        }
    }
}

/// Outcome of a decider. Build through the constructors so that `Fails`
/// always carries a witness and `Holds` a certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    /// Name of the criterion that decided the case.
    pub rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub certificate: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl Verdict {
    pub fn holds(rule: impl Into<String>, certificate: Vec<String>) -> Self {
        assert!(!certificate.is_empty(), "Holds needs a certificate");
        Verdict {
            status: Status::Holds,
            rule: rule.into(),
            witness: None,
            constraints: Vec::new(),
            certificate,
            reason: None,
        }
    }

    pub fn fails(rule: impl Into<String>, witness: Witness, certificate: Vec<String>) -> Self {
        Verdict {
            status: Status::Fails,
            rule: rule.into(),
            witness: Some(witness),
            constraints: Vec::new(),
            certificate,
            reason: None,
        }
    }

    pub fn unknown(rule: impl Into<String>, reason: impl Into<String>) -> Self {
        Verdict {
            status: Status::Unknown,
            rule: rule.into(),
            witness: None,
            constraints: Vec::new(),
            certificate: Vec::new(),
            reason: Some(reason.into()),
        }
    }

    pub fn conditional(rule: impl Into<String>, constraints: Vec<String>) -> Self {
        Verdict {
            status: Status::ConditionalOn,
            rule: rule.into(),
            witness: None,
            constraints,
            certificate: Vec::new(),
            reason: None,
        }
    }

    pub fn is_holds(&self) -> bool {
        self.status == Status::Holds
    }

    pub fn is_fails(&self) -> bool {
        self.status == Status::Fails
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.status, self.rule)?;
        if let Some(w) = &self.witness {
            write!(f, "\n  witness: {w}")?;
        }
        for c in &self.constraints {
            write!(f, "\n  when: {c}")?;
        }
        for c in &self.certificate {
            write!(f, "\n  because: {c}")?;
        }
        if let Some(r) = &self.reason {
            write!(f, "\n  reason: {r}")?;
        }
        Ok(())
    }
}
