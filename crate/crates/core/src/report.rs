//! Structured verdicts shared by ring validation, criteria and sweeps.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::cohomology::{Cohomology, IntClass, Mod2Class};
use crate::serde_int::{big, big_opt, rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    PreconditionViolated,
}

impl Verdict {
    pub fn is_pass(self) -> bool {
        self == Verdict::Pass
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::PreconditionViolated => "PRECONDITION VIOLATED",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Precondition,
    Condition,
}

/// A computed quantity appearing on one side of a condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Value {
    Integer {
        #[serde(with = "big")]
        value: BigInt,
    },
    Rational {
        #[serde(with = "rational")]
        value: BigRational,
    },
    Class {
        class: IntClass,
    },
    Mod2 {
        class: Mod2Class,
    },
    Text {
        text: String,
    },
    NotEvaluated {
        reason: String,
    },
}

impl Value {
    pub fn int(v: impl Into<BigInt>) -> Self {
        Value::Integer { value: v.into() }
    }

    pub fn class(c: &IntClass) -> Self {
        Value::Class { class: c.clone() }
    }

    pub fn mod2(c: &Mod2Class) -> Self {
        Value::Mod2 { class: c.clone() }
    }

    pub fn text(t: impl Into<String>) -> Self {
        Value::Text { text: t.into() }
    }

    pub fn skipped(reason: impl Into<String>) -> Self {
        Value::NotEvaluated {
            reason: reason.into(),
        }
    }

    pub fn render(&self, ring: Option<&Cohomology>) -> String {
        match self {
            Value::Integer { value } => value.to_string(),
            Value::Rational { value } => value.to_string(),
            Value::Class { class } => match ring {
                Some(r) => r.display(class),
                None => class.to_string(),
            },
            Value::Mod2 { class } => match ring {
                Some(r) => r.display_mod2(class),
                None => class.to_string(),
            },
            Value::Text { text } => text.clone(),
            Value::NotEvaluated { reason } => format!("n/a ({reason})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub relation: String,
    pub role: Role,
    pub lhs: Value,
    pub rhs: Value,
    #[serde(with = "big_opt", default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<BigInt>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub criterion: String,
    pub verdict: Verdict,
    pub conditions: Vec<Condition>,
    pub witnesses: BTreeMap<String, IntClass>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(criterion: impl Into<String>) -> Self {
        CheckReport {
            criterion: criterion.into(),
            verdict: Verdict::Pass,
            conditions: Vec::new(),
            witnesses: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, c: Condition) {
        self.conditions.push(c);
        self.refresh_verdict();
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn witness(&mut self, name: impl Into<String>, class: &IntClass) {
        self.witnesses.insert(name.into(), class.clone());
    }

    pub fn condition(&self, name: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.passed)
    }

    /// True when every precondition holds (the criterion proper was decided).
    pub fn preconditions_hold(&self) -> bool {
        self.conditions
            .iter()
            .all(|c| c.passed || c.role != Role::Precondition)
    }

    fn refresh_verdict(&mut self) {
        self.verdict = if !self.preconditions_hold() {
            Verdict::PreconditionViolated
        } else if self.conditions.iter().all(|c| c.passed) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
    }

    pub fn render(&self, ring: Option<&Cohomology>) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}: {}", self.criterion, self.verdict.label());
        for c in &self.conditions {
            let tag = match c.role {
                Role::Precondition => "pre ",
                Role::Condition => "cond",
            };
            let mark = if c.passed { "ok" } else { "FAILED" };
            let lhs = c.lhs.render(ring);
            let rhs = c.rhs.render(ring);
            let rel = match &c.modulus {
                Some(m) => format!("{lhs} vs {rhs} (mod {m})"),
                None => format!("{lhs} vs {rhs}"),
            };
            let _ = writeln!(out, "  [{tag}] {}  [{}]: {rel}  {mark}", c.name, c.relation);
        }
        if !self.witnesses.is_empty() {
            let parts: Vec<String> = self
                .witnesses
                .iter()
                .map(|(k, v)| {
                    let shown = match ring {
                        Some(r) => r.display(v),
                        None => v.to_string(),
                    };
                    format!("{k} = {shown}")
                })
                .collect();
            let _ = writeln!(out, "  witnesses: {}", parts.join(", "));
        }
        for n in &self.notes {
            let _ = writeln!(out, "  note: {n}");
        }
        out
    }
}
