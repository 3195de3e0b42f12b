//! The structured report emitted by every top-level operation, shared by the
//! case studies and the CLI JSON output. Field order and map ordering are
//! deterministic so identical inputs serialize byte-identically.

use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub verdicts: Vec<Verdict>,
    /// name -> canonical printed expression (re-parseable in the DSL grammar)
    pub expressions: BTreeMap<String, String>,
    pub numeric_checks: Vec<NumericCheck>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub verdict: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NumericCheck {
    pub name: String,
    pub max_rel_err: f64,
    pub passed: bool,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Report {
        Report {
            command: command.into(),
            ..Report::default()
        }
    }

    pub fn input(&mut self, name: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.inputs.insert(name.into(), value.into());
        self
    }

    pub fn verdict(
        &mut self,
        name: impl Into<String>,
        verdict: impl Into<String>,
        detail: impl Into<String>,
    ) -> &mut Self {
        self.verdicts.push(Verdict {
            name: name.into(),
            verdict: verdict.into(),
            detail: detail.into(),
        });
        self
    }

    pub fn expression(&mut self, name: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.expressions.insert(name.into(), value.into());
        self
    }

    pub fn warning(&mut self, msg: impl Into<String>) -> &mut Self {
        self.warnings.push(msg.into());
        self
    }

    pub fn numeric_check(&mut self, name: impl Into<String>, max_rel_err: f64, passed: bool) {
        self.numeric_checks.push(NumericCheck {
            name: name.into(),
            max_rel_err,
            passed,
        });
    }
}
