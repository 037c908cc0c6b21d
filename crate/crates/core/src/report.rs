//! Check records, run reports and JSON encoding of tensor blocks.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::scalar::{Mat, Tensor3};
use crate::taylor::Taylor;

/// One named property check.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Set when the value must exceed the tolerance rather than stay below it.
    #[serde(skip)]
    pub floor: bool,
}

impl CheckRecord {
    /// Passes iff the residual is finite and within tolerance.
    pub fn new(name: impl Into<String>, samples: usize, max_residual: f64, tolerance: f64) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            samples,
            max_residual,
            tolerance,
            pass: max_residual.is_finite() && max_residual <= tolerance,
            floor: false,
        }
    }

    /// Passes iff the value is finite and strictly above `floor`.
    pub fn at_least(name: impl Into<String>, samples: usize, value: f64, floor: f64) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            samples,
            max_residual: value,
            tolerance: floor,
            pass: value.is_finite() && value > floor,
            floor: true,
        }
    }

    /// A check that could not be evaluated.
    pub fn failed(name: impl Into<String>, samples: usize, tolerance: f64) -> CheckRecord {
        CheckRecord {
            name: name.into(),
            samples,
            max_residual: f64::INFINITY,
            tolerance,
            pass: false,
            floor: false,
        }
    }

    /// Re-judges an upper-bound check against a new tolerance.
    pub fn with_tolerance(mut self, tol: f64) -> CheckRecord {
        if !self.floor {
            self.tolerance = tol;
            self.pass = self.max_residual.is_finite() && self.max_residual <= tol;
        }
        self
    }
}

/// Running maximum of residuals over samples.
#[derive(Clone, Debug, Default)]
pub struct Accumulator {
    pub samples: usize,
    pub worst: f64,
    pub broken: bool,
}

impl Accumulator {
    pub fn push(&mut self, v: f64) {
        self.samples += 1;
        if v.is_nan() {
            self.broken = true;
        }
        self.worst = self.worst.max(v);
    }

    pub fn push_result(&mut self, v: crate::Result<f64>) {
        match v {
            Ok(x) => self.push(x),
            Err(_) => {
                self.samples += 1;
                self.broken = true;
            }
        }
    }

    pub fn merge(&mut self, o: &Accumulator) {
        self.samples += o.samples;
        self.broken |= o.broken;
        self.worst = self.worst.max(o.worst);
    }

    pub fn record(&self, name: impl Into<String>, tol: f64) -> CheckRecord {
        if self.broken {
            CheckRecord::failed(name, self.samples, tol)
        } else {
            CheckRecord::new(name, self.samples, self.worst, tol)
        }
    }
}

/// Output of one command.
#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
    pub values: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl RunReport {
    pub fn new(command: impl Into<String>) -> RunReport {
        RunReport {
            command: command.into(),
            pass: true,
            checks: Vec::new(),
            values: BTreeMap::new(),
            wall_time_s: None,
        }
    }

    pub fn check(&mut self, c: CheckRecord) {
        self.pass &= c.pass;
        self.checks.push(c);
    }

    pub fn extend(&mut self, cs: impl IntoIterator<Item = CheckRecord>) {
        for c in cs {
            self.check(c);
        }
    }

    pub fn value(&mut self, key: impl Into<String>, v: Value) {
        self.values.insert(key.into(), v);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// One line per check plus an overall verdict.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "{} {:<48} n={:<5} max={:.3e} tol={:.1e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.samples,
                c.max_residual,
                c.tolerance
            ));
        }
        out.push_str(if self.pass {
            "overall: PASS\n"
        } else {
            "overall: FAIL\n"
        });
        out
    }
}

/// Maps `-0.0` to `0.0`.
fn clean(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        v
    }
}

pub fn vec_json(v: &[f64]) -> Value {
    Value::from(v.iter().map(|x| clean(*x)).collect::<Vec<f64>>())
}

pub fn mat_json(m: &Mat<f64>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| vec_json(&(0..m.cols()).map(|j| m[(i, j)]).collect::<Vec<_>>()))
            .collect(),
    )
}

pub fn tensor3_json(t: &Tensor3<f64>) -> Value {
    let n = t.dim();
    Value::Array(
        (0..n)
            .map(|i| mat_json(&Mat::from_fn(n, n, |j, k| t[(i, j, k)])))
            .collect(),
    )
}

pub fn taylor_vec_json(v: &[Taylor]) -> Value {
    vec_json(&v.iter().map(|t| t.value()).collect::<Vec<_>>())
}

pub fn mats_json(ms: &[Mat<f64>]) -> Value {
    Value::Array(ms.iter().map(mat_json).collect())
}
