//! Uniform verdict envelope for numerical checks.

use serde::{Deserialize, Serialize};

/// A one-sided claim `measured ≤ bound`, certified up to sampling error.
///
/// The verdict is `measured ≤ bound + 3·std_error` and every sub-check
/// passing; it is always recomputed, never stored.
#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub std_error: f64,
    #[serde(default)]
    pub config: serde_json::Value,
    #[serde(default)]
    pub sub: Vec<CheckReport>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, measured: f64, bound: f64, std_error: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            bound,
            std_error,
            config: serde_json::Value::Null,
            sub: Vec::new(),
        }
    }

    /// `|estimate − target| ≤ 3·std_error`, as a one-sided report.
    pub fn two_sided(name: impl Into<String>, estimate: f64, target: f64, std_error: f64) -> Self {
        Self::new(name, (estimate - target).abs(), 0.0, std_error)
    }

    pub fn with_config(mut self, config: serde_json::Value) -> Self {
        self.config = config;
        self
    }

    pub fn with_sub(mut self, sub: Vec<CheckReport>) -> Self {
        self.sub = sub;
        self
    }

    pub fn push(&mut self, sub: CheckReport) {
        self.sub.push(sub);
    }

    pub fn margin(&self) -> f64 {
        self.measured - self.bound
    }

    pub fn passed(&self) -> bool {
        let own = self.measured <= self.bound + 3.0 * self.std_error;
        own && self.sub.iter().all(CheckReport::passed)
    }

    /// Names of every failing check in the tree, depth first.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_failures("", &mut out);
        out
    }

    fn collect_failures(&self, prefix: &str, out: &mut Vec<String>) {
        let path = if prefix.is_empty() { self.name.clone() } else { format!("{prefix}/{}", self.name) };
        if !(self.measured <= self.bound + 3.0 * self.std_error) {
            out.push(path.clone());
        }
        for s in &self.sub {
            s.collect_failures(&path, out);
        }
    }
}

#[derive(Serialize)]
struct View<'a> {
    name: &'a str,
    measured: f64,
    bound: f64,
    std_error: f64,
    margin: f64,
    passed: bool,
    config: &'a serde_json::Value,
    #[serde(skip_serializing_if = "<[_]>::is_empty")]
    sub: &'a [CheckReport],
}

impl Serialize for CheckReport {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        View {
            name: &self.name,
            measured: self.measured,
            bound: self.bound,
            std_error: self.std_error,
            margin: self.margin(),
            passed: self.passed(),
            config: &self.config,
            sub: &self.sub,
        }
        .serialize(s)
    }
}
