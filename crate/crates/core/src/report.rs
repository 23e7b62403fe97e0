//! Machine-readable check reports. The JSON layout is the stable
//! `report_v1` schema; with timing suppressed the serialization is
//! byte-identical across runs with the same seed.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Symbolic,
    Instance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub backend: Backend,
    pub verdict: Verdict,
    /// Jet order at which equality was asserted (instance backend only).
    pub valid_order: Option<u32>,
    /// Nonzero normal form or highest-degree offending term on failure.
    pub certificate: Option<String>,
    /// Evaluated value, for scenario `eval` statements.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    /// Wall time; omitted entirely under `--no-timing`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub suite: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cap: Option<u32>,
    pub verdict: Verdict,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn new(suite: impl Into<String>, mut checks: Vec<CheckRecord>) -> Report {
        // Deterministic output order: by id, then backend.
        checks.sort_by(|a, b| a.id.cmp(&b.id).then_with(|| {
            fn rank(b: Backend) -> u8 {
                match b {
                    Backend::Symbolic => 0,
                    Backend::Instance => 1,
                }
            }
            rank(a.backend).cmp(&rank(b.backend))
        }));
        let verdict = if checks.iter().all(CheckRecord::passed) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        Report {
            schema: "report_v1",
            suite: suite.into(),
            algebra: None,
            seed: None,
            trials: None,
            cap: None,
            verdict,
            checks,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let width = self
            .checks
            .iter()
            .map(|c| c.id.len())
            .max()
            .unwrap_or(0)
            .max(8);
        for check in &self.checks {
            let verdict = match check.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
            };
            let backend = match check.backend {
                Backend::Symbolic => "symbolic",
                Backend::Instance => "instance",
            };
            out.push_str(&format!("{verdict}  {:<width$}  {backend:<8}", check.id));
            if let Some(order) = check.valid_order {
                out.push_str(&format!("  order {order}"));
            }
            if let Some(ms) = check.wall_ms {
                out.push_str(&format!("  {ms:.1} ms"));
            }
            out.push('\n');
            if let Some(value) = &check.value {
                out.push_str(&format!("      value: {value}\n"));
            }
            if let Some(cert) = &check.certificate {
                out.push_str(&format!("      certificate: {cert}\n"));
            }
        }
        let summary = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        };
        let n_pass = self.checks.iter().filter(|c| c.passed()).count();
        out.push_str(&format!(
            "suite {}: {summary} ({n_pass}/{} checks)\n",
            self.suite,
            self.checks.len()
        ));
        out
    }
}
