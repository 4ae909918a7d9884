use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use syzq_core::numerics::NumericsConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    pub config_sha256: String,
    pub truncation: i64,
    pub grid: usize,
    pub fd_step: f64,
    pub fd_order: u32,
    pub hbar: f64,
    pub seed: u64,
    /// Largest certified bound on discarded Fourier modes among the
    /// transforms computed in the run.
    pub truncation_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportedError {
    pub kind: String,
    pub message: String,
    /// Stage of the pipeline that raised it.
    pub check: String,
}

/// Everything written to `report.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub mode: String,
    pub checks: Vec<Check>,
    pub summary: Summary,
    pub provenance: Provenance,
    pub results: Map<String, Value>,
    pub error: Option<ReportedError>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl VerificationReport {
    pub fn new(mode: &str, config_hash: String, cfg: &NumericsConfig) -> Self {
        Self {
            mode: mode.to_string(),
            checks: Vec::new(),
            summary: Summary {
                total: 0,
                passed: 0,
                failed: 0,
                pass: true,
            },
            provenance: Provenance {
                config_sha256: config_hash,
                truncation: cfg.truncation,
                grid: cfg.grid,
                fd_step: cfg.fd_step,
                fd_order: cfg.fd_order.order(),
                hbar: cfg.hbar,
                seed: cfg.seed,
                truncation_bound: 0.0,
            },
            results: Map::new(),
            error: None,
        }
    }

    /// Records a check that passes when `value ≤ tolerance`.
    pub fn at_most(&mut self, name: &str, value: f64, tolerance: f64) {
        self.push_check(name, value, tolerance, value <= tolerance);
    }

    /// Records an exact equality as a 0/1 check.
    pub fn holds(&mut self, name: &str, ok: bool) {
        self.push_check(name, if ok { 1.0 } else { 0.0 }, 1.0, ok);
    }

    pub fn push_check(&mut self, name: &str, value: f64, tolerance: f64, pass: bool) {
        self.checks.push(Check {
            name: name.to_string(),
            value,
            tolerance,
            pass,
        });
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.results
            .insert(key.to_string(), serde_json::to_value(value).expect("result serializes"));
    }

    pub fn note_truncation_bound(&mut self, bound: f64) {
        self.provenance.truncation_bound = self.provenance.truncation_bound.max(bound);
    }

    pub fn fail_with(&mut self, check: &str, kind: &str, message: String) {
        self.error = Some(ReportedError {
            kind: kind.to_string(),
            message,
            check: check.to_string(),
        });
    }

    /// Recomputes the summary; an error always fails the run.
    pub fn finish(&mut self) {
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let total = self.checks.len();
        self.summary = Summary {
            total,
            passed,
            failed: total - passed,
            pass: passed == total && self.error.is_none(),
        };
        self.results.insert("pass".into(), Value::Bool(self.summary.pass));
    }
}
