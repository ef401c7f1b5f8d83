//! Machine-readable reports: verification suites, spectrum harnesses, and
//! pipeline diagnostics. Field order is fixed by the struct definitions,
//! so identical configurations produce byte-identical JSON.

use crate::error::{Error, Result};
use crate::pipeline::PipelineDiagnostics;
use crate::spectral::InvarianceReport;
use serde::Serialize;
use std::path::Path;

/// One verification check with its measured value and threshold.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckResult {
    /// `measured <= threshold` style check.
    pub fn le(name: &str, measured: f64, threshold: f64, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            pass: measured.is_finite() && measured <= threshold,
            measured,
            threshold,
            detail: detail.into(),
        }
    }

    /// `measured >= threshold` style check (e.g. convergence orders).
    pub fn ge(name: &str, measured: f64, threshold: f64, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            pass: measured.is_finite() && measured >= threshold,
            measured,
            threshold,
            detail: detail.into(),
        }
    }

    pub fn flag(name: &str, pass: bool, detail: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            pass,
            measured: if pass { 1.0 } else { 0.0 },
            threshold: 1.0,
            detail: detail.into(),
        }
    }
}

/// Result of one verification suite run.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    pub fn new(suite: &str, seed: u64, checks: Vec<CheckResult>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        SuiteReport { suite: suite.into(), seed, pass, checks }
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.pass)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("report serialization");
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// Spectrum report in the wire format
/// `{"times":[...],"eigenvalues":[[...]],"max_pair_dev":x,"multiplicities":[[...]]}`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub times: Vec<f64>,
    pub eigenvalues: Vec<Vec<f64>>,
    pub max_pair_dev: f64,
    pub multiplicities: Vec<Vec<usize>>,
}

impl SpectrumReport {
    pub fn from_invariance(rep: &InvarianceReport) -> Self {
        SpectrumReport {
            times: rep.times.clone(),
            eigenvalues: rep.spectra.iter().map(|s| s.eigenvalues.clone()).collect(),
            max_pair_dev: rep.max_pair_dev,
            multiplicities: rep.spectra.iter().map(|s| s.multiplicities.clone()).collect(),
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("report serialization");
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// Pipeline diagnostics export with the documented keys plus extras.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineReport {
    pub min_psi: f64,
    pub kernel_residual: f64,
    pub mkdv_residual: f64,
    pub wronskian_drift: f64,
    pub kernel_residual_rel: f64,
    pub r0_fidelity: f64,
    pub gate_deviation: f64,
}

impl PipelineReport {
    pub fn from_diagnostics(d: &PipelineDiagnostics) -> Self {
        PipelineReport {
            min_psi: d.min_psi,
            kernel_residual: d.kernel_residual,
            mkdv_residual: d.mkdv_residual,
            wronskian_drift: d.wronskian_drift,
            kernel_residual_rel: d.kernel_residual_rel,
            r0_fidelity: d.r0_fidelity,
            gate_deviation: d.gate_deviation,
        }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("report serialization");
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}
