//! Runs the registered checks and collects a deterministic report.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{rng, ProblemSpec, SCHEMA};
use super::trials::{find, Check, Outcome, TrialContext, CHECKS};
use crate::error::{Error, Result};
use crate::quadrature::{take_stats, Quadrature, QuadratureStats};

/// Counterexamples kept per check.
pub const MAX_COUNTEREXAMPLES: usize = 5;

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub tol: f64,
    pub quadrature: Quadrature,
    /// Overrides every check's default trial count.
    pub trials: Option<usize>,
    /// Check ids or group prefixes (`products`, `products.mixed`).
    pub filter: Vec<String>,
    /// Keep one record per trial in the report.
    pub records: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { seed: 0, tol: 1e-9, quadrature: Quadrature::default(), trials: None, filter: Vec::new(), records: false }
    }
}

impl SuiteConfig {
    fn selects(&self, id: &str) -> bool {
        self.filter.is_empty()
            || self.filter.iter().any(|f| id == f || id.strip_prefix(f.as_str()).is_some_and(|rest| rest.starts_with('.')))
    }

    pub fn selected(&self) -> Result<Vec<&'static Check>> {
        let checks: Vec<_> = CHECKS.iter().filter(|c| self.selects(c.id)).collect();
        if checks.is_empty() {
            return Err(Error::Input(format!("no check matches {:?}", self.filter)));
        }
        Ok(checks)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Counterexample {
    pub trial: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub spec: Option<ProblemSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub check: String,
    pub trial: usize,
    pub seed: u64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub summary: String,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    pub max_residual: f64,
    pub counterexamples: Vec<Counterexample>,
    pub quadrature: QuadratureStats,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<TrialRecord>,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.trials > 0 && self.passed == self.trials
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: String,
    pub seed: u64,
    pub tol: f64,
    pub quadrature: Quadrature,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

/// Seed of trial `index` of check `id`: independent of thread scheduling and
/// of which other checks run.
pub fn trial_seed(suite_seed: u64, id: &str, index: usize) -> u64 {
    // FNV-1a over the id, then a splitmix64 finalizer
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in id.bytes() {
        h = (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3);
    }
    let mut x = suite_seed ^ h ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

struct TrialResult {
    spec: Option<ProblemSpec>,
    outcome: std::result::Result<Outcome, String>,
    stats: QuadratureStats,
}

fn run_trial(check: &Check, ctx: &TrialContext, seed: u64) -> TrialResult {
    take_stats();
    let spec = (check.generate)(&mut rng(seed), seed, ctx);
    let (spec, outcome) = match spec {
        Ok(mut spec) => {
            spec.operation = check.id.into();
            let out = (check.evaluate)(&spec).map_err(|e| e.to_string());
            (Some(spec), out)
        }
        Err(e) => (None, Err(format!("generation failed: {e}"))),
    };
    TrialResult { spec, outcome, stats: take_stats() }
}

fn merge(a: QuadratureStats, b: QuadratureStats) -> QuadratureStats {
    QuadratureStats { calls: a.calls + b.calls, max_nodes: a.max_nodes.max(b.max_nodes), failures: a.failures + b.failures }
}

pub fn run_check(check: &Check, config: &SuiteConfig) -> CheckReport {
    let ctx = TrialContext { tol: config.tol, quadrature: config.quadrature };
    let trials = config.trials.unwrap_or(check.trials);
    let seeds: Vec<u64> = (0..trials).map(|i| trial_seed(config.seed, check.id, i)).collect();
    let results: Vec<TrialResult> = seeds.par_iter().map(|&seed| run_trial(check, &ctx, seed)).collect();
    let mut report = CheckReport {
        id: check.id.into(),
        summary: check.summary.into(),
        trials,
        passed: 0,
        failed: 0,
        errors: 0,
        max_residual: 0.0,
        counterexamples: Vec::new(),
        quadrature: QuadratureStats::default(),
        records: Vec::new(),
    };
    for (trial, r) in results.into_iter().enumerate() {
        report.quadrature = merge(report.quadrature, r.stats);
        if config.records {
            let (pass, residual, note, error) = match &r.outcome {
                Ok(out) => (out.pass, Some(out.residual), out.note.clone(), None),
                Err(e) => (false, None, None, Some(e.clone())),
            };
            report.records.push(TrialRecord { check: check.id.into(), trial, seed: seeds[trial], pass, residual, note, error });
        }
        let example = match r.outcome {
            Ok(out) => {
                if out.residual.is_finite() {
                    report.max_residual = report.max_residual.max(out.residual);
                }
                if out.pass {
                    report.passed += 1;
                    continue;
                }
                report.failed += 1;
                Counterexample { trial, residual: Some(out.residual), note: out.note, error: None, spec: r.spec }
            }
            Err(e) => {
                report.errors += 1;
                Counterexample { trial, residual: None, note: None, error: Some(e), spec: r.spec }
            }
        };
        if report.counterexamples.len() < MAX_COUNTEREXAMPLES {
            report.counterexamples.push(example);
        }
    }
    report
}

pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    if !(config.tol > 0.0) {
        return Err(Error::Input("tolerance must be positive".into()));
    }
    let checks: Vec<CheckReport> = config.selected()?.into_iter().map(|c| run_check(c, config)).collect();
    let passed = checks.iter().all(CheckReport::ok);
    Ok(SuiteReport { schema: SCHEMA.into(), seed: config.seed, tol: config.tol, quadrature: config.quadrature, checks, passed })
}

/// Re-evaluates a recorded problem with the check named by its operation or
/// by `id`.
pub fn replay(spec: &ProblemSpec, id: Option<&str>) -> Result<Outcome> {
    spec.validate()?;
    let id = id.unwrap_or(&spec.operation);
    let check = find(id).ok_or_else(|| Error::Input(format!("unknown check {id:?}")))?;
    (check.evaluate)(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(filter: &str) -> SuiteConfig {
        SuiteConfig { seed: 3, trials: Some(4), filter: vec![filter.into()], ..SuiteConfig::default() }
    }

    #[test]
    fn filter_matches_ids_and_groups() {
        let c = small("products");
        assert!(c.selects("products.mixed"));
        assert!(!c.selects("productsx.mixed"));
        assert!(small("sedlock.adjoint").selects("sedlock.adjoint"));
        assert!(small("nothing").selected().is_err());
    }

    #[test]
    fn report_bytes_are_deterministic() {
        let a = serde_json::to_string(&run_suite(&small("sedlock")).unwrap()).unwrap();
        let b = serde_json::to_string(&run_suite(&small("sedlock")).unwrap()).unwrap();
        assert_eq!(a, b);
        let report: SuiteReport = serde_json::from_str(&a).unwrap();
        assert!(report.passed);
        assert_eq!(report.checks.len(), 3);
    }

    #[test]
    fn zero_trials_fail() {
        let config = SuiteConfig { trials: Some(0), ..small("clark") };
        let report = run_suite(&config).unwrap();
        assert!(!report.passed);
    }

    #[test]
    fn seeds_depend_on_check_and_index() {
        assert_ne!(trial_seed(1, "a", 0), trial_seed(1, "b", 0));
        assert_ne!(trial_seed(1, "a", 0), trial_seed(1, "a", 1));
        assert_eq!(trial_seed(7, "a", 3), trial_seed(7, "a", 3));
    }

    #[test]
    fn errors_are_recorded_with_the_spec() {
        let check = find("reports.unitary").unwrap();
        let mut spec = (check.generate)(&mut rng(1), 1, &TrialContext { tol: 1e-9, quadrature: Quadrature::default() }).unwrap();
        spec.vectors.clear();
        spec.variant = Some("unitary".into());
        assert!(replay(&spec, None).is_err());
    }
}
