use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::harness::run::RunRecord;
use crate::stats::{
    fit_curve_model, mean_std, wilcoxon_rank_sum, CurveSet, McmcConfig, PosteriorSummary,
    RankSumTest,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CompareMethod {
    Wilcoxon,
    Bayes,
}

impl FromStr for CompareMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wilcoxon" => Ok(Self::Wilcoxon),
            "bayes" => Ok(Self::Bayes),
            other => Err(Error::Config(format!(
                "unknown comparison method '{other}' (expected wilcoxon or bayes)"
            ))),
        }
    }
}

/// Steps-to-optimal summary of one arm. Means and deviations are over the
/// runs that reached optimality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArmSteps {
    pub label: String,
    pub runs: usize,
    pub reached: usize,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WilcoxonReport {
    pub a: ArmSteps,
    pub b: ArmSteps,
    pub test: RankSumTest,
    /// Runs that never reached optimality enter the test tied above every
    /// finite value.
    pub censoring: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub method: CompareMethod,
    pub label_a: String,
    pub label_b: String,
    pub wilcoxon: Option<WilcoxonReport>,
    pub bayes: Option<PosteriorSummary>,
    pub summary: String,
}

fn arm_label(records: &[RunRecord]) -> String {
    records
        .first()
        .map(|r| r.policy.as_str().to_string())
        .unwrap_or_default()
}

/// Steps-to-optimal as a sample, with "not reached" mapped to +inf.
pub fn steps_sample(records: &[RunRecord]) -> Vec<f64> {
    records
        .iter()
        .map(|r| r.steps_to_optimal.map_or(f64::INFINITY, |s| s as f64))
        .collect()
}

fn arm_steps(label: String, records: &[RunRecord]) -> ArmSteps {
    let reached: Vec<f64> = records
        .iter()
        .filter_map(|r| r.steps_to_optimal.map(|s| s as f64))
        .collect();
    let (mean, std) = mean_std(&reached);
    ArmSteps {
        label,
        runs: records.len(),
        reached: reached.len(),
        mean,
        std,
    }
}

/// Evaluation curves of one arm on a shared step grid.
pub fn curve_set(label: &str, records: &[RunRecord]) -> Result<CurveSet> {
    let first = records
        .first()
        .ok_or_else(|| Error::contract("cannot build curves from zero runs"))?;
    let steps: Vec<u64> = first.eval.iter().map(|e| e.0).collect();
    let mut runs = Vec::with_capacity(records.len());
    for r in records {
        let s: Vec<u64> = r.eval.iter().map(|e| e.0).collect();
        if s != steps {
            return Err(Error::GridMismatch(format!(
                "seed {} of '{label}' has a different evaluation grid",
                r.seed
            )));
        }
        runs.push(r.eval.iter().map(|e| e.1).collect::<Vec<_>>());
    }
    CurveSet::from_runs(label, steps, &runs)
}

/// Compares arm `a` against arm `b`. For the Bayes path, `delta` is the
/// amount by which `a`'s return exceeds `b`'s.
pub fn compare(
    a: &[RunRecord],
    b: &[RunRecord],
    method: CompareMethod,
    mcmc: &McmcConfig,
) -> Result<CompareReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::contract("both arms need at least one run"));
    }
    let (label_a, label_b) = (arm_label(a), arm_label(b));
    let mut summary = String::new();
    let mut report = CompareReport {
        method,
        label_a: label_a.clone(),
        label_b: label_b.clone(),
        wilcoxon: None,
        bayes: None,
        summary: String::new(),
    };
    match method {
        CompareMethod::Wilcoxon => {
            let test = wilcoxon_rank_sum(&steps_sample(a), &steps_sample(b))?;
            let w = WilcoxonReport {
                a: arm_steps(label_a, a),
                b: arm_steps(label_b, b),
                test,
                censoring: "not reached ranked above every reached run",
            };
            for arm in [&w.a, &w.b] {
                let _ = writeln!(
                    summary,
                    "{:<16} steps to optimal: mean {:.1}, std {:.1} ({}/{} reached)",
                    arm.label, arm.mean, arm.std, arm.reached, arm.runs
                );
            }
            let _ = writeln!(
                summary,
                "Wilcoxon rank-sum ({:?}): W = {}, p = {:.3e}",
                w.test.method, w.test.statistic, w.test.p_value
            );
            report.wilcoxon = Some(w);
        }
        CompareMethod::Bayes => {
            let ca = curve_set(&label_a, a)?;
            let cb = curve_set(&label_b, b)?;
            let post = fit_curve_model(&ca, &cb, mcmc)?;
            let _ = writeln!(
                summary,
                "delta = {} - {} over {} evaluation steps",
                label_a,
                label_b,
                post.steps.len()
            );
            if post.significant.is_empty() {
                let _ = writeln!(summary, "no step where the 95% interval excludes 0");
            } else {
                for (s, e) in &post.significant {
                    let _ = writeln!(summary, "{label_a} better on steps {s}..={e}");
                }
            }
            let _ = writeln!(
                summary,
                "acceptance {:.3}, min ESS {:.0}, {} draws",
                post.diagnostics.acceptance_rate, post.diagnostics.ess_min, post.diagnostics.draws
            );
            for w in &post.diagnostics.warnings {
                let _ = writeln!(summary, "warning: {w}");
            }
            report.bayes = Some(post);
        }
    }
    report.summary = summary;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exploration::PolicyKind;

    fn record(seed: u64, steps: Option<u64>, eval: Vec<(u64, f64)>) -> RunRecord {
        RunRecord {
            policy: PolicyKind::Proposed,
            seed,
            config_hash: String::new(),
            steps_to_optimal: steps,
            eval,
            checkpoints: vec![],
            steps: 0,
            episodes: 0,
            exploit_fraction: 0.0,
            wall_clock_ms: 0,
        }
    }

    #[test]
    fn same_records_give_p_one() {
        let a: Vec<RunRecord> = (0..8)
            .map(|i| record(i, Some(100 * i + 5), vec![]))
            .collect();
        let r = compare(&a, &a, CompareMethod::Wilcoxon, &McmcConfig::default()).unwrap();
        assert_eq!(r.wilcoxon.unwrap().test.p_value, 1.0);
    }

    #[test]
    fn not_reached_counts_as_worst() {
        let a: Vec<RunRecord> = (0..5).map(|i| record(i, Some(10 + i), vec![])).collect();
        let b: Vec<RunRecord> = (0..5).map(|i| record(i, None, vec![])).collect();
        let r = compare(&a, &b, CompareMethod::Wilcoxon, &McmcConfig::default()).unwrap();
        let w = r.wilcoxon.unwrap();
        assert_eq!(w.b.reached, 0);
        assert!((w.test.p_value - 2.0 / 252.0).abs() < 1e-12);
    }

    #[test]
    fn empty_arm_is_rejected() {
        let a = vec![record(0, Some(1), vec![])];
        assert!(compare(&a, &[], CompareMethod::Wilcoxon, &McmcConfig::default()).is_err());
    }

    #[test]
    fn bayes_grid_mismatch() {
        let a: Vec<RunRecord> = (0..3)
            .map(|i| record(i, None, vec![(1, 0.0), (2, 0.0)]))
            .collect();
        let b: Vec<RunRecord> = (0..3)
            .map(|i| record(i, None, vec![(1, 0.0), (3, 0.0)]))
            .collect();
        let err = compare(&a, &b, CompareMethod::Bayes, &McmcConfig::default()).unwrap_err();
        assert!(matches!(err, Error::GridMismatch(_)));
        let mut c = a.clone();
        c[1].eval.pop();
        assert!(matches!(curve_set("c", &c), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn method_parsing() {
        assert_eq!(
            "Bayes".parse::<CompareMethod>().unwrap(),
            CompareMethod::Bayes
        );
        assert!("t-test".parse::<CompareMethod>().is_err());
    }
}
