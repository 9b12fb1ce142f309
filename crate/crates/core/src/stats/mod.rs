//! Statistical comparison of experiment arms.

pub mod curve_model;
pub mod synthetic;
pub mod wilcoxon;

pub use curve_model::{
    fit_curve_model, significant_intervals, CurveSet, Diagnostics, McmcConfig, PosteriorSummary,
    PriorBounds,
};
pub use synthetic::synthetic_curves;
pub use wilcoxon::{
    wilcoxon_rank_sum, wilcoxon_rank_sum_with, Method as RankSumMethod, RankSumTest,
};

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Trailing mean over the last `window` values; shorter prefixes use what
/// is available.
pub fn trailing_mean(values: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1);
    let mut acc = 0.0;
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            acc += v;
            if i >= window {
                acc -= values[i - window];
            }
            acc / (i + 1).min(window) as f64
        })
        .collect()
}
