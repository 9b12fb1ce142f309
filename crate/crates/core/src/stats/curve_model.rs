//! Bayesian comparison of two learning curves.
//!
//! The reference arm observes a latent mean `mu[t]` that follows a Gaussian
//! random walk; the other arm observes `mu[t] - delta[t]`, where `delta`
//! follows a Cauchy random walk. Both arms share the observation noise
//! `sigma_r`. Every run at a step contributes its own likelihood term.
//! Priors are uniform on a bounded box derived from the data scale, and the
//! posterior is sampled with random-walk Metropolis, mixing single-component
//! updates with moves that shift a whole tail `t0..` of `mu`, `delta` or
//! both, and adapting every step size during burn-in. Smoothing, when
//! requested, is a trailing mean applied to each posterior draw of `delta`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::critical::sorted_quantile;
use crate::error::{Error, Result};
use crate::stats::trailing_mean;

/// Evaluation returns of one method: `returns[t][run]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSet {
    label: String,
    steps: Vec<u64>,
    returns: Vec<Vec<f64>>,
}

impl CurveSet {
    pub fn new(label: impl Into<String>, steps: Vec<u64>, returns: Vec<Vec<f64>>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::contract("curve set has no evaluation steps"));
        }
        if steps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::contract(
                "evaluation steps must be strictly increasing",
            ));
        }
        if returns.len() != steps.len() {
            return Err(Error::contract(
                "one row of returns per evaluation step required",
            ));
        }
        let runs = returns[0].len();
        if runs == 0 || returns.iter().any(|r| r.len() != runs) {
            return Err(Error::contract(
                "every step needs the same non-zero number of runs",
            ));
        }
        if returns.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::contract("returns must be finite"));
        }
        Ok(Self {
            label: label.into(),
            steps,
            returns,
        })
    }

    /// Builds from per-run series, `runs[r][t]`.
    pub fn from_runs(label: impl Into<String>, steps: Vec<u64>, runs: &[Vec<f64>]) -> Result<Self> {
        if runs.is_empty() || runs.iter().any(|r| r.len() != steps.len()) {
            return Err(Error::contract("every run must cover the evaluation grid"));
        }
        let returns = (0..steps.len())
            .map(|t| runs.iter().map(|r| r[t]).collect())
            .collect();
        Self::new(label, steps, returns)
    }

    /// Parses long-format CSV with header `step,run_id,return`.
    pub fn parse_csv(label: impl Into<String>, text: &str) -> Result<Self> {
        let bad = |msg: String| Error::Config(format!("curve CSV: {msg}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty input".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols != ["step", "run_id", "return"] {
            return Err(bad(format!("unexpected header '{header}'")));
        }
        let mut table: BTreeMap<u64, BTreeMap<String, f64>> = BTreeMap::new();
        for (i, line) in lines.enumerate() {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 3 {
                return Err(bad(format!("row {} has {} fields", i + 2, f.len())));
            }
            let step: u64 = f[0]
                .parse()
                .map_err(|e| bad(format!("row {}: {e}", i + 2)))?;
            let ret: f64 = f[2]
                .parse()
                .map_err(|e| bad(format!("row {}: {e}", i + 2)))?;
            if table
                .entry(step)
                .or_default()
                .insert(f[1].to_string(), ret)
                .is_some()
            {
                return Err(bad(format!("duplicate (step {step}, run {})", f[1])));
            }
        }
        let run_ids: Vec<String> = table
            .values()
            .next()
            .map(|m| m.keys().cloned().collect())
            .unwrap_or_default();
        let mut steps = Vec::with_capacity(table.len());
        let mut returns = Vec::with_capacity(table.len());
        for (step, row) in table {
            if row.keys().ne(run_ids.iter()) {
                return Err(bad(format!("step {step} is missing runs")));
            }
            steps.push(step);
            returns.push(row.into_values().collect());
        }
        Self::new(label, steps, returns)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn steps(&self) -> &[u64] {
        &self.steps
    }

    pub fn returns(&self) -> &[Vec<f64>] {
        &self.returns
    }

    pub fn run_count(&self) -> usize {
        self.returns[0].len()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn step_means(&self) -> Vec<f64> {
        self.returns
            .iter()
            .map(|r| r.iter().sum::<f64>() / r.len() as f64)
            .collect()
    }

    /// Per-run trailing mean over the last `window` evaluations.
    pub fn trailing_mean(&self, window: usize) -> CurveSet {
        let runs: Vec<Vec<f64>> = (0..self.run_count())
            .map(|r| {
                let series: Vec<f64> = self.returns.iter().map(|row| row[r]).collect();
                trailing_mean(&series, window)
            })
            .collect();
        let returns = (0..self.len())
            .map(|t| runs.iter().map(|run| run[t]).collect())
            .collect();
        CurveSet {
            label: self.label.clone(),
            steps: self.steps.clone(),
            returns,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McmcConfig {
    pub chains: usize,
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    /// Trailing-mean window applied to each posterior draw of delta; 1 disables it.
    pub smoothing_window: usize,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self {
            chains: 4,
            iterations: 20_000,
            burn_in: 10_000,
            thin: 5,
            seed: 0,
            smoothing_window: 10,
        }
    }
}

impl McmcConfig {
    fn validate(&self) -> Result<()> {
        if self.chains == 0 || self.thin == 0 {
            return Err(Error::contract("chains and thinning must be positive"));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::contract("burn-in must be shorter than the chain"));
        }
        Ok(())
    }
}

/// Support of the uniform priors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PriorBounds {
    pub data_scale: f64,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub latent_min: f64,
    pub latent_max: f64,
}

impl PriorBounds {
    fn from_data(proposed: &CurveSet, baseline: &CurveSet) -> Self {
        let all = || {
            proposed
                .returns
                .iter()
                .chain(&baseline.returns)
                .flatten()
                .copied()
        };
        let lo = all().fold(f64::INFINITY, f64::min);
        let hi = all().fold(f64::NEG_INFINITY, f64::max);
        let range = hi - lo;
        let data_scale = if range > 0.0 {
            range
        } else {
            lo.abs().max(1.0)
        };
        Self {
            data_scale,
            sigma_min: 1e-6 * data_scale,
            sigma_max: 10.0 * data_scale,
            latent_min: lo - 10.0 * data_scale,
            latent_max: hi + 10.0 * data_scale,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Post-burn-in acceptance rate over every component update.
    pub acceptance_rate: f64,
    pub acceptance_latent: f64,
    pub acceptance_scale: f64,
    /// Lag-1 effective sample size of delta, minimum and mean over steps.
    pub ess_min: f64,
    pub ess_mean: f64,
    pub draws: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PosteriorSummary {
    pub proposed: String,
    pub baseline: String,
    pub steps: Vec<u64>,
    pub delta_mean: Vec<f64>,
    pub delta_sd: Vec<f64>,
    pub delta_q025: Vec<f64>,
    pub delta_q975: Vec<f64>,
    pub significant: Vec<(u64, u64)>,
    pub sigma_mu_mean: f64,
    pub sigma_x_mean: f64,
    pub sigma_r_mean: f64,
    pub diagnostics: Diagnostics,
    pub prior: PriorBounds,
    pub config: McmcConfig,
    pub likelihood: &'static str,
}

impl PosteriorSummary {
    /// `step,delta_mean,q2.5,q97.5`
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,delta_mean,q2.5,q97.5\n");
        for t in 0..self.steps.len() {
            let _ = writeln!(
                out,
                "{},{:?},{:?},{:?}",
                self.steps[t], self.delta_mean[t], self.delta_q025[t], self.delta_q975[t]
            );
        }
        out
    }

    /// Monte Carlo standard error of the delta mean at each step.
    pub fn delta_mcse(&self) -> Vec<f64> {
        let ess = self.diagnostics.ess_min.max(1.0);
        self.delta_sd.iter().map(|sd| sd / ess.sqrt()).collect()
    }
}

/// Maximal runs of consecutive steps whose lower 2.5% quantile is above 0.
pub fn significant_intervals(summary: &PosteriorSummary) -> Vec<(u64, u64)> {
    positive_runs(&summary.steps, &summary.delta_q025)
}

fn positive_runs(steps: &[u64], lower: &[f64]) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, &lo) in lower.iter().enumerate() {
        match (lo > 0.0, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push((steps[s], steps[i - 1]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((steps[s], steps[lower.len() - 1]));
    }
    out
}

/// Sufficient statistics per step for both arms.
struct Model {
    len: usize,
    n_p: f64,
    n_b: f64,
    sum_p: Vec<f64>,
    sq_p: Vec<f64>,
    sum_b: Vec<f64>,
    sq_b: Vec<f64>,
    bounds: PriorBounds,
}

impl Model {
    fn new(proposed: &CurveSet, baseline: &CurveSet, bounds: PriorBounds) -> Self {
        let sums = |c: &CurveSet| -> (Vec<f64>, Vec<f64>) {
            c.returns
                .iter()
                .map(|r| (r.iter().sum::<f64>(), r.iter().map(|v| v * v).sum::<f64>()))
                .unzip()
        };
        let (sum_p, sq_p) = sums(proposed);
        let (sum_b, sq_b) = sums(baseline);
        Self {
            len: proposed.len(),
            n_p: proposed.run_count() as f64,
            n_b: baseline.run_count() as f64,
            sum_p,
            sq_p,
            sum_b,
            sq_b,
            bounds,
        }
    }

    fn sse_p(&self, t: usize, m: f64) -> f64 {
        (self.sq_p[t] - 2.0 * m * self.sum_p[t] + self.n_p * m * m).max(0.0)
    }

    fn sse_b(&self, t: usize, m: f64) -> f64 {
        (self.sq_b[t] - 2.0 * m * self.sum_b[t] + self.n_b * m * m).max(0.0)
    }

    fn in_latent_box(&self, v: f64) -> bool {
        v >= self.bounds.latent_min && v <= self.bounds.latent_max
    }

    fn in_sigma_box(&self, s: f64) -> bool {
        s >= self.bounds.sigma_min && s <= self.bounds.sigma_max
    }
}

#[derive(Clone)]
struct State {
    mu: Vec<f64>,
    delta: Vec<f64>,
    sigma_mu: f64,
    sigma_x: f64,
    sigma_r: f64,
}

fn cauchy_kernel(x: f64, scale: f64) -> f64 {
    let z = x / scale;
    -(1.0 + z * z).ln()
}

impl State {
    fn lp_mu(&self, m: &Model, t: usize, v: f64) -> f64 {
        if !m.in_latent_box(v) {
            return f64::NEG_INFINITY;
        }
        let mut lp = 0.0;
        let s2 = 2.0 * self.sigma_mu * self.sigma_mu;
        if t > 0 {
            lp -= (v - self.mu[t - 1]).powi(2) / s2;
        }
        if t + 1 < m.len {
            lp -= (self.mu[t + 1] - v).powi(2) / s2;
        }
        lp - (m.sse_p(t, v) + m.sse_b(t, v - self.delta[t])) / (2.0 * self.sigma_r * self.sigma_r)
    }

    fn lp_delta(&self, m: &Model, t: usize, v: f64) -> f64 {
        if !m.in_latent_box(self.mu[t] - v) || v.abs() > m.bounds.latent_max - m.bounds.latent_min {
            return f64::NEG_INFINITY;
        }
        let mut lp = 0.0;
        if t > 0 {
            lp += cauchy_kernel(v - self.delta[t - 1], self.sigma_x);
        }
        if t + 1 < m.len {
            lp += cauchy_kernel(self.delta[t + 1] - v, self.sigma_x);
        }
        lp - m.sse_b(t, self.mu[t] - v) / (2.0 * self.sigma_r * self.sigma_r)
    }

    /// Log-posterior change from adding `dm` to `mu[t0..]` and `dd` to
    /// `delta[t0..]`. Only the increment into `t0` changes in the priors.
    fn lp_tail_shift(&self, m: &Model, t0: usize, dm: f64, dd: f64) -> f64 {
        let span = m.bounds.latent_max - m.bounds.latent_min;
        let inv = 1.0 / (2.0 * self.sigma_r * self.sigma_r);
        let mut diff = 0.0;
        for t in t0..m.len {
            let (mu, d) = (self.mu[t] + dm, self.delta[t] + dd);
            if !m.in_latent_box(mu) || !m.in_latent_box(mu - d) || d.abs() > span {
                return f64::NEG_INFINITY;
            }
            diff -= (m.sse_p(t, mu) - m.sse_p(t, self.mu[t])) * inv;
            diff -= (m.sse_b(t, mu - d) - m.sse_b(t, self.mu[t] - self.delta[t])) * inv;
        }
        if t0 > 0 {
            let inc_mu = self.mu[t0] - self.mu[t0 - 1];
            let s2 = 2.0 * self.sigma_mu * self.sigma_mu;
            diff -= ((inc_mu + dm).powi(2) - inc_mu.powi(2)) / s2;
            let inc_d = self.delta[t0] - self.delta[t0 - 1];
            diff += cauchy_kernel(inc_d + dd, self.sigma_x) - cauchy_kernel(inc_d, self.sigma_x);
        }
        diff
    }

    // The three scale densities are on log(sigma) and include the Jacobian.
    fn lp_log_sigma_mu(&self, m: &Model, u: f64) -> f64 {
        let s = u.exp();
        if !m.in_sigma_box(s) {
            return f64::NEG_INFINITY;
        }
        let ss: f64 = self.mu.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
        -((m.len - 1) as f64) * u - ss / (2.0 * s * s) + u
    }

    fn lp_log_sigma_x(&self, m: &Model, u: f64) -> f64 {
        let s = u.exp();
        if !m.in_sigma_box(s) {
            return f64::NEG_INFINITY;
        }
        let k: f64 = self
            .delta
            .windows(2)
            .map(|w| cauchy_kernel(w[1] - w[0], s))
            .sum();
        -((m.len - 1) as f64) * u + k + u
    }

    fn lp_log_sigma_r(&self, m: &Model, u: f64) -> f64 {
        let s = u.exp();
        if !m.in_sigma_box(s) {
            return f64::NEG_INFINITY;
        }
        let sse: f64 = (0..m.len)
            .map(|t| m.sse_p(t, self.mu[t]) + m.sse_b(t, self.mu[t] - self.delta[t]))
            .sum();
        -((m.n_p + m.n_b) * m.len as f64) * u - sse / (2.0 * s * s) + u
    }
}

struct ChainOutput {
    delta_draws: Vec<Vec<f64>>,
    sigma_draws: Vec<[f64; 3]>,
    accepted_latent: u64,
    proposed_latent: u64,
    accepted_scale: u64,
    proposed_scale: u64,
}

const ADAPT_BATCH: usize = 50;
const TARGET_ACCEPT: f64 = 0.44;

fn std_dev(v: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = v.clone().count() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let mean = v.clone().sum::<f64>() / n;
    (v.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

fn initial_state(proposed: &CurveSet, baseline: &CurveSet, bounds: &PriorBounds) -> State {
    let mu = proposed.step_means();
    let delta: Vec<f64> = mu
        .iter()
        .zip(baseline.step_means())
        .map(|(p, b)| p - b)
        .collect();
    let clamp = |s: f64| s.clamp(bounds.sigma_min, bounds.sigma_max);
    let diffs = |v: &[f64]| {
        std_dev(
            v.windows(2)
                .map(|w| w[1] - w[0])
                .collect::<Vec<_>>()
                .into_iter(),
        )
    };
    let mut within = 0.0;
    let mut dof = 0.0;
    for c in [proposed, baseline] {
        for row in &c.returns {
            let m = row.iter().sum::<f64>() / row.len() as f64;
            within += row.iter().map(|v| (v - m).powi(2)).sum::<f64>();
            dof += (row.len() - 1) as f64;
        }
    }
    let sigma_r = clamp(if dof > 0.0 {
        (within / dof).sqrt()
    } else {
        0.0
    });
    State {
        sigma_mu: clamp(diffs(&mu)),
        sigma_x: clamp(diffs(&delta)),
        sigma_r,
        mu,
        delta,
    }
}

fn run_chain(model: &Model, init: &State, cfg: &McmcConfig, chain: usize) -> ChainOutput {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(chain as u64 + 1);
    let len = model.len;
    let mut st = init.clone();

    let n_min = model.n_p.min(model.n_b);
    let latent_step = (st.sigma_r / n_min.sqrt()).max(model.bounds.sigma_min);
    // component order: mu[0..len], delta[0..len], log sigma_mu, log sigma_x, log sigma_r,
    // then tail shifts of mu, delta, and both, one per cut point
    let n_single = 2 * len + 3;
    let n_comp = n_single + 3 * len;
    let mut log_step: Vec<f64> = (0..n_comp)
        .map(|i| {
            if i < 2 * len || i >= n_single {
                latent_step.ln()
            } else {
                0.1f64.ln()
            }
        })
        .collect();
    let mut batch_acc = vec![0u32; n_comp];
    let mut batch_idx = 0usize;

    let mut out = ChainOutput {
        delta_draws: Vec::with_capacity((cfg.iterations - cfg.burn_in) / cfg.thin + 1),
        sigma_draws: Vec::new(),
        accepted_latent: 0,
        proposed_latent: 0,
        accepted_scale: 0,
        proposed_scale: 0,
    };

    for iter in 0..cfg.iterations {
        let sampling = iter >= cfg.burn_in;
        for c in 0..n_comp {
            let z: f64 = StandardNormal.sample(&mut rng);
            let step = log_step[c].exp() * z;
            let u: f64 = rng.random();
            let accepted = if c < len {
                let t = c;
                let (cur, prop) = (st.mu[t], st.mu[t] + step);
                let accept = u.ln() < st.lp_mu(model, t, prop) - st.lp_mu(model, t, cur);
                if accept {
                    st.mu[t] = prop;
                }
                accept
            } else if c < 2 * len {
                let t = c - len;
                let (cur, prop) = (st.delta[t], st.delta[t] + step);
                let accept = u.ln() < st.lp_delta(model, t, prop) - st.lp_delta(model, t, cur);
                if accept {
                    st.delta[t] = prop;
                }
                accept
            } else if c >= n_single {
                let k = c - n_single;
                let (kind, t0) = (k / len, k % len);
                let (dm, dd) = match kind {
                    0 => (step, 0.0),
                    1 => (0.0, step),
                    _ => (step, step),
                };
                let accept = u.ln() < st.lp_tail_shift(model, t0, dm, dd);
                if accept {
                    for t in t0..len {
                        st.mu[t] += dm;
                        st.delta[t] += dd;
                    }
                }
                accept
            } else {
                let which = c - 2 * len;
                let cur = match which {
                    0 => st.sigma_mu,
                    1 => st.sigma_x,
                    _ => st.sigma_r,
                }
                .ln();
                let prop = cur + step;
                let lp = |s: &State, u: f64| match which {
                    0 => s.lp_log_sigma_mu(model, u),
                    1 => s.lp_log_sigma_x(model, u),
                    _ => s.lp_log_sigma_r(model, u),
                };
                let accept = u.ln() < lp(&st, prop) - lp(&st, cur);
                if accept {
                    match which {
                        0 => st.sigma_mu = prop.exp(),
                        1 => st.sigma_x = prop.exp(),
                        _ => st.sigma_r = prop.exp(),
                    }
                }
                accept
            };
            if sampling {
                if c < 2 * len || c >= n_single {
                    out.proposed_latent += 1;
                    out.accepted_latent += u64::from(accepted);
                } else {
                    out.proposed_scale += 1;
                    out.accepted_scale += u64::from(accepted);
                }
            } else {
                batch_acc[c] += u32::from(accepted);
            }
        }

        if !sampling && (iter + 1) % ADAPT_BATCH == 0 {
            batch_idx += 1;
            let amount = (1.0 / (batch_idx as f64).sqrt()).min(0.5);
            for c in 0..n_comp {
                let rate = f64::from(batch_acc[c]) / ADAPT_BATCH as f64;
                log_step[c] += if rate > TARGET_ACCEPT {
                    amount
                } else {
                    -amount
                };
                batch_acc[c] = 0;
            }
        }

        if sampling && (iter - cfg.burn_in).is_multiple_of(cfg.thin) {
            out.delta_draws.push(st.delta.clone());
            out.sigma_draws.push([st.sigma_mu, st.sigma_x, st.sigma_r]);
        }
    }
    out
}

fn lag1_ess(series: &[f64]) -> f64 {
    let n = series.len() as f64;
    if series.len() < 3 {
        return n;
    }
    let mean = series.iter().sum::<f64>() / n;
    let var: f64 = series.iter().map(|x| (x - mean).powi(2)).sum();
    if var <= 0.0 {
        return n;
    }
    let cov: f64 = series
        .windows(2)
        .map(|w| (w[0] - mean) * (w[1] - mean))
        .sum();
    let rho = (cov / var).clamp(-0.99, 0.99);
    (n * (1.0 - rho) / (1.0 + rho)).clamp(1.0, n)
}

/// Fits the random-walk comparison model; `delta` is the amount by which
/// `proposed` exceeds `baseline`.
pub fn fit_curve_model(
    proposed: &CurveSet,
    baseline: &CurveSet,
    cfg: &McmcConfig,
) -> Result<PosteriorSummary> {
    cfg.validate()?;
    if proposed.steps != baseline.steps {
        return Err(Error::GridMismatch(format!(
            "'{}' has {} steps, '{}' has {}",
            proposed.label,
            proposed.len(),
            baseline.label,
            baseline.len()
        )));
    }
    if proposed.run_count() < 2 || baseline.run_count() < 2 {
        return Err(Error::contract("each arm needs at least 2 runs"));
    }
    if proposed.len() < 2 {
        return Err(Error::contract("need at least 2 evaluation steps"));
    }
    let bounds = PriorBounds::from_data(proposed, baseline);
    let model = Model::new(proposed, baseline, bounds);
    let init = initial_state(proposed, baseline, &bounds);

    let mut chains: Vec<ChainOutput> = (0..cfg.chains)
        .into_par_iter()
        .map(|c| run_chain(&model, &init, cfg, c))
        .collect();
    if cfg.smoothing_window > 1 {
        for c in &mut chains {
            for d in &mut c.delta_draws {
                *d = trailing_mean(d, cfg.smoothing_window);
            }
        }
    }

    let len = model.len;
    let mut delta_mean = Vec::with_capacity(len);
    let mut delta_sd = Vec::with_capacity(len);
    let mut delta_q025 = Vec::with_capacity(len);
    let mut delta_q975 = Vec::with_capacity(len);
    let mut ess = Vec::with_capacity(len);
    for t in 0..len {
        let mut draws: Vec<f64> = chains
            .iter()
            .flat_map(|c| c.delta_draws.iter().map(move |d| d[t]))
            .collect();
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        draws.sort_by(f64::total_cmp);
        delta_mean.push(mean);
        delta_sd.push(var.sqrt());
        delta_q025.push(sorted_quantile(&draws, 0.025));
        delta_q975.push(sorted_quantile(&draws, 0.975));
        ess.push(
            chains
                .iter()
                .map(|c| lag1_ess(&c.delta_draws.iter().map(|d| d[t]).collect::<Vec<_>>()))
                .sum::<f64>(),
        );
    }

    let sigma_mean = |i: usize| {
        let all: Vec<f64> = chains
            .iter()
            .flat_map(|c| c.sigma_draws.iter().map(move |s| s[i]))
            .collect();
        all.iter().sum::<f64>() / all.len() as f64
    };
    let ratio = |a: u64, n: u64| if n == 0 { 0.0 } else { a as f64 / n as f64 };
    let acc_l: u64 = chains.iter().map(|c| c.accepted_latent).sum();
    let n_l: u64 = chains.iter().map(|c| c.proposed_latent).sum();
    let acc_s: u64 = chains.iter().map(|c| c.accepted_scale).sum();
    let n_s: u64 = chains.iter().map(|c| c.proposed_scale).sum();
    let acceptance_rate = ratio(acc_l + acc_s, n_l + n_s);
    let mut warnings = Vec::new();
    if !(0.1..=0.6).contains(&acceptance_rate) {
        warnings.push(format!(
            "acceptance rate {acceptance_rate:.3} outside [0.1, 0.6] after adaptation"
        ));
    }
    let diagnostics = Diagnostics {
        acceptance_rate,
        acceptance_latent: ratio(acc_l, n_l),
        acceptance_scale: ratio(acc_s, n_s),
        ess_min: ess.iter().copied().fold(f64::INFINITY, f64::min),
        ess_mean: ess.iter().sum::<f64>() / len as f64,
        draws: chains.iter().map(|c| c.delta_draws.len()).sum(),
        warnings,
    };

    let mut summary = PosteriorSummary {
        proposed: proposed.label.clone(),
        baseline: baseline.label.clone(),
        steps: proposed.steps.clone(),
        delta_mean,
        delta_sd,
        delta_q025,
        delta_q975,
        significant: Vec::new(),
        sigma_mu_mean: sigma_mean(0),
        sigma_x_mean: sigma_mean(1),
        sigma_r_mean: sigma_mean(2),
        diagnostics,
        prior: bounds,
        config: *cfg,
        likelihood: "independent normal term per run and step",
    };
    summary.significant = significant_intervals(&summary);
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary_with_lower(steps: Vec<u64>, lower: Vec<f64>) -> PosteriorSummary {
        let n = steps.len();
        PosteriorSummary {
            proposed: "a".into(),
            baseline: "b".into(),
            steps,
            delta_mean: vec![0.0; n],
            delta_sd: vec![0.0; n],
            delta_q025: lower,
            delta_q975: vec![1.0; n],
            significant: vec![],
            sigma_mu_mean: 0.0,
            sigma_x_mean: 0.0,
            sigma_r_mean: 0.0,
            diagnostics: Diagnostics {
                acceptance_rate: 0.4,
                acceptance_latent: 0.4,
                acceptance_scale: 0.4,
                ess_min: 1.0,
                ess_mean: 1.0,
                draws: 0,
                warnings: vec![],
            },
            prior: PriorBounds {
                data_scale: 1.0,
                sigma_min: 0.0,
                sigma_max: 1.0,
                latent_min: 0.0,
                latent_max: 1.0,
            },
            config: McmcConfig::default(),
            likelihood: "",
        }
    }

    #[test]
    fn significant_interval_examples() {
        let steps = vec![1000, 2000, 3000, 4000];
        let s = summary_with_lower(steps.clone(), vec![-1.0, 0.1, 0.2, -0.3]);
        assert_eq!(significant_intervals(&s), vec![(2000, 3000)]);
        let s = summary_with_lower(steps.clone(), vec![0.5; 4]);
        assert_eq!(significant_intervals(&s), vec![(1000, 4000)]);
        let s = summary_with_lower(steps.clone(), vec![-0.5; 4]);
        assert!(significant_intervals(&s).is_empty());
        let s = summary_with_lower(steps, vec![0.5, -1.0, 0.0, 2.0]);
        assert_eq!(significant_intervals(&s), vec![(1000, 1000), (4000, 4000)]);
    }

    #[test]
    fn trailing_mean_window() {
        let c = CurveSet::from_runs(
            "a",
            vec![1, 2, 3, 4],
            &[vec![1.0, 2.0, 3.0, 4.0], vec![0.0; 4]],
        )
        .unwrap();
        let s = c.trailing_mean(2);
        let run0: Vec<f64> = s.returns().iter().map(|r| r[0]).collect();
        assert_eq!(run0, vec![1.0, 1.5, 2.5, 3.5]);
        assert_eq!(c.trailing_mean(1), c);
    }

    #[test]
    fn curve_set_validation() {
        assert!(CurveSet::new("a", vec![2, 1], vec![vec![0.0], vec![0.0]]).is_err());
        assert!(CurveSet::new("a", vec![1, 2], vec![vec![0.0], vec![0.0, 1.0]]).is_err());
        assert!(CurveSet::new("a", vec![1], vec![vec![f64::NAN]]).is_err());
        assert!(CurveSet::new("a", vec![], vec![]).is_err());
    }

    #[test]
    fn parse_long_csv() {
        let text = "step,run_id,return\n1000,0,1.5\n1000,1,2.5\n2000,1,3\n2000,0,4\n";
        let c = CurveSet::parse_csv("x", text).unwrap();
        assert_eq!(c.steps(), &[1000, 2000]);
        assert_eq!(c.returns(), &[vec![1.5, 2.5], vec![4.0, 3.0]]);
        assert!(CurveSet::parse_csv("x", "step,run,return\n").is_err());
        assert!(CurveSet::parse_csv("x", "step,run_id,return\n1,0,1\n1,1,1\n2,0,1\n").is_err());
        assert!(CurveSet::parse_csv("x", "step,run_id,return\n1,0,1\n1,0,2\n").is_err());
    }

    #[test]
    fn grid_mismatch_and_run_count_errors() {
        let a = CurveSet::from_runs("a", vec![1, 2], &[vec![0.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let b = CurveSet::from_runs("b", vec![1, 3], &[vec![0.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let cfg = McmcConfig {
            iterations: 100,
            burn_in: 50,
            ..McmcConfig::default()
        };
        assert!(matches!(
            fit_curve_model(&a, &b, &cfg),
            Err(Error::GridMismatch(_))
        ));
        let single = CurveSet::from_runs("c", vec![1, 2], &[vec![0.0, 1.0]]).unwrap();
        assert!(fit_curve_model(&a, &single, &cfg).is_err());
    }

    #[test]
    fn lag1_ess_bounds() {
        let iid: Vec<f64> = (0..100).map(|i| ((i * 7919) % 101) as f64).collect();
        assert!(lag1_ess(&iid) > 30.0);
        let trend: Vec<f64> = (0..100).map(f64::from).collect();
        assert!(lag1_ess(&trend) < 5.0);
        assert_eq!(lag1_ess(&[1.0; 50]), 50.0);
    }
}
