//! Action-selection rules compared in the experiments, and the arithmetic
//! that keeps their overall exploitation probabilities matched.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::critical::SIMap;
use crate::error::{Error, Result};
use crate::qlearn::{QTable, TieRule};

const PROB_SLACK: f64 = 1e-12;

/// Linear epsilon annealing plus the critical-state parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleSpec {
    pub eps_start: f64,
    pub eps_end: f64,
    pub anneal_steps: u64,
    /// Exploitation probability on critical states.
    pub k: f64,
    /// Share of states treated as critical.
    pub q: f64,
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        Self {
            eps_start: 0.905,
            eps_end: 0.005,
            anneal_steps: 100_000,
            k: 0.95,
            q: 0.1,
        }
    }
}

impl ScheduleSpec {
    /// Checks ranges and that the derived non-critical rate stays in [0, 1]
    /// over the whole schedule (it is affine in epsilon, so the endpoints
    /// suffice).
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps_start", self.eps_start),
            ("eps_end", self.eps_end),
            ("k", self.k),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Schedule(format!("{name} = {v} outside [0, 1]")));
            }
        }
        if self.eps_end > self.eps_start {
            return Err(Error::Schedule("eps_end must not exceed eps_start".into()));
        }
        if self.anneal_steps == 0 {
            return Err(Error::Schedule("anneal_steps must be positive".into()));
        }
        epsilon_prime(self.eps_start, self.k, self.q)?;
        epsilon_prime(self.eps_end, self.k, self.q)?;
        Ok(())
    }

    /// Exploration rate after `t` environment steps.
    pub fn epsilon(&self, t: u64) -> f64 {
        let frac = (t as f64 / self.anneal_steps as f64).min(1.0);
        self.eps_start * (1.0 - frac) + self.eps_end * frac
    }

    /// Non-critical exploration rate of the proposed rule after `t` steps.
    pub fn epsilon_prime(&self, t: u64) -> f64 {
        epsilon_prime_unchecked(self.epsilon(t), self.k, self.q).clamp(0.0, 1.0)
    }
}

fn epsilon_prime_unchecked(eps: f64, k: f64, q: f64) -> f64 {
    (eps - (1.0 - k) * q) / (1.0 - q)
}

/// Exploration rate on non-critical states that equalises the overall
/// exploitation probability with plain epsilon-greedy at rate `eps`.
pub fn epsilon_prime(eps: f64, k: f64, q: f64) -> Result<f64> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::Schedule(format!(
            "critical ratio q = {q} outside (0, 1)"
        )));
    }
    let v = epsilon_prime_unchecked(eps, k, q);
    if !(-PROB_SLACK..=1.0 + PROB_SLACK).contains(&v) {
        return Err(Error::Schedule(format!(
            "eps' = {v} outside [0, 1] for eps = {eps}, k = {k}, q = {q}"
        )));
    }
    Ok(v.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolicyKind {
    EpsilonGreedy,
    Proposed,
    EExploitation,
    Default,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::EpsilonGreedy,
        PolicyKind::Proposed,
        PolicyKind::EExploitation,
        PolicyKind::Default,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::EpsilonGreedy => "epsilon-greedy",
            PolicyKind::Proposed => "proposed",
            PolicyKind::EExploitation => "e-exploitation",
            PolicyKind::Default => "default",
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "epsilon-greedy" | "eps-greedy" | "egreedy" => Ok(PolicyKind::EpsilonGreedy),
            "proposed" | "critical" => Ok(PolicyKind::Proposed),
            "e-exploitation" | "eexploitation" => Ok(PolicyKind::EExploitation),
            "default" => Ok(PolicyKind::Default),
            other => Err(Error::Config(format!("unknown policy kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicySpec {
    pub kind: PolicyKind,
    pub schedule: ScheduleSpec,
    /// Exploitation ratio for [`PolicyKind::EExploitation`]; `None` means q * k.
    pub exploit_ratio: Option<f64>,
}

impl PolicySpec {
    pub fn new(kind: PolicyKind, schedule: ScheduleSpec) -> Self {
        Self {
            kind,
            schedule,
            exploit_ratio: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        if let Some(e) = self.exploit_ratio {
            if !(0.0..=1.0).contains(&e) {
                return Err(Error::Schedule(format!(
                    "exploitation ratio e = {e} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    pub fn exploit_ratio(&self) -> f64 {
        self.exploit_ratio
            .unwrap_or(self.schedule.q * self.schedule.k)
    }
}

/// How an action was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Deliberate greedy choice.
    Exploit,
    /// Uniform over all actions (may coincide with the greedy one).
    Random,
    /// Softmax over Q with unit temperature.
    Stochastic,
}

/// Picks an action at `state` after `t` exploration steps.
///
/// Without an SI map the proposed rule acts as epsilon-greedy at rate eps'.
pub fn select_action<R: Rng + ?Sized>(
    policy: &PolicySpec,
    state: usize,
    q: &QTable,
    si_map: Option<&SIMap>,
    t: u64,
    rng: &mut R,
) -> (usize, Mode) {
    let mode = choose_mode(policy, state, si_map, t, rng);
    let action = match mode {
        Mode::Exploit => q.greedy_action(state, TieRule::UniformRandom, rng),
        Mode::Random => rng.random_range(0..q.action_count()),
        Mode::Stochastic => sample_softmax(q.row(state), rng),
    };
    (action, mode)
}

fn choose_mode<R: Rng + ?Sized>(
    policy: &PolicySpec,
    state: usize,
    si_map: Option<&SIMap>,
    t: u64,
    rng: &mut R,
) -> Mode {
    let s = &policy.schedule;
    let exploit_with = |p: f64, other: Mode, rng: &mut R| {
        if rng.random::<f64>() < p {
            Mode::Exploit
        } else {
            other
        }
    };
    match policy.kind {
        PolicyKind::EpsilonGreedy => exploit_with(1.0 - s.epsilon(t), Mode::Random, rng),
        PolicyKind::Proposed => {
            if si_map.is_some_and(|m| m.is_critical(state)) {
                exploit_with(s.k, Mode::Random, rng)
            } else {
                exploit_with(1.0 - s.epsilon_prime(t), Mode::Random, rng)
            }
        }
        PolicyKind::EExploitation => exploit_with(policy.exploit_ratio(), Mode::Stochastic, rng),
        PolicyKind::Default => Mode::Stochastic,
    }
}

/// Softmax probabilities of a Q row at unit temperature.
pub fn softmax(row: &[f64]) -> Vec<f64> {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = row.iter().map(|v| (v - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / z).collect()
}

fn sample_softmax<R: Rng + ?Sized>(row: &[f64], rng: &mut R) -> usize {
    let probs = softmax(row);
    let mut u = rng.random::<f64>();
    for (a, p) in probs.iter().enumerate() {
        if u < *p {
            return a;
        }
        u -= p;
    }
    probs.len() - 1
}

/// Exact action distribution of [`select_action`].
pub fn action_probabilities(
    policy: &PolicySpec,
    state: usize,
    q: &QTable,
    si_map: Option<&SIMap>,
    t: u64,
) -> Vec<f64> {
    let row = q.row(state);
    let n = row.len();
    let best = q.max_value(state);
    let ties = row.iter().filter(|&&v| v == best).count() as f64;
    let greedy: Vec<f64> = row
        .iter()
        .map(|&v| if v == best { 1.0 / ties } else { 0.0 })
        .collect();
    let uniform = vec![1.0 / n as f64; n];
    let s = &policy.schedule;
    let mix = |p: f64, other: &[f64]| -> Vec<f64> {
        greedy
            .iter()
            .zip(other)
            .map(|(g, o)| p * g + (1.0 - p) * o)
            .collect()
    };
    match policy.kind {
        PolicyKind::EpsilonGreedy => mix(1.0 - s.epsilon(t), &uniform),
        PolicyKind::Proposed => {
            if si_map.is_some_and(|m| m.is_critical(state)) {
                mix(s.k, &uniform)
            } else {
                mix(1.0 - s.epsilon_prime(t), &uniform)
            }
        }
        PolicyKind::EExploitation => mix(policy.exploit_ratio(), &softmax(row)),
        PolicyKind::Default => softmax(row),
    }
}

/// Overall probability of a deliberate greedy choice when a fraction
/// `critical_fraction` of visited states is critical.
pub fn exploitation_rate(policy: &PolicySpec, critical_fraction: f64, t: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&critical_fraction) {
        return Err(Error::contract(format!(
            "critical fraction {critical_fraction} outside [0, 1]"
        )));
    }
    let s = &policy.schedule;
    Ok(match policy.kind {
        PolicyKind::EpsilonGreedy => 1.0 - s.epsilon(t),
        PolicyKind::Proposed => {
            critical_fraction * s.k + (1.0 - critical_fraction) * (1.0 - s.epsilon_prime(t))
        }
        PolicyKind::EExploitation => policy.exploit_ratio(),
        PolicyKind::Default => 0.0,
    })
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::critical::{SIMap, SIRecord};

    #[test]
    fn epsilon_prime_endpoints() {
        assert!((epsilon_prime(0.905, 0.95, 0.1).unwrap() - 1.0).abs() < 1e-12);
        assert!(epsilon_prime(0.005, 0.95, 0.1).unwrap().abs() < 1e-12);
        assert!((epsilon_prime(0.5, 0.95, 0.1).unwrap() - 0.55).abs() < 1e-12);
    }

    #[test]
    fn epsilon_prime_rejects_inconsistent_schedules() {
        assert!(epsilon_prime(0.95, 0.95, 0.1).is_err());
        assert!(epsilon_prime(0.001, 0.95, 0.1).is_err());
        assert!(epsilon_prime(0.5, 0.95, 0.0).is_err());
        assert!(epsilon_prime(0.5, 0.95, 1.0).is_err());
    }

    #[test]
    fn schedule_anneals_linearly() {
        let s = ScheduleSpec::default();
        s.validate().unwrap();
        assert_eq!(s.epsilon(0), 0.905);
        assert!((s.epsilon(50_000) - 0.455).abs() < 1e-12);
        assert_eq!(s.epsilon(100_000), 0.005);
        assert_eq!(s.epsilon(1_000_000), 0.005);
        assert!((s.epsilon_prime(0) - 1.0).abs() < 1e-12);
        assert_eq!(s.epsilon_prime(100_000), 0.0);
        for t in (0..=120_000).step_by(997) {
            let e = s.epsilon_prime(t);
            assert!((0.0..=1.0).contains(&e));
        }
        let bad = ScheduleSpec {
            eps_start: 0.99,
            ..s
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn exploitation_rates() {
        let s = ScheduleSpec::default();
        let proposed = PolicySpec::new(PolicyKind::Proposed, s);
        assert!((exploitation_rate(&proposed, 0.1, 0).unwrap() - 0.095).abs() < 1e-12);
        let ee = PolicySpec::new(PolicyKind::EExploitation, s);
        assert!((ee.exploit_ratio() - 0.095).abs() < 1e-15);
        assert!((exploitation_rate(&ee, 0.1, 0).unwrap() - 0.095).abs() < 1e-15);
        let d = PolicySpec::new(PolicyKind::Default, s);
        assert_eq!(exploitation_rate(&d, 0.1, 0).unwrap(), 0.0);
        assert!(exploitation_rate(&d, 1.5, 0).is_err());
        for t in [0, 25_000, 70_000, 100_000] {
            let eg = PolicySpec::new(PolicyKind::EpsilonGreedy, s);
            let a = exploitation_rate(&proposed, s.q, t).unwrap();
            let b = exploitation_rate(&eg, s.q, t).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    fn critical_map(state: usize) -> SIMap {
        let mut records = vec![SIRecord { state, si: 1.0 }];
        records.extend((0..20).map(|s| SIRecord {
            state: 100 + s,
            si: 0.0,
        }));
        SIMap::from_records(records, 0.1).unwrap()
    }

    #[test]
    fn proposed_exploits_with_k_on_critical_states() {
        let q = QTable::from_values(vec![0.0, 1.0, 0.0, 0.0], 1, 4, 0.3, 0.99).unwrap();
        let policy = PolicySpec::new(PolicyKind::Proposed, ScheduleSpec::default());
        let map = critical_map(0);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let n = 100_000;
        let exploits = (0..n)
            .filter(|_| select_action(&policy, 0, &q, Some(&map), 0, &mut rng).1 == Mode::Exploit)
            .count();
        let p = exploits as f64 / n as f64;
        let sigma = (0.95 * 0.05 / n as f64).sqrt();
        assert!((p - 0.95).abs() < 3.0 * sigma, "{p}");
    }

    #[test]
    fn proposed_with_zero_eps_prime_is_greedy() {
        let q = QTable::from_values(vec![0.0, 0.0, 2.0, 0.0], 1, 4, 0.3, 0.99).unwrap();
        let policy = PolicySpec::new(PolicyKind::Proposed, ScheduleSpec::default());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let (a, mode) = select_action(&policy, 0, &q, None, 200_000, &mut rng);
            assert_eq!((a, mode), (2, Mode::Exploit));
        }
    }

    #[test]
    fn proposed_without_critical_states_matches_eps_prime_greedy() {
        let q = QTable::from_values(vec![0.5, 0.0, 0.2, 0.1], 1, 4, 0.3, 0.99).unwrap();
        let s = ScheduleSpec::default();
        let proposed = PolicySpec::new(PolicyKind::Proposed, s);
        let empty = SIMap::from_records(vec![SIRecord { state: 3, si: 0.0 }; 5], 0.1).unwrap();
        let t = 40_000;
        let a = action_probabilities(&proposed, 0, &q, Some(&empty), t);
        let eps = s.epsilon_prime(t);
        let expected: Vec<f64> = (0..4)
            .map(|i| eps / 4.0 + if i == 0 { 1.0 - eps } else { 0.0 })
            .collect();
        for (x, y) in a.iter().zip(&expected) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn epsilon_one_is_uniform() {
        let q = QTable::from_values(vec![0.0, 3.0, 1.0, 0.0], 1, 4, 0.3, 0.99).unwrap();
        let s = ScheduleSpec {
            eps_start: 1.0,
            eps_end: 1.0,
            ..ScheduleSpec::default()
        };
        let policy = PolicySpec::new(PolicyKind::EpsilonGreedy, s);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let n = 100_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            counts[select_action(&policy, 0, &q, None, 0, &mut rng).0] += 1;
        }
        let e = n as f64 / 4.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - e).powi(2) / e).sum();
        // 3 dof, 1% level
        assert!(chi2 < 11.345, "{chi2} {counts:?}");
    }

    #[test]
    fn softmax_sums_to_one() {
        let p = softmax(&[1.0, 2.0, 3.0, -500.0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p[2] > p[1] && p[1] > p[0]);
    }

    #[test]
    fn policy_kind_parses() {
        for k in PolicyKind::ALL {
            assert_eq!(k.as_str().parse::<PolicyKind>().unwrap(), k);
        }
        assert!("greedy".parse::<PolicyKind>().is_err());
    }
}
