//! State importance (SI): the variance of Q over a uniform action
//! distribution. Critical states are those whose SI exceeds the
//! (1 - q)-quantile of the SIs currently in view.

use std::collections::VecDeque;
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::mdp::CliffMaze;
use crate::qlearn::QTable;

pub const DEFAULT_CRITICAL_RATIO: f64 = 0.1;
pub const DEFAULT_MC_SAMPLES: usize = 1000;
pub const DEFAULT_BUFFER_CAPACITY: usize = 1000;
pub const DEFAULT_REFRESH_PERIOD: usize = 1000;
pub const DEFAULT_TOP_K: usize = 10;

/// Population variance of a row of Q-values (uniform action distribution).
pub fn si_exact(q_row: &[f64]) -> Result<f64> {
    if q_row.len() < 2 {
        return Err(Error::contract(format!(
            "SI needs at least 2 actions, got {}",
            q_row.len()
        )));
    }
    Ok(population_variance(q_row))
}

// Shifted two-pass variance; exact zero for constant input.
fn population_variance(values: &[f64]) -> f64 {
    let pivot = values[0];
    let n = values.len() as f64;
    let mean = values.iter().map(|v| v - pivot).sum::<f64>() / n;
    values
        .iter()
        .map(|v| {
            let d = v - pivot - mean;
            d * d
        })
        .sum::<f64>()
        / n
}

/// Action-value function over continuous states and actions.
pub trait QFunction {
    fn value(&self, state: &[f64], action: &[f64]) -> f64;
}

impl<F> QFunction for F
where
    F: Fn(&[f64], &[f64]) -> f64,
{
    fn value(&self, state: &[f64], action: &[f64]) -> f64 {
        self(state, action)
    }
}

/// Monte Carlo SI: population variance of `qf(state, a)` over `n` actions
/// drawn uniformly from the box `action_bounds`.
pub fn si_monte_carlo<Q, R>(
    qf: &Q,
    state: &[f64],
    n: usize,
    action_bounds: &[(f64, f64)],
    rng: &mut R,
) -> Result<f64>
where
    Q: QFunction + ?Sized,
    R: Rng + ?Sized,
{
    if n < 2 {
        return Err(Error::contract("Monte Carlo SI needs at least 2 samples"));
    }
    if action_bounds.is_empty() {
        return Err(Error::contract("action space has no dimensions"));
    }
    for &(lo, hi) in action_bounds {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::contract(format!(
                "invalid action bound [{lo}, {hi}]"
            )));
        }
    }
    let mut action = vec![0.0; action_bounds.len()];
    // Welford
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..n {
        for (x, &(lo, hi)) in action.iter_mut().zip(action_bounds) {
            *x = if hi > lo {
                rng.random_range(lo..hi)
            } else {
                lo
            };
        }
        let v = qf.value(state, &action);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                action: action.clone(),
                value: v,
            });
        }
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    Ok((m2 / n as f64).max(0.0))
}

/// Linear-interpolation quantile of already sorted data.
pub(crate) fn sorted_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Threshold separating the upper `ratio` share of SIs: the (1 - ratio)
/// quantile with linear interpolation between order statistics. States are
/// critical when their SI is strictly greater than the threshold.
pub fn compute_threshold(si_values: &[f64], ratio: f64) -> Result<f64> {
    if si_values.is_empty() {
        return Err(Error::contract("threshold of an empty SI collection"));
    }
    check_ratio(ratio)?;
    if si_values.iter().any(|v| v.is_nan()) {
        return Err(Error::contract("SI values contain NaN"));
    }
    let mut sorted = si_values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted_quantile(&sorted, 1.0 - ratio))
}

fn check_ratio(ratio: f64) -> Result<()> {
    if ratio > 0.0 && ratio < 1.0 {
        Ok(())
    } else {
        Err(Error::contract(format!(
            "critical ratio {ratio} outside (0, 1)"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SIRecord {
    pub state: usize,
    pub si: f64,
}

/// SI values for a set of discrete states plus the derived critical set.
#[derive(Debug, Clone, PartialEq)]
pub struct SIMap {
    records: Vec<SIRecord>,
    threshold: f64,
    ratio: f64,
    critical: Vec<usize>,
}

impl SIMap {
    /// Thresholds `records` (repeats allowed) at ratio `ratio`.
    pub fn from_records(records: Vec<SIRecord>, ratio: f64) -> Result<Self> {
        let values: Vec<f64> = records.iter().map(|r| r.si).collect();
        let threshold = compute_threshold(&values, ratio)?;
        let mut critical: Vec<usize> = records
            .iter()
            .filter(|r| r.si > threshold)
            .map(|r| r.state)
            .collect();
        critical.sort_unstable();
        critical.dedup();
        Ok(Self {
            records,
            threshold,
            ratio,
            critical,
        })
    }

    /// SI of every listed state under `q`.
    pub fn from_table(
        q: &QTable,
        states: impl IntoIterator<Item = usize>,
        ratio: f64,
    ) -> Result<Self> {
        let records = states
            .into_iter()
            .map(|s| {
                Ok(SIRecord {
                    state: s,
                    si: si_exact(q.row(s))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_records(records, ratio)
    }

    pub fn records(&self) -> &[SIRecord] {
        &self.records
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Sorted, deduplicated critical state ids.
    pub fn critical_set(&self) -> &[usize] {
        &self.critical
    }

    pub fn is_critical(&self, state: usize) -> bool {
        self.critical.binary_search(&state).is_ok()
    }

    /// Criticality test for a state not stored in the map.
    pub fn exceeds_threshold(&self, si: f64) -> bool {
        si > self.threshold
    }

    pub fn si_of(&self, state: usize) -> Option<f64> {
        self.records.iter().find(|r| r.state == state).map(|r| r.si)
    }

    /// `state,row,col,si,is_critical` for every recorded maze state.
    pub fn to_csv(&self, maze: &CliffMaze) -> String {
        let mut out = String::from("state,row,col,si,is_critical\n");
        for r in &self.records {
            let cell = maze.cell_of(r.state);
            let _ = writeln!(
                out,
                "{},{},{},{:?},{}",
                r.state,
                cell.row,
                cell.col,
                r.si,
                u8::from(self.is_critical(r.state))
            );
        }
        out
    }
}

/// SI of every state of `q`, indexed by state id.
pub fn si_per_state(q: &QTable) -> Vec<f64> {
    (0..q.state_count())
        .map(|s| population_variance(q.row(s)))
        .collect()
}

/// Min-max normalises SIs into a `height x width` grid. A flat landscape
/// maps to all zeros.
pub fn normalized_grid(si: &[f64], maze: &CliffMaze) -> Vec<Vec<f64>> {
    let lo = si.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = si.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    (0..maze.height())
        .map(|r| {
            (0..maze.width())
                .map(|c| {
                    let v = si[r * maze.width() + c];
                    if span > 0.0 {
                        ((v - lo) / span).clamp(0.0, 1.0)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// FIFO window over the most recently visited states.
#[derive(Debug, Clone)]
pub struct RecentStateBuffer<S> {
    states: VecDeque<S>,
    capacity: usize,
    refresh_period: usize,
    pushes: usize,
}

impl<S> RecentStateBuffer<S> {
    pub fn new(capacity: usize, refresh_period: usize) -> Result<Self> {
        if capacity == 0 || refresh_period == 0 {
            return Err(Error::contract(
                "buffer capacity and refresh period must be positive",
            ));
        }
        Ok(Self {
            states: VecDeque::with_capacity(capacity),
            capacity,
            refresh_period,
            pushes: 0,
        })
    }

    /// Records a visit and reports whether a threshold refresh is due.
    pub fn push(&mut self, state: S) -> bool {
        if self.states.len() == self.capacity {
            self.states.pop_front();
        }
        self.states.push_back(state);
        self.pushes += 1;
        self.pushes.is_multiple_of(self.refresh_period)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn refresh_period(&self) -> usize {
        self.refresh_period
    }

    pub fn iter(&self) -> impl Iterator<Item = &S> + '_ {
        self.states.iter()
    }
}

/// Recomputes SIs over the buffer contents and thresholds them.
pub fn refresh_critical_set(
    buffer: &RecentStateBuffer<usize>,
    q: &QTable,
    ratio: f64,
) -> Result<SIMap> {
    if buffer.is_empty() {
        return Err(Error::contract("cannot refresh from an empty buffer"));
    }
    SIMap::from_table(q, buffer.iter().copied(), ratio)
}

/// Threshold over a buffer of continuous states, with `si` giving the SI
/// of each state (typically via [`si_monte_carlo`]).
pub fn refresh_threshold<S>(
    buffer: &RecentStateBuffer<S>,
    mut si: impl FnMut(&S) -> Result<f64>,
    ratio: f64,
) -> Result<f64> {
    if buffer.is_empty() {
        return Err(Error::contract("cannot refresh from an empty buffer"));
    }
    let values = buffer.iter().map(&mut si).collect::<Result<Vec<_>>>()?;
    compute_threshold(&values, ratio)
}

/// The K highest-SI states at one checkpoint, as points in a metric space.
#[derive(Debug, Clone, PartialEq)]
pub struct TopKRecord {
    pub step: u64,
    pub states: Vec<usize>,
    pub points: Vec<Vec<f64>>,
}

impl TopKRecord {
    /// Picks the `k` largest SIs, breaking ties by lower state id.
    pub fn from_si(
        step: u64,
        si: &[(usize, f64)],
        k: usize,
        embed: impl Fn(usize) -> Vec<f64>,
    ) -> Self {
        let mut ranked = si.to_vec();
        ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        ranked.truncate(k);
        Self {
            step,
            states: ranked.iter().map(|r| r.0).collect(),
            points: ranked.iter().map(|r| embed(r.0)).collect(),
        }
    }

    /// Top-K of a maze Q-table over its non-terminal cells, embedded as
    /// (row, col).
    pub fn for_maze(step: u64, q: &QTable, maze: &CliffMaze, k: usize) -> Self {
        let si = si_per_state(q);
        let candidates: Vec<(usize, f64)> =
            maze.non_terminal_states().map(|s| (s, si[s])).collect();
        Self::from_si(step, &candidates, k, |s| {
            let c = maze.cell_of(s);
            vec![c.row as f64, c.col as f64]
        })
    }
}

/// Minimum Euclidean distance over all cross pairs of two point sets.
pub fn set_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let mut best = f64::INFINITY;
    for p in a {
        for r in b {
            let d = p
                .iter()
                .zip(r)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            best = best.min(d);
        }
    }
    best
}

/// `m_t = 1 - d_t / max(d)`; all ones when every distance is zero.
pub fn match_ratio_from_distances(distances: &[f64]) -> Vec<f64> {
    let d_max = distances.iter().copied().fold(0.0, f64::max);
    if d_max <= 0.0 {
        return vec![1.0; distances.len()];
    }
    distances.iter().map(|d| 1.0 - d / d_max).collect()
}

/// Match ratio of each checkpoint's top-K set against the final one.
pub fn match_ratio_series(
    checkpoints: &[TopKRecord],
    final_record: &TopKRecord,
) -> Result<Vec<f64>> {
    if checkpoints.len() < 2 {
        return Err(Error::contract("match ratio needs at least 2 checkpoints"));
    }
    if final_record.points.is_empty() || checkpoints.iter().any(|c| c.points.is_empty()) {
        return Err(Error::contract("top-K records must be non-empty"));
    }
    let d: Vec<f64> = checkpoints
        .iter()
        .map(|c| set_distance(&c.points, &final_record.points))
        .collect();
    Ok(match_ratio_from_distances(&d))
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::mdp::Cell;

    #[test]
    fn si_exact_examples() {
        assert_eq!(si_exact(&[1.0, -1.0]).unwrap(), 1.0);
        for c in [0.1, -3.7, 1e9, 0.0] {
            assert_eq!(si_exact(&[c; 4]).unwrap(), 0.0);
        }
        assert!(si_exact(&[1.0]).is_err());
        assert!(si_exact(&[]).is_err());
    }

    #[test]
    fn monte_carlo_constant_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let qf = |_: &[f64], _: &[f64]| 0.7;
        assert_eq!(
            si_monte_carlo(&qf, &[0.0], 1000, &[(-1.0, 1.0)], &mut rng).unwrap(),
            0.0
        );
    }

    #[test]
    fn monte_carlo_uniform_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let qf = |_: &[f64], a: &[f64]| a[0];
        let est = si_monte_carlo(&qf, &[], 100_000, &[(0.0, 1.0)], &mut rng).unwrap();
        assert!((est - 1.0 / 12.0).abs() < 0.002, "{est}");
    }

    #[test]
    fn monte_carlo_step_function_matches_exact() {
        let row = [0.3, -1.0, 0.9, 0.2];
        let exact = si_exact(&row).unwrap();
        let qf = move |_: &[f64], a: &[f64]| row[((a[0] * 4.0) as usize).min(3)];
        let n = 1000;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let est = si_monte_carlo(&qf, &[], n, &[(0.0, 1.0)], &mut rng).unwrap();
        // standard error of a variance estimate: sqrt((mu4 - sigma^4) / n)
        let mean = row.iter().sum::<f64>() / 4.0;
        let mu4 = row.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / 4.0;
        let se = ((mu4 - exact * exact) / n as f64).sqrt();
        assert!(
            (est - exact).abs() < 3.0 * se,
            "est {est} exact {exact} se {se}"
        );
    }

    #[test]
    fn monte_carlo_errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let qf = |_: &[f64], a: &[f64]| if a[0] > 0.5 { f64::NAN } else { 0.0 };
        let err = si_monte_carlo(&qf, &[], 1000, &[(0.0, 1.0)], &mut rng).unwrap_err();
        match err {
            Error::NonFinite { action, value } => {
                assert!(action[0] > 0.5);
                assert!(value.is_nan());
            }
            other => panic!("unexpected {other:?}"),
        }
        let ok = |_: &[f64], _: &[f64]| 0.0;
        assert!(si_monte_carlo(&ok, &[], 1, &[(0.0, 1.0)], &mut rng).is_err());
        assert!(si_monte_carlo(&ok, &[], 10, &[(0.0, f64::INFINITY)], &mut rng).is_err());
    }

    #[test]
    fn threshold_ramp() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        let theta = compute_threshold(&v, 0.1).unwrap();
        let crit: Vec<f64> = v.iter().copied().filter(|&x| x > theta).collect();
        assert_eq!(crit, (91..=100).map(f64::from).collect::<Vec<_>>());
    }

    #[test]
    fn threshold_flat_and_errors() {
        let theta = compute_threshold(&[0.4; 50], 0.1).unwrap();
        assert_eq!([0.4; 50].iter().filter(|&&x| x > theta).count(), 0);
        assert!(compute_threshold(&[], 0.1).is_err());
        assert!(compute_threshold(&[1.0], 0.0).is_err());
        assert!(compute_threshold(&[1.0], 1.0).is_err());
    }

    #[test]
    fn threshold_121_distinct() {
        let v: Vec<f64> = (0..121).map(|i| (i as f64 * 0.37).sin()).collect();
        let theta = compute_threshold(&v, 0.1).unwrap();
        assert_eq!(v.iter().filter(|&&x| x > theta).count(), 12);
    }

    #[test]
    fn buffer_is_fifo_and_bounded() {
        let mut b = RecentStateBuffer::new(3, 2).unwrap();
        assert!(!b.push(1));
        assert!(b.push(2));
        assert!(!b.push(3));
        assert!(b.push(4));
        assert_eq!(b.iter().copied().collect::<Vec<_>>(), vec![2, 3, 4]);
        assert_eq!(b.len(), 3);
        assert!(RecentStateBuffer::<usize>::new(0, 1).is_err());
    }

    #[test]
    fn refresh_single_repeated_state() {
        let q = QTable::from_values(vec![1.0, -1.0, 0.0, 0.5], 1, 4, 0.3, 0.99).unwrap();
        let mut b = RecentStateBuffer::new(1000, 1000).unwrap();
        for _ in 0..1000 {
            b.push(0);
        }
        let map = refresh_critical_set(&b, &q, 0.1).unwrap();
        assert!(map.critical_set().is_empty());
    }

    #[test]
    fn refresh_one_high_state() {
        let mut values = vec![0.0; 8];
        values[4..8].copy_from_slice(&[1.0, -1.0, 1.0, -1.0]);
        let q = QTable::from_values(values, 2, 4, 0.3, 0.99).unwrap();
        let mut b = RecentStateBuffer::new(1000, 1000).unwrap();
        b.push(1);
        for _ in 0..999 {
            b.push(0);
        }
        let map = refresh_critical_set(&b, &q, 0.1).unwrap();
        assert_eq!(map.threshold(), 0.0);
        assert_eq!(map.critical_set(), &[1]);
        let empty = RecentStateBuffer::<usize>::new(10, 10).unwrap();
        assert!(refresh_critical_set(&empty, &q, 0.1).is_err());
    }

    #[test]
    fn refresh_continuous_threshold() {
        let mut b = RecentStateBuffer::new(100, 100).unwrap();
        for i in 0..100 {
            b.push(vec![i as f64]);
        }
        let theta = refresh_threshold(&b, |s| Ok(s[0]), 0.1).unwrap();
        assert!((theta - 89.1).abs() < 1e-12);
    }

    #[test]
    fn match_ratio_arithmetic() {
        assert_eq!(
            match_ratio_from_distances(&[4.0, 2.0, 0.0]),
            vec![0.0, 0.5, 1.0]
        );
        assert_eq!(match_ratio_from_distances(&[0.0, 0.0]), vec![1.0, 1.0]);
        let a = vec![vec![0.0, 0.0]];
        let b = vec![vec![3.0, 4.0]];
        assert_eq!(set_distance(&a, &b), 5.0);
    }

    #[test]
    fn match_ratio_identical_sets() {
        let rec = |step| TopKRecord {
            step,
            states: vec![1, 2],
            points: vec![vec![0.0, 1.0], vec![2.0, 2.0]],
        };
        let m = match_ratio_series(&[rec(1), rec(2), rec(3)], &rec(3)).unwrap();
        assert_eq!(m, vec![1.0; 3]);
        assert!(match_ratio_series(&[rec(1)], &rec(3)).is_err());
    }

    #[test]
    fn top_k_ties_by_state_id() {
        let si = [(5, 1.0), (3, 1.0), (9, 2.0), (1, 0.0)];
        let r = TopKRecord::from_si(0, &si, 2, |s| vec![s as f64]);
        assert_eq!(r.states, vec![9, 3]);
    }

    #[test]
    fn simap_csv_and_grid() {
        let m = CliffMaze::standard();
        let mut q = QTable::new(121, 4, 0.3, 0.99).unwrap();
        let centre = m.state_of(Cell::new(5, 5));
        q.set(centre, 0, -1.0);
        q.set(centre, 1, -1.0);
        q.set(centre, 2, 0.5);
        let map = SIMap::from_table(&q, 0..121, 0.1).unwrap();
        assert_eq!(map.critical_set(), &[centre]);
        let csv = map.to_csv(&m);
        assert_eq!(csv.lines().count(), 122);
        assert!(csv.contains(&format!("{centre},5,5,")));
        let grid = normalized_grid(&si_per_state(&q), &m);
        assert_eq!(grid[5][5], 1.0);
        assert!(grid.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
        let flat = normalized_grid(&[0.0; 121], &m);
        assert!(flat.iter().flatten().all(|&v| v == 0.0));
    }

    proptest! {
        #[test]
        fn si_is_nonnegative_and_permutation_invariant(
            mut row in prop::collection::vec(-10.0f64..10.0, 2..8),
            seed in any::<u64>(),
        ) {
            let a = si_exact(&row).unwrap();
            prop_assert!(a >= 0.0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            use rand::seq::SliceRandom;
            row.shuffle(&mut rng);
            let b = si_exact(&row).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a));
        }

        #[test]
        fn si_shift_and_scale(
            row in prop::collection::vec(-10.0f64..10.0, 2..8),
            shift in -100.0f64..100.0,
            scale in -5.0f64..5.0,
        ) {
            let base = si_exact(&row).unwrap();
            let shifted: Vec<f64> = row.iter().map(|v| v + shift).collect();
            let scaled: Vec<f64> = row.iter().map(|v| v * scale).collect();
            prop_assert!((si_exact(&shifted).unwrap() - base).abs() <= 1e-9 * (1.0 + base));
            prop_assert!((si_exact(&scaled).unwrap() - scale * scale * base).abs()
                <= 1e-9 * (1.0 + scale * scale * base));
        }

        #[test]
        fn critical_count_for_distinct_values(
            n in 2usize..400,
            ratio in 0.01f64..0.99,
            seed in any::<u64>(),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v: Vec<f64> = (0..n).map(|i| i as f64).collect();
            use rand::seq::SliceRandom;
            v.shuffle(&mut rng);
            let theta = compute_threshold(&v, ratio).unwrap();
            let count = v.iter().filter(|&&x| x > theta).count();
            // linear interpolation puts the cut at rank (n - 1)(1 - q)
            let h = (n - 1) as f64 * (1.0 - ratio);
            prop_assert_eq!(count, n - 1 - h.floor() as usize);
            prop_assert!(count as f64 <= ratio * n as f64 + 1.0);
            prop_assert!(count as f64 >= ratio * n as f64 - 1.0);
        }

        #[test]
        fn buffer_never_exceeds_capacity(cap in 1usize..50, pushes in 0usize..200) {
            let mut b = RecentStateBuffer::new(cap, 7).unwrap();
            for i in 0..pushes {
                b.push(i);
                prop_assert!(b.len() <= cap);
            }
            let expect: Vec<usize> = (pushes.saturating_sub(cap)..pushes).collect();
            prop_assert_eq!(b.iter().copied().collect::<Vec<_>>(), expect);
        }

        #[test]
        fn match_ratio_in_unit_interval(d in prop::collection::vec(0.0f64..100.0, 2..30)) {
            let mut d = d;
            *d.last_mut().unwrap() = 0.0;
            let m = match_ratio_from_distances(&d);
            prop_assert!(m.iter().all(|x| (0.0..=1.0).contains(x)));
            prop_assert_eq!(*m.last().unwrap(), 1.0);
        }
    }
}
