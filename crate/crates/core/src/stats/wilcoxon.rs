//! Wilcoxon rank-sum (Mann-Whitney) test with midranks for ties.
//!
//! Small samples use the exact permutation distribution of the rank sum,
//! computed by counting subsets over doubled midranks so ties stay exact.
//! Larger samples use the normal approximation with tie and continuity
//! corrections.

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Samples with both sizes below this use the exact distribution.
pub const EXACT_MAX_SIZE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Auto,
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankSumTest {
    /// Sum of the midranks of `x` in the pooled sample.
    pub statistic: f64,
    pub p_value: f64,
    pub method: Method,
}

/// Two-sided test choosing the exact or normal branch by sample size.
pub fn wilcoxon_rank_sum(x: &[f64], y: &[f64]) -> Result<RankSumTest> {
    wilcoxon_rank_sum_with(x, y, Method::Auto)
}

pub fn wilcoxon_rank_sum_with(x: &[f64], y: &[f64], method: Method) -> Result<RankSumTest> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::contract("rank-sum test needs two non-empty samples"));
    }
    if x.iter().chain(y).any(|v| v.is_nan()) {
        return Err(Error::contract("rank-sum test input contains NaN"));
    }
    let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
    let ranks = midranks(&pooled);
    let statistic: f64 = ranks[..x.len()].iter().sum();
    let method = match method {
        Method::Auto if x.len() < EXACT_MAX_SIZE && y.len() < EXACT_MAX_SIZE => Method::Exact,
        Method::Auto => Method::Normal,
        m => m,
    };
    let p_value = match method {
        Method::Exact => exact_p(&ranks, x.len()),
        _ => normal_p(&pooled, &ranks, x.len()),
    };
    Ok(RankSumTest {
        statistic,
        p_value,
        method,
    })
}

/// 1-based ranks, tied values sharing their average rank.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn exact_p(ranks: &[f64], nx: usize) -> f64 {
    // doubled midranks are integers
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let observed: usize = doubled[..nx].iter().sum();
    let max_sum: usize = doubled.iter().sum();
    // counts[j][s]: subsets of size j with doubled rank sum s
    let mut counts = vec![vec![0.0f64; max_sum + 1]; nx + 1];
    counts[0][0] = 1.0;
    for (i, &r) in doubled.iter().enumerate() {
        for j in (1..=nx.min(i + 1)).rev() {
            let (lower, upper) = counts.split_at_mut(j);
            let prev = &lower[j - 1];
            let cur = &mut upper[0];
            for s in (r..=max_sum).rev() {
                if prev[s - r] != 0.0 {
                    cur[s] += prev[s - r];
                }
            }
        }
    }
    let dist = &counts[nx];
    let total: f64 = dist.iter().sum();
    let lower: f64 = dist[..=observed].iter().sum::<f64>() / total;
    let upper: f64 = dist[observed..].iter().sum::<f64>() / total;
    (2.0 * lower.min(upper)).min(1.0)
}

fn normal_p(pooled: &[f64], ranks: &[f64], nx: usize) -> f64 {
    let n = pooled.len() as f64;
    let n1 = nx as f64;
    let n2 = n - n1;
    let w: f64 = ranks[..nx].iter().sum();
    let mean = n1 * (n + 1.0) / 2.0;

    let mut sorted = pooled.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let var = if n > 1.0 {
        n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)))
    } else {
        0.0
    };
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((w - mean).abs() - 0.5).max(0.0) / var.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;

    /// Brute-force exact p: enumerate every assignment of pooled ranks to x.
    fn enumerate_p(x: &[f64], y: &[f64]) -> f64 {
        let pooled: Vec<f64> = x.iter().chain(y).copied().collect();
        let ranks = midranks(&pooled);
        let n = pooled.len();
        let w: f64 = ranks[..x.len()].iter().sum();
        let (mut le, mut ge, mut total) = (0u64, 0u64, 0u64);
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != x.len() {
                continue;
            }
            let s: f64 = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| ranks[i])
                .sum();
            total += 1;
            if s <= w + 1e-9 {
                le += 1;
            }
            if s >= w - 1e-9 {
                ge += 1;
            }
        }
        (2.0 * (le.min(ge) as f64) / total as f64).min(1.0)
    }

    #[test]
    fn exact_small_example() {
        let r = wilcoxon_rank_sum(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(r.method, Method::Exact);
        assert_eq!(r.statistic, 3.0);
        assert!((r.p_value - 1.0 / 3.0).abs() < 1e-12);
        assert!((enumerate_p(&[1.0, 2.0], &[3.0, 4.0]) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn identical_samples() {
        let x = [3.0, 1.0, 4.0, 1.0, 5.0];
        assert_eq!(wilcoxon_rank_sum(&x, &x).unwrap().p_value, 1.0);
        let big: Vec<f64> = (0..50).map(|i| (i % 7) as f64).collect();
        assert_eq!(wilcoxon_rank_sum(&big, &big).unwrap().p_value, 1.0);
        let flat = [2.0; 30];
        for m in [Method::Exact, Method::Normal] {
            assert_eq!(
                wilcoxon_rank_sum_with(&flat[..5], &flat, m)
                    .unwrap()
                    .p_value,
                1.0
            );
        }
    }

    #[test]
    fn midranks_average_ties() {
        assert_eq!(midranks(&[1.0, 2.0, 2.0, 4.0]), vec![1.0, 2.5, 2.5, 4.0]);
        assert_eq!(midranks(&[5.0, 5.0, 5.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn rejects_empty_and_nan() {
        assert!(wilcoxon_rank_sum(&[], &[1.0]).is_err());
        assert!(wilcoxon_rank_sum(&[f64::NAN], &[1.0]).is_err());
    }

    #[test]
    fn exact_matches_enumeration_with_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..40 {
            let nx = rng.random_range(1..7);
            let ny = rng.random_range(1..7);
            let x: Vec<f64> = (0..nx).map(|_| rng.random_range(0..5) as f64).collect();
            let y: Vec<f64> = (0..ny).map(|_| rng.random_range(0..5) as f64).collect();
            let dp = wilcoxon_rank_sum_with(&x, &y, Method::Exact)
                .unwrap()
                .p_value;
            assert!((dp - enumerate_p(&x, &y)).abs() < 1e-12, "{x:?} {y:?}");
        }
    }

    #[test]
    fn exact_and_normal_agree_at_15_each() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for shift in [0.0, 0.3, 0.6, 1.0] {
            let x: Vec<f64> = (0..15).map(|_| rng.random::<f64>()).collect();
            let y: Vec<f64> = (0..15).map(|_| rng.random::<f64>() + shift).collect();
            let e = wilcoxon_rank_sum_with(&x, &y, Method::Exact)
                .unwrap()
                .p_value;
            let n = wilcoxon_rank_sum_with(&x, &y, Method::Normal)
                .unwrap()
                .p_value;
            assert!((e - n).abs() <= 0.01, "shift {shift}: exact {e} normal {n}");
        }
    }

    #[test]
    fn large_separated_samples_are_significant() {
        let x: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let y: Vec<f64> = (0..100).map(|i| 1000.0 + i as f64).collect();
        let r = wilcoxon_rank_sum(&x, &y).unwrap();
        assert_eq!(r.method, Method::Normal);
        assert!(r.p_value < 1e-30);
    }

    proptest! {
        #[test]
        fn invariant_under_monotone_transform(
            x in prop::collection::vec(-50.0f64..50.0, 1..25),
            y in prop::collection::vec(-50.0f64..50.0, 1..25),
        ) {
            let f = |v: &f64| (v / 10.0).exp() * 3.0 + 7.0;
            let a = wilcoxon_rank_sum(&x, &y).unwrap();
            let tx: Vec<f64> = x.iter().map(f).collect();
            let ty: Vec<f64> = y.iter().map(f).collect();
            let b = wilcoxon_rank_sum(&tx, &ty).unwrap();
            prop_assert_eq!(a.statistic, b.statistic);
            prop_assert!((a.p_value - b.p_value).abs() < 1e-12);
        }

        #[test]
        fn p_value_in_unit_interval(
            x in prop::collection::vec(0u8..6, 1..30),
            y in prop::collection::vec(0u8..6, 1..30),
        ) {
            let x: Vec<f64> = x.into_iter().map(f64::from).collect();
            let y: Vec<f64> = y.into_iter().map(f64::from).collect();
            let r = wilcoxon_rank_sum(&x, &y).unwrap();
            prop_assert!(r.p_value > 0.0 && r.p_value <= 1.0);
        }
    }
}
