//! Brute-force reference implementations used by the test suites.
//!
//! Everything here goes straight to the definitions: equilibria are checked
//! by enumerating unilateral deviations, and optimal partitions by scoring
//! every assignment. None of it consults the dominating-agent
//! characterizations, so these routines serve as independent cross-checks
//! at desk scale. Strict-improvement comparisons carry a small epsilon to
//! absorb floating-point noise.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::model::{
    objective_value, partition_utility, weight_utility, AllocationProfile, Partition,
    RewardMatrix, TaskId, WeightMatrix,
};

/// Margin below which a payoff difference does not count as an improvement.
pub const IMPROVEMENT_EPS: f64 = 1e-9;

/// Deviation grid for the relaxed game; per-coordinate payoffs are affine,
/// so endpoint deviations decide equilibrium membership and the interior
/// points only add redundancy.
pub const WEIGHT_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// All subsets of `1..=tasks` as ordered sets.
pub fn all_subsets(tasks: usize) -> Vec<BTreeSet<TaskId>> {
    (0..(1usize << tasks))
        .map(|mask| {
            (1..=tasks)
                .filter(|task| mask & (1 << (task - 1)) != 0)
                .collect()
        })
        .collect()
}

/// Equilibrium check for the combinatorial game by exhaustive unilateral
/// deviation search: no agent may improve its utility by swapping its
/// subset for any of the `2^m` alternatives.
pub fn is_partition_ne_by_deviation(
    profile: &AllocationProfile,
    rewards: &RewardMatrix,
) -> Result<bool> {
    let subsets = all_subsets(rewards.tasks());
    for agent in 1..=rewards.agents() {
        let current = partition_utility(agent, profile, rewards)?;
        for candidate in &subsets {
            let deviated = profile.with_subset(agent, candidate.clone())?;
            if partition_utility(agent, &deviated, rewards)? > current + IMPROVEMENT_EPS {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Equilibrium check for the relaxed game by grid deviation search over
/// each agent's own row.
pub fn is_weight_ne_by_deviation(weights: &WeightMatrix, rewards: &RewardMatrix) -> Result<bool> {
    let m = rewards.tasks();
    let profiles = grid_profiles(m);
    for agent in 1..=rewards.agents() {
        let current = weight_utility(agent, weights, rewards)?;
        for row in &profiles {
            let mut deviated = weights.clone();
            for (task, &value) in row.iter().enumerate() {
                deviated = deviated.with_entry(agent, task + 1, value)?;
            }
            if weight_utility(agent, &deviated, rewards)? > current + IMPROVEMENT_EPS {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn grid_profiles(tasks: usize) -> Vec<Vec<f64>> {
    let mut rows = vec![Vec::new()];
    for _ in 0..tasks {
        rows = rows
            .iter()
            .flat_map(|row| {
                WEIGHT_GRID.iter().map(move |&v| {
                    let mut next = row.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    rows
}

/// Every objective-maximizing partition found by scoring all `n^m`
/// assignments directly.
pub fn optimal_partitions_by_bruteforce(
    rewards: &RewardMatrix,
) -> Result<(Vec<Partition>, f64)> {
    let n = rewards.agents();
    let m = rewards.tasks();
    let mut best = f64::NEG_INFINITY;
    let mut scored = Vec::new();
    let mut owners = vec![1usize; m];
    loop {
        let partition = Partition::from_owners(n, &owners)?;
        let value = objective_value(&partition, rewards)?;
        best = best.max(value);
        scored.push((partition, value));
        let mut pos = m;
        loop {
            if pos == 0 {
                let winners = scored
                    .into_iter()
                    .filter(|(_, v)| *v >= best - IMPROVEMENT_EPS)
                    .map(|(p, _)| p)
                    .collect();
                return Ok((winners, best));
            }
            pos -= 1;
            owners[pos] += 1;
            if owners[pos] <= n {
                break;
            }
            owners[pos] = 1;
        }
    }
}

/// Direct max and distinct submax of a value vector (submax falls back to
/// the max when all values are equal).
pub fn max_and_submax(values: &[f64]) -> (f64, f64) {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let below = values
        .iter()
        .copied()
        .filter(|&v| v < max)
        .fold(f64::NEG_INFINITY, f64::max);
    (max, if below.is_finite() { below } else { max })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerate_the_whole_power_set() {
        let subsets = all_subsets(3);
        assert_eq!(subsets.len(), 8);
        assert!(subsets.contains(&BTreeSet::new()));
        assert!(subsets.contains(&BTreeSet::from([1, 2, 3])));
    }

    #[test]
    fn bruteforce_optimum_on_tied_instance() {
        let f = RewardMatrix::from_rows(&[vec![0.5, 0.7], vec![0.5, 0.3]]).unwrap();
        let (winners, value) = optimal_partitions_by_bruteforce(&f).unwrap();
        assert_eq!(winners.len(), 2);
        assert!((value - 1.2).abs() < 1e-12);
    }

    #[test]
    fn deviation_search_matches_hand_verdicts() {
        // Agent 1 dominates both tasks (tie on task 1), so taking everything
        // is stable. Contesting task 2 costs agent 2 more than dropping it.
        let f = RewardMatrix::from_rows(&[vec![0.5, 0.7], vec![0.5, 0.3]]).unwrap();
        let all = AllocationProfile::new(2, vec![BTreeSet::from([1, 2]), BTreeSet::new()]).unwrap();
        assert!(is_partition_ne_by_deviation(&all, &f).unwrap());
        let contested =
            AllocationProfile::new(2, vec![BTreeSet::from([1, 2]), BTreeSet::from([2])]).unwrap();
        assert!(!is_partition_ne_by_deviation(&contested, &f).unwrap());
    }

    #[test]
    fn grid_deviation_search_on_weight_profiles() {
        let f = RewardMatrix::from_rows(&[vec![0.9], vec![0.2]]).unwrap();
        let ne = WeightMatrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap();
        assert!(is_weight_ne_by_deviation(&ne, &f).unwrap());
        let not_ne = WeightMatrix::from_rows(&[vec![0.5], vec![0.0]]).unwrap();
        assert!(!is_weight_ne_by_deviation(&not_ne, &f).unwrap());
    }

    #[test]
    fn direct_max_submax() {
        assert_eq!(max_and_submax(&[5.0, 7.0, 7.0, 3.0]), (7.0, 5.0));
        assert_eq!(max_and_submax(&[4.0, 4.0]), (4.0, 4.0));
    }
}
