//! Checks pinned to the embedded 4x8 benchmark instance.

use std::collections::BTreeSet;

use taskalloc::dpbrag::{derive_constant_params, DpbragParams, RewardSequence, StepSchedule};
use taskalloc::{
    check_assumptions, dominating_agents, finite_time_bound, is_equilibrium_weight, run_dpbrag,
    translated_support, unique_ne, verify_inclusion, DirectedGraph, RewardMatrix, StepSizeMatrix,
    WeightMatrix,
};
use taskalloc_cli::builtin::builtin;
use taskalloc_cli::scenario::Scenario;

fn bench_rewards() -> RewardMatrix {
    Scenario::from_toml(builtin("bench4x8-pbrag").unwrap())
        .unwrap()
        .problem
        .build(None)
        .unwrap()
}

/// Per-task best agents of the benchmark instance.
const BEST_AGENT: [usize; 8] = [3, 1, 4, 2, 4, 4, 1, 3];

#[test]
fn dominating_agents_match_the_highlighted_cells() {
    let f = bench_rewards();
    for (task, &agent) in BEST_AGENT.iter().enumerate() {
        assert_eq!(
            dominating_agents(task + 1, &f).unwrap(),
            BTreeSet::from([agent]),
            "task {}",
            task + 1
        );
    }
    let report = check_assumptions(&f);
    assert!(report.violations().is_empty());
    assert!(report.all_unique_dominating());
}

#[test]
fn unique_ne_is_the_highlighted_binary_matrix() {
    let f = bench_rewards();
    let ne = unique_ne(&f).expect("unique dominating agents");
    for task in 1..=8 {
        for agent in 1..=4 {
            let expected = if BEST_AGENT[task - 1] == agent { 1.0 } else { 0.0 };
            assert_eq!(ne.value(agent, task), expected);
        }
    }
    // The unique equilibrium is an exact fixed point of the dynamics.
    let steps = StepSizeMatrix::uniform(4, 8, 320.0).unwrap();
    assert!(is_equilibrium_weight(&ne, &f, &steps, 0.0).unwrap());
}

#[test]
fn finite_time_bound_is_two_at_step_320() {
    let f = bench_rewards();
    // The tightest column margin is about 0.0064, so gamma = 320 puts
    // 1 / (gamma * delta) just under 1/2.
    let steps = StepSizeMatrix::uniform(4, 8, 320.0).unwrap();
    assert_eq!(finite_time_bound(&f, &steps).unwrap(), 2);
}

#[test]
fn optimal_partitions_are_equilibria_on_the_benchmark() {
    assert!(verify_inclusion(&bench_rewards()).unwrap());
}

#[test]
fn derived_period_grows_as_epsilon_shrinks_on_the_benchmark() {
    let f = bench_rewards();
    let tight = derive_constant_params(&f, 3, 0.9, 0.1).unwrap();
    let loose = derive_constant_params(&f, 3, 0.3, 0.1).unwrap();
    assert!(tight.period >= 2 * 3 + 2);
    assert!(loose.period > tight.period);
    assert!(tight.alpha_min > 0.0 && tight.mu > 0.0);
}

#[test]
fn node_count_surrogate_still_settles_the_single_task_instance() {
    let f = RewardMatrix::from_rows(&[vec![1000.0], vec![900.0], vec![100.0], vec![75.0]]).unwrap();
    let graph = DirectedGraph::new(4, [(2, 1), (3, 2), (4, 3), (1, 4)]).unwrap();
    // Agents that only know the network size use it in place of the
    // diameter; the derived sweep and period grow but the behavior stands.
    let derived = derive_constant_params(&f, 4, 0.9, 0.1).unwrap();
    assert_eq!(derived.diameter_bound, 4);
    let run = run_dpbrag(
        &WeightMatrix::zeros(4, 1).unwrap(),
        &graph,
        &RewardSequence::constant(f),
        &derived.params().unwrap(),
        6 * derived.period,
        1e-9,
    )
    .unwrap();
    let settle = run.settle_round.expect("settles");
    assert!(run.rounds() - settle >= 2 * derived.period);
    assert_eq!(
        run.final_allocation.subsets(),
        &[
            BTreeSet::from([1]),
            BTreeSet::new(),
            BTreeSet::new(),
            BTreeSet::new()
        ]
    );
}

#[test]
fn constant_samples_with_two_phase_schedule_reach_the_optimal_partition() {
    let f = bench_rewards();
    let expected = translated_support(&unique_ne(&f).unwrap());
    let graph = DirectedGraph::cycle(4).unwrap();
    let d = graph.diameter().unwrap();
    let params = DpbragParams::new(
        2 * d + 2,
        0.5,
        0.1,
        d,
        StepSchedule::two_phase(1.0, 1.0).unwrap(),
    )
    .unwrap();
    let run = run_dpbrag(
        &WeightMatrix::zeros(4, 8).unwrap(),
        &graph,
        &RewardSequence::constant(f),
        &params,
        2500,
        1e-9,
    )
    .unwrap();
    assert!(run.stabilized(2 * params.period));
    assert_eq!(run.final_allocation, expected);
}
