//! Property tests for the structural invariants of the dynamics and the
//! utility algebra.

use proptest::prelude::*;
use taskalloc::dpbrag::{DpbragParams, RewardSequence, StepParamGrid, StepSchedule};
use taskalloc::{
    dominating_agents, objective_value, partition_utility, pbrag_step, run_dpbrag, run_pbrag,
    utility_gradient, weight_utility, DirectedGraph, Partition, RewardMatrix, StepSizeMatrix,
    WeightMatrix,
};

#[derive(Debug, Clone)]
struct Instance {
    rewards: RewardMatrix,
    weights: WeightMatrix,
    steps: StepSizeMatrix,
}

fn instance_strategy() -> impl Strategy<Value = Instance> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| {
        (
            proptest::collection::vec(0.0..1.0f64, n * m),
            proptest::collection::vec(0.0..=1.0f64, n * m),
            proptest::collection::vec(0.01..50.0f64, n * m),
        )
            .prop_map(move |(f, w, g)| Instance {
                rewards: RewardMatrix::new(n, m, f).unwrap(),
                weights: WeightMatrix::new(n, m, w).unwrap(),
                steps: {
                    let rows: Vec<Vec<f64>> =
                        g.chunks(m).map(|chunk| chunk.to_vec()).collect();
                    StepSizeMatrix::from_rows(&rows).unwrap()
                },
            })
    })
}

fn owners_strategy() -> impl Strategy<Value = (RewardMatrix, Partition)> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(n, m)| {
        (
            proptest::collection::vec(0.0..1.0f64, n * m),
            proptest::collection::vec(1usize..=n, m),
        )
            .prop_map(move |(f, owners)| {
                (
                    RewardMatrix::new(n, m, f).unwrap(),
                    Partition::from_owners(n, &owners).unwrap(),
                )
            })
    })
}

proptest! {
    /// One step keeps every coordinate inside the unit box.
    #[test]
    fn step_preserves_weight_range(inst in instance_strategy()) {
        let next = pbrag_step(&inst.weights, &inst.rewards, &inst.steps).unwrap();
        prop_assert!(next.values().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    /// Weights of dominating agents never decrease.
    #[test]
    fn dominating_weights_are_monotone(inst in instance_strategy()) {
        let next = pbrag_step(&inst.weights, &inst.rewards, &inst.steps).unwrap();
        for task in 1..=inst.rewards.tasks() {
            for agent in dominating_agents(task, &inst.rewards).unwrap() {
                prop_assert!(next.value(agent, task) >= inst.weights.value(agent, task));
            }
        }
    }

    /// Task columns evolve independently: permuting columns commutes with
    /// the whole run, bit for bit.
    #[test]
    fn task_columns_decouple(inst in instance_strategy(), rounds in 1usize..30) {
        let n = inst.rewards.agents();
        let m = inst.rewards.tasks();
        // Rotate task ids by one.
        let perm: Vec<usize> = (1..=m).map(|q| q % m + 1).collect();
        let permute_rows = |get: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
            (1..=n)
                .map(|i| {
                    let mut row = vec![0.0; m];
                    for q in 1..=m {
                        row[perm[q - 1] - 1] = get(i, q);
                    }
                    row
                })
                .collect()
        };
        let f_p = RewardMatrix::from_rows(&permute_rows(&|i, q| inst.rewards.value(i, q))).unwrap();
        let w_p = WeightMatrix::from_rows(&permute_rows(&|i, q| inst.weights.value(i, q))).unwrap();
        let g_p = StepSizeMatrix::from_rows(&permute_rows(&|i, q| inst.steps.value(i, q))).unwrap();

        let run = run_pbrag(&inst.weights, &inst.rewards, &inst.steps, rounds).unwrap();
        let run_p = run_pbrag(&w_p, &f_p, &g_p, rounds).unwrap();
        prop_assert_eq!(run.states.len(), run_p.states.len());
        for (state, state_p) in run.states.iter().zip(&run_p.states) {
            for i in 1..=n {
                for q in 1..=m {
                    prop_assert_eq!(state.value(i, q), state_p.value(i, perm[q - 1]));
                }
            }
        }
    }

    /// The injected register holds the window-start sample all window long.
    #[test]
    fn injection_holds_between_switches(
        (n, period, rounds) in (2usize..=4, 2usize..=6, 8usize..=40),
        seed_values in proptest::collection::vec(0.01..1.0f64, 16),
        noise in proptest::collection::vec((0.0..=1.0f64, 0.0..10.0f64, 0.0..1.0f64), 16),
    ) {
        let m = 2usize;
        let f_rows: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..m).map(|q| seed_values[i * m + q]).collect())
            .collect();
        let f = RewardMatrix::from_rows(&f_rows).unwrap();
        let amp: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..m).map(|q| noise[i * m + q].0 * f_rows[i][q]).collect())
            .collect();
        let freq: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..m).map(|q| noise[i * m + q].1).collect())
            .collect();
        let dec: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..m).map(|q| noise[i * m + q].2).collect())
            .collect();
        let seq = RewardSequence::damped_cosine(
            f,
            StepParamGrid::from_rows(&amp).unwrap(),
            StepParamGrid::from_rows(&freq).unwrap(),
            StepParamGrid::from_rows(&dec).unwrap(),
        )
        .unwrap();
        let graph = DirectedGraph::cycle(n).unwrap();
        let params = DpbragParams::new(
            period,
            0.5,
            0.1,
            graph.diameter().unwrap(),
            StepSchedule::two_phase(1.0, 1.0).unwrap(),
        )
        .unwrap();
        let run = run_dpbrag(
            &WeightMatrix::zeros(n, m).unwrap(),
            &graph,
            &seq,
            &params,
            rounds,
            0.0,
        )
        .unwrap();
        for state in &run.log {
            let window_start = (state.round / period) * period;
            for agent in 1..=n {
                for task in 1..=m {
                    prop_assert_eq!(
                        state.injected(agent, task),
                        seq.sample(agent, task, window_start)
                    );
                }
            }
        }
    }

    /// On a valid partition no task is contested, so the agents' utilities
    /// sum to the planner's objective.
    #[test]
    fn utilities_sum_to_objective_on_partitions((f, p) in owners_strategy()) {
        let total: f64 = (1..=f.agents())
            .map(|i| partition_utility(i, p.profile(), &f).unwrap())
            .sum();
        prop_assert!((total - objective_value(&p, &f).unwrap()).abs() < 1e-12);
    }

    /// The gradient equals the utility's exact endpoint slope in each
    /// coordinate (the utility is affine there).
    #[test]
    fn gradient_is_the_affine_slope(inst in instance_strategy()) {
        for agent in 1..=inst.rewards.agents() {
            for task in 1..=inst.rewards.tasks() {
                let lo = weight_utility(
                    agent,
                    &inst.weights.with_entry(agent, task, 0.0).unwrap(),
                    &inst.rewards,
                )
                .unwrap();
                let hi = weight_utility(
                    agent,
                    &inst.weights.with_entry(agent, task, 1.0).unwrap(),
                    &inst.rewards,
                )
                .unwrap();
                let slope = utility_gradient(agent, task, &inst.weights, &inst.rewards).unwrap();
                prop_assert!((slope - (hi - lo)).abs() < 1e-9);
            }
        }
    }
}
