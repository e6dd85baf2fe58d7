//! Shared deterministic generators for the integration suites.
#![allow(dead_code)] // each test binary uses its own subset

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use taskalloc::{DirectedGraph, RewardMatrix, WeightMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random instance with factored rewards, entries in [0, 1].
pub fn random_rewards(rng: &mut ChaCha8Rng, agents: usize, tasks: usize) -> RewardMatrix {
    let r: Vec<f64> = (0..agents * tasks).map(|_| rng.random::<f64>()).collect();
    let phi: Vec<f64> = (0..agents * tasks).map(|_| rng.random::<f64>()).collect();
    let values = r.iter().zip(&phi).map(|(a, b)| a * b).collect();
    RewardMatrix::new(agents, tasks, values).expect("generated rewards are valid")
}

/// Random rewards redrawn until every task has a unique dominating agent
/// with a dominance margin of at least `min_margin` (keeps finite-time
/// bounds at desk scale).
pub fn random_rewards_unique(
    rng: &mut ChaCha8Rng,
    agents: usize,
    tasks: usize,
    min_margin: f64,
) -> RewardMatrix {
    loop {
        let f = random_rewards(rng, agents, tasks);
        let report = taskalloc::check_assumptions(&f);
        if report.all_unique_dominating() && report.min_dominance_margin() >= min_margin {
            return f;
        }
    }
}

pub fn random_weights(rng: &mut ChaCha8Rng, agents: usize, tasks: usize) -> WeightMatrix {
    let values = (0..agents * tasks).map(|_| rng.random::<f64>()).collect();
    WeightMatrix::new(agents, tasks, values).expect("generated weights are valid")
}

/// Random strongly connected digraph via rejection sampling over arc sets.
pub fn random_strongly_connected(rng: &mut ChaCha8Rng, nodes: usize, arc_prob: f64) -> DirectedGraph {
    loop {
        let mut arcs = Vec::new();
        for from in 1..=nodes {
            for to in 1..=nodes {
                if from != to && rng.random::<f64>() < arc_prob {
                    arcs.push((from, to));
                }
            }
        }
        let graph = DirectedGraph::new(nodes, arcs).expect("arc ids are in range");
        if graph.is_strongly_connected() {
            return graph;
        }
    }
}

/// All digraphs over `nodes` labeled nodes (no self-loops), strongly
/// connected ones only.
pub fn all_strongly_connected(nodes: usize) -> Vec<DirectedGraph> {
    let pairs: Vec<(usize, usize)> = (1..=nodes)
        .flat_map(|i| (1..=nodes).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut graphs = Vec::new();
    for mask in 0u32..(1u32 << pairs.len()) {
        let arcs = pairs
            .iter()
            .enumerate()
            .filter(|(idx, _)| mask & (1 << idx) != 0)
            .map(|(_, &arc)| arc);
        let graph = DirectedGraph::new(nodes, arcs).expect("arc ids are in range");
        if graph.is_strongly_connected() {
            graphs.push(graph);
        }
    }
    graphs
}
