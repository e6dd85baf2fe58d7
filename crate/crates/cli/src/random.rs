//! Seeded instance and reward-sequence generation.
//!
//! Every randomized quantity flows through a ChaCha generator seeded from
//! the scenario, so identical seeds reproduce identical runs bit for bit.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use taskalloc::dpbrag::{RewardSequence, StepParamGrid};
use taskalloc::RewardMatrix;

/// Draw an instance with factored rewards: both factors uniform on [0, 1),
/// multiplied entrywise. Draw order is the full reward factor row-major,
/// then the full importance factor row-major.
pub fn generate_random_instance(seed: u64, agents: usize, tasks: usize) -> RewardMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reward: Vec<Vec<f64>> = (0..agents)
        .map(|_| (0..tasks).map(|_| rng.random::<f64>()).collect())
        .collect();
    let importance: Vec<Vec<f64>> = (0..agents)
        .map(|_| (0..tasks).map(|_| rng.random::<f64>()).collect())
        .collect();
    RewardMatrix::from_factors(&reward, &importance).expect("uniform draws are valid rewards")
}

/// Draw a damped-cosine sample sequence around `limit`: per (agent, task),
/// in row-major order, amplitude uniform on [0, reward), angular frequency
/// uniform on [0, 10), decay uniform on [0, 1).
pub fn damped_cosine_from_seed(limit: &RewardMatrix, seed: u64) -> RewardSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amplitude = Vec::new();
    let mut frequency = Vec::new();
    let mut decay = Vec::new();
    for agent in 1..=limit.agents() {
        let mut a_row = Vec::new();
        let mut b_row = Vec::new();
        let mut c_row = Vec::new();
        for task in 1..=limit.tasks() {
            a_row.push(rng.random::<f64>() * limit.value(agent, task));
            b_row.push(rng.random_range(0.0..10.0));
            c_row.push(rng.random::<f64>());
        }
        amplitude.push(a_row);
        frequency.push(b_row);
        decay.push(c_row);
    }
    RewardSequence::damped_cosine(
        limit.clone(),
        StepParamGrid::from_rows(&amplitude).expect("amplitudes are valid"),
        StepParamGrid::from_rows(&frequency).expect("frequencies are valid"),
        StepParamGrid::from_rows(&decay).expect("decays are valid"),
    )
    .expect("drawn amplitudes never exceed the limit")
}
