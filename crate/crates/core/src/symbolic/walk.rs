//! Boundary samples of the free group from simulated random walks.

use std::collections::VecDeque;

use num_rational::BigRational;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::measure::{integer_weights, MeasureError, MeasureSpec};
use super::SystemError;

/// A stabilized prefix of the reduced word of an `m`-random walk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WalkSample {
    /// Reduced prefix; unchanged during the last `window` steps.
    pub prefix: Vec<u8>,
    pub steps: u64,
    pub window: u64,
    /// Word length of the walk when it stopped.
    pub distance: u64,
    pub seed: u64,
}

impl WalkSample {
    /// Mean graph distance gained per step.
    pub fn speed(&self) -> f64 {
        self.distance as f64 / self.steps as f64
    }
}

/// Runs the `m`-random walk on `F_d` from the identity, tracking the reduced
/// word, until its first `min_len` letters have been untouched for `window`
/// consecutive steps. Returns those letters (more if the stable part is longer).
pub fn random_walk_boundary_sample(
    d: u8,
    m: &[BigRational],
    seed: u64,
    window: u64,
    min_len: usize,
    max_steps: u64,
) -> Result<WalkSample, SystemError> {
    let measure = MeasureSpec::Hitting { d, m: m.to_vec() };
    measure.validate()?;
    let step_law = WeightedIndex::new(integer_weights(m)?).map_err(|_| MeasureError::SamplingPrecision)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut word: Vec<u8> = Vec::new();
    // (step index, height) pairs with increasing heights: sliding-window minimum
    let mut mins: VecDeque<(u64, usize)> = VecDeque::new();
    for t in 0..max_steps {
        let a = step_law.sample(&mut rng) as u8;
        if word.last() == Some(&(a ^ 1)) {
            word.pop();
        } else {
            word.push(a);
        }
        let h = word.len();
        while mins.back().is_some_and(|&(_, g)| g >= h) {
            mins.pop_back();
        }
        mins.push_back((t, h));
        while mins.front().is_some_and(|&(s, _)| s + window <= t) {
            mins.pop_front();
        }
        let low = mins.front().unwrap().1;
        if t + 1 >= window && low >= min_len {
            return Ok(WalkSample {
                prefix: word[..low].to_vec(),
                steps: t + 1,
                window,
                distance: h as u64,
                seed,
            });
        }
    }
    Err(SystemError::WalkBudget { steps: max_steps })
}
