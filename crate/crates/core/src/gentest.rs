//! Random testing baseline: run the program on sampled inputs until one
//! lands in the interval.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::float::FloatValue;
use crate::frontend::{Compiled, Program};

#[derive(Debug, Clone, PartialEq)]
pub struct GenTestResult {
    /// The first sampled inputs that hit, in declaration order.
    pub hit: Option<Vec<(String, FloatValue)>>,
    pub trials: u64,
    pub time_ms: f64,
}

/// Samples each input uniformly by ordinal rank within its declared domain,
/// so every float is equally likely.
pub fn gentest(p: &Program, suspect: u32, max_trials: u64, seed: u64, timeout: Option<Duration>) -> GenTestResult {
    let start = Instant::now();
    let f = p.format;
    let compiled = Compiled::new(p);
    let ranges: Vec<(i64, i64)> = p
        .inputs
        .iter()
        .map(|d| {
            let (lo, hi) = d.interval.domain.bounds().expect("declared domains are non-empty");
            (f.ordinal_of(lo), f.ordinal_of(hi))
        })
        .collect();
    // With every domain a single value there is only one distinct trial.
    let budget = if ranges.iter().all(|(a, b)| a == b) { max_trials.min(1) } else { max_trials };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut point = vec![0.0; ranges.len()];
    let mut trials = 0;
    while trials < budget {
        if trials % 4096 == 0 && timeout.is_some_and(|t| start.elapsed() >= t) {
            break;
        }
        for (x, &(a, b)) in point.iter_mut().zip(&ranges) {
            *x = f.at_ordinal(rng.gen_range(a..=b)).expect("ordinal inside the domain");
        }
        trials += 1;
        if compiled.hits(&point, suspect) {
            let hit = p
                .input_names()
                .into_iter()
                .zip(&point)
                .map(|(n, x)| (n, FloatValue::from_f64(f, *x).expect("sampled from the grid")))
                .collect();
            return GenTestResult { hit: Some(hit), trials, time_ms: start.elapsed().as_secs_f64() * 1e3 };
        }
    }
    GenTestResult { hit: None, trials, time_ms: start.elapsed().as_secs_f64() * 1e3 }
}
