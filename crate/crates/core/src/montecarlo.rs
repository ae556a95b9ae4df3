//! Sample means with standard errors, evaluated in fixed-size chunks.
//!
//! Each sample is a pure function of its index, and chunk sums are combined
//! in index order, so results are bit-identical whatever the thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::quantum::{haar_su2, Unitary2};

pub const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments<const K: usize> {
    #[serde(serialize_with = "crate::report::f64s_15")]
    pub mean: [f64; K],
    /// Standard error of the mean; zero for exact or single-sample results.
    #[serde(serialize_with = "crate::report::f64s_15")]
    pub std_error: [f64; K],
    pub samples: u64,
}

impl<const K: usize> Moments<K> {
    pub fn exact(mean: [f64; K]) -> Self {
        Moments {
            mean,
            std_error: [0.0; K],
            samples: 0,
        }
    }
}

pub fn estimate<const K: usize, F>(samples: u64, f: F) -> Moments<K>
where
    F: Fn(u64) -> [f64; K] + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let partial: Vec<([f64; K], [f64; K])> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut sum = [0.0; K];
            let mut sum_sq = [0.0; K];
            for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                let v = f(i);
                for k in 0..K {
                    sum[k] += v[k];
                    sum_sq[k] += v[k] * v[k];
                }
            }
            (sum, sum_sq)
        })
        .collect();
    let mut sum = [0.0; K];
    let mut sum_sq = [0.0; K];
    for (s, q) in &partial {
        for k in 0..K {
            sum[k] += s[k];
            sum_sq[k] += q[k];
        }
    }
    let n = samples as f64;
    let mean = sum.map(|s| s / n);
    let std_error = std::array::from_fn(|k| {
        if samples < 2 {
            return 0.0;
        }
        let var = ((sum_sq[k] - n * mean[k] * mean[k]) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    });
    Moments {
        mean,
        std_error,
        samples,
    }
}

/// Seed used for a player's Haar draws. Player 0 uses `seed` itself; the
/// other player's key is offset so equal seeds still give independent draws.
pub fn player_seed(seed: u64, player: usize) -> u64 {
    if player == 0 {
        seed
    } else {
        seed ^ 0x9E37_79B9_7F4A_7C15
    }
}

/// `haar_su2(seed, i)` for `i` in `0..samples`, in index order.
pub fn haar_samples(seed: u64, samples: u64) -> Vec<Unitary2> {
    (0..samples).into_par_iter().map(|i| haar_su2(seed, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_error_of_known_sequence() {
        // 0, 1, 0, 1, ...: mean 1/2, sample variance n / (4 (n - 1)).
        let m = estimate(10_000, |i| [(i % 2) as f64]);
        assert!((m.mean[0] - 0.5).abs() < 1e-15);
        let expected = (10_000.0 / (4.0 * 9_999.0) / 10_000.0f64).sqrt();
        assert!((m.std_error[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn independent_of_thread_count() {
        let f = |i: u64| [((i as f64) * 0.37).sin(), (i as f64).sqrt()];
        let a = estimate(50_000, f);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| estimate(50_000, f));
        assert_eq!(a, b);
    }
}
