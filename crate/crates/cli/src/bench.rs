//! Update-time benchmark over random strings.

use std::time::{Duration, Instant};

use dynlcs_core::Letter;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::replay::Engine;
use crate::stream::{Mode, Target};

pub const CSV_HEADER: &str = "n,ops,mean_us,median_us,p99_us";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub ops: usize,
    pub mean_us: f64,
    pub median_us: f64,
    pub p99_us: f64,
}

impl BenchRow {
    pub fn csv(&self) -> String {
        format!("{},{},{:.2},{:.2},{:.2}", self.n, self.ops, self.mean_us, self.median_us, self.p99_us)
    }
}

const SIGMA: Letter = 4;

fn timed_run(mode: Mode, n: usize, ops: usize, seed: u64) -> Vec<Duration> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ n as u64);
    let word = |rng: &mut ChaCha8Rng| -> Vec<Letter> { (0..n).map(|_| rng.gen_range(0..SIGMA)).collect() };
    let (t, s) = (word(&mut rng), word(&mut rng));
    let mut engine = Engine::new(mode, &s, &t, seed).expect("non-empty strings");
    (0..ops)
        .map(|_| {
            let target = if mode == Mode::Full && rng.gen_bool(0.5) { Target::T } else { Target::S };
            let (pos, letter) = (rng.gen_range(1..=n), rng.gen_range(0..SIGMA));
            let start = Instant::now();
            engine.apply(target, pos, letter);
            start.elapsed()
        })
        .collect()
}

/// Times `ops` random substitutions on strings of length `n` over a 4-letter
/// alphabet (both strings in full mode, `S` only in partial mode). The run is
/// done twice and the second, warm run is reported.
pub fn bench(mode: Mode, n: usize, ops: usize, seed: u64) -> BenchRow {
    assert!(n > 0 && ops > 0, "bench needs a non-empty string and at least one update");
    timed_run(mode, n, ops, seed);
    let mut us: Vec<f64> = timed_run(mode, n, ops, seed).iter().map(|d| d.as_secs_f64() * 1e6).collect();
    us.sort_by(f64::total_cmp);
    let pick = |q: f64| us[((us.len() - 1) as f64 * q).round() as usize];
    BenchRow { n, ops, mean_us: us.iter().sum::<f64>() / us.len() as f64, median_us: pick(0.5), p99_us: pick(0.99) }
}
