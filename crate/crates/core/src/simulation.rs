//! Floating point oracles: Birkhoff averages of `-2 log|x|` for the entropy
//! and orbit clouds of the natural extension. Not certified.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::natext::natext_step_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Precision {
    F64,
    /// Double-double arithmetic, about 106 bits.
    DoubleDouble,
}

#[derive(Clone, Copy, Debug)]
pub struct McConfig {
    pub iterations: u64,
    pub burn_in: u64,
    pub seed: u64,
    pub precision: Precision,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { iterations: 10_000_000, burn_in: 1_000, seed: 1, precision: Precision::DoubleDouble }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub resamples: u64,
}

/// Independent streams; fixed so results do not depend on the thread count.
const CHUNKS: u64 = 16;
const BATCHES_PER_CHUNK: u64 = 8;
/// Orbit points closer to 0 than this are replaced by fresh random points.
const TINY: f64 = 1e-15;

trait Orbit {
    fn new(x: f64) -> Self;
    /// Advances one step and returns `|x|` before the step.
    fn step(&mut self, alpha: f64, alpha_dd: TwoFloat) -> f64;
}

struct F64Orbit(f64);

impl Orbit for F64Orbit {
    fn new(x: f64) -> Self {
        F64Orbit(x)
    }
    fn step(&mut self, alpha: f64, _: TwoFloat) -> f64 {
        let a = self.0.abs();
        let r = 1.0 / a;
        self.0 = r - (r + 1.0 - alpha).floor();
        a
    }
}

struct DdOrbit(TwoFloat);

impl Orbit for DdOrbit {
    fn new(x: f64) -> Self {
        DdOrbit(TwoFloat::from(x))
    }
    fn step(&mut self, _: f64, alpha: TwoFloat) -> f64 {
        let a = self.0.abs();
        let r = a.recip();
        let d = (r + 1.0 - alpha).floor();
        self.0 = r - d;
        a.hi()
    }
}

fn run_chunk<O: Orbit>(alpha: f64, alpha_dd: TwoFloat, n: u64, burn_in: u64, rng: &mut ChaCha8Rng) -> (Vec<f64>, u64) {
    let draw = |rng: &mut ChaCha8Rng| loop {
        let x = rng.gen_range(alpha - 1.0..alpha);
        if x.abs() >= TINY {
            return x;
        }
    };
    let mut orbit = O::new(draw(rng));
    let mut resamples = 0;
    let mut i = 0;
    while i < burn_in {
        if orbit.step(alpha, alpha_dd) < TINY {
            orbit = O::new(draw(rng));
            resamples += 1;
        }
        i += 1;
    }
    let per_batch = (n / BATCHES_PER_CHUNK).max(1);
    let mut means = Vec::with_capacity(BATCHES_PER_CHUNK as usize);
    for _ in 0..BATCHES_PER_CHUNK {
        let mut sum = 0.0;
        let mut count = 0u64;
        while count < per_batch {
            let a = orbit.step(alpha, alpha_dd);
            if a < TINY {
                orbit = O::new(draw(rng));
                resamples += 1;
                continue;
            }
            sum += -2.0 * a.ln();
            count += 1;
        }
        means.push(sum / count as f64);
    }
    (means, resamples)
}

/// Entropy estimate `(1/n) sum -2 log|T^i x|` with a batch-means standard
/// error. Deterministic for fixed `(seed, precision)`.
pub fn mc_entropy(alpha: f64, cfg: &McConfig) -> Result<McEstimate> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("alpha = {} not in (0,1]", alpha)));
    }
    if cfg.iterations <= cfg.burn_in {
        return Err(Error::Domain("iterations must exceed burn_in".into()));
    }
    let n = (cfg.iterations - cfg.burn_in) / CHUNKS;
    let burn = cfg.burn_in / CHUNKS + 1;
    let alpha_dd = TwoFloat::from(alpha);
    let results: Vec<(Vec<f64>, u64)> = (0..CHUNKS)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(k);
            match cfg.precision {
                Precision::F64 => run_chunk::<F64Orbit>(alpha, alpha_dd, n, burn, &mut rng),
                Precision::DoubleDouble => run_chunk::<DdOrbit>(alpha, alpha_dd, n, burn, &mut rng),
            }
        })
        .collect();
    let means: Vec<f64> = results.iter().flat_map(|(m, _)| m.iter().cloned()).collect();
    let resamples: u64 = results.iter().map(|(_, r)| r).sum();
    if resamples as f64 > 0.01 * cfg.iterations as f64 {
        return Err(Error::DegenerateOrbit(format!("{} resamples in {} iterations", resamples, cfg.iterations)));
    }
    let b = means.len() as f64;
    let mean = means.iter().sum::<f64>() / b;
    let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (b - 1.0);
    Ok(McEstimate { estimate: mean, stderr: (var / b).sqrt(), resamples })
}

/// Point cloud of the natural extension: `n_points` orbits started at
/// `(x, 0)` with random `x`, each contributing its point after `n_iter`
/// steps. Orbits that hit 0 restart.
pub fn simulate_domain(alpha: f64, n_points: usize, n_iter: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("alpha = {} not in (0,1]", alpha)));
    }
    if n_points == 0 || n_iter == 0 {
        return Err(Error::Domain("n_points and n_iter must be positive".into()));
    }
    let pts = (0..n_points as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let mut x: f64 = rng.gen_range(alpha - 1.0..alpha);
            let mut y = 0.0;
            let mut i = 0;
            while i < n_iter {
                match natext_step_f64(alpha, x, y) {
                    Some((x2, y2)) if x2.abs() >= TINY => {
                        x = x2;
                        y = y2;
                        i += 1;
                    }
                    _ => {
                        x = rng.gen_range(alpha - 1.0..alpha);
                        y = 0.0;
                        i = 0;
                    }
                }
            }
            (x, y)
        })
        .collect();
    Ok(pts)
}
