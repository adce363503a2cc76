//! Monte Carlo estimate type and the deterministic chunked runner.
//!
//! Samples are drawn in chunks; chunk `i` uses an RNG stream derived only
//! from `(seed, i)`, and partial sums are reduced in chunk order, so results
//! are bit-identical for any worker count. Exploded paths contribute zero to
//! the sums but stay in the sample count.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::sampler::SamplerConfig;

/// Complex Monte Carlo mean with componentwise standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub mean: Complex64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    pub n_samples: u64,
    pub n_exploded: u64,
}

impl MCEstimate {
    /// Deterministic value known exactly (e.g. at `t = 0`).
    pub fn exact(value: Complex64, n_samples: u64) -> Self {
        MCEstimate {
            mean: value,
            stderr_re: 0.0,
            stderr_im: 0.0,
            n_samples,
            n_exploded: 0,
        }
    }

    pub fn conj(self) -> Self {
        MCEstimate {
            mean: self.mean.conj(),
            ..self
        }
    }

    /// Conservative combined standard error used by the acceptance harness.
    pub fn stderr_sum(&self) -> f64 {
        self.stderr_re + self.stderr_im
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Accumulator {
    sum_re: f64,
    sum_im: f64,
    sq_re: f64,
    sq_im: f64,
    n: u64,
    n_exploded: u64,
}

impl Accumulator {
    pub(crate) fn push(&mut self, value: Complex64, exploded: bool) {
        self.sum_re += value.re;
        self.sum_im += value.im;
        self.sq_re += value.re * value.re;
        self.sq_im += value.im * value.im;
        self.n += 1;
        if exploded {
            self.n_exploded += 1;
        }
    }

    fn merge(&mut self, other: &Accumulator) {
        self.sum_re += other.sum_re;
        self.sum_im += other.sum_im;
        self.sq_re += other.sq_re;
        self.sq_im += other.sq_im;
        self.n += other.n;
        self.n_exploded += other.n_exploded;
    }

    fn finalize(&self) -> MCEstimate {
        let n = self.n as f64;
        let mean = Complex64::new(self.sum_re / n, self.sum_im / n);
        let stderr = |sq: f64, mu: f64| {
            if self.n < 2 {
                return 0.0;
            }
            let var = ((sq - n * mu * mu) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        };
        MCEstimate {
            mean,
            stderr_re: stderr(self.sq_re, mean.re),
            stderr_im: stderr(self.sq_im, mean.im),
            n_samples: self.n,
            n_exploded: self.n_exploded,
        }
    }
}

/// RNG for one sampling chunk: one base seed, one counter stream per chunk.
/// Chunked streams make the parallel estimates independent of scheduling.
pub fn chunk_rng(seed: u64, chunk_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk_index);
    rng
}

/// Run `n` independent samples; each call to `sample` returns
/// `(contribution, exploded)`.
pub(crate) fn run_mc<F>(n: u64, cfg: &SamplerConfig, sample: F) -> MCEstimate
where
    F: Fn(&mut ChaCha8Rng) -> (Complex64, bool) + Sync,
{
    let chunk = cfg.chunk_size.max(1) as u64;
    let n_chunks = n.div_ceil(chunk);
    let partials: Vec<Accumulator> = (0..n_chunks)
        .into_par_iter()
        .map(|i| {
            let mut rng = chunk_rng(cfg.seed, i);
            let count = chunk.min(n - i * chunk);
            let mut acc = Accumulator::default();
            for _ in 0..count {
                let (value, exploded) = sample(&mut rng);
                acc.push(value, exploded);
            }
            acc
        })
        .collect();
    let mut total = Accumulator::default();
    for p in &partials {
        total.merge(p);
    }
    total.finalize()
}

/// Vector-valued variant: each sample lands its contribution on one
/// component (or none). Componentwise accumulation adds nothing to the other
/// components, which matches adding an exact zero, so every component is
/// bit-identical to what the scalar runner would produce for it.
pub(crate) fn run_mc_vector<F>(
    n: u64,
    dim: usize,
    cfg: &SamplerConfig,
    sample: F,
) -> Vec<MCEstimate>
where
    F: Fn(&mut ChaCha8Rng) -> (Option<(usize, Complex64)>, bool) + Sync,
{
    let chunk = cfg.chunk_size.max(1) as u64;
    let n_chunks = n.div_ceil(chunk);
    let partials: Vec<Vec<Accumulator>> = (0..n_chunks)
        .into_par_iter()
        .map(|i| {
            let mut rng = chunk_rng(cfg.seed, i);
            let count = chunk.min(n - i * chunk);
            let mut accs = vec![Accumulator::default(); dim];
            for _ in 0..count {
                let (hit, exploded) = sample(&mut rng);
                for (j, acc) in accs.iter_mut().enumerate() {
                    let value = match hit {
                        Some((k, v)) if k == j => v,
                        _ => Complex64::default(),
                    };
                    acc.push(value, exploded);
                }
            }
            accs
        })
        .collect();
    let mut totals = vec![Accumulator::default(); dim];
    for p in &partials {
        for (t, a) in totals.iter_mut().zip(p) {
            t.merge(a);
        }
    }
    totals.iter().map(Accumulator::finalize).collect()
}
