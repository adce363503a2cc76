//! Minimal jump process on a weighted graph.
//!
//! The free Dirichlet form induces the continuous-time chain that holds at
//! `x` for an `Exp(deg(x))` time and then jumps to a neighbor `y` with
//! probability `b(x,y) / sum_z b(x,z)`. Isolated vertices hold forever.
//! Paths reaching the jump cap before the horizon are flagged `exploded` and
//! contribute zero to every estimator, mirroring the indicator
//! `1{N_t < infinity}`.

use num_complex::Complex64;
use rand::Rng;

use crate::estimate::{run_mc, MCEstimate};
use crate::graph::{VertexSet, WeightedGraph};

/// One realization of the jump process up to a horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpPath {
    pub start: usize,
    /// (jump time, target); times strictly increasing and <= horizon
    pub jumps: Vec<(f64, usize)>,
    pub horizon: f64,
    pub exploded: bool,
}

impl JumpPath {
    pub fn n_jumps(&self) -> usize {
        self.jumps.len()
    }

    pub fn final_vertex(&self) -> usize {
        self.jumps.last().map_or(self.start, |&(_, y)| y)
    }

    /// First exit time from `W`: `Some(0.0)` if the start is already outside,
    /// `None` if the path never leaves `W` before the horizon.
    pub fn exit_time(&self, w: &VertexSet) -> Option<f64> {
        if !w.contains(self.start) {
            return Some(0.0);
        }
        self.jumps
            .iter()
            .find(|&&(_, y)| !w.contains(y))
            .map(|&(s, _)| s)
    }

    /// Path invariants from the sampling law: strictly increasing jump times
    /// within the horizon, and every jump along an edge.
    pub fn assert_invariants(&self, g: &WeightedGraph) {
        let mut prev_t = 0.0;
        let mut prev_x = self.start;
        for &(s, y) in &self.jumps {
            assert!(s > prev_t, "jump times must be strictly increasing");
            assert!(s <= self.horizon, "jump beyond horizon");
            assert!(g.b(prev_x, y) > 0.0, "jump to a non-neighbor");
            prev_t = s;
            prev_x = y;
        }
    }
}

/// Sampler parameters: explosion cap, RNG seed, and the chunk size that fixes
/// the reproducible parallel decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub max_jumps: usize,
    pub seed: u64,
    pub chunk_size: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            max_jumps: 10_000,
            seed: 0,
            chunk_size: 1024,
        }
    }
}

/// Draw one path started at `x` up to the horizon `t`.
pub fn sample_path(
    g: &WeightedGraph,
    x: usize,
    t: f64,
    cfg: &SamplerConfig,
    rng: &mut impl Rng,
) -> JumpPath {
    let mut path = JumpPath {
        start: x,
        jumps: Vec::new(),
        horizon: t,
        exploded: false,
    };
    let mut current = x;
    let mut now = 0.0;
    loop {
        let rate = g.degree(current);
        if rate == 0.0 {
            break;
        }
        // Exp(rate) holding time by inversion; 1 - u avoids ln(0)
        let u: f64 = rng.gen();
        now += -(1.0 - u).ln() / rate;
        if now > t {
            break;
        }
        if path.jumps.len() >= cfg.max_jumps {
            path.exploded = true;
            break;
        }
        let pick: f64 = rng.gen::<f64>() * g.weight_sum(current);
        let mut acc = 0.0;
        let mut target = g.neighbors(current).last().expect("deg > 0").0;
        for &(y, b) in g.neighbors(current) {
            acc += b;
            if pick < acc {
                target = y;
                break;
            }
        }
        path.jumps.push((now, target));
        current = target;
    }
    if cfg!(debug_assertions) {
        path.assert_invariants(g);
    }
    path
}

fn real_estimate(value: f64, exploded: bool) -> (Complex64, bool) {
    (Complex64::new(value, 0.0), exploded)
}

/// Fraction of paths with no jump before `t`; converges to
/// `exp(-t deg(x))`.
pub fn estimate_no_jump_prob(
    g: &WeightedGraph,
    x: usize,
    t: f64,
    n: u64,
    cfg: &SamplerConfig,
) -> MCEstimate {
    run_mc(n, cfg, |rng| {
        let path = sample_path(g, x, t, cfg, rng);
        if path.exploded {
            return real_estimate(0.0, true);
        }
        real_estimate(if path.n_jumps() == 0 { 1.0 } else { 0.0 }, false)
    })
}

/// Fraction of paths with exactly one jump landing at `y`, divided by the
/// (small) horizon; converges to `b(x,y)/m(x)` as `t -> 0`.
pub fn estimate_first_jump_rate(
    g: &WeightedGraph,
    x: usize,
    y: usize,
    t_small: f64,
    n: u64,
    cfg: &SamplerConfig,
) -> MCEstimate {
    run_mc(n, cfg, |rng| {
        let path = sample_path(g, x, t_small, cfg, rng);
        if path.exploded {
            return real_estimate(0.0, true);
        }
        let hit = path.n_jumps() == 1 && path.final_vertex() == y;
        real_estimate(if hit { 1.0 / t_small } else { 0.0 }, false)
    })
}

/// Sample mean of `1{2 <= N_t < infinity} f(X_t) / t`; vanishes as `t -> 0`.
pub fn estimate_two_jump_remainder(
    g: &WeightedGraph,
    f: &[f64],
    x: usize,
    t_small: f64,
    n: u64,
    cfg: &SamplerConfig,
) -> MCEstimate {
    run_mc(n, cfg, |rng| {
        let path = sample_path(g, x, t_small, cfg, rng);
        if path.exploded {
            return real_estimate(0.0, true);
        }
        if path.n_jumps() >= 2 {
            real_estimate(f[path.final_vertex()] / t_small, false)
        } else {
            real_estimate(0.0, false)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimate::chunk_rng;
    use crate::graph::{build_standard, StandardGraph, WeightedGraph};

    fn cfg(seed: u64) -> SamplerConfig {
        SamplerConfig {
            seed,
            ..SamplerConfig::default()
        }
    }

    #[test]
    fn isolated_vertex_never_jumps() {
        let g = WeightedGraph::new(vec!["x".into()], vec![1.0], &[]).unwrap();
        let mut rng = chunk_rng(1, 0);
        let path = sample_path(&g, 0, 10.0, &cfg(1), &mut rng);
        assert_eq!(path.n_jumps(), 0);
        assert!(!path.exploded);
    }

    #[test]
    fn k2_first_jump_hits_the_single_neighbor() {
        let (g, _, _) = build_standard(StandardGraph::Path(2)).unwrap();
        let mut rng = chunk_rng(2, 0);
        for _ in 0..200 {
            let path = sample_path(&g, 0, 3.0, &cfg(2), &mut rng);
            if let Some(&(_, y)) = path.jumps.first() {
                assert_eq!(y, 1);
            }
        }
    }

    #[test]
    fn star_jump_law_is_weight_proportional() {
        let g = WeightedGraph::new(
            vec!["x".into(), "y1".into(), "y2".into()],
            vec![1.0; 3],
            &[(0, 1, 1.0), (0, 2, 3.0)],
        )
        .unwrap();
        let c = cfg(3);
        let mut rng = chunk_rng(3, 0);
        let mut hits = [0u64; 2];
        let mut total = 0u64;
        for _ in 0..40_000 {
            let path = sample_path(&g, 0, 0.05, &c, &mut rng);
            if let Some(&(_, y)) = path.jumps.first() {
                hits[y - 1] += 1;
                total += 1;
            }
        }
        let frac = hits[1] as f64 / total as f64;
        assert!((frac - 0.75).abs() < 0.02, "got {frac}");
    }

    #[test]
    fn exit_time_cases() {
        let (g, _, _) = build_standard(StandardGraph::Path(2)).unwrap();
        let w_a = VertexSet::from_members(&g, [0]).unwrap();
        let outside = JumpPath {
            start: 1,
            jumps: vec![],
            horizon: 1.0,
            exploded: false,
        };
        assert_eq!(outside.exit_time(&w_a), Some(0.0));
        let stays = JumpPath {
            start: 0,
            jumps: vec![],
            horizon: 1.0,
            exploded: false,
        };
        assert_eq!(stays.exit_time(&w_a), None);
        let leaves = JumpPath {
            start: 0,
            jumps: vec![(0.4, 1)],
            horizon: 1.0,
            exploded: false,
        };
        assert_eq!(leaves.exit_time(&w_a), Some(0.4));
    }

    #[test]
    fn determinism_same_seed_same_path() {
        let (g, _, _) = build_standard(StandardGraph::Cycle(5)).unwrap();
        let c = cfg(42);
        let mut r1 = chunk_rng(42, 7);
        let mut r2 = chunk_rng(42, 7);
        let p1 = sample_path(&g, 2, 2.0, &c, &mut r1);
        let p2 = sample_path(&g, 2, 2.0, &c, &mut r2);
        assert_eq!(p1, p2);
    }

    #[test]
    fn no_jump_probability_matches_exponential() {
        let (g, _, _) = build_standard(StandardGraph::Path(2)).unwrap();
        let est = estimate_no_jump_prob(&g, 0, 1.0, 100_000, &cfg(5));
        let want = (-1.0f64).exp();
        assert!(
            (est.mean.re - want).abs() <= 4.0 * est.stderr_re,
            "{} vs {want}",
            est.mean.re
        );
        // deg = 2, t = 0.5 gives the same exponent
        let (c5, _, _) = build_standard(StandardGraph::Cycle(5)).unwrap();
        let est2 = estimate_no_jump_prob(&c5, 0, 0.5, 100_000, &cfg(6));
        assert!((est2.mean.re - want).abs() <= 4.0 * est2.stderr_re);
    }

    #[test]
    fn no_jump_probability_isolated_is_one() {
        let g = WeightedGraph::new(vec!["x".into()], vec![1.0], &[]).unwrap();
        let est = estimate_no_jump_prob(&g, 0, 2.0, 100, &cfg(7));
        assert_eq!(est.mean.re, 1.0);
        assert_eq!(est.stderr_re, 0.0);
    }

    #[test]
    fn first_jump_rate_k2() {
        let (g, _, _) = build_standard(StandardGraph::Path(2)).unwrap();
        let est = estimate_first_jump_rate(&g, 0, 1, 0.01, 200_000, &cfg(8));
        assert!(
            (est.mean.re - 1.0).abs() <= 4.0 * est.stderr_re + 0.02,
            "{}",
            est.mean.re
        );
    }

    #[test]
    fn first_jump_rate_non_neighbor_is_second_order() {
        let (g, _, _) = build_standard(StandardGraph::Path(3)).unwrap();
        // vertex 2 is not a neighbor of 0; only multi-jump paths could land
        // there with exactly one jump, i.e. never, plus O(t) two-jump noise
        let est = estimate_first_jump_rate(&g, 0, 2, 0.01, 200_000, &cfg(9));
        assert!(est.mean.re <= 0.05);
    }

    #[test]
    fn first_jump_rate_isolated_is_zero() {
        let g = WeightedGraph::new(vec!["x".into()], vec![1.0], &[]).unwrap();
        let est = estimate_first_jump_rate(&g, 0, 0, 0.01, 100, &cfg(10));
        assert_eq!(est.mean.re, 0.0);
    }

    #[test]
    fn two_jump_remainder_vanishes_linearly() {
        let (g, _, _) = build_standard(StandardGraph::Path(2)).unwrap();
        let f = vec![1.0, 1.0];
        let big = estimate_two_jump_remainder(&g, &f, 0, 0.1, 1_000_000, &cfg(11));
        let small = estimate_two_jump_remainder(&g, &f, 0, 0.01, 1_000_000, &cfg(12));
        let slack = 4.0 * (big.stderr_re + 5.0 * small.stderr_re);
        assert!(
            big.mean.re - 5.0 * small.mean.re >= -slack,
            "{} vs {}",
            big.mean.re,
            small.mean.re
        );
    }

    #[test]
    fn two_jump_remainder_zero_function() {
        let (g, _, _) = build_standard(StandardGraph::Path(2)).unwrap();
        let est = estimate_two_jump_remainder(&g, &[0.0, 0.0], 0, 0.1, 1000, &cfg(13));
        assert_eq!(est.mean.re, 0.0);
    }

    #[test]
    fn holding_time_mean_matches_rate() {
        let (g, _, _) = build_standard(StandardGraph::Cycle(5)).unwrap();
        let c = cfg(14);
        let mut rng = chunk_rng(14, 0);
        let mut total = 0.0;
        let mut count = 0u64;
        for _ in 0..50_000 {
            let path = sample_path(&g, 0, 10.0, &c, &mut rng);
            if let Some(&(s, _)) = path.jumps.first() {
                total += s;
                count += 1;
            }
        }
        let mean = total / count as f64;
        let want = 1.0 / g.degree(0);
        let stderr = want / (count as f64).sqrt();
        assert!((mean - want).abs() <= 4.0 * stderr, "{mean} vs {want}");
    }

    #[test]
    fn explosion_cap_flags_path() {
        let (g, _, _) = build_standard(StandardGraph::Cycle(5)).unwrap();
        let tight = SamplerConfig {
            max_jumps: 1,
            seed: 15,
            chunk_size: 64,
        };
        let mut rng = chunk_rng(15, 0);
        let mut saw_explosion = false;
        for _ in 0..200 {
            let path = sample_path(&g, 0, 5.0, &tight, &mut rng);
            if path.exploded {
                saw_explosion = true;
                assert!(path.n_jumps() <= 1);
            }
        }
        assert!(saw_explosion);
    }
}
