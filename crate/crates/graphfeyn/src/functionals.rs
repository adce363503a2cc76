//! Path functionals: stochastic line integral, Riemann integral, the action
//! and the Feynman weight `i^{N_t} exp(A_t)` with
//! `A_t = i∫theta(dX) - i∫(v + deg) ds + ∫deg ds`.

use num_complex::Complex64;

use crate::graph::{ElectricPotential, MagneticPotential, WeightedGraph};
use crate::sampler::JumpPath;

/// Feynman integrand of one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathWeight {
    pub n_jumps: usize,
    pub action: Complex64,
    /// `i^{n_jumps} * exp(action)`
    pub weight: Complex64,
}

/// Sum of `theta` over the traversed edges. Zero on jump-free paths, and zero
/// outright if any traversed pair is not an edge (degenerate-case convention;
/// cannot happen for sampler-produced paths).
pub fn line_integral(path: &JumpPath, g: &WeightedGraph, theta: &MagneticPotential) -> f64 {
    debug_assert!(!path.exploded, "line integral of an exploded path");
    let mut sum = 0.0;
    let mut prev = path.start;
    for &(_, y) in &path.jumps {
        if g.b(prev, y) == 0.0 {
            return 0.0;
        }
        sum += theta.get(prev, y);
        prev = y;
    }
    sum
}

/// `∫_0^t f(X_s) ds` over the holding intervals, the last one truncated at
/// the horizon.
pub fn riemann_integral(path: &JumpPath, f: impl Fn(usize) -> f64) -> f64 {
    debug_assert!(!path.exploded, "Riemann integral of an exploded path");
    let mut sum = 0.0;
    let mut prev_t = 0.0;
    let mut prev_x = path.start;
    for &(s, y) in &path.jumps {
        sum += f(prev_x) * (s - prev_t);
        prev_t = s;
        prev_x = y;
    }
    sum + f(prev_x) * (path.horizon - prev_t)
}

/// The action `A_t(v, theta | X)`.
pub fn action(
    path: &JumpPath,
    g: &WeightedGraph,
    theta: &MagneticPotential,
    v: &ElectricPotential,
) -> Complex64 {
    let line = line_integral(path, g, theta);
    let v_plus_deg = riemann_integral(path, |x| v.get(x) + g.degree(x));
    let deg = riemann_integral(path, |x| g.degree(x));
    Complex64::new(deg, line - v_plus_deg)
}

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

/// The full integrand `i^{N_t} exp(A_t)`. Callers must filter exploded paths
/// first; they contribute zero by the `1{N_t < infinity}` indicator.
pub fn feynman_weight(
    path: &JumpPath,
    g: &WeightedGraph,
    theta: &MagneticPotential,
    v: &ElectricPotential,
) -> PathWeight {
    assert!(!path.exploded, "feynman_weight on an exploded path");
    let a = action(path, g, theta, v);
    let n = path.n_jumps();
    PathWeight {
        n_jumps: n,
        action: a,
        weight: I_POWERS[n % 4] * a.exp(),
    }
}
