//! Monte Carlo realizations of the path integral formulas: the unitary group
//! kernel, its Dirichlet restriction, the semigroup kernel, the domination
//! margin, and the scattering composition. The exact kernels of
//! [`crate::exact`] are the accuracy oracle for all of these.

use num_complex::Complex64;
use thiserror::Error;

use crate::estimate::{run_mc, run_mc_vector, MCEstimate};
use crate::exact::{
    assemble_operator, semigroup_kernel_exact, unitary_kernel_exact, ExactError,
};
use crate::functionals::{feynman_weight, line_integral, riemann_integral};
use crate::graph::{
    ElectricPotential, GraphError, MagneticPotential, VertexSet, WeightedGraph,
};
use crate::sampler::{sample_path, SamplerConfig};

#[derive(Debug, Error)]
pub enum McError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("vertex `{0}` is outside the Dirichlet subset")]
    OutsideSubset(String),
    #[error("semigroup estimator requires t >= 0, got {0}")]
    NegativeTime(f64),
}

fn check_vertex(g: &WeightedGraph, x: usize) -> Result<(), McError> {
    if x >= g.len() {
        Err(GraphError::IndexOutOfRange(x).into())
    } else {
        Ok(())
    }
}

fn delta_kernel(g: &WeightedGraph, x: usize, y: usize, n: u64) -> MCEstimate {
    let value = if x == y { 1.0 / g.measure(y) } else { 0.0 };
    MCEstimate::exact(Complex64::new(value, 0.0), n)
}

/// Shared core: unitary-group kernel with an optional Dirichlet indicator.
/// With `w = None` (or `W = X`) the indicator is identically one, so the
/// Dirichlet estimate on the full set is bit-identical to the free one.
#[allow(clippy::too_many_arguments)]
fn unitary_kernel_core(
    g: &WeightedGraph,
    theta: &MagneticPotential,
    v: &ElectricPotential,
    w: Option<&VertexSet>,
    x: usize,
    y: usize,
    t: f64,
    n: u64,
    cfg: &SamplerConfig,
) -> MCEstimate {
    let inv_my = 1.0 / g.measure(y);
    run_mc(n, cfg, |rng| {
        let path = sample_path(g, x, t, cfg, rng);
        if path.exploded {
            return (Complex64::default(), true);
        }
        if path.final_vertex() != y {
            return (Complex64::default(), false);
        }
        if let Some(w) = w {
            if path.exit_time(w).is_some() {
                return (Complex64::default(), false);
            }
        }
        let pw = feynman_weight(&path, g, theta, v);
        (pw.weight * inv_my, false)
    })
}

/// Path-integral estimate of `exp(-itL_{v,theta})(x, y)`. Negative `t` is
/// handled by the adjoint identity: estimate from `y` to `x` at `|t|` (the
/// `1/m(x)` weighting comes with the swapped roles) and conjugate.
#[allow(clippy::too_many_arguments)]
pub fn mc_unitary_kernel(
    g: &WeightedGraph,
    theta: &MagneticPotential,
    v: &ElectricPotential,
    x: usize,
    y: usize,
    t: f64,
    n: u64,
    cfg: &SamplerConfig,
) -> Result<MCEstimate, McError> {
    check_vertex(g, x)?;
    check_vertex(g, y)?;
    if t == 0.0 {
        return Ok(delta_kernel(g, x, y, n));
    }
    if t < 0.0 {
        return Ok(mc_unitary_kernel(g, theta, v, y, x, -t, n, cfg)?.conj());
    }
    Ok(unitary_kernel_core(g, theta, v, None, x, y, t, n, cfg))
}

/// Estimate of `exp(-itL_{v,theta}) f(x)` for finitely supported `f`.
#[allow(clippy::too_many_arguments)]
pub fn mc_unitary_apply(
    g: &WeightedGraph,
    theta: &MagneticPotential,
    v: &ElectricPotential,
    f: &[Complex64],
    x: usize,
    t: f64,
    n: u64,
    cfg: &SamplerConfig,
) -> Result<MCEstimate, McError> {
    check_vertex(g, x)?;
    if t == 0.0 {
        return Ok(MCEstimate::exact(f[x], n));
    }
    if t < 0.0 {
        // exp(itL) f = sum_y exp(itL)(x,y) f(y) m(y); reuse the kernel route
        let mut acc = MCEstimate::exact(Complex64::default(), n);
        for y in 0..g.len() {
            if f[y] == Complex64::default() {
                continue;
            }
            let k = mc_unitary_kernel(g, theta, v, x, y, t, n, cfg)?;
            acc.mean += k.mean * f[y] * g.measure(y);
            acc.stderr_re += k.stderr_re * (f[y] * g.measure(y)).norm();
            acc.stderr_im += k.stderr_im * (f[y] * g.measure(y)).norm();
            acc.n_exploded = acc.n_exploded.max(k.n_exploded);
        }
        return Ok(acc);
    }
    Ok(run_mc(n, cfg, |rng| {
        let path = sample_path(g, x, t, cfg, rng);
        if path.exploded {
            return (Complex64::default(), true);
        }
        let fy = f[path.final_vertex()];
        if fy == Complex64::default() {
            return (Complex64::default(), false);
        }
        let pw = feynman_weight(&path, g, theta, v);
        (pw.weight * fy, false)
    }))
}

/// Dirichlet-restricted kernel `exp(-itL^(W)_{v,theta})(x, y)`: the free
/// estimator with the extra indicator `1{t < tau_W}`. The action still uses
/// the ambient degree.
#[allow(clippy::too_many_arguments)]
pub fn mc_dirichlet_kernel(
    g: &WeightedGraph,
    theta: &MagneticPotential,
    v: &ElectricPotential,
    w: &VertexSet,
    x: usize,
    y: usize,
    t: f64,
    n: u64,
    cfg: &SamplerConfig,
) -> Result<MCEstimate, McError> {
    check_vertex(g, x)?;
    check_vertex(g, y)?;
    if !w.contains(x) {
        return Err(McError::OutsideSubset(g.id(x).to_string()));
    }
    if !w.contains(y) {
        return Err(McError::OutsideSubset(g.id(y).to_string()));
    }
    if t == 0.0 {
        return Ok(delta_kernel(g, x, y, n));
    }
    Ok(unitary_kernel_core(g, theta, v, Some(w), x, y, t, n, cfg))
}

/// Feynman-Kac-Ito estimate of the semigroup kernel
/// `exp(-tL_{v,theta})(x, y)` with integrand
/// `exp(i ∫theta(dX) - ∫v ds)`.
#[allow(clippy::too_many_arguments)]
pub fn mc_semigroup_kernel(
    g: &WeightedGraph,
    theta: &MagneticPotential,
    v: &ElectricPotential,
    x: usize,
    y: usize,
    t: f64,
    n: u64,
    cfg: &SamplerConfig,
) -> Result<MCEstimate, McError> {
    check_vertex(g, x)?;
    check_vertex(g, y)?;
    if t < 0.0 {
        return Err(McError::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(delta_kernel(g, x, y, n));
    }
    let inv_my = 1.0 / g.measure(y);
    Ok(run_mc(n, cfg, |rng| {
        let path = sample_path(g, x, t, cfg, rng);
        if path.exploded {
            return (Complex64::default(), true);
        }
        if path.final_vertex() != y {
            return (Complex64::default(), false);
        }
        let line = line_integral(&path, g, theta);
        let v_int = riemann_integral(&path, |z| v.get(z));
        let weight = Complex64::new(-v_int, line).exp();
        (weight * inv_my, false)
    }))
}

/// Kernel evolution mode shared by the CLI and the row estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMode {
    Unitary,
    Semigroup,
}

/// One pass over paths from `x` estimating the whole kernel row
/// `K(x, y)` for every `y`. Componentwise bit-identical to the per-pair
/// estimators under the same seed.
#[allow(clippy::too_many_arguments)]
pub fn mc_kernel_row(
    g: &WeightedGraph,
    theta: &MagneticPotential,
    v: &ElectricPotential,
    mode: KernelMode,
    x: usize,
    t: f64,
    n: u64,
    cfg: &SamplerConfig,
) -> Result<Vec<MCEstimate>, McError> {
    check_vertex(g, x)?;
    if t < 0.0 {
        return Err(McError::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok((0..g.len()).map(|y| delta_kernel(g, x, y, n)).collect());
    }
    Ok(run_mc_vector(n, g.len(), cfg, |rng| {
        let path = sample_path(g, x, t, cfg, rng);
        if path.exploded {
            return (None, true);
        }
        let y = path.final_vertex();
        let weight = match mode {
            KernelMode::Unitary => feynman_weight(&path, g, theta, v).weight,
            KernelMode::Semigroup => {
                let line = line_integral(&path, g, theta);
                let v_int = riemann_integral(&path, |z| v.get(z));
                Complex64::new(-v_int, line).exp()
            }
        };
        (Some((y, weight / g.measure(y))), false)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KatoSimonMode {
    Exact,
    Mc,
}

/// Result of one domination check: `margin = comparison - magnitude` with
/// `comparison = exp(-tL_{-deg,0})(x,y)` and
/// `magnitude = |exp(-itL_{v,theta})(x,y)|`.
#[derive(Debug, Clone, Copy)]
pub struct KatoSimonResult {
    pub comparison: f64,
    pub magnitude: f64,
    pub margin: f64,
    /// combined standard error of the two estimates (zero in exact mode)
    pub stderr: f64,
}

/// Kato-Simon domination margin; nonnegative up to tolerance in exact mode.
#[allow(clippy::too_many_arguments)]
pub fn kato_simon_margin(
    g: &WeightedGraph,
    theta: &MagneticPotential,
    v: &ElectricPotential,
    x: usize,
    y: usize,
    t: f64,
    mode: KatoSimonMode,
    n: u64,
    cfg: &SamplerConfig,
) -> Result<KatoSimonResult, McError> {
    check_vertex(g, x)?;
    check_vertex(g, y)?;
    let v_neg = ElectricPotential::neg_degree(g);
    let theta_zero = MagneticPotential::zero();
    match mode {
        KatoSimonMode::Exact => {
            let full = VertexSet::full(g);
            let op = assemble_operator(g, theta, v, &full)?;
            let magnitude = unitary_kernel_exact(&op, t)?.value(x, y).norm();
            let opc = assemble_operator(g, &theta_zero, &v_neg, &full)?;
            let comparison = semigroup_kernel_exact(&opc, t)?.value(x, y).re;
            Ok(KatoSimonResult {
                comparison,
                magnitude,
                margin: comparison - magnitude,
                stderr: 0.0,
            })
        }
        KatoSimonMode::Mc => {
            let unit = mc_unitary_kernel(g, theta, v, x, y, t, n, cfg)?;
            let semi = mc_semigroup_kernel(g, &theta_zero, &v_neg, x, y, t, n, cfg)?;
            let magnitude = unit.mean.norm();
            let comparison = semi.mean.re;
            Ok(KatoSimonResult {
                comparison,
                magnitude,
                margin: comparison - magnitude,
                stderr: unit.stderr_sum() + semi.stderr_sum(),
            })
        }
    }
}

/// Scattering estimator for `[exp(-itL_{v,theta}) exp(itL_{v',theta'})](x,y)`
/// by independent path pairing: one path from `x`, an independent one from
/// `y`, contributing only when they meet at the horizon.
#[allow(clippy::too_many_arguments)]
pub fn mc_scattering_kernel(
    g: &WeightedGraph,
    theta: &MagneticPotential,
    v: &ElectricPotential,
    theta2: &MagneticPotential,
    v2: &ElectricPotential,
    x: usize,
    y: usize,
    t: f64,
    n: u64,
    cfg: &SamplerConfig,
) -> Result<MCEstimate, McError> {
    check_vertex(g, x)?;
    check_vertex(g, y)?;
    if t < 0.0 {
        return Err(McError::NegativeTime(t));
    }
    if t == 0.0 {
        return Ok(delta_kernel(g, x, y, n));
    }
    Ok(run_mc(n, cfg, |rng| {
        let path = sample_path(g, x, t, cfg, rng);
        let path2 = sample_path(g, y, t, cfg, rng);
        if path.exploded || path2.exploded {
            return (Complex64::default(), path.exploded || path2.exploded);
        }
        let meet = path.final_vertex();
        if path2.final_vertex() != meet {
            return (Complex64::default(), false);
        }
        let w1 = feynman_weight(&path, g, theta, v).weight;
        let w2 = feynman_weight(&path2, g, theta2, v2).weight;
        (w1 * w2.conj() / g.measure(meet), false)
    }))
}
