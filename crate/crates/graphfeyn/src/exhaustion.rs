//! Exhaustion study: Dirichlet evolutions on growing balls converge strongly
//! to the evolution on the largest ball. Finitely supported initial data is
//! evolved on each ball restriction, zero-extended back to the ambient graph,
//! and compared in the `l^2(m)` norm against the reference evolution.

use num_complex::Complex64;
use thiserror::Error;

use crate::exact::{
    assemble_operator, semigroup_kernel_exact, unitary_kernel_exact, ExactError,
};
use crate::graph::{
    ball_exhaustion, ElectricPotential, GraphError, MagneticPotential, VertexSet,
    WeightedGraph,
};
use crate::mc::KernelMode;

#[derive(Debug, Error)]
pub enum ExhaustionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("exhaustion needs at least two radii, got {0}")]
    TooFewRadii(usize),
    #[error("radii must be strictly increasing")]
    RadiiNotIncreasing,
    #[error("initial data must be supported inside the smallest ball")]
    SupportOutsideSmallestBall,
}

/// Zero-extension of a function on `w` (given in subset ordering) to the
/// ambient graph. Adjoint to [`project`] and an `l^2(m)` isometry because
/// the measure restricts.
pub fn embed(g: &WeightedGraph, w: &VertexSet, f: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); g.len()];
    for (i, &x) in w.members().iter().enumerate() {
        out[x] = f[i];
    }
    out
}

/// Restriction of an ambient function to `w`, in subset ordering.
pub fn project(w: &VertexSet, f: &[Complex64]) -> Vec<Complex64> {
    w.members().iter().map(|&x| f[x]).collect()
}

fn l2_norm(g: &WeightedGraph, f: &[Complex64]) -> f64 {
    f.iter()
        .zip(0..g.len())
        .map(|(z, x)| z.norm_sqr() * g.measure(x))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone)]
pub struct ExhaustionReport {
    pub radii: Vec<usize>,
    pub ball_sizes: Vec<usize>,
    /// `l^2(m)` distance between each ball evolution (zero-extended) and the
    /// evolution on the largest ball
    pub deviations: Vec<f64>,
    /// zero-extended reference evolution on the largest ball
    pub reference: Vec<Complex64>,
}

/// Evolve `f` (ambient coordinates, supported in the smallest ball) under the
/// Dirichlet evolution on each ball `B_r(center)` and measure the deviation
/// from the largest ball. The last radius serves as reference, so its
/// deviation is exactly zero and is not reported.
#[allow(clippy::too_many_arguments)]
pub fn exhaustion_study(
    g: &WeightedGraph,
    theta: &MagneticPotential,
    v: &ElectricPotential,
    center: usize,
    radii: &[usize],
    f: &[Complex64],
    t: f64,
    mode: KernelMode,
) -> Result<ExhaustionReport, ExhaustionError> {
    if radii.len() < 2 {
        return Err(ExhaustionError::TooFewRadii(radii.len()));
    }
    if radii.windows(2).any(|p| p[1] <= p[0]) {
        return Err(ExhaustionError::RadiiNotIncreasing);
    }
    let balls = ball_exhaustion(g, center, radii)?;
    let smallest = &balls[0];
    for x in 0..g.len() {
        if f[x] != Complex64::default() && !smallest.contains(x) {
            return Err(ExhaustionError::SupportOutsideSmallestBall);
        }
    }

    let mut evolved = Vec::with_capacity(balls.len());
    let mut ball_sizes = Vec::with_capacity(balls.len());
    for ball in &balls {
        ball_sizes.push(ball.len());
        let op = assemble_operator(g, theta, v, ball)?;
        let kern = match mode {
            KernelMode::Unitary => unitary_kernel_exact(&op, t)?,
            KernelMode::Semigroup => semigroup_kernel_exact(&op, t)?,
        };
        let local = kern.apply(&project(ball, f));
        evolved.push(embed(g, ball, &local));
    }

    let reference = evolved.pop().expect("at least two balls");
    let deviations = evolved
        .iter()
        .map(|u| {
            let diff: Vec<Complex64> = u
                .iter()
                .zip(&reference)
                .map(|(a, b)| a - b)
                .collect();
            l2_norm(g, &diff)
        })
        .collect();

    Ok(ExhaustionReport {
        radii: radii[..radii.len() - 1].to_vec(),
        ball_sizes,
        deviations,
        reference,
    })
}
