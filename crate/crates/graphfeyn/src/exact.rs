//! Exact finite-dimensional operators and kernels.
//!
//! The operator `H` on a finite vertex set `W` has `H[x][x] = deg(x) + v(x)`
//! (ambient degree, Dirichlet convention) and
//! `H[x][y] = -(b(x,y)/m(x)) e^{i theta(x,y)}` off the diagonal. `H` is
//! self-adjoint on `l2(W, m)`; the symmetrized matrix
//! `M = D^{1/2} H D^{-1/2}`, `D = diag(m)`, is Hermitian and is diagonalized
//! once per kernel evaluation. Kernels follow the action convention
//! `(Af)(x) = sum_y K(x,y) f(y) m(y)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

use crate::graph::{
    restrict, ElectricPotential, GraphError, MagneticPotential, VertexSet, WeightedGraph,
};

/// Hard cap on the dense eigendecomposition size.
pub const MAX_EXACT_VERTICES: usize = 4096;

const HERMITICITY_RTOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ExactError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("operator on {0} vertices exceeds the exact-kernel cap of {MAX_EXACT_VERTICES}")]
    TooLarge(usize),
    #[error("symmetrized operator is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("semigroup kernel requires t >= 0, got {0}")]
    NegativeTime(f64),
    #[error("kernel operands live on different vertex sets")]
    MismatchedKernels,
}

/// Dense realization of `L^(W)_{v,theta}` on a finite vertex set.
#[derive(Debug, Clone)]
pub struct FiniteOperator {
    labels: Vec<String>,
    h: DMatrix<Complex64>,
    m: Vec<f64>,
}

impl FiniteOperator {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn measures(&self) -> &[f64] {
        &self.m
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.h
    }

    pub fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        let fv = DVector::from_column_slice(f);
        (&self.h * fv).iter().copied().collect()
    }

    /// `M = D^{1/2} H D^{-1/2}` with the Hermiticity check of the contract;
    /// failure here is an internal inconsistency, not bad input.
    fn symmetrized(&self) -> Result<DMatrix<Complex64>, ExactError> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for x in 0..n {
            for y in 0..n {
                let scale = (self.m[x] / self.m[y]).sqrt();
                m[(x, y)] = self.h[(x, y)] * scale;
            }
        }
        let max_entry = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut max_dev: f64 = 0.0;
        for x in 0..n {
            for y in x..n {
                max_dev = max_dev.max((m[(x, y)] - m[(y, x)].conj()).norm());
            }
        }
        if max_dev > HERMITICITY_RTOL * max_entry.max(1.0) {
            return Err(ExactError::NotHermitian(max_dev));
        }
        // exact Hermitian symmetrization before the eigensolver
        let adj = m.adjoint();
        Ok((m + adj) * Complex64::new(0.5, 0.0))
    }
}

/// Kernel matrix `K(x, y)` of a bounded operator on `l2(W, m)`.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    labels: Vec<String>,
    k: DMatrix<Complex64>,
    m: Vec<f64>,
    t: f64,
}

impl KernelMatrix {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn measures(&self) -> &[f64] {
        &self.m
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn value(&self, x: usize, y: usize) -> Complex64 {
        self.k[(x, y)]
    }

    /// Identity kernel `K(x,y) = delta_{xy} / m(y)`.
    pub fn identity(labels: Vec<String>, m: Vec<f64>) -> Self {
        let n = m.len();
        let mut k = DMatrix::zeros(n, n);
        for x in 0..n {
            k[(x, x)] = Complex64::new(1.0 / m[x], 0.0);
        }
        KernelMatrix { labels, k, m, t: 0.0 }
    }

    /// Apply via the action convention `(Af)(x) = sum_y K(x,y) f(y) m(y)`.
    pub fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .map(|x| {
                (0..n)
                    .map(|y| self.k[(x, y)] * f[y] * self.m[y])
                    .sum::<Complex64>()
            })
            .collect()
    }
}

/// Build `L^(W)` from an ambient instance. The diagonal uses the ambient
/// degree even when `W` is a strict subset.
pub fn assemble_operator(
    g: &WeightedGraph,
    theta: &MagneticPotential,
    v: &ElectricPotential,
    w: &VertexSet,
) -> Result<FiniteOperator, ExactError> {
    let r = restrict(g, theta, v, w)?;
    let n = r.graph.len();
    if n > MAX_EXACT_VERTICES {
        return Err(ExactError::TooLarge(n));
    }
    let mut h = DMatrix::zeros(n, n);
    for x in 0..n {
        h[(x, x)] = Complex64::new(r.ambient_deg[x] + r.v.get(x), 0.0);
        for &(y, b) in r.graph.neighbors(x) {
            let phase = Complex64::from_polar(1.0, r.theta.get(x, y));
            h[(x, y)] = -phase * (b / r.graph.measure(x));
        }
    }
    Ok(FiniteOperator {
        labels: r.graph.ids().to_vec(),
        h,
        m: r.graph.measures().to_vec(),
    })
}

/// Formal operator applied pointwise:
/// `(L f)(x) = (1/m(x)) sum_y b(x,y)(f(x) - e^{i theta(x,y)} f(y)) + v(x) f(x)`.
pub fn apply_formal(
    g: &WeightedGraph,
    theta: &MagneticPotential,
    v: &ElectricPotential,
    f: &[Complex64],
    x: usize,
) -> Complex64 {
    let mut acc = Complex64::default();
    for &(y, b) in g.neighbors(x) {
        let phase = Complex64::from_polar(1.0, theta.get(x, y));
        acc += (f[x] - phase * f[y]) * b;
    }
    acc / g.measure(x) + f[x] * v.get(x)
}

/// The sesquilinear form `Q^(c)_{v,theta}(f, g2)` as a double sum over
/// ordered neighbor pairs (hence the leading 1/2).
pub fn quadratic_form(
    g: &WeightedGraph,
    theta: &MagneticPotential,
    v: &ElectricPotential,
    f: &[Complex64],
    g2: &[Complex64],
) -> Complex64 {
    let mut acc = Complex64::default();
    for x in 0..g.len() {
        for &(y, b) in g.neighbors(x) {
            let phase = Complex64::from_polar(1.0, theta.get(x, y));
            let df = f[x] - phase * f[y];
            let dg = g2[x] - phase * g2[y];
            acc += df * dg.conj() * (0.5 * b);
        }
        acc += f[x] * g2[x].conj() * (v.get(x) * g.measure(x));
    }
    acc
}

/// `|Q(f, g2) - <Lf, g2>_m|`, the Green's-formula residual.
pub fn greens_identity_residual(
    g: &WeightedGraph,
    theta: &MagneticPotential,
    v: &ElectricPotential,
    f: &[Complex64],
    g2: &[Complex64],
) -> f64 {
    let q = quadratic_form(g, theta, v, f, g2);
    let mut pairing = Complex64::default();
    for x in 0..g.len() {
        pairing += apply_formal(g, theta, v, f, x) * g2[x].conj() * g.measure(x);
    }
    (q - pairing).norm()
}

fn spectral_kernel(
    op: &FiniteOperator,
    t: f64,
    f: impl Fn(f64) -> Complex64,
) -> Result<KernelMatrix, ExactError> {
    let m = op.symmetrized()?;
    let eig = SymmetricEigen::new(m);
    let n = op.dim();
    let fev: Vec<Complex64> = eig.eigenvalues.iter().map(|&l| f(l)).collect();
    // E = U diag(f(lambda)) U^H, then K = D^{-1/2} E D^{1/2} / m(y)
    let u = &eig.eigenvectors;
    let mut k = DMatrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            let mut e = Complex64::default();
            for j in 0..n {
                e += u[(x, j)] * fev[j] * u[(y, j)].conj();
            }
            let scale = (op.m[y] / op.m[x]).sqrt() / op.m[y];
            k[(x, y)] = e * scale;
        }
    }
    Ok(KernelMatrix {
        labels: op.labels.clone(),
        k,
        m: op.m.clone(),
        t,
    })
}

/// Kernel of the unitary group `exp(-itH)`; `t` may be negative.
pub fn unitary_kernel_exact(op: &FiniteOperator, t: f64) -> Result<KernelMatrix, ExactError> {
    spectral_kernel(op, t, |l| Complex64::from_polar(1.0, -t * l))
}

/// Kernel of the semigroup `exp(-tH)`, `t >= 0`.
pub fn semigroup_kernel_exact(op: &FiniteOperator, t: f64) -> Result<KernelMatrix, ExactError> {
    if t < 0.0 {
        return Err(ExactError::NegativeTime(t));
    }
    spectral_kernel(op, t, |l| Complex64::new((-t * l).exp(), 0.0))
}

/// `[AB](x,y) = sum_z A(x,z) B(z,y) m(z)`.
pub fn compose_kernels(a: &KernelMatrix, b: &KernelMatrix) -> Result<KernelMatrix, ExactError> {
    if a.labels != b.labels || a.m != b.m {
        return Err(ExactError::MismatchedKernels);
    }
    let n = a.dim();
    let mut k = DMatrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            let mut acc = Complex64::default();
            for z in 0..n {
                acc += a.k[(x, z)] * b.k[(z, y)] * a.m[z];
            }
            k[(x, y)] = acc;
        }
    }
    Ok(KernelMatrix {
        labels: a.labels.clone(),
        k,
        m: a.m.clone(),
        t: a.t + b.t,
    })
}

/// Kernel of `exp(-itL_{v,theta}) exp(+itL_{v',theta'})` on `W`.
#[allow(clippy::too_many_arguments)]
pub fn scattering_kernel_exact(
    g: &WeightedGraph,
    theta: &MagneticPotential,
    v: &ElectricPotential,
    theta2: &MagneticPotential,
    v2: &ElectricPotential,
    w: &VertexSet,
    t: f64,
) -> Result<KernelMatrix, ExactError> {
    let op = assemble_operator(g, theta, v, w)?;
    let op2 = assemble_operator(g, theta2, v2, w)?;
    let a = unitary_kernel_exact(&op, t)?;
    let b = unitary_kernel_exact(&op2, -t)?;
    compose_kernels(&a, &b)
}

/// `max_x |(exp(-itH)f - f)(x)/t + i (Hf)(x)|`, the numerical generator-limit
/// witness. First order in `t` for smooth data.
pub fn generator_limit_residual(
    op: &FiniteOperator,
    f: &[Complex64],
    t: f64,
) -> Result<f64, ExactError> {
    let kern = unitary_kernel_exact(op, t)?;
    let uf = kern.apply(f);
    let hf = op.apply(f);
    let i = Complex64::new(0.0, 1.0);
    Ok((0..op.dim())
        .map(|x| ((uf[x] - f[x]) / t + i * hf[x]).norm())
        .fold(0.0, f64::max))
}
