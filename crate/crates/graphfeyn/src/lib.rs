//! Magnetic Schrödinger evolutions on weighted graphs, computed two
//! independent ways: exact finite linear algebra (Hermitian
//! eigendecomposition of the symmetrized operator) and a jump-process path
//! integral Monte Carlo. The two routes cross-validate each other; the exact
//! kernels are the oracle, the sampler scales past what dense algebra can
//! hold.
//!
//! Module map:
//! - [`graph`]: weighted graphs, magnetic and electric potentials, Dirichlet
//!   subsets, validation, standard builders
//! - [`exact`]: operator assembly and spectral kernels
//! - [`sampler`]: the minimal jump process
//! - [`functionals`]: path integrals and the Feynman weight
//! - [`estimate`]: reproducible parallel Monte Carlo accumulation
//! - [`mc`]: the path integral estimators
//! - [`exhaustion`]: convergence of ball restrictions

// `!(x > 0.0)` deliberately rejects NaN alongside nonpositives; vertex loops
// index parallel per-vertex arrays by vertex number throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod estimate;
pub mod exact;
pub mod exhaustion;
pub mod functionals;
pub mod graph;
pub mod mc;
pub mod sampler;

pub use estimate::MCEstimate;
pub use exact::{
    assemble_operator, compose_kernels, scattering_kernel_exact, semigroup_kernel_exact,
    unitary_kernel_exact, FiniteOperator, KernelMatrix,
};
pub use exhaustion::{exhaustion_study, ExhaustionReport};
pub use graph::{
    build_standard, instance_from_file, validate, ElectricPotential, MagneticPotential,
    StandardGraph, VertexSet, WeightedGraph,
};
pub use mc::{
    kato_simon_margin, mc_dirichlet_kernel, mc_kernel_row, mc_scattering_kernel,
    mc_semigroup_kernel, mc_unitary_apply, mc_unitary_kernel, KatoSimonMode, KernelMode,
};
pub use sampler::{sample_path, JumpPath, SamplerConfig};
