//! Controlled, dissipative finite-level quantum systems in Liouville space.
//!
//! The crate builds superoperators for `H(f) = H0 + sum_m f_m H_m` together
//! with a rate-matrix dissipator, maps them to affine flows `dv/dt = A v + b`
//! on the coherence vector, and provides the tools to study the resulting
//! forward-time semigroup inside the Bloch ball: matrix exponentials,
//! propagation, spectra, equilibria and dynamical Lie algebras.
//!
//! `no_std` with `alloc`; file formats and the command-line front end live in
//! the `blochball` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod bloch;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod liouville;
pub mod model;
pub mod states;

pub use algebra::{
    decompose_inhomogeneous, dissipative_algebra, hamiltonian_algebra, lie_closure,
    InhomogeneousSplit, LieBasis,
};
pub use bloch::{ball_containment, quasi_spin_translation, to_affine, AffineGenerator, ContainmentReport};
pub use dynamics::{
    evolve, expm, propagate, semigroup_spectrum, steady_state, steady_state_sweep,
    unitary_propagate, Propagator, SpectrumReport, SweepReport, Trajectory,
};
pub use error::{Error, Result};
pub use liouville::{
    build_dissipator, commutator_superop, devectorize, qubit_superoperators, support_overlap,
    total_generator, vectorize, OverlapReport, QubitSuperoperators, Superoperator,
};
pub use model::{ControlField, ControlSystem, DissipationSpec, FieldKind, Segment};
pub use states::{CoherenceVector, DensityMatrix};
