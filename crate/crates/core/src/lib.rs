//! Euler-Lagrange equations, variational symmetries and Noether conservation
//! laws for Lagrangians `L(t, x, x', ..., x^(m))`, plus the discrete-time
//! analogues for `L(k, x[k], ..., x[k+m])`.

mod error;
mod linalg;

pub mod discrete;
pub mod jet;
pub mod noether;
pub mod symmetry;
pub mod variational;

pub use discrete::{
    discrete_ansatz, discrete_euler_lagrange, discrete_invariance_residual, discrete_noether, discrete_psi,
    discrete_solve_generators, discrete_verify, telescoping_defect, DiscreteConservationLaw, DiscreteFamily,
    DiscreteLagrangian, DiscreteReport, DiscreteSetup,
};
pub use error::{CoreError, Result};
pub use jet::{detect_order, JetContext};
pub use noether::{
    conservation_law, psi_sequence, verify_numeric, verify_symbolic, ConservationLaw, NumericReport, NumericSetup,
    SymbolicCheck,
};

pub use symmetry::{
    build_determining_system, determining_residual, in_span, p_sequence, solve_generators, AnsatzSpec,
    DeterminingSystem, Generator, GeneratorFamily,
};
pub use variational::{euler_lagrange, Lagrangian};
