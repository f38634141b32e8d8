//! Structured block-Krylov subspaces for Padé-type reduction of higher-order and
//! integro-differential-algebraic linear systems.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`]: dense complex matrices, LU, Gram–Schmidt.
//! - [`krylov`]: reference block-Krylov construction with deflation.
//! - [`structured`]: Case I / Case II operators and the structured recursion that
//!   builds the same subspace from `N0`-sized blocks.
//! - [`systems`]: higher-order, integro-DAE and first-order systems and their
//!   linearizations.
//! - [`reduction`]: transfer functions, moments and the projected reduced model.
//! - [`sample`]: seeded random instances.

pub mod error;
pub mod krylov;
pub mod linalg;
pub mod reduction;
pub mod sample;
pub mod structured;
pub mod systems;

pub use error::{Error, Result};
pub use krylov::{
    block_krylov_matrix, change_of_basis_check, deflated_krylov, orthonormal_basis,
    DeflationRecord, KrylovBasis,
};
pub use linalg::{c64, Lu, Matrix, Scalar, DEFAULT_TOL};
pub use reduction::{
    moment_match_report, moments, pade_type_reduce, transfer_function, MomentReport, ReducedModel,
};
pub use structured::{
    assemble_case_i, assemble_case_ii, leading_subspaces, reconstruct, structured_basis_case_i,
    structured_basis_case_ii, CaseIIOperator, CaseIOperator, CaseTag, StructuredBasis,
};
pub use systems::{
    case_i_from_higher_order, case_ii_from_integro_dae, krylov_operators_direct,
    linearize_higher_order, linearize_integro_dae, verify_appendix_a, verify_appendix_b,
    Factorization, FirstOrderSystem, HigherOrderSystem, IntegroDAESystem,
};
