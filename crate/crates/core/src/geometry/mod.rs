//! Conformal geometry and the analytic tools used by the checks.

mod bump;
mod covering;
mod moebius;

pub use bump::{
    bump_derivative, bump_psi_tilde, g_minus_derivative, g_plus_derivative, g_plus_terms, psi_normalization,
    BumpFunction, BUMP_DERIVATIVE_CAP,
};
pub use covering::{good_direction, good_direction_bound, radial_shift, RadialShift};
pub use moebius::{cayley, cayley_inv, jacobian_j, moebius_apply, stereographic, theta_reflect, MoebiusMap};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("the map has a pole at the given point")]
    PoleHit,
    #[error("matrix is singular")]
    Singular,
    #[error("no admissible direction exists")]
    NoDirectionFound,
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("derivative order {0} exceeds the cap")]
    CapExceeded(usize),
}
