//! Finite-dimensional stand-ins for the Hilbert-space objects: grid spaces
//! with quadrature weights, SPD operators, and the coercivity constant
//! `a0 = min (Av,v)/(Pv,v)`.

mod banded;
mod eigen;
mod operator;
mod space;

pub use banded::{BandCholesky, SymBanded};
pub use eigen::{
    dense_min_eig_oracle, generalized_eigenvalues, lower_spectral_bound, max_generalized_eig_bound,
    min_generalized_eig, GeneralizedEigResult, DENSE_EIG_LIMIT, EIG_RESIDUAL_TOL,
};
pub use operator::{build_bilaplacian, build_directional_laplacian, build_laplacian, stiffness_form, SpdOperator};
pub use space::{inner, norm, DiscreteSpace, EndpointHandling, SpaceKind};

pub(crate) use space::weighted_dot;
