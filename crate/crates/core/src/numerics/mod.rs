//! Numerical kernels shared by the dynamics and the semiclassical analysis.

mod eigen;
mod elliptic;
mod quadrature;

pub use eigen::{eigh_tridiagonal, EigenSystem, MAX_QL_ITERATIONS};
pub use elliptic::{carlson_rd, carlson_rf, elliptic_e, elliptic_k};
pub use quadrature::{gauss_chebyshev, singular_quadrature};
