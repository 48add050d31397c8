//! Long-time averaged quantum Fisher information as a probe of dynamical
//! phase transitions in collective spin models.
//!
//! The crate covers the full pipeline for a quench of the spin-1 condensate
//! (static or resonantly driven) and of the Lipkin-Meshkov-Glick model:
//!
//! * [`hilbert`]: sector bases and coherent initial states,
//! * [`models`]: tridiagonal sector Hamiltonians,
//! * [`numerics`]: tridiagonal eigensolver, elliptic integrals, singular quadrature,
//! * [`dynamics`]: exact evolution and long-time averaged distributions,
//! * [`qfi`]: instantaneous, time-averaged and factorized QFI,
//! * [`semiclassics`]: effective potentials and closed-form predictions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod models;
pub mod numerics;
pub mod qfi;
pub mod semiclassics;

pub use error::{Error, Result};
