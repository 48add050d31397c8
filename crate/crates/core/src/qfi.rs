//! Quantum Fisher information of pure states under the encoding `e^{i phi X}`.
//!
//! For a pure state the QFI is `4 Var(X)`, so everything here reduces to
//! moments of the `X`-basis probability distribution.

use crate::dynamics::{LtaEstimate, Propagator, TimeGrid};
use crate::error::{invalid, Result};
use crate::hilbert::{QuantumState, SectorBasis};
use crate::numerics::EigenSystem;

/// `sum_i p_i (x_i - <x>)^2` with `<x> = sum_i p_i x_i`.
pub fn variance_of(probabilities: &[f64], observable: &[f64]) -> f64 {
    let mean: f64 = probabilities.iter().zip(observable).map(|(p, x)| p * x).sum();
    probabilities
        .iter()
        .zip(observable)
        .map(|(p, x)| p * (x - mean) * (x - mean))
        .sum()
}

/// `F_Q = 4 (<X^2> - <X>^2)`.
pub fn qfi_instant(state: &QuantumState, observable: &[f64]) -> f64 {
    4.0 * variance_of(&state.probabilities(), observable)
}

/// Heisenberg limit `4 Delta_D^2`, reached by the cat state.
pub fn heisenberg_limit(basis: &SectorBasis) -> f64 {
    4.0 * basis.delta_d().powi(2)
}

/// Time average of [`qfi_instant`] over `grid`.
pub fn qfi_lta_exact(
    eig: &EigenSystem,
    psi0: &QuantumState,
    observable: &[f64],
    grid: &TimeGrid,
) -> Result<f64> {
    if observable.len() != eig.dim() {
        return Err(invalid("observable length does not match the basis"));
    }
    let prop = Propagator::new(eig, psi0)?;
    let mut sum = 0.0;
    prop.scan(grid, |block| {
        for col in block.probabilities().columns() {
            sum += 4.0 * variance_of(&col.to_vec(), observable);
        }
    });
    Ok(sum / grid.steps() as f64)
}

/// QFI with the long-time correlations factorized: `4 [sum x^2 Pbar - (sum x Pbar)^2]`.
pub fn qfi_lta_factorized(lta: &LtaEstimate, observable: &[f64]) -> Result<f64> {
    if observable.len() != lta.pbar().len() {
        return Err(invalid("observable length does not match the distribution"));
    }
    Ok(4.0 * variance_of(lta.pbar(), observable))
}

/// How a QFI value is normalized for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization {
    Raw,
    /// `F / Delta_D^2`.
    PerHalfSpan,
    /// `F / (Delta_D x0)^2`, the universal double-well scaling.
    PerHalfSpanAndPosition { x0: f64 },
}

impl Normalization {
    pub fn apply(&self, value: f64, delta_d: f64) -> f64 {
        match *self {
            Normalization::Raw => value,
            Normalization::PerHalfSpan => value / (delta_d * delta_d),
            Normalization::PerHalfSpanAndPosition { x0 } => value / (delta_d * x0).powi(2),
        }
    }
}

/// Exact and factorized long-time averaged QFI of one quench.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiRecord {
    pub fq_exact: f64,
    pub fq_factorized: f64,
    pub delta_d: f64,
}

impl QfiRecord {
    pub fn scaled(&self, norm: Normalization) -> (f64, f64) {
        (
            norm.apply(self.fq_exact, self.delta_d),
            norm.apply(self.fq_factorized, self.delta_d),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::lta_distribution_diagonal;
    use crate::hilbert::{cat_state, lmg_basis, spinor_sector_basis};
    use num_complex::Complex64;

    #[test]
    fn basis_state_has_zero_qfi() {
        let b = spinor_sector_basis(10).unwrap();
        let s = QuantumState::basis_state(b.clone(), 3).unwrap();
        assert_eq!(qfi_instant(&s, b.labels()), 0.0);
    }

    #[test]
    fn cat_state_saturates_heisenberg_limit() {
        for b in [spinor_sector_basis(4).unwrap(), lmg_basis(9).unwrap(), lmg_basis(500).unwrap()] {
            let c = cat_state(&b).unwrap();
            let f = qfi_instant(&c, b.labels());
            assert!((f - heisenberg_limit(&b)).abs() < 1e-9 * heisenberg_limit(&b));
        }
    }

    #[test]
    fn uniform_spinor_distribution() {
        // Var over {0, 2, 4} uniform = 8/3.
        let b = spinor_sector_basis(4).unwrap();
        let amps = vec![Complex64::new(1.0, 0.0); 3];
        let s = QuantumState::from_amplitudes(b.clone(), amps).unwrap();
        assert!((qfi_instant(&s, b.labels()) - 32.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn factorized_moments() {
        let b = lmg_basis(2).unwrap();
        let amps = vec![Complex64::new(1.0, 0.0); 3];
        let s = QuantumState::from_amplitudes(b.clone(), amps).unwrap();
        let h = crate::models::build_lmg_hamiltonian(&b, 1.0, 0.0).unwrap();
        let eig = crate::numerics::eigh_tridiagonal(&h).unwrap();
        let lta = lta_distribution_diagonal(&eig, &s).unwrap();
        assert!((qfi_lta_factorized(&lta, b.labels()).unwrap() - 8.0 / 3.0).abs() < 1e-13);

        let one = QuantumState::basis_state(b.clone(), 1).unwrap();
        let lta = lta_distribution_diagonal(&eig, &one).unwrap();
        assert_eq!(qfi_lta_factorized(&lta, b.labels()).unwrap(), 0.0);
        assert!(qfi_lta_factorized(&lta, &[1.0]).is_err());
    }

    #[test]
    fn normalizations() {
        let rec = QfiRecord { fq_exact: 8.0, fq_factorized: 4.0, delta_d: 2.0 };
        assert_eq!(rec.scaled(Normalization::Raw), (8.0, 4.0));
        assert_eq!(rec.scaled(Normalization::PerHalfSpan), (2.0, 1.0));
        assert_eq!(rec.scaled(Normalization::PerHalfSpanAndPosition { x0: 0.5 }), (8.0, 4.0));
    }
}
