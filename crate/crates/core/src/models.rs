//! Sector Hamiltonians of the static and driven spin-1 condensate and the LMG model.
//!
//! All three are exactly tridiagonal in their position-observable basis, so
//! only the diagonal and the first off-diagonal are stored.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::hilbert::{BasisKind, QuantumState, SectorBasis};

/// Real symmetric tridiagonal matrix over a sector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    basis: Arc<SectorBasis>,
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagonalOperator {
    pub fn new(basis: Arc<SectorBasis>, diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        let dim = basis.dim();
        if diag.len() != dim || offdiag.len() + 1 != dim {
            return Err(invalid(format!(
                "tridiagonal operator over dim {dim} needs {dim} diagonal and {} off-diagonal entries",
                dim.saturating_sub(1)
            )));
        }
        if diag.iter().chain(&offdiag).any(|v| !v.is_finite()) {
            return Err(invalid("operator entries must be finite"));
        }
        Ok(Self { basis, diag, offdiag })
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Couplings between adjacent basis states `i` and `i + 1`.
    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Gershgorin bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim())
            .map(|i| {
                let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
                let right = self.offdiag.get(i).map_or(0.0, |v| v.abs());
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// `H v` for a complex vector.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = v[i] * self.diag[i];
                if i > 0 {
                    acc += v[i - 1] * self.offdiag[i - 1];
                }
                if i + 1 < n {
                    acc += v[i + 1] * self.offdiag[i];
                }
                acc
            })
            .collect()
    }

    /// `<psi|H|psi>`, real by hermiticity.
    pub fn expectation(&self, state: &QuantumState) -> f64 {
        expectation_of(&self.diag, &self.offdiag, state.amplitudes())
    }

    /// Dense copy, row-major; intended for tests and small diagnostics.
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            m[i][i] = self.diag[i];
            if i + 1 < n {
                m[i][i + 1] = self.offdiag[i];
                m[i + 1][i] = self.offdiag[i];
            }
        }
        m
    }
}

pub(crate) fn expectation_of(diag: &[f64], offdiag: &[f64], amps: &[Complex64]) -> f64 {
    let mut acc = 0.0;
    for (i, a) in amps.iter().enumerate() {
        acc += diag[i] * a.norm_sqr();
        if i + 1 < amps.len() {
            acc += 2.0 * offdiag[i] * (a.conj() * amps[i + 1]).re;
        }
    }
    acc
}

/// Physical parameters of one quench, including the initial coherent state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelParams {
    StaticBec { c: f64, q: f64, rho0: f64, theta: f64 },
    /// Static effective Hamiltonian of the resonantly driven condensate.
    DrivenBec { g0: f64, gj: f64, rho0: f64, theta: f64 },
    Lmg { chi: f64, omega: f64, z0: f64, phi: f64 },
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelParams::StaticBec { c, q, rho0, theta } => {
                check(c > 0.0, "static BEC needs c > 0")?;
                check(q.is_finite() && theta.is_finite(), "q and theta must be finite")?;
                check((0.0..=1.0).contains(&rho0), "rho0 must lie in [0, 1]")
            }
            ModelParams::DrivenBec { g0, gj, rho0, theta } => {
                check(g0 > 0.0, "driven BEC needs G0 > 0")?;
                let eta = gj / g0;
                check((0.0..2.0).contains(&eta), "driven BEC needs 0 <= Gj/G0 < 2")?;
                check(theta.is_finite(), "theta must be finite")?;
                check((0.0..=1.0).contains(&rho0), "rho0 must lie in [0, 1]")
            }
            ModelParams::Lmg { chi, omega, z0, phi } => {
                check(chi >= 0.0 && chi.is_finite(), "LMG needs chi >= 0")?;
                check(omega.is_finite() && phi.is_finite(), "omega and phi must be finite")?;
                check((-1.0..=1.0).contains(&z0), "z0 must lie in [-1, 1]")
            }
        }
    }

    pub fn basis_kind(&self) -> BasisKind {
        match self {
            ModelParams::Lmg { .. } => BasisKind::Lmg,
            _ => BasisKind::Spinor,
        }
    }

    pub fn hamiltonian(&self, basis: &Arc<SectorBasis>) -> Result<TridiagonalOperator> {
        self.validate()?;
        match *self {
            ModelParams::StaticBec { c, q, .. } => build_static_spinor_hamiltonian(basis, c, q),
            ModelParams::DrivenBec { g0, gj, .. } => build_driven_spinor_hamiltonian(basis, g0, gj),
            ModelParams::Lmg { chi, omega, .. } => build_lmg_hamiltonian(basis, chi, omega),
        }
    }

    pub fn initial_state(&self, basis: &Arc<SectorBasis>) -> Result<QuantumState> {
        match *self {
            ModelParams::StaticBec { rho0, theta, .. } | ModelParams::DrivenBec { rho0, theta, .. } => {
                crate::hilbert::spinor_coherent_state(basis, rho0, theta)
            }
            ModelParams::Lmg { z0, phi, .. } => crate::hilbert::lmg_coherent_state(basis, z0, phi),
        }
    }
}

fn check(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(invalid(msg))
    }
}

fn require_kind(basis: &SectorBasis, kind: BasisKind) -> Result<()> {
    if basis.kind() != kind {
        return Err(Error::BasisMismatch(format!(
            "expected a {kind:?} basis, got {:?}",
            basis.kind()
        )));
    }
    Ok(())
}

/// `<n0 + 2| a0+ a0+ a1 a-1 |n0>` in the M = 0 sector.
fn pair_exchange(particles: f64, n0: f64) -> f64 {
    ((particles - n0) / 2.0) * ((n0 + 1.0) * (n0 + 2.0)).sqrt()
}

/// Static spinor Hamiltonian: spin mixing, elastic collisions and quadratic Zeeman shift.
pub fn build_static_spinor_hamiltonian(
    basis: &Arc<SectorBasis>,
    c: f64,
    q: f64,
) -> Result<TridiagonalOperator> {
    require_kind(basis, BasisKind::Spinor)?;
    let n = basis.particles() as f64;
    let labels = basis.labels();
    let diag = labels.iter().map(|&n0| (c / n) * n0 * (n - n0) + q * (n - n0)).collect();
    let offdiag = labels[..labels.len() - 1]
        .iter()
        .map(|&n0| (c / n) * pair_exchange(n, n0))
        .collect();
    TridiagonalOperator::new(basis.clone(), diag, offdiag)
}

/// Effective Hamiltonian of the driven condensate at resonance (vanishing detuning):
/// elastic strength `G0`, spin-mixing strength `Gj / 2`.
pub fn build_driven_spinor_hamiltonian(
    basis: &Arc<SectorBasis>,
    g0: f64,
    gj: f64,
) -> Result<TridiagonalOperator> {
    require_kind(basis, BasisKind::Spinor)?;
    let n = basis.particles() as f64;
    let labels = basis.labels();
    let diag = labels.iter().map(|&n0| (g0 / n) * n0 * (n - n0)).collect();
    let offdiag = labels[..labels.len() - 1]
        .iter()
        .map(|&n0| (gj / (2.0 * n)) * pair_exchange(n, n0))
        .collect();
    TridiagonalOperator::new(basis.clone(), diag, offdiag)
}

/// `H = (2 chi / N) Jz^2 - 2 Omega Jx`.
pub fn build_lmg_hamiltonian(
    basis: &Arc<SectorBasis>,
    chi: f64,
    omega: f64,
) -> Result<TridiagonalOperator> {
    require_kind(basis, BasisKind::Lmg)?;
    let n = basis.particles() as f64;
    let j = n / 2.0;
    let labels = basis.labels();
    let diag = labels.iter().map(|&m| (2.0 * chi / n) * m * m).collect();
    let offdiag = labels[..labels.len() - 1]
        .iter()
        .map(|&m| -omega * ((j - m) * (j + m + 1.0)).sqrt())
        .collect();
    TridiagonalOperator::new(basis.clone(), diag, offdiag)
}

/// Eigenvalues of the position observable, one per basis state.
pub fn position_observable(basis: &SectorBasis) -> Vec<f64> {
    basis.labels().to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{lmg_basis, lmg_coherent_state, spinor_coherent_state, spinor_sector_basis};

    #[test]
    fn static_n4_elements() {
        let b = spinor_sector_basis(4).unwrap();
        let h = build_static_spinor_hamiltonian(&b, 1.0, 0.0).unwrap();
        assert_eq!(h.diag(), &[0.0, 1.0, 0.0]);
        assert!((h.offdiag()[0] - 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((h.offdiag()[1] - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn zeeman_only_is_diagonal() {
        let b = spinor_sector_basis(6).unwrap();
        let h = build_static_spinor_hamiltonian(&b, 0.0, 0.3).unwrap();
        assert!(h.offdiag().iter().all(|&v| v == 0.0));
        for (d, n0) in h.diag().iter().zip(b.labels()) {
            assert!((d - 0.3 * (6.0 - n0)).abs() < 1e-15);
        }
    }

    #[test]
    fn driven_reduces_to_static_couplings() {
        let b = spinor_sector_basis(4).unwrap();
        let d = build_driven_spinor_hamiltonian(&b, 1.0, 2.0).unwrap();
        let s = build_static_spinor_hamiltonian(&b, 1.0, 0.0).unwrap();
        assert_eq!(d.offdiag(), s.offdiag());
        let d = build_driven_spinor_hamiltonian(&b, 1.0, 0.0).unwrap();
        assert!(d.offdiag().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn lmg_n2_couplings() {
        let b = lmg_basis(2).unwrap();
        let h = build_lmg_hamiltonian(&b, 0.0, 1.0).unwrap();
        for &v in h.offdiag() {
            assert!((v + 2f64.sqrt()).abs() < 1e-15);
        }
        let h = build_lmg_hamiltonian(&b, 3.0, 0.0).unwrap();
        assert_eq!(h.diag(), &[3.0, 0.0, 3.0]);
    }

    #[test]
    fn wrong_basis_rejected() {
        let s = spinor_sector_basis(4).unwrap();
        let l = lmg_basis(4).unwrap();
        assert!(build_lmg_hamiltonian(&s, 1.0, 1.0).is_err());
        assert!(build_static_spinor_hamiltonian(&l, 1.0, 1.0).is_err());
        assert!(build_driven_spinor_hamiltonian(&l, 1.0, 1.0).is_err());
    }

    #[test]
    fn position_observable_is_labels() {
        assert_eq!(position_observable(&spinor_sector_basis(4).unwrap()), vec![0.0, 2.0, 4.0]);
        assert_eq!(position_observable(&lmg_basis(2).unwrap()), vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn parameter_scaling_is_exact() {
        let b = spinor_sector_basis(10).unwrap();
        let h1 = build_static_spinor_hamiltonian(&b, 0.7, 0.3).unwrap();
        let h2 = build_static_spinor_hamiltonian(&b, 1.4, 0.6).unwrap();
        for (a, c) in h1.diag().iter().chain(h1.offdiag()).zip(h2.diag().iter().chain(h2.offdiag())) {
            assert_eq!(2.0 * a, *c);
        }
        let b = lmg_basis(9).unwrap();
        let h1 = build_lmg_hamiltonian(&b, 2.5, 1.0).unwrap();
        let h2 = build_lmg_hamiltonian(&b, 10.0, 4.0).unwrap();
        for (a, c) in h1.diag().iter().chain(h1.offdiag()).zip(h2.diag().iter().chain(h2.offdiag())) {
            assert_eq!(4.0 * a, *c);
        }
    }

    #[test]
    fn mean_field_energy_static() {
        let b = spinor_sector_basis(1000).unwrap();
        let (c, q, rho) = (1.0, 0.3, 0.6);
        let h = build_static_spinor_hamiltonian(&b, c, q).unwrap();
        let psi = spinor_coherent_state(&b, rho, 0.0).unwrap();
        let e = h.expectation(&psi) / 1000.0;
        let mf = 2.0 * c * rho * (1.0 - rho) + q * (1.0 - rho);
        assert!((e - mf).abs() < 5.0 / 1000.0, "{e} vs {mf}");
    }

    #[test]
    fn mean_field_energy_driven() {
        let b = spinor_sector_basis(1000).unwrap();
        let psi = spinor_coherent_state(&b, 0.8, 0.0).unwrap();
        for eta in [0.2, 0.7, 1.5] {
            let h = build_driven_spinor_hamiltonian(&b, 1.0, eta).unwrap();
            let e = h.expectation(&psi) / 1000.0;
            let mf = (1.0 + eta / 2.0) * 0.8 * 0.2;
            assert!((e - mf).abs() < 5.0 / 1000.0, "eta {eta}: {e} vs {mf}");
        }
    }

    #[test]
    fn mean_field_energy_lmg() {
        let b = lmg_basis(500).unwrap();
        let psi = lmg_coherent_state(&b, 0.6, 0.0).unwrap();
        let h = build_lmg_hamiltonian(&b, 5.0, 1.0).unwrap();
        let e = h.expectation(&psi) / 500.0;
        let mf = 5.0 * 0.36 / 2.0 - 0.8;
        assert!((e - mf).abs() < 5.0 / 500.0, "{e} vs {mf}");
    }

    #[test]
    fn operator_validation() {
        let b = lmg_basis(2).unwrap();
        assert!(TridiagonalOperator::new(b.clone(), vec![0.0; 3], vec![0.0; 3]).is_err());
        assert!(TridiagonalOperator::new(b, vec![f64::NAN, 0.0, 0.0], vec![0.0; 2]).is_err());
        assert!(ModelParams::DrivenBec { g0: 1.0, gj: 2.0, rho0: 0.8, theta: 0.0 }
            .validate()
            .is_err());
        assert!(ModelParams::StaticBec { c: 0.0, q: 0.1, rho0: 0.5, theta: 0.0 }
            .validate()
            .is_err());
    }
}
