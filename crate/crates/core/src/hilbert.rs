//! Sector bases and initial states.
//!
//! Both models are restricted to a single symmetry sector whose basis is the
//! eigenbasis of the position-like observable: `n0` (zero-mode population) for
//! the spin-1 condensate in the zero-magnetization, even-`n0` sector, and `Jz`
//! for the LMG model.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Which family of Hamiltonians a basis belongs to.
///
/// The static and driven spinor models share the same sector basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisKind {
    Spinor,
    Lmg,
}

/// Ordered eigenbasis of the position observable for one model sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    kind: BasisKind,
    particles: usize,
    labels: Vec<f64>,
    step: f64,
}

impl SectorBasis {
    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    /// Particle number `N`.
    pub fn particles(&self) -> usize {
        self.particles
    }

    /// Eigenvalues of the position observable, strictly ascending.
    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    /// Spacing between adjacent labels.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Half-span `(x_D - x_1) / 2`.
    pub fn delta_d(&self) -> f64 {
        (self.labels[self.labels.len() - 1] - self.labels[0]) / 2.0
    }

    /// Midpoint `(x_D + x_1) / 2`.
    pub fn delta_ave(&self) -> f64 {
        (self.labels[self.labels.len() - 1] + self.labels[0]) / 2.0
    }

    /// Maps a label onto the scaled coordinate in `[-1, 1]`.
    pub fn scaled(&self, label: f64) -> f64 {
        (label - self.delta_ave()) / self.delta_d()
    }

    /// Scaled coordinate of every basis state.
    pub fn scaled_coordinates(&self) -> Vec<f64> {
        self.labels.iter().map(|&l| self.scaled(l)).collect()
    }

    /// Index of the basis state carrying `label`, if any.
    pub fn index_of(&self, label: f64) -> Option<usize> {
        let pos = (label - self.labels[0]) / self.step;
        let idx = pos.round();
        if idx < 0.0 || (pos - idx).abs() > 1e-9 {
            return None;
        }
        let idx = idx as usize;
        (idx < self.dim()).then_some(idx)
    }
}

/// Basis `{|n0 = 0>, |2>, ..., |N>}` of the M = 0 spinor sector.
pub fn spinor_sector_basis(particles: usize) -> Result<Arc<SectorBasis>> {
    if particles < 2 || !particles.is_multiple_of(2) {
        return Err(invalid(format!(
            "spinor sector needs an even particle number >= 2, got {particles}"
        )));
    }
    let labels = (0..=particles).step_by(2).map(|n| n as f64).collect();
    Ok(Arc::new(SectorBasis {
        kind: BasisKind::Spinor,
        particles,
        labels,
        step: 2.0,
    }))
}

/// Basis `{|n = -N/2>, ..., |N/2>}` of `Jz` in the symmetric (j = N/2) multiplet.
pub fn lmg_basis(particles: usize) -> Result<Arc<SectorBasis>> {
    if particles < 1 {
        return Err(invalid("LMG basis needs at least one particle"));
    }
    let j = particles as f64 / 2.0;
    let labels = (0..=particles).map(|i| i as f64 - j).collect();
    Ok(Arc::new(SectorBasis {
        kind: BasisKind::Lmg,
        particles,
        labels,
        step: 1.0,
    }))
}

/// Normalized pure state expanded in a [`SectorBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    basis: Arc<SectorBasis>,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn from_amplitudes(basis: Arc<SectorBasis>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(invalid(format!(
                "expected {} amplitudes, got {}",
                basis.dim(),
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(invalid("amplitudes must have finite nonzero norm"));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Self { basis, amplitudes })
    }

    /// Basis state `|x_index>`.
    pub fn basis_state(basis: Arc<SectorBasis>, index: usize) -> Result<Self> {
        if index >= basis.dim() {
            return Err(invalid(format!("basis index {index} out of range")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); basis.dim()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { basis, amplitudes })
    }

    // Caller guarantees unit norm.
    pub(crate) fn from_normalized(basis: Arc<SectorBasis>, amplitudes: Vec<Complex64>) -> Self {
        debug_assert_eq!(basis.dim(), amplitudes.len());
        Self { basis, amplitudes }
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `P(x_i) = |<x_i|psi>|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Expectation value of an observable diagonal in this basis.
    pub fn expectation_diagonal(&self, observable: &[f64]) -> f64 {
        self.amplitudes
            .iter()
            .zip(observable)
            .map(|(a, x)| a.norm_sqr() * x)
            .sum()
    }
}

/// Builds a normalized state from per-site log-magnitudes and phases.
fn from_log_polar(basis: Arc<SectorBasis>, log_mag: &[f64], phase: &[f64]) -> QuantumState {
    let peak = log_mag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut amplitudes: Vec<Complex64> = log_mag
        .iter()
        .zip(phase)
        .map(|(&l, &p)| Complex64::from_polar((l - peak).exp(), p))
        .collect();
    let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amplitudes {
        *a /= norm;
    }
    QuantumState::from_normalized(basis, amplitudes)
}

/// Spin-1 coherent state `|rho0, theta>` projected on the M = 0 sector.
///
/// The coefficients are generated downward from `n0 = N` with the ratio
/// `c_{n0-2} / c_{n0} = 2 sqrt(n0 (n0-1)) / (N - n0 + 2) * (1 - rho0) / (2 rho0) * e^{-2i theta}`,
/// accumulated as log-magnitudes so that no factorials are ever formed.
pub fn spinor_coherent_state(
    basis: &Arc<SectorBasis>,
    rho0: f64,
    theta: f64,
) -> Result<QuantumState> {
    if basis.kind() != BasisKind::Spinor {
        return Err(Error::BasisMismatch("spinor coherent state on a non-spinor basis".into()));
    }
    if !(0.0..=1.0).contains(&rho0) {
        return Err(invalid(format!("rho0 must lie in [0, 1], got {rho0}")));
    }
    let dim = basis.dim();
    if rho0 == 1.0 {
        return QuantumState::basis_state(basis.clone(), dim - 1);
    }
    if rho0 == 0.0 {
        return QuantumState::basis_state(basis.clone(), 0);
    }

    let n = basis.particles() as f64;
    let log_pair = ((1.0 - rho0) / (2.0 * rho0)).ln();
    let mut log_mag = vec![0.0; dim];
    let mut phase = vec![0.0; dim];
    for i in (1..dim).rev() {
        let n0 = basis.labels()[i];
        let ratio = 2.0 * (n0 * (n0 - 1.0)).sqrt() / (n - n0 + 2.0);
        log_mag[i - 1] = log_mag[i] + ratio.ln() + log_pair;
        phase[i - 1] = phase[i] - 2.0 * theta;
    }
    Ok(from_log_polar(basis.clone(), &log_mag, &phase))
}

/// Two-mode (spin-N/2) coherent state `|z, phi>` in the `Jz` basis.
pub fn lmg_coherent_state(basis: &Arc<SectorBasis>, z: f64, phi: f64) -> Result<QuantumState> {
    if basis.kind() != BasisKind::Lmg {
        return Err(Error::BasisMismatch("LMG coherent state on a non-LMG basis".into()));
    }
    if !(-1.0..=1.0).contains(&z) {
        return Err(invalid(format!("z must lie in [-1, 1], got {z}")));
    }
    let dim = basis.dim();
    if z == 1.0 {
        return QuantumState::basis_state(basis.clone(), dim - 1);
    }
    if z == -1.0 {
        return QuantumState::basis_state(basis.clone(), 0);
    }

    let half = basis.particles() as f64 / 2.0;
    let log_tilt = 0.5 * ((1.0 - z) / (1.0 + z)).ln();
    let mut log_mag = vec![0.0; dim];
    let mut phase = vec![0.0; dim];
    for i in (1..dim).rev() {
        let m = basis.labels()[i];
        log_mag[i - 1] = log_mag[i] + 0.5 * ((half + m) / (half - m + 1.0)).ln() + log_tilt;
        phase[i - 1] = phase[i] - phi;
    }
    Ok(from_log_polar(basis.clone(), &log_mag, &phase))
}

/// `(|x_1> + |x_D>) / sqrt(2)`, the state of maximal `X` variance.
pub fn cat_state(basis: &Arc<SectorBasis>) -> Result<QuantumState> {
    let dim = basis.dim();
    if dim < 2 {
        return Err(invalid("cat state needs at least two basis states"));
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    amplitudes[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amplitudes[dim - 1] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    Ok(QuantumState::from_normalized(basis.clone(), amplitudes))
}
