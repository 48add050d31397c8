//! Exact time evolution in the Hamiltonian eigenbasis and long-time averages.
//!
//! `|psi(t)> = sum_k e^{-i E_k t} <k|psi0> |k>`. Samples on a [`TimeGrid`] are
//! produced in blocks: the phases of a block form a `K x 2B` matrix and one
//! matrix product with the eigenvector matrix yields the real and imaginary
//! amplitudes of `B` time points at once.

use ndarray::{s, Array2, ArrayView2};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::hilbert::{BasisKind, QuantumState, SectorBasis};
use crate::models::{expectation_of, TridiagonalOperator};
use crate::numerics::EigenSystem;

/// Eigen-components with `|<k|psi0>|^2` below this are dropped from propagation.
const NEGLIGIBLE_WEIGHT: f64 = 1e-30;
const BLOCK: usize = 256;

/// Sampling times `t_s = s * dt`, `s = 0 .. steps - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(steps: usize, dt: f64) -> Result<Self> {
        if steps == 0 {
            return Err(invalid("time grid needs at least one step"));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(invalid(format!("time step must be positive, got {dt}")));
        }
        Ok(Self { dt, steps })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn time(&self, step: usize) -> f64 {
        step as f64 * self.dt
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Estimator {
    TimeAverage,
    DiagonalEnsemble,
}

/// Long-time averaged probability distribution over a sector basis.
#[derive(Debug, Clone, PartialEq)]
pub struct LtaEstimate {
    pbar: Vec<f64>,
    estimator: Estimator,
    grid: Option<TimeGrid>,
}

impl LtaEstimate {
    pub fn pbar(&self) -> &[f64] {
        &self.pbar
    }

    pub fn estimator(&self) -> Estimator {
        self.estimator
    }

    /// Sampling grid; `None` for the diagonal ensemble.
    pub fn grid(&self) -> Option<TimeGrid> {
        self.grid
    }

    /// `sum_i |a_i - b_i|`.
    pub fn l1_distance(&self, other: &[f64]) -> f64 {
        self.pbar.iter().zip(other).map(|(a, b)| (a - b).abs()).sum()
    }
}

fn ensure_same_basis(eig: &EigenSystem, psi0: &QuantumState) -> Result<()> {
    if eig.basis() != psi0.basis() {
        return Err(Error::BasisMismatch(
            "eigensystem and state live on different bases".into(),
        ));
    }
    Ok(())
}

/// Amplitudes of a block of consecutive samples; column `j` is step `start + j`.
pub struct SampleBlock {
    pub start: usize,
    pub re: Array2<f64>,
    pub im: Array2<f64>,
}

impl SampleBlock {
    pub fn len(&self) -> usize {
        self.re.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `P(x_i, t)` for every sample; shape `dim x len`.
    pub fn probabilities(&self) -> Array2<f64> {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn amplitudes(&self, column: usize) -> Vec<Complex64> {
        self.re
            .column(column)
            .iter()
            .zip(self.im.column(column))
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect()
    }
}

/// Initial state projected on the eigenbasis, ready for repeated evaluation.
pub struct Propagator<'a> {
    eig: &'a EigenSystem,
    active: Vec<usize>,
    energies: Vec<f64>,
    overlaps: Vec<Complex64>,
    vectors: Array2<f64>,
}

impl<'a> Propagator<'a> {
    pub fn new(eig: &'a EigenSystem, psi0: &QuantumState) -> Result<Self> {
        ensure_same_basis(eig, psi0)?;
        let v = eig.eigenvectors();
        let amps = psi0.amplitudes();
        let all: Vec<Complex64> = (0..eig.dim())
            .map(|k| {
                v.column(k)
                    .iter()
                    .zip(amps)
                    .map(|(&vik, a)| a * vik)
                    .sum::<Complex64>()
            })
            .collect();
        let active: Vec<usize> = (0..eig.dim())
            .filter(|&k| all[k].norm_sqr() > NEGLIGIBLE_WEIGHT)
            .collect();
        let energies = active.iter().map(|&k| eig.eigenvalues()[k]).collect();
        let overlaps = active.iter().map(|&k| all[k]).collect();
        let vectors = v.select(ndarray::Axis(1), &active);
        Ok(Self {
            eig,
            active,
            energies,
            overlaps,
            vectors,
        })
    }

    pub fn eigensystem(&self) -> &EigenSystem {
        self.eig
    }

    /// Indices of eigenstates with non-negligible overlap.
    pub fn active_components(&self) -> &[usize] {
        &self.active
    }

    /// `|<k|psi0>|^2` for the active components.
    pub fn weights(&self) -> Vec<f64> {
        self.overlaps.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn overlaps(&self) -> &[Complex64] {
        &self.overlaps
    }

    pub fn state_at(&self, t: f64) -> QuantumState {
        let block = self.block(&[t], 0);
        QuantumState::from_normalized(self.eig.basis().clone(), block.amplitudes(0))
    }

    fn block(&self, times: &[f64], start: usize) -> SampleBlock {
        let k = self.energies.len();
        let b = times.len();
        let mut phases = Array2::<f64>::zeros((k, 2 * b));
        for (row, (&e, c)) in self.energies.iter().zip(&self.overlaps).enumerate() {
            for (j, &t) in times.iter().enumerate() {
                let (sin, cos) = (e * t).sin_cos();
                // c * e^{-i E t}
                phases[[row, j]] = c.re * cos + c.im * sin;
                phases[[row, b + j]] = c.im * cos - c.re * sin;
            }
        }
        let amps = self.vectors.dot(&phases);
        SampleBlock {
            start,
            re: amps.slice(s![.., ..b]).to_owned(),
            im: amps.slice(s![.., b..]).to_owned(),
        }
    }

    /// Visits every sample of `grid` in order, in blocks.
    pub fn scan<F: FnMut(&SampleBlock)>(&self, grid: &TimeGrid, mut visit: F) {
        let mut start = 0;
        while start < grid.steps() {
            let end = (start + BLOCK).min(grid.steps());
            let times: Vec<f64> = (start..end).map(|s| grid.time(s)).collect();
            visit(&self.block(&times, start));
            start = end;
        }
    }
}

/// `|psi(t)>` for a single time.
pub fn evolve(eig: &EigenSystem, psi0: &QuantumState, t: f64) -> Result<QuantumState> {
    ensure_same_basis(eig, psi0)?;
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    Ok(Propagator::new(eig, psi0)?.state_at(t))
}

/// `P(x_i) = |<x_i|psi>|^2`.
pub fn probability_snapshot(state: &QuantumState) -> Vec<f64> {
    state.probabilities()
}

/// `(1/steps) sum_s P(x_i, s dt)`.
pub fn lta_distribution_time_avg(
    eig: &EigenSystem,
    psi0: &QuantumState,
    grid: &TimeGrid,
) -> Result<LtaEstimate> {
    let prop = Propagator::new(eig, psi0)?;
    let mut acc = vec![0.0; eig.dim()];
    prop.scan(grid, |block| accumulate_rows(&mut acc, block.probabilities().view()));
    let steps = grid.steps() as f64;
    Ok(LtaEstimate {
        pbar: acc.into_iter().map(|p| p / steps).collect(),
        estimator: Estimator::TimeAverage,
        grid: Some(*grid),
    })
}

fn accumulate_rows(acc: &mut [f64], probs: ArrayView2<f64>) {
    for (a, row) in acc.iter_mut().zip(probs.rows()) {
        *a += row.sum();
    }
}

/// Infinite-time limit `sum_k |<k|psi0>|^2 |<x_i|k>|^2`.
///
/// Eigenvalues closer than `1e-10 * max|E|` are treated as one degenerate
/// block whose projector is kept coherent.
pub fn lta_distribution_diagonal(eig: &EigenSystem, psi0: &QuantumState) -> Result<LtaEstimate> {
    let prop = Propagator::new(eig, psi0)?;
    let tol = 1e-10 * eig.spectral_radius();
    let dim = eig.dim();
    let mut pbar = vec![0.0; dim];
    let energies = &prop.energies;
    let mut start = 0;
    while start < energies.len() {
        let mut end = start + 1;
        while end < energies.len() && energies[end] - energies[end - 1] <= tol {
            end += 1;
        }
        for (i, p) in pbar.iter_mut().enumerate() {
            let amp: Complex64 = (start..end)
                .map(|j| prop.overlaps[j] * prop.vectors[[i, j]])
                .sum();
            *p += amp.norm_sqr();
        }
        start = end;
    }
    let total: f64 = pbar.iter().sum();
    for p in &mut pbar {
        *p /= total;
    }
    Ok(LtaEstimate {
        pbar,
        estimator: Estimator::DiagonalEnsemble,
        grid: None,
    })
}

/// Everything a single pass over the time grid yields for one quench.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesSummary {
    pub lta: LtaEstimate,
    /// Time average of the instantaneous QFI `4 Var(X)`.
    pub qfi_mean: f64,
    pub qfi_min: f64,
    pub qfi_max: f64,
    /// `max_t |<psi(t)|psi(t)> - 1|`.
    pub max_norm_deviation: f64,
    /// `max_t |<H>(t) - <H>(0)| / max|E_k|`, when a Hamiltonian was supplied.
    pub energy_drift: Option<f64>,
}

/// One pass computing the time-averaged distribution, QFI statistics and unitarity diagnostics.
pub fn time_series(
    eig: &EigenSystem,
    psi0: &QuantumState,
    observable: &[f64],
    grid: &TimeGrid,
    hamiltonian: Option<&TridiagonalOperator>,
) -> Result<TimeSeriesSummary> {
    if observable.len() != eig.dim() {
        return Err(invalid("observable length does not match the basis"));
    }
    let prop = Propagator::new(eig, psi0)?;
    let mut acc = vec![0.0; eig.dim()];
    let mut qfi_sum = 0.0;
    let mut qfi_min = f64::INFINITY;
    let mut qfi_max = f64::NEG_INFINITY;
    let mut max_norm_dev: f64 = 0.0;
    let mut energy0 = None;
    let mut max_energy_dev: f64 = 0.0;

    prop.scan(grid, |block| {
        let probs = block.probabilities();
        accumulate_rows(&mut acc, probs.view());
        for (j, col) in probs.columns().into_iter().enumerate() {
            let col = col.to_vec();
            let total: f64 = col.iter().sum();
            max_norm_dev = max_norm_dev.max((total - 1.0).abs());
            let f = crate::qfi::variance_of(&col, observable) * 4.0;
            qfi_sum += f;
            qfi_min = qfi_min.min(f);
            qfi_max = qfi_max.max(f);
            if let Some(h) = hamiltonian {
                let e = expectation_of(h.diag(), h.offdiag(), &block.amplitudes(j));
                let e0 = *energy0.get_or_insert(e);
                max_energy_dev = max_energy_dev.max((e - e0).abs());
            }
        }
    });

    let steps = grid.steps() as f64;
    let scale = eig.spectral_radius().max(f64::MIN_POSITIVE);
    Ok(TimeSeriesSummary {
        lta: LtaEstimate {
            pbar: acc.into_iter().map(|p| p / steps).collect(),
            estimator: Estimator::TimeAverage,
            grid: Some(*grid),
        },
        qfi_mean: qfi_sum / steps,
        qfi_min,
        qfi_max,
        max_norm_deviation: max_norm_dev,
        energy_drift: hamiltonian.map(|_| max_energy_dev / scale),
    })
}

/// Relative factorization errors over a window of basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationErrors {
    /// Labels of the window, ascending.
    pub labels: Vec<f64>,
    /// Row-major `labels.len()^2` matrix; `None` where `avg[P(n)P(n')] = 0`.
    pub matrix: Vec<Option<f64>>,
}

impl FactorizationErrors {
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.matrix[i * self.labels.len() + j]
    }

    pub fn undefined_count(&self) -> usize {
        self.matrix.iter().filter(|e| e.is_none()).count()
    }

    /// Mean of the defined diagonal (`n = n'`) entries.
    pub fn diagonal_mean(&self) -> f64 {
        let w = self.labels.len();
        mean((0..w).filter_map(|i| self.get(i, i)))
    }

    /// Mean of the defined off-diagonal entries.
    pub fn offdiagonal_mean(&self) -> f64 {
        let w = self.labels.len();
        mean((0..w).flat_map(|i| (0..w).filter(move |&j| j != i).map(move |j| (i, j)))
            .filter_map(|(i, j)| self.get(i, j)))
    }
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    if count == 0 {
        f64::NAN
    } else {
        sum / count as f64
    }
}

/// `eps(n, n') = |1 - avg[P(n)] avg[P(n')] / avg[P(n) P(n')]|` for all pairs of
/// labels in `[label_min, label_max]`, all averages on `grid`.
pub fn factorization_error_matrix(
    eig: &EigenSystem,
    psi0: &QuantumState,
    grid: &TimeGrid,
    label_min: f64,
    label_max: f64,
) -> Result<FactorizationErrors> {
    let basis = eig.basis();
    let window: Vec<usize> = (0..basis.dim())
        .filter(|&i| (label_min..=label_max).contains(&basis.labels()[i]))
        .collect();
    if window.is_empty() {
        return Err(invalid(format!("no labels in [{label_min}, {label_max}]")));
    }
    let w = window.len();
    let prop = Propagator::new(eig, psi0)?;
    let mut mean_p = vec![0.0; w];
    let mut second = Array2::<f64>::zeros((w, w));
    prop.scan(grid, |block| {
        let probs = block.probabilities().select(ndarray::Axis(0), &window);
        accumulate_rows(&mut mean_p, probs.view());
        second += &probs.dot(&probs.t());
    });
    let steps = grid.steps() as f64;
    let mut matrix = Vec::with_capacity(w * w);
    for i in 0..w {
        for j in 0..w {
            let joint = second[[i, j]] / steps;
            let product = (mean_p[i] / steps) * (mean_p[j] / steps);
            matrix.push((joint > 0.0).then(|| (1.0 - product / joint).abs()));
        }
    }
    Ok(FactorizationErrors {
        labels: window.iter().map(|&i| basis.labels()[i]).collect(),
        matrix,
    })
}

/// Factorization error for a single pair of labels.
pub fn factorization_error(
    eig: &EigenSystem,
    psi0: &QuantumState,
    grid: &TimeGrid,
    n: f64,
    nprime: f64,
) -> Result<f64> {
    let basis = eig.basis();
    let i = lookup(basis, n)?;
    let j = lookup(basis, nprime)?;
    let prop = Propagator::new(eig, psi0)?;
    let (mut pi, mut pj, mut pij) = (0.0, 0.0, 0.0);
    prop.scan(grid, |block| {
        let probs = block.probabilities();
        for (a, b) in probs.row(i).iter().zip(probs.row(j)) {
            pi += a;
            pj += b;
            pij += a * b;
        }
    });
    if pij <= 0.0 {
        return Err(Error::UndefinedValue(format!(
            "time-averaged product vanishes for ({n}, {nprime})"
        )));
    }
    let steps = grid.steps() as f64;
    Ok((1.0 - (pi / steps) * (pj / steps) / (pij / steps)).abs())
}

fn lookup(basis: &SectorBasis, label: f64) -> Result<usize> {
    basis
        .index_of(label)
        .ok_or_else(|| invalid(format!("label {label} is not in the basis")))
}

/// Average factorization error over the classically allowed window of an LMG quench.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageFactorizationError {
    pub average: f64,
    pub label_min: f64,
    pub label_max: f64,
    /// Pairs skipped because their joint average vanished.
    pub excluded: usize,
    pub errors: FactorizationErrors,
}

/// `eps_ave = A^{-1} sum_{n, n' in window} eps(n, n')` with the window
/// `[-ceil(N z0 / 2), floor(N z0 / 2)]` and `A = (n_max - n_min)^2`.
pub fn avg_factorization_error(
    eig: &EigenSystem,
    psi0: &QuantumState,
    grid: &TimeGrid,
    z0: f64,
) -> Result<AverageFactorizationError> {
    let basis = eig.basis();
    if basis.kind() != BasisKind::Lmg {
        return Err(Error::BasisMismatch("average factorization error is defined for LMG".into()));
    }
    let half = basis.particles() as f64 * z0.abs() / 2.0;
    let (label_min, label_max) = (-half.ceil(), half.floor());
    if label_max <= label_min {
        return Err(invalid("classically allowed window is empty"));
    }
    let errors = factorization_error_matrix(eig, psi0, grid, label_min, label_max)?;
    let area = (label_max - label_min).powi(2);
    let sum: f64 = errors.matrix.iter().flatten().sum();
    Ok(AverageFactorizationError {
        average: sum / area,
        label_min,
        label_max,
        excluded: errors.undefined_count(),
        errors,
    })
}
