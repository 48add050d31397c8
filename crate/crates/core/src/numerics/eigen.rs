//! Symmetric tridiagonal eigensolver (implicit-shift QL with eigenvectors).

use std::sync::Arc;

use ndarray::Array2;

use crate::error::{invalid, Error, Result};
use crate::hilbert::SectorBasis;
use crate::models::TridiagonalOperator;

/// Total QL sweeps allowed across all eigenvalues before giving up.
pub const MAX_QL_ITERATIONS: usize = 10_000;

/// Spectral decomposition `H = V diag(E) V^T` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    basis: Arc<SectorBasis>,
    eigenvalues: Vec<f64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    eigenvectors: Array2<f64>,
}

impl EigenSystem {
    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &Array2<f64> {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `max |E_k|`, used as the operator-norm scale.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().fold(0.0, |m, e| m.max(e.abs()))
    }
}

/// Full eigendecomposition of a real symmetric tridiagonal operator.
pub fn eigh_tridiagonal(op: &TridiagonalOperator) -> Result<EigenSystem> {
    let n = op.dim();
    if n == 0 {
        return Err(invalid("empty operator"));
    }
    let mut d = op.diag().to_vec();
    let mut e = op.offdiag().to_vec();
    e.push(0.0);

    // Row k of `zt` accumulates eigenvector k, so every rotation touches two contiguous rows.
    let mut zt = vec![0.0; n * n];
    for k in 0..n {
        zt[k * n + k] = 1.0;
    }

    let mut iterations = 0usize;
    for l in 0..n {
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_QL_ITERATIONS {
                return Err(Error::NumericalFailure {
                    index: l,
                    reason: format!("QL iteration did not converge in {MAX_QL_ITERATIONS} sweeps"),
                });
            }

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                let (lo, hi) = zt.split_at_mut((i + 1) * n);
                let row_i = &mut lo[i * n..];
                let row_next = &mut hi[..n];
                for (zi, zn) in row_i.iter_mut().zip(row_next.iter_mut()) {
                    let f = *zn;
                    *zn = s * *zi + c * f;
                    *zi = c * *zi - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let eigenvalues = order.iter().map(|&k| d[k]).collect();
    let mut eigenvectors = Array2::zeros((n, n));
    for (col, &k) in order.iter().enumerate() {
        for i in 0..n {
            eigenvectors[[i, col]] = zt[k * n + i];
        }
    }
    Ok(EigenSystem {
        basis: op.basis().clone(),
        eigenvalues,
        eigenvectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{lmg_basis, spinor_sector_basis};
    use crate::models::{build_lmg_hamiltonian, build_static_spinor_hamiltonian};

    fn op(diag: Vec<f64>, off: Vec<f64>) -> TridiagonalOperator {
        let b = lmg_basis(diag.len() - 1).unwrap();
        TridiagonalOperator::new(b, diag, off).unwrap()
    }

    /// Max residual `|H v - E v|` and orthonormality defect.
    fn defects(h: &TridiagonalOperator, es: &EigenSystem) -> (f64, f64) {
        let n = h.dim();
        let v = es.eigenvectors();
        let mut residual: f64 = 0.0;
        for k in 0..n {
            for i in 0..n {
                let mut hv = h.diag()[i] * v[[i, k]];
                if i > 0 {
                    hv += h.offdiag()[i - 1] * v[[i - 1, k]];
                }
                if i + 1 < n {
                    hv += h.offdiag()[i] * v[[i + 1, k]];
                }
                residual = residual.max((hv - es.eigenvalues()[k] * v[[i, k]]).abs());
            }
        }
        let gram = v.t().dot(v);
        let mut ortho: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                ortho = ortho.max((gram[[i, j]] - target).abs());
            }
        }
        (residual, ortho)
    }

    #[test]
    fn two_by_two() {
        let h = op(vec![0.0, 0.0], vec![1.0]);
        let es = eigh_tridiagonal(&h).unwrap();
        assert!((es.eigenvalues()[0] + 1.0).abs() < 1e-15);
        assert!((es.eigenvalues()[1] - 1.0).abs() < 1e-15);
        let v = es.eigenvectors();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v[[0, 0]].abs() - s).abs() < 1e-15);
        assert!((v[[0, 0]] + v[[1, 0]]).abs() < 1e-15);
        assert!((v[[0, 1]] - v[[1, 1]]).abs() < 1e-15);
    }

    #[test]
    fn uniform_three_by_three() {
        let h = op(vec![2.0; 3], vec![-1.0; 2]);
        let es = eigh_tridiagonal(&h).unwrap();
        let r2 = 2f64.sqrt();
        for (got, want) in es.eigenvalues().iter().zip([2.0 - r2, 2.0, 2.0 + r2]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn lmg_500_invariants() {
        let b = lmg_basis(500).unwrap();
        let h = build_lmg_hamiltonian(&b, 5.0, 1.0).unwrap();
        let es = eigh_tridiagonal(&h).unwrap();
        let (res, ortho) = defects(&h, &es);
        let scale = es.spectral_radius();
        assert!(res <= 1e-10 * scale, "residual {res}");
        assert!(ortho <= 1e-10, "orthonormality {ortho}");
        assert!(es.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn reconstruction_small() {
        let b = spinor_sector_basis(120).unwrap();
        let h = build_static_spinor_hamiltonian(&b, 1.0, 0.4).unwrap();
        let es = eigh_tridiagonal(&h).unwrap();
        let v = es.eigenvectors();
        let lam = Array2::from_diag(&ndarray::Array1::from(es.eigenvalues().to_vec()));
        let rec = v.dot(&lam).dot(&v.t());
        let dense = h.to_dense();
        let scale = es.spectral_radius();
        for i in 0..h.dim() {
            for j in 0..h.dim() {
                assert!((rec[[i, j]] - dense[i][j]).abs() <= 1e-9 * scale);
            }
        }
    }

    #[test]
    fn degenerate_diagonal_input() {
        // Omega = 0: diagonal with +-m degeneracy.
        let b = lmg_basis(6).unwrap();
        let h = build_lmg_hamiltonian(&b, 3.0, 0.0).unwrap();
        let es = eigh_tridiagonal(&h).unwrap();
        let mut want: Vec<f64> = b.labels().iter().map(|m| 1.0 * m * m).collect();
        want.sort_by(f64::total_cmp);
        assert_eq!(es.eigenvalues(), want.as_slice());
    }

    #[test]
    fn deterministic() {
        let b = lmg_basis(80).unwrap();
        let h = build_lmg_hamiltonian(&b, 7.0, 1.0).unwrap();
        let a = eigh_tridiagonal(&h).unwrap();
        let c = eigh_tridiagonal(&h).unwrap();
        assert_eq!(a.eigenvalues(), c.eigenvalues());
        assert_eq!(a.eigenvectors(), c.eigenvectors());
    }
}
