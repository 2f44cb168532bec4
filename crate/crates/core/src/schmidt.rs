//! Schmidt decomposition of bipartite pure states.

use crate::bipartite::{partial_trace, BipartiteDims, Subsystem};
use crate::eig::eigh;
use crate::error::{Error, Result};
use crate::mat::{vec_norm, vec_normalize, C64, ComplexMatrix, ZERO};

#[derive(Debug, Clone)]
pub struct SchmidtForm {
    /// Probability weights lambda_i, nonincreasing, summing to 1. The
    /// Schmidt coefficients themselves are sqrt(lambda_i).
    pub coefficients: Vec<f64>,
    pub left_basis: Vec<Vec<C64>>,
    pub right_basis: Vec<Vec<C64>>,
}

impl SchmidtForm {
    /// Number of weights above the rank cutoff.
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&l| l > tol).count()
    }

    /// Reassemble sum_i sqrt(lambda_i) |phi_i>|chi_i>.
    pub fn reassemble(&self) -> Vec<C64> {
        let da = self.left_basis[0].len();
        let db = self.right_basis[0].len();
        let mut psi = vec![ZERO; da * db];
        for ((lam, phi), chi) in
            self.coefficients.iter().zip(&self.left_basis).zip(&self.right_basis)
        {
            let c = C64::new(lam.sqrt(), 0.0);
            for i in 0..da {
                for k in 0..db {
                    psi[i * db + k] += c * phi[i] * chi[k];
                }
            }
        }
        psi
    }
}

const NORM_TOL: f64 = 1e-8;

/// Schmidt decomposition via the spectral decomposition of the reduced
/// state on A. Weights come back nonincreasing; for zero weights the right
/// vector is padded with a deterministic orthonormal completion.
pub fn schmidt_decompose(psi: &[C64], dims: BipartiteDims) -> Result<SchmidtForm> {
    if psi.len() != dims.total() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} does not match {}x{}",
            psi.len(),
            dims.da,
            dims.db
        )));
    }
    let norm = vec_norm(psi);
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::NotAState((norm - 1.0).abs()));
    }
    let (da, db) = (dims.da, dims.db);
    let rho = ComplexMatrix::projector(psi);
    let red_a = partial_trace(&rho, dims, Subsystem::B)?;
    let spec = eigh(&red_a)?;

    // Descending weights. The right vectors of distinct nonzero weights are
    // orthogonal in exact arithmetic; near-zero weights produce noise, so
    // each one is orthogonalized against those already accepted and dropped
    // (for deterministic completion) when nothing significant remains.
    let mut coefficients = Vec::with_capacity(da);
    let mut left_basis = Vec::with_capacity(da);
    let mut right_basis: Vec<Vec<C64>> = Vec::with_capacity(da);
    for k in (0..da).rev() {
        let lam = spec.eigenvalues[k].max(0.0);
        let phi = spec.eigenvectors[k].clone();
        // unnormalized chi = (<phi| ox I) |psi>, norm sqrt(lambda)
        let mut chi = vec![ZERO; db];
        for i in 0..da {
            for l in 0..db {
                chi[l] += phi[i].conj() * psi[i * db + l];
            }
        }
        for prev in right_basis.iter().filter(|v| vec_norm(v) > 0.5) {
            let ip = crate::mat::vec_inner(prev, &chi);
            crate::mat::vec_sub_scaled(&mut chi, prev, ip);
        }
        if vec_norm(&chi) > 1e-7 {
            vec_normalize(&mut chi);
        } else {
            chi = vec![ZERO; db];
        }
        coefficients.push(lam);
        left_basis.push(phi);
        right_basis.push(chi);
    }

    complete_right_basis(&mut right_basis, db);

    Ok(SchmidtForm { coefficients, left_basis, right_basis })
}

/// Replace zero columns with a Gram-Schmidt completion over the
/// computational basis, in index order.
fn complete_right_basis(basis: &mut [Vec<C64>], db: usize) {
    let mut fixed: Vec<Vec<C64>> =
        basis.iter().filter(|v| vec_norm(v) > 0.5).cloned().collect();
    let mut candidates = 0..db;
    for slot in basis.iter_mut() {
        if vec_norm(slot) > 0.5 {
            continue;
        }
        for idx in candidates.by_ref() {
            let mut cand = crate::mat::basis_vector(db, idx);
            for f in &fixed {
                let ip = crate::mat::vec_inner(f, &cand);
                crate::mat::vec_sub_scaled(&mut cand, f, ip);
            }
            if vec_norm(&cand) > 1e-6 {
                vec_normalize(&mut cand);
                *slot = cand.clone();
                fixed.push(cand);
                break;
            }
        }
    }
}
