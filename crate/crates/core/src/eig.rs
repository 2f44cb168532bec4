//! Deterministic Hermitian eigensolver: cyclic Jacobi with complex rotations.
//!
//! Matrices in this crate stay small (side <= ~400), where Jacobi is accurate
//! and needs no pivoting heuristics. The output ordering is fully pinned:
//! eigenvalues ascending, eigenvector phases fixed by making the first
//! nonzero component real positive, degenerate clusters ordered
//! lexicographically.

use crate::error::{Error, Result};
use crate::mat::{C64, ComplexMatrix, ONE, ZERO};

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Eigenvalues in ascending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors, `eigenvectors[k]` pairs with `eigenvalues[k]`.
    pub eigenvectors: Vec<Vec<C64>>,
}

impl SpectralDecomposition {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn min_vector(&self) -> &[C64] {
        &self.eigenvectors[0]
    }

    /// V diag(lambda) V^dagger.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvectors[0].len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (lam, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for i in 0..n {
                for j in 0..n {
                    let cur = m.get(i, j);
                    m.set(i, j, cur + C64::new(*lam, 0.0) * v[i] * v[j].conj());
                }
            }
        }
        m
    }
}

const HERMITICITY_TOL: f64 = 1e-8;
const MAX_SWEEPS: usize = 60;

/// Full spectral decomposition of a Hermitian matrix.
pub fn eigh(h: &ComplexMatrix) -> Result<SpectralDecomposition> {
    let dev = h.hermiticity_deviation();
    let tol = HERMITICITY_TOL * h.fro_norm().max(1.0);
    if !h.is_square() || dev > tol {
        return Err(Error::NotHermitian { deviation: dev, tol });
    }

    let n = h.side();
    if n == 0 {
        return Ok(SpectralDecomposition { eigenvalues: vec![], eigenvectors: vec![] });
    }

    // Work on the Hermitian average to kill roundoff asymmetry.
    let mut a: Vec<C64> = (0..n * n)
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            0.5 * (h.get(i, j) + h.get(j, i).conj())
        })
        .collect();
    let mut v = vec![ZERO; n * n];
    for i in 0..n {
        v[i * n + i] = ONE;
    }

    let scale = h.fro_norm().max(1.0);
    let stop = 1e-14 * scale;
    let mut converged = false;
    for _sweep in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a, n);
        if off <= stop {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a, n) > 1e-11 * scale {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    // Collect, sort ascending, fix phases, order degenerate clusters.
    let mut pairs: Vec<(f64, Vec<C64>)> = (0..n)
        .map(|k| {
            let lam = a[k * n + k].re;
            let mut col: Vec<C64> = (0..n).map(|i| v[i * n + k]).collect();
            fix_phase(&mut col);
            (lam, col)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));

    let cluster_tol = 1e-10 * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && pairs[end].0 - pairs[start].0 <= cluster_tol {
            end += 1;
        }
        if end - start > 1 {
            pairs[start..end].sort_by(|x, y| lex_cmp(&x.1, &y.1));
        }
        start = end;
    }

    let (eigenvalues, eigenvectors) = pairs.into_iter().unzip();
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// Minimal eigenpair of a Hermitian matrix.
pub fn min_eigenpair(h: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    let d = eigh(h)?;
    Ok((d.eigenvalues[0], d.eigenvectors.into_iter().next().unwrap()))
}

fn off_diagonal_norm(a: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += 2.0 * a[i * n + j].norm_sqr();
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation zeroing a[p,q]: a phase transformation makes
/// the pivot real, then a classical symmetric rotation eliminates it.
fn rotate(a: &mut [C64], v: &mut [C64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r; // e^{i phi}
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;

    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Combined unitary on the (p,q) plane:
    //   V[p,p] = c        V[p,q] = s
    //   V[q,p] = -s e^{-i phi}   V[q,q] = c e^{-i phi}
    let cs = C64::new(c, 0.0);
    let ss = C64::new(s, 0.0);
    let vqp = -ss * phase.conj();
    let vqq = cs * phase.conj();

    // A <- V^dagger A V. Columns first.
    for i in 0..n {
        let aip = a[i * n + p];
        let aiq = a[i * n + q];
        a[i * n + p] = aip * cs + aiq * vqp;
        a[i * n + q] = aip * ss + aiq * vqq;
    }
    // Rows: (V^dagger B)[p,:] = c B[p,:] - s e^{i phi} B[q,:],
    //        (V^dagger B)[q,:] = s B[p,:] + c e^{i phi} B[q,:].
    for j in 0..n {
        let bpj = a[p * n + j];
        let bqj = a[q * n + j];
        a[p * n + j] = cs * bpj + vqp.conj() * bqj;
        a[q * n + j] = ss * bpj + vqq.conj() * bqj;
    }
    a[p * n + q] = ZERO;
    a[q * n + p] = ZERO;
    a[p * n + p] = C64::new(a[p * n + p].re, 0.0);
    a[q * n + q] = C64::new(a[q * n + q].re, 0.0);

    // Accumulate eigenvectors: V_acc <- V_acc * V.
    for i in 0..n {
        let vip = v[i * n + p];
        let viq = v[i * n + q];
        v[i * n + p] = vip * cs + viq * vqp;
        v[i * n + q] = vip * ss + viq * vqq;
    }
}

/// Multiply by a unit phase so the first component above threshold becomes
/// real positive.
fn fix_phase(col: &mut [C64]) {
    for &x in col.iter() {
        if x.norm() > 1e-12 {
            let ph = x.conj() / x.norm();
            for y in col.iter_mut() {
                *y *= ph;
            }
            return;
        }
    }
}

fn lex_cmp(x: &[C64], y: &[C64]) -> std::cmp::Ordering {
    for (a, b) in x.iter().zip(y) {
        match a.re.total_cmp(&b.re) {
            std::cmp::Ordering::Equal => {}
            o => return o,
        }
        match a.im.total_cmp(&b.im) {
            std::cmp::Ordering::Equal => {}
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}
