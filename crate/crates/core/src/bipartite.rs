//! Partial operations on bipartite (and multi-factor) index structures.
//!
//! One global convention: a composite index on A x B is `i*dB + k`, first
//! factor slowest. All partial transposes, partial traces and system
//! permutations in the crate use it.

use crate::error::{Error, Result};
use crate::mat::{C64, ComplexMatrix, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipartiteDims {
    pub da: usize,
    pub db: usize,
}

impl BipartiteDims {
    pub fn new(da: usize, db: usize) -> Self {
        assert!(da >= 1 && db >= 1);
        Self { da, db }
    }

    pub fn total(&self) -> usize {
        self.da * self.db
    }

    pub fn check_side(&self, m: &ComplexMatrix) -> Result<()> {
        if !m.is_square() || m.rows() != self.total() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix does not match bipartite dims {}x{}",
                m.rows(),
                m.cols(),
                self.da,
                self.db
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Transpose the selected tensor factor.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dims: BipartiteDims,
    which: Subsystem,
) -> Result<ComplexMatrix> {
    dims.check_side(m)?;
    let (da, db) = (dims.da, dims.db);
    let n = dims.total();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..da {
        for k in 0..db {
            for j in 0..da {
                for l in 0..db {
                    let v = m.get(i * db + k, j * db + l);
                    let (r, c) = match which {
                        Subsystem::A => (j * db + k, i * db + l),
                        Subsystem::B => (i * db + l, j * db + k),
                    };
                    out.set(r, c, v);
                }
            }
        }
    }
    Ok(out)
}

/// Trace out the selected factor, returning the reduced matrix on the other.
pub fn partial_trace(
    m: &ComplexMatrix,
    dims: BipartiteDims,
    which: Subsystem,
) -> Result<ComplexMatrix> {
    dims.check_side(m)?;
    let (da, db) = (dims.da, dims.db);
    match which {
        Subsystem::B => {
            let mut out = ComplexMatrix::zeros(da, da);
            for i in 0..da {
                for j in 0..da {
                    let mut acc = ZERO;
                    for k in 0..db {
                        acc += m.get(i * db + k, j * db + k);
                    }
                    out.set(i, j, acc);
                }
            }
            Ok(out)
        }
        Subsystem::A => {
            let mut out = ComplexMatrix::zeros(db, db);
            for k in 0..db {
                for l in 0..db {
                    let mut acc = ZERO;
                    for i in 0..da {
                        acc += m.get(i * db + k, i * db + l);
                    }
                    out.set(k, l, acc);
                }
            }
            Ok(out)
        }
    }
}

/// Reorder the tensor factors of a square matrix on `dims[0] x dims[1] x ...`.
/// `perm[p] = old position of the factor now at position p`.
pub fn permute_systems(m: &ComplexMatrix, dims: &[usize], perm: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix does not match factor dims {:?}",
            m.rows(),
            m.cols(),
            dims
        )));
    }
    assert_eq!(dims.len(), perm.len());
    let nf = dims.len();
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();

    // old multi-index -> old flat index strides
    let mut old_strides = vec![1usize; nf];
    for f in (0..nf.saturating_sub(1)).rev() {
        old_strides[f] = old_strides[f + 1] * dims[f + 1];
    }

    let mut out = ComplexMatrix::zeros(total, total);
    let mut new_multi_r = vec![0usize; nf];
    for r in 0..total {
        // decode r in the permuted dimension order
        let mut rem = r;
        for f in (0..nf).rev() {
            new_multi_r[f] = rem % new_dims[f];
            rem /= new_dims[f];
        }
        let old_r: usize = (0..nf).map(|f| new_multi_r[f] * old_strides[perm[f]]).sum();
        let mut new_multi_c = vec![0usize; nf];
        for c in 0..total {
            let mut rem = c;
            for f in (0..nf).rev() {
                new_multi_c[f] = rem % new_dims[f];
                rem /= new_dims[f];
            }
            let old_c: usize = (0..nf).map(|f| new_multi_c[f] * old_strides[perm[f]]).sum();
            out.set(r, c, m.get(old_r, old_c));
        }
    }
    Ok(out)
}

/// Transpose one factor of a multi-factor square matrix, leaving the rest
/// untouched.
pub fn transpose_factor(
    m: &ComplexMatrix,
    dims: &[usize],
    which: usize,
) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if !m.is_square() || m.rows() != total {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix does not match factor dims {:?}",
            m.rows(),
            m.cols(),
            dims
        )));
    }
    assert!(which < dims.len());
    let nf = dims.len();
    let mut strides = vec![1usize; nf];
    for f in (0..nf.saturating_sub(1)).rev() {
        strides[f] = strides[f + 1] * dims[f + 1];
    }
    let stride = strides[which];
    let dw = dims[which];
    let mut out = ComplexMatrix::zeros(total, total);
    for r in 0..total {
        let rw = (r / stride) % dw;
        let r_base = r - rw * stride;
        for c in 0..total {
            let cw = (c / stride) % dw;
            let c_base = c - cw * stride;
            out.set(r_base + cw * stride, c_base + rw * stride, m.get(r, c));
        }
    }
    Ok(out)
}

/// Same reordering for a vector on the factor product.
pub fn permute_vector(v: &[C64], dims: &[usize], perm: &[usize]) -> Vec<C64> {
    let total: usize = dims.iter().product();
    assert_eq!(v.len(), total);
    let nf = dims.len();
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut old_strides = vec![1usize; nf];
    for f in (0..nf.saturating_sub(1)).rev() {
        old_strides[f] = old_strides[f + 1] * dims[f + 1];
    }
    let mut out = vec![ZERO; total];
    let mut multi = vec![0usize; nf];
    for (r, slot) in out.iter_mut().enumerate() {
        let mut rem = r;
        for f in (0..nf).rev() {
            multi[f] = rem % new_dims[f];
            rem /= new_dims[f];
        }
        let old_r: usize = (0..nf).map(|f| multi[f] * old_strides[perm[f]]).sum();
        *slot = v[old_r];
    }
    out
}
