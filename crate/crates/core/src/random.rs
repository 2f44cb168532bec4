//! Seeded random states, unitaries and channels for searches and tests.
//!
//! Everything is driven by `ChaCha8Rng` so identical seeds give identical
//! draws on every platform.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::mat::{vec_inner, vec_norm, vec_normalize, vec_sub_scaled, C64, ComplexMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut SeededRng) -> f64 {
    // Box-Muller; avoids pulling in a distributions dependency for one draw.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn gaussian_c64(rng: &mut SeededRng) -> C64 {
    C64::new(gaussian(rng), gaussian(rng))
}

/// Haar-random pure state: normalized complex Gaussian components.
pub fn random_state(dim: usize, rng: &mut SeededRng) -> Vec<C64> {
    let mut v: Vec<C64> = (0..dim).map(|_| gaussian_c64(rng)).collect();
    vec_normalize(&mut v);
    v
}

/// A pair of orthonormal vectors.
pub fn random_orthonormal_pair(dim: usize, rng: &mut SeededRng) -> (Vec<C64>, Vec<C64>) {
    assert!(dim >= 2);
    let a = random_state(dim, rng);
    loop {
        let mut b = random_state(dim, rng);
        let ip = vec_inner(&a, &b);
        vec_sub_scaled(&mut b, &a, ip);
        if vec_norm(&b) > 1e-6 {
            vec_normalize(&mut b);
            return (a, b);
        }
    }
}

/// Haar-ish random unitary: Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary(dim: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let cols = random_isometry_columns(dim, dim, rng);
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..dim {
            u.set(i, j, col[i]);
        }
    }
    u
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian(dim: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        h.set(i, i, C64::new(gaussian(rng), 0.0));
        for j in i + 1..dim {
            let z = gaussian_c64(rng);
            h.set(i, j, z);
            h.set(j, i, z.conj());
        }
    }
    h
}

/// Random density matrix: normalized G G^dagger.
pub fn random_density(dim: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| gaussian_c64(rng));
    let rho = g.matmul(&g.dagger());
    let tr = rho.trace().re;
    rho.scale_re(1.0 / tr)
}

/// Orthonormal columns of a rows x cols complex Gaussian matrix
/// (rows >= cols), returned column by column.
pub fn random_isometry_columns(rows: usize, cols: usize, rng: &mut SeededRng) -> Vec<Vec<C64>> {
    assert!(rows >= cols);
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(cols);
    while out.len() < cols {
        let mut v: Vec<C64> = (0..rows).map(|_| gaussian_c64(rng)).collect();
        for prev in &out {
            let ip = vec_inner(prev, &v);
            vec_sub_scaled(&mut v, prev, ip);
        }
        if vec_norm(&v) > 1e-8 {
            vec_normalize(&mut v);
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_draws_are_reproducible() {
        let a = random_state(5, &mut rng_from_seed(42));
        let b = random_state(5, &mut rng_from_seed(42));
        assert_eq!(a, b);
    }

    #[test]
    fn unitary_is_unitary() {
        let u = random_unitary(4, &mut rng_from_seed(1));
        let prod = u.dagger().matmul(&u);
        assert!(prod.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-10);
    }

    #[test]
    fn density_is_a_state() {
        let rho = random_density(3, &mut rng_from_seed(2));
        assert!(rho.is_hermitian(1e-12));
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        let spec = crate::eig::eigh(&rho).unwrap();
        assert!(spec.min() >= -1e-12);
    }
}
