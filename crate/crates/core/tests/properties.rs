//! Property-based invariants of the tensor calculus, the Choi
//! correspondence, and the classification pipelines.

use choi_channels::bipartite::{partial_trace, partial_transpose};
use choi_channels::channel::{
    compose_kraus, compose_star, depolarizing, random_channel, tensor, Channel,
};
use choi_channels::classify::{classify_ppt_inducing, one_sided_ppt_inducing, VerdictTag};
use choi_channels::eig::eigh;
use choi_channels::entangle::{depolarizing_pair, SeesawConfig};
use choi_channels::mat::{kron, vec_normalize, C64, ComplexMatrix};
use choi_channels::random::{random_density, random_hermitian, random_unitary, rng_from_seed};
use choi_channels::{BipartiteDims, Subsystem};

use proptest::prelude::*;

fn random_matrix(n: usize, seed: u64) -> ComplexMatrix {
    use rand::Rng;
    let mut rng = rng_from_seed(seed);
    ComplexMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kron_is_associative(seed in 0u64..1000, da in 2usize..4, db in 2usize..4) {
        let a = random_matrix(da, seed);
        let b = random_matrix(db, seed.wrapping_add(1));
        let c = random_matrix(2, seed.wrapping_add(2));
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(left.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn partial_transpose_involution_and_structure(seed in 0u64..1000, da in 2usize..4, db in 2usize..4) {
        let dims = BipartiteDims::new(da, db);
        let mut rng = rng_from_seed(seed);
        let rho = random_density(da * db, &mut rng);
        let pt = partial_transpose(&rho, dims, Subsystem::B).unwrap();
        // involution
        let back = partial_transpose(&pt, dims, Subsystem::B).unwrap();
        prop_assert!(back.max_abs_diff(&rho) < 1e-13);
        // Hermiticity and trace preserved
        prop_assert!(pt.hermiticity_deviation() < 1e-13);
        prop_assert!((pt.trace() - rho.trace()).norm() < 1e-13);
        // T_A then T_B is the full transpose
        let both = partial_transpose(&pt, dims, Subsystem::A).unwrap();
        prop_assert!(both.max_abs_diff(&rho.transpose()) < 1e-13);
    }

    #[test]
    fn partial_trace_adjoint_identity(seed in 0u64..1000, da in 2usize..4, db in 2usize..4) {
        // tr[(A ox I) M] = tr[A tr_B M]
        let dims = BipartiteDims::new(da, db);
        let a = random_matrix(da, seed);
        let m = random_matrix(da * db, seed.wrapping_add(9));
        let lhs = kron(&a, &ComplexMatrix::identity(db)).matmul(&m).trace();
        let rhs = a.matmul(&partial_trace(&m, dims, Subsystem::B).unwrap()).trace();
        prop_assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn local_unitaries_preserve_pt_spectrum(seed in 0u64..1000, da in 2usize..4, db in 2usize..4) {
        let dims = BipartiteDims::new(da, db);
        let mut rng = rng_from_seed(seed);
        let rho = random_density(da * db, &mut rng);
        let u = random_unitary(da, &mut rng);
        let v = random_unitary(db, &mut rng);
        let w = kron(&u, &v);
        let rot = w.matmul(&rho).matmul(&w.dagger());
        let s1 = eigh(&partial_transpose(&rho, dims, Subsystem::B).unwrap()).unwrap().eigenvalues;
        let s2 = eigh(&partial_transpose(&rot, dims, Subsystem::B).unwrap()).unwrap().eigenvalues;
        for (x, y) in s1.iter().zip(&s2) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn star_product_matches_kraus_composition(seed in 0u64..1000, d in 2usize..4) {
        let mut rng = rng_from_seed(seed);
        let phi = random_channel(d, 2, &mut rng);
        let xi = random_channel(d, 2, &mut rng);
        let star = compose_star(phi.choi(), xi.choi()).unwrap();
        let composed = compose_kraus(&phi, &xi).unwrap();
        prop_assert!(star.matrix().max_abs_diff(composed.choi().matrix()) < 1e-10);
    }

    #[test]
    fn star_product_is_associative(seed in 0u64..1000, d in 2usize..4) {
        let mut rng = rng_from_seed(seed);
        let a = random_channel(d, 2, &mut rng);
        let b = random_channel(d, 2, &mut rng);
        let c = random_channel(d, 2, &mut rng);
        let left = compose_star(&compose_star(a.choi(), b.choi()).unwrap(), c.choi()).unwrap();
        let right = compose_star(a.choi(), &compose_star(b.choi(), c.choi()).unwrap()).unwrap();
        prop_assert!(left.matrix().max_abs_diff(right.matrix()) < 1e-10);
    }

    #[test]
    fn tensor_and_compose_commute(seed in 0u64..1000) {
        // (Phi1 ox Phi2) o (Xi1 ox Xi2) = (Phi1 o Xi1) ox (Phi2 o Xi2)
        let mut rng = rng_from_seed(seed);
        let p1 = random_channel(2, 2, &mut rng);
        let p2 = random_channel(3, 2, &mut rng);
        let x1 = random_channel(2, 2, &mut rng);
        let x2 = random_channel(3, 2, &mut rng);
        let lhs = compose_kraus(&tensor(&p1, &p2).unwrap(), &tensor(&x1, &x2).unwrap()).unwrap();
        let rhs = tensor(&compose_kraus(&p1, &x1).unwrap(), &compose_kraus(&p2, &x2).unwrap())
            .unwrap();
        prop_assert!(lhs.choi().matrix().max_abs_diff(rhs.choi().matrix()) < 1e-10);
    }

    #[test]
    fn choi_application_inverts_on_matrix_units(seed in 0u64..1000, d in 2usize..4) {
        let mut rng = rng_from_seed(seed);
        let ch = random_channel(d, 2, &mut rng);
        for a in 0..d {
            for b in 0..d {
                let mut unit = ComplexMatrix::zeros(d, d);
                unit.set(a, b, choi_channels::mat::ONE);
                let direct = ch.apply(&unit).unwrap();
                let via_choi = ch.apply_via_choi(&unit).unwrap();
                prop_assert!(direct.max_abs_diff(&via_choi) < 1e-11);
            }
        }
    }

    #[test]
    fn dual_trace_pairing(seed in 0u64..1000, d in 2usize..4) {
        // tr[Y' Phi[X]] = tr[Phi_dual[Y'] X] with Y' Hermitian
        let mut rng = rng_from_seed(seed);
        let ch = random_channel(d, 2, &mut rng);
        let dual = ch.dual().unwrap();
        let x = random_hermitian(d, &mut rng);
        let y = random_hermitian(d, &mut rng);
        let lhs = y.matmul(&ch.apply(&x).unwrap()).trace();
        let rhs = dual.apply(&y).unwrap().matmul(&x).trace();
        prop_assert!((lhs - rhs).norm() < 1e-11);
    }

    #[test]
    fn eigh_reconstructs(seed in 0u64..1000, n in 2usize..8) {
        let mut rng = rng_from_seed(seed);
        let h = random_hermitian(n, &mut rng);
        let spec = eigh(&h).unwrap();
        prop_assert!(spec.reconstruct().max_abs_diff(&h) < 1e-11);
        for w in spec.eigenvalues.windows(2) {
            prop_assert!(w[0] <= w[1] + 1e-12);
        }
    }

    #[test]
    fn schmidt_reassembles(seed in 0u64..1000, da in 2usize..4, db in 2usize..4) {
        use rand::Rng;
        let dims = BipartiteDims::new(da, db);
        let mut rng = rng_from_seed(seed);
        let mut psi: Vec<C64> = (0..da * db)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        vec_normalize(&mut psi);
        let s = choi_channels::schmidt::schmidt_decompose(&psi, dims).unwrap();
        let back = s.reassemble();
        let overlap = choi_channels::mat::vec_inner(&back, &psi).norm();
        prop_assert!((overlap - 1.0).abs() < 1e-10);
        let total: f64 = s.coefficients.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-10);
    }
}

#[test]
fn one_sided_exact_test_agrees_with_pair_classification() {
    // one_sided_ppt_inducing(Phi, dB = dA) vs classify_ppt_inducing(Phi ox Id)
    let cfg = SeesawConfig { restarts: 6, max_iters: 300, tol: 1e-10, seed: 0 };
    for d in 2..=3usize {
        let flip = 1.0 / (d as f64 + 1.0);
        for step in 0..8 {
            let q = step as f64 / 7.0 * 0.9;
            let phi = depolarizing(d, q).unwrap();
            let one_sided = one_sided_ppt_inducing(&phi, d).unwrap();
            let pair = tensor(&phi, &Channel::identity(d)).unwrap();
            let full =
                classify_ppt_inducing(&pair, BipartiteDims::new(d, d), &cfg).unwrap();
            if q < flip - 1e-6 {
                assert_eq!(one_sided.tag, VerdictTag::Certified, "d={d} q={q}");
                assert_ne!(full.tag, VerdictTag::Refuted, "d={d} q={q}");
            }
            if q > flip + 1e-6 {
                assert_eq!(one_sided.tag, VerdictTag::Refuted, "d={d} q={q}");
                assert_eq!(full.tag, VerdictTag::Refuted, "d={d} q={q}");
            }
        }
    }
}

#[test]
fn depolarizing_verdict_monotone_in_q() {
    // never Refuted below a q that is Certified or NumericallyLikely
    let cfg = SeesawConfig { restarts: 4, max_iters: 300, tol: 1e-10, seed: 0 };
    let dims = BipartiteDims::new(3, 3);
    let mut seen_refuted = false;
    for step in 0..13 {
        let q = step as f64 * 0.05;
        let v = classify_ppt_inducing(&depolarizing_pair(3, q).unwrap(), dims, &cfg).unwrap();
        match v.tag {
            VerdictTag::Refuted => seen_refuted = true,
            VerdictTag::Certified | VerdictTag::NumericallyLikely => {
                assert!(!seen_refuted, "verdict not monotone at q = {q}");
            }
            VerdictTag::Unknown => {}
        }
    }
    assert!(seen_refuted, "large q must refute");
}
