//! Acceptance gate: one test per criterion, each printing a pass/fail line.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use choi_channels::bipartite::partial_transpose;
use choi_channels::channel::{
    compose_kraus, compose_star, depolarizing, isotropic_choi, random_channel, Channel,
};
use choi_channels::classify::{
    conjecture_value, depolarizing_threshold, entanglement_binding_certify,
    classify_ppt_inducing, one_sided_ppt_inducing, VerdictTag,
};
use choi_channels::eig::eigh;
use choi_channels::entangle::{
    depolarizing_pair, refute_one_copy_undistillability, schmidt_restricted_worst_case,
    worst_case_output_pt_with_starts, SeesawConfig,
};
use choi_channels::mat::{kron, vec_normalize, C64, ComplexMatrix, ZERO};
use choi_channels::random::{random_density, random_state, random_unitary, rng_from_seed};
use choi_channels::{BipartiteDims, Subsystem};

fn report(id: u32, name: &str, f: impl FnOnce() -> String) {
    // write through the raw stream so the line shows without --nocapture
    use std::io::Write;
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(detail) => {
            let _ = writeln!(
                std::io::stderr(),
                "ACCEPTANCE {id:02} {name}: PASS ({detail})"
            );
        }
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "ACCEPTANCE {id:02} {name}: FAIL");
            std::panic::resume_unwind(e);
        }
    }
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_choi"))
}

fn cfg(restarts: usize, seed: u64) -> SeesawConfig {
    SeesawConfig { restarts, max_iters: 500, tol: 1e-10, seed }
}

/// Dense-eigensolver oracle: min PT eigenvalue of (Phi_q x Phi_q) applied to
/// the pure input with the given Schmidt weights.
fn dense_restricted_oracle(d: usize, q: f64, lambda: &[f64]) -> f64 {
    let pair = depolarizing_pair(d, q).unwrap();
    let mut psi = vec![ZERO; d * d];
    for i in 0..d {
        psi[i * d + i] = C64::new(lambda[i].max(0.0).sqrt(), 0.0);
    }
    let out = pair.apply(&ComplexMatrix::projector(&psi)).unwrap();
    let pt = partial_transpose(&out, BipartiteDims::new(d, d), Subsystem::B).unwrap();
    eigh(&pt).unwrap().min()
}

#[test]
fn criterion_01_qutrit_threshold() {
    report(1, "qutrit pair threshold", || {
        let expected = conjecture_value(3);
        let t = Instant::now();
        let out = bin().args(["threshold", "--d", "3"]).output().unwrap();
        let elapsed = t.elapsed();
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        let row = text.lines().nth(1).unwrap();
        let q_star: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((q_star - expected).abs() < 1e-3, "q_star {q_star} vs {expected}");
        assert!(elapsed.as_secs() < 60, "took {elapsed:?}");
        format!("q_star = {q_star:.6}, expected {expected:.6}, {elapsed:?}")
    });
}

#[test]
fn criterion_02_minimizer_profile() {
    report(2, "Schmidt profile argmin", || {
        let out = bin()
            .args(["profile", "--d", "3", "--q", "0.5"])
            .output()
            .unwrap();
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        let row = text
            .lines()
            .find(|l| l.ends_with(",argmin"))
            .expect("argmin row");
        let fields: Vec<f64> =
            row.split(',').take(4).map(|s| s.parse().unwrap()).collect();
        let mut lambda = fields[..3].to_vec();
        lambda.sort_by(|a, b| b.total_cmp(a));
        assert!((lambda[0] - 0.5).abs() < 1e-3, "lambda {lambda:?}");
        assert!((lambda[1] - 0.5).abs() < 1e-3, "lambda {lambda:?}");
        assert!(lambda[2].abs() < 1e-3, "lambda {lambda:?}");

        let value = fields[3];
        let oracle = dense_restricted_oracle(3, 0.5, &[0.5, 0.5, 0.0]);
        assert!((value - oracle).abs() < 1e-6, "{value} vs oracle {oracle}");
        assert!((value + 1.0 / 72.0).abs() < 1e-6, "{value} vs -1/72");
        format!("argmin = {lambda:?}, min = {value:.9} (oracle {oracle:.9})")
    });
}

#[test]
fn criterion_03_binding_flip() {
    report(3, "one-sided flip at 1/(d+1)", || {
        let mut details = Vec::new();
        for d in 2..=4usize {
            let flip = 1.0 / (d as f64 + 1.0);
            let eps = 1e-6;
            let below = one_sided_ppt_inducing(&depolarizing(d, flip - eps).unwrap(), d).unwrap();
            let above = one_sided_ppt_inducing(&depolarizing(d, flip + eps).unwrap(), d).unwrap();
            assert_eq!(below.tag, VerdictTag::Certified, "d={d} below");
            assert_eq!(above.tag, VerdictTag::Refuted, "d={d} above");
            // closed-form PT eigenvalue cross-check: (1-q)/d^2 - q/d
            for &q in &[flip - eps, flip + eps, 0.1, 0.6] {
                let dd = d as f64;
                let closed = (1.0 - q) / (dd * dd) - q / dd;
                let choi = isotropic_choi(d, q).unwrap();
                let pt = partial_transpose(
                    choi.matrix(),
                    BipartiteDims::new(d, d),
                    Subsystem::B,
                )
                .unwrap();
                let min = eigh(&pt).unwrap().min();
                assert!((min - closed).abs() < 1e-9, "d={d} q={q}: {min} vs {closed}");
            }
            details.push(format!("d={d}: flip at {flip:.6}"));
        }
        details.join("; ")
    });
}

#[test]
fn criterion_04_gap_reproduction() {
    report(4, "binding/PPT-inducing gap", || {
        let c = cfg(8, 0);
        let dims = BipartiteDims::new(3, 3);
        let mut details = Vec::new();
        for &q in &[0.30, 0.40, 0.47] {
            let single = entanglement_binding_certify(&depolarizing(3, q).unwrap(), &c).unwrap();
            assert_eq!(single.tag, VerdictTag::Refuted, "binding at q={q}");
            let pair = classify_ppt_inducing(&depolarizing_pair(3, q).unwrap(), dims, &c).unwrap();
            assert_ne!(pair.tag, VerdictTag::Refuted, "pair at q={q}");
            assert!(matches!(
                pair.tag,
                VerdictTag::Certified | VerdictTag::NumericallyLikely
            ));
            details.push(format!("q={q}: single refuted, pair {:?}", pair.tag));
        }
        details.join("; ")
    });
}

#[test]
fn criterion_05_conjecture_sweep() {
    report(5, "conjecture comparison d=2..4", || {
        let c = cfg(4, 0);
        let mut details = Vec::new();
        for d in 2..=4usize {
            let r = depolarizing_threshold(d, &c).unwrap();
            let diff = r.q_star - r.conjecture_value;
            assert!(diff.abs() < 1e-3, "d={d}: q_star {} vs {}", r.q_star, r.conjecture_value);
            // a genuine deficit beyond tolerance would falsify sufficiency
            assert!(diff > -1e-3, "conjecture violation flagged at d={d}");
            details.push(format!("d={d}: diff {diff:+.2e}"));
        }
        details.join("; ")
    });
}

#[test]
fn criterion_06_star_product_oracle() {
    report(6, "star product vs Kraus composition", || {
        let mut max_pair: f64 = 0.0;
        for i in 0..100u64 {
            let d = if i < 50 { 2 } else { 3 };
            let mut rng = rng_from_seed(1000 + i);
            let phi = random_channel(d, 2, &mut rng);
            let xi = random_channel(d, 2, &mut rng);
            let star = compose_star(phi.choi(), xi.choi()).unwrap();
            let composed = compose_kraus(&phi, &xi).unwrap();
            let diff = star_fro_distance(star.matrix(), composed.choi().matrix());
            assert!(diff <= 1e-10, "pair {i}: {diff}");
            max_pair = max_pair.max(diff);
        }
        let mut max_assoc: f64 = 0.0;
        for i in 0..20u64 {
            let d = if i < 10 { 2 } else { 3 };
            let mut rng = rng_from_seed(5000 + i);
            let a = random_channel(d, 2, &mut rng);
            let b = random_channel(d, 2, &mut rng);
            let c = random_channel(d, 2, &mut rng);
            let l = compose_star(&compose_star(a.choi(), b.choi()).unwrap(), c.choi()).unwrap();
            let r = compose_star(a.choi(), &compose_star(b.choi(), c.choi()).unwrap()).unwrap();
            let diff = star_fro_distance(l.matrix(), r.matrix());
            assert!(diff <= 1e-10, "triple {i}: {diff}");
            max_assoc = max_assoc.max(diff);
        }
        format!("100 pairs max {max_pair:.2e}, 20 triples max {max_assoc:.2e}")
    });
}

fn star_fro_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.sub(b).fro_norm()
}

#[test]
fn criterion_07_choi_calculus() {
    report(7, "Choi calculus roundtrips", || {
        // application roundtrip on the full matrix-unit basis
        let mut max_apply: f64 = 0.0;
        for i in 0..50u64 {
            let d = if i % 2 == 0 { 2 } else { 3 };
            let mut rng = rng_from_seed(100 + i);
            let ch = random_channel(d, 2, &mut rng);
            for a in 0..d {
                for b in 0..d {
                    let mut unit = ComplexMatrix::zeros(d, d);
                    unit.set(a, b, choi_channels::mat::ONE);
                    let diff = ch
                        .apply(&unit)
                        .unwrap()
                        .max_abs_diff(&ch.apply_via_choi(&unit).unwrap());
                    assert!(diff <= 1e-10);
                    max_apply = max_apply.max(diff);
                }
            }
            // kraus_from_choi o choi_from_kraus is the identity on Choi data
            let back = Channel::from_choi(ch.choi().clone()).unwrap();
            let rt = back.choi().matrix().max_abs_diff(ch.choi().matrix());
            assert!(rt <= 1e-10);
        }
        // PT involution and local-unitary spectrum invariance
        for i in 0..50u64 {
            let dims = BipartiteDims::new(2 + (i % 2) as usize, 3);
            let mut rng = rng_from_seed(300 + i);
            let rho = random_density(dims.total(), &mut rng);
            let pt = partial_transpose(&rho, dims, Subsystem::B).unwrap();
            let back = partial_transpose(&pt, dims, Subsystem::B).unwrap();
            assert!(back.max_abs_diff(&rho) <= 1e-10);

            let u = random_unitary(dims.da, &mut rng);
            let v = random_unitary(dims.db, &mut rng);
            let w = kron(&u, &v);
            let rot = w.matmul(&rho).matmul(&w.dagger());
            let s1 = eigh(&pt).unwrap().eigenvalues;
            let s2 = eigh(&partial_transpose(&rot, dims, Subsystem::B).unwrap())
                .unwrap()
                .eigenvalues;
            for (x, y) in s1.iter().zip(&s2) {
                assert!((x - y).abs() <= 1e-10);
            }
        }
        format!("50 channels, 50 PT/LU cases, max apply diff {max_apply:.2e}")
    });
}

#[test]
fn criterion_08_distillability_engines() {
    report(8, "one-copy witness engines", || {
        let c = cfg(8, 0);
        // Bell state: witness value exactly -1/2
        let bell = ComplexMatrix::projector(&choi_channels::mat::max_entangled(2));
        let dims2 = BipartiteDims::new(2, 2);
        let (_, value) = refute_one_copy_undistillability(&bell, dims2, &c)
            .unwrap()
            .expect("bell witness");
        assert!((value + 0.5).abs() < 1e-9, "bell value {value}");

        // separable (hence PPT) states never yield a witness
        for i in 0..50u64 {
            let d = if i % 2 == 0 { 2 } else { 3 };
            let dims = BipartiteDims::new(d, d);
            let mut rng = rng_from_seed(700 + i);
            let mut rho = ComplexMatrix::zeros(d * d, d * d);
            for _ in 0..8 {
                let a = random_state(d, &mut rng);
                let b = random_state(d, &mut rng);
                let mut prod = vec![ZERO; d * d];
                for x in 0..d {
                    for y in 0..d {
                        prod[x * d + y] = a[x] * b[y];
                    }
                }
                vec_normalize(&mut prod);
                rho = rho.add(&ComplexMatrix::projector(&prod));
            }
            rho = rho.scale_re(1.0 / 8.0);
            assert!(
                refute_one_copy_undistillability(&rho, dims, &c).unwrap().is_none(),
                "separable case {i} produced a witness"
            );
        }

        // isotropic d=3 q=0.5: witness value -1/9
        let iso = isotropic_choi(3, 0.5).unwrap();
        let (_, iso_value) =
            refute_one_copy_undistillability(iso.matrix(), BipartiteDims::new(3, 3), &c)
                .unwrap()
                .expect("isotropic witness");
        assert!((iso_value + 1.0 / 9.0).abs() < 1e-6, "isotropic value {iso_value}");
        format!("bell {value:.9}, isotropic {iso_value:.9}, 50 PPT cases clean")
    });
}

#[test]
fn criterion_09_restricted_vs_unrestricted() {
    report(9, "restricted vs unrestricted optimizer", || {
        let mut max_gap: f64 = 0.0;
        for d in 2..=3usize {
            let dims = BipartiteDims::new(d, d);
            let c = cfg(2, 0);
            for step in 0..20 {
                let q = step as f64 / 19.0 * 0.95;
                let (restricted, lambda) = schmidt_restricted_worst_case(d, q).unwrap();
                let pair = depolarizing_pair(d, q).unwrap();
                let mut warm = vec![ZERO; d * d];
                for i in 0..d {
                    warm[i * d + i] = C64::new(lambda[i].max(0.0).sqrt(), 0.0);
                }
                let (unrestricted, _) =
                    worst_case_output_pt_with_starts(&pair, dims, &c, &[warm]).unwrap();
                let gap = (restricted - unrestricted).abs();
                assert!(gap < 1e-6, "d={d} q={q}: {restricted} vs {unrestricted}");
                max_gap = max_gap.max(gap);
            }
        }
        format!("40 grid points, max gap {max_gap:.2e}")
    });
}

#[test]
fn criterion_10_determinism() {
    report(10, "byte-identical reruns", || {
        let dir = tempfile::tempdir().unwrap();
        let commands: Vec<Vec<String>> = vec![
            vec!["threshold", "--d", "3", "--seed", "11"],
            vec!["sweep", "--d", "3", "--qmin", "0.0", "--qmax", "0.6", "--steps", "13", "--seed", "11"],
            vec!["classify", "--family", "depolarizing2", "--d", "3", "--q", "0.48", "--seed", "11", "--format", "json"],
            vec!["conjecture", "--dmax", "3", "--seed", "11"],
        ]
        .into_iter()
        .map(|v| v.into_iter().map(String::from).collect())
        .collect();
        for (i, args) in commands.iter().enumerate() {
            let f1 = dir.path().join(format!("a{i}"));
            let f2 = dir.path().join(format!("b{i}"));
            for f in [&f1, &f2] {
                let st = bin()
                    .args(args)
                    .arg("--out")
                    .arg(f)
                    .status()
                    .unwrap();
                assert!(st.success(), "command {i} failed");
            }
            let b1 = std::fs::read(&f1).unwrap();
            let b2 = std::fs::read(&f2).unwrap();
            assert_eq!(b1, b2, "command {i} output differs between runs");
            assert!(!b1.is_empty());
        }
        format!("{} commands byte-identical", commands.len())
    });
}
