//! State-level entanglement tests and the see-saw search engines.
//!
//! Exact certificates come only from spectra (PSD, PPT). Everything
//! heuristic (block-positivity refutation, one-copy distillability
//! witnesses, worst-case input search) is a seeded multi-restart see-saw
//! whose negative findings are returned as re-verifiable witnesses and whose
//! non-findings never upgrade to certificates.

use crate::bipartite::{partial_transpose, BipartiteDims, Subsystem};
use crate::channel::{depolarizing, tensor, Channel};
use crate::eig::min_eigenpair;
use crate::error::{Error, Result};
use crate::mat::{psd_floor, vec_norm, vec_normalize, C64, ComplexMatrix, ZERO};
use crate::random::{random_orthonormal_pair, random_state, rng_from_seed};
use crate::schmidt::schmidt_decompose;

/// Configuration for all heuristic searches. Identical seeds give identical
/// outputs.
#[derive(Debug, Clone, Copy)]
pub struct SeesawConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for SeesawConfig {
    fn default() -> Self {
        Self { restarts: 32, max_iters: 500, tol: 1e-9, seed: 0 }
    }
}

impl SeesawConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

#[derive(Debug, Clone)]
pub struct PptReport {
    pub min_pt_eigenvalue: f64,
    pub witness_eigenvector: Vec<C64>,
    pub is_ppt: bool,
}

const STATE_TOL: f64 = 1e-8;

fn check_state(rho: &ComplexMatrix) -> Result<()> {
    let dev = rho.hermiticity_deviation();
    let tol = STATE_TOL * rho.fro_norm().max(1.0);
    if dev > tol {
        return Err(Error::NotHermitian { deviation: dev, tol });
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(Error::NotAState((tr - crate::mat::ONE).norm()));
    }
    Ok(())
}

/// Full partial-transpose spectrum of a state across the given cut.
pub fn ppt_report(rho: &ComplexMatrix, dims: BipartiteDims) -> Result<PptReport> {
    check_state(rho)?;
    let pt = partial_transpose(rho, dims, Subsystem::B)?;
    let (min, vec) = min_eigenpair(&pt)?;
    Ok(PptReport {
        min_pt_eigenvalue: min,
        witness_eigenvector: vec,
        is_ppt: min >= -psd_floor(rho.fro_norm()),
    })
}

/// Exact separability decision in the PPT-equivalence regime dA*dB <= 6.
pub fn is_separable_low_dim(rho: &ComplexMatrix, dims: BipartiteDims) -> Result<bool> {
    if dims.total() > 6 {
        return Err(Error::SeparabilityUndecidable(dims.total()));
    }
    Ok(ppt_report(rho, dims)?.is_ppt)
}

#[derive(Debug, Clone)]
pub enum BlockPositivityVerdict {
    /// The operator itself is PSD, which is sufficient for block-positivity.
    CertifiedPsd,
    /// All restarts stayed above the floor; `margin` is the smallest product
    /// value found. This is evidence, not a proof.
    NumericallyBlockPositive { margin: f64 },
    /// A product vector with a strictly negative value, re-verifiable by
    /// direct evaluation.
    Refuted { a: Vec<C64>, b: Vec<C64>, value: f64 },
    Unknown,
}

/// <.  ox b| om |. ox b> as a dA x dA matrix.
fn contract_b(om: &ComplexMatrix, cut: BipartiteDims, b: &[C64]) -> ComplexMatrix {
    let (da, db) = (cut.da, cut.db);
    ComplexMatrix::from_fn(da, da, |m, n| {
        let mut acc = ZERO;
        for k in 0..db {
            let bk = b[k].conj();
            if bk == ZERO {
                continue;
            }
            for l in 0..db {
                acc += bk * om.get(m * db + k, n * db + l) * b[l];
            }
        }
        acc
    })
}

/// <a ox .| om |a ox .> as a dB x dB matrix.
fn contract_a(om: &ComplexMatrix, cut: BipartiteDims, a: &[C64]) -> ComplexMatrix {
    let (da, db) = (cut.da, cut.db);
    ComplexMatrix::from_fn(db, db, |k, l| {
        let mut acc = ZERO;
        for m in 0..da {
            let am = a[m].conj();
            if am == ZERO {
                continue;
            }
            for n in 0..da {
                acc += am * om.get(m * db + k, n * db + l) * a[n];
            }
        }
        acc
    })
}

fn lex_less(x: &[C64], y: &[C64]) -> bool {
    for (a, b) in x.iter().zip(y) {
        match a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)) {
            std::cmp::Ordering::Less => return true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    false
}

/// Decide whether `om` can be refuted as block-positive across `cut`.
///
/// A PSD spectrum certifies immediately. Otherwise a see-saw alternates
/// minimal-eigenvector updates of the two contracted matrices; a strictly
/// negative product value refutes, anything else stays heuristic.
pub fn block_positivity(
    om: &ComplexMatrix,
    cut: BipartiteDims,
    cfg: &SeesawConfig,
) -> Result<BlockPositivityVerdict> {
    cut.check_side(om)?;
    let dev = om.hermiticity_deviation();
    let htol = STATE_TOL * om.fro_norm().max(1.0);
    if dev > htol {
        return Err(Error::NotHermitian { deviation: dev, tol: htol });
    }

    let floor = psd_floor(om.fro_norm());
    let (gmin, gvec) = min_eigenpair(om)?;
    if gmin >= -floor {
        return Ok(BlockPositivityVerdict::CertifiedPsd);
    }

    let mut rng = rng_from_seed(cfg.seed);
    let mut best: Option<(f64, Vec<C64>, Vec<C64>)> = None;

    // Deterministic warm start: B-side marginal direction of the global
    // minimal eigenvector, then seeded random restarts.
    let warm = schmidt_decompose(&gvec, cut).ok().map(|s| s.right_basis[0].clone());
    let n_starts = cfg.restarts.max(1);
    for r in 0..n_starts {
        let mut b = match (&warm, r) {
            (Some(w), 0) if vec_norm(w) > 0.5 => w.clone(),
            _ => random_state(cut.db, &mut rng),
        };
        let mut a = vec![ZERO; cut.da];
        let mut prev = f64::INFINITY;
        let mut value = f64::INFINITY;
        for _ in 0..cfg.max_iters {
            let (va, anew) = min_eigenpair(&contract_b(om, cut, &b))?;
            a = anew;
            let (vb, bnew) = min_eigenpair(&contract_a(om, cut, &a))?;
            b = bnew;
            value = vb.min(va);
            if (prev - value).abs() <= cfg.tol {
                break;
            }
            prev = value;
        }
        let replace = match &best {
            None => true,
            Some((bv, ba, _)) => {
                value < *bv || (value == *bv && lex_less(&a, ba))
            }
        };
        if replace {
            best = Some((value, a, b));
        }
    }

    match best {
        Some((value, a, b)) if value < -floor => {
            Ok(BlockPositivityVerdict::Refuted { a, b, value })
        }
        Some((value, _, _)) => Ok(BlockPositivityVerdict::NumericallyBlockPositive {
            margin: value,
        }),
        None => Ok(BlockPositivityVerdict::Unknown),
    }
}

/// Direct evaluation of <a ox b| om |a ox b>, used to re-verify refutations.
pub fn product_value(om: &ComplexMatrix, a: &[C64], b: &[C64]) -> f64 {
    om.expectation(&crate::mat::kron_vec(a, b)) / (vec_norm(a) * vec_norm(b)).powi(2)
}

/// Search for a Schmidt-rank-2 vector with negative expectation on the
/// partially transposed state; `Some` certifies one-copy distillability,
/// `None` is only evidence.
pub fn refute_one_copy_undistillability(
    rho: &ComplexMatrix,
    dims: BipartiteDims,
    cfg: &SeesawConfig,
) -> Result<Option<(Vec<C64>, f64)>> {
    check_state(rho)?;
    if dims.da < 2 || dims.db < 2 {
        return Ok(None);
    }
    let pt = partial_transpose(rho, dims, Subsystem::B)?;
    let floor = psd_floor(rho.fro_norm());
    let (gmin, gvec) = min_eigenpair(&pt)?;
    if gmin >= -floor {
        // PPT forces every expectation nonnegative; no witness can exist.
        return Ok(None);
    }

    let mut rng = rng_from_seed(cfg.seed);
    let mut best: Option<(f64, Vec<C64>)> = None;

    // Warm start: B-side pair of the minimal PT eigenvector.
    let warm_pair = schmidt_decompose(&gvec, dims)
        .ok()
        .map(|s| (s.right_basis[0].clone(), s.right_basis[1].clone()));

    let n_starts = cfg.restarts.max(1);
    for r in 0..n_starts {
        let (mut b0, mut b1) = match (&warm_pair, r) {
            (Some((x, y)), 0) => (x.clone(), y.clone()),
            _ => random_orthonormal_pair(dims.db, &mut rng),
        };
        let mut psi: Vec<C64> = Vec::new();
        let mut prev = f64::INFINITY;
        let mut value = f64::INFINITY;
        for _ in 0..cfg.max_iters {
            // A-step: minimize over all vectors with B-support in span{b0,b1}.
            let (va, u) = min_eigenpair(&pair_contraction_b(&pt, dims, &b0, &b1))?;
            psi = assemble_from_b_pair(&u, dims, &b0, &b1);
            vec_normalize(&mut psi);
            value = va;

            // B-step: extract the A-side pair of the current iterate, then
            // minimize over its span symmetrically.
            let s = schmidt_decompose(&psi, dims)?;
            let (a0, a1) = (s.left_basis[0].clone(), s.left_basis[1].clone());
            let (vb, v) = min_eigenpair(&pair_contraction_a(&pt, dims, &a0, &a1))?;
            let mut psi_b = assemble_from_a_pair(&v, dims, &a0, &a1);
            vec_normalize(&mut psi_b);
            if vb < value {
                value = vb;
                // Re-extract a B-pair so the next A-step keeps improving.
                let s2 = schmidt_decompose(&psi_b, dims)?;
                b0 = s2.right_basis[0].clone();
                b1 = s2.right_basis[1].clone();
                psi = psi_b;
            }
            if (prev - value).abs() <= cfg.tol {
                break;
            }
            prev = value;
        }
        let replace = match &best {
            None => true,
            Some((bv, bp)) => value < *bv || (value == *bv && lex_less(&psi, bp)),
        };
        if replace {
            best = Some((value, psi));
        }
    }

    match best {
        Some((value, psi)) if value < -floor => Ok(Some((psi, value))),
        _ => Ok(None),
    }
}

/// 2dA x 2dA contraction <(r,m)| M |(s,n)> = <m ox b_r| M |n ox b_s>.
fn pair_contraction_b(
    m: &ComplexMatrix,
    dims: BipartiteDims,
    b0: &[C64],
    b1: &[C64],
) -> ComplexMatrix {
    let da = dims.da;
    let db = dims.db;
    let bs = [b0, b1];
    ComplexMatrix::from_fn(2 * da, 2 * da, |row, col| {
        let (r, mm) = (row / da, row % da);
        let (s, nn) = (col / da, col % da);
        let mut acc = ZERO;
        for k in 0..db {
            let bk = bs[r][k].conj();
            if bk == ZERO {
                continue;
            }
            for l in 0..db {
                acc += bk * m.get(mm * db + k, nn * db + l) * bs[s][l];
            }
        }
        acc
    })
}

fn assemble_from_b_pair(
    u: &[C64],
    dims: BipartiteDims,
    b0: &[C64],
    b1: &[C64],
) -> Vec<C64> {
    let (da, db) = (dims.da, dims.db);
    let bs = [b0, b1];
    let mut psi = vec![ZERO; da * db];
    for r in 0..2 {
        for m in 0..da {
            let c = u[r * da + m];
            if c == ZERO {
                continue;
            }
            for k in 0..db {
                psi[m * db + k] += c * bs[r][k];
            }
        }
    }
    psi
}

fn pair_contraction_a(
    m: &ComplexMatrix,
    dims: BipartiteDims,
    a0: &[C64],
    a1: &[C64],
) -> ComplexMatrix {
    let da = dims.da;
    let db = dims.db;
    let avs = [a0, a1];
    ComplexMatrix::from_fn(2 * db, 2 * db, |row, col| {
        let (r, kk) = (row / db, row % db);
        let (s, ll) = (col / db, col % db);
        let mut acc = ZERO;
        for mm in 0..da {
            let am = avs[r][mm].conj();
            if am == ZERO {
                continue;
            }
            for nn in 0..da {
                acc += am * m.get(mm * db + kk, nn * db + ll) * avs[s][nn];
            }
        }
        acc
    })
}

fn assemble_from_a_pair(
    v: &[C64],
    dims: BipartiteDims,
    a0: &[C64],
    a1: &[C64],
) -> Vec<C64> {
    let (da, db) = (dims.da, dims.db);
    let avs = [a0, a1];
    let mut psi = vec![ZERO; da * db];
    for r in 0..2 {
        for k in 0..db {
            let c = v[r * db + k];
            if c == ZERO {
                continue;
            }
            for m in 0..da {
                psi[m * db + k] += c * avs[r][m];
            }
        }
    }
    psi
}

/// Approximate min over pure inputs of the minimal PT eigenvalue of the
/// output. Pure inputs suffice: the minimal PT eigenvalue is concave in the
/// state and the channel is linear. The see-saw alternates the minimal PT
/// eigenvector of the output with the minimal eigenvector of the dual-map
/// pullback.
pub fn worst_case_output_pt(
    ch: &Channel,
    cut: BipartiteDims,
    cfg: &SeesawConfig,
) -> Result<(f64, Vec<C64>)> {
    worst_case_output_pt_with_starts(ch, cut, cfg, &[])
}

/// Same search with caller-provided deterministic warm starts prepended to
/// the random restarts.
pub fn worst_case_output_pt_with_starts(
    ch: &Channel,
    cut: BipartiteDims,
    cfg: &SeesawConfig,
    warm_starts: &[Vec<C64>],
) -> Result<(f64, Vec<C64>)> {
    if ch.d() != cut.total() {
        return Err(Error::DimensionMismatch(format!(
            "channel dimension {} does not match cut {}x{}",
            ch.d(),
            cut.da,
            cut.db
        )));
    }
    let dual = ch.dual()?;
    let mut rng = rng_from_seed(cfg.seed);
    let mut best: Option<(f64, Vec<C64>)> = None;

    let n_random = cfg.restarts.max(1);
    for r in 0..warm_starts.len() + n_random {
        let mut psi = if r < warm_starts.len() {
            warm_starts[r].clone()
        } else {
            random_state(ch.d(), &mut rng)
        };
        let mut prev = f64::INFINITY;
        let mut value = f64::INFINITY;
        for _ in 0..cfg.max_iters {
            let out = ch.apply(&ComplexMatrix::projector(&psi))?;
            let pt = partial_transpose(&out, cut, Subsystem::B)?;
            let (val, w) = min_eigenpair(&pt)?;
            value = val;
            if (prev - value).abs() <= cfg.tol {
                break;
            }
            prev = value;
            let pullback = dual.apply(&partial_transpose(
                &ComplexMatrix::projector(&w),
                cut,
                Subsystem::B,
            )?)?;
            let (_, next) = min_eigenpair(&pullback)?;
            psi = next;
        }
        let replace = match &best {
            None => true,
            Some((bv, bp)) => value < *bv || (value == *bv && lex_less(&psi, bp)),
        };
        if replace {
            best = Some((value, psi));
        }
    }
    let (value, psi) = best.expect("at least one restart");
    Ok((value, psi))
}

// --- restricted optimizer for the depolarizing pair ----------------------

/// Minimal PT eigenvalue of (Phi_q ox Phi_q)[|psi><psi|] for an input with
/// Schmidt weights `lambda`, using the sparse structure of the output in
/// the Schmidt product basis: the PT couples only the (i,j)/(j,i) index
/// pairs, so the spectrum splits into scalars and 2x2 blocks.
pub fn restricted_min_pt_eig(d: usize, q: f64, lambda: &[f64]) -> f64 {
    debug_assert_eq!(lambda.len(), d);
    let dd = d as f64;
    let unit = (1.0 - q) * (1.0 - q) / (dd * dd);
    let mut min = f64::INFINITY;
    for i in 0..d {
        let diag = q * q * lambda[i] + 2.0 * q * (1.0 - q) * lambda[i] / dd + unit;
        min = min.min(diag);
        for j in i + 1..d {
            let a = q * (1.0 - q) * (lambda[i] + lambda[j]) / dd + unit;
            let c = q * q * (lambda[i] * lambda[j]).sqrt();
            min = min.min(a - c);
        }
    }
    min
}

/// Minimize the restricted objective over the probability simplex: coarse
/// grid with step 0.05, then Nelder-Mead refinement on a square-normalized
/// parametrization until the simplex diameter in weight space drops below
/// 1e-6. Returns the minimum and the weights sorted nonincreasing.
pub fn schmidt_restricted_worst_case(d: usize, q: f64) -> Result<(f64, Vec<f64>)> {
    let lo = -1.0 / (d * d - 1) as f64;
    if q < lo - 1e-12 || q > 1.0 + 1e-12 {
        return Err(Error::OutsideCpRange { q, lo });
    }

    const GRID_STEPS: usize = 20; // step 0.05
    let mut best_lambda = vec![0.0; d];
    best_lambda[0] = 1.0;
    let mut best = f64::INFINITY;
    let mut comp = vec![0usize; d];
    grid_search(d, q, GRID_STEPS, 0, GRID_STEPS, &mut comp, &mut best, &mut best_lambda);

    let objective = |x: &[f64]| {
        let lam = square_normalize(x);
        restricted_min_pt_eig(d, q, &lam)
    };
    let x0: Vec<f64> = best_lambda.iter().map(|l| l.sqrt()).collect();
    let (xmin, fmin) = nelder_mead(&objective, &x0, 0.1, 1e-6, 400 * d);

    let mut lambda = square_normalize(&xmin);
    let value = fmin.min(best);
    if best < fmin {
        lambda = best_lambda;
    }
    lambda.sort_by(|a, b| b.total_cmp(a));
    Ok((value, lambda))
}

fn grid_search(
    d: usize,
    q: f64,
    steps: usize,
    idx: usize,
    remaining: usize,
    comp: &mut Vec<usize>,
    best: &mut f64,
    best_lambda: &mut Vec<f64>,
) {
    if idx == d - 1 {
        comp[idx] = remaining;
        let lambda: Vec<f64> = comp.iter().map(|&c| c as f64 / steps as f64).collect();
        let v = restricted_min_pt_eig(d, q, &lambda);
        if v < *best {
            *best = v;
            *best_lambda = lambda;
        }
        return;
    }
    for c in 0..=remaining {
        comp[idx] = c;
        grid_search(d, q, steps, idx + 1, remaining - c, comp, best, best_lambda);
    }
}

fn square_normalize(x: &[f64]) -> Vec<f64> {
    let s: f64 = x.iter().map(|v| v * v).sum();
    if s == 0.0 {
        let mut lam = vec![0.0; x.len()];
        lam[0] = 1.0;
        return lam;
    }
    x.iter().map(|v| v * v / s).collect()
}

/// Plain Nelder-Mead with standard coefficients. `scale` sets the initial
/// simplex edge, `diam_tol` the termination diameter measured in the
/// square-normalized weight space.
fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    scale: f64,
    diam_tol: f64,
    max_iters: usize,
) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n + 1);
    simplex.push((f(x0), x0.to_vec()));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += scale;
        simplex.push((f(&x), x));
    }

    for _ in 0..max_iters {
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
        let diam = simplex_diameter(&simplex);
        if diam < diam_tol {
            break;
        }
        let worst = simplex[n].clone();
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(_, x)| x[k]).sum::<f64>() / n as f64)
            .collect();

        let reflect: Vec<f64> =
            (0..n).map(|k| centroid[k] + (centroid[k] - worst.1[k])).collect();
        let fr = f(&reflect);
        if fr < simplex[0].0 {
            let expand: Vec<f64> =
                (0..n).map(|k| centroid[k] + 2.0 * (centroid[k] - worst.1[k])).collect();
            let fe = f(&expand);
            simplex[n] = if fe < fr { (fe, expand) } else { (fr, reflect) };
        } else if fr < simplex[n - 1].0 {
            simplex[n] = (fr, reflect);
        } else {
            let contract: Vec<f64> =
                (0..n).map(|k| centroid[k] + 0.5 * (worst.1[k] - centroid[k])).collect();
            let fc = f(&contract);
            if fc < worst.0 {
                simplex[n] = (fc, contract);
            } else {
                let best = simplex[0].1.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = (0..n)
                        .map(|k| best[k] + 0.5 * (entry.1[k] - best[k]))
                        .collect();
                    *entry = (f(&x), x);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (fv, x) = simplex.into_iter().next().unwrap();
    (x, fv)
}

fn simplex_diameter(simplex: &[(f64, Vec<f64>)]) -> f64 {
    let mut diam: f64 = 0.0;
    for i in 0..simplex.len() {
        let li = square_normalize(&simplex[i].1);
        for j in i + 1..simplex.len() {
            let lj = square_normalize(&simplex[j].1);
            let d = li
                .iter()
                .zip(&lj)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            diam = diam.max(d);
        }
    }
    diam
}

/// Convenience: the local pair Phi_q ox Phi_q on d x d.
pub fn depolarizing_pair(d: usize, q: f64) -> Result<Channel> {
    let phi = depolarizing(d, q)?;
    tensor(&phi, &phi)
}
