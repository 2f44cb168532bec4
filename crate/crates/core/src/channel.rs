//! Channel representations and the Choi calculus.
//!
//! A channel holds its input/output dimension (square maps only), an optional
//! Kraus list, and the state-normalized Choi operator. Both representations
//! are computed at construction time so values are immutable and freely
//! shareable afterwards. The Choi operator carries unit trace for
//! trace-preserving maps; the dimension factor of the reconstruction formula
//! lives inside `apply`.

use serde::{Deserialize, Serialize};

use crate::bipartite::{
    partial_trace, permute_systems, transpose_factor, BipartiteDims, Subsystem,
};
use crate::eig::eigh;
use crate::error::{Error, Result};
use crate::mat::{
    kron, max_entangled, psd_floor, C64, ComplexMatrix, ZERO,
};
use crate::random::SeededRng;

const TP_TOL: f64 = 1e-9;

/// State-normalized Choi operator on S x S', output system first.
#[derive(Debug, Clone)]
pub struct ChoiOperator {
    matrix: ComplexMatrix,
    d: usize,
}

impl ChoiOperator {
    pub fn new(matrix: ComplexMatrix, d: usize) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "Choi matrix side {} does not match d^2 = {}",
                matrix.rows(),
                d * d
            )));
        }
        let dev = matrix.hermiticity_deviation();
        let tol = 1e-8 * matrix.fro_norm().max(1.0);
        if dev > tol {
            return Err(Error::NotHermitian { deviation: dev, tol });
        }
        Ok(Self { matrix, d })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn dims(&self) -> BipartiteDims {
        BipartiteDims::new(self.d, self.d)
    }

    /// Minimal eigenvalue of the Choi matrix.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(eigh(&self.matrix)?.min())
    }

    /// Complete positivity of the represented map, via the PSD floor.
    pub fn is_psd(&self) -> Result<bool> {
        Ok(self.min_eigenvalue()? >= -psd_floor(self.matrix.fro_norm()))
    }

    /// tr_S(Omega) deviation from I/d; zero for trace-preserving maps.
    pub fn trace_preserving_deviation(&self) -> Result<f64> {
        let red = partial_trace(&self.matrix, self.dims(), Subsystem::A)?;
        let target = ComplexMatrix::identity(self.d).scale_re(1.0 / self.d as f64);
        Ok(red.max_abs_diff(&target))
    }
}

/// Choi operator of a map on a composite system A x B, stored in factor
/// order (A, B, A', B') so the partition AB|A'B' is a plain bipartite cut.
#[derive(Debug, Clone)]
pub struct CompositeChoi {
    matrix: ComplexMatrix,
    da: usize,
    db: usize,
}

impl CompositeChoi {
    /// Reinterpret the Choi operator of a channel on A x B. The composite
    /// S index a*dB+b already interleaves as (A, B, A', B').
    pub fn from_channel(ch: &Channel, cut: BipartiteDims) -> Result<Self> {
        if ch.d() != cut.total() {
            return Err(Error::DimensionMismatch(format!(
                "channel dimension {} does not match cut {}x{}",
                ch.d(),
                cut.da,
                cut.db
            )));
        }
        Ok(Self { matrix: ch.choi().matrix().clone(), da: cut.da, db: cut.db })
    }

    /// Local map: permute Omega1^{AA'} ox Omega2^{BB'} from (A,A',B,B')
    /// into the stored (A,B,A',B') order.
    pub fn from_local_parts(om1: &ChoiOperator, om2: &ChoiOperator) -> Result<Self> {
        let (da, db) = (om1.d(), om2.d());
        let prod = kron(om1.matrix(), om2.matrix());
        let matrix = permute_systems(&prod, &[da, da, db, db], &[0, 2, 1, 3])?;
        Ok(Self { matrix, da, db })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn factor_dims(&self) -> [usize; 4] {
        [self.da, self.db, self.da, self.db]
    }

    /// Cut AB|A'B' as a bipartite split of the stored matrix.
    pub fn output_input_cut(&self) -> BipartiteDims {
        BipartiteDims::new(self.da * self.db, self.da * self.db)
    }

    /// Transpose the output-side B factor only (not B').
    pub fn transpose_output_b(&self) -> Result<ComplexMatrix> {
        transpose_factor(&self.matrix, &self.factor_dims(), 1)
    }

    /// Transpose the output-side A factor only (not A').
    pub fn transpose_output_a(&self) -> Result<ComplexMatrix> {
        transpose_factor(&self.matrix, &self.factor_dims(), 0)
    }
}

/// A linear map on d x d operators, held as Kraus list and/or Choi operator.
#[derive(Debug, Clone)]
pub struct Channel {
    d: usize,
    kraus: Option<Vec<ComplexMatrix>>,
    choi: ChoiOperator,
    trace_preserving: bool,
    completely_positive: bool,
}

impl Channel {
    /// Build from a Kraus list; the Choi operator is computed eagerly.
    pub fn from_kraus(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::MissingKraus);
        }
        let d = kraus[0].rows();
        for k in &kraus {
            if !k.is_square() || k.rows() != d {
                return Err(Error::DimensionMismatch(
                    "Kraus operators must be square and equally sized".into(),
                ));
            }
        }
        let choi = choi_from_kraus_list(&kraus, d)?;
        let tp = kraus_tp_deviation(&kraus) <= TP_TOL;
        Ok(Self { d, kraus: Some(kraus), choi, trace_preserving: tp, completely_positive: true })
    }

    /// Build from a Choi operator; a Kraus list is extracted when the map
    /// is completely positive.
    pub fn from_choi(choi: ChoiOperator) -> Result<Self> {
        let cp = choi.is_psd()?;
        let kraus = if cp { Some(kraus_from_choi(&choi)?) } else { None };
        let tp = choi.trace_preserving_deviation()? <= TP_TOL;
        Ok(Self { d: choi.d(), kraus, choi, trace_preserving: tp, completely_positive: cp })
    }

    pub fn identity(d: usize) -> Self {
        Self::from_kraus(vec![ComplexMatrix::identity(d)]).expect("identity Kraus")
    }

    /// Unitary conjugation X -> U X U^dagger.
    pub fn unitary(u: ComplexMatrix) -> Result<Self> {
        Self::from_kraus(vec![u])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn kraus(&self) -> Option<&[ComplexMatrix]> {
        self.kraus.as_deref()
    }

    pub fn choi(&self) -> &ChoiOperator {
        &self.choi
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    pub fn is_completely_positive(&self) -> bool {
        self.completely_positive
    }

    /// Apply the map to a matrix. The Kraus path is used when available,
    /// otherwise the Choi reconstruction.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !x.is_square() || x.rows() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "input side {} does not match channel dimension {}",
                x.rows(),
                self.d
            )));
        }
        match &self.kraus {
            Some(ks) => {
                let mut out = ComplexMatrix::zeros(self.d, self.d);
                for k in ks {
                    out = out.add(&k.matmul(x).matmul(&k.dagger()));
                }
                Ok(out)
            }
            None => self.apply_via_choi(x),
        }
    }

    /// Phi[X] = d tr_{S'}[ Omega (I ox X^T) ].
    pub fn apply_via_choi(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if !x.is_square() || x.rows() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "input side {} does not match channel dimension {}",
                x.rows(),
                self.d
            )));
        }
        let ixt = kron(&ComplexMatrix::identity(self.d), &x.transpose());
        let prod = self.choi.matrix().matmul(&ixt);
        let red = partial_trace(&prod, self.choi.dims(), Subsystem::B)?;
        Ok(red.scale_re(self.d as f64))
    }

    /// Dual map with Kraus set {K_k^dagger}.
    pub fn dual(&self) -> Result<Self> {
        let ks = self.kraus.as_ref().ok_or(Error::MissingKraus)?;
        Self::from_kraus(ks.iter().map(ComplexMatrix::dagger).collect())
    }
}

fn kraus_tp_deviation(kraus: &[ComplexMatrix]) -> f64 {
    let d = kraus[0].rows();
    let mut acc = ComplexMatrix::zeros(d, d);
    for k in kraus {
        acc = acc.add(&k.dagger().matmul(k));
    }
    acc.max_abs_diff(&ComplexMatrix::identity(d))
}

/// Omega = (Phi ox Id)[|Psi+><Psi+|] = (1/d) sum_ij Phi[|i><j|] ox |i><j|.
fn choi_from_kraus_list(kraus: &[ComplexMatrix], d: usize) -> Result<ChoiOperator> {
    let n = d * d;
    let mut om = ComplexMatrix::zeros(n, n);
    // Rank-one sum over vectorized Kraus operators: row-major vec(K).
    for k in kraus {
        let vk: Vec<C64> = (0..n).map(|idx| k.get(idx / d, idx % d)).collect();
        for r in 0..n {
            if vk[r] == ZERO {
                continue;
            }
            for c in 0..n {
                let cur = om.get(r, c);
                om.set(r, c, cur + vk[r] * vk[c].conj());
            }
        }
    }
    ChoiOperator::new(om.scale_re(1.0 / d as f64), d)
}

/// Public entry point for the Choi construction.
pub fn choi_from_kraus(ch: &Channel) -> Result<ChoiOperator> {
    let ks = ch.kraus().ok_or(Error::MissingKraus)?;
    choi_from_kraus_list(ks, ch.d())
}

/// Spectral Kraus extraction; errors when the Choi operator has a
/// negative eigenvalue beyond the PSD floor.
pub fn kraus_from_choi(om: &ChoiOperator) -> Result<Vec<ComplexMatrix>> {
    let spec = eigh(om.matrix())?;
    let floor = psd_floor(om.matrix().fro_norm());
    if spec.min() < -floor {
        return Err(Error::NotCompletelyPositive { min_eig: spec.min() });
    }
    let d = om.d();
    let rank_tol = 1e-12 * om.matrix().fro_norm().max(1.0);
    let mut kraus = Vec::new();
    for (lam, v) in spec.eigenvalues.iter().zip(&spec.eigenvectors) {
        if *lam <= rank_tol {
            continue;
        }
        let scale = C64::new((lam * d as f64).sqrt(), 0.0);
        kraus.push(ComplexMatrix::from_fn(d, d, |a, i| scale * v[a * d + i]));
    }
    if kraus.is_empty() {
        // Zero map: keep a single zero Kraus operator so the list is nonempty.
        kraus.push(ComplexMatrix::zeros(d, d));
    }
    Ok(kraus)
}

/// Tensor product of two square channels.
pub fn tensor(ch1: &Channel, ch2: &Channel) -> Result<Channel> {
    match (ch1.kraus(), ch2.kraus()) {
        (Some(k1), Some(k2)) => {
            let mut ks = Vec::with_capacity(k1.len() * k2.len());
            for a in k1 {
                for b in k2 {
                    ks.push(kron(a, b));
                }
            }
            Channel::from_kraus(ks)
        }
        _ => {
            let comp = CompositeChoi::from_local_parts(ch1.choi(), ch2.choi())?;
            let d = ch1.d() * ch2.d();
            Channel::from_choi(ChoiOperator::new(comp.matrix().clone(), d)?)
        }
    }
}

/// Star-product concatenation: the Choi operator of Phi after Xi from the
/// Choi operators of the parts, by the six-index delta contraction.
pub fn compose_star(om_phi: &ChoiOperator, om_xi: &ChoiOperator) -> Result<ChoiOperator> {
    let d = om_phi.d();
    if om_xi.d() != d {
        return Err(Error::DimensionMismatch(format!(
            "star product needs equal dimensions, got {} and {}",
            d,
            om_xi.d()
        )));
    }
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for m in 0..d {
        for k in 0..d {
            for n in 0..d {
                for l in 0..d {
                    let mut acc = ZERO;
                    for i in 0..d {
                        for j in 0..d {
                            acc += om_phi.matrix().get(m * d + i, n * d + j)
                                * om_xi.matrix().get(i * d + k, j * d + l);
                        }
                    }
                    out.set(m * d + k, n * d + l, acc * d as f64);
                }
            }
        }
    }
    ChoiOperator::new(out, d)
}

/// Concatenation Phi after Xi on the Kraus level: {K_i L_j}.
pub fn compose_kraus(phi: &Channel, xi: &Channel) -> Result<Channel> {
    let kp = phi.kraus().ok_or(Error::MissingKraus)?;
    let kx = xi.kraus().ok_or(Error::MissingKraus)?;
    let mut ks = Vec::with_capacity(kp.len() * kx.len());
    for a in kp {
        for b in kx {
            ks.push(a.matmul(b));
        }
    }
    Channel::from_kraus(ks)
}

/// Depolarizing channel Phi_q[X] = q X + (1-q) tr[X] I/d, valid for
/// -1/(d^2-1) <= q <= 1.
pub fn depolarizing(d: usize, q: f64) -> Result<Channel> {
    let lo = -1.0 / (d * d - 1) as f64;
    if q < lo - 1e-12 || q > 1.0 + 1e-12 {
        return Err(Error::OutsideCpRange { q, lo });
    }
    Channel::from_choi(isotropic_choi(d, q)?)
}

/// Isotropic state q |Psi+><Psi+| + (1-q) I/d^2 as a Choi operator.
pub fn isotropic_choi(d: usize, q: f64) -> Result<ChoiOperator> {
    let proj = ComplexMatrix::projector(&max_entangled(d));
    let mix = ComplexMatrix::identity(d * d).scale_re((1.0 - q) / (d * d) as f64);
    ChoiOperator::new(proj.scale_re(q).add(&mix), d)
}

/// Random trace-preserving channel: Kraus blocks of a Haar-ish isometry.
pub fn random_channel(d: usize, n_kraus: usize, rng: &mut SeededRng) -> Channel {
    let cols = crate::random::random_isometry_columns(n_kraus * d, d, rng);
    let kraus: Vec<ComplexMatrix> = (0..n_kraus)
        .map(|k| ComplexMatrix::from_fn(d, d, |a, j| cols[j][k * d + a]))
        .collect();
    Channel::from_kraus(kraus).expect("isometry blocks form a TP Kraus set")
}

// --- file format ---------------------------------------------------------

/// On-disk channel description. Matrices are row-major lists of [re, im]
/// pairs; `kind: "kraus"` carries a list of such matrices.
#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ChannelFile {
    Kraus { d_in: usize, d_out: usize, data: Vec<Vec<[f64; 2]>> },
    Choi { d_in: usize, d_out: usize, data: Vec<[f64; 2]> },
}

fn matrix_from_pairs(rows: usize, cols: usize, data: &[[f64; 2]]) -> Result<ComplexMatrix> {
    if data.len() != rows * cols {
        return Err(Error::Parse(format!(
            "expected {} entries for a {}x{} matrix, got {}",
            rows * cols,
            rows,
            cols,
            data.len()
        )));
    }
    ComplexMatrix::from_rows(rows, cols, data.iter().map(|&[re, im]| C64::new(re, im)).collect())
}

fn matrix_to_pairs(m: &ComplexMatrix) -> Vec<[f64; 2]> {
    m.entries().iter().map(|z| [z.re, z.im]).collect()
}

/// Parse a channel from its JSON description. Non-trace-preserving Kraus
/// sets are rejected unless `allow_non_tp` is set.
pub fn channel_from_json(text: &str, allow_non_tp: bool) -> Result<Channel> {
    let file: ChannelFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    match file {
        ChannelFile::Kraus { d_in, d_out, data } => {
            if d_in != d_out {
                return Err(Error::Parse("only square channels (d_in = d_out) are supported".into()));
            }
            if data.is_empty() {
                return Err(Error::Parse("empty Kraus list".into()));
            }
            let kraus = data
                .iter()
                .map(|flat| matrix_from_pairs(d_out, d_in, flat))
                .collect::<Result<Vec<_>>>()?;
            let dev = kraus_tp_deviation(&kraus);
            if dev > TP_TOL && !allow_non_tp {
                return Err(Error::NotTracePreserving(dev));
            }
            Channel::from_kraus(kraus)
        }
        ChannelFile::Choi { d_in, d_out, data } => {
            if d_in != d_out {
                return Err(Error::Parse("only square channels (d_in = d_out) are supported".into()));
            }
            let n = d_in * d_in;
            let m = matrix_from_pairs(n, n, &data)?;
            let choi = ChoiOperator::new(m, d_in)?;
            let ch = Channel::from_choi(choi)?;
            if !ch.is_trace_preserving() && !allow_non_tp {
                return Err(Error::NotTracePreserving(
                    ch.choi().trace_preserving_deviation()?,
                ));
            }
            Ok(ch)
        }
    }
}

/// Serialize a channel to the JSON file format, preferring the Kraus form.
pub fn channel_to_json(ch: &Channel) -> String {
    let file = match ch.kraus() {
        Some(ks) => ChannelFile::Kraus {
            d_in: ch.d(),
            d_out: ch.d(),
            data: ks.iter().map(matrix_to_pairs).collect(),
        },
        None => ChannelFile::Choi {
            d_in: ch.d(),
            d_out: ch.d(),
            data: matrix_to_pairs(ch.choi().matrix()),
        },
    };
    serde_json::to_string_pretty(&file).expect("channel serialization")
}
