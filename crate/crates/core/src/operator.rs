//! Quantum data model: Hermitian operators, states, POVMs and assemblages.

use nalgebra::{DMatrix, Matrix3, Vector3};

use crate::error::{invalid, mismatch, CoreError, Result};
use crate::linalg::{self, c, CMat, CVec, Subsystem};

/// Largest tolerated anti-Hermitian residue before construction fails.
pub const HERMITICITY_TOL: f64 = 1e-6;
/// Smallest eigenvalue accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-9;
pub const POVM_SUM_TOL: f64 = 1e-8;
pub const NO_SIGNALLING_TOL: f64 = 1e-8;

fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    m: CMat,
}

impl HermitianOperator {
    /// Symmetrizes `(M + M†)/2`; fails when `M` is visibly non-Hermitian.
    pub fn new(m: CMat) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return mismatch(format!("operator must be square and nonempty, got {:?}", m.shape()));
        }
        let residue = max_abs(&(&m - m.adjoint())) * 0.5;
        if residue > HERMITICITY_TOL || m.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return invalid(format!("anti-Hermitian residue {residue:.3e} exceeds {HERMITICITY_TOL:.0e}"));
        }
        Ok(Self {
            m: linalg::hermitian_part(&m),
        })
    }

    pub fn from_real(m: DMatrix<f64>) -> Result<Self> {
        Self::new(linalg::real(&m))
    }

    pub fn identity(d: usize) -> Self {
        Self { m: linalg::identity(d) }
    }

    pub fn zeros(d: usize) -> Self {
        Self { m: CMat::zeros(d, d) }
    }

    /// Skips validation; the caller guarantees Hermiticity.
    pub(crate) fn raw(m: CMat) -> Self {
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn into_matrix(self) -> CMat {
        self.m
    }

    pub fn trace(&self) -> f64 {
        linalg::trace_re(&self.m)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::eigvals(&self.m).iter().copied().collect()
    }

    pub fn min_eig(&self) -> f64 {
        linalg::min_eig(&self.m)
    }

    pub fn is_psd(&self) -> bool {
        self.min_eig() >= -PSD_TOL
    }
}

/// A positive semidefinite operator with trace at most one. Conditional
/// states of an assemblage are subnormalized and may vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    op: HermitianOperator,
    trace: f64,
}

impl DensityMatrix {
    /// A state with `0 < Tr ρ ≤ 1`.
    pub fn new(m: CMat) -> Result<Self> {
        let out = Self::subnormalized(m)?;
        if out.trace <= 0.0 {
            return invalid("density matrix has zero trace");
        }
        Ok(out)
    }

    /// Accepts `0 ≤ Tr ρ ≤ 1`, as needed for assemblage members.
    pub fn subnormalized(m: CMat) -> Result<Self> {
        let op = HermitianOperator::new(m)?;
        let min = op.min_eig();
        if min < -PSD_TOL {
            return invalid(format!("operator is not PSD (min eigenvalue {min:.3e})"));
        }
        let trace = op.trace();
        if trace > 1.0 + PSD_TOL {
            return invalid(format!("trace {trace} exceeds 1"));
        }
        Ok(Self { op, trace })
    }

    pub fn pure(v: &CVec) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 {
            return invalid("zero state vector");
        }
        Self::new(linalg::outer(&(v / c(n, 0.0))))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            op: HermitianOperator::raw(linalg::identity(d) / c(d as f64, 0.0)),
            trace: 1.0,
        }
    }

    pub(crate) fn raw(m: CMat) -> Self {
        let trace = linalg::trace_re(&m);
        Self {
            op: HermitianOperator::raw(m),
            trace,
        }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn matrix(&self) -> &CMat {
        self.op.matrix()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn purity(&self) -> f64 {
        linalg::trace_prod(self.matrix(), self.matrix())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<HermitianOperator>,
}

impl Povm {
    pub fn new(effects: Vec<HermitianOperator>) -> Result<Self> {
        if effects.len() < 2 {
            return invalid("a POVM needs at least two outcomes");
        }
        let d = effects[0].dim();
        if effects.iter().any(|e| e.dim() != d) {
            return mismatch("POVM effects have different dimensions");
        }
        let mut total = CMat::zeros(d, d);
        for (a, e) in effects.iter().enumerate() {
            let min = e.min_eig();
            if min < -PSD_TOL {
                return invalid(format!("effect {a} is not PSD (min eigenvalue {min:.3e})"));
            }
            total += e.matrix();
        }
        let dev = max_abs(&(total - linalg::identity(d)));
        if dev > POVM_SUM_TOL {
            return invalid(format!("effects sum to identity only within {dev:.3e}"));
        }
        Ok(Self { effects })
    }

    pub fn from_matrices(effects: Vec<CMat>) -> Result<Self> {
        Self::new(
            effects
                .into_iter()
                .map(HermitianOperator::new)
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// Projective measurement onto the columns of a unitary.
    pub fn from_basis(u: &CMat) -> Result<Self> {
        let cols = (0..u.ncols()).map(|j| linalg::outer(&u.column(j).into_owned())).collect();
        Self::from_matrices(cols)
    }

    /// `{(I + n·σ)/2, (I − n·σ)/2}` for a unit vector `n`.
    pub fn qubit_projective(n: &[f64; 3]) -> Result<Self> {
        let nn = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if (nn - 1.0).abs() > 1e-9 {
            return invalid(format!("axis must be a unit vector, norm {nn}"));
        }
        let s = linalg::bloch_operator(n);
        let id = linalg::identity(2);
        Self::from_matrices(vec![(&id + &s) * c(0.5, 0.0), (&id - &s) * c(0.5, 0.0)])
    }

    /// Two-outcome POVM `{E, I − E}`.
    pub fn dichotomic(e: CMat) -> Result<Self> {
        let d = e.nrows();
        let rest = linalg::identity(d) - &e;
        Self::from_matrices(vec![e, rest])
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn outcomes(&self) -> usize {
        self.effects.len()
    }

    pub fn effects(&self) -> &[HermitianOperator] {
        &self.effects
    }

    pub fn effect(&self, a: usize) -> &CMat {
        self.effects[a].matrix()
    }

    pub fn transpose(&self) -> Self {
        Self {
            effects: self
                .effects
                .iter()
                .map(|e| HermitianOperator::raw(e.matrix().transpose()))
                .collect(),
        }
    }

    /// True when all effects are orthogonal projectors.
    pub fn is_projective(&self) -> bool {
        self.effects.iter().all(|e| {
            let m = e.matrix();
            max_abs(&(m * m - m)) < 1e-8
        })
    }
}

/// Settings `x = 0..m`, each a POVM with the same dimension and outcome
/// count. Shorter POVMs are padded with zero effects.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    povms: Vec<Povm>,
    dim: usize,
    outcomes: usize,
}

impl MeasurementSet {
    pub fn new(povms: Vec<Povm>) -> Result<Self> {
        if povms.is_empty() {
            return invalid("measurement set needs at least one setting");
        }
        let dim = povms[0].dim();
        if povms.iter().any(|p| p.dim() != dim) {
            return mismatch("POVMs in a measurement set must share a dimension");
        }
        let outcomes = povms.iter().map(Povm::outcomes).max().unwrap();
        let povms = povms
            .into_iter()
            .map(|mut p| {
                while p.effects.len() < outcomes {
                    p.effects.push(HermitianOperator::zeros(dim));
                }
                p
            })
            .collect();
        Ok(Self {
            povms,
            dim,
            outcomes,
        })
    }

    /// Projective qubit measurements along the given unit axes.
    pub fn from_axes(axes: &[[f64; 3]]) -> Result<Self> {
        Self::new(axes.iter().map(Povm::qubit_projective).collect::<Result<Vec<_>>>()?)
    }

    /// Pauli measurements named by a string of `x`, `y`, `z`.
    pub fn paulis(which: &str) -> Result<Self> {
        let axes = which
            .chars()
            .map(|ch| match ch {
                'x' | 'X' => Ok([1.0, 0.0, 0.0]),
                'y' | 'Y' => Ok([0.0, 1.0, 0.0]),
                'z' | 'Z' => Ok([0.0, 0.0, 1.0]),
                other => Err(CoreError::InvalidInput(format!("unknown Pauli '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_axes(&axes)
    }

    pub fn settings(&self) -> usize {
        self.povms.len()
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn povms(&self) -> &[Povm] {
        &self.povms
    }

    pub fn effect(&self, x: usize, a: usize) -> &CMat {
        self.povms[x].effect(a)
    }

    pub fn effect_matrices(&self) -> Vec<Vec<CMat>> {
        self.povms
            .iter()
            .map(|p| p.effects.iter().map(|e| e.matrix().clone()).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self {
            povms: self.povms.iter().map(Povm::transpose).collect(),
            dim: self.dim,
            outcomes: self.outcomes,
        }
    }
}

/// Conditional states `members[x][a]` sharing the reduced state
/// `Σ_a members[x][a]` for every setting.
#[derive(Debug, Clone, PartialEq)]
pub struct Assemblage {
    members: Vec<Vec<DensityMatrix>>,
    reduced: DensityMatrix,
}

impl Assemblage {
    pub fn new(members: Vec<Vec<CMat>>) -> Result<Self> {
        if members.is_empty() || members[0].is_empty() {
            return invalid("assemblage needs at least one setting and outcome");
        }
        let q = members[0].len();
        let d = members[0][0].nrows();
        if members.iter().any(|row| row.len() != q) {
            return mismatch("every setting needs the same number of outcomes");
        }
        let members = members
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|m| {
                        if m.shape() != (d, d) {
                            return mismatch(format!("member shape {:?}, expected {d}x{d}", m.shape()));
                        }
                        DensityMatrix::subnormalized(m)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let sum = |row: &[DensityMatrix]| {
            row.iter().fold(CMat::zeros(d, d), |acc, m| acc + m.matrix())
        };
        let reduced = sum(&members[0]);
        for (x, row) in members.iter().enumerate().skip(1) {
            let dev = max_abs(&(sum(row) - &reduced));
            if dev > NO_SIGNALLING_TOL {
                return invalid(format!(
                    "setting {x} violates no-signalling by {dev:.3e}"
                ));
            }
        }
        let reduced = DensityMatrix::new(reduced)?;
        Ok(Self { members, reduced })
    }

    pub fn settings(&self) -> usize {
        self.members.len()
    }

    pub fn outcomes(&self) -> usize {
        self.members[0].len()
    }

    pub fn dim(&self) -> usize {
        self.reduced.dim()
    }

    pub fn member(&self, x: usize, a: usize) -> &CMat {
        self.members[x][a].matrix()
    }

    pub fn members(&self) -> &[Vec<DensityMatrix>] {
        &self.members
    }

    pub fn member_matrices(&self) -> Vec<Vec<CMat>> {
        self.members
            .iter()
            .map(|row| row.iter().map(|m| m.matrix().clone()).collect())
            .collect()
    }

    pub fn reduced(&self) -> &DensityMatrix {
        &self.reduced
    }

    /// `p·self + (1−p)·other`.
    pub fn mix(&self, other: &Assemblage, p: f64) -> Result<Assemblage> {
        if self.settings() != other.settings()
            || self.outcomes() != other.outcomes()
            || self.dim() != other.dim()
        {
            return mismatch("assemblages have different shapes");
        }
        Assemblage::new(
            (0..self.settings())
                .map(|x| {
                    (0..self.outcomes())
                        .map(|a| {
                            self.member(x, a) * c(p, 0.0) + other.member(x, a) * c(1.0 - p, 0.0)
                        })
                        .collect()
                })
                .collect(),
        )
    }

    /// Reorders settings by `settings_perm` and, within each setting `x`,
    /// outcomes by `outcome_perm[x]`.
    pub fn relabel(&self, settings_perm: &[usize], outcome_perm: &[Vec<usize>]) -> Result<Assemblage> {
        Assemblage::new(
            settings_perm
                .iter()
                .enumerate()
                .map(|(new_x, &x)| {
                    outcome_perm[new_x]
                        .iter()
                        .map(|&a| self.member(x, a).clone())
                        .collect()
                })
                .collect(),
        )
    }

    /// Largest over settings of `Σ_a ½‖ρ_{a|x} − σ_{a|x}‖₁`.
    pub fn trace_distance(&self, other: &Assemblage) -> Result<f64> {
        if self.settings() != other.settings() || self.outcomes() != other.outcomes() {
            return mismatch("assemblages have different shapes");
        }
        Ok((0..self.settings())
            .map(|x| {
                (0..self.outcomes())
                    .map(|a| 0.5 * linalg::trace_norm(&(self.member(x, a) - other.member(x, a))))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max))
    }
}

/// Two-qubit state in the Pauli product basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochDecomposition {
    pub a: Vector3<f64>,
    pub b: Vector3<f64>,
    pub t: Matrix3<f64>,
}

impl BlochDecomposition {
    pub fn reconstruct(&self) -> CMat {
        let p = linalg::paulis();
        let id = linalg::identity(2);
        let mut m = linalg::kron(&id, &id);
        for i in 0..3 {
            m += linalg::kron(&p[i], &id) * c(self.a[i], 0.0);
            m += linalg::kron(&id, &p[i]) * c(self.b[i], 0.0);
            for j in 0..3 {
                m += linalg::kron(&p[i], &p[j]) * c(self.t[(i, j)], 0.0);
            }
        }
        m * c(0.25, 0.0)
    }
}

pub fn kron(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    HermitianOperator::raw(linalg::kron(a.matrix(), b.matrix()))
}

pub fn partial_trace(m: &HermitianOperator, dims: (usize, usize), which: Subsystem) -> Result<HermitianOperator> {
    Ok(HermitianOperator::raw(linalg::hermitian_part(&linalg::partial_trace(
        m.matrix(),
        dims,
        which,
    )?)))
}

pub fn reduced_state(rho: &DensityMatrix, dims: (usize, usize), which: Subsystem) -> Result<DensityMatrix> {
    Ok(DensityMatrix::raw(linalg::hermitian_part(&linalg::partial_trace(
        rho.matrix(),
        dims,
        which,
    )?)))
}

/// Smallest eigenvalue of `ρ^{T_B}`.
pub fn min_eig_partial_transpose(rho: &DensityMatrix, dims: (usize, usize)) -> Result<f64> {
    Ok(linalg::min_eig(&linalg::partial_transpose(rho.matrix(), dims)?))
}

pub fn bloch_decompose(rho: &DensityMatrix) -> Result<BlochDecomposition> {
    if rho.dim() != 4 {
        return mismatch(format!("Bloch decomposition needs a two-qubit state, dim {}", rho.dim()));
    }
    let p = linalg::paulis();
    let id = linalg::identity(2);
    let m = rho.matrix();
    let a = Vector3::from_fn(|i, _| linalg::expect(m, &linalg::kron(&p[i], &id)));
    let b = Vector3::from_fn(|i, _| linalg::expect(m, &linalg::kron(&id, &p[i])));
    let t = Matrix3::from_fn(|i, j| linalg::expect(m, &linalg::kron(&p[i], &p[j])));
    Ok(BlochDecomposition { a, b, t })
}

/// Singular values of the realigned matrix, nonincreasing.
pub fn operator_schmidt_coefficients(rho: &DensityMatrix, d: usize) -> Result<Vec<f64>> {
    if rho.dim() != d * d {
        return mismatch(format!("state of dim {} is not {d}x{d}", rho.dim()));
    }
    let r = linalg::realign(rho.matrix(), (d, d))?;
    let mut sv: Vec<f64> = r.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// `ρ_{a|x} = Tr_A[(E_{a|x} ⊗ I) ρ_AB]`; the measured party is the first
/// factor with the dimension of the measurement set.
pub fn assemblage_from_state(rho: &DensityMatrix, ms: &MeasurementSet) -> Result<Assemblage> {
    let da = ms.dim();
    let n = rho.dim();
    if n % da != 0 {
        return mismatch(format!("state dim {n} not divisible by measurement dim {da}"));
    }
    let db = n / da;
    let m = rho.matrix();
    let members = ms
        .povms()
        .iter()
        .map(|p| {
            p.effects()
                .iter()
                .map(|e| conditional_state(m, e.matrix(), da, db))
                .collect()
        })
        .collect();
    Assemblage::new(members)
}

pub(crate) fn conditional_state(m: &CMat, e: &CMat, da: usize, db: usize) -> CMat {
    let mut out = CMat::zeros(db, db);
    for i in 0..da {
        for j in 0..da {
            let w = e[(j, i)];
            if w.norm() == 0.0 {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(k, l)] += w * m[(i * db + k, j * db + l)];
                }
            }
        }
    }
    linalg::hermitian_part(&out)
}

/// Exchanges the two factors of a bipartite operator.
pub fn swap_parties(rho: &DensityMatrix, dims: (usize, usize)) -> Result<DensityMatrix> {
    let (da, db) = dims;
    if rho.dim() != da * db {
        return mismatch("dims do not match state");
    }
    let m = rho.matrix();
    Ok(DensityMatrix::raw(CMat::from_fn(da * db, da * db, |r, s| {
        let (k, i) = (r / da, r % da);
        let (l, j) = (s / da, s % da);
        m[(i * db + k, j * db + l)]
    })))
}
