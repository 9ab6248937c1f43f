//! Closed-form steering tests on correlation data, states and Gaussian
//! covariance matrices. Each returns the computed value next to its bound.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{invalid, mismatch, CoreError, Result};
use crate::linalg::{self, c, CMat};
use crate::operator::{operator_schmidt_coefficients, DensityMatrix};

/// Slack used by the strict comparisons below.
pub const CRITERION_TOL: f64 = 1e-10;

/// Outcome distribution of Alice's setting `k` and Bob's conditional mean.
#[derive(Debug, Clone, PartialEq)]
pub struct Conditional {
    /// `p(a|k)` for `a = +1, −1`.
    pub prob: [f64; 2],
    /// `⟨B_k⟩|_a`.
    pub mean: [f64; 2],
}

/// Correlation data of dichotomic (±1) observables.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRecord {
    /// `full[x][y] = ⟨A_x ⊗ B_y⟩`.
    pub full: Vec<Vec<f64>>,
    pub marginals_a: Option<Vec<f64>>,
    pub marginals_b: Option<Vec<f64>>,
    /// One entry per matched pair `(A_k, B_k)`.
    pub conditionals: Option<Vec<Conditional>>,
}

fn in_unit(v: f64) -> bool {
    v.is_finite() && v.abs() <= 1.0 + 1e-10
}

impl CorrelationRecord {
    pub fn new(
        full: Vec<Vec<f64>>,
        marginals_a: Option<Vec<f64>>,
        marginals_b: Option<Vec<f64>>,
        conditionals: Option<Vec<Conditional>>,
    ) -> Result<Self> {
        if full.is_empty() || full.iter().any(|r| r.len() != full[0].len() || r.is_empty()) {
            return mismatch("correlation table must be rectangular and nonempty");
        }
        let all = full
            .iter()
            .flatten()
            .chain(marginals_a.iter().flatten())
            .chain(marginals_b.iter().flatten());
        if !all.into_iter().all(|&v| in_unit(v)) {
            return invalid("correlations must lie in [-1, 1]");
        }
        for cond in conditionals.iter().flatten() {
            let s = cond.prob[0] + cond.prob[1];
            if (s - 1.0).abs() > 1e-10 || cond.prob.iter().any(|&p| p < -1e-12) {
                return invalid("conditional probabilities must be normalized");
            }
            if !cond.mean.iter().all(|&m| in_unit(m)) {
                return invalid("conditional means must lie in [-1, 1]");
            }
        }
        Ok(Self {
            full,
            marginals_a,
            marginals_b,
            conditionals,
        })
    }

    /// Record for `ρ` with Alice's observables `alice[k]` and Bob's `bob[k]`;
    /// conditionals pair `A_k` with `B_k`.
    pub fn from_state(rho: &DensityMatrix, alice: &[CMat], bob: &[CMat]) -> Result<Self> {
        let (da, db) = observable_dims(rho, alice, bob)?;
        let ia = linalg::identity(da);
        let ib = linalg::identity(db);
        let m = rho.matrix();
        let full = alice
            .iter()
            .map(|a| bob.iter().map(|b| linalg::expect(m, &linalg::kron(a, b))).collect())
            .collect();
        let ma = alice.iter().map(|a| linalg::expect(m, &linalg::kron(a, &ib))).collect();
        let mb = bob.iter().map(|b| linalg::expect(m, &linalg::kron(&ia, b))).collect();
        let conditionals = if alice.len() == bob.len() {
            Some(
                alice
                    .iter()
                    .zip(bob)
                    .map(|(a, b)| {
                        let mut prob = [0.0; 2];
                        let mut mean = [0.0; 2];
                        for (k, sign) in [1.0, -1.0].into_iter().enumerate() {
                            let p = (&ia + a * c(sign, 0.0)) * c(0.5, 0.0);
                            prob[k] = linalg::expect(m, &linalg::kron(&p, &ib)).max(0.0);
                            if prob[k] > 1e-14 {
                                mean[k] = linalg::expect(m, &linalg::kron(&p, b)) / prob[k];
                            }
                        }
                        let s = prob[0] + prob[1];
                        Conditional {
                            prob: [prob[0] / s, prob[1] / s],
                            mean: [mean[0].clamp(-1.0, 1.0), mean[1].clamp(-1.0, 1.0)],
                        }
                    })
                    .collect(),
            )
        } else {
            None
        };
        Self::new(full, Some(ma), Some(mb), conditionals)
    }
}

fn observable_dims(rho: &DensityMatrix, alice: &[CMat], bob: &[CMat]) -> Result<(usize, usize)> {
    let (Some(a0), Some(b0)) = (alice.first(), bob.first()) else {
        return invalid("need at least one observable per party");
    };
    let (da, db) = (a0.nrows(), b0.nrows());
    if da * db != rho.dim()
        || alice.iter().any(|a| a.nrows() != da)
        || bob.iter().any(|b| b.nrows() != db)
    {
        return mismatch("observable dimensions do not match the state");
    }
    Ok((da, db))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub value: f64,
    pub bound: f64,
    pub violated: bool,
}

/// Largest number of terms for the sign enumeration.
pub const LINEAR_GUARD: usize = 24;

/// `Σ_k |⟨A_k⊗B_k⟩| ≤ max_{a∈{±1}^N} λ_max(Σ_k a_k B_k)` for unsteerable
/// data.
pub fn linear_criterion(corrs: &[f64], bob: &[CMat]) -> Result<CriterionResult> {
    let n = corrs.len();
    if n == 0 || n != bob.len() {
        return mismatch("one correlation per observable required");
    }
    if n > LINEAR_GUARD {
        return Err(CoreError::GuardExceeded(format!(
            "{n} observables exceed the sign-enumeration limit {LINEAR_GUARD}"
        )));
    }
    let d = bob[0].nrows();
    if bob.iter().any(|b| b.nrows() != d) {
        return mismatch("observables differ in dimension");
    }
    let mut bound = f64::NEG_INFINITY;
    for mask in 0u32..(1 << n) {
        let mut sum = CMat::zeros(d, d);
        for (k, b) in bob.iter().enumerate() {
            let s = if mask >> k & 1 == 1 { -1.0 } else { 1.0 };
            sum += b * c(s, 0.0);
        }
        bound = bound.max(linalg::max_eig(&linalg::hermitian_part(&sum)));
    }
    let value: f64 = corrs.iter().map(|v| v.abs()).sum();
    Ok(CriterionResult {
        value,
        bound,
        violated: value > bound + CRITERION_TOL,
    })
}

/// `Σ_k Σ_a p(a|k) (⟨σ_k⟩|_a)² ≤ 1` for unsteerable data with Bob measuring
/// three Pauli observables.
pub fn three_pauli_criterion(rec: &CorrelationRecord) -> Result<CriterionResult> {
    let cond = rec
        .conditionals
        .as_ref()
        .ok_or_else(|| CoreError::InvalidInput("conditional table required".into()))?;
    if cond.len() != 3 {
        return mismatch(format!("need three settings, got {}", cond.len()));
    }
    let value = cond
        .iter()
        .map(|k| k.prob[0] * k.mean[0].powi(2) + k.prob[1] * k.mean[1].powi(2))
        .sum();
    Ok(CriterionResult {
        value,
        bound: 1.0,
        violated: value > 1.0 + CRITERION_TOL,
    })
}

/// `√(⟨(A₁+A₂)B₁⟩² + ⟨(A₁+A₂)B₂⟩²) + √(⟨(A₁−A₂)B₁⟩² + ⟨(A₁−A₂)B₂⟩²) ≤ 2`,
/// valid when Bob's observables are mutually unbiased qubit projective
/// measurements; only full correlations enter.
pub fn chsh_steering(table: &[[f64; 2]; 2]) -> CriterionResult {
    let [[a1b1, a1b2], [a2b1, a2b2]] = *table;
    let value = (a1b1 + a2b1).hypot(a1b2 + a2b2) + (a1b1 - a2b1).hypot(a1b2 - a2b2);
    CriterionResult {
        value,
        bound: 2.0,
        violated: value > 2.0 + CRITERION_TOL,
    }
}

fn shannon(ps: impl IntoIterator<Item = f64>) -> f64 {
    ps.into_iter().filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum()
}

/// `S(B|A) = H(A,B) − H(A)` in nats for `joint[a][b]`.
pub fn conditional_entropy(joint: &[Vec<f64>]) -> f64 {
    let h_ab = shannon(joint.iter().flatten().copied());
    let h_a = shannon(joint.iter().map(|r| r.iter().sum::<f64>()));
    h_ab - h_a
}

pub fn nats_to_bits(x: f64) -> f64 {
    x / std::f64::consts::LN_2
}

pub fn bits_to_nats(x: f64) -> f64 {
    x * std::f64::consts::LN_2
}

/// `Ω = max_{i,j} |⟨v_i|w_j⟩|²` over the eigenvectors of two observables.
pub fn max_overlap(b1: &CMat, b2: &CMat) -> f64 {
    let (_, v) = linalg::eigh(b1);
    let (_, w) = linalg::eigh(b2);
    let mut best: f64 = 0.0;
    for i in 0..v.ncols() {
        for j in 0..w.ncols() {
            best = best.max(v.column(i).dotc(&w.column(j)).norm_sqr());
        }
    }
    best
}

fn check_joint(joint: &[Vec<f64>]) -> Result<()> {
    if joint.is_empty() || joint.iter().any(|r| r.len() != joint[0].len()) {
        return mismatch("joint table must be rectangular");
    }
    let total: f64 = joint.iter().flatten().sum();
    if (total - 1.0).abs() > 1e-10 || joint.iter().flatten().any(|&p| p < -1e-12 || !p.is_finite()) {
        return invalid("joint table is not a probability distribution");
    }
    Ok(())
}

/// `S(B₁|A₁) + S(B₂|A₂) ≥ −ln Ω_B` for unsteerable data (nats).
pub fn entropic_criterion(
    joint1: &[Vec<f64>],
    joint2: &[Vec<f64>],
    b1: &CMat,
    b2: &CMat,
) -> Result<CriterionResult> {
    check_joint(joint1)?;
    check_joint(joint2)?;
    if joint1[0].len() != b1.nrows() || joint2[0].len() != b2.nrows() {
        return mismatch("Bob's outcome count must equal the observable dimension");
    }
    let value = conditional_entropy(joint1) + conditional_entropy(joint2);
    let bound = -max_overlap(b1, b2).ln();
    Ok(CriterionResult {
        value,
        bound,
        violated: value < bound - CRITERION_TOL,
    })
}

/// `p(a,b)` for the spectral projectors of `A ⊗ B`, outcomes in ascending
/// eigenvalue order. Degenerate eigenvalues are kept as separate outcomes.
pub fn joint_distribution(rho: &DensityMatrix, a: &CMat, b: &CMat) -> Result<Vec<Vec<f64>>> {
    let (da, db) = observable_dims(rho, std::slice::from_ref(a), std::slice::from_ref(b))?;
    let (_, u) = linalg::eigh(a);
    let (_, v) = linalg::eigh(b);
    let m = rho.matrix();
    Ok((0..da)
        .map(|i| {
            (0..db)
                .map(|j| {
                    let pa = linalg::outer(&u.column(i).into_owned());
                    let pb = linalg::outer(&v.column(j).into_owned());
                    linalg::expect(m, &linalg::kron(&pa, &pb)).max(0.0)
                })
                .collect()
        })
        .collect())
}

/// `Σ_k λ_k ≤ √d` over the operator Schmidt coefficients of an unsteerable
/// state with `d_A = d_B = d`.
pub fn ccnr_steering(rho: &DensityMatrix, d: usize) -> Result<CriterionResult> {
    if d * d != rho.dim() {
        return mismatch(format!("state dimension {} is not {d}x{d}", rho.dim()));
    }
    let value = operator_schmidt_coefficients(rho, d)?.iter().sum();
    let bound = (d as f64).sqrt();
    Ok(CriterionResult {
        value,
        bound,
        violated: value > bound + CRITERION_TOL,
    })
}

/// `⟨M²⟩ − ⟨M⟩²`.
pub fn variance(rho: &DensityMatrix, m: &CMat) -> Result<f64> {
    if m.nrows() != rho.dim() {
        return mismatch("observable dimension does not match the state");
    }
    let mean = linalg::expect(rho.matrix(), m);
    Ok(linalg::expect(rho.matrix(), &(m * m)) - mean * mean)
}

/// `Σ_k δ²(M_k) ≥ C_B` for unsteerable states; `C_B` is supplied by the
/// caller (2 for the three Pauli observables on a qubit).
pub fn lur_criterion(variances: &[f64], c_b: f64) -> Result<CriterionResult> {
    if variances.iter().any(|v| !v.is_finite() || *v < -1e-12) {
        return invalid("variances must be finite and nonnegative");
    }
    let value: f64 = variances.iter().sum();
    Ok(CriterionResult {
        value,
        bound: c_b,
        violated: value < c_b - CRITERION_TOL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    AToB,
    BToA,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::AToB => "A->B",
            Direction::BToA => "B->A",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = CoreError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A->B" | "a2b" | "ab" => Ok(Direction::AToB),
            "B->A" | "b2a" | "ba" => Ok(Direction::BToA),
            _ => invalid(format!("unknown direction '{s}'")),
        }
    }
}

/// `Ω` on `n` modes: `⊕ [[0, 1], [−1, 0]]`.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut o = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        o[(2 * k, 2 * k + 1)] = 1.0;
        o[(2 * k + 1, 2 * k)] = -1.0;
    }
    o
}

/// Covariance matrix of an `(n_A + n_B)`-mode Gaussian state, vacuum `= I`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianCovariance {
    n_a: usize,
    n_b: usize,
    v: DMatrix<f64>,
}

fn min_eig_with_form(v: &DMatrix<f64>, omega: &DMatrix<f64>) -> f64 {
    let h = CMat::from_fn(v.nrows(), v.ncols(), |i, j| c(v[(i, j)], omega[(i, j)]));
    linalg::min_eig(&linalg::hermitian_part(&h))
}

impl GaussianCovariance {
    pub fn new(n_a: usize, n_b: usize, v: DMatrix<f64>) -> Result<Self> {
        let n = 2 * (n_a + n_b);
        if n_a == 0 || n_b == 0 || v.nrows() != n || v.ncols() != n {
            return mismatch(format!("covariance must be {n}x{n} with modes on both sides"));
        }
        if (&v - v.transpose()).amax() > 1e-10 || v.iter().any(|x| !x.is_finite()) {
            return invalid("covariance matrix must be real symmetric");
        }
        let v = (&v + v.transpose()) * 0.5;
        if min_eig_with_form(&v, &symplectic_form(n_a + n_b)) < -1e-9 {
            return invalid("V + iΩ is not positive semidefinite");
        }
        Ok(Self { n_a, n_b, v })
    }

    pub fn vacuum(n_a: usize, n_b: usize) -> Result<Self> {
        Self::new(n_a, n_b, DMatrix::identity(2 * (n_a + n_b), 2 * (n_a + n_b)))
    }

    /// Two-mode squeezed vacuum with squeezing `r`.
    pub fn two_mode_squeezed(r: f64) -> Result<Self> {
        let (ch, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
        let mut v = DMatrix::identity(4, 4) * ch;
        v[(0, 2)] = sh;
        v[(2, 0)] = sh;
        v[(1, 3)] = -sh;
        v[(3, 1)] = -sh;
        Self::new(1, 1, v)
    }

    pub fn modes(&self) -> (usize, usize) {
        (self.n_a, self.n_b)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.v
    }

    /// Exchange the two parties.
    pub fn swap(&self) -> Self {
        let (ka, kb) = (2 * self.n_a, 2 * self.n_b);
        let perm: Vec<usize> = (ka..ka + kb).chain(0..ka).collect();
        let v = DMatrix::from_fn(ka + kb, ka + kb, |i, j| self.v[(perm[i], perm[j])]);
        Self {
            n_a: self.n_b,
            n_b: self.n_a,
            v,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianResult {
    pub steerable: bool,
    pub min_eig: f64,
}

/// Steerable with Gaussian measurements from A to B iff
/// `V + i(0_A ⊕ Ω_B)` has a negative eigenvalue; `B→A` uses `Ω_A ⊕ 0_B`.
pub fn gaussian_steering(gc: &GaussianCovariance, direction: Direction) -> GaussianResult {
    let (na, nb) = gc.modes();
    let n = 2 * (na + nb);
    let mut omega = DMatrix::zeros(n, n);
    match direction {
        Direction::AToB => omega
            .view_mut((2 * na, 2 * na), (2 * nb, 2 * nb))
            .copy_from(&symplectic_form(nb)),
        Direction::BToA => omega
            .view_mut((0, 0), (2 * na, 2 * na))
            .copy_from(&symplectic_form(na)),
    }
    let min_eig = min_eig_with_form(gc.matrix(), &omega);
    GaussianResult {
        steerable: min_eig < -1e-9,
        min_eig,
    }
}
