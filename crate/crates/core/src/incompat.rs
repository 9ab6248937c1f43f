//! Joint measurability of POVM sets and the assemblage/POVM dictionary.

use nalgebra::Vector3;

use crate::error::{invalid, mismatch, Result};
use crate::linalg::{self, c, CMat};
use crate::operator::{
    Assemblage, DensityMatrix, HermitianOperator, MeasurementSet, Povm,
};
use crate::sdp::{self, Diagnostics, SdpConfig, SUPPORT_CUTOFF};
use crate::steering::{hermitian_rows, SteeringInequality, Verdict};
use crate::strategies::DeterministicStrategySet;

/// Parent POVM `G_λ` whose deterministic post-processing reproduces a set.
#[derive(Debug, Clone)]
pub struct JointObservable {
    pub strategies: DeterministicStrategySet,
    pub labels: Vec<Vec<usize>>,
    pub effects: Vec<HermitianOperator>,
}

impl JointObservable {
    pub fn reproduce(&self, outcomes: usize) -> Vec<Vec<CMat>> {
        let d = self.effects[0].dim();
        let mut out = vec![vec![CMat::zeros(d, d); outcomes]; self.labels.len()];
        for (l, g) in self.effects.iter().enumerate() {
            for (x, row) in out.iter_mut().enumerate() {
                row[self.labels[x][self.strategies.outcome(l, x)]] += g.matrix();
            }
        }
        out
    }

    pub fn max_deviation(&self, ms: &MeasurementSet) -> f64 {
        let rep = self.reproduce(ms.outcomes());
        let mut worst: f64 = 0.0;
        for (x, row) in rep.iter().enumerate() {
            for (a, m) in row.iter().enumerate() {
                let diff = m - ms.effect(x, a);
                worst = worst.max(diff.iter().map(|v| v.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }
}

#[derive(Debug, Clone)]
pub struct JmResult {
    pub jointly_measurable: bool,
    pub verdict: Verdict,
    /// Largest `μ` with every `G_λ ⪰ μ I`; negative means incompatible.
    pub mu: f64,
    pub parent: Option<JointObservable>,
    /// Coefficients `F` with `Σ_x F_{λ(x)|x} ⪰ 0` and `Σ Tr(F A) = μ`.
    pub certificate: SteeringInequality,
    pub diagnostics: Diagnostics,
}

fn effect_labels(ms: &MeasurementSet) -> Vec<Vec<usize>> {
    (0..ms.settings())
        .map(|x| {
            (0..ms.outcomes())
                .filter(|&a| ms.effect(x, a).norm() > 1e-13 * ms.dim() as f64)
                .collect()
        })
        .collect()
}

/// Joint measurability with deterministic post-processing. Probabilistic
/// post-processings are mixtures of deterministic ones, so nothing is lost.
pub fn is_jointly_measurable(ms: &MeasurementSet, cfg: &SdpConfig) -> Result<JmResult> {
    let effects = ms.effect_matrices();
    let id = linalg::identity(ms.dim());
    let core = sdp::feasibility(&effects, &id, cfg)?;
    let labels = effect_labels(ms);
    let verdict = Verdict::from_margin(core.mu, cfg.tol);
    let jm = verdict != Verdict::Steerable;
    let parent = (jm && core.mu >= 0.0).then(|| JointObservable {
        strategies: core.strategies.clone(),
        labels: labels.clone(),
        effects: core.sigma.iter().cloned().map(HermitianOperator::raw).collect(),
    });
    Ok(JmResult {
        jointly_measurable: jm,
        verdict,
        mu: core.mu,
        parent,
        certificate: SteeringInequality {
            coefficients: hermitian_rows(core.f),
            strategies: core.strategies,
            labels,
            bound: 0.0,
        },
        diagnostics: core.diagnostics,
    })
}

#[derive(Debug, Clone)]
pub struct IncompatibilityRobustness {
    /// Smallest `t` with `(A + tN)/(1+t)` jointly measurable for some POVMs `N`.
    pub robustness: f64,
    /// Parent POVM of the noisy set, aligned with `strategies`.
    pub parent: Vec<HermitianOperator>,
    pub strategies: DeterministicStrategySet,
    pub diagnostics: Diagnostics,
}

pub fn incompatibility_robustness(ms: &MeasurementSet, cfg: &SdpConfig) -> Result<IncompatibilityRobustness> {
    let core = sdp::incompatibility(&ms.effect_matrices(), cfg)?;
    Ok(IncompatibilityRobustness {
        robustness: core.value.max(0.0),
        parent: core.parent.into_iter().map(HermitianOperator::raw).collect(),
        strategies: core.strategies,
        diagnostics: core.diagnostics,
    })
}

#[derive(Debug, Clone)]
pub struct CriticalVisibility {
    pub visibility: f64,
    pub capped: bool,
    pub diagnostics: Diagnostics,
}

/// Largest `η ≤ 1` such that `η A_{a|x} + (1−η) Tr(A_{a|x})/d · I` is
/// jointly measurable.
pub fn jm_critical_visibility(ms: &MeasurementSet, cfg: &SdpConfig) -> Result<CriticalVisibility> {
    let d = ms.dim();
    let effects = ms.effect_matrices();
    let noise: Vec<Vec<CMat>> = effects
        .iter()
        .map(|row| {
            row.iter()
                .map(|e| linalg::identity(d) * c(linalg::trace_re(e) / d as f64, 0.0))
                .collect()
        })
        .collect();
    let core = sdp::critical_mixing(&effects, &noise, &linalg::identity(d), 1.0, cfg)?;
    Ok(CriticalVisibility {
        visibility: core.value.min(1.0),
        capped: core.capped,
        diagnostics: core.diagnostics,
    })
}

/// Two-outcome qubit POVMs `A_{+|x} = ½((1+α_x) I + a_x·σ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitDichotomicPair {
    pub alpha: [f64; 2],
    pub a: [Vector3<f64>; 2],
}

impl QubitDichotomicPair {
    pub fn new(alpha: [f64; 2], a: [Vector3<f64>; 2]) -> Result<Self> {
        for x in 0..2 {
            if alpha[x].abs() > 1.0 {
                return invalid(format!("bias {} outside [-1, 1]", alpha[x]));
            }
            // both effects PSD
            if a[x].norm() > 1.0 - alpha[x].abs() + 1e-12 {
                return invalid(format!(
                    "|a_{x}| = {} exceeds 1 - |alpha_{x}| = {}",
                    a[x].norm(),
                    1.0 - alpha[x].abs()
                ));
            }
        }
        Ok(Self { alpha, a })
    }

    pub fn unbiased(a1: Vector3<f64>, a2: Vector3<f64>) -> Result<Self> {
        Self::new([0.0, 0.0], [a1, a2])
    }

    /// Reads the pair off a two-setting qubit measurement set.
    pub fn from_measurements(ms: &MeasurementSet) -> Result<Self> {
        if ms.dim() != 2 || ms.settings() != 2 {
            return mismatch("need two qubit measurements");
        }
        let p = linalg::paulis();
        let mut alpha = [0.0; 2];
        let mut a = [Vector3::zeros(); 2];
        for x in 0..2 {
            let live = (0..ms.outcomes()).filter(|&k| ms.effect(x, k).norm() > 0.0).count();
            if live > 2 {
                return invalid("measurement has more than two outcomes");
            }
            let e = ms.effect(x, 0);
            alpha[x] = linalg::trace_re(e) - 1.0;
            a[x] = Vector3::from_fn(|i, _| linalg::trace_prod(&p[i], e));
        }
        Self::new(alpha, a)
    }

    pub fn povm(&self, x: usize) -> Povm {
        let e = (linalg::identity(2) * c(1.0 + self.alpha[x], 0.0)
            + linalg::bloch_operator(&[self.a[x][0], self.a[x][1], self.a[x][2]]))
            * c(0.5, 0.0);
        Povm::dichotomic(e).expect("validated on construction")
    }

    pub fn measurement_set(&self) -> MeasurementSet {
        MeasurementSet::new(vec![self.povm(0), self.povm(1)]).expect("same dimension")
    }

    pub fn is_unbiased(&self) -> bool {
        self.alpha[0] == 0.0 && self.alpha[1] == 0.0
    }
}

fn clamped_sqrt(x: f64) -> f64 {
    if x < 0.0 && x > -1e-12 {
        0.0
    } else {
        x.sqrt()
    }
}

/// Signed slack of the closed-form criterion: nonnegative exactly when the
/// pair is jointly measurable. The unbiased branch uses
/// `2 − ‖a₁+a₂‖ − ‖a₁−a₂‖`, the biased one the difference of the two sides
/// of the general qubit criterion.
pub fn qubit_pair_margin(p: &QubitDichotomicPair) -> f64 {
    let [a1, a2] = &p.a;
    if p.is_unbiased() {
        return 2.0 - (a1 + a2).norm() - (a1 - a2).norm();
    }
    let f = |x: usize| {
        let al = p.alpha[x];
        let n2 = p.a[x].norm_squared();
        0.5 * (clamped_sqrt((1.0 + al).powi(2) - n2) + clamped_sqrt((1.0 - al).powi(2) - n2))
    };
    let (f1, f2) = (f(0), f(1));
    let ratio = |al: f64, fx: f64| if al == 0.0 { 0.0 } else { al * al / (fx * fx) };
    let lhs = (1.0 - f1 * f1 - f2 * f2) * (1.0 - ratio(p.alpha[0], f1) - ratio(p.alpha[1], f2));
    let rhs = (a1.dot(a2) - p.alpha[0] * p.alpha[1]).powi(2);
    rhs - lhs
}

pub fn qubit_pair_criterion(p: &QubitDichotomicPair) -> bool {
    qubit_pair_margin(p) >= 0.0
}

/// `B̃_{a|x} = ρ_B^{−1/2} ρ_{a|x} ρ_B^{−1/2}` with the pseudo-inverse. When
/// `ρ_B` is rank deficient, the projector onto its kernel is shared equally
/// among the outcomes so each setting still sums to the identity; this does
/// not change joint measurability.
pub fn normalize_assemblage(asm: &Assemblage) -> Result<MeasurementSet> {
    let rb = asm.reduced().matrix();
    let w = linalg::psd_power(rb, -0.5, SUPPORT_CUTOFF);
    let d = asm.dim();
    let v = linalg::support_isometry(rb, SUPPORT_CUTOFF);
    let kernel = linalg::identity(d) - &v * v.adjoint();
    let q = asm.outcomes();
    let povms = (0..asm.settings())
        .map(|x| {
            Povm::from_matrices(
                (0..q)
                    .map(|a| &w * asm.member(x, a) * &w + &kernel * c(1.0 / q as f64, 0.0))
                    .collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    MeasurementSet::new(povms)
}

/// Transpose in the eigenbasis `U` of a Hermitian matrix: `U (U† X U)ᵀ U†`.
pub fn transpose_in_eigenbasis(x: &CMat, reference: &CMat) -> CMat {
    let (_, u) = linalg::eigh(reference);
    &u * (u.adjoint() * x * &u).transpose() * u.adjoint()
}

/// Bob-side POVMs `ρ_B^{−1/2} Tr_A[(A_{a|x} ⊗ I) ρ_AB]ᵀ ρ_B^{−1/2}`, the
/// transpose taken in the eigenbasis of `ρ_B`.
pub fn heisenberg_povm_map(rho: &DensityMatrix, alice: &MeasurementSet) -> Result<MeasurementSet> {
    let asm = crate::operator::assemblage_from_state(rho, alice)?;
    let normalized = normalize_assemblage(&asm)?;
    let rb = asm.reduced().matrix();
    let povms = normalized
        .povms()
        .iter()
        .map(|p| {
            Povm::from_matrices(
                p.effects()
                    .iter()
                    .map(|e| linalg::hermitian_part(&transpose_in_eigenbasis(e.matrix(), rb)))
                    .collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    MeasurementSet::new(povms)
}
