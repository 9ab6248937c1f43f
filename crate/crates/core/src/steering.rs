//! Steerability of assemblages: LHS feasibility, steering weight and
//! robustness, dual steering inequalities and critical noise levels.

use crate::error::{mismatch, Result};
use crate::linalg::{self, c, CMat};
use crate::operator::{assemblage_from_state, Assemblage, DensityMatrix, HermitianOperator, MeasurementSet};
use crate::sdp::{self, Diagnostics, SdpConfig};
use crate::strategies::DeterministicStrategySet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Steerable,
    Unsteerable,
    /// The optimum lies within the verdict tolerance of zero.
    Boundary,
}

impl Verdict {
    pub fn from_margin(mu: f64, tol: f64) -> Self {
        if mu < -tol {
            Verdict::Steerable
        } else if mu > tol {
            Verdict::Unsteerable
        } else {
            Verdict::Boundary
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Steerable => "steerable",
            Verdict::Unsteerable => "unsteerable",
            Verdict::Boundary => "boundary",
        }
    }
}

/// Hidden operators `σ_λ` aligned with a strategy set.
#[derive(Debug, Clone)]
pub struct LhsModel {
    pub strategies: DeterministicStrategySet,
    /// Outcome labels the strategies range over, per setting.
    pub labels: Vec<Vec<usize>>,
    pub hidden: Vec<HermitianOperator>,
}

impl LhsModel {
    /// `Σ_λ D(a|x,λ) σ_λ` in the original outcome labels.
    pub fn reproduce(&self, outcomes: usize) -> Vec<Vec<CMat>> {
        let d = self.hidden[0].dim();
        let mut out = vec![vec![CMat::zeros(d, d); outcomes]; self.labels.len()];
        for (l, s) in self.hidden.iter().enumerate() {
            for (x, row) in out.iter_mut().enumerate() {
                row[self.labels[x][self.strategies.outcome(l, x)]] += s.matrix();
            }
        }
        out
    }

    /// Largest entrywise deviation between the model and an assemblage.
    pub fn max_deviation(&self, asm: &Assemblage) -> f64 {
        let rep = self.reproduce(asm.outcomes());
        let mut worst: f64 = 0.0;
        for (x, row) in rep.iter().enumerate() {
            for (a, m) in row.iter().enumerate() {
                let diff = m - asm.member(x, a);
                worst = worst.max(diff.iter().map(|v| v.norm()).fold(0.0, f64::max));
            }
        }
        worst
    }

    pub fn min_eig(&self) -> f64 {
        self.hidden.iter().map(|h| h.min_eig()).fold(f64::INFINITY, f64::min)
    }
}

/// Outcomes with nonzero conditional state, per setting.
pub fn nonzero_labels(asm: &Assemblage) -> Vec<Vec<usize>> {
    let scale = asm.reduced().trace().max(1e-300);
    (0..asm.settings())
        .map(|x| {
            (0..asm.outcomes())
                .filter(|&a| asm.member(x, a).norm() > 1e-13 * scale)
                .collect()
        })
        .collect()
}

/// Coefficients `F_{a|x}` with `Σ_x F_{λ(x)|x} ⪰ 0` for every strategy and
/// unit total trace over strategies. Any assemblage with
/// `Σ Tr(F_{a|x} ρ_{a|x}) < 0` is steerable.
#[derive(Debug, Clone)]
pub struct SteeringInequality {
    pub coefficients: Vec<Vec<HermitianOperator>>,
    /// Strategy set the normalization refers to: settings with vanishing
    /// outcomes in the source assemblage count only the others.
    pub strategies: DeterministicStrategySet,
    /// Outcome labels the strategies range over.
    pub labels: Vec<Vec<usize>>,
    pub bound: f64,
}

impl SteeringInequality {
    pub fn evaluate(&self, asm: &Assemblage) -> Result<f64> {
        self.evaluate_matrices(&asm.member_matrices())
    }

    /// `Σ Tr(F_{a|x} M_{a|x})` for any family of the same shape.
    pub fn evaluate_matrices(&self, family: &[Vec<CMat>]) -> Result<f64> {
        if family.len() != self.coefficients.len()
            || family.iter().any(|row| row.len() != self.coefficients[0].len())
        {
            return mismatch("family shape does not match the inequality");
        }
        let mut total = 0.0;
        for (frow, mrow) in self.coefficients.iter().zip(family) {
            for (f, m) in frow.iter().zip(mrow) {
                if f.dim() != m.nrows() {
                    return mismatch("operator dimension does not match the inequality");
                }
                total += linalg::trace_prod(f.matrix(), m);
            }
        }
        Ok(total)
    }

    fn strategy_sum(&self, l: usize) -> CMat {
        let d = self.coefficients[0][0].dim();
        let mut out = CMat::zeros(d, d);
        for (x, row) in self.coefficients.iter().enumerate() {
            out += row[self.labels[x][self.strategies.outcome(l, x)]].matrix();
        }
        out
    }

    /// Smallest eigenvalue over all strategy sums; nonnegative for a valid
    /// inequality.
    pub fn min_strategy_eig(&self) -> f64 {
        (0..self.strategies.len())
            .map(|l| linalg::min_eig(&self.strategy_sum(l)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest eigenvalue over every outcome assignment of the full
    /// rectangular shape, including outcomes absent from `labels`.
    pub fn min_full_strategy_eig(&self) -> f64 {
        let m = self.coefficients.len();
        let q = self.coefficients[0].len();
        let full = crate::strategies::enumerate_strategies(m, q).expect("guarded by construction");
        (0..full.len())
            .map(|l| {
                let mut s = CMat::zeros(self.coefficients[0][0].dim(), self.coefficients[0][0].dim());
                for (x, row) in self.coefficients.iter().enumerate() {
                    s += row[full.outcome(l, x)].matrix();
                }
                linalg::min_eig(&s)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `Σ_λ Tr Σ_x F_{λ(x)|x}`, equal to one after construction.
    pub fn normalization(&self) -> f64 {
        (0..self.strategies.len())
            .map(|l| linalg::trace_re(&self.strategy_sum(l)))
            .sum()
    }
}

#[derive(Debug, Clone)]
pub enum Witness {
    Model(LhsModel),
    Inequality(SteeringInequality),
}

#[derive(Debug, Clone)]
pub struct SteerVerdict {
    pub verdict: Verdict,
    pub steerable: bool,
    /// Optimal `μ` of the feasibility problem, read from the primal.
    pub mu: f64,
    /// `Σ Tr(F ρ)` of the extracted certificate, read from the dual.
    pub inequality_value: f64,
    /// Solver's dual objective for `μ`.
    pub dual_objective: f64,
    pub witness: Witness,
    pub diagnostics: Diagnostics,
}

impl SteerVerdict {
    pub fn model(&self) -> Option<&LhsModel> {
        match &self.witness {
            Witness::Model(m) => Some(m),
            Witness::Inequality(_) => None,
        }
    }

    pub fn inequality(&self) -> Option<&SteeringInequality> {
        match &self.witness {
            Witness::Inequality(f) => Some(f),
            Witness::Model(_) => None,
        }
    }
}

pub(crate) fn hermitian_rows(rows: Vec<Vec<CMat>>) -> Vec<Vec<HermitianOperator>> {
    rows.into_iter()
        .map(|r| r.into_iter().map(HermitianOperator::raw).collect())
        .collect()
}

fn solve_feasibility(asm: &Assemblage, cfg: &SdpConfig) -> Result<(sdp::FeasibilityCore, Vec<Vec<usize>>)> {
    let members = asm.member_matrices();
    let core = sdp::feasibility(&members, asm.reduced().matrix(), cfg)?;
    Ok((core, nonzero_labels(asm)))
}

/// Decides whether an assemblage admits an LHS model by maximizing the
/// smallest eigenvalue `μ` over all hidden-state decompositions.
pub fn lhs_feasibility(asm: &Assemblage, cfg: &SdpConfig) -> Result<SteerVerdict> {
    let (core, labels) = solve_feasibility(asm, cfg)?;
    let verdict = Verdict::from_margin(core.mu, cfg.tol);
    let witness = if core.mu >= 0.0 && verdict != Verdict::Steerable {
        Witness::Model(LhsModel {
            strategies: core.strategies.clone(),
            labels: labels.clone(),
            hidden: core.sigma.into_iter().map(HermitianOperator::raw).collect(),
        })
    } else {
        Witness::Inequality(SteeringInequality {
            coefficients: hermitian_rows(core.f),
            strategies: core.strategies,
            labels,
            bound: 0.0,
        })
    };
    Ok(SteerVerdict {
        verdict,
        steerable: verdict == Verdict::Steerable,
        mu: core.mu,
        inequality_value: core.value,
        dual_objective: core.dual_objective,
        witness,
        diagnostics: core.diagnostics,
    })
}

/// The optimal dual certificate of the feasibility problem. Its value on
/// `asm` equals the optimal `μ`.
pub fn dual_inequality(asm: &Assemblage, cfg: &SdpConfig) -> Result<SteeringInequality> {
    let (core, labels) = solve_feasibility(asm, cfg)?;
    Ok(SteeringInequality {
        coefficients: hermitian_rows(core.f),
        strategies: core.strategies,
        labels,
        bound: 0.0,
    })
}

#[derive(Debug, Clone)]
pub struct WeightResult {
    /// Smallest steerable fraction, relative to `Tr ρ_B`.
    pub weight: f64,
    pub lhs_part: LhsModel,
    pub steerable_part: Vec<Vec<CMat>>,
    pub diagnostics: Diagnostics,
}

pub fn steering_weight(asm: &Assemblage, cfg: &SdpConfig) -> Result<WeightResult> {
    let core = sdp::weight(&asm.member_matrices(), asm.reduced().matrix(), cfg)?;
    Ok(WeightResult {
        weight: core.value.clamp(0.0, 1.0),
        lhs_part: LhsModel {
            strategies: core.strategies,
            labels: nonzero_labels(asm),
            hidden: core.sigma.into_iter().map(HermitianOperator::raw).collect(),
        },
        steerable_part: core.steerable_part,
        diagnostics: core.diagnostics,
    })
}

#[derive(Debug, Clone)]
pub struct RobustnessResult {
    pub robustness: f64,
    /// Hidden operators of `(ρ + t·N)` before renormalization by `1 + t`.
    pub mixed_model: LhsModel,
    /// Normalized noise assemblage `N`, present when `t > 0`.
    pub noise: Option<Vec<Vec<CMat>>>,
    pub diagnostics: Diagnostics,
}

pub fn steering_robustness(asm: &Assemblage, cfg: &SdpConfig) -> Result<RobustnessResult> {
    let core = sdp::robustness(&asm.member_matrices(), asm.reduced().matrix(), cfg)?;
    let t = core.value.max(0.0);
    let noise = (t > cfg.tol).then(|| {
        let scale = c(1.0 / t, 0.0);
        core.excess
            .iter()
            .map(|row| row.iter().map(|s| linalg::hermitian_part(&(s * scale))).collect())
            .collect()
    });
    Ok(RobustnessResult {
        robustness: t,
        mixed_model: LhsModel {
            strategies: core.strategies,
            labels: (0..asm.settings()).map(|_| (0..asm.outcomes()).collect()).collect(),
            hidden: core.sigma.into_iter().map(HermitianOperator::raw).collect(),
        },
        noise,
        diagnostics: core.diagnostics,
    })
}

#[derive(Debug, Clone)]
pub struct CriticalAlpha {
    pub alpha: f64,
    /// The optimum reached the cap, so the true value may be larger.
    pub capped: bool,
    pub cap: f64,
    pub diagnostics: Diagnostics,
}

/// `αρ + (1−α) I_A/d_A ⊗ ρ_B`.
pub fn depolarize_first(rho: &DensityMatrix, dims: (usize, usize), alpha: f64) -> Result<DensityMatrix> {
    let rb = linalg::partial_trace(rho.matrix(), dims, linalg::Subsystem::A)?;
    let noise = linalg::kron(&(linalg::identity(dims.0) / c(dims.0 as f64, 0.0)), &rb);
    Ok(DensityMatrix::raw(rho.matrix() * c(alpha, 0.0) + noise * c(1.0 - alpha, 0.0)))
}

fn state_dims(rho: &DensityMatrix, ms: &MeasurementSet) -> Result<(usize, usize)> {
    let da = ms.dim();
    if rho.dim() % da != 0 {
        return mismatch(format!("state dim {} not divisible by {da}", rho.dim()));
    }
    Ok((da, rho.dim() / da))
}

/// Largest `α ≤ cap` for which the assemblage of `ρ^(α)` under `ms` is
/// unsteerable, from one SDP with `α` as a variable.
pub fn critical_alpha_capped(
    rho: &DensityMatrix,
    ms: &MeasurementSet,
    cap: f64,
    cfg: &SdpConfig,
) -> Result<CriticalAlpha> {
    let dims = state_dims(rho, ms)?;
    let asm = assemblage_from_state(rho, ms)?;
    let rb = asm.reduced().matrix().clone();
    let noise: Vec<Vec<CMat>> = (0..ms.settings())
        .map(|x| {
            (0..ms.outcomes())
                .map(|a| &rb * c(linalg::trace_re(ms.effect(x, a)) / dims.0 as f64, 0.0))
                .collect()
        })
        .collect();
    let core = sdp::critical_mixing(&asm.member_matrices(), &noise, &rb, cap, cfg)?;
    Ok(CriticalAlpha {
        alpha: if core.capped { cap } else { core.value.min(cap) },
        capped: core.capped,
        cap,
        diagnostics: core.diagnostics,
    })
}

/// Critical mixing clipped at one: `1` means the state stays unsteerable
/// under `ms` without added noise.
pub fn critical_alpha(rho: &DensityMatrix, ms: &MeasurementSet, cfg: &SdpConfig) -> Result<CriticalAlpha> {
    critical_alpha_capped(rho, ms, 1.0, cfg)
}

/// Critical mixing by bisection on the feasibility verdict, to within
/// `bisect_tol`; clipped at one.
pub fn critical_alpha_bisect(
    rho: &DensityMatrix,
    ms: &MeasurementSet,
    bisect_tol: f64,
    cfg: &SdpConfig,
) -> Result<f64> {
    let dims = state_dims(rho, ms)?;
    let steerable_at = |alpha: f64| -> Result<bool> {
        let mixed = depolarize_first(rho, dims, alpha)?;
        Ok(lhs_feasibility(&assemblage_from_state(&mixed, ms)?, cfg)?.steerable)
    };
    if !steerable_at(1.0)? {
        return Ok(1.0);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > bisect_tol {
        let mid = 0.5 * (lo + hi);
        if steerable_at(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
