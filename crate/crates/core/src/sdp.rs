//! Translation of Hermitian linear matrix equations into the real conic
//! form of `steerkit_conic`, and the strategy-based programs built on it.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use steerkit_conic::{
    ConicSolver, InteriorPoint, Problem, PsdBlock, ScalarVar, Settings, Solution, Term,
};

use crate::error::Result;
use crate::linalg::{self, c, CMat};
use crate::strategies::DeterministicStrategySet;

/// Eigenvalues of the reduced state below this are treated as zero.
pub const SUPPORT_CUTOFF: f64 = 1e-10;

static DEFAULT_SOLVER: InteriorPoint = InteriorPoint::new(Settings::DEFAULT);

/// Verdict tolerance and conic backend for the SDP-based operations.
#[derive(Clone, Copy)]
pub struct SdpConfig<'a> {
    pub tol: f64,
    pub solver: &'a dyn ConicSolver,
}

impl Default for SdpConfig<'static> {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            solver: &DEFAULT_SOLVER,
        }
    }
}

impl<'a> SdpConfig<'a> {
    pub fn with_solver(solver: &'a dyn ConicSolver) -> Self {
        Self { tol: 1e-7, solver }
    }

    pub fn tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

impl std::fmt::Debug for SdpConfig<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SdpConfig")
            .field("tol", &self.tol)
            .field("solver", &self.solver.name())
            .finish()
    }
}

/// Solver status and residuals attached to every SDP result.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub solver: String,
    pub status: String,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub tol: f64,
}

impl Diagnostics {
    fn from_solution(sol: &Solution, tol: f64) -> Self {
        Self {
            solver: sol.info.solver.to_string(),
            status: sol.status.as_str().to_string(),
            iterations: sol.info.iterations,
            primal_residual: sol.info.primal_residual,
            dual_residual: sol.info.dual_residual,
            gap: sol.info.gap,
            tol,
        }
    }
}

/// A system of Hermitian equations `Σ (blocks) + Σ (scalars) = R_g`, one
/// per group `g`, plus optional real scalar rows. Each Hermitian equation
/// occupies `d²` real rows, one per element of an orthonormal Hermitian
/// basis; PSD blocks are stored through the real `2d×2d` embedding.
pub(crate) struct HermSystem {
    d: usize,
    basis: Vec<CMat>,
    frame: Arc<Vec<DMatrix<f64>>>,
    groups: usize,
    b: DVector<f64>,
    problem: Problem,
}

impl HermSystem {
    pub fn new(d: usize, rhs: &[CMat], scalar_rhs: &[f64]) -> Self {
        let basis = linalg::hermitian_basis(d);
        let nb = d * d;
        let frame = Arc::new(basis.iter().map(|b| linalg::embed(b) * 0.5).collect::<Vec<_>>());
        let mut b = DVector::zeros(rhs.len() * nb + scalar_rhs.len());
        for (g, r) in rhs.iter().enumerate() {
            for (k, bk) in basis.iter().enumerate() {
                b[g * nb + k] = linalg::trace_prod(bk, r);
            }
        }
        for (i, &v) in scalar_rhs.iter().enumerate() {
            b[rhs.len() * nb + i] = v;
        }
        Self {
            d,
            basis,
            frame,
            groups: rhs.len(),
            problem: Problem::new(b.clone()),
            b,
        }
    }

    fn nb(&self) -> usize {
        self.d * self.d
    }

    pub fn scalar_row(&self, i: usize) -> usize {
        self.groups * self.nb() + i
    }

    /// Adds `X ⪰ 0` entering group `g` with weight `coef`; the objective
    /// contribution is `Tr(cost·X)`.
    pub fn add_psd(&mut self, cost: Option<&CMat>, couplings: &[(usize, f64)]) -> usize {
        let nb = self.nb();
        let mut terms = Vec::with_capacity(couplings.len() * nb);
        for &(g, coef) in couplings {
            for k in 0..nb {
                terms.push(Term {
                    row: g * nb + k,
                    frame: k,
                    coef,
                });
            }
        }
        let cost = match cost {
            Some(c) => linalg::embed(c) * 0.5,
            None => DMatrix::zeros(2 * self.d, 2 * self.d),
        };
        self.problem.add_block(PsdBlock::new(cost, self.frame.clone(), terms))
    }

    fn column(&self, herm: &[(usize, CMat)], scalar: &[(usize, f64)]) -> Vec<(usize, f64)> {
        let nb = self.nb();
        let mut col = Vec::new();
        for (g, m) in herm {
            for (k, bk) in self.basis.iter().enumerate() {
                let v = linalg::trace_prod(bk, m);
                if v.abs() > 1e-15 {
                    col.push((g * nb + k, v));
                }
            }
        }
        for &(i, v) in scalar {
            col.push((self.scalar_row(i), v));
        }
        col
    }

    pub fn add_free(&mut self, cost: f64, herm: &[(usize, CMat)], scalar: &[(usize, f64)]) -> usize {
        let col = self.column(herm, scalar);
        self.problem.add_free(ScalarVar::new(cost, col))
    }

    pub fn add_nonneg(&mut self, cost: f64, herm: &[(usize, CMat)], scalar: &[(usize, f64)]) -> usize {
        let col = self.column(herm, scalar);
        self.problem.add_nonneg(ScalarVar::new(cost, col))
    }

    pub fn solve(&self, solver: &dyn ConicSolver) -> Result<Solution> {
        debug_assert_eq!(self.problem.b, self.b);
        Ok(solver.solve(&self.problem)?)
    }

    pub fn block(&self, sol: &Solution, j: usize) -> CMat {
        linalg::unembed(&sol.blocks[j])
    }

    /// Multiplier of group `g` as a Hermitian matrix.
    pub fn group_dual(&self, sol: &Solution, g: usize) -> CMat {
        let nb = self.nb();
        let mut out = CMat::zeros(self.d, self.d);
        for (k, bk) in self.basis.iter().enumerate() {
            out += bk * c(sol.y[g * nb + k], 0.0);
        }
        out
    }
}

/// Assemblage-shaped data restricted to the support of its reduced state,
/// with vanishing outcomes removed.
pub(crate) struct Compressed {
    /// Isometry onto the support, `d × r`.
    pub v: CMat,
    pub members: Vec<Vec<CMat>>,
    pub reduced: CMat,
    /// Original outcome labels kept for each setting.
    pub kept: Vec<Vec<usize>>,
}

impl Compressed {
    pub fn new(members: &[Vec<CMat>], reduced: &CMat, drop_zero: bool) -> Self {
        let v = linalg::support_isometry(reduced, SUPPORT_CUTOFF);
        let vd = v.adjoint();
        let squeeze = |m: &CMat| linalg::hermitian_part(&(&vd * m * &v));
        let scale = linalg::trace_re(reduced).abs().max(1e-300);
        let mut kept = Vec::new();
        let mut out = Vec::new();
        for row in members {
            let keep: Vec<usize> = (0..row.len())
                .filter(|&a| !drop_zero || row[a].norm() > 1e-13 * scale)
                .collect();
            out.push(keep.iter().map(|&a| squeeze(&row[a])).collect());
            kept.push(keep);
        }
        Self {
            reduced: squeeze(reduced),
            v,
            members: out,
            kept,
        }
    }

    pub fn dim(&self) -> usize {
        self.v.ncols()
    }

    pub fn lift(&self, m: &CMat) -> CMat {
        linalg::hermitian_part(&(&self.v * m * self.v.adjoint()))
    }

    pub fn strategies(&self) -> Result<DeterministicStrategySet> {
        DeterministicStrategySet::mixed(self.kept.iter().map(Vec::len).collect())
    }

    /// Spreads reduced-shape coefficients back to the original outcome
    /// labels. Removed outcomes copy the first kept coefficient of their
    /// setting, which keeps every strategy sum unchanged in value.
    pub fn expand(&self, f: &[Vec<CMat>], outcomes: usize) -> Vec<Vec<CMat>> {
        f.iter()
            .zip(&self.kept)
            .map(|(row, keep)| {
                let lifted: Vec<CMat> = row.iter().map(|m| self.lift(m)).collect();
                (0..outcomes)
                    .map(|a| match keep.iter().position(|&k| k == a) {
                        Some(i) => lifted[i].clone(),
                        None => lifted[0].clone(),
                    })
                    .collect()
            })
            .collect()
    }
}

/// Index of the equation for `(x, a)` in the redundancy-free layout, where
/// the last outcome of each setting is implied by a shared global equation.
struct ReducedLayout {
    offsets: Vec<usize>,
    global: usize,
}

impl ReducedLayout {
    fn new(outcomes: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(outcomes.len());
        let mut n = 0;
        for &q in outcomes {
            offsets.push(n);
            n += q - 1;
        }
        Self { offsets, global: n }
    }

    fn group(&self, x: usize, a: usize, q: usize) -> Option<usize> {
        (a + 1 < q).then(|| self.offsets[x] + a)
    }
}

/// Sum `Σ_x F_{λ(x)|x}` for a strategy.
pub(crate) fn strategy_sum(f: &[Vec<CMat>], strategies: &DeterministicStrategySet, lambda: usize) -> CMat {
    let d = f[0][0].nrows();
    let mut out = CMat::zeros(d, d);
    for (x, row) in f.iter().enumerate() {
        out += &row[strategies.outcome(lambda, x)];
    }
    out
}

pub(crate) struct FeasibilityCore {
    pub mu: f64,
    pub strategies: DeterministicStrategySet,
    /// `σ_λ = P_λ + μ I` on the full space, aligned with `strategies`.
    pub sigma: Vec<CMat>,
    /// Certificate coefficients in the original outcome labels.
    pub f: Vec<Vec<CMat>>,
    /// `Σ Tr(F ρ)` after repair and normalization.
    pub value: f64,
    /// Solver's dual objective for `μ`.
    pub dual_objective: f64,
    pub diagnostics: Diagnostics,
}

/// `max μ` subject to `Σ_λ D(a|x,λ) σ_λ = ρ_{a|x}` and `σ_λ ⪰ μ I`.
pub(crate) fn feasibility(members: &[Vec<CMat>], reduced: &CMat, cfg: &SdpConfig) -> Result<FeasibilityCore> {
    let comp = Compressed::new(members, reduced, true);
    let strategies = comp.strategies()?;
    let r = comp.dim();
    let m = strategies.settings();
    let qs: Vec<usize> = (0..m).map(|x| strategies.outcomes(x)).collect();
    let layout = ReducedLayout::new(&qs);

    let mut rhs = Vec::new();
    for (x, row) in comp.members.iter().enumerate() {
        rhs.extend(row.iter().take(qs[x] - 1).cloned());
    }
    rhs.push(comp.reduced.clone());
    let mut sys = HermSystem::new(r, &rhs, &[]);

    for lambda in 0..strategies.len() {
        let mut couplings = Vec::with_capacity(m + 1);
        for x in 0..m {
            if let Some(g) = layout.group(x, strategies.outcome(lambda, x), qs[x]) {
                couplings.push((g, 1.0));
            }
        }
        couplings.push((layout.global, 1.0));
        sys.add_psd(None, &couplings);
    }
    let id = linalg::identity(r);
    let n = strategies.len() as f64;
    let mut mu_col = Vec::new();
    for x in 0..m {
        for a in 0..qs[x] - 1 {
            let g = layout.group(x, a, qs[x]).unwrap();
            mu_col.push((g, &id * c(n / qs[x] as f64, 0.0)));
        }
    }
    mu_col.push((layout.global, &id * c(n, 0.0)));
    sys.add_free(-1.0, &mu_col, &[]);

    let sol = sys.solve(cfg.solver)?;
    let mu = sol.free[0];

    let sigma = (0..strategies.len())
        .map(|l| comp.lift(&(sys.block(&sol, l) + &id * c(mu, 0.0))))
        .collect();

    // multipliers of the reduced equations back to one coefficient per (a,x)
    let yb = sys.group_dual(&sol, layout.global) * c(1.0 / m as f64, 0.0);
    let mut f: Vec<Vec<CMat>> = (0..m)
        .map(|x| {
            (0..qs[x])
                .map(|a| {
                    let base = match layout.group(x, a, qs[x]) {
                        Some(g) => sys.group_dual(&sol, g) + &yb,
                        None => yb.clone(),
                    };
                    -base
                })
                .collect()
        })
        .collect();
    repair_certificate(&mut f, &strategies);
    let value: f64 = f
        .iter()
        .zip(&comp.members)
        .flat_map(|(fr, mr)| fr.iter().zip(mr).map(|(fi, mi)| linalg::trace_prod(fi, mi)))
        .sum();

    Ok(FeasibilityCore {
        mu,
        f: comp.expand(&f, members[0].len()),
        strategies,
        sigma,
        value,
        dual_objective: -sol.dual_objective,
        diagnostics: Diagnostics::from_solution(&sol, cfg.tol),
    })
}

/// Shifts all coefficients by a multiple of the identity so every strategy
/// sum is PSD, then rescales so the strategy sums have unit total trace.
pub(crate) fn repair_certificate(f: &mut [Vec<CMat>], strategies: &DeterministicStrategySet) {
    let m = f.len();
    let d = f[0][0].nrows();
    let worst = (0..strategies.len())
        .map(|l| linalg::min_eig(&strategy_sum(f, strategies, l)))
        .fold(f64::INFINITY, f64::min);
    if worst < 0.0 {
        let shift = linalg::identity(d) * c(-worst / m as f64, 0.0);
        for row in f.iter_mut() {
            for fi in row.iter_mut() {
                *fi += &shift;
            }
        }
    }
    // each (a,x) coefficient appears in |Λ|/q_x strategy sums
    let total: f64 = f
        .iter()
        .enumerate()
        .map(|(x, row)| {
            let mult = strategies.multiplicity(x) as f64;
            row.iter().map(|fi| linalg::trace_re(fi) * mult).sum::<f64>()
        })
        .sum();
    if total.abs() > 0.0 {
        for row in f.iter_mut() {
            for fi in row.iter_mut() {
                *fi /= c(total, 0.0);
            }
        }
    }
}

pub(crate) struct CriticalCore {
    pub value: f64,
    pub capped: bool,
    pub diagnostics: Diagnostics,
}

/// Largest `α ≤ cap` for which `α M_{a|x} + (1−α) N_{a|x}` admits a
/// deterministic decomposition with PSD hidden operators. `M` and `N` must
/// share the reduced operator.
pub(crate) fn critical_mixing(
    signal: &[Vec<CMat>],
    noise: &[Vec<CMat>],
    reduced: &CMat,
    cap: f64,
    cfg: &SdpConfig,
) -> Result<CriticalCore> {
    let v = linalg::support_isometry(reduced, SUPPORT_CUTOFF);
    let vd = v.adjoint();
    let squeeze = |m: &CMat| linalg::hermitian_part(&(&vd * m * &v));
    let scale = linalg::trace_re(reduced).abs().max(1e-300);
    let mut kept_signal = Vec::new();
    let mut kept_noise = Vec::new();
    for (sr, nr) in signal.iter().zip(noise) {
        let keep: Vec<usize> = (0..sr.len())
            .filter(|&a| sr[a].norm() > 1e-13 * scale || nr[a].norm() > 1e-13 * scale)
            .collect();
        kept_signal.push(keep.iter().map(|&a| squeeze(&sr[a])).collect::<Vec<_>>());
        kept_noise.push(keep.iter().map(|&a| squeeze(&nr[a])).collect::<Vec<_>>());
    }
    let red = squeeze(reduced);
    let r = v.ncols();
    let qs: Vec<usize> = kept_signal.iter().map(Vec::len).collect();
    let strategies = DeterministicStrategySet::mixed(qs.clone())?;
    let m = qs.len();
    let layout = ReducedLayout::new(&qs);

    let mut rhs = Vec::new();
    for (x, row) in kept_noise.iter().enumerate() {
        rhs.extend(row.iter().take(qs[x] - 1).cloned());
    }
    rhs.push(red);
    let mut sys = HermSystem::new(r, &rhs, &[cap]);
    for lambda in 0..strategies.len() {
        let mut couplings = Vec::with_capacity(m + 1);
        for x in 0..m {
            if let Some(g) = layout.group(x, strategies.outcome(lambda, x), qs[x]) {
                couplings.push((g, 1.0));
            }
        }
        couplings.push((layout.global, 1.0));
        sys.add_psd(None, &couplings);
    }
    let mut alpha_col = Vec::new();
    for x in 0..m {
        for a in 0..qs[x] - 1 {
            let g = layout.group(x, a, qs[x]).unwrap();
            alpha_col.push((g, &kept_noise[x][a] - &kept_signal[x][a]));
        }
    }
    sys.add_free(-1.0, &alpha_col, &[(0, 1.0)]);
    sys.add_nonneg(0.0, &[], &[(0, 1.0)]);
    let sol = sys.solve(cfg.solver)?;
    let value = sol.free[0];
    Ok(CriticalCore {
        value,
        capped: value >= cap - 1e-6,
        diagnostics: Diagnostics::from_solution(&sol, cfg.tol),
    })
}

pub(crate) struct WeightCore {
    pub value: f64,
    pub sigma: Vec<CMat>,
    pub steerable_part: Vec<Vec<CMat>>,
    pub strategies: DeterministicStrategySet,
    pub diagnostics: Diagnostics,
}

/// `max Σ Tr σ_λ` subject to `Σ_λ D σ_λ + S_{a|x} = ρ_{a|x}`.
pub(crate) fn weight(members: &[Vec<CMat>], reduced: &CMat, cfg: &SdpConfig) -> Result<WeightCore> {
    let comp = Compressed::new(members, reduced, true);
    let strategies = comp.strategies()?;
    let r = comp.dim();
    let m = strategies.settings();
    let mut offsets = Vec::new();
    let mut rhs = Vec::new();
    for row in &comp.members {
        offsets.push(rhs.len());
        rhs.extend(row.iter().cloned());
    }
    let mut sys = HermSystem::new(r, &rhs, &[]);
    let neg_id = -linalg::identity(r);
    for lambda in 0..strategies.len() {
        let couplings: Vec<(usize, f64)> = (0..m)
            .map(|x| (offsets[x] + strategies.outcome(lambda, x), 1.0))
            .collect();
        sys.add_psd(Some(&neg_id), &couplings);
    }
    for g in 0..rhs.len() {
        sys.add_psd(None, &[(g, 1.0)]);
    }
    let sol = sys.solve(cfg.solver)?;
    let total = linalg::trace_re(&comp.reduced);
    let n = strategies.len();
    let sigma = (0..n).map(|l| comp.lift(&sys.block(&sol, l))).collect();
    let steerable_part = comp
        .members
        .iter()
        .enumerate()
        .map(|(x, row)| {
            let reduced_row: Vec<CMat> =
                (0..row.len()).map(|a| sys.block(&sol, n + offsets[x] + a)).collect();
            reduced_row
        })
        .collect::<Vec<_>>();
    let steerable_part = expand_zero(&comp, &steerable_part, members[0].len());
    Ok(WeightCore {
        value: 1.0 + sol.primal_objective / total,
        sigma,
        steerable_part,
        strategies,
        diagnostics: Diagnostics::from_solution(&sol, cfg.tol),
    })
}

/// Lifts reduced-shape operators, filling removed outcomes with zeros.
fn expand_zero(comp: &Compressed, rows: &[Vec<CMat>], outcomes: usize) -> Vec<Vec<CMat>> {
    let d = comp.v.nrows();
    rows.iter()
        .zip(&comp.kept)
        .map(|(row, keep)| {
            (0..outcomes)
                .map(|a| match keep.iter().position(|&k| k == a) {
                    Some(i) => comp.lift(&row[i]),
                    None => CMat::zeros(d, d),
                })
                .collect()
        })
        .collect()
}

pub(crate) struct RobustnessCore {
    pub value: f64,
    pub sigma: Vec<CMat>,
    /// `S_{a|x} = Σ_λ D σ_λ − ρ_{a|x}`, the unnormalized noise.
    pub excess: Vec<Vec<CMat>>,
    pub strategies: DeterministicStrategySet,
    pub diagnostics: Diagnostics,
}

/// `min Σ Tr σ_λ` subject to `Σ_λ D σ_λ − S_{a|x} = ρ_{a|x}`. Noise may live
/// anywhere, so neither the support nor the outcome set is reduced.
pub(crate) fn robustness(members: &[Vec<CMat>], reduced: &CMat, cfg: &SdpConfig) -> Result<RobustnessCore> {
    let d = reduced.nrows();
    let m = members.len();
    let q = members[0].len();
    let strategies = DeterministicStrategySet::mixed(vec![q; m])?;
    let rhs: Vec<CMat> = members.iter().flat_map(|row| row.iter().cloned()).collect();
    let mut sys = HermSystem::new(d, &rhs, &[]);
    let id = linalg::identity(d);
    for lambda in 0..strategies.len() {
        let couplings: Vec<(usize, f64)> = (0..m)
            .map(|x| (x * q + strategies.outcome(lambda, x), 1.0))
            .collect();
        sys.add_psd(Some(&id), &couplings);
    }
    for g in 0..rhs.len() {
        sys.add_psd(None, &[(g, -1.0)]);
    }
    let sol = sys.solve(cfg.solver)?;
    let n = strategies.len();
    let total = linalg::trace_re(reduced);
    Ok(RobustnessCore {
        value: sol.primal_objective / total - 1.0,
        sigma: (0..n).map(|l| sys.block(&sol, l)).collect(),
        excess: (0..m)
            .map(|x| (0..q).map(|a| sys.block(&sol, n + x * q + a)).collect())
            .collect(),
        strategies,
        diagnostics: Diagnostics::from_solution(&sol, cfg.tol),
    })
}

pub(crate) struct IncompatibilityCore {
    pub value: f64,
    pub parent: Vec<CMat>,
    pub strategies: DeterministicStrategySet,
    pub diagnostics: Diagnostics,
}

/// `min s − 1` subject to `Σ_λ D G'_λ − S_{a|x} = A_{a|x}`, `Σ_λ G'_λ = s I`.
pub(crate) fn incompatibility(effects: &[Vec<CMat>], cfg: &SdpConfig) -> Result<IncompatibilityCore> {
    let d = effects[0][0].nrows();
    let m = effects.len();
    let q = effects[0].len();
    let strategies = DeterministicStrategySet::mixed(vec![q; m])?;
    let mut rhs: Vec<CMat> = effects.iter().flat_map(|row| row.iter().cloned()).collect();
    let global = rhs.len();
    rhs.push(CMat::zeros(d, d));
    let mut sys = HermSystem::new(d, &rhs, &[]);
    for lambda in 0..strategies.len() {
        let mut couplings: Vec<(usize, f64)> = (0..m)
            .map(|x| (x * q + strategies.outcome(lambda, x), 1.0))
            .collect();
        couplings.push((global, 1.0));
        sys.add_psd(None, &couplings);
    }
    for g in 0..global {
        sys.add_psd(None, &[(g, -1.0)]);
    }
    sys.add_free(1.0, &[(global, -linalg::identity(d))], &[]);
    let sol = sys.solve(cfg.solver)?;
    let s = sol.free[0];
    Ok(IncompatibilityCore {
        value: s - 1.0,
        parent: (0..strategies.len())
            .map(|l| sys.block(&sol, l) / c(s, 0.0))
            .collect(),
        strategies,
        diagnostics: Diagnostics::from_solution(&sol, cfg.tol),
    })
}
