use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::problem::{Problem, PsdBlock};
use crate::{ConicSolver, Solution, SolveInfo, SolverError, Status};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    /// Target for relative residuals and gap.
    pub tol: f64,
    /// Accepted when the iteration stalls before reaching `tol`.
    pub tol_inaccurate: f64,
    pub max_iter: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
    /// Block count above which per-block work is spread over threads.
    pub parallel_threshold: usize,
}

impl Settings {
    pub const DEFAULT: Settings = Settings {
        tol: 1e-10,
        tol_inaccurate: 1e-7,
        max_iter: 150,
        step_fraction: 0.98,
        parallel_threshold: 256,
    };
}

impl Default for Settings {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Debug, Clone)]
pub struct InteriorPoint {
    pub settings: Settings,
    /// Reported in [`SolveInfo`].
    pub label: &'static str,
}

impl Default for InteriorPoint {
    fn default() -> Self {
        Self::new(Settings::DEFAULT)
    }
}

impl InteriorPoint {
    pub const fn new(settings: Settings) -> Self {
        Self { settings, label: "ipm" }
    }

    pub const fn labelled(settings: Settings, label: &'static str) -> Self {
        Self { settings, label }
    }
}

impl ConicSolver for InteriorPoint {
    fn name(&self) -> &'static str {
        self.label
    }

    fn solve(&self, problem: &Problem) -> Result<Solution, SolverError> {
        problem.validate()?;
        let mut sol = Engine::new(problem, self.settings).run()?;
        sol.info.solver = self.label;
        Ok(sol)
    }
}

/// Per-block lookup: which frame elements the block reads, and for every term
/// the slot of its frame element in that list.
struct BlockIndex {
    used: Vec<usize>,
    slot: Vec<usize>,
}

impl BlockIndex {
    fn new(block: &PsdBlock) -> Self {
        let mut used: Vec<usize> = block.terms.iter().map(|t| t.frame).collect();
        used.sort_unstable();
        used.dedup();
        let slot = block
            .terms
            .iter()
            .map(|t| used.binary_search(&t.frame).unwrap())
            .collect();
        Self { used, slot }
    }
}

#[derive(Clone)]
struct Iterate {
    u: DVector<f64>,
    v: DVector<f64>,
    w: DVector<f64>,
    x: Vec<DMatrix<f64>>,
    s: Vec<DMatrix<f64>>,
    y: DVector<f64>,
}

struct Residuals {
    rp: DVector<f64>,
    ru: DVector<f64>,
    rv: DVector<f64>,
    rd: Vec<DMatrix<f64>>,
    pinf: f64,
    dinf: f64,
    pobj: f64,
    dobj: f64,
    gap: f64,
    mu: f64,
}

impl Residuals {
    fn merit(&self) -> f64 {
        self.pinf.max(self.dinf).max(self.gap)
    }
}

struct Direction {
    du: DVector<f64>,
    dv: DVector<f64>,
    dw: DVector<f64>,
    dx: Vec<DMatrix<f64>>,
    ds: Vec<DMatrix<f64>>,
}

struct Engine<'a> {
    p: &'a Problem,
    st: Settings,
    index: Vec<BlockIndex>,
    m: usize,
    b_norm: f64,
    c_norm: f64,
    degree: f64,
    parallel: bool,
}

fn sym(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.dot(b)
}

/// Largest `t` with `x + t·dx` positive semidefinite (infinite if unbounded).
fn max_step_psd(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
    let Some(chol) = Cholesky::new(x.clone()) else {
        return 0.0;
    };
    let l = chol.l();
    let Some(half) = l.solve_lower_triangular(dx) else {
        return 0.0;
    };
    let Some(full) = l.solve_lower_triangular(&half.transpose()) else {
        return 0.0;
    };
    let lam = SymmetricEigen::new(sym(&full)).eigenvalues.min();
    if lam >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / lam
    }
}

fn max_step_lp(v: &DVector<f64>, dv: &DVector<f64>) -> f64 {
    v.iter()
        .zip(dv.iter())
        .filter(|(_, &d)| d < 0.0)
        .map(|(&a, &d)| -a / d)
        .fold(f64::INFINITY, f64::min)
}

fn spd_inverse(s: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    Cholesky::new(s.clone()).map(|c| sym(&c.inverse()))
}

impl<'a> Engine<'a> {
    fn new(p: &'a Problem, st: Settings) -> Self {
        let mut c_norm_sq = 0.0;
        for v in p.free.iter().chain(&p.nonneg) {
            c_norm_sq += v.cost * v.cost;
        }
        for blk in &p.blocks {
            c_norm_sq += blk.cost.norm_squared();
        }
        Self {
            p,
            st,
            index: p.blocks.iter().map(BlockIndex::new).collect(),
            m: p.rows(),
            b_norm: p.b.norm(),
            c_norm: c_norm_sq.sqrt(),
            degree: p.barrier_degree() as f64,
            parallel: p.blocks.len() >= st.parallel_threshold,
        }
    }

    fn map_blocks<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        if self.parallel {
            (0..self.p.blocks.len()).into_par_iter().map(f).collect()
        } else {
            (0..self.p.blocks.len()).map(f).collect()
        }
    }

    /// A(u, v, X).
    fn apply_a(&self, u: &DVector<f64>, v: &DVector<f64>, xs: &[DMatrix<f64>]) -> DVector<f64> {
        let mut out = DVector::zeros(self.m);
        for (var, &val) in self.p.free.iter().zip(u.iter()) {
            for &(row, c) in &var.column {
                out[row] += c * val;
            }
        }
        for (var, &val) in self.p.nonneg.iter().zip(v.iter()) {
            for &(row, c) in &var.column {
                out[row] += c * val;
            }
        }
        let contributions = self.map_blocks(|j| {
            let blk = &self.p.blocks[j];
            let idx = &self.index[j];
            let vals: Vec<f64> = idx
                .used
                .iter()
                .map(|&k| inner(&blk.frame[k], &xs[j]))
                .collect();
            blk.terms
                .iter()
                .zip(&idx.slot)
                .map(|(t, &sl)| (t.row, t.coef * vals[sl]))
                .collect::<Vec<_>>()
        });
        for list in contributions {
            for (row, val) in list {
                out[row] += val;
            }
        }
        out
    }

    fn apply_at_free(&self, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.p.free.len(),
            self.p
                .free
                .iter()
                .map(|v| v.column.iter().map(|&(r, c)| c * y[r]).sum::<f64>()),
        )
    }

    fn apply_at_nonneg(&self, y: &DVector<f64>) -> DVector<f64> {
        DVector::from_iterator(
            self.p.nonneg.len(),
            self.p
                .nonneg
                .iter()
                .map(|v| v.column.iter().map(|&(r, c)| c * y[r]).sum::<f64>()),
        )
    }

    fn apply_at_block(&self, j: usize, y: &DVector<f64>) -> DMatrix<f64> {
        let blk = &self.p.blocks[j];
        let idx = &self.index[j];
        let mut weights = vec![0.0; idx.used.len()];
        for (t, &sl) in blk.terms.iter().zip(&idx.slot) {
            weights[sl] += t.coef * y[t.row];
        }
        let mut out = DMatrix::zeros(blk.dim, blk.dim);
        for (&k, &wt) in idx.used.iter().zip(&weights) {
            if wt != 0.0 {
                out += &blk.frame[k] * wt;
            }
        }
        out
    }

    fn initial_point(&self) -> Iterate {
        let (b_scale, c_scale) = self.p.data_scale();
        let xi = 1.0_f64.max(b_scale.sqrt());
        let eta = 1.0_f64.max(c_scale.sqrt());
        Iterate {
            u: DVector::zeros(self.p.free.len()),
            v: DVector::from_element(self.p.nonneg.len(), xi),
            w: DVector::from_element(self.p.nonneg.len(), eta),
            x: self
                .p
                .blocks
                .iter()
                .map(|b| DMatrix::identity(b.dim, b.dim) * xi)
                .collect(),
            s: self
                .p
                .blocks
                .iter()
                .map(|b| DMatrix::identity(b.dim, b.dim) * eta)
                .collect(),
            y: DVector::zeros(self.m),
        }
    }

    fn residuals(&self, it: &Iterate) -> Residuals {
        let rp = &self.p.b - self.apply_a(&it.u, &it.v, &it.x);
        let cu = DVector::from_iterator(self.p.free.len(), self.p.free.iter().map(|v| v.cost));
        let cv = DVector::from_iterator(self.p.nonneg.len(), self.p.nonneg.iter().map(|v| v.cost));
        let ru = &cu - self.apply_at_free(&it.y);
        let rv = &cv - self.apply_at_nonneg(&it.y) - &it.w;
        let rd: Vec<DMatrix<f64>> = self.map_blocks(|j| {
            &self.p.blocks[j].cost - self.apply_at_block(j, &it.y) - &it.s[j]
        });
        let mut pobj = cu.dot(&it.u) + cv.dot(&it.v);
        let mut comp = it.v.dot(&it.w);
        for (j, blk) in self.p.blocks.iter().enumerate() {
            pobj += inner(&blk.cost, &it.x[j]);
            comp += inner(&it.x[j], &it.s[j]);
        }
        let dobj = self.p.b.dot(&it.y);
        let dres_sq = ru.norm_squared()
            + rv.norm_squared()
            + rd.iter().map(|r| r.norm_squared()).sum::<f64>();
        Residuals {
            pinf: rp.norm() / (1.0 + self.b_norm),
            dinf: dres_sq.sqrt() / (1.0 + self.c_norm),
            gap: (pobj - dobj).abs().max(comp.abs()) / (1.0 + pobj.abs() + dobj.abs()),
            mu: comp / self.degree,
            rp,
            ru,
            rv,
            rd,
            pobj,
            dobj,
        }
    }

    /// Schur complement `M_ab = Σ_j Tr(A_a X A_b S⁻¹) + Σ_v (v/w) A_v[a] A_v[b]`.
    fn schur(&self, it: &Iterate, sinv: &[DMatrix<f64>]) -> DMatrix<f64> {
        let m = self.m;
        let local = |j: usize, acc: &mut DMatrix<f64>| {
            let blk = &self.p.blocks[j];
            let idx = &self.index[j];
            let g: Vec<DMatrix<f64>> = idx
                .used
                .iter()
                .map(|&k| &it.x[j] * &blk.frame[k] * &sinv[j])
                .collect();
            let r = idx.used.len();
            let mut l = DMatrix::zeros(r, r);
            for a in 0..r {
                for b in a..r {
                    let val = inner(&g[a], &blk.frame[idx.used[b]]);
                    l[(a, b)] = val;
                    l[(b, a)] = val;
                }
            }
            for (t1, &s1) in blk.terms.iter().zip(&idx.slot) {
                for (t2, &s2) in blk.terms.iter().zip(&idx.slot) {
                    acc[(t1.row, t2.row)] += t1.coef * t2.coef * l[(s1, s2)];
                }
            }
        };
        let mut mat = if self.parallel {
            (0..self.p.blocks.len())
                .into_par_iter()
                .fold(
                    || DMatrix::zeros(m, m),
                    |mut acc, j| {
                        local(j, &mut acc);
                        acc
                    },
                )
                .reduce(|| DMatrix::zeros(m, m), |a, b| a + b)
        } else {
            let mut acc = DMatrix::zeros(m, m);
            for j in 0..self.p.blocks.len() {
                local(j, &mut acc);
            }
            acc
        };
        for (k, var) in self.p.nonneg.iter().enumerate() {
            let d = it.v[k] / it.w[k];
            for &(r1, c1) in &var.column {
                for &(r2, c2) in &var.column {
                    mat[(r1, r2)] += d * c1 * c2;
                }
            }
        }
        sym(&mat)
    }

    /// Builds and factorizes the augmented system `[[M, A_u], [A_uᵀ, 0]]`.
    fn augmented(&self, schur: DMatrix<f64>) -> DMatrix<f64> {
        let m = self.m;
        let nu = self.p.free.len();
        let mut k = DMatrix::zeros(m + nu, m + nu);
        k.view_mut((0, 0), (m, m)).copy_from(&schur);
        for (i, var) in self.p.free.iter().enumerate() {
            for &(r, c) in &var.column {
                k[(r, m + i)] += c;
                k[(m + i, r)] += c;
            }
        }
        k
    }

    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        it: &Iterate,
        res: &Residuals,
        sinv: &[DMatrix<f64>],
        kkt: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
        kkt_mat: &DMatrix<f64>,
        sigma_mu: f64,
        corr: Option<&Direction>,
    ) -> Result<(DVector<f64>, Direction), SolverError> {
        let m = self.m;
        let nu = self.p.free.len();
        // K_j = σμ S⁻¹ − X − sym((X R_d + dX_aff dS_aff) S⁻¹)
        let kx: Vec<DMatrix<f64>> = self.map_blocks(|j| {
            let mut inner_term = &it.x[j] * &res.rd[j];
            if let Some(c) = corr {
                inner_term += &c.dx[j] * &c.ds[j];
            }
            &sinv[j] * sigma_mu - &it.x[j] - sym(&(inner_term * &sinv[j]))
        });
        let nv = self.p.nonneg.len();
        let mut kv = DVector::zeros(nv);
        for k in 0..nv {
            let mut num = sigma_mu - it.v[k] * it.w[k] - it.v[k] * res.rv[k];
            if let Some(c) = corr {
                num -= c.dv[k] * c.dw[k];
            }
            kv[k] = num / it.w[k];
        }
        let rhs_top = &res.rp - self.apply_a(&DVector::zeros(nu), &kv, &kx);
        let mut rhs = DVector::zeros(m + nu);
        rhs.rows_mut(0, m).copy_from(&rhs_top);
        rhs.rows_mut(m, nu).copy_from(&res.ru);
        let mut sol = kkt
            .solve(&rhs)
            .ok_or_else(|| SolverError::Numerical("singular Newton system".into()))?;
        // one step of iterative refinement
        let resid = &rhs - kkt_mat * &sol;
        if let Some(fix) = kkt.solve(&resid) {
            sol += fix;
        }
        if sol.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::Numerical("non-finite Newton step".into()));
        }
        let dy = sol.rows(0, m).into_owned();
        let du = sol.rows(m, nu).into_owned();
        let ds: Vec<DMatrix<f64>> =
            self.map_blocks(|j| &res.rd[j] - self.apply_at_block(j, &dy));
        let dx: Vec<DMatrix<f64>> = self.map_blocks(|j| {
            &kx[j] + sym(&(&it.x[j] * self.apply_at_block(j, &dy) * &sinv[j]))
        });
        let dw = &res.rv - self.apply_at_nonneg(&dy);
        let mut dv = DVector::zeros(nv);
        for k in 0..nv {
            let mut num = sigma_mu - it.v[k] * it.w[k] - it.v[k] * dw[k];
            if let Some(c) = corr {
                num -= c.dv[k] * c.dw[k];
            }
            dv[k] = num / it.w[k];
        }
        Ok((dy, Direction { du, dv, dw, dx, ds }))
    }

    fn step_lengths(&self, it: &Iterate, d: &Direction) -> (f64, f64) {
        let steps: Vec<(f64, f64)> = self.map_blocks(|j| {
            (max_step_psd(&it.x[j], &d.dx[j]), max_step_psd(&it.s[j], &d.ds[j]))
        });
        let mut ap = max_step_lp(&it.v, &d.dv);
        let mut ad = max_step_lp(&it.w, &d.dw);
        for (a, b) in steps {
            ap = ap.min(a);
            ad = ad.min(b);
        }
        (ap, ad)
    }

    fn run(&self) -> Result<Solution, SolverError> {
        let mut it = self.initial_point();
        let mut best: Option<(f64, Iterate, usize)> = None;
        let mut stall = 0usize;

        for iter in 0..self.st.max_iter {
            let res = self.residuals(&it);
            let merit = res.merit();
            if best.as_ref().is_none_or(|(bm, _, _)| merit < *bm) {
                best = Some((merit, it.clone(), iter));
            }
            if merit <= self.st.tol {
                return Ok(self.finish(it, &res, Status::Optimal, iter));
            }
            if !res.pobj.is_finite() || !res.dobj.is_finite() {
                break;
            }

            let sinv: Vec<DMatrix<f64>> = match self
                .map_blocks(|j| spd_inverse(&it.s[j]))
                .into_iter()
                .collect::<Option<Vec<_>>>()
            {
                Some(v) => v,
                None => break,
            };
            let kkt_mat = self.augmented(self.schur(&it, &sinv));
            let kkt = kkt_mat.clone().lu();

            // predictor
            let (_, aff) = match self.direction(&it, &res, &sinv, &kkt, &kkt_mat, 0.0, None) {
                Ok(d) => d,
                Err(_) => break,
            };
            let (ap, ad) = self.step_lengths(&it, &aff);
            let ap = ap.min(1.0);
            let ad = ad.min(1.0);
            let mut comp_aff = 0.0;
            for j in 0..self.p.blocks.len() {
                let xa = &it.x[j] + &aff.dx[j] * ap;
                let sa = &it.s[j] + &aff.ds[j] * ad;
                comp_aff += inner(&xa, &sa);
            }
            comp_aff += (&it.v + &aff.dv * ap).dot(&(&it.w + &aff.dw * ad));
            let mu_aff = comp_aff / self.degree;
            let sigma = (mu_aff / res.mu).clamp(0.0, 1.0).powi(3);

            // corrector
            let (dy, dir) = match self.direction(
                &it,
                &res,
                &sinv,
                &kkt,
                &kkt_mat,
                sigma * res.mu,
                Some(&aff),
            ) {
                Ok(d) => d,
                Err(_) => break,
            };
            let (ap, ad) = self.step_lengths(&it, &dir);
            let ap = (self.st.step_fraction * ap).min(1.0);
            let ad = (self.st.step_fraction * ad).min(1.0);

            it.u += &dir.du * ap;
            it.v += &dir.dv * ap;
            for (x, dx) in it.x.iter_mut().zip(&dir.dx) {
                *x += dx * ap;
            }
            it.y += &dy * ad;
            it.w += &dir.dw * ad;
            for (s, ds) in it.s.iter_mut().zip(&dir.ds) {
                *s += ds * ad;
            }

            if ap.max(ad) < 1e-10 {
                stall += 1;
            } else {
                stall = 0;
            }
            if stall >= 3 {
                break;
            }
        }

        let (merit, best_it, iter) = best.expect("at least one iterate");
        let res = self.residuals(&best_it);
        if merit <= self.st.tol_inaccurate {
            return Ok(self.finish(best_it, &res, Status::Inaccurate, iter));
        }
        Err(SolverError::NotConverged {
            iterations: iter,
            primal_residual: res.pinf,
            dual_residual: res.dinf,
            gap: res.gap,
        })
    }

    fn finish(&self, it: Iterate, res: &Residuals, status: Status, iterations: usize) -> Solution {
        Solution {
            status,
            primal_objective: res.pobj,
            dual_objective: res.dobj,
            free: it.u,
            nonneg: it.v,
            blocks: it.x,
            y: it.y,
            nonneg_dual: it.w,
            block_duals: it.s,
            info: SolveInfo {
                solver: "ipm",
                iterations,
                primal_residual: res.pinf,
                dual_residual: res.dinf,
                gap: res.gap,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::problem::{ScalarVar, Term};

    fn unit_frame(n: usize) -> crate::Frame {
        let mut out = Vec::new();
        for i in 0..n {
            for j in i..n {
                let mut e = DMatrix::zeros(n, n);
                if i == j {
                    e[(i, i)] = 1.0;
                } else {
                    e[(i, j)] = 0.5;
                    e[(j, i)] = 0.5;
                }
                out.push(e);
            }
        }
        Arc::new(out)
    }

    #[test]
    fn lp_with_free_variable() {
        // min x1 + 2 x2 - u  s.t.  x1 + x2 = 1,  u - x1 = 0
        let mut p = Problem::new(DVector::from_vec(vec![1.0, 0.0]));
        p.add_nonneg(ScalarVar::new(1.0, vec![(0, 1.0), (1, -1.0)]));
        p.add_nonneg(ScalarVar::new(2.0, vec![(0, 1.0)]));
        p.add_free(ScalarVar::new(-1.0, vec![(1, 1.0)]));
        let sol = InteriorPoint::default().solve(&p).unwrap();
        assert_eq!(sol.status, Status::Optimal);
        assert!((sol.primal_objective - 0.0).abs() < 1e-8, "{}", sol.primal_objective);
        assert!((sol.nonneg[0] - 1.0).abs() < 1e-7);
        assert!((sol.free[0] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn min_eigenvalue_sdp() {
        // min <C, X> s.t. tr X = 1: optimum is the smallest eigenvalue of C
        let c = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]);
        let frame = Arc::new(vec![DMatrix::identity(3, 3)]);
        let mut p = Problem::new(DVector::from_vec(vec![1.0]));
        p.add_block(PsdBlock::new(
            c.clone(),
            frame,
            vec![Term { row: 0, frame: 0, coef: 1.0 }],
        ));
        let sol = InteriorPoint::default().solve(&p).unwrap();
        let expected = 2.0 - 2f64.sqrt();
        assert!((sol.primal_objective - expected).abs() < 1e-8);
        assert!((sol.dual_objective - expected).abs() < 1e-8);
        assert!((sol.y[0] - expected).abs() < 1e-8);
    }

    #[test]
    fn max_cut_triangle_matches_closed_form() {
        // max <L/4, X> s.t. X_ii = 1; for the triangle the value is 9/4
        let l = DMatrix::from_row_slice(3, 3, &[2.0, -1.0, -1.0, -1.0, 2.0, -1.0, -1.0, -1.0, 2.0]);
        let frame = unit_frame(3);
        let diag_slots = [0usize, 3, 5];
        let mut p = Problem::new(DVector::from_element(3, 1.0));
        p.add_block(PsdBlock::new(
            -l / 4.0,
            frame,
            diag_slots
                .iter()
                .enumerate()
                .map(|(r, &k)| Term { row: r, frame: k, coef: 1.0 })
                .collect(),
        ));
        let sol = InteriorPoint::default().solve(&p).unwrap();
        assert!((sol.primal_objective + 2.25).abs() < 1e-8);
    }

    #[test]
    fn many_blocks_parallel_matches_serial() {
        let frame = Arc::new(vec![DMatrix::identity(2, 2)]);
        let build = || {
            let mut p = Problem::new(DVector::from_vec(vec![1.0]));
            for k in 0..40 {
                let c = DMatrix::from_row_slice(2, 2, &[1.0 + k as f64 * 0.01, 0.3, 0.3, 1.0]);
                p.add_block(PsdBlock::new(
                    c,
                    frame.clone(),
                    vec![Term { row: 0, frame: 0, coef: 1.0 }],
                ));
            }
            p
        };
        let p = build();
        let serial = InteriorPoint::default().solve(&p).unwrap();
        let par = InteriorPoint::new(Settings {
            parallel_threshold: 1,
            ..Settings::default()
        })
        .solve(&p)
        .unwrap();
        assert!((serial.primal_objective - 0.7).abs() < 1e-8);
        assert!((serial.primal_objective - par.primal_objective).abs() < 1e-10);
    }

    #[test]
    fn infeasible_problem_is_reported() {
        // x ≥ 0 and x = -1
        let mut p = Problem::new(DVector::from_vec(vec![-1.0]));
        p.add_nonneg(ScalarVar::new(0.0, vec![(0, 1.0)]));
        assert!(InteriorPoint::default().solve(&p).is_err());
    }

    #[test]
    fn rejects_bad_rows() {
        let mut p = Problem::new(DVector::from_vec(vec![1.0]));
        p.add_nonneg(ScalarVar::new(0.0, vec![(3, 1.0)]));
        assert!(matches!(
            InteriorPoint::default().solve(&p),
            Err(SolverError::InvalidProblem(_))
        ));
    }
}
