//! Dense complex matrix helpers.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{mismatch, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

pub fn real(m: &DMatrix<f64>) -> CMat {
    m.map(|x| c(x, 0.0))
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn paulis() -> [CMat; 3] {
    [pauli_x(), pauli_y(), pauli_z()]
}

/// `n·σ` for a real 3-vector.
pub fn bloch_operator(n: &[f64; 3]) -> CMat {
    let [x, y, z] = paulis();
    x * c(n[0], 0.0) + y * c(n[1], 0.0) + z * c(n[2], 0.0)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub fn trace_re(m: &CMat) -> f64 {
    m.trace().re
}

/// `Re Tr(A B)` without forming the product.
pub fn trace_prod(a: &CMat, b: &CMat) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            let x = a[(i, k)] * b[(k, i)];
            acc += x.re;
        }
    }
    acc
}

pub fn expect(rho: &CMat, obs: &CMat) -> f64 {
    trace_prod(rho, obs)
}

pub fn outer(v: &CVec) -> CMat {
    v * v.adjoint()
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn eigh(m: &CMat) -> (DVector<f64>, CMat) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    (vals, vecs)
}

pub fn eigvals(m: &CMat) -> DVector<f64> {
    eigh(m).0
}

pub fn min_eig(m: &CMat) -> f64 {
    if m.nrows() == 2 {
        // closed form keeps the many 2x2 checks cheap
        let a = m[(0, 0)].re;
        let d = m[(1, 1)].re;
        let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
        let half = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        return half - disc;
    }
    eigvals(m)[0]
}

pub fn max_eig(m: &CMat) -> f64 {
    let v = eigvals(m);
    v[v.len() - 1]
}

pub fn trace_norm(m: &CMat) -> f64 {
    eigvals(m).iter().map(|x| x.abs()).sum()
}

/// Applies `f` to the eigenvalues of a Hermitian matrix.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = eigh(m);
    let n = m.nrows();
    let mut scaled = vecs.clone();
    for j in 0..n {
        let fj = c(f(vals[j]), 0.0);
        for i in 0..n {
            scaled[(i, j)] *= fj;
        }
    }
    scaled * vecs.adjoint()
}

/// `M^p` on the support of a PSD matrix; eigenvalues at or below `cutoff`
/// map to zero.
pub fn psd_power(m: &CMat, p: f64, cutoff: f64) -> CMat {
    hermitian_fn(m, |x| if x > cutoff { x.powf(p) } else { 0.0 })
}

/// Columns spanning the eigenspace with eigenvalues above `cutoff`.
pub fn support_isometry(m: &CMat, cutoff: f64) -> CMat {
    let (vals, vecs) = eigh(m);
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > cutoff).collect();
    let mut out = CMat::zeros(m.nrows(), keep.len());
    for (j, &i) in keep.iter().enumerate() {
        out.set_column(j, &vecs.column(i));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

fn check_dims(m: &CMat, dims: (usize, usize)) -> Result<()> {
    let n = dims.0 * dims.1;
    if m.nrows() != n || m.ncols() != n {
        return mismatch(format!(
            "operator is {}x{}, expected {n}x{n} for dims {dims:?}",
            m.nrows(),
            m.ncols()
        ));
    }
    Ok(())
}

/// Traces out `which` from an operator on `C^{d_A} ⊗ C^{d_B}`.
pub fn partial_trace(m: &CMat, dims: (usize, usize), which: Subsystem) -> Result<CMat> {
    check_dims(m, dims)?;
    let (da, db) = dims;
    Ok(match which {
        Subsystem::A => CMat::from_fn(db, db, |k, l| {
            (0..da).map(|i| m[(i * db + k, i * db + l)]).sum()
        }),
        Subsystem::B => CMat::from_fn(da, da, |i, j| {
            (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()
        }),
    })
}

/// Transpose on the second factor.
pub fn partial_transpose(m: &CMat, dims: (usize, usize)) -> Result<CMat> {
    check_dims(m, dims)?;
    let (da, db) = dims;
    Ok(CMat::from_fn(da * db, da * db, |r, s| {
        let (i, k) = (r / db, r % db);
        let (j, l) = (s / db, s % db);
        m[(i * db + l, j * db + k)]
    }))
}

/// Realignment `R[(i,j),(k,l)] = M[(i,k),(j,l)]`, whose singular values are
/// the operator Schmidt coefficients.
pub fn realign(m: &CMat, dims: (usize, usize)) -> Result<CMat> {
    check_dims(m, dims)?;
    let (da, db) = dims;
    Ok(CMat::from_fn(da * da, db * db, |r, s| {
        let (i, j) = (r / da, r % da);
        let (k, l) = (s / db, s % db);
        m[(i * db + k, j * db + l)]
    }))
}

/// Orthonormal basis of the real space of `d×d` Hermitian matrices under
/// `Tr(AB)`: diagonal units, then symmetric and antisymmetric off-diagonal
/// pairs scaled by `1/√2`.
pub fn hermitian_basis(d: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(d * d);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        let mut e = CMat::zeros(d, d);
        e[(i, i)] = ONE;
        out.push(e);
    }
    for i in 0..d {
        for j in i + 1..d {
            let mut e = CMat::zeros(d, d);
            e[(i, j)] = c(s, 0.0);
            e[(j, i)] = c(s, 0.0);
            out.push(e);
            let mut f = CMat::zeros(d, d);
            f[(i, j)] = c(0.0, -s);
            f[(j, i)] = c(0.0, s);
            out.push(f);
        }
    }
    out
}

/// Coordinates of a Hermitian matrix in [`hermitian_basis`].
pub fn hermitian_coords(m: &CMat, basis: &[CMat]) -> Vec<f64> {
    basis.iter().map(|b| trace_prod(b, m)).collect()
}

/// Real symmetric embedding `[[Re, −Im], [Im, Re]]`.
pub fn embed(m: &CMat) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |r, s| {
        let v = m[(r % n, s % n)];
        match (r < n, s < n) {
            (true, true) | (false, false) => v.re,
            (true, false) => -v.im,
            (false, true) => v.im,
        }
    })
}

/// Inverse of [`embed`], averaging the two copies.
pub fn unembed(z: &DMatrix<f64>) -> CMat {
    let n = z.nrows() / 2;
    CMat::from_fn(n, n, |i, j| {
        c(
            0.5 * (z[(i, j)] + z[(i + n, j + n)]),
            0.5 * (z[(i + n, j)] - z[(i, j + n)]),
        )
    })
}

pub fn conj(m: &CMat) -> CMat {
    m.map(|x| x.conj())
}

pub fn transpose(m: &CMat) -> CMat {
    m.transpose()
}

/// Frobenius distance.
pub fn dist(a: &CMat, b: &CMat) -> f64 {
    (a - b).norm()
}
