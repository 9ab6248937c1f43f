//! Seeded random states, unitaries and measurements.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{self, c, CMat, CVec};
use crate::operator::{DensityMatrix, MeasurementSet, Povm};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| c(gaussian(rng), gaussian(rng)))
}

/// Haar-random unitary: QR of a complex Gaussian matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / c(rjj.norm(), 0.0) } else { c(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Uniformly distributed unit vector in `C^d`.
pub fn haar_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVec {
    let v = CVec::from_fn(d, |_, _| c(gaussian(rng), gaussian(rng)));
    let n = v.norm();
    v / c(n, 0.0)
}

pub fn random_pure<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    DensityMatrix::raw(linalg::outer(&haar_vector(d, rng)))
}

/// `G G† / Tr` with `G` a `d×rank` Gaussian matrix.
pub fn random_state<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(d, rank.max(1), rng);
    let m = &g * g.adjoint();
    let t = linalg::trace_re(&m);
    DensityMatrix::raw(linalg::hermitian_part(&(m / c(t, 0.0))))
}

pub fn random_axis<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = [gaussian(rng), gaussian(rng), gaussian(rng)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-9 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

pub fn random_projective<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Povm {
    Povm::from_basis(&haar_unitary(d, rng)).expect("unitary columns form a basis")
}

/// Random projective qubit measurements along `m` axes.
pub fn random_qubit_set<R: Rng + ?Sized>(m: usize, rng: &mut R) -> MeasurementSet {
    let axes: Vec<_> = (0..m).map(|_| random_axis(rng)).collect();
    MeasurementSet::from_axes(&axes).expect("unit axes")
}

/// Random two-outcome qubit POVM `{½((1+α)I + a·σ), ½((1−α)I − a·σ)}` with
/// `|a| ≤ 1 − |α|`.
pub fn random_dichotomic_qubit<R: Rng + ?Sized>(rng: &mut R) -> Povm {
    let alpha: f64 = rng.random_range(-0.6..0.6);
    let len = rng.random_range(0.0..1.0) * (1.0 - alpha.abs());
    let n = random_axis(rng);
    let a = [n[0] * len, n[1] * len, n[2] * len];
    let e = (linalg::identity(2) * c(1.0 + alpha, 0.0) + linalg::bloch_operator(&a)) * c(0.5, 0.0);
    Povm::dichotomic(e).expect("valid by construction")
}
