//! Seeded random sampling of matrices and states.
//!
//! Everything is driven by `ChaCha8Rng` so a seed reproduces results
//! across platforms.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{c, outer, ComplexMatrix, DensityOperator, C64};

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Matrix with iid standard complex Gaussian entries.
pub fn ginibre(rng: &mut Rng, rows: usize, cols: usize) -> ComplexMatrix {
    DMatrix::from_fn(rows, cols, |_, _| c(gaussian(rng), gaussian(rng)))
}

/// Haar-random isometry `cols -> rows` (requires `rows >= cols`).
pub fn isometry(rng: &mut Rng, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows >= cols, "isometry needs rows >= cols");
    let g = ginibre(rng, rows, cols);
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut q = q.columns(0, cols).into_owned();
    for j in 0..cols {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / c(d.norm(), 0.0) } else { c(1.0, 0.0) };
        for i in 0..rows {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn unitary(rng: &mut Rng, n: usize) -> ComplexMatrix {
    isometry(rng, n, n)
}

pub fn pure_vector(rng: &mut Rng, n: usize) -> DVector<C64> {
    let v = DVector::from_fn(n, |_, _| c(gaussian(rng), gaussian(rng)));
    let norm = v.norm();
    v / c(norm, 0.0)
}

pub fn pure_state(rng: &mut Rng, dims: Vec<usize>) -> DensityOperator {
    let n = dims.iter().product();
    let v = pure_vector(rng, n);
    DensityOperator::pure(&v, dims).expect("normalized vector")
}

/// Random mixed state `G G^dagger / tr` with `rank` columns.
pub fn mixed_state(rng: &mut Rng, dims: Vec<usize>, rank: usize) -> DensityOperator {
    let n = dims.iter().product();
    let g = ginibre(rng, n, rank.max(1));
    let m = &g * g.adjoint();
    let t = m.trace().re;
    DensityOperator::new(crate::linalg::hermitian_part(&(m / c(t, 0.0))), dims).expect("ginibre state is valid")
}

/// Probability vector drawn uniformly from the simplex.
pub fn simplex(rng: &mut Rng, n: usize) -> Vec<f64> {
    let e: Vec<f64> = (0..n).map(|_| -(1.0 - rand::Rng::random::<f64>(rng)).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|x| x / s).collect()
}

pub fn uniform(rng: &mut Rng) -> f64 {
    rand::Rng::random::<f64>(rng)
}

pub fn pure_projector(v: &DVector<C64>) -> ComplexMatrix {
    outer(v, v)
}
