//! The twisted twirl `E -> int int (U_{A1} (x) V_{B1}) o E o (V_{A0}^dag (x) U_{B0}^dag)`.
//!
//! On normalized Choi matrices the pair `(A0, B1)` transforms as
//! `conj(V) (x) V` and the pair `(B0, A1)` as `conj(U) (x) U`, so the Haar
//! average is the projection onto `span{P_a (x) Q_b}` with `P_0 = Phi`,
//! `P_1 = I - Phi` on each pair. No sampling is involved.

use crate::channel::{random_channel, BipartiteChannel};
use crate::error::{Error, Result};
use crate::linalg::{c, identity, inner, kron, max_entangled_vector, outer, permute_subsystems, zeros, ComplexMatrix};
use crate::measures::structure::ChoiSpace;

/// `[Phi, I - Phi]` on `k x k`.
fn projectors(k: usize) -> [ComplexMatrix; 2] {
    let v = max_entangled_vector(k);
    let phi = outer(&v, &v) * c(1.0 / k as f64, 0.0);
    [phi.clone(), identity(k * k) - phi]
}

/// Twisted twirl of a channel with `|A0| = |B1|` and `|B0| = |A1|`.
pub fn twisted_twirl(e: &BipartiteChannel) -> Result<BipartiteChannel> {
    let [a0, b0, a1, b1] = e.dims();
    if a0 != b1 || b0 != a1 {
        return Err(Error::Dimension(format!(
            "twisted twirl needs |A0| = |B1| and |B0| = |A1|, got {:?}",
            e.dims()
        )));
    }
    let (k1, k2) = (a0, b0);
    // (A0, B0, A1, B1) -> (A0, B1, B0, A1).
    let paired = permute_subsystems(e.choi(), &[a0, b0, a1, b1], &[0, 3, 1, 2])?;
    let (p, q) = (projectors(k1), projectors(k2));
    let mut out = zeros(paired.nrows(), paired.ncols());
    for pa in &p {
        for qb in &q {
            let w = kron(pa, qb);
            let rank = w.trace().re;
            if rank < 0.5 {
                continue;
            }
            out += &w * c(inner(&w, &paired) / rank, 0.0);
        }
    }
    // (A0, B1, B0, A1) -> (A0, B0, A1, B1).
    let choi = permute_subsystems(&out, &[k1, k1, k2, k2], &[0, 2, 3, 1])?;
    BipartiteChannel::new(choi, e.dims())
}

fn catalyst_space(e: &BipartiteChannel, l: usize) -> Result<ChoiSpace> {
    let dims = e.dims();
    if l < 2 || dims.iter().any(|d| d % l != 0) {
        return Err(Error::Dimension(format!("catalyst size {l} does not divide dims {dims:?}")));
    }
    Ok(ChoiSpace::Twirled { ab: dims.map(|d| d / l), l })
}

/// Twisted twirl acting only on the catalyst factors `C D` of a channel on
/// `(A C, B D)` with `|C0| = |C1| = |D0| = |D1| = l`.
pub fn twirl_catalyst(e: &BipartiteChannel, l: usize) -> Result<BipartiteChannel> {
    let space = catalyst_space(e, l)?;
    let choi = space.compose(&space.decompose(e.choi())?);
    BipartiteChannel::new(choi, e.dims())
}

/// Weight `p` and operator `X` of the `F^L` component after the catalyst
/// twirl: the twirled Choi matrix is `X (x) J^{F^L}` plus blocks orthogonal
/// to `J^{F^L}`, and `p = tr X`.
pub fn catalyst_component(e: &BipartiteChannel, l: usize) -> Result<(f64, ComplexMatrix)> {
    let space = catalyst_space(e, l)?;
    let x = space.decompose(e.choi())?.remove(0);
    Ok((x.trace().re, x))
}

/// Numerical rank (singular values above `1e-8` of the largest) of the
/// vectorized twirled Choi matrices of `probes` random channels with dims
/// `[k1, k2, k2, k1]`.
pub fn twirl_image_rank(k1: usize, k2: usize, probes: usize, seed: u64) -> Result<usize> {
    let dims = [k1, k2, k2, k1];
    let n = dims.iter().product::<usize>();
    let mut stacked = zeros(n * n, probes);
    for j in 0..probes {
        let t = twisted_twirl(&random_channel(dims, seed.wrapping_add(j as u64))?)?;
        for (i, z) in t.choi().iter().enumerate() {
            stacked[(i, j)] = *z;
        }
    }
    let sv = stacked.singular_values();
    let top = sv.iter().cloned().fold(0.0, f64::max);
    Ok(sv.iter().filter(|&&s| s > 1e-8 * top).count())
}
