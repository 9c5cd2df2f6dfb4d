//! Choi spaces used by the robustness programs.
//!
//! [`ChoiSpace::Full`] treats the Choi matrix as one block. For channels on
//! `(A C, B D)` that are invariant under the twisted twirl acting on the
//! `C D` catalyst systems, [`ChoiSpace::Twirled`] stores the Choi matrix as
//! four blocks on `A B`,
//!
//! ```text
//! J = sum_{a,b in {0,1}} X_ab (x) P_a (x) Q_b,
//! ```
//!
//! where `P_0 = Phi`, `P_1 = (I - Phi)/(L^2 - 1)` on the pair `(C0, D1)` and
//! `Q_b` are the same states on `(D0, C1)`. Positivity, partial transposes
//! and input marginals all act blockwise in this representation.

use crate::error::{Error, Result};
use crate::linalg::{c, identity, kron, max_entangled_vector, outer, permute_subsystems, zeros, ComplexMatrix};

use super::lmi::{tp_family_basis, AffineExpr, SlotBasis};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum ChoiSpace {
    Full { dims: [usize; 4] },
    Twirled { ab: [usize; 4], l: usize },
}

/// Subsystem order of the assembled operator `(A0, B0, A1, B1, C0, D1, D0, C1)`
/// mapped to the bipartite order `(A0, C0, B0, D0, A1, C1, B1, D1)`.
const TO_FULL: [usize; 8] = [0, 4, 1, 6, 2, 7, 3, 5];
const FROM_FULL: [usize; 8] = [0, 2, 4, 6, 1, 7, 3, 5];

fn pair_states(l: usize) -> [ComplexMatrix; 2] {
    let v = max_entangled_vector(l);
    let phi = outer(&v, &v) * c(1.0 / l as f64, 0.0);
    let rest = if l > 1 {
        (identity(l * l) - &phi) * c(1.0 / (l * l - 1) as f64, 0.0)
    } else {
        zeros(1, 1)
    };
    [phi, rest]
}

fn pair_projectors(l: usize) -> [ComplexMatrix; 2] {
    let v = max_entangled_vector(l);
    let phi = outer(&v, &v) * c(1.0 / l as f64, 0.0);
    [phi.clone(), identity(l * l) - phi]
}

impl ChoiSpace {
    pub fn slots(&self) -> usize {
        match self {
            ChoiSpace::Full { .. } => 1,
            ChoiSpace::Twirled { .. } => 4,
        }
    }

    /// Bipartite dims of each block.
    pub fn block_dims(&self) -> [usize; 4] {
        match *self {
            ChoiSpace::Full { dims } => dims,
            ChoiSpace::Twirled { ab, .. } => ab,
        }
    }

    /// Bipartite dims of the channel being represented.
    pub fn full_dims(&self) -> [usize; 4] {
        match *self {
            ChoiSpace::Full { dims } => dims,
            ChoiSpace::Twirled { ab, l } => ab.map(|d| d * l),
        }
    }

    pub fn full_in_dim(&self) -> usize {
        let d = self.full_dims();
        d[0] * d[1]
    }

    fn block_in_out(&self) -> (usize, usize) {
        let d = self.block_dims();
        (d[0] * d[1], d[2] * d[3])
    }

    /// Factor by which the full input marginal exceeds the reduced one:
    /// `tr_out J = reduced (x) I_{C0 D0} / L^2`.
    pub fn marginal_scale(&self) -> f64 {
        match *self {
            ChoiSpace::Full { .. } => 1.0,
            ChoiSpace::Twirled { l, .. } => (l * l) as f64,
        }
    }

    /// Split a full Choi matrix into blocks. For the twirled space this is
    /// the twirl projection, so non-invariant input is projected.
    pub fn decompose(&self, full: &ComplexMatrix) -> Result<Vec<ComplexMatrix>> {
        match *self {
            ChoiSpace::Full { .. } => Ok(vec![full.clone()]),
            ChoiSpace::Twirled { ab, l } => {
                let fd = self.full_dims();
                let n = fd.iter().product::<usize>();
                if full.nrows() != n {
                    return Err(Error::Dimension("Choi matrix does not match twirled space".into()));
                }
                let dims8 = [ab[0], l, ab[1], l, ab[2], l, ab[3], l];
                let asm = permute_subsystems(full, &dims8, &FROM_FULL)?;
                let nab: usize = ab.iter().product();
                let ncd = l * l * l * l;
                let proj = pair_projectors(l);
                let mut out = Vec::with_capacity(4);
                for a in 0..2 {
                    for b in 0..2 {
                        let w = kron(&proj[a], &proj[b]);
                        let mut x = zeros(nab, nab);
                        for i in 0..nab {
                            for j in 0..nab {
                                let mut s = c(0.0, 0.0);
                                for u in 0..ncd {
                                    for v in 0..ncd {
                                        let wv = w[(v, u)];
                                        if wv.re != 0.0 || wv.im != 0.0 {
                                            s += asm[(i * ncd + u, j * ncd + v)] * wv;
                                        }
                                    }
                                }
                                x[(i, j)] = s;
                            }
                        }
                        out.push(x);
                    }
                }
                Ok(out)
            }
        }
    }

    /// Assemble blocks into a full Choi matrix.
    pub fn compose(&self, parts: &[ComplexMatrix]) -> ComplexMatrix {
        match *self {
            ChoiSpace::Full { .. } => parts[0].clone(),
            ChoiSpace::Twirled { ab, l } => {
                let st = pair_states(l);
                let nab: usize = ab.iter().product();
                let mut asm = zeros(nab * l.pow(4), nab * l.pow(4));
                for a in 0..2 {
                    for b in 0..2 {
                        asm += kron(&parts[2 * a + b], &kron(&st[a], &st[b]));
                    }
                }
                let dims8 = [ab[0], ab[1], ab[2], ab[3], l, l, l, l];
                permute_subsystems(&asm, &dims8, &TO_FULL).expect("dims consistent")
            }
        }
    }

    /// Basis of block tuples forming trace-preserving-proportional Choi
    /// matrices (or differences of channels when `traceless`).
    pub fn tp_basis(&self, real: bool, traceless: bool) -> Vec<SlotBasis> {
        let (di, dout) = self.block_in_out();
        tp_family_basis(self.slots(), di, dout, real, traceless)
    }

    /// Blocks whose joint positivity is equivalent to positivity of the
    /// partial transpose (over `B0 B1`, and `D0 D1` when twirled).
    pub fn ppt_blocks(&self, x: &[AffineExpr]) -> Vec<AffineExpr> {
        let bd = self.block_dims();
        let pts: Vec<AffineExpr> = x.iter().map(|e| e.partial_transpose(&bd, &[1, 3])).collect();
        match *self {
            ChoiSpace::Full { .. } => pts,
            ChoiSpace::Twirled { l, .. } => {
                let lf = l as f64;
                // Coefficients of P_a^T in the (sym, anti) projector basis,
                // scaled by L to keep the blocks well conditioned.
                let coef = [[1.0, -1.0], [1.0 / (lf + 1.0), 1.0 / (lf - 1.0)]];
                let mut out = Vec::with_capacity(4);
                for s in 0..2 {
                    for t in 0..2 {
                        let mut e = AffineExpr::zero(pts[0].dim);
                        for a in 0..2 {
                            for b in 0..2 {
                                e = e.plus(&pts[2 * a + b], coef[a][s] * coef[b][t]);
                            }
                        }
                        out.push(e);
                    }
                }
                out
            }
        }
    }

    /// Reduced input marginal `sum_s tr_out X_s`.
    pub fn marginal(&self, x: &[AffineExpr]) -> AffineExpr {
        let (di, dout) = self.block_in_out();
        let mut m = AffineExpr::zero(di);
        for e in x {
            m = m.plus(&e.trace_out(di, dout), 1.0);
        }
        m
    }

    /// Search for a catalyst size `l >= 2` for which the channel is twirl
    /// invariant to within `tol`.
    pub fn detect_twirled(dims: [usize; 4], choi: &ComplexMatrix, tol: f64) -> Option<ChoiSpace> {
        let max_l = *dims.iter().min()?;
        for l in (2..=max_l).rev() {
            if dims.iter().any(|d| d % l != 0) {
                continue;
            }
            let space = ChoiSpace::Twirled { ab: dims.map(|d| d / l), l };
            let parts = space.decompose(choi).ok()?;
            let back = space.compose(&parts);
            if (back - choi).iter().map(|z| z.norm()).fold(0.0, f64::max) <= tol {
                return Some(space);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{random_channel, swap_channel};
    use crate::linalg::{eigenvalues, partial_transpose};
    use crate::measures::lmi::AffineExpr;

    #[test]
    fn swap_is_the_pure_zero_block() {
        let s = swap_channel(2).unwrap();
        let space = ChoiSpace::Twirled { ab: [1, 1, 1, 1], l: 2 };
        let parts = space.decompose(s.choi()).unwrap();
        assert!((parts[0][(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(parts[1..].iter().all(|p| p.norm() < 1e-12));
        assert_eq!(ChoiSpace::detect_twirled([2, 2, 2, 2], s.choi(), 1e-10), Some(space));
    }

    #[test]
    fn twirled_ppt_blocks_match_full_spectrum() {
        let n = random_channel([1, 2, 2, 1], 3).unwrap();
        let f = swap_channel(2).unwrap();
        let prod = n.tensor(&f);
        let space = ChoiSpace::Twirled { ab: [1, 2, 2, 1], l: 2 };
        let parts = space.decompose(prod.choi()).unwrap();
        assert!((space.compose(&parts) - prod.choi()).norm() < 1e-12);
        let exprs: Vec<AffineExpr> = parts.iter().map(AffineExpr::from_dense).collect();
        let blocks = space.ppt_blocks(&exprs);
        let full_min = eigenvalues(&partial_transpose(prod.choi(), &prod.dims(), &[1, 3]).unwrap())[0];
        let block_min = blocks.iter().map(|b| eigenvalues(&b.eval(&[]))[0]).fold(f64::INFINITY, f64::min);
        assert!(full_min < 0.0 && block_min < 0.0);
        // Each block is a positive multiple of an eigen-block of the full PT.
        let sign_agree = blocks.iter().all(|b| eigenvalues(&b.eval(&[]))[0] >= -1e-12) == (full_min >= -1e-12);
        assert!(sign_agree);
    }
}
