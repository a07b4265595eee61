use std::sync::Arc;

use serde::Serialize;

use super::{multiplicities, FiniteGroup, Representation};
use crate::error::{Result, SsrError};
use crate::linalg::{eig_hermitian, identity, max_abs_diff, CMatrix, CVector};

/// Residual allowed when re-checking the block-diagonal form.
pub const DECOMPOSE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BlockLabel {
    /// Charge: catalog index of the irrep.
    pub irrep: usize,
    /// Flavor: which copy of the irrep.
    pub flavor: usize,
    /// Color: basis index inside the irrep.
    pub color: usize,
}

/// Adapted basis in which `T(g) = ⊕_n T^{f(n)}(g)` with every copy of an
/// irrep carrying the catalog matrices exactly.
///
/// Columns are ordered by irrep (catalog order), then flavor, then color, so
/// the column of `|μ, m, i⟩` is `offset(μ) + m·D_μ + i`.
#[derive(Clone, Debug)]
pub struct IrrepDecomposition {
    group: Arc<FiniteGroup>,
    basis: CMatrix,
    multiplicities: Vec<usize>,
    offsets: Vec<usize>,
}

impl IrrepDecomposition {
    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// Unitary whose columns are the adapted basis vectors.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn multiplicities(&self) -> &[usize] {
        &self.multiplicities
    }

    pub fn multiplicity(&self, mu: usize) -> usize {
        self.multiplicities[mu]
    }

    pub fn irrep_dim(&self, mu: usize) -> usize {
        self.group.irrep(mu).dim
    }

    /// Total number of irrep blocks, `K = Σ_μ M^μ`.
    pub fn block_count(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn column_index(&self, mu: usize, flavor: usize, color: usize) -> usize {
        self.offsets[mu] + flavor * self.irrep_dim(mu) + color
    }

    pub fn vector(&self, mu: usize, flavor: usize, color: usize) -> CVector {
        self.basis.column(self.column_index(mu, flavor, color)).into_owned()
    }

    /// Columns spanning the isotypic component of `μ` (flavor-major).
    pub fn sector(&self, mu: usize) -> CMatrix {
        let width = self.multiplicities[mu] * self.irrep_dim(mu);
        self.basis.columns(self.offsets[mu], width).into_owned()
    }

    /// Per-column `(μ, m, i)` labels in basis order.
    pub fn labels(&self) -> Vec<BlockLabel> {
        let mut out = Vec::with_capacity(self.dim());
        for (mu, &m) in self.multiplicities.iter().enumerate() {
            for flavor in 0..m {
                for color in 0..self.irrep_dim(mu) {
                    out.push(BlockLabel { irrep: mu, flavor, color });
                }
            }
        }
        out
    }

    /// Irrep label of each block `n`, i.e. the map `f(n)`.
    pub fn block_irreps(&self) -> Vec<usize> {
        self.multiplicities.iter().enumerate().flat_map(|(mu, &m)| std::iter::repeat_n(mu, m)).collect()
    }

    /// `⊕_n T^{f(n)}(g)` in the adapted basis.
    pub fn block_matrix(&self, g: usize) -> CMatrix {
        let d = self.dim();
        let mut m = CMatrix::zeros(d, d);
        for (mu, &mult) in self.multiplicities.iter().enumerate() {
            let dm = self.irrep_dim(mu);
            for flavor in 0..mult {
                let off = self.column_index(mu, flavor, 0);
                m.view_mut((off, off), (dm, dm)).copy_from(&self.group.irrep(mu).matrices[g]);
            }
        }
        m
    }

    /// `max_g |U† T(g) U - ⊕ T^{f(n)}(g)|`
    pub fn block_residual(&self, rep: &Representation) -> f64 {
        (0..self.group.order())
            .map(|g| {
                let reduced = self.basis.adjoint() * rep.matrix(g) * &self.basis;
                max_abs_diff(&reduced, &self.block_matrix(g))
            })
            .fold(0.0, f64::max)
    }

    pub fn unitarity_residual(&self) -> f64 {
        max_abs_diff(&(self.basis.adjoint() * &self.basis), &identity(self.dim()))
    }
}

/// `P^μ_{ij} = (D_μ/|G|) Σ_g [T^μ_{ij}(g)]* T(g)`
fn transfer_operator(rep: &Representation, mu: usize, i: usize, j: usize) -> CMatrix {
    let group = rep.group();
    let irrep = group.irrep(mu);
    let d = rep.dim();
    let mut acc = CMatrix::zeros(d, d);
    for g in 0..group.order() {
        acc += rep.matrix(g) * irrep.matrices[g][(i, j)].conj();
    }
    acc.scale(irrep.dim as f64 / group.order() as f64)
}

/// Orthonormal basis for the column space of a projector.
fn range_basis(p: &CMatrix, rank: usize) -> Vec<CVector> {
    // P is a Hermitian projector: its range is the eigenvalue-one eigenspace
    let Ok(spec) = eig_hermitian(&((p + p.adjoint()).scale(0.5))) else {
        return Vec::new();
    };
    let n = spec.values.len();
    (n.saturating_sub(rank)..n)
        .rev()
        .filter(|&k| spec.values[k] > 0.5)
        .map(|k| spec.vectors.column(k).into_owned())
        .collect()
}

/// Adapted basis built from the transfer operators `P^μ_{i1}` so all copies
/// of an irrep carry identical matrices.
pub fn decompose(rep: &Representation) -> Result<IrrepDecomposition> {
    let group = rep.group().clone();
    let mults = multiplicities(rep)?;
    let d = rep.dim();
    let total: usize = mults.iter().zip(group.irrep_dims()).map(|(m, dm)| m * dm).sum();
    if total != d {
        return Err(SsrError::InvalidRepresentation(format!("multiplicities account for {total} of {d} dimensions")));
    }
    let mut basis = CMatrix::zeros(d, d);
    let mut offsets = Vec::with_capacity(mults.len());
    let mut col = 0;
    for (mu, &m) in mults.iter().enumerate() {
        offsets.push(col);
        if m == 0 {
            continue;
        }
        let dm = group.irrep(mu).dim;
        let p11 = transfer_operator(rep, mu, 0, 0);
        let heads = range_basis(&p11, m);
        if heads.len() != m {
            return Err(SsrError::InvalidRepresentation(format!("irrep {mu}: found {} of {m} copies", heads.len())));
        }
        let transfers: Vec<CMatrix> = (0..dm).map(|i| transfer_operator(rep, mu, i, 0)).collect();
        for head in &heads {
            for t in &transfers {
                basis.set_column(col, &(t * head));
                col += 1;
            }
        }
    }
    let decomposition = IrrepDecomposition { group, basis, multiplicities: mults, offsets };
    let unitarity = decomposition.unitarity_residual();
    if unitarity > 1e-10 {
        return Err(SsrError::InvalidRepresentation(format!("adapted basis not unitary ({unitarity:.2e})")));
    }
    let residual = decomposition.block_residual(rep);
    if residual > DECOMPOSE_TOL {
        return Err(SsrError::InvalidRepresentation(format!("block residual {residual:.2e}")));
    }
    Ok(decomposition)
}

#[derive(Clone, Debug)]
pub struct ChargeProjector {
    pub irrep: usize,
    /// `Π_μ` on the representation space.
    pub projector: CMatrix,
    /// `𝟙^(fl)_μ` in adapted coordinates (`M^μ × M^μ`).
    pub flavor_identity: CMatrix,
    /// `𝟙^(co)_μ` in adapted coordinates (`D_μ × D_μ`).
    pub color_identity: CMatrix,
}

/// One projector per irrep present in the decomposition.
pub fn charge_projectors(decomp: &IrrepDecomposition) -> Vec<ChargeProjector> {
    (0..decomp.multiplicities().len())
        .filter(|&mu| decomp.multiplicity(mu) > 0)
        .map(|mu| {
            let s = decomp.sector(mu);
            ChargeProjector {
                irrep: mu,
                projector: &s * s.adjoint(),
                flavor_identity: identity(decomp.multiplicity(mu)),
                color_identity: identity(decomp.irrep_dim(mu)),
            }
        })
        .collect()
}
