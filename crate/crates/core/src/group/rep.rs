use std::sync::Arc;

use num_complex::Complex64;

use super::{homomorphism_residual, FiniteGroup};
use crate::error::{Result, SsrError};
use crate::linalg::{c64, identity, kron, max_abs_diff, CMatrix, ValidationReport};

/// Residual tolerance for representation invariants.
pub const REP_TOL: f64 = 1e-10;

/// Alice/Bob factors of a bipartite representation.
#[derive(Clone, Debug)]
pub struct Split {
    pub a: Vec<CMatrix>,
    pub b: Vec<CMatrix>,
}

impl Split {
    pub fn dim_a(&self) -> usize {
        self.a[0].nrows()
    }

    pub fn dim_b(&self) -> usize {
        self.b[0].nrows()
    }
}

/// Unitary matrices `T(g)` for every element of a finite group, optionally
/// factorized as `T_A(g) ⊗ T_B(g)`.
#[derive(Clone, Debug)]
pub struct Representation {
    group: Arc<FiniteGroup>,
    matrices: Vec<CMatrix>,
    split: Option<Split>,
}

impl Representation {
    /// Wraps matrices without validating them; see [`validate_representation`].
    pub fn new(group: Arc<FiniteGroup>, matrices: Vec<CMatrix>) -> Result<Self> {
        if matrices.len() != group.order() {
            return Err(SsrError::InvalidRepresentation(format!(
                "{} matrices for a group of order {}",
                matrices.len(),
                group.order()
            )));
        }
        let d = matrices[0].nrows();
        if matrices.iter().any(|m| m.shape() != (d, d)) {
            return Err(SsrError::InvalidRepresentation("matrices of differing shape".into()));
        }
        Ok(Self { group, matrices, split: None })
    }

    /// `T(g) = T_A(g) ⊗ T_B(g)` with the split recorded.
    pub fn bipartite(group: Arc<FiniteGroup>, a: Vec<CMatrix>, b: Vec<CMatrix>) -> Result<Self> {
        if a.len() != group.order() || b.len() != group.order() {
            return Err(SsrError::InvalidRepresentation("split factor count".into()));
        }
        let matrices = a.iter().zip(&b).map(|(x, y)| kron(x, y)).collect();
        let mut rep = Self::new(group, matrices)?;
        rep.split = Some(Split { a, b });
        Ok(rep)
    }

    /// Attaches a split after checking it reproduces the full matrices.
    pub fn with_split(mut self, a: Vec<CMatrix>, b: Vec<CMatrix>) -> Result<Self> {
        if a.len() != self.group.order() || b.len() != self.group.order() {
            return Err(SsrError::InvalidRepresentation("split factor count".into()));
        }
        if a[0].nrows() * b[0].nrows() != self.dim() {
            return Err(SsrError::DimensionMismatch("split dimensions".into()));
        }
        self.split = Some(Split { a, b });
        Ok(self)
    }

    pub fn irrep(group: Arc<FiniteGroup>, mu: usize) -> Self {
        let matrices = group.irrep(mu).matrices.clone();
        Self { group, matrices, split: None }
    }

    /// Left-regular representation: `T(g)|h⟩ = |gh⟩`.
    pub fn regular(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        let matrices = (0..n)
            .map(|g| {
                let mut m = CMatrix::zeros(n, n);
                for h in 0..n {
                    m[(group.mul(g, h), h)] = c64(1.0, 0.0);
                }
                m
            })
            .collect();
        Self { group, matrices, split: None }
    }

    pub fn trivial(group: Arc<FiniteGroup>, dim: usize) -> Self {
        let matrices = vec![identity(dim); group.order()];
        Self { group, matrices, split: None }
    }

    /// Block-diagonal direct sum `T₁ ⊕ T₂ ⊕ …`.
    pub fn direct_sum(parts: &[&Representation]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| SsrError::InvalidRepresentation("empty sum".into()))?;
        let group = first.group.clone();
        let total: usize = parts.iter().map(|p| p.dim()).sum();
        let matrices = (0..group.order())
            .map(|g| {
                let mut m = CMatrix::zeros(total, total);
                let mut off = 0;
                for p in parts {
                    let d = p.dim();
                    m.view_mut((off, off), (d, d)).copy_from(&p.matrices[g]);
                    off += d;
                }
                m
            })
            .collect();
        Ok(Self { group, matrices, split: None })
    }

    /// Sum of catalog irreps, each listed index contributing one copy.
    pub fn from_irreps(group: Arc<FiniteGroup>, irreps: &[usize]) -> Result<Self> {
        let parts: Vec<Representation> = irreps.iter().map(|&m| Representation::irrep(group.clone(), m)).collect();
        let refs: Vec<&Representation> = parts.iter().collect();
        Self::direct_sum(&refs)
    }

    /// Tensor product of two representations of the same group; the result
    /// records the factors as its split.
    pub fn tensor(&self, other: &Representation) -> Result<Self> {
        if !Arc::ptr_eq(&self.group, &other.group)
            && (self.group.order() != other.group.order() || self.group.name() != other.group.name())
        {
            return Err(SsrError::InvalidRepresentation("tensor of different groups".into()));
        }
        Self::bipartite(self.group.clone(), self.matrices.clone(), other.matrices.clone())
    }

    /// `V T(g) V†` for a unitary change of basis. Any split is dropped.
    pub fn conjugated(&self, v: &CMatrix) -> Self {
        let matrices = self.matrices.iter().map(|m| v * m * v.adjoint()).collect();
        Self { group: self.group.clone(), matrices, split: None }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, g: usize) -> &CMatrix {
        &self.matrices[g]
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn split(&self) -> Option<&Split> {
        self.split.as_ref()
    }

    /// Alice's factor as a representation in its own right.
    pub fn side_a(&self) -> Option<Representation> {
        self.split.as_ref().map(|s| Representation { group: self.group.clone(), matrices: s.a.clone(), split: None })
    }

    pub fn side_b(&self) -> Option<Representation> {
        self.split.as_ref().map(|s| Representation { group: self.group.clone(), matrices: s.b.clone(), split: None })
    }
}

/// Homomorphism, unitarity and (when present) factorization residuals.
pub fn validate_representation(rep: &Representation) -> ValidationReport {
    let mut report = ValidationReport::default();
    let group = rep.group();
    let id = identity(rep.dim());
    let unitarity = rep.matrices.iter().map(|m| max_abs_diff(&(m * m.adjoint()), &id)).fold(0.0, f64::max);
    report.push("unitarity", unitarity, REP_TOL);
    report.push("homomorphism", homomorphism_residual(group.mult_table(), &rep.matrices), REP_TOL);
    report.push("identity", max_abs_diff(&rep.matrices[group.identity()], &id), REP_TOL);
    if let Some(split) = &rep.split {
        let fact = rep
            .matrices
            .iter()
            .zip(split.a.iter().zip(&split.b))
            .map(
                |(t, (a, b))| {
                    if a.nrows() * b.nrows() != t.nrows() {
                        f64::INFINITY
                    } else {
                        max_abs_diff(t, &kron(a, b))
                    }
                },
            )
            .fold(0.0, f64::max);
        report.push("factorization", fact, REP_TOL);
    }
    report
}

/// `χ(g) = Tr T(g)` for every element.
pub fn characters(rep: &Representation) -> Vec<Complex64> {
    rep.matrices.iter().map(|m| m.trace()).collect()
}

/// `M^μ = (1/|G|) Σ_g χ^μ(g)* χ(g)`, one entry per catalog irrep.
pub fn multiplicities(rep: &Representation) -> Result<Vec<usize>> {
    let chi = characters(rep);
    let group = rep.group();
    let n = group.order() as f64;
    group
        .irreps()
        .iter()
        .enumerate()
        .map(|(mu, irrep)| {
            let m: Complex64 =
                chi.iter().enumerate().map(|(g, x)| irrep.character(g).conj() * x).sum::<Complex64>() / n;
            let rounded = m.re.round();
            let residual = (m - c64(rounded, 0.0)).norm();
            if residual > 1e-8 || rounded < 0.0 {
                return Err(SsrError::NonIntegerMultiplicity { irrep: mu, residual });
            }
            Ok(rounded as usize)
        })
        .collect()
}
