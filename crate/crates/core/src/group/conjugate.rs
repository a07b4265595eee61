use serde::Serialize;

use super::FiniteGroup;
use crate::error::{Result, SsrError};
use crate::linalg::{max_abs_diff, polar_unitary, CMatrix, Sampler};

/// Allowed residual for `T^μ(g) = C λ^β(g) [T^μ̄(g)]* C†`.
pub const PAIR_TOL: f64 = 1e-9;
const MAX_ATTEMPTS: usize = 8;
const DEAD_ZONE: (f64, f64) = (1e-8, 1e-4);

/// A conjugate couple `(μ, μ̄)` for a one-dimensional irrep `β`, with the
/// unitary intertwiner `C^μ`.
#[derive(Clone, Debug, Serialize)]
pub struct ConjugatePair {
    pub mu: usize,
    pub mu_bar: usize,
    pub beta: usize,
    #[serde(skip)]
    pub intertwiner: CMatrix,
}

impl ConjugatePair {
    /// `max_g |T^μ(g) - C λ^β(g) [T^μ̄(g)]* C†|`
    pub fn residual(&self, group: &FiniteGroup) -> f64 {
        pair_residual(group, self.mu, self.mu_bar, self.beta, &self.intertwiner)
    }
}

fn pair_residual(group: &FiniteGroup, mu: usize, mu_bar: usize, beta: usize, c: &CMatrix) -> f64 {
    (0..group.order())
        .map(|g| {
            let lam = group.irrep(beta).scalar(g);
            let rhs = c * group.irrep(mu_bar).matrices[g].conjugate() * c.adjoint() * lam;
            max_abs_diff(&group.irrep(mu).matrices[g], &rhs)
        })
        .fold(0.0, f64::max)
}

/// `(1/|G|) Σ_g T^μ(g) X λ^β(g)* [T^μ̄(g)]^T`; by Schur's lemma either zero
/// or a multiple of a unitary intertwiner.
fn averaged(group: &FiniteGroup, mu: usize, mu_bar: usize, beta: usize, x: &CMatrix) -> CMatrix {
    let mut acc = CMatrix::zeros(x.nrows(), x.ncols());
    for g in 0..group.order() {
        let lam = group.irrep(beta).scalar(g).conj();
        acc += &group.irrep(mu).matrices[g] * x * group.irrep(mu_bar).matrices[g].transpose() * lam;
    }
    acc.unscale(group.order() as f64)
}

/// Finds `R^β`: for every irrep `μ`, the partner `μ̄` and intertwiner `C^μ`.
/// Listed in catalog order of `μ`.
pub fn find_conjugate_pairs(group: &FiniteGroup, beta: usize, seed: u64) -> Result<Vec<ConjugatePair>> {
    if beta >= group.irreps().len() {
        return Err(SsrError::InvalidGroup(format!("no irrep {beta}")));
    }
    if group.irrep(beta).dim != 1 {
        return Err(SsrError::NotOneDimensional(beta));
    }
    let mut sampler = Sampler::new(seed);
    let mut pairs = Vec::new();
    for mu in 0..group.irreps().len() {
        let dim = group.irrep(mu).dim;
        'candidates: for mu_bar in 0..group.irreps().len() {
            if group.irrep(mu_bar).dim != dim {
                continue;
            }
            for _ in 0..MAX_ATTEMPTS {
                let x = sampler.ginibre(dim, dim);
                let m = averaged(group, mu, mu_bar, beta, &x);
                let ratio = m.norm() / x.norm();
                if ratio < DEAD_ZONE.0 {
                    continue 'candidates;
                }
                if ratio <= DEAD_ZONE.1 {
                    continue;
                }
                let c = polar_unitary(&m);
                if pair_residual(group, mu, mu_bar, beta, &c) <= PAIR_TOL {
                    pairs.push(ConjugatePair { mu, mu_bar, beta, intertwiner: c });
                    break 'candidates;
                }
                return Err(SsrError::InvalidGroup(format!("intertwiner for ({mu}, {mu_bar}) fails verification")));
            }
            return Err(SsrError::AmbiguousIntertwiner { irrep: mu, attempts: MAX_ATTEMPTS });
        }
    }
    Ok(pairs)
}
