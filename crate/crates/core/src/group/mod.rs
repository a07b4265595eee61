//! Finite groups with explicit irreducible representations.
//!
//! A [`FiniteGroup`] carries its multiplication table and a complete catalog of
//! unitary irreps. Element 0 is not assumed to be the identity; use
//! [`FiniteGroup::identity`].

mod catalog;
mod conjugate;
mod decompose;
mod rep;

pub use catalog::{make_group, CATALOG};
pub use conjugate::{find_conjugate_pairs, ConjugatePair, PAIR_TOL};
pub use decompose::{charge_projectors, decompose, ChargeProjector, IrrepDecomposition, DECOMPOSE_TOL};
pub use rep::{characters, multiplicities, validate_representation, Representation, Split};

use crate::error::{Result, SsrError};
use crate::linalg::{c64, identity, max_abs_diff, CMatrix};

/// Tolerance for homomorphism and unitarity of irrep matrices.
pub const IRREP_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct Irrep {
    pub label: String,
    pub dim: usize,
    /// One `dim × dim` unitary per group element, indexed like the group.
    pub matrices: Vec<CMatrix>,
}

impl Irrep {
    pub fn character(&self, g: usize) -> num_complex::Complex64 {
        self.matrices[g].trace()
    }

    /// The scalar of a one-dimensional irrep.
    pub fn scalar(&self, g: usize) -> num_complex::Complex64 {
        self.matrices[g][(0, 0)]
    }
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    name: String,
    mult: Vec<Vec<usize>>,
    inv: Vec<usize>,
    identity: usize,
    irreps: Vec<Irrep>,
}

impl FiniteGroup {
    /// Builds a group and checks every structural invariant: associativity,
    /// identity, inverses, the irrep homomorphism/unitarity/irreducibility
    /// conditions, and `Σ D_μ² = |G|`.
    pub fn new(
        name: impl Into<String>,
        mult: Vec<Vec<usize>>,
        inv: Vec<usize>,
        identity: usize,
        irreps: Vec<Irrep>,
    ) -> Result<Self> {
        let group = Self { name: name.into(), mult, inv, identity, irreps };
        group.check_table()?;
        group.check_irreps()?;
        Ok(group)
    }

    fn check_table(&self) -> Result<()> {
        let n = self.mult.len();
        let bad = |msg: String| Err(SsrError::InvalidGroup(msg));
        if n == 0 {
            return bad("empty group".into());
        }
        if self.inv.len() != n || self.identity >= n {
            return bad("inverse table or identity index out of range".into());
        }
        for row in &self.mult {
            if row.len() != n || row.iter().any(|&x| x >= n) {
                return bad("multiplication table is not |G| x |G| over valid indices".into());
            }
        }
        for a in 0..n {
            if self.mult[self.identity][a] != a || self.mult[a][self.identity] != a {
                return bad(format!("identity fails on element {a}"));
            }
            let ai = self.inv[a];
            if ai >= n || self.mult[a][ai] != self.identity || self.mult[ai][a] != self.identity {
                return bad(format!("inverse fails on element {a}"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = self.mult[a][b];
                for c in 0..n {
                    if self.mult[ab][c] != self.mult[a][self.mult[b][c]] {
                        return bad(format!("associativity fails at ({a}, {b}, {c})"));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_irreps(&self) -> Result<()> {
        let n = self.order();
        let mut total = 0;
        for (mu, irrep) in self.irreps.iter().enumerate() {
            let bad = |msg: String| Err(SsrError::InvalidGroup(format!("irrep {mu} ({}): {msg}", irrep.label)));
            if irrep.matrices.len() != n {
                return bad("wrong number of matrices".into());
            }
            if irrep.matrices.iter().any(|m| m.shape() != (irrep.dim, irrep.dim)) {
                return bad("matrix shape differs from declared dimension".into());
            }
            let id = identity(irrep.dim);
            for (g, m) in irrep.matrices.iter().enumerate() {
                let r = max_abs_diff(&(m * m.adjoint()), &id);
                if r > IRREP_TOL {
                    return bad(format!("not unitary at element {g} (residual {r:.2e})"));
                }
            }
            let r = homomorphism_residual(&self.mult, &irrep.matrices);
            if r > IRREP_TOL {
                return bad(format!("not a homomorphism (residual {r:.2e})"));
            }
            let norm: f64 = irrep.matrices.iter().map(|m| m.trace().norm_sqr()).sum();
            if (norm - n as f64).abs() > 1e-8 {
                return bad(format!("reducible: sum |chi|^2 = {norm}"));
            }
            total += irrep.dim * irrep.dim;
        }
        // inequivalence: distinct characters
        for a in 0..self.irreps.len() {
            for b in 0..a {
                let overlap: num_complex::Complex64 =
                    (0..n).map(|g| self.irreps[a].character(g) * self.irreps[b].character(g).conj()).sum();
                if overlap.norm() / n as f64 > 0.5 {
                    return Err(SsrError::InvalidGroup(format!("irreps {b} and {a} are equivalent")));
                }
            }
        }
        if total != n {
            return Err(SsrError::InvalidGroup(format!(
                "irrep catalog incomplete: sum of squared dimensions {total} != |G| = {n}"
            )));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.mult.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mult_table(&self) -> &[Vec<usize>] {
        &self.mult
    }

    pub fn inverse_table(&self) -> &[usize] {
        &self.inv
    }

    pub fn irreps(&self) -> &[Irrep] {
        &self.irreps
    }

    pub fn irrep(&self, mu: usize) -> &Irrep {
        &self.irreps[mu]
    }

    pub fn irrep_dims(&self) -> Vec<usize> {
        self.irreps.iter().map(|i| i.dim).collect()
    }

    /// Indices of the one-dimensional irreps.
    pub fn one_dimensional(&self) -> Vec<usize> {
        (0..self.irreps.len()).filter(|&m| self.irreps[m].dim == 1).collect()
    }

    /// Index of the trivial irrep, if present in the catalog.
    pub fn trivial_irrep(&self) -> Option<usize> {
        self.irreps
            .iter()
            .position(|ir| ir.dim == 1 && ir.matrices.iter().all(|m| (m[(0, 0)] - c64(1.0, 0.0)).norm() < 1e-12))
    }

    /// Replaces one irrep matrix; the result skips validation. Used for fault
    /// injection in tests and diagnostics.
    pub fn with_corrupted_entry(&self, mu: usize, g: usize, row: usize, col: usize, delta: f64) -> Self {
        let mut out = self.clone();
        out.irreps[mu].matrices[g][(row, col)] += c64(delta, 0.0);
        out
    }
}

/// `max_{a,b} |T(a)T(b) - T(ab)|`
pub(crate) fn homomorphism_residual(mult: &[Vec<usize>], matrices: &[CMatrix]) -> f64 {
    let mut worst = 0.0f64;
    for (a, ta) in matrices.iter().enumerate() {
        for (b, tb) in matrices.iter().enumerate() {
            worst = worst.max(max_abs_diff(&(ta * tb), &matrices[mult[a][b]]));
        }
    }
    worst
}

/// `max |Σ_g T^μ_{kl}(g) [T^ν_{nm}(g)]* - (|G|/D_μ) δ_{μν} δ_{kn} δ_{lm}|`
/// over the whole irrep catalog.
pub fn verify_grand_orthogonality(group: &FiniteGroup) -> f64 {
    let n = group.order() as f64;
    let irreps = group.irreps();
    let mut worst = 0.0f64;
    for (mu, a) in irreps.iter().enumerate() {
        for (nu, b) in irreps.iter().enumerate() {
            for k in 0..a.dim {
                for l in 0..a.dim {
                    for p in 0..b.dim {
                        for q in 0..b.dim {
                            let sum: num_complex::Complex64 =
                                (0..group.order()).map(|g| a.matrices[g][(k, l)] * b.matrices[g][(p, q)].conj()).sum();
                            let expect = if mu == nu && k == p && l == q { n / a.dim as f64 } else { 0.0 };
                            worst = worst.max((sum - c64(expect, 0.0)).norm());
                        }
                    }
                }
            }
        }
    }
    worst
}

/// `max |(1/|G|) Σ_g χ^μ(g) χ^ν(g)* - δ_{μν}|`
pub fn character_orthogonality_residual(group: &FiniteGroup) -> f64 {
    let n = group.order();
    let irreps = group.irreps();
    let mut worst = 0.0f64;
    for (mu, a) in irreps.iter().enumerate() {
        for (nu, b) in irreps.iter().enumerate() {
            let s: num_complex::Complex64 =
                (0..n).map(|g| a.character(g) * b.character(g).conj()).sum::<num_complex::Complex64>() / n as f64;
            let expect = if mu == nu { 1.0 } else { 0.0 };
            worst = worst.max((s - c64(expect, 0.0)).norm());
        }
    }
    worst
}
