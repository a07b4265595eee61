//! Globally symmetric bipartite pure states and the reference states used by
//! the bounds.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Result, SsrError};
use crate::group::{decompose, find_conjugate_pairs, ConjugatePair, FiniteGroup, IrrepDecomposition, Representation};
use crate::linalg::{
    c64, identity, kron_vec, schmidt_of_matrix, shannon_bits, CMatrix, CVector, DensityOperator, PureState, Sampler,
};
use crate::twirl::{ChargeOperator, Symmetry, U1Action};

pub use crate::linalg::{random_state, Purity};

/// Residual allowed for `T(g)|Ψ⟩ = λ^β(g)|Ψ⟩`.
pub const EIGEN_TOL: f64 = 1e-9;
const WEIGHT_FLOOR: f64 = 1e-14;

/// One charge sector `μ` of `|Ψ^β⟩`: Alice carries `μ`, Bob carries `μ̄`.
#[derive(Clone, Debug, Serialize)]
pub struct ChargeSector {
    pub label: String,
    pub mu: usize,
    pub mu_bar: usize,
    /// `P_μ`
    pub weight: f64,
    /// `D_μ`
    pub color_dim: usize,
    /// Schmidt coefficients of the flavor state `|φ_μ⟩`.
    pub schmidt: Vec<f64>,
    /// `d^μ / √P_μ`, an `M_μ × M_μ̄` matrix.
    #[serde(skip)]
    pub flavor: CMatrix,
    #[serde(skip)]
    pub intertwiner: CMatrix,
    /// Adapted basis vectors indexed `[flavor][color]`.
    #[serde(skip)]
    pub a_vectors: Vec<Vec<CVector>>,
    #[serde(skip)]
    pub b_vectors: Vec<Vec<CVector>>,
}

impl ChargeSector {
    /// `E(φ_μ)` in bits.
    pub fn flavor_entanglement(&self) -> f64 {
        shannon_bits(self.schmidt.iter().map(|s| s * s))
    }

    /// `|φ_μ⟩` with colors `(i, j)` attached; for `C = 𝟙` and `i = j` this
    /// is the sector's contribution to `|Ψ⟩` up to `√(P/D)`.
    fn flavor_vector(&self, i: usize, j: usize) -> CVector {
        let d = self.a_vectors[0][0].len() * self.b_vectors[0][0].len();
        let mut v = CVector::zeros(d);
        for (m, row) in self.a_vectors.iter().enumerate() {
            for (n, col) in self.b_vectors.iter().enumerate() {
                let f = self.flavor[(m, n)];
                if f != Complex64::new(0.0, 0.0) {
                    v += kron_vec(&row[i], &col[j]) * f;
                }
            }
        }
        v
    }

    /// `(1/√D) Σ_ij C_ij |φ_μ; i, j⟩`, normalized.
    pub fn sector_state(&self) -> CVector {
        let dm = self.color_dim;
        let mut v = CVector::zeros(self.a_vectors[0][0].len() * self.b_vectors[0][0].len());
        for i in 0..dm {
            for j in 0..dm {
                let c = self.intertwiner[(i, j)];
                if c.norm() > 0.0 {
                    v += self.flavor_vector(i, j) * c;
                }
            }
        }
        v.unscale((dm as f64).sqrt())
    }
}

/// `|Ψ^β⟩ = Σ_μ √P_μ |ψ^{μ,β}⟩` together with its charge table.
#[derive(Clone, Debug)]
pub struct SymmetricPureState {
    psi: PureState,
    symmetry: Symmetry,
    beta: String,
    sectors: Vec<ChargeSector>,
}

/// One term of [`build_symmetric_state`]: coefficient `d^μ_{m, m̄}`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Deserialize, Serialize)]
pub struct Term {
    pub mu: usize,
    pub m: usize,
    pub mbar: usize,
    pub d: Complex64,
}

/// Per-side sector vectors `[sector][flavor][color]`.
type SideVectors = Vec<Vec<Vec<CVector>>>;

fn side_vectors(dec: &IrrepDecomposition) -> SideVectors {
    (0..dec.multiplicities().len())
        .map(|mu| {
            (0..dec.multiplicity(mu)).map(|m| (0..dec.irrep_dim(mu)).map(|i| dec.vector(mu, m, i)).collect()).collect()
        })
        .collect()
}

fn u1_side_vectors(j: &ChargeOperator) -> (Vec<f64>, SideVectors) {
    let v = j.eigenvectors();
    j.sectors().into_iter().map(|(q, idx)| (q, idx.iter().map(|&k| vec![v.column(k).into_owned()]).collect())).unzip()
}

fn amplitude_block(psi: &CVector, a: &[Vec<CVector>], b: &[Vec<CVector>], i: usize, j: usize) -> CMatrix {
    CMatrix::from_fn(a.len(), b.len(), |m, n| kron_vec(&a[m][i], &b[n][j]).dotc(psi))
}

impl SymmetricPureState {
    /// Reads off the charge table of a state that is an eigenvector of the
    /// global action of a finite group with eigenvalue `λ^β`.
    pub fn analyze_group(psi: PureState, rep: &Representation, beta: usize, seed: u64) -> Result<Self> {
        let sym = Symmetry::Group(rep.clone());
        let (da, db) = sym.split_dims().ok_or(SsrError::MissingSplit("symmetric state"))?;
        if psi.dim() != da * db {
            return Err(SsrError::DimensionMismatch(format!("state of dimension {} for {da}x{db}", psi.dim())));
        }
        let group = rep.group().clone();
        let pairs = find_conjugate_pairs(&group, beta, seed)?;
        let dec_a = decompose(&rep.side_a().expect("split"))?;
        let dec_b = decompose(&rep.side_b().expect("split"))?;
        let (va, vb) = (side_vectors(&dec_a), side_vectors(&dec_b));
        let mut sectors = Vec::new();
        for pair in &pairs {
            let (mu, mu_bar) = (pair.mu, pair.mu_bar);
            if dec_a.multiplicity(mu) == 0 || dec_b.multiplicity(mu_bar) == 0 {
                continue;
            }
            let dm = group.irrep(mu).dim;
            let c = &pair.intertwiner;
            let mut d = CMatrix::zeros(dec_a.multiplicity(mu), dec_b.multiplicity(mu_bar));
            for i in 0..dm {
                for j in 0..dm {
                    d += amplitude_block(psi.amplitudes(), &va[mu], &vb[mu_bar], i, j) * c[(i, j)].conj();
                }
            }
            let d = d.unscale((dm as f64).sqrt());
            let label = format!("{}|{}", group.irrep(mu).label, group.irrep(mu_bar).label);
            if let Some(s) = sector(label, mu, mu_bar, dm, d, c.clone(), va[mu].clone(), vb[mu_bar].clone()) {
                sectors.push(s);
            }
        }
        let beta_label = group.irrep(beta).label.clone();
        Self::finish(psi, sym, beta_label, sectors)
    }

    /// Charge table for a U(1) eigenstate of `J_A ⊗ 𝟙 + 𝟙 ⊗ J_B`.
    pub fn analyze_u1(psi: PureState, a: ChargeOperator, b: ChargeOperator) -> Result<Self> {
        let (da, db) = (a.dim(), b.dim());
        if psi.dim() != da * db {
            return Err(SsrError::DimensionMismatch(format!("state of dimension {} for {da}x{db}", psi.dim())));
        }
        let action = U1Action::bipartite(a.clone(), b.clone());
        let total = action.total().matrix() * psi.amplitudes();
        let q = psi.amplitudes().dotc(&total).re;
        let residual = (total - psi.amplitudes() * c64(q, 0.0)).norm();
        if residual > EIGEN_TOL {
            return Err(SsrError::NotSymmetric(residual));
        }
        let (qa, va) = u1_side_vectors(&a);
        let (qb, vb) = u1_side_vectors(&b);
        let mut sectors = Vec::new();
        for (mu, &x) in qa.iter().enumerate() {
            let Some(mu_bar) = qb.iter().position(|&y| (x + y - q).abs() <= 1e-8) else { continue };
            let d = amplitude_block(psi.amplitudes(), &va[mu], &vb[mu_bar], 0, 0);
            let label = format!("{x}|{}", qb[mu_bar]);
            if let Some(s) = sector(label, mu, mu_bar, 1, d, identity(1), va[mu].clone(), vb[mu_bar].clone()) {
                sectors.push(s);
            }
        }
        Self::finish(psi, Symmetry::U1(action), format!("Q={q}"), sectors)
    }

    fn finish(psi: PureState, symmetry: Symmetry, beta: String, sectors: Vec<ChargeSector>) -> Result<Self> {
        let state = Self { psi, symmetry, beta, sectors };
        let residual = state.eigen_residual();
        if residual > EIGEN_TOL {
            return Err(SsrError::NotSymmetric(residual));
        }
        let rebuilt = state
            .sectors
            .iter()
            .fold(CVector::zeros(state.psi.dim()), |acc, s| acc + s.sector_state() * c64(s.weight.sqrt(), 0.0));
        let gap = (rebuilt - state.psi.amplitudes()).norm();
        if gap > EIGEN_TOL {
            return Err(SsrError::NotSymmetric(gap));
        }
        Ok(state)
    }

    pub fn psi(&self) -> &PureState {
        &self.psi
    }

    pub fn density(&self) -> DensityOperator {
        self.psi.density()
    }

    pub fn symmetry(&self) -> &Symmetry {
        &self.symmetry
    }

    pub fn beta(&self) -> &str {
        &self.beta
    }

    pub fn sectors(&self) -> &[ChargeSector] {
        &self.sectors
    }

    /// `max_g ‖T(g)|Ψ⟩ − λ(g)|Ψ⟩‖`, with `λ(g) = ⟨Ψ|T(g)|Ψ⟩`.
    pub fn eigen_residual(&self) -> f64 {
        let psi = self.psi.amplitudes();
        let check = |u: &CMatrix| {
            let moved = u * psi;
            let lam = psi.dotc(&moved);
            (moved - psi * lam).norm()
        };
        match &self.symmetry {
            Symmetry::Group(rep) => rep.matrices().iter().map(check).fold(0.0, f64::max),
            Symmetry::U1(u) => [0.7, 1.9, 3.1].iter().map(|&t| check(&u.total().unitary(t))).fold(0.0, f64::max),
        }
    }

    /// `H^(ch) = −Σ P_μ log P_μ`
    pub fn charge_entropy(&self) -> f64 {
        shannon_bits(self.sectors.iter().map(|s| s.weight))
    }

    /// `H^(co) = Σ P_μ log D_μ`
    pub fn color_entropy(&self) -> f64 {
        self.sectors.iter().map(|s| s.weight * (s.color_dim as f64).log2()).sum()
    }

    /// `Σ P_μ E(φ_μ)`
    pub fn flavor_entanglement(&self) -> f64 {
        self.sectors.iter().map(|s| s.weight * s.flavor_entanglement()).sum()
    }

    /// `E_G = Σ P_μ E(φ_μ)`: what survives a local charge measurement
    /// followed by discarding colors.
    pub fn accessible_entanglement(&self) -> f64 {
        self.flavor_entanglement()
    }

    /// `E = H^(ch) + Σ P_μ E(φ_μ) + H^(co)` from the charge table.
    pub fn entanglement_from_sectors(&self) -> f64 {
        self.charge_entropy() + self.flavor_entanglement() + self.color_entropy()
    }

    /// `𝒢_{G⊗G}[ρ^β] = Σ_μ P_μ |φ_μ⟩⟨φ_μ| ⊗ 𝟙/D_μ ⊗ 𝟙/D_μ̄` in the
    /// computational basis.
    pub fn local_twirl_closed_form(&self) -> DensityOperator {
        let d = self.psi.dim();
        let mut out = CMatrix::zeros(d, d);
        for s in &self.sectors {
            let w = s.weight / (s.color_dim * s.color_dim) as f64;
            for i in 0..s.color_dim {
                for j in 0..s.color_dim {
                    let v = s.flavor_vector(i, j);
                    out += (&v * v.adjoint()) * c64(w, 0.0);
                }
            }
        }
        DensityOperator::from_trusted(out, self.psi.dims().to_vec())
    }
}

#[allow(clippy::too_many_arguments)]
fn sector(
    label: String,
    mu: usize,
    mu_bar: usize,
    color_dim: usize,
    d: CMatrix,
    intertwiner: CMatrix,
    a_vectors: Vec<Vec<CVector>>,
    b_vectors: Vec<Vec<CVector>>,
) -> Option<ChargeSector> {
    let weight = d.norm_squared();
    if weight <= WEIGHT_FLOOR {
        return None;
    }
    let flavor = d.unscale(weight.sqrt());
    let (schmidt, _, _) = schmidt_of_matrix(&flavor);
    Some(ChargeSector { label, mu, mu_bar, weight, color_dim, schmidt, flavor, intertwiner, a_vectors, b_vectors })
}

/// `(1/√D_μ) Σ_ij C^μ_ij |μ, m, i⟩ ⊗ |μ̄, m̄, j⟩` in the computational basis.
pub fn build_pair_state(
    pair: &ConjugatePair,
    flavors: (usize, usize),
    dec_a: &IrrepDecomposition,
    dec_b: &IrrepDecomposition,
) -> Result<PureState> {
    let (m, mbar) = flavors;
    if m >= dec_a.multiplicity(pair.mu) || mbar >= dec_b.multiplicity(pair.mu_bar) {
        return Err(SsrError::FlavorOutOfRange(format!(
            "flavors ({m}, {mbar}) for multiplicities ({}, {})",
            dec_a.multiplicity(pair.mu),
            dec_b.multiplicity(pair.mu_bar)
        )));
    }
    let dm = dec_a.irrep_dim(pair.mu);
    if dec_b.irrep_dim(pair.mu_bar) != dm || pair.intertwiner.nrows() != dm {
        return Err(SsrError::NotConjugate { mu: pair.mu, mu_bar: pair.mu_bar, beta: pair.beta });
    }
    let mut v = CVector::zeros(dec_a.dim() * dec_b.dim());
    for i in 0..dm {
        for j in 0..dm {
            let c = pair.intertwiner[(i, j)];
            v += kron_vec(&dec_a.vector(pair.mu, m, i), &dec_b.vector(pair.mu_bar, mbar, j)) * c;
        }
    }
    PureState::new(v.unscale((dm as f64).sqrt()), vec![dec_a.dim(), dec_b.dim()])
}

/// `Σ d^μ_{m m̄} |ψ^{μ,β}_{m m̄}⟩`, normalized as a whole. Each term's `μ̄` is
/// fixed by `μ` and `β`.
pub fn build_symmetric_state(
    rep: &Representation,
    beta: usize,
    terms: &[Term],
    seed: u64,
) -> Result<SymmetricPureState> {
    let group = rep.group().clone();
    if terms.is_empty() {
        return Err(SsrError::Spec("no coefficients given".into()));
    }
    let pairs = find_conjugate_pairs(&group, beta, seed)?;
    let dec_a = decompose(&rep.side_a().ok_or(SsrError::MissingSplit("symmetric state"))?)?;
    let dec_b = decompose(&rep.side_b().expect("split"))?;
    let mut v = CVector::zeros(rep.dim());
    for t in terms {
        let pair =
            pairs.iter().find(|p| p.mu == t.mu).ok_or(SsrError::NotConjugate { mu: t.mu, mu_bar: usize::MAX, beta })?;
        v += build_pair_state(pair, (t.m, t.mbar), &dec_a, &dec_b)?.amplitudes() * t.d;
    }
    let dims = vec![dec_a.dim(), dec_b.dim()];
    let psi = PureState::normalized(v, dims)?;
    SymmetricPureState::analyze_group(psi, rep, beta, seed)
}

/// `(|0⟩|1⟩ + |1⟩|0⟩)/√2` with charge `diag(0, 1)` on each site.
pub fn make_refbit() -> SymmetricPureState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = PureState::new(CVector::from_vec(vec![c64(0., 0.), c64(h, 0.), c64(h, 0.), c64(0., 0.)]), vec![2, 2])
        .expect("normalized");
    let q = ChargeOperator::diagonal(&[0.0, 1.0]).expect("integer charges");
    SymmetricPureState::analyze_u1(psi, q.clone(), q).expect("refbit is a charge eigenstate")
}

/// `|+⟩^{⊗n}` for spin-½ sites with `J_z = σ_z/2`, `|+⟩ = (|↑⟩ + |↓⟩)/√2`.
/// One site gives a single-site action; two sites give the bipartite one.
pub fn make_spin_plus(n_spins: usize) -> Result<(DensityOperator, Symmetry)> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = PureState::new(CVector::from_vec(vec![c64(h, 0.), c64(h, 0.)]), vec![2]).expect("normalized");
    let jz = ChargeOperator::spin_half_z();
    match n_spins {
        1 => Ok((plus.density(), Symmetry::U1(U1Action::single(jz)))),
        2 => Ok((plus.tensor(&plus).density(), Symmetry::U1(U1Action::bipartite(jz.clone(), jz)))),
        n => Err(SsrError::Spec(format!("spin examples use 1 or 2 sites, not {n}"))),
    }
}

/// `|e⟩` in the regular representation; its orbit is an orthonormal basis.
pub fn make_orbit_reference(group: Arc<FiniteGroup>) -> (PureState, Representation) {
    let rep = Representation::regular(group);
    let psi = PureState::basis(0, vec![rep.dim()]).expect("index in range");
    (psi, rep)
}

/// `(1/√|G|) Σ_h |h⟩|h⟩` on regular ⊗ regular, invariant under the global
/// action.
pub fn make_shared_reference(group: Arc<FiniteGroup>) -> Result<SymmetricPureState> {
    let reg = Representation::regular(group.clone());
    let rep = reg.tensor(&reg)?;
    let n = group.order();
    let mut v = CVector::zeros(n * n);
    for h in 0..n {
        v[h * n + h] = c64(1.0 / (n as f64).sqrt(), 0.0);
    }
    let psi = PureState::new(v, vec![n, n])?;
    let trivial = group.trivial_irrep().ok_or_else(|| SsrError::InvalidGroup("no trivial irrep".into()))?;
    SymmetricPureState::analyze_group(psi, &rep, trivial, 0)
}

/// Gram matrix `⟨ψ_g|ψ_h⟩` of the orbit `T(g)|ψ⟩`.
pub fn orbit_gram(psi: &PureState, rep: &Representation) -> CMatrix {
    let orbit: Vec<CVector> = rep.matrices().iter().map(|t| t * psi.amplitudes()).collect();
    CMatrix::from_fn(orbit.len(), orbit.len(), |g, h| orbit[g].dotc(&orbit[h]))
}

/// Random irreps (with repetition) whose dimensions fit in `budget`,
/// always including `forced` when given.
fn random_irrep_list(group: &FiniteGroup, s: &mut Sampler, budget: usize, forced: Option<usize>) -> Vec<usize> {
    let k = group.irreps().len();
    let mut list: Vec<usize> = forced.into_iter().collect();
    let mut used: usize = list.iter().map(|&mu| group.irrep(mu).dim).sum();
    for _ in 0..2 * k {
        let mu = s.below(k);
        let d = group.irrep(mu).dim;
        if used + d <= budget && s.uniform() < 0.6 {
            list.push(mu);
            used += d;
        }
    }
    if list.is_empty() {
        list.push(0);
    }
    list.sort_unstable();
    list
}

/// A random representation of total dimension at most `max_dim` (at least
/// one irrep), in a random basis.
pub fn random_rep(group: Arc<FiniteGroup>, s: &mut Sampler, max_dim: usize) -> Result<Representation> {
    let list = random_irrep_list(&group, s, max_dim, None);
    let rep = Representation::from_irreps(group, &list)?;
    Ok(rep.conjugated(&s.unitary(rep.dim())))
}

/// A random bipartite representation with each side of dimension at most
/// `max_side`, containing at least one conjugate pair for `β`, each side in
/// a random basis.
pub fn random_bipartite_rep(
    group: Arc<FiniteGroup>,
    beta: usize,
    s: &mut Sampler,
    max_side: usize,
) -> Result<Representation> {
    let pairs = find_conjugate_pairs(&group, beta, s.below(1 << 30) as u64)?;
    let fitting: Vec<&ConjugatePair> = pairs.iter().filter(|p| group.irrep(p.mu).dim <= max_side).collect();
    if fitting.is_empty() {
        return Err(SsrError::Spec(format!("no conjugate pair fits in dimension {max_side}")));
    }
    let p = fitting[s.below(fitting.len())];
    let a = random_irrep_list(&group, s, max_side, Some(p.mu));
    let b = random_irrep_list(&group, s, max_side, Some(p.mu_bar));
    let side = |list: &[usize], s: &mut Sampler| -> Result<Representation> {
        let rep = Representation::from_irreps(group.clone(), list)?;
        Ok(rep.conjugated(&s.unitary(rep.dim())))
    };
    let a = side(&a, s)?;
    let b = side(&b, s)?;
    a.tensor(&b)
}

/// Random `|Ψ^β⟩` with a random one-dimensional `β`, Gaussian coefficients,
/// and each side of dimension at most `max_side`. Some sectors are switched
/// off at random so that the support of `P_μ` varies.
pub fn random_symmetric_state_sized(group: Arc<FiniteGroup>, seed: u64, max_side: usize) -> Result<SymmetricPureState> {
    let mut s = Sampler::new(seed);
    let ones = group.one_dimensional();
    let beta = ones[s.below(ones.len())];
    let rep = random_bipartite_rep(group.clone(), beta, &mut s, max_side)?;
    let pairs = find_conjugate_pairs(&group, beta, seed)?;
    let dec_a = decompose(&rep.side_a().expect("split"))?;
    let dec_b = decompose(&rep.side_b().expect("split"))?;
    let mut terms = Vec::new();
    let live: Vec<&ConjugatePair> =
        pairs.iter().filter(|p| dec_a.multiplicity(p.mu) > 0 && dec_b.multiplicity(p.mu_bar) > 0).collect();
    let keep_all = s.uniform() < 0.5;
    for (k, p) in live.iter().enumerate() {
        if !keep_all && k > 0 && s.uniform() < 0.4 {
            continue;
        }
        for m in 0..dec_a.multiplicity(p.mu) {
            for mbar in 0..dec_b.multiplicity(p.mu_bar) {
                terms.push(Term { mu: p.mu, m, mbar, d: s.complex_normal() });
            }
        }
    }
    build_symmetric_state(&rep, beta, &terms, seed)
}

/// [`random_symmetric_state_sized`] with sides of dimension up to 6.
pub fn random_symmetric_state(group: Arc<FiniteGroup>, seed: u64) -> Result<SymmetricPureState> {
    random_symmetric_state_sized(group, seed, 6)
}
