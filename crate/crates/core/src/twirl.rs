//! Group averages ("twirls") for finite-group representations and exact
//! U(1) dephasing for charge operators.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Result, SsrError};
use crate::group::{FiniteGroup, Irrep, Representation};
use crate::linalg::{c64, eig_hermitian, hermiticity_residual, identity, kron, CMatrix, DensityOperator};

/// Eigenvalues closer than this belong to the same charge sector.
pub const CHARGE_GAP_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TwirlKind {
    /// `G`: the same element on the whole system.
    Global,
    /// `G⊗G`: independent elements on Alice's and Bob's sides.
    Local,
    /// `G⊗{e}`: Alice's side only.
    Left,
    /// `{e}⊗G`: Bob's side only.
    Right,
}

impl TwirlKind {
    pub fn name(self) -> &'static str {
        match self {
            TwirlKind::Global => "global",
            TwirlKind::Local => "local",
            TwirlKind::Left => "left",
            TwirlKind::Right => "right",
        }
    }

    pub const ALL: [TwirlKind; 4] = [TwirlKind::Global, TwirlKind::Local, TwirlKind::Left, TwirlKind::Right];
}

/// Hermitian generator of a U(1) action, `T(θ) = exp(iθJ)`. The spectrum
/// must be integer or half-integer.
#[derive(Clone, Debug)]
pub struct ChargeOperator {
    matrix: CMatrix,
    values: Vec<f64>,
    vectors: CMatrix,
}

impl ChargeOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let residual = hermiticity_residual(&matrix);
        if residual > 1e-10 {
            return Err(SsrError::InvalidCharge(format!("not Hermitian (residual {residual:.2e})")));
        }
        let spec = eig_hermitian(&matrix)?;
        for &v in &spec.values {
            let doubled = 2.0 * v;
            if (doubled - doubled.round()).abs() > 1e-8 {
                return Err(SsrError::InvalidCharge(format!("eigenvalue {v} is not a half-integer")));
            }
        }
        Ok(Self { matrix, values: spec.values, vectors: spec.vectors })
    }

    pub fn diagonal(charges: &[f64]) -> Result<Self> {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            charges.len(),
            charges.iter().map(|&q| c64(q, 0.0)),
        ));
        Self::new(m)
    }

    /// `J_z = σ_z/2` in the basis `(|+1⟩, |−1⟩)` of spin up/down.
    pub fn spin_half_z() -> Self {
        Self::diagonal(&[0.5, -0.5]).expect("valid spin charge")
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.vectors
    }

    /// `J_A ⊗ 𝟙 + 𝟙 ⊗ J_B`, with its spectrum assembled from the factors.
    pub fn kron_sum(a: &ChargeOperator, b: &ChargeOperator) -> ChargeOperator {
        let matrix = kron(&a.matrix, &identity(b.dim())) + kron(&identity(a.dim()), &b.matrix);
        let values = a.values.iter().flat_map(|x| b.values.iter().map(move |y| x + y)).collect();
        let vectors = kron(&a.vectors, &b.vectors);
        ChargeOperator { matrix, values, vectors }
    }

    /// `J ⊗ 𝟙_d`
    pub fn embed_left(&self, d: usize) -> ChargeOperator {
        ChargeOperator::kron_sum(self, &ChargeOperator::zero(d))
    }

    /// `𝟙_d ⊗ J`
    pub fn embed_right(&self, d: usize) -> ChargeOperator {
        ChargeOperator::kron_sum(&ChargeOperator::zero(d), self)
    }

    fn zero(d: usize) -> ChargeOperator {
        ChargeOperator { matrix: CMatrix::zeros(d, d), values: vec![0.0; d], vectors: identity(d) }
    }

    /// Groups eigenvector indices by (numerically) equal eigenvalue, in
    /// order of first appearance.
    pub fn sectors(&self) -> Vec<(f64, Vec<usize>)> {
        let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
        for (i, &v) in self.values.iter().enumerate() {
            match out.iter_mut().find(|(q, _)| (q - v).abs() <= CHARGE_GAP_TOL) {
                Some((_, idx)) => idx.push(i),
                None => out.push((v, vec![i])),
            }
        }
        out
    }

    /// Projector onto the eigenspace with eigenvalue `charge`.
    pub fn projector(&self, charge: f64) -> CMatrix {
        let d = self.dim();
        let mut p = CMatrix::zeros(d, d);
        for (i, &v) in self.values.iter().enumerate() {
            if (v - charge).abs() <= CHARGE_GAP_TOL {
                let col = self.vectors.column(i);
                p += col * col.adjoint();
            }
        }
        p
    }

    /// `exp(iθJ)`
    pub fn unitary(&self, theta: f64) -> CMatrix {
        let d = self.dim();
        let mut diag = CMatrix::zeros(d, d);
        for (i, &v) in self.values.iter().enumerate() {
            diag[(i, i)] = c64((theta * v).cos(), (theta * v).sin());
        }
        &self.vectors * diag * self.vectors.adjoint()
    }

    /// Exact U(1) average: zero every coherence between distinct charges.
    pub fn dephase(&self, m: &CMatrix) -> CMatrix {
        let v = &self.vectors;
        let mut inner = v.adjoint() * m * v;
        for i in 0..self.values.len() {
            for j in 0..self.values.len() {
                if (self.values[i] - self.values[j]).abs() > CHARGE_GAP_TOL {
                    inner[(i, j)] = c64(0.0, 0.0);
                }
            }
        }
        v * inner * v.adjoint()
    }
}

/// U(1) symmetry given by a total charge, optionally split between Alice and Bob.
#[derive(Clone, Debug)]
pub struct U1Action {
    total: ChargeOperator,
    split: Option<(ChargeOperator, ChargeOperator)>,
}

impl U1Action {
    pub fn single(charge: ChargeOperator) -> Self {
        Self { total: charge, split: None }
    }

    pub fn bipartite(a: ChargeOperator, b: ChargeOperator) -> Self {
        let total = ChargeOperator::kron_sum(&a, &b);
        Self { total, split: Some((a, b)) }
    }

    pub fn total(&self) -> &ChargeOperator {
        &self.total
    }

    pub fn split(&self) -> Option<&(ChargeOperator, ChargeOperator)> {
        self.split.as_ref()
    }
}

/// The symmetry whose superselection rule is in force.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Symmetry {
    Group(Representation),
    U1(U1Action),
}

impl From<Representation> for Symmetry {
    fn from(rep: Representation) -> Self {
        Symmetry::Group(rep)
    }
}

impl From<U1Action> for Symmetry {
    fn from(action: U1Action) -> Self {
        Symmetry::U1(action)
    }
}

impl Symmetry {
    pub fn dim(&self) -> usize {
        match self {
            Symmetry::Group(rep) => rep.dim(),
            Symmetry::U1(u) => u.total.dim(),
        }
    }

    /// `(D_A, D_B)` when the action factorizes.
    pub fn split_dims(&self) -> Option<(usize, usize)> {
        match self {
            Symmetry::Group(rep) => rep.split().map(|s| (s.dim_a(), s.dim_b())),
            Symmetry::U1(u) => u.split.as_ref().map(|(a, b)| (a.dim(), b.dim())),
        }
    }

    pub fn is_bipartite(&self) -> bool {
        self.split_dims().is_some()
    }

    pub fn describe(&self) -> String {
        match self {
            Symmetry::Group(rep) => format!("{} (dim {})", rep.group().name(), rep.dim()),
            Symmetry::U1(u) => format!("U(1) (dim {})", u.total.dim()),
        }
    }

    /// Alice's (`left = true`) or Bob's factor as a symmetry of its own.
    pub fn side(&self, left: bool) -> Option<Symmetry> {
        match self {
            Symmetry::Group(rep) => if left { rep.side_a() } else { rep.side_b() }.map(Symmetry::Group),
            Symmetry::U1(u) => {
                u.split.as_ref().map(|(a, b)| Symmetry::U1(U1Action::single(if left { a.clone() } else { b.clone() })))
            }
        }
    }

    /// Action on a product of two systems, `T₁(g) ⊗ T₂(g)`, with system 1 as
    /// Alice and system 2 as Bob.
    pub fn tensor(&self, other: &Symmetry) -> Result<Symmetry> {
        match (self, other) {
            (Symmetry::Group(a), Symmetry::Group(b)) => Ok(Symmetry::Group(a.tensor(b)?)),
            (Symmetry::U1(a), Symmetry::U1(b)) => {
                Ok(Symmetry::U1(U1Action::bipartite(a.total.clone(), b.total.clone())))
            }
            _ => Err(SsrError::InvalidRepresentation("cannot combine a finite group with U(1)".into())),
        }
    }

    /// Joins two bipartite actions into one on `(A₁A₂) ⊗ (B₁B₂)`. States on
    /// `A₁B₁A₂B₂` must be reordered with [`JOIN_ORDER`] first.
    pub fn bipartite_join(&self, other: &Symmetry) -> Result<Symmetry> {
        match (self, other) {
            (Symmetry::Group(x), Symmetry::Group(y)) => {
                let (sx, sy) = match (x.split(), y.split()) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(SsrError::MissingSplit("join")),
                };
                let a = sx.a.iter().zip(&sy.a).map(|(p, q)| kron(p, q)).collect();
                let b = sx.b.iter().zip(&sy.b).map(|(p, q)| kron(p, q)).collect();
                Ok(Symmetry::Group(Representation::bipartite(x.group().clone(), a, b)?))
            }
            (Symmetry::U1(x), Symmetry::U1(y)) => {
                let ((xa, xb), (ya, yb)) = match (&x.split, &y.split) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(SsrError::MissingSplit("join")),
                };
                Ok(Symmetry::U1(U1Action::bipartite(
                    ChargeOperator::kron_sum(xa, ya),
                    ChargeOperator::kron_sum(xb, yb),
                )))
            }
            _ => Err(SsrError::InvalidRepresentation("cannot combine a finite group with U(1)".into())),
        }
    }

    /// Applies the twirl of the given kind.
    pub fn twirl(&self, rho: &DensityOperator, kind: TwirlKind) -> Result<DensityOperator> {
        twirl(rho, self, kind)
    }

    /// Returns the twirl applied to a raw matrix (not necessarily a state).
    pub fn twirl_matrix(&self, m: &CMatrix, kind: TwirlKind) -> Result<CMatrix> {
        if m.nrows() != self.dim() || m.ncols() != self.dim() {
            return Err(SsrError::DimensionMismatch(format!(
                "operator of size {} under a symmetry of dimension {}",
                m.nrows(),
                self.dim()
            )));
        }
        match self {
            Symmetry::Group(rep) => group_twirl(m, rep, kind),
            Symmetry::U1(u) => u1_twirl(m, u, kind),
        }
    }
}

/// Subsystem order taking `A₁B₁A₂B₂` to `A₁A₂B₁B₂`.
pub const JOIN_ORDER: [usize; 4] = [0, 2, 1, 3];

fn average(m: &CMatrix, unitaries: impl Iterator<Item = CMatrix>) -> CMatrix {
    let mut acc = CMatrix::zeros(m.nrows(), m.ncols());
    let mut count = 0usize;
    for u in unitaries {
        acc += &u * m * u.adjoint();
        count += 1;
    }
    acc.unscale(count as f64)
}

fn group_twirl(m: &CMatrix, rep: &Representation, kind: TwirlKind) -> Result<CMatrix> {
    let left = |x: &CMatrix| -> Result<CMatrix> {
        let s = rep.split().ok_or(SsrError::MissingSplit("left"))?;
        let id = identity(s.dim_b());
        Ok(average(x, s.a.iter().map(|a| kron(a, &id))))
    };
    let right = |x: &CMatrix| -> Result<CMatrix> {
        let s = rep.split().ok_or(SsrError::MissingSplit("right"))?;
        let id = identity(s.dim_a());
        Ok(average(x, s.b.iter().map(|b| kron(&id, b))))
    };
    match kind {
        TwirlKind::Global => Ok(average(m, rep.matrices().iter().cloned())),
        TwirlKind::Left => left(m),
        TwirlKind::Right => right(m),
        TwirlKind::Local => {
            if rep.split().is_none() {
                return Err(SsrError::MissingSplit("local"));
            }
            right(&left(m)?)
        }
    }
}

fn u1_twirl(m: &CMatrix, u: &U1Action, kind: TwirlKind) -> Result<CMatrix> {
    match kind {
        TwirlKind::Global => Ok(u.total.dephase(m)),
        _ => {
            let (a, b) = u.split.as_ref().ok_or(SsrError::MissingSplit(kind.name()))?;
            let on_a = a.embed_left(b.dim());
            let on_b = b.embed_right(a.dim());
            Ok(match kind {
                TwirlKind::Left => on_a.dephase(m),
                TwirlKind::Right => on_b.dephase(m),
                _ => on_b.dephase(&on_a.dephase(m)),
            })
        }
    }
}

/// `(1/|G|) Σ_g T(g) ρ T(g)†` and its local and one-sided variants.
pub fn twirl(rho: &DensityOperator, sym: &Symmetry, kind: TwirlKind) -> Result<DensityOperator> {
    let out = sym.twirl_matrix(rho.matrix(), kind)?;
    Ok(DensityOperator::from_trusted(out, rho.dims().to_vec()))
}

/// Exact U(1) twirl: one charge operator for a single site (global kind), or
/// one per site for a bipartite system.
pub fn u1_dephase(rho: &DensityOperator, charges: &[ChargeOperator], kind: TwirlKind) -> Result<DensityOperator> {
    let action = match charges {
        [single] => U1Action::single(single.clone()),
        [a, b] => U1Action::bipartite(a.clone(), b.clone()),
        _ => return Err(SsrError::InvalidCharge(format!("{} charge operators given", charges.len()))),
    };
    twirl(rho, &Symmetry::U1(action), kind)
}

/// Cyclic group of any order, with irrep `q` sending `k ↦ exp(2πi qk/n)`.
pub fn cyclic_group(n: usize) -> Result<FiniteGroup> {
    let mult = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
    let inv = (0..n).map(|a| (n - a) % n).collect();
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let irreps = (0..n)
        .map(|q| Irrep {
            label: format!("q{q}"),
            dim: 1,
            matrices: (0..n)
                .map(|k| {
                    let a = step * ((q * k) % n) as f64;
                    CMatrix::from_element(1, 1, c64(a.cos(), a.sin()))
                })
                .collect(),
        })
        .collect();
    FiniteGroup::new(format!("Z{n}"), mult, inv, 0, irreps)
}

/// The `Z_n` subgroup `{exp(2πik(J − q_min)/n)}` of the U(1) action generated by `J`.
pub fn u1_cyclic_representation(charge: &ChargeOperator, n: usize) -> Result<Representation> {
    let group = Arc::new(cyclic_group(n)?);
    let q_min = charge.eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
    for &v in charge.eigenvalues() {
        let shifted = v - q_min;
        if (shifted - shifted.round()).abs() > 1e-8 {
            return Err(SsrError::InvalidCharge("charge gaps are not integers".into()));
        }
    }
    let shifted = ChargeOperator {
        matrix: charge.matrix() - identity(charge.dim()).scale(q_min),
        values: charge.eigenvalues().iter().map(|v| v - q_min).collect(),
        vectors: charge.eigenvectors().clone(),
    };
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let matrices = (0..n).map(|k| shifted.unitary(step * k as f64)).collect();
    Representation::new(group, matrices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::make_group;
    use crate::linalg::{max_abs_diff, CVector, PureState, Sampler};

    fn plus() -> PureState {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(CVector::from_vec(vec![c64(h, 0.), c64(h, 0.)]), vec![2]).unwrap()
    }

    fn z2_graded() -> Symmetry {
        let z2 = Arc::new(make_group("Z2").unwrap());
        Symmetry::Group(Representation::from_irreps(z2, &[0, 1]).unwrap())
    }

    #[test]
    fn z2_twirl_of_plus() {
        // explicit two-term average: (ρ + σ_z ρ σ_z)/2
        let rho = plus().density();
        let out = z2_graded().twirl(&rho, TwirlKind::Global).unwrap();
        assert!(max_abs_diff(out.matrix(), &identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn symmetric_state_unchanged() {
        let rho = PureState::basis(1, vec![2]).unwrap().density();
        let out = z2_graded().twirl(&rho, TwirlKind::Global).unwrap();
        assert!(max_abs_diff(out.matrix(), rho.matrix()) < 1e-15);
    }

    #[test]
    fn spin_plus_dephases_to_half_half() {
        let rho = plus().density();
        let out = u1_dephase(&rho, &[ChargeOperator::spin_half_z()], TwirlKind::Global).unwrap();
        assert!(max_abs_diff(out.matrix(), &identity(2).scale(0.5)) < 1e-15);
    }

    #[test]
    fn two_spin_total_charge_weights() {
        let p = plus();
        let rho = p.tensor(&p).density();
        let jz = ChargeOperator::spin_half_z();
        let out = u1_dephase(&rho, &[ChargeOperator::kron_sum(&jz, &jz)], TwirlKind::Global).unwrap();
        let m = out.matrix();
        // basis |++⟩, |+-⟩, |-+⟩, |--⟩ in charge order (1, 0, 0, -1)
        assert!((m[(0, 0)].re - 0.25).abs() < 1e-15);
        assert!((m[(3, 3)].re - 0.25).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let sym = CVector::from_vec(vec![c64(0., 0.), c64(h, 0.), c64(h, 0.), c64(0., 0.)]);
        let weight = (sym.adjoint() * m * &sym)[(0, 0)].re;
        assert!((weight - 0.5).abs() < 1e-15);
        assert!(m[(0, 3)].norm() < 1e-15 && m[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn refbit_local_twirl_by_sector_projection() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::new(CVector::from_vec(vec![c64(0., 0.), c64(h, 0.), c64(h, 0.), c64(0., 0.)]), vec![2, 2])
            .unwrap();
        let q = ChargeOperator::diagonal(&[0.0, 1.0]).unwrap();
        let out = u1_dephase(&psi.density(), &[q.clone(), q], TwirlKind::Local).unwrap();
        // brute force: keep only the diagonal blocks of the product charge basis
        let mut expect = CMatrix::zeros(4, 4);
        expect[(1, 1)] = c64(0.5, 0.0);
        expect[(2, 2)] = c64(0.5, 0.0);
        assert!(max_abs_diff(out.matrix(), &expect) < 1e-15);
        // while the global twirl leaves the refbit alone
        let q = ChargeOperator::diagonal(&[0.0, 1.0]).unwrap();
        let global = u1_dephase(&psi.density(), &[q.clone(), q], TwirlKind::Global).unwrap();
        assert!(max_abs_diff(global.matrix(), psi.density().matrix()) < 1e-15);
    }

    #[test]
    fn charge_diagonal_state_unchanged() {
        let q = ChargeOperator::diagonal(&[0.0, 1.0, 1.0, 2.0]).unwrap();
        let mut s = Sampler::new(1);
        let rho = s.mixed_state(&[4], 4);
        let diag = q.dephase(rho.matrix());
        let again = q.dephase(&diag);
        assert!(max_abs_diff(&diag, &again) < 1e-15);
        // coherences inside the degenerate charge-1 block survive
        assert!((diag[(1, 2)] - rho.matrix()[(1, 2)]).norm() < 1e-15);
    }

    #[test]
    fn kinds_need_split() {
        let rho = DensityOperator::maximally_mixed(vec![2]);
        for kind in [TwirlKind::Local, TwirlKind::Left, TwirlKind::Right] {
            assert!(matches!(z2_graded().twirl(&rho, kind), Err(SsrError::MissingSplit(_))));
        }
        let big = DensityOperator::maximally_mixed(vec![4]);
        assert!(matches!(z2_graded().twirl(&big, TwirlKind::Global), Err(SsrError::DimensionMismatch(_))));
    }

    #[test]
    fn charge_operator_validation() {
        assert!(ChargeOperator::diagonal(&[0.3]).is_err());
        let mut m = identity(2);
        m[(0, 1)] = c64(0.0, 1.0);
        assert!(matches!(ChargeOperator::new(m), Err(SsrError::InvalidCharge(_))));
        assert!(ChargeOperator::diagonal(&[-1.5, 0.5, 2.0]).is_ok());
    }

    #[test]
    fn cyclic_subgroup_reproduces_dephasing() {
        let q = ChargeOperator::diagonal(&[-1.0, 0.0, 0.0, 2.0]).unwrap();
        let rho = Sampler::new(8).mixed_state(&[4], 4);
        let rep = u1_cyclic_representation(&q, 4).unwrap();
        assert!(crate::group::validate_representation(&rep).passed());
        let via_group = Symmetry::Group(rep).twirl(&rho, TwirlKind::Global).unwrap();
        assert!(max_abs_diff(via_group.matrix(), &q.dephase(rho.matrix())) < 1e-12);
        // too-small subgroup aliases charge gap 3 onto 0
        let rep = u1_cyclic_representation(&q, 3).unwrap();
        let aliased = Symmetry::Group(rep).twirl(&rho, TwirlKind::Global).unwrap();
        assert!(max_abs_diff(aliased.matrix(), &q.dephase(rho.matrix())) > 1e-3);
    }
}
