//! Covariant instruments built from the commutant of a symmetry.

use serde::Serialize;

use crate::error::{Result, SsrError};
use crate::group::{charge_projectors, decompose};
use crate::linalg::{
    c64, eig_hermitian, identity, max_abs, max_abs_diff, sqrt_psd, CMatrix, DensityOperator, Sampler, ValidationReport,
};
use crate::twirl::Symmetry;

/// Tolerance for completeness and covariance.
pub const INSTRUMENT_TOL: f64 = 1e-9;
/// Outcomes less likely than this are dropped from [`apply_instrument`].
pub const MIN_PROBABILITY: f64 = 1e-12;
const PROBE_STATES: usize = 8;
const PROBE_SEED: u64 = 0x5eed_0fc0;
const U1_PROBE_ANGLES: [f64; 5] = [0.7, 1.9, 3.1, 4.4, 5.6];

/// A quantum instrument: outcome `j` applies `ρ ↦ Σ_k K_{jk} ρ K_{jk}†`.
#[derive(Clone, Debug, Serialize)]
pub struct CovariantInstrument {
    pub label: String,
    #[serde(skip)]
    pub outcomes: Vec<Vec<CMatrix>>,
}

impl CovariantInstrument {
    pub fn new(label: impl Into<String>, outcomes: Vec<Vec<CMatrix>>) -> Result<Self> {
        let d = outcomes
            .iter()
            .flatten()
            .next()
            .map(|k| k.nrows())
            .ok_or_else(|| SsrError::Spec("instrument without Kraus operators".into()))?;
        if outcomes.iter().flatten().any(|k| k.shape() != (d, d)) {
            return Err(SsrError::DimensionMismatch("Kraus operators of differing shape".into()));
        }
        Ok(Self { label: label.into(), outcomes })
    }

    pub fn identity(dim: usize) -> Self {
        Self { label: "identity".into(), outcomes: vec![vec![identity(dim)]] }
    }

    pub fn dim(&self) -> usize {
        self.outcomes.iter().flatten().next().map_or(0, |k| k.nrows())
    }

    pub fn outcome_count(&self) -> usize {
        self.outcomes.len()
    }

    /// `Σ_{jk} K†K`
    pub fn effect_sum(&self) -> CMatrix {
        let d = self.dim();
        self.outcomes.iter().flatten().fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k)
    }

    pub fn completeness_residual(&self) -> f64 {
        max_abs_diff(&self.effect_sum(), &identity(self.dim()))
    }

    /// Unnormalized `𝒪_j[m]`.
    pub fn apply_outcome(&self, j: usize, m: &CMatrix) -> CMatrix {
        self.outcomes[j].iter().fold(CMatrix::zeros(m.nrows(), m.ncols()), |acc, k| acc + k * m * k.adjoint())
    }

    /// Non-selective channel `Σ_j 𝒪_j`.
    pub fn channel(&self, m: &CMatrix) -> CMatrix {
        (0..self.outcomes.len()).fold(CMatrix::zeros(m.nrows(), m.ncols()), |acc, j| acc + self.apply_outcome(j, m))
    }

    /// Outcome pairs `(j, k) ↦ K_j ⊗ K_k` for independent local instruments.
    pub fn product(a: &CovariantInstrument, b: &CovariantInstrument) -> CovariantInstrument {
        let mut outcomes = Vec::new();
        for oa in &a.outcomes {
            for ob in &b.outcomes {
                outcomes.push(oa.iter().flat_map(|x| ob.iter().map(move |y| crate::linalg::kron(x, y))).collect());
            }
        }
        CovariantInstrument { label: format!("{}⊗{}", a.label, b.label), outcomes }
    }
}

/// Orthonormal (Hilbert–Schmidt) basis of `{A : [A, T(g)] = 0 ∀g}`.
pub fn commutant_basis(sym: &Symmetry) -> Result<Vec<CMatrix>> {
    let d = sym.dim();
    let mut basis = Vec::new();
    match sym {
        Symmetry::Group(rep) => {
            let dec = decompose(rep)?;
            let u = dec.basis();
            for mu in 0..dec.multiplicities().len() {
                let (m, dim) = (dec.multiplicity(mu), dec.irrep_dim(mu));
                let w = c64(1.0 / (dim as f64).sqrt(), 0.0);
                for a in 0..m {
                    for b in 0..m {
                        let mut e = CMatrix::zeros(d, d);
                        for i in 0..dim {
                            e[(dec.column_index(mu, a, i), dec.column_index(mu, b, i))] = w;
                        }
                        basis.push(u * e * u.adjoint());
                    }
                }
            }
        }
        Symmetry::U1(action) => {
            let j = action.total();
            let v = j.eigenvectors();
            for (_, idx) in j.sectors() {
                for &a in &idx {
                    for &b in &idx {
                        basis.push(v.column(a) * v.column(b).adjoint());
                    }
                }
            }
        }
    }
    Ok(basis)
}

/// Random instrument whose Kraus operators all lie in the commutant.
pub fn random_covariant_instrument(sym: &Symmetry, n_outcomes: usize, seed: u64) -> Result<CovariantInstrument> {
    if n_outcomes == 0 {
        return Err(SsrError::Spec("an instrument needs at least one outcome".into()));
    }
    let basis = commutant_basis(sym)?;
    let d = sym.dim();
    let mut s = Sampler::new(seed);
    let mut raw: Vec<CMatrix> = (0..n_outcomes)
        .map(|_| basis.iter().fold(CMatrix::zeros(d, d), |acc, b| acc + b * s.complex_normal()))
        .collect();
    let r = raw.iter().fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k);
    let top = eig_hermitian(&r)?.values.last().copied().unwrap_or(0.0);
    if top > 0.0 {
        let target = 0.3 + 0.7 * s.uniform();
        let scale = (target / top).sqrt();
        for k in &mut raw {
            *k *= c64(scale, 0.0);
        }
    }
    let r = raw.iter().fold(CMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k);
    let completion = sqrt_psd(&(identity(d) - r))?;
    let mut outcomes: Vec<Vec<CMatrix>> = raw.into_iter().map(|k| vec![k]).collect();
    if max_abs(&completion) > 1e-14 {
        outcomes.last_mut().expect("at least one outcome").push(completion);
    }
    CovariantInstrument::new(format!("random covariant ({n_outcomes} outcomes, seed {seed})"), outcomes)
}

/// Projective measurement of the charge `μ`, one outcome per sector present.
pub fn charge_measurement(sym: &Symmetry) -> Result<CovariantInstrument> {
    let projectors: Vec<Vec<CMatrix>> = match sym {
        Symmetry::Group(rep) => charge_projectors(&decompose(rep)?).into_iter().map(|p| vec![p.projector]).collect(),
        Symmetry::U1(action) => {
            let j = action.total();
            j.sectors().into_iter().map(|(q, _)| vec![j.projector(q)]).collect()
        }
    };
    CovariantInstrument::new("charge measurement", projectors)
}

/// One outcome of [`apply_instrument`].
#[derive(Clone, Debug)]
pub struct InstrumentOutcome {
    pub index: usize,
    pub probability: f64,
    pub posterior: DensityOperator,
}

/// Probabilities `P_j = Tr 𝒪_j[ρ]` and normalized posteriors. Unlikely
/// outcomes are left out but still counted in the probability sum.
pub fn apply_instrument(rho: &DensityOperator, inst: &CovariantInstrument) -> Result<Vec<InstrumentOutcome>> {
    if inst.dim() != rho.dim() {
        return Err(SsrError::DimensionMismatch(format!(
            "instrument of dimension {} on a state of dimension {}",
            inst.dim(),
            rho.dim()
        )));
    }
    let mut out = Vec::new();
    let mut total = 0.0;
    for j in 0..inst.outcome_count() {
        let m = inst.apply_outcome(j, rho.matrix());
        let p = m.trace().re;
        total += p;
        if p >= MIN_PROBABILITY {
            let posterior = DensityOperator::from_trusted(m.unscale(p), rho.dims().to_vec());
            out.push(InstrumentOutcome { index: j, probability: p, posterior });
        }
    }
    if (total - 1.0).abs() > INSTRUMENT_TOL {
        return Err(SsrError::ProbabilitySum(total));
    }
    Ok(out)
}

/// Kraus-commutator and operational covariance residuals.
pub fn validate_covariance(inst: &CovariantInstrument, sym: &Symmetry) -> ValidationReport {
    let mut report = ValidationReport::default();
    if inst.dim() != sym.dim() {
        report.push_flag("dimension", false);
        return report;
    }
    let unitaries: Vec<CMatrix> = match sym {
        Symmetry::Group(rep) => rep.matrices().to_vec(),
        Symmetry::U1(action) => U1_PROBE_ANGLES.iter().map(|&t| action.total().unitary(t)).collect(),
    };
    let commutator = inst
        .outcomes
        .iter()
        .flatten()
        .flat_map(|k| unitaries.iter().map(move |t| max_abs(&(k * t - t * k))))
        .fold(0.0, f64::max);
    report.push("kraus_commutator", commutator, INSTRUMENT_TOL);

    let mut sampler = Sampler::new(PROBE_SEED);
    let d = sym.dim();
    let mut operational: f64 = 0.0;
    for _ in 0..PROBE_STATES {
        let probe = sampler.mixed_state(&[d], d);
        let rho = probe.matrix();
        for t in &unitaries {
            let moved = t * rho * t.adjoint();
            for j in 0..inst.outcome_count() {
                let lhs = inst.apply_outcome(j, &moved);
                let rhs = t * inst.apply_outcome(j, rho) * t.adjoint();
                operational = operational.max(max_abs_diff(&lhs, &rhs));
            }
        }
    }
    report.push("operational", operational, INSTRUMENT_TOL);
    report.push("completeness", inst.completeness_residual(), INSTRUMENT_TOL);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_group, multiplicities, Representation};
    use crate::linalg::{CVector, PureState};
    use crate::twirl::{ChargeOperator, TwirlKind, U1Action};
    use std::sync::Arc;

    fn rep(name: &str, irreps: &[usize]) -> Symmetry {
        let g = Arc::new(make_group(name).unwrap());
        Symmetry::Group(Representation::from_irreps(g, irreps).unwrap())
    }

    fn regular(name: &str) -> Symmetry {
        Symmetry::Group(Representation::regular(Arc::new(make_group(name).unwrap())))
    }

    fn plus() -> DensityOperator {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        PureState::new(CVector::from_vec(vec![c64(h, 0.), c64(h, 0.)]), vec![2]).unwrap().density()
    }

    fn check_orthonormal(basis: &[CMatrix]) {
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let ip = (a.adjoint() * b).trace();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - c64(expect, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn commutant_dimensions() {
        // irreducible: Schur
        assert_eq!(commutant_basis(&rep("S3", &[2])).unwrap().len(), 1);
        // trivial group: everything
        let z1 = Arc::new(make_group("Z1").unwrap());
        let triv = Symmetry::Group(Representation::trivial(z1, 3));
        assert_eq!(commutant_basis(&triv).unwrap().len(), 9);
        // Z3 regular: sum of squared multiplicities
        assert_eq!(commutant_basis(&regular("Z3")).unwrap().len(), 3);
        for (name, irreps) in [("S3", vec![0, 2, 2, 1]), ("D4", vec![4, 4, 0]), ("Q8", vec![4, 1, 4])] {
            let sym = rep(name, &irreps);
            let basis = commutant_basis(&sym).unwrap();
            let Symmetry::Group(r) = &sym else { unreachable!() };
            let expect: usize = multiplicities(r).unwrap().iter().map(|m| m * m).sum();
            assert_eq!(basis.len(), expect, "{name}");
            check_orthonormal(&basis);
            for b in &basis {
                for t in r.matrices() {
                    assert!(max_abs(&(b * t - t * b)) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn u1_commutant_is_block_diagonal() {
        let q = ChargeOperator::diagonal(&[0.0, 1.0, 1.0, 2.0]).unwrap();
        let sym = Symmetry::U1(U1Action::single(q));
        let basis = commutant_basis(&sym).unwrap();
        assert_eq!(basis.len(), 1 + 4 + 1);
        check_orthonormal(&basis);
    }

    #[test]
    fn single_outcome_is_a_channel() {
        for sym in [regular("S3"), rep("Z2", &[0, 1])] {
            let inst = random_covariant_instrument(&sym, 1, 5).unwrap();
            assert_eq!(inst.outcome_count(), 1);
            assert!(inst.completeness_residual() <= 1e-9);
        }
    }

    #[test]
    fn irreducible_rep_leaves_posteriors_unchanged() {
        let sym = rep("D4", &[4]);
        let inst = random_covariant_instrument(&sym, 3, 11).unwrap();
        let rho = Sampler::new(2).mixed_state(&[2], 2);
        for o in apply_instrument(&rho, &inst).unwrap() {
            assert!(max_abs_diff(o.posterior.matrix(), rho.matrix()) < 1e-10);
        }
    }

    #[test]
    fn z2_seed_42_residuals() {
        let sym = rep("Z2", &[0, 1]);
        let inst = random_covariant_instrument(&sym, 3, 42).unwrap();
        assert!(inst.completeness_residual() <= 1e-9);
        let report = validate_covariance(&inst, &sym);
        assert!(report.passed(), "{report:?}");
    }

    #[test]
    fn apply_examples() {
        let rho = plus();
        let id = apply_instrument(&rho, &CovariantInstrument::identity(2)).unwrap();
        assert_eq!(id.len(), 1);
        assert!((id[0].probability - 1.0).abs() < 1e-15);
        assert!(max_abs_diff(id[0].posterior.matrix(), rho.matrix()) < 1e-15);

        let sym = rep("Z2", &[0, 1]);
        let meas = charge_measurement(&sym).unwrap();
        let out = apply_instrument(&rho, &meas).unwrap();
        // oracle: ⟨+|Π_μ|+⟩
        assert_eq!(out.len(), 2);
        for o in &out {
            assert!((o.probability - 0.5).abs() < 1e-12);
        }
        assert!(validate_covariance(&meas, &sym).passed());
    }

    #[test]
    fn outcomes_sum_to_channel() {
        let sym = regular("S3");
        let inst = random_covariant_instrument(&sym, 4, 9).unwrap();
        let rho = Sampler::new(4).mixed_state(&[6], 6);
        let out = apply_instrument(&rho, &inst).unwrap();
        let mixed =
            out.iter().fold(CMatrix::zeros(6, 6), |acc, o| acc + o.posterior.matrix() * c64(o.probability, 0.0));
        assert!(max_abs_diff(&mixed, &inst.channel(rho.matrix())) < 1e-12);
    }

    #[test]
    fn zero_probability_outcomes_dropped() {
        let sym = rep("Z2", &[0, 1]);
        let meas = charge_measurement(&sym).unwrap();
        let rho = PureState::basis(0, vec![2]).unwrap().density();
        let out = apply_instrument(&rho, &meas).unwrap();
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn sigma_x_breaks_covariance() {
        let sym = rep("Z2", &[0, 1]);
        let mut inst = random_covariant_instrument(&sym, 2, 3).unwrap();
        let mut sx = CMatrix::zeros(2, 2);
        sx[(0, 1)] = c64(1.0, 0.0);
        sx[(1, 0)] = c64(1.0, 0.0);
        inst.outcomes[0][0] = sx;
        let report = validate_covariance(&inst, &sym);
        assert!(report.failed("kraus_commutator"));
        assert!(!report.passed());
    }

    #[test]
    fn u1_instruments() {
        let q = ChargeOperator::diagonal(&[0.0, 1.0]).unwrap();
        let sym = Symmetry::U1(U1Action::bipartite(q.clone(), q));
        let inst = random_covariant_instrument(&sym, 3, 1).unwrap();
        assert!(validate_covariance(&inst, &sym).passed());
        let meas = charge_measurement(&sym).unwrap();
        assert_eq!(meas.outcome_count(), 3);
        assert!(validate_covariance(&meas, &sym).passed());
    }

    #[test]
    fn product_of_local_instruments_is_locally_covariant() {
        let g = Arc::new(make_group("S3").unwrap());
        let a = Representation::irrep(g.clone(), 2);
        let b = Representation::from_irreps(g, &[0, 1]).unwrap();
        let ia = random_covariant_instrument(&Symmetry::Group(a.clone()), 2, 1).unwrap();
        let ib = random_covariant_instrument(&Symmetry::Group(b.clone()), 2, 2).unwrap();
        let prod = CovariantInstrument::product(&ia, &ib);
        assert_eq!(prod.outcome_count(), 4);
        assert!(prod.completeness_residual() < 1e-10);
        let joint = Symmetry::Group(a.tensor(&b).unwrap());
        assert!(validate_covariance(&prod, &joint).passed());
        // a covariant channel commutes with the twirl
        let rho = Sampler::new(6).mixed_state(&[2, 2], 4);
        let lhs = joint.twirl_matrix(&prod.channel(rho.matrix()), TwirlKind::Local).unwrap();
        let rhs = prod.channel(&joint.twirl_matrix(rho.matrix(), TwirlKind::Local).unwrap());
        assert!(max_abs_diff(&lhs, &rhs) < 1e-10);
    }
}
