//! Entropic resources in bits (`k_BT = 1`, binary logarithm).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Result, SsrError};
use crate::linalg::{
    eig_hermitian, permute_subsystems, schmidt_decompose, CMatrix, CVector, DensityOperator, PureState,
};
use crate::states::SymmetricPureState;
use crate::twirl::{Symmetry, TwirlKind, JOIN_ORDER};

/// Tolerance for identities that are exact up to rounding.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Tolerance for quantities routed through decompositions or instruments.
pub const DERIVED_TOL: f64 = 1e-8;
const PURITY_TOL: f64 = 1e-10;

fn log_dim(rho: &DensityOperator) -> f64 {
    (rho.dim() as f64).log2()
}

/// `W(ρ) = log D − S(ρ)`
pub fn extractable_work(rho: &DensityOperator) -> Result<f64> {
    Ok(log_dim(rho) - rho.entropy()?)
}

/// `W_G(ρ) = W(𝒢_G[ρ])`
pub fn work_under_ssr(rho: &DensityOperator, sym: &Symmetry) -> Result<f64> {
    extractable_work(&sym.twirl(rho, TwirlKind::Global)?)
}

/// `A_G(ρ) = S(𝒢_G[ρ]) − S(ρ)`
pub fn asymmetry(rho: &DensityOperator, sym: &Symmetry) -> Result<f64> {
    Ok(sym.twirl(rho, TwirlKind::Global)?.entropy()? - rho.entropy()?)
}

/// `W_{G⊗G}(ρ) = log D − S(𝒢_{G⊗G}[ρ])`
pub fn total_work_local_ssr(rho: &DensityOperator, sym: &Symmetry) -> Result<f64> {
    Ok(log_dim(rho) - sym.twirl(rho, TwirlKind::Local)?.entropy()?)
}

/// `A^(sh)(ρ) = S(𝒢_{G⊗G}[ρ]) − S(𝒢_G[ρ])`
pub fn shared_asymmetry(rho: &DensityOperator, sym: &Symmetry) -> Result<f64> {
    let local = sym.twirl(rho, TwirlKind::Local)?.entropy()?;
    let global = sym.twirl(rho, TwirlKind::Global)?.entropy()?;
    Ok(local - global)
}

/// `S(𝒢_{G⊗G}{𝒢_G[ρ]}) − S(𝒢_G[ρ])`, the form that twirls globally first.
pub fn shared_asymmetry_nested(rho: &DensityOperator, sym: &Symmetry) -> Result<f64> {
    let global = sym.twirl(rho, TwirlKind::Global)?;
    Ok(sym.twirl(&global, TwirlKind::Local)?.entropy()? - global.entropy()?)
}

/// `A^(lo)(ρ) = S(𝒢_{G⊗G}[ρ]) − S(ρ)`
pub fn local_asymmetry(rho: &DensityOperator, sym: &Symmetry) -> Result<f64> {
    Ok(sym.twirl(rho, TwirlKind::Local)?.entropy()? - rho.entropy()?)
}

/// `S(Σ p_i ρ_i) − Σ p_i S(ρ_i)`
pub fn holevo_chi(ensemble: &[(f64, DensityOperator)]) -> Result<f64> {
    let total: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(SsrError::ProbabilitySum(total));
    }
    let refs: Vec<(f64, &DensityOperator)> = ensemble.iter().map(|(p, r)| (*p, r)).collect();
    let mean = DensityOperator::mixture(&refs)?;
    let mut avg = 0.0;
    for (p, r) in ensemble {
        avg += p * r.entropy()?;
    }
    Ok(mean.entropy()? - avg)
}

/// The ensemble `{1/|G|, T(g) ρ T(g)†}`.
pub fn twirl_ensemble(rho: &DensityOperator, sym: &Symmetry) -> Result<Vec<(f64, DensityOperator)>> {
    match sym {
        Symmetry::Group(rep) => {
            let w = 1.0 / rep.group().order() as f64;
            Ok(rep.matrices().iter().map(|t| (w, rho.conjugated(t))).collect())
        }
        Symmetry::U1(_) => Err(SsrError::Spec("the U(1) orbit is not a finite ensemble".into())),
    }
}

/// Entropy of entanglement across the cut `left | rest`.
pub fn entanglement_entropy(psi: &PureState, left: &[usize]) -> Result<f64> {
    Ok(schmidt_decompose(psi, left)?.entropy())
}

/// `W_L = log D − E` for a pure bipartite state.
pub fn local_work_pure(psi: &PureState, left: &[usize]) -> Result<f64> {
    Ok((psi.dim() as f64).log2() - entanglement_entropy(psi, left)?)
}

/// Dominant eigenvector of a state that is pure within `1e−10`.
pub fn as_pure(rho: &DensityOperator) -> Result<PureState> {
    if (rho.purity() - 1.0).abs() > PURITY_TOL {
        return Err(SsrError::NotPure);
    }
    let spec = eig_hermitian(rho.matrix())?;
    let v: CVector = spec.vectors.column(rho.dim() - 1).into_owned();
    PureState::normalized(v, rho.dims().to_vec())
}

/// `W_{G⊗G−L}(ρ^β) = log D − E − H^(co)`
pub fn local_work_under_ssr(state: &SymmetricPureState) -> Result<f64> {
    let e = entanglement_entropy(state.psi(), &[0])?;
    Ok((state.psi().dim() as f64).log2() - e - state.color_entropy())
}

/// `E_{G⊗G}(ρ^β) = E − H^(co) − H^(ch)`
pub fn accessible_entanglement(state: &SymmetricPureState) -> Result<f64> {
    let e = entanglement_entropy(state.psi(), &[0])?;
    Ok(e - state.color_entropy() - state.charge_entropy())
}

/// `(H^(ch), H^(co))`
pub fn charge_color_entropies(state: &SymmetricPureState) -> (f64, f64) {
    (state.charge_entropy(), state.color_entropy())
}

/// Named resource functionals accepted by [`synergy`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Resource {
    W,
    WG,
    AG,
    WGxG,
    ASh,
    ALo,
}

impl Resource {
    pub const ALL: [Resource; 6] =
        [Resource::W, Resource::WG, Resource::AG, Resource::WGxG, Resource::ASh, Resource::ALo];

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "W" => Ok(Resource::W),
            "W_G" => Ok(Resource::WG),
            "A_G" => Ok(Resource::AG),
            "W_GxG" => Ok(Resource::WGxG),
            "A_sh" => Ok(Resource::ASh),
            "A_lo" => Ok(Resource::ALo),
            other => Err(SsrError::UnknownFunctional(other.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Resource::W => "W",
            Resource::WG => "W_G",
            Resource::AG => "A_G",
            Resource::WGxG => "W_GxG",
            Resource::ASh => "A_sh",
            Resource::ALo => "A_lo",
        }
    }

    /// Needs the Alice/Bob split.
    pub fn is_bipartite(self) -> bool {
        matches!(self, Resource::WGxG | Resource::ASh | Resource::ALo)
    }

    pub fn evaluate(self, rho: &DensityOperator, sym: &Symmetry) -> Result<f64> {
        match self {
            Resource::W => extractable_work(rho),
            Resource::WG => work_under_ssr(rho, sym),
            Resource::AG => asymmetry(rho, sym),
            Resource::WGxG => total_work_local_ssr(rho, sym),
            Resource::ASh => shared_asymmetry(rho, sym),
            Resource::ALo => local_asymmetry(rho, sym),
        }
    }
}

/// Joint state and symmetry for two systems. Global functionals see system
/// 1 as Alice and system 2 as Bob; bipartite ones pair up `A₁A₂ | B₁B₂`.
pub fn joint(
    rho1: &DensityOperator,
    sym1: &Symmetry,
    rho2: &DensityOperator,
    sym2: &Symmetry,
    bipartite: bool,
) -> Result<(DensityOperator, Symmetry)> {
    if !bipartite {
        let rho = rho1.tensor(rho2).with_dims(vec![rho1.dim(), rho2.dim()])?;
        return Ok((rho, sym1.tensor(sym2)?));
    }
    let (a1, b1) = sym1.split_dims().ok_or(SsrError::MissingSplit("joint"))?;
    let (a2, b2) = sym2.split_dims().ok_or(SsrError::MissingSplit("joint"))?;
    let rho = rho1.with_dims(vec![a1, b1])?.tensor(&rho2.with_dims(vec![a2, b2])?);
    let rho = permute_subsystems(&rho, &JOIN_ORDER)?.with_dims(vec![a1 * a2, b1 * b2])?;
    Ok((rho, sym1.bipartite_join(sym2)?))
}

/// `Υ(X; ρ₁, ρ₂) = X(ρ₁⊗ρ₂) − X(ρ₁) − X(ρ₂)`
pub fn synergy(
    quantity: Resource,
    rho1: &DensityOperator,
    sym1: &Symmetry,
    rho2: &DensityOperator,
    sym2: &Symmetry,
) -> Result<f64> {
    let (rho, sym) = joint(rho1, sym1, rho2, sym2, quantity.is_bipartite())?;
    Ok(quantity.evaluate(&rho, &sym)? - quantity.evaluate(rho1, sym1)? - quantity.evaluate(rho2, sym2)?)
}

/// Named quantities for one state, with a digest of the input.
#[derive(Clone, Debug, Serialize)]
pub struct ResourceReport {
    pub values: BTreeMap<String, f64>,
    pub digest: String,
    pub tolerances: BTreeMap<String, f64>,
}

impl ResourceReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    /// Finite values, works at most `log D`, asymmetries non-negative.
    pub fn sanity_violations(&self, log_d: f64) -> Vec<String> {
        let mut bad = Vec::new();
        for (k, &v) in &self.values {
            if !v.is_finite() {
                bad.push(format!("{k} is not finite"));
            } else if k.starts_with('W') && v > log_d + IDENTITY_TOL {
                bad.push(format!("{k} = {v} exceeds log D = {log_d}"));
            } else if !k.starts_with('W') && v < -IDENTITY_TOL {
                bad.push(format!("{k} = {v} is negative"));
            }
        }
        bad
    }
}

/// FNV-1a over the matrix entries and dimensions.
pub fn digest(m: &CMatrix, dims: &[usize]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut feed = |bytes: &[u8]| {
        for b in bytes {
            h ^= *b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    for d in dims {
        feed(&(*d as u64).to_le_bytes());
    }
    for z in m.iter() {
        feed(&z.re.to_bits().to_le_bytes());
        feed(&z.im.to_bits().to_le_bytes());
    }
    format!("{h:016x}")
}

/// `W`, `W_G`, `A_G`; with a split also `W_GxG`, `A_sh`, `A_lo`; with a
/// charge table also the entanglement decomposition.
pub fn resource_report(
    rho: &DensityOperator,
    sym: &Symmetry,
    symmetric: Option<&SymmetricPureState>,
) -> Result<ResourceReport> {
    let mut values = BTreeMap::new();
    values.insert("W".to_string(), extractable_work(rho)?);
    values.insert("W_G".to_string(), work_under_ssr(rho, sym)?);
    values.insert("A_G".to_string(), asymmetry(rho, sym)?);
    if sym.is_bipartite() {
        values.insert("W_GxG".to_string(), total_work_local_ssr(rho, sym)?);
        values.insert("A_sh".to_string(), shared_asymmetry(rho, sym)?);
        values.insert("A_lo".to_string(), local_asymmetry(rho, sym)?);
    }
    if let Some(st) = symmetric {
        values.insert("E".to_string(), entanglement_entropy(st.psi(), &[0])?);
        values.insert("H_ch".to_string(), st.charge_entropy());
        values.insert("H_co".to_string(), st.color_entropy());
        values.insert("E_GxG".to_string(), accessible_entanglement(st)?);
        values.insert("W_GxG-L".to_string(), local_work_under_ssr(st)?);
        values.insert("W_L".to_string(), local_work_pure(st.psi(), &[0])?);
    }
    let mut tolerances = BTreeMap::new();
    tolerances.insert("identity".to_string(), IDENTITY_TOL);
    tolerances.insert("derived".to_string(), DERIVED_TOL);
    Ok(ResourceReport { values, digest: digest(rho.matrix(), rho.dims()), tolerances })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, PureState, Sampler};
    use crate::states::{make_refbit, make_spin_plus};
    use crate::twirl::{ChargeOperator, U1Action};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9
    }

    fn spin_one() -> (DensityOperator, Symmetry) {
        let rho = PureState::basis(0, vec![2]).unwrap().density();
        (rho, Symmetry::U1(U1Action::single(ChargeOperator::spin_half_z())))
    }

    #[test]
    fn single_spin_values() {
        let (up, sym) = spin_one();
        assert!(close(extractable_work(&up).unwrap(), 1.0));
        assert!(close(work_under_ssr(&up, &sym).unwrap(), 1.0));
        let (plus, sym) = make_spin_plus(1).unwrap();
        assert!(close(extractable_work(&plus).unwrap(), 1.0));
        assert!(close(work_under_ssr(&plus, &sym).unwrap(), 0.0));
        assert!(close(asymmetry(&plus, &sym).unwrap(), 1.0));
        assert!(close(asymmetry(&up, &sym).unwrap(), 0.0));
        assert!(close(extractable_work(&DensityOperator::maximally_mixed(vec![3])).unwrap(), 0.0));
    }

    #[test]
    fn two_spin_values() {
        let (rho, sym) = make_spin_plus(2).unwrap();
        assert!(close(extractable_work(&rho).unwrap(), 2.0));
        assert!(close(work_under_ssr(&rho, &sym).unwrap(), 0.5));
        assert!(close(asymmetry(&rho, &sym).unwrap(), 1.5));
        let (one, s1) = make_spin_plus(1).unwrap();
        let ups = synergy(Resource::WG, &one, &s1, &one, &s1).unwrap();
        assert!(close(ups, 0.5));
        let (up, s) = spin_one();
        assert!(close(synergy(Resource::WG, &up, &s, &up, &s).unwrap(), 0.0));
    }

    #[test]
    fn refbit_values() {
        let r = make_refbit();
        let rho = r.density();
        let sym = r.symmetry();
        assert!(close(shared_asymmetry(&rho, sym).unwrap(), 1.0));
        assert!(close(shared_asymmetry_nested(&rho, sym).unwrap(), 1.0));
        assert!(close(local_asymmetry(&rho, sym).unwrap(), 1.0));
        assert!(close(total_work_local_ssr(&rho, sym).unwrap(), 1.0));
        assert!(close(accessible_entanglement(&r).unwrap(), 0.0));
        assert!(close(local_work_under_ssr(&r).unwrap(), 1.0));
        let (h_ch, h_co) = charge_color_entropies(&r);
        assert!(close(h_ch, 1.0) && close(h_co, 0.0));
        let report = resource_report(&rho, sym, Some(&r)).unwrap();
        assert!(close(report.get("E").unwrap(), 1.0));
        assert!(report.sanity_violations(2.0).is_empty());
    }

    #[test]
    fn pure_state_work() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell =
            PureState::new(CVector::from_vec(vec![c64(h, 0.), c64(0., 0.), c64(0., 0.), c64(h, 0.)]), vec![2, 2])
                .unwrap();
        assert!(close(entanglement_entropy(&bell, &[0]).unwrap(), 1.0));
        assert!(close(local_work_pure(&bell, &[0]).unwrap(), 1.0));
        let prod = PureState::basis(2, vec![2, 2]).unwrap();
        assert!(close(local_work_pure(&prod, &[0]).unwrap(), 2.0));
        let psi = Sampler::new(5).pure_state(&[3, 3]);
        // oracle: entropy of the reduced state
        let reduced = psi.density().partial_trace(&[0]).unwrap().entropy().unwrap();
        assert!(close(local_work_pure(&psi, &[0]).unwrap(), 9f64.log2() - reduced));
        assert!(matches!(as_pure(&DensityOperator::maximally_mixed(vec![2])), Err(SsrError::NotPure)));
        let back = as_pure(&psi.density()).unwrap();
        assert!((back.amplitudes().dotc(psi.amplitudes()).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn holevo_examples() {
        let rho = Sampler::new(1).mixed_state(&[3], 2);
        let same = vec![(0.5, rho.clone()), (0.5, rho.clone())];
        assert!(holevo_chi(&same).unwrap().abs() < 1e-10);
        let basis: Vec<(f64, DensityOperator)> =
            (0..4).map(|k| (0.25, PureState::basis(k, vec![4]).unwrap().density())).collect();
        assert!(close(holevo_chi(&basis).unwrap(), 2.0));
        assert!(matches!(holevo_chi(&[(0.7, rho)]), Err(SsrError::ProbabilitySum(_))));
    }

    #[test]
    fn functional_names_round_trip() {
        for r in Resource::ALL {
            assert_eq!(Resource::parse(r.name()).unwrap(), r);
        }
        assert!(matches!(Resource::parse("X"), Err(SsrError::UnknownFunctional(_))));
    }

    #[test]
    fn digest_is_stable() {
        let rho = DensityOperator::maximally_mixed(vec![2]);
        assert_eq!(digest(rho.matrix(), rho.dims()), digest(rho.matrix(), rho.dims()));
        let other = DensityOperator::maximally_mixed(vec![3]);
        assert_ne!(digest(rho.matrix(), rho.dims()), digest(other.matrix(), other.dims()));
    }
}
