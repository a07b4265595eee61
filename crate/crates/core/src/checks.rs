//! Numeric checks of the resource identities and bounds. Each check
//! returns a [`CheckResult`] with the two sides and the margin.

use serde::Serialize;

use crate::error::{Result, SsrError};
use crate::group::{charge_projectors, decompose, find_conjugate_pairs, Representation};
use crate::instrument::{apply_instrument, CovariantInstrument};
use crate::linalg::{kron, max_abs, max_abs_diff, CMatrix, DensityOperator, PureState};
use crate::resources::{
    accessible_entanglement, as_pure, asymmetry, entanglement_entropy, extractable_work, holevo_chi, local_asymmetry,
    local_work_pure, local_work_under_ssr, shared_asymmetry, shared_asymmetry_nested, synergy, total_work_local_ssr,
    twirl_ensemble, work_under_ssr, Resource, DERIVED_TOL, IDENTITY_TOL,
};
use crate::states::{build_pair_state, make_orbit_reference, make_shared_reference, SymmetricPureState};
use crate::twirl::{Symmetry, TwirlKind};

/// Largest `max|𝒢_G[ρ] − ρ|` for which a state counts as globally symmetric.
pub const SYMMETRY_TOL: f64 = 1e-8;
/// Appendix-style structural residuals.
pub const STRUCTURE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// `|lhs − rhs| ≤ tolerance`
    Equality,
    /// `lhs ≤ rhs + tolerance`; the margin is `rhs − lhs`.
    Bound,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub kind: CheckKind,
}

impl CheckResult {
    pub fn equality(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = (lhs - rhs).abs();
        Self { name: name.into(), lhs, rhs, margin, tolerance, pass: margin <= tolerance, kind: CheckKind::Equality }
    }

    pub fn bound(name: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let margin = rhs - lhs;
        Self { name: name.into(), lhs, rhs, margin, tolerance, pass: margin >= -tolerance, kind: CheckKind::Bound }
    }

    /// A residual that must not exceed the tolerance.
    pub fn residual(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::bound(name, value, 0.0, tolerance)
    }

    /// Same comparison judged at another tolerance.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.pass = match self.kind {
            CheckKind::Equality => self.margin <= tolerance,
            CheckKind::Bound => self.margin >= -tolerance,
        };
        self
    }
}

/// `W = W_G + A_G`
pub fn check_duality(rho: &DensityOperator, sym: &Symmetry) -> Result<CheckResult> {
    let w = extractable_work(rho)?;
    let rhs = work_under_ssr(rho, sym)? + asymmetry(rho, sym)?;
    Ok(CheckResult::equality("duality W = W_G + A_G", w, rhs, IDENTITY_TOL))
}

/// The identities valid for any bipartite state: `W = W_{G⊗G} + A^(lo)`,
/// `A^(lo) = A^(sh) + A_G`, `W_G = W_{G⊗G} + A^(sh)`, agreement of both forms
/// of `A^(sh)`, and non-negativity of the asymmetries.
pub fn check_bipartite_identities(rho: &DensityOperator, sym: &Symmetry) -> Result<Vec<CheckResult>> {
    let w = extractable_work(rho)?;
    let wg = work_under_ssr(rho, sym)?;
    let ag = asymmetry(rho, sym)?;
    let wgg = total_work_local_ssr(rho, sym)?;
    let ash = shared_asymmetry(rho, sym)?;
    let ash_nested = shared_asymmetry_nested(rho, sym)?;
    let alo = local_asymmetry(rho, sym)?;
    Ok(vec![
        CheckResult::equality("W = W_GxG + A_lo", w, wgg + alo, IDENTITY_TOL),
        CheckResult::equality("A_lo = A_sh + A_G", alo, ash + ag, IDENTITY_TOL),
        CheckResult::equality("W_G = W_GxG + A_sh", wg, wgg + ash, IDENTITY_TOL),
        CheckResult::equality("A_sh two forms", ash, ash_nested, IDENTITY_TOL),
        CheckResult::bound("A_G >= 0", 0.0, ag, IDENTITY_TOL),
        CheckResult::bound("A_sh >= 0", 0.0, ash, IDENTITY_TOL),
        CheckResult::bound("A_sh <= A_lo", ash, alo, IDENTITY_TOL),
    ])
}

/// `W_G = W_{G⊗G−L} + E_{G⊗G} + A^(sh)` for `ρ^β`, every term computed on
/// its own: `W_G` and `A^(sh)` by explicit twirls, `E` by Schmidt
/// decomposition, `H^(ch)` and `H^(co)` from the charge table.
pub fn check_triality(state: &SymmetricPureState) -> Result<CheckResult> {
    let rho = state.density();
    let sym = state.symmetry();
    let wg = work_under_ssr(&rho, sym)?;
    let rhs = local_work_under_ssr(state)? + accessible_entanglement(state)? + shared_asymmetry(&rho, sym)?;
    Ok(CheckResult::equality("triality W_G = W_GxG-L + E_GxG + A_sh", wg, rhs, DERIVED_TOL))
}

/// `W_{G⊗G}(ρ^β) = W_{G⊗G−L} + E_{G⊗G}`, and the entropy of the local twirl.
pub fn check_local_split(state: &SymmetricPureState) -> Result<Vec<CheckResult>> {
    let rho = state.density();
    let sym = state.symmetry();
    let wgg = total_work_local_ssr(&rho, sym)?;
    let rhs = local_work_under_ssr(state)? + accessible_entanglement(state)?;
    let twirled = sym.twirl(&rho, TwirlKind::Local)?;
    let s_local = twirled.entropy()?;
    let closed = state.local_twirl_closed_form();
    Ok(vec![
        CheckResult::equality("W_GxG = W_GxG-L + E_GxG", wgg, rhs, DERIVED_TOL),
        CheckResult::equality(
            "S(local twirl) = H_ch + 2 H_co",
            s_local,
            state.charge_entropy() + 2.0 * state.color_entropy(),
            IDENTITY_TOL,
        ),
        CheckResult::residual("local twirl closed form", max_abs_diff(closed.matrix(), twirled.matrix()), IDENTITY_TOL),
        CheckResult::equality(
            "E = H_ch + sum P E(phi) + H_co",
            entanglement_entropy(state.psi(), &[0])?,
            state.entanglement_from_sectors(),
            DERIVED_TOL,
        ),
        CheckResult::equality(
            "E_GxG = sum P E(phi)",
            accessible_entanglement(state)?,
            state.flavor_entanglement(),
            DERIVED_TOL,
        ),
    ])
}

/// For `ρ^β` the global constraint costs nothing: `W_G = W`, the local work
/// of the globally twirled state equals `W_L`, and so does its entanglement.
pub fn check_hierarchy(state: &SymmetricPureState) -> Result<Vec<CheckResult>> {
    let rho = state.density();
    let sym = state.symmetry();
    let twirled = sym.twirl(&rho, TwirlKind::Global)?;
    let psi_g = as_pure(&twirled)?;
    Ok(vec![
        CheckResult::equality("W_G = W on rho^beta", work_under_ssr(&rho, sym)?, extractable_work(&rho)?, IDENTITY_TOL),
        CheckResult::equality(
            "W_G-L = W_L on rho^beta",
            local_work_pure(&psi_g, &[0])?,
            local_work_pure(state.psi(), &[0])?,
            IDENTITY_TOL,
        ),
        CheckResult::equality(
            "E_G = E on rho^beta",
            entanglement_entropy(&psi_g, &[0])?,
            entanglement_entropy(state.psi(), &[0])?,
            IDENTITY_TOL,
        ),
    ])
}

/// Alice's charge projectors `Π_μ ⊗ 𝟙_B` with `D_μ`, one per charge present
/// on her side.
pub fn local_charge_projectors(sym: &Symmetry) -> Result<Vec<(CMatrix, usize)>> {
    let (_, db) = sym.split_dims().ok_or(SsrError::MissingSplit("charge measurement"))?;
    let id = crate::linalg::identity(db);
    let on_a: Vec<(CMatrix, usize)> = match &sym.side(true).expect("split checked") {
        Symmetry::Group(rep) => {
            charge_projectors(&decompose(rep)?).into_iter().map(|p| (p.projector, p.color_identity.nrows())).collect()
        }
        Symmetry::U1(u) => {
            let j = u.total();
            j.sectors().into_iter().map(|(q, _)| (j.projector(q), 1)).collect()
        }
    };
    Ok(on_a.iter().map(|(p, d)| (kron(p, &id), *d)).collect())
}

/// Alice measures her charge: the average flavor entanglement left behind,
/// `Σ P_μ (E(ψ_μ) − log D_μ)`, equals `E_{G⊗G}`. Probabilities and
/// post-measurement states come from the projectors, not the charge table.
pub fn check_charge_measurement_preserves_e(state: &SymmetricPureState) -> Result<CheckResult> {
    let psi = state.psi().amplitudes();
    let sym = state.symmetry();
    let mut rhs = 0.0;
    for (p, color) in local_charge_projectors(sym)? {
        let v = &p * psi;
        let prob = v.norm_squared();
        if prob < 1e-14 {
            continue;
        }
        let post = PureState::normalized(v, state.psi().dims().to_vec())?;
        rhs += prob * (entanglement_entropy(&post, &[0])? - (color as f64).log2());
    }
    Ok(CheckResult::equality("charge measurement keeps E_GxG", accessible_entanglement(state)?, rhs, DERIVED_TOL))
}

/// Theorem 1 for one state and instrument: `Σ_j P_j A_G(ρ_j) ≤ A_G(ρ)`.
pub fn theorem1_trial(rho: &DensityOperator, inst: &CovariantInstrument, sym: &Symmetry) -> Result<CheckResult> {
    let before = asymmetry(rho, sym)?;
    let mut after = 0.0;
    for o in apply_instrument(rho, inst)? {
        after += o.probability * asymmetry(&o.posterior, sym)?;
    }
    Ok(CheckResult::bound("theorem 1: average A_G does not increase", after, before, DERIVED_TOL))
}

/// Theorem 2: `Υ(W_G; ρ₁, ρ₂) ≤ min{A_G(ρ₁), A_G(ρ₂)}`.
pub fn check_theorem2(
    rho1: &DensityOperator,
    sym1: &Symmetry,
    rho2: &DensityOperator,
    sym2: &Symmetry,
) -> Result<CheckResult> {
    let ups = synergy(Resource::WG, rho1, sym1, rho2, sym2)?;
    let bound = asymmetry(rho1, sym1)?.min(asymmetry(rho2, sym2)?);
    Ok(CheckResult::bound("theorem 2: synergy of W_G <= min A_G", ups, bound, DERIVED_TOL))
}

/// With `ρ₂ = |e⟩⟨e|` in the regular representation the bound is attained.
pub fn check_theorem2_achievability(rho1: &DensityOperator, rep1: &Representation) -> Result<CheckResult> {
    let (psi, reg) = make_orbit_reference(rep1.group().clone());
    let sym1 = Symmetry::Group(rep1.clone());
    let ups = synergy(Resource::WG, rho1, &sym1, &psi.density(), &Symmetry::Group(reg))?;
    Ok(CheckResult::equality("theorem 2 achievability: synergy = A_G(rho1)", ups, asymmetry(rho1, &sym1)?, DERIVED_TOL))
}

/// `max|𝒢_G[ρ] − ρ|`
pub fn symmetry_residual(rho: &DensityOperator, sym: &Symmetry) -> Result<f64> {
    Ok(max_abs_diff(sym.twirl(rho, TwirlKind::Global)?.matrix(), rho.matrix()))
}

/// `Υ(W_{G⊗G}; ρ₁, ρ₂)` against `min{A^(sh)(ρ₁), A^(sh)(ρ₂)}` with no
/// precondition on the inputs.
pub fn theorem3_bound(
    rho1: &DensityOperator,
    sym1: &Symmetry,
    rho2: &DensityOperator,
    sym2: &Symmetry,
) -> Result<CheckResult> {
    let ups = synergy(Resource::WGxG, rho1, sym1, rho2, sym2)?;
    let bound = shared_asymmetry(rho1, sym1)?.min(shared_asymmetry(rho2, sym2)?);
    Ok(CheckResult::bound("theorem 3: synergy of W_GxG <= min A_sh", ups, bound, DERIVED_TOL))
}

/// Theorem 3 on globally symmetric inputs. Without global symmetry the
/// bound can fail (see [`theorem3_counterexample`]), so such inputs are
/// rejected.
pub fn check_theorem3(
    rho1: &DensityOperator,
    sym1: &Symmetry,
    rho2: &DensityOperator,
    sym2: &Symmetry,
) -> Result<CheckResult> {
    for (rho, sym) in [(rho1, sym1), (rho2, sym2)] {
        let r = symmetry_residual(rho, sym)?;
        if r > SYMMETRY_TOL {
            return Err(SsrError::NotSymmetric(r));
        }
    }
    theorem3_bound(rho1, sym1, rho2, sym2)
}

/// With the shared reference `Σ_h |h⟩|h⟩/√|G|` as partner, a globally
/// symmetric `ρ₁` attains the bound.
pub fn check_theorem3_achievability(rho1: &DensityOperator, rep1: &Representation) -> Result<CheckResult> {
    let sym1 = Symmetry::Group(rep1.clone());
    let r = symmetry_residual(rho1, &sym1)?;
    if r > SYMMETRY_TOL {
        return Err(SsrError::NotSymmetric(r));
    }
    let reference = make_shared_reference(rep1.group().clone())?;
    let ups = synergy(Resource::WGxG, rho1, &sym1, &reference.density(), reference.symmetry())?;
    Ok(CheckResult::equality(
        "theorem 3 achievability: synergy = A_sh(rho1)",
        ups,
        shared_asymmetry(rho1, &sym1)?,
        DERIVED_TOL,
    ))
}

/// `|+⟩_A|0⟩_B` twice, charges `diag(0, 1)` on every site: `A^(sh) = 0` on
/// each copy while the synergy of `W_{G⊗G}` is ½. Returns the unrestricted
/// bound check, which fails.
pub fn theorem3_counterexample() -> Result<CheckResult> {
    use crate::linalg::{c64, CVector};
    use crate::twirl::{ChargeOperator, U1Action};
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let psi = PureState::new(CVector::from_vec(vec![c64(h, 0.), c64(0., 0.), c64(h, 0.), c64(0., 0.)]), vec![2, 2])?;
    let q = ChargeOperator::diagonal(&[0.0, 1.0])?;
    let sym = Symmetry::U1(U1Action::bipartite(q.clone(), q));
    let rho = psi.density();
    theorem3_bound(&rho, &sym, &rho, &sym)
}

/// `A_G(ρ) = χ({1/|G|, T(g) ρ T(g)†})`
pub fn check_holevo(rho: &DensityOperator, sym: &Symmetry) -> Result<CheckResult> {
    let chi = holevo_chi(&twirl_ensemble(rho, sym)?)?;
    Ok(CheckResult::equality("A_G = Holevo chi of the twirl ensemble", asymmetry(rho, sym)?, chi, IDENTITY_TOL))
}

/// `local∘global = left∘global = right∘global`
pub fn check_twirl_composition(rho: &DensityOperator, sym: &Symmetry) -> Result<Vec<CheckResult>> {
    let g = sym.twirl(rho, TwirlKind::Global)?;
    let local = sym.twirl(&g, TwirlKind::Local)?;
    let left = sym.twirl(&g, TwirlKind::Left)?;
    let right = sym.twirl(&g, TwirlKind::Right)?;
    Ok(vec![
        CheckResult::residual("local.global = left.global", max_abs_diff(local.matrix(), left.matrix()), IDENTITY_TOL),
        CheckResult::residual(
            "local.global = right.global",
            max_abs_diff(local.matrix(), right.matrix()),
            IDENTITY_TOL,
        ),
    ])
}

/// Every pair state for every `β`, conjugate pair and flavor choice is an
/// eigenvector of every `T_A(g) ⊗ T_B(g)`. Returns the largest residual.
pub fn appendix_a_residual(rep_a: &Representation, rep_b: &Representation) -> Result<f64> {
    let group = rep_a.group().clone();
    let rep = rep_a.tensor(rep_b)?;
    let dec_a = decompose(rep_a)?;
    let dec_b = decompose(rep_b)?;
    let mut worst: f64 = 0.0;
    for beta in group.one_dimensional() {
        for pair in find_conjugate_pairs(&group, beta, beta as u64)? {
            for m in 0..dec_a.multiplicity(pair.mu) {
                for mbar in 0..dec_b.multiplicity(pair.mu_bar) {
                    let psi = build_pair_state(&pair, (m, mbar), &dec_a, &dec_b)?;
                    for g in 0..group.order() {
                        let lam = group.irrep(beta).scalar(g);
                        let moved = rep.matrix(g) * psi.amplitudes();
                        worst = worst.max((moved - psi.amplitudes() * lam).camax());
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// `max ‖[Π_μ, T_A(g) ⊗ T_B(g′)]‖` over charges and all pairs of elements.
pub fn appendix_b_residual(rep_a: &Representation, rep_b: &Representation) -> Result<f64> {
    // Π_μ = P_μ ⊗ 1, so the commutator is [P_μ, T_A(g)] ⊗ T_B(g′) and its
    // largest entry factors over the two sides.
    let projectors = charge_projectors(&decompose(rep_a)?);
    let largest_b = rep_b.matrices().iter().map(max_abs).fold(0.0_f64, f64::max);
    let mut worst: f64 = 0.0;
    for ta in rep_a.matrices() {
        for p in &projectors {
            let pa = &p.projector;
            worst = worst.max(max_abs(&(pa * ta - ta * pa)) * largest_b);
        }
    }
    Ok(worst)
}
