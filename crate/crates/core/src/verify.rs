//! Seeded Monte Carlo and exhaustive suites over the checks. Trial `t` of a
//! suite draws from `Sampler::new(seed + t)` (offset per group), so any
//! failing trial can be replayed on its own.

use std::sync::Arc;

use serde::Serialize;

use crate::checks::{
    appendix_a_residual, appendix_b_residual, check_bipartite_identities, check_charge_measurement_preserves_e,
    check_duality, check_hierarchy, check_holevo, check_local_split, check_theorem2, check_theorem2_achievability,
    check_theorem3, check_theorem3_achievability, check_triality, check_twirl_composition, theorem1_trial,
    theorem3_bound, theorem3_counterexample, CheckKind, CheckResult, STRUCTURE_TOL,
};
use crate::error::Result;
use crate::group::{make_group, verify_grand_orthogonality, FiniteGroup, Representation, CATALOG};
use crate::instrument::{apply_instrument, random_covariant_instrument, CovariantInstrument};
use crate::linalg::{max_abs_diff, DensityOperator, Sampler};
use crate::resources::{local_asymmetry, shared_asymmetry, DERIVED_TOL, IDENTITY_TOL};
use crate::states::{make_refbit, random_bipartite_rep, random_rep, random_symmetric_state_sized};
use crate::twirl::{u1_cyclic_representation, ChargeOperator, Symmetry, TwirlKind, U1Action};

/// Outcome of one suite: every individual check plus free-form notes.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub trials: usize,
    pub checks: Vec<CheckResult>,
    pub notes: Vec<String>,
}

/// Per-name aggregate of a suite's checks.
#[derive(Clone, Debug, Serialize)]
pub struct CheckSummary {
    pub name: String,
    pub count: usize,
    pub failures: usize,
    /// Largest `|lhs − rhs|` for equalities, smallest `rhs − lhs` for bounds.
    pub worst_margin: f64,
    pub tolerance: f64,
    pub kind: CheckKind,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        Self { name: name.to_string(), trials: 0, checks: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn merge(&mut self, other: SuiteReport) {
        self.trials += other.trials;
        self.checks.extend(other.checks);
        self.notes.extend(other.notes);
    }

    /// One entry per check name, in first-appearance order.
    pub fn summary(&self) -> Vec<CheckSummary> {
        let mut out: Vec<CheckSummary> = Vec::new();
        for c in &self.checks {
            let entry = match out.iter_mut().position(|s| s.name == c.name) {
                Some(i) => &mut out[i],
                None => {
                    let start = match c.kind {
                        CheckKind::Equality => 0.0,
                        CheckKind::Bound => f64::INFINITY,
                    };
                    out.push(CheckSummary {
                        name: c.name.clone(),
                        count: 0,
                        failures: 0,
                        worst_margin: start,
                        tolerance: c.tolerance,
                        kind: c.kind,
                    });
                    out.last_mut().expect("just pushed")
                }
            };
            entry.count += 1;
            entry.failures += usize::from(!c.pass);
            entry.worst_margin = match c.kind {
                CheckKind::Equality => entry.worst_margin.max(c.margin),
                CheckKind::Bound => entry.worst_margin.min(c.margin),
            };
        }
        out
    }
}

fn catalog_group(name: &str) -> Arc<FiniteGroup> {
    Arc::new(make_group(name).expect("catalog name"))
}

/// Every catalog group.
pub fn catalog() -> Vec<Arc<FiniteGroup>> {
    CATALOG.iter().map(|n| catalog_group(n)).collect()
}

/// Groups by catalog name.
pub fn groups(names: &[&str]) -> Vec<Arc<FiniteGroup>> {
    names.iter().map(|n| catalog_group(n)).collect()
}

fn trial_sampler(seed: u64, group_index: usize, trial: usize) -> Sampler {
    Sampler::new(seed.wrapping_add(1_000_003 * group_index as u64).wrapping_add(trial as u64))
}

fn random_mixed(s: &mut Sampler, dims: &[usize]) -> DensityOperator {
    let d: usize = dims.iter().product();
    let rank = 1 + s.below(d);
    s.mixed_state(dims, rank)
}

/// Random bipartite representation with a random `β` and a random state on it.
fn random_bipartite_instance(
    group: &Arc<FiniteGroup>,
    s: &mut Sampler,
    max_side: usize,
) -> Result<(DensityOperator, Symmetry)> {
    let ones = group.one_dimensional();
    let beta = ones[s.below(ones.len())];
    let rep = random_bipartite_rep(group.clone(), beta, s, max_side)?;
    let (da, db) = (rep.split().expect("split").dim_a(), rep.split().expect("split").dim_b());
    Ok((random_mixed(s, &[da, db]), Symmetry::Group(rep)))
}

/// Random charges in `{0, 1, 2}` with at least two distinct values.
fn random_charge(s: &mut Sampler, dim: usize) -> ChargeOperator {
    loop {
        let q: Vec<f64> = (0..dim).map(|_| s.below(3) as f64).collect();
        if q.iter().any(|&x| x != q[0]) {
            return ChargeOperator::diagonal(&q).expect("integer charges");
        }
    }
}

/// `W = W_G + A_G` and the bipartite identity chain on random states over
/// random bipartite representations of the given groups, plus U(1).
pub fn suite_identities(groups: &[Arc<FiniteGroup>], trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("identities");
    for t in 0..trials {
        let mut s = trial_sampler(seed, 0, t);
        let (rho, sym) = if t % 5 == 4 {
            let (da, db) = (2 + s.below(2), 2 + s.below(2));
            let sym = Symmetry::U1(U1Action::bipartite(random_charge(&mut s, da), random_charge(&mut s, db)));
            (random_mixed(&mut s, &[da, db]), sym)
        } else {
            let g = &groups[t % groups.len()];
            random_bipartite_instance(g, &mut s, 4)?
        };
        report.checks.push(check_duality(&rho, &sym)?);
        report.checks.extend(check_bipartite_identities(&rho, &sym)?);
        report.trials += 1;
    }
    Ok(report)
}

/// Triality and the other `ρ^β` identities on random globally symmetric
/// pure states.
pub fn suite_triality(groups: &[Arc<FiniteGroup>], trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("triality");
    for t in 0..trials {
        let g = &groups[t % groups.len()];
        let st = random_symmetric_state_sized(g.clone(), seed.wrapping_add(t as u64), 6)?;
        report.checks.push(check_triality(&st)?);
        report.checks.extend(check_local_split(&st)?);
        report.checks.extend(check_hierarchy(&st)?);
        report.checks.push(check_charge_measurement_preserves_e(&st)?);
        report.trials += 1;
    }
    Ok(report)
}

/// Theorem 1: random states against random covariant instruments, plus
/// the charge measurement every tenth trial.
pub fn suite_theorem1(group: &Arc<FiniteGroup>, group_index: usize, trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("theorem1");
    for t in 0..trials {
        let mut s = trial_sampler(seed, group_index, t);
        let rep = random_rep(group.clone(), &mut s, 6)?;
        let sym = Symmetry::Group(rep);
        let rho = random_mixed(&mut s, &[sym.dim()]);
        let inst = if t % 10 == 9 {
            crate::instrument::charge_measurement(&sym)?
        } else {
            random_covariant_instrument(&sym, 1 + s.below(4), s.below(1 << 30) as u64)?
        };
        report.checks.push(theorem1_trial(&rho, &inst, &sym)?);
        report.trials += 1;
    }
    Ok(report)
}

/// Theorem 2 bound on random pairs over random representations.
pub fn suite_theorem2(groups: &[Arc<FiniteGroup>], trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("theorem2");
    for t in 0..trials {
        let mut s = trial_sampler(seed, 0, t);
        let g = &groups[t % groups.len()];
        let r1 = random_rep(g.clone(), &mut s, 4)?;
        let r2 = random_rep(g.clone(), &mut s, 4)?;
        let rho1 = random_mixed(&mut s, &[r1.dim()]);
        let rho2 = random_mixed(&mut s, &[r2.dim()]);
        report.checks.push(check_theorem2(&rho1, &Symmetry::Group(r1), &rho2, &Symmetry::Group(r2))?);
        report.trials += 1;
    }
    Ok(report)
}

/// Theorem 2 achievability with the regular-orbit reference.
pub fn suite_theorem2_achievability(groups: &[Arc<FiniteGroup>], trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("theorem2-achievability");
    for t in 0..trials {
        let mut s = trial_sampler(seed, 1, t);
        let g = &groups[t % groups.len()];
        let r1 = random_rep(g.clone(), &mut s, 4)?;
        let rho1 = random_mixed(&mut s, &[r1.dim()]);
        report.checks.push(check_theorem2_achievability(&rho1, &r1)?);
        report.trials += 1;
    }
    Ok(report)
}

/// A random globally symmetric bipartite state: a random `ρ^β`, a twirled
/// random mixed state over a finite group, or a dephased U(1) state.
fn random_symmetric_instance(
    groups: &[Arc<FiniteGroup>],
    s: &mut Sampler,
    t: usize,
) -> Result<(DensityOperator, Symmetry)> {
    match t % 3 {
        0 => {
            let g = &groups[s.below(groups.len())];
            let st = random_symmetric_state_sized(g.clone(), s.below(1 << 30) as u64, 3)?;
            Ok((st.density(), st.symmetry().clone()))
        }
        1 => {
            let g = &groups[s.below(groups.len())];
            let (rho, sym) = random_bipartite_instance(g, s, 3)?;
            Ok((sym.twirl(&rho, TwirlKind::Global)?, sym))
        }
        _ => {
            let (da, db) = (2 + s.below(2), 2 + s.below(2));
            let sym = Symmetry::U1(U1Action::bipartite(random_charge(s, da), random_charge(s, db)));
            let rho = random_mixed(s, &[da, db]);
            Ok((sym.twirl(&rho, TwirlKind::Global)?, sym))
        }
    }
}

/// Theorem 3 on globally symmetric pairs (refbit ⊗ refbit first), with a
/// note on the counterexample that shows why global symmetry is required.
pub fn suite_theorem3(groups: &[Arc<FiniteGroup>], trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("theorem3");
    let refbit = make_refbit();
    let rb = refbit.density();
    report.checks.push(check_theorem3(&rb, refbit.symmetry(), &rb, refbit.symmetry())?);
    report.trials += 1;
    for t in 1..trials {
        let mut s = trial_sampler(seed, 0, t);
        let (rho1, sym1) = random_symmetric_instance(groups, &mut s, t)?;
        // a U(1) partner for U(1), a same-group partner otherwise
        let (rho2, sym2) = match &sym1 {
            Symmetry::U1(_) => random_symmetric_instance(groups, &mut s, 2)?,
            Symmetry::Group(rep) => {
                let g = rep.group().clone();
                let k = if s.uniform() < 0.5 { 0 } else { 1 };
                random_symmetric_instance(&[g], &mut s, k)?
            }
        };
        report.checks.push(check_theorem3(&rho1, &sym1, &rho2, &sym2)?);
        report.trials += 1;
    }
    let counter = theorem3_counterexample()?;
    report.notes.push(format!(
        "without global symmetry the bound fails: |+>|0> twice under U(1) gives synergy {:.3} > A_sh {:.3}",
        counter.lhs, counter.rhs
    ));
    Ok(report)
}

/// Achievability of the Theorem 3 bound with `Σ_h |h⟩|h⟩/√|G|`.
pub fn suite_theorem3_achievability(groups: &[Arc<FiniteGroup>], trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("theorem3-achievability");
    for t in 0..trials {
        let mut s = trial_sampler(seed, 2, t);
        let g = &groups[t % groups.len()];
        let (rho, sym) = random_bipartite_instance(g, &mut s, 3)?;
        let rho = sym.twirl(&rho, TwirlKind::Global)?;
        let Symmetry::Group(rep) = &sym else { unreachable!() };
        report.checks.push(check_theorem3_achievability(&rho, rep)?);
        report.trials += 1;
    }
    Ok(report)
}

/// `A_G(ρ₁⊗ρ₂) = χ` of the twirl ensemble.
pub fn suite_holevo(groups: &[Arc<FiniteGroup>], trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("holevo");
    for t in 0..trials {
        let mut s = trial_sampler(seed, 3, t);
        let g = &groups[t % groups.len()];
        let r1 = random_rep(g.clone(), &mut s, 3)?;
        let r2 = random_rep(g.clone(), &mut s, 3)?;
        let rho = random_mixed(&mut s, &[r1.dim()]).tensor(&random_mixed(&mut s, &[r2.dim()]));
        let rho = rho.with_dims(vec![r1.dim(), r2.dim()])?;
        report.checks.push(check_holevo(&rho, &Symmetry::Group(r1.tensor(&r2)?))?);
        report.trials += 1;
    }
    Ok(report)
}

/// Appendix A and B residuals on regular ⊗ regular, plus B on the sum of
/// all irreps on both sides.
pub fn suite_appendix(groups: &[Arc<FiniteGroup>]) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("appendix");
    for g in groups {
        let reg = Representation::regular(g.clone());
        let a = appendix_a_residual(&reg, &reg)?;
        report.checks.push(CheckResult::residual(
            format!("appendix A eigenstate residual {}", g.name()),
            a,
            STRUCTURE_TOL,
        ));
        let all: Vec<usize> = (0..g.irreps().len()).collect();
        let every = Representation::from_irreps(g.clone(), &all)?;
        let b = appendix_b_residual(&reg, &reg)?.max(appendix_b_residual(&every, &every)?);
        report.checks.push(CheckResult::residual(format!("appendix B commutator {}", g.name()), b, STRUCTURE_TOL));
        report.trials += 1;
    }
    Ok(report)
}

/// Grand orthogonality per group, local-twirl closed form and entropy on
/// random `ρ^β`, the twirl composition chain, and U(1) dephasing against
/// its cyclic subgroups.
pub fn suite_structure(groups: &[Arc<FiniteGroup>], trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("structure");
    for g in groups {
        report.checks.push(CheckResult::residual(
            format!("grand orthogonality {}", g.name()),
            verify_grand_orthogonality(g),
            STRUCTURE_TOL,
        ));
    }
    for t in 0..trials {
        let mut s = trial_sampler(seed, 4, t);
        let g = &groups[t % groups.len()];
        let st = random_symmetric_state_sized(g.clone(), s.below(1 << 30) as u64, 4)?;
        let closed = st.local_twirl_closed_form();
        let explicit = st.symmetry().twirl(&st.density(), TwirlKind::Local)?;
        report.checks.push(CheckResult::residual(
            "local twirl closed form vs double sum",
            max_abs_diff(closed.matrix(), explicit.matrix()),
            IDENTITY_TOL,
        ));
        report.checks.push(CheckResult::equality(
            "S(local twirl) = H_ch + 2 H_co",
            explicit.entropy()?,
            st.charge_entropy() + 2.0 * st.color_entropy(),
            IDENTITY_TOL,
        ));
        let (rho, sym) = random_bipartite_instance(g, &mut s, 4)?;
        report.checks.extend(check_twirl_composition(&rho, &sym)?);
        let d = 2 + s.below(4);
        let q: Vec<f64> = (0..d).map(|_| s.below(5) as f64 - 2.0).collect();
        let charge = ChargeOperator::diagonal(&q)?;
        let gap = q.iter().cloned().fold(f64::MIN, f64::max) - q.iter().cloned().fold(f64::MAX, f64::min);
        let n = gap as usize + 1 + s.below(3);
        let cyclic = Symmetry::Group(u1_cyclic_representation(&charge, n)?);
        let probe = random_mixed(&mut s, &[d]);
        let via_group = cyclic.twirl(&probe, TwirlKind::Global)?;
        report.checks.push(CheckResult::residual(
            "U(1) dephasing = Z_N twirl",
            max_abs_diff(via_group.matrix(), &charge.dephase(probe.matrix())),
            IDENTITY_TOL,
        ));
        report.trials += 1;
    }
    Ok(report)
}

/// Average `A^(lo)` (any input) and `A^(sh)` (globally symmetric input)
/// under products of local covariant instruments.
pub fn suite_local_monotonicity(groups: &[Arc<FiniteGroup>], trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("local-monotonicity");
    for t in 0..trials {
        let mut s = trial_sampler(seed, 5, t);
        let g = &groups[t % groups.len()];
        let (rho, sym) = random_bipartite_instance(g, &mut s, 3)?;
        let Symmetry::Group(rep) = &sym else { unreachable!() };
        let a = Symmetry::Group(rep.side_a().expect("split"));
        let b = Symmetry::Group(rep.side_b().expect("split"));
        let inst = CovariantInstrument::product(
            &random_covariant_instrument(&a, 1 + s.below(3), s.below(1 << 30) as u64)?,
            &random_covariant_instrument(&b, 1 + s.below(3), s.below(1 << 30) as u64)?,
        );
        let average = |rho: &DensityOperator, f: &dyn Fn(&DensityOperator) -> Result<f64>| -> Result<f64> {
            let mut acc = 0.0;
            for o in apply_instrument(rho, &inst)? {
                acc += o.probability * f(&o.posterior)?;
            }
            Ok(acc)
        };
        let alo = |r: &DensityOperator| local_asymmetry(r, &sym);
        let ash = |r: &DensityOperator| shared_asymmetry(r, &sym);
        report.checks.push(CheckResult::bound(
            "A_lo non-increasing on average",
            average(&rho, &alo)?,
            alo(&rho)?,
            DERIVED_TOL,
        ));
        let symmetric = sym.twirl(&rho, TwirlKind::Global)?;
        report.checks.push(CheckResult::bound(
            "A_sh non-increasing on average (symmetric input)",
            average(&symmetric, &ash)?,
            ash(&symmetric)?,
            DERIVED_TOL,
        ));
        report.trials += 1;
    }
    Ok(report)
}

/// Largest group order for which the Theorem 3 achievability suite runs.
pub const THEOREM3_ACHIEVABILITY_MAX_ORDER: usize = 6;

/// Suites exposed by `verify`.
pub const SUITES: &[&str] = &["theorem1", "theorem2", "theorem3", "identities", "appendix", "all"];

/// Runs a named suite with the given groups and trial count.
pub fn run_suite(
    name: &str,
    groups: &[Arc<FiniteGroup>],
    trials: usize,
    seed: u64,
    achievability: bool,
) -> Result<Vec<SuiteReport>> {
    let achievable: Vec<Arc<FiniteGroup>> = if achievability { groups.to_vec() } else { Vec::new() };
    Ok(match name {
        "theorem1" => {
            let mut r = SuiteReport::new("theorem1");
            for (i, g) in groups.iter().enumerate() {
                r.merge(suite_theorem1(g, i, trials, seed)?);
            }
            vec![r]
        }
        "theorem2" => {
            let mut out = vec![suite_theorem2(groups, trials, seed)?];
            if achievability {
                out.push(suite_theorem2_achievability(&achievable, trials.min(50), seed)?);
            }
            out
        }
        "theorem3" => {
            let mut out = vec![suite_theorem3(groups, trials, seed)?];
            if achievability {
                // the partner lives on regular ⊗ regular, so the joint space grows as |G|²
                let small: Vec<Arc<FiniteGroup>> =
                    achievable.iter().filter(|g| g.order() <= THEOREM3_ACHIEVABILITY_MAX_ORDER).cloned().collect();
                let mut r = if small.is_empty() {
                    SuiteReport::new("theorem3-achievability")
                } else {
                    suite_theorem3_achievability(&small, trials.min(10), seed)?
                };
                if small.len() < achievable.len() {
                    r.notes.push(format!(
                        "achievability run only for groups of order <= {THEOREM3_ACHIEVABILITY_MAX_ORDER}"
                    ));
                }
                out.push(r);
            }
            out
        }
        "identities" => vec![
            suite_identities(groups, trials, seed)?,
            suite_triality(groups, trials, seed)?,
            suite_holevo(groups, trials, seed)?,
            suite_structure(groups, trials, seed)?,
            suite_local_monotonicity(groups, trials, seed)?,
        ],
        "appendix" => vec![suite_appendix(groups)?],
        "all" => {
            let mut out = Vec::new();
            for n in ["theorem1", "theorem2", "theorem3", "identities", "appendix"] {
                out.extend(run_suite(n, groups, trials, seed, achievability)?);
            }
            out
        }
        other => return Err(crate::error::SsrError::Spec(format!("unknown suite {other}"))),
    })
}

/// Bound check used by the unrestricted Theorem 3 experiment.
pub fn theorem3_unrestricted(
    rho1: &DensityOperator,
    sym1: &Symmetry,
    rho2: &DensityOperator,
    sym2: &Symmetry,
) -> Result<CheckResult> {
    theorem3_bound(rho1, sym1, rho2, sym2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_on_small_runs() {
        let gs = groups(&["Z2", "Z3", "S3"]);
        for name in ["theorem1", "theorem2", "theorem3", "identities", "appendix"] {
            for r in run_suite(name, &gs, 6, 3, true).unwrap() {
                assert!(r.passed(), "{name}: {:?}", r.failures());
                assert!(!r.checks.is_empty());
            }
        }
    }

    #[test]
    fn same_seed_same_checks() {
        let gs = groups(&["Z3", "D4"]);
        let a = suite_identities(&gs, 5, 9).unwrap();
        let b = suite_identities(&gs, 5, 9).unwrap();
        let lhs: Vec<f64> = a.checks.iter().map(|c| c.lhs).collect();
        let rhs: Vec<f64> = b.checks.iter().map(|c| c.lhs).collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn summary_aggregates_by_name() {
        let mut r = SuiteReport::new("x");
        r.checks.push(CheckResult::bound("b", 0.0, 1.0, 1e-9));
        r.checks.push(CheckResult::bound("b", 0.0, 0.25, 1e-9));
        r.checks.push(CheckResult::equality("e", 1.0, 1.0 + 1e-12, 1e-9));
        let s = r.summary();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].count, 2);
        assert!((s[0].worst_margin - 0.25).abs() < 1e-15);
        assert_eq!(s[0].failures, 0);
    }
}
