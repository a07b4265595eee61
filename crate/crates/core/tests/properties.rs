use std::sync::Arc;

use proptest::prelude::*;
use ssr_core::checks::{check_triality, theorem1_trial};
use ssr_core::group::{make_group, FiniteGroup, Representation, CATALOG};
use ssr_core::instrument::random_covariant_instrument;
use ssr_core::linalg::{eig_hermitian, max_abs, max_abs_diff, schmidt_decompose, trace, DensityOperator, Sampler};
use ssr_core::resources::{
    asymmetry, extractable_work, local_asymmetry, shared_asymmetry, synergy, work_under_ssr, Resource,
};
use ssr_core::states::{random_rep, random_symmetric_state_sized};
use ssr_core::twirl::{ChargeOperator, Symmetry, TwirlKind, U1Action};

const TOL: f64 = 1e-9;

fn group_name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(CATALOG.to_vec())
}

fn group(name: &str) -> Arc<FiniteGroup> {
    Arc::new(make_group(name).unwrap())
}

fn mixed(s: &mut Sampler, d: usize) -> DensityOperator {
    let rank = 1 + s.below(d);
    s.mixed_state(&[d], rank)
}

fn min_eigenvalue(rho: &DensityOperator) -> f64 {
    eig_hermitian(rho.matrix()).unwrap().values[0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigendecomposition_reconstructs(n in 1usize..9, seed in any::<u64>()) {
        let h = Sampler::new(seed).hermitian(n);
        let spec = eig_hermitian(&h).unwrap();
        prop_assert!(max_abs_diff(&spec.reconstruct(), &h) < 1e-10);
        prop_assert!(spec.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn schmidt_reconstructs_and_normalizes(da in 1usize..5, db in 1usize..5, seed in any::<u64>()) {
        let psi = Sampler::new(seed).pure_state(&[da, db]);
        let sf = schmidt_decompose(&psi, &[0]).unwrap();
        let norm: f64 = sf.coefficients.iter().map(|l| l * l).sum();
        prop_assert!((norm - 1.0).abs() < 1e-10);
        prop_assert!((&sf.reconstruct() - psi.amplitudes()).camax() < 1e-10);
        let reduced = psi.density().partial_trace(&[0]).unwrap();
        prop_assert!((sf.entropy() - reduced.entropy().unwrap()).abs() < TOL);
    }

    #[test]
    fn global_twirl_is_an_idempotent_channel(name in group_name(), seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let rep = random_rep(group(name), &mut s, 5).unwrap();
        let rho = mixed(&mut s, rep.dim());
        let sym = Symmetry::Group(rep.clone());
        let once = sym.twirl(&rho, TwirlKind::Global).unwrap();
        let twice = sym.twirl(&once, TwirlKind::Global).unwrap();
        prop_assert!(max_abs_diff(once.matrix(), twice.matrix()) < 1e-10);
        prop_assert!((trace(once.matrix()).re - 1.0).abs() < 1e-10);
        prop_assert!(min_eigenvalue(&once) > -1e-10);
        for t in rep.matrices() {
            prop_assert!(max_abs(&(t * once.matrix() - once.matrix() * t)) < 1e-10);
        }
    }

    #[test]
    fn resources_are_bounded_and_dual(name in group_name(), seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let rep = random_rep(group(name), &mut s, 5).unwrap();
        let rho = mixed(&mut s, rep.dim());
        let sym = Symmetry::Group(rep);
        let log_d = (rho.dim() as f64).log2();
        let (w, wg, ag) = (
            extractable_work(&rho).unwrap(),
            work_under_ssr(&rho, &sym).unwrap(),
            asymmetry(&rho, &sym).unwrap(),
        );
        for x in [w, wg, ag] {
            prop_assert!(x > -TOL && x < log_d + TOL);
        }
        prop_assert!((w - wg - ag).abs() < TOL);
    }

    #[test]
    fn asymmetry_is_invariant_under_group_action(name in group_name(), seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let rep = random_rep(group(name), &mut s, 5).unwrap();
        let rho = mixed(&mut s, rep.dim());
        let g = s.below(rep.group().order());
        let moved = rho.conjugated(rep.matrix(g));
        let sym = Symmetry::Group(rep);
        prop_assert!((asymmetry(&rho, &sym).unwrap() - asymmetry(&moved, &sym).unwrap()).abs() < TOL);
    }

    #[test]
    fn bipartite_chain_holds(seed in any::<u64>(), da in 2usize..4, db in 2usize..4) {
        let mut s = Sampler::new(seed);
        let q = |s: &mut Sampler, d: usize| {
            let v: Vec<f64> = (0..d).map(|i| if i == 0 { 0.0 } else { s.below(3) as f64 }).collect();
            ChargeOperator::diagonal(&v).unwrap()
        };
        let sym = Symmetry::U1(U1Action::bipartite(q(&mut s, da), q(&mut s, db)));
        let rank = 1 + s.below(da * db);
        let rho = s.mixed_state(&[da, db], rank);
        let (alo, ash, ag) = (
            local_asymmetry(&rho, &sym).unwrap(),
            shared_asymmetry(&rho, &sym).unwrap(),
            asymmetry(&rho, &sym).unwrap(),
        );
        prop_assert!((alo - ash - ag).abs() < TOL);
        prop_assert!(ash > -TOL && ash <= alo + TOL);
    }

    #[test]
    fn covariant_instruments_do_not_create_asymmetry(name in group_name(), seed in any::<u64>(), k in 1usize..4) {
        let mut s = Sampler::new(seed);
        let sym = Symmetry::Group(random_rep(group(name), &mut s, 4).unwrap());
        let rho = mixed(&mut s, sym.dim());
        let inst = random_covariant_instrument(&sym, k, seed ^ 0x5eed).unwrap();
        let check = theorem1_trial(&rho, &inst, &sym).unwrap();
        prop_assert!(check.margin >= -1e-8, "{:?}", check);
    }

    #[test]
    fn work_has_no_synergy_on_products(d1 in 1usize..4, d2 in 1usize..4, seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let (r1, r2) = (mixed(&mut s, d1), mixed(&mut s, d2));
        let z2 = group("Z2");
        let s1 = Symmetry::Group(Representation::trivial(z2.clone(), d1));
        let s2 = Symmetry::Group(Representation::trivial(z2, d2));
        prop_assert!(synergy(Resource::W, &r1, &s1, &r2, &s2).unwrap().abs() < TOL);
    }

    #[test]
    fn triality_on_symmetric_states(name in group_name(), seed in any::<u64>()) {
        let st = random_symmetric_state_sized(group(name), seed, 4).unwrap();
        prop_assert!(st.eigen_residual() < 1e-8);
        prop_assert!(check_triality(&st).unwrap().margin < 1e-8);
    }
}
