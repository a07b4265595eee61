//! Closed-form values the library must reproduce exactly.

use std::sync::Arc;

use ssr_core::group::{decompose, make_group, Representation};
use ssr_core::linalg::{c64, CVector, PureState};
use ssr_core::resources::{asymmetry, extractable_work, resource_report, shared_asymmetry, work_under_ssr};
use ssr_core::states::{make_refbit, make_spin_plus};
use ssr_core::twirl::{ChargeOperator, Symmetry, TwirlKind, U1Action};

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() < 1e-9
}

#[test]
fn spin_half_values() {
    let jz = Symmetry::U1(U1Action::single(ChargeOperator::spin_half_z()));
    let up = PureState::basis(0, vec![2]).unwrap().density();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = PureState::new(CVector::from_vec(vec![c64(h, 0.0), c64(h, 0.0)]), vec![2]).unwrap().density();
    assert!(close(extractable_work(&up).unwrap(), 1.0));
    assert!(close(work_under_ssr(&up, &jz).unwrap(), 1.0));
    assert!(close(work_under_ssr(&plus, &jz).unwrap(), 0.0));
    assert!(close(asymmetry(&plus, &jz).unwrap(), 1.0));
}

#[test]
fn spin_pair_asymmetry() {
    let (pp, sym) = make_spin_plus(2).unwrap();
    assert!(close(asymmetry(&pp, &sym).unwrap(), 1.5));
    assert!(close(work_under_ssr(&pp, &sym).unwrap(), 0.5));
    // local twirl leaves the maximally mixed state, entropy 2 against 1.5
    assert!(close(shared_asymmetry(&pp, &sym).unwrap(), 0.5));
}

#[test]
fn refbit_is_symmetric_and_one_bit_shared() {
    let rb = make_refbit();
    let rho = rb.density();
    let twirled = rb.symmetry().twirl(&rho, TwirlKind::Global).unwrap();
    assert!((twirled.matrix() - rho.matrix()).camax() < 1e-12);
    let r = resource_report(&rho, rb.symmetry(), Some(&rb)).unwrap();
    assert!(close(r.get("A_sh").unwrap(), 1.0));
    assert!(close(r.get("A_G").unwrap(), 0.0));
}

#[test]
fn regular_representation_blocks() {
    let s3 = Arc::new(make_group("S3").unwrap());
    let d = decompose(&Representation::regular(s3.clone())).unwrap();
    // each irrep appears as often as its dimension
    let m: Vec<usize> = (0..s3.irreps().len()).map(|mu| d.multiplicity(mu)).collect();
    let dims: Vec<usize> = (0..s3.irreps().len()).map(|mu| d.irrep_dim(mu)).collect();
    assert_eq!(m, dims);
    assert_eq!(d.block_count(), 4);
}
