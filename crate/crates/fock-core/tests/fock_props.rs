use fock_core::{c, cr, primed, Complex64, FockError, FockState, ModeId, OccupationVector, Registry};
use proptest::prelude::*;

fn reg4() -> Registry {
    Registry::from_spatial([1, 2, 3, 4]).unwrap()
}

fn ket(reg: &Registry, modes: &[ModeId]) -> FockState {
    let mut s = FockState::vacuum(reg).unwrap();
    for &m in modes {
        s = s.create(m).unwrap();
    }
    s.normalize().unwrap()
}

#[test]
fn vacuum_is_single_unit_term() {
    let s = FockState::vacuum(&reg4()).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(s.amplitude(&OccupationVector::vacuum()), cr(1.0));
    assert!((s.norm() - 1.0).abs() < 1e-15);
}

#[test]
fn empty_registry_rejected() {
    let empty = Registry::new([]).unwrap();
    assert_eq!(FockState::vacuum(&empty).unwrap_err(), FockError::EmptyRegistry);
}

#[test]
fn duplicate_mode_rejected() {
    assert!(matches!(Registry::new([ModeId::h(1), ModeId::h(1)]), Err(FockError::DuplicateMode(_))));
}

#[test]
fn double_creation_gives_sqrt_two() {
    let s = FockState::vacuum(&reg4()).unwrap();
    let one = s.create(ModeId::h(1)).unwrap();
    assert_eq!(one.amplitude(&OccupationVector::from_modes(&[ModeId::h(1)])), cr(1.0));
    let two = one.create(ModeId::h(1)).unwrap();
    let occ = OccupationVector::from_counts([(ModeId::h(1), 2)]);
    assert!((two.amplitude(&occ).re - 2f64.sqrt()).abs() < 1e-15);
}

#[test]
fn unknown_mode_is_an_error() {
    let s = FockState::vacuum(&reg4()).unwrap();
    assert!(matches!(s.create(ModeId::h(9)), Err(FockError::UnknownMode(_))));
}

#[test]
fn orthogonal_polarizations() {
    let r = reg4();
    let h = ket(&r, &[ModeId::h(1)]);
    let v = ket(&r, &[ModeId::v(1)]);
    assert_eq!(h.inner_product(&v).unwrap(), cr(0.0));
    let plus = FockState::superpose(&[(cr(1.0), &h), (cr(1.0), &v)]).unwrap();
    let plus = plus.scale(cr(std::f64::consts::FRAC_1_SQRT_2));
    assert!((plus.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn hyper_entangled_state_is_normalized() {
    let r = reg4();
    let terms = [
        [ModeId::h(1), ModeId::h(3)],
        [ModeId::v(1), ModeId::v(3)],
        [ModeId::h(2), ModeId::h(4)],
        [ModeId::v(2), ModeId::v(4)],
    ];
    let hes = FockState::from_terms(&r, terms.iter().map(|t| (OccupationVector::from_modes(t), cr(0.5)))).unwrap();
    let ip = hes.inner_product(&hes).unwrap();
    assert!((ip - cr(1.0)).norm() < 1e-12);
}

#[test]
fn registry_mismatch_rejected() {
    let a = FockState::vacuum(&reg4()).unwrap();
    let b = FockState::vacuum(&Registry::from_spatial([1, 2]).unwrap()).unwrap();
    assert_eq!(a.inner_product(&b).unwrap_err(), FockError::RegistryMismatch);
    assert_eq!(a.add(&b).unwrap_err(), FockError::RegistryMismatch);
}

#[test]
fn normalize_zero_state_fails() {
    let z = FockState::zero(&reg4());
    assert!(matches!(z.normalize(), Err(FockError::Degenerate(_))));
}

#[test]
fn primed_labels_round_trip() {
    for s in [1, 7, primed(3), fock_core::aux(2)] {
        let l = fock_core::spatial_label(s);
        assert_eq!(fock_core::parse_spatial_label(&l), Some(s));
    }
    assert_eq!(fock_core::spatial_label(primed(4)), "4'");
}

const MODES: [ModeId; 4] = [ModeId::h(1), ModeId::v(1), ModeId::h(2), ModeId::v(2)];

/// Random state with up to two photons on the four modes above.
fn small_state() -> impl Strategy<Value = FockState> {
    let occs: Vec<Vec<ModeId>> = {
        let mut v = vec![vec![]];
        for i in 0..4 {
            v.push(vec![MODES[i]]);
            for j in i..4 {
                v.push(vec![MODES[i], MODES[j]]);
            }
        }
        v
    };
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), occs.len()).prop_map(move |amps| {
        let r = Registry::new(MODES).unwrap();
        FockState::from_terms(
            &r,
            occs.iter().zip(amps).map(|(o, (re, im))| (OccupationVector::from_modes(o), c(re, im))),
        )
        .unwrap()
    })
}

proptest! {
    #[test]
    fn inner_product_is_sesquilinear(a in small_state(), b in small_state(), d in small_state(),
                                     re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let k = c(re, im);
        let ab = a.scale(k).add(&b).unwrap();
        let lhs = ab.inner_product(&d).unwrap();
        let rhs = k.conj() * a.inner_product(&d).unwrap() + b.inner_product(&d).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-9);
        let lhs2 = d.inner_product(&ab).unwrap();
        let rhs2 = k * d.inner_product(&a).unwrap() + d.inner_product(&b).unwrap();
        prop_assert!((lhs2 - rhs2).norm() < 1e-9);
    }

    #[test]
    fn norm_matches_self_inner_product(a in small_state()) {
        let ip: Complex64 = a.inner_product(&a).unwrap();
        prop_assert!((ip.re - a.norm_sqr()).abs() < 1e-9);
        prop_assert!(ip.im.abs() < 1e-12);
    }

    #[test]
    fn create_annihilate_adjoint(a in small_state(), b in small_state(), idx in 0usize..4) {
        let m = MODES[idx];
        let lhs = a.inner_product(&b.create(m).unwrap()).unwrap();
        let rhs = a.annihilate(m).unwrap().inner_product(&b).unwrap();
        prop_assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn prune_at_zero_is_identity(a in small_state()) {
        let p = a.prune(0.0, false).unwrap();
        prop_assert_eq!(p.len(), a.len());
        for (occ, amp) in a.terms() {
            prop_assert_eq!(p.amplitude(occ), *amp);
        }
    }

    #[test]
    fn normalize_gives_unit_norm(a in small_state()) {
        prop_assume!(a.norm() > 1e-6);
        prop_assert!((a.normalize().unwrap().norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn tensor_of_disjoint_states() {
    let a = ket(&Registry::from_spatial([1]).unwrap(), &[ModeId::h(1)]);
    let b = ket(&Registry::from_spatial([2]).unwrap(), &[ModeId::v(2), ModeId::v(2)]);
    let t = a.tensor(&b).unwrap();
    assert_eq!(t.registry().len(), 4);
    let occ = OccupationVector::from_counts([(ModeId::h(1), 1), (ModeId::v(2), 2)]);
    assert!((t.amplitude(&occ) - cr(1.0)).norm() < 1e-15);
    assert!(matches!(a.tensor(&a), Err(FockError::DuplicateMode(_))));
}
