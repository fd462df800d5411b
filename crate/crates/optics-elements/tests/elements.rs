use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use fock_core::{cr, Complex64, FockState, ModeId, OccupationVector, Registry};
use optics_elements::*;
use proptest::prelude::*;

fn ket(reg: &Registry, modes: &[ModeId]) -> FockState {
    let mut s = FockState::vacuum(reg).unwrap();
    for &m in modes {
        s = s.create(m).unwrap();
    }
    s.normalize().unwrap()
}

fn prob(s: &FockState, modes: &[ModeId]) -> f64 {
    s.amplitude(&OccupationVector::from_modes(modes)).norm_sqr()
}

#[test]
fn hong_ou_mandel_on_balanced_splitter() {
    let reg = Registry::from_spatial([1, 2]).unwrap();
    let s = ket(&reg, &[ModeId::h(1), ModeId::h(2)]);
    let out = apply(&s, &ElementSpec::bs50(1, 2)).unwrap();
    assert!(prob(&out, &[ModeId::h(1), ModeId::h(2)]) < 1e-24);
    assert!((prob(&out, &[ModeId::h(1), ModeId::h(1)]) - 0.5).abs() < 1e-12);
    assert!((prob(&out, &[ModeId::h(2), ModeId::h(2)]) - 0.5).abs() < 1e-12);
}

#[test]
fn distinguishable_polarizations_do_not_bunch() {
    let reg = Registry::from_spatial([1, 2]).unwrap();
    let s = ket(&reg, &[ModeId::h(1), ModeId::v(2)]);
    let out = apply(&s, &ElementSpec::bs50(1, 2)).unwrap();
    assert!((prob(&out, &[ModeId::h(1), ModeId::v(2)]) - 0.25).abs() < 1e-12);
    assert!((prob(&out, &[ModeId::h(2), ModeId::v(1)]) - 0.25).abs() < 1e-12);
}

#[test]
fn polarization_hom_through_rotator() {
    let reg = Registry::from_spatial([1]).unwrap();
    let s = ket(&reg, &[ModeId::h(1), ModeId::v(1)]);
    let out = apply(&s, &ElementSpec::rot(FRAC_PI_4, 1)).unwrap();
    assert!(prob(&out, &[ModeId::h(1), ModeId::v(1)]) < 1e-24);
    assert!((prob(&out, &[ModeId::h(1), ModeId::h(1)]) - 0.5).abs() < 1e-12);
}

#[test]
fn splitter_sign_convention() {
    let reg = Registry::from_spatial([1, 2]).unwrap();
    let out = apply(&ket(&reg, &[ModeId::h(2)]), &ElementSpec::bs50(1, 2)).unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    assert!((out.amplitude(&OccupationVector::from_modes(&[ModeId::h(1)])) - cr(-r)).norm() < 1e-15);
    assert!((out.amplitude(&OccupationVector::from_modes(&[ModeId::h(2)])) - cr(r)).norm() < 1e-15);
}

#[test]
fn rotator_and_pbs_conventions() {
    let reg = Registry::from_spatial([1, 2]).unwrap();
    let v = apply(&ket(&reg, &[ModeId::v(1)]), &ElementSpec::rot(FRAC_PI_2, 1)).unwrap();
    assert!((v.amplitude(&OccupationVector::from_modes(&[ModeId::h(1)])) - cr(-1.0)).norm() < 1e-15);
    let p = apply(&ket(&reg, &[ModeId::v(1), ModeId::h(1)]), &ElementSpec::pbs(1, 2)).unwrap();
    assert!((prob(&p, &[ModeId::h(1), ModeId::v(2)]) - 1.0).abs() < 1e-12);
}

#[test]
fn reversed_splitter_is_inverse() {
    let reg = Registry::from_spatial([1, 2]).unwrap();
    let s = ket(&reg, &[ModeId::h(1), ModeId::v(1), ModeId::h(2)]);
    let e = ElementSpec::bs(0.3, 1, 2).unwrap();
    let back = apply(&apply(&s, &e).unwrap(), &e.inverse()).unwrap();
    assert!((back.inner_product(&s).unwrap() - cr(1.0)).norm() < 1e-12);
}

#[test]
fn double_balanced_splitter_swaps_with_sign() {
    let reg = Registry::from_spatial([1, 2]).unwrap();
    let s = ket(&reg, &[ModeId::h(1)]);
    let e = ElementSpec::bs50(1, 2);
    let out = apply_all(&s, &[e.clone(), e]).unwrap();
    assert!((out.amplitude(&OccupationVector::from_modes(&[ModeId::h(2)])) - cr(1.0)).norm() < 1e-12);
}

#[test]
fn four_port_single_photon_rows() {
    let reg = Registry::from_spatial([3, 5, 103, 105]).unwrap();
    let fp = ElementSpec::four_port([3, 5, 103, 105]).unwrap();
    let out = apply(&ket(&reg, &[ModeId::h(5)]), &fp).unwrap();
    let expect = [-0.5, 0.5, -0.5, 0.5];
    for (s, e) in [3, 5, 103, 105].into_iter().zip(expect) {
        let a = out.amplitude(&OccupationVector::from_modes(&[ModeId::h(s)]));
        assert!((a - cr(e)).norm() < 1e-15);
    }
    assert!(fp.unitary().unwrap().unitarity_defect() < 1e-15);
}

#[test]
fn invalid_parameters_rejected() {
    assert!(matches!(ElementSpec::bs(1.5, 1, 2), Err(OpticsError::ReflectivityOutOfRange(_))));
    assert!(matches!(ElementSpec::bs(-0.1, 1, 2), Err(OpticsError::ReflectivityOutOfRange(_))));
    assert!(matches!(ElementSpec::bs(0.5, 1, 1), Err(OpticsError::RepeatedMode(_))));
    assert!(matches!(ElementSpec::new(ElementKind::Pbs, vec![1]), Err(OpticsError::Arity { .. })));
}

#[test]
fn element_outside_registry_rejected() {
    let reg = Registry::from_spatial([1]).unwrap();
    let s = ket(&reg, &[ModeId::h(1)]);
    assert!(matches!(apply(&s, &ElementSpec::bs50(1, 2)), Err(OpticsError::Fock(_))));
}

#[test]
fn number_formats_round_trip() {
    for x in [FRAC_PI_4, -FRAC_PI_2, 3.0 * PI / 4.0, PI, 0.0, 0.1234, -2.5] {
        assert_eq!(parse_angle(&format_angle(x)), Some(x));
    }
    assert_eq!(format_angle(FRAC_PI_4), "pi/4");
    assert_eq!(format_angle(-FRAC_PI_2), "-pi/2");
    for x in [0.5, 2.0 / 3.0, 0.75, 0.0, 1.0, 0.3] {
        assert_eq!(parse_ratio(&format_ratio(x)), Some(x));
    }
    assert_eq!(format_ratio(2.0 / 3.0), "2/3");
}

// ---- dense oracle: permanent formula on the full Fock basis ----

fn permanent(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    if n == 0 {
        return cr(1.0);
    }
    // Ryser
    let mut total = cr(0.0);
    for mask in 1u32..(1 << n) {
        let mut prod = cr(1.0);
        for row in m {
            let mut s = cr(0.0);
            for (j, x) in row.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    s += x;
                }
            }
            prod *= s;
        }
        let sign = if (n as u32 - mask.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
        total += prod * sign;
    }
    total
}

fn fact(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn basis(modes: &[ModeId], n: u32) -> Vec<Vec<u32>> {
    fn rec(k: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k + 1 == cur.len() {
            cur[k] = left;
            out.push(cur.clone());
            return;
        }
        for x in 0..=left {
            cur[k] = x;
            rec(k + 1, left - x, cur, out);
        }
    }
    let mut out = vec![];
    rec(0, n, &mut vec![0; modes.len()], &mut out);
    out
}

/// ⟨out|Û|in⟩ = Perm(U[out rows, in cols]) / √(Π out! Π in!)
fn dense_apply(state: &FockState, u: &ModeUnitary, all: &[ModeId]) -> Vec<(Vec<u32>, Complex64)> {
    let n = state.photon_number().unwrap();
    let full = ModeUnitary::identity(all.to_vec());
    let mut big = full.matrix.clone();
    for (i, &mi) in u.modes.iter().enumerate() {
        let bi = all.iter().position(|&x| x == mi).unwrap();
        for (j, &mj) in u.modes.iter().enumerate() {
            let bj = all.iter().position(|&x| x == mj).unwrap();
            big[bi][bj] = u.matrix[i][j];
        }
        for (bj, _) in all.iter().enumerate() {
            if !u.modes.contains(&all[bj]) {
                big[bi][bj] = cr(0.0);
                big[bj][bi] = cr(0.0);
            }
        }
    }
    let rows_of = |occ: &Vec<u32>| -> Vec<usize> {
        occ.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat(i).take(c as usize)).collect()
    };
    let mut out = vec![];
    for o in basis(all, n) {
        let mut acc = cr(0.0);
        for (occ, amp) in state.terms() {
            let inv: Vec<u32> = all.iter().map(|&m| occ.count(m)).collect();
            let r = rows_of(&o);
            let c = rows_of(&inv);
            let sub: Vec<Vec<Complex64>> = r.iter().map(|&i| c.iter().map(|&j| big[i][j]).collect()).collect();
            let norm: f64 = o.iter().chain(inv.iter()).map(|&k| fact(k)).product();
            acc += amp * permanent(&sub) / norm.sqrt();
        }
        out.push((o, acc));
    }
    out
}

fn element_strategy(spatial: Vec<u32>) -> impl Strategy<Value = ElementSpec> {
    let n = spatial.len();
    let kinds = if n >= 4 { 5 } else { 4 };
    (0usize..kinds, 0.0f64..1.0, -PI..PI, prop::sample::subsequence((0..n).collect::<Vec<_>>(), n)).prop_map(
        move |(k, r, th, perm)| {
            let m: Vec<u32> = perm.iter().map(|&i| spatial[i]).collect();
            match k {
                0 => ElementSpec::bs(r, m[0], m[1]).unwrap(),
                1 => ElementSpec::rot(th, m[0]),
                2 => ElementSpec::pbs(m[0], m[1]),
                3 => ElementSpec::phase(th, m[0]),
                _ => ElementSpec::four_port([m[0], m[1], m[2], m[3]]).unwrap(),
            }
        },
    )
}

fn random_state(all: Vec<ModeId>, n: u32) -> impl Strategy<Value = FockState> {
    let b = basis(&all, n);
    let len = b.len();
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), len).prop_map(move |amps| {
        let reg = Registry::new(all.clone()).unwrap();
        let terms = b.iter().zip(amps).map(|(occ, (re, im))| {
            (OccupationVector::from_counts(all.iter().copied().zip(occ.iter().copied())), Complex64::new(re, im))
        });
        FockState::from_terms(&reg, terms).unwrap().normalize().unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lift_matches_dense_oracle(
        seed_state in random_state(Registry::from_spatial([1, 2, 3, 4]).unwrap().modes().to_vec(), 2),
        e in element_strategy(vec![1, 2, 3, 4]),
    ) {
        let all = seed_state.registry().modes().to_vec();
        let out = apply(&seed_state, &e).unwrap();
        let dense = dense_apply(&seed_state, &e.unitary().unwrap(), &all);
        for (occ, amp) in dense {
            let ov = OccupationVector::from_counts(all.iter().copied().zip(occ));
            prop_assert!((out.amplitude(&ov) - amp).norm() < 1e-10);
        }
    }

    #[test]
    fn three_photon_lift_matches_dense_oracle(
        st in random_state(Registry::from_spatial([1, 2, 3]).unwrap().modes().to_vec(), 3),
        e in element_strategy(vec![1, 2, 3]),
    ) {
        let all = st.registry().modes().to_vec();
        let out = apply(&st, &e).unwrap();
        let dense = dense_apply(&st, &e.unitary().unwrap(), &all);
        for (occ, amp) in dense {
            let ov = OccupationVector::from_counts(all.iter().copied().zip(occ));
            prop_assert!((out.amplitude(&ov) - amp).norm() < 1e-10);
        }
    }

    #[test]
    fn element_unitaries_are_unitary(r in 0.0f64..=1.0, th in -10.0f64..10.0) {
        prop_assert!(bs_unitary(r).unwrap().unitarity_defect() < 1e-12);
        prop_assert!(rotator_unitary(th).unitarity_defect() < 1e-12);
        prop_assert!(phase_unitary(th).unitarity_defect() < 1e-12);
        prop_assert!(pbs_unitary().unitarity_defect() < 1e-15);
        prop_assert!(four_port_unitary().unitarity_defect() < 1e-15);
    }

    #[test]
    fn photon_number_and_norm_preserved(
        st in random_state(Registry::from_spatial([1, 2, 3]).unwrap().modes().to_vec(), 2),
        e in element_strategy(vec![1, 2, 3]),
    ) {
        let out = apply(&st, &e).unwrap();
        prop_assert_eq!(out.photon_number(), Some(2));
        prop_assert!((out.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn sequential_application_matches_composed_unitary(
        st in random_state(Registry::from_spatial([1, 2]).unwrap().modes().to_vec(), 2),
        r1 in 0.0f64..1.0, th in -PI..PI,
    ) {
        let a = ElementSpec::bs(r1, 1, 2).unwrap();
        let b = ElementSpec::rot(th, 2);
        let ua = a.unitary().unwrap();
        let mut ub = ModeUnitary::identity(ua.modes.clone());
        let rb = b.unitary().unwrap();
        for i in 0..2 {
            for j in 0..2 {
                ub.matrix[2 + i][2 + j] = rb.matrix[i][j];
            }
        }
        let seq = apply_all(&st, &[a, b]).unwrap();
        let comp = apply_unitary(&st, &ua.then(&ub)).unwrap();
        prop_assert!((seq.inner_product(&comp).unwrap() - cr(1.0)).norm() < 1e-10);
    }
}
