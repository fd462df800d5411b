use std::f64::consts::FRAC_1_SQRT_2;

use detection::{DetectionPattern, PostState};
use fock_core::{cr, primed, Complex64, FockState, ModeId, OccupationVector, Pol};
use optics_elements::{apply_all, ElementSpec};
use paper_circuits::*;

const TOL: f64 = 1e-9;

fn run(name: &str) -> (CircuitSpec, Vec<Branch>) {
    let c = build(name).unwrap();
    let b = execute(&c, DEFAULT_PHOTON_CAP).unwrap();
    (c, b)
}

fn success(c: &CircuitSpec, branches: &[Branch]) -> f64 {
    branches.iter().filter(|b| is_accepted(c, b).unwrap()).map(|b| b.probability).sum()
}

fn pure(b: &Branch) -> &FockState {
    b.state.as_pure().expect("pure branch")
}

fn branch<'a>(branches: &'a [Branch], pattern: &str) -> &'a Branch {
    let want = DetectionPattern::parse(pattern).unwrap().outcomes;
    branches.iter().find(|b| b.record.outcomes == want).expect("branch present")
}

/// Amplitude map over occupations, rotated so that `anchor` has a positive real amplitude.
fn aligned<'a>(s: &'a FockState, anchor: &OccupationVector) -> impl Fn(&OccupationVector) -> Complex64 + 'a {
    let a = s.amplitude(anchor);
    let ph = a.conj() / a.norm();
    move |o| s.amplitude(o) * ph
}

fn occ(modes: &[(u32, Pol, u32)]) -> OccupationVector {
    OccupationVector::from_counts(modes.iter().map(|&(s, p, n)| (ModeId::new(s, p), n)))
}

fn hv(s: u32) -> [(Pol, ModeId); 2] {
    [(Pol::H, ModeId::h(s)), (Pol::V, ModeId::v(s))]
}

#[test]
fn j1_output_has_bunched_and_split_terms() {
    let (_, br) = run("J1");
    assert_eq!(br.len(), 1);
    let s = pure(&br[0]);
    assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    for pol in [Pol::H, Pol::V] {
        for j in [1u32, 2] {
            let sign = if j == 1 { -1.0 } else { 1.0 };
            let bunched = s.amplitude(&occ(&[(j, pol, 2)]));
            let bunched_p = s.amplitude(&occ(&[(primed(j), pol, 2)]));
            let split = s.amplitude(&occ(&[(j, pol, 1), (primed(j), pol, 1)]));
            assert!((bunched - cr(sign * 0.25)).norm() < 1e-12);
            assert!((bunched_p - cr(sign * 0.25)).norm() < 1e-12);
            assert!((split - cr(sign * 2f64.sqrt() / 4.0)).norm() < 1e-12);
        }
    }
    assert_eq!(s.len(), 12);
}

/// Two-photon output from the composed 8×8 mode matrix, without the sparse lifting.
#[test]
fn j1_matches_dense_composed_matrix() {
    let c = build_j1();
    let spatial = [1, 2, primed(1), primed(2)];
    let modes: Vec<ModeId> = spatial.iter().flat_map(|&s| [ModeId::h(s), ModeId::v(s)]).collect();
    let n = modes.len();
    let mut u = vec![vec![cr(0.0); n]; n];
    for (i, row) in u.iter_mut().enumerate() {
        row[i] = cr(1.0);
    }
    for st in &c.steps {
        let StepOp::Element(e) = &st.op else { panic!() };
        let g = e.unitary().unwrap();
        let idx: Vec<usize> = g.modes.iter().map(|m| modes.iter().position(|x| x == m).unwrap()).collect();
        let mut full = vec![vec![cr(0.0); n]; n];
        for (i, row) in full.iter_mut().enumerate() {
            row[i] = cr(1.0);
        }
        for (a, &ia) in idx.iter().enumerate() {
            for (b, &ib) in idx.iter().enumerate() {
                full[ia][ib] = g.matrix[a][b];
            }
        }
        let mut next = vec![vec![cr(0.0); n]; n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    next[i][j] += full[i][k] * u[k][j];
                }
            }
        }
        u = next;
    }
    // (a†_H1 a†_H2 + a†_V1 a†_V2)/√2 mapped through u
    let mut want = std::collections::BTreeMap::<OccupationVector, Complex64>::new();
    for (i1, i2) in [(0usize, 2usize), (1, 3)] {
        for o1 in 0..n {
            for o2 in 0..n {
                let key = OccupationVector::from_modes(&[modes[o1], modes[o2]]);
                *want.entry(key).or_default() += u[o1][i1] * u[o2][i2] * FRAC_1_SQRT_2;
            }
        }
    }
    let out = pure(&execute(&c, 10).unwrap()[0]).clone();
    for (k, a) in want {
        let a = a * k.factorial_weight().sqrt();
        assert!((out.amplitude(&k) - a).norm() < 1e-10);
    }
}

#[test]
fn j2_bell2_success_and_vacuum_branch() {
    let (c, br) = run("J2:bell2");
    assert!((success(&c, &br) - 1.0 / 16.0).abs() < TOL);
    let vac = branch(&br, "1':-,2':-,3':-,4':-");
    assert!((vac.probability - 1.0 / 16.0).abs() < TOL);
    let rec = c.recycle.as_ref().unwrap();
    let restored = apply_padded(pure(vac), &rec.restore).unwrap();
    assert!((fidelity(&restored, &target_state(&rec.target)) - 1.0).abs() < TOL);
}

#[test]
fn j2_hh_branch_equals_displayed_bunched_state() {
    let (_, br) = run("J2:bell2");
    let b = branch(&br, "1':H,2':-,3':-,4':H");
    let s = pure(b);
    let anchor = occ(&[(1, Pol::H, 2)]);
    let amp = aligned(s, &anchor);
    let k = 1.0 / (2.0 * 2f64.sqrt());
    for (j, sign) in [(1, 1.0), (2, -1.0), (3, 1.0), (4, -1.0)] {
        for pol in [Pol::H, Pol::V] {
            assert!((amp(&occ(&[(j, pol, 2)])) - cr(sign * k)).norm() < TOL, "mode {j}");
        }
    }
    assert_eq!(s.len(), 8);
}

#[test]
fn j2_success_branches_reach_hes_after_fix() {
    let (c, br) = run("J2:bell2");
    for b in br.iter().filter(|b| is_accepted(&c, b).unwrap()) {
        let p = process_branch(&c, b).unwrap();
        assert!((p.fidelity.unwrap() - 1.0).abs() < TOL, "{}", b.record);
    }
}

#[test]
fn j2_ghz4_number_only_success_and_zero_photon_branch() {
    let (c, br) = run("J2:ghz4");
    assert!((success(&c, &br) - 3.0 / 16.0).abs() < TOL);
    let vac = branch(&br, "1':0,2':0,3':0,4':0");
    let rec = c.recycle.as_ref().unwrap();
    let restored = apply_padded(pure(vac), &rec.restore).unwrap();
    assert!((fidelity(&restored, &target_state(&rec.target)) - 1.0).abs() < TOL);
}

#[test]
fn k1_intermediate_after_mqf() {
    let mut c = build_k1();
    c.steps.truncate(1);
    let br = execute(&c, 10).unwrap();
    let ok = br.iter().find(|b| !b.terminal).unwrap();
    assert!((ok.probability - 9.0 / 512.0).abs() < TOL);
    let s = pure(ok);
    let k = 2f64.sqrt() / 6.0;
    let anchor = occ(&[(1, Pol::H, 1), (3, Pol::H, 1), (5, Pol::H, 1), (7, Pol::H, 1)]);
    let amp = aligned(s, &anchor);
    for (p, _) in hv(1) {
        let o = occ(&[(1, p, 1), (3, p, 1), (5, p, 1), (7, p, 1)]);
        assert!((amp(&o) - cr(k)).norm() < TOL);
    }
    for (p, _) in hv(2) {
        for (q, _) in hv(6) {
            let o = occ(&[(2, p, 1), (4, p, 1), (6, q, 1), (8, q, 1)]);
            assert!((amp(&o) - cr(2.0 * k)).norm() < TOL);
        }
    }
    assert_eq!(s.len(), 6);
}

#[test]
fn k1_success_and_representative_branch() {
    let (c, br) = run("K1");
    assert!((success(&c, &br) - 1.0 / 256.0).abs() < TOL);
    let b = br
        .iter()
        .find(|b| {
            b.record.outcomes.get(&3).is_some_and(|o| o.to_string() == "H")
                && b.record.count(6) == 0
                && b.record.count(primed(4)) == 0
                && !b.terminal
        })
        .unwrap();
    let s = pure(b);
    let anchor = occ(&[(1, Pol::H, 1), (5, Pol::H, 1), (7, Pol::H, 1)]);
    let amp = aligned(s, &anchor);
    let terms =
        [([1, 5, 7], Pol::H, 0.5), ([1, 5, 7], Pol::V, -0.5), ([2, 4, 8], Pol::H, 0.5), ([2, 4, 8], Pol::V, -0.5)];
    for (m, p, a) in terms {
        let o = occ(&[(m[0], p, 1), (m[1], p, 1), (m[2], p, 1)]);
        assert!((amp(&o) - cr(a)).norm() < TOL);
    }
    assert_eq!(s.len(), 4);
}

#[test]
fn k1_success_branches_reach_cluster_form() {
    let (c, br) = run("K1");
    for b in br.iter().filter(|b| is_accepted(&c, b).unwrap()) {
        let p = process_branch(&c, b).unwrap();
        assert!((p.fidelity.unwrap() - 1.0).abs() < TOL);
        assert!((p.goal_fidelity.unwrap() - 1.0).abs() < TOL);
    }
}

#[test]
fn k2_output_and_star_form() {
    let (c, br) = run("K2");
    assert!((success(&c, &br) - 1.0 / 1024.0).abs() < TOL);
    let b = br.iter().find(|b| is_accepted(&c, b).unwrap()).unwrap();
    let qdc4p = target_state(&TargetSpec::new(TargetKind::QuadGhz, (1..=8).collect()).unwrap());
    assert!((fidelity(pure(b), &qdc4p) - 1.0).abs() < TOL);
    let p = process_branch(&c, b).unwrap();
    assert!((p.goal_fidelity.unwrap() - 1.0).abs() < TOL);
    let star = target_state(c.goal.as_ref().unwrap());
    assert!((fidelity_with(&qdc4p, &star, &c.finish).unwrap() - 1.0).abs() < TOL);
}

#[test]
fn k3_probabilities_per_ancilla() {
    for (name, want) in [("K3:hes2:ex2", 1.0 / 32.0), ("K3:hes2:ex3", 1.0 / 16.0)] {
        let (c, br) = run(name);
        assert!((success(&c, &br) - want).abs() < TOL, "{name}");
    }
}

#[test]
fn k3_ex1_exact_value() {
    let (c, br) = run("K3:hes2:ex1");
    assert!((success(&c, &br) - 3.0 / 128.0).abs() < TOL);
}

#[test]
fn k3_success_branches_have_dictionary_corrections() {
    for name in ["K3:hes2:ex2", "K3:hes2:ex3"] {
        let (c, br) = run(name);
        for b in br.iter().filter(|b| is_accepted(&c, b).unwrap()) {
            let p = process_branch(&c, b).unwrap();
            assert!((p.fidelity.unwrap() - 1.0).abs() < TOL);
            assert!(p.correction.unwrap().in_dictionary(), "{name} {}", b.record);
        }
    }
}

#[test]
fn t3_success_and_product_failures() {
    let (c, br) = run("T3");
    assert!((success(&c, &br) - 0.5).abs() < TOL);
    let phi = target_state(&TargetSpec::new(TargetKind::Bell, vec![1, 7]).unwrap());
    let phim = target_state(&TargetSpec::new(TargetKind::PhiMinus, vec![1, 7]).unwrap());
    for b in br.iter().filter(|b| is_accepted(&c, b).unwrap()) {
        let s = pure(b);
        let f = fidelity(s, &phi).max(fidelity(s, &phim));
        assert!((f - 1.0).abs() < TOL, "{}", b.record);
    }
    let hh: Vec<&Branch> = br
        .iter()
        .filter(|b| b.record.outcomes.values().map(|o| o.to_string()).collect::<String>().replace('-', "") == "HH")
        .collect();
    assert!(!hh.is_empty());
    let want = occ(&[(1, Pol::H, 1), (7, Pol::V, 1)]);
    for b in hh {
        let s = pure(b);
        assert_eq!(s.len(), 1);
        assert!((s.amplitude(&want).norm() - 1.0).abs() < TOL);
    }
}

#[test]
fn circuit_b_direct_and_corrected() {
    let (c0, b0) = run("B:nocorrection");
    assert!((success(&c0, &b0) - 3.0 / 16.0).abs() < TOL);
    let (c, br) = run("B");
    assert!((success(&c, &br) - 0.25).abs() < TOL);
    for b in br.iter().filter(|b| is_accepted(&c, b).unwrap()) {
        let p = process_branch(&c, b).unwrap();
        assert!((p.fidelity.unwrap() - 1.0).abs() < TOL);
    }
}

#[test]
fn circuit_b_checkpoint_amplitudes() {
    let c = build_b_checkpoint();
    let br = execute(&c, 10).unwrap();
    let b = branch(&br, "2:HH,3:-");
    let s = pure(b);
    let k = 1.0 / (2.0 * 3f64.sqrt());
    let anchor = occ(&[(1, Pol::H, 2)]);
    let amp = aligned(s, &anchor);
    let want = [((1, Pol::H), 1.0), ((1, Pol::V), -3.0), ((4, Pol::H), 1.0), ((4, Pol::V), 1.0)];
    for ((m, p), a) in want {
        assert!((amp(&occ(&[(m, p, 2)])) - cr(a * k)).norm() < TOL);
    }
    assert_eq!(s.len(), 4);
}

#[test]
fn ballistic_and_fusion_ghz() {
    for (name, want) in [
        ("GHZ3:ballistic", 1.0 / 32.0),
        ("GHZ4:ballistic", 1.0 / 128.0),
        ("GHZ3:fusion", 0.5),
        ("GHZ4:fusion", 0.5),
        ("BELL:sp4", 1.0 / 16.0),
    ] {
        let (c, br) = run(name);
        assert!((success(&c, &br) - want).abs() < TOL, "{name}");
        for b in br.iter().filter(|b| is_accepted(&c, b).unwrap()) {
            let p = process_branch(&c, b).unwrap();
            assert!((p.fidelity.unwrap() - 1.0).abs() < TOL, "{name} {}", b.record);
        }
    }
}

#[test]
fn every_builtin_is_complete() {
    for c in catalogue() {
        if c.photon_count() > 8 || c.name.starts_with("K3:qdc3x2") || c.name == "J2:sp8" {
            continue;
        }
        let br = execute(&c, DEFAULT_PHOTON_CAP).unwrap();
        let total: f64 = br.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < TOL, "{}", c.name);
    }
}

#[test]
fn photon_cap_is_enforced() {
    let c = build("J2:sp8").unwrap();
    assert!(matches!(execute(&c, 6), Err(CircuitError::Resource { photons: 8, cap: 6 })));
}

#[test]
fn unknown_options_are_configuration_errors() {
    for bad in ["K3:hes2:ex9", "K3:foo:ex1", "K3:qdc3x2:none", "Q7"] {
        assert!(matches!(build(bad), Err(CircuitError::Config(_))), "{bad}");
    }
}

#[test]
fn validation_catches_undeclared_and_dead_modes() {
    let mut c = CircuitSpec::new("x", 2, 0);
    c.input(Source::Bell(1, 2)).el(ElementSpec::bs50(1, 3));
    assert!(matches!(c.validate(), Err(CircuitError::UndeclaredMode(_))));
    let mut d = CircuitSpec::new("y", 2, 0);
    d.input(Source::Bell(1, 2));
    d.detect(detection::Resolving::NumberOnly, &[2]).el(ElementSpec::rot(0.3, 2));
    assert!(matches!(d.validate(), Err(CircuitError::Config(_))));
}

#[test]
fn fix_then_recycle_restore_round_trip() {
    let bell2 = initial_state(&[Source::Bell(1, 2), Source::Bell(3, 4)], &[1, 2, 3, 4]).unwrap();
    let fwd = apply_all(&bell2, &[ElementSpec::bs50(1, 2), ElementSpec::bs50(3, 4)]).unwrap();
    let back = apply_all(&fwd, &[ElementSpec::bs50(2, 1), ElementSpec::bs50(4, 3)]).unwrap();
    assert!((fidelity(&back, &bell2) - 1.0).abs() < 1e-12);
    assert!(matches!(PostState::Pure(back), PostState::Pure(_)));
}
