use analysis::*;
use fock_core::{cr, FockState, ModeId, OccupationVector, Registry};
use paper_circuits::{build, target_state, TargetKind, TargetSpec};
use proptest::prelude::*;

#[test]
fn bell_has_two_equal_schmidt_coefficients() {
    let s = target_state(&TargetSpec::new(TargetKind::Bell, vec![1, 2]).unwrap());
    let c = entanglement_report(&s, &[1], &[2]).unwrap();
    assert_eq!(c.len(), 2);
    for x in c {
        assert!((x - 0.5f64.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn hes_pairs_are_maximally_entangled() {
    let s = target_state(&TargetSpec::new(TargetKind::Hes, vec![1, 2, 3, 4]).unwrap());
    let c = entanglement_report(&s, &[1, 2], &[3, 4]).unwrap();
    assert_eq!(c.len(), 4);
    assert!(c.iter().all(|x| (x - 0.5).abs() < 1e-12));
}

#[test]
fn partition_errors() {
    let s = target_state(&TargetSpec::new(TargetKind::Bell, vec![1, 2]).unwrap());
    assert!(matches!(entanglement_report(&s, &[], &[2]), Err(AnalysisError::Partition(_))));
    assert!(matches!(entanglement_report(&s, &[1, 2], &[2]), Err(AnalysisError::Partition(_))));
    assert!(matches!(entanglement_report(&s, &[1], &[3]), Err(AnalysisError::Partition(_))));
}

#[test]
fn product_state_has_rank_one() {
    let reg = Registry::from_spatial([1, 2]).unwrap();
    let s =
        FockState::from_terms(&reg, [(OccupationVector::from_modes(&[ModeId::h(1), ModeId::v(2)]), cr(1.0))]).unwrap();
    let c = entanglement_report(&s, &[1], &[2]).unwrap();
    assert!(is_product(&c));
}

#[test]
fn retry_formula() {
    assert!((retry_adjusted(1.0 / 16.0, 1.0 / 16.0).unwrap() - 1.0 / 15.0).abs() < 1e-15);
    assert!(matches!(retry_adjusted(0.0, 1.0), Err(AnalysisError::Parameter(_))));
    assert!(matches!(retry_adjusted(0.5, 0.6), Err(AnalysisError::Parameter(_))));
}

#[test]
fn rationals() {
    assert_eq!(nearest_rational(3.0 / 16.0, 4096), (3, 16));
    assert_eq!(nearest_rational(1.0 / 4096.0, 4096), (1, 4096));
    assert_eq!(nearest_rational(0.0, 4096), (0, 1));
    assert_eq!(format_rational(1.0), "1");
    assert_eq!(format_rational(3.0 / 128.0), "3/128");
}

proptest! {
    #[test]
    fn rational_round_trip(p in 0u64..200, q in 1u64..4096) {
        prop_assume!(p <= q);
        let (a, b) = nearest_rational(p as f64 / q as f64, 4096);
        prop_assert_eq!(a * q, b * p);
    }
}

#[test]
fn bell2_fusion_protocol() {
    let r = run_protocol(&build("J2:bell2").unwrap()).unwrap();
    assert!((r.success_probability - 1.0 / 16.0).abs() < 1e-12);
    assert!((r.total_probability - 1.0).abs() < 1e-12);
    assert!((r.fidelity.unwrap() - 1.0).abs() < 1e-9);
    let restoring: f64 = r.branches.iter().filter(|b| b.restores_input).map(|b| b.probability).sum();
    assert!((restoring - 1.0 / 16.0).abs() < 1e-12);
    assert!((r.retry_adjusted_probability.unwrap() - 1.0 / 15.0).abs() < 1e-12);
    assert!(!r.output_state.is_empty());
}

#[test]
fn t3_failures_are_product_states() {
    let r = run_protocol(&build("T3").unwrap()).unwrap();
    assert!((r.success_probability - 0.5).abs() < 1e-12);
    for b in r.branches.iter().filter(|b| b.class != BranchClass::Success && b.probability > 0.0) {
        assert!(b.note.contains("product"), "{}: {}", b.pattern, b.note);
    }
}

#[test]
fn fusion_protocols_reach_target() {
    for name in ["GHZ3:fusion", "BELL:sp4", "K3:hes2:ex2"] {
        let r = run_protocol(&build(name).unwrap()).unwrap();
        assert!((r.min_fidelity.unwrap() - 1.0).abs() < 1e-9, "{name}");
        assert!((r.total_probability - 1.0).abs() < 1e-9, "{name}");
    }
}

#[test]
fn k3_no_ancilla_classes() {
    let r = k3_no_ancilla_report().unwrap();
    assert!(r.consistent);
    assert!((r.success_probability - 0.5).abs() < 1e-12);
    assert!((r.same_device - 0.5).abs() < 1e-12);
    assert!((r.not_same_polarization - 0.75).abs() < 1e-12);
    assert!((r.entangled_probability - 0.75).abs() < 1e-12);
    assert!((r.bell_probability - 0.75).abs() < 1e-12);
    assert_eq!(r.classes[1].entangled_probability, 0.0);
}

#[test]
fn photon_cap_rejects_large_circuits() {
    let c = build("J2:sp8").unwrap();
    assert!(matches!(run_protocol_with_cap(&c, 4), Err(AnalysisError::Circuit(_))));
}

#[test]
fn table_rows_match_reference_values() {
    assert_eq!(TABLE1.len(), 14);
    let rows = reproduce_table1().unwrap();
    for r in &rows {
        if r.circuit != "K3:qdc3x2:ex1" {
            assert!(r.pass, "{} {} vs {}", r.circuit, r.computed, r.reference_value());
        }
    }
    let ex1 = rows.iter().find(|r| r.circuit == "K3:qdc3x2:ex1").unwrap();
    assert!((ex1.computed - 3.0 / 128.0).abs() < 1e-12);
    assert_eq!(rows[0].resource_label(), "4 SP");
}
