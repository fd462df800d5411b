use std::f64::consts::FRAC_PI_4;

use cli_dsl::{parse, print, Severity, Statement};
use detection::Resolving;
use optics_elements::{ElementKind, ElementSpec};
use paper_circuits::{catalogue, Source, StepOp};
use proptest::prelude::*;

#[test]
fn bell_and_splitter_program() {
    let p = parse("modes 2\ninput bell 1 2\nbs 1/2 1 2\n").unwrap();
    assert_eq!(p.circuit.inputs, vec![Source::Bell(1, 2)]);
    assert_eq!(p.circuit.steps.len(), 1);
    assert_eq!(p.circuit.steps[0].op, StepOp::Element(ElementSpec::bs50(1, 2)));
}

#[test]
fn rotator_statement() {
    let p = parse("modes 3\nrot pi/4 3").unwrap();
    let StepOp::Element(e) = &p.circuit.steps[0].op else { panic!() };
    assert_eq!(e.kind, ElementKind::PolarizationRotator { theta: FRAC_PI_4 });
    assert_eq!(e.spatial, vec![3]);
}

#[test]
fn comments_and_metadata() {
    let p = parse("# fusion test\nname demo  # trailing\nmodes 4 \n\ndetect pol 1 2\naccept two_distinct 1 2").unwrap();
    assert_eq!(p.circuit.name, "demo");
    assert_eq!(p.comments.len(), 2);
    assert_eq!(p.comments[0], (1, "fusion test".to_string()));
    assert!(matches!(p.statements[0], (2, Statement::Name(_))));
    assert!(matches!(p.circuit.steps[0].op, StepOp::Detect { resolving: Resolving::PolarizationResolving, .. }));
}

#[test]
fn primed_aux_and_polarized_singles() {
    let p = parse("modes 2\nprimed 5\naux 1\ninput sp 1 5':V\npbs 1 a1").unwrap();
    assert_eq!(p.circuit.inputs, vec![Source::Sp(vec![(1, fock_core::Pol::H), (105, fock_core::Pol::V)])]);
}

#[test]
fn diagnostics_are_positioned_and_recover_per_line() {
    let src = "modes 2\nfrob 1\nbs 1/2 1\nrot pi/4 7\nbs 2 1 2\nphase foo 1";
    let ds = parse(src).unwrap_err();
    let at: Vec<(usize, usize)> = ds.iter().map(|d| (d.line, d.column)).collect();
    assert_eq!(at, vec![(2, 1), (3, 1), (4, 10), (5, 4), (6, 7)]);
    assert!(ds.iter().all(|d| d.severity == Severity::Error));
    assert!(ds[0].message.contains("unknown statement"));
    assert!(ds[1].message.contains("takes 2"));
    assert!(ds[2].message.contains("undeclared mode 7"));
}

#[test]
fn conditional_statements() {
    let p = parse("modes 3\ndetect pol 2\nwhen 2:H rot pi/2 1\nwhen 2:V accept vacuum 3").unwrap();
    assert!(p.circuit.steps[1].when.is_some());
    assert!(p.circuit.accept[0].when.is_some());
    let ds = parse("modes 3\nwhen 2:H when 2:V rot pi 1").unwrap_err();
    assert!(ds[0].message.contains("nested"));
    let ds = parse("modes 3\nwhen 2:H modes 3").unwrap_err();
    assert_eq!((ds[0].line, ds[0].column), (2, 10));
}

#[test]
fn semantic_errors_become_diagnostics() {
    let ds = parse("modes 2\ninput bell 1 2\ninput bell 2 1").unwrap_err();
    assert!(ds[0].message.contains("two sources"));
    let ds = parse("modes 2\nrestore pbs 1 2").unwrap_err();
    assert!(ds[0].message.contains("without `recycle`"));
    let ds = parse("modes 200").unwrap_err();
    assert_eq!(ds[0].column, 7);
}

#[test]
fn catalogue_round_trips() {
    for c in catalogue() {
        let text = print(&c);
        let back = parse(&text).unwrap_or_else(|d| panic!("{}: {}", c.name, d[0]));
        assert_eq!(back.circuit, c, "{}", c.name);
        assert_eq!(print(&back.circuit), text);
    }
}

#[test]
fn fuzzed_lines_never_crash() {
    assert_eq!(cli_dsl::fuzz_parser(10_000, 7), 0);
}

proptest! {
    #[test]
    fn arbitrary_text_yields_valid_positions(s in "\\PC{0,80}(\n\\PC{0,40}){0,4}") {
        if let Err(ds) = parse(&s) {
            let lines: Vec<&str> = s.lines().collect();
            for d in ds {
                prop_assert!(d.line >= 1 && d.line <= lines.len().max(1));
                prop_assert!(d.column >= 1);
            }
        }
    }

    #[test]
    fn element_angles_round_trip(th in -10.0f64..10.0, r in 0.0f64..=1.0) {
        let src = format!("modes 2\nrot {th:?} 1\nbs {r:?} 2 1\n");
        let c = parse(&src).unwrap().circuit;
        let again = parse(&print(&c)).unwrap().circuit;
        prop_assert_eq!(c, again);
    }
}
