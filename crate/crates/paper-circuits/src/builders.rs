use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use detection::Resolving::{NumberOnly, PolarizationResolving};
use fock_core::{aux, primed as p, Pol};
use optics_elements::ElementSpec as E;

use crate::circuit::{
    Acceptance, CircuitSpec, Condition, KrausKind, Predicate, Recycle, Source, Step, StepOp, TargetKind, TargetSpec,
};
use crate::correct::fourier_network;
use crate::CircuitError;

pub const CATALOGUE: &[&str] = &[
    "J1",
    "J2:bell2",
    "J2:ghz4",
    "J2:sp8",
    "K1",
    "K1:qdc3",
    "K2",
    "K3:hes2:none",
    "K3:hes2:ex1",
    "K3:hes2:ex2",
    "K3:hes2:ex3",
    "K3:qdc3x2:ex1",
    "K3:qdc3x2:ex2",
    "K3:qdc3x2:ex3",
    "T3",
    "B",
    "B:nocorrection",
    "BELL:sp4",
    "GHZ3:ballistic",
    "GHZ4:ballistic",
    "GHZ3:fusion",
    "GHZ4:fusion",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum J2Source {
    Bell2,
    Ghz4,
    Sp8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum K3Inputs {
    Hes2,
    Qdc3x2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum K3Ancilla {
    None,
    Ex1,
    Ex2,
    Ex3,
}

fn target(kind: TargetKind, modes: &[u32]) -> TargetSpec {
    TargetSpec::new(kind, modes.to_vec()).expect("builder target arity")
}

fn rots(theta: f64, modes: &[u32]) -> Vec<E> {
    modes.iter().map(|&m| E::rot(theta, m)).collect()
}

fn sp(modes: impl IntoIterator<Item = u32>) -> Source {
    Source::Sp(modes.into_iter().map(|m| (m, Pol::H)).collect())
}

fn cond(text: &str) -> Condition {
    Condition::parse(text).expect("builder condition")
}

/// Quadbit Fourier on each listed photon, each with its own pair of aux modes.
fn fourier_on(c: &mut CircuitSpec, photons: &[(u32, u32)]) {
    for (k, &(a, b)) in photons.iter().enumerate() {
        let n = 2 * k as u32;
        c.finish.extend(fourier_network(a, b, [aux(n + 1), aux(n + 2)]));
    }
    c.declared.aux = c.declared.aux.max(2 * photons.len() as u32);
}

/// J1 on (a, b): BS(a,b), BS(a,a'), BS(b,b').
fn j1_block(a: u32, b: u32) -> Vec<E> {
    vec![E::bs50(a, b), E::bs50(a, p(a)), E::bs50(b, p(b))]
}

pub fn build_j1() -> CircuitSpec {
    let mut c = CircuitSpec::new("J1", 2, 2);
    c.input(Source::Bell(1, 2)).els(j1_block(1, 2));
    c
}

/// Circuit B on photons (a, b, c, d): outputs a, d; detectors b, c.
fn b_core(c: &mut CircuitSpec, m: [u32; 4]) {
    let [a, b, cc, d] = m;
    c.input(sp(m));
    c.els(rots(FRAC_PI_4, &m));
    c.el(E::pbs(a, b)).el(E::pbs(cc, d));
    c.els(rots(FRAC_PI_4, &[b, cc])).el(E::pbs(b, cc)).els(rots(FRAC_PI_4, &[b, cc]));
    c.detect(PolarizationResolving, &[b, cc]);
}

fn j2_core(c: &mut CircuitSpec, resolving: detection::Resolving) {
    c.els(j1_block(1, 2)).els(j1_block(3, 4));
    c.el(E::bs50(p(1), p(4))).el(E::bs50(p(2), p(3)));
    c.detect(resolving, &[p(1), p(2), p(3), p(4)]);
}

pub fn build_j2(source: J2Source) -> CircuitSpec {
    match source {
        J2Source::Bell2 => {
            let mut c = CircuitSpec::new("J2:bell2", 4, 4);
            c.input(Source::Bell(1, 2)).input(Source::Bell(3, 4));
            j2_core(&mut c, PolarizationResolving);
            c.accept(Predicate::PolPair(vec![(p(1), p(4)), (p(2), p(3))]));
            c.fix = vec![E::bs50(1, 2), E::bs50(3, 4)];
            c.target = Some(target(TargetKind::Hes, &[1, 3, 2, 4]));
            c.recycle = Some(Recycle {
                target: target(TargetKind::TwoBell, &[1, 2, 3, 4]),
                restore: vec![E::bs50(2, 1), E::bs50(4, 3)],
            });
            c
        }
        J2Source::Ghz4 => {
            let mut c = CircuitSpec::new("J2:ghz4", 4, 4);
            c.input(Source::Ghz(vec![1, 2, 3, 4]));
            j2_core(&mut c, NumberOnly);
            c.accept(Predicate::TwoDistinct(vec![p(1), p(2), p(3), p(4)]));
            c.fix = vec![E::bs50(1, 2), E::bs50(3, 4)];
            c.target = Some(target(TargetKind::Hes, &[1, 3, 2, 4]));
            let mut restore = vec![E::bs50(2, 1), E::bs50(4, 3)];
            restore.extend(rots(FRAC_PI_4, &[1, 2, 3, 4]));
            c.recycle = Some(Recycle { target: target(TargetKind::BellMix, &[1, 2, 3, 4]), restore });
            c
        }
        J2Source::Sp8 => {
            let mut c = CircuitSpec::new("J2:sp8", 12, 4);
            b_core(&mut c, [1, 9, 10, 2]);
            b_core(&mut c, [3, 11, 12, 4]);
            j2_core(&mut c, PolarizationResolving);
            c.accept(Predicate::PhiPlus(9, 10));
            c.accept(Predicate::PhiPlus(11, 12));
            c.accept(Predicate::PolPair(vec![(p(1), p(4)), (p(2), p(3))]));
            c.fix = vec![E::bs50(1, 2), E::bs50(3, 4)];
            c.target = Some(target(TargetKind::Hes, &[1, 3, 2, 4]));
            c
        }
    }
}

/// K1 fusion stage after the MQF: photons (3,4) and (5,6) merge, one photon is measured.
fn k1_tail(c: &mut CircuitSpec) {
    c.kraus(KrausKind::Mqf, 3, 5);
    c.el(E::pbs(4, 6));
    c.el(E::bs(0.75, 6, p(4)).expect("valid ratio"));
    c.els(rots(FRAC_PI_4, &[3, 6])).el(E::bs50(6, 3));
    c.detect(PolarizationResolving, &[3, 6, p(4)]);
    c.accept(Predicate::SinglePhoton(vec![3, 6]));
    c.accept(Predicate::Vacuum(vec![p(4)]));
}

pub fn build_k1() -> CircuitSpec {
    let mut c = CircuitSpec::new("K1", 8, 4);
    c.input(Source::Hes([1, 2, 3, 4])).input(Source::Hes([5, 6, 7, 8]));
    k1_tail(&mut c);
    c.target = Some(target(TargetKind::QuadGhz, &[1, 2, 5, 4, 7, 8]));
    fourier_on(&mut c, &[(1, 2), (7, 8)]);
    c.goal = Some(target(TargetKind::Qdc3, &[1, 2, 5, 4, 7, 8]));
    c
}

/// K1 with the first HES replaced by a three-quadbit cluster (third photon on 9, 10).
pub fn build_k1_qdc3() -> CircuitSpec {
    let mut c = CircuitSpec::new("K1:qdc3", 10, 4);
    c.input(Source::Qdc3([1, 2, 3, 4, 9, 10])).input(Source::Hes([5, 6, 7, 8]));
    k1_tail(&mut c);
    c.target = Some(target(TargetKind::QuadGhz, &[1, 2, 9, 10, 5, 4, 7, 8]));
    fourier_on(&mut c, &[(1, 2), (9, 10), (7, 8)]);
    c.goal = Some(target(TargetKind::Qdc4, &[1, 2, 5, 4, 9, 10, 7, 8]));
    c
}

pub fn build_k2() -> CircuitSpec {
    let mut c = CircuitSpec::new("K2", 8, 0);
    c.input(Source::Hes([1, 2, 3, 4])).input(Source::Hes([5, 6, 7, 8]));
    c.kraus(KrausKind::Mqf, 3, 5).kraus(KrausKind::Qf, 4, 6);
    c.target = Some(target(TargetKind::QuadGhz, &[1, 2, 3, 4, 5, 6, 7, 8]));
    fourier_on(&mut c, &[(1, 2), (5, 6), (7, 8)]);
    c.goal = Some(target(TargetKind::Qdc4, &[1, 2, 3, 4, 5, 6, 7, 8]));
    c
}

fn k3_ancilla(c: &mut CircuitSpec, anc: K3Ancilla) {
    let (a, b, cc, d) = (p(3), p(4), p(5), p(6));
    match anc {
        K3Ancilla::None => {}
        K3Ancilla::Ex1 => {
            c.input(sp([a, cc]));
            c.el(E::bs50(a, b)).el(E::bs50(cc, d));
            c.els(rots(FRAC_PI_4, &[a, b])).els(rots(3.0 * FRAC_PI_4, &[cc, d]));
        }
        K3Ancilla::Ex2 => {
            c.input(Source::Bell(a, cc));
            c.el(E::pbs(a, b)).el(E::pbs(cc, d));
            c.els(rots(-FRAC_PI_2, &[b, d]));
            c.els(rots(FRAC_PI_4, &[a, b])).els(rots(3.0 * FRAC_PI_4, &[cc, d]));
        }
        K3Ancilla::Ex3 => {
            c.input(Source::Hes([a, b, cc, d]));
            c.els(rots(FRAC_PI_2, &[cc, d]));
        }
    }
}

pub fn build_k3(inputs: K3Inputs, anc: K3Ancilla) -> Result<CircuitSpec, CircuitError> {
    let tag = match anc {
        K3Ancilla::None => "none",
        K3Ancilla::Ex1 => "ex1",
        K3Ancilla::Ex2 => "ex2",
        K3Ancilla::Ex3 => "ex3",
    };
    let mut c = match inputs {
        K3Inputs::Hes2 => {
            let mut c = CircuitSpec::new(&format!("K3:hes2:{tag}"), 8, 6);
            c.input(Source::Hes([1, 2, 3, 4])).input(Source::Hes([5, 6, 7, 8]));
            c
        }
        K3Inputs::Qdc3x2 => {
            if anc == K3Ancilla::None {
                return Err(CircuitError::Config("K3:qdc3x2 needs an ancilla".into()));
            }
            let mut c = CircuitSpec::new(&format!("K3:qdc3x2:{tag}"), 12, 6);
            c.input(Source::Qdc3([1, 2, 3, 4, 9, 10])).input(Source::Qdc3([5, 6, 7, 8, 11, 12]));
            c
        }
    };
    k3_ancilla(&mut c, anc);
    let up = [3, 5, p(3), p(5)];
    let lo = [4, 6, p(4), p(6)];
    c.els(rots(FRAC_PI_2, &[5, 6]));
    c.el(E::four_port(up)?).el(E::four_port(lo)?);
    let all: Vec<u32> = up.iter().chain(&lo).copied().collect();
    c.detect(PolarizationResolving, &all);
    if anc == K3Ancilla::None {
        c.accept(Predicate::HvPair(all));
        c.partition = Some((vec![1, 2], vec![7, 8]));
        return Ok(c);
    }
    c.accept(Predicate::HvPair(up.to_vec()));
    c.accept(Predicate::HvPair(lo.to_vec()));
    c.accept(Predicate::Correctable);
    match inputs {
        K3Inputs::Hes2 => c.target = Some(target(TargetKind::Hes, &[1, 2, 7, 8])),
        K3Inputs::Qdc3x2 => {
            c.target = Some(target(TargetKind::QuadGhz, &[1, 2, 9, 10, 7, 8, 11, 12]));
            fourier_on(&mut c, &[(9, 10), (7, 8), (11, 12)]);
            c.goal = Some(target(TargetKind::Qdc4, &[9, 10, 1, 2, 7, 8, 11, 12]));
        }
    }
    Ok(c)
}

pub fn build_t3() -> CircuitSpec {
    let mut c = CircuitSpec::new("T3", 7, 5);
    c.input(Source::Bell(1, 3)).input(Source::Bell(5, 7));
    c.el(E::rot(FRAC_PI_2, 5));
    c.el(E::four_port([3, 5, p(3), p(5)]).expect("distinct modes"));
    c.detect(PolarizationResolving, &[3, 5, p(3), p(5)]);
    c.accept(Predicate::HvPair(vec![3, 5, p(3), p(5)]));
    c.target = Some(target(TargetKind::Bell, &[1, 7]));
    c.partition = Some((vec![1], vec![7]));
    c
}

/// Detection patterns of circuit B that are repaired by the feed-forward correction.
pub const B_REPAIRABLE: &str = "2:HH,3:-|2:VV,3:-|2:-,3:HH|2:-,3:VV";

pub fn build_b(with_correction: bool) -> CircuitSpec {
    let name = if with_correction { "B" } else { "B:nocorrection" };
    let mut c = CircuitSpec::new(name, if with_correction { 5 } else { 4 }, u32::from(with_correction));
    b_core(&mut c, [1, 2, 3, 4]);
    c.accept(Predicate::Type2(2, 3));
    c.target = Some(target(TargetKind::Bell, &[1, 4]));
    if !with_correction {
        return c;
    }
    c.when_el(&cond("2:VV,3:-"), E::phase(PI, 1));
    c.when_el(&cond("2:-,3:HH"), E::pbs(1, 4));
    for e in rots(FRAC_PI_2, &[1, 4]) {
        c.when_el(&cond("2:-,3:VV"), e);
    }
    let all = cond(B_REPAIRABLE);
    let common = [
        E::rot(-FRAC_PI_4, 1),
        E::rot(FRAC_PI_4, 4),
        E::bs50(1, 4),
        E::pbs(1, 5),
        E::bs(2.0 / 3.0, 5, p(1)).expect("valid ratio"),
        E::pbs(1, 5),
        E::pbs(4, 5),
        E::phase(FRAC_PI_2, 5),
        E::pbs(4, 5),
        E::phase(FRAC_PI_2, 1),
        E::bs50(4, 1),
    ];
    for e in common {
        c.when_el(&all, e);
    }
    c.steps.push(Step {
        when: Some(all.clone()),
        op: StepOp::Detect { resolving: PolarizationResolving, modes: vec![5, p(1)] },
    });
    c.accept.push(Acceptance { when: Some(all), predicate: Predicate::Vacuum(vec![5, p(1)]) });
    c
}

/// Steps of circuit B up to the first detection; the checkpoint for the correction path.
pub fn build_b_checkpoint() -> CircuitSpec {
    let mut c = CircuitSpec::new("B:checkpoint", 4, 0);
    b_core(&mut c, [1, 2, 3, 4]);
    c.els([E::rot(-FRAC_PI_4, 1), E::rot(FRAC_PI_4, 4), E::bs50(1, 4)]);
    c
}

pub fn build_bell_sp4() -> CircuitSpec {
    let mut c = CircuitSpec::new("BELL:sp4", 4, 0);
    b_core(&mut c, [1, 2, 3, 4]);
    c.accept(Predicate::PhiPlus(2, 3));
    c.target = Some(target(TargetKind::Bell, &[1, 4]));
    c
}

/// Ballistic GHZ from single photons: pairs (1,2),(3,4),… fused along detectors 2,3,5,7,….
pub fn build_ghz_ballistic(n: usize) -> Result<CircuitSpec, CircuitError> {
    let (det, out): (Vec<u32>, Vec<u32>) = match n {
        3 => (vec![2, 3, 5], vec![1, 4, 6]),
        4 => (vec![2, 3, 5, 7], vec![1, 4, 6, 8]),
        _ => return Err(CircuitError::Config(format!("no ballistic GHZ circuit for {n} photons"))),
    };
    let photons = 2 * n as u32;
    let mut c = CircuitSpec::new(&format!("GHZ{n}:ballistic"), photons, 0);
    let all: Vec<u32> = (1..=photons).collect();
    c.input(sp(all.iter().copied()));
    c.els(rots(FRAC_PI_4, &all));
    for k in 0..n as u32 {
        c.el(E::pbs(2 * k + 1, 2 * k + 2));
    }
    c.els(rots(FRAC_PI_4, &det));
    for w in det.windows(2) {
        c.el(E::pbs(w[0], w[1]));
    }
    c.els(rots(FRAC_PI_4, &det));
    c.detect(PolarizationResolving, &det);
    c.accept(Predicate::OneEach(det));
    c.target = Some(target(TargetKind::Ghz, &out));
    Ok(c)
}

/// Type-I fusion of a Bell pair (1,2) with a Bell pair (3,4) or a GHZ3 (3,4,5).
pub fn build_ghz_fusion(n: usize) -> Result<CircuitSpec, CircuitError> {
    let mut c = CircuitSpec::new(&format!("GHZ{n}:fusion"), n as u32 + 1, 0);
    c.input(Source::Bell(1, 2));
    let out = match n {
        3 => {
            c.input(Source::Bell(3, 4));
            vec![1, 2, 4]
        }
        4 => {
            c.input(Source::Ghz(vec![3, 4, 5]));
            vec![1, 2, 4, 5]
        }
        _ => return Err(CircuitError::Config(format!("no fusion GHZ circuit for {n} photons"))),
    };
    c.el(E::pbs(2, 3)).el(E::rot(FRAC_PI_4, 3));
    c.detect(PolarizationResolving, &[3]);
    c.accept(Predicate::SinglePhoton(vec![3]));
    c.target = Some(target(TargetKind::Ghz, &out));
    Ok(c)
}

pub fn build(name: &str) -> Result<CircuitSpec, CircuitError> {
    let k3 = |i, a| build_k3(i, a);
    Ok(match name {
        "J1" => build_j1(),
        "J2:bell2" => build_j2(J2Source::Bell2),
        "J2:ghz4" => build_j2(J2Source::Ghz4),
        "J2:sp8" => build_j2(J2Source::Sp8),
        "K1" => build_k1(),
        "K1:qdc3" => build_k1_qdc3(),
        "K2" => build_k2(),
        "T3" => build_t3(),
        "B" => build_b(true),
        "B:nocorrection" => build_b(false),
        "BELL:sp4" => build_bell_sp4(),
        "GHZ3:ballistic" => build_ghz_ballistic(3)?,
        "GHZ4:ballistic" => build_ghz_ballistic(4)?,
        "GHZ3:fusion" => build_ghz_fusion(3)?,
        "GHZ4:fusion" => build_ghz_fusion(4)?,
        _ => {
            let parts: Vec<&str> = name.split(':').collect();
            let inputs = match parts.as_slice() {
                ["K3", i, _] => match *i {
                    "hes2" => K3Inputs::Hes2,
                    "qdc3x2" => K3Inputs::Qdc3x2,
                    _ => return Err(CircuitError::Config(format!("unknown K3 input option {i:?}"))),
                },
                _ => return Err(CircuitError::Config(format!("unknown circuit {name:?}"))),
            };
            let anc = match parts[2] {
                "none" => K3Ancilla::None,
                "ex1" => K3Ancilla::Ex1,
                "ex2" => K3Ancilla::Ex2,
                "ex3" => K3Ancilla::Ex3,
                a => return Err(CircuitError::Config(format!("unknown K3 ancilla option {a:?}"))),
            };
            k3(inputs, anc)?
        }
    })
}

/// Every builtin circuit, in catalogue order.
pub fn catalogue() -> Vec<CircuitSpec> {
    CATALOGUE.iter().map(|n| build(n).expect("catalogue entry builds")).collect()
}
