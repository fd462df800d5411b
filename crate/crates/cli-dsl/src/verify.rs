use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;
use std::time::Instant;

use analysis::{entanglement_report, is_product, k3_no_ancilla_report, reproduce_table1};
use detection::{apply_kraus, mqf_operator, qf_operator, DetectionPattern};
use fock_core::{cr, primed, Complex64, FockState, ModeId, OccupationVector, Pol, Registry};
use optics_elements::{
    apply, bs_unitary, four_port_unitary, pbs_unitary, phase_unitary, rotator_unitary, ElementSpec, ModeUnitary,
};
use paper_circuits::{
    apply_padded, build, build_b_checkpoint, catalogue, execute, fidelity, initial_state, is_accepted, process_branch,
    target_state, Branch, CircuitSpec, Source, TargetKind, TargetSpec,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::dsl::{parse, print};

pub const TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    pub details: Vec<String>,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {}: {} ({:.1}s)",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.title,
            self.seconds
        )?;
        if !self.details.is_empty() {
            write!(f, " {}", self.details.join("; "))?;
        }
        Ok(())
    }
}

/// Collects named checks; a criterion passes when all of them do.
struct Checks {
    ok: bool,
    details: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks { ok: true, details: vec![] }
    }

    fn check(&mut self, name: &str, pass: bool, info: String) {
        self.ok &= pass;
        if !pass {
            self.details.push(format!("{name} failed ({info})"));
        }
    }

    fn close(&mut self, name: &str, got: f64, want: f64) {
        self.check(name, (got - want).abs() <= TOL, format!("got {got:.12}, want {want:.12}"));
    }

    fn note(&mut self, s: String) {
        self.details.push(s);
    }

    fn fail(&mut self, name: &str, e: impl fmt::Display) {
        self.ok = false;
        self.details.push(format!("{name}: {e}"));
    }
}

fn run(name: &str) -> Result<(CircuitSpec, Vec<Branch>), String> {
    let c = build(name).map_err(|e| e.to_string())?;
    let b = execute(&c, analysis::photon_cap()).map_err(|e| e.to_string())?;
    Ok((c, b))
}

fn success(c: &CircuitSpec, br: &[Branch]) -> f64 {
    br.iter().filter(|b| is_accepted(c, b).unwrap_or(false)).map(|b| b.probability).sum()
}

/// Minimum over success branches of the corrected target fidelity and, when present, the goal fidelity.
fn min_success_fidelity(c: &CircuitSpec, br: &[Branch]) -> Result<f64, String> {
    let mut f = f64::INFINITY;
    for b in br.iter().filter(|b| is_accepted(c, b).unwrap_or(false)) {
        let p = process_branch(c, b).map_err(|e| e.to_string())?;
        f = f.min(p.fidelity.unwrap_or(0.0));
        if let Some(g) = p.goal_fidelity {
            f = f.min(g);
        }
    }
    Ok(f)
}

fn occ(modes: &[(u32, Pol, u32)]) -> OccupationVector {
    OccupationVector::from_counts(modes.iter().map(|&(s, p, n)| (ModeId::new(s, p), n)))
}

fn ket(reg: &Registry, modes: &[ModeId]) -> FockState {
    let mut s = FockState::vacuum(reg).expect("registry");
    for &m in modes {
        s = s.create(m).expect("mode in registry");
    }
    s.normalize().expect("nonzero")
}

fn branch<'a>(br: &'a [Branch], pattern: &str) -> Option<&'a Branch> {
    let want = DetectionPattern::parse(pattern).ok()?.outcomes;
    br.iter().find(|b| b.record.outcomes == want)
}

/// Amplitudes up to a global phase fixed by `anchor`.
fn aligned<'a>(s: &'a FockState, anchor: &OccupationVector) -> impl Fn(&OccupationVector) -> Complex64 + 'a {
    let a = s.amplitude(anchor);
    let ph = if a.norm() > 0.0 { a.conj() / a.norm() } else { cr(0.0) };
    move |o| s.amplitude(o) * ph
}

fn c1_elements() -> Checks {
    let mut k = Checks::new();
    let reg = Registry::from_spatial([1, 2]).expect("registry");
    match apply(&ket(&reg, &[ModeId::h(1), ModeId::h(2)]), &ElementSpec::bs50(1, 2)) {
        Ok(out) => {
            let anti = out.amplitude(&OccupationVector::from_modes(&[ModeId::h(1), ModeId::h(2)])).norm();
            k.check("HOM on balanced splitter", anti < 1e-12, format!("{anti:e}"));
        }
        Err(e) => k.fail("HOM on balanced splitter", e),
    }
    let reg1 = Registry::from_spatial([1]).expect("registry");
    match apply(&ket(&reg1, &[ModeId::h(1), ModeId::v(1)]), &ElementSpec::rot(FRAC_PI_4, 1)) {
        Ok(out) => {
            let anti = out.amplitude(&OccupationVector::from_modes(&[ModeId::h(1), ModeId::v(1)])).norm();
            k.check("HOM on pi/4 rotator", anti < 1e-12, format!("{anti:e}"));
        }
        Err(e) => k.fail("HOM on pi/4 rotator", e),
    }
    let mut worst: f64 = 0.0;
    for i in 0..=20 {
        let x = i as f64 / 20.0;
        let th = -2.0 * PI + 4.0 * PI * x;
        worst = worst
            .max(bs_unitary(x).map(|u| u.unitarity_defect()).unwrap_or(f64::INFINITY))
            .max(rotator_unitary(th).unitarity_defect())
            .max(phase_unitary(th).unitarity_defect());
    }
    worst = worst.max(pbs_unitary().unitarity_defect()).max(four_port_unitary().unitarity_defect());
    k.check("unitarity", worst < 1e-12, format!("defect {worst:e}"));
    k
}

fn c2_t3() -> Result<Checks, String> {
    let mut k = Checks::new();
    let (c, br) = run("T3")?;
    k.close("success probability", success(&c, &br), 0.5);
    let phi = target_state(&TargetSpec::new(TargetKind::Bell, vec![1, 7]).map_err(|e| e.to_string())?);
    let phim = target_state(&TargetSpec::new(TargetKind::PhiMinus, vec![1, 7]).map_err(|e| e.to_string())?);
    let (a, b) = c.partition.clone().ok_or("T3 has no partition")?;
    for x in &br {
        let Some(s) = x.state.as_pure() else {
            k.fail(&x.record.to_string(), "mixed state");
            continue;
        };
        if is_accepted(&c, x).map_err(|e| e.to_string())? {
            let f = fidelity(s, &phi).max(fidelity(s, &phim));
            k.close(&format!("success branch {}", x.record), f, 1.0);
        } else {
            let sc = entanglement_report(s, &a, &b).map_err(|e| e.to_string())?;
            k.check(&format!("failure branch {}", x.record), is_product(&sc), format!("Schmidt {sc:?}"));
        }
    }
    Ok(k)
}

fn c3_filters() -> Result<Checks, String> {
    let mut k = Checks::new();
    let s = initial_state(&[Source::Bell(1, 2), Source::Bell(3, 4)], &[1, 2, 3, 4]).map_err(|e| e.to_string())?;
    let b = apply_kraus(&s, &qf_operator(2, 3)).map_err(|e| e.to_string())?;
    let ghz = target_state(&TargetSpec::new(TargetKind::Ghz, vec![1, 2, 3, 4]).map_err(|e| e.to_string())?);
    match b.post_state.as_pure() {
        Some(p) => k.close("QF GHZ fidelity", fidelity(p, &ghz), 1.0),
        None => k.fail("QF GHZ fidelity", "no pure post-state"),
    }
    let reg = Registry::from_spatial([1, 2]).map_err(|e| e.to_string())?;
    let (h1, v1, h2, v2) = (ModeId::h(1), ModeId::v(1), ModeId::h(2), ModeId::v(2));
    let qf_terms: [(&[ModeId], f64); 5] =
        [(&[h1, h2], 0.25), (&[v1, v2], 0.25), (&[v2], 0.25), (&[v1], 0.5), (&[], 0.5)];
    let mqf_terms: [(&[ModeId], f64); 3] = [(&[h1, h2], 0.125), (&[v1, v2], 0.125), (&[], 0.25)];
    for (name, op, terms) in [("QF", qf_operator(1, 2), &qf_terms[..]), ("MQF", mqf_operator(1, 2), &mqf_terms[..])] {
        for (modes, want) in terms {
            let input = ket(&reg, modes);
            let out = apply_kraus(&input, &op).map_err(|e| e.to_string())?;
            let amp = out
                .post_state
                .as_pure()
                .map(|p| p.amplitude(&OccupationVector::from_modes(modes)) * out.probability.sqrt())
                .unwrap_or_default();
            let label: Vec<String> = modes.iter().map(|m| m.to_string()).collect();
            k.check(
                &format!("{name} coefficient on |{}>", label.join(" ")),
                (amp - cr(*want)).norm() < 1e-12,
                format!("got {amp}, want {want}"),
            );
        }
    }
    let plus = FockState::from_terms(
        &reg,
        [
            (OccupationVector::from_modes(&[h1, h2]), cr(0.5)),
            (OccupationVector::from_modes(&[h1, v2]), cr(0.5)),
            (OccupationVector::from_modes(&[v1, h2]), cr(0.5)),
            (OccupationVector::from_modes(&[v1, v2]), cr(0.5)),
        ],
    )
    .map_err(|e| e.to_string())?;
    let m = apply_kraus(&plus, &mqf_operator(1, 2)).map_err(|e| e.to_string())?;
    k.close("MQF success on diagonal photons", m.probability, 1.0 / 128.0);
    k.note("MQF success 1/128 identified for two diagonal photons |+>|+>".into());
    Ok(k)
}

fn c4_j2() -> Result<Checks, String> {
    let mut k = Checks::new();
    let (c, br) = run("J2:bell2")?;
    k.close("bell2 success", success(&c, &br), 1.0 / 16.0);
    k.check("bell2 success fidelity", (min_success_fidelity(&c, &br)? - 1.0).abs() <= TOL, String::new());
    let rec = c.recycle.clone().ok_or("J2:bell2 has no recycle")?;
    match branch(&br, "1':-,2':-,3':-,4':-").and_then(|b| b.state.as_pure().map(|s| (b.probability, s))) {
        Some((p, s)) => {
            k.close("vacuum branch probability", p, 1.0 / 16.0);
            let r = apply_padded(s, &rec.restore).map_err(|e| e.to_string())?;
            k.close("vacuum branch restores two Bell pairs", fidelity(&r, &target_state(&rec.target)), 1.0);
        }
        None => k.fail("vacuum branch", "missing"),
    }
    let (c, br) = run("J2:ghz4")?;
    k.close("ghz4 success", success(&c, &br), 3.0 / 16.0);
    let rec = c.recycle.clone().ok_or("J2:ghz4 has no recycle")?;
    k.check("ghz4 recycle target", rec.target.kind == TargetKind::BellMix, rec.target.to_string());
    match branch(&br, "1':0,2':0,3':0,4':0").and_then(|b| b.state.as_pure()) {
        Some(s) => {
            let r = apply_padded(s, &rec.restore).map_err(|e| e.to_string())?;
            k.close("ghz4 zero-photon branch", fidelity(&r, &target_state(&rec.target)), 1.0);
        }
        None => k.fail("ghz4 zero-photon branch", "missing"),
    }
    let (c, br) = run("J2:sp8")?;
    k.close("sp8 success", success(&c, &br), 1.0 / 4096.0);
    Ok(k)
}

fn c5_k1() -> Result<Checks, String> {
    let mut k = Checks::new();
    let (c, br) = run("K1")?;
    k.close("success", success(&c, &br), 1.0 / 256.0);
    let rep = br.iter().find(|b| {
        b.record.outcomes.get(&3).is_some_and(|o| o.to_string() == "H")
            && b.record.count(6) == 0
            && b.record.count(primed(4)) == 0
            && !b.terminal
    });
    match rep.and_then(|b| b.state.as_pure()) {
        Some(s) => {
            let amp = aligned(s, &occ(&[(1, Pol::H, 1), (5, Pol::H, 1), (7, Pol::H, 1)]));
            let terms = [
                ([1, 5, 7], Pol::H, 0.5),
                ([1, 5, 7], Pol::V, -0.5),
                ([2, 4, 8], Pol::H, 0.5),
                ([2, 4, 8], Pol::V, -0.5),
            ];
            let mut worst: f64 = 0.0;
            for (m, p, a) in terms {
                worst = worst.max((amp(&occ(&[(m[0], p, 1), (m[1], p, 1), (m[2], p, 1)])) - cr(a)).norm());
            }
            k.check("representative branch amplitudes", worst <= TOL && s.len() == 4, format!("deviation {worst:e}"));
        }
        None => k.fail("representative branch", "missing"),
    }
    k.close("corrected fidelity", min_success_fidelity(&c, &br)?, 1.0);
    Ok(k)
}

fn c6_k2() -> Result<Checks, String> {
    let mut k = Checks::new();
    let (c, br) = run("K2")?;
    k.close("success", success(&c, &br), 1.0 / 1024.0);
    k.close("star-form fidelity", min_success_fidelity(&c, &br)?, 1.0);
    Ok(k)
}

fn c7_k3() -> Result<Checks, String> {
    let mut k = Checks::new();
    for (name, want) in [("K3:hes2:ex1", 1.0 / 64.0), ("K3:hes2:ex2", 1.0 / 32.0), ("K3:hes2:ex3", 1.0 / 16.0)] {
        let (c, br) = run(name)?;
        k.close(&format!("{name} success"), success(&c, &br), want);
        k.close(&format!("{name} corrected fidelity"), min_success_fidelity(&c, &br)?, 1.0);
    }
    let r = k3_no_ancilla_report().map_err(|e| e.to_string())?;
    k.check("no-ancilla report consistent", r.consistent, format!("total {}", r.total));
    k.note(format!(
        "no-ancilla: hv over all detectors {}, Bell pair heralded {}, same device {}",
        analysis::format_rational(r.success_probability),
        analysis::format_rational(r.bell_probability),
        analysis::format_rational(r.same_device),
    ));
    Ok(k)
}

fn c8_b() -> Result<Checks, String> {
    let mut k = Checks::new();
    let (c0, b0) = run("B:nocorrection")?;
    let direct = success(&c0, &b0);
    k.close("direct success", direct, 3.0 / 16.0);
    let (c, br) = run("B")?;
    let total = success(&c, &br);
    k.close("correction adds", total - direct, 1.0 / 16.0);
    k.close("total", total, 0.25);
    k.close("Bell fidelity", min_success_fidelity(&c, &br)?, 1.0);
    let cp = build_b_checkpoint();
    let bc = execute(&cp, analysis::photon_cap()).map_err(|e| e.to_string())?;
    match branch(&bc, "2:HH,3:-").and_then(|b| b.state.as_pure()) {
        Some(s) => {
            let amp = aligned(s, &occ(&[(1, Pol::H, 2)]));
            let n = 1.0 / (2.0 * 3f64.sqrt());
            let want = [((1, Pol::H), 1.0), ((1, Pol::V), -3.0), ((4, Pol::H), 1.0), ((4, Pol::V), 1.0)];
            let mut worst: f64 = 0.0;
            for ((m, p), a) in want {
                worst = worst.max((amp(&occ(&[(m, p, 2)])) - cr(a * n)).norm());
            }
            k.check("intermediate amplitudes", worst <= TOL && s.len() == 4, format!("deviation {worst:e}"));
        }
        None => k.fail("intermediate", "missing branch"),
    }
    Ok(k)
}

fn c9_table() -> Result<Checks, String> {
    let mut k = Checks::new();
    for r in reproduce_table1().map_err(|e| e.to_string())? {
        k.check(
            &format!("{} -> {}", r.resource_label(), r.output),
            r.pass,
            format!("computed {} vs {}/{}", analysis::format_rational(r.computed), r.reference.0, r.reference.1),
        );
    }
    Ok(k)
}

// ---- permanent oracle for element action ----

fn permanent(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    let mut total = cr(if n == 0 { 1.0 } else { 0.0 });
    for mask in 1u32..(1 << n) {
        let mut prod = cr(1.0);
        for row in m {
            prod *= row.iter().enumerate().filter(|(j, _)| mask & (1 << j) != 0).map(|(_, x)| x).sum::<Complex64>();
        }
        let sign = if (n as u32 - mask.count_ones()) % 2 == 0 { 1.0 } else { -1.0 };
        total += prod * sign;
    }
    total
}

fn compositions(k: usize, n: u32) -> Vec<Vec<u32>> {
    if k == 1 {
        return vec![vec![n]];
    }
    (0..=n)
        .flat_map(|x| {
            compositions(k - 1, n - x).into_iter().map(move |mut v| {
                v.insert(0, x);
                v
            })
        })
        .collect()
}

fn fact(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Max deviation between sparse `apply` and the permanent formula over all basis inputs.
fn oracle_deviation(e: &ElementSpec, spatial: &[u32], n: u32) -> Result<f64, String> {
    let reg = Registry::from_spatial(spatial.iter().copied()).map_err(|x| x.to_string())?;
    let all = reg.modes().to_vec();
    let u: ModeUnitary = e.unitary().map_err(|x| x.to_string())?;
    let dim = all.len();
    let mut big = vec![vec![cr(0.0); dim]; dim];
    for (i, row) in big.iter_mut().enumerate() {
        row[i] = cr(1.0);
    }
    let pos: Vec<usize> = u.modes.iter().map(|m| all.iter().position(|x| x == m).expect("acted mode")).collect();
    for (a, &pa) in pos.iter().enumerate() {
        for (b, &pb) in pos.iter().enumerate() {
            big[pa][pb] = u.matrix[a][b];
        }
    }
    let rows = |o: &[u32]| -> Vec<usize> {
        o.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize)).collect()
    };
    let basis = compositions(dim, n);
    let mut worst: f64 = 0.0;
    for inp in &basis {
        let ov = OccupationVector::from_counts(all.iter().copied().zip(inp.iter().copied()));
        let st = FockState::from_terms(&reg, [(ov, cr(1.0))]).map_err(|x| x.to_string())?;
        let out = apply(&st, e).map_err(|x| x.to_string())?;
        let c = rows(inp);
        for o in &basis {
            let r = rows(o);
            let sub: Vec<Vec<Complex64>> = r.iter().map(|&i| c.iter().map(|&j| big[i][j]).collect()).collect();
            let norm: f64 = o.iter().chain(inp).map(|&x| fact(x)).product();
            let want = permanent(&sub) / norm.sqrt();
            let got = out.amplitude(&OccupationVector::from_counts(all.iter().copied().zip(o.iter().copied())));
            worst = worst.max((got - want).norm());
        }
    }
    Ok(worst)
}

fn elements_on(spatial: &[u32]) -> Vec<ElementSpec> {
    let mut v = vec![];
    let (a, b) = (spatial[0], spatial[1]);
    for r in [0.0, 1.0 / 3.0, 0.5, 0.75, 1.0] {
        v.push(ElementSpec::bs(r, a, b).expect("valid"));
        v.push(ElementSpec::bs(r, b, a).expect("valid"));
    }
    for th in [FRAC_PI_4, -FRAC_PI_4, 0.3, 2.0] {
        v.push(ElementSpec::rot(th, a));
        v.push(ElementSpec::phase(th, b));
    }
    v.push(ElementSpec::pbs(a, b));
    v.push(ElementSpec::pbs(b, a));
    if let [p, q, r, t] = spatial {
        v.push(ElementSpec::four_port([*p, *q, *r, *t]).expect("distinct"));
        v.push(ElementSpec::four_port([*t, *r, *p, *q]).expect("distinct"));
    }
    v
}

const FUZZ_WORDS: &[&str] = &[
    "modes",
    "primed",
    "aux",
    "input",
    "bell",
    "ghz3",
    "ghz4",
    "hes",
    "sp",
    "vac",
    "qdc3",
    "bs",
    "rot",
    "pbs",
    "phase",
    "fourport",
    "qf",
    "mqf",
    "detect",
    "number",
    "pol",
    "accept",
    "when",
    "fix",
    "target",
    "finish",
    "goal",
    "recycle",
    "restore",
    "partition",
    "|",
    "#",
    "name",
    "pi/4",
    "-pi/2",
    "3pi/4",
    "0.5",
    "1/3",
    "2",
    "1",
    "3'",
    "a1",
    "a0",
    "0",
    "hv_pair",
    "type2",
    "correctable",
    "2:HV,3:-",
    "1:2",
    "x",
    "1e400",
    "nan",
    "-1",
    ":V",
    "5':V",
    "99",
    "100",
    "4294967296",
    "é",
    "\t",
    "'",
    "pi/0",
];

fn fuzz_line(rng: &mut StdRng) -> String {
    let n = rng.gen_range(0..8);
    let mut s = String::new();
    for _ in 0..n {
        if rng.gen_bool(0.15) {
            let len = rng.gen_range(1..6);
            s.extend((0..len).map(|_| char::from_u32(rng.gen_range(32..0x3000)).unwrap_or('?')));
        } else {
            s.push_str(FUZZ_WORDS[rng.gen_range(0..FUZZ_WORDS.len())]);
        }
        s.push(if rng.gen_bool(0.9) { ' ' } else { '\t' });
    }
    s
}

/// Parse `lines` random lines; returns the number of programs whose diagnostics point outside the text.
pub fn fuzz_parser(lines: usize, seed: u64) -> usize {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut bad = 0;
    let mut done = 0;
    while done < lines {
        let k = rng.gen_range(1..=5).min(lines - done);
        let mut text: Vec<String> = vec!["modes 8".into(), "primed 4".into()];
        text.extend((0..k).map(|_| fuzz_line(&mut rng)));
        done += k;
        let src = text.join("\n");
        let outcome = std::panic::catch_unwind(|| parse(&src));
        match outcome {
            Err(_) => bad += 1,
            Ok(Ok(_)) => {}
            Ok(Err(ds)) => {
                let ls: Vec<&str> = src.lines().collect();
                for d in ds {
                    let ok = d.line >= 1
                        && d.line <= ls.len()
                        && d.column >= 1
                        && d.column <= ls[d.line - 1].chars().count().max(1);
                    if !ok {
                        bad += 1;
                    }
                }
            }
        }
    }
    bad
}

fn c10_properties() -> Result<Checks, String> {
    let mut k = Checks::new();
    let mut incomplete = vec![];
    for c in catalogue() {
        let br = execute(&c, analysis::photon_cap()).map_err(|e| format!("{}: {e}", c.name))?;
        let total: f64 = br.iter().map(|b| b.probability).sum();
        if (total - 1.0).abs() > TOL {
            incomplete.push(format!("{} sums to {total}", c.name));
        }
    }
    k.check("branch completeness", incomplete.is_empty(), incomplete.join(", "));
    let mut worst: f64 = 0.0;
    for (spatial, photons) in
        [(&[1u32, 2, 9][..], 3u32), (&[1, 2, 9][..], 2), (&[1, 2][..], 3), (&[3, 1, 9][..], 1), (&[1, 2, 3, 4][..], 2)]
    {
        for e in elements_on(spatial) {
            worst = worst.max(oracle_deviation(&e, spatial, photons)?);
        }
    }
    k.check("dense oracle", worst < 1e-10, format!("deviation {worst:e}"));
    let mut mismatched = vec![];
    for c in catalogue() {
        match parse(&print(&c)) {
            Ok(p) if p.circuit == c => {}
            Ok(_) => mismatched.push(c.name.clone()),
            Err(d) => mismatched.push(format!("{}: {}", c.name, d[0])),
        }
    }
    k.check("DSL round trip", mismatched.is_empty(), mismatched.join(", "));
    let bad = fuzz_parser(10_000, 0x5eed);
    k.check("parser fuzzing", bad == 0, format!("{bad} crashes or bad positions"));
    Ok(k)
}

pub const TITLES: [&str; 10] = [
    "element algebra",
    "T3 gate",
    "quantum filters",
    "quadbit fusion J2",
    "cluster K1",
    "cluster K2",
    "fusion K3",
    "circuit B",
    "resource table",
    "property suites",
];

/// Run one acceptance criterion (1 to 10).
pub fn criterion(id: u32) -> CriterionResult {
    let t = Instant::now();
    let r: Result<Checks, String> = match id {
        1 => Ok(c1_elements()),
        2 => c2_t3(),
        3 => c3_filters(),
        4 => c4_j2(),
        5 => c5_k1(),
        6 => c6_k2(),
        7 => c7_k3(),
        8 => c8_b(),
        9 => c9_table(),
        10 => c10_properties(),
        _ => Err(format!("no criterion {id}")),
    };
    let (pass, details) = match r {
        Ok(k) => (k.ok, k.details),
        Err(e) => (false, vec![e]),
    };
    CriterionResult {
        id,
        title: (id as usize).checked_sub(1).and_then(|i| TITLES.get(i)).copied().unwrap_or("unknown"),
        pass,
        details,
        seconds: t.elapsed().as_secs_f64(),
    }
}

pub fn verify_all() -> Vec<CriterionResult> {
    (1..=10).map(criterion).collect()
}
