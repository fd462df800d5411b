use std::collections::{BTreeMap, HashSet};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::sync::OnceLock;

use detection::PostState;
use fock_core::{aux, Complex64, FockState, ModeId, Pol, Registry};
use optics_elements::{apply_all, ElementSpec};

use crate::circuit::{CircuitSpec, Predicate, TargetSpec};
use crate::exec::Branch;
use crate::states::target_state;
use crate::CircuitError;

pub const FIDELITY_TOL: f64 = 1e-9;

const AMP_TOL: f64 = 1e-7;
const MAX_WORD: usize = 3;
const MAX_LEAVES: usize = 4096;

type Mat = Vec<Vec<Complex64>>;

/// Extend the registry with every spatial mode the elements touch.
fn pad_for(state: &FockState, elements: &[ElementSpec]) -> Result<FockState, CircuitError> {
    let extra: Vec<u32> = elements
        .iter()
        .flat_map(|e| e.spatial.iter().copied())
        .filter(|&s| !state.registry().contains_spatial(s))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    if extra.is_empty() {
        return Ok(state.clone());
    }
    Ok(state.extend_registry(&Registry::from_spatial(extra)?))
}

/// Apply elements, first padding the registry with vacuum where needed.
pub fn apply_padded(state: &FockState, elements: &[ElementSpec]) -> Result<FockState, CircuitError> {
    Ok(apply_all(&pad_for(state, elements)?, elements)?)
}

/// |⟨target|state⟩|² with a diagnostic when the photon numbers differ.
pub fn fidelity_report(state: &FockState, target: &FockState) -> (f64, Option<String>) {
    let (n, m) = (state.photon_number(), target.photon_number());
    if n != m {
        let show = |x: Option<u32>| x.map_or("indefinite".to_string(), |v| v.to_string());
        return (0.0, Some(format!("photon number mismatch: state {} vs target {}", show(n), show(m))));
    }
    let reg = state.registry().union(target.registry());
    let a = state.extend_registry(&reg);
    let b = target.extend_registry(&reg);
    let ip = b.inner_product(&a).expect("common registry");
    let norms = a.norm_sqr() * b.norm_sqr();
    if norms == 0.0 {
        return (0.0, Some("zero state".into()));
    }
    ((ip.norm_sqr() / norms).min(1.0), None)
}

pub fn fidelity(state: &FockState, target: &FockState) -> f64 {
    fidelity_report(state, target).0
}

/// Fidelity after applying a list of corrections to the state.
pub fn fidelity_with(state: &FockState, target: &FockState, corrections: &[ElementSpec]) -> Result<f64, CircuitError> {
    Ok(fidelity(&apply_padded(state, corrections)?, target))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Word over the fixed correction dictionary.
    Dictionary,
    /// Routed beam-splitter/phase mesh for an arbitrary single-photon unitary.
    Synthesized,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalOp {
    pub photon: Vec<u32>,
    pub method: Method,
    pub elements: Vec<ElementSpec>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Correction {
    pub pre: Vec<ElementSpec>,
    pub local: Vec<LocalOp>,
}

impl Correction {
    pub fn elements(&self) -> Vec<ElementSpec> {
        let mut v = self.pre.clone();
        for op in &self.local {
            v.extend(op.elements.iter().cloned());
        }
        v
    }

    pub fn apply(&self, state: &FockState) -> Result<FockState, CircuitError> {
        apply_padded(state, &self.elements())
    }

    pub fn in_dictionary(&self) -> bool {
        self.local.iter().all(|op| op.method == Method::Dictionary)
    }

    pub fn is_identity(&self) -> bool {
        self.pre.is_empty() && self.local.is_empty()
    }
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements().iter().map(|e| e.to_dsl()).collect();
        if parts.is_empty() {
            return f.write_str("identity");
        }
        f.write_str(&parts.join("; "))
    }
}

/// Element network for a unitary on one photon's levels (level = 2·port + pol).
///
/// V levels are routed into `aux` vacuum modes and turned to H, a beam-splitter/phase
/// mesh acts on the H modes, and the routing is undone.
pub fn synthesize(ports: &[u32], aux_modes: &[u32], u: &[Vec<Complex64>]) -> Vec<ElementSpec> {
    let k = ports.len();
    assert_eq!(aux_modes.len(), k);
    assert_eq!(u.len(), 2 * k);
    let spatial: Vec<u32> = (0..2 * k).map(|l| if l % 2 == 0 { ports[l / 2] } else { aux_modes[l / 2] }).collect();
    let sign = |l: usize| if l % 2 == 0 { 1.0 } else { -1.0 };
    let n = 2 * k;
    let mut m: Mat = (0..n).map(|a| (0..n).map(|b| u[a][b] * sign(a) * sign(b)).collect()).collect();
    let mut gates: Vec<(usize, usize, f64, f64)> = vec![];
    for q in 0..n {
        for j in (q + 1..n).rev() {
            let (x, y) = (m[q][q], m[j][q]);
            if y.norm() < 1e-12 {
                continue;
            }
            let phi = y.arg() - x.arg();
            let r_sq = y.norm_sqr() / (x.norm_sqr() + y.norm_sqr());
            let e = Complex64::from_polar(1.0, phi);
            for c in 0..n {
                m[q][c] *= e;
            }
            let (t, r) = ((1.0 - r_sq).sqrt(), r_sq.sqrt());
            for c in 0..n {
                let (a, b) = (m[j][c], m[q][c]);
                m[j][c] = a * t - b * r;
                m[q][c] = a * r + b * t;
            }
            gates.push((q, j, r_sq, phi));
        }
    }
    let mut out = vec![];
    for (&m0, &a0) in ports.iter().zip(aux_modes) {
        out.push(ElementSpec::pbs(m0, a0));
        out.push(ElementSpec::rot(FRAC_PI_2, a0));
    }
    for (l, row) in m.iter().enumerate() {
        let phi = row[l].arg();
        if phi.abs() > 1e-12 {
            out.push(ElementSpec::phase(phi, spatial[l]));
        }
    }
    for &(q, j, r_sq, phi) in gates.iter().rev() {
        if r_sq > 1e-15 {
            out.push(ElementSpec::bs(r_sq, spatial[q], spatial[j]).expect("valid ratio"));
        }
        if phi.abs() > 1e-12 {
            out.push(ElementSpec::phase(-phi, spatial[q]));
        }
    }
    for (&m0, &a0) in ports.iter().zip(aux_modes) {
        out.push(ElementSpec::rot(-FRAC_PI_2, a0));
        out.push(ElementSpec::pbs(m0, a0));
    }
    out
}

/// Auxiliary vacuum modes reserved for the correction network of photon `p`.
pub fn correction_aux(p: usize) -> [u32; 2] {
    [aux(2 * p as u32 + 1), aux(2 * p as u32 + 2)]
}

/// Quadbit Fourier transform on ports (k1, k2) as an element network.
pub fn fourier_network(k1: u32, k2: u32, aux_modes: [u32; 2]) -> Vec<ElementSpec> {
    let f = crate::states::quadbit_fourier();
    let u: Mat = f.iter().map(|r| r.to_vec()).collect();
    synthesize(&[k1, k2], &aux_modes, &u)
}

fn placeholder_modes() -> Vec<ModeId> {
    (0..2).flat_map(|k| Pol::BOTH.map(|p| ModeId::new(k, p))).collect()
}

fn embed(e: &ElementSpec, modes: &[ModeId]) -> Mat {
    let u = e.unitary().expect("valid generator");
    let n = modes.len();
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    let idx: Vec<usize> = u.modes.iter().map(|x| modes.iter().position(|y| y == x).unwrap()).collect();
    for (a, &ia) in idx.iter().enumerate() {
        for (b, &ib) in idx.iter().enumerate() {
            m[ia][ib] = u.matrix[a][b];
        }
    }
    m
}

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k].norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                m[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    m
}

/// Rounded matrix modulo global phase.
fn phase_key(m: &Mat) -> Vec<(i64, i64)> {
    let lead = m.iter().flatten().find(|z| z.norm() > 1e-9).copied().unwrap_or(Complex64::new(1.0, 0.0));
    let ph = lead.conj() / lead.norm();
    m.iter()
        .flatten()
        .map(|z| {
            let w = z * ph;
            ((w.re * 1e6).round() as i64, (w.im * 1e6).round() as i64)
        })
        .collect()
}

/// Correction dictionary on two placeholder ports 0 and 1.
pub fn dictionary_generators() -> Vec<ElementSpec> {
    vec![
        ElementSpec::bs50(0, 1),
        ElementSpec::bs50(1, 0),
        ElementSpec::rot(FRAC_PI_4, 0),
        ElementSpec::rot(-FRAC_PI_4, 0),
        ElementSpec::rot(FRAC_PI_4, 1),
        ElementSpec::rot(-FRAC_PI_4, 1),
        ElementSpec::phase(FRAC_PI_2, 0),
        ElementSpec::phase(FRAC_PI_2, 1),
        ElementSpec::pbs(0, 1),
    ]
}

/// Every distinct product of dictionary generators up to the word limit, shortest first.
fn dictionary() -> &'static Vec<(Mat, Vec<ElementSpec>)> {
    static D: OnceLock<Vec<(Mat, Vec<ElementSpec>)>> = OnceLock::new();
    D.get_or_init(|| {
        let modes = placeholder_modes();
        let gens: Vec<(Mat, ElementSpec)> =
            dictionary_generators().into_iter().map(|g| (embed(&g, &modes), g)).collect();
        let id: Mat =
            (0..4).map(|i| (0..4).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()).collect();
        let mut seen = HashSet::new();
        seen.insert(phase_key(&id));
        let mut all = vec![(id, vec![])];
        let mut frontier = vec![0usize];
        for _ in 0..MAX_WORD {
            let mut next = vec![];
            for &k in &frontier {
                for (g, e) in &gens {
                    let m = mat_mul(g, &all[k].0);
                    if seen.insert(phase_key(&m)) {
                        let mut w = all[k].1.clone();
                        w.push(e.clone());
                        all.push((m, w));
                        next.push(all.len() - 1);
                    }
                }
            }
            frontier = next;
        }
        all
    })
}

/// Number of distinct operations reachable in the dictionary (modulo global phase).
pub fn dictionary_size() -> usize {
    dictionary().len()
}

/// Shortest word whose matrix sends each level s to level π(s) with phase d(s), up to a common phase.
fn find_word(map: &[(usize, usize, Complex64)]) -> Option<&'static Vec<ElementSpec>> {
    'outer: for (m, w) in dictionary() {
        let mut common: Option<Complex64> = None;
        for &(s, t, d) in map {
            let z = m[t][s];
            if (z.norm() - 1.0).abs() > AMP_TOL {
                continue 'outer;
            }
            let c = z / d;
            match common {
                None => common = Some(c),
                Some(c0) if (c - c0).norm() < AMP_TOL => {}
                _ => continue 'outer,
            }
        }
        return Some(w);
    }
    None
}

/// Terms as per-photon levels: level = 2·(port index) + polarization.
fn decompose(state: &FockState, photons: &[Vec<u32>]) -> Option<Vec<(Vec<usize>, Complex64)>> {
    let mut out = vec![];
    for (occ, a) in state.terms() {
        if occ.total() as usize != photons.len() {
            return None;
        }
        let mut levels = vec![usize::MAX; photons.len()];
        for (m, n) in occ.iter() {
            if n != 1 {
                return None;
            }
            let (p, port) = photons
                .iter()
                .enumerate()
                .find_map(|(p, ports)| ports.iter().position(|&x| x == m.spatial).map(|k| (p, k)))?;
            if levels[p] != usize::MAX {
                return None;
            }
            levels[p] = 2 * port + m.pol.index();
        }
        out.push((levels, *a));
    }
    Some(out)
}

struct Matcher<'a> {
    src: &'a [(Vec<usize>, Complex64)],
    dst: &'a [(Vec<usize>, Complex64)],
    used: Vec<bool>,
    fwd: Vec<BTreeMap<usize, usize>>,
    bwd: Vec<BTreeMap<usize, usize>>,
    assign: Vec<usize>,
    leaves: usize,
}

impl Matcher<'_> {
    fn search(&mut self, i: usize, leaf: &mut dyn FnMut(&[usize], &[BTreeMap<usize, usize>]) -> bool) -> bool {
        if self.leaves >= MAX_LEAVES {
            return false;
        }
        if i == self.src.len() {
            self.leaves += 1;
            return leaf(&self.assign, &self.fwd);
        }
        let (ls, a) = &self.src[i];
        for j in 0..self.dst.len() {
            if self.used[j] {
                continue;
            }
            let (lt, b) = &self.dst[j];
            if (a.norm() - b.norm()).abs() > AMP_TOL {
                continue;
            }
            let mut added = vec![];
            let mut ok = true;
            for p in 0..ls.len() {
                match (self.fwd[p].get(&ls[p]), self.bwd[p].get(&lt[p])) {
                    (Some(&t), _) if t == lt[p] => {}
                    (None, None) => {
                        self.fwd[p].insert(ls[p], lt[p]);
                        self.bwd[p].insert(lt[p], ls[p]);
                        added.push(p);
                    }
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                self.used[j] = true;
                self.assign.push(j);
                if self.search(i + 1, leaf) {
                    return true;
                }
                self.assign.pop();
                self.used[j] = false;
            }
            for p in added {
                self.bwd[p].remove(&self.fwd[p][&ls[p]]);
                self.fwd[p].remove(&ls[p]);
            }
        }
        false
    }
}

/// Complete a partial level map to a unitary on the photon's modes.
fn completed_unitary(n: usize, map: &[(usize, usize, Complex64)]) -> Mat {
    let mut m = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut free_out: Vec<usize> = (0..n).filter(|t| !map.iter().any(|x| x.1 == *t)).collect();
    for s in 0..n {
        if let Some(&(_, t, d)) = map.iter().find(|x| x.0 == s) {
            m[t][s] = d;
        } else {
            m[free_out.remove(0)][s] = Complex64::new(1.0, 0.0);
        }
    }
    m
}

fn relabel(word: &[ElementSpec], ports: [u32; 2]) -> Vec<ElementSpec> {
    word.iter()
        .map(|e| ElementSpec { kind: e.kind, spatial: e.spatial.iter().map(|&k| ports[k as usize]).collect() })
        .collect()
}

/// Per-photon monomial correction from `state` to `target`, if one exists.
fn monomial(state: &FockState, target: &FockState, photons: &[Vec<u32>]) -> Option<Vec<LocalOp>> {
    let src = decompose(state, photons)?;
    let dst = decompose(target, photons)?;
    if src.len() != dst.len() {
        return None;
    }
    let n = photons.len();
    let mut m = Matcher {
        src: &src,
        dst: &dst,
        used: vec![false; dst.len()],
        fwd: vec![BTreeMap::new(); n],
        bwd: vec![BTreeMap::new(); n],
        assign: vec![],
        leaves: 0,
    };
    let mut fallback: Option<Vec<LocalOp>> = None;
    let mut found: Option<Vec<LocalOp>> = None;
    let mut leaf = |assign: &[usize], fwd: &[BTreeMap<usize, usize>]| -> bool {
        let ratios: Vec<Complex64> = assign.iter().enumerate().map(|(i, &j)| dst[j].1 / src[i].1).collect();
        for q in 0..n {
            let mut per_level: BTreeMap<usize, Complex64> = BTreeMap::new();
            let consistent = src.iter().zip(&ratios).all(|((ls, _), r)| {
                let e = per_level.entry(ls[q]).or_insert(*r);
                (*e - r).norm() < AMP_TOL
            });
            if !consistent {
                continue;
            }
            let mut ops = vec![];
            let mut all_words = true;
            for (p, ports) in photons.iter().enumerate() {
                let map: Vec<(usize, usize, Complex64)> = fwd[p]
                    .iter()
                    .map(|(&s, &t)| {
                        let d = if p == q { per_level[&s] } else { Complex64::new(1.0, 0.0) };
                        (s, t, d)
                    })
                    .collect();
                let trivial = map.iter().all(|&(s, t, d)| s == t && (d - map[0].2).norm() < AMP_TOL);
                if trivial {
                    continue;
                }
                let ax = correction_aux(p);
                let slots = [ports[0], if ports.len() > 1 { ports[1] } else { ax[0] }];
                let word = if ports.len() > 1 || map.iter().all(|x| x.1 < 2) { find_word(&map) } else { None };
                match word {
                    Some(w) => ops.push(LocalOp {
                        photon: ports.clone(),
                        method: Method::Dictionary,
                        elements: relabel(w, slots),
                    }),
                    None => {
                        all_words = false;
                        let u = completed_unitary(2 * ports.len(), &map);
                        ops.push(LocalOp {
                            photon: ports.clone(),
                            method: Method::Synthesized,
                            elements: synthesize(ports, &ax[..ports.len()], &u),
                        });
                    }
                }
            }
            if all_words {
                found = Some(ops);
                return true;
            }
            if fallback.is_none() {
                fallback = Some(ops);
            }
        }
        false
    };
    m.search(0, &mut leaf);
    found.or(fallback)
}

/// Candidate operations applied before the per-photon search.
fn pre_ops(photons: &[Vec<u32>], local_only: bool) -> Vec<Vec<ElementSpec>> {
    let mut out = vec![vec![]];
    let n = photons.len();
    for mask in 1u32..(1 << n) {
        let mut v = vec![];
        for (p, ports) in photons.iter().enumerate() {
            if mask & (1 << p) != 0 {
                v.extend(ports.iter().map(|&s| ElementSpec::rot(FRAC_PI_4, s)));
            }
        }
        out.push(v);
    }
    if !local_only && n == 2 && photons.iter().all(|p| p.len() == 1) {
        let (a, b) = (photons[0][0], photons[1][0]);
        out.push(vec![ElementSpec::bs50(a, b)]);
        out.push(vec![ElementSpec::bs50(b, a)]);
        out.push(vec![ElementSpec::pbs(a, b)]);
    }
    out
}

/// Search for a correction bringing `state` onto `target` with unit fidelity.
///
/// With `local_only`, only operations acting on one photon at a time are allowed.
pub fn find_correction(
    state: &FockState,
    target: &TargetSpec,
    local_only: bool,
) -> Result<Option<Correction>, CircuitError> {
    let goal = target_state(target);
    let photons = target.photons();
    let mut fallback = None;
    for pre in pre_ops(&photons, local_only) {
        let s = apply_padded(state, &pre)?;
        let Some(local) = monomial(&s, &goal, &photons) else { continue };
        let corr = Correction { pre, local };
        let f = fidelity(&corr.apply(state)?, &goal);
        if f < 1.0 - FIDELITY_TOL {
            continue;
        }
        if corr.in_dictionary() {
            return Ok(Some(corr));
        }
        fallback.get_or_insert(corr);
    }
    Ok(fallback)
}

/// Success-branch processing result.
#[derive(Clone, Debug, PartialEq)]
pub struct Processed {
    pub correction: Option<Correction>,
    pub fidelity: Option<f64>,
    pub goal_fidelity: Option<f64>,
    /// State after fix, correction and finish.
    pub state: PostState,
    pub diagnostic: Option<String>,
}

fn map_components(
    state: &PostState,
    f: impl Fn(&FockState) -> Result<FockState, CircuitError>,
) -> Result<PostState, CircuitError> {
    Ok(match state {
        PostState::Pure(s) => PostState::Pure(f(s)?),
        PostState::Mixed(v) => {
            PostState::Mixed(v.iter().map(|(w, s)| Ok((*w, f(s)?))).collect::<Result<_, CircuitError>>()?)
        }
        PostState::Empty => PostState::Empty,
    })
}

fn weighted_fidelity(state: &PostState, target: &FockState) -> (f64, Option<String>) {
    let mut total = 0.0;
    let mut diag = None;
    for (w, s) in state.components() {
        let (f, d) = fidelity_report(s, target);
        total += w * f;
        diag = diag.or(d);
    }
    (total, diag)
}

/// State after the circuit's common fix.
pub fn fixed_state(circuit: &CircuitSpec, state: &PostState) -> Result<PostState, CircuitError> {
    map_components(state, |s| apply_padded(s, &circuit.fix))
}

/// Apply fix, find the correction to the target, then finish and compare with the goal.
pub fn process_branch(circuit: &CircuitSpec, branch: &Branch) -> Result<Processed, CircuitError> {
    let mut out = Processed {
        correction: None,
        fidelity: None,
        goal_fidelity: None,
        state: fixed_state(circuit, &branch.state)?,
        diagnostic: None,
    };
    let Some(target) = &circuit.target else { return Ok(out) };
    let first = out.state.components().into_iter().max_by(|a, b| a.0.total_cmp(&b.0)).map(|(_, s)| s.clone());
    let Some(first) = first else { return Ok(out) };
    let goal = target_state(target);
    let corr = find_correction(&first, target, false)?;
    if let Some(c) = &corr {
        out.state = map_components(&out.state, |s| c.apply(s))?;
    } else {
        out.diagnostic = Some(format!("no correction onto {target} found"));
    }
    let (f, d) = weighted_fidelity(&out.state, &goal);
    out.fidelity = Some(f);
    out.diagnostic = out.diagnostic.or(d);
    out.correction = corr;
    if let Some(g) = &circuit.goal {
        out.state = map_components(&out.state, |s| apply_padded(s, &circuit.finish))?;
        let (f, d) = weighted_fidelity(&out.state, &target_state(g));
        out.goal_fidelity = Some(f);
        out.diagnostic = out.diagnostic.or(d);
    }
    Ok(out)
}

fn holds(circuit: &CircuitSpec, branch: &Branch, p: &Predicate) -> Result<bool, CircuitError> {
    if *p != Predicate::Correctable {
        return Ok(p.holds(&branch.record));
    }
    let Some(target) = &circuit.target else { return Ok(false) };
    let fixed = fixed_state(circuit, &branch.state)?;
    for (_, s) in fixed.components() {
        if find_correction(s, target, true)?.is_none() {
            return Ok(false);
        }
    }
    Ok(!fixed.components().is_empty())
}

/// Success rule: no failed filter, and either every unconditional acceptance holds or a
/// conditional group whose condition matches the record holds in full.
pub fn is_accepted(circuit: &CircuitSpec, branch: &Branch) -> Result<bool, CircuitError> {
    if branch.terminal || branch.record.failed_kraus() || matches!(branch.state, PostState::Empty) {
        return Ok(false);
    }
    if circuit.accept.is_empty() {
        return Ok(true);
    }
    let uncond: Vec<&Predicate> = circuit.accept.iter().filter(|a| a.when.is_none()).map(|a| &a.predicate).collect();
    if !uncond.is_empty() {
        let mut all = true;
        for p in &uncond {
            if !holds(circuit, branch, p)? {
                all = false;
                break;
            }
        }
        if all {
            return Ok(true);
        }
    }
    let mut conds = vec![];
    for a in &circuit.accept {
        if let Some(c) = &a.when {
            if !conds.contains(&c) {
                conds.push(c);
            }
        }
    }
    for c in conds {
        if !c.matches(&branch.record) {
            continue;
        }
        let mut all = true;
        for a in circuit.accept.iter().filter(|a| a.when.as_ref() == Some(c)) {
            if !holds(circuit, branch, &a.predicate)? {
                all = false;
                break;
            }
        }
        if all {
            return Ok(true);
        }
    }
    Ok(false)
}
