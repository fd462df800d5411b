use std::collections::BTreeSet;

use detection::PostState;
use fock_core::{DumpRecord, FockState};
use paper_circuits::{
    apply_padded, execute, fidelity, find_correction, is_accepted, process_branch, target_state, Branch, CircuitSpec,
    TargetKind, TargetSpec, DEFAULT_PHOTON_CAP, FIDELITY_TOL,
};
use serde::Serialize;

use crate::entangle::{entanglement_report, is_product};
use crate::AnalysisError;

pub const PHOTON_CAP_ENV: &str = "QUADSIM_PHOTON_CAP";

/// Photon-number guard, overridable through the environment.
pub fn photon_cap() -> u32 {
    std::env::var(PHOTON_CAP_ENV).ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_PHOTON_CAP)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchClass {
    Success,
    Recyclable,
    Failure,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchReport {
    pub pattern: String,
    pub probability: f64,
    pub class: BranchClass,
    /// Fidelity with the target after the recorded correction (success branches).
    pub fidelity: Option<f64>,
    /// Fidelity with the final goal after the finishing operation.
    pub goal_fidelity: Option<f64>,
    pub correction: Option<String>,
    /// True when the restore operation returns the circuit's input resource.
    pub restores_input: bool,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProtocolResult {
    pub circuit: String,
    pub success_probability: f64,
    pub recyclable_probability: f64,
    pub total_probability: f64,
    pub retry_adjusted_probability: Option<f64>,
    /// Probability-weighted fidelity over success branches.
    pub fidelity: Option<f64>,
    pub min_fidelity: Option<f64>,
    /// Final state of the most probable success branch.
    pub output_state: Vec<DumpRecord>,
    pub branches: Vec<BranchReport>,
}

/// Geometric retry on recyclable outcomes only.
pub fn retry_adjusted(success_p: f64, recyclable_p: f64) -> Result<f64, AnalysisError> {
    if !(0.0..1.0).contains(&recyclable_p) || success_p < 0.0 || success_p + recyclable_p > 1.0 + 1e-12 {
        return Err(AnalysisError::Parameter(format!(
            "retry needs 0 <= recyclable < 1 and success + recyclable <= 1, got {success_p}, {recyclable_p}"
        )));
    }
    Ok(success_p / (1.0 - recyclable_p))
}

/// Nearest p/q with q <= max_den, by continued fractions.
pub fn nearest_rational(x: f64, max_den: u64) -> (u64, u64) {
    if x <= 0.0 {
        return (0, 1);
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
    let mut r = x;
    loop {
        let a = r.floor();
        let a_u = a as u64;
        let (p2, q2) = (a_u * p1 + p0, a_u * q1 + q0);
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a;
        if frac < 1e-12 || (p1 as f64 / q1 as f64 - x).abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    if q1 == 0 {
        return (0, 1);
    }
    (p1, q1)
}

pub fn format_rational(x: f64) -> String {
    let (p, q) = nearest_rational(x, 4096);
    if q == 1 {
        p.to_string()
    } else {
        format!("{p}/{q}")
    }
}

fn occupied_spatial(s: &FockState) -> Vec<u32> {
    let set: BTreeSet<u32> =
        s.terms().flat_map(|(o, _)| o.iter().map(|(m, _)| m.spatial).collect::<Vec<_>>()).collect();
    set.into_iter().collect()
}

/// Catalogue resource states that fit the occupied modes of `s`.
fn catalogue_candidates(s: &FockState) -> Vec<TargetSpec> {
    let Some(n) = s.photon_number() else { return vec![] };
    let m = occupied_spatial(s);
    let mut out = vec![];
    match (n, m.len()) {
        (2, 2) => out.push(TargetSpec::new(TargetKind::Bell, m.clone())),
        (2, 4) => {
            for [a, b, c, d] in [[0, 1, 2, 3], [0, 2, 1, 3], [0, 3, 1, 2]] {
                out.push(TargetSpec::new(TargetKind::Hes, vec![m[a], m[b], m[c], m[d]]));
            }
        }
        (k, l) if k >= 3 && l == k as usize => out.push(TargetSpec::new(TargetKind::Ghz, m.clone())),
        _ => {}
    }
    out.into_iter().filter_map(Result::ok).collect()
}

/// Whether every component is locally equivalent to a catalogue resource state.
fn catalogue_match(state: &PostState) -> Result<Option<String>, AnalysisError> {
    let comps = state.components();
    if comps.is_empty() {
        return Ok(None);
    }
    let mut found = None;
    for (_, s) in comps {
        let mut hit = None;
        for t in catalogue_candidates(s) {
            if find_correction(s, &t, true)?.is_some() {
                hit = Some(t.to_string());
                break;
            }
        }
        match (hit, &found) {
            (None, _) => return Ok(None),
            (Some(h), None) => found = Some(h),
            (Some(h), Some(f)) if h == *f => {}
            _ => return Ok(None),
        }
    }
    Ok(found)
}

fn restores_input(circuit: &CircuitSpec, state: &PostState) -> Result<bool, AnalysisError> {
    let Some(rec) = &circuit.recycle else { return Ok(false) };
    let goal = target_state(&rec.target);
    let comps = state.components();
    if comps.is_empty() {
        return Ok(false);
    }
    for (_, s) in comps {
        let r = apply_padded(s, &rec.restore)?;
        if fidelity(&r, &goal) < 1.0 - FIDELITY_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

fn partition_note(circuit: &CircuitSpec, state: &PostState) -> Result<String, AnalysisError> {
    let Some((a, b)) = &circuit.partition else { return Ok(String::new()) };
    let mut notes = vec![];
    for (_, s) in state.components() {
        let c = entanglement_report(s, a, b)?;
        notes.push(if is_product(&c) { "product".to_string() } else { format!("entangled, Schmidt rank {}", c.len()) });
    }
    notes.dedup();
    Ok(notes.join("; "))
}

fn classify(circuit: &CircuitSpec, b: &Branch) -> Result<BranchReport, AnalysisError> {
    let mut r = BranchReport {
        pattern: b.record.to_string(),
        probability: b.probability,
        class: BranchClass::Failure,
        fidelity: None,
        goal_fidelity: None,
        correction: None,
        restores_input: false,
        note: String::new(),
    };
    if is_accepted(circuit, b)? {
        let p = process_branch(circuit, b)?;
        r.class = BranchClass::Success;
        r.fidelity = p.fidelity;
        r.goal_fidelity = p.goal_fidelity;
        r.correction = p.correction.map(|c| c.to_string());
        r.note = p.diagnostic.unwrap_or_default();
        return Ok(r);
    }
    if b.terminal || matches!(b.state, PostState::Empty) {
        r.note = "filter failed".into();
        return Ok(r);
    }
    r.note = partition_note(circuit, &b.state)?;
    if restores_input(circuit, &b.state)? {
        r.class = BranchClass::Recyclable;
        r.restores_input = true;
        let t = circuit.recycle.as_ref().map(|x| x.target.to_string()).unwrap_or_default();
        r.note = format!("input restored: {t}");
    } else if let Some(t) = catalogue_match(&b.state)? {
        r.class = BranchClass::Recyclable;
        r.note =
            if r.note.is_empty() { format!("resource left: {t}") } else { format!("{}; resource left: {t}", r.note) };
    }
    Ok(r)
}

pub fn run_protocol_with_cap(circuit: &CircuitSpec, cap: u32) -> Result<ProtocolResult, AnalysisError> {
    let branches = execute(circuit, cap)?;
    let mut reports = Vec::with_capacity(branches.len());
    let mut best: Option<(f64, &Branch)> = None;
    for b in &branches {
        let r = classify(circuit, b)?;
        if r.class == BranchClass::Success && best.is_none_or(|(p, _)| b.probability > p + 1e-15) {
            best = Some((b.probability, b));
        }
        reports.push(r);
    }
    let sum = |f: &dyn Fn(&BranchReport) -> bool| -> f64 {
        reports.iter().filter(|r| f(r)).fold(0.0, |a, r| a + r.probability)
    };
    let success = sum(&|r| r.class == BranchClass::Success);
    let recyclable = sum(&|r| r.class == BranchClass::Recyclable);
    let restoring = sum(&|r| r.restores_input);
    let total = sum(&|_| true);
    let fids: Vec<(f64, f64)> = reports
        .iter()
        .filter(|r| r.class == BranchClass::Success)
        .filter_map(|r| r.goal_fidelity.or(r.fidelity).map(|f| (r.probability, f)))
        .collect();
    let fidelity = (!fids.is_empty() && success > 0.0).then(|| fids.iter().map(|(p, f)| p * f).sum::<f64>() / success);
    let min_fidelity = fids.iter().map(|x| x.1).reduce(f64::min);
    let output_state = match best {
        Some((_, b)) => match process_branch(circuit, b)?.state {
            PostState::Pure(s) => s.dump(),
            PostState::Mixed(v) => v.iter().max_by(|x, y| x.0.total_cmp(&y.0)).map(|x| x.1.dump()).unwrap_or_default(),
            PostState::Empty => vec![],
        },
        None => vec![],
    };
    let retry = if restoring > 0.0 { Some(retry_adjusted(success, restoring)?) } else { None };
    Ok(ProtocolResult {
        circuit: circuit.name.clone(),
        success_probability: success,
        recyclable_probability: recyclable,
        total_probability: total,
        retry_adjusted_probability: retry,
        fidelity,
        min_fidelity,
        output_state,
        branches: reports,
    })
}

/// Exhaustive branch enumeration with classification, using the configured photon cap.
pub fn run_protocol(circuit: &CircuitSpec) -> Result<ProtocolResult, AnalysisError> {
    run_protocol_with_cap(circuit, photon_cap())
}
