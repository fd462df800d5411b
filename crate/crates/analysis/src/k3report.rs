use detection::{Outcome, PostState};
use paper_circuits::{build_k3, execute, is_accepted, K3Ancilla, K3Inputs};
use serde::Serialize;

use crate::entangle::{entanglement_report, is_product};
use crate::protocol::photon_cap;
use crate::AnalysisError;

const UPPER: [u32; 4] = [3, 5, 103, 105];
const LOWER: [u32; 4] = [4, 6, 104, 106];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EventClass {
    pub name: &'static str,
    pub probability: f64,
    /// Probability of the class whose heralded state is entangled across 1 2 | 7 8.
    pub entangled_probability: f64,
    /// Part of the entangled probability with two equal Schmidt coefficients (a Bell pair).
    pub bell_probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoAncillaReport {
    pub classes: Vec<EventClass>,
    pub total: f64,
    /// One H and one V over all eight detectors.
    pub success_probability: f64,
    pub entangled_probability: f64,
    pub bell_probability: f64,
    /// Both photons in one four-port device.
    pub same_device: f64,
    /// Anything except a same-polarization double detection in one device.
    pub not_same_polarization: f64,
    pub consistent: bool,
}

fn photons(outcomes: &std::collections::BTreeMap<u32, Outcome>, modes: &[u32]) -> (u32, u32) {
    modes.iter().fold((0, 0), |(h, v), m| match outcomes.get(m) {
        Some(Outcome::Pol { h: a, v: b }) => (h + a, v + b),
        Some(Outcome::Count(n)) => (h + n, v),
        None => (h, v),
    })
}

/// Branch-class decomposition of the two-HES Bell fusion without ancillas.
pub fn k3_no_ancilla_report() -> Result<NoAncillaReport, AnalysisError> {
    let c = build_k3(K3Inputs::Hes2, K3Ancilla::None)?;
    let (a, b) = c.partition.clone().expect("partition declared");
    let names = [
        "same device, HV",
        "same device, same polarization",
        "one photon per device, HV",
        "one photon per device, same polarization",
    ];
    let mut classes: Vec<EventClass> = names
        .iter()
        .map(|&name| EventClass { name, probability: 0.0, entangled_probability: 0.0, bell_probability: 0.0 })
        .collect();
    let mut success = 0.0;
    let mut total = 0.0;
    let mut consistent = true;
    for br in execute(&c, photon_cap())? {
        total += br.probability;
        let accepted = is_accepted(&c, &br)?;
        if accepted {
            success += br.probability;
        }
        let (uh, uv) = photons(&br.record.outcomes, &UPPER);
        let (lh, lv) = photons(&br.record.outcomes, &LOWER);
        let idx = match ((uh + uv), (lh + lv)) {
            (2, 0) if uh == 1 => 0,
            (0, 2) if lh == 1 => 0,
            (2, 0) | (0, 2) => 1,
            (1, 1) if uh + lh == 1 => 2,
            _ => 3,
        };
        consistent &= (idx == 0 || idx == 2) == accepted;
        let (mut entangled, mut bell) = (false, !matches!(br.state, PostState::Empty));
        for (_, f) in br.state.components() {
            let coeffs = entanglement_report(f, &a, &b)?;
            entangled |= !is_product(&coeffs);
            bell &= coeffs.len() == 2 && (coeffs[0] - coeffs[1]).abs() < 1e-9;
        }
        classes[idx].probability += br.probability;
        if entangled {
            classes[idx].entangled_probability += br.probability;
        }
        if bell {
            classes[idx].bell_probability += br.probability;
        }
    }
    let entangled: f64 = classes.iter().map(|c| c.entangled_probability).sum();
    let bell: f64 = classes.iter().map(|c| c.bell_probability).sum();
    let sum: f64 = classes.iter().map(|c| c.probability).sum();
    consistent &= (sum - 1.0).abs() < 1e-9 && (total - 1.0).abs() < 1e-9;
    consistent &= (classes[0].probability + classes[2].probability - success).abs() < 1e-9;
    Ok(NoAncillaReport {
        same_device: classes[0].probability + classes[1].probability,
        not_same_polarization: 1.0 - classes[1].probability,
        classes,
        total,
        success_probability: success,
        entangled_probability: entangled,
        bell_probability: bell,
        consistent,
    })
}
