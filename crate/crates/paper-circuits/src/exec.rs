use std::collections::BTreeMap;

use detection::{apply_kraus, enumerate_outcomes, mqf_operator, qf_operator, PostState, DROP_EPS};
use fock_core::FockState;
use optics_elements::apply;

use crate::circuit::{CircuitSpec, KrausKind, Record, StepOp};
use crate::states::initial_state;
use crate::CircuitError;

pub const DEFAULT_PHOTON_CAP: u32 = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct Branch {
    pub record: Record,
    pub probability: f64,
    pub state: PostState,
    /// Failed Kraus step: no further processing.
    pub terminal: bool,
}

fn components(state: &PostState) -> Vec<(f64, FockState)> {
    state.components().into_iter().map(|(w, s)| (w, s.clone())).collect()
}

fn rebuild(parts: Vec<(f64, Option<FockState>)>) -> (f64, PostState) {
    let total: f64 = parts.iter().map(|(w, _)| w).sum();
    let kept: Vec<(f64, FockState)> =
        parts.into_iter().filter(|(w, _)| *w >= DROP_EPS).filter_map(|(w, s)| s.map(|s| (w, s))).collect();
    let st = match kept.len() {
        0 => PostState::Empty,
        1 => PostState::Pure(kept.into_iter().next().unwrap().1),
        _ => {
            let w: f64 = kept.iter().map(|(w, _)| w).sum();
            PostState::Mixed(kept.into_iter().map(|(x, s)| (x / w, s)).collect())
        }
    };
    (total, st)
}

/// Run every step on every branch, enumerating all detection outcomes.
pub fn execute(circuit: &CircuitSpec, photon_cap: u32) -> Result<Vec<Branch>, CircuitError> {
    circuit.validate()?;
    let n = circuit.photon_count();
    if n > photon_cap {
        return Err(CircuitError::Resource { photons: n, cap: photon_cap });
    }
    let init = initial_state(&circuit.inputs, &circuit.declared.spatial())?;
    let mut branches =
        vec![Branch { record: Record::default(), probability: 1.0, state: PostState::Pure(init), terminal: false }];
    for step in &circuit.steps {
        let mut next = Vec::with_capacity(branches.len());
        for b in branches {
            let skip = b.terminal
                || matches!(b.state, PostState::Empty)
                || step.when.as_ref().is_some_and(|c| !c.matches(&b.record));
            if skip {
                next.push(b);
                continue;
            }
            match &step.op {
                StepOp::Element(e) => {
                    let parts = components(&b.state)
                        .into_iter()
                        .map(|(w, s)| Ok((w, apply(&s, e)?)))
                        .collect::<Result<Vec<_>, CircuitError>>()?;
                    let state = if parts.len() == 1 {
                        PostState::Pure(parts.into_iter().next().unwrap().1)
                    } else {
                        PostState::Mixed(parts)
                    };
                    next.push(Branch { state, ..b });
                }
                StepOp::Detect { resolving, modes } => {
                    let mut by: BTreeMap<_, Vec<(f64, Option<FockState>)>> = BTreeMap::new();
                    for (w, s) in components(&b.state) {
                        for o in enumerate_outcomes(&s, modes, *resolving)? {
                            let entry = by.entry(o.pattern.clone()).or_default();
                            match o.post_state {
                                PostState::Pure(p) => entry.push((w * o.probability, Some(p))),
                                PostState::Mixed(v) => {
                                    entry.extend(v.into_iter().map(|(x, p)| (w * o.probability * x, Some(p))))
                                }
                                PostState::Empty => entry.push((w * o.probability, None)),
                            }
                        }
                    }
                    for (pat, parts) in by {
                        let (p, state) = rebuild(parts);
                        let prob = b.probability * p;
                        if prob < DROP_EPS {
                            continue;
                        }
                        let mut record = b.record.clone();
                        record.outcomes.extend(pat.outcomes);
                        next.push(Branch { record, probability: prob, state, terminal: false });
                    }
                }
                StepOp::Kraus { kind, i, j } => {
                    let op = match kind {
                        KrausKind::Qf => qf_operator(*i, *j),
                        KrausKind::Mqf => mqf_operator(*i, *j),
                    };
                    let label = format!(
                        "{}({},{})",
                        kind.keyword(),
                        fock_core::spatial_label(*i),
                        fock_core::spatial_label(*j)
                    );
                    let mut parts = vec![];
                    for (w, s) in components(&b.state) {
                        let k = apply_kraus(&s, &op)?;
                        parts.push((w * k.probability, k.post_state.as_pure().cloned()));
                    }
                    let (p, state) = rebuild(parts);
                    let mut ok = b.record.clone();
                    ok.kraus.push((label.clone(), true));
                    let mut bad = b.record.clone();
                    bad.kraus.push((label, false));
                    let ps = b.probability * p;
                    let pf = b.probability * (1.0 - p);
                    if ps >= DROP_EPS {
                        next.push(Branch { record: ok, probability: ps, state, terminal: false });
                    }
                    if pf >= DROP_EPS {
                        next.push(Branch { record: bad, probability: pf, state: PostState::Empty, terminal: true });
                    }
                }
            }
        }
        branches = next;
    }
    branches.sort_by(|a, b| a.record.cmp(&b.record));
    Ok(branches)
}
