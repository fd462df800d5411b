//! Ideal photon detection, post-selection and two-mode Kraus measurements.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;
use std::fmt;

use fock_core::{parse_spatial_label, spatial_label, Complex64, FockError, FockState, ModeId, OccupationVector, Pol};
use optics_elements::{apply, ElementSpec, OpticsError};
use serde::{Deserialize, Serialize};

/// Branches below this probability are dropped from listings.
pub const DROP_EPS: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DetectionError {
    #[error("precondition error: {0}")]
    Precondition(String),
    #[error("pattern error: {0}")]
    Pattern(String),
    #[error(transparent)]
    Fock(#[from] FockError),
    #[error(transparent)]
    Optics(#[from] OpticsError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Resolving {
    NumberOnly,
    PolarizationResolving,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Count(u32),
    Pol { h: u32, v: u32 },
}

impl Outcome {
    pub fn total(self) -> u32 {
        match self {
            Outcome::Count(n) => n,
            Outcome::Pol { h, v } => h + v,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Outcome::Count(n) => write!(f, "{n}"),
            Outcome::Pol { h: 0, v: 0 } => f.write_str("-"),
            Outcome::Pol { h, v } => {
                f.write_str(&"H".repeat(h as usize))?;
                f.write_str(&"V".repeat(v as usize))
            }
        }
    }
}

/// Per-detector outcomes, keyed by spatial mode. Displayed as `2:HV,3:-` or `2:1,3:0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DetectionPattern {
    pub resolving: Resolving,
    pub outcomes: BTreeMap<u32, Outcome>,
}

impl DetectionPattern {
    pub fn new(resolving: Resolving) -> Self {
        DetectionPattern { resolving, outcomes: BTreeMap::new() }
    }

    pub fn with(mut self, spatial: u32, outcome: Outcome) -> Self {
        self.outcomes.insert(spatial, outcome);
        self
    }

    pub fn modes(&self) -> Vec<u32> {
        self.outcomes.keys().copied().collect()
    }

    pub fn total(&self) -> u32 {
        self.outcomes.values().map(|o| o.total()).sum()
    }

    pub fn get(&self, spatial: u32) -> Option<Outcome> {
        self.outcomes.get(&spatial).copied()
    }

    pub fn count(&self, spatial: u32) -> u32 {
        self.get(spatial).map_or(0, Outcome::total)
    }

    pub fn h_total(&self) -> u32 {
        self.outcomes
            .values()
            .map(|o| match o {
                Outcome::Pol { h, .. } => *h,
                Outcome::Count(_) => 0,
            })
            .sum()
    }

    pub fn v_total(&self) -> u32 {
        self.outcomes
            .values()
            .map(|o| match o {
                Outcome::Pol { v, .. } => *v,
                Outcome::Count(_) => 0,
            })
            .sum()
    }

    /// Forget polarization.
    pub fn coarsen(&self) -> DetectionPattern {
        DetectionPattern {
            resolving: Resolving::NumberOnly,
            outcomes: self.outcomes.iter().map(|(&k, o)| (k, Outcome::Count(o.total()))).collect(),
        }
    }

    fn from_occupation(occ: &OccupationVector, modes: &[u32], resolving: Resolving) -> Self {
        let mut p = DetectionPattern::new(resolving);
        for &s in modes {
            let h = occ.count(ModeId::h(s));
            let v = occ.count(ModeId::v(s));
            let o = match resolving {
                Resolving::NumberOnly => Outcome::Count(h + v),
                Resolving::PolarizationResolving => Outcome::Pol { h, v },
            };
            p.outcomes.insert(s, o);
        }
        p
    }

    /// Whether a polarization-resolved occupation of the detected modes agrees with this pattern.
    fn admits(&self, occ: &OccupationVector) -> bool {
        self.outcomes.iter().all(|(&s, o)| {
            let h = occ.count(ModeId::h(s));
            let v = occ.count(ModeId::v(s));
            match *o {
                Outcome::Count(n) => h + v == n,
                Outcome::Pol { h: ph, v: pv } => h == ph && v == pv,
            }
        })
    }

    pub fn parse(text: &str) -> Result<Self, DetectionError> {
        let mut resolving = None;
        let mut p = BTreeMap::new();
        for item in text.split(',').filter(|s| !s.is_empty()) {
            let (m, o) =
                item.split_once(':').ok_or_else(|| DetectionError::Pattern(format!("missing ':' in {item:?}")))?;
            let s = parse_spatial_label(m).ok_or_else(|| DetectionError::Pattern(format!("bad mode {m:?}")))?;
            let (r, out) = if let Ok(n) = o.parse::<u32>() {
                (Resolving::NumberOnly, Outcome::Count(n))
            } else if o == "-" {
                (Resolving::PolarizationResolving, Outcome::Pol { h: 0, v: 0 })
            } else if !o.is_empty() && o.chars().all(|c| c == 'H' || c == 'V') {
                let h = o.chars().filter(|&c| c == 'H').count() as u32;
                (Resolving::PolarizationResolving, Outcome::Pol { h, v: o.len() as u32 - h })
            } else {
                return Err(DetectionError::Pattern(format!("bad outcome {o:?}")));
            };
            if resolving.is_some_and(|x| x != r) {
                return Err(DetectionError::Pattern("mixed detector classes".into()));
            }
            resolving = Some(r);
            if p.insert(s, out).is_some() {
                return Err(DetectionError::Pattern(format!("mode {m} repeated")));
            }
        }
        Ok(DetectionPattern { resolving: resolving.unwrap_or(Resolving::PolarizationResolving), outcomes: p })
    }
}

impl fmt::Display for DetectionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.outcomes.iter().map(|(&s, o)| format!("{}:{}", spatial_label(s), o)).collect();
        f.write_str(&parts.join(","))
    }
}

/// Conditional state of a branch.
#[derive(Clone, Debug, PartialEq)]
pub enum PostState {
    Pure(FockState),
    /// Classical ensemble of normalized states, weights summing to 1.
    Mixed(Vec<(f64, FockState)>),
    /// No surviving modes, or a zero-probability branch.
    Empty,
}

impl PostState {
    pub fn components(&self) -> Vec<(f64, &FockState)> {
        match self {
            PostState::Pure(s) => vec![(1.0, s)],
            PostState::Mixed(v) => v.iter().map(|(w, s)| (*w, s)).collect(),
            PostState::Empty => vec![],
        }
    }

    pub fn as_pure(&self) -> Option<&FockState> {
        match self {
            PostState::Pure(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutcomeBranch {
    pub pattern: DetectionPattern,
    pub probability: f64,
    pub post_state: PostState,
}

fn check_modes(state: &FockState, modes: &[u32]) -> Result<(), DetectionError> {
    for &s in modes {
        for p in Pol::BOTH {
            let m = ModeId::new(s, p);
            if !state.registry().contains(m) {
                return Err(FockError::UnknownMode(m).into());
            }
        }
    }
    Ok(())
}

/// Polarization-resolved projection: detected sub-occupation → (unnormalized rest, probability).
fn resolved_groups(
    state: &FockState,
    modes: &[u32],
) -> BTreeMap<OccupationVector, BTreeMap<OccupationVector, Complex64>> {
    let mut groups: BTreeMap<OccupationVector, BTreeMap<OccupationVector, Complex64>> = BTreeMap::new();
    for (occ, amp) in state.terms() {
        let (det, rest) = occ.split(|m| modes.contains(&m.spatial));
        *groups.entry(det).or_default().entry(rest).or_insert(Complex64::new(0.0, 0.0)) += amp;
    }
    groups
}

fn finish_component(
    state: &FockState,
    modes: &[u32],
    rest: BTreeMap<OccupationVector, Complex64>,
) -> Result<(f64, Option<FockState>), DetectionError> {
    let p: f64 = rest.values().map(|a| a.norm_sqr()).sum();
    let reg = state.registry().without_spatial(modes);
    if reg.is_empty() || p < DROP_EPS {
        return Ok((p, None));
    }
    let s = FockState::from_terms(&reg, rest)?.with_prune_eps(state.prune_eps());
    Ok((p, Some(s.normalize()?)))
}

fn assemble(pattern: DetectionPattern, parts: Vec<(f64, Option<FockState>)>) -> OutcomeBranch {
    let total: f64 = parts.iter().map(|(p, _)| p).sum();
    let kept: Vec<(f64, FockState)> = parts.into_iter().filter_map(|(p, s)| s.map(|s| (p, s))).collect();
    let post_state = if total < DROP_EPS || kept.is_empty() {
        PostState::Empty
    } else if kept.len() == 1 {
        PostState::Pure(kept.into_iter().next().unwrap().1)
    } else {
        let w: f64 = kept.iter().map(|(p, _)| p).sum();
        PostState::Mixed(kept.into_iter().map(|(p, s)| (p / w, s)).collect())
    };
    OutcomeBranch { pattern, probability: total, post_state }
}

/// All detection branches on `modes`, sorted by pattern; measured modes are removed.
pub fn enumerate_outcomes(
    state: &FockState,
    modes: &[u32],
    resolving: Resolving,
) -> Result<Vec<OutcomeBranch>, DetectionError> {
    check_modes(state, modes)?;
    let mut by_pattern: BTreeMap<DetectionPattern, Vec<(f64, Option<FockState>)>> = BTreeMap::new();
    for (det, rest) in resolved_groups(state, modes) {
        let pat = DetectionPattern::from_occupation(&det, modes, resolving);
        let part = finish_component(state, modes, rest)?;
        by_pattern.entry(pat).or_default().push(part);
    }
    Ok(by_pattern.into_iter().map(|(pat, parts)| assemble(pat, parts)).filter(|b| b.probability >= DROP_EPS).collect())
}

/// Project onto one pattern. Impossible patterns give probability 0 and an empty state.
pub fn post_select(state: &FockState, pattern: &DetectionPattern) -> Result<OutcomeBranch, DetectionError> {
    let modes = pattern.modes();
    check_modes(state, &modes)?;
    let mut parts = vec![];
    for (det, rest) in resolved_groups(state, &modes) {
        if pattern.admits(&det) {
            parts.push(finish_component(state, &modes, rest)?);
        }
    }
    Ok(assemble(pattern.clone(), parts))
}

/// Sub-normalized operator on the four modes `H_i, V_i, H_j, V_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementOperator {
    pub name: String,
    pub modes: (u32, u32),
    /// (input, output) → coefficient; inputs not listed are annihilated.
    pub terms: BTreeMap<(OccupationVector, OccupationVector), Complex64>,
}

/// Slot content in a two-mode Kraus term: vacuum, H or V.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Empty,
    H,
    V,
}

fn slot_occ(i: u32, a: Slot, j: u32, b: Slot) -> OccupationVector {
    let mut modes = vec![];
    for (s, x) in [(i, a), (j, b)] {
        match x {
            Slot::H => modes.push(ModeId::h(s)),
            Slot::V => modes.push(ModeId::v(s)),
            Slot::Empty => {}
        }
    }
    OccupationVector::from_modes(&modes)
}

impl MeasurementOperator {
    /// Diagonal operator from `(slot_i, slot_j, coefficient)` triples.
    pub fn diagonal(name: &str, i: u32, j: u32, diag: &[(Slot, Slot, f64)]) -> Self {
        let terms = diag
            .iter()
            .map(|&(a, b, c)| {
                let o = slot_occ(i, a, j, b);
                ((o.clone(), o), Complex64::new(c, 0.0))
            })
            .collect();
        MeasurementOperator { name: name.into(), modes: (i, j), terms }
    }

    pub fn coefficient(&self, a: Slot, b: Slot) -> Complex64 {
        let o = slot_occ(self.modes.0, a, self.modes.1, b);
        self.terms.get(&(o.clone(), o)).copied().unwrap_or_default()
    }

    fn acts_on(&self, m: ModeId) -> bool {
        m.spatial == self.modes.0 || m.spatial == self.modes.1
    }

    /// Largest singular value, by power iteration on K†K.
    pub fn max_singular_value(&self) -> f64 {
        let inputs: Vec<&OccupationVector> = {
            let mut v: Vec<_> = self.terms.keys().map(|(i, _)| i).collect();
            v.sort();
            v.dedup();
            v
        };
        let outputs: Vec<&OccupationVector> = {
            let mut v: Vec<_> = self.terms.keys().map(|(_, o)| o).collect();
            v.sort();
            v.dedup();
            v
        };
        let n = inputs.len();
        if n == 0 {
            return 0.0;
        }
        let mut k = vec![vec![Complex64::new(0.0, 0.0); n]; outputs.len()];
        for ((i, o), c) in &self.terms {
            let ci = inputs.iter().position(|x| *x == i).unwrap();
            let ro = outputs.iter().position(|x| *x == o).unwrap();
            k[ro][ci] += c;
        }
        let mut v: Vec<Complex64> = (0..n).map(|t| Complex64::new(1.0 + t as f64 * 0.1, 0.0)).collect();
        let mut lambda = 0.0;
        for _ in 0..500 {
            let kv: Vec<Complex64> = k.iter().map(|row| row.iter().zip(&v).map(|(a, b)| a * b).sum()).collect();
            let mut w = vec![Complex64::new(0.0, 0.0); n];
            for (r, row) in k.iter().enumerate() {
                for c in 0..n {
                    w[c] += row[c].conj() * kv[r];
                }
            }
            let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            lambda = norm / v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            v = w.into_iter().map(|x| x / norm).collect();
        }
        lambda.sqrt()
    }
}

/// Quantum filter: 1/4 on HH, VV and ∅V; 1/2 on V∅ and ∅∅.
pub fn qf_operator(i: u32, j: u32) -> MeasurementOperator {
    use Slot::*;
    MeasurementOperator::diagonal(
        "qf",
        i,
        j,
        &[(H, H, 0.25), (V, V, 0.25), (Empty, V, 0.25), (V, Empty, 0.5), (Empty, Empty, 0.5)],
    )
}

/// Modified quantum filter: 1/8 on HH and VV, 1/4 on ∅∅.
pub fn mqf_operator(i: u32, j: u32) -> MeasurementOperator {
    use Slot::*;
    MeasurementOperator::diagonal("mqf", i, j, &[(H, H, 0.125), (V, V, 0.125), (Empty, Empty, 0.25)])
}

/// Result of a Kraus step: the success branch; the complementary failure
/// branch has probability `1 - success.probability`.
pub fn apply_kraus(state: &FockState, op: &MeasurementOperator) -> Result<OutcomeBranch, DetectionError> {
    check_modes(state, &[op.modes.0, op.modes.1])?;
    let mut out: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
    for (occ, amp) in state.terms() {
        let (acted, rest) = occ.split(|m| op.acts_on(m));
        for ((inp, outp), c) in op.terms.range((acted.clone(), OccupationVector::vacuum())..) {
            if *inp != acted {
                break;
            }
            *out.entry(outp.merge(&rest)).or_insert(Complex64::new(0.0, 0.0)) += amp * c;
        }
    }
    let k = FockState::from_terms(state.registry(), out)?.with_prune_eps(state.prune_eps());
    let p = k.norm_sqr();
    let post_state = if p < DROP_EPS { PostState::Empty } else { PostState::Pure(k.normalize()?) };
    Ok(OutcomeBranch { pattern: DetectionPattern::new(Resolving::PolarizationResolving), probability: p, post_state })
}

fn check_dual_rail(state: &FockState, modes: &[u32]) -> Result<(), DetectionError> {
    for (occ, _) in state.terms() {
        for &s in modes {
            if occ.count(ModeId::h(s)) + occ.count(ModeId::v(s)) > 1 {
                return Err(DetectionError::Precondition(format!(
                    "more than one photon in fusion mode {}",
                    spatial_label(s)
                )));
            }
        }
    }
    Ok(())
}

/// PBS(a, b), R_{π/4}(b), polarization-resolved detection of `b`.
pub fn fusion_type1(state: &FockState, m_a: u32, m_b: u32) -> Result<Vec<OutcomeBranch>, DetectionError> {
    check_modes(state, &[m_a, m_b])?;
    check_dual_rail(state, &[m_a, m_b])?;
    let s = apply(state, &ElementSpec::pbs(m_a, m_b))?;
    let s = apply(&s, &ElementSpec::rot(FRAC_PI_4, m_b))?;
    enumerate_outcomes(&s, &[m_b], Resolving::PolarizationResolving)
}

pub fn type1_success(p: &DetectionPattern) -> bool {
    p.total() == 1
}

/// PBS(a, b), R_{π/4} on both outputs, polarization-resolved detection of both.
pub fn fusion_type2(state: &FockState, m_a: u32, m_b: u32) -> Result<Vec<OutcomeBranch>, DetectionError> {
    check_modes(state, &[m_a, m_b])?;
    check_dual_rail(state, &[m_a, m_b])?;
    let s = apply(state, &ElementSpec::pbs(m_a, m_b))?;
    let s = apply(&s, &ElementSpec::rot(FRAC_PI_4, m_a))?;
    let s = apply(&s, &ElementSpec::rot(FRAC_PI_4, m_b))?;
    enumerate_outcomes(&s, &[m_a, m_b], Resolving::PolarizationResolving)
}

/// One photon in each of the two detectors.
pub fn type2_success(p: &DetectionPattern) -> bool {
    p.outcomes.len() == 2 && p.outcomes.values().all(|o| o.total() == 1)
}
