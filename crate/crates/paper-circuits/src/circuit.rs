use std::collections::BTreeSet;
use std::fmt;

use detection::{DetectionPattern, Outcome, Resolving};
use fock_core::{aux, primed, spatial_label, Pol};
use optics_elements::ElementSpec;
use serde::{Deserialize, Serialize};

use crate::CircuitError;

/// Named input source on explicit spatial modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Source {
    /// (|HH⟩ + |VV⟩)/√2
    Bell(u32, u32),
    /// (|H…H⟩ + |V…V⟩)/√2 on three or four modes.
    Ghz(Vec<u32>),
    /// (H_a H_c + V_a V_c + H_b H_d + V_b V_d)/2
    Hes([u32; 4]),
    /// One photon per listed mode.
    Sp(Vec<(u32, Pol)>),
    Vac(Vec<u32>),
    /// Three quadbits (a,b),(c,d),(e,f) in the form (1/2) Σ_i |i i i⟩.
    Qdc3([u32; 6]),
}

impl Source {
    pub fn modes(&self) -> Vec<u32> {
        match self {
            Source::Bell(a, b) => vec![*a, *b],
            Source::Ghz(m) | Source::Vac(m) => m.clone(),
            Source::Hes(m) => m.to_vec(),
            Source::Sp(m) => m.iter().map(|x| x.0).collect(),
            Source::Qdc3(m) => m.to_vec(),
        }
    }

    pub fn photons(&self) -> u32 {
        match self {
            Source::Bell(..) | Source::Hes(_) => 2,
            Source::Ghz(m) => m.len() as u32,
            Source::Sp(m) => m.len() as u32,
            Source::Vac(_) => 0,
            Source::Qdc3(_) => 3,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            Source::Bell(..) => "bell",
            Source::Ghz(m) if m.len() == 3 => "ghz3",
            Source::Ghz(_) => "ghz4",
            Source::Hes(_) => "hes",
            Source::Sp(_) => "sp",
            Source::Vac(_) => "vac",
            Source::Qdc3(_) => "qdc3",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<String> = match self {
            Source::Sp(m) => m
                .iter()
                .map(|&(s, p)| match p {
                    Pol::H => spatial_label(s),
                    Pol::V => format!("{}:V", spatial_label(s)),
                })
                .collect(),
            other => other.modes().into_iter().map(spatial_label).collect(),
        };
        write!(f, "input {} {}", self.keyword(), toks.join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KrausKind {
    Qf,
    Mqf,
}

impl KrausKind {
    pub fn keyword(self) -> &'static str {
        match self {
            KrausKind::Qf => "qf",
            KrausKind::Mqf => "mqf",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum StepOp {
    Element(ElementSpec),
    Detect { resolving: Resolving, modes: Vec<u32> },
    Kraus { kind: KrausKind, i: u32, j: u32 },
}

impl fmt::Display for StepOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepOp::Element(e) => write!(f, "{e}"),
            StepOp::Detect { resolving, modes } => {
                let r = match resolving {
                    Resolving::NumberOnly => "number",
                    Resolving::PolarizationResolving => "pol",
                };
                write!(f, "detect {r} {}", labels(modes))
            }
            StepOp::Kraus { kind, i, j } => {
                write!(f, "{} {} {}", kind.keyword(), spatial_label(*i), spatial_label(*j))
            }
        }
    }
}

/// Alternatives of partial detection records; a branch matches if any alternative agrees.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition(pub Vec<DetectionPattern>);

impl Condition {
    pub fn parse(text: &str) -> Result<Self, CircuitError> {
        let alts = text
            .split('|')
            .map(|a| DetectionPattern::parse(a).map_err(|e| CircuitError::Config(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        if alts.iter().any(|a| a.outcomes.is_empty()) {
            return Err(CircuitError::Config(format!("empty alternative in condition {text:?}")));
        }
        Ok(Condition(alts))
    }

    pub fn matches(&self, record: &Record) -> bool {
        self.0.iter().any(|alt| {
            alt.outcomes.iter().all(|(m, o)| match (record.outcomes.get(m), o) {
                (Some(r), Outcome::Count(n)) => r.total() == *n,
                (Some(r), o) => r == o,
                (None, _) => false,
            })
        })
    }

    pub fn modes(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.0.iter().flat_map(|p| p.modes()).collect();
        v.sort();
        v.dedup();
        v
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        f.write_str(&parts.join("|"))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub when: Option<Condition>,
    pub op: StepOp,
}

/// Detection outcomes and Kraus results accumulated along a branch.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Record {
    pub kraus: Vec<(String, bool)>,
    pub outcomes: std::collections::BTreeMap<u32, Outcome>,
}

impl Record {
    pub fn failed_kraus(&self) -> bool {
        self.kraus.iter().any(|(_, ok)| !ok)
    }

    pub fn count(&self, m: u32) -> u32 {
        self.outcomes.get(&m).map_or(0, |o| o.total())
    }

    fn pol(&self, m: u32) -> Option<(u32, u32)> {
        match self.outcomes.get(&m)? {
            Outcome::Pol { h, v } => Some((*h, *v)),
            Outcome::Count(_) => None,
        }
    }
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> =
            self.kraus.iter().map(|(n, ok)| format!("{n}:{}", if *ok { "ok" } else { "fail" })).collect();
        if !self.outcomes.is_empty() {
            let p: Vec<String> = self.outcomes.iter().map(|(&s, o)| format!("{}:{}", spatial_label(s), o)).collect();
            parts.push(p.join(","));
        }
        if parts.is_empty() {
            return f.write_str("-");
        }
        f.write_str(&parts.join(";"))
    }
}

/// Built-in acceptance predicates over a branch record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Predicate {
    /// Exactly two photons detected, same polarization, one in each mode of a listed pair.
    PolPair(Vec<(u32, u32)>),
    /// Exactly two photons detected over the modes, in two different detectors.
    TwoDistinct(Vec<u32>),
    /// Exactly one photon in each listed detector.
    OneEach(Vec<u32>),
    /// Two photons over the pair, excluding same-polarization double clicks in one detector.
    Type2(u32, u32),
    /// One photon in each detector of the pair, same polarization.
    PhiPlus(u32, u32),
    /// Exactly one photon over the listed detectors.
    SinglePhoton(Vec<u32>),
    /// No photon in the listed detectors.
    Vacuum(Vec<u32>),
    /// Exactly one H and one V photon over the listed detectors.
    HvPair(Vec<u32>),
    /// The conditional state reaches the target by a local correction.
    Correctable,
}

impl Predicate {
    pub fn keyword(&self) -> &'static str {
        match self {
            Predicate::PolPair(_) => "pol_pair",
            Predicate::TwoDistinct(_) => "two_distinct",
            Predicate::OneEach(_) => "one_each",
            Predicate::Type2(..) => "type2",
            Predicate::PhiPlus(..) => "phi_plus",
            Predicate::SinglePhoton(_) => "single_photon",
            Predicate::Vacuum(_) => "vacuum",
            Predicate::HvPair(_) => "hv_pair",
            Predicate::Correctable => "correctable",
        }
    }

    pub fn modes(&self) -> Vec<u32> {
        match self {
            Predicate::PolPair(p) => p.iter().flat_map(|&(a, b)| [a, b]).collect(),
            Predicate::TwoDistinct(m)
            | Predicate::OneEach(m)
            | Predicate::SinglePhoton(m)
            | Predicate::Vacuum(m)
            | Predicate::HvPair(m) => m.clone(),
            Predicate::Type2(a, b) | Predicate::PhiPlus(a, b) => vec![*a, *b],
            Predicate::Correctable => vec![],
        }
    }

    /// Record-only evaluation; `Correctable` is decided by the caller.
    pub fn holds(&self, r: &Record) -> bool {
        let total = |m: &[u32]| m.iter().map(|&x| r.count(x)).sum::<u32>();
        match self {
            Predicate::PolPair(pairs) => {
                let all: Vec<u32> = self.modes();
                total(&all) == 2
                    && pairs
                        .iter()
                        .any(|&(a, b)| matches!((r.pol(a), r.pol(b)), (Some(x), Some(y)) if x == y && x.0 + x.1 == 1))
            }
            Predicate::TwoDistinct(m) => total(m) == 2 && m.iter().filter(|&&x| r.count(x) == 1).count() == 2,
            Predicate::OneEach(m) => m.iter().all(|&x| r.count(x) == 1),
            Predicate::Type2(a, b) => {
                let same_pol_double = [a, b].iter().any(|&&x| matches!(r.pol(x), Some((2, 0)) | Some((0, 2))));
                total(&[*a, *b]) == 2 && !same_pol_double
            }
            Predicate::PhiPlus(a, b) => {
                matches!((r.pol(*a), r.pol(*b)), (Some(x), Some(y)) if x == y && x.0 + x.1 == 1)
            }
            Predicate::SinglePhoton(m) => total(m) == 1,
            Predicate::Vacuum(m) => total(m) == 0,
            Predicate::HvPair(m) => {
                let (mut h, mut v) = (0, 0);
                for &x in m {
                    if let Some((a, b)) = r.pol(x) {
                        h += a;
                        v += b;
                    } else if r.count(x) > 0 {
                        return false;
                    }
                }
                h == 1 && v == 1
            }
            Predicate::Correctable => true,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = self.modes();
        if m.is_empty() {
            f.write_str(self.keyword())
        } else {
            write!(f, "{} {}", self.keyword(), labels(&m))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Acceptance {
    pub when: Option<Condition>,
    pub predicate: Predicate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetKind {
    /// (HH + VV)/√2
    Bell,
    /// (HH − VV)/√2
    PhiMinus,
    /// (HV + VH)/√2
    PsiPlus,
    Ghz,
    Hes,
    /// (1/2) Σ_i |i⟩^⊗n over quadbits given as port pairs.
    QuadGhz,
    Qdc2,
    Qdc3,
    /// Star form: centre is the second quadbit.
    Qdc4,
    TwoBell,
    /// (Φ⁺Φ⁺ + Ψ⁺Ψ⁺)/√2 on (a,b),(c,d).
    BellMix,
}

impl TargetKind {
    pub const ALL: [TargetKind; 11] = [
        TargetKind::Bell,
        TargetKind::PhiMinus,
        TargetKind::PsiPlus,
        TargetKind::Ghz,
        TargetKind::Hes,
        TargetKind::QuadGhz,
        TargetKind::Qdc2,
        TargetKind::Qdc3,
        TargetKind::Qdc4,
        TargetKind::TwoBell,
        TargetKind::BellMix,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            TargetKind::Bell => "bell",
            TargetKind::PhiMinus => "phi-",
            TargetKind::PsiPlus => "psi+",
            TargetKind::Ghz => "ghz",
            TargetKind::Hes => "hes",
            TargetKind::QuadGhz => "quadghz",
            TargetKind::Qdc2 => "qdc2",
            TargetKind::Qdc3 => "qdc3",
            TargetKind::Qdc4 => "qdc4",
            TargetKind::TwoBell => "twobell",
            TargetKind::BellMix => "bellmix",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == s)
    }

    pub fn arity_ok(self, n: usize) -> bool {
        match self {
            TargetKind::Bell | TargetKind::PhiMinus | TargetKind::PsiPlus => n == 2,
            TargetKind::Ghz => n >= 2,
            TargetKind::Hes | TargetKind::Qdc2 | TargetKind::TwoBell | TargetKind::BellMix => n == 4,
            TargetKind::QuadGhz => n >= 4 && n % 2 == 0,
            TargetKind::Qdc3 => n == 6,
            TargetKind::Qdc4 => n == 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub kind: TargetKind,
    pub modes: Vec<u32>,
}

impl TargetSpec {
    pub fn new(kind: TargetKind, modes: Vec<u32>) -> Result<Self, CircuitError> {
        if !kind.arity_ok(modes.len()) {
            return Err(CircuitError::Config(format!("target {} cannot take {} modes", kind.keyword(), modes.len())));
        }
        let set: BTreeSet<u32> = modes.iter().copied().collect();
        if set.len() != modes.len() {
            return Err(CircuitError::Config("repeated mode in target".into()));
        }
        Ok(TargetSpec { kind, modes })
    }

    /// Spatial ports of each photon.
    pub fn photons(&self) -> Vec<Vec<u32>> {
        match self.kind {
            TargetKind::Bell
            | TargetKind::PhiMinus
            | TargetKind::PsiPlus
            | TargetKind::Ghz
            | TargetKind::TwoBell
            | TargetKind::BellMix => self.modes.iter().map(|&m| vec![m]).collect(),
            _ => self.modes.chunks(2).map(|c| c.to_vec()).collect(),
        }
    }
}

impl fmt::Display for TargetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind.keyword(), labels(&self.modes))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Recycle {
    pub target: TargetSpec,
    pub restore: Vec<ElementSpec>,
}

/// Declared mode ranges: `1..=modes`, `1'..=primed'`, `a1..=aN`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Declared {
    pub modes: u32,
    pub primed: u32,
    pub aux: u32,
}

impl Declared {
    pub fn spatial(&self) -> Vec<u32> {
        (1..=self.modes).chain((1..=self.primed).map(primed)).chain((1..=self.aux).map(aux)).collect()
    }

    pub fn contains(&self, s: u32) -> bool {
        self.spatial().contains(&s)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub name: String,
    pub declared: Declared,
    pub inputs: Vec<Source>,
    pub steps: Vec<Step>,
    pub accept: Vec<Acceptance>,
    /// Common correction applied to every success branch.
    pub fix: Vec<ElementSpec>,
    pub target: Option<TargetSpec>,
    /// Applied after the per-pattern correction, before comparing with `goal`.
    pub finish: Vec<ElementSpec>,
    pub goal: Option<TargetSpec>,
    pub recycle: Option<Recycle>,
    pub partition: Option<(Vec<u32>, Vec<u32>)>,
}

pub(crate) fn labels(m: &[u32]) -> String {
    m.iter().map(|&s| spatial_label(s)).collect::<Vec<_>>().join(" ")
}

impl CircuitSpec {
    pub fn new(name: &str, modes: u32, primed: u32) -> Self {
        CircuitSpec { name: name.into(), declared: Declared { modes, primed, aux: 0 }, ..Default::default() }
    }

    pub fn input(&mut self, s: Source) -> &mut Self {
        self.inputs.push(s);
        self
    }

    pub fn el(&mut self, e: ElementSpec) -> &mut Self {
        self.steps.push(Step { when: None, op: StepOp::Element(e) });
        self
    }

    pub fn els(&mut self, es: impl IntoIterator<Item = ElementSpec>) -> &mut Self {
        for e in es {
            self.el(e);
        }
        self
    }

    pub fn when_el(&mut self, c: &Condition, e: ElementSpec) -> &mut Self {
        self.steps.push(Step { when: Some(c.clone()), op: StepOp::Element(e) });
        self
    }

    pub fn detect(&mut self, resolving: Resolving, modes: &[u32]) -> &mut Self {
        self.steps.push(Step { when: None, op: StepOp::Detect { resolving, modes: modes.to_vec() } });
        self
    }

    pub fn kraus(&mut self, kind: KrausKind, i: u32, j: u32) -> &mut Self {
        self.steps.push(Step { when: None, op: StepOp::Kraus { kind, i, j } });
        self
    }

    pub fn accept(&mut self, p: Predicate) -> &mut Self {
        self.accept.push(Acceptance { when: None, predicate: p });
        self
    }

    pub fn photon_count(&self) -> u32 {
        self.inputs.iter().map(Source::photons).sum()
    }

    /// Modes referenced anywhere in the circuit.
    fn referenced(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.inputs.iter().flat_map(|s| s.modes()).collect();
        for st in &self.steps {
            match &st.op {
                StepOp::Element(e) => v.extend(&e.spatial),
                StepOp::Detect { modes, .. } => v.extend(modes),
                StepOp::Kraus { i, j, .. } => v.extend([*i, *j]),
            }
            if let Some(c) = &st.when {
                v.extend(c.modes());
            }
        }
        for a in &self.accept {
            v.extend(a.predicate.modes());
        }
        v
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        let declared = self.declared.spatial();
        for m in self.referenced() {
            if !declared.contains(&m) {
                return Err(CircuitError::UndeclaredMode(spatial_label(m)));
            }
        }
        let mut seen = BTreeSet::new();
        for s in &self.inputs {
            for m in s.modes() {
                if !seen.insert(m) {
                    return Err(CircuitError::Config(format!("mode {} fed by two sources", spatial_label(m))));
                }
            }
        }
        let mut dead = BTreeSet::new();
        for st in &self.steps {
            let used: Vec<u32> = match &st.op {
                StepOp::Element(e) => e.spatial.clone(),
                StepOp::Detect { modes, .. } => modes.clone(),
                StepOp::Kraus { i, j, .. } => vec![*i, *j],
            };
            if let Some(m) = used.iter().find(|m| dead.contains(*m)) {
                return Err(CircuitError::Config(format!(
                    "mode {} used after destructive detection",
                    spatial_label(*m)
                )));
            }
            if let (StepOp::Detect { modes, .. }, None) = (&st.op, &st.when) {
                dead.extend(modes.iter().copied());
            }
        }
        if self.accept.iter().any(|a| a.predicate == Predicate::Correctable) && self.target.is_none() {
            return Err(CircuitError::Config("`correctable` needs a target".into()));
        }
        Ok(())
    }
}
