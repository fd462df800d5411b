//! Passive linear-optical elements as mode unitaries, and their action on Fock states.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use fock_core::{spatial_label, Complex64, FockError, FockState, ModeId, OccupationVector, Pol};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OpticsError {
    #[error("parameter error: r_sq = {0} outside [0, 1]")]
    ReflectivityOutOfRange(f64),
    #[error("parameter error: {kind} needs {expected} spatial modes, got {got}")]
    Arity { kind: &'static str, expected: usize, got: usize },
    #[error("parameter error: repeated spatial mode {0}")]
    RepeatedMode(String),
    #[error(transparent)]
    Fock(#[from] FockError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ElementKind {
    BeamSplitter { r_sq: f64 },
    PolarizationRotator { theta: f64 },
    Pbs,
    PhaseShifter { phi: f64 },
    FourPort,
}

impl ElementKind {
    pub fn arity(&self) -> usize {
        match self {
            ElementKind::BeamSplitter { .. } | ElementKind::Pbs => 2,
            ElementKind::PolarizationRotator { .. } | ElementKind::PhaseShifter { .. } => 1,
            ElementKind::FourPort => 4,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ElementKind::BeamSplitter { .. } => "bs",
            ElementKind::PolarizationRotator { .. } => "rot",
            ElementKind::Pbs => "pbs",
            ElementKind::PhaseShifter { .. } => "phase",
            ElementKind::FourPort => "fourport",
        }
    }
}

/// An element placed on an ordered list of spatial modes. The first mode of a
/// beam splitter is the port that maps to `t a1 + r a2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementSpec {
    pub kind: ElementKind,
    pub spatial: Vec<u32>,
}

impl ElementSpec {
    pub fn new(kind: ElementKind, spatial: Vec<u32>) -> Result<Self, OpticsError> {
        if spatial.len() != kind.arity() {
            return Err(OpticsError::Arity { kind: kind.name(), expected: kind.arity(), got: spatial.len() });
        }
        for (i, s) in spatial.iter().enumerate() {
            if spatial[..i].contains(s) {
                return Err(OpticsError::RepeatedMode(spatial_label(*s)));
            }
        }
        if let ElementKind::BeamSplitter { r_sq } = kind {
            if !(0.0..=1.0).contains(&r_sq) || r_sq.is_nan() {
                return Err(OpticsError::ReflectivityOutOfRange(r_sq));
            }
        }
        Ok(ElementSpec { kind, spatial })
    }

    pub fn bs(r_sq: f64, m1: u32, m2: u32) -> Result<Self, OpticsError> {
        Self::new(ElementKind::BeamSplitter { r_sq }, vec![m1, m2])
    }

    /// 50:50 beam splitter; panics only on repeated modes.
    pub fn bs50(m1: u32, m2: u32) -> Self {
        Self::bs(0.5, m1, m2).expect("distinct modes")
    }

    pub fn rot(theta: f64, m: u32) -> Self {
        ElementSpec { kind: ElementKind::PolarizationRotator { theta }, spatial: vec![m] }
    }

    pub fn pbs(m1: u32, m2: u32) -> Self {
        Self::new(ElementKind::Pbs, vec![m1, m2]).expect("distinct modes")
    }

    pub fn phase(phi: f64, m: u32) -> Self {
        ElementSpec { kind: ElementKind::PhaseShifter { phi }, spatial: vec![m] }
    }

    pub fn four_port(modes: [u32; 4]) -> Result<Self, OpticsError> {
        Self::new(ElementKind::FourPort, modes.to_vec())
    }

    /// H and V of each spatial mode, in mode order.
    pub fn acted_modes(&self) -> Vec<ModeId> {
        self.spatial.iter().flat_map(|&s| Pol::BOTH.map(|p| ModeId::new(s, p))).collect()
    }

    pub fn unitary(&self) -> Result<ModeUnitary, OpticsError> {
        let m = match self.kind {
            ElementKind::BeamSplitter { r_sq } => bs_unitary(r_sq)?,
            ElementKind::PolarizationRotator { theta } => rotator_unitary(theta),
            ElementKind::Pbs => pbs_unitary(),
            ElementKind::PhaseShifter { phi } => phase_unitary(phi),
            ElementKind::FourPort => four_port_unitary(),
        };
        Ok(m.on_modes(self.acted_modes()))
    }

    /// DSL statement for this element.
    pub fn to_dsl(&self) -> String {
        let modes: Vec<String> = self.spatial.iter().map(|&s| spatial_label(s)).collect();
        let modes = modes.join(" ");
        match self.kind {
            ElementKind::BeamSplitter { r_sq } => format!("bs {} {}", format_ratio(r_sq), modes),
            ElementKind::PolarizationRotator { theta } => {
                format!("rot {} {}", format_angle(theta), modes)
            }
            ElementKind::Pbs => format!("pbs {modes}"),
            ElementKind::PhaseShifter { phi } => format!("phase {} {}", format_angle(phi), modes),
            ElementKind::FourPort => format!("fourport {modes}"),
        }
    }

    /// Element undoing this one.
    pub fn inverse(&self) -> ElementSpec {
        match self.kind {
            ElementKind::BeamSplitter { .. } => {
                ElementSpec { kind: self.kind, spatial: vec![self.spatial[1], self.spatial[0]] }
            }
            ElementKind::PolarizationRotator { theta } => Self::rot(-theta, self.spatial[0]),
            ElementKind::PhaseShifter { phi } => Self::phase(-phi, self.spatial[0]),
            ElementKind::Pbs => self.clone(),
            ElementKind::FourPort => panic!("four-port inverse is not an element of the catalogue"),
        }
    }
}

impl fmt::Display for ElementSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dsl())
    }
}

/// Unitary acting on creation operators: `a†_in → Σ_out matrix[out][in] a†_out`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeUnitary {
    pub modes: Vec<ModeId>,
    pub matrix: Vec<Vec<Complex64>>,
}

fn zeros(n: usize) -> Vec<Vec<Complex64>> {
    vec![vec![Complex64::new(0.0, 0.0); n]; n]
}

/// Placeholder mode labels for element matrices not yet bound to a circuit:
/// index `2k` is H of port k, `2k+1` is V of port k.
fn port_modes(ports: u32) -> Vec<ModeId> {
    (0..ports).flat_map(|k| Pol::BOTH.map(|p| ModeId::new(k, p))).collect()
}

pub fn bs_unitary(r_sq: f64) -> Result<ModeUnitary, OpticsError> {
    if !(0.0..=1.0).contains(&r_sq) || r_sq.is_nan() {
        return Err(OpticsError::ReflectivityOutOfRange(r_sq));
    }
    let r = r_sq.sqrt();
    let t = (1.0 - r_sq).sqrt();
    let mut m = zeros(4);
    for p in 0..2 {
        let (a, b) = (p, 2 + p);
        m[a][a] = t.into();
        m[b][a] = r.into();
        m[a][b] = (-r).into();
        m[b][b] = t.into();
    }
    Ok(ModeUnitary { modes: port_modes(2), matrix: m })
}

pub fn rotator_unitary(theta: f64) -> ModeUnitary {
    let (s, c) = theta.sin_cos();
    let mut m = zeros(2);
    m[0][0] = c.into();
    m[1][0] = s.into();
    m[0][1] = (-s).into();
    m[1][1] = c.into();
    ModeUnitary { modes: port_modes(1), matrix: m }
}

pub fn pbs_unitary() -> ModeUnitary {
    let mut m = zeros(4);
    m[0][0] = 1.0.into();
    m[2][2] = 1.0.into();
    m[3][1] = 1.0.into();
    m[1][3] = 1.0.into();
    ModeUnitary { modes: port_modes(2), matrix: m }
}

pub fn phase_unitary(phi: f64) -> ModeUnitary {
    let e = Complex64::from_polar(1.0, phi);
    let mut m = zeros(2);
    m[0][0] = e;
    m[1][1] = e;
    ModeUnitary { modes: port_modes(1), matrix: m }
}

/// Columns: images of ports 0..3 (e.g. 3, 5, 3', 5'), same on both polarizations.
pub const FOUR_PORT_COLUMNS: [[f64; 4]; 4] =
    [[1.0, 1.0, 1.0, 1.0], [-1.0, 1.0, -1.0, 1.0], [-1.0, -1.0, 1.0, 1.0], [1.0, -1.0, -1.0, 1.0]];

pub fn four_port_unitary() -> ModeUnitary {
    let mut m = zeros(8);
    for (input, col) in FOUR_PORT_COLUMNS.iter().enumerate() {
        for (output, &x) in col.iter().enumerate() {
            for p in 0..2 {
                m[2 * output + p][2 * input + p] = (x / 2.0).into();
            }
        }
    }
    ModeUnitary { modes: port_modes(4), matrix: m }
}

impl ModeUnitary {
    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    pub fn on_modes(mut self, modes: Vec<ModeId>) -> Self {
        assert_eq!(modes.len(), self.modes.len());
        self.modes = modes;
        self
    }

    pub fn identity(modes: Vec<ModeId>) -> Self {
        let mut m = zeros(modes.len());
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1.0.into();
        }
        ModeUnitary { modes, matrix: m }
    }

    /// Largest entry of |U†U − I|.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += self.matrix[k][i].conj() * self.matrix[k][j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).norm());
            }
        }
        worst
    }

    /// `after ∘ self` on the same mode list.
    pub fn then(&self, after: &ModeUnitary) -> ModeUnitary {
        assert_eq!(self.modes, after.modes, "compose on identical mode lists");
        let n = self.dim();
        let mut m = zeros(n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    m[i][j] += after.matrix[i][k] * self.matrix[k][j];
                }
            }
        }
        ModeUnitary { modes: self.modes.clone(), matrix: m }
    }

    pub fn adjoint(&self) -> ModeUnitary {
        let n = self.dim();
        let mut m = zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[i][j] = self.matrix[j][i].conj();
            }
        }
        ModeUnitary { modes: self.modes.clone(), matrix: m }
    }

    fn index_of(&self, m: ModeId) -> Option<usize> {
        self.modes.iter().position(|&x| x == m)
    }

    /// Output distribution of a normalized ket living only on this unitary's modes.
    fn lift_ket(&self, occ: &OccupationVector) -> Vec<(OccupationVector, Complex64)> {
        let mut poly: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
        poly.insert(OccupationVector::vacuum(), Complex64::new(1.0 / occ.factorial_weight().sqrt(), 0.0));
        for (m, n) in occ.iter() {
            let col = self.index_of(m).expect("mode on unitary");
            for _ in 0..n {
                let mut next: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
                for (mono, c) in &poly {
                    for (out, row) in self.matrix.iter().enumerate() {
                        let u = row[col];
                        if u.norm_sqr() == 0.0 {
                            continue;
                        }
                        let key = mono.with_delta(self.modes[out], 1).expect("increment");
                        *next.entry(key).or_insert(Complex64::new(0.0, 0.0)) += c * u;
                    }
                }
                poly = next;
            }
        }
        poly.into_iter()
            .map(|(mono, c)| {
                let w = mono.factorial_weight().sqrt();
                (mono, c * w)
            })
            .collect()
    }
}

/// Apply a mode unitary by substituting each creation operator.
pub fn apply_unitary(state: &FockState, u: &ModeUnitary) -> Result<FockState, OpticsError> {
    for &m in &u.modes {
        if !state.registry().contains(m) {
            return Err(FockError::UnknownMode(m).into());
        }
    }
    let mut cache: BTreeMap<OccupationVector, Vec<(OccupationVector, Complex64)>> = BTreeMap::new();
    let mut out: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
    for (occ, amp) in state.terms() {
        let (acted, rest) = occ.split(|m| u.modes.contains(&m));
        let image = cache.entry(acted.clone()).or_insert_with(|| u.lift_ket(&acted));
        for (o, c) in image.iter() {
            let key = if rest.total() == 0 { o.clone() } else { o.merge(&rest) };
            *out.entry(key).or_insert(Complex64::new(0.0, 0.0)) += amp * c;
        }
    }
    let eps = state.prune_eps();
    let s = FockState::from_terms(state.registry(), out.into_iter().filter(|(_, a)| a.norm() >= eps))?;
    Ok(s.with_prune_eps(eps))
}

pub fn apply(state: &FockState, element: &ElementSpec) -> Result<FockState, OpticsError> {
    apply_unitary(state, &element.unitary()?)
}

pub fn apply_all(state: &FockState, elements: &[ElementSpec]) -> Result<FockState, OpticsError> {
    let mut s = state.clone();
    for e in elements {
        s = apply(&s, e)?;
    }
    Ok(s)
}

const PI_DENOMS: [i64; 7] = [1, 2, 3, 4, 6, 8, 12];

fn pi_frac(k: i64, d: i64) -> f64 {
    k as f64 * PI / d as f64
}

/// `pi/4`, `-3pi/4`, `0`, or the shortest round-trip decimal.
pub fn format_angle(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    for d in PI_DENOMS {
        for k in -4 * d..=4 * d {
            if k != 0 && pi_frac(k, d) == x {
                let sign = if k < 0 { "-" } else { "" };
                let num = if k.abs() == 1 { String::new() } else { k.abs().to_string() };
                let den = if d == 1 { String::new() } else { format!("/{d}") };
                return format!("{sign}{num}pi{den}");
            }
        }
    }
    format!("{x:?}")
}

pub fn parse_angle(tok: &str) -> Option<f64> {
    if let Some(idx) = tok.find("pi") {
        let (head, tail) = tok.split_at(idx);
        let tail = &tail[2..];
        let (neg, head) = match head.strip_prefix('-') {
            Some(h) => (true, h),
            None => (false, head),
        };
        let head = head.strip_suffix('*').unwrap_or(head);
        let k: i64 = if head.is_empty() { 1 } else { head.parse().ok()? };
        let d: i64 = if tail.is_empty() { 1 } else { tail.strip_prefix('/')?.parse().ok()? };
        if d <= 0 || k < 0 || k > 1_000_000 {
            return None;
        }
        let k = if neg { -k } else { k };
        return Some(pi_frac(k, d));
    }
    let v: f64 = tok.parse().ok()?;
    v.is_finite().then_some(v)
}

/// `1/2`, `2/3`, `0`, `1`, or the shortest round-trip decimal.
pub fn format_ratio(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x == 1.0 {
        return "1".into();
    }
    for d in 2..=16i64 {
        for k in 1..d {
            if k as f64 / d as f64 == x {
                return format!("{k}/{d}");
            }
        }
    }
    format!("{x:?}")
}

pub fn parse_ratio(tok: &str) -> Option<f64> {
    if let Some((a, b)) = tok.split_once('/') {
        let k: i64 = a.parse().ok()?;
        let d: i64 = b.parse().ok()?;
        if d <= 0 {
            return None;
        }
        return Some(k as f64 / d as f64);
    }
    let v: f64 = tok.parse().ok()?;
    v.is_finite().then_some(v)
}
