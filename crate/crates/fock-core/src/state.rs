use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::mode::{spatial_label, ModeId, Registry};
use crate::FockError;

pub const DEFAULT_PRUNE_EPS: f64 = 1e-12;
const DEGENERATE_NORM: f64 = 1e-12;

/// Photon counts per mode. Only nonzero counts are stored, sorted by mode,
/// so equal occupations compare and hash equal regardless of registry.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationVector {
    counts: Vec<(ModeId, u32)>,
}

impl OccupationVector {
    pub fn vacuum() -> Self {
        Self::default()
    }

    pub fn from_counts(counts: impl IntoIterator<Item = (ModeId, u32)>) -> Self {
        let mut map: BTreeMap<ModeId, u32> = BTreeMap::new();
        for (m, n) in counts {
            *map.entry(m).or_insert(0) += n;
        }
        OccupationVector { counts: map.into_iter().filter(|&(_, n)| n > 0).collect() }
    }

    /// One photon per listed mode; repeated modes bunch.
    pub fn from_modes(modes: &[ModeId]) -> Self {
        Self::from_counts(modes.iter().map(|&m| (m, 1)))
    }

    pub fn count(&self, m: ModeId) -> u32 {
        match self.counts.binary_search_by(|(k, _)| k.cmp(&m)) {
            Ok(i) => self.counts[i].1,
            Err(_) => 0,
        }
    }

    pub fn total(&self) -> u32 {
        self.counts.iter().map(|&(_, n)| n).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ModeId, u32)> + '_ {
        self.counts.iter().copied()
    }

    pub fn with_delta(&self, m: ModeId, delta: i32) -> Option<Self> {
        let mut counts = self.counts.clone();
        match counts.binary_search_by(|(k, _)| k.cmp(&m)) {
            Ok(i) => {
                let n = counts[i].1 as i64 + delta as i64;
                if n < 0 {
                    return None;
                }
                if n == 0 {
                    counts.remove(i);
                } else {
                    counts[i].1 = n as u32;
                }
            }
            Err(i) => {
                if delta < 0 {
                    return None;
                }
                if delta > 0 {
                    counts.insert(i, (m, delta as u32));
                }
            }
        }
        Some(OccupationVector { counts })
    }

    /// Split into (counts on modes matching `pred`, the rest).
    pub fn split(&self, pred: impl Fn(ModeId) -> bool) -> (OccupationVector, OccupationVector) {
        let (a, b): (Vec<_>, Vec<_>) = self.counts.iter().partition(|(m, _)| pred(*m));
        (OccupationVector { counts: a }, OccupationVector { counts: b })
    }

    pub fn merge(&self, other: &OccupationVector) -> OccupationVector {
        Self::from_counts(self.iter().chain(other.iter()))
    }

    /// Product of factorials of the counts, i.e. the squared norm of the
    /// unnormalized monomial of creation operators.
    pub fn factorial_weight(&self) -> f64 {
        self.counts.iter().map(|&(_, n)| (1..=n).map(f64::from).product::<f64>()).product()
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.counts.is_empty() {
            return f.write_str("vac");
        }
        let parts: Vec<String> = self
            .counts
            .iter()
            .map(|&(m, n)| if n == 1 { m.to_string() } else { format!("{}^{}{}", m.pol, n, spatial_label(m.spatial)) })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Record used by the JSON state dump.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DumpRecord {
    pub mode_occupations: Vec<(u32, String, u32)>,
    pub re: f64,
    pub im: f64,
}

/// Sparse superposition of occupation vectors over a fixed registry.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    registry: Registry,
    terms: BTreeMap<OccupationVector, Complex64>,
    prune_eps: f64,
}

impl FockState {
    pub fn vacuum(registry: &Registry) -> Result<Self, FockError> {
        if registry.is_empty() {
            return Err(FockError::EmptyRegistry);
        }
        let mut terms = BTreeMap::new();
        terms.insert(OccupationVector::vacuum(), Complex64::new(1.0, 0.0));
        Ok(FockState { registry: registry.clone(), terms, prune_eps: DEFAULT_PRUNE_EPS })
    }

    pub fn zero(registry: &Registry) -> Self {
        FockState { registry: registry.clone(), terms: BTreeMap::new(), prune_eps: DEFAULT_PRUNE_EPS }
    }

    /// Build from explicit terms. Amplitudes with the same occupation add.
    pub fn from_terms(
        registry: &Registry,
        terms: impl IntoIterator<Item = (OccupationVector, Complex64)>,
    ) -> Result<Self, FockError> {
        let mut s = Self::zero(registry);
        for (occ, a) in terms {
            for (m, _) in occ.iter() {
                if !registry.contains(m) {
                    return Err(FockError::UnknownMode(m));
                }
            }
            *s.terms.entry(occ).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        Ok(s.pruned_in_place())
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn prune_eps(&self) -> f64 {
        self.prune_eps
    }

    pub fn with_prune_eps(mut self, eps: f64) -> Self {
        self.prune_eps = eps;
        self
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OccupationVector, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, occ: &OccupationVector) -> Complex64 {
        self.terms.get(occ).copied().unwrap_or_default()
    }

    fn check_mode(&self, m: ModeId) -> Result<(), FockError> {
        if self.registry.contains(m) {
            Ok(())
        } else {
            Err(FockError::UnknownMode(m))
        }
    }

    fn check_same(&self, other: &FockState) -> Result<(), FockError> {
        if self.registry == other.registry {
            Ok(())
        } else {
            Err(FockError::RegistryMismatch)
        }
    }

    fn pruned_in_place(mut self) -> Self {
        let eps = self.prune_eps;
        self.terms.retain(|_, a| a.norm() >= eps && a.norm() > 0.0);
        self
    }

    /// a†_m with the √(n+1) factor. Not normalized.
    pub fn create(&self, m: ModeId) -> Result<Self, FockError> {
        self.check_mode(m)?;
        let mut out = Self::zero(&self.registry).with_prune_eps(self.prune_eps);
        for (occ, a) in &self.terms {
            let n = occ.count(m);
            let next = occ.with_delta(m, 1).expect("increment");
            out.terms.insert(next, a * ((n + 1) as f64).sqrt());
        }
        Ok(out)
    }

    /// a_m with the √n factor.
    pub fn annihilate(&self, m: ModeId) -> Result<Self, FockError> {
        self.check_mode(m)?;
        let mut out = Self::zero(&self.registry).with_prune_eps(self.prune_eps);
        for (occ, a) in &self.terms {
            let n = occ.count(m);
            if n == 0 {
                continue;
            }
            let next = occ.with_delta(m, -1).expect("decrement");
            out.terms.insert(next, a * (n as f64).sqrt());
        }
        Ok(out)
    }

    /// Σ c · Π a† applied to this state; each monomial lists its modes.
    pub fn apply_creation_poly(&self, poly: &[(Complex64, Vec<ModeId>)]) -> Result<Self, FockError> {
        let mut acc = Self::zero(&self.registry).with_prune_eps(self.prune_eps);
        for (c, modes) in poly {
            let mut s = self.clone();
            for &m in modes {
                s = s.create(m)?;
            }
            acc = acc.add(&s.scale(*c))?;
        }
        Ok(acc)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for a in out.terms.values_mut() {
            *a *= c;
        }
        out.pruned_in_place()
    }

    pub fn add(&self, other: &FockState) -> Result<Self, FockError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (occ, a) in &other.terms {
            *out.terms.entry(occ.clone()).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        Ok(out.pruned_in_place())
    }

    /// Product state over the union of two disjoint registries.
    pub fn tensor(&self, other: &FockState) -> Result<Self, FockError> {
        if let Some(&m) = other.registry.modes().iter().find(|&&m| self.registry.contains(m)) {
            return Err(FockError::DuplicateMode(m));
        }
        let registry = self.registry.union(&other.registry);
        let mut terms = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                terms.insert(a.merge(b), x * y);
            }
        }
        let s = FockState { registry, terms, prune_eps: self.prune_eps };
        Ok(s.pruned_in_place())
    }

    pub fn superpose(pairs: &[(Complex64, &FockState)]) -> Result<Self, FockError> {
        let first = pairs.first().ok_or(FockError::EmptyRegistry)?;
        let mut acc = Self::zero(&first.1.registry).with_prune_eps(first.1.prune_eps);
        for (c, s) in pairs {
            acc = acc.add(&s.scale(*c))?;
        }
        Ok(acc)
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &FockState) -> Result<Complex64, FockError> {
        self.check_same(other)?;
        let (small, large, conj_small) =
            if self.terms.len() <= other.terms.len() { (self, other, true) } else { (other, self, false) };
        let mut acc = Complex64::new(0.0, 0.0);
        for (occ, a) in &small.terms {
            if let Some(b) = large.terms.get(occ) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&self) -> Result<Self, FockError> {
        let n = self.norm();
        if n < DEGENERATE_NORM {
            return Err(FockError::Degenerate(n));
        }
        let mut out = self.clone();
        for a in out.terms.values_mut() {
            *a /= n;
        }
        Ok(out)
    }

    /// Drop terms below `eps`; optionally renormalize afterwards.
    pub fn prune(&self, eps: f64, renormalize: bool) -> Result<Self, FockError> {
        let mut out = self.clone();
        if eps > 0.0 {
            out.terms.retain(|_, a| a.norm() >= eps);
        }
        if renormalize {
            out.normalize()
        } else {
            Ok(out)
        }
    }

    /// Same amplitudes over a larger registry (new modes in vacuum).
    pub fn extend_registry(&self, extra: &Registry) -> Self {
        FockState { registry: self.registry.union(extra), terms: self.terms.clone(), prune_eps: self.prune_eps }
    }

    /// Rebuild over a registry that must contain every occupied mode.
    pub fn with_registry(&self, registry: &Registry) -> Result<Self, FockError> {
        for occ in self.terms.keys() {
            for (m, _) in occ.iter() {
                if !registry.contains(m) {
                    return Err(FockError::UnknownMode(m));
                }
            }
        }
        Ok(FockState { registry: registry.clone(), terms: self.terms.clone(), prune_eps: self.prune_eps })
    }

    /// Total photon number if every term agrees.
    pub fn photon_number(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|o| o.total());
        let first = it.next()?;
        it.all(|n| n == first).then_some(first)
    }

    pub fn max_photon_number(&self) -> u32 {
        self.terms.keys().map(|o| o.total()).max().unwrap_or(0)
    }

    pub fn dump(&self) -> Vec<DumpRecord> {
        self.terms
            .iter()
            .map(|(occ, a)| DumpRecord {
                mode_occupations: occ.iter().map(|(m, n)| (m.spatial, m.pol.to_string(), n)).collect(),
                re: a.re,
                im: a.im,
            })
            .collect()
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (occ, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({:.6}{:+.6}i)|{}>", a.re, a.im, occ)?;
        }
        Ok(())
    }
}
