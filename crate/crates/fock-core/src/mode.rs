use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::FockError;

/// Primed spatial mode `n'` is stored as `PRIMED_OFFSET + n`.
pub const PRIMED_OFFSET: u32 = 100;
/// Auxiliary vacuum modes used by correction networks: `aN` is `AUX_OFFSET + N`.
pub const AUX_OFFSET: u32 = 200;

pub fn primed(n: u32) -> u32 {
    PRIMED_OFFSET + n
}

pub fn aux(n: u32) -> u32 {
    AUX_OFFSET + n
}

/// Human label for a spatial index: `3`, `3'` or `a1`.
pub fn spatial_label(s: u32) -> String {
    if s >= AUX_OFFSET {
        format!("a{}", s - AUX_OFFSET)
    } else if s >= PRIMED_OFFSET {
        format!("{}'", s - PRIMED_OFFSET)
    } else {
        s.to_string()
    }
}

/// Inverse of [`spatial_label`].
pub fn parse_spatial_label(tok: &str) -> Option<u32> {
    if let Some(rest) = tok.strip_prefix('a') {
        let n: u32 = rest.parse().ok()?;
        return (n < 1000).then_some(AUX_OFFSET + n);
    }
    if let Some(rest) = tok.strip_suffix('\'') {
        let n: u32 = rest.parse().ok()?;
        return (n < PRIMED_OFFSET).then_some(PRIMED_OFFSET + n);
    }
    let n: u32 = tok.parse().ok()?;
    (n < PRIMED_OFFSET).then_some(n)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pol {
    H,
    V,
}

impl Pol {
    pub const BOTH: [Pol; 2] = [Pol::H, Pol::V];

    pub fn index(self) -> usize {
        match self {
            Pol::H => 0,
            Pol::V => 1,
        }
    }
}

impl fmt::Display for Pol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pol::H => "H",
            Pol::V => "V",
        })
    }
}

/// One polarization sub-mode of a spatial mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeId {
    pub spatial: u32,
    pub pol: Pol,
}

impl ModeId {
    pub const fn new(spatial: u32, pol: Pol) -> Self {
        ModeId { spatial, pol }
    }

    pub const fn h(spatial: u32) -> Self {
        ModeId { spatial, pol: Pol::H }
    }

    pub const fn v(spatial: u32) -> Self {
        ModeId { spatial, pol: Pol::V }
    }
}

impl fmt::Display for ModeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.pol, spatial_label(self.spatial))
    }
}

/// Sorted, duplicate-free set of modes shared by every term of a state.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Registry(Arc<Vec<ModeId>>);

impl Registry {
    pub fn new(modes: impl IntoIterator<Item = ModeId>) -> Result<Self, FockError> {
        let mut v: Vec<ModeId> = modes.into_iter().collect();
        v.sort();
        for w in v.windows(2) {
            if w[0] == w[1] {
                return Err(FockError::DuplicateMode(w[0]));
            }
        }
        Ok(Registry(Arc::new(v)))
    }

    /// Both polarizations of every listed spatial mode.
    pub fn from_spatial(spatial: impl IntoIterator<Item = u32>) -> Result<Self, FockError> {
        Self::new(spatial.into_iter().flat_map(|s| Pol::BOTH.map(|p| ModeId::new(s, p))))
    }

    pub fn modes(&self) -> &[ModeId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, m: ModeId) -> bool {
        self.0.binary_search(&m).is_ok()
    }

    pub fn contains_spatial(&self, s: u32) -> bool {
        self.contains(ModeId::h(s)) || self.contains(ModeId::v(s))
    }

    pub fn spatial_modes(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.0.iter().map(|m| m.spatial).collect();
        out.dedup();
        out
    }

    pub fn union(&self, other: &Registry) -> Registry {
        if self == other {
            return self.clone();
        }
        let mut v: Vec<ModeId> = self.0.iter().chain(other.0.iter()).copied().collect();
        v.sort();
        v.dedup();
        Registry(Arc::new(v))
    }

    pub fn without_spatial(&self, spatial: &[u32]) -> Registry {
        Registry(Arc::new(self.0.iter().copied().filter(|m| !spatial.contains(&m.spatial)).collect()))
    }
}
