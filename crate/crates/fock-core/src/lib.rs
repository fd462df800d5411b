//! Sparse bosonic Fock states over polarization/spatial modes.
//!
//! Kets are normalized: `a†ⁿ|0⟩ = √(n!) |n⟩`.

mod mode;
mod state;

pub use mode::{aux, parse_spatial_label, primed, spatial_label, ModeId, Pol, Registry, AUX_OFFSET, PRIMED_OFFSET};
pub use num_complex::Complex64;
pub use state::{DumpRecord, FockState, OccupationVector, DEFAULT_PRUNE_EPS};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FockError {
    #[error("configuration error: empty mode registry")]
    EmptyRegistry,
    #[error("configuration error: duplicate mode {0}")]
    DuplicateMode(ModeId),
    #[error("mode error: {0} is not in the registry")]
    UnknownMode(ModeId),
    #[error("registry mismatch between operands")]
    RegistryMismatch,
    #[error("degenerate state: norm {0:e} too small to normalize")]
    Degenerate(f64),
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}
