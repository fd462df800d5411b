//! Named circuits, target states, quadbit encoding and success-branch processing.

mod builders;
mod circuit;
mod correct;
mod exec;
mod states;

pub use builders::{
    build, build_b, build_b_checkpoint, build_bell_sp4, build_ghz_ballistic, build_ghz_fusion, build_j1, build_j2,
    build_k1, build_k1_qdc3, build_k2, build_k3, build_t3, catalogue, J2Source, K3Ancilla, K3Inputs, B_REPAIRABLE,
    CATALOGUE,
};
pub use circuit::{
    Acceptance, CircuitSpec, Condition, Declared, KrausKind, Predicate, Record, Recycle, Source, Step, StepOp,
    TargetKind, TargetSpec,
};
pub use correct::{
    apply_padded, correction_aux, dictionary_generators, dictionary_size, fidelity, fidelity_report, fidelity_with,
    find_correction, fixed_state, fourier_network, is_accepted, process_branch, synthesize, Correction, LocalOp,
    Method, Processed, FIDELITY_TOL,
};
pub use exec::{execute, Branch, DEFAULT_PHOTON_CAP};
pub use states::{initial_state, quadbit_fourier, source_state, target_state, QuadbitCodec};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CircuitError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("mode error: {0} is not declared")]
    UndeclaredMode(String),
    #[error("encoding error: {0}")]
    Encoding(String),
    #[error("resource error: {photons} photons exceed the cap of {cap}")]
    Resource { photons: u32, cap: u32 },
    #[error(transparent)]
    Fock(#[from] fock_core::FockError),
    #[error(transparent)]
    Optics(#[from] optics_elements::OpticsError),
    #[error(transparent)]
    Detection(#[from] detection::DetectionError),
}
