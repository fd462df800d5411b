//! Protocol runs, branch classification, entanglement and resource-table reproduction.

mod entangle;
mod k3report;
mod protocol;
mod table;

use paper_circuits::CircuitError;

pub use entangle::{entanglement_report, is_product};
pub use k3report::{k3_no_ancilla_report, EventClass, NoAncillaReport};
pub use protocol::{
    format_rational, nearest_rational, photon_cap, retry_adjusted, run_protocol, run_protocol_with_cap, BranchClass,
    BranchReport, ProtocolResult, PHOTON_CAP_ENV,
};
pub use table::{reproduce_table1, success_probability, ResourceRow, RESOURCE_NAMES, ROW_TOL, TABLE1};

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("partition error: {0}")]
    Partition(String),
    #[error("parameter error: {0}")]
    Parameter(String),
}
