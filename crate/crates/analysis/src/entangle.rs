use std::collections::BTreeMap;

use fock_core::{spatial_label, FockState, OccupationVector};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::AnalysisError;

/// Schmidt coefficients of `state` across spatial modes `a | b`, sorted descending.
///
/// Coefficients below 1e-12 are dropped.
pub fn entanglement_report(state: &FockState, a: &[u32], b: &[u32]) -> Result<Vec<f64>, AnalysisError> {
    if a.is_empty() || b.is_empty() {
        return Err(AnalysisError::Partition("empty side".into()));
    }
    if let Some(m) = a.iter().find(|m| b.contains(m)) {
        return Err(AnalysisError::Partition(format!("mode {} on both sides", spatial_label(*m))));
    }
    let mut rows: BTreeMap<OccupationVector, usize> = BTreeMap::new();
    let mut cols: BTreeMap<OccupationVector, usize> = BTreeMap::new();
    let mut entries = vec![];
    for (occ, amp) in state.terms() {
        if let Some((m, _)) = occ.iter().find(|(m, _)| !a.contains(&m.spatial) && !b.contains(&m.spatial)) {
            return Err(AnalysisError::Partition(format!("photon in {m} outside the partition")));
        }
        let (left, right) = occ.split(|m| a.contains(&m.spatial));
        let n = rows.len();
        let r = *rows.entry(left).or_insert(n);
        let n = cols.len();
        let c = *cols.entry(right).or_insert(n);
        entries.push((r, c, *amp));
    }
    if entries.is_empty() {
        return Err(AnalysisError::Partition("zero state".into()));
    }
    let mut m = DMatrix::<Complex64>::zeros(rows.len(), cols.len());
    for (r, c, x) in entries {
        m[(r, c)] += x;
    }
    let norm = m.norm();
    let mut s: Vec<f64> = m.singular_values().iter().map(|x| x / norm).filter(|&x| x > 1e-12).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Product state within tolerance: one Schmidt coefficient.
pub fn is_product(coeffs: &[f64]) -> bool {
    coeffs.iter().skip(1).all(|&x| x < 1e-9)
}
