//! Weighted expected cost per line and the undergrounding order.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::damage::DamageMatrix;
use crate::weather::ScenarioWeights;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrioritizeError {
    #[error("duplicate branch id {0}")]
    DuplicateBranch(u32),
    #[error("branch {branch}: weighted cost {cost} is not a non-negative number")]
    InvalidCost { branch: u32, cost: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineRisk {
    pub branch_id: u32,
    /// Dollars.
    pub weighted_cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorityEntry {
    pub rank: usize,
    pub branch_id: u32,
    pub weighted_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriorityList {
    entries: Vec<PriorityEntry>,
}

impl PriorityList {
    pub fn entries(&self) -> &[PriorityEntry] {
        &self.entries
    }

    pub fn branch_order(&self) -> Vec<u32> {
        self.entries.iter().map(|e| e.branch_id).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `Σ matrix[s][d] · weights[s][d]`, summed season-major.
pub fn weighted_cost(matrix: &DamageMatrix, weights: &ScenarioWeights) -> f64 {
    let mut total = 0.0;
    for (row, wrow) in matrix.values.iter().zip(weights.matrix()) {
        for (v, w) in row.iter().zip(wrow) {
            total += v * w;
        }
    }
    total
}

/// Descending by cost, ties by ascending branch id.
pub fn rank(risks: &[LineRisk]) -> Result<PriorityList, PrioritizeError> {
    let mut seen = BTreeSet::new();
    for r in risks {
        if !seen.insert(r.branch_id) {
            return Err(PrioritizeError::DuplicateBranch(r.branch_id));
        }
        if !(r.weighted_cost >= 0.0 && r.weighted_cost.is_finite()) {
            return Err(PrioritizeError::InvalidCost {
                branch: r.branch_id,
                cost: r.weighted_cost,
            });
        }
    }
    let mut sorted = risks.to_vec();
    sorted.sort_by(|a, b| {
        b.weighted_cost
            .total_cmp(&a.weighted_cost)
            .then(a.branch_id.cmp(&b.branch_id))
    });
    let entries = sorted
        .into_iter()
        .enumerate()
        .map(|(i, r)| PriorityEntry {
            rank: i + 1,
            branch_id: r.branch_id,
            weighted_cost: r.weighted_cost,
        })
        .collect();
    Ok(PriorityList { entries })
}
