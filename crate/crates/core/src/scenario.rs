//! Scenario keys and their enumeration.

use std::fmt;

use crate::gridmodel::{ignition_count, GridNetwork};
use crate::weather::{Season, WindShift};

/// One ignition point under one season and one wind shift.
///
/// Ordering is lexicographic over `(branch_id, span_index, season, shift)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScenarioKey {
    pub branch_id: u32,
    pub span_index: u32,
    pub season: Season,
    pub shift: WindShift,
}

impl fmt::Display for ScenarioKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "branch {} span {} {} +{}°",
            self.branch_id, self.span_index, self.season, self.shift
        )
    }
}

/// All keys of a network, sorted. Links contribute none.
pub fn enumerate_scenarios(network: &GridNetwork, tower_spacing: f64) -> Vec<ScenarioKey> {
    let mut keys = Vec::new();
    for line in network.lines() {
        for span_index in 0..ignition_count(line, tower_spacing) {
            for season in Season::ALL {
                for shift in WindShift::ALL {
                    keys.push(ScenarioKey {
                        branch_id: line.branch_id,
                        span_index,
                        season,
                        shift,
                    });
                }
            }
        }
    }
    keys
}
