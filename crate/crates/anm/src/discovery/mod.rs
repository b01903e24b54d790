//! Structure learners: RESIT, exhaustive score search, greedy DAG search,
//! and bivariate direction inference.

mod brute;
mod direction;
mod gds;
mod resit;

use std::collections::BTreeMap;

use crate::graph::{serialize_dag, Dag, TopologicalOrder};
use crate::score::ScoreReport;

pub use brute::{brute_force, brute_force_capped};
pub use direction::{infer_direction, infer_direction_with, Direction, DirectionOptions, DirectionVerdict};
pub use gds::gds;
pub use resit::{resit, resit_with, ResitOptions};

/// Output of any structure learner. `order` is present when the method
/// produces a causal order (RESIT); `score` when it optimizes the penalized
/// score (brute force, GDS).
#[derive(Clone, Debug)]
pub struct DiscoveryResult {
    pub graph: Dag,
    pub order: Option<TopologicalOrder>,
    pub score: Option<ScoreReport>,
    /// Method-specific numbers: phase p-values, step counts, tabu events.
    pub diagnostics: BTreeMap<String, f64>,
}

impl DiscoveryResult {
    /// Graph in the text exchange format.
    pub fn graph_text(&self) -> String {
        serialize_dag(&self.graph)
    }

    /// Diagnostics as sorted key=value lines (the side-file format).
    pub fn diagnostics_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.diagnostics {
            out.push_str(&format!("{k}={v}\n"));
        }
        out
    }
}
