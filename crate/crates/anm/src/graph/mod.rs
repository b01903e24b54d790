//! Directed acyclic graphs and their equivalence-class representatives.
//!
//! Node identity is positional (0-based); column names live in
//! [`crate::data::Dataset`]. All graph values are immutable after
//! construction and cheap to clone.

mod cpdag;
mod dag;
mod dsep;
mod enumerate;
mod pdag;
mod text;

pub use cpdag::{cpdag, dag_extensions};
pub use dag::{is_acyclic, neighbors, Dag, TopologicalOrder};
pub use dsep::d_separated;
pub use enumerate::{count_dags, enumerate_dags, enumerate_dags_capped, ENUM_MAX_P};
pub use pdag::{EdgeType, Pdag};
pub use text::{parse_dag, parse_pdag, serialize_dag, serialize_pdag};
