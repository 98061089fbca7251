//! Exact index statistics for uniformly random rooted plane trees.
//!
//! The crate computes the Merrifield–Simmons (`sigma`), Hosoya (`z`),
//! subtree (`rho`) and Wiener (`w`) indices of plane trees, solves the
//! functional equations of their joint generating functions as truncated
//! power series, and turns coefficients into exact moments and correlation
//! coefficients. Enumeration and sampling provide independent checks, and
//! the asymptotics module holds the known growth constants together with routines
//! that compare them against the exact series.

pub mod asymptotics;
pub mod enumerate;
pub mod moments;
pub mod monomial;
pub mod numeric;
pub mod sample;
pub mod series;
pub mod systems;
pub mod tree;
pub mod verify;

pub use enumerate::{aggregate, tree_count, trees_of_size, AggregateRow};
pub use monomial::Monomial;
pub use sample::{empirical_moments, sample_tree, SampleConfig};
pub use series::{Series, SeriesError};
pub use tree::{compute_indices, parse_tree, wiener_direct, IndexBundle, Tree};
