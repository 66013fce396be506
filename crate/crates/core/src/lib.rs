//! Exact sums of dilates `r₁·A + ... + r_j·A` of finite integer sets.
//!
//! - [`intset`]: the [`IntSet`] type, Minkowski sums, dilates and affine
//!   canonicalization.
//! - [`components`]: n-component decompositions, fullness predicates,
//!   marginal sets and stabilizers.
//! - [`bounds`]: checkers that compare true sumset sizes against known lower
//!   bounds and exact values, with three-valued verdicts.
//! - [`search`]: exhaustive branch-and-bound search for the minimum of
//!   `|Σ m·A|` over canonical sets, parallel with the `parallel` feature.

pub mod bounds;
pub mod components;
pub mod error;
pub mod intset;
pub mod search;

pub use bounds::{BoundReport, Hypothesis, MainLargeReport, StatementId, Verdict};
pub use components::{Decomposition, MarginalSplit, ModulusPolicy};
pub use error::{Error, Result};
pub use intset::{AffineMap, DilateSpec, IntSet};
pub use search::{ProbeRow, SearchConfig, SearchResult};
