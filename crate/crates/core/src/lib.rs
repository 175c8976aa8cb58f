//! Spectral distances on the line and the circle for deformed momentum
//! operators.
//!
//! Each operator in scope reduces the constraint `‖[D, f]‖ ≤ 1` to a family
//! of weighted finite differences, so the dual distance problem becomes an
//! exact Wasserstein-1 problem whose ground metric is the shortest-path metric
//! of a finite [`ConstraintGraph`]. The [`closed_form`] module carries the
//! analytic values the solver is checked against.
//!
//! ```
//! use ccrm::{compile, spectral_distance, Grid, OperatorSpec, StateMeasure};
//!
//! let grid = Grid::line(0.0, 3.0, 0.25).unwrap().into_shared();
//! let graph = compile(&OperatorSpec::HDeriv { h: 0.5 }, &grid).unwrap();
//! let a = StateMeasure::point(&grid, 0.5).unwrap();
//! let b = StateMeasure::point(&grid, 2.0).unwrap();
//! let d = spectral_distance(&graph, &a, &b).unwrap();
//! assert!((d.value.finite().unwrap() - 1.5).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod closed_form;
pub mod error;
pub mod fmt;
pub mod grid;
pub mod operators;
pub mod sampled;
pub mod states;
pub mod transport;

pub use closed_form::Bound;
pub use error::{Error, Result};
pub use grid::{Grid, SignSet, Topology};
pub use operators::{compile, seminorm, witness_hperiodic, ConstraintGraph, Edge, OperatorSpec};
pub use sampled::SampledFn;
pub use states::StateMeasure;
pub use transport::{
    brute_force_w1, circle_w1_cut, graph_metric, line_w1_cdf, spectral_distance, Distance,
    DistanceResult, PlanEntry,
};

/// Absolute tolerance for coordinate comparisons and integrality tests.
pub const COORD_TOL: f64 = 1e-9;

/// Largest per-component net mass still treated as balanced.
pub const MASS_TOL: f64 = 1e-10;

/// Returns `Some(k)` when `ratio` is within [`COORD_TOL`] of the integer `k`.
pub(crate) fn near_integer(ratio: f64) -> Option<i64> {
    let k = ratio.round();
    if ratio.is_finite() && (ratio - k).abs() <= COORD_TOL {
        Some(k as i64)
    } else {
        None
    }
}
