//! Exact construction and analysis of aperiodic point sets obtained by
//! cutting a lattice with a fractal window.
//!
//! The crate is organized around three layers:
//!
//! * arithmetic — [`real::Real`] (fixed-point extended precision) and
//!   [`rat::Rat`] (exact rationals), plus the exact
//!   [`interval::IntervalSet`] algebra;
//! * geometry — Cantor-type windows ([`window`]), randomized and arithmetic
//!   gap-selection families ([`random_window`], [`markers`],
//!   [`deterministic`]), and the lattice/projection machinery ([`cps`]);
//! * analysis — pattern sets, independence certificates, configurational
//!   entropy bounds and ergodicity diagnostics ([`dynamics`]), with
//!   deterministic run manifests ([`manifest`]) and plotting ([`svg`]).

pub mod cps;
pub mod deterministic;
pub mod dynamics;
pub mod error;
pub mod interval;
pub mod manifest;
pub mod markers;
pub mod random_window;
pub mod rat;
pub mod real;
pub mod svg;
pub mod window;

pub use cps::{cut_and_project, CpsScheme, ProjectionResult};
pub use error::{ProjectError, ReplayError, SchemeError, SearchError, WindowError};
pub use interval::{Interval, IntervalSet, Membership};
pub use rat::{parse_rat, rat, rat_int, Rat};
pub use real::Real;
pub use window::{CantorKind, CantorScheme, Gap, WindowApprox};
