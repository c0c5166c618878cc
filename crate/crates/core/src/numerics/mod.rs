//! Numeric kernels shared by the solvers.

pub mod bisect;
pub mod ellipsoid;
pub mod lp;

pub use bisect::{bisect_monotone, bisect_monotone_with, expand_upper, Bisection, Bracket};
pub use ellipsoid::{ellipsoid_maximize, EllipsoidResult, EllipsoidSettings, Eval, StopReason};
pub use lp::{lp_feasible, LinearSystem, LpOutcome};
