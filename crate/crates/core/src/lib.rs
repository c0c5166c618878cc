//! Energy-optimal downlink scheduling for a multiuser OFDM base station.
//!
//! Three schemes are covered:
//!
//! * [`wsre`]: weighted-sum receiver energy under dynamic TDMA, solved by
//!   per-user water-filling and a bisection on the power multiplier.
//! * [`temin`]: base-station energy under OFDMA, solved by dual
//!   decomposition with the ellipsoid method, LP primal recovery and a
//!   convex search over the frame duration.
//! * [`tsofdma`]: the joint weighted objective under time-slotted OFDMA,
//!   combining both solvers with a channel-orthogonality grouping heuristic.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*F64`
//! aliases below name the common instantiation.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod model;
pub mod numerics;
pub mod scalar;
pub mod scenario;
pub mod temin;
pub mod tsofdma;
pub mod wsre;

pub use error::{Error, Result};
pub use model::{
    dbm_per_hz_to_w, energy_report, invert_rate, subcarrier_rate, validate_allocation,
    Allocation, ChannelMatrix, ConstraintKind, DemandVector, DualBeta, DualCertificate,
    EnergyReport, Slot, SystemConfig, SystemParams, Tolerances, Violation,
};
pub use scalar::Scalar;

pub type SystemConfigF64 = SystemConfig<f64>;
pub type ChannelMatrixF64 = ChannelMatrix<f64>;
pub type DemandVectorF64 = DemandVector<f64>;
pub type AllocationF64 = Allocation<f64>;
pub type EnergyReportF64 = EnergyReport<f64>;

pub type SystemConfigF32 = SystemConfig<f32>;
pub type ChannelMatrixF32 = ChannelMatrix<f32>;
pub type DemandVectorF32 = DemandVector<f32>;
pub type AllocationF32 = Allocation<f32>;
pub type EnergyReportF32 = EnergyReport<f32>;
