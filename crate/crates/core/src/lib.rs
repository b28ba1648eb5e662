//! Received signal strength between two molecular nanonodes dropped uniformly
//! at random in a disk.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: uniform sampling in a disk and the distance distribution
//!   of two independent points, plus power transforms of that distance.
//! * [`channel`]: impulse responses of the free-diffusion and
//!   diffusion-with-drift channels and their inverses.
//! * [`analytic`]: closed-form PDF/CDF of the received concentration, the
//!   truncated power-series CDF and quadrature-based CDFs.
//! * [`montecarlo`]: a seeded, worker-count independent Monte Carlo oracle
//!   with KS and L1 agreement metrics.
//! * [`linkbudget`]: success probability against a reception threshold and
//!   the minimum molecule count reaching a target probability.
//!
//! All numerics are generic over [`Scalar`]; the aliases at the crate root fix
//! the scalar to `f64`, which is what the CLI and the acceptance suite use.
// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod channel;
mod error;
pub mod geometry;
pub mod linkbudget;
pub mod montecarlo;
pub mod quadrature;
mod scalar;

pub use analytic::{DriftBranches, SeriesStatus};
pub use channel::ChannelKind;
pub use error::{Error, Result};
pub use scalar::Scalar;

pub type DiskRegion = geometry::DiskRegion<f64>;
pub type DistanceSample = geometry::DistanceSample<f64>;
pub type PlanarPoint = geometry::PlanarPoint<f64>;
pub type ChannelModel = channel::ChannelModel<f64>;
pub type ChannelParams = channel::ChannelParams<f64>;
pub type SignalDistribution = analytic::SignalDistribution<f64>;
pub type SeriesTruncation = analytic::SeriesTruncation<f64>;
pub type SeriesValue = analytic::SeriesValue<f64>;
pub type EmpiricalDistribution = montecarlo::EmpiricalDistribution<f64>;
pub type ReceptionRule = linkbudget::ReceptionRule<f64>;
pub type QuadratureOptions = quadrature::QuadratureOptions<f64>;
