//! Poisson grid / Poisson building model for in-building wireless
//! networks.
//!
//! The grid partitions `R^n` by axis-perpendicular hyperplanes whose
//! positions form independent Poisson processes; transmitters live on
//! room edges as a Cox process and signals attenuate per wall crossed.
//! The crate provides:
//!
//! - exact samplers for the grid and the transmitter process ([`grid`]);
//! - closed-form interference moments and spatial correlation
//!   ([`moments`]);
//! - interference Laplace transforms with certified series truncation
//!   ([`laplace`]);
//! - D2D success and cellular coverage probabilities plus a free-space
//!   3-D baseline ([`link`]);
//! - finite, semi-infinite and window-office building variants
//!   ([`finite`]);
//! - a seeded, parallel Monte Carlo oracle that cross-validates every
//!   analytic expression ([`montecarlo`]).

pub mod error;
pub mod finite;
pub mod grid;
pub mod laplace;
pub mod link;
pub mod moments;
pub mod montecarlo;
pub mod params;
pub mod rng;
pub mod series;

mod quad;

pub use error::{Error, Result};
pub use grid::{avg_density, path_gain, sample_realization, wall_counts, BaseStation, GridRealization};
pub use laplace::{joint_laplace_room, laplace_room, laplace_user, LaplaceQuery, Perspective};
pub use params::{ChannelModel, GridParams, RoomIndex};
pub use series::SeriesControl;
