//! Leader-follower column formations on curved graph surfaces.
//!
//! The leader follows a geodesic of a surface `z = f(x, y)`. Each follower's
//! ideal position is the endpoint of a fixed-length geodesic extension that is
//! orthogonal, in the induced metric, to its leader's heading. Followers only
//! see relative measurements, and estimate the next ideal position one
//! communication step ahead with a data-streaming EDMD fit of the Koopman
//! operator.
//!
//! Module layout, bottom-up:
//!
//! - [`manifold`]: surface heights, induced metric, Christoffel symbols.
//! - [`geodesic`]: RK4 integration of the geodesic equations.
//! - [`formation`]: orthogonal extensions, ideal follower trajectories, chains.
//! - [`observables`]: follower frames, dictionaries, lifting and unlifting.
//! - [`koopman`]: pseudoinverse, least-squares Koopman fit, streaming loop.
//! - [`harness`]: scenario runs, metrics, experiment tables, reports.

pub mod error;
pub mod formation;
pub mod geodesic;
pub mod harness;
pub mod koopman;
pub mod manifold;
pub mod observables;

pub use error::{Error, Result};
