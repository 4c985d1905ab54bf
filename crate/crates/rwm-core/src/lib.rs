//! Mutually reinforcing random walks over multi-layer networks.
//!
//! A stack of networks shares (or maps between) a node universe. One walker
//! runs per layer; each walker's transition operator blends every layer's
//! edges, weighted by a relevance matrix that is itself re-estimated from
//! how similar the walkers' visit distributions look. Restart keeps the
//! walks anchored to a query, and two bounded approximations (freezing the
//! relevance weights after a split time, and truncating each step to the
//! mass-heavy neighborhood of the query) trade exactness for speed with
//! known error.
//!
//! Modules:
//! - [`multinet`]: layered graph model, sparse kernels, file formats
//! - [`engine`]: exact walker iteration and relevance reweighting
//! - [`accel`]: split-time planning, frozen-weight phase, truncated steps
//! - [`tasks`]: community detection, link prediction, context sampling
//! - [`synthbench`]: planted-partition generators and a timing harness

pub mod accel;
pub mod engine;
pub mod error;
pub mod multinet;
pub mod synthbench;
pub mod tasks;

pub use accel::{PhasePlan, RunResult, UpdateStrategy};
pub use engine::{RwmConfig, WalkerState};
pub use error::{Error, Result};
pub use multinet::{
    CrossTransition, MultiNetwork, Network, NetworkMode, QuerySpec, ValidationReport,
};
