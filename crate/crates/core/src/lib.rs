//! Numerical laboratory for traces and extensions of BV functions on
//! discretized planar domains.
//!
//! The crate builds weighted samples of a domain and its boundary
//! ([`space`]), Whitney ball covers with a Lipschitz partition of unity
//! ([`cover`]), function-space energies on boundary and interior samples
//! ([`norms`]), the linear Besov extension and the layered L¹ extension
//! ([`extension`]), shrinking-ball traces ([`trace`]) and a scenario runner
//! that turns each inequality into a pass/fail check ([`experiments`]).

pub mod cover;
pub mod error;
pub mod experiments;
pub mod extension;
pub mod fixtures;
pub mod geometry;
pub mod index;
pub mod norms;
pub mod space;
pub mod sum;
pub mod trace;

pub use error::{Error, Result};
pub use geometry::Point;
pub use space::{build_domain, Discretization, DomainSpec, MeshMode, Shape, Support};
