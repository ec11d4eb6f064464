//! Exact cohomological criteria for structure-group reductions of
//! 8-dimensional real vector bundles over closed 8-manifolds.
//!
//! The crate models the even-degree integral and mod-2 cohomology of a
//! closed, connected, oriented 8-manifold ([`cohomology`]), the characteristic
//! classes of bundles over it ([`bundles`]), and decides reduction criteria
//! from that data ([`criteria`]). [`search`] sweeps witness classes over
//! bounded boxes, [`catalog`] holds built-in models and the file format, and
//! [`cli`] drives the `obstruct8` binary.

pub mod bundles;
pub mod catalog;
pub mod cli;
pub mod cohomology;
pub mod criteria;
pub mod error;
pub mod report;
pub mod search;
pub mod serde_int;

pub use cohomology::{Cohomology, IntClass, Mod2Class, RingBuilder};
pub use error::{Error, Result};
pub use report::{CheckReport, Condition, Role, Value, Verdict};
