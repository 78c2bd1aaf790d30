//! Cache-aided interference management over two heterogeneous parallel
//! subchannels: a P-subchannel (perfect CSIT, bandwidth fraction `alpha`)
//! and an N-subchannel (no CSIT, fraction `1 - alpha`).
//!
//! The crate provides:
//! - centralized and decentralized placement plus packet-level block
//!   scheduling ([`centralized`], [`decentralized`]),
//! - closed-form achievable DoF, converse upper bound and gap-factor
//!   reports ([`bounds`]),
//! - an exact brute-force scheduling oracle and per-block feasibility
//!   checks ([`bounds`]),
//! - the polynomial quasiconcavity certificate machinery and the
//!   cache-vs-CSIT tradeoff solver ([`analysis`]),
//! - default verification grids shared by the CLI and the test suite
//!   ([`sweep`]).

pub mod analysis;
pub mod bounds;
pub mod centralized;
pub mod decentralized;
pub mod exact;
pub mod model;
pub mod sweep;

pub use model::{
    CachingRealization, DeliveryAccounting, DeliverySchedule, DemandVector, Error, NetworkConfig,
    PacketId, Scheme, Subchannel, ValidationMode,
};
