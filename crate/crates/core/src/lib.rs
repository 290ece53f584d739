//! Power allocation for a train of mobile relays crossing a single
//! millimeter-wave cell.
//!
//! [`scenario`] holds the geometry and segment timeline, [`radio`] the link
//! budget and fading, [`metrics`] energy and delivered data, [`allocators`]
//! the baseline schemes, [`optimizer`] the energy-minimizing solver and
//! [`doppler`] the fingerprint-based Doppler estimator.

pub mod allocators;
pub mod doppler;
pub mod error;
pub mod metrics;
pub mod optimizer;
pub mod radio;
pub mod scenario;

pub use error::{Error, Result};
pub use metrics::AllocationMatrix;
pub use scenario::{ScenarioConfig, SegmentSchedule};
