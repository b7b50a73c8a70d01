// SPDX-License-Identifier: Apache-2.0

//! Discretized Loewner evolution: chordal, radial and full-plane SLE traces
//! and restriction estimates.

pub mod chordal;
pub mod driving;
pub mod radial;

pub use chordal::chordal_trace;
pub use driving::{parse_kappa, DrivingPath, TimeGrid};
pub use radial::{full_plane_trace, radial_trace};
pub mod restriction;

pub use restriction::{
    avoidance_probability, chordal_avoids, radial_avoidance_probability, radial_avoids, restriction_test, FlowOutcome,
    FlowParams,
};
