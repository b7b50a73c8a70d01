// SPDX-License-Identifier: Apache-2.0

//! Brownian excursions and loops, hulls and their frontiers, and
//! non-disconnecting pairs.

pub mod disconnect;
pub mod grid;
pub mod paths;

pub use disconnect::{non_disconnecting_pair, DisconnectParams, NonDisconnection, PathPair};
pub use grid::{box_dimension, box_dimension_cells, frontier, hull_fill, Frontier, GridRegion, HullFill, RleRegion, ScaleGrid};
pub use paths::{
    excursion, excursion_avoids, excursion_outcomes, joint_excursion_avoidance, loop_duration_sampler, rooted_loop,
    WalkOnSpheres,
};
