// SPDX-License-Identifier: Apache-2.0

//! Exact combinatorics of self-avoiding walks and polygons on `Z^d`.

pub mod bridge;
pub mod enumerate;
pub mod sampler;
pub mod walk;

pub use bridge::{
    count_irreducible_bridges, first_renewal_histogram, is_bridge, is_irreducible_bridge, renewal_times,
    BridgeConvention, BridgeTable,
};
pub use enumerate::{count_half_space, count_saps, count_saws, saw_counts, SapCounts};
pub use sampler::{sample_half_space_saw, HalfSpaceSampler, WeightedHalfSpaceSampler};
pub use walk::{LatticePoint, Walk, WalkKind};
