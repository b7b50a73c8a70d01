// SPDX-License-Identifier: Apache-2.0

//! Monte Carlo sampling of long walks and exponent estimation.

pub mod estimate;
pub mod exponents;
pub mod pivot;

pub use estimate::{diameter_mass_scaling, estimate_nu, estimate_rho, EstimateConfig, NuEstimate, WalkSource};
pub use exponents::{exponent_algebra, parse_rational, ExponentSet, Rational, ScalingKind};
pub use pivot::{pivot_uniformity, PivotChain, SiteLaw};
