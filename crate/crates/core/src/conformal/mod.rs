// SPDX-License-Identifier: Apache-2.0

//! Closed-form conformal maps removing hulls from the half-plane and disk.

pub mod mobius;
pub mod radial;
pub mod schwarzian;
pub mod slit;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use mobius::{cayley, cayley_inverse, Mobius};
pub use radial::{radial_restriction_factors, RadialFactors, RadialRestrictionMap};
pub use schwarzian::{schwarzian_numeric, schwarzian_of_derivatives, Derivatives};
pub use slit::SlitMap;

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExtPoint {
    Finite(#[serde(with = "pair")] Complex64),
    Infinity,
}

impl ExtPoint {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtPoint::Finite(z) => Some(z),
            ExtPoint::Infinity => None,
        }
    }
}

/// Complex numbers as `[re, im]`.
pub mod pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

/// Principal square root without the polar round trip.
#[inline]
pub fn fast_sqrt(v: Complex64) -> Complex64 {
    let r = v.norm();
    let re = (0.5 * (r + v.re)).max(0.0).sqrt();
    let im = (0.5 * (r - v.re)).max(0.0).sqrt();
    Complex64::new(re, if v.im < 0.0 { -im } else { im })
}

/// Square root of `v` in the closed upper half-plane; on the real axis the
/// sign follows `tie`.
#[inline]
pub fn sqrt_upper(v: Complex64, tie: f64) -> Complex64 {
    let s = fast_sqrt(v);
    if s.im < 0.0 || (s.im == 0.0 && (s.re > 0.0) != (tie >= 0.0)) {
        -s
    } else {
        s
    }
}
