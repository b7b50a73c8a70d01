// SPDX-License-Identifier: Apache-2.0

//! Exact relations between the SAW exponents.

use num_rational::Rational64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub type Rational = Rational64;

/// `(nu, gamma, rho)` together with the derived scaling exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentSet {
    pub nu: Rational,
    pub gamma: Rational,
    pub rho: Rational,
    /// Boundary scaling exponent `1 + (2 rho - gamma) / (2 nu)`.
    pub a: Rational,
    /// Interior scaling exponent `1 - gamma / (2 nu)`.
    pub b: Rational,
    pub a_prime: Rational,
    /// `2 - 1/nu`.
    pub b_prime: Rational,
    /// `2 - 2 nu`.
    pub alpha: Rational,
}

pub fn exponent_algebra(nu: Rational, gamma: Rational, rho: Rational) -> Result<ExponentSet> {
    if nu <= Rational::zero() {
        return Err(invalid("nu must be positive"));
    }
    let one = Rational::one();
    let two = Rational::from_integer(2);
    Ok(ExponentSet {
        nu,
        gamma,
        rho,
        a: one + (two * rho - gamma) / (two * nu),
        b: one - gamma / (two * nu),
        a_prime: two,
        b_prime: two - one / nu,
        alpha: two - two * nu,
    })
}

impl ExponentSet {
    /// The conjectured planar values `(3/4, 43/32, 25/64)`.
    pub fn planar() -> Self {
        exponent_algebra(Rational::new(3, 4), Rational::new(43, 32), Rational::new(25, 64)).expect("nu > 0")
    }

    /// Diameter-scaling exponent predicted for each measure in the catalog.
    pub fn diameter_exponent(&self, kind: ScalingKind) -> Rational {
        let two = Rational::from_integer(2);
        match kind {
            ScalingKind::SawFree => self.gamma / self.nu,
            ScalingKind::SawHalf => (self.gamma - self.rho) / self.nu,
            ScalingKind::SapFree => Rational::one() / self.nu - two,
            ScalingKind::SapHalf => (self.alpha - two) / self.nu,
        }
    }
}

/// Measures whose mass on diameter scale `R` is fitted against `R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingKind {
    SawFree,
    SawHalf,
    SapHalf,
    SapFree,
}

/// Parses `p/q`, an integer or a finite decimal.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || invalid(format!("cannot parse `{s}` as a rational"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(invalid("zero denominator"));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = int.starts_with('-');
        let int: i64 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| bad())? };
        let den = 10i64.pow(frac.len() as u32);
        let f: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let mag = int.abs() * den + f;
        return Ok(Rational::new(if neg { -mag } else { mag }, den));
    }
    Ok(Rational::from_integer(s.parse().map_err(|_| bad())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn planar_values() {
        let e = ExponentSet::planar();
        assert_eq!(e.a, r(5, 8));
        assert_eq!(e.b, r(5, 48));
        assert_eq!(e.a_prime, r(2, 1));
        assert_eq!(e.b_prime, r(2, 3));
        assert_eq!(e.alpha, r(1, 2));
    }

    #[test]
    fn sum_identity_holds_exactly() {
        for (nu, g, rho) in [(r(3, 4), r(43, 32), r(25, 64)), (r(1, 2), r(1, 1), r(1, 2)), (r(7, 9), r(5, 3), r(2, 11))] {
            let e = exponent_algebra(nu, g, rho).unwrap();
            assert_eq!(e.a + e.b, r(2, 1) + (rho - g) / nu);
        }
    }

    #[test]
    fn diameter_targets() {
        let e = ExponentSet::planar();
        assert_eq!(e.diameter_exponent(ScalingKind::SawHalf), r(61, 48));
        assert_eq!(e.diameter_exponent(ScalingKind::SapFree), r(-2, 3));
        assert_eq!(e.diameter_exponent(ScalingKind::SapHalf), r(-2, 1));
        assert_eq!(e.diameter_exponent(ScalingKind::SawFree), r(43, 24));
    }

    #[test]
    fn zero_nu_rejected() {
        assert!(exponent_algebra(r(0, 1), r(1, 1), r(1, 1)).is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("43/32").unwrap(), r(43, 32));
        assert_eq!(parse_rational("0.75").unwrap(), r(3, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), r(-3, 2));
        assert_eq!(parse_rational("2").unwrap(), r(2, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
