// SPDX-License-Identifier: Apache-2.0

//! Schwarzian derivative `f'''/f' - (3/2) (f''/f')^2`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// `[f', f'', f''']` at a point.
pub type Derivatives = [Complex64; 3];

pub fn schwarzian_of_derivatives(d: Derivatives) -> Result<Complex64> {
    let [d1, d2, d3] = d;
    if d1.norm() < 1e-12 {
        return Err(Error::SingularMap(format!("f' = {d1}")));
    }
    let r = d2 / d1;
    Ok(d3 / d1 - 1.5 * r * r)
}

/// Starting step for the difference tableau, relative to `max(1, |z|)`.
pub const DEFAULT_FD_STEP: f64 = 0.05;

/// Central-difference estimate of one derivative with Ridders' extrapolation:
/// the step is halved until successive extrapolants stop improving.
fn ridders(f: &dyn Fn(Complex64) -> Complex64, z: Complex64, h0: f64, order: usize) -> Complex64 {
    let stencil = |h: f64| -> Complex64 {
        let hc = Complex64::new(h, 0.0);
        match order {
            1 => (f(z + hc) - f(z - hc)) / (2.0 * h),
            2 => (f(z + hc) - 2.0 * f(z) + f(z - hc)) / (h * h),
            _ => (f(z + 2.0 * hc) - 2.0 * f(z + hc) + 2.0 * f(z - hc) - f(z - 2.0 * hc)) / (2.0 * h * h * h),
        }
    };
    const LEVELS: usize = 10;
    let mut tab = [[Complex64::new(0.0, 0.0); LEVELS]; LEVELS];
    let mut h = h0;
    tab[0][0] = stencil(h);
    let mut best = tab[0][0];
    let mut err = f64::INFINITY;
    for i in 1..LEVELS {
        h *= 0.5;
        tab[0][i] = stencil(h);
        let mut fac = 4.0;
        for j in 1..=i {
            tab[j][i] = (fac * tab[j - 1][i] - tab[j - 1][i - 1]) / (fac - 1.0);
            fac *= 4.0;
            let e = (tab[j][i] - tab[j - 1][i]).norm().max((tab[j][i] - tab[j - 1][i - 1]).norm());
            if e <= err {
                err = e;
                best = tab[j][i];
            }
        }
        if (tab[i][i] - tab[i - 1][i - 1]).norm() >= 2.0 * err {
            break;
        }
    }
    best
}

/// Schwarzian of an arbitrary analytic map from finite differences along the
/// real direction; `f` must be analytic within `4 * step * max(1, |z|)` of `z`.
pub fn schwarzian_numeric(f: &dyn Fn(Complex64) -> Complex64, z: Complex64, step: f64) -> Result<Complex64> {
    let h0 = step * z.norm().max(1.0);
    let d = [ridders(f, z, h0, 1), ridders(f, z, h0, 2), ridders(f, z, h0, 3)];
    if d.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Numeric("non-finite difference quotient".into()));
    }
    schwarzian_of_derivatives(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_has_schwarzian_minus_half() {
        let s = schwarzian_numeric(&|z: Complex64| z.exp(), Complex64::new(0.3, 0.2), DEFAULT_FD_STEP).unwrap();
        assert!((s - Complex64::new(-0.5, 0.0)).norm() < 1e-8, "{s}");
    }

    #[test]
    fn mobius_numeric_is_zero() {
        let f = |z: Complex64| (2.0 * z + 1.0) / (z + 3.0);
        let s = schwarzian_numeric(&f, Complex64::new(0.5, 0.0), DEFAULT_FD_STEP).unwrap();
        assert!(s.norm() < 1e-8, "{s}");
    }

    #[test]
    fn constant_map_is_singular() {
        let r = schwarzian_numeric(&|_z| Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), DEFAULT_FD_STEP);
        assert!(matches!(r, Err(Error::SingularMap(_))));
    }
}
