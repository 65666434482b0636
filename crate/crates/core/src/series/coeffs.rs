//! Coefficients of the K-function in the J-bases of rank 2 and rank 3.

use super::special::guarded_gamma;
use crate::error::Result;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Rank-3 coefficients: K = sum_j a[j] J^{[3,j]}_nu + b[j] t3^{-nu} J^{[3,j]}_{-nu}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientTable {
    pub nu: f64,
    pub d: f64,
    pub a: [f64; 4],
    pub b: [f64; 4],
}

fn a_side(nu: f64, d: f64, guard: f64) -> Result<[f64; 4]> {
    let c = (2.0 * PI).powf(1.5 * d);
    let g = |what: &str, x: f64| guarded_gamma(what, x, guard);
    let g_mnu = g("-nu", -nu)?;
    Ok([
        c * g_mnu * g("-nu-d/2", -nu - d / 2.0)? * g("-nu-d", -nu - d)?,
        c * g_mnu * g("-nu-d/2", -nu - d / 2.0)? * g("nu+d", nu + d)?,
        c * g_mnu * g("nu+d/2", nu + d / 2.0)? * g("nu", nu)?,
        c * g_mnu * g("nu+d/2", nu + d / 2.0)? * g_mnu,
    ])
}

/// The eight rank-3 coefficients; b is the a-side at -nu.
pub fn coeffs3(nu: f64, d: f64) -> Result<CoefficientTable> {
    coeffs3_guarded(nu, d, 1e-6)
}

pub(crate) fn coeffs3_guarded(nu: f64, d: f64, guard: f64) -> Result<CoefficientTable> {
    Ok(CoefficientTable {
        nu,
        d,
        a: a_side(nu, d, guard)?,
        b: a_side(-nu, d, guard)?,
    })
}

/// Rank-2 coefficients (with n - 2 = d) in the order
/// J^{[2,1]}_nu, J^{[2,2]}_nu, t2^{-nu} J^{[2,1]}_{-nu}, t2^{-nu} J^{[2,2]}_{-nu}.
pub fn coeffs2(nu: f64, d: f64) -> Result<[f64; 4]> {
    coeffs2_guarded(nu, d, 1e-6)
}

pub(crate) fn coeffs2_guarded(nu: f64, d: f64, guard: f64) -> Result<[f64; 4]> {
    let c = (2.0 * PI).powf(d / 2.0);
    let g = |what: &str, x: f64| guarded_gamma(what, x, guard);
    Ok([
        c * g("-nu", -nu)? * g("-nu-d/2", -nu - d / 2.0)?,
        c * g("-nu", -nu)? * g("nu+d/2", nu + d / 2.0)?,
        c * g("nu", nu)? * g("nu-d/2", nu - d / 2.0)?,
        c * g("nu", nu)? * g("-nu+d/2", -nu + d / 2.0)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::special::gamma;
    use approx::assert_relative_eq;

    #[test]
    fn formulas() {
        let (nu, d) = (-1.7, 1.0);
        let t = coeffs3(nu, d).unwrap();
        let c = (2.0 * PI).powf(1.5);
        assert_relative_eq!(
            t.a[0],
            c * gamma(1.7) * gamma(1.2) * gamma(0.7),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            t.a[3],
            c * gamma(1.7) * gamma(-1.2) * gamma(1.7),
            max_relative = 1e-15
        );
        let flipped = coeffs3(-nu, d).unwrap();
        assert_eq!(t.a, flipped.b);
        assert_eq!(t.b, flipped.a);
        let k2 = coeffs2(-0.7, 1.0).unwrap();
        assert_relative_eq!(
            k2[0],
            (2.0 * PI).sqrt() * gamma(0.7) * gamma(0.2),
            max_relative = 1e-15
        );
    }

    #[test]
    fn chain_identity() {
        for &(nu, d) in &[
            (-1.7, 1.0),
            (0.3, 2.0),
            (-2.3, 2.0),
            (1.15, 4.0),
            (-0.45, 8.0),
        ] {
            let t = coeffs3(nu, d).unwrap();
            let c = coeffs2(nu + d / 2.0, d).unwrap();
            let pre = (2.0 * PI).powf(d) * gamma(-nu);
            for j in 0..4 {
                assert_relative_eq!(t.a[j], pre * c[j], max_relative = 1e-13);
            }
        }
    }

    #[test]
    fn poles_are_named() {
        let err = coeffs3(-1.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("nu"), "{err}");
        assert!(coeffs3(-1.5, 1.0).is_err());
        assert!(coeffs2(0.5, 1.0).is_err());
    }
}
