//! The rank-3 K integral at the boundary point x = x1 c1 + x2 c2.
//!
//! Writing y = z + xi + t c3 with z in A_0, xi in A_{1/2} and
//! s = t - (z^{-1}∘xi, xi) > 0, the s-integral is a Gamma integral and the
//! xi-integral is Gaussian with the operator B = rho(v). The semi-analytic
//! route keeps only the remaining z-integral; the direct route samples all
//! three blocks and evaluates the integrand on the assembled rank-3 element.

use super::reduce::{estimate, sample_rng};
use super::{at_sample, check_samples, k_integral_mc, k_proposal, ln_k_integrand, McEstimate};
use crate::algebra::{
    embed_a0, embed_half, half_coords, rho_apply, rho_matrix, AlgebraDescriptor, Element,
};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, det_lu, solve_upper_transposed};
use crate::series::special::guarded_gamma;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::atomic::{AtomicU64, Ordering};

/// Direct boundary estimate plus the number of samples where v left Omega_2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectEstimate {
    pub estimate: McEstimate,
    pub v_positivity_failures: u64,
}

/// Gaussian integral of e^{-(B xi, xi)} by sampling, next to pi^d det(B)^{-1/2}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianCheck {
    pub estimate: McEstimate,
    pub exact: f64,
}

/// Natural log below which a weight is zero in double precision.
const UNDERFLOW: f64 = -745.0;

fn check_boundary_args(nu: f64, d: f64, x1: f64, x2: f64) -> Result<()> {
    if !(nu < 0.0) {
        return Err(Error::Divergent(format!(
            "boundary integrals need nu < 0, got {nu}"
        )));
    }
    if d != 1.0 && d != 2.0 {
        return Err(Error::UnsupportedAlgebra { rank: 3, d });
    }
    if !(x1 > 0.0 && x2 > 0.0 && x1.is_finite() && x2.is_finite()) {
        return Err(Error::Domain(format!(
            "x1 and x2 must be positive, got {x1}, {x2}"
        )));
    }
    Ok(())
}

/// (2 pi)^d Gamma(-nu) times the rank-2 integral of order nu + d/2 at (x1, x2).
pub fn k3_boundary_semi_analytic(
    nu: f64,
    d: f64,
    x1: f64,
    x2: f64,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    check_boundary_args(nu, d, x1, x2)?;
    let desc2 = AlgebraDescriptor::new(2, d)?;
    let x = Element::diag(desc2, &[x1, x2])?;
    let c = (2.0 * PI).powf(d) * guarded_gamma("-nu", -nu, 0.0)?;
    Ok(k_integral_mc(desc2, nu + d / 2.0, &x, n, seed)?.scaled(c))
}

/// v = tr(z)/(2 t det z) z^{-1} - 1/(2 t det z) e_0.
fn v_operator(z: &Element, t: f64) -> Result<Element> {
    let det = z.det();
    let e0 = Element::unit(z.desc)?;
    Ok(z.inverse()?
        .scale(z.trace() / (2.0 * t * det))
        .sub(&e0.scale(1.0 / (2.0 * t * det)))?)
}

fn v_in_cone(v: &Element) -> bool {
    v.trace() > 0.0 && v.det() > 0.0
}

/// Monte Carlo over z, s and xi of the boundary K integrand, evaluated from
/// det and a_2 of y = z + xi + t c3.
pub fn k3_boundary_direct(
    nu: f64,
    d: f64,
    x1: f64,
    x2: f64,
    n: u64,
    seed: u64,
) -> Result<DirectEstimate> {
    check_boundary_args(nu, d, x1, x2)?;
    check_samples(n)?;
    let desc2 = AlgebraDescriptor::new(2, d)?;
    let desc3 = AlgebraDescriptor::new(3, d)?;
    let x2e = Element::diag(desc2, &[x1, x2])?;
    let x3e = embed_a0(desc3, &x2e)?;
    let c3 = Element::idempotent(desc3, 2)?;
    let beta3 = nu - desc3.dim() / 3.0;
    let prop = k_proposal(nu + d / 2.0, &x2e)?;
    let s_law = Gamma::new(-nu, 1.0).map_err(|e| Error::Domain(e.to_string()))?;
    let ln_gamma_a = libm::lgamma(-nu);
    let m = 2 * d as usize;
    let failures = AtomicU64::new(0);
    let est = estimate(n, seed, |i, rng| {
        let draw = prop.draw(rng).map_err(|e| at_sample(e, i))?;
        let z = &draw.sample.y;
        let g: f64 = s_law.sample(rng);
        // Up to (2 pi)^d Gamma(-nu) the weight is the rank-2 one; when that
        // underflows the sample contributes nothing and z may be too close to
        // singular for v to be formed accurately.
        if ln_k_integrand(nu + d / 2.0, &x2e, &draw.t, z)? + draw.sample.log_weight < UNDERFLOW {
            return Ok(0.0);
        }
        let s = 1.0 / g;
        let ln_qs = -(1.0 - nu) * s.ln() - 1.0 / s - ln_gamma_a;
        let v = v_operator(z, s)?;
        if !v_in_cone(&v) {
            failures.fetch_add(1, Ordering::Relaxed);
            return Ok(0.0);
        }
        let (b, _) = rho_matrix(&embed_a0(desc3, &v)?)?;
        let two_b: Vec<f64> = b.iter().map(|x| 2.0 * x).collect();
        let l = cholesky(&two_b, m).ok_or_else(|| Error::NonFiniteWeight {
            sample: i,
            detail: "rho(v) is not positive definite".into(),
        })?;
        let gs: Vec<f64> = (0..m).map(|_| StandardNormal.sample(rng)).collect();
        let xi_c = solve_upper_transposed(&l, m, &gs);
        let ln_qxi = -(d) * (2.0 * PI).ln() + (0..m).map(|k| l[k * m + k].ln()).sum::<f64>()
            - 0.5 * gs.iter().map(|g| g * g).sum::<f64>();
        let xi = embed_half(desc3, &xi_c)?;
        let zi3 = embed_a0(desc3, &z.inverse()?)?;
        let q = zi3.jordan_mul(&xi)?.inner(&xi)?;
        let y = embed_a0(desc3, z)?.add(&xi)?.add(&c3.scale(s + q))?;
        let det = y.det();
        if !(det > 0.0) {
            return Err(Error::NonFiniteWeight {
                sample: i,
                detail: format!("det(y) = {det:e}"),
            });
        }
        let tr_inv = y.a2() / det;
        let ln_f = -tr_inv - x3e.inner(&y)? + beta3 * det.ln();
        Ok((ln_f + draw.sample.log_weight - ln_qs - ln_qxi).exp())
    })?;
    Ok(DirectEstimate {
        estimate: est,
        v_positivity_failures: failures.into_inner(),
    })
}

/// Samples xi from an isotropic normal matched to the flattest direction of
/// B = rho(v) and averages e^{-(B xi, xi)} / density.
pub fn gaussian_substep(z: &Element, t: f64, n: u64, seed: u64) -> Result<GaussianCheck> {
    if z.desc.rank != 2 {
        return Err(Error::Usage("z must be a rank-2 element".into()));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    check_samples(n)?;
    let d = z.desc.d;
    let desc3 = AlgebraDescriptor::new(3, d)?;
    let v = v_operator(z, t)?;
    let lmin = v.min_eigenvalue();
    if !(lmin > 0.0) {
        return Err(Error::NotInCone {
            min_eigenvalue: lmin,
        });
    }
    let v3 = embed_a0(desc3, &v)?;
    let (b, m) = rho_matrix(&v3)?;
    let exact = PI.powf(d) / det_lu(&b, m).sqrt();
    let tau2 = 1.0 / (2.0 * lmin);
    let ln_norm = -(m as f64) / 2.0 * (2.0 * PI * tau2).ln();
    let est = estimate(n, seed, |_, rng| {
        let c: Vec<f64> = (0..m)
            .map(|_| {
                let g: f64 = StandardNormal.sample(rng);
                tau2.sqrt() * g
            })
            .collect();
        let xi = embed_half(desc3, &c)?;
        let quad = half_coords(&rho_apply(&v3, &xi)?)
            .iter()
            .zip(&c)
            .map(|(a, b)| a * b)
            .sum::<f64>();
        let ln_q = ln_norm - c.iter().map(|x| x * x).sum::<f64>() / (2.0 * tau2);
        Ok((-quad - ln_q).exp())
    })?;
    Ok(GaussianCheck {
        estimate: est,
        exact,
    })
}

/// A fixed positive rank-2 element for the Gaussian sub-step check.
pub fn substep_point(d: f64, seed: u64) -> Result<Element> {
    use super::Proposal;
    let desc2 = AlgebraDescriptor::new(2, d)?;
    let mut rng = sample_rng(seed, u64::MAX);
    Ok(Proposal::standard(desc2)?.draw(&mut rng)?.sample.y)
}
