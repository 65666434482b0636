//! Monte Carlo integrals over the symmetric cones of rank 1 to 3.

mod boundary;
pub mod reduce;
mod sampler;

pub use boundary::{
    gaussian_substep, k3_boundary_direct, k3_boundary_semi_analytic, substep_point, DirectEstimate,
    GaussianCheck,
};
pub use sampler::{log_jacobian, sample_cone, triangular_map, Proposal};
pub(crate) use sampler::FactorTarget;

use crate::algebra::{AlgebraDescriptor, Element, Mat};
use crate::error::{Error, Result};
use crate::series::special::guarded_gamma;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A cone point with the log of (parameterization Jacobian / sampling density).
#[derive(Clone, Debug)]
pub struct ConeSample {
    pub y: Element,
    pub log_weight: f64,
}

/// Sample mean of the importance weights and its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl McEstimate {
    pub(crate) fn scaled(self, c: f64) -> McEstimate {
        McEstimate {
            value: c * self.value,
            std_error: c.abs() * self.std_error,
            ..self
        }
    }
}

/// Fewest samples accepted by the estimators.
pub const MIN_SAMPLES: u64 = 10_000;

fn check_samples(n: u64) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::Usage(format!(
            "at least {MIN_SAMPLES} samples are required, got {n}"
        )));
    }
    Ok(())
}

/// Maximiser of -1/y - x y + beta ln y over y > 0.
fn saddle(x: f64, beta: f64) -> f64 {
    let root = (beta * beta + 4.0 * x).sqrt();
    if beta <= 0.0 {
        2.0 / (root - beta)
    } else {
        (beta + root) / (2.0 * x)
    }
}

/// Importance law for the K integrand at x. The diagonal search starts from
/// the eigenvalue-wise maximiser of the integrand.
pub(crate) fn k_proposal(nu: f64, x: &Element) -> Result<Proposal> {
    let desc = x.desc;
    let beta = nu - desc.dim() / desc.rank as f64;
    let y0 = x.map_spectrum(|l| saddle(l.max(0.0), beta));
    let t0 = sampler::cholesky_mat(&y0.to_matrix()).ok_or(Error::NotInCone {
        min_eigenvalue: y0.min_eigenvalue(),
    })?;
    let start: Vec<f64> = (0..desc.rank).map(|i| t0.a[i][i].re).collect();
    let xm = x.clone();
    let off: FactorTarget = Arc::new(move |t: &Mat| {
        let y = Element::from_matrix(xm.desc, &t.mul(&t.adjoint()));
        -sampler::trace_inverse(t) - xm.inner(&y).unwrap_or(f64::NAN)
    });
    let full = |p: &[f64]| -> f64 {
        let t = sampler::factor(&desc, p);
        let y = Element::from_matrix(desc, &t.mul(&t.adjoint()));
        let lf = ln_k_integrand(nu, x, &t, &y).unwrap_or(f64::NEG_INFINITY);
        lf + log_jacobian(desc, p).unwrap_or(f64::NEG_INFINITY)
    };
    Proposal::conditional(desc, off, full, &start, 1.0, 1.2)
}

/// log of e^{-tr(y^{-1}) - (x,y)} det(y)^{nu - n/r} from the factor of y.
pub(crate) fn ln_k_integrand(nu: f64, x: &Element, draw_t: &Mat, y: &Element) -> Result<f64> {
    let r = x.desc.rank;
    let ln_det: f64 = (0..r).map(|i| 2.0 * draw_t.a[i][i].re.ln()).sum();
    let beta = nu - x.desc.dim() / r as f64;
    Ok(-sampler::trace_inverse(draw_t) - x.inner(y)? + beta * ln_det)
}

/// Classifies x as interior or boundary; errors outside the closed cone.
fn cone_position(x: &Element) -> Result<bool> {
    let lmin = x.min_eigenvalue();
    let tol = 1e-12 * (1.0 + x.norm());
    if lmin < -tol {
        return Err(Error::NotInCone {
            min_eigenvalue: lmin,
        });
    }
    Ok(lmin > tol)
}

/// Importance-sampled K(x) = int e^{-tr(y^{-1}) - (x,y)} det(y)^{nu - n/r} dy.
pub fn k_integral_mc(
    desc: AlgebraDescriptor,
    nu: f64,
    x: &Element,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    desc.concrete_dim()?;
    if x.desc.rank != desc.rank || x.coords.len() != desc.concrete_dim()? {
        return Err(Error::Usage("x belongs to a different algebra".into()));
    }
    if !nu.is_finite() {
        return Err(Error::Usage(format!("nu must be finite, got {nu}")));
    }
    check_samples(n)?;
    if !cone_position(x)? && nu >= 0.0 {
        return Err(Error::Divergent(format!(
            "x is on the cone boundary and nu = {nu} is not negative"
        )));
    }
    let prop = k_proposal(nu, x)?;
    reduce::estimate(n, seed, |i, rng| {
        let d = prop.draw(rng).map_err(|e| at_sample(e, i))?;
        let lf = ln_k_integrand(nu, x, &d.t, &d.sample.y)?;
        Ok((lf + d.sample.log_weight).exp())
    })
}

pub(crate) fn at_sample(e: Error, i: u64) -> Error {
    match e {
        Error::NonFiniteWeight { detail, .. } => Error::NonFiniteWeight { sample: i, detail },
        other => other,
    }
}

/// Gamma_Omega(s) = (2 pi)^{(n-r)/2} prod_{j=1}^{r} Gamma(s - (j-1) d/2).
pub fn gamma_cone(desc: AlgebraDescriptor, s: f64) -> Result<f64> {
    let r = desc.rank;
    let d = if r == 1 { 0.0 } else { desc.d };
    let threshold = (r as f64 - 1.0) * d / 2.0;
    if !(s > threshold) {
        return Err(Error::Domain(format!(
            "Gamma of the cone needs s > {threshold}, got {s}"
        )));
    }
    let mut v = (2.0 * std::f64::consts::PI).powf((desc.dim() - r as f64) / 2.0);
    for j in 0..r {
        v *= guarded_gamma("s-(j-1)d/2", s - j as f64 * d / 2.0, 0.0)?;
    }
    Ok(v)
}

/// Monte Carlo estimate of int e^{-tr y} det(y)^{s - n/r} dy.
pub fn gamma_cone_mc(desc: AlgebraDescriptor, s: f64, n: u64, seed: u64) -> Result<McEstimate> {
    let nd = desc.concrete_dim()?;
    gamma_cone(desc, s)?;
    check_samples(n)?;
    let r = desc.rank;
    let d = if r == 1 { 0.0 } else { desc.d };
    // Under e^{-tr y} the factor has T_ii^2 ~ Gamma(s - i d/2) and normal
    // off-diagonal parts of variance 1/2; centre and widen accordingly.
    let mut center = vec![0.0; nd];
    let mut scale = vec![0.8; nd];
    for i in 0..r {
        let a = (s - i as f64 * d / 2.0).max(0.25);
        center[i] = a.sqrt();
        scale[i] = 0.6 / a.sqrt();
    }
    let prop = Proposal::fixed(desc, center, scale)?;
    let beta = s - desc.dim() / r as f64;
    reduce::estimate(n, seed, |i, rng| {
        let dr = prop.draw(rng).map_err(|e| at_sample(e, i))?;
        let ln_det: f64 = (0..r).map(|k| 2.0 * dr.t.a[k][k].re.ln()).sum();
        Ok((-dr.sample.y.trace() + beta * ln_det + dr.sample.log_weight).exp())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saddle_solves_stationarity() {
        for (x, beta) in [(1.3, -2.7), (0.0, -2.0), (2.0, 0.5), (1e-9, -3.0)] {
            let y = saddle(x, beta);
            let g = 1.0 / (y * y) - x + beta / y;
            assert!(g.abs() < 1e-9 * (1.0 / (y * y)), "{x} {beta} {y} {g}");
        }
    }

    #[test]
    fn gamma_cone_closed_forms() {
        let d1 = AlgebraDescriptor::new(1, 1.0).unwrap();
        assert!((gamma_cone(d1, 2.5).unwrap() - libm::tgamma(2.5)).abs() < 1e-14);
        let d3 = AlgebraDescriptor::new(3, 1.0).unwrap();
        let expect = (2.0 * std::f64::consts::PI).powf(1.5)
            * libm::tgamma(2.2)
            * libm::tgamma(1.7)
            * libm::tgamma(1.2);
        assert!((gamma_cone(d3, 2.2).unwrap() / expect - 1.0).abs() < 1e-14);
        assert!(matches!(gamma_cone(d3, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_bad_inputs() {
        let desc = AlgebraDescriptor::new(2, 1.0).unwrap();
        let x = Element::diag(desc, &[1.0, 0.0]).unwrap();
        assert!(matches!(
            k_integral_mc(desc, 0.3, &x, 20_000, 1),
            Err(Error::Divergent(_))
        ));
        let bad = Element::diag(desc, &[1.0, -0.5]).unwrap();
        assert!(matches!(
            k_integral_mc(desc, -0.3, &bad, 20_000, 1),
            Err(Error::NotInCone { .. })
        ));
        let x = Element::diag(desc, &[1.0, 2.0]).unwrap();
        assert!(matches!(
            k_integral_mc(desc, -0.3, &x, 100, 1),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn gamma_mc_small_run() {
        let desc = AlgebraDescriptor::new(2, 2.0).unwrap();
        let e = gamma_cone_mc(desc, 2.3, 20_000, 4).unwrap();
        let exact = gamma_cone(desc, 2.3).unwrap();
        assert!((e.value - exact).abs() < 4.0 * e.std_error, "{e:?} {exact}");
    }
}
