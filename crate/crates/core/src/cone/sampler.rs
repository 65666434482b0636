//! Cone points from lower-triangular factors.
//!
//! A point is y = T T* with T lower triangular, positive real diagonal and
//! real (d = 1) or complex (d = 2) entries below it. The n real parameters are
//! ordered like the element coordinates: the r diagonal entries first, then
//! the entry T_ji for each pair i < j (real part, then imaginary part).

use super::ConeSample;
use crate::algebra::{AlgebraDescriptor, Element, Mat};
use crate::error::{Error, Result};
use crate::linalg::det_lu;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use std::sync::Arc;

/// Degrees of freedom of the Student-t law used in log space on the diagonal.
const DIAG_DOF: f64 = 5.0;

fn width(desc: &AlgebraDescriptor) -> usize {
    if desc.rank == 1 {
        0
    } else {
        desc.d as usize
    }
}

/// The factor T for a parameter vector.
pub(crate) fn factor(desc: &AlgebraDescriptor, params: &[f64]) -> Mat {
    let r = desc.rank;
    let mut t = Mat::zeros(r);
    for i in 0..r {
        t.a[i][i] = Complex64::new(params[i], 0.0);
    }
    for i in 0..r {
        for j in (i + 1)..r {
            let o = desc.pair_offset(i, j);
            let im = if width(desc) == 2 { params[o + 1] } else { 0.0 };
            t.a[j][i] = Complex64::new(params[o], im);
        }
    }
    t
}

/// Parameters of a lower-triangular factor.
#[cfg(test)]
pub(crate) fn params_of(desc: &AlgebraDescriptor, t: &Mat) -> Vec<f64> {
    let r = desc.rank;
    let n = desc.dim().round() as usize;
    let mut p = vec![0.0; n];
    for i in 0..r {
        p[i] = t.a[i][i].re;
    }
    for i in 0..r {
        for j in (i + 1)..r {
            let o = desc.pair_offset(i, j);
            p[o] = t.a[j][i].re;
            if width(desc) == 2 {
                p[o + 1] = t.a[j][i].im;
            }
        }
    }
    p
}

/// y = T T* for the parameters.
pub fn triangular_map(desc: AlgebraDescriptor, params: &[f64]) -> Result<Element> {
    let n = desc.concrete_dim()?;
    if params.len() != n {
        return Err(Error::Usage(format!(
            "expected {n} parameters, got {}",
            params.len()
        )));
    }
    let t = factor(&desc, params);
    Ok(Element::from_matrix(desc, &t.mul(&t.adjoint())))
}

/// log |det| of the differential of the triangular map, assembled column by
/// column in the orthonormal coordinates.
pub fn log_jacobian(desc: AlgebraDescriptor, params: &[f64]) -> Result<f64> {
    let n = desc.concrete_dim()?;
    if params.len() != n {
        return Err(Error::Usage(format!(
            "expected {n} parameters, got {}",
            params.len()
        )));
    }
    let t = factor(&desc, params);
    let ta = t.adjoint();
    let mut jac = vec![0.0; n * n];
    for k in 0..n {
        let mut unit = vec![0.0; n];
        unit[k] = 1.0;
        let e = factor(&desc, &unit);
        let dy = e.mul(&ta).add(&t.mul(&e.adjoint()));
        let col = Element::from_matrix(desc, &dy);
        for (row, v) in col.coords.iter().enumerate() {
            jac[row * n + k] = *v;
        }
    }
    Ok(det_lu(&jac, n).abs().ln())
}

/// Lower Cholesky factor of a positive definite Hermitian matrix.
pub(crate) fn cholesky_mat(m: &Mat) -> Option<Mat> {
    let n = m.n;
    let mut l = Mat::zeros(n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = m.a[i][j];
            for k in 0..j {
                s -= l.a[i][k] * l.a[j][k].conj();
            }
            if i == j {
                if !(s.re > 0.0) || !s.re.is_finite() {
                    return None;
                }
                l.a[i][i] = Complex64::new(s.re.sqrt(), 0.0);
            } else {
                l.a[i][j] = s / l.a[j][j].re;
            }
        }
    }
    Some(l)
}

/// ||T^{-1}||_F^2 = tr((T T*)^{-1}) by forward substitution.
pub(crate) fn trace_inverse(t: &Mat) -> f64 {
    let n = t.n;
    let mut total = 0.0;
    for col in 0..n {
        let mut x = [Complex64::new(0.0, 0.0); 3];
        for i in col..n {
            let mut s = if i == col {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            };
            for k in col..i {
                s -= t.a[i][k] * x[k];
            }
            x[i] = s / t.a[i][i];
            total += x[i].norm_sqr();
        }
    }
    total
}

fn ln_student_pdf(u: f64, k: f64) -> f64 {
    libm::lgamma((k + 1.0) / 2.0)
        - libm::lgamma(k / 2.0)
        - 0.5 * (k * std::f64::consts::PI).ln()
        - (k + 1.0) / 2.0 * (u * u / k).ln_1p()
}

/// Log-integrand as a function of the factor, used to place the
/// off-diagonal entries.
pub(crate) type FactorTarget = Arc<dyn Fn(&Mat) -> f64 + Send + Sync>;

/// A sampling law on the triangular parameters.
///
/// Diagonal entries follow a log-Student-t law around `center` with log-scale
/// `scale`. Off-diagonal entries are normal: either around `center` with
/// standard deviation `scale`, or, when a conditional target is attached,
/// drawn one after another from the Gaussian slice of that target through the
/// entries drawn so far (later entries held at zero), widened by `scale`.
#[derive(Clone)]
pub struct Proposal {
    pub desc: AlgebraDescriptor,
    pub center: Vec<f64>,
    pub scale: Vec<f64>,
    conditional: Option<FactorTarget>,
}

impl std::fmt::Debug for Proposal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Proposal")
            .field("desc", &self.desc)
            .field("center", &self.center)
            .field("scale", &self.scale)
            .field("conditional", &self.conditional.is_some())
            .finish()
    }
}

/// One draw: the factor and the cone point.
pub(crate) struct Draw {
    pub t: Mat,
    pub sample: ConeSample,
}

fn ln_normal_pdf(v: f64, mean: f64, sd: f64) -> f64 {
    let g = (v - mean) / sd;
    -0.5 * g * g - (sd * (2.0 * std::f64::consts::PI).sqrt()).ln()
}

impl Proposal {
    /// Identity centre, unit scales.
    pub fn standard(desc: AlgebraDescriptor) -> Result<Proposal> {
        let n = desc.concrete_dim()?;
        let mut center = vec![0.0; n];
        center[..desc.rank].iter_mut().for_each(|c| *c = 1.0);
        Proposal::fixed(desc, center, vec![1.0; n])
    }

    /// Independent entries with the given centres and scales.
    pub fn fixed(desc: AlgebraDescriptor, center: Vec<f64>, scale: Vec<f64>) -> Result<Proposal> {
        let n = desc.concrete_dim()?;
        if center.len() != n || scale.len() != n {
            return Err(Error::Usage(format!("centre and scale need {n} entries")));
        }
        if center[..desc.rank].iter().any(|&c| !(c > 0.0)) || scale.iter().any(|&s| !(s > 0.0)) {
            return Err(Error::Usage(
                "diagonal centres and all scales must be positive".into(),
            ));
        }
        Ok(Proposal {
            desc,
            center,
            scale,
            conditional: None,
        })
    }

    /// Conditional off-diagonal law for `off_target`, with the diagonal law
    /// fitted to the Laplace approximation of the diagonal marginal of
    /// `full_target` (a log density in the parameters). The search for the
    /// diagonal centre starts at `start`. Off-diagonal slices are widened by
    /// `off_widen` since later entries are held at zero when they are taken.
    pub(crate) fn conditional(
        desc: AlgebraDescriptor,
        off_target: FactorTarget,
        full_target: impl Fn(&[f64]) -> f64,
        start: &[f64],
        diag_widen: f64,
        off_widen: f64,
    ) -> Result<Proposal> {
        let n = desc.concrete_dim()?;
        let r = desc.rank;
        if start.len() != r || start.iter().any(|&c| !(c > 0.0)) {
            return Err(Error::Usage("diagonal start must be positive".into()));
        }
        let mut prop = Proposal {
            desc,
            center: vec![0.0; n],
            scale: vec![1.0; n],
            conditional: Some(off_target),
        };
        prop.center[..r].copy_from_slice(start);
        let (center, scale) = {
            // Laplace marginal of the diagonal in log coordinates.
            let marginal = |u: &[f64]| -> f64 {
                let mut p = vec![0.0; n];
                for i in 0..r {
                    p[i] = u[i].exp();
                }
                let mut correction = 0.0;
                for k in r..n {
                    match prop.off_law(&p, k) {
                        Some((m, sd)) => {
                            p[k] = m;
                            correction += (sd * (2.0 * std::f64::consts::PI).sqrt()).ln();
                        }
                        None => return f64::NEG_INFINITY,
                    }
                }
                full_target(&p) + correction + u.iter().sum::<f64>()
            };
            let mut u: Vec<f64> = start.iter().map(|c| c.ln()).collect();
            let h = 1e-3;
            let curvature = |u: &[f64], i: usize| -> (f64, f64) {
                let mut a = u.to_vec();
                let mut b = u.to_vec();
                a[i] += h;
                b[i] -= h;
                let (fa, f0, fb) = (marginal(&a), marginal(u), marginal(&b));
                ((fa - fb) / (2.0 * h), -(fa - 2.0 * f0 + fb) / (h * h))
            };
            for _ in 0..40 {
                let mut moved = 0.0f64;
                for i in 0..r {
                    let (g, c) = curvature(&u, i);
                    let step = if c.is_finite() && c > 0.0 {
                        (g / c).clamp(-1.0, 1.0)
                    } else {
                        0.5 * g.signum()
                    };
                    if step.is_finite() {
                        u[i] += step;
                        moved = moved.max(step.abs());
                    }
                }
                if moved < 1e-6 {
                    break;
                }
            }
            let center: Vec<f64> = u.iter().map(|v| v.exp()).collect();
            let scale: Vec<f64> = (0..r)
                .map(|i| {
                    let (_, c) = curvature(&u, i);
                    if c.is_finite() && c > 0.0 {
                        diag_widen / c.sqrt()
                    } else {
                        1.0
                    }
                })
                .collect();
            (center, scale)
        };
        prop.center[..r].copy_from_slice(&center);
        prop.scale[..r].copy_from_slice(&scale);
        for k in r..n {
            prop.scale[k] = off_widen;
        }
        Ok(prop)
    }

    /// Mean and standard deviation of off-diagonal entry k given the
    /// diagonal and entries r..k of `p` (entries after k are read as zero).
    fn off_law(&self, p: &[f64], k: usize) -> Option<(f64, f64)> {
        let target = self.conditional.as_ref()?;
        let r = self.desc.rank;
        let typical = (p[..r].iter().map(|v| v.ln()).sum::<f64>() / r as f64).exp();
        let step = 0.1 * typical;
        let mut q = p.to_vec();
        q[k + 1..].iter_mut().for_each(|v| *v = 0.0);
        let mut at = |v: f64| {
            q[k] = v;
            target(&factor(&self.desc, &q))
        };
        let (fp, f0, fm) = (at(step), at(0.0), at(-step));
        let prec = -(fp - 2.0 * f0 + fm) / (step * step);
        let slope = (fp - fm) / (2.0 * step);
        if !(prec > 0.0 && prec.is_finite() && slope.is_finite()) {
            return Some((0.0, typical));
        }
        Some((slope / prec, 1.0 / prec.sqrt()))
    }

    /// log density of the parameters under this law.
    pub fn ln_density(&self, params: &[f64]) -> f64 {
        let r = self.desc.rank;
        let mut s = 0.0;
        for k in 0..r {
            let (c, sc, p) = (self.center[k], self.scale[k], params[k]);
            let u = (p / c).ln() / sc;
            s += ln_student_pdf(u, DIAG_DOF) - sc.ln() - p.ln();
        }
        let mut walk = params.to_vec();
        walk[r..].iter_mut().for_each(|v| *v = 0.0);
        for k in r..params.len() {
            s += match self.off_law(&walk, k) {
                Some((m, sd)) => ln_normal_pdf(params[k], m, sd * self.scale[k]),
                None => ln_normal_pdf(params[k], self.center[k], self.scale[k]),
            };
            walk[k] = params[k];
        }
        s
    }

    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Draw> {
        let r = self.desc.rank;
        let n = self.center.len();
        let student = StudentT::new(DIAG_DOF).expect("positive degrees of freedom");
        for _ in 0..16 {
            let mut params = vec![0.0; n];
            let mut ln_q = 0.0;
            for k in 0..r {
                let u: f64 = student.sample(rng);
                params[k] = self.center[k] * (self.scale[k] * u).exp();
                ln_q += ln_student_pdf(u, DIAG_DOF) - self.scale[k].ln() - params[k].ln();
            }
            if params[..r].iter().any(|&p| !(p > 0.0 && p.is_finite())) {
                continue;
            }
            for k in r..n {
                let (m, sd) = match self.off_law(&params, k) {
                    Some((m, sd)) => (m, sd * self.scale[k]),
                    None => (self.center[k], self.scale[k]),
                };
                let g: f64 = StandardNormal.sample(rng);
                params[k] = m + sd * g;
                ln_q += ln_normal_pdf(params[k], m, sd);
            }
            let t = factor(&self.desc, &params);
            let y = Element::from_matrix(self.desc, &t.mul(&t.adjoint()));
            if y.coords.iter().any(|v| !v.is_finite()) {
                continue;
            }
            let log_weight = log_jacobian(self.desc, &params)? - ln_q;
            if !log_weight.is_finite() {
                continue;
            }
            return Ok(Draw {
                t,
                sample: ConeSample { y, log_weight },
            });
        }
        Err(Error::NonFiniteWeight {
            sample: 0,
            detail: "sixteen consecutive draws underflowed".into(),
        })
    }
}

/// A cone point under the standard law, with its importance log-weight.
pub fn sample_cone<R: Rng + ?Sized>(desc: AlgebraDescriptor, rng: &mut R) -> Result<ConeSample> {
    Ok(Proposal::standard(desc)?.draw(rng)?.sample)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::reduce::sample_rng;

    fn descs() -> Vec<AlgebraDescriptor> {
        vec![
            AlgebraDescriptor::new(1, 1.0).unwrap(),
            AlgebraDescriptor::new(2, 1.0).unwrap(),
            AlgebraDescriptor::new(2, 2.0).unwrap(),
            AlgebraDescriptor::new(3, 1.0).unwrap(),
            AlgebraDescriptor::new(3, 2.0).unwrap(),
        ]
    }

    #[test]
    fn scalar_jacobian_is_two_t() {
        let desc = AlgebraDescriptor::new(1, 1.0).unwrap();
        let y = triangular_map(desc, &[1.7]).unwrap();
        assert!((y.coords[0] - 2.89).abs() < 1e-14);
        assert!((log_jacobian(desc, &[1.7]).unwrap() - (3.4f64).ln()).abs() < 1e-14);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        for desc in descs() {
            let mut rng = sample_rng(3, 0);
            let p = params_of(&desc, &Proposal::standard(desc).unwrap().draw(&mut rng).unwrap().t);
            let n = p.len();
            let h = 1e-6;
            let mut jac = vec![0.0; n * n];
            for k in 0..n {
                let (mut a, mut b) = (p.clone(), p.clone());
                a[k] += h;
                b[k] -= h;
                let ya = triangular_map(desc, &a).unwrap();
                let yb = triangular_map(desc, &b).unwrap();
                for row in 0..n {
                    jac[row * n + k] = (ya.coords[row] - yb.coords[row]) / (2.0 * h);
                }
            }
            let fd = det_lu(&jac, n).abs().ln();
            let exact = log_jacobian(desc, &p).unwrap();
            assert!((fd - exact).abs() < 1e-6, "{desc:?}: {fd} vs {exact}");
        }
    }

    #[test]
    fn jacobian_closed_form() {
        // |J| = 2^r 2^{(n-r)/2} prod_i T_ii^{1 + d(r-1-i)}.
        for desc in descs() {
            let mut rng = sample_rng(11, 4);
            let p = params_of(&desc, &Proposal::standard(desc).unwrap().draw(&mut rng).unwrap().t);
            let (r, n) = (desc.rank, p.len());
            let d = if r == 1 { 0.0 } else { desc.d };
            let mut closed = r as f64 * 2f64.ln() + (n - r) as f64 / 2.0 * 2f64.ln();
            for i in 0..r {
                closed += (1.0 + d * (r - 1 - i) as f64) * p[i].ln();
            }
            assert!(
                (closed - log_jacobian(desc, &p).unwrap()).abs() < 1e-10,
                "{desc:?}"
            );
        }
    }

    #[test]
    fn trace_inverse_matches_algebra() {
        for desc in descs() {
            let mut rng = sample_rng(5, 2);
            let d = Proposal::standard(desc).unwrap().draw(&mut rng).unwrap();
            let via_alg = d.sample.y.inverse().unwrap().trace();
            assert!(
                (trace_inverse(&d.t) - via_alg).abs() < 1e-9 * via_alg,
                "{desc:?}"
            );
        }
    }

    #[test]
    fn cholesky_round_trip() {
        let desc = AlgebraDescriptor::new(3, 2.0).unwrap();
        let y = triangular_map(desc, &[1.2, 0.7, 2.0, 0.3, -0.4, 0.9, 0.1, -1.1, 0.25]).unwrap();
        let t = cholesky_mat(&y.to_matrix()).unwrap();
        let back = triangular_map(desc, &params_of(&desc, &t)).unwrap();
        assert!(y.sub(&back).unwrap().norm() < 1e-12);
    }

    #[test]
    fn draw_and_density_agree() {
        // The log-weight of a draw must use the same density that
        // ln_density reports for its parameters.
        let desc = AlgebraDescriptor::new(3, 2.0).unwrap();
        let target: FactorTarget =
            Arc::new(|t: &Mat| -trace_inverse(t) - t.mul(&t.adjoint()).a[0][0].re);
        let full = |p: &[f64]| -> f64 {
            let t = factor(&desc, p);
            -trace_inverse(&t)
                - t.mul(&t.adjoint()).a[0][0].re
                - 3.0 * p[..3].iter().map(|v| v.ln()).sum::<f64>()
        };
        let prop = Proposal::conditional(desc, target, full, &[1.0, 1.0, 1.0], 1.0, 1.2).unwrap();
        for i in 0..20 {
            let d = prop.draw(&mut sample_rng(2, i)).unwrap();
            let params = params_of(&desc, &d.t);
            let expect = log_jacobian(desc, &params).unwrap() - prop.ln_density(&params);
            assert!((d.sample.log_weight - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn samples_lie_in_the_cone() {
        for desc in descs() {
            for i in 0..50 {
                let s = sample_cone(desc, &mut sample_rng(9, i)).unwrap();
                assert!(s.y.min_eigenvalue() > 0.0 && s.log_weight.is_finite());
            }
        }
    }
}
