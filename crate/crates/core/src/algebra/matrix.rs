//! Small dense Hermitian matrices backing the concrete algebras.
//!
//! Real symmetric matrices are the special case with zero imaginary parts, so a
//! single complex type serves Sym_r(R) and Herm_r(C).

use num_complex::Complex64;

pub(crate) const MAX_RANK: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Mat {
    pub n: usize,
    pub a: [[Complex64; MAX_RANK]; MAX_RANK],
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        Mat {
            n,
            a: [[Complex64::new(0.0, 0.0); MAX_RANK]; MAX_RANK],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i][i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    s += self.a[i][k] * other.a[k][j];
                }
                out.a[i][j] = s;
            }
        }
        out
    }

    pub fn adjoint(&self) -> Mat {
        let mut out = Mat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.a[i][j] = self.a[j][i].conj();
            }
        }
        out
    }

    pub fn add(&self, other: &Mat) -> Mat {
        let mut out = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                out.a[i][j] += other.a[i][j];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Mat {
        let mut out = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                out.a[i][j] *= s;
            }
        }
        out
    }

    /// Symmetrised product (XY + YX) / 2.
    pub fn jordan(&self, other: &Mat) -> Mat {
        self.mul(other).add(&other.mul(self)).scale(0.5)
    }

    pub fn frobenius(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.a[i][j].norm_sqr();
            }
        }
        s.sqrt()
    }

    fn off_diagonal(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    s += self.a[i][j].norm_sqr();
                }
            }
        }
        s.sqrt()
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues and a unitary matrix whose columns are the matching
/// eigenvectors, so that `A = V diag(λ) V^*`.
pub(crate) fn jacobi_eigen(input: &Mat) -> (Vec<f64>, Mat) {
    let n = input.n;
    let mut a = *input;
    let mut v = Mat::identity(n);
    let scale = input.frobenius();
    if scale == 0.0 {
        return (vec![0.0; n], v);
    }
    for _sweep in 0..64 {
        if a.off_diagonal() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let g = a.a[p][q];
                let mag = g.norm();
                if mag <= 1e-300 {
                    continue;
                }
                let phase = g / mag;
                let app = a.a[p][p].re;
                let aqq = a.a[q][q].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let mut u = Mat::identity(n);
                u.a[p][p] = Complex64::new(c, 0.0);
                u.a[p][q] = Complex64::new(s, 0.0);
                u.a[q][p] = -phase.conj() * s;
                u.a[q][q] = phase.conj() * c;
                a = u.adjoint().mul(&a).mul(&u);
                // Keep the working matrix exactly Hermitian.
                for i in 0..n {
                    a.a[i][i].im = 0.0;
                }
                a.a[p][q] = Complex64::new(0.0, 0.0);
                a.a[q][p] = Complex64::new(0.0, 0.0);
                v = v.mul(&u);
            }
        }
    }
    let vals = (0..n).map(|i| a.a[i][i].re).collect();
    (vals, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn herm(entries: &[(usize, usize, f64, f64)], n: usize) -> Mat {
        let mut m = Mat::zeros(n);
        for &(i, j, re, im) in entries {
            m.a[i][j] = Complex64::new(re, im);
            m.a[j][i] = Complex64::new(re, -im);
        }
        m
    }

    #[test]
    fn jacobi_reconstructs_complex_hermitian() {
        let m = herm(
            &[
                (0, 0, 2.0, 0.0),
                (1, 1, -1.0, 0.0),
                (2, 2, 0.5, 0.0),
                (0, 1, 0.3, 0.7),
                (0, 2, -1.1, 0.2),
                (1, 2, 0.0, -0.4),
            ],
            3,
        );
        let (vals, v) = jacobi_eigen(&m);
        let mut d = Mat::zeros(3);
        for i in 0..3 {
            d.a[i][i] = Complex64::new(vals[i], 0.0);
        }
        let back = v.mul(&d).mul(&v.adjoint());
        for i in 0..3 {
            for j in 0..3 {
                assert!((back.a[i][j] - m.a[i][j]).norm() < 1e-13);
            }
        }
        let vv = v.adjoint().mul(&v);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((vv.a[i][j] - want).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn jacobi_on_diagonal_is_identity() {
        let m = herm(&[(0, 0, 3.0, 0.0), (1, 1, 1.0, 0.0), (2, 2, -2.0, 0.0)], 3);
        let (vals, _) = jacobi_eigen(&m);
        assert_eq!(vals, vec![3.0, 1.0, -2.0]);
    }
}
