//! Concrete Euclidean Jordan algebras Sym_r(R) and Herm_r(C), r <= 3.
//!
//! Elements are coordinate vectors in an orthonormal basis for the trace
//! inner product. The basis lists the diagonal units E_ii first, then for every
//! pair i < j (in the order (0,1), (0,2), (1,2)) the real generator
//! (E_ij + E_ji)/sqrt(2) and, when d = 2, the imaginary generator
//! i(E_ij - E_ji)/sqrt(2).

mod matrix;
mod peirce;

pub(crate) use matrix::Mat;
pub use peirce::{
    det_rho, embed_a0, embed_half, half_coords, restrict_a0, rho_apply, rho_matrix, PeirceSplit,
};

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;

/// Rank and Peirce constant of a Jordan algebra.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraDescriptor {
    pub rank: usize,
    pub d: f64,
}

impl AlgebraDescriptor {
    pub fn new(rank: usize, d: f64) -> Result<Self> {
        if !(1..=3).contains(&rank) {
            return Err(Error::Usage(format!("rank must be 1, 2 or 3, got {rank}")));
        }
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::Usage(format!("d must be a positive real, got {d}")));
        }
        Ok(AlgebraDescriptor { rank, d })
    }

    /// Dimension n = r + r(r-1)d/2 (a real number for series-only d).
    pub fn dim(&self) -> f64 {
        let r = self.rank as f64;
        r + r * (r - 1.0) * self.d / 2.0
    }

    pub fn is_concrete(&self) -> bool {
        self.rank == 1 || self.d == 1.0 || self.d == 2.0
    }

    /// Integer dimension of a concretely backed algebra.
    pub fn concrete_dim(&self) -> Result<usize> {
        if !self.is_concrete() {
            return Err(Error::UnsupportedAlgebra {
                rank: self.rank,
                d: self.d,
            });
        }
        Ok(self.dim().round() as usize)
    }

    fn width(&self) -> usize {
        if self.rank == 1 {
            0
        } else {
            self.d as usize
        }
    }

    /// First coordinate of the off-diagonal block for the pair i < j.
    pub fn pair_offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < self.rank);
        let ordinal = match (i, j) {
            (0, 1) => 0,
            (0, 2) => 1,
            _ => 2,
        };
        self.rank + ordinal * self.width()
    }

    fn same_algebra(&self, other: &AlgebraDescriptor) -> bool {
        self.rank == other.rank && (self.rank == 1 || self.d == other.d)
    }
}

/// A point of a concrete algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Element {
    #[serde(flatten)]
    pub desc: AlgebraDescriptor,
    pub coords: Vec<f64>,
}

/// Eigenvalues (descending) and a Jordan frame of matching idempotents.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub frame: Vec<Element>,
}

impl Element {
    pub fn new(desc: AlgebraDescriptor, coords: Vec<f64>) -> Result<Self> {
        let n = desc.concrete_dim()?;
        if coords.len() != n {
            return Err(Error::Usage(format!(
                "expected {n} coordinates, got {}",
                coords.len()
            )));
        }
        Ok(Element { desc, coords })
    }

    pub fn zero(desc: AlgebraDescriptor) -> Result<Self> {
        let n = desc.concrete_dim()?;
        Ok(Element {
            desc,
            coords: vec![0.0; n],
        })
    }

    pub fn unit(desc: AlgebraDescriptor) -> Result<Self> {
        Self::diag(desc, &vec![1.0; desc.rank])
    }

    /// The element sum_i lambda_i E_ii.
    pub fn diag(desc: AlgebraDescriptor, lambda: &[f64]) -> Result<Self> {
        let mut e = Self::zero(desc)?;
        if lambda.len() != desc.rank {
            return Err(Error::Usage(format!(
                "expected {} diagonal entries",
                desc.rank
            )));
        }
        e.coords[..desc.rank].copy_from_slice(lambda);
        Ok(e)
    }

    /// The diagonal idempotent E_ii.
    pub fn idempotent(desc: AlgebraDescriptor, i: usize) -> Result<Self> {
        let mut lambda = vec![0.0; desc.rank];
        lambda[i] = 1.0;
        Self::diag(desc, &lambda)
    }

    /// Standard normal coordinates.
    pub fn random<R: Rng + ?Sized>(desc: AlgebraDescriptor, rng: &mut R) -> Result<Self> {
        let n = desc.concrete_dim()?;
        let coords = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        Ok(Element { desc, coords })
    }

    pub fn rank(&self) -> usize {
        self.desc.rank
    }

    fn check_same(&self, other: &Element) -> Result<()> {
        if self.desc.same_algebra(&other.desc) {
            Ok(())
        } else {
            Err(Error::Usage(format!(
                "mismatched algebras: (r={}, d={}) vs (r={}, d={})",
                self.desc.rank, self.desc.d, other.desc.rank, other.desc.d
            )))
        }
    }

    pub(crate) fn to_matrix(&self) -> Mat {
        let r = self.desc.rank;
        let mut m = Mat::zeros(r);
        for i in 0..r {
            m.a[i][i] = Complex64::new(self.coords[i], 0.0);
        }
        for i in 0..r {
            for j in (i + 1)..r {
                let o = self.desc.pair_offset(i, j);
                let re = self.coords[o] / SQRT_2;
                let im = if self.desc.width() == 2 {
                    self.coords[o + 1] / SQRT_2
                } else {
                    0.0
                };
                m.a[i][j] = Complex64::new(re, im);
                m.a[j][i] = Complex64::new(re, -im);
            }
        }
        m
    }

    pub(crate) fn from_matrix(desc: AlgebraDescriptor, m: &Mat) -> Element {
        let r = desc.rank;
        let n = desc.dim().round() as usize;
        let mut coords = vec![0.0; n];
        for i in 0..r {
            coords[i] = m.a[i][i].re;
        }
        for i in 0..r {
            for j in (i + 1)..r {
                let o = desc.pair_offset(i, j);
                // Average the two triangles so slightly non-Hermitian input is projected.
                let z = (m.a[i][j] + m.a[j][i].conj()) * 0.5;
                coords[o] = SQRT_2 * z.re;
                if desc.width() == 2 {
                    coords[o + 1] = SQRT_2 * z.im;
                }
            }
        }
        Element { desc, coords }
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Element {
            desc: self.desc,
            coords,
        })
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Element {
            desc: self.desc,
            coords,
        })
    }

    pub fn scale(&self, s: f64) -> Element {
        Element {
            desc: self.desc,
            coords: self.coords.iter().map(|a| a * s).collect(),
        }
    }

    /// Trace inner product, which is the dot product of coordinates.
    pub fn inner(&self, other: &Element) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        self.coords[..self.desc.rank].iter().sum()
    }

    pub fn jordan_mul(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        let m = self.to_matrix().jordan(&other.to_matrix());
        Ok(Element::from_matrix(self.desc, &m))
    }

    /// The multiplication operator L(x) applied to y, i.e. x∘y.
    pub fn l_apply(&self, y: &Element) -> Result<Element> {
        self.jordan_mul(y)
    }

    pub fn square(&self) -> Element {
        let m = self.to_matrix();
        Element::from_matrix(self.desc, &m.mul(&m))
    }

    /// Coefficients (a_1, ..., a_r) of the generic minimal polynomial
    /// x^r - a_1 x^{r-1} + a_2 x^{r-2} - ... = 0, from power traces.
    pub fn char_coeffs(&self) -> Vec<f64> {
        let m = self.to_matrix();
        let r = self.desc.rank;
        let mut p = Vec::with_capacity(r);
        let mut pow = m;
        for k in 0..r {
            if k > 0 {
                pow = pow.mul(&m);
            }
            p.push((0..r).map(|i| pow.a[i][i].re).sum::<f64>());
        }
        // Newton identities.
        let mut e = vec![1.0];
        for k in 1..=r {
            let mut s = 0.0;
            for i in 1..=k {
                let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
                s += sign * e[k - i] * p[i - 1];
            }
            e.push(s / k as f64);
        }
        e[1..].to_vec()
    }

    pub fn det(&self) -> f64 {
        *self.char_coeffs().last().unwrap()
    }

    /// Second characteristic coefficient, the sum of pairwise eigenvalue products.
    pub fn a2(&self) -> f64 {
        let c = self.char_coeffs();
        if c.len() >= 2 {
            c[1]
        } else {
            0.0
        }
    }

    /// Inverse from the Cayley-Hamilton identity.
    pub fn inverse(&self) -> Result<Element> {
        let c = self.char_coeffs();
        let det = *c.last().unwrap();
        let scale = self.norm().max(f64::MIN_POSITIVE);
        if det.abs() <= 1e-12 * scale.powi(self.desc.rank as i32) || det == 0.0 {
            return Err(Error::Singular { det: det.abs() });
        }
        let e = Element::unit(self.desc)?;
        let adj = match self.desc.rank {
            1 => e,
            2 => e.scale(c[0]).sub(self)?,
            _ => self.square().sub(&self.scale(c[0]))?.add(&e.scale(c[1]))?,
        };
        Ok(adj.scale(1.0 / det))
    }

    pub fn spectral(&self) -> SpectralDecomposition {
        let (vals, v) = matrix::jacobi_eigen(&self.to_matrix());
        let r = self.desc.rank;
        let mut order: Vec<usize> = (0..r).collect();
        order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
        let mut eigenvalues = Vec::with_capacity(r);
        let mut frame = Vec::with_capacity(r);
        for &k in &order {
            eigenvalues.push(vals[k]);
            let mut proj = Mat::zeros(r);
            for i in 0..r {
                for j in 0..r {
                    proj.a[i][j] = v.a[i][k] * v.a[j][k].conj();
                }
            }
            frame.push(Element::from_matrix(self.desc, &proj));
        }
        SpectralDecomposition { eigenvalues, frame }
    }

    /// Applies a scalar function to the eigenvalues.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Element {
        let s = self.spectral();
        let mut out = vec![0.0; self.coords.len()];
        for (lam, c) in s.eigenvalues.iter().zip(&s.frame) {
            let w = f(*lam);
            for (o, ci) in out.iter_mut().zip(&c.coords) {
                *o += w * ci;
            }
        }
        Element {
            desc: self.desc,
            coords: out,
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *self.spectral().eigenvalues.last().unwrap()
    }

    /// The square root inside the cone.
    pub fn sqrt_cone(&self) -> Result<Element> {
        let s = self.spectral();
        let lmin = *s.eigenvalues.last().unwrap();
        let lmax = s.eigenvalues[0].abs().max(1.0);
        if lmin <= 1e-14 * lmax {
            return Err(Error::NotInCone {
                min_eigenvalue: lmin,
            });
        }
        Ok(self.map_spectrum(f64::sqrt))
    }

    /// Quadratic representation P(x)y = 2x∘(x∘y) - x²∘y.
    pub fn quadratic_rep(&self, y: &Element) -> Result<Element> {
        let xy = self.jordan_mul(y)?;
        let a = self.jordan_mul(&xy)?.scale(2.0);
        let b = self.square().jordan_mul(y)?;
        a.sub(&b)
    }

    pub fn peirce_split(&self, c: &Element) -> Result<PeirceSplit> {
        peirce::split(self, c)
    }
}

impl SpectralDecomposition {
    pub fn reconstruct(&self) -> Element {
        let mut out = self.frame[0].scale(0.0);
        for (lam, c) in self.eigenvalues.iter().zip(&self.frame) {
            for (o, ci) in out.coords.iter_mut().zip(&c.coords) {
                *o += lam * ci;
            }
        }
        out
    }
}
