//! Finite-difference residuals of the Z_k (t-space) and B_i (x-space) operators.

use super::{SeriesParams, SymmetricPoint};
use crate::error::{Error, Result};
use std::collections::HashMap;

/// Second-order coefficients A^k_ij (row-major r x r) and the first-order
/// coefficient nu + 1 + (r-k)d/2 of Z_k, with k 1-based.
pub fn z_operator_coefficients(k: usize, p: &SeriesParams, t: &SymmetricPoint) -> (Vec<f64>, f64) {
    let r = t.rank();
    let mut a = vec![0.0; r * r];
    let k = k as i32;
    for i in 1..=r as i32 {
        for j in 1..=r as i32 {
            let v = if i >= k && j >= k {
                t.get(i + j - k)
            } else if i < k && j < k && i + j >= k {
                -t.get(i + j - k)
            } else {
                0.0
            };
            a[((i - 1) * r as i32 + (j - 1)) as usize] = v;
        }
    }
    let first = p.nu + 1.0 + (r as f64 - k as f64) * p.d / 2.0;
    (a, first)
}

/// Value, gradient and Hessian from central differences.
struct Derivatives {
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
}

/// Fourth-order central weights on offsets -2, -1, 1, 2 (first derivative).
const W1: [(i32, f64); 4] = [(-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0)];
/// Fourth-order central weights on offsets -2..2 (second derivative).
const W2: [(i32, f64); 5] = [(-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0)];

fn derivatives(f: &dyn Fn(&[f64]) -> Result<f64>, x: &[f64], h: &[f64]) -> Result<Derivatives> {
    let r = x.len();
    // Offsets are in units of h/2 so the h and h/2 stencils share points.
    let mut cache: HashMap<Vec<i32>, f64> = HashMap::new();
    let mut eval = |off: &[i32]| -> Result<f64> {
        if let Some(v) = cache.get(off) {
            return Ok(*v);
        }
        let pt: Vec<f64> = (0..r).map(|i| x[i] + off[i] as f64 * h[i] / 2.0).collect();
        let v = f(&pt)?;
        cache.insert(off.to_vec(), v);
        Ok(v)
    };
    // Every stencil's weights sum to zero; differencing against the centre
    // value first keeps low-degree polynomials exact.
    let value = eval(&vec![0; r])?;
    let mut grad = vec![0.0; r];
    let mut hess = vec![0.0; r * r];
    let unit = |i: usize, a: i32| -> Vec<i32> {
        let mut o = vec![0; r];
        o[i] = a;
        o
    };
    for i in 0..r {
        let mut d1 = [0.0; 2];
        let mut d2 = [0.0; 2];
        for (level, scale) in [(0usize, 2i32), (1, 1)] {
            let step = h[i] * scale as f64 / 2.0;
            let mut s1 = 0.0;
            for (o, w) in W1 {
                s1 += w * (eval(&unit(i, o * scale))? - value);
            }
            d1[level] = s1 / (12.0 * step);
            let mut s2 = 0.0;
            for (o, w) in W2 {
                s2 += w * (eval(&unit(i, o * scale))? - value);
            }
            d2[level] = s2 / (12.0 * step * step);
        }
        grad[i] = (16.0 * d1[1] - d1[0]) / 15.0;
        hess[i * r + i] = (16.0 * d2[1] - d2[0]) / 15.0;
    }
    for i in 0..r {
        for j in (i + 1)..r {
            let mut dm = [0.0; 2];
            for (level, scale) in [(0usize, 2i32), (1, 1)] {
                let (si, sj) = (h[i] * scale as f64 / 2.0, h[j] * scale as f64 / 2.0);
                let mut s = 0.0;
                for (oi, wi) in W1 {
                    for (oj, wj) in W1 {
                        let mut off = vec![0; r];
                        off[i] = oi * scale;
                        off[j] = oj * scale;
                        s += wi * wj * (eval(&off)? - value);
                    }
                }
                dm[level] = s / (144.0 * si * sj);
            }
            let v = (16.0 * dm[1] - dm[0]) / 15.0;
            hess[i * r + j] = v;
            hess[j * r + i] = v;
        }
    }
    Ok(Derivatives { value, grad, hess })
}

fn derivatives_with_retry(f: &dyn Fn(&[f64]) -> Result<f64>, x: &[f64]) -> Result<Derivatives> {
    // Powers of two keep every stencil offset exact, so a polynomial is
    // differenced without rounding in its abscissae.
    let mut h: Vec<f64> = x
        .iter()
        .map(|v| (1e-3 * v.abs()).max(1e-4).log2().round().exp2())
        .collect();
    let mut last = None;
    for _ in 0..4 {
        match derivatives(f, x, &h) {
            Ok(d) => return Ok(d),
            Err(e @ Error::Domain(_)) => {
                last = Some(e);
                h.iter_mut().for_each(|v| *v /= 2.0);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::Domain(format!(
        "finite-difference step underflow near the domain boundary ({})",
        last.map(|e| e.to_string()).unwrap_or_default()
    )))
}

/// Residuals Z_k f for k = 1..r with zero-order term `sigma` in Z_1.
pub fn z_residual_all(
    f: &dyn Fn(&SymmetricPoint) -> Result<f64>,
    p: &SeriesParams,
    t: &SymmetricPoint,
    sigma: f64,
) -> Result<Vec<f64>> {
    let g = |v: &[f64]| f(&SymmetricPoint { t: v.to_vec() });
    let der = derivatives_with_retry(&g, &t.t)?;
    let r = t.rank();
    Ok((1..=r)
        .map(|k| {
            let (a, first) = z_operator_coefficients(k, p, t);
            let mut s: f64 = a.iter().zip(&der.hess).map(|(x, y)| x * y).sum();
            s += first * der.grad[k - 1];
            if k == 1 {
                s += sigma * der.value;
            }
            s
        })
        .collect())
}

/// Z_k f at t for the system with +1 in Z_1 (k is 1-based).
pub fn z_residual(
    k: usize,
    f: &dyn Fn(&SymmetricPoint) -> Result<f64>,
    p: &SeriesParams,
    t: &SymmetricPoint,
) -> Result<f64> {
    if k == 0 || k > t.rank() {
        return Err(Error::Usage(format!("k must lie in 1..={}", t.rank())));
    }
    Ok(z_residual_all(f, p, t, 1.0)?[k - 1])
}

/// B_i f at x for the system with zero-order term `sigma` (i is 1-based).
pub fn muirhead_residual_with(
    i: usize,
    f: &dyn Fn(&[f64]) -> Result<f64>,
    p: &SeriesParams,
    x: &[f64],
    sigma: f64,
) -> Result<f64> {
    let r = x.len();
    if i == 0 || i > r {
        return Err(Error::Usage(format!("i must lie in 1..={r}")));
    }
    for a in 0..r {
        for b in (a + 1)..r {
            if (x[a] - x[b]).abs() <= 1e-3 {
                return Err(Error::IllConditioned(format!(
                    "x_{} and x_{} are closer than 1e-3",
                    a + 1,
                    b + 1
                )));
            }
        }
    }
    let der = derivatives_with_retry(f, x)?;
    let i = i - 1;
    let mut s = x[i] * der.hess[i * r + i] + (p.nu + 1.0) * der.grad[i] + sigma * der.value;
    for j in 0..r {
        if j != i {
            s += p.d / 2.0 * (x[i] * der.grad[i] - x[j] * der.grad[j]) / (x[i] - x[j]);
        }
    }
    Ok(s)
}

/// B_i f at x for the system with +1 as zero-order term.
pub fn muirhead_residual(
    i: usize,
    f: &dyn Fn(&[f64]) -> Result<f64>,
    p: &SeriesParams,
    x: &[f64],
) -> Result<f64> {
    muirhead_residual_with(i, f, p, x, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_table_rank3() {
        let p = SeriesParams::new(0.3, 1.0);
        let t = SymmetricPoint {
            t: vec![2.0, 3.0, 5.0],
        };
        let (a, c) = z_operator_coefficients(1, &p, &t);
        // i, j >= 1: A_ij = t_{i+j-1}.
        assert_eq!(a, vec![2.0, 3.0, 5.0, 3.0, 5.0, 0.0, 5.0, 0.0, 0.0]);
        assert!((c - (0.3 + 1.0 + 1.0)).abs() < 1e-15);
        let (a, _) = z_operator_coefficients(3, &p, &t);
        // Only (3,3) in the first block, and -t_{i+j-3} for i,j < 3 with i+j >= 3.
        assert_eq!(a, vec![0.0, -1.0, 0.0, -1.0, -2.0, 0.0, 0.0, 0.0, 5.0]);
    }

    #[test]
    fn polynomial_controls() {
        let p = SeriesParams::new(0.3, 1.0);
        let t = SymmetricPoint {
            t: vec![0.7, 0.2, 0.1],
        };
        let r = z_residual(1, &|s: &SymmetricPoint| Ok(s.t[0]), &p, &t).unwrap();
        assert!((r - (0.3 + 1.0 + 1.0 + 0.7)).abs() < 1e-8);
        let one = muirhead_residual(2, &|_: &[f64]| Ok(1.0), &p, &[0.3, 0.7, 1.2]).unwrap();
        assert!((one - 1.0).abs() < 1e-12);
        assert!(matches!(
            muirhead_residual(1, &|_: &[f64]| Ok(1.0), &p, &[0.3, 0.3005]),
            Err(Error::IllConditioned(_))
        ));
    }
}
