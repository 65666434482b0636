//! K-Bessel functions as combinations of the modified J-solutions.

use super::coeffs::{coeffs2_guarded, coeffs3_guarded};
use super::continuation::continue_solution;
use super::roots::roots_from_symmetric;
use super::{elem_sym, EvalResult, Flavor, SeriesParams, Solution, SymmetricPoint};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// How a K value is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum KMethod {
    /// Direct series where they converge, continuation otherwise.
    Auto,
    /// Direct series only.
    Series,
    /// Continuation from a series anchor.
    Continuation,
}

/// The (coefficient, solution) pairs whose sum is K of the given rank.
pub fn k_members(rank: usize, p: &SeriesParams) -> Result<Vec<(f64, Solution)>> {
    let m = |j: u8, partner: bool| {
        Solution::new(rank, j, partner).map(|s| s.with_flavor(Flavor::Modified))
    };
    match rank {
        2 => {
            let c = coeffs2_guarded(p.nu, p.d, p.pole_guard)?;
            Ok(vec![
                (c[0], m(1, false)?),
                (c[1], m(2, false)?),
                (c[2], m(1, true)?),
                (c[3], m(2, true)?),
            ])
        }
        3 => {
            let c = coeffs3_guarded(p.nu, p.d, p.pole_guard)?;
            let mut out = Vec::with_capacity(8);
            for j in 0..4 {
                out.push((c.a[j], m(j as u8 + 1, false)?));
            }
            for j in 0..4 {
                out.push((c.b[j], m(j as u8 + 1, true)?));
            }
            Ok(out)
        }
        _ => Err(Error::Usage(format!(
            "K-series exist for rank 2 and 3, got {rank}"
        ))),
    }
}

fn combine(
    members: &[(f64, Solution)],
    p: &SeriesParams,
    t: &SymmetricPoint,
) -> Result<EvalResult> {
    let mut value = 0.0;
    let mut err = 0.0;
    let mut mag = 0.0;
    let mut work = 0;
    for (c, s) in members {
        let r = s.eval(p, t)?;
        value += c * r.value;
        err += c.abs() * r.err;
        mag += (c * r.value).abs();
        work += r.work;
    }
    Ok(EvalResult {
        value,
        err: err + 4.0 * f64::EPSILON * mag,
        work,
    })
}

fn check_positive(t: &SymmetricPoint) -> Result<()> {
    if t.t.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Domain(format!(
            "K-series need t_p > 0, got {:?}",
            t.t
        )));
    }
    Ok(())
}

/// Eq.-(7)-type rank-2 K-function at t.
pub fn k2_series(p: &SeriesParams, t: &SymmetricPoint) -> Result<EvalResult> {
    k_series_with(2, p, t, KMethod::Auto)
}

/// Rank-3 K-function at t from the eight-term combination.
pub fn k3_series(p: &SeriesParams, t: &SymmetricPoint) -> Result<EvalResult> {
    k_series_with(3, p, t, KMethod::Auto)
}

pub fn k_series_with(
    rank: usize,
    p: &SeriesParams,
    t: &SymmetricPoint,
    method: KMethod,
) -> Result<EvalResult> {
    p.validate()?;
    if t.rank() != rank {
        return Err(Error::Usage(format!(
            "expected {rank} symmetric coordinates"
        )));
    }
    check_positive(t)?;
    let members = k_members(rank, p)?;
    match method {
        KMethod::Series => combine(&members, p, t),
        KMethod::Continuation => {
            let x = roots_from_symmetric(t)?;
            k_at_eigenvalues(rank, &members, p, &x, false)
        }
        KMethod::Auto => match combine(&members, p, t) {
            Err(Error::NoConvergence { .. }) => {
                let x = roots_from_symmetric(t)?;
                k_at_eigenvalues(rank, &members, p, &x, true)
            }
            other => other,
        },
    }
}

/// K-function at the eigenvalues x; coincident rank-2 eigenvalues are handled
/// by a limit along x = (m - h, m + h).
pub fn k_series_x(rank: usize, p: &SeriesParams, x: &[f64], method: KMethod) -> Result<EvalResult> {
    p.validate()?;
    if x.len() != rank {
        return Err(Error::Usage(format!("expected {rank} eigenvalues")));
    }
    if x.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::Domain(format!(
            "K-series need positive eigenvalues, got {x:?}"
        )));
    }
    let members = k_members(rank, p)?;
    match method {
        KMethod::Series => combine(&members, p, &elem_sym(x)),
        KMethod::Continuation => k_at_eigenvalues(rank, &members, p, x, false),
        KMethod::Auto => {
            if rank == 2 && near_diagonal(x) {
                return diagonal_limit(&members, p, x);
            }
            match combine(&members, p, &elem_sym(x)) {
                Err(Error::NoConvergence { .. }) | Err(Error::Domain(_)) => {
                    k_at_eigenvalues(rank, &members, p, x, true)
                }
                other => other,
            }
        }
    }
}

fn near_diagonal(x: &[f64]) -> bool {
    (x[0] - x[1]).abs() < 0.05 * (x[0] + x[1])
}

fn k_at_eigenvalues(
    rank: usize,
    members: &[(f64, Solution)],
    p: &SeriesParams,
    x: &[f64],
    allow_limit: bool,
) -> Result<EvalResult> {
    if rank == 2 && allow_limit && near_diagonal(x) {
        return diagonal_limit(members, p, x);
    }
    Ok(continue_solution(members, p, x)?.value)
}

/// Rank-2 K is analytic and even in h along x = (m - h, m + h), so it is a
/// power series in h^2. Values at five nodes h_k are interpolated in h^2 and
/// evaluated at the requested half-gap.
fn diagonal_limit(members: &[(f64, Solution)], p: &SeriesParams, x: &[f64]) -> Result<EvalResult> {
    let m = 0.5 * (x[0] + x[1]);
    let target = (0.5 * (x[1] - x[0])).powi(2);
    let fractions = [0.1, 0.15, 0.2, 0.25, 0.3];
    let mut us = Vec::new();
    let mut vs = Vec::new();
    let mut work = 0;
    let mut node_err = 0.0f64;
    for f in fractions {
        let h = f * m;
        let r = continue_solution(members, p, &[m - h, m + h])?.value;
        us.push(h * h);
        vs.push(r.value);
        node_err = node_err.max(r.err);
        work += r.work;
    }
    let full = neville(&us, &vs, target);
    let lower = neville(&us[..4], &vs[..4], target);
    // Lagrange weights bound the propagation of node errors.
    let lebesgue: f64 = (0..us.len())
        .map(|i| {
            (0..us.len())
                .filter(|&j| j != i)
                .map(|j| ((target - us[j]) / (us[i] - us[j])).abs())
                .product::<f64>()
        })
        .sum();
    Ok(EvalResult {
        value: full,
        err: (full - lower).abs() + lebesgue * node_err,
        work,
    })
}

fn neville(xs: &[f64], ys: &[f64], at: f64) -> f64 {
    let mut p = ys.to_vec();
    let n = xs.len();
    for k in 1..n {
        for i in 0..n - k {
            p[i] = ((at - xs[i + k]) * p[i] + (xs[i] - at) * p[i + 1]) / (xs[i] - xs[i + k]);
        }
    }
    p[0]
}
