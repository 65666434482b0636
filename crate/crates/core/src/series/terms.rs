//! Generic monomial-sum engine with layered truncation.
//!
//! A truncated series is a list of terms `v * prod_p (t_p / tau_p)^{e_p}` where
//! `tau` is a positive reference point fixed when the terms are generated. Keeping
//! the reference inside the stored value keeps every stored number near the
//! size of the actual summand, so tiny coefficients never underflow.
//!
//! Each term carries up to three layer indices. A builder declares which of
//! them are truncation directions; the driver grows a direction until its
//! last three layers are negligible.

use super::{EvalResult, SeriesParams};
use crate::error::{Error, Result};

/// A multi-index of t-derivative orders.
pub type Multi = [u8; 3];

#[derive(Clone, Copy, Debug)]
pub(crate) struct Term {
    pub v: f64,
    pub e: [f64; 3],
    pub layer: [u32; 3],
}

pub(crate) struct TermSet {
    pub tau: [f64; 3],
    pub terms: Vec<Term>,
}

/// Produces the terms inside a truncation box.
pub(crate) trait Builder {
    /// Directions that take part in truncation.
    fn active(&self) -> [bool; 3];
    fn initial_bounds(&self) -> [u32; 3];
    fn build(&self, bounds: [u32; 3], tau: [f64; 3]) -> Result<TermSet>;
}

/// Largest number of terms a single box may hold.
const TERM_BUDGET: usize = 6_000_000;

pub(crate) fn reference_point(t: &[f64; 3]) -> [f64; 3] {
    let mut tau = [1.0; 3];
    for p in 0..3 {
        if t[p] != 0.0 && t[p].is_finite() {
            tau[p] = t[p].abs();
        }
    }
    tau
}

fn falling(e: f64, k: u8) -> f64 {
    let mut f = 1.0;
    for i in 0..k {
        f *= e - i as f64;
    }
    f
}

fn is_integer(e: f64) -> bool {
    e == e.round()
}

struct Jet {
    sums: Vec<f64>,
    abs: Vec<f64>,
    /// tails[dim][g][k]: sum of the layer `bound - k` for output g.
    tails: [Vec<[f64; 3]>; 3],
}

fn factor(t: f64, tau: f64, e: f64, g: u8) -> Result<Option<f64>> {
    let ff = falling(e, g);
    if ff == 0.0 {
        return Ok(None);
    }
    let pow = e - g as f64;
    if t > 0.0 {
        // (t/tau)^e * t^{-g}
        let base = if t == tau {
            1.0
        } else {
            ((t / tau).ln() * e).exp()
        };
        return Ok(Some(ff * base * t.powi(-(g as i32))));
    }
    if t == 0.0 {
        if pow > 0.0 {
            return Ok(None);
        }
        if pow == 0.0 {
            // d^g/dt^g t^g at t = 0 with tau = 1.
            return Ok(Some(ff));
        }
        return Err(Error::Domain(format!(
            "negative power {pow} of a vanishing variable"
        )));
    }
    if !is_integer(e) {
        return Err(Error::Domain(format!(
            "non-integer power {e} of a negative variable"
        )));
    }
    let ratio = t / tau;
    Ok(Some(
        ff * ratio.powi(e as i32 - g as i32) * tau.powi(-(g as i32)),
    ))
}

impl TermSet {
    fn jet(
        &self,
        t: &[f64; 3],
        outs: &[Multi],
        bounds: [u32; 3],
        active: [bool; 3],
    ) -> Result<Jet> {
        let no = outs.len();
        let mut jet = Jet {
            sums: vec![0.0; no],
            abs: vec![0.0; no],
            tails: [vec![[0.0; 3]; no], vec![[0.0; 3]; no], vec![[0.0; 3]; no]],
        };
        for term in &self.terms {
            'out: for (g, m) in outs.iter().enumerate() {
                let mut val = term.v;
                // Zero factors first so that a vanishing variable short-circuits.
                let mut fs = [1.0; 3];
                for p in (0..3).rev() {
                    if term.e[p] == 0.0 && m[p] == 0 {
                        continue;
                    }
                    match factor(t[p], self.tau[p], term.e[p], m[p]) {
                        Ok(Some(f)) => fs[p] = f,
                        Ok(None) => continue 'out,
                        Err(e) => {
                            // Another variable may still annihilate the term.
                            let zero_elsewhere = (0..3)
                                .any(|q| q != p && t[q] == 0.0 && (term.e[q] - m[q] as f64) > 0.0);
                            if zero_elsewhere {
                                continue 'out;
                            }
                            return Err(e);
                        }
                    }
                }
                val *= fs[0] * fs[1] * fs[2];
                jet.sums[g] += val;
                jet.abs[g] += val.abs();
                for dim in 0..3 {
                    if active[dim] {
                        let l = term.layer[dim];
                        if l + 2 >= bounds[dim] && l <= bounds[dim] {
                            jet.tails[dim][g][(bounds[dim] - l) as usize] += val;
                        }
                    }
                }
            }
        }
        Ok(jet)
    }
}

/// Sums the series and requested derivatives, growing the box until the
/// last three layers in every active direction fall below `tol * |sum|`.
pub(crate) fn evaluate<B: Builder + ?Sized>(
    b: &B,
    p: &SeriesParams,
    t: &[f64; 3],
    outs: &[Multi],
) -> Result<Vec<EvalResult>> {
    let active = b.active();
    let mut bounds = b.initial_bounds();
    let tau = reference_point(t);
    let cap = p.max_degree;
    loop {
        let set = b.build(bounds, tau)?;
        let work = set.terms.len() as u64;
        let jet = set.jet(t, outs, bounds, active)?;
        let mut grow = [false; 3];
        let mut worst = 0.0f64;
        for dim in 0..3 {
            if !active[dim] {
                continue;
            }
            for g in 0..outs.len() {
                let thresh = p.tol * jet.sums[g].abs();
                for k in 0..3 {
                    let l = jet.tails[dim][g][k].abs();
                    if l > thresh || !l.is_finite() {
                        grow[dim] = true;
                        worst = worst.max(l);
                    }
                }
            }
        }
        if !grow.iter().any(|&g| g) {
            return Ok((0..outs.len())
                .map(|g| {
                    let tail: f64 = (0..3)
                        .filter(|&d| active[d])
                        .map(|d| jet.tails[d][g][0].abs())
                        .sum();
                    EvalResult {
                        value: jet.sums[g],
                        err: tail + 4.0 * f64::EPSILON * jet.abs[g],
                        work,
                    }
                })
                .collect());
        }
        let mut stuck = false;
        for dim in 0..3 {
            if grow[dim] {
                if bounds[dim] >= cap {
                    stuck = true;
                } else {
                    bounds[dim] = (bounds[dim] * 3 / 2 + 4).min(cap);
                }
            }
        }
        if stuck || set.terms.len() > TERM_BUDGET {
            return Err(Error::NoConvergence {
                partial: jet.sums[0],
                last_layer: worst,
                work,
            });
        }
    }
}
