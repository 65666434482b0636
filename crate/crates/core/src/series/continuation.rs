//! Holonomic continuation in x-space.
//!
//! For a solution f of the Muirhead system the vector F = (d_S f) over all
//! subsets S of {1..r} satisfies a linear Pfaffian system: d_j of a
//! squarefree derivative is either another squarefree derivative or, when
//! j is already in S, is reduced with the j-th equation
//!
//! ```text
//! x_j f_jj = -(nu+1) f_j - sigma f - d/2 sum_{k != j} (x_j f_j - x_k f_k)/(x_j - x_k).
//! ```
//!
//! Starting values come from the series at a well separated anchor point and
//! the system is integrated with RK4 along the straight segment to the target,
//! which stays inside one ordered chamber.

use super::terms::Multi;
use super::{elem_sym, EvalResult, SeriesParams, Solution};
use crate::error::{Error, Result};

/// A value obtained by continuation, with the anchor used.
#[derive(Clone, Debug)]
pub struct Continued {
    pub value: EvalResult,
    pub anchor: Vec<f64>,
    pub steps: usize,
}

const DIM: usize = 8;

struct System {
    r: usize,
    nu: f64,
    d: f64,
    sigma: f64,
}

impl System {
    /// Coefficients of d_j^2 d_s f in the squarefree basis.
    fn second(&self, j: usize, s: usize, x: &[f64]) -> [f64; DIM] {
        let mut out = [0.0; DIM];
        let jb = 1 << j;
        out[s | jb] -= self.nu + 1.0;
        out[s] -= self.sigma;
        let h = self.d / 2.0;
        for k in 0..self.r {
            if k == j {
                continue;
            }
            let kb = 1 << k;
            let diff = x[j] - x[k];
            let a1 = x[j] / diff;
            let a2 = x[k] / diff;
            let da = x[j] / (diff * diff);
            out[s | jb] -= h * a1;
            if s & kb != 0 {
                out[(s & !kb) | jb] -= h * da;
                let sub = self.second(k, s & !kb, x);
                for (o, v) in out.iter_mut().zip(sub.iter()) {
                    *o += h * a2 * v;
                }
                out[s] += h * da;
            } else {
                out[s | kb] += h * a2;
            }
        }
        for o in out.iter_mut() {
            *o /= x[j];
        }
        out
    }

    /// Generator A(x) with dF = sum_j A_j F dx_j, contracted with dir.
    fn generator(&self, x: &[f64], dir: &[f64]) -> [[f64; DIM]; DIM] {
        let n = 1 << self.r;
        let mut a = [[0.0; DIM]; DIM];
        for j in 0..self.r {
            if dir[j] == 0.0 {
                continue;
            }
            let jb = 1 << j;
            for s in 0..n {
                if s & jb == 0 {
                    a[s][s | jb] += dir[j];
                } else {
                    let row = self.second(j, s & !jb, x);
                    for c in 0..n {
                        a[s][c] += dir[j] * row[c];
                    }
                }
            }
        }
        a
    }

    /// Propagator of the linear system along x0 -> x1 with `steps` RK4 steps.
    fn propagate(&self, x0: &[f64], x1: &[f64], steps: usize) -> [[f64; DIM]; DIM] {
        let n = 1 << self.r;
        let dir: Vec<f64> = x0.iter().zip(x1).map(|(a, b)| b - a).collect();
        let at = |s: f64| -> Vec<f64> { x0.iter().zip(&dir).map(|(a, d)| a + s * d).collect() };
        let mut phi = [[0.0; DIM]; DIM];
        for i in 0..n {
            phi[i][i] = 1.0;
        }
        let h = 1.0 / steps as f64;
        let mul = |a: &[[f64; DIM]; DIM], m: &[[f64; DIM]; DIM]| {
            let mut o = [[0.0; DIM]; DIM];
            for i in 0..n {
                for k in 0..n {
                    let v = a[i][k];
                    if v != 0.0 {
                        for j in 0..n {
                            o[i][j] += v * m[k][j];
                        }
                    }
                }
            }
            o
        };
        let axpy = |m: &[[f64; DIM]; DIM], k: &[[f64; DIM]; DIM], c: f64| {
            let mut o = *m;
            for i in 0..n {
                for j in 0..n {
                    o[i][j] += c * k[i][j];
                }
            }
            o
        };
        for step in 0..steps {
            let s = step as f64 * h;
            let a0 = self.generator(&at(s), &dir);
            let am = self.generator(&at(s + 0.5 * h), &dir);
            let a1 = self.generator(&at(s + h), &dir);
            let k1 = mul(&a0, &phi);
            let k2 = mul(&am, &axpy(&phi, &k1, 0.5 * h));
            let k3 = mul(&am, &axpy(&phi, &k2, 0.5 * h));
            let k4 = mul(&a1, &axpy(&phi, &k3, h));
            for i in 0..n {
                for j in 0..n {
                    phi[i][j] += h / 6.0 * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
                }
            }
        }
        phi
    }
}

/// All set partitions of the elements of `items`.
fn partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let first = items[0];
    let mut out = Vec::new();
    for mut p in partitions(&items[1..]) {
        for b in 0..p.len() {
            let mut q = p.clone();
            q[b].push(first);
            out.push(q);
        }
        p.push(vec![first]);
        out.push(p);
    }
    out
}

/// Chain-rule expansion of d_S in terms of t-derivatives: (multi-index, coefficient).
fn chain(x: &[f64], s: usize) -> Vec<(Multi, f64)> {
    let r = x.len();
    let items: Vec<usize> = (0..r).filter(|i| s & (1 << i) != 0).collect();
    let mut out: Vec<(Multi, f64)> = Vec::new();
    for part in partitions(&items) {
        let nb = part.len();
        let combos = r.pow(nb as u32);
        for code in 0..combos {
            let mut c = code;
            let mut gamma: Multi = [0; 3];
            let mut coef = 1.0;
            for block in &part {
                let p = c % r + 1;
                c /= r;
                gamma[p - 1] += 1;
                // d_B t_p = e_{p - |B|} of the variables outside B.
                let rest: Vec<f64> = (0..r)
                    .filter(|i| !block.contains(i))
                    .map(|i| x[i])
                    .collect();
                let deg = p as i32 - block.len() as i32;
                coef *= if deg < 0 {
                    0.0
                } else {
                    elem_sym(&rest).get(deg)
                };
            }
            if coef != 0.0 {
                match out.iter_mut().find(|(g, _)| *g == gamma) {
                    Some(e) => e.1 += coef,
                    None => out.push((gamma, coef)),
                }
            }
        }
    }
    out
}

fn anchor_for(x: &[f64], spread: f64) -> Vec<f64> {
    let r = x.len();
    match r {
        2 => vec![x[0].min(x[1] / spread), x[1]],
        _ => vec![x[0].min(x[1] / spread), x[1], x[2].max(x[1] * spread)],
    }
}

/// Evaluates sum_i c_i f_i at the eigenvalue point x by continuation from a
/// series anchor. All members must share rank and flavor.
pub fn continue_solution(
    members: &[(f64, Solution)],
    p: &SeriesParams,
    x: &[f64],
) -> Result<Continued> {
    let r = x.len();
    if members.is_empty()
        || members
            .iter()
            .any(|(_, s)| s.rank != r || s.flavor != members[0].1.flavor)
    {
        return Err(Error::Usage("members must share rank and flavor".into()));
    }
    let mut xs = x.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    if xs[0] <= 0.0 {
        return Err(Error::Domain(
            "continuation needs positive eigenvalues".into(),
        ));
    }
    let scale = xs[r - 1];
    for w in xs.windows(2) {
        if w[1] - w[0] <= 1e-9 * scale {
            return Err(Error::IllConditioned(format!(
                "coincident eigenvalues {:?}",
                xs
            )));
        }
    }
    let mut last_err = None;
    for spread in [5.0, 8.0, 12.0] {
        match continue_from(members, p, &anchor_for(&xs, spread), &xs) {
            Err(e @ Error::NoConvergence { .. }) => last_err = Some(e),
            other => return other,
        }
    }
    Err(last_err.unwrap_or(Error::NoConvergence {
        partial: f64::NAN,
        last_layer: f64::NAN,
        work: 0,
    }))
}

/// Propagates the members' jet from `anchor` to `xs` (both sorted, same rank).
fn continue_from(
    members: &[(f64, Solution)],
    p: &SeriesParams,
    anchor: &[f64],
    xs: &[f64],
) -> Result<Continued> {
    let r = xs.len();
    let n = 1 << r;
    let anchor = anchor.to_vec();
    let t0 = elem_sym(&anchor);
    let chains: Vec<Vec<(Multi, f64)>> = (0..n).map(|s| chain(&anchor, s)).collect();
    let mut outs: Vec<Multi> = Vec::new();
    for c in &chains {
        for (g, _) in c {
            if !outs.contains(g) {
                outs.push(*g);
            }
        }
    }
    let mut f0 = [0.0; DIM];
    let mut e0 = [0.0; DIM];
    let mut work = 0u64;
    for (coef, sol) in members {
        let jet = sol.jet(p, &t0, &outs)?;
        work += jet[0].work;
        for s in 0..n {
            for (g, cc) in &chains[s] {
                let k = outs.iter().position(|o| o == g).unwrap();
                let v = coef * cc * jet[k].value;
                f0[s] += v;
                e0[s] += (coef * cc).abs() * jet[k].err + 4.0 * f64::EPSILON * v.abs();
            }
        }
    }
    let sys = System {
        r,
        nu: p.nu,
        d: p.d,
        sigma: members[0].1.flavor.sigma(),
    };
    let apply = |phi: &[[f64; DIM]; DIM]| -> f64 { (0..n).map(|s| phi[0][s] * f0[s]).sum() };
    let mut steps = 32usize;
    let mut prev = apply(&sys.propagate(&anchor, xs, steps));
    loop {
        steps *= 2;
        let phi = sys.propagate(&anchor, xs, steps);
        let cur = apply(&phi);
        let diff = (cur - prev).abs();
        if diff <= 1e-12 * cur.abs() || steps >= 1 << 15 {
            let prop_err: f64 = (0..n).map(|s| phi[0][s].abs() * e0[s]).sum();
            let round: f64 =
                (0..n).map(|s| (phi[0][s] * f0[s]).abs()).sum::<f64>() * 4.0 * f64::EPSILON;
            let value = EvalResult {
                value: cur,
                err: diff / 15.0 + prop_err + round,
                work: work + steps as u64,
            };
            if diff > 1e-6 * cur.abs() {
                return Err(Error::NoConvergence {
                    partial: cur,
                    last_layer: diff,
                    work: value.work,
                });
            }
            return Ok(Continued {
                value,
                anchor,
                steps,
            });
        }
        prev = cur;
    }
}
