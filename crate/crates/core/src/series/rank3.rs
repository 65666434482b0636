//! Three-variable series.
//!
//! The regular solution has a closed triple-sum form. Every solution can also
//! be generated as `sum_q t3^q psi_q(t1, t2)`: the third equation of the system
//! gives
//!
//! ```text
//! (q+1)(q+1+nu) psi_{q+1} = 2 d1 d2 psi_q + t1 d2^2 psi_q,
//! ```
//!
//! and `psi_0` is the two-variable solution of order `nu + d/2` (or its
//! `t2^{-nu-d/2}` partner). On monomials t1^{a1+i} t2^{a2+k} t3^q the weight
//! `i + 2k + 3q` is preserved and `k + 2q` never decreases, so truncating
//! `psi_0` by weight and by `k` gives exact coefficients inside the box.

use super::rank2::{Rank2Kind, Rank2Series};
use super::special::{guard_pole, ln_factorials, PochTable, SignedLog};
use super::terms::{Builder, Term, TermSet};
use super::Flavor;
use crate::error::Result;

/// Printed triple sums, indexed by j = 1..4.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Rank3Display {
    pub j: u8,
    pub nu: f64,
    pub d: f64,
    pub flavor: Flavor,
    pub t3_shift: f64,
}

impl Rank3Display {
    pub fn check(&self, guard: f64) -> Result<()> {
        let (nu, d) = (self.nu, self.d);
        guard_pole("1+nu", 1.0 + nu, guard)?;
        match self.j {
            1 => {
                guard_pole("1+nu+d/2", 1.0 + nu + d / 2.0, guard)?;
                guard_pole("1+nu+d", 1.0 + nu + d, guard)?;
                guard_pole("1+2nu+d", 1.0 + 2.0 * nu + d, guard)
            }
            2 => {
                guard_pole("1-nu-d", 1.0 - nu - d, guard)?;
                guard_pole("1+nu+d/2", 1.0 + nu + d / 2.0, guard)
            }
            3 => {
                guard_pole("1-nu-d/2", 1.0 - nu - d / 2.0, guard)?;
                guard_pole("1-nu", 1.0 - nu, guard)
            }
            _ => guard_pole("1-nu-d/2", 1.0 - nu - d / 2.0, guard),
        }
    }

    fn base(&self) -> [f64; 2] {
        let (nu, d) = (self.nu, self.d);
        match self.j {
            1 => [0.0, 0.0],
            2 => [-nu - d, 0.0],
            3 => [0.0, -nu - d / 2.0],
            _ => [nu, -nu - d / 2.0],
        }
    }
}

impl Builder for Rank3Display {
    fn active(&self) -> [bool; 3] {
        [true, false, false]
    }

    fn initial_bounds(&self) -> [u32; 3] {
        [24, 0, 0]
    }

    fn build(&self, bounds: [u32; 3], tau: [f64; 3]) -> Result<TermSet> {
        let (nu, d) = (self.nu, self.d);
        let wm = bounds[0] as usize;
        let lf = ln_factorials(2 * wm + 2);
        let lfs = |k: usize| SignedLog {
            sign: 1,
            ln_abs: lf[k],
        };
        let one_nu = PochTable::new(1.0 + nu, 2 * wm + 2);
        let half = PochTable::new(1.0 + nu + d / 2.0, wm + 1);
        let full = PochTable::new(1.0 + nu + d, wm + 1);
        let two = PochTable::new(1.0 + 2.0 * nu + d, 2 * wm + 2);
        let a_nd = PochTable::new(1.0 - nu - d, wm + 1);
        let a_nh = PochTable::new(1.0 - nu - d / 2.0, wm + 1);
        let a_n = PochTable::new(1.0 - nu, wm + 1);
        let [b1, b2] = self.base();
        let ln_tau = [tau[0].ln(), tau[1].ln(), tau[2].ln()];
        let mut terms = Vec::new();
        for w in 0..=wm {
            for m3 in 0..=w / 3 {
                for m2 in 0..=(w - 3 * m3) / 2 {
                    let m1 = w - 3 * m3 - 2 * m2;
                    let c = match self.j {
                        1 => two.get(w + m3).div(
                            lfs(m1)
                                .mul(lfs(m2))
                                .mul(lfs(m3))
                                .mul(one_nu.get(m3))
                                .mul(half.get(m2 + 2 * m3))
                                .mul(full.get(w))
                                .mul(two.get(w)),
                        ),
                        2 => one_nu.get(w + m3).div(
                            a_nd.get(m1)
                                .mul(lfs(m2))
                                .mul(lfs(m3))
                                .mul(one_nu.get(m3))
                                .mul(half.get(m2 + 2 * m3))
                                .mul(lfs(w))
                                .mul(one_nu.get(w)),
                        ),
                        3 => lfs(w + m3).div(
                            lfs(m1)
                                .mul(a_nh.get(m2))
                                .mul(lfs(m3))
                                .mul(one_nu.get(m3))
                                .mul(lfs(m2 + 2 * m3))
                                .mul(a_n.get(w))
                                .mul(lfs(w)),
                        ),
                        _ => one_nu.get(w + m3).div(
                            one_nu
                                .get(m1)
                                .mul(a_nh.get(m2))
                                .mul(lfs(m3))
                                .mul(one_nu.get(m3))
                                .mul(lfs(m2 + 2 * m3))
                                .mul(lfs(w))
                                .mul(one_nu.get(w)),
                        ),
                    };
                    if c.sign == 0 {
                        continue;
                    }
                    let flip = self.flavor == Flavor::Oscillatory && (m1 + m3) % 2 == 1;
                    let e = [b1 + m1 as f64, b2 + m2 as f64, self.t3_shift + m3 as f64];
                    let s = if flip { -c.sign } else { c.sign } as f64;
                    let v = s
                        * (c.ln_abs + e[0] * ln_tau[0] + e[1] * ln_tau[1] + e[2] * ln_tau[2]).exp();
                    terms.push(Term {
                        v,
                        e,
                        layer: [w as u32, 0, 0],
                    });
                }
            }
        }
        Ok(TermSet { tau, terms })
    }
}

/// Solutions generated from a two-variable boundary series by the t3-recursion.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Rank3Recursion {
    pub j: u8,
    pub nu: f64,
    pub d: f64,
    pub flavor: Flavor,
    pub t3_shift: f64,
}

impl Rank3Recursion {
    pub fn boundary(&self) -> Rank2Series {
        let mu = self.nu + self.d / 2.0;
        let (kind, order, shift) = match self.j {
            1 => (Rank2Kind::Regular, mu, 0.0),
            2 => (Rank2Kind::Singular, mu, 0.0),
            3 => (Rank2Kind::Regular, -mu, -mu),
            _ => (Rank2Kind::Singular, -mu, -mu),
        };
        Rank2Series {
            kind,
            nu: order,
            d: self.d,
            flavor: self.flavor,
            t2_shift: shift,
        }
    }

    pub fn check(&self, guard: f64) -> Result<()> {
        guard_pole("1+nu", 1.0 + self.nu, guard)?;
        self.boundary().check(guard)
    }
}

/// Dense coefficient grid over offsets (i, k) of one t3-level.
struct Grid {
    i0: i32,
    k0: i32,
    ni: usize,
    nk: usize,
    v: Vec<f64>,
}

impl Grid {
    fn new(i0: i32, i1: i32, k0: i32, k1: i32) -> Grid {
        let ni = (i1 - i0 + 1).max(0) as usize;
        let nk = (k1 - k0 + 1).max(0) as usize;
        Grid {
            i0,
            k0,
            ni,
            nk,
            v: vec![0.0; ni * nk],
        }
    }

    fn idx(&self, i: i32, k: i32) -> usize {
        (i - self.i0) as usize * self.nk + (k - self.k0) as usize
    }
}

impl Builder for Rank3Recursion {
    fn active(&self) -> [bool; 3] {
        [true, self.boundary().kind == Rank2Kind::Singular, true]
    }

    fn initial_bounds(&self) -> [u32; 3] {
        let b = self.boundary();
        [24, if b.kind == Rank2Kind::Singular { 24 } else { 0 }, 12]
    }

    fn build(&self, bounds: [u32; 3], tau: [f64; 3]) -> Result<TermSet> {
        let b = self.boundary();
        let singular = b.kind == Rank2Kind::Singular;
        let (wmax, hmax, qmax) = (bounds[0] as i32, bounds[1] as i32, bounds[2] as i32);
        let a1 = b.alpha();
        let a2 = b.t2_shift;
        let (l1, l2, l3) = (tau[0].ln(), tau[1].ln(), tau[2].ln());
        let coeffs = b.coefficients(bounds[0], bounds[1]);
        let (mut imin, mut imax, mut kmax) = (0i32, 0i32, 0i32);
        for (_, i, k, ..) in &coeffs {
            imin = imin.min(*i);
            imax = imax.max(*i);
            kmax = kmax.max(*k);
        }
        let mut level = Grid::new(imin, imax, 0, kmax);
        for (c, i, k, ..) in &coeffs {
            if c.sign == 0 {
                continue;
            }
            let e1 = a1 + *i as f64;
            let e2 = a2 + *k as f64;
            let at = level.idx(*i, *k);
            level.v[at] = c.sign as f64 * (c.ln_abs + e1 * l1 + e2 * l2 + self.t3_shift * l3).exp();
        }
        let r12 = tau[2] / (tau[0] * tau[1]);
        let r22 = tau[0] * tau[2] / (tau[1] * tau[1]);
        let mut terms = Vec::new();
        for q in 0..=qmax {
            for ii in 0..level.ni {
                for kk in 0..level.nk {
                    let v = level.v[ii * level.nk + kk];
                    if v == 0.0 {
                        continue;
                    }
                    let i = level.i0 + ii as i32;
                    let k = level.k0 + kk as i32;
                    let w = i + 2 * k + 3 * q;
                    let h = k + 2 * q;
                    terms.push(Term {
                        v,
                        e: [a1 + i as f64, a2 + k as f64, self.t3_shift + q as f64],
                        layer: [w as u32, h as u32, q as u32],
                    });
                }
            }
            if q == qmax {
                break;
            }
            let denom = (q as f64 + 1.0) * (q as f64 + 1.0 + self.nu);
            let mut next = Grid::new(
                level.i0 - 1,
                level.i0 + level.ni as i32,
                level.k0 - 2,
                level.k0 + level.nk as i32 - 2,
            );
            for ii in 0..level.ni {
                for kk in 0..level.nk {
                    let v = level.v[ii * level.nk + kk];
                    if v == 0.0 {
                        continue;
                    }
                    let i = level.i0 + ii as i32;
                    let k = level.k0 + kk as i32;
                    let e1 = a1 + i as f64;
                    let e2 = a2 + k as f64;
                    let h = k + 2 * q;
                    let w = i + 2 * k + 3 * q;
                    debug_assert!(w <= wmax);
                    // d1 d2 moves (i, k) -> (i-1, k-1) and raises h by one.
                    if e1 != 0.0 && e2 != 0.0 && (!singular || h + 1 <= hmax) {
                        let at = next.idx(i - 1, k - 1);
                        next.v[at] += 2.0 * e1 * e2 * v * r12 / denom;
                    }
                    // t1 d2^2 moves (i, k) -> (i+1, k-2) and keeps h.
                    let f = e2 * (e2 - 1.0);
                    if f != 0.0 {
                        let at = next.idx(i + 1, k - 2);
                        next.v[at] += f * v * r22 / denom;
                    }
                }
            }
            level = next;
        }
        Ok(TermSet { tau, terms })
    }
}
