//! Two-variable series: the regular solution and the solution with leading
//! power t1^{-nu-d/2}.

use super::special::{guard_integer, guard_pole, ln_factorials, PochTable, SignedLog};
use super::terms::{Builder, Term, TermSet};
use super::Flavor;
use crate::error::Result;

/// Which two-variable series to generate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Rank2Kind {
    /// Entire series sum (-1)^{m1} t1^{m1} t2^{m2} / (m1! m2! (1+nu)_{m2} (1+nu+d/2)_{m1+2m2}).
    Regular,
    /// Solution with leading power t1^{-nu-d/2}, in the form that satisfies the system.
    Singular,
    /// The printed double series for the singular solution, kept for comparison.
    SingularDisplay,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Rank2Series {
    pub kind: Rank2Kind,
    pub nu: f64,
    pub d: f64,
    pub flavor: Flavor,
    /// Extra power of t2 multiplying the whole series.
    pub t2_shift: f64,
}

impl Rank2Series {
    pub fn check(&self, guard: f64) -> Result<()> {
        let (nu, d) = (self.nu, self.d);
        match self.kind {
            Rank2Kind::Regular => {
                guard_pole("1+nu", 1.0 + nu, guard)?;
                guard_pole("1+nu+d/2", 1.0 + nu + d / 2.0, guard)
            }
            Rank2Kind::Singular => {
                guard_pole("1+nu", 1.0 + nu, guard)?;
                guard_integer("nu+d/2", nu + d / 2.0, guard)
            }
            Rank2Kind::SingularDisplay => {
                guard_pole("1+nu", 1.0 + nu, guard)?;
                guard_pole("1-nu-d/2", 1.0 - nu - d / 2.0, guard)
            }
        }
    }

    fn sign(&self, m1: usize) -> i8 {
        match self.flavor {
            Flavor::Oscillatory if m1 % 2 == 1 => -1,
            _ => 1,
        }
    }

    /// Leading t1 exponent.
    pub fn alpha(&self) -> f64 {
        match self.kind {
            Rank2Kind::Regular => 0.0,
            _ => -self.nu - self.d / 2.0,
        }
    }

    /// Terms `(coefficient, i, k, w, h)` with monomial t1^{alpha+i} t2^{shift+k}.
    pub fn coefficients(&self, w_max: u32, h_max: u32) -> Vec<(SignedLog, i32, i32, u32, u32)> {
        let (nu, d) = (self.nu, self.d);
        let w_max = w_max as usize;
        let mut out = Vec::new();
        match self.kind {
            Rank2Kind::Regular => {
                let lf = ln_factorials(w_max);
                let p_nu = PochTable::new(1.0 + nu, w_max / 2 + 1);
                let p_w = PochTable::new(1.0 + nu + d / 2.0, w_max + 1);
                for w in 0..=w_max {
                    for m2 in 0..=w / 2 {
                        let m1 = w - 2 * m2;
                        let den = p_nu.get(m2).mul(p_w.get(w));
                        let c = SignedLog {
                            sign: self.sign(m1),
                            ln_abs: -lf[m1] - lf[m2],
                        }
                        .div(den);
                        out.push((c, m1 as i32, m2 as i32, w as u32, m2 as u32));
                    }
                }
            }
            Rank2Kind::Singular => {
                let h_max = h_max as usize;
                let alpha = self.alpha();
                let lf = ln_factorials(w_max.max(h_max));
                let p_num = PochTable::new(nu + d / 2.0, 2 * h_max + 1);
                let p_nu = PochTable::new(1.0 + nu, h_max + 1);
                for q in 0..=h_max {
                    let p_m = PochTable::new(1.0 + alpha - 2.0 * q as f64, w_max + 1);
                    let head = p_num.get(2 * q).div(p_nu.get(q));
                    for m in 0..=w_max {
                        let den = p_m.get(m);
                        let c = head
                            .mul(SignedLog {
                                sign: self.sign(m),
                                ln_abs: -lf[m] - lf[q],
                            })
                            .div(den);
                        out.push((c, m as i32 - 2 * q as i32, q as i32, m as u32, q as u32));
                    }
                }
            }
            Rank2Kind::SingularDisplay => {
                let lf = ln_factorials(w_max);
                let p_a = PochTable::new(1.0 - nu - d / 2.0, w_max + 1);
                let p_nu = PochTable::new(1.0 + nu, w_max / 2 + 1);
                for w in 0..=w_max {
                    for m2 in 0..=w / 2 {
                        let m1 = w - 2 * m2;
                        let den = p_a.get(m1).mul(p_nu.get(m2));
                        let c = SignedLog {
                            sign: self.sign(m1),
                            ln_abs: -lf[m2] - lf[w],
                        }
                        .div(den);
                        out.push((c, m1 as i32, m2 as i32, w as u32, m2 as u32));
                    }
                }
            }
        }
        out
    }
}

impl Builder for Rank2Series {
    fn active(&self) -> [bool; 3] {
        [true, self.kind == Rank2Kind::Singular, false]
    }

    fn initial_bounds(&self) -> [u32; 3] {
        [
            24,
            if self.kind == Rank2Kind::Singular {
                24
            } else {
                0
            },
            0,
        ]
    }

    fn build(&self, bounds: [u32; 3], tau: [f64; 3]) -> Result<TermSet> {
        let alpha = self.alpha();
        let (l1, l2) = (tau[0].ln(), tau[1].ln());
        let terms = self
            .coefficients(bounds[0], bounds[1])
            .into_iter()
            .filter(|(c, ..)| c.sign != 0)
            .map(|(c, i, k, w, h)| {
                let e1 = alpha + i as f64;
                let e2 = self.t2_shift + k as f64;
                let v = c.sign as f64 * (c.ln_abs + e1 * l1 + e2 * l2).exp();
                Term {
                    v,
                    e: [e1, e2, 0.0],
                    layer: [w, h, 0],
                }
            })
            .collect();
        Ok(TermSet { tau, terms })
    }
}
