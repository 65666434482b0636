//! J- and K-Bessel series in the elementary symmetric coordinates
//! t_p = e_p(x_1, ..., x_r).

mod coeffs;
mod continuation;
mod kseries;
mod rank2;
mod rank3;
mod residual;
mod roots;
pub mod special;
mod terms;

pub use coeffs::{coeffs2, coeffs3, CoefficientTable};
pub use continuation::{continue_solution, Continued};
pub use kseries::{k2_series, k3_series, k_members, k_series_with, k_series_x, KMethod};
pub use residual::{
    muirhead_residual, muirhead_residual_with, z_operator_coefficients, z_residual, z_residual_all,
};
pub use roots::roots_from_symmetric;
pub use special::{gamma, ln_gamma_signed, pochhammer, SignedLog};
pub use terms::Multi;

use crate::error::{Error, Result};
use rank2::{Rank2Kind, Rank2Series};
use rank3::{Rank3Display, Rank3Recursion};
use serde::{Deserialize, Serialize};

/// Order, Peirce constant and truncation controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesParams {
    pub nu: f64,
    pub d: f64,
    pub tol: f64,
    pub max_degree: u32,
    pub pole_guard: f64,
}

impl SeriesParams {
    pub fn new(nu: f64, d: f64) -> Self {
        SeriesParams {
            nu,
            d,
            tol: 1e-13,
            max_degree: 200,
            pole_guard: 1e-6,
        }
    }

    pub fn with_nu(&self, nu: f64) -> Self {
        SeriesParams { nu, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.nu.is_finite() {
            return Err(Error::Usage(format!("nu must be finite, got {}", self.nu)));
        }
        if !(self.d.is_finite() && self.d > 0.0) {
            return Err(Error::Usage(format!("d must be positive, got {}", self.d)));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(Error::Usage(format!(
                "tol must lie in (0, 1), got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// A point (t_1, ..., t_r); t_0 = 1 and t_p = 0 outside 0..=r are implied.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricPoint {
    pub t: Vec<f64>,
}

impl SymmetricPoint {
    pub fn rank(&self) -> usize {
        self.t.len()
    }

    /// t_p with the conventions t_0 = 1 and t_p = 0 for p < 0 or p > r.
    pub fn get(&self, p: i32) -> f64 {
        if p == 0 {
            1.0
        } else if p < 0 || p as usize > self.t.len() {
            0.0
        } else {
            self.t[p as usize - 1]
        }
    }

    pub(crate) fn padded(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        out[..self.t.len()].copy_from_slice(&self.t);
        out
    }
}

/// Elementary symmetric functions of 1 to 3 reals.
pub fn elem_sym(x: &[f64]) -> SymmetricPoint {
    let mut e = vec![1.0];
    for &xi in x {
        let mut next = vec![0.0; e.len() + 1];
        for (p, &ep) in e.iter().enumerate() {
            next[p] += ep;
            next[p + 1] += ep * xi;
        }
        e = next;
    }
    SymmetricPoint { t: e[1..].to_vec() }
}

/// Value, error estimate and work counter of an evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: f64,
    pub err: f64,
    pub work: u64,
}

/// Sign of the zero-order term of the system.
///
/// `Oscillatory` is the system with `+1` in B_1, solved by the J-series as
/// printed. `Modified` has `-1`; it is obtained by t_p -> (-1)^p t_p, which
/// removes the alternating signs, and it is the system the K integral solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Flavor {
    Oscillatory,
    Modified,
}

impl Flavor {
    pub fn sigma(self) -> f64 {
        match self {
            Flavor::Oscillatory => 1.0,
            Flavor::Modified => -1.0,
        }
    }
}

/// Whether singular solutions use the verified construction or the literal
/// printed double/triple sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Verified,
    Printed,
}

/// One member of a fundamental system.
///
/// `j` indexes the family (1..=2 for rank 2, 1..=4 for rank 3). With
/// `partner` set the solution is t_r^{-nu} J_{-nu}.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub rank: usize,
    pub j: u8,
    pub partner: bool,
    pub flavor: Flavor,
    pub variant: Variant,
}

impl Solution {
    pub fn new(rank: usize, j: u8, partner: bool) -> Result<Solution> {
        let max_j = match rank {
            2 => 2,
            3 => 4,
            _ => {
                return Err(Error::Usage(format!(
                    "J-series exist for rank 2 and 3, got {rank}"
                )))
            }
        };
        if j == 0 || j > max_j {
            return Err(Error::Usage(format!(
                "j must lie in 1..={max_j} for rank {rank}, got {j}"
            )));
        }
        Ok(Solution {
            rank,
            j,
            partner,
            flavor: Flavor::Oscillatory,
            variant: Variant::Verified,
        })
    }

    pub fn with_flavor(self, flavor: Flavor) -> Solution {
        Solution { flavor, ..self }
    }

    pub fn with_variant(self, variant: Variant) -> Solution {
        Solution { variant, ..self }
    }

    /// All 2^r members for a rank, in the order j = 1.., plain before partner.
    pub fn fundamental_system(rank: usize) -> Vec<Solution> {
        let max_j = if rank == 2 { 2 } else { 4 };
        let mut out = Vec::new();
        for partner in [false, true] {
            for j in 1..=max_j {
                out.push(Solution::new(rank, j, partner).unwrap());
            }
        }
        out
    }

    pub fn name(&self) -> String {
        format!(
            "j{}{}{}",
            self.rank,
            self.j,
            if self.partner { "-partner" } else { "" }
        )
    }

    fn builder(&self, p: &SeriesParams) -> Result<Box<dyn terms::Builder>> {
        p.validate()?;
        let (nu, shift) = if self.partner {
            (-p.nu, -p.nu)
        } else {
            (p.nu, 0.0)
        };
        let printed = self.variant == Variant::Printed;
        match self.rank {
            2 => {
                let kind = match (self.j, printed) {
                    (1, _) => Rank2Kind::Regular,
                    (_, false) => Rank2Kind::Singular,
                    (_, true) => Rank2Kind::SingularDisplay,
                };
                let s = Rank2Series {
                    kind,
                    nu,
                    d: p.d,
                    flavor: self.flavor,
                    t2_shift: shift,
                };
                s.check(p.pole_guard)?;
                Ok(Box::new(s))
            }
            _ => {
                if self.j == 1 || printed {
                    let s = Rank3Display {
                        j: self.j,
                        nu,
                        d: p.d,
                        flavor: self.flavor,
                        t3_shift: shift,
                    };
                    s.check(p.pole_guard)?;
                    Ok(Box::new(s))
                } else {
                    let s = Rank3Recursion {
                        j: self.j,
                        nu,
                        d: p.d,
                        flavor: self.flavor,
                        t3_shift: shift,
                    };
                    s.check(p.pole_guard)?;
                    Ok(Box::new(s))
                }
            }
        }
    }

    fn check_point(&self, t: &SymmetricPoint) -> Result<[f64; 3]> {
        if t.rank() != self.rank {
            return Err(Error::Usage(format!(
                "expected {} symmetric coordinates, got {}",
                self.rank,
                t.rank()
            )));
        }
        if t.t.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("non-finite coordinate".into()));
        }
        Ok(t.padded())
    }

    /// Value of the solution at t.
    pub fn eval(&self, p: &SeriesParams, t: &SymmetricPoint) -> Result<EvalResult> {
        Ok(self.jet(p, t, &[[0, 0, 0]])?[0])
    }

    /// Value and t-derivatives for each requested multi-index.
    pub fn jet(
        &self,
        p: &SeriesParams,
        t: &SymmetricPoint,
        outs: &[Multi],
    ) -> Result<Vec<EvalResult>> {
        let tt = self.check_point(t)?;
        let b = self.builder(p)?;
        terms::evaluate(b.as_ref(), p, &tt, outs)
    }

    /// Evaluates by the t3-recursion even where a closed triple sum exists.
    pub fn eval_by_recursion(&self, p: &SeriesParams, t: &SymmetricPoint) -> Result<EvalResult> {
        if self.rank != 3 {
            return self.eval(p, t);
        }
        let tt = self.check_point(t)?;
        let (nu, shift) = if self.partner {
            (-p.nu, -p.nu)
        } else {
            (p.nu, 0.0)
        };
        let s = Rank3Recursion {
            j: self.j,
            nu,
            d: p.d,
            flavor: self.flavor,
            t3_shift: shift,
        };
        s.check(p.pole_guard)?;
        Ok(terms::evaluate(&s, p, &tt, &[[0, 0, 0]])?[0])
    }
}

/// J^{[2,j]}_nu(t), j = 1, 2.
pub fn j2(j: u8, p: &SeriesParams, t: &SymmetricPoint) -> Result<EvalResult> {
    Solution::new(2, j, false)?.eval(p, t)
}

/// J^{[3,j]}_nu(t), j = 1..4.
pub fn j3(j: u8, p: &SeriesParams, t: &SymmetricPoint) -> Result<EvalResult> {
    Solution::new(3, j, false)?.eval(p, t)
}

#[cfg(test)]
mod tests;
