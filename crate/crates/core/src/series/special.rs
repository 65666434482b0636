//! Gamma and Pochhammer symbols with explicit sign tracking.

use crate::error::{Error, Result};
use serde::Serialize;

/// A real number stored as sign and log-magnitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SignedLog {
    pub sign: i8,
    pub ln_abs: f64,
}

impl SignedLog {
    pub const ONE: SignedLog = SignedLog {
        sign: 1,
        ln_abs: 0.0,
    };
    pub const ZERO: SignedLog = SignedLog {
        sign: 0,
        ln_abs: f64::NEG_INFINITY,
    };

    pub fn to_f64(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            self.sign as f64 * self.ln_abs.exp()
        }
    }

    pub fn mul(self, other: SignedLog) -> SignedLog {
        if self.sign == 0 || other.sign == 0 {
            return SignedLog::ZERO;
        }
        SignedLog {
            sign: self.sign * other.sign,
            ln_abs: self.ln_abs + other.ln_abs,
        }
    }

    pub fn div(self, other: SignedLog) -> SignedLog {
        debug_assert!(other.sign != 0);
        if self.sign == 0 {
            return SignedLog::ZERO;
        }
        SignedLog {
            sign: self.sign * other.sign,
            ln_abs: self.ln_abs - other.ln_abs,
        }
    }

    pub fn from_f64(x: f64) -> SignedLog {
        if x == 0.0 {
            SignedLog::ZERO
        } else {
            SignedLog {
                sign: if x > 0.0 { 1 } else { -1 },
                ln_abs: x.abs().ln(),
            }
        }
    }
}

/// ln|Γ(x)| and the sign of Γ(x).
pub fn ln_gamma_signed(x: f64) -> (f64, i8) {
    let (v, s) = libm::lgamma_r(x);
    (v, if s < 0 { -1 } else { 1 })
}

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Pochhammer symbol (a)_k = a(a+1)...(a+k-1) in sign/log form.
pub fn pochhammer(a: f64, k: u32) -> SignedLog {
    if k == 0 {
        return SignedLog::ONE;
    }
    let last = a + (k - 1) as f64;
    if is_nonpositive_integer(a) && last >= 0.0 {
        return SignedLog::ZERO;
    }
    if k <= 30 {
        let mut acc = SignedLog::ONE;
        for i in 0..k {
            acc = acc.mul(SignedLog::from_f64(a + i as f64));
        }
        return acc;
    }
    if last < 0.0 {
        // All factors negative: (a)_k = (-1)^k (1-a-k)_k with a positive base.
        let p = pochhammer(1.0 - a - k as f64, k);
        let sign = if k % 2 == 0 { p.sign } else { -p.sign };
        return SignedLog {
            sign,
            ln_abs: p.ln_abs,
        };
    }
    let (lt, st) = ln_gamma_signed(a + k as f64);
    let (lb, sb) = ln_gamma_signed(a);
    SignedLog {
        sign: st * sb,
        ln_abs: lt - lb,
    }
}

/// Cumulative table of (a)_k for k = 0..=len, built by direct products.
#[derive(Clone, Debug)]
pub(crate) struct PochTable {
    vals: Vec<SignedLog>,
}

impl PochTable {
    pub fn new(a: f64, len: usize) -> PochTable {
        let mut vals = Vec::with_capacity(len + 1);
        let mut acc = SignedLog::ONE;
        vals.push(acc);
        for i in 0..len {
            acc = acc.mul(SignedLog::from_f64(a + i as f64));
            vals.push(acc);
        }
        PochTable { vals }
    }

    pub fn get(&self, k: usize) -> SignedLog {
        self.vals[k]
    }
}

/// ln k! table.
pub(crate) fn ln_factorials(len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=len {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Rejects `x` within `guard` of a non-positive integer.
pub(crate) fn guard_pole(what: &str, x: f64, guard: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::NonGeneric {
            what: what.to_string(),
            arg: x,
        });
    }
    let nearest = x.round();
    if nearest <= 0.0 && (x - nearest).abs() <= guard {
        return Err(Error::NonGeneric {
            what: what.to_string(),
            arg: x,
        });
    }
    Ok(())
}

/// Rejects `x` within `guard` of any integer.
pub(crate) fn guard_integer(what: &str, x: f64, guard: f64) -> Result<()> {
    if !x.is_finite() || (x - x.round()).abs() <= guard {
        return Err(Error::NonGeneric {
            what: what.to_string(),
            arg: x,
        });
    }
    Ok(())
}

/// Γ(x) after a pole-guard check.
pub(crate) fn guarded_gamma(what: &str, x: f64, guard: f64) -> Result<f64> {
    guard_pole(what, x, guard)?;
    Ok(gamma(x))
}
