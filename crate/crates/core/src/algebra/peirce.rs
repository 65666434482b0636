//! Peirce decomposition and the representation rho of A_0 on A_{1/2}.
//!
//! The fixed idempotent is the last diagonal unit c = E_rr. With it, A_0 is the
//! upper-left (r-1)-block, A_1 = R c and A_{1/2} is spanned by the
//! off-diagonal generators of the pairs (i, r-1).

use super::{AlgebraDescriptor, Element};
use crate::error::{Error, Result};
use crate::linalg::det_lu;

/// Components of x with respect to an idempotent c.
#[derive(Clone, Debug)]
pub struct PeirceSplit {
    pub a0: Element,
    pub a_half: Element,
    pub a1: Element,
    pub idempotent: Element,
}

pub(super) fn split(x: &Element, c: &Element) -> Result<PeirceSplit> {
    let cc = c.jordan_mul(c)?;
    let resid = cc.sub(c)?.norm();
    if resid > 1e-10 {
        return Err(Error::Domain(format!(
            "not an idempotent: |c∘c - c| = {resid:e}"
        )));
    }
    if (c.trace() - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!(
            "idempotent is not primitive: tr(c) = {}",
            c.trace()
        )));
    }
    let e = Element::unit(x.desc)?;
    let a1 = c.quadratic_rep(x)?;
    let a0 = e.sub(c)?.quadratic_rep(x)?;
    let a_half = x.sub(&a1)?.sub(&a0)?;
    Ok(PeirceSplit {
        a0,
        a_half,
        a1,
        idempotent: c.clone(),
    })
}

fn subalgebra(desc: AlgebraDescriptor) -> Result<AlgebraDescriptor> {
    if desc.rank < 2 {
        return Err(Error::Usage(
            "rank-1 algebras have no Peirce subalgebra".into(),
        ));
    }
    AlgebraDescriptor::new(desc.rank - 1, desc.d)
}

/// Coordinates of x read as an element of the subalgebra A_0 (no projection check).
pub fn restrict_a0(x: &Element) -> Result<Element> {
    let sub = subalgebra(x.desc)?;
    let mut coords = x.coords[..sub.rank].to_vec();
    for i in 0..sub.rank {
        for j in (i + 1)..sub.rank {
            let o = x.desc.pair_offset(i, j);
            coords.extend_from_slice(&x.coords[o..o + x.desc.width()]);
        }
    }
    Element::new(sub, coords)
}

/// Embeds an element of the (r-1)-rank algebra into A_0 of `desc`.
pub fn embed_a0(desc: AlgebraDescriptor, z: &Element) -> Result<Element> {
    let sub = subalgebra(desc)?;
    if z.desc.rank != sub.rank {
        return Err(Error::Usage(format!(
            "expected a rank-{} element",
            sub.rank
        )));
    }
    let mut out = Element::zero(desc)?;
    out.coords[..sub.rank].copy_from_slice(&z.coords[..sub.rank]);
    for i in 0..sub.rank {
        for j in (i + 1)..sub.rank {
            let from = sub.pair_offset(i, j);
            let to = desc.pair_offset(i, j);
            let w = desc.width();
            out.coords[to..to + w].copy_from_slice(&z.coords[from..from + w]);
        }
    }
    Ok(out)
}

/// Coordinates of the A_{1/2} block, pairs (i, r-1) in order.
pub fn half_coords(x: &Element) -> Vec<f64> {
    let r = x.desc.rank;
    let w = x.desc.width();
    let mut v = Vec::with_capacity((r - 1) * w);
    for i in 0..r.saturating_sub(1) {
        let o = x.desc.pair_offset(i, r - 1);
        v.extend_from_slice(&x.coords[o..o + w]);
    }
    v
}

/// Element of A_{1/2} with the given block coordinates.
pub fn embed_half(desc: AlgebraDescriptor, v: &[f64]) -> Result<Element> {
    let r = desc.rank;
    let w = desc.width();
    if r < 2 || v.len() != (r - 1) * w {
        return Err(Error::Usage(format!(
            "A_1/2 has dimension {}",
            (r.max(1) - 1) * w
        )));
    }
    let mut out = Element::zero(desc)?;
    for i in 0..r - 1 {
        let o = desc.pair_offset(i, r - 1);
        out.coords[o..o + w].copy_from_slice(&v[i * w..(i + 1) * w]);
    }
    Ok(out)
}

fn last_idempotent(desc: AlgebraDescriptor) -> Result<Element> {
    Element::idempotent(desc, desc.rank - 1)
}

fn require_component(x: &Element, keep: impl Fn(&PeirceSplit) -> f64, what: &str) -> Result<()> {
    let s = split(x, &last_idempotent(x.desc)?)?;
    let resid = keep(&s);
    if resid > 1e-10 * (1.0 + x.norm()) {
        return Err(Error::Domain(format!(
            "element is not in {what}: projection residual {resid:e}"
        )));
    }
    Ok(())
}

/// rho(u)xi = 2 u∘xi for u in A_0 and xi in A_{1/2}.
pub fn rho_apply(u: &Element, xi: &Element) -> Result<Element> {
    require_component(u, |s| s.a_half.norm() + s.a1.norm(), "A_0")?;
    require_component(xi, |s| s.a0.norm() + s.a1.norm(), "A_1/2")?;
    Ok(u.jordan_mul(xi)?.scale(2.0))
}

/// Matrix of rho(u) on A_{1/2} in the orthonormal block basis (row-major).
pub fn rho_matrix(u: &Element) -> Result<(Vec<f64>, usize)> {
    let desc = u.desc;
    let m = (desc.rank - 1) * desc.width();
    let mut basis = Vec::with_capacity(m);
    for k in 0..m {
        let mut v = vec![0.0; m];
        v[k] = 1.0;
        basis.push(embed_half(desc, &v)?);
    }
    let mut out = vec![0.0; m * m];
    for (b, eb) in basis.iter().enumerate() {
        let img = rho_apply(u, eb)?;
        let h = half_coords(&img);
        for a in 0..m {
            out[a * m + b] = h[a];
        }
    }
    Ok((out, m))
}

/// Determinant of rho(u) acting on A_{1/2}.
pub fn det_rho(u: &Element) -> Result<f64> {
    let (m, n) = rho_matrix(u)?;
    Ok(det_lu(&m, n))
}
