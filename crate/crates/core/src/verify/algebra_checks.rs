use super::{worst, CheckSpec, Entry, Outcome, ToleranceKind};
use crate::algebra::{embed_a0, embed_half, AlgebraDescriptor, Element};
use crate::cone::reduce::sample_rng;
use crate::error::Result;
use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Draws per Peirce constant.
const DRAWS: f64 = 1000.0;

fn algebra(d: f64) -> Result<AlgebraDescriptor> {
    AlgebraDescriptor::new(3, d)
}

fn random_half(desc: AlgebraDescriptor, rng: &mut ChaCha8Rng) -> Result<Element> {
    let v: Vec<f64> = (0..2 * desc.d as usize).map(|_| StandardNormal.sample(rng)).collect();
    embed_half(desc, &v)
}

/// z in the open rank-2 cone, embedded in A_0.
fn random_a0_cone(desc: AlgebraDescriptor, rng: &mut ChaCha8Rng) -> Result<(Element, Element)> {
    let desc2 = AlgebraDescriptor::new(2, desc.d)?;
    let a = Element::random(desc2, rng)?;
    let z = a.square().add(&Element::unit(desc2)?.scale(0.1))?;
    Ok((embed_a0(desc, &z)?, z))
}

fn c3(desc: AlgebraDescriptor) -> Result<Element> {
    Element::idempotent(desc, 2)
}

/// Runs `draw` for every sample and both Peirce constants, keeping the worst
/// scaled residual.
fn sweep(spec: &CheckSpec, draw: impl Fn(AlgebraDescriptor, &mut ChaCha8Rng) -> Result<f64>) -> Result<Outcome> {
    let n = spec.count("draws");
    let mut observed: f64 = 0.0;
    let mut work = 0;
    for (k, d) in [1.0, 2.0].into_iter().enumerate() {
        let desc = algebra(d)?;
        let mut rng = sample_rng(spec.seed, k as u64);
        for _ in 0..n {
            observed = worst(observed, draw(desc, &mut rng)?);
            work += 1;
        }
    }
    Ok(Outcome { observed, work })
}

fn jordan_identity(spec: &CheckSpec) -> Result<Outcome> {
    sweep(spec, |desc, rng| {
        let x = Element::random(desc, rng)?;
        let y = Element::random(desc, rng)?;
        let x2 = x.jordan_mul(&x)?;
        let lhs = x2.jordan_mul(&x.jordan_mul(&y)?)?;
        let rhs = x.jordan_mul(&x2.jordan_mul(&y)?)?;
        Ok(lhs.sub(&rhs)?.norm() / (1.0 + x.norm().powi(3) * y.norm()))
    })
}

fn cayley_hamilton(spec: &CheckSpec) -> Result<Outcome> {
    sweep(spec, |desc, rng| {
        let x = Element::random(desc, rng)?;
        let a = x.char_coeffs();
        let x2 = x.jordan_mul(&x)?;
        let x3 = x.jordan_mul(&x2)?;
        let e = Element::unit(desc)?;
        let r = x3.sub(&x2.scale(a[0]))?.add(&x.scale(a[1]))?.sub(&e.scale(a[2]))?;
        Ok(r.norm() / (1.0 + x.norm().powi(3)))
    })
}

fn lemma1(spec: &CheckSpec) -> Result<Outcome> {
    sweep(spec, |desc, rng| {
        let xi = random_half(desc, rng)?;
        let t: f64 = rng.random_range(-2.0..2.0);
        let e0 = embed_a0(desc, &Element::unit(AlgebraDescriptor::new(2, desc.d)?)?)?;
        let y = e0.add(&xi)?.add(&c3(desc)?.scale(t))?;
        Ok((y.det() - (t - 0.5 * xi.norm().powi(2))).abs())
    })
}

/// (z^{-1}∘xi, xi) with z^{-1} taken in A_0.
fn half_form(z2: &Element, xi: &Element) -> Result<f64> {
    let zi = embed_a0(xi.desc, &z2.inverse()?)?;
    zi.jordan_mul(xi)?.inner(xi)
}

fn lemma2(spec: &CheckSpec) -> Result<Outcome> {
    sweep(spec, |desc, rng| {
        let (z, z2) = random_a0_cone(desc, rng)?;
        let xi = random_half(desc, rng)?;
        let t: f64 = rng.random_range(-2.0..2.0);
        let y = z.add(&xi)?.add(&c3(desc)?.scale(t))?;
        let expect = z2.det() * (t - half_form(&z2, &xi)?);
        Ok((y.det() - expect).abs() / (1.0 + z.norm().powi(3)))
    })
}

fn corollary(spec: &CheckSpec) -> Result<Outcome> {
    sweep(spec, |desc, rng| {
        let (z, z2) = random_a0_cone(desc, rng)?;
        let xi = random_half(desc, rng)?;
        let q = half_form(&z2, &xi)?;
        let t = q + rng.random_range(0.05..3.0);
        let y = z.add(&xi)?.add(&c3(desc)?.scale(t))?;
        let tr_inv = y.inverse()?.trace();
        let (det, tr) = (z2.det(), z2.trace());
        let formula = (2.0 * det + 2.0 * t * tr - xi.norm().powi(2)) / (2.0 * det * (t - q));
        Ok((tr_inv - formula).abs() / (1.0 + tr_inv.abs()))
    })
}

fn xi_facts(spec: &CheckSpec) -> Result<Outcome> {
    sweep(spec, |desc, rng| {
        let xi = random_half(desc, rng)?;
        let x2 = xi.jordan_mul(&xi)?;
        let x3 = xi.jordan_mul(&x2)?;
        let nn = xi.norm().powi(2);
        let cubic = x3.sub(&xi.scale(0.5 * nn))?.norm();
        let scale = 1.0 + xi.norm().powi(3);
        let worst_of = [xi.trace().abs(), x3.trace().abs(), xi.det().abs(), cubic];
        Ok(worst_of.iter().fold(0.0, |a, &b| worst(a, b)) / scale)
    })
}

fn p_det(spec: &CheckSpec) -> Result<Outcome> {
    sweep(spec, |desc, rng| {
        let x = Element::random(desc, rng)?;
        let y = Element::random(desc, rng)?;
        let lhs = x.quadratic_rep(&y)?.det();
        let rhs = x.det().powi(2) * y.det();
        Ok((lhs - rhs).abs() / (1.0 + x.norm().powi(6) * y.norm().powi(3)))
    })
}

fn peirce_rules(spec: &CheckSpec) -> Result<Outcome> {
    sweep(spec, |desc, rng| {
        let c = c3(desc)?;
        let (a0, _) = random_a0_cone(desc, rng)?;
        let s: f64 = StandardNormal.sample(rng);
        let a1 = c.scale(s);
        let xi = random_half(desc, rng)?;
        let eta = random_half(desc, rng)?;
        let scale = |a: &Element, b: &Element| 1.0 + a.norm() * b.norm();
        let r1 = a0.jordan_mul(&a1)?.norm() / scale(&a0, &a1);
        let m = a0.add(&a1)?;
        let sp = m.jordan_mul(&xi)?.peirce_split(&c)?;
        let r2 = (sp.a0.norm() + sp.a1.norm()) / scale(&m, &xi);
        let sp = xi.jordan_mul(&eta)?.peirce_split(&c)?;
        let r3 = sp.a_half.norm() / scale(&xi, &eta);
        Ok(worst(worst(r1, r2), r3))
    })
}

pub(super) fn entries() -> Vec<Entry> {
    let abs = ToleranceKind::Absolute;
    let p10 = [("draws", DRAWS), ("tol", 1e-10)];
    let p9 = [("draws", DRAWS), ("tol", 1e-9)];
    vec![
        Entry::new("jordan-identity", "Jordan identity", abs, &p10, jordan_identity),
        Entry::new("cayley-hamilton", "Cayley-Hamilton", abs, &p10, cayley_hamilton),
        Entry::new("lemma1", "Lemma 1", abs, &p10, lemma1),
        Entry::new("lemma2", "Lemma 2", abs, &p9, lemma2),
        Entry::new("corollary", "Corollary", abs, &p9, corollary),
        Entry::new("xi-facts", "Lemma 1 (proof)", abs, &p10, xi_facts),
        Entry::new("p-det", "Lemma 2 (proof)", abs, &p10, p_det),
        Entry::new("peirce-rules", "Peirce decomposition", abs, &p10, peirce_rules),
    ]
}
