use super::{worst, CheckSpec, Entry, Outcome, ToleranceKind};
use crate::cone::reduce::sample_rng;
use crate::error::{Error, Result};
use crate::series::{
    coeffs2, coeffs3, elem_sym, j2, j3, k_series_x, muirhead_residual_with, special::gamma, z_residual_all,
    KMethod, SeriesParams, Solution, SymmetricPoint,
};
use rand::RngExt;
use rand_chacha::ChaCha8Rng;

/// Eigenvalues spread by a factor 8 to 12 around a middle value in
/// [0.2, 0.4]: inside the convergence region of every direct series, and with
/// t_3 large enough that the finite-difference step floor stays small
/// against it.
fn separated(rank: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mid: f64 = rng.random_range(0.2..0.4);
    let lo = mid / rng.random_range(8.0..12.0);
    let hi = mid * rng.random_range(8.0..12.0);
    if rank == 2 {
        vec![lo, hi]
    } else {
        vec![lo, mid, hi]
    }
}

/// Peirce constant of point `i`: the sweep alternates d = 1 and d = 2.
fn d_of(i: u64) -> f64 {
    if i % 2 == 0 {
        1.0
    } else {
        2.0
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn z_annihilation(s: Solution) -> impl Fn(&CheckSpec) -> Result<Outcome> {
    move |spec| {
        let mut rng = sample_rng(spec.seed, 0);
        let mut observed: f64 = 0.0;
        let mut work = 0;
        for i in 0..spec.count("points") {
            let p = SeriesParams::new(spec.param("nu"), d_of(i));
            let t = elem_sym(&separated(s.rank, &mut rng));
            let f = |q: &SymmetricPoint| s.eval(&p, q).map(|r| r.value);
            for z in z_residual_all(&f, &p, &t, s.flavor.sigma())? {
                observed = worst(observed, z.abs());
            }
            work += s.eval(&p, &t)?.work;
        }
        Ok(Outcome { observed, work })
    }
}

fn b_annihilation(s: Solution) -> impl Fn(&CheckSpec) -> Result<Outcome> {
    move |spec| {
        let mut rng = sample_rng(spec.seed, 0);
        let mut observed: f64 = 0.0;
        let mut work = 0;
        for i in 0..spec.count("points") {
            let p = SeriesParams::new(spec.param("nu"), d_of(i));
            let x = separated(s.rank, &mut rng);
            let f = |y: &[f64]| s.eval(&p, &elem_sym(y)).map(|r| r.value);
            for k in 1..=s.rank {
                observed = worst(observed, muirhead_residual_with(k, &f, &p, &x, s.flavor.sigma())?.abs());
            }
            work += s.eval(&p, &elem_sym(&x))?.work;
        }
        Ok(Outcome { observed, work })
    }
}

/// f = t1 at rank 3: Z_1 f = (nu + 1 + d) + t1 exactly; Z_2, Z_3 vanish.
fn z_control(spec: &CheckSpec) -> Result<Outcome> {
    let mut rng = sample_rng(spec.seed, 0);
    let mut observed: f64 = 0.0;
    for i in 0..spec.count("points") {
        let p = SeriesParams::new(spec.param("nu"), d_of(i));
        let t = elem_sym(&separated(3, &mut rng));
        let f = |q: &SymmetricPoint| Ok(q.t[0]);
        let z = z_residual_all(&f, &p, &t, 1.0)?;
        let expect = [p.nu + 1.0 + p.d + t.t[0], 0.0, 0.0];
        for (a, b) in z.iter().zip(expect) {
            observed = worst(observed, (a - b).abs());
        }
    }
    Ok(Outcome { observed, work: spec.count("points") })
}

/// f = 1: B_i f = 1 for every i.
fn b_control(spec: &CheckSpec) -> Result<Outcome> {
    let mut rng = sample_rng(spec.seed, 0);
    let mut observed: f64 = 0.0;
    for i in 0..spec.count("points") {
        let p = SeriesParams::new(spec.param("nu"), d_of(i));
        let x = separated(3, &mut rng);
        let f = |_: &[f64]| Ok(1.0);
        for k in 1..=3 {
            observed = worst(observed, (muirhead_residual_with(k, &f, &p, &x, 1.0)? - 1.0).abs());
        }
    }
    Ok(Outcome { observed, work: spec.count("points") })
}

/// Draws (nu, d, t1, t2) until every series involved is generic, runs `cmp`
/// and keeps the worst relative difference.
fn generic_sweep(
    spec: &CheckSpec,
    mut cmp: impl FnMut(f64, f64, f64, f64) -> Result<(f64, u64)>,
) -> Result<Outcome> {
    let mut rng = sample_rng(spec.seed, 0);
    let mut observed: f64 = 0.0;
    let mut work = 0;
    let mut done = 0;
    let mut tries = 0;
    while done < spec.count("samples") {
        tries += 1;
        if tries > 100 * spec.count("samples") {
            return Err(Error::Domain("could not draw generic parameters".into()));
        }
        let d = [1.0, 2.0, 4.0, 8.0][(done % 4) as usize];
        let nu: f64 = rng.random_range(-3.0..3.0);
        let t1: f64 = rng.random_range(0.5..2.0);
        let t2: f64 = rng.random_range(0.01..0.05) * t1 * t1;
        match cmp(nu, d, t1, t2) {
            Ok((r, w)) => {
                observed = worst(observed, r);
                work += w;
                done += 1;
            }
            Err(Error::NonGeneric { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(Outcome { observed, work })
}

/// J^{[3,j]}_nu(t1, t2, 0) against its two-variable image.
fn reduction(j: u8) -> impl Fn(&CheckSpec) -> Result<Outcome> {
    move |spec| {
        generic_sweep(spec, |nu, d, t1, t2| {
            let p = SeriesParams::new(nu, d);
            let mu = nu + d / 2.0;
            let (k, order, power) = match j {
                1 => (1, mu, 0.0),
                2 => (2, mu, 0.0),
                3 => (1, -mu, -mu),
                _ => (2, -mu, -mu),
            };
            let lhs = j3(j, &p, &SymmetricPoint { t: vec![t1, t2, 0.0] })?;
            let rhs = j2(k, &p.with_nu(order), &SymmetricPoint { t: vec![t1, t2] })?;
            Ok((rel(lhs.value, rhs.value * t2.powf(power)), lhs.work + rhs.work))
        })
    }
}

fn coeffs_symmetry(spec: &CheckSpec) -> Result<Outcome> {
    generic_sweep(spec, |nu, d, _, _| {
        let a = coeffs3(nu, d)?;
        let b = coeffs3(-nu, d)?;
        let mut r: f64 = 0.0;
        for j in 0..4 {
            r = worst(r, rel(a.a[j], b.b[j]));
            r = worst(r, rel(a.b[j], b.a[j]));
        }
        Ok((r, 8))
    })
}

fn coeffs_chain(spec: &CheckSpec) -> Result<Outcome> {
    generic_sweep(spec, |nu, d, _, _| {
        let a = coeffs3(nu, d)?;
        let c = coeffs2(nu + d / 2.0, d)?;
        let g = (2.0 * std::f64::consts::PI).powf(d) * gamma(-nu);
        if !g.is_finite() {
            return Err(Error::NonGeneric { what: "-nu".into(), arg: -nu });
        }
        let r = (0..4).fold(0.0, |acc, j| worst(acc, rel(a.a[j], g * c[j])));
        Ok((r, 4))
    })
}

/// Rank-3 K-series against det^{-nu} times the series at -nu, at points
/// where the eight-term combination converges directly.
fn eq14_series(spec: &CheckSpec) -> Result<Outcome> {
    let mut rng = sample_rng(spec.seed, 0);
    let mut observed: f64 = 0.0;
    let mut work = 0;
    for i in 0..spec.count("points") {
        let (nu, d) = if i % 2 == 0 { (-1.7, 1.0) } else { (-2.3, 2.0) };
        let p = SeriesParams::new(nu, d);
        let x = separated(3, &mut rng);
        let det: f64 = x.iter().product();
        let a = k_series_x(3, &p, &x, KMethod::Auto)?;
        let b = k_series_x(3, &p.with_nu(-nu), &x, KMethod::Auto)?;
        observed = worst(observed, rel(a.value, det.powf(-nu) * b.value));
        work += a.work + b.work;
    }
    Ok(Outcome { observed, work })
}

pub(super) fn entries() -> Vec<Entry> {
    let abs = ToleranceKind::Absolute;
    let relk = ToleranceKind::Relative;
    let mut v = Vec::new();
    for j in 1..=4u8 {
        let anchor = ["Eq. (9)", "Eq. (10)", "Eq. (11)", "Eq. (12)"][j as usize - 1];
        v.push(Entry::new(
            format!("eq{}-reduction", 8 + j),
            anchor,
            relk,
            &[("samples", 50.0), ("tol", 1e-11)],
            reduction(j),
        ));
    }
    for rank in [2, 3] {
        for s in Solution::fundamental_system(rank) {
            v.push(Entry::new(
                format!("z-annihilation-{}", s.name()),
                "Eqs. (3)-(4)",
                abs,
                &[("nu", 0.3), ("points", 20.0), ("tol", 1e-5)],
                z_annihilation(s),
            ));
        }
    }
    v.push(Entry::new("z-control-t1", "Eq. (3)", abs, &[("nu", 0.3), ("points", 5.0), ("tol", 1e-8)], z_control));
    for rank in [2, 3] {
        for s in Solution::fundamental_system(rank) {
            v.push(Entry::new(
                format!("b-annihilation-{}", s.name()),
                "Eq. (1)",
                abs,
                &[("nu", 0.3), ("points", 5.0), ("tol", 1e-5)],
                b_annihilation(s),
            ));
        }
    }
    v.push(Entry::new("b-control-one", "Eq. (1)", abs, &[("nu", 0.3), ("points", 5.0), ("tol", 1e-8)], b_control));
    v.push(Entry::new("coeffs-symmetry", "Theorem", relk, &[("samples", 50.0), ("tol", 0.0)], coeffs_symmetry));
    v.push(Entry::new("coeffs-chain", "Eq. (k3)", relk, &[("samples", 50.0), ("tol", 1e-12)], coeffs_chain));
    v.push(Entry::new("eq14-series", "Eq. (14)", relk, &[("points", 20.0), ("tol", 1e-9)], eq14_series));
    v
}
