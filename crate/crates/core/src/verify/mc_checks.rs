use super::{derive_seed, worst, CheckSpec, Entry, Outcome, ToleranceKind};
use crate::algebra::{AlgebraDescriptor, Element};
use crate::cone::{
    gamma_cone, gamma_cone_mc, gaussian_substep, k3_boundary_direct, k3_boundary_semi_analytic, k_integral_mc,
    substep_point, McEstimate,
};
use crate::error::Result;
use crate::series::{k_series_x, special::gamma, KMethod, SeriesParams};
use std::f64::consts::PI;

/// |a - b| in units of the combined standard error.
fn z_score(a: &McEstimate, b: &McEstimate) -> f64 {
    (a.value - b.value).abs() / a.std_error.hypot(b.std_error)
}

fn z_exact(a: &McEstimate, exact: f64) -> f64 {
    (a.value - exact).abs() / a.std_error
}

/// Order used for the boundary checks of each Peirce constant.
fn boundary_nu(d: f64) -> f64 {
    if d == 1.0 {
        -1.7
    } else {
        -2.3
    }
}

fn boundary_series(nu: f64, d: f64, x2: f64) -> Result<f64> {
    let k2 = k_series_x(2, &SeriesParams::new(nu + d / 2.0, d), &[1.0, x2], KMethod::Auto)?;
    Ok((2.0 * PI).powf(d) * gamma(-nu) * k2.value)
}

#[derive(Clone, Copy)]
enum Pair {
    DirectSemi,
    DirectSeries,
    SemiSeries,
}

fn boundary(pair: Pair, d: f64, x2: f64) -> impl Fn(&CheckSpec) -> Result<Outcome> {
    move |spec| {
        let nu = boundary_nu(d);
        let n = spec.count("n");
        let semi_seed = derive_seed(spec.seed, "semi", 0);
        let direct_seed = derive_seed(spec.seed, "direct", 0);
        let (observed, work) = match pair {
            Pair::DirectSemi => {
                let a = k3_boundary_direct(nu, d, 1.0, x2, n, direct_seed)?;
                let b = k3_boundary_semi_analytic(nu, d, 1.0, x2, n, semi_seed)?;
                (z_score(&a.estimate, &b), 2 * n)
            }
            Pair::DirectSeries => {
                let a = k3_boundary_direct(nu, d, 1.0, x2, n, direct_seed)?;
                (z_exact(&a.estimate, boundary_series(nu, d, x2)?), n)
            }
            Pair::SemiSeries => {
                let b = k3_boundary_semi_analytic(nu, d, 1.0, x2, n, semi_seed)?;
                (z_exact(&b, boundary_series(nu, d, x2)?), n)
            }
        };
        Ok(Outcome { observed, work })
    }
}

/// Number of samples whose v left the rank-2 cone.
fn v_positivity(d: f64) -> impl Fn(&CheckSpec) -> Result<Outcome> {
    move |spec| {
        let n = spec.count("n");
        let r = k3_boundary_direct(boundary_nu(d), d, 1.0, 1.5, n, spec.seed)?;
        Ok(Outcome { observed: r.v_positivity_failures as f64, work: n })
    }
}

fn substep(d: f64) -> impl Fn(&CheckSpec) -> Result<Outcome> {
    move |spec| {
        let n = spec.count("n");
        let z = substep_point(d, spec.seed)?;
        let g = gaussian_substep(&z, spec.param("t"), n, spec.seed)?;
        Ok(Outcome { observed: z_exact(&g.estimate, g.exact), work: n })
    }
}

fn gamma_mc(r: usize, d: f64) -> impl Fn(&CheckSpec) -> Result<Outcome> {
    move |spec| {
        let desc = AlgebraDescriptor::new(r, d)?;
        let threshold = if r == 1 { 0.0 } else { (r as f64 - 1.0) * d / 2.0 };
        let n = spec.count("n");
        let mut observed: f64 = 0.0;
        for (k, off) in [0.8, 1.7, 3.2].into_iter().enumerate() {
            let s = threshold + off;
            let e = gamma_cone_mc(desc, s, n, derive_seed(spec.seed, "s", k as u64))?;
            observed = worst(observed, z_exact(&e, gamma_cone(desc, s)?));
        }
        Ok(Outcome { observed, work: 3 * n })
    }
}

/// Rank-3 closed form at s = -nu against the product of three Gammas.
fn gamma_closed_form(_: &CheckSpec) -> Result<Outcome> {
    let mut observed: f64 = 0.0;
    for d in [1.0, 2.0] {
        let desc = AlgebraDescriptor::new(3, d)?;
        for nu in [-1.3, -2.15, -3.7, -5.05] {
            if -nu <= d {
                continue;
            }
            let display = (2.0 * PI).powf(1.5 * d) * gamma(-nu) * gamma(-nu - d / 2.0) * gamma(-nu - d);
            let v = gamma_cone(desc, -nu)?;
            observed = worst(observed, (v - display).abs() / display.abs());
        }
    }
    Ok(Outcome { observed, work: 8 })
}

/// K(nu, x) against det(x)^{-nu} K(-nu, x) by two independent runs.
fn eq14_mc(spec: &CheckSpec) -> Result<Outcome> {
    let n = spec.count("n");
    let points: [(usize, f64, f64, &[f64]); 3] =
        [(2, 1.0, -0.7, &[1.0, 2.5]), (2, 2.0, -0.7, &[0.5, 1.2]), (3, 1.0, -1.7, &[1.0, 1.3, 1.7])];
    let mut observed: f64 = 0.0;
    for (k, (r, d, nu, x)) in points.into_iter().enumerate() {
        let desc = AlgebraDescriptor::new(r, d)?;
        let xe = Element::diag(desc, x)?;
        let det: f64 = x.iter().product();
        let a = k_integral_mc(desc, nu, &xe, n, derive_seed(spec.seed, "plus", k as u64))?;
        let b = k_integral_mc(desc, -nu, &xe, n, derive_seed(spec.seed, "minus", k as u64))?;
        let b = McEstimate { value: det.powf(-nu) * b.value, std_error: det.powf(-nu) * b.std_error, ..b };
        observed = worst(observed, z_score(&a, &b));
    }
    Ok(Outcome { observed, work: 6 * n })
}

/// Rank-3 integral at diag(1, 1.3, 1.7) against the eight-term series, in
/// units of (std error + series error).
fn theorem_interior(d: f64, nu: f64) -> impl Fn(&CheckSpec) -> Result<Outcome> {
    move |spec| {
        let x = [1.0, 1.3, 1.7];
        let n = spec.count("n");
        let desc = AlgebraDescriptor::new(3, d)?;
        let mc = k_integral_mc(desc, nu, &Element::diag(desc, &x)?, n, spec.seed)?;
        let s = k_series_x(3, &SeriesParams::new(nu, d), &x, KMethod::Auto)?;
        Ok(Outcome { observed: (mc.value - s.value).abs() / (mc.std_error + s.err), work: n + s.work })
    }
}

pub(super) fn entries() -> Vec<Entry> {
    let mc = ToleranceKind::McSigma;
    let mut v = Vec::new();
    v.push(Entry::new("eq14-mc", "Eq. (14)", mc, &[("n", 200_000.0), ("sigma", 2.0)], eq14_mc));
    for r in 1..=3 {
        for d in [1.0, 2.0] {
            v.push(Entry::new(
                format!("gamma-mc-r{r}-d{d}"),
                "Gamma_Omega",
                mc,
                &[("n", 100_000.0), ("sigma", 2.0)],
                gamma_mc(r, d),
            ));
        }
    }
    v.push(Entry::new("gamma-closed-form-r3", "Gamma_Omega", ToleranceKind::Relative, &[("tol", 1e-14)], gamma_closed_form));
    for d in [1.0, 2.0] {
        v.push(Entry::new(
            format!("gaussian-substep-d{d}"),
            "Section 3, B = rho(v)",
            mc,
            &[("n", 100_000.0), ("t", 0.8), ("sigma", 2.0)],
            substep(d),
        ));
        v.push(Entry::new(
            format!("v-positivity-d{d}"),
            "Section 3, v in Omega_2",
            ToleranceKind::Absolute,
            &[("n", 100_000.0), ("tol", 0.0)],
            v_positivity(d),
        ));
        for x2 in [1.0, 1.5] {
            for (label, pair) in
                [("direct-vs-semi", Pair::DirectSemi), ("direct-vs-series", Pair::DirectSeries), ("semi-vs-series", Pair::SemiSeries)]
            {
                v.push(Entry::new(
                    format!("eq-k3-{label}-d{d}-x{x2}"),
                    "Eq. (k3)",
                    mc,
                    &[("n", 200_000.0), ("sigma", 2.0)],
                    boundary(pair, d, x2),
                ));
            }
        }
    }
    v.push(Entry::new(
        "theorem-interior-d1",
        "Theorem",
        mc,
        &[("n", 2_000_000.0), ("sigma", 2.0)],
        theorem_interior(1.0, -1.7),
    ));
    v.push(Entry::new(
        "theorem-interior-d2",
        "Theorem",
        mc,
        &[("n", 2_000_000.0), ("sigma", 2.0)],
        theorem_interior(2.0, -2.3),
    ));
    v
}
