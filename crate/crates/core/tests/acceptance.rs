//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Monte Carlo comparisons pass at 2 sigma and, like the registry checks, are
//! retried once with four times the samples under a fresh seed.

use conebessel::algebra::{AlgebraDescriptor, Element};
use conebessel::cone::{k_integral_mc, McEstimate};
use conebessel::series::{k_series_x, KMethod, SeriesParams};
use conebessel::verify::{default_spec, derive_seed, run_check};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

const SEED: u64 = 42;

struct Verdict {
    passed: bool,
    detail: String,
}

fn registry(names: &[String]) -> Verdict {
    let mut failed = Vec::new();
    let mut worst_ratio: f64 = 0.0;
    for n in names {
        let r = run_check(&default_spec(n, SEED).unwrap()).unwrap();
        if !r.passed {
            failed.push(format!("{} (observed {:.3e}, bound {:.1e}{})", r.name, r.observed, r.bound,
                r.error.map(|e| format!(", {e}")).unwrap_or_default()));
        }
        if r.bound > 0.0 {
            worst_ratio = worst_ratio.max(r.observed / r.bound);
        }
    }
    Verdict {
        passed: failed.is_empty(),
        detail: if failed.is_empty() {
            format!("{} checks, worst observed/bound {:.3}", names.len(), worst_ratio)
        } else {
            format!("failed: {}", failed.join("; "))
        },
    }
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// Runs `estimate(n, seed)`, retrying once with 4n; returns the estimate used
/// and its z-score against `exact` (whose own uncertainty is `exact_err`).
fn mc_against(
    label: &str,
    n: u64,
    exact: f64,
    exact_err: f64,
    estimate: impl Fn(u64, u64) -> McEstimate,
) -> (McEstimate, f64) {
    let mut last = None;
    for attempt in 0..2u64 {
        let m = if attempt == 0 { n } else { 4 * n };
        let e = estimate(m, derive_seed(SEED, label, attempt));
        let z = (e.value - exact).abs() / (e.std_error + exact_err);
        if z <= 2.0 {
            return (e, z);
        }
        last = Some((e, z));
    }
    last.unwrap()
}

/// K_nu(z) = int_0^inf exp(-z cosh u) cosh(nu u) du by the trapezoid rule,
/// which converges geometrically for this doubly exponentially decaying
/// integrand.
fn macdonald(nu: f64, z: f64) -> f64 {
    let h = 1e-3;
    let mut sum = 0.5 * (-z).exp();
    let mut k = 1;
    loop {
        let u = k as f64 * h;
        let v = (-z * u.cosh()).exp() * (nu * u).cosh();
        sum += v;
        if v < 1e-300 || (v < 1e-18 * sum && u > 1.0) {
            break;
        }
        k += 1;
    }
    sum * h
}

fn criterion_5() -> Verdict {
    let mut lines = Vec::new();
    // The oracle itself, against K_{1/2}(z) = sqrt(pi / (2z)) e^{-z}.
    let oracle_err = [0.5, 2.0, 5.0]
        .iter()
        .map(|&z: &f64| {
            let exact = (std::f64::consts::PI / (2.0 * z)).sqrt() * (-z).exp();
            (macdonald(0.5, z) - exact).abs() / exact
        })
        .fold(0.0, f64::max);
    let mut ok = oracle_err < 1e-12;
    lines.push(format!("quadrature oracle rel err {oracle_err:.1e}"));
    // Rank 1: int_0^inf e^{-1/y - x y} y^{nu - 1} dy = 2 x^{-nu/2} K_nu(2 sqrt x).
    for (nu, x) in [(-0.5f64, 1.0f64), (0.7, 0.6), (-1.3, 2.0)] {
        let desc = AlgebraDescriptor::new(1, 1.0).unwrap();
        let exact = 2.0 * x.powf(-nu / 2.0) * macdonald(nu, 2.0 * x.sqrt());
        let xe = Element::diag(desc, &[x]).unwrap();
        let (_, z) = mc_against(&format!("r1-{nu}-{x}"), 1_000_000, exact, 0.0, |n, s| {
            k_integral_mc(desc, nu, &xe, n, s).unwrap()
        });
        ok &= z <= 2.0;
        lines.push(format!("r1 nu={nu} x={x}: z={z:.2}"));
    }
    for d in [1.0, 2.0] {
        let desc = AlgebraDescriptor::new(2, d).unwrap();
        let nu = -0.7;
        for x in [[0.3, 0.2], [0.5, 0.1], [1.0, 2.5]] {
            let s = k_series_x(2, &SeriesParams::new(nu, d), &x, KMethod::Auto).unwrap();
            let xe = Element::diag(desc, &x).unwrap();
            let (e, z) = mc_against(&format!("r2-{d}-{x:?}"), 1_000_000, s.value, s.err, |n, seed| {
                k_integral_mc(desc, nu, &xe, n, seed).unwrap()
            });
            let rel = e.std_error / e.value.abs();
            ok &= z <= 2.0 && rel < 0.02;
            lines.push(format!("d={d} x={x:?}: z={z:.2} se/v={rel:.1e}"));
        }
    }
    Verdict { passed: ok, detail: lines.join(", ") }
}

fn criterion_7() -> Verdict {
    let x = [1.0, 1.3, 1.7];
    let mut ok = true;
    let mut lines = Vec::new();
    for (d, nu) in [(1.0, -1.7), (2.0, -2.3)] {
        let desc = AlgebraDescriptor::new(3, d).unwrap();
        let s = k_series_x(3, &SeriesParams::new(nu, d), &x, KMethod::Auto).unwrap();
        let xe = Element::diag(desc, &x).unwrap();
        let (e, z) = mc_against(&format!("theorem-d{d}"), 2_000_000, s.value, s.err, |n, seed| {
            k_integral_mc(desc, nu, &xe, n, seed).unwrap()
        });
        let rel = e.std_error / e.value.abs();
        ok &= z <= 2.0 && rel <= 0.05;
        lines.push(format!(
            "d={d} nu={nu}: mc {:.6} +- {:.1e}, series {:.6} +- {:.1e}, z={z:.2}",
            e.value, e.std_error, s.value, s.err
        ));
    }
    Verdict { passed: ok, detail: lines.join("; ") }
}

fn criterion_10() -> Verdict {
    let exe = env!("CARGO_BIN_EXE_conebessel");
    let run = |threads: &str| {
        let out = Command::new(exe)
            .args(["--threads", threads, "verify", "--suite", "all", "--seed", "42", "--json"])
            .env_remove("CONEBESSEL_SEED")
            .output()
            .expect("run the CLI");
        (out.status.code(), out.stdout)
    };
    let (c1, a) = run("1");
    let (c3, b) = run("3");
    let identical = a == b && !a.is_empty();
    let all_pass = c1 == Some(0) && c3 == Some(0);
    Verdict {
        passed: identical,
        detail: format!(
            "threads 1 vs 3: {} ({} bytes), exit codes {:?}/{:?}{}",
            if identical { "byte-identical" } else { "DIFFERENT" },
            a.len(),
            c1,
            c3,
            if all_pass { "" } else { " (some checks failed)" }
        ),
    }
}

fn main() -> ExitCode {
    let z_names: Vec<String> = ["j21", "j22", "j21-partner", "j22-partner"]
        .iter()
        .chain(["j31", "j32", "j33", "j34", "j31-partner", "j32-partner", "j33-partner", "j34-partner"].iter())
        .map(|s| s.to_string())
        .collect();
    let mut pde: Vec<String> = z_names.iter().map(|s| format!("z-annihilation-{s}")).collect();
    pde.extend(z_names.iter().map(|s| format!("b-annihilation-{s}")));
    pde.push("z-control-t1".into());
    pde.push("b-control-one".into());
    let mut boundary = names(&["gaussian-substep-d1", "gaussian-substep-d2", "v-positivity-d1", "v-positivity-d2"]);
    for d in [1, 2] {
        for x in ["1", "1.5"] {
            for pair in ["direct-vs-semi", "direct-vs-series", "semi-vs-series"] {
                boundary.push(format!("eq-k3-{pair}-d{d}-x{x}"));
            }
        }
    }
    let mut gamma: Vec<String> = Vec::new();
    for r in 1..=3 {
        for d in 1..=2 {
            gamma.push(format!("gamma-mc-r{r}-d{d}"));
        }
    }
    gamma.push("gamma-closed-form-r3".into());

    type Run = Box<dyn Fn() -> Verdict>;
    let criteria: Vec<(u32, &str, Option<Duration>, Run)> = vec![
        (
            1,
            "algebraic identities",
            Some(Duration::from_secs(10)),
            Box::new(|| registry(&names(&["lemma1", "lemma2", "corollary", "cayley-hamilton", "p-det", "peirce-rules", "xi-facts"]))),
        ),
        (2, "PDE annihilation and controls", Some(Duration::from_secs(60)), Box::new(move || registry(&pde))),
        (
            3,
            "rank-3 to rank-2 reductions",
            Some(Duration::from_secs(10)),
            Box::new(|| registry(&names(&["eq9-reduction", "eq10-reduction", "eq11-reduction", "eq12-reduction"]))),
        ),
        (4, "coefficient chain and symmetry", None, Box::new(|| registry(&names(&["coeffs-chain", "coeffs-symmetry"])))),
        (5, "rank-1 and rank-2 ground truth", Some(Duration::from_secs(300)), Box::new(criterion_5)),
        (6, "boundary chain", Some(Duration::from_secs(300)), Box::new(move || registry(&boundary))),
        (7, "rank-3 interior integral vs series", Some(Duration::from_secs(600)), Box::new(criterion_7)),
        (8, "order symmetry", None, Box::new(|| registry(&names(&["eq14-series", "eq14-mc"])))),
        (9, "cone Gamma normalization", None, Box::new(move || registry(&gamma))),
        (10, "determinism across thread counts", None, Box::new(criterion_10)),
    ];

    let mut failures = 0;
    for (id, label, limit, run) in &criteria {
        let start = Instant::now();
        let mut v = run();
        let secs = start.elapsed();
        if let Some(limit) = limit {
            if secs > *limit {
                v.passed = false;
                v.detail.push_str(&format!("; runtime {:.1}s exceeds {}s", secs.as_secs_f64(), limit.as_secs()));
            }
        }
        if !v.passed {
            failures += 1;
        }
        println!(
            "[{}] criterion {id:>2}: {label} ({:.1}s) {}",
            if v.passed { "PASS" } else { "FAIL" },
            secs.as_secs_f64(),
            v.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
