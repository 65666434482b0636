use super::*;
use proptest::prelude::*;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Independent oracles: plain double-precision products and bounded loops,
// no shared term recurrence with the engine.

fn poch(a: f64, k: usize) -> f64 {
    (0..k).map(|i| a + i as f64).product()
}

fn fact(k: usize) -> f64 {
    poch(1.0, k)
}

fn sgn(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn j21_loop(nu: f64, d: f64, t1: f64, t2: f64) -> f64 {
    let mut s = 0.0;
    for m1 in 0..60 {
        for m2 in 0..40 {
            s += sgn(m1) * t1.powi(m1 as i32) * t2.powi(m2 as i32)
                / (fact(m1) * fact(m2) * poch(1.0 + nu, m2) * poch(1.0 + nu + d / 2.0, m1 + 2 * m2));
        }
    }
    s
}

fn j3_display_loop(j: u8, nu: f64, d: f64, t: [f64; 3]) -> f64 {
    let mut s = 0.0;
    for m1 in 0..30 {
        for m2 in 0..20 {
            for m3 in 0..12 {
                let a = m1 + 2 * m2 + 4 * m3;
                let b = m1 + 2 * m2 + 3 * m3;
                let common = sgn(m1 + m3) / (fact(m3) * poch(1.0 + nu, m3));
                let c = match j {
                    1 => {
                        poch(1.0 + 2.0 * nu + d, a)
                            / (fact(m1) * fact(m2) * poch(1.0 + nu + d / 2.0, m2 + 2 * m3)
                                * poch(1.0 + nu + d, b)
                                * poch(1.0 + 2.0 * nu + d, b))
                    }
                    3 => {
                        fact(a)
                            / (fact(m1) * poch(1.0 - nu - d / 2.0, m2) * fact(m2 + 2 * m3)
                                * poch(1.0 - nu, b)
                                * fact(b))
                    }
                    _ => unreachable!(),
                };
                let e2 = if j == 3 { -nu - d / 2.0 } else { 0.0 };
                s += common * c * t[0].powi(m1 as i32) * t[1].powf(m2 as f64 + e2) * t[2].powi(m3 as i32);
            }
        }
    }
    s
}

fn point(t: &[f64]) -> SymmetricPoint {
    SymmetricPoint { t: t.to_vec() }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Symmetric coordinates of eigenvalues spread far enough apart for every
/// direct series to converge.
fn separated(rank: usize, rng: &mut ChaCha8Rng) -> SymmetricPoint {
    let mid: f64 = rng.random_range(0.1..0.4);
    let lo = mid / rng.random_range(8.0..12.0);
    let hi = mid * rng.random_range(8.0..12.0);
    if rank == 2 {
        elem_sym(&[lo, hi])
    } else {
        elem_sym(&[lo, mid, hi])
    }
}

#[test]
fn regular_solution_at_origin_is_one() {
    let p = SeriesParams::new(0.3, 1.0);
    assert_eq!(j2(1, &p, &point(&[0.0, 0.0])).unwrap().value, 1.0);
    assert_eq!(j3(1, &p, &point(&[0.0, 0.0, 0.0])).unwrap().value, 1.0);
}

#[test]
fn j21_on_t1_axis_is_single_hypergeometric() {
    for (nu, d, t1) in [(0.3, 1.0, 0.7), (-0.4, 2.0, 2.5), (1.7, 8.0, 5.0)] {
        let mut oracle = 0.0;
        let mut term = 1.0;
        for m in 0..80 {
            oracle += term;
            term *= -t1 / ((m + 1) as f64 * (1.0 + nu + d / 2.0 + m as f64));
        }
        let v = j2(1, &SeriesParams::new(nu, d), &point(&[t1, 0.0])).unwrap().value;
        assert!(rel(v, oracle) < 1e-13, "{nu} {d} {t1}: {v} vs {oracle}");
    }
}

#[test]
fn j21_matches_double_loop() {
    let v = j2(1, &SeriesParams::new(0.3, 1.0), &point(&[0.2, 0.1])).unwrap().value;
    assert!(rel(v, j21_loop(0.3, 1.0, 0.2, 0.1)) < 1e-12);
    let v = j2(1, &SeriesParams::new(-1.3, 2.0), &point(&[1.4, 0.6])).unwrap().value;
    assert!(rel(v, j21_loop(-1.3, 2.0, 1.4, 0.6)) < 1e-11);
}

#[test]
fn printed_triple_sums_match_triple_loop() {
    let t = [0.3, 0.4, 0.05];
    for (j, nu, d) in [(1u8, -1.7, 1.0), (3, -1.7, 1.0), (1, 0.45, 2.0), (3, 0.45, 2.0)] {
        let s = Solution::new(3, j, false).unwrap().with_variant(Variant::Printed);
        let v = s.eval(&SeriesParams::new(nu, d), &point(&t)).unwrap().value;
        let o = j3_display_loop(j, nu, d, t);
        assert!(rel(v, o) < 1e-11, "j={j} nu={nu}: {v} vs {o}");
    }
}

#[test]
fn regular_rank3_display_agrees_with_recursion() {
    let s = Solution::new(3, 1, false).unwrap();
    for (nu, d, t) in [(-1.7, 1.0, [0.3, 0.4, 0.05]), (0.45, 2.0, [1.1, 0.7, 0.2]), (2.3, 4.0, [2.0, 1.0, 0.5])] {
        let p = SeriesParams::new(nu, d);
        let a = s.eval(&p, &point(&t)).unwrap().value;
        let b = s.eval_by_recursion(&p, &point(&t)).unwrap().value;
        assert!(rel(a, b) < 1e-11, "{nu} {d}: {a} vs {b}");
    }
}

#[test]
fn rank3_reduces_to_rank2_on_t3_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checked = 0;
    while checked < 50 {
        let d = [1.0, 2.0, 4.0, 8.0][checked % 4];
        let nu: f64 = rng.random_range(-3.0..3.0);
        let t1: f64 = rng.random_range(0.5..2.0);
        let t2: f64 = rng.random_range(0.01..0.05) * t1 * t1;
        let p = SeriesParams::new(nu, d);
        let mu = nu + d / 2.0;
        let images = [(1u8, mu, 0.0), (2, mu, 0.0), (1, -mu, -mu), (2, -mu, -mu)];
        let mut row = Vec::new();
        for (j, (k, order, power)) in (1..=4u8).zip(images) {
            let lhs = j3(j, &p, &point(&[t1, t2, 0.0]));
            let rhs = j2(k, &p.with_nu(order), &point(&[t1, t2]));
            match (lhs, rhs) {
                (Ok(a), Ok(b)) => row.push((a.value, b.value * t2.powf(power))),
                (Err(Error::NonGeneric { .. }), _) | (_, Err(Error::NonGeneric { .. })) => break,
                (a, b) => panic!("nu={nu} d={d} j={j}: {a:?} {b:?}"),
            }
        }
        if row.len() < 4 {
            continue;
        }
        for (j, (a, b)) in row.iter().enumerate() {
            assert!(rel(*a, *b) < 1e-11, "j={} nu={nu} d={d} t=({t1},{t2}): {a} vs {b}", j + 1);
        }
        checked += 1;
    }
}

fn z_max(s: Solution, p: &SeriesParams, t: &SymmetricPoint) -> f64 {
    let f = |q: &SymmetricPoint| s.eval(p, q).map(|r| r.value);
    z_residual_all(&f, p, t, s.flavor.sigma()).unwrap().iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[test]
fn fundamental_systems_are_annihilated() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for (nu, d) in [(-0.7, 1.0), (0.35, 2.0), (-1.7, 1.0), (-2.3, 2.0)] {
        let p = SeriesParams::new(nu, d);
        for rank in [2, 3] {
            let t = separated(rank, &mut rng);
            for s in Solution::fundamental_system(rank) {
                for flavor in [Flavor::Oscillatory, Flavor::Modified] {
                    let z = z_max(s.with_flavor(flavor), &p, &t);
                    assert!(z < 1e-5, "{} {flavor:?} nu={nu} d={d} t={:?}: {z}", s.name(), t.t);
                }
            }
        }
    }
}

#[test]
fn printed_singular_series_are_not_solutions() {
    let p = SeriesParams::new(-0.7, 1.0);
    let t2 = elem_sym(&[0.05, 0.5]);
    let s = Solution::new(2, 2, false).unwrap().with_variant(Variant::Printed);
    assert!(z_max(s, &p, &t2) > 1e-3);
    let t3 = elem_sym(&[0.04, 0.4, 4.0]);
    for j in 2..=4 {
        let s = Solution::new(3, j, false).unwrap().with_variant(Variant::Printed);
        assert!(z_max(s, &p, &t3) > 1e-3, "j={j}");
    }
}

#[test]
fn muirhead_operators() {
    let p = SeriesParams::new(0.3, 1.0);
    let one = |_: &[f64]| Ok(1.0);
    for i in 1..=3 {
        assert_eq!(muirhead_residual(i, &one, &p, &[0.3, 0.7, 1.2]).unwrap(), 1.0);
    }
    let f2 = |x: &[f64]| j2(1, &p, &elem_sym(x)).map(|r| r.value);
    for i in 1..=2 {
        assert!(muirhead_residual(i, &f2, &p, &[0.4, 0.9]).unwrap().abs() < 1e-5);
    }
    let f3 = |x: &[f64]| j3(1, &p, &elem_sym(x)).map(|r| r.value);
    for i in 1..=3 {
        assert!(muirhead_residual(i, &f3, &p, &[0.3, 0.7, 1.2]).unwrap().abs() < 1e-5);
    }
    assert!(matches!(muirhead_residual(1, &f2, &p, &[0.4, 0.4005]), Err(Error::IllConditioned(_))));
}

#[test]
fn coefficient_chain_and_swap() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut checked = 0;
    while checked < 50 {
        let nu: f64 = rng.random_range(-3.0..3.0);
        let d = [1.0, 2.0, 4.0, 8.0][checked % 4];
        let (Ok(a), Ok(c)) = (coeffs3(nu, d), coeffs2(nu + d / 2.0, d)) else { continue };
        let g = (2.0 * std::f64::consts::PI).powf(d) * gamma(-nu);
        // order of the rank-2 table: J21, J22, partner J21, partner J22
        for (j, cj) in [c[0], c[1], c[2], c[3]].iter().enumerate() {
            assert!(rel(a.a[j], g * cj) < 1e-12, "j={j} nu={nu} d={d}");
        }
        let back = coeffs3(-nu, d).unwrap();
        assert_eq!(a.a, back.b);
        assert_eq!(a.b, back.a);
        checked += 1;
    }
}

#[test]
fn k2_frozen_values() {
    // Values reproduced by the cone integral to better than 0.1%.
    for (d, x, frozen) in [(1.0, [0.3, 0.2], 0.901769151167929), (2.0, [0.5, 0.1], 2.13533002972030), (1.0, [1.0, 2.5], 0.0325138504077245)] {
        let v = k_series_x(2, &SeriesParams::new(-0.7, d), &x, KMethod::Auto).unwrap();
        assert!(rel(v.value, frozen) < 1e-10, "{d} {x:?}: {:.17e}", v.value);
    }
}

#[test]
fn k_symmetry_in_nu() {
    let t2 = elem_sym(&[0.1, 1.3]);
    let p = SeriesParams::new(-0.7, 1.0);
    let a = k2_series(&p, &t2).unwrap().value;
    let b = t2.t[1].powf(0.7) * k2_series(&p.with_nu(0.7), &t2).unwrap().value;
    assert!(rel(a, b) < 1e-10);
    let t3 = elem_sym(&[0.05, 0.5, 5.0]);
    let p = SeriesParams::new(-1.7, 1.0);
    let a = k3_series(&p, &t3).unwrap().value;
    let b = t3.t[2].powf(1.7) * k3_series(&p.with_nu(1.7), &t3).unwrap().value;
    assert!(rel(a, b) < 1e-9);
}

#[test]
fn k3_tends_to_rank2_boundary_value() {
    let (nu, d) = (-1.7, 1.0);
    let p = SeriesParams::new(nu, d);
    let limit = (2.0 * std::f64::consts::PI).powf(d)
        * gamma(-nu)
        * k_series_x(2, &p.with_nu(nu + d / 2.0), &[1.0, 1.5], KMethod::Auto).unwrap().value;
    let mut last = f64::INFINITY;
    for eps in [1e-2, 1e-3, 1e-4] {
        let v = k_series_x(3, &p, &[eps, 1.0, 1.5], KMethod::Auto).unwrap().value;
        let gap = rel(v, limit);
        assert!(gap < last, "eps={eps}: {v} vs {limit}");
        last = gap;
    }
    assert!(last < 1e-3, "{last}");
}

#[test]
fn coincident_eigenvalues_use_the_limit() {
    let p = SeriesParams::new(-0.7, 2.0);
    let at = k_series_x(2, &p, &[0.6, 0.6], KMethod::Auto).unwrap().value;
    let near = k_series_x(2, &p, &[0.57, 0.63], KMethod::Auto).unwrap().value;
    assert!(at.is_finite() && rel(at, near) < 1e-2);
}

#[test]
fn pole_guard_is_an_error() {
    let p = SeriesParams::new(-1.0, 1.0);
    assert!(matches!(j2(1, &p, &point(&[0.2, 0.1])), Err(Error::NonGeneric { .. })));
    assert!(matches!(coeffs3(2.0, 1.0), Err(Error::NonGeneric { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn tighter_tolerance_stays_within_reported_error(
        nu in -2.4f64..2.4, t1 in 0.1f64..3.0, t2 in 0.0f64..1.0,
    ) {
        let loose = SeriesParams { tol: 1e-6, ..SeriesParams::new(nu, 1.0) };
        let tight = SeriesParams { tol: 1e-14, ..loose };
        if let (Ok(a), Ok(b)) = (j2(1, &loose, &point(&[t1, t2])), j2(1, &tight, &point(&[t1, t2]))) {
            prop_assert!((a.value - b.value).abs() <= a.err + 1e-15 * b.value.abs());
        }
    }

    #[test]
    fn elem_sym_matches_polynomial_expansion(x in proptest::collection::vec(-3.0f64..3.0, 3)) {
        let t = elem_sym(&x);
        // prod (lambda + x_i) at lambda = 1.7 equals sum t_p lambda^{3-p}
        let l: f64 = 1.7;
        let direct: f64 = x.iter().map(|xi| l + xi).product();
        let expanded = l.powi(3) + t.t[0] * l * l + t.t[1] * l + t.t[2];
        prop_assert!((direct - expanded).abs() < 1e-12 * (1.0 + direct.abs()));
    }
}
