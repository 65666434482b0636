use super::*;

#[test]
fn registry_covers_the_required_checks() {
    let names = registered_names();
    let required = [
        "jordan-identity", "cayley-hamilton", "lemma1", "lemma2", "corollary", "xi-facts", "p-det", "peirce-rules",
        "eq9-reduction", "eq10-reduction", "eq11-reduction", "eq12-reduction", "z-control-t1", "b-control-one",
        "coeffs-symmetry", "coeffs-chain", "eq14-series", "eq14-mc", "gamma-closed-form-r3",
        "gaussian-substep-d1", "gaussian-substep-d2", "v-positivity-d1", "v-positivity-d2",
        "theorem-interior-d1", "theorem-interior-d2",
    ];
    for r in required {
        assert!(names.iter().any(|n| n == r), "{r} missing");
    }
    for s in ["j21", "j22", "j21-partner", "j22-partner", "j31", "j32", "j33", "j34", "j31-partner", "j34-partner"] {
        assert!(names.contains(&format!("z-annihilation-{s}")));
        assert!(names.contains(&format!("b-annihilation-{s}")));
    }
    for r in 1..=3 {
        for d in 1..=2 {
            assert!(names.contains(&format!("gamma-mc-r{r}-d{d}")));
        }
    }
    for d in 1..=2 {
        for x in ["1", "1.5"] {
            for pair in ["direct-vs-semi", "direct-vs-series", "semi-vs-series"] {
                assert!(names.contains(&format!("eq-k3-{pair}-d{d}-x{x}")));
            }
        }
    }
    let mut sorted = names.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), names.len(), "duplicate check names");
}

#[test]
fn every_check_reads_only_declared_parameters() {
    // A cheap run of each non-Monte-Carlo check with its defaults; a missing
    // parameter panics.
    for name in ["lemma1", "z-control-t1", "coeffs-chain", "gamma-closed-form-r3"] {
        let r = run_check(&default_spec(name, 3).unwrap()).unwrap();
        assert!(r.passed, "{r:?}");
    }
}

#[test]
fn unknown_names_list_the_registry() {
    match run_suite(&Suite::parse("lemma1,no-such-check"), 1) {
        Err(Error::UnknownCheck { name, registered }) => {
            assert_eq!(name, "no-such-check");
            assert!(registered.len() > 50);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn reductions_subset_and_stable_report() {
    let suite = Suite::parse("eq9-reduction,eq10-reduction,eq11-reduction,eq12-reduction");
    let a = run_suite(&suite, 42).unwrap();
    assert_eq!(a.results.len(), 4);
    assert!(a.all_passed(), "{a:?}");
    let b = run_suite(&suite, 42).unwrap();
    assert_eq!(crate::json::to_string(&a), crate::json::to_string(&b));
}

#[test]
fn seeds_depend_on_name_and_attempt() {
    assert_ne!(derive_seed(1, "a", 0), derive_seed(1, "b", 0));
    assert_ne!(derive_seed(1, "a", 0), derive_seed(1, "a", 1));
    assert_ne!(derive_seed(1, "a", 0), derive_seed(2, "a", 0));
    assert_eq!(derive_seed(7, "lemma1", 0), derive_seed(7, "lemma1", 0));
}

#[test]
fn failed_computations_become_failed_results() {
    let mut spec = default_spec("eq9-reduction", 1).unwrap();
    spec.params.insert("samples".into(), 0.0);
    assert!(run_check(&spec).unwrap().passed);
    let mut spec = default_spec("gaussian-substep-d1", 1).unwrap();
    spec.params.insert("n".into(), 10.0);
    let r = run_check(&spec).unwrap();
    assert!(!r.passed && r.error.is_some() && r.observed.is_nan());
}
