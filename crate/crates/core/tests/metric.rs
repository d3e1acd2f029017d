mod support;

use proptest::prelude::*;
use support::{fixture, gen, oracle};
use trustrev::metric::{multi_revise_metric, pseudometric_revise, resolve_threshold};
use trustrev::{
    expand, is_refinement, parse_formula, BeliefState, Error, FaithfulOrder, Formula, Signature,
    StatePartition, ThresholdMode, TrustMetric, TrustSpace,
};

const MODES: [ThresholdMode; 2] = [ThresholdMode::Strict, ThresholdMode::Closure];

fn table() -> (Signature, TrustMetric, TrustMetric) {
    let dd =
        TrustMetric::parse(&std::fs::read_to_string(fixture("general.metric")).unwrap()).unwrap();
    let ds = TrustMetric::parse(&std::fs::read_to_string(fixture("specialist.metric")).unwrap())
        .unwrap();
    (dd.signature().clone(), dd, ds)
}

fn f(sig: &Signature, text: &str) -> Formula {
    parse_formula(text, sig).unwrap()
}

#[test]
fn table_thresholds() {
    let (sig, dd, ds) = table();
    for mode in MODES {
        let p = dd.threshold_partition(1, mode).unwrap();
        assert_eq!(p.to_string(), "{ear,skin} {ear} | {skin} {}");
        assert!(dd.threshold_partition(0, mode).unwrap().is_unit());
        assert!(dd.threshold_partition(2, mode).unwrap().is_trivial());
        assert!(ds.threshold_partition(2, mode).unwrap().is_trivial());
        assert!(ds.threshold_partition(1, mode).unwrap().is_unit());
    }
    assert_eq!(dd.min_nontrivial_threshold(), Some(0));
    assert_eq!(ds.min_nontrivial_threshold(), Some(0));
    assert_eq!(TrustMetric::zero(&sig).min_nontrivial_threshold(), None);
}

#[test]
fn triangle_fixture_is_rejected() {
    let text = std::fs::read_to_string(fixture("triangle.metric")).unwrap();
    let err = TrustMetric::parse(&text).unwrap_err();
    assert!(matches!(err.root(), Error::AxiomViolation { .. }), "{err}");
}

#[test]
fn table_resolution() {
    let (sig, dd, ds) = table();
    let k = BeliefState::from_formula(&sig, &f(&sig, "skin & !ear")).unwrap();
    let o = FaithfulOrder::dalal(&k);
    let (skin, not_skin, ear, not_ear) = (
        f(&sig, "skin"),
        f(&sig, "!skin"),
        f(&sig, "ear"),
        f(&sig, "!ear"),
    );
    for mode in MODES {
        let (m, r) = multi_revise_metric(&o, [(&skin, &dd), (&not_skin, &ds)], mode).unwrap();
        assert_eq!((m, r.states().literals()), (1, vec!["{}".to_string()]));
        let (m, r) = multi_revise_metric(&o, [(&ear, &ds), (&not_ear, &dd)], mode).unwrap();
        assert_eq!((m, &r), (2, &k));
        assert_eq!(resolve_threshold(&sig, [(&skin, &ds)], mode), Ok(0));
    }
    let reports = [(skin.clone(), dd.clone()), (not_skin.clone(), ds.clone())];
    assert_eq!(oracle::oracle_multi_threshold(&reports), 1);
    let reports = [(ear, ds.clone()), (not_ear, dd.clone())];
    assert_eq!(oracle::oracle_multi_threshold(&reports), 2);

    let mut space = TrustSpace::new(&sig);
    space.insert("D", dd.clone()).unwrap();
    space.insert("S", ds.clone()).unwrap();
    let reports = [
        trustrev::Report::new("D", skin.clone()),
        trustrev::Report::new("S", not_skin),
    ];
    let (m, r) = space
        .multi_revise(&o, &reports, ThresholdMode::Strict)
        .unwrap();
    assert_eq!((m, r.states().literals()), (1, vec!["{}".to_string()]));
    assert!(matches!(
        space.multi_revise(
            &o,
            &[trustrev::Report::new("X", skin)],
            ThresholdMode::Strict
        ),
        Err(Error::UnknownAgent(_))
    ));
}

#[test]
fn single_metric_reports() {
    let (sig, dd, ds) = table();
    let o =
        FaithfulOrder::dalal(&BeliefState::from_formula(&sig, &f(&sig, "skin & !ear")).unwrap());
    let r = pseudometric_revise(&o, &dd, &f(&sig, "ear & !skin"), ThresholdMode::Strict).unwrap();
    assert_eq!(r.states().literals(), vec!["{ear}"]);
    let r = pseudometric_revise(
        &o,
        &TrustMetric::zero(&sig),
        &f(&sig, "ear"),
        ThresholdMode::Strict,
    )
    .unwrap();
    assert_eq!(&r, o.beliefs());
    let o =
        FaithfulOrder::dalal(&BeliefState::from_formula(&sig, &f(&sig, "!ear & !skin")).unwrap());
    let r = pseudometric_revise(&o, &ds, &f(&sig, "skin"), ThresholdMode::Strict).unwrap();
    assert_eq!(r.states().literals(), vec!["{skin}"]);
    assert!(matches!(
        pseudometric_revise(&o, &ds, &Formula::Bottom, ThresholdMode::Strict),
        Err(Error::UnsatisfiableInput(_))
    ));
}

#[test]
fn specialist_dominance_on_the_table() {
    // Every pair of conflicting skin reports, one from each doctor.
    let (sig, dd, ds) = table();
    let formulas: Vec<Formula> = (0u32..16)
        .map(|mask| {
            let models =
                trustrev::StateSet::from_indices(&sig, (0..4).filter(|i| mask >> i & 1 == 1));
            trustrev::dnf_of_stateset(&models)
        })
        .collect();
    let skin = trustrev::models(&sig, &f(&sig, "skin"));
    let not_skin = trustrev::models(&sig, &f(&sig, "!skin"));
    let mut checked = 0;
    for g in &formulas {
        for s in &formulas {
            let (mg, ms) = (trustrev::models(&sig, g), trustrev::models(&sig, s));
            let about_skin = |m: &trustrev::StateSet| m == &skin || m == &not_skin;
            if !about_skin(&mg) || !about_skin(&ms) || !mg.is_disjoint(&ms) {
                continue;
            }
            for mode in MODES {
                assert_eq!(resolve_threshold(&sig, [(g, &dd), (s, &ds)], mode), Ok(1));
                assert!(dd
                    .threshold_partition(1, mode)
                    .unwrap()
                    .expand_set(&mg)
                    .is_full());
                assert_eq!(ds.threshold_partition(1, mode).unwrap().expand_set(&ms), ms);
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 2);
}

fn n_metric() -> impl Strategy<Value = (usize, TrustMetric)> {
    (1usize..=3).prop_flat_map(|n| (Just(n), gen::any_metric(n)))
}

fn metric_batch() -> impl Strategy<Value = (FaithfulOrder, Vec<(Formula, TrustMetric)>)> {
    (1usize..=4).prop_flat_map(|n| {
        (
            gen::order(n),
            prop::collection::vec((gen::satisfiable_formula(n), gen::any_metric(n)), 1..=3),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn thresholds_coarsen((_, d) in n_metric(), i in 0u32..10, j in 0u32..10) {
        let (i, j) = (i.min(j), i.max(j));
        for mode in MODES {
            if let (Ok(a), Ok(b)) = (d.threshold_partition(i, mode), d.threshold_partition(j, mode)) {
                prop_assert!(is_refinement(&a, &b));
            }
        }
    }

    #[test]
    fn thresholds_stabilize((_, d) in n_metric(), extra in 0u32..3) {
        let top = d.max_distance() + extra;
        for mode in MODES {
            prop_assert!(d.threshold_partition(top, mode).unwrap().is_trivial());
        }
    }

    #[test]
    fn zero_threshold_is_zero_distance_classes((_, d) in n_metric()) {
        let p = d.threshold_partition(0, ThresholdMode::Strict).unwrap();
        let n = d.signature().state_count();
        for s in 0..n {
            for t in 0..n {
                prop_assert_eq!(p.cell_of_index(s) == p.cell_of_index(t), d.distance_by_index(s, t) == 0);
            }
        }
    }

    #[test]
    fn modes_agree_where_strict_is_defined((_, d) in n_metric(), i in 0u32..10) {
        let closure = d.threshold_partition(i, ThresholdMode::Closure).unwrap();
        let labels = oracle::oracle_closure_labels(&d, i);
        prop_assert_eq!(&closure, &gen::partition_from_labels(d.signature().len(), &labels));
        if let Ok(strict) = d.threshold_partition(i, ThresholdMode::Strict) {
            prop_assert_eq!(strict, closure);
        }
    }

    #[test]
    fn resolve_threshold_is_least((o, reports) in metric_batch()) {
        let sig = o.signature();
        let m = resolve_threshold(sig, reports.iter().map(|(f, d)| (f, d)), ThresholdMode::Closure).unwrap();
        prop_assert_eq!(m, oracle::oracle_multi_threshold(&reports));
        let at = |t: u32| {
            let mut acc = trustrev::StateSet::full(sig);
            for (f, d) in &reports {
                acc.intersect_with(&expand(&d.threshold_partition(t, ThresholdMode::Closure).unwrap(), f));
            }
            acc
        };
        prop_assert!(!at(m).is_empty());
        if m > 0 {
            prop_assert!(at(m - 1).is_empty());
        }
    }

    #[test]
    fn multi_revise_metric_matches_oracle((o, reports) in metric_batch()) {
        let (m, r) = multi_revise_metric(&o, reports.iter().map(|(f, d)| (f, d)), ThresholdMode::Closure).unwrap();
        let (em, expected) = oracle::oracle_multi_revise_metric(gen::rank_of(&o), &reports);
        prop_assert_eq!(m, em);
        prop_assert_eq!(gen::indices(r.states()), expected);
        if let Ok((sm, sr)) = multi_revise_metric(&o, reports.iter().map(|(f, d)| (f, d)), ThresholdMode::Strict) {
            prop_assert_eq!((sm, sr), (m, r));
        }
    }

    #[test]
    fn singleton_metric_batch_is_single_report((o, reports) in metric_batch()) {
        let (f, d) = &reports[0];
        if d.min_nontrivial_threshold().is_some() {
            let single = pseudometric_revise(&o, d, f, ThresholdMode::Closure).unwrap();
            let m = d.min_nontrivial_threshold().unwrap();
            let p = d.threshold_partition(m, ThresholdMode::Closure).unwrap();
            prop_assert_eq!(single, trustrev::trust_revise(&o, &p, f).unwrap());
        }
    }
}

#[test]
fn unit_partition_from_distinct_points() {
    let sig = gen::signature(2);
    let d = TrustMetric::from_fn(&sig, |i, j| (i as u32).abs_diff(j as u32)).unwrap();
    assert!(d
        .threshold_partition(0, ThresholdMode::Strict)
        .unwrap()
        .is_unit());
    assert!(matches!(
        d.threshold_partition(1, ThresholdMode::Strict),
        Err(Error::ThresholdNotTransitive { .. })
    ));
    assert_eq!(
        d.threshold_partition(1, ThresholdMode::Closure).unwrap(),
        StatePartition::trivial(&sig)
    );
}
