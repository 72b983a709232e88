mod common;

use common::{naive_closure, naive_tally, p, w};
use schurprod::counting::{
    compatibility_report, count_constrained, count_satisfying, count_single, joint_circularity_report,
    moment_reconstruction_check, ConstraintSystem, IndexCounter, Semantics,
};
use schurprod::ensemble::{EntryDistribution, ProductEnsemble};
use schurprod::LinkFunction;

fn th() -> (LinkFunction, LinkFunction) {
    (LinkFunction::toeplitz(), LinkFunction::hankel())
}

#[test]
fn frozen_class_counts() {
    let (t, h) = th();
    let c = ConstraintSystem::new(t, h, w("1*1*"), p("1,2/3,4"), p("1,2/3,4"), 16).unwrap();
    assert_eq!(count_constrained(&c).unwrap(), 3840);
    assert_eq!(count_satisfying(&c).unwrap(), 4096);
    let hankel = LinkFunction::hankel();
    assert_eq!(count_single(&hankel, &p("1,2"), &w("1*"), 32).unwrap(), 1024);
}

#[test]
fn crossing_row_halves() {
    let (t, h) = th();
    let ratios: Vec<f64> = [8usize, 16]
        .iter()
        .map(|&n| {
            let closure = naive_closure(&t, &h, &w("1*1*"), &p("1,3/2,4"), &p("1,3/2,4"), n);
            closure as f64 / (n as f64).powi(3)
        })
        .collect();
    assert!((ratios[1] / ratios[0] - 0.5).abs() < 0.1);
}

#[test]
fn non_alternating_word_has_vanishing_rows() {
    let (t, h) = th();
    let r = joint_circularity_report(&t, &h, &w("1111"), &[16, 32, 64]).unwrap();
    for s in &r.series {
        assert_eq!(s.predicted_limit, 0);
        assert!(s.closure_fit.decays, "{s:?}");
        assert!(!s.flagged);
    }
}

#[test]
fn same_link_pair_is_flagged() {
    let h = LinkFunction::hankel();
    let r = compatibility_report(&h, &h, &w("1*1*"), &[16, 32, 64]).unwrap();
    assert!(r.assumption_flags.iter().any(|f| f.contains("not injective")), "{:?}", r.assumption_flags);
    // identical links induce identical partitions, so mismatched classes are empty
    assert!(r.rows.iter().all(|row| row.count == 0));
    assert!(r.series.iter().all(|s| s.closure_fit.decays));
}

#[test]
fn assumption_violation_flagged_first() {
    let bad = (LinkFunction::hankel(), LinkFunction::projection(schurprod::linkfn::Axis::Column));
    let r = compatibility_report(&bad.0, &bad.1, &w("1*1*"), &[16, 32, 64]).unwrap();
    assert!(r.assumption_flags[0].contains("proj:j"), "{:?}", r.assumption_flags);
    let jc = joint_circularity_report(&bad.0, &bad.1, &w("1*1*"), &[16, 32, 64]).unwrap();
    let failing = r.flagged().len() + jc.flagged().len();
    assert!(failing >= 1);
}

#[test]
fn diagonal_word_reconstruction() {
    let e = ProductEnsemble::new(
        LinkFunction::toeplitz(),
        LinkFunction::hankel(),
        EntryDistribution::StandardGaussian,
        EntryDistribution::StandardGaussian,
    );
    let c = moment_reconstruction_check(&e, &w("11"), 16, 2000, 3).unwrap();
    assert!(c.combinatorial_sum > 0.0 && c.combinatorial_sum < 0.5, "{c:?}");
    assert!(c.agrees, "{c:?}");
}

#[test]
fn counts_match_naive_tally_linear_pair() {
    let (a, b) = (LinkFunction::linear(2, 3, 0), LinkFunction::linear(1, -1, 0));
    for word in ["1*1", "11*1", "**"] {
        let word = w(word);
        let tally = naive_tally(&a, &b, &word, 7);
        let counter = IndexCounter::new(&a, &b, &word, 7).unwrap();
        for ((px, py), want) in &tally {
            assert_eq!(counter.count(px, py, Semantics::Exact).unwrap(), *want);
        }
    }
}
