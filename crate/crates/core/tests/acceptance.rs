//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{brute_circular_moment, naive_tally, p, w};
use schurprod::counting::{
    compatibility_report, count_constrained, joint_circularity_report, moment_reconstruction_check,
    ConstraintSystem, IndexCounter, Semantics,
};
use schurprod::ensemble::{EntryDistribution, ProductEnsemble};
use schurprod::linkfn::{delta, joint_injectivity, linear_admissible, regularity_report, Axis, DeltaVerdict};
use schurprod::moments::{circular_star_moment, empirical_star_moments, symmetric_moments};
use schurprod::partitions::{catalan, enumerate_set_partitions, Partition};
use schurprod::spectrum::sample_spectrum;
use schurprod::{LinkFunction, Word};

use EntryDistribution::{Rademacher, StandardGaussian};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn linear_pair() -> (LinkFunction, LinkFunction) {
    (LinkFunction::linear(2, 3, 0), LinkFunction::linear(1, -1, 0))
}

fn toeplitz_hankel() -> (LinkFunction, LinkFunction) {
    (LinkFunction::toeplitz(), LinkFunction::hankel())
}

fn poly_pair() -> (LinkFunction, LinkFunction) {
    (LinkFunction::poly("i^2+j").unwrap(), LinkFunction::poly("i+j^2").unwrap())
}

fn ensemble(pair: (LinkFunction, LinkFunction), d: EntryDistribution) -> ProductEnsemble {
    ProductEnsemble::new(pair.0, pair.1, d, d)
}

fn criterion_1() -> Outcome {
    let mut checked = 0;
    for len in 1..=8 {
        for word in Word::all_of_length(len) {
            let got = circular_star_moment(&word).unwrap();
            let want = brute_circular_moment(&word);
            if got != want {
                return outcome(false, format!("word {word}: {got} != brute force {want}"));
            }
            checked += 1;
        }
    }
    for k in 1..=6 {
        let got = circular_star_moment(&Word::alternating(k)).unwrap();
        if got != catalan(k as u32) {
            return outcome(false, format!("(1*)^{k}: {got} != C_{k} = {}", catalan(k as u32)));
        }
    }
    outcome(true, format!("{checked} words match brute-force NC2; (1*)^k = C_k for k <= 6"))
}

fn oracle_partitions(k: usize) -> Vec<Partition> {
    enumerate_set_partitions(k).unwrap().into_iter().filter(|q| q.is_pair() || q.has_singleton()).collect()
}

fn criterion_2() -> Outcome {
    let (lx, ly) = linear_pair();
    let adm = linear_admissible(2, 3, 1, -1, 0, 0);
    if !adm.admissible {
        return outcome(false, format!("linear pair (2,3,1,-1) not admissible: {:?}", adm.violations));
    }
    let mut compared = 0u64;
    for (name, (a, b)) in [("toeplitz/hankel", toeplitz_hankel()), ("linear(2,3,1,-1)", (lx, ly))] {
        for k in 1..=4 {
            let parts = oracle_partitions(k);
            for word in Word::all_of_length(k) {
                for n in [1usize, 2, 3, 5, 8, 12] {
                    let tally = naive_tally(&a, &b, &word, n);
                    let counter = IndexCounter::new(&a, &b, &word, n).unwrap();
                    for px in &parts {
                        for py in &parts {
                            let got = counter.count(px, py, Semantics::Exact).unwrap();
                            let want = tally.get(&(px.clone(), py.clone())).copied().unwrap_or(0);
                            if got != want {
                                return outcome(false, format!("{name} {word} {px} {py} n={n}: {got} != {want}"));
                            }
                            compared += 1;
                        }
                    }
                }
            }
        }
    }
    let cs = ConstraintSystem::new(
        LinkFunction::toeplitz(),
        LinkFunction::hankel(),
        w("1*1*"),
        p("1,2/3,4"),
        p("1,2/3,4"),
        12,
    )
    .unwrap();
    let direct = count_constrained(&cs).unwrap();
    let naive = naive_tally(&cs.lx, &cs.ly, &cs.word, 12)[&(cs.pi_x.clone(), cs.pi_y.clone())];
    outcome(direct == naive, format!("{compared} (pi, pi', word, n) counts equal naive enumeration; linear pair admissible"))
}

fn criterion_3() -> Outcome {
    let mut checked = 0;
    for (name, (a, b)) in [("toeplitz/hankel", toeplitz_hankel()), ("linear(2,3,1,-1)", linear_pair())] {
        for k in 1..=4 {
            let parts = enumerate_set_partitions(k).unwrap();
            for word in Word::all_of_length(k) {
                for n in [1usize, 2, 4, 7, 10] {
                    let counter = IndexCounter::new(&a, &b, &word, n).unwrap();
                    let mut total = 0u128;
                    for px in &parts {
                        for py in &parts {
                            total += counter.count(px, py, Semantics::Exact).unwrap();
                        }
                    }
                    if total != (n as u128).pow(k as u32) {
                        return outcome(false, format!("{name} {word} n={n}: sum {total} != n^k"));
                    }
                    checked += 1;
                }
            }
        }
    }
    outcome(true, format!("sum of class counts = n^k in {checked} cases"))
}

fn criterion_4() -> Outcome {
    let (lx, ly) = toeplitz_hankel();
    let grid = [16, 32, 64];
    let mut notes = Vec::new();
    for half in [2, 3] {
        let word = Word::alternating(half);
        let report = joint_circularity_report(&lx, &ly, &word, &grid).unwrap();
        for s in &report.series {
            if s.noncrossing {
                if !s.closure_exact {
                    return outcome(false, format!("{word} NC row {} closure ratio is not exactly 1", s.pi_x));
                }
                if !s.class_gap_fit.decays {
                    return outcome(false, format!("{word} NC row {}: exact-class ratio does not approach 1", s.pi_x));
                }
            } else if !s.closure_fit.decays {
                return outcome(false, format!("{word} crossing row {} slope {:?}", s.pi_x, s.closure_fit.slope));
            }
        }
        let worst = report
            .series
            .iter()
            .filter(|s| !s.noncrossing)
            .filter_map(|s| s.closure_fit.slope)
            .fold(f64::NEG_INFINITY, f64::max);
        notes.push(format!("2k={}: {} rows, worst crossing slope {worst:.3}", 2 * half, report.series.len()));
    }
    outcome(true, format!("NC ratios exactly 1; {}", notes.join("; ")))
}

fn criterion_5() -> Outcome {
    let (lx, ly) = toeplitz_hankel();
    let report = compatibility_report(&lx, &ly, &w("1*1*"), &[16, 32, 64]).unwrap();
    if report.series.len() != 6 {
        return outcome(false, format!("expected 6 mismatched pairs, got {}", report.series.len()));
    }
    if let Some(s) = report.series.iter().find(|s| !s.closure_fit.decays) {
        return outcome(false, format!("pair ({}, {}) slope {:?}", s.pi_x, s.pi_y, s.closure_fit.slope));
    }
    let slopes: Vec<String> = report
        .series
        .iter()
        .map(|s| s.closure_fit.slope.map_or("zero".to_string(), |x| format!("{x:.2}")))
        .collect();
    outcome(true, format!("all 6 pairs decay (slopes: {})", slopes.join(", ")))
}

fn criterion_6() -> Outcome {
    let mut notes = Vec::new();
    for d in [StandardGaussian, Rademacher] {
        let e = ensemble(toeplitz_hankel(), d);
        for word in ["1*", "1*1*", "11**"] {
            let c = moment_reconstruction_check(&e, &w(word), 32, 2000, 6).unwrap();
            if !c.agrees {
                return outcome(
                    false,
                    format!("{d} {word}: sum {} vs MC {} ± {}", c.combinatorial_sum, c.monte_carlo.mean, c.monte_carlo.std_error),
                );
            }
            if d == Rademacher && word == "1*" && (c.combinatorial_sum != 1.0 || c.monte_carlo.mean != 1.0) {
                return outcome(false, format!("rademacher 1*: {} and {} are not exactly 1", c.combinatorial_sum, c.monte_carlo.mean));
            }
            notes.push(format!("{d} {word}: {:.4}/{:.4}", c.combinatorial_sum, c.monte_carlo.mean));
        }
    }
    outcome(true, notes.join(", "))
}

fn criterion_7() -> Outcome {
    let words: Vec<Word> = (1..=6).flat_map(Word::all_of_length).collect();
    let mut worst = 0.0f64;
    for d in [StandardGaussian, Rademacher] {
        let e = ensemble(toeplitz_hankel(), d);
        let estimates = empirical_star_moments(&e, 1000, &words, 20, 7).unwrap();
        for est in &estimates {
            let target = circular_star_moment(&est.word).unwrap() as f64;
            let ok = if est.word.len() % 2 == 1 { (est.mean - target).abs() <= 0.1 } else { est.within(target, 0.15) };
            if !ok {
                return outcome(false, format!("{d} {}: mean {} ± {} vs {target}", est.word, est.mean, est.std_error));
            }
            worst = worst.max((est.mean - target).abs());
        }
    }
    outcome(true, format!("{} words x 2 laws within tolerance; max |mean - target| = {worst:.3}", words.len()))
}

fn criterion_8() -> Outcome {
    let mut notes = Vec::new();
    for d in [StandardGaussian, Rademacher] {
        let e = ensemble(toeplitz_hankel(), d);
        let est = symmetric_moments(&e, 1000, &[2, 4, 6], 20, 8).unwrap();
        for (s, (target, tol)) in est.iter().zip([(1.0, 0.1), (2.0, 0.15), (5.0, 0.4)]) {
            if (s.mean - target).abs() > tol {
                return outcome(false, format!("{d} k={}: {} vs {target} (tol {tol})", s.k, s.mean));
            }
        }
        notes.push(format!("{d}: {:.3}, {:.3}, {:.3}", est[0].mean, est[1].mean, est[2].mean));
    }
    outcome(true, notes.join("; "))
}

fn criterion_9() -> Outcome {
    let grid = [16, 32, 64];
    let bounded = |l: &LinkFunction, want: usize| grid.iter().all(|&n| delta(l, n) == want);
    if !bounded(&LinkFunction::toeplitz(), 1) || !bounded(&LinkFunction::hankel(), 1) {
        return outcome(false, "Toeplitz/Hankel Δ != 1");
    }
    if !bounded(&LinkFunction::sym_toeplitz(), 2) {
        return outcome(false, "symmetric Toeplitz Δ != 2");
    }
    let proj = regularity_report(&LinkFunction::projection(Axis::Column), &grid).unwrap();
    if proj.verdicts[0] != DeltaVerdict::GrowsWithN {
        return outcome(false, "proj:j not flagged");
    }
    let (a, b) = (LinkFunction::linear(1, -1, 0), LinkFunction::hankel());
    let (c, d) = poly_pair();
    if !joint_injectivity(&a, &b, 64).injective || !joint_injectivity(&c, &d, 64).injective {
        return outcome(false, "an injective pair was reported non-injective");
    }
    let bad = joint_injectivity(&LinkFunction::sym_toeplitz(), &LinkFunction::hankel(), 64);
    match bad.counterexample {
        Some((x, y)) if !bad.injective => outcome(true, format!("Δ = 1, 1, 2; proj:j GrowsWithN; (|i-j|, i+j) collides at {x:?}, {y:?}")),
        _ => outcome(false, "(|i-j|, i+j) not reported with a counterexample"),
    }
}

fn criterion_10() -> Outcome {
    let mut notes = Vec::new();
    for (label, pair, n) in [("toeplitz/hankel", toeplitz_hankel(), 2000), ("i^2+j/i+j^2", poly_pair(), 1000)] {
        let s = sample_spectrum(&ensemble(pair, StandardGaussian), n, 10, false).unwrap();
        let ok = (0.4..=0.6).contains(&s.mean_abs_sq) && s.disk_fraction_1_1 >= 0.95 && s.radial_ks <= 0.1;
        let line = format!(
            "{label} n={n}: mean|λ|²={:.3} disk(1.1)={:.3} ks={:.3}",
            s.mean_abs_sq, s.disk_fraction_1_1, s.radial_ks
        );
        if !ok {
            return outcome(false, line);
        }
        notes.push(line);
    }
    let bad = (LinkFunction::hankel(), LinkFunction::projection(Axis::Column));
    let reg = schurprod::linkfn::pair_regularity(&bad.0, &bad.1, &[16, 32, 64]).unwrap();
    if reg.all_bounded() {
        return outcome(false, "(i+j, j) not flagged as violating bounded Δ");
    }
    let mut ks = Vec::new();
    for d in [StandardGaussian, Rademacher] {
        match sample_spectrum(&ensemble(bad.clone(), d), 1000, 10, false) {
            Ok(s) if s.n == 1000 => ks.push(s.radial_ks),
            _ => return outcome(false, format!("no spectrum for (i+j, j) with {d}")),
        }
    }
    notes.push(format!("(i+j, j) flagged; radial_ks gaussian {:.3}, rademacher {:.3} (diagnostic only)", ks[0], ks[1]));
    outcome(true, notes.join("; "))
}

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "circular *-moment oracle", Duration::from_secs(1), criterion_1),
        (2, "counting oracle equivalence", Duration::from_secs(120), criterion_2),
        (3, "index-space partition identity", Duration::from_secs(60), criterion_3),
        (4, "joint circularity", Duration::from_secs(120), criterion_4),
        (5, "compatibility", Duration::from_secs(60), criterion_5),
        (6, "finite-n moment reconstruction", Duration::from_secs(300), criterion_6),
        (7, "*-convergence to circular", Duration::from_secs(600), criterion_7),
        (8, "semicircle for the hermitized product", Duration::from_secs(300), criterion_8),
        (9, "regularity gates", Duration::from_secs(10), criterion_9),
        (10, "spectral diagnostics", Duration::from_secs(900), criterion_10),
    ];
    let filter: Option<u32> = std::env::args().nth(1).and_then(|a| a.parse().ok());
    let mut failures = 0;
    for (id, name, limit, run) in criteria {
        if filter.is_some_and(|f| f != id) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let pass = result.pass && in_time;
        failures += usize::from(!pass);
        println!(
            "criterion {id:>2} [{}] {name} ({:.2}s, limit {}s): {}{}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            limit.as_secs(),
            result.detail,
            if in_time { "" } else { "; over time limit" }
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failures} criterion(s) failed");
        ExitCode::FAILURE
    }
}
