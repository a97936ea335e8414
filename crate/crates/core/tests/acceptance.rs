//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::{Duration, Instant};

use itertools::Itertools;

use algoprob::analysis::{
    build_sequence, by_estimated_complexity, compare_models, naturalness_test, save_sequence,
    CompareOptions, Naturalness, OrderOptions, SequenceConfig, QUASI_TOLERANCE,
};
use algoprob::rankstats::{
    exact_count, significance, spearman, Mode, RankVector, SignificanceOptions, Tail,
    HIGHLY_SIGNIFICANT, SIGNIFICANT,
};
use algoprob::rulespace::{enumerate_eca, enumerate_tm};
use algoprob::sampling::{sample_outputs, ExperimentSpec, Model};
use algoprob::symmetry::{canonical, class_count};
use algoprob::{BitString, DistributionSequence64};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    o.detail = format!("{} [{:.2?}]", o.detail, elapsed);
    if let Some(limit) = limit {
        if elapsed > limit {
            o.passed = false;
            o.detail = format!("{} exceeds {:?}", o.detail, limit);
        }
    }
    o
}

fn enumeration() -> Outcome {
    timed(Some(Duration::from_secs(1)), || {
        let tm: HashSet<Vec<u64>> = enumerate_tm(2, 2)
            .unwrap()
            .map(|p| p.table().iter().map(|a| a.encode(2)).collect())
            .collect();
        let eca: HashSet<[u8; 8]> = enumerate_eca().map(|r| r.table()).collect();
        outcome(
            tm.len() == 4096 && eca.len() == 256,
            format!(
                "{} distinct TM(2,2) programs, {} distinct ECA rules",
                tm.len(),
                eca.len()
            ),
        )
    })
}

/// Orbit partition of {0,1}^n built from plain byte vectors.
fn brute_force_classes(n: usize) -> Vec<BTreeSet<Vec<u8>>> {
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut classes = Vec::new();
    for word in (0..n).map(|_| [0u8, 1]).multi_cartesian_product() {
        if seen.contains(&word) {
            continue;
        }
        let rev: Vec<u8> = word.iter().rev().copied().collect();
        let comp: Vec<u8> = word.iter().map(|b| 1 - b).collect();
        let revcomp: Vec<u8> = rev.iter().map(|b| 1 - b).collect();
        let orbit: BTreeSet<Vec<u8>> = [word, rev, comp, revcomp].into_iter().collect();
        seen.extend(orbit.iter().cloned());
        classes.push(orbit);
    }
    classes
}

fn burnside() -> Outcome {
    timed(Some(Duration::from_secs(30)), || {
        let mut mismatches = Vec::new();
        for n in 1..=16usize {
            let brute = brute_force_classes(n).len() as u128;
            let formula = class_count(n as u32).unwrap();
            if brute != formula {
                mismatches.push(format!("n={n}: oracle {brute}, formula {formula}"));
            }
        }
        let expected: BTreeSet<String> = ["0000", "0001", "0010", "0011"].map(String::from).into();
        let computed: BTreeSet<String> = BitString::all(4)
            .map(|s| canonical(s).to_string())
            .collect();
        let listed_present = expected.is_subset(&computed);
        outcome(
            mismatches.is_empty() && listed_present && computed.len() == 6,
            if mismatches.is_empty() {
                format!("class counts match for n=1..16; n=4 classes {computed:?}")
            } else {
                mismatches.join("; ")
            },
        )
    })
}

/// Counts permutations at least as extreme as `s` by full enumeration.
fn oracle_extreme(m: usize, s: i64, tail: Tail) -> u64 {
    let scale = (m * (m * m - 1)) as i64;
    (0..m)
        .permutations(m)
        .filter(|p| {
            let t: i64 = p
                .iter()
                .enumerate()
                .map(|(i, &j)| (i as i64 - j as i64).pow(2))
                .sum();
            match tail {
                Tail::OneSided => t <= s,
                Tail::TwoSided => (scale - 6 * t).abs() >= (scale - 6 * s).abs(),
            }
        })
        .count() as u64
}

fn statistics() -> Outcome {
    timed(None, || {
        let mut failures = Vec::new();
        let rho = spearman(
            &RankVector::new(vec![1.0, 2.0, 3.0, 4.0]),
            &RankVector::new(vec![1.0, 3.0, 2.0, 4.0]),
        )
        .unwrap();
        if rho != 0.8 {
            failures.push(format!("spearman golden value {rho}"));
        }
        let p2 = exact_count(1.0, 2, Tail::OneSided).unwrap();
        if p2.ratio() != num_rational::Ratio::new(1, 2) {
            failures.push(format!("m=2 p = {}", p2.ratio()));
        }
        let mut checked = 0;
        for m in 2..=8usize {
            let scale = (m * (m * m - 1)) as i64;
            let attainable: BTreeSet<i64> = (0..m)
                .permutations(m)
                .map(|p| {
                    p.iter()
                        .enumerate()
                        .map(|(i, &j)| (i as i64 - j as i64).pow(2))
                        .sum()
                })
                .collect();
            for &s in &attainable {
                let rho = 1.0 - 6.0 * s as f64 / scale as f64;
                for tail in [Tail::OneSided, Tail::TwoSided] {
                    let got = exact_count(rho, m, tail).unwrap().extreme;
                    let want = oracle_extreme(m, s, tail);
                    checked += 1;
                    if got != want {
                        failures.push(format!("m={m} S={s} {tail}: {got} vs oracle {want}"));
                    }
                }
            }
        }
        let mut worst: f64 = 0.0;
        for rho in [0.3, 0.5, 0.7, 0.8] {
            let exact = exact_count(rho, 8, Tail::OneSided).unwrap();
            let p_exact = exact.extreme as f64 / exact.permutations as f64;
            for seed in 0..20 {
                let options = SignificanceOptions {
                    mode: Mode::MonteCarlo,
                    seed,
                    ..Default::default()
                };
                let p: f64 = significance(rho, 8, &options).unwrap().p_value;
                worst = worst.max((p - p_exact).abs());
            }
        }
        if worst > 0.02 {
            failures.push(format!("Monte-Carlo deviation {worst}"));
        }
        outcome(
            failures.is_empty(),
            if failures.is_empty() {
                format!(
                    "rho=0.8, m=2 p=1/2, {checked} exact counts match the oracle, \
                     Monte-Carlo max |dp|={worst:.4} over 20 seeds"
                )
            } else {
                failures.join("; ")
            },
        )
    })
}

fn background_symmetry() -> Outcome {
    timed(Some(Duration::from_secs(60)), || {
        let spec = ExperimentSpec::new(Model::TM22, 3);
        let s = sample_outputs(&spec, 0).unwrap();
        let [zero, one] = &s.by_background;
        outcome(
            zero.complemented() == *one,
            format!(
                "{} strings on background 0, {} on background 1",
                zero.len(),
                one.len()
            ),
        )
    })
}

fn determinism() -> Outcome {
    timed(None, || {
        let mut identical = true;
        let mut files = 0;
        for model in [Model::TM22, Model::Eca] {
            let mut dirs = Vec::new();
            for workers in [1, 8] {
                let dir = tempfile::tempdir().unwrap();
                let (seq, raw) =
                    build_sequence::<f64>(&SequenceConfig::new(model, 4, 4), workers).unwrap();
                save_sequence(dir.path(), &seq, &raw).unwrap();
                dirs.push(dir);
            }
            for name in ["raw_n04.json", "reduced_n04.json"] {
                let a = std::fs::read(dirs[0].path().join(name)).unwrap();
                let b = std::fs::read(dirs[1].path().join(name)).unwrap();
                identical &= a == b;
                files += 1;
            }
        }
        outcome(
            identical,
            format!("{files} files compared between 1 and 8 workers"),
        )
    })
}

struct Replication {
    tm: DistributionSequence64,
    eca: DistributionSequence64,
}

fn replicate() -> Replication {
    let tm = build_sequence::<f64>(&SequenceConfig::new(Model::TM22, 2, 12), 0)
        .unwrap()
        .0;
    let eca = build_sequence::<f64>(&SequenceConfig::new(Model::Eca, 2, 12), 0)
        .unwrap()
        .0;
    Replication { tm, eca }
}

fn main_result(r: &Replication) -> Outcome {
    let report = compare_models(&r.tm, &r.eca, &CompareOptions::default());
    let mut failures = Vec::new();
    let mut weak = 0;
    let mut rows = Vec::new();
    for row in &report.rows {
        let (rho, p) = match (row.spearman, row.significance) {
            (Some(rho), Some(s)) => (rho, s.p_value),
            _ => (f64::NAN, f64::NAN),
        };
        rows.push(format!(
            "n={} m={} rho={:.3} p={:.4}",
            row.n, row.elements, rho, p
        ));
        if row.n >= 6 {
            if !(rho > 0.0 && p <= SIGNIFICANT) {
                failures.push(format!("n={} not significant", row.n));
            }
            if p > HIGHLY_SIGNIFICANT || p.is_nan() {
                weak += 1;
            }
        }
    }
    let counts: Vec<usize> = report.rows.iter().take(3).map(|r| r.elements).collect();
    if counts != [2, 3, 6] {
        failures.push(format!("element counts {counts:?}"));
    }
    if report.rows.len() != 11 {
        failures.push(format!("{} rows", report.rows.len()));
    }
    if weak > QUASI_TOLERANCE {
        failures.push(format!("{weak} rows above {HIGHLY_SIGNIFICANT}"));
    }
    let from_six = |seq: &DistributionSequence64| DistributionSequence64 {
        model: seq.model,
        per_n: seq.per_n.range(6..).map(|(n, d)| (*n, d.clone())).collect(),
    };
    let verdict = naturalness_test(
        &from_six(&r.eca),
        &from_six(&r.tm),
        &OrderOptions::default(),
    )
    .verdict;
    if !matches!(verdict, Naturalness::Natural | Naturalness::Quasi) {
        failures.push(format!("naturalness verdict {verdict}"));
    }
    let summary = format!("{}; naturalness over n=6..12 {verdict}", rows.join(", "));
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            summary
        } else {
            format!("{} | {}", failures.join("; "), summary)
        },
    )
}

fn frequency_complexity(r: &Replication) -> Outcome {
    let d = r.tm.get(6).unwrap();
    let ranked = d.ranked();
    let top: Vec<String> = ranked
        .iter()
        .take(3)
        .map(|x| format!("{}:{:.4}", x.string, x.probability))
        .collect();
    outcome(
        ranked[0].string == "000000".parse().unwrap(),
        format!("top classes {}", top.join(" ")),
    )
}

fn k_ordering(r: &Replication) -> Outcome {
    let mut checked = 0;
    let mut ok = true;
    for d in r.tm.per_n.values().chain(r.eca.per_n.values()) {
        let by_k: Vec<BitString> = by_estimated_complexity(d)
            .into_iter()
            .map(|x| x.0)
            .collect();
        let ranked: Vec<BitString> = d.ranked().into_iter().map(|x| x.string).collect();
        ok &= by_k == ranked;
        checked += 1;
    }
    outcome(ok, format!("{checked} reduced distributions"))
}

fn main() {
    let mut results: BTreeMap<usize, (&str, Outcome)> = BTreeMap::new();
    let mut record = |name: &'static str, o: Outcome| {
        println!(
            "{} {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        results.insert(results.len(), (name, o));
    };
    record("enumeration exactness", enumeration());
    record("burnside oracle equivalence", burnside());
    record("statistics golden values", statistics());
    record("background symmetry", background_symmetry());
    record("determinism across workers", determinism());
    let start = Instant::now();
    let r = replicate();
    let elapsed = start.elapsed();
    let mut main = main_result(&r);
    main.detail = format!("{} [{:.2?}]", main.detail, elapsed);
    if elapsed > Duration::from_secs(600) {
        main.passed = false;
    }
    record("TM(2,2) vs CA(1) replication", main);
    record("frequency-complexity consistency", frequency_complexity(&r));
    record("k-estimate ordering", k_ordering(&r));
    let failed = results.values().filter(|(_, o)| !o.passed).count();
    println!("{} criteria, {failed} failed", results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
