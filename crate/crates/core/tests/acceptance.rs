//! One line per acceptance criterion. Runs without the libtest harness so
//! the verdicts are always printed; exits non-zero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::collections::HashSet;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::{corpus_relation, dc_corpus, fd_corpus, od_corpus, plan, FD_ALGORITHMS, TIGHT_BUDGET};
use depdisc::cluster::{split_ranges, triangle_self_join, wire, TriangleLayout};
use depdisc::datagen::{lineitem, random_relation, wide, RandomSpec};
use depdisc::fixtures;
use depdisc::model::{AttributeSet, Dependency, DependencyKind, Direction, PredicateSpace, Relation, RowId};
use depdisc::oracle::{self, brute, brute_dcs, OracleLimits};
use depdisc::plans::{naive_intersection_of_parts, run, run_naive_intersection, Algorithm, DiscoveryResult};
use depdisc::primitives::{gen_ev_set, self_join, window_pairs, PairMode};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 worked-example goldens", criterion_1),
        ("2 oracle equivalence", criterion_2),
        ("3 communication ordering", criterion_3),
        ("4 triangle audit", criterion_4),
        ("5a two-node precision example", criterion_5a),
        ("5b lineitem precision trend", criterion_5b),
        ("6 determinism", criterion_6),
        ("7 hyfd mechanics", criterion_7),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        let verdict = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = started.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {name}: PASS ({detail}) [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail}) [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn timed<T>(limit: Duration, what: &str, f: impl FnOnce() -> T) -> Result<T, String> {
    let started = Instant::now();
    let out = f();
    let took = started.elapsed();
    ensure!(took < limit, "{what} took {took:?}, limit {limit:?}");
    Ok(out)
}

fn rendered(r: &Relation, res: &DiscoveryResult) -> Vec<String> {
    res.render(r)
}

fn attrs(r: &Relation, names: &[&str]) -> AttributeSet {
    names.iter().map(|n| r.attribute_index(n).expect("known column")).collect()
}

fn criterion_1() -> Verdict {
    let second = Duration::from_secs(1);
    let fig = fixtures::four_rows();
    let mut runs = 0;
    for alg in FD_ALGORITHMS {
        for ldp in [1, 2] {
            for budget in [0, TIGHT_BUDGET] {
                let cfg = plan(alg, ldp, DependencyKind::Fd, 3, budget, 2);
                let res = timed(second, &format!("{alg} ldp{ldp}"), || run(&fig, &cfg).unwrap())?;
                let fds = rendered(&fig, &res);
                for want in ["D -> C", "B,C -> A", "B,D -> A"] {
                    ensure!(fds.iter().any(|f| f == want), "{alg} ldp{ldp} missed {want}: {fds:?}");
                }
                ensure!(!fds.iter().any(|f| f == "C -> D"), "{alg} ldp{ldp} reported C -> D");

                let cfg = plan(alg, ldp, DependencyKind::Ucc, 3, budget, 2);
                let res = timed(second, &format!("{alg} ldp{ldp} ucc"), || run(&fig, &cfg).unwrap())?;
                let keys = rendered(&fig, &res);
                let want = ["UNIQUE(A,B)", "UNIQUE(A,D)", "UNIQUE(B,C)", "UNIQUE(B,D)"];
                ensure!(keys == want, "{alg} ldp{ldp} keys {keys:?}");
                runs += 2;
            }
        }
    }

    // the six evidence sets, rows numbered from 0
    let space = PredicateSpace::fd_inequality(&fig);
    let expected: [((RowId, RowId), &[&str]); 6] = [
        ((0, 1), &["A", "B"]),
        ((1, 2), &["A", "B", "D"]),
        ((0, 3), &["A", "B", "C", "D"]),
        ((0, 2), &["B", "D"]),
        ((1, 3), &["B", "C", "D"]),
        ((2, 3), &["A", "C", "D"]),
    ];
    for ((i, j), names) in expected {
        let got = gen_ev_set(i, j, &fig, &space).as_attribute_set();
        ensure!(got == attrs(&fig, names), "EV(t{}, t{}) = {got:?}", i + 1, j + 1);
    }
    let cfg = plan(Algorithm::FastFds, 2, DependencyKind::Fd, 3, 0, 2);
    let res = run(&fig, &cfg).unwrap();
    ensure!(res.counters["evidence_sets"] == 6, "self-join found {} evidence sets", res.counters["evidence_sets"]);

    let tax = fixtures::tax();
    for ldp in [1, 2] {
        for alg in FD_ALGORITHMS {
            let cfg = plan(alg, ldp, DependencyKind::Ucc, 3, 0, 2);
            let uccs = rendered(&tax, &timed(second, "tax ucc", || run(&tax, &cfg).unwrap())?);
            ensure!(uccs.iter().any(|u| u == "UNIQUE(AC,PH)"), "{alg} ldp{ldp} missed UNIQUE(AC,PH)");
            ensure!(!uccs.iter().any(|u| u == "UNIQUE(AC)" || u == "UNIQUE(PH)"), "AC,PH not minimal");

            let cfg = plan(alg, ldp, DependencyKind::Fd, 3, 0, 2);
            let res = timed(second, "tax fd", || run(&tax, &cfg).unwrap())?;
            let zip = attrs(&tax, &["ZIP"]);
            let st = tax.attribute_index("ST").unwrap();
            ensure!(
                res.dependencies
                    .iter()
                    .any(|d| matches!(d, Dependency::Fd { lhs, rhs } if *rhs == st && lhs.is_subset_of(zip))),
                "{alg} ldp{ldp}: ZIP -> ST not implied"
            );
        }
        let cfg = plan(Algorithm::Tane, ldp, DependencyKind::Od, 3, 0, 2);
        let ods = timed(second, "tax od", || run(&tax, &cfg).unwrap())?;
        let sal_stx = Dependency::od(attrs(&tax, &["SAL"]), tax.attribute_index("STX").unwrap(), Direction::Desc);
        ensure!(ods.dependencies.contains(&sal_stx), "tane ldp{ldp} missed SAL ~> STX [desc]");
    }
    ensure!(oracle::holds(&Dependency::parse("ZIP -> ST", tax.attribute_names()).unwrap(), &tax), "ZIP -> ST");
    let dc = Dependency::parse("!( t0.ST == t1.ST & t0.SAL < t1.SAL & t0.TR > t1.TR )", tax.attribute_names()).unwrap();
    let cfg = plan(Algorithm::DatadrivenDc, 2, DependencyKind::Dc, 3, 0, 2);
    let dcs = timed(second, "tax dc", || run(&tax, &cfg).unwrap())?;
    ensure!(dcs.dependencies.contains(&dc), "data-driven DCs miss the state/salary/rate DC");
    Ok(format!("{runs} four_rows runs, six evidence sets, tax UCC/FD/OD/DC found"))
}

fn criterion_2() -> Verdict {
    let started = Instant::now();
    let limits = OracleLimits::default();
    let mut runs = 0;
    for (i, r) in fd_corpus().iter().enumerate() {
        let k = 1 + i % 7;
        for kind in [DependencyKind::Fd, DependencyKind::Ucc] {
            let want = brute(kind, r, &limits).unwrap();
            for alg in FD_ALGORITHMS {
                for ldp in [1, 2] {
                    for budget in [0, TIGHT_BUDGET] {
                        let got = run(r, &plan(alg, ldp, kind, k, budget, 2)).unwrap();
                        ensure!(
                            got.dependencies == want,
                            "{} {alg} ldp{ldp} budget {budget} on {}: {:?} vs oracle {:?}",
                            kind.as_str(),
                            r.name(),
                            rendered(r, &got),
                            want.iter().map(|d| d.render(r.attribute_names())).collect::<Vec<_>>()
                        );
                        runs += 1;
                    }
                }
            }
        }
    }
    for (i, r) in od_corpus().iter().enumerate() {
        let want = brute(DependencyKind::Od, r, &limits).unwrap();
        for ldp in [1, 2] {
            for budget in [0, TIGHT_BUDGET] {
                let got = run(r, &plan(Algorithm::Tane, ldp, DependencyKind::Od, 1 + i % 5, budget, 2)).unwrap();
                ensure!(got.dependencies == want, "od tane ldp{ldp} budget {budget} on {}", r.name());
                runs += 1;
            }
        }
    }
    for (i, r) in dc_corpus().iter().enumerate() {
        let want = brute_dcs(r, &limits, false).unwrap();
        for budget in [0, TIGHT_BUDGET] {
            let got = run(r, &plan(Algorithm::DatadrivenDc, 2, DependencyKind::Dc, 1 + i % 5, budget, 2)).unwrap();
            // the oracle enumerates at most three predicates
            let small: Vec<Dependency> = got
                .dependencies
                .into_iter()
                .filter(|d| matches!(d, Dependency::Dc { predicates } if predicates.len() <= limits.max_dc_predicates))
                .collect();
            ensure!(small == want, "dc budget {budget} on {}", r.name());
            runs += 1;
        }
    }
    let took = started.elapsed();
    ensure!(took < Duration::from_secs(300), "took {took:?}");
    Ok(format!("{runs} plan runs equal to the oracle"))
}

fn criterion_3() -> Verdict {
    let r = random_relation(&RandomSpec::new(5000, 8, 3), 7);
    let tane = |ldp| run(&r, &plan(Algorithm::Tane, ldp, DependencyKind::Fd, 10, 0, 4)).unwrap();
    let (one, two) = (tane(1), tane(2));
    let levels = one.counters["levels"];
    ensure!(levels >= 3, "only {levels} lattice levels");
    ensure!(one.dependencies == two.dependencies, "ldp1 and ldp2 disagree");
    let (b1, b2) = (one.ledger.total_bytes(), two.ledger.total_bytes());
    ensure!((b2 as f64) < 0.5 * b1 as f64, "tane ldp2 {b2} bytes vs ldp1 {b1}");

    let w = wide(500, 20, 3);
    let fast = |ldp| run(&w, &plan(Algorithm::FastFds, ldp, DependencyKind::Fd, 10, 0, 4)).unwrap();
    let (p1, p2) = (fast(1).counters["pair_comparisons"], fast(2).counters["pair_comparisons"]);
    let all = 500 * 499 / 2;
    ensure!(p2 == all, "fastfds ldp2 compared {p2} pairs, expected {all}");
    ensure!(p1 > p2, "fastfds ldp1 compared {p1} pairs, ldp2 {p2}");
    Ok(format!(
        "tane bytes ldp1 {b1} / ldp2 {b2} over {levels} levels; fastfds pairs ldp1 {p1} / ldp2 {p2}"
    ))
}

fn criterion_4() -> Verdict {
    let mut worst: f64 = 0.0;
    for n in [50usize, 100, 500] {
        for k in [1usize, 3, 6, 10] {
            let side = TriangleLayout::new(k).unwrap().side();
            let rows: Vec<RowId> = (0..n as RowId).collect();
            let chunks: Vec<Vec<RowId>> = split_ranges(n, side).into_iter().map(|c| rows[c].to_vec()).collect();
            let (tasks, _) = triangle_self_join(&chunks, k).unwrap();
            let mut seen = HashSet::new();
            let mut total = 0usize;
            for t in &tasks {
                t.for_each_pair(&chunks, |i, j| {
                    total += 1;
                    seen.insert((i.min(j), i.max(j)));
                });
            }
            ensure!(total == n * (n - 1) / 2 && seen.len() == total, "n={n} k={k}: {total} pairs, {} distinct", seen.len());

            let r = random_relation(&RandomSpec::new(n, 4, 50), n as u64);
            let res = run(&r, &plan(Algorithm::FastFds, 2, DependencyKind::Fd, k, 0, 2)).unwrap();
            ensure!(res.counters["pair_comparisons"] == (n * (n - 1) / 2) as u64, "n={n} k={k}: ledger pair count");
            let stage = res
                .ledger
                .stages()
                .iter()
                .find(|s| s.name == "fastfds/self-join")
                .expect("self-join stage");
            let data = wire::rows(n, 4) as f64;
            let chunk = (n.div_ceil(side) as u64 * wire::row(4)) as f64;
            let bound = (2.0 / k as f64).sqrt() * data + 2.0 * chunk;
            let x = stage.x_bytes() as f64;
            ensure!(x <= bound, "n={n} k={k}: max received {x} > bound {bound}");
            worst = worst.max(x / bound);
        }
    }
    Ok(format!("every pair exactly once; max received at most {:.2} of the bound", worst))
}

fn criterion_5a() -> Verdict {
    let r = Relation::from_csv_str("split", "A,B\na1,b1\na1,b1\na1,b2\na1,b2\n", &Default::default()).unwrap();
    let parts = [r.select_rows("node1", &[0, 1]), r.select_rows("node2", &[2, 3])];
    let out = naive_intersection_of_parts(&r, &parts, DependencyKind::Fd).unwrap();
    let naive: Vec<String> = out.naive.iter().map(|d| d.render(r.attribute_names())).collect();
    ensure!(
        out.precision == 0.0,
        "precision {} at p=2, naive set {naive:?}; TRUE -> A holds on the whole relation",
        out.precision
    );
    Ok(format!("precision 0 with naive set {naive:?}"))
}

fn criterion_5b() -> Verdict {
    let started = Instant::now();
    let r = lineitem(50_000, 1);
    let p2 = run_naive_intersection(&r, 2, DependencyKind::Fd, 1).unwrap();
    let p10 = run_naive_intersection(&r, 10, DependencyKind::Fd, 1).unwrap();
    let took = started.elapsed();
    ensure!(took < Duration::from_secs(120), "took {took:?}");
    ensure!(p10.precision < 1.0, "precision at p=10 is {}", p10.precision);
    ensure!(
        p10.precision <= p2.precision || (p10.precision - p2.precision).abs() <= 0.05,
        "precision p=2 {} < p=10 {}",
        p2.precision,
        p10.precision
    );
    Ok(format!(
        "precision p=2 {:.3} ({} naive), p=10 {:.3} ({} naive), {} global",
        p2.precision,
        p2.naive.len(),
        p10.precision,
        p10.naive.len(),
        p2.global.len()
    ))
}

fn criterion_6() -> Verdict {
    let mut jobs: Vec<(Relation, Algorithm, u8, DependencyKind)> = Vec::new();
    for r in fd_corpus() {
        for kind in [DependencyKind::Fd, DependencyKind::Ucc] {
            for alg in FD_ALGORITHMS {
                for ldp in [1, 2] {
                    jobs.push((r.clone(), alg, ldp, kind));
                }
            }
        }
    }
    for r in od_corpus() {
        for ldp in [1, 2] {
            jobs.push((r.clone(), Algorithm::Tane, ldp, DependencyKind::Od));
        }
    }
    for r in dc_corpus() {
        jobs.push((r, Algorithm::DatadrivenDc, 2, DependencyKind::Dc));
    }
    let mut compared = 0;
    for (r, alg, ldp, kind) in &jobs {
        for budget in [0, TIGHT_BUDGET] {
            let mut reference: Option<String> = None;
            for k in [1, 7, 55] {
                for threads in [1, 8] {
                    let res = run(r, &plan(*alg, *ldp, *kind, k, budget, threads)).unwrap();
                    let json = serde_json::to_string(&res.render(r)).unwrap();
                    match &reference {
                        None => reference = Some(json),
                        Some(first) => ensure!(
                            *first == json,
                            "{} {alg} ldp{ldp} budget {budget} on {} differs at k={k} threads={threads}",
                            kind.as_str(),
                            r.name()
                        ),
                    }
                    compared += 1;
                }
            }
        }
    }
    Ok(format!("{compared} runs byte-identical per plan"))
}

fn criterion_7() -> Verdict {
    for len in 0..12u32 {
        let class: Vec<u32> = (0..len).map(|i| i * 3 + 1).collect();
        for w in 0..=len as usize + 1 {
            let rule = |i: usize, _: &u32, j: usize, _: &u32| j == i + w;
            let want = if w == 0 { Vec::new() } else { self_join(&class, PairMode::Unordered, Some(&rule)) };
            ensure!(window_pairs(&class, w) == want, "class of {len}, window {w}");
        }
    }
    let limits = OracleLimits::default();
    let mut runs = 0;
    for (i, r) in fd_corpus().iter().enumerate() {
        let want = brute(DependencyKind::Fd, r, &limits).unwrap();
        for k in [1, 3, 2 + i % 9] {
            for ldp in [1, 2] {
                let res = run(r, &plan(Algorithm::HyFd, ldp, DependencyKind::Fd, k, 0, 2)).unwrap();
                ensure!(!res.phase_trace.is_empty(), "empty phase trace on {}", r.name());
                ensure!(res.counters["unvalidated_candidates"] == 0, "unvalidated candidates left on {}", r.name());
                ensure!(res.dependencies == want, "hyfd ldp{ldp} k={k} wrong on {}", r.name());
                if ldp == 2 {
                    let pairs = res.counters["group_pairs"];
                    ensure!(pairs <= (k * (k + 1) / 2) as u64, "{pairs} group pairs with k={k}");
                }
                runs += 1;
            }
        }
    }
    let _ = corpus_relation;
    Ok(format!("window rule holds; {runs} hyfd runs validated and within the group-pair limit"))
}
