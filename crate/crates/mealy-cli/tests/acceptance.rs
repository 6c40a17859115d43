//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its runtime. Criteria marked with runtime bounds assert them.
//!
//! Library-level math runs against mealy-core directly; interface-level
//! checks drive the `mealy` binary (which exercises the HTTP service and
//! client underneath).

use std::process::{Command, Output};
use std::time::Instant;

use mealy_core::analysis::{
    self, exponential_growth_certificate, find_relations, finiteness_probe, freeness_check,
    growth_function, lemma1_verify, CertificateVerdict, FinitenessVerdict, FreenessVerdict,
};
use mealy_core::builtins::builtin;
use mealy_core::census::{enumerate_machines, CensusFilter, DEFAULT_CENSUS_CAP};
use mealy_core::machine::{LetterWord, MealyMachine, StateWord};
use mealy_core::minimize::{minimize, nerode_partition, same_action};
use mealy_core::power::{
    explicit_power, level_transitive_up_to, minimized_power_sizes, PowerSequence,
    DEFAULT_ORBIT_BUDGET, DEFAULT_SIZE_LIMIT,
};

const SCAN_BUDGET: u64 = analysis::DEFAULT_SCAN_BUDGET;

fn mealy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mealy"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn mealy_json(args: &[&str]) -> serde_json::Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = mealy(&full);
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON from {args:?}: {e}\nstderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn census16() -> Vec<MealyMachine> {
    enumerate_machines(2, 2, CensusFilter::default(), DEFAULT_CENSUS_CAP).unwrap()
}

fn letter_words(m: &MealyMachine, max_len: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    let mut layer: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for i in 0..m.n_letters() as u32 {
                let mut w2 = w.clone();
                w2.push(i);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

#[test]
fn criterion_1_fig1_regression() {
    let start = Instant::now();

    let info = mealy_json(&["info", "builtin:fig1"]);
    assert_eq!(info["invertible"], true);
    assert_eq!(info["reversible"], true);
    assert_eq!(info["connected"], true);
    assert_eq!(info["msize"], 2);

    let relations = mealy_json(&["relations", "--max-len", "1", "builtin:fig1"]);
    let pairs: Vec<(String, String)> = relations["relations"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            (
                r["u"].as_str().unwrap().to_string(),
                r["v"].as_str().unwrap().to_string(),
            )
        })
        .collect();
    assert_eq!(
        pairs,
        vec![("x".to_string(), "y".to_string()), ("z".to_string(), "t".to_string())]
    );

    let freeness = mealy(&["freeness", "--depth", "3", "builtin:fig1"]);
    assert_eq!(freeness.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&freeness.stdout).contains("NOT-FREE"));

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "criterion 1 took {elapsed:?}, bound is 1 s"
    );
    println!("ACCEPTANCE 1 (fig1 regression): PASS in {elapsed:?}");
}

#[test]
fn criterion_2_certificate_pipeline_on_fig1() {
    let start = Instant::now();

    let report = mealy_json(&["certify", "--depth", "8", "builtin:fig1"]);
    assert_eq!(report["verdict"], "EXPONENTIAL-CERTIFIED");
    let sizes: Vec<u64> = report["sizes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(sizes[0], 2, "s_1 must be 2");
    assert_eq!(sizes.len(), 8);
    for (i, &s) in sizes.iter().enumerate() {
        assert!(
            s >= 1 << (i + 1),
            "s_{} = {s} is below 2^{}",
            i + 1,
            i + 1
        );
    }
    for pair in report["ratios"].as_array().unwrap() {
        let num = pair[0].as_u64().unwrap();
        let den = pair[1].as_u64().unwrap();
        assert_eq!(den, 1, "ratio must be an exact integer");
        assert!(num >= 2, "ratio must be at least 2");
    }

    // the same pipeline through the library agrees
    let lib = exponential_growth_certificate(
        &builtin("fig1").unwrap(),
        8,
        DEFAULT_SIZE_LIMIT,
        DEFAULT_ORBIT_BUDGET,
    )
    .unwrap();
    assert_eq!(lib.verdict, CertificateVerdict::ExponentialCertified);
    assert_eq!(lib.sizes, sizes);

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "criterion 2 took {elapsed:?}, bound is 30 s"
    );
    println!("ACCEPTANCE 2 (certificate pipeline on fig1): PASS in {elapsed:?}");
}

#[test]
fn criterion_3_level_transitivity_evidence() {
    let start = Instant::now();

    let out = mealy(&["transitive", "--depth", "10", "--dual", "builtin:fig1"]);
    assert_eq!(out.status.code(), Some(0));
    let report = mealy_json(&["transitive", "--depth", "10", "--dual", "builtin:fig1"]);
    assert_eq!(report["transitive_up_to"], 10);
    assert_eq!(report["failure_level"], serde_json::Value::Null);

    // binary-alphabet orbit search at depth 16: 2^16 = 65,536 words
    let bfs_start = Instant::now();
    let deep = level_transitive_up_to(&builtin("fig1").unwrap(), 16, DEFAULT_ORBIT_BUDGET).unwrap();
    let bfs_elapsed = bfs_start.elapsed();
    assert_eq!(deep.levels_checked, 16);
    assert!(
        bfs_elapsed.as_secs_f64() < 5.0,
        "depth-16 orbit search took {bfs_elapsed:?}, bound is 5 s"
    );

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "criterion 3 took {elapsed:?}, bound is 5 s"
    );
    println!(
        "ACCEPTANCE 3 (level-transitivity evidence): PASS in {elapsed:?} (depth-16 search {bfs_elapsed:?})"
    );
}

/// Independent oracle: table-filling refinement. Marks pairs with
/// different output rows, then propagates until stable; the class count
/// is the number of unmarked-equivalence blocks.
fn table_filling_class_count(m: &MealyMachine) -> u64 {
    let n = m.n_states();
    let mut marked = vec![false; n * n];
    for x in 0..n {
        for y in 0..n {
            if m.output_row(x as u32) != m.output_row(y as u32) {
                marked[x * n + y] = true;
            }
        }
    }
    loop {
        let mut changed = false;
        for x in 0..n {
            for y in 0..n {
                if !marked[x * n + y] {
                    for i in 0..m.n_letters() as u32 {
                        let nx = m.transition(x as u32, i) as usize;
                        let ny = m.transition(y as u32, i) as usize;
                        if marked[nx * n + ny] {
                            marked[x * n + y] = true;
                            changed = true;
                            break;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut assigned = vec![false; n];
    let mut count = 0u64;
    for x in 0..n {
        if !assigned[x] {
            count += 1;
            for y in x..n {
                if !marked[x * n + y] {
                    assigned[y] = true;
                }
            }
        }
    }
    count
}

#[test]
fn criterion_4_oracle_equivalence_of_power_sizes() {
    let start = Instant::now();
    let mut machines = vec![("fig1".to_string(), builtin("fig1").unwrap())];
    for (i, m) in census16().into_iter().enumerate() {
        machines.push((format!("census2x2[{i}]"), m));
    }
    for (name, m) in &machines {
        let seq = PowerSequence::build(m, 4, DEFAULT_SIZE_LIMIT).unwrap();
        let sizes = seq.sizes();
        for k in 1..=4usize {
            let power = explicit_power(m, k, DEFAULT_SIZE_LIMIT).unwrap();
            let oracle = table_filling_class_count(&power);
            assert_eq!(
                sizes[k - 1], oracle,
                "{name}: iterated s_{k} disagrees with the explicit refinement"
            );
        }
    }
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 4 (oracle equivalence, {} machines, n <= 4): PASS in {elapsed:?}",
        machines.len()
    );
}

#[test]
fn criterion_5_lemma1_verifier_on_fig1() {
    let start = Instant::now();
    let fig1 = builtin("fig1").unwrap();
    for n in 1..=3usize {
        let report = lemma1_verify(&fig1, n, DEFAULT_SIZE_LIMIT, DEFAULT_ORBIT_BUDGET).unwrap();
        assert!(
            report.checks.all_ok(),
            "n={n}: some check failed: {:?}",
            report.checks
        );
        // both decompositions reconstruct every class with the index
        // maps well defined and equal side cardinalities
        assert_eq!(report.decompositions.len() as u64, report.size_n1);
        // #Q_D = #Q'_D = s_{n+1}/s_n (the two ratio laws coincide on fig1)
        assert_eq!(report.msize_ratio, (2, 1));
        assert_eq!(report.class_cardinality_ratio, 2);
        for d in &report.decompositions {
            assert_eq!(d.right.len(), 2, "n={n} class {}", d.class);
            assert_eq!(d.left.len(), 2, "n={n} class {}", d.class);
        }
        // sizes differ at every n here, and no decomposition uses all of Q
        assert_ne!(report.size_n, report.size_n1);
    }
    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs_f64() < 60.0,
        "criterion 5 took {elapsed:?}, bound is 60 s"
    );
    println!("ACCEPTANCE 5 (two-sided decomposition verifier, n = 1..3): PASS in {elapsed:?}");
}

#[test]
fn criterion_6_freeness_sweep_over_the_census() {
    let start = Instant::now();
    let machines = census16();
    assert_eq!(machines.len(), 16);
    let mut qualifying = 0;
    for (i, m) in machines.iter().enumerate() {
        let trans = level_transitive_up_to(&m.dual(), 8, DEFAULT_ORBIT_BUDGET).unwrap();
        if trans.transitive_up_to < 8 {
            continue;
        }
        qualifying += 1;
        let free = freeness_check(m, 12, DEFAULT_SIZE_LIMIT, SCAN_BUDGET).unwrap();
        assert_eq!(
            free.verdict,
            FreenessVerdict::FreeToDepth,
            "census2x2[{i}] has a transitive dual but is not free to depth 12: {:?}",
            free.witness
        );
        assert_eq!(free.depth_completed, 12);
        let growth = growth_function(m, 12, DEFAULT_SIZE_LIMIT, false).unwrap();
        for (k, &g) in growth.gamma.iter().enumerate() {
            let expected = (1u64 << (k + 2)) - 2; // 2^{n+1} - 2 at n = k+1
            assert_eq!(
                g, expected,
                "census2x2[{i}]: gamma({}) = {g}, expected {expected}",
                k + 1
            );
        }
    }
    assert!(
        qualifying > 0,
        "no census machine has a dual transitive to depth 8; the sweep is vacuous"
    );
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 6 (census freeness sweep, {qualifying}/16 qualifying): PASS in {elapsed:?}"
    );
}

#[test]
fn criterion_7_invariant_suites() {
    let start = Instant::now();
    let mut corpus: Vec<(String, MealyMachine)> = Vec::new();
    for name in ["fig1", "adding", "identity1x2", "identity2x2"] {
        corpus.push((name.to_string(), builtin(name).unwrap()));
    }
    corpus.push(("dual(fig1)".into(), builtin("fig1").unwrap().dual()));
    for (i, m) in census16().into_iter().enumerate() {
        corpus.push((format!("census2x2[{i}]"), m));
    }

    for (name, m) in &corpus {
        // dual involution
        assert_eq!(m.dual().dual(), *m, "{name}: dual involution");

        // inverse round-trip on all words of length <= 6
        if m.is_invertible() {
            let inv = m.inverse().unwrap();
            for x in 0..m.n_states() as u32 {
                for s in letter_words(m, 6) {
                    assert_eq!(inv.apply_state(x, &m.apply_state(x, &s)), s, "{name}");
                    assert_eq!(m.apply_state(x, &inv.apply_state(x, &s)), s, "{name}");
                }
            }
        }

        // composition homomorphism for |u|,|v| <= 2 on |s| <= 6
        let mut words: Vec<Vec<u32>> = Vec::new();
        for a in 0..m.n_states() as u32 {
            words.push(vec![a]);
            for b in 0..m.n_states() as u32 {
                words.push(vec![a, b]);
            }
        }
        for u in &words {
            for v in &words {
                let mut uv = u.clone();
                uv.extend_from_slice(v);
                for s in letter_words(m, 6) {
                    let joint = m
                        .apply(&StateWord(uv.clone()), &LetterWord(s.clone()))
                        .unwrap();
                    let staged = m
                        .apply(
                            &StateWord(v.clone()),
                            &m.apply(&StateWord(u.clone()), &LetterWord(s.clone())).unwrap(),
                        )
                        .unwrap();
                    assert_eq!(joint, staged, "{name}: homomorphism on {u:?},{v:?}");
                }
            }
        }

        // length and prefix preservation
        for x in 0..m.n_states() as u32 {
            for s in letter_words(m, 5) {
                let img = m.apply_state(x, &s);
                assert_eq!(img.len(), s.len(), "{name}: length");
                for k in 0..=s.len() {
                    assert_eq!(m.apply_state(x, &s[..k]), img[..k], "{name}: prefix");
                }
            }
        }

        // minimization idempotence
        let (q1, _) = minimize(m);
        let (q2, _) = minimize(&q1);
        assert!(q1.same_tables(&q2), "{name}: minimization idempotence");

        // signature exactness vs exhaustive comparison to length 10
        let sample: Vec<Vec<u32>> = words.iter().take(6).cloned().collect();
        let probes = letter_words(m, 10);
        for u in &sample {
            for v in &sample {
                let by_sig =
                    same_action(m, &StateWord(u.clone()), m, &StateWord(v.clone())).unwrap();
                let by_brute = probes.iter().all(|s| {
                    m.apply(&StateWord(u.clone()), &LetterWord(s.clone())).unwrap()
                        == m.apply(&StateWord(v.clone()), &LetterWord(s.clone())).unwrap()
                });
                assert_eq!(by_sig, by_brute, "{name}: signature exactness {u:?},{v:?}");
            }
        }

        // equal class sizes on connected reversible machines
        if m.is_reversible() && m.is_connected() {
            let part = nerode_partition(m);
            let first = part.classes[0].len();
            assert!(
                part.classes.iter().all(|c| c.len() == first),
                "{name}: unequal Nerode class sizes"
            );
        }

        // images of equivalent power states stay equivalent (n <= 3)
        for n in 1..=3usize {
            let p = explicit_power(m, n, DEFAULT_SIZE_LIMIT).unwrap();
            let part = nerode_partition(&p);
            for class in &part.classes {
                for i in 0..p.n_letters() as u32 {
                    let target = part.class_of[p.transition(class[0], i) as usize];
                    for &w in class {
                        assert_eq!(
                            part.class_of[p.transition(w, i) as usize], target,
                            "{name}: power {n} transition stability"
                        );
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    println!(
        "ACCEPTANCE 7 (invariant suites over {} machines): PASS in {elapsed:?}",
        corpus.len()
    );
}

#[test]
fn criterion_8_negative_and_degenerate_paths() {
    let start = Instant::now();

    // identity builtins fail the growth hypothesis
    for name in ["identity1x2", "identity2x2"] {
        let rep = exponential_growth_certificate(
            &builtin(name).unwrap(),
            4,
            DEFAULT_SIZE_LIMIT,
            DEFAULT_ORBIT_BUDGET,
        )
        .unwrap();
        assert_eq!(rep.verdict, CertificateVerdict::HypothesisFailed, "{name}");
        assert_eq!(rep.failed_level, Some(1), "{name}");
    }

    // ... show finiteness evidence
    let probe = finiteness_probe(&builtin("identity2x2").unwrap(), 4, 64, DEFAULT_SIZE_LIMIT)
        .unwrap();
    assert_eq!(probe.verdict, FinitenessVerdict::FiniteEvidence);

    // ... and have constant growth 1
    for name in ["identity1x2", "identity2x2"] {
        let growth = growth_function(&builtin(name).unwrap(), 6, DEFAULT_SIZE_LIMIT, false).unwrap();
        assert_eq!(growth.gamma, vec![1; 6], "{name}");
    }

    // the adding machine is rejected by reversible-only operations with
    // the offending letter named
    let adding = builtin("adding").unwrap();
    for err in [
        exponential_growth_certificate(&adding, 3, DEFAULT_SIZE_LIMIT, DEFAULT_ORBIT_BUDGET)
            .unwrap_err(),
        finiteness_probe(&adding, 3, 64, DEFAULT_SIZE_LIMIT).unwrap_err(),
        lemma1_verify(&adding, 1, DEFAULT_SIZE_LIMIT, DEFAULT_ORBIT_BUDGET).unwrap_err(),
    ] {
        let msg = err.to_string();
        assert!(msg.contains("not reversible"), "{msg}");
        assert!(msg.contains("letter 0"), "{msg}");
    }

    // size and budget limits flag partial reports instead of crashing
    let fig1 = builtin("fig1").unwrap();
    let sizes = minimized_power_sizes(&fig1, 8, 20).unwrap();
    assert!(sizes.truncated);
    assert_eq!(sizes.sizes, vec![2, 4, 8]);

    let trans = level_transitive_up_to(&fig1, 10, 16).unwrap();
    assert_eq!(trans.budget_exceeded_at, Some(5));
    assert_eq!(trans.transitive_up_to, 4);
    assert!(trans.failure_level.is_none());

    let rels = find_relations(&fig1, 8, DEFAULT_SIZE_LIMIT, 10).unwrap();
    assert!(rels.truncated);
    assert_eq!(rels.relations.len(), 2); // level 1 was fully scanned

    // freeness truncated by the machine-size limit stays honest
    let census = census16();
    let free_machine = census
        .iter()
        .find(|m| {
            level_transitive_up_to(&m.dual(), 8, DEFAULT_ORBIT_BUDGET)
                .unwrap()
                .transitive_up_to
                == 8
        })
        .expect("a free machine exists in the census");
    let partial = freeness_check(free_machine, 12, 64, SCAN_BUDGET).unwrap();
    assert!(partial.truncated);
    assert!(partial.depth_completed < 12);
    assert_eq!(partial.verdict, FreenessVerdict::FreeToDepth);

    // the CLI surfaces limit errors as clean exit-2 failures
    let out = mealy(&["--limit", "10", "power", "-n", "5", "builtin:fig1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("size limit exceeded"));

    let elapsed = start.elapsed();
    println!("ACCEPTANCE 8 (negative and degenerate paths): PASS in {elapsed:?}");
}
