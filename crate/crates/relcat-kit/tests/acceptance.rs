//! The acceptance suite: one criterion per section, each printed as a
//! pass/fail line with its wall-clock budget. Expected values come from
//! independent oracles computed here, not from the code under test.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use relcat_kit::homology::reduced_homology;
use relcat_kit::relposet::{all_structures, RelPoset, StructureHypotheses};
use relcat_kit::simplicial::nerve;
use relcat_kit::subdivision::{
    identify_kappa_boundary, retraction_r, sd2_region, subdivide, Region, SubdivisionMode,
};
use relcat_kit::verifier::{run_check, Caps, CheckParams};

/// Independent oracle: the number of ascending chains of nonempty subsets of
/// {0..n}, by memoized recursion over the subset lattice. This is the object
/// count of the double-subdivided simplex.
fn chain_count_oracle(n: usize) -> usize {
    let full: u32 = (1 << (n + 1)) - 1;
    let mut memo = vec![0usize; (full + 1) as usize];
    fn count_from(s: u32, full: u32, memo: &mut [usize]) -> usize {
        if memo[s as usize] != 0 {
            return memo[s as usize];
        }
        let mut total = 1; // the chain stopping at s
        let free = full & !s;
        let mut t = free;
        loop {
            if t != 0 {
                total += count_from(s | t, full, memo);
            }
            if t == 0 {
                break;
            }
            t = (t - 1) & free;
        }
        memo[s as usize] = total;
        total
    }
    let mut total = 0;
    for s in 1..=full {
        total += count_from(s, full, &mut memo);
    }
    total
}

struct Outcome {
    name: &'static str,
    passed: bool,
    detail: String,
    elapsed: Duration,
    budget: Duration,
}

fn record(
    results: &mut Vec<Outcome>,
    name: &'static str,
    budget_secs: u64,
    run: impl FnOnce() -> (bool, String),
) {
    let start = Instant::now();
    let (passed, detail) = run();
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_secs);
    let within = elapsed <= budget;
    println!(
        "criterion {:<30} {} in {:>7.2}s (budget {}s){}",
        name,
        if passed && within { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget_secs,
        if detail.is_empty() { String::new() } else { format!(" — {detail}") }
    );
    results.push(Outcome { name, passed: passed && within, detail, elapsed, budget });
}

fn no_failures(entries: &[relcat_kit::verifier::ReportEntry]) -> (bool, String) {
    let fails: Vec<&str> =
        entries.iter().filter(|e| e.is_fail()).map(|e| e.check.as_str()).collect();
    let downgraded = entries.iter().filter(|e| e.verdict.starts_with("downgraded")).count();
    let detail = if fails.is_empty() {
        if downgraded > 0 {
            format!("{} entries, {downgraded} downgraded to acyclic-only", entries.len())
        } else {
            format!("{} entries", entries.len())
        }
    } else {
        format!("failing: {}", fails.join(", "))
    };
    (fails.is_empty() && !entries.is_empty(), detail)
}

fn linear_minimal(n: usize) -> Arc<RelPoset> {
    Arc::new(RelPoset::minimal(relcat_kit::relposet::Poset::linear(n + 1)))
}

#[test]
fn acceptance_criteria() {
    let mut results: Vec<Outcome> = Vec::new();

    // 1. subdivision identification with independent counts
    record(&mut results, "1-subdivision-identification", 10, || {
        let expected = [0, 5, 25, 149];
        for n in 1..=3usize {
            let oracle = chain_count_oracle(n);
            if oracle != expected[n] {
                return (false, format!("oracle disagrees at n={n}: {oracle}"));
            }
            let xi = subdivide(&linear_minimal(n), SubdivisionMode::Double);
            if xi.len() != oracle {
                return (false, format!("object count at n={n}: {} != {oracle}", xi.len()));
            }
            for st in all_structures(n) {
                match relcat_kit::subdivision::double_subdivision_matches_region(n, &Arc::new(st))
                {
                    Ok(true) => {}
                    _ => return (false, format!("identification fails at n={n}")),
                }
            }
        }
        (true, "counts 5/25/149, all structures isomorphic".into())
    });

    // 2. the cone identification as relative posets
    record(&mut results, "2-cone-identification", 30, || {
        for n in 1..=3usize {
            for st in all_structures(n) {
                let st = Arc::new(st);
                let ident = identify_kappa_boundary(n, &st).unwrap();
                let cone = &ident.cone;
                let m = ident.boundary.len();
                // projection value of a cone element
                let phi = |x: usize| -> usize {
                    if x == cone.k_elem() {
                        0
                    } else if x < m {
                        ident.boundary.phi(x)
                    } else {
                        ident.boundary.phi(x - m)
                    }
                };
                for a in 0..cone.len() {
                    for b in 0..cone.len() {
                        let expected = cone.poset.leq(a, b) && st.marked(phi(a), phi(b));
                        if ident.relposet.marked(a, b) != expected {
                            return (false, format!("mark mismatch at n={n}, pair ({a},{b})"));
                        }
                    }
                }
            }
        }
        (true, "order and marks agree for every structure, n <= 3".into())
    });

    // 3. the retraction onto P_k
    record(&mut results, "3-retraction", 60, || {
        let mut jobs = Vec::new();
        for n in 1..=3usize {
            for k in 0..=n {
                for st in all_structures(n) {
                    if StructureHypotheses::Retraction.admits(n, k, &st) {
                        jobs.push((n, k, Arc::new(st)));
                    }
                }
            }
        }
        let total = jobs.len();
        let bad = jobs
            .into_par_iter()
            .find_any(|(n, k, st)| retraction_r(*n, *k, st).is_err());
        match bad {
            Some((n, k, _)) => (false, format!("retraction fails at n={n}, k={k}")),
            None => (true, format!("{total} admissible instances validated")),
        }
    });

    // 4. the box-product filtration
    record(&mut results, "4-filtration", 120, || {
        let params = CheckParams {
            caps: Caps { max_nm_sum: 5, max_m: 5, ..Caps::default() },
            seeds: vec![1],
            ..CheckParams::default()
        };
        let entries = run_check("filtration", &params).unwrap();
        // expected instances: n + m <= 5; k < n on the left, k > 0 on the right
        let mut expected = 0;
        for n in 1..=5usize {
            for _m in 0..=5 - n {
                expected += 2 * n;
            }
        }
        if entries.len() != expected {
            return (false, format!("expected {expected} instances, got {}", entries.len()));
        }
        no_failures(&entries)
    });

    // 5. contractibility of the preimage families, with the reductions
    record(&mut results, "5-contractible-families-n3", 60, || {
        let entries: Vec<_> = (1..=3usize)
            .flat_map(|n| {
                run_check(
                    "contractible",
                    &CheckParams { n: Some(n), seeds: vec![1], ..CheckParams::default() },
                )
                .unwrap()
            })
            .collect();
        no_failures(&entries)
    });
    record(&mut results, "5-contractible-families-n4", 600, || {
        let entries = run_check(
            "contractible",
            &CheckParams {
                n: Some(4),
                seeds: vec![1],
                caps: Caps { max_n: 4, ..Caps::default() },
                ..CheckParams::default()
            },
        )
        .unwrap();
        no_failures(&entries)
    });

    // 6. homology engine sanity: subdivided boundaries are spheres
    record(&mut results, "6-sphere-homology", 120, || {
        for n in 1..=4usize {
            let boundary = sd2_region(n, Region::Boundary, &linear_minimal(n)).unwrap();
            let sphere = nerve(boundary.result.poset());
            let report = reduced_homology(&sphere).unwrap();
            for d in &report.dims {
                let expected = usize::from(d.dim + 1 == n);
                if d.betti != expected || !d.torsion.is_empty() {
                    return (false, format!("wrong homology at n={n}, dim {}", d.dim));
                }
            }
        }
        (true, "reduced homology of the first four spheres, exact".into())
    });

    // 7. holim invariance: contractible indexes, cofinality, cosieve pullbacks
    record(&mut results, "7-holim-invariance", 120, || {
        let entries = run_check(
            "decomposition",
            &CheckParams { seeds: vec![1, 2, 3, 4, 5], ..CheckParams::default() },
        )
        .unwrap();
        no_failures(&entries)
    });

    // 8. the zero-corner holim over every admissible structure
    record(&mut results, "8-zero-corner-holim-n2", 60, || {
        let entries = run_check(
            "holim",
            &CheckParams { n: Some(2), seeds: (1..=20).collect(), ..CheckParams::default() },
        )
        .unwrap();
        no_failures(&entries)
    });
    record(&mut results, "8-zero-corner-holim-n3", 900, || {
        let entries = run_check(
            "holim",
            &CheckParams { n: Some(3), seeds: (1..=20).collect(), ..CheckParams::default() },
        )
        .unwrap();
        no_failures(&entries)
    });

    // 9. the cone extension with the transported marking
    record(&mut results, "9-cone-extension-n2", 60, || {
        let entries = run_check(
            "extension",
            &CheckParams { n: Some(2), seeds: (1..=20).collect(), ..CheckParams::default() },
        )
        .unwrap();
        no_failures(&entries)
    });
    record(&mut results, "9-cone-extension-n3", 900, || {
        let entries = run_check(
            "extension",
            &CheckParams { n: Some(3), seeds: vec![1, 2], ..CheckParams::default() },
        )
        .unwrap();
        no_failures(&entries)
    });

    let failed: Vec<&Outcome> = results.iter().filter(|o| !o.passed).collect();
    for o in &failed {
        eprintln!(
            "criterion {} failed: {} ({:.2?} of {:?})",
            o.name, o.detail, o.elapsed, o.budget
        );
    }
    assert!(failed.is_empty(), "{} acceptance criteria failed", failed.len());
}
