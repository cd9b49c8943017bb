//! Acceptance run: one PASS/WARN/FAIL line per criterion, non-zero exit on
//! any FAIL. Runs without the libtest harness so timings are not disturbed
//! by other tests.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{clustered_walk, instance, random_walk};
use flipred::algebra::{apply, cancel_pair, insert_pair, transposition_expand, transposition_reduce};
use flipred::bench::{auto_edge_count, run_cell, slope, BenchCell, BenchOutcome};
use flipred::io::{parse_flipseq, parse_ltri, write_flipseq, write_ltri};
use flipred::ngon::{check_duplicate_free_minimal, check_fan_reductions_minimal, random_ngon, weak_equiv_ngon};
use flipred::reducer::is_reduced_oracle;
use flipred::seqgen::{random_instance, random_sequence, sequence_between_ngon, GenSpec};
use flipred::{make_fan, reduce, EdgeLabel, FlipSequence, Setting};

type Criterion = (&'static str, Duration, fn() -> Outcome);

#[derive(Clone, Copy, PartialEq)]
enum Verdict {
    Pass,
    Warn,
    Fail,
}

struct Outcome {
    verdict: Verdict,
    detail: String,
}

fn pass_if(ok: bool, detail: String) -> Outcome {
    Outcome { verdict: if ok { Verdict::Pass } else { Verdict::Fail }, detail }
}

fn seq<const N: usize>(v: [u32; N]) -> FlipSequence {
    FlipSequence::from(v)
}

fn pentagon() -> Outcome {
    let (mut cases, mut bad) = (0, 0);
    for apex in 0..5 {
        let fan = make_fan(5, apex).unwrap();
        for (i, j) in [(EdgeLabel(5), EdgeLabel(6)), (EdgeLabel(6), EdgeLabel(5))] {
            for start in [fan.clone(), fan.flip(i).unwrap()] {
                let expected = start.transpose_labels(i, j).unwrap();
                let out = apply(&FlipSequence::from_labels(vec![i, j, i, j, i]), &start).unwrap();
                cases += 1;
                if !out.strong_eq(&expected) {
                    bad += 1;
                }
            }
        }
    }
    pass_if(bad == 0, format!("{} of {cases} labeled pentagons transposed", cases - bad))
}

fn kernel_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut failures = 0;
    let mut summary = Vec::new();
    for setting in Setting::ALL {
        let (mut involutions, mut commutations) = (0, 0);
        let mut t = instance(setting, 120, 2);
        while involutions < 1000 || commutations < 1000 {
            t = apply(&random_walk(&t, 3, rng.gen()), &t).unwrap();
            let inner: Vec<EdgeLabel> = t.interior_labels().collect();
            let i = inner[rng.gen_range(0..inner.len())];
            let j = inner[rng.gen_range(0..inner.len())];
            if involutions < 1000 && t.flippable(i).unwrap() {
                involutions += 1;
                let back = t.flip(i).unwrap().flip(i).unwrap();
                failures += usize::from(!back.strong_eq(&t));
            }
            if commutations < 1000
                && i != j
                && t.support_overlap(i, j).unwrap() == 0
                && t.flippable(i).unwrap()
                && t.flippable(j).unwrap()
            {
                commutations += 1;
                let ij = t.flip(i).unwrap().flip(j).unwrap();
                let ji = t.flip(j).unwrap().flip(i).unwrap();
                failures += usize::from(!ij.strong_eq(&ji));
            }
        }
        summary.push(format!("{setting} {involutions}+{commutations}"));
    }
    pass_if(failures == 0, format!("{failures} failures ({})", summary.join(", ")))
}

fn soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut runs, mut bad, mut skipped) = (0, 0, 0);
    let mut slowest = Duration::ZERO;
    let rs = [1.1, 2.0, 10.0];
    for setting in Setting::ALL {
        for k in 0..100usize {
            let r = rs[k % 3];
            // a convex polygon with e edges has about e/2 interior edges
            let cap_for = |edges: usize| ((r * (edges / 2 - 10) as f64) as usize).min(5000);
            let (edges, len) = if k < 3 {
                (2000, cap_for(2000))
            } else {
                let edges = rng.gen_range(100..=2000usize);
                let cap = cap_for(edges).max(20);
                let len = (20.0 * (cap as f64 / 20.0).powf(rng.gen::<f64>())).round() as usize;
                (edges, len)
            };
            let spec = GenSpec::new(setting, edges, len, r, k as u64);
            let generated = random_instance(&spec).and_then(|t| random_sequence(&t, &spec).map(|s| (t, s)));
            let (t, s) = match generated {
                Ok(pair) => pair,
                Err(e) => {
                    skipped += 1;
                    eprintln!("skipped {setting} edges={edges} f={len} r={r}: {e}");
                    continue;
                }
            };
            let start = Instant::now();
            let (out, _) = reduce(&s, &t).unwrap();
            slowest = slowest.max(start.elapsed());
            runs += 1;
            if !apply(&out, &t).unwrap().weak_eq(&apply(&s, &t).unwrap()) {
                bad += 1;
            }
        }
    }
    pass_if(
        bad == 0 && skipped == 0 && slowest < Duration::from_secs(60),
        format!(
            "{} of {runs} reductions weakly equal, {skipped} skipped, slowest {:.2} s",
            runs - bad,
            slowest.as_secs_f64()
        ),
    )
}

fn minimality(
    check: fn(usize, u32, u64) -> Result<flipred::ngon::MinimalityReport, flipred::ngon::NgonError>,
) -> Outcome {
    let mut violations = 0;
    let mut total = 0;
    let mut example = None;
    for n in 5..=10 {
        let report = check(500, n, n as u64).unwrap();
        total += report.samples;
        violations += report.violations;
        if example.is_none() {
            example = report.examples.first().cloned();
        }
    }
    let mut detail = format!("{} of {total} sequences match the flip distance", total - violations);
    if let Some(e) = example {
        detail.push_str(&format!("; first violation: {e}"));
    }
    pass_if(violations == 0, detail)
}

const SPHERE: &str = "ltri 1
setting combinatorial
vertices 5
edges 9
0 0 1
1 2 4
2 1 4
3 0 4
4 1 2
5 0 2
6 2 3
7 0 3
8 0 2
faces 6
-0 +3 -2
+0 +4 -5
-1 -4 +2
+1 -3 +8
+5 +6 -7
-6 -8 +7
";

fn interior_vertex_counterexample() -> Outcome {
    let t = parse_ltri(SPHERE).unwrap();
    let s = seq([0, 1, 3, 4]);
    let end = apply(&s, &t).unwrap();
    let ok = !s.has_duplicates() && end.weak_eq(&t) && !end.strong_eq(&t);
    pass_if(ok, format!("duplicate-free {s} returns to the start up to labels"))
}

fn heptagon_chain() -> Outcome {
    let t = apply(&seq([10]), &make_fan(7, 0).unwrap()).unwrap();
    let six = seq([7, 8, 9, 10, 8, 7]);
    let five = seq([10, 9, 8, 7, 10]);
    let unchanged = reduce(&six, &t).unwrap().0 == six;
    let reduced = is_reduced_oracle(&six, &t, 12).unwrap();
    let equivalent = weak_equiv_ngon(&six, &five, &t, 0).unwrap();
    pass_if(
        unchanged && reduced && equivalent,
        format!("unchanged by reduce: {unchanged}, reduced by oracle: {reduced}, weakly equal to {five}: {equivalent}"),
    )
}

fn gain_vs_redundancy() -> Outcome {
    let mut verdict = Verdict::Pass;
    let mut parts = Vec::new();
    for (r, table) in [(1.1, 13.0), (2.0, 48.0), (10.0, 87.0)] {
        let mut gains = Vec::new();
        for seed in 0..30 {
            let cell = BenchCell {
                setting: Setting::ConvexNGon,
                edges: auto_edge_count(Setting::ConvexNGon, 2000, r),
                length: 2000,
                redundancy: r,
                seed,
            };
            let BenchOutcome::Run(rec) = run_cell(&cell) else { panic!("cell skipped: {cell:?}") };
            gains.push(rec.gain_percent());
        }
        let mean = gains.iter().sum::<f64>() / gains.len() as f64;
        let estimate = 100.0 * (1.0 - 1.0 / r);
        if mean < estimate / 3.0 {
            verdict = Verdict::Fail;
        } else if (mean - estimate).abs() > 15.0 && verdict == Verdict::Pass {
            verdict = Verdict::Warn;
        }
        parts.push(format!("r={r}: {mean:.1}% (estimate {estimate:.1}%, reference {table}%)"));
    }
    Outcome { verdict, detail: parts.join("; ") }
}

fn short_transformations() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut total, mut short) = (0, 0);
    for n in 13..=40 {
        for _ in 0..50 {
            let a = random_ngon(n, &mut rng);
            let b = random_ngon(n, &mut rng);
            let s = sequence_between_ngon(&a, &b, rng.gen_range(0..n)).unwrap();
            let (out, _) = reduce(&s, &a).unwrap();
            total += 1;
            if out.len() < 2 * n as usize - 10 {
                short += 1;
            }
        }
    }
    let fraction = short as f64 / total as f64;
    Outcome {
        verdict: if fraction >= 0.95 { Verdict::Pass } else { Verdict::Warn },
        detail: format!("{:.1}% of {total} reduced sequences shorter than 2n-10", 100.0 * fraction),
    }
}

fn complexity() -> Outcome {
    let lengths = [1000usize, 2000, 4000];
    let mut ok = true;
    let mut parts = Vec::new();
    for setting in Setting::ALL {
        let mut means = Vec::new();
        for &length in &lengths {
            let mut total = 0.0;
            for seed in 0..3 {
                let cell =
                    BenchCell { setting, edges: auto_edge_count(setting, length, 2.0), length, redundancy: 2.0, seed };
                let BenchOutcome::Run(rec) = run_cell(&cell) else { panic!("cell skipped: {cell:?}") };
                total += rec.elapsed.as_secs_f64();
            }
            means.push(total / 3.0);
        }
        let ratios: Vec<f64> = means.windows(2).map(|w| w[1] / w[0]).collect();
        let pts: Vec<(f64, f64)> = lengths.iter().zip(&means).map(|(&f, &t)| ((f as f64).ln(), t.ln())).collect();
        let exponent = slope(&pts);
        ok &= ratios.iter().all(|&q| q <= 8.0) && exponent <= 3.0;
        parts.push(format!(
            "{setting}: {:.0}/{:.0}/{:.0} ms, ratios {:.1} {:.1}, exponent {exponent:.2}",
            means[0] * 1e3,
            means[1] * 1e3,
            means[2] * 1e3,
            ratios[0],
            ratios[1]
        ));
    }
    pass_if(ok, parts.join("; "))
}

fn move_round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut transpositions, mut pairs, mut bad) = (0, 0, 0);
    let mut tries = 0;
    while (transpositions < 1000 || pairs < 1000) && tries < 200_000 {
        tries += 1;
        let setting = Setting::ALL[tries % 3];
        let t = instance(setting, rng.gen_range(12..60), rng.gen());
        let s = clustered_walk(&t, rng.gen_range(3..30), rng.gen_range(2..5), rng.gen());
        if s.len() < 3 {
            continue;
        }
        let p = rng.gen_range(0..s.len() - 2);
        if transpositions < 1000 {
            if let Ok(reduced) = transposition_reduce(&s, &t, p) {
                transpositions += 1;
                bad += usize::from(transposition_expand(&reduced, &t, p, s[p], s[p + 1]).ok() != Some(s.clone()));
            }
        }
        if pairs < 1000 {
            let inner: Vec<EdgeLabel> = t.interior_labels().collect();
            let i = inner[rng.gen_range(0..inner.len())];
            let q = rng.gen_range(0..=s.len());
            if let Ok(longer) = insert_pair(&s, &t, q, i) {
                pairs += 1;
                bad += usize::from(cancel_pair(&longer, &t, q).ok() != Some(s.clone()));
            }
        }
    }
    pass_if(
        bad == 0 && transpositions == 1000 && pairs == 1000,
        format!("{transpositions} transposition and {pairs} pair round trips, {bad} mismatches"),
    )
}

fn file_round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut bad = 0;
    for k in 0..1000 {
        let setting = Setting::ALL[k % 3];
        let t = instance(setting, rng.gen_range(9..150), rng.gen());
        let t = apply(&random_walk(&t, rng.gen_range(0..50), rng.gen()), &t).unwrap();
        let text = write_ltri(&t);
        let back = parse_ltri(&text).unwrap();
        bad += usize::from(write_ltri(&back) != text || !back.strong_eq(&t));
        let s = random_walk(&t, rng.gen_range(0..80), rng.gen());
        let text = write_flipseq(&s);
        let back = parse_flipseq(&text).unwrap();
        bad += usize::from(write_flipseq(&back) != text || back != s);
    }
    pass_if(bad == 0, format!("{} of 2000 documents reproduced byte for byte", 2000 - bad))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("pentagon transposition", Duration::from_secs(1), pentagon),
        ("kernel algebra", Duration::from_secs(10), kernel_algebra),
        ("reducer soundness", Duration::from_secs(1800), soundness),
        ("duplicate-free sequences are minimal", Duration::from_secs(120), || minimality(check_duplicate_free_minimal)),
        ("reduced fan sequences are minimal", Duration::from_secs(300), || minimality(check_fan_reductions_minimal)),
        ("interior vertex counter-example", Duration::from_secs(1), interior_vertex_counterexample),
        ("reduced but not minimal chain", Duration::from_secs(1), heptagon_chain),
        ("gain vs redundancy", Duration::from_secs(600), gain_vs_redundancy),
        ("short transformations", Duration::from_secs(600), short_transformations),
        ("complexity envelope", Duration::from_secs(600), complexity),
        ("move round trips", Duration::from_secs(10), move_round_trips),
        ("file round trips", Duration::from_secs(600), file_round_trips),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if elapsed > *limit {
            outcome.verdict = Verdict::Fail;
            outcome.detail.push_str(&format!("; over the {} s limit", limit.as_secs()));
        }
        let tag = match outcome.verdict {
            Verdict::Pass => "PASS",
            Verdict::Warn => "WARN",
            Verdict::Fail => {
                failed += 1;
                "FAIL"
            }
        };
        println!("{tag} {:>2} {name}: {} [{:.2} s]", k + 1, outcome.detail, elapsed.as_secs_f64());
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
