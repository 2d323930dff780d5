//! Acceptance gate: one test per criterion, each printing a single
//! PASS/FAIL line. Criteria are checked as stated; where a stated check
//! does not hold, the test fails rather than being weakened.

use std::process::Command;
use std::time::Instant;

use frobint::verify::{run_suite, CheckResult, RunConfig, SuiteReport};

fn cfg() -> RunConfig {
    RunConfig { p: None, seed: 1 }
}

fn suite(name: &str) -> SuiteReport {
    run_suite(name, &cfg()).unwrap()
}

fn gate(criterion: u32, desc: &str, ok: bool, detail: &str) {
    println!(
        "criterion {criterion} [{}] {desc}{}",
        if ok { "PASS" } else { "FAIL" },
        if detail.is_empty() { String::new() } else { format!(" — {detail}") }
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn named<'a>(rep: &'a SuiteReport, prefix: &str) -> Vec<&'a CheckResult> {
    rep.checks.iter().filter(|c| c.name.starts_with(prefix)).collect()
}

fn all_pass(checks: &[&CheckResult]) -> bool {
    !checks.is_empty() && checks.iter().all(|c| c.passed)
}

fn describe(checks: &[&CheckResult]) -> String {
    checks
        .iter()
        .map(|c| format!("{}: {}", c.name, c.actual))
        .collect::<Vec<_>>()
        .join("; ")
}

#[test]
fn criterion_1_oracle_equivalence() {
    let t = Instant::now();
    let rep = suite("local");
    let secs = t.elapsed().as_secs_f64();
    let checks = named(&rep, "oracle-equivalence");
    let ok = all_pass(&checks) && secs < 60.0;
    gate(1, "oracle equivalence on 200 seeded pairs", ok, &format!("{} in {secs:.1}s", describe(&checks)));
}

#[test]
fn criterion_2_case1_stabilization() {
    let rep = suite("local");
    let checks = named(&rep, "case1-stabilization");
    gate(2, "twisted sequences stabilize to e*k2 with bounded crossover", all_pass(&checks), &describe(&checks));
}

#[test]
fn criterion_3_corollary_scaling() {
    let rep = suite("corollary");
    let checks: Vec<&CheckResult> = rep.checks.iter().collect();
    gate(3, "Z2-values scale by p^n exactly, Z1-values constant", all_pass(&checks), &describe(&checks));
}

#[test]
fn criterion_4_global_identity() {
    let t = Instant::now();
    let rep = suite("global-z");
    let secs = t.elapsed().as_secs_f64();
    let checks: Vec<&CheckResult> = rep.checks.iter().collect();
    let ok = all_pass(&checks) && secs < 120.0;
    gate(4, "global non-ordinary identity q^n(C.Z2)+(C.Z1)", ok, &format!("{} in {secs:.1}s", describe(&checks)));
}

#[test]
fn criterion_5_height_growth() {
    let rep = suite("height");
    // as stated: exact closed form AND ratios within 1/100 past the
    // threshold 100 (C.Z1)/(C.Z2). The latter does not hold — the gap at
    // the stated threshold is ~(p-1)/101 — and is reported red here; the
    // corrected threshold with the extra factor (p-1) passes (see the
    // height suite report).
    let closed = named(&rep, "height-closed-form");
    let stated = named(&rep, "ratio-bound-stated-threshold");
    let ok = all_pass(&closed) && all_pass(&stated);
    gate(5, "height closed form and ratio bound at stated threshold", ok, &describe(&[closed, stated].concat()));
}

#[test]
fn criterion_6_supersingular_locus() {
    let t = Instant::now();
    let rep = suite("ss");
    let secs = t.elapsed().as_secs_f64();
    let checks: Vec<&CheckResult> = rep.checks.iter().collect();
    let ok = all_pass(&checks) && secs < 60.0;
    gate(6, "ss_bruteforce = ss_hasse for 5 <= p <= 31", ok, &format!("{} in {secs:.1}s", describe(&checks)));
}

#[test]
fn criterion_7_bezout_coherence() {
    let rep = suite("bezout");
    let checks: Vec<&CheckResult> = rep.checks.iter().collect();
    gate(7, "local multiplicities sum to d1e2+d2e1, completion >= 80%", all_pass(&checks), &describe(&checks));
}

#[test]
fn criterion_8_density() {
    let rep = suite("density");
    // as stated: |S_n| = 5^n, DENSE-AT-(1,1,1,1) at m=4, and strictly
    // increasing projection counts for m in 1..4. The pair set is empty
    // for every m <= 4 (Artin-Schreier equations have no solutions below
    // F_{5^5}), so the last two checks are red as stated; the same rank
    // test at m=5 is dense (see the density suite report).
    let sn = named(&rep, "sn-exact-growth");
    let m4 = named(&rep, "rank-test-m4-dense");
    let incr = named(&rep, "pair-counts-increase");
    let ok = all_pass(&sn) && all_pass(&m4) && all_pass(&incr);
    gate(8, "|S_n| = 5^n, DENSE at m=4, increasing projections", ok, &describe(&[sn, m4, incr].concat()));
}

#[test]
fn criterion_9_determinism() {
    let t = Instant::now();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_frobint"))
            .args(["verify", "all", "--p", "5", "--seed", "1"])
            .output()
            .expect("spawn frobint")
    };
    let a = run();
    let b = run();
    let secs = t.elapsed().as_secs_f64();
    let identical = a.stdout == b.stdout;
    // exit 0 requires every suite green; the stated-threshold and m=4
    // density checks are red as stated, so this is red too.
    let exit_zero = a.status.code() == Some(0) && b.status.code() == Some(0);
    let in_budget = secs < 600.0;
    let ok = identical && exit_zero && in_budget;
    gate(
        9,
        "verify all --p 5 --seed 1 twice: byte-identical, exit 0, < 10 min",
        ok,
        &format!(
            "identical={identical} exit_codes=({:?},{:?}) wall={secs:.1}s",
            a.status.code(),
            b.status.code()
        ),
    );
}
