//! Acceptance criteria AC-1 through AC-12.
//!
//! Each test writes one `AC-n PASS|FAIL ...` line straight to stdout (not
//! through the captured `println!`), so the lines show up in a normal
//! `cargo test` run. AC-10 is slow and opt-in:
//! `cargo test --release -p hatlab-core --test acceptance -- --ignored`.

use std::io::Write;
use std::time::{Duration, Instant};

use hatlab_core::bounds::{derivative_diagnostics, lower_envelope, upper_bound};
use hatlab_core::exact::rational::{rational_from_ratio as q, to_significant};
use hatlab_core::exact::{BigRational, IntPolynomial, RationalFunction};
use hatlab_core::game::{
    dual_finite, evaluate_pair, table1_strategy, win_probability, FinitePair, FiniteStrategy,
};
use hatlab_core::machine::{
    builtin_machine, derive_closed_form, dual_machine, tail_bound, truncate_to_finite, BlockAction,
    BlockMachine, Builtin, MachinePair,
};
use hatlab_core::monte_carlo::{simulate_finite_pair, simulate_machine_pair};
use hatlab_core::search::{
    exhaustive_pairs, exhaustive_symmetric, hill_climb, CheckpointOptions, SearchConfig,
};
use hatlab_core::HatError;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(id: &str, title: &str, failures: &[String]) {
    let status = if failures.is_empty() { "PASS" } else { "FAIL" };
    let mut line = format!("{id} {status} {title}");
    if !failures.is_empty() {
        line.push_str(": ");
        line.push_str(&failures.join("; "));
    }
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
    assert!(failures.is_empty(), "{line}");
}

fn check(failures: &mut Vec<String>, ok: bool, what: impl Into<String>) {
    if !ok {
        failures.push(what.into());
    }
}

fn poly(c: &[i64]) -> IntPolynomial {
    IntPolynomial::from_i64s(c)
}

fn rf(num: IntPolynomial, den: IntPolynomial) -> RationalFunction {
    RationalFunction::normalize(num, den).unwrap()
}

fn product(factors: &[&[i64]]) -> IntPolynomial {
    factors
        .iter()
        .fold(IntPolynomial::one(), |acc, f| &acc * &poly(f))
}

fn closed(b: Builtin) -> RationalFunction {
    derive_closed_form(&builtin_machine(b)).unwrap().value
}

#[test]
fn ac01_three_hat_evaluation() {
    let mut f = Vec::new();
    let pair = FinitePair::symmetric(table1_strategy());
    let counts = evaluate_pair(&pair);
    check(
        &mut f,
        counts.counts()[2..] == [3, 6, 8, 4, 1],
        format!("counts {:?}", counts.counts()),
    );
    check(
        &mut f,
        counts.counts()[..2] == [0, 0],
        "nonzero counts below two whites",
    );
    let v = win_probability(&pair, &q(1, 2)).unwrap();
    check(&mut f, v == q(11, 32), format!("value {v}"));
    let fastest = (0..20)
        .map(|_| {
            let t = Instant::now();
            std::hint::black_box(evaluate_pair(std::hint::black_box(&pair)));
            t.elapsed()
        })
        .min()
        .unwrap();
    check(
        &mut f,
        fastest < Duration::from_millis(1),
        format!("took {fastest:?}"),
    );
    verdict(
        "AC-1",
        "three-hat evaluation gives counts (3,6,8,4,1) and 11/32",
        &f,
    );
}

#[test]
fn ac02_closed_forms() {
    let mut f = Vec::new();
    let started = Instant::now();
    let expected = [
        (Builtin::FirstWhite, rf(poly(&[0, 1]), poly(&[2, -1]))),
        (Builtin::FirstBlack, rf(poly(&[0, 0, 2]), poly(&[1, 1]))),
        (
            Builtin::S1,
            rf(poly(&[0, 1, 1, 1, 3, -3, 1]), poly(&[2, 1, 1, 1, -1])),
        ),
        (Builtin::S2, rf(poly(&[0, 1, -1, 1, 1]), poly(&[2, -3, 3]))),
        (
            Builtin::S3,
            rf(
                poly(&[0, 1, 5, -10, 10, -5, 1]),
                product(&[&[2, -2, 1], &[1, 1], &[2, -1]]),
            ),
        ),
        (
            Builtin::S4,
            rf(
                poly(&[0, 1, 7, -21, 35, -20, -14, 40, -48, 40, -22, 7, -1]),
                product(&[
                    &[1, -1, 1],
                    &[1, 1, -1],
                    &[2, -2, 1],
                    &[1, 0, 1],
                    &[1, 1],
                    &[2, -1],
                ]),
            ),
        ),
    ];
    for (b, want) in &expected {
        let got = closed(*b);
        check(&mut f, &got == want, format!("{b}: got {got}, want {want}"));
    }
    let took = started.elapsed();
    check(
        &mut f,
        took < Duration::from_secs(1),
        format!("took {took:?}"),
    );
    verdict(
        "AC-2",
        "closed forms of the six built-in block strategies",
        &f,
    );
}

#[test]
fn ac03_all_four_reach_seven_twentieths() {
    let mut f = Vec::new();
    let forms: Vec<_> = [Builtin::S1, Builtin::S2, Builtin::S3, Builtin::S4]
        .into_iter()
        .map(|b| (b, closed(b)))
        .collect();
    for (b, v) in &forms {
        let at = v.eval(&q(1, 2)).unwrap();
        check(&mut f, at == q(7, 20), format!("{b}(1/2) = {at}"));
    }
    for i in 0..forms.len() {
        for j in i + 1..forms.len() {
            check(
                &mut f,
                forms[i].1 != forms[j].1,
                format!("{} equals {}", forms[i].0, forms[j].0),
            );
        }
    }
    verdict(
        "AC-3",
        "S1..S4 all equal 7/20 at p = 1/2 and are pairwise distinct",
        &f,
    );
}

fn random_machine(rng: &mut ChaCha8Rng, m: usize, o: usize) -> BlockMachine {
    loop {
        let table: Vec<BlockAction> = (0..1 << m)
            .map(|_| {
                if rng.gen_bool(0.3) {
                    BlockAction::Recurse
                } else {
                    BlockAction::Commit(rng.gen_range(1..=m as u8))
                }
            })
            .collect();
        if let Ok(machine) = BlockMachine::new(m, o, table) {
            return machine;
        }
    }
}

fn random_pair(rng: &mut ChaCha8Rng, n: usize) -> FinitePair {
    let mut table = || {
        FiniteStrategy::new(n, (0..1 << n).map(|_| rng.gen_range(1..=n as u8)).collect()).unwrap()
    };
    let a = table();
    let b = table();
    FinitePair::new(a, b).unwrap()
}

fn random_probability(rng: &mut ChaCha8Rng) -> BigRational {
    let b = rng.gen_range(2..60i64);
    q(rng.gen_range(1..b), b)
}

#[test]
fn ac04_dual_identity() {
    let mut f = Vec::new();
    let shift = RationalFunction::normalize(poly(&[-1, 2]), IntPolynomial::one()).unwrap();
    let dual_gap = |mp: &MachinePair| -> Option<String> {
        let v = derive_closed_form(mp).unwrap().value;
        let d = derive_closed_form(&dual_machine(mp)).unwrap().value;
        let want = &shift + &v.reflect();
        (d != want).then(|| format!("dual of {v} is {d}"))
    };
    for b in Builtin::ALL {
        if let Some(e) = dual_gap(&builtin_machine(b)) {
            f.push(format!("{b}: {e}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let m = rng.gen_range(1..=4);
        let o = if m > 1 { rng.gen_range(0..=1) } else { 0 };
        let mp = MachinePair::new(
            random_machine(&mut rng, m, o),
            random_machine(&mut rng, m, o),
        )
        .unwrap();
        if let Some(e) = dual_gap(&mp) {
            f.push(format!("random machine m={m} o={o}: {e}"));
        }
    }
    let mut finite_failures = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=4);
        let pair = random_pair(&mut rng, n);
        let dual =
            FinitePair::new(dual_finite(pair.player1()), dual_finite(pair.player2())).unwrap();
        let v = evaluate_pair(&pair);
        let vd = evaluate_pair(&dual);
        for _ in 0..10 {
            let p = random_probability(&mut rng);
            let one = BigRational::one();
            let want = &p + &p - &one + v.value_at(&(&one - &p));
            if vd.value_at(&p) != want {
                finite_failures += 1;
            }
        }
    }
    check(
        &mut f,
        finite_failures == 0,
        format!("{finite_failures} finite mismatches"),
    );
    verdict(
        "AC-4",
        "dual identity for built-ins, 50 random machines and 1000 random finite pairs",
        &f,
    );
}

#[test]
fn ac05_exhaustive_three_hats() {
    let mut f = Vec::new();
    let started = Instant::now();
    let mut reports = Vec::new();
    for workers in [1, 2, 8] {
        let mut cfg = SearchConfig::exhaustive(3, q(1, 2), false);
        cfg.workers = workers;
        reports.push(exhaustive_pairs(&cfg).unwrap());
    }
    let r = &reports[0];
    check(
        &mut f,
        r.best_value == q(22, 64),
        format!("best {}", r.best_value),
    );
    check(
        &mut f,
        r.optimum_count == Some(972),
        format!("optimum count {:?}", r.optimum_count),
    );
    check(
        &mut f,
        r.class_count == Some(1),
        format!("class count {:?}", r.class_count),
    );
    check(
        &mut f,
        reports.iter().all(|x| x == r),
        "reports differ across worker counts",
    );
    let took = started.elapsed();
    check(
        &mut f,
        took < Duration::from_secs(30 * 60),
        format!("took {took:?}"),
    );
    verdict(
        "AC-5",
        "exhaustive 3-hat pairs: 22/64, 972 optima, 1 class, worker invariant",
        &f,
    );
}

const UPPER_BOUND_DOTS: [(i64, i64, &str); 15] = [
    (1, 9, "0.0726178426539313"),
    (1, 8, "0.0820488855242729"),
    (1, 7, "0.0942976175586980"),
    (1, 6, "0.110850337219936"),
    (1, 5, "0.134464000000000"),
    (1, 4, "0.170898437500000"),
    (1, 3, "0.234567901234568"),
    (1, 2, "0.375000000000000"),
    (2, 3, "0.567901234567901"),
    (3, 4, "0.670898437500000"),
    (4, 5, "0.734464000000000"),
    (5, 6, "0.777517003886603"),
    (6, 7, "0.808583331844412"),
    (7, 8, "0.832048885524273"),
    (8, 9, "0.850395620431709"),
];

#[test]
fn ac06_upper_bound_dots() {
    let mut f = Vec::new();
    for (a, b, printed) in UPPER_BOUND_DOTS {
        let r = upper_bound(&q(a, b)).unwrap();
        let got = to_significant(&r.upper, 15);
        check(
            &mut f,
            r.upper_exact && got == printed,
            format!("{a}/{b}: {got} vs {printed}"),
        );
    }
    for (p, want) in [
        (q(1, 2), q(3, 8)),
        (q(1, 5), q(2101, 15625)),
        (q(2, 3), q(46, 81)),
    ] {
        let got = upper_bound(&p).unwrap().upper;
        check(&mut f, got == want, format!("UB({p}) = {got}"));
    }
    verdict(
        "AC-6",
        "upper bound reproduces the 15 plotted dot values",
        &f,
    );
}

#[test]
fn ac07_envelope() {
    let mut f = Vec::new();
    let forms: Vec<_> = [Builtin::S1, Builtin::S2, Builtin::S3, Builtin::S4]
        .into_iter()
        .map(|b| (b, closed(b)))
        .collect();
    for k in 1..100 {
        let p = q(k, 100);
        let vals: Vec<_> = forms
            .iter()
            .map(|(b, v)| (*b, v.eval(&p).unwrap()))
            .collect();
        let best = vals.iter().map(|(_, v)| v.clone()).max().unwrap();
        let winners: Vec<Builtin> = vals
            .iter()
            .filter(|(_, v)| v == &best)
            .map(|(b, _)| *b)
            .collect();
        let ok = match k.cmp(&50) {
            std::cmp::Ordering::Less => winners == [Builtin::S1],
            std::cmp::Ordering::Greater => winners == [Builtin::S3],
            std::cmp::Ordering::Equal => winners.len() == 4,
        };
        check(&mut f, ok, format!("p = {k}/100: argmax {winners:?}"));
    }
    let mut compared = 0;
    for b in 2..=30i64 {
        for a in 1..b {
            if num_integer::gcd(a, b) != 1 {
                continue;
            }
            let p = q(a, b);
            let lower = lower_envelope(&p).unwrap().value;
            let r = upper_bound(&p).unwrap();
            // Past the exact cutoff, compare against p - base^64 * factor:
            // a smaller exponent can only lower the bound.
            let ok = if r.upper_exact {
                lower <= r.upper
            } else {
                let one = BigRational::one();
                let (base, factor) = if p <= q(1, 2) {
                    (&one - &p, p.clone())
                } else {
                    (p.clone(), &one - &p)
                };
                lower <= &p - num_traits::pow(base, 64) * factor
            };
            check(&mut f, ok, format!("lower {lower} above upper at {p}"));
            compared += 1;
        }
    }
    check(&mut f, compared > 250, format!("only {compared} points"));
    verdict(
        "AC-7",
        "envelope switches S1 -> S3 at 1/2 and stays below the upper bound",
        &f,
    );
}

#[test]
fn ac08_truncation_convergence() {
    let mut f = Vec::new();
    for b in [Builtin::S1, Builtin::S2] {
        let mp = builtin_machine(b);
        let v = closed(b);
        let (m, o) = (mp.block_size(), mp.overlap());
        for n in [3usize, 6, 9, 12] {
            let pair = truncate_to_finite(&mp, n).unwrap();
            let counts = evaluate_pair(&pair);
            let k = ((n - m) / (m - o)) as u32;
            for p in [q(1, 3), q(1, 2), q(2, 3)] {
                let gap = (counts.value_at(&p) - v.eval(&p).unwrap()).abs();
                let bound = tail_bound(&mp, &p, k).unwrap();
                check(
                    &mut f,
                    gap <= bound,
                    format!("{b} n={n} p={p}: gap {gap} > {bound}"),
                );
            }
        }
    }
    verdict(
        "AC-8",
        "truncations of S1 and S2 stay within the tail bound",
        &f,
    );
}

#[test]
fn ac09_hill_climb_floor() {
    let mut f = Vec::new();
    let started = Instant::now();
    let half = q(1, 2);
    let threshold = win_probability(
        &truncate_to_finite(&builtin_machine(Builtin::S2), 6).unwrap(),
        &half,
    )
    .unwrap();
    check(
        &mut f,
        threshold == q(179, 512),
        format!("threshold {threshold}"),
    );
    let mut cfg = SearchConfig::hill_climb(6, half.clone(), 1, 50);
    cfg.workers = 4;
    let r = hill_climb(&cfg).unwrap();
    check(
        &mut f,
        r.best_value >= threshold,
        format!("n=6 best {} below {threshold}", r.best_value),
    );
    let mut sym = SearchConfig::hill_climb(3, half, 1, 20);
    sym.symmetric = true;
    let r3 = hill_climb(&sym).unwrap();
    check(
        &mut f,
        r3.best_value == q(22, 64),
        format!("n=3 symmetric best {}", r3.best_value),
    );
    let took = started.elapsed();
    check(
        &mut f,
        took < Duration::from_secs(600),
        format!("took {took:?}"),
    );
    verdict(
        "AC-9",
        "hill climbing reaches the S2 truncation at 6 hats and 22/64 at 3",
        &f,
    );
}

#[test]
#[ignore = "scans 4^14 symmetric tables; run with --ignored"]
fn ac10_symmetric_four_hats() {
    let mut f = Vec::new();
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = SearchConfig::exhaustive(4, q(1, 2), true);
    cfg.workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut opts = CheckpointOptions::new(dir.path().join("full.json"));
    opts.interval = 50_000_000;
    cfg.checkpoint = Some(opts.clone());
    let full = exhaustive_symmetric(&cfg).unwrap();
    check(
        &mut f,
        full.best_value <= q(7, 20),
        format!("best {}", full.best_value),
    );

    opts.path = dir.path().join("split.json");
    opts.stop_after = Some(100_000_000);
    cfg.checkpoint = Some(opts.clone());
    let first = exhaustive_symmetric(&cfg);
    check(
        &mut f,
        matches!(
            first,
            Err(HatError::Interrupted {
                cursor: 100_000_000
            })
        ),
        "first leg was not interrupted at the cursor",
    );
    opts.stop_after = None;
    cfg.checkpoint = Some(opts);
    let resumed = exhaustive_symmetric(&cfg).unwrap();
    check(
        &mut f,
        resumed == full,
        "resumed report differs from the uninterrupted one",
    );
    let line = format!(
        "best {} = {}, optima {:?}",
        full.best_value,
        to_significant(&full.best_value, 6),
        full.optimum_count
    );
    verdict(
        "AC-10",
        &format!("symmetric 4-hat scan stays at or below 7/20 ({line})"),
        &f,
    );
}

#[test]
fn ac11_slopes() {
    let mut f = Vec::new();
    let d = derivative_diagnostics().unwrap();
    check(
        &mut f,
        d.s1_slope_at_zero == q(1, 2),
        format!("V_S1'(0) = {}", d.s1_slope_at_zero),
    );
    check(
        &mut f,
        d.s3_slope_at_one == q(3, 2),
        format!("V_S3'(1) = {}", d.s3_slope_at_one),
    );
    let target = 1.0 - 1.0 / std::f64::consts::E;
    check(
        &mut f,
        (d.upper_slope_at_zero - target).abs() < 1e-2,
        format!("b*UB(1/b) = {}", d.upper_slope_at_zero),
    );
    verdict(
        "AC-11",
        "slopes 1/2 at 0 and 3/2 at 1, upper slope near 1 - 1/e",
        &f,
    );
}

#[test]
fn ac12_monte_carlo() {
    let mut f = Vec::new();
    let started = Instant::now();
    let trials = 1_000_000;
    let s1 = || simulate_machine_pair(&builtin_machine(Builtin::S1), 0.5, trials, 42, 100).unwrap();
    let fw = simulate_machine_pair(
        &builtin_machine(Builtin::FirstWhite),
        0.5,
        trials,
        42,
        10_000,
    )
    .unwrap();
    let t1 =
        simulate_finite_pair(&FinitePair::symmetric(table1_strategy()), 0.5, trials, 42).unwrap();
    let a = s1();
    for (name, r, want) in [
        ("S1", &a, 7.0 / 20.0),
        ("FIRST_WHITE", &fw, 1.0 / 3.0),
        ("table1", &t1, 11.0 / 32.0),
    ] {
        let z = (r.estimate - want).abs() / r.stderr;
        check(
            &mut f,
            z < 5.0,
            format!("{name}: {} is {z:.1} stderr from {want}", r.estimate),
        );
    }
    check(&mut f, s1() == a, "same seed gave a different report");
    let took = started.elapsed();
    check(
        &mut f,
        took < Duration::from_secs(60),
        format!("took {took:?}"),
    );
    verdict(
        "AC-12",
        "simulations of S1, FIRST_WHITE and table1 agree with exact values",
        &f,
    );
}
