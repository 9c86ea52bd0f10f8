//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use commprob::algebra::{all_subgroups, center, derived_subgroup, normal_subgroups, quotient, Fingerprint, GroupTable};
use commprob::commprob::{
    abelian_decomposition, check_bounds, pr_by_classes, pr_central_pgroup_formula, pr_direct, pr_subgroup,
    verify_special_forms, BoundContext, BoundStatus,
};
use commprob::constructions::{corpus, make, FamilySpec};
use commprob::egyptian::{candidate_gap, in_candidate_set, max_below, solve_exact};
use commprob::exec::Execution;
use commprob::survey::{self, scan_interval, Filter, Interval, SurveyOptions, Verdict};
use commprob::Rational;

use common::{brute_solutions, exists_in_open, Q};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Option<u64>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn r(a: i64, b: i64) -> Rational {
    Rational::new(a, b)
}

fn q_of(v: &Rational) -> Q {
    Q::parse(&v.to_string())
}

fn build(f: &str, p: &[u64]) -> GroupTable {
    make(&FamilySpec::new(f, p)).unwrap().0
}

fn prime_power(n: u64) -> Option<u64> {
    let p = (2..=n).find(|d| n.is_multiple_of(*d))?;
    let mut m = n;
    while m.is_multiple_of(p) {
        m /= p;
    }
    (m == 1).then_some(p)
}

fn c1_value_table() -> Outcome {
    for n in 2..=30u64 {
        let g = build("dihedral", &[n]);
        let expect = if n % 2 == 0 { Rational::new(n + 6, 4 * n) } else { Rational::new(n + 3, 4 * n) };
        let got = pr_direct(&g);
        ensure(got == expect, || format!("D{n}: got {got}, expected {expect}"))?;
    }
    for (f, n, v) in [("alternating", 4, r(1, 3)), ("symmetric", 4, r(5, 24)), ("alternating", 5, r(1, 12))] {
        let got = pr_direct(&build(f, &[n]));
        ensure(got == v, || format!("{f}({n}): got {got}, expected {v}"))?;
    }
    Ok("D2..D30, A4, S4, A5 exact".into())
}

fn c2_dual_evaluator() -> Outcome {
    let c = corpus(128);
    ensure(c.len() >= 80, || format!("corpus(128) has only {} groups", c.len()))?;
    for (g, s) in &c {
        let (a, b) = (pr_direct(g), pr_by_classes(g));
        ensure(a == b, || format!("{}: direct {a} vs classes {b}", s.label()))?;
    }
    Ok(format!("{} groups agree", c.len()))
}

fn c3_multiplicativity() -> Outcome {
    let c = corpus(128);
    let mut pairs = Vec::new();
    for i in 0..c.len() {
        for j in i..c.len() {
            if c[i].0.order() * c[j].0.order() <= 4096 {
                pairs.push((i, j));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let picked: Vec<_> = pairs.choose_multiple(&mut rng, 50).copied().collect();
    ensure(picked.len() == 50, || "fewer than 50 eligible pairs".into())?;
    for (i, j) in picked {
        let (a, b) = (&c[i].0, &c[j].0);
        let p = GroupTable::direct_product(a, b).map_err(|e| e.to_string())?;
        let lhs = pr_direct(&p);
        let rhs = pr_direct(a) * pr_direct(b);
        ensure(lhs == rhs, || format!("{} x {}: {lhs} != {rhs}", c[i].1.label(), c[j].1.label()))?;
    }
    Ok("50 seeded pairs".into())
}

fn c4_central_formula() -> Outcome {
    let mut checked = 0;
    let mut saw_ex3 = false;
    for (g, s) in corpus(125) {
        let Some(p) = prime_power(g.order() as u64) else { continue };
        if ![2, 3, 5].contains(&p) {
            continue;
        }
        if !derived_subgroup(&g).is_subgroup_of(&center(&g)) {
            continue;
        }
        let (v, _) = pr_central_pgroup_formula(&g).map_err(|e| format!("{}: {e}", s.label()))?;
        let actual = pr_direct(&g);
        ensure(v == actual, || format!("{}: formula {v}, brute force {actual}", s.label()))?;
        if s.label() == "Ex3^3" {
            saw_ex3 = true;
            ensure(v == r(11, 27), || format!("Ex3^3 gave {v}"))?;
        }
        checked += 1;
    }
    ensure(saw_ex3, || "extraspecial(3,1) missing from corpus".into())?;
    Ok(format!("{checked} p-groups with central derived subgroup"))
}

fn c5_special_forms() -> Outcome {
    let cases = [
        ("dihedral", 4, "derived-2", Some(1), r(5, 8)),
        ("symmetric", 3, "derived-3-s3", None, r(1, 2)),
        ("dihedral", 8, "derived-4", Some(0), r(7, 16)),
    ];
    for (f, n, pat, s, v) in cases {
        let g = build(f, &[n]);
        let checks = verify_special_forms(&g).map_err(|e| e.to_string())?;
        let c =
            checks.iter().find(|c| c.pattern == pat).ok_or_else(|| format!("{f}({n}): pattern {pat} not detected"))?;
        ensure(c.matches && c.s == s && c.predicted.as_ref() == Some(&v) && pr_direct(&g) == v, || {
            format!("{f}({n}): {c:?}")
        })?;
    }
    Ok("D4 (5/8, s=1), S3 (1/2), D8 (7/16, s=0)".into())
}

fn c6_decomposition() -> Outcome {
    let mut pairs = 0;
    for (g, s) in corpus(64) {
        for h in normal_subgroups(&g).map_err(|e| e.to_string())? {
            if !h.is_abelian() {
                continue;
            }
            let f = abelian_decomposition(&g, &h).map_err(|e| format!("{}: {e}", s.label()))?;
            let ho = f.h_order;
            for i in 0..f.n as usize {
                for j in 0..f.n as usize {
                    let full = ho * ho * f.pair_sizes[i][j] / (f.sizes[i] * f.sizes[j]);
                    let sz = f.s_sizes[i][j];
                    ensure(sz == 0 || sz == full, || format!("{}: |S_{i}{j}| = {sz} not in {{0, {full}}}", s.label()))?;
                }
            }
            ensure(f.reconstruct() == pr_direct(&g), || format!("{}: reconstruction differs", s.label()))?;
            pairs += 1;
        }
    }
    let grid = |f: &str, n: u64, order: usize| -> Result<Vec<u64>, String> {
        let g = build(f, &[n]);
        let h = normal_subgroups(&g)
            .unwrap()
            .into_iter()
            .find(|h| h.order() == order && h.is_abelian() && Fingerprint::of(&h.to_table()).is_cyclic())
            .ok_or("no cyclic normal subgroup")?;
        let f = abelian_decomposition(&g, &h).map_err(|e| e.to_string())?;
        Ok(f.s_sizes.into_iter().flatten().collect())
    };
    ensure(grid("symmetric", 3, 3)? == vec![9, 3, 3, 3], || "S3 grid".into())?;
    ensure(grid("dihedral", 4, 4)? == vec![16, 8, 8, 8], || "D4 grid".into())?;
    Ok(format!("{pairs} (G, H) pairs; S3 and D4 grids reproduced"))
}

fn c7_bounds() -> Outcome {
    let mut evaluated = 0;
    for (g, s) in corpus(128) {
        let ctx = BoundContext { min_degree: s.expected_d, ..Default::default() };
        let rep = check_bounds(&g, &ctx);
        if let Some(v) = rep.violations().next() {
            return Err(format!("{}: {} violated ({:?})", s.label(), v.id, v));
        }
        let must = |id: &str| rep.bound(id).map(|b| b.status == BoundStatus::Holds).unwrap_or(false);
        if g.order() >= 3 {
            ensure(must("erdos-turan"), || format!("{}: erdos-turan not evaluated", s.label()))?;
        }
        ensure(must("fitting") && must("elementary"), || format!("{}: fitting/elementary not evaluated", s.label()))?;
        if !g.is_abelian() {
            ensure(must("gustafson") && must("gustafson-equality"), || format!("{}: gustafson", s.label()))?;
            // equality iff G/Z is the Klein four-group, recomputed here
            let qz = quotient(&g, &center(&g)).unwrap();
            let klein = qz.order() == 4 && Fingerprint::of(&qz).exponent == 2;
            ensure((pr_direct(&g) == r(5, 8)) == klein, || format!("{}: equality case", s.label()))?;
            if s.expected_d.is_some() {
                ensure(must("degree-lower") && must("degree-upper"), || format!("{}: degree bounds", s.label()))?;
            }
        }
        evaluated += 1;
    }
    let mut normal_pairs = 0;
    let mut subgroups = 0;
    for (g, s) in corpus(64) {
        let pr = pr_direct(&g);
        for h in all_subgroups(&g).map_err(|e| e.to_string())? {
            let ph = pr_subgroup(&h);
            ensure(ph >= pr, || format!("{}: subgroup of order {} has Pr {ph} < {pr}", s.label(), h.order()))?;
            subgroups += 1;
        }
        for n in normal_subgroups(&g).map_err(|e| e.to_string())? {
            let ctx = BoundContext { normal: Some(n.members().to_vec()), skip_fitting: true, ..Default::default() };
            let rep = check_bounds(&g, &ctx);
            for id in ["orbit", "quotient"] {
                ensure(rep.bound(id).map(|b| b.status) == Some(BoundStatus::Holds), || {
                    format!("{} with |N| = {}: {id} {:?}", s.label(), n.order(), rep.bound(id))
                })?;
            }
            normal_pairs += 1;
        }
    }
    Ok(format!("{evaluated} groups, {subgroups} (G, H) and {normal_pairs} (G, N) pairs, zero violations"))
}

fn c8_solver() -> Outcome {
    let three = solve_exact(3, &Rational::one()).map_err(|e| e.to_string())?;
    ensure(three.len() == 3, || format!("solve_exact(3, 1) gave {}", three.len()))?;
    let mut targets = BTreeSet::new();
    for d in 1..=24u64 {
        for n in 1..=4 * d {
            if num_integer::gcd(n, d) == 1 {
                targets.insert((n, d));
            }
        }
    }
    let targets: Vec<_> = targets.into_iter().collect();
    let mut compared = 0;
    for k in 1..=4usize {
        let mismatches: Vec<String> = commprob::exec::map_ordered(Execution::Parallel, &targets, |&(n, d)| {
            if n > k as u64 * d {
                return None;
            }
            let got: Vec<Vec<u64>> =
                solve_exact(k, &Rational::new(n, d)).unwrap().into_iter().map(|m| m.terms).collect();
            let want = brute_solutions(k, n, d);
            (got != want).then(|| format!("k={k}, q={n}/{d}: {} vs {} solutions", got.len(), want.len()))
        })
        .into_iter()
        .flatten()
        .collect();
        ensure(mismatches.is_empty(), || mismatches.join("; "))?;
        compared += targets.iter().filter(|&&(n, d)| n <= k as u64 * d).count();
    }
    Ok(format!("{compared} (n, q) cases match the brute force"))
}

/// `v` is a sum of `n` unit fractions and nothing of that form lies in `(v, l)`.
fn check_gap(n: usize, l: &Rational, expect: Option<(Rational, Rational)>) -> Result<(), String> {
    let c = max_below(n, l).map_err(|e| e.to_string())?;
    let v = c.max_below.clone().unwrap();
    if let Some((ev, eps)) = expect {
        ensure(v == ev && c.epsilon == eps, || format!("max_below({n}, {l}) = {v}, eps {}", c.epsilon))?;
    }
    let w = c.witness.unwrap();
    let sum = w.terms.iter().fold(Q::new(0, 1), |acc, &x| acc + Q::unit(x as i128));
    ensure(w.terms.len() == n && sum == q_of(&v), || format!("witness {:?} does not sum to {v}", w.terms))?;
    ensure(!exists_in_open(n, q_of(&v), q_of(l), 1), || format!("element found in ({v}, {l}) for n={n}"))
}

fn c9_gap_certificates() -> Outcome {
    check_gap(1, &r(1, 2), Some((r(1, 3), r(1, 6))))?;
    check_gap(2, &r(1, 1), Some((r(5, 6), r(1, 6))))?;
    check_gap(2, &r(1, 2), Some((r(10, 21), r(1, 42))))?;
    let mut probes = 0;
    for n in 1..=3usize {
        for d in 2..=12i64 {
            for a in 1..d {
                if num_integer::gcd(a, d) == 1 {
                    check_gap(n, &r(a, d), None)?;
                    probes += 1;
                }
            }
        }
    }
    Ok(format!("3 frozen certificates plus {probes} probes verified by exhaustive scan"))
}

fn no_candidate_between(n: u64, lo: &Rational, hi: &Rational) -> bool {
    let n2 = Q::new((n * n) as i128, 1);
    let one = Q::new(1, 1);
    let (slo, shi) = (n2 * q_of(lo) - one, n2 * q_of(hi) - one);
    // s = 0 gives 1/n²
    let zero_inside = Q::new(0, 1) > slo && Q::new(0, 1) < shi;
    !zero_inside && (1..n * n).all(|m| !exists_in_open(m as usize, slo, shi, 1))
}

fn c10_candidate_spectrum() -> Outcome {
    for (l, v, eps) in [(r(5, 8), r(13, 21), r(1, 168)), (r(1, 2), r(83, 168), r(1, 168))] {
        let g = candidate_gap(2, &l).map_err(|e| e.to_string())?;
        ensure(g.max_below == v && g.epsilon == eps, || {
            format!("candidate_gap(2, {l}) = {}, {}", g.max_below, g.epsilon)
        })?;
        let xs = g.x_list.iter().fold(Q::new(0, 1), |acc, &x| acc + Q::unit(x as i128));
        ensure(xs * Q::new(1, 4) == q_of(&v), || format!("x_list {:?} does not give {v}", g.x_list))?;
        ensure(no_candidate_between(2, &v, &l), || format!("candidate found in ({v}, {l})"))?;
    }
    let mut groups = 0;
    for (g, s) in corpus(128) {
        let half = g.order() / 2;
        if g.order() % 2 != 0 {
            continue;
        }
        let has = g.is_abelian()
            || normal_subgroups(&g).map_err(|e| e.to_string())?.iter().any(|h| h.order() == half && h.is_abelian());
        if !has {
            continue;
        }
        let pr = pr_direct(&g);
        ensure(in_candidate_set(2, &pr).map_err(|e| e.to_string())?, || {
            format!("{}: Pr = {pr} outside the index-2 candidate set", s.label())
        })?;
        groups += 1;
    }
    Ok(format!("both gaps certified; {groups} index-2 groups inside the candidate set"))
}

fn c11_scans() -> Outcome {
    let rep = survey::survey(&survey::corpus_entries(128), None, &SurveyOptions::default());
    ensure(rep.failed().count() == 0, || format!("{} failed rows", rep.failed().count()))?;
    let a = scan_interval(&rep, &Interval::open(r(7, 16), r(1, 2)).unwrap(), None);
    let b = scan_interval(&rep, &Interval::open(r(5, 8), Rational::one()).unwrap(), Some(&Filter::Nonabelian));
    let seven = survey::ingest(Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/seven_groups.jsonl")))
        .map_err(|e| e.to_string())?;
    let srep = survey::survey(&seven, Some(&Filter::PGroup(Some(7))), &SurveyOptions::default());
    let c = scan_interval(&srep, &Interval::closed(r(5, 2401), r(1, 343)).unwrap(), None);
    for (what, f) in [("(7/16, 1/2)", &a), ("(5/8, 1) nonabelian", &b), ("[5/2401, 1/343] 7-groups", &c)] {
        ensure(f.verdict == Verdict::Empty, || format!("{what}: {} {:?}", f.summary(), f.violations))?;
    }
    Ok(format!("(7/16, 1/2): {}; (5/8, 1): {}; [5/7^4, 1/7^3]: {}", a.summary(), b.summary(), c.summary()))
}

fn c12_determinism() -> Outcome {
    let entries = survey::corpus_entries(128);
    let serial =
        survey::survey(&entries, None, &SurveyOptions { exec: Execution::Serial, jobs: 1, ..Default::default() });
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(4).max(2);
    let parallel = survey::survey(
        &entries,
        None,
        &SurveyOptions { exec: Execution::Parallel, jobs: workers, ..Default::default() },
    );
    ensure(serial.to_json() == parallel.to_json(), || "JSON reports differ".into())?;
    ensure(serial.to_csv() == parallel.to_csv(), || "CSV reports differ".into())?;
    Ok(format!("{} rows byte-identical (1 vs {workers} workers)", serial.rows.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("closed-form value table", c1_value_table, Some(5)),
        ("dual-evaluator oracle", c2_dual_evaluator, Some(60)),
        ("multiplicativity", c3_multiplicativity, None),
        ("central p-group formula", c4_central_formula, None),
        ("special forms", c5_special_forms, None),
        ("abelian normal decomposition", c6_decomposition, None),
        ("bound suite", c7_bounds, None),
        ("unit-fraction solver", c8_solver, Some(30)),
        ("gap certificates", c9_gap_certificates, None),
        ("candidate spectrum", c10_candidate_spectrum, None),
        ("gap scans", c11_scans, None),
        ("survey determinism", c12_determinism, None),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let took = start.elapsed();
        let out = match (out, limit) {
            (Ok(_), Some(s)) if took > Duration::from_secs(*s) => Err(format!("took {took:.1?}, limit {s}s")),
            (o, _) => o,
        };
        let (tag, detail) = match &out {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] criterion {:>2}: {name} ({took:.2?}): {detail}", i + 1);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
