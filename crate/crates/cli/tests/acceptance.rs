//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Each check compares library output against
//! naive oracles defined here (set-based closure, ball growing, brute-force
//! subset scans) or against hand-derived closed forms.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::Instant;

use diamlab_core::bounds::BreakDiameter;
use diamlab_core::catalog::{catalog, resolve_group};
use diamlab_core::gensets::{
    enumerate_minimal_gensets, max_diameters, rank, rank_bounds_check, DiameterCertificate,
    SearchOptions, Strategy,
};
use diamlab_core::group::{derived_series, normal_subgroups, quotient, ElemId, FiniteGroup};
use diamlab_core::schreier::{SchreierLevel, SeriesDecomposer};
use diamlab_core::wordlen::{length_table, Token, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---- oracles -------------------------------------------------------------

fn naive_closure(g: &FiniteGroup, gens: &[ElemId]) -> BTreeSet<ElemId> {
    let mut set: BTreeSet<ElemId> = BTreeSet::from([0]);
    loop {
        let grown: BTreeSet<ElemId> = set
            .iter()
            .flat_map(|&a| gens.iter().map(move |&s| (a, s)))
            .map(|(a, s)| g.mul(a, s))
            .collect();
        let before = set.len();
        set.extend(grown);
        if set.len() == before {
            return set;
        }
    }
}

/// Lengths by growing balls `B_{k+1} = B_k ∪ B_k·S`; `u32::MAX` if unreached.
fn ball_lengths(g: &FiniteGroup, gens: &[ElemId], symmetric: bool) -> Vec<u32> {
    let mut steps = gens.to_vec();
    if symmetric {
        steps.extend(gens.iter().map(|&s| g.inv(s)));
    }
    let mut len = vec![u32::MAX; g.len()];
    len[0] = 0;
    let mut ball = vec![0 as ElemId];
    for k in 1.. {
        let mut next = Vec::new();
        for &a in &ball {
            for &s in &steps {
                let b = g.mul(a, s);
                if len[b as usize] == u32::MAX {
                    len[b as usize] = k;
                    next.push(b);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        ball.extend(next);
    }
    len
}

fn ball_diameter(g: &FiniteGroup, gens: &[ElemId], symmetric: bool) -> Option<u32> {
    let len = ball_lengths(g, gens, symmetric);
    len.iter()
        .all(|&d| d != u32::MAX)
        .then(|| *len.iter().max().unwrap())
}

fn evaluate(g: &FiniteGroup, gens: &[ElemId], word: &Word) -> ElemId {
    word.tokens().iter().fold(0, |acc, t: &Token| {
        let x = gens[t.generator as usize];
        g.mul(acc, if t.inverse { g.inv(x) } else { x })
    })
}

/// Max (D, Ds) over every generating subset, scanning all `2^|G|` subsets.
fn brute_force_max(g: &FiniteGroup) -> (u32, u32) {
    let n = g.len();
    let (mut dp, mut ds) = (0, 0);
    for mask in 1u64..(1 << n) {
        let set: Vec<ElemId> = (0..n as ElemId).filter(|&i| mask >> i & 1 == 1).collect();
        if naive_closure(g, &set).len() != n {
            continue;
        }
        dp = dp.max(ball_diameter(g, &set, false).unwrap());
        ds = ds.max(ball_diameter(g, &set, true).unwrap());
    }
    (dp, ds)
}

fn babai_rhs(diam_s: u32, gens: usize, order: usize) -> f64 {
    2.0 * (diam_s as f64 + 1.0) * (gens as f64 + 1.0) * (order as f64).ln()
}

// ---- shared state --------------------------------------------------------

#[derive(Default)]
struct Ledger {
    exact_runs: u64,
    babai_checked: u64,
    babai_violations: u64,
}

impl Ledger {
    fn exact(&mut self, g: &FiniteGroup) -> Result<DiameterCertificate, String> {
        let cert = max_diameters(g, Strategy::Exact, &SearchOptions::default())
            .map_err(|e| format!("{}: {e}", g.name()))?;
        if !cert.exhaustive {
            return Err(format!("{}: search not exhaustive", g.name()));
        }
        self.exact_runs += 1;
        self.babai_checked += cert.babai.checked;
        self.babai_violations += cert.babai.violations;
        Ok(cert)
    }
}

fn group(name: &str) -> FiniteGroup {
    resolve_group(name).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn power(g: &FiniteGroup, n: u32) -> FiniteGroup {
    if n == 1 {
        g.clone()
    } else {
        FiniteGroup::direct_power(g, n, 1 << 20).unwrap()
    }
}

fn elems(g: &FiniteGroup, names: &[&str]) -> Vec<ElemId> {
    names
        .iter()
        .map(|s| {
            g.parse_element(s)
                .unwrap_or_else(|| panic!("no element {s}"))
        })
        .collect()
}

/// `(x,1,…,1), (1,x,1,…)…` for each base generator `x`.
fn coordinate_gens(p: &FiniteGroup, n: u32, gens: &[ElemId]) -> Vec<ElemId> {
    let mut out = Vec::new();
    for slot in 0..n as usize {
        for &x in gens {
            let mut comps = vec![0; n as usize];
            comps[slot] = x;
            out.push(p.encode(&comps));
        }
    }
    out
}

// ---- criteria ------------------------------------------------------------

fn verify_via_cli(n: u32) -> Result<serde_json::Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_diamlab"))
        .args([
            "verify",
            "quaternion",
            "--power",
            &n.to_string(),
            "--threads",
            "1",
        ])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(0), || {
        format!(
            "exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        )
    })?;
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

fn criterion_1(ledger: &mut Ledger) -> Check {
    let start = Instant::now();
    let q8 = group("Q8");
    let (bp, bs) = brute_force_max(&q8);
    ensure((bp, bs) == (3, 2), || {
        format!("brute force gives D={bp}, Ds={bs}")
    })?;
    let mut summary = Vec::new();
    for n in [1u32, 2] {
        let r = verify_via_cli(n)?;
        let nf = n as f64;
        let nn = (n * n) as u64;
        ensure(r["bound_diam"] == 72 * nn, || {
            format!("n={n}: bound_diam {}", r["bound_diam"])
        })?;
        ensure(r["bound_q8"] == 8 * nn + 3 * n as u64, || {
            format!("n={n}: bound_q8 {}", r["bound_q8"])
        })?;
        let expected = 2.0 * nf * (32.0 * nf * nf + 1.0) * (2.0 * nf + 1.0) * 8f64.ln();
        let got = r["bound_pgroup"].as_f64().ok_or("bound_pgroup missing")?;
        ensure((got - expected).abs() <= 1e-12 * expected, || {
            format!("n={n}: bound_pgroup {got} vs {expected}")
        })?;
        ensure(r["exhaustive"] == true, || format!("n={n}: not exhaustive"))?;
        ensure(r["babai_violations"] == 0, || {
            format!("n={n}: per-set inequality violated")
        })?;
        let dp = r["d_positive"].as_u64().unwrap();
        let ds = r["d_symmetric"].as_u64().unwrap();
        if n == 1 {
            ensure((dp, ds) == (bp as u64, bs as u64), || {
                format!("D(Q8)={dp}, Ds(Q8)={ds}")
            })?;
        }
        ensure(
            dp <= 8 * nn + 3 * n as u64 && dp <= 72 * nn && (dp as f64) <= expected,
            || format!("n={n}: D={dp}"),
        )?;
        ensure(ds <= 32 * nn, || format!("n={n}: Ds={ds} above 32n^2"))?;
        for (k, v) in r["verdicts"].as_object().unwrap() {
            ensure(v.is_null() || v == "pass", || format!("n={n}: {k} = {v}"))?;
        }
        summary.push(format!("D(Q8^{n})={dp} Ds={ds}"));
    }
    // The argmax for Q8^2 re-checked with the ball oracle.
    let p = power(&q8, 2);
    let cert = ledger.exact(&p)?;
    let arg = &cert.argmax_positive.elements;
    ensure(naive_closure(&p, arg).len() == 64, || {
        "argmax does not generate".into()
    })?;
    ensure(
        ball_diameter(&p, arg, false) == Some(cert.value_positive),
        || "argmax diameter mismatch".into(),
    )?;
    ensure(arg.len() == 4, || format!("argmax has size {}", arg.len()))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 120.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{}; {secs:.1}s", summary.join(", ")))
}

fn criterion_2(ledger: &mut Ledger) -> Check {
    let cases: &[(&str, &[u32])] = &[
        ("Q8", &[1, 2]),
        ("S3", &[1, 2]),
        ("D4", &[1, 2]),
        ("D5", &[1]),
        ("A4", &[1]),
    ];
    let mut out = Vec::new();
    for &(name, ns) in cases {
        let g = group(name);
        // All five groups have derived length 2: G' is abelian and non-trivial.
        let l = 2u32;
        for &n in ns {
            let cert = ledger.exact(&power(&g, n))?;
            let bound = (4 * n as u64).pow(l) * g.order() as u64 / 4;
            ensure(cert.value_symmetric as u64 <= bound, || {
                format!("{name}^{n}: Ds={} > {bound}", cert.value_symmetric)
            })?;
            out.push(format!("{name}^{n}:{}<={bound}", cert.value_symmetric));
        }
    }
    Ok(out.join(" "))
}

fn criterion_3(ledger: &mut Ledger) -> Check {
    let mut pairs = 0;
    let mut groups = 0;
    for entry in catalog().into_iter().filter(|e| e.expected.order <= 16) {
        let g = entry.build().map_err(|e| e.to_string())?;
        let ds_g = ledger.exact(&g)?.value_symmetric;
        groups += 1;
        for n in normal_subgroups(&g) {
            if n.is_trivial() || n.is_whole(&g) {
                continue;
            }
            let q = quotient(&g, &n).map_err(|e| e.to_string())?;
            let (sub, _) = n.to_group(&g, "N").map_err(|e| e.to_string())?;
            let ds_q = ledger.exact(q.group())?.value_symmetric;
            let ds_n = ledger.exact(&sub)?.value_symmetric;
            let b = BreakDiameter::new(ds_g, ds_q, ds_n);
            let (qq, nn) = (ds_q as u64, ds_n as u64);
            let middle = 2 * qq * nn + qq + nn;
            ensure(b.middle == middle && b.upper == 4 * qq * nn, || {
                "evaluator mismatch".into()
            })?;
            ensure(ds_g as u64 <= middle && middle <= 4 * qq * nn, || {
                format!(
                    "{}: N of order {}: Ds(G)={ds_g}, Ds(G/N)={ds_q}, Ds(N)={ds_n}",
                    entry.name,
                    n.order()
                )
            })?;
            pairs += 1;
        }
    }
    Ok(format!("{groups} groups, {pairs} normal subgroups"))
}

fn criterion_4(ledger: &Ledger) -> Check {
    // Independent re-check on every minimal generating set of a few groups.
    let mut oracle_checked = 0;
    for name in ["Q8", "S3", "D4", "A4", "Z2xQ8", "D6", "Z2^4"] {
        let g = group(name);
        for set in enumerate_minimal_gensets(&g, g.order().ilog2()) {
            let x = &set.elements;
            let d = ball_diameter(&g, x, false).unwrap();
            let ds = ball_diameter(&g, x, true).unwrap();
            let rhs = babai_rhs(ds, x.len(), g.len());
            ensure(d as f64 <= rhs * (1.0 + 1e-9), || {
                format!("{name}: {x:?} diam {d} > {rhs}")
            })?;
            oracle_checked += 1;
        }
    }
    ensure(ledger.babai_violations == 0, || {
        format!("{} violations in exact runs", ledger.babai_violations)
    })?;
    ensure(ledger.babai_checked > 0, || {
        "no generating sets recorded".into()
    })?;
    Ok(format!(
        "{} sets across {} exact runs, {oracle_checked} re-checked by oracle, 0 violations",
        ledger.babai_checked, ledger.exact_runs
    ))
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let q8 = group("Q8");
    let base = elems(&q8, &["i", "j"]);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut words = 0usize;
    let mut bounds = Vec::new();
    for n in 1..=3u32 {
        let p = power(&q8, n);
        let gens = coordinate_gens(&p, n, &base);
        let targets: Vec<ElemId> = if n < 3 {
            p.elements().collect()
        } else {
            (0..1000).map(|_| rng.random_range(0..p.order())).collect()
        };
        let series = derived_series(&p);
        let derived = &series.terms()[1];
        for symmetric in [false, true] {
            let level =
                SchreierLevel::build(&p, derived, &gens, symmetric).map_err(|e| e.to_string())?;
            let deep =
                SeriesDecomposer::new(&p, &gens, &series, symmetric).map_err(|e| e.to_string())?;
            let cap = 72 * (n as u64).pow(2);
            ensure(
                level.certified_bound() <= cap && deep.certified_bound() <= cap,
                || {
                    format!(
                        "n={n}: certified bounds {} / {} above {cap}",
                        level.certified_bound(),
                        deep.certified_bound()
                    )
                },
            )?;
            for &t in &targets {
                let d = level.decompose(&p, t).map_err(|e| e.to_string())?;
                ensure(evaluate(&p, &gens, &d.word) == t, || {
                    format!("n={n}: level word for {t} is wrong")
                })?;
                ensure(p.mul(d.h, d.t) == t && derived.contains(d.h), || {
                    format!("n={n}: bad split of {t}")
                })?;
                ensure(d.word.len() as u64 <= d.certified_bound, || {
                    format!("n={n}: level word too long")
                })?;
                ensure(symmetric || d.word.is_positive(), || {
                    "inverse letter in positive mode".into()
                })?;
                let s = deep.decompose(&p, t).map_err(|e| e.to_string())?;
                ensure(evaluate(&p, &gens, &s.word) == t, || {
                    format!("n={n}: series word for {t} is wrong")
                })?;
                ensure(s.word.len() as u64 <= s.certified_bound, || {
                    format!("n={n}: series word too long")
                })?;
                ensure(symmetric || s.word.is_positive(), || {
                    "inverse letter in positive mode".into()
                })?;
                words += 2;
            }
            bounds.push(format!(
                "{}{}",
                deep.certified_bound(),
                if symmetric { "s" } else { "" }
            ));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!(
        "{words} words; series bounds {}; {secs:.1}s",
        bounds.join("/")
    ))
}

/// No `(k-1)`-subset generates, by scanning subsets with the naive closure.
fn brute_force_rank_at_least(g: &FiniteGroup, k: usize) -> bool {
    fn any_generates(
        g: &FiniteGroup,
        start: ElemId,
        left: usize,
        chosen: &mut Vec<ElemId>,
    ) -> bool {
        if left == 0 {
            return naive_closure(g, chosen).len() == g.len();
        }
        for x in start..g.order() {
            chosen.push(x);
            let hit = any_generates(g, x + 1, left - 1, chosen);
            chosen.pop();
            if hit {
                return true;
            }
        }
        false
    }
    !any_generates(g, 1, k - 1, &mut Vec::new())
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let mut out = Vec::new();
    for (name, expected) in [("S3", 2u32), ("Q8", 4), ("D4", 4)] {
        let p = power(&group(name), 2);
        let r = rank(&p);
        ensure(r == expected, || {
            format!("rank({name}^2) = {r}, expected {expected}")
        })?;
        ensure(brute_force_rank_at_least(&p, expected as usize), || {
            format!("{name}^2 has a smaller generating set")
        })?;
        let report =
            rank_bounds_check(&group(name), 2, 1 << 20, u64::MAX).map_err(|e| e.to_string())?;
        ensure(
            report.rank_power == r && report.lower_holds && report.upper_holds,
            || format!("{name}: {report:?}"),
        )?;
        ensure(2 * report.beta <= r && r <= 2 * report.alpha, || {
            format!("{name}: inequality fails")
        })?;
        out.push(format!("rank({name}^2)={r}"));
    }
    for name in ["Q8", "D4", "Z4xZ2"] {
        let g = group(name);
        let (r1, r2) = (rank(&g), rank(&power(&g, 2)));
        ensure(r2 == 2 * r1, || {
            format!("{name}: rank(G^2)={r2}, rank(G)={r1}")
        })?;
        let report = rank_bounds_check(&g, 2, 1 << 20, u64::MAX).map_err(|e| e.to_string())?;
        ensure(report.nilpotent && report.all_hold(), || {
            format!("{name}: {report:?}")
        })?;
    }
    out.push("nilpotent Q8, D4, Z4xZ2: rank(G^2)=2rank(G)".into());
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 120.0, || format!("took {secs:.1}s"))?;
    Ok(format!("{}; {secs:.1}s", out.join(", ")))
}

fn criterion_7(ledger: &mut Ledger) -> Check {
    let mut compared = 0;
    for entry in catalog().into_iter().filter(|e| e.expected.order <= 12) {
        let g = entry.build().map_err(|e| e.to_string())?;
        let cert = ledger.exact(&g)?;
        let brute = brute_force_max(&g);
        ensure((cert.value_positive, cert.value_symmetric) == brute, || {
            format!(
                "{}: exact ({}, {}) vs brute force {brute:?}",
                entry.name, cert.value_positive, cert.value_symmetric
            )
        })?;
        compared += 1;
    }
    let mut pool: Vec<FiniteGroup> = catalog()
        .iter()
        .map(|e| e.build().unwrap())
        .filter(|g| g.order() <= 64)
        .collect();
    pool.push(power(&group("Q8"), 2));
    pool.push(power(&group("S3"), 2));
    pool.push(power(&group("Z2^3"), 2));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let g = &pool[rng.random_range(0..pool.len())];
        let k = rng.random_range(1..=4);
        let gens: Vec<ElemId> = (0..k).map(|_| rng.random_range(0..g.order())).collect();
        for symmetric in [false, true] {
            let lib = length_table(g, &gens, symmetric);
            ensure(
                lib.lengths() == ball_lengths(g, &gens, symmetric).as_slice(),
                || {
                    format!(
                        "{} {gens:?} symmetric={symmetric}: BFS differs from ball oracle",
                        g.name()
                    )
                },
            )?;
        }
    }
    Ok(format!(
        "{compared} groups vs brute force; 50 random pairs vs ball oracle"
    ))
}

fn criterion_8(ledger: &mut Ledger) -> Check {
    let mut out = Vec::new();
    for (name, order, rank_a) in [("Z5", 5u64, 1u64), ("Z6", 6, 1), ("Z2xZ2", 4, 2)] {
        let g = group(name);
        ensure(rank(&g) as u64 == rank_a, || format!("{name}: rank"))?;
        let d = ledger.exact(&g)?.value_positive as u64;
        ensure(d == order - rank_a, || {
            format!("D({name}) = {d}, expected {}", order - rank_a)
        })?;
        out.push(format!("D({name})={d}"));
    }
    for (name, n, order, rank_a) in [
        ("Z2", 3u32, 2u64, 1u64),
        ("Z2^3", 1, 8, 3),
        ("Z5", 2, 5, 1),
        ("Z6", 2, 6, 1),
        ("Z2", 2, 2, 1),
        ("Z2xZ2", 2, 4, 2),
    ] {
        let p = power(&group(name), n);
        let d = ledger.exact(&p)?.value_positive as u64;
        let bound = n as u64 * (order - rank_a);
        ensure(d <= bound, || format!("D({name}^{n}) = {d} > {bound}"))?;
        let shown = if n == 1 {
            name.to_string()
        } else {
            format!("({name})^{n}")
        };
        out.push(format!("D({shown})={d}<={bound}"));
    }
    Ok(out.join(" "))
}

fn main() {
    let mut ledger = Ledger::default();
    let mut results: Vec<(u32, &str, Check)> = vec![
        (1, "Q8 worked example via CLI", criterion_1(&mut ledger)),
        (2, "symmetric power bound", criterion_2(&mut ledger)),
        (3, "break-diameter inequalities", criterion_3(&mut ledger)),
        (5, "Schreier decompositions", criterion_5()),
        (6, "rank suite", criterion_6()),
        (7, "oracle equivalence", criterion_7(&mut ledger)),
        (8, "abelian bound", criterion_8(&mut ledger)),
    ];
    // Runs last so it sees every exact search above.
    results.push((4, "per-set diameter inequality", criterion_4(&ledger)));
    results.sort_by_key(|r| r.0);
    let mut failed = 0;
    for (id, name, result) in &results {
        match result {
            Ok(detail) => println!("criterion {id} PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {id} FAIL  {name}: {why}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
