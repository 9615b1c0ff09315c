//! Acceptance suite. Each criterion prints one PASS/FAIL line with its
//! runtime and budget; the process fails if any criterion fails.

use std::time::{Duration, Instant};

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use zhu_cli::{execute, Cli, EXIT_OK};
use zhu_core::linalg::{Matrix, SpanBasis, SparseVec};
use zhu_core::products::{delta_fn, epsilon_fn, star_bar};
use zhu_core::scalar::{factorial, frac, int, sign};
use zhu_core::voa::{
    basis_upto, nth_product, vacuum, virasoro_mode, Automorphism, FreeBoson, VoaContext,
};
use zhu_core::GradeIndex;

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn run_cli(args: &[&str]) -> Result<(i32, Value, String), String> {
    let cli = Cli::try_parse_from(std::iter::once("zhu").chain(args.iter().copied()))
        .map_err(|e| e.to_string())?;
    let out = execute(&cli);
    let text = out.report.ok_or_else(|| out.error.unwrap_or_default())?;
    let value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    Ok((out.code, value, text))
}

fn bareiss_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let (n, m) = (a.len(), a[0].len());
    let (mut rank, mut prev) = (0, 1i128);
    for col in 0..m {
        let Some(piv) = (rank..n).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        for r in rank + 1..n {
            for c in col + 1..m {
                a[r][c] = (a[rank][col] * a[r][c] - a[r][col] * a[rank][c]) / prev;
            }
            a[r][col] = 0;
        }
        prev = a[rank][col];
        rank += 1;
    }
    rank
}

fn foundation() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..200 {
        let (nr, nc) = (rng.gen_range(1..9), rng.gen_range(1..10));
        let mut rows: Vec<Vec<i64>> = (0..nr)
            .map(|_| {
                (0..nc)
                    .map(|_| {
                        if rng.gen_bool(0.4) {
                            rng.gen_range(-5..=5)
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        if nr > 1 {
            let dep = (0..nc).map(|j| 2 * rows[0][j] - rows[1][j]).collect();
            rows.push(dep);
        }
        let mut span = SpanBasis::new();
        let sparse = |r: &[i64]| -> SparseVec<usize> {
            r.iter()
                .enumerate()
                .filter(|(_, x)| **x != 0)
                .map(|(j, x)| (j, int(*x)))
                .collect()
        };
        for r in &rows {
            span.insert(&sparse(r));
        }
        let a = Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|x| int(*x)).collect())
                .collect(),
        )
        .unwrap();
        let rank = bareiss_rank(&rows);
        ensure(span.rank() == rank && a.rank() == rank, || {
            format!("case {case}: rank")
        })?;
        ensure(a.kernel().len() + rank == nc, || {
            format!("case {case}: rank + nullity")
        })?;
        let mut x = SparseVec::new();
        for r in &rows {
            x.axpy(&int(rng.gen_range(-3..=3)), &sparse(r));
        }
        let cert = span
            .membership_certificate(&x)
            .ok_or_else(|| format!("case {case}: no certificate"))?;
        ensure(span.recombine(&cert) == x, || {
            format!("case {case}: recombination")
        })?;
    }
    Ok("200 systems".into())
}

fn voa_axioms() -> Verdict {
    let alg = FreeBoson::new(Automorphism::Trivial);
    let mut checked = 0usize;
    for w in basis_upto(&alg, 6) {
        let v = SparseVec::unit(w.clone());
        for m in -6i64..=6 {
            for n in -6i64..=6 {
                let lhs = FreeBoson::heis_mode(m, &FreeBoson::heis_mode(n, &v))
                    .sub(&FreeBoson::heis_mode(n, &FreeBoson::heis_mode(m, &v)));
                let want = if m + n == 0 {
                    v.scaled(&int(m))
                } else {
                    SparseVec::new()
                };
                ensure(lhs == want, || format!("[h({m}), h({n})] on {w}"))?;
                checked += 1;
                if m.abs() <= 3 && n.abs() <= 3 {
                    let lhs = virasoro_mode(&alg, m, &virasoro_mode(&alg, n, &v))
                        .sub(&virasoro_mode(&alg, n, &virasoro_mode(&alg, m, &v)));
                    let mut rhs = virasoro_mode(&alg, m + n, &v).scaled(&int(m - n));
                    if m + n == 0 {
                        rhs.axpy(&frac(m * m * m - m, 12), &v);
                    }
                    ensure(lhs == rhs, || format!("[L({m}), L({n})] on {w}"))?;
                    checked += 1;
                }
            }
        }
    }
    let words = basis_upto(&alg, 4);
    for a in &words {
        for b in &words {
            let (u, v) = (SparseVec::unit(a.clone()), SparseVec::unit(b.clone()));
            for n in -3i64..=4 {
                let mut rhs = SparseVec::new();
                for j in 0..12u32 {
                    let mut term = nth_product(&alg, &v, n + j as i64, &u);
                    for _ in 0..j {
                        term = virasoro_mode(&alg, -1, &term);
                    }
                    rhs.axpy(&(sign(n + j as i64 + 1) / factorial(j)), &term);
                }
                ensure(nth_product(&alg, &u, n, &v) == rhs, || {
                    format!("skew {a}_{n} {b}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} equalities"))
}

fn delta_epsilon() -> Verdict {
    let mut checked = 0;
    for t in 1..=6u32 {
        for i1 in 0..t {
            for i2 in 0..t {
                for i3 in 0..t {
                    let r = (i2 + t - i3) % t;
                    let direct = match i1 as i64 + i3 as i64 - i2 as i64 {
                        d if d >= t as i64 => 1,
                        d if d >= 0 => 0,
                        _ => -1,
                    };
                    let via_delta = -1 + delta_fn(i1, r, t) + delta_fn(i3, t - r, t);
                    let e = epsilon_fn(i1, i2, i3, t);
                    ensure(e == direct && e == via_delta, || {
                        format!("T = {t}, i = ({i1}, {i2}, {i3})")
                    })?;
                    checked += 1;
                }
            }
            for r in 0..=t {
                let want = (i1 >= r && r != t) as i64;
                ensure(delta_fn(i1, r, t) == want, || {
                    format!("delta_{i1}({r}), T = {t}")
                })?;
            }
        }
    }
    Ok(format!("{checked} triples"))
}

fn identity_element() -> Verdict {
    let mut checked = 0;
    for aut in [Automorphism::Trivial, Automorphism::Theta] {
        let ctx = VoaContext::new(FreeBoson::new(aut));
        let t = aut.order();
        let grades: Vec<GradeIndex> = (0..=2)
            .flat_map(|l| (0..t).map(move |i| GradeIndex::new(l, i, t)))
            .collect();
        let one = vacuum(ctx.algebra());
        for w in basis_upto(ctx.algebra(), 5) {
            let u = SparseVec::unit(w.clone());
            for m in &grades {
                for n in &grades {
                    ensure(star_bar(&ctx, &one, &u, m, n) == u, || {
                        format!("{aut:?}: 1 *bar_({m},{n}) {w}")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} products"))
}

fn lemma_suite() -> Verdict {
    let (code, report, _) = run_cli(&["verify", "--aut", "theta", "--ids", "all"])?;
    let records = report["result"]["records"]
        .as_array()
        .cloned()
        .unwrap_or_default();
    ensure(records.len() == 11, || "expected 11 records".into())?;
    let mut worst = 0;
    for r in &records {
        let id = r["id"].as_str().unwrap_or("?");
        ensure(r["found"] == true, || {
            format!("{id} not certified: {}", r["failures"])
        })?;
        let b = r["B"].as_u64().unwrap_or(u64::MAX);
        ensure(b <= 8, || format!("{id} needed B = {b}"))?;
        worst = worst.max(b);
    }
    ensure(code == EXIT_OK, || format!("exit code {code}"))?;
    let samples: u64 = records
        .iter()
        .map(|r| r["samples"].as_u64().unwrap_or(0))
        .sum();
    Ok(format!("11 identities, {samples} samples, max B = {worst}"))
}

fn zhu_dimensions() -> Verdict {
    for w in 0..=5u32 {
        let ws = w.to_string();
        let (_, r, _) = run_cli(&["dims", "--aut", "trivial", "--W", &ws])?;
        let dim = r["result"]["table"]["dim"].as_u64();
        ensure(dim == Some(w as u64 + 1), || {
            format!("trivial W = {w}: dim {dim:?}")
        })?;
        ensure(r["result"]["table"]["stable"] == true, || {
            format!("trivial W = {w} unstable")
        })?;

        let (_, r, _) = run_cli(&["dims", "--aut", "theta", "--W", &ws, "--structure"])?;
        let dim = r["result"]["table"]["dim"].as_u64();
        ensure(dim == Some(1), || format!("theta W = {w}: dim {dim:?}"))?;
        if w >= 2 {
            let omega = &r["result"]["structure"]["omega"];
            let identity = &r["result"]["structure"]["identity"];
            ensure(identity[0] == "1/1" && omega[0] == "1/16", || {
                format!("theta W = {w}: omega {omega}, identity {identity}")
            })?;
        }
    }
    Ok("W = 0..5, omega = 1/16".into())
}

struct VermaRun {
    report: Value,
    code: i32,
}

fn verma_run() -> Result<VermaRun, String> {
    let (code, report, _) = run_cli(&["verma", "--aut", "theta", "--levels", "3/2", "--L", "2"])?;
    Ok(VermaRun { report, code })
}

fn check<'a>(report: &'a Value, name: &str) -> Result<&'a Value, String> {
    report["result"]["checks"]
        .as_array()
        .and_then(|cs| cs.iter().find(|c| c["name"] == name))
        .ok_or_else(|| format!("no {name} record"))
}

fn verma_suite(run: &VermaRun) -> Verdict {
    let names = [
        "o_kills_relations",
        "vacuum_identity",
        "commutator",
        "associativity",
        "omega_containment",
        "omega_negative_control",
        "well_defined",
        "o_factorization",
    ];
    let mut cases = 0;
    for name in names {
        let c = check(&run.report, name)?;
        ensure(c["passed"] == true, || format!("{name}: {}", c["failures"]))?;
        cases += c["cases"].as_u64().unwrap_or(0);
    }
    ensure(run.code == EXIT_OK, || format!("exit code {}", run.code))?;
    let dims: Vec<u64> = run.report["result"]["levels"]
        .as_array()
        .map(|ls| ls.iter().filter_map(|l| l["dim"].as_u64()).collect())
        .unwrap_or_default();
    Ok(format!("{cases} cases, level dims {dims:?}"))
}

fn pairing_suite(run: &VermaRun) -> Verdict {
    for name in ["pairing_block_diagonal", "pairing_invariance"] {
        let c = check(&run.report, name)?;
        ensure(c["passed"] == true, || format!("{name}: {}", c["failures"]))?;
    }
    let vectors = &run.report["result"]["invariance_vectors"];
    ensure(vectors.as_array().map_or(0, |v| v.len()) >= 3, || {
        "too few vectors".into()
    })?;
    let radicals: Vec<u64> = run.report["result"]["pairing"]
        .as_array()
        .map(|ps| {
            ps.iter()
                .filter_map(|p| p["radical_dim"].as_u64())
                .collect()
        })
        .unwrap_or_default();
    ensure(
        radicals.len() == 4 && radicals.iter().all(|r| *r == 0),
        || format!("radical dims {radicals:?}"),
    )?;
    Ok(format!("radical dims {radicals:?}"))
}

fn dimension_cross_check(run: &VermaRun) -> Verdict {
    let rows = run.report["result"]["dimension_identity"]
        .as_array()
        .cloned()
        .unwrap_or_default();
    ensure(rows.len() == 4, || format!("{} levels", rows.len()))?;
    for r in &rows {
        ensure(r["equal"] == true, || format!("level {}: {r}", r["n"]))?;
    }
    let pairs: Vec<String> = rows
        .iter()
        .map(|r| format!("{}={}", r["bimodule_dim"], r["module_sum"]))
        .collect();
    Ok(pairs.join(", "))
}

fn determinism() -> Verdict {
    let suites: [&[&str]; 3] = [
        &[
            "dims", "--aut", "theta", "--n", "1/2", "--W", "3", "--level", "both",
        ],
        &["verify", "--aut", "theta", "--samples", "6", "--seed", "11"],
        &[
            "verma",
            "--aut",
            "theta",
            "--levels",
            "1",
            "--samples",
            "12",
            "--seed",
            "5",
        ],
    ];
    for args in suites {
        let (_, _, a) = run_cli(args)?;
        let (_, _, b) = run_cli(args)?;
        ensure(a == b, || format!("{} differs between runs", args[0]))?;
    }
    Ok("dims, verify, verma".into())
}

/// `spent` is time already charged to the criterion by shared work.
fn report(
    id: u32,
    name: &str,
    budget: Duration,
    spent: Duration,
    f: impl FnOnce() -> Verdict,
) -> bool {
    let start = Instant::now();
    let verdict = f();
    let took = start.elapsed() + spent;
    let (ok, detail) = match verdict {
        Ok(d) if took <= budget => (true, d),
        Ok(d) => (false, format!("{d}; over budget")),
        Err(e) => (false, e),
    };
    println!(
        "[{}] {id:>2} {name}: {detail} ({:.1}s of {}s)",
        if ok { "PASS" } else { "FAIL" },
        took.as_secs_f64(),
        budget.as_secs()
    );
    ok
}

fn main() {
    let secs = Duration::from_secs;
    let mut ok = vec![
        report(
            1,
            "exact linear algebra",
            secs(5),
            Duration::ZERO,
            foundation,
        ),
        report(
            2,
            "vertex algebra axioms",
            secs(60),
            Duration::ZERO,
            voa_axioms,
        ),
        report(
            3,
            "delta/epsilon tables",
            secs(60),
            Duration::ZERO,
            delta_epsilon,
        ),
        report(
            4,
            "vacuum is a left identity",
            secs(30),
            Duration::ZERO,
            identity_element,
        ),
        report(
            5,
            "congruence identities",
            secs(600),
            Duration::ZERO,
            lemma_suite,
        ),
        report(
            6,
            "filtered Zhu dimensions",
            secs(300),
            Duration::ZERO,
            zhu_dimensions,
        ),
    ];
    let start = Instant::now();
    let run = verma_run();
    let build = start.elapsed();
    let run = &run;
    let with_run = |f: fn(&VermaRun) -> Verdict| {
        move || match run {
            Ok(r) => f(r),
            Err(e) => Err(e.clone()),
        }
    };
    // one Verma run computes the operators, the pairing and the dimensions,
    // so each of the three criteria is charged its full time
    ok.push(report(
        7,
        "Verma module operators",
        secs(600),
        build,
        with_run(verma_suite),
    ));
    ok.push(report(
        8,
        "invariant pairing",
        secs(300),
        build,
        with_run(pairing_suite),
    ));
    ok.push(report(
        9,
        "dimension cross-check",
        secs(300),
        build,
        with_run(dimension_cross_check),
    ));
    ok.push(report(
        10,
        "determinism",
        secs(600),
        Duration::ZERO,
        determinism,
    ));
    println!(
        "acceptance: {}/{} criteria passed (Verma build {:.1}s)",
        ok.iter().filter(|x| **x).count(),
        ok.len(),
        build.as_secs_f64()
    );
    if ok.iter().any(|x| !*x) {
        std::process::exit(1);
    }
}
