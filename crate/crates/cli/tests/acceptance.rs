//! Acceptance suite: one PASS/FAIL line per criterion. Runs the built
//! `cmbound` binary where a criterion is about the command line.

#[path = "../../core/tests/common/dg_check.rs"]
mod dg_check;
#[path = "../../core/tests/common/pair_loop.rs"]
mod pair_loop;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::Value;

use cmbound::bounds::{envelope, envelope_exact, envelope_violations, ratio_to_f64};
use cmbound::density::DiskSpec;
use cmbound::gimage::{
    dg_equivalence_oracle, dg_find, perfectness_sl2, sample_curves, scan_heights, subgroup_oracle,
};
use cmbound::numfield::{normalize, FieldDescriptor, RawDescriptor};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(m: u64) -> FieldDescriptor {
    normalize(RawDescriptor::Quadratic(m)).unwrap()
}

/// Run the binary and parse its JSON output.
fn cli(args: &[&str]) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cmbound"))
        .args(args)
        .output()
        .map_err(|e| format!("cannot run cmbound: {e}"))?;
    if !out.status.success() {
        return Err(format!(
            "cmbound {args:?} exited with {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    serde_json::from_slice(&out.stdout).map_err(|e| format!("bad JSON from {args:?}: {e}"))
}

fn cli_text(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cmbound"))
        .args(args)
        .output()
        .map_err(|e| format!("cannot run cmbound: {e}"))?;
    ensure(out.status.success(), || format!("cmbound {args:?} failed"))?;
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn u(v: &Value) -> u64 {
    v.as_u64().expect("unsigned integer field")
}

fn census_exactness() -> Outcome {
    let start = Instant::now();
    let expected = [(25, 5, 4, 16), (625, 25, 24, 576), (15625, 125, 124, 15376)];
    for (k, want) in (1..=3).zip(expected) {
        let doc = cli(&["census", "--f", &k.to_string(), "--cross-check"])?;
        let c = &doc["result"]["census"];
        let got = (
            u(&c["total"]),
            u(&c["singular"]),
            u(&c["supersingular"]),
            u(&c["ordinary"]),
        );
        ensure(got == want, || format!("f={k}: got {got:?}, want {want:?}"))?;
        let x = &doc["result"]["cross_check"];
        let q = u(&c["q"]);
        ensure(u(&x["checked"]) == q * q - q, || {
            format!("f={k}: checked {}", x["checked"])
        })?;
        ensure(u(&x["disagreements"]) == 0, || {
            format!("f={k}: Deuring/trace disagreements")
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "three censuses exact, classifications agree ({elapsed:.2?})"
    ))
}

fn rational(s: &str) -> BigRational {
    let (n, d) = s.split_once('/').expect("num/den");
    BigRational::new(n.parse::<BigInt>().unwrap(), d.parse::<BigInt>().unwrap())
}

fn bound_table() -> Outcome {
    let doc = cli(&["report", "--format", "json"])?;
    let rows = doc["result"]["quadratic"]
        .as_array()
        .ok_or("no quadratic rows")?;
    let expected = [
        ("Q(sqrt-1)", "split", "256/625", "0.4096", 0.409),
        ("Q(sqrt-2)", "inert", "576/625", "0.9216", 0.921),
        ("Q(sqrt-5)", "ramified", "16/25", "0.64", 0.0),
    ];
    for (row, (label, kind, exact, decimal, floor)) in rows.iter().zip(expected) {
        ensure(row["label"] == label && row["kind"] == kind, || {
            format!("row {row}")
        })?;
        ensure(row["exact"] == exact && row["decimal"] == decimal, || {
            format!("row {row}")
        })?;
        ensure(ratio_to_f64(&rational(exact)) >= floor, || {
            format!("{label} below {floor}")
        })?;
        let single = cli(&["bound", "--field", label])?;
        ensure(single["result"]["bound"]["exact"] == exact, || {
            format!("bound {label} differs")
        })?;
    }
    ensure(rows.len() == 3, || "three quadratic rows".into())?;

    let four_fifths = BigRational::new(4.into(), 5.into());
    for row in doc["result"]["generic"]
        .as_array()
        .ok_or("no generic rows")?
    {
        let deg = u(&row["degree"]) as u32;
        let want = num_traits::Pow::pow(&four_fifths, 2 * deg);
        ensure(rational(row["exact"].as_str().unwrap()) == want, || {
            format!("generic degree {deg}")
        })?;
        let single = cli(&["bound", "--degree", &deg.to_string()])?;
        ensure(single["result"]["exact"] == row["exact"], || {
            format!("bound --degree {deg} differs")
        })?;
    }
    let cyc = doc["result"]["cyclotomic"]
        .as_array()
        .ok_or("no cyclotomic rows")?;
    for row in cyc {
        let label = row["label"].as_str().unwrap();
        let single = cli(&["bound", "--field", label])?;
        let b = &single["result"]["bound"];
        for key in ["e", "f", "r", "exact", "decimal"] {
            ensure(b[key] == row[key], || format!("{label}: {key} differs"))?;
        }
    }
    let table = cli_text(&["report"])?;
    let line = table
        .lines()
        .find(|l| l.contains("Q(sqrt-1)"))
        .unwrap_or_default();
    ensure(
        line.contains("split") && line.contains("(4/5)^4") && line.contains("0.4096"),
        || format!("table row: {line}"),
    )?;
    Ok(format!(
        "exact quadratic, generic and {} cyclotomic rows",
        cyc.len()
    ))
}

fn density_convergence() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    for (m, target) in [(1u64, 0.4096), (2, 0.9216), (5, 0.64)] {
        let field = format!("Q(sqrt-{m})");
        let doc = cli(&["density", "--field", &field, "--X", "4", "--mode", "exact"])?;
        let got = doc["result"]["empirical_density"]
            .as_f64()
            .ok_or("no density")?;
        ensure((got - target).abs() < 0.01, || {
            format!("{field}: {got} vs {target}")
        })?;
        parts.push(format!("{field} {got:.5}"));

        let brute = pair_loop::pair_loop(m as i64, 2);
        let doc2 = cli(&["density", "--field", &field, "--X", "2", "--mode", "exact"])?;
        let exact = rational(
            doc2["result"]["exact_density"]
                .as_str()
                .ok_or("no exact density")?,
        );
        let want = BigRational::new(brute.good.into(), (brute.count_a * brute.count_b).into());
        ensure(exact == want, || {
            format!("{field}: weighted sum {exact} vs pair loop {want}")
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(300), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "{}; X=2 pair loops exact ({elapsed:.2?})",
        parts.join(", ")
    ))
}

fn lattice_asymptotics() -> Outcome {
    let mut parts = Vec::new();
    for m in [1u64, 2, 5] {
        let d = q(m);
        let n = DiskSpec::new(d, 500).unwrap().count();
        let brute = pair_loop::disk(m as i64, 500).len() as u64;
        ensure(n == brute, || format!("m={m}: count {n} vs brute {brute}"))?;
        let disc = d.quadratic_discriminant().unwrap().unsigned_abs() as f64;
        let ratio = n as f64 / 250_000.0 / (2.0 * std::f64::consts::PI / disc.sqrt());
        ensure((ratio - 1.0).abs() < 0.05, || {
            format!("m={m}: ratio {ratio}")
        })?;
        parts.push(format!("m={m} {ratio:.5}"));
    }
    Ok(parts.join(", "))
}

fn group_oracles() -> Outcome {
    let p = perfectness_sl2();
    ensure(
        p.order == 120 && p.commutator_closure == 120 && p.perfect,
        || format!("{p:?}"),
    )?;
    let r = subgroup_oracle();
    ensure(r.full_group_witnesses.all(), || {
        "GL_2(F_5) lacks a witness".into()
    })?;
    ensure(r.violations == 0, || {
        format!("{} subgroups show all witnesses", r.violations)
    })?;
    ensure(r.maximal.iter().all(|m| !m.missing.is_empty()), || {
        "maximal record".into()
    })?;
    Ok(format!(
        "{} subgroups, {} det-surjective without SL2, none with all witnesses",
        r.subgroup_count, r.det_surjective_proper
    ))
}

fn dg_equivalence() -> Outcome {
    let r = dg_equivalence_oracle();
    ensure(r.cases.len() == 20 && r.mismatches == 0, || {
        format!("{} mismatches", r.mismatches)
    })?;
    for c in &r.cases {
        ensure(
            c.by_eigenvalues == dg_check::ratio_generic(c.a as i64, c.det as i64),
            || format!("independent ratio check differs at {c:?}"),
        )?;
    }
    let doc = cli(&["dg-find", "--field", "Q(sqrt-1)", "--A", "1", "--B", "1"])?;
    ensure(doc["result"]["prime"]["l"] == 17, || {
        format!("(1,1) over Q(i): {}", doc["result"])
    })?;

    let mut verified = 1;
    for d in [q(1), q(2), q(3), q(11)] {
        let minpoly = d.minimal_polynomial();
        let ramified = d.ramified_primes();
        for c in sample_curves(&d, 2, 25, 606, 0).unwrap() {
            let (a, b) = (&c.a().coords, &c.b().coords);
            let found = dg_find(&c, 1000).unwrap();
            let limit = found.as_ref().map_or(1001, |p| p.l);
            for l in 2..limit {
                ensure(
                    dg_check::is_dg_prime(&minpoly, &ramified, a, b, l) != Some(true),
                    || format!("{}: {l} qualifies below the returned prime", c.id()),
                )?;
            }
            if let Some(p) = found {
                ensure(
                    dg_check::is_dg_prime(&minpoly, &ramified, a, b, p.l) == Some(true),
                    || format!("{}: returned {} fails re-verification", c.id(), p.l),
                )?;
                verified += 1;
            }
        }
    }
    Ok(format!(
        "20/20 pairs agree; {verified} returned primes re-verified"
    ))
}

fn image_certification() -> Outcome {
    let doc = cli(&[
        "image-scan",
        "--field",
        "Q(sqrt-1)",
        "--A",
        "1,0",
        "--B",
        "0,0",
        "--L",
        "1000",
    ])?;
    let r = &doc["result"];
    ensure(
        r["certified"] == false && r["flags"]["nonsquare_witness"] == false,
        || format!("CM curve: {r}"),
    )?;

    let d = q(1);
    let curves = sample_curves(&d, 2, 100, 20_240_611, 0).unwrap();
    let mut csv = String::from("field;Ax;Ay;Bx;By\n");
    for c in &curves {
        let (a, b) = (&c.a().coords, &c.b().coords);
        csv.push_str(&format!("Q(sqrt-1);{};{};{};{}\n", a[0], a[1], b[0], b[1]));
    }
    let path = std::env::temp_dir().join(format!("cmbound-acceptance-{}.csv", std::process::id()));
    std::fs::write(&path, csv).map_err(|e| e.to_string())?;
    let lines = cli_text(&[
        "image-scan",
        "--batch",
        path.to_str().unwrap(),
        "--L",
        "1000",
    ]);
    let _ = std::fs::remove_file(&path);
    let lines = lines?;
    let reports: Vec<Value> = lines
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    ensure(reports.len() == 100, || {
        format!("{} batch lines", reports.len())
    })?;
    let certified = reports.iter().filter(|r| r["certified"] == true).count();
    ensure(certified >= 90, || {
        format!("only {certified}/100 certified")
    })?;

    let scan = scan_heights(&d, &[2, 4, 8], 400, 99, 1000).unwrap();
    ensure(scan.weakly_decreasing, || format!("{scan:?}"))?;
    let fractions: Vec<String> = scan
        .rows
        .iter()
        .map(|r| format!("{:.4}", r.fraction))
        .collect();
    Ok(format!(
        "CM curve uncertified; {certified}/100 certified; uncertified fractions {}",
        fractions.join(" ")
    ))
}

fn envelope_threshold() -> Outcome {
    let want = num_traits::Pow::pow(BigRational::new(4.into(), 5.into()), 8u32);
    ensure(envelope_exact(4) == Some(want.clone()), || {
        "envelope(4) exact".into()
    })?;
    ensure(envelope(4) == ratio_to_f64(&want), || {
        "envelope(4) float".into()
    })?;
    let bad = envelope_violations(10_000);
    ensure(bad.is_empty(), || {
        format!("envelope above bound at {bad:?}")
    })?;
    let mut parts = Vec::new();
    for eps in ["0.5", "0.25"] {
        let doc = cli(&["threshold", "--eps", eps, "--scan-max", "100000"])?;
        let r = &doc["result"];
        let n = u(&r["n"]);
        let level = 1.0 - eps.parse::<f64>().unwrap();
        // independent evaluation of the envelope formula
        let env = |k: u64| {
            let x = (k + 1) as f64;
            (1.0 - 1.0 / x).powf(2.0 * k as f64 / x.log(5.0))
        };
        ensure(env(n) >= level && env(n - 1) < level, || {
            format!("eps={eps}: N={n}")
        })?;
        ensure(
            u(&r["decreases"]) == 0 && u(&r["monotone_from"]) <= n,
            || format!("eps={eps}: not monotone beyond N: {r}"),
        )?;
        let tail_ok = (n..=100_000).step_by(97).all(|k| env(k) >= level);
        ensure(tail_ok, || format!("eps={eps}: dips below level after N"))?;
        parts.push(format!("eps={eps} N={n}"));
    }
    Ok(format!(
        "envelope(4) = (4/5)^8; no violations up to 10^4; {}",
        parts.join(", ")
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("census exactness", census_exactness),
        ("bound table", bound_table),
        ("density convergence", density_convergence),
        ("lattice asymptotics", lattice_asymptotics),
        ("group-theory oracles", group_oracles),
        ("decomposed-generic equivalence", dg_equivalence),
        ("image certification", image_certification),
        ("envelope and threshold", envelope_threshold),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {}/8 passed", 8 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
