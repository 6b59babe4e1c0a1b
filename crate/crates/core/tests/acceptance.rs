//! Acceptance criteria, one line each. All comparisons are exact (tolerance 0).

mod oracle;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use toric_mori::classify::{build_weighted_projective, p112_weights, rho_one_check, Rho1Verdict};
use toric_mori::contraction::{
    analyze_contraction, build_bundle_fan, fiber_rays, non_saturated_fibration,
    weighted_fiber_product, ContractionData, FiberType,
};
use toric_mori::fan::{hirzebruch, product, projective_space, Fan};
use toric_mori::fuzz::{run_campaign, FuzzConfig, FuzzMode};
use toric_mori::intersection::divisor_curve_degree;
use toric_mori::lattice::{smith_normal_form, IntMatrix};
use toric_mori::mori::{mori_cone, ContractionKind};
use toric_mori::report::analyze;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome, Duration);

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Contraction of the fiber-type ray whose fiber contains `e_1`.
fn leading_fiber(fan: &Fan) -> Result<ContractionData, String> {
    let mut e1 = vec![0; fan.dim()];
    e1[0] = 1;
    let target = fan.ray_index(&e1).ok_or("e_1 is not a ray")?;
    let nc = mori_cone(fan).map_err(|e| e.to_string())?;
    for (_, ray) in nc.rays_of_kind(ContractionKind::Fiber) {
        if fiber_rays(fan, ray)
            .map_err(|e| e.to_string())?
            .contains(&target)
        {
            return analyze_contraction(fan, ray).map_err(|e| e.to_string());
        }
    }
    Err("no fiber-type ray through e_1".into())
}

fn ac1() -> Outcome {
    let p1 = projective_space(1);
    let mut fans = vec![
        ("P^2", projective_space(2)),
        ("P(1,1,2)", build_weighted_projective(&[1, 1, 2]).unwrap()),
        ("F_1", hirzebruch(1)),
        ("P^1xP^1", product(&p1, &p1)),
    ];
    for n in 2..=4 {
        for d in 1..n {
            fans.push(("ex32", non_saturated_fibration(n, d).unwrap()));
        }
    }
    for d in [2, 3] {
        fans.push(("ex35", weighted_fiber_product(&p1, d).unwrap()));
    }
    let mut compared = 0;
    for (name, f) in &fans {
        for w in f.walls().unwrap() {
            let solved = oracle::wall_degrees(f, &w);
            for (v, expected) in solved.iter().enumerate() {
                let got = divisor_curve_degree(f, v, &w).map_err(|e| e.to_string())?;
                ensure(&got == expected, || {
                    format!("{name} wall {} ray {v}: {got} vs {expected}", w.tau)
                })?;
                compared += 1;
            }
        }
    }
    Ok(format!(
        "{compared} degrees on {} fans equal the linear-equivalence solve",
        fans.len()
    ))
}

fn ac2() -> Outcome {
    for (n, d) in [(2, 1), (3, 1), (3, 2), (4, 2), (5, 3)] {
        let f = non_saturated_fibration(n, d).unwrap();
        let data = leading_fiber(&f)?;
        let expected = q(d as i64 + 1, 2);
        ensure(data.length == expected, || {
            format!("({n},{d}): length {} != {expected}", data.length)
        })?;
        ensure(data.fiber_type == FiberType::ProjectiveSpace, || {
            format!("({n},{d}): fiber {}", data.fiber_type)
        })?;
        let worst = data
            .charts
            .iter()
            .map(|c| c.witness.index.clone())
            .max()
            .unwrap_or_default();
        ensure(worst >= BigInt::from(2), || {
            format!("({n},{d}): all charts trivial")
        })?;
        ensure(!data.is_bundle, || format!("({n},{d}): reported as bundle"))?;
    }
    Ok("lengths (d+1)/2, fiber P^d, an index-2 chart, not a bundle for all five (n,d)".into())
}

fn ac3() -> Outcome {
    for d in [2usize, 3] {
        let f = weighted_fiber_product(&projective_space(1), d).unwrap();
        let data = leading_fiber(&f)?;
        ensure(data.fiber_type == FiberType::P112, || {
            format!("d={d}: fiber {}", data.fiber_type)
        })?;
        ensure(data.length == q(d as i64, 1), || {
            format!("d={d}: length {}", data.length)
        })?;
        ensure(!data.is_bundle, || format!("d={d}: reported as bundle"))?;
    }
    Ok("P(1,1,2,...,2) x P^1: length d, not a bundle, for d = 2, 3".into())
}

fn ac4() -> Outcome {
    for n in 1..=5 {
        let r = rho_one_check(&projective_space(n)).map_err(|e| e.to_string())?;
        ensure(
            r.length == q(n as i64 + 1, 1)
                && r.verdict == Rho1Verdict::ProjectiveSpace
                && r.holds(),
            || format!("P^{n}: length {}, verdict {}", r.length, r.verdict),
        )?;
    }
    for n in 2..=5 {
        let r = rho_one_check(&build_weighted_projective(&p112_weights(n)).unwrap())
            .map_err(|e| e.to_string())?;
        ensure(
            r.length == q(n as i64, 1) && r.verdict == Rho1Verdict::P112Type && r.holds(),
            || {
                format!(
                    "P(1,1,2,...) dim {n}: length {}, verdict {}",
                    r.length, r.verdict
                )
            },
        )?;
    }
    let config = FuzzConfig::new(2024, 200, 4, FuzzMode::WeightedProjective).unwrap();
    let summary = run_campaign(&config).map_err(|e| e.to_string())?;
    ensure(summary.evaluated == 200 && summary.passed(), || {
        summary.to_text()
    })?;
    let fired =
        summary.tally("rho-one-exceeds-dim").pass + summary.tally("rho-one-reaches-dim").pass;
    Ok(format!(
        "P^n and P(1,1,2,...) for n <= 5 exact; 200 conjugated weighted fans, 0 failures ({fired} non-vacuous clauses)"
    ))
}

fn ac5() -> Outcome {
    let mut evaluated = 0;
    let mut firing = 0;
    let mut equivalences = 0;
    let mut non_bundles = 0;
    for (mode, count) in [(FuzzMode::Bundle, 260), (FuzzMode::Ex32Like, 260)] {
        let config = FuzzConfig::new(31, count, 5, mode).unwrap();
        let summary = run_campaign(&config).map_err(|e| e.to_string())?;
        ensure(summary.passed(), || summary.to_text())?;
        for name in [
            "bundle-criterion",
            "length-criterion",
            "degree-chart-equivalence",
        ] {
            ensure(summary.tally(name).fail == 0, || format!("{name} failed"))?;
        }
        evaluated += summary.evaluated;
        firing += summary.tally("bundle-criterion").pass + summary.tally("length-criterion").pass;
        equivalences += summary.tally("degree-chart-equivalence").pass;
        non_bundles += summary.non_bundles;
    }
    ensure(evaluated >= 500, || {
        format!("only {evaluated} instances evaluated")
    })?;
    ensure(non_bundles > 0, || {
        "no obstructed instance generated".into()
    })?;
    Ok(format!(
        "{evaluated} fiber-type instances, {non_bundles} non-bundles, {firing} non-vacuous implications, {equivalences} degree/chart equivalences, 0 violations"
    ))
}

fn ac6() -> Outcome {
    let base = projective_space(1);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    for n in 2..=5usize {
        let d = n - 1;
        let mut lift_sets = vec![vec![vec![0; d]; 2]];
        for _ in 0..6 {
            lift_sets.push(
                (0..2)
                    .map(|_| (0..d).map(|_| rng.gen_range(-3..=3)).collect())
                    .collect(),
            );
        }
        for lifts in lift_sets {
            let f = build_bundle_fan(&base, d, &lifts).map_err(|e| e.to_string())?;
            let data = leading_fiber(&f)?;
            ensure(data.is_bundle && data.length == q(n as i64, 1), || {
                format!(
                    "n={n} lifts {lifts:?}: bundle {}, length {}",
                    data.is_bundle, data.length
                )
            })?;
            let text = analyze(&f).map_err(|e| e.to_string())?.to_text();
            let phrase = format!("P^{d}-bundle over P^1");
            ensure(text.contains(&phrase), || {
                format!("report lacks {phrase:?}:\n{text}")
            })?;
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} constructed fans reported as P^(n-1)-bundles over P^1 with l(R) = n"
    ))
}

fn ac7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..1000 {
        let (r, c) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let rows: Vec<Vec<i64>> = (0..r)
            .map(|_| (0..c).map(|_| rng.gen_range(-9..=9)).collect())
            .collect();
        let m = IntMatrix::from_rows(&rows);
        let s = smith_normal_form(&m);
        let fail = |what: &str| format!("trial {trial}: {what} for {rows:?}");
        ensure(
            s.left.mul(&m).unwrap().mul(&s.right).unwrap() == s.diagonal_matrix(),
            || fail("L M R != D"),
        )?;
        ensure(s.left.determinant().unwrap().abs().is_one(), || {
            fail("L not unimodular")
        })?;
        ensure(s.right.determinant().unwrap().abs().is_one(), || {
            fail("R not unimodular")
        })?;
        for k in 1..=r.min(c) {
            let expected: BigInt = if k <= s.rank {
                s.diag[..k].iter().product()
            } else {
                BigInt::zero()
            };
            ensure(m.minor_gcd(k).unwrap() == expected, || {
                fail(&format!("minor gcd k={k}"))
            })?;
        }
        let n = r.min(c);
        let sq = m.select(&(0..n).collect::<Vec<_>>(), &(0..n).collect::<Vec<_>>());
        let det = sq.determinant().unwrap();
        ensure(
            sq.mul(&sq.adjugate().unwrap()).unwrap() == IntMatrix::identity(n).scale(&det),
            || fail("adjugate"),
        )?;
        if !det.is_zero() {
            let z: Vec<BigInt> = (0..n)
                .map(|_| BigInt::from(rng.gen_range(-9..=9)))
                .collect();
            let x = sq.solve_rational(&z).unwrap();
            for (i, zi) in z.iter().enumerate() {
                let lhs: BigRational = (0..n)
                    .map(|j| BigRational::from_integer(sq.get(i, j).clone()) * &x[j])
                    .sum();
                ensure(lhs == BigRational::from_integer(zi.clone()), || {
                    fail("nonzero residual")
                })?;
            }
        }
    }
    Ok("1000 random matrices: SNF identity, unimodular transforms, minor gcds, adjugate, zero residuals".into())
}

fn ac8() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_toric-mori");
    let dir = std::env::temp_dir().join(format!("toric-mori-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let run = |args: &[&str], threads: &str| -> Result<Vec<u8>, String> {
        let o = Command::new(bin)
            .args(args)
            .env("TORIC_MORI_THREADS", threads)
            .output()
            .map_err(|e| e.to_string())?;
        Ok(o.stdout)
    };
    let mut compared = 0;
    for (name, extra) in [
        ("ex32", vec!["--n", "4", "--d", "2"]),
        ("ex35", vec!["--d", "3"]),
        ("pn", vec!["--n", "3"]),
    ] {
        let path = dir.join(format!("{name}.json"));
        let p = path.to_str().unwrap();
        let mut args = vec!["example", name, "-o", p];
        args.extend(extra);
        run(&args, "1")?;
        for flags in [vec!["analyze", p], vec!["analyze", p, "--json"]] {
            ensure(run(&flags, "1")? == run(&flags, "2")?, || {
                format!("analyze {name} differs")
            })?;
            compared += 1;
        }
    }
    let fuzz = [
        "fuzz", "--mode", "mixed", "--seed", "8", "--count", "60", "--dim", "4", "--json",
    ];
    let first = run(&fuzz, "1")?;
    ensure(!first.is_empty() && first == run(&fuzz, "3")?, || {
        "fuzz output differs".into()
    })?;
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!("{} report pairs byte-identical", compared + 1))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        (
            "AC1",
            "degree formula exactness",
            ac1,
            Duration::from_secs(1),
        ),
        ("AC2", "non-saturated family", ac2, Duration::from_secs(5)),
        ("AC3", "weighted fiber product", ac3, Duration::from_secs(5)),
        (
            "AC4",
            "Picard number one suite",
            ac4,
            Duration::from_secs(60),
        ),
        ("AC5", "bundle criteria fuzz", ac5, Duration::from_secs(300)),
        ("AC6", "bundles over P^1", ac6, Duration::from_secs(5)),
        ("AC7", "substrate properties", ac7, Duration::from_secs(30)),
        ("AC8", "determinism", ac8, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (id, title, check, budget) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        // budgets are for optimized builds; debug builds get a 10x allowance
        let allowance = if cfg!(debug_assertions) {
            budget * 10
        } else {
            budget
        };
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= allowance => (true, d),
            Ok(d) => (
                false,
                format!("{d}, but took {elapsed:.1?} > {allowance:?}"),
            ),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{id} {} {title} ({:.2}s): {detail}",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
