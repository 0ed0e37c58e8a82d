//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use qlens_core::classify::{
    normalized_vectors, partition_classes, phitilde_search, verify_conjectures, PhitildeOutcome,
    SearchConfig,
};
use qlens_core::equivalence::{decide_equiv_with, DecideOptions};
use qlens_core::invariants::{check_divisibility_of, congruence_main_of, phitilde_formula};
use qlens_core::numtheory::{binomial, factorize, mod_inverse, padic_valuation, units, Valuation};
use qlens_core::{
    count_matrix, decide_equiv, enumerate_legal_paths, poly_1to6, verify_witness, EquivDecision,
    Error, GraphKind, LensGraph, LensParams, PathMatrix,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_params(rng: &mut ChaCha8Rng, r: u64, n: usize) -> LensParams {
    let us = units(r);
    LensParams::new(r, (0..n).map(|_| us[rng.gen_range(0..us.len())]).collect()).unwrap()
}

fn random_unit(rng: &mut ChaCha8Rng, r: u64) -> u64 {
    let us = units(r);
    us[rng.gen_range(0..us.len())]
}

fn strict_upper(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = rows.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i < j {
                        rows[i][j].clone()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

fn mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn random_unipotent(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.cmp(&j) {
                    std::cmp::Ordering::Less => BigInt::from(rng.gen_range(-3i64..=3)),
                    std::cmp::Ordering::Equal => BigInt::one(),
                    std::cmp::Ordering::Greater => BigInt::zero(),
                })
                .collect()
        })
        .collect()
}

fn plus_identity(c: Vec<Vec<BigInt>>) -> PathMatrix {
    let rows = c
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row[i] = BigInt::one();
            row
        })
        .collect();
    PathMatrix::from_rows(rows).unwrap()
}

/// `U (A - I) W + I` for random unipotent `U`, `W`.
fn unipotent_transform(rng: &mut ChaCha8Rng, a: &PathMatrix) -> PathMatrix {
    let n = a.n();
    let c = strict_upper(&a.rows());
    let u = random_unipotent(rng, n);
    let w = random_unipotent(rng, n);
    plus_identity(mul(&mul(&u, &c), &w))
}

fn c1_oracle() -> Outcome {
    let mut pairs = 0usize;
    for r in 3..=7 {
        for n in 1..=4 {
            for params in
                normalized_vectors(r, n, SearchConfig::default()).map_err(|e| e.to_string())?
            {
                let dp = count_matrix(&params);
                for kind in [GraphKind::M, GraphKind::N] {
                    let g = LensGraph::build(&params, kind);
                    for i in 1..=n {
                        for j in i..=n {
                            let brute =
                                enumerate_legal_paths(&g, i, j).map_err(|e| e.to_string())?;
                            ensure!(
                                &brute == dp.get(i, j),
                                "r={r} m={:?} {kind:?} <{i},{j}>: dp {} brute {brute}",
                                params.m(),
                                dp.get(i, j)
                            );
                            pairs += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{pairs} entries agree on M and N"))
}

fn c2_closed_form() -> Outcome {
    let mut checked = 0usize;
    for r in 3..=30 {
        for n in 1..=8 {
            let a = count_matrix(&LensParams::ones(r, n).unwrap());
            for i in 1..=n {
                for j in i..=n {
                    let d = (j - i) as u64;
                    ensure!(
                        *a.get(i, j) == binomial(r - 1 + d, d),
                        "r={r} n={n} <{i},{j}>"
                    );
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} entries"))
}

fn c3_forced() -> Outcome {
    let mut rng = rng(3);
    for _ in 0..200 {
        let r = rng.gen_range(3..=100u64);
        let n = rng.gen_range(1..=8usize);
        let params = random_params(&mut rng, r, n);
        let a = count_matrix(&params);
        for i in 1..=n {
            ensure!(a.get(i, i).is_one(), "diagonal r={r} m={:?}", params.m());
            if i < n {
                ensure!(
                    *a.get(i, i + 1) == BigInt::from(r),
                    "<i,i+1> r={r} m={:?}",
                    params.m()
                );
            }
            if i + 1 < n {
                ensure!(
                    *a.get(i, i + 2) == BigInt::from(r * (r + 1) / 2),
                    "<i,i+2> r={r} m={:?}",
                    params.m()
                );
            }
        }
    }
    Ok("200 samples".into())
}

fn c4_invariance() -> Outcome {
    let mut rng = rng(4);
    for _ in 0..100 {
        let r = rng.gen_range(3..=60u64);
        let n = rng.gen_range(1..=8usize);
        let params = random_params(&mut rng, r, n);
        let a = count_matrix(&params);
        let b = random_unit(&mut rng, r);
        ensure!(
            count_matrix(&params.scale(b).unwrap()) == a,
            "scaling by {b}: r={r} m={:?}",
            params.m()
        );
        let (first, last) = (random_unit(&mut rng, r), random_unit(&mut rng, r));
        let moved = params
            .with_entry(1, first)
            .unwrap()
            .with_entry(n, last)
            .unwrap();
        ensure!(
            count_matrix(&moved) == a,
            "endpoints: r={r} m={:?}",
            params.m()
        );
    }
    Ok("100 samples".into())
}

fn c5_divisibility() -> Outcome {
    let mut rng = rng(5);
    let mut assertions = 0usize;
    for r in 3..=60u64 {
        let f = factorize(r).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let params = random_params(&mut rng, r, 8);
            let a = count_matrix(&params);
            for &(p, alpha) in &f.odd_primes {
                let q = BigInt::from(p.pow(alpha));
                for i in 1..=8usize {
                    for j in i + 1..=8usize.min(i + p as usize - 1) {
                        ensure!(
                            (a.get(i, j) % &q).is_zero(),
                            "{p}^{alpha} does not divide <{i},{j}> for r={r} m={:?}",
                            params.m()
                        );
                        assertions += 1;
                    }
                }
            }
            ensure!(
                check_divisibility_of(&params, &a).all_pass(),
                "report failed r={r} m={:?}",
                params.m()
            );
        }
    }
    for r in [4u64, 8, 12, 16, 20, 24] {
        let t = r.trailing_zeros();
        for _ in 0..20 {
            let params = random_params(&mut rng, r, 8);
            let a = count_matrix(&params);
            for i in 1..=4usize {
                let v4 = padic_valuation(a.get(i, i + 3), 2).map_err(|e| e.to_string())?;
                ensure!(
                    v4 >= Valuation::Finite(t),
                    "2^{t} does not divide <{i},{}> r={r} m={:?}",
                    i + 3,
                    params.m()
                );
                let v5 = padic_valuation(a.get(i, i + 4), 2).map_err(|e| e.to_string())?;
                ensure!(
                    v5 == Valuation::Finite(t - 2),
                    "v2(<{i},{}>) = {v5:?}, expected {} for r={r} m={:?}",
                    i + 4,
                    t - 2,
                    params.m()
                );
                assertions += 2;
            }
        }
    }
    Ok(format!("{assertions} assertions"))
}

fn c6_polynomial() -> Outcome {
    for r in [3u64, 4, 5, 7, 8, 9, 11, 12] {
        let poly = poly_1to6(r).map_err(|e| e.to_string())?;
        let a = count_matrix(&LensParams::from_signed(r, &[1, 1, -1, 1, 1, 1]).unwrap());
        ensure!(
            &poly == a.get(1, 6),
            "r={r}: polynomial {poly}, count {}",
            a.get(1, 6)
        );
    }
    Ok("8 moduli".into())
}

fn c7_congruence() -> Outcome {
    let mut rng = rng(7);
    let mut checked = 0usize;
    for r in 3..=45u64 {
        let f = factorize(r).map_err(|e| e.to_string())?;
        for &(p, max_alpha) in &f.odd_primes {
            for alpha in 1..=max_alpha {
                let q = p.pow(alpha);
                for n in 2..=(p as usize + 1) {
                    for _ in 0..20 {
                        let params = random_params(&mut rng, r, n);
                        let a = count_matrix(&params);
                        let c = match congruence_main_of(&params, &a, p, alpha) {
                            Ok(c) => c,
                            Err(Error::HypothesisUnmet(msg)) => {
                                return Err(format!("unexpected: {msg}"))
                            }
                            Err(e) => return Err(e.to_string()),
                        };
                        let mut rhs = binomial(r + n as u64 - 2, n as u64 - 1);
                        for k in 2..n {
                            rhs *= mod_inverse(params.entry(k) as i64, q)
                                .map_err(|e| e.to_string())?;
                        }
                        let qb = BigInt::from(q);
                        let (lhs, rhs) =
                            (((a.get(1, n) % &qb) + &qb) % &qb, ((rhs % &qb) + &qb) % &qb);
                        ensure!(
                            lhs == rhs && c.holds() && BigInt::from(c.lhs) == lhs,
                            "r={r} p={p} alpha={alpha} m={:?}: {lhs} vs {rhs}",
                            params.m()
                        );
                        checked += 1;
                    }
                }
            }
        }
    }
    Ok(format!("{checked} congruences"))
}

fn c8_three_divides() -> Outcome {
    for r in [3u64, 6, 9] {
        let phi = partition_classes(r, 4, SearchConfig::default())
            .map_err(|e| e.to_string())?
            .phi;
        ensure!(phi == 2, "phi_{r}(4) = {phi}");
    }
    Ok("phi_3(4) = phi_6(4) = phi_9(4) = 2".into())
}

fn c9_phitilde() -> Outcome {
    let cfg = SearchConfig { budget: 1_000_000 };
    let mut summary = Vec::new();
    for r in [3u64, 4, 5, 6, 7, 8, 9, 10, 12, 15, 16, 20, 21, 35] {
        let formula = phitilde_formula(r).map_err(|e| e.to_string())?;
        let search = match phitilde_search(r, 8, cfg) {
            Ok(s) => s,
            Err(Error::BudgetExceeded { .. }) => {
                summary.push(format!("{r}:skipped"));
                continue;
            }
            Err(e) => return Err(e.to_string()),
        };
        ensure!(
            search.outcome == PhitildeOutcome::Found(formula),
            "r={r}: search {:?}, formula {formula}",
            search.outcome
        );
        ensure!(
            search
                .phis
                .iter()
                .all(|&(n, phi)| (n < formula) == (phi == 1)),
            "r={r}: phis {:?}",
            search.phis
        );
        if formula == 6 {
            ensure!(search.phis.contains(&(5, 1)), "r={r}: phi(5) != 1");
        }
        summary.push(format!("{r}:{formula}"));
    }
    Ok(summary.join(" "))
}

fn c10_conjectures() -> Outcome {
    let cases = [
        (3u64, 8usize),
        (5, 8),
        (6, 8),
        (9, 8),
        (10, 7),
        (15, 7),
        (21, 7),
    ];
    let mut checked = 0usize;
    for (r, n_max) in cases {
        for n in 1..=n_max {
            let rep =
                verify_conjectures(r, n, SearchConfig::default()).map_err(|e| e.to_string())?;
            ensure!(
                rep.passed()
                    && rep.signature_iff_equivalent == Some(true)
                    && rep.phi_equals_bound == Some(true),
                "r={r} n={n}: {rep:?}"
            );
            checked += 1;
        }
    }
    Ok(format!("{checked} (r, n) pairs"))
}

fn endgame_six(corner: i64, scale: i64) -> PathMatrix {
    let c = [
        [0, 4, 2, 0, 1, corner],
        [0, 0, 4, 2, 0, 1],
        [0, 0, 0, 4, 2, 0],
        [0, 0, 0, 0, 4, 2],
        [0, 0, 0, 0, 0, 4],
        [0, 0, 0, 0, 0, 0],
    ];
    let rows: Vec<Vec<i64>> = c
        .iter()
        .map(|row| row.iter().map(|x| x * scale).collect())
        .collect();
    PathMatrix::from_strict_upper(&rows).unwrap()
}

fn endgame_five(r: i64, x1: i64, x2: i64, x3: i64) -> PathMatrix {
    let h = r * (r + 1) / 2;
    PathMatrix::from_strict_upper(&[
        vec![0, r, h, x1 * r, x2 * r / 4],
        vec![0, 0, r, h, x3 * r],
        vec![0, 0, 0, r, h],
        vec![0, 0, 0, 0, r],
        vec![0; 5],
    ])
    .unwrap()
}

fn c11_endgame() -> Outcome {
    let solver_only = DecideOptions { prefilter: false };
    for scale in [1, 2, 4, 5] {
        for corner in [1, -1] {
            let (a, b) = (endgame_six(corner, scale), endgame_six(0, scale));
            for opts in [DecideOptions::default(), solver_only] {
                let d = decide_equiv_with(&a, &b, opts).map_err(|e| e.to_string())?;
                ensure!(
                    !d.is_equivalent(),
                    "6x6 corner {corner} scale {scale} reported equivalent"
                );
            }
        }
    }
    let mut rng = rng(11);
    let mut pairs = 0usize;
    for r in [4i64, 8, 12, 16, 20, 24] {
        for _ in 0..6 {
            let odd = |rng: &mut ChaCha8Rng| 2 * rng.gen_range(-4i64..=4) + 1;
            let (x2, y2) = (odd(&mut rng), odd(&mut rng));
            let x = endgame_five(r, rng.gen_range(-3..=3), x2, rng.gen_range(-3..=3));
            let y = endgame_five(r, rng.gen_range(-3..=3), y2, rng.gen_range(-3..=3));
            match decide_equiv(&x, &y).map_err(|e| e.to_string())? {
                EquivDecision::Equivalent(w) => {
                    ensure!(verify_witness(&x, &y, &w), "bad witness r={r}")
                }
                EquivDecision::NotEquivalent(o) => {
                    return Err(format!("5x5 r={r} x2={x2} y2={y2}: {o}"))
                }
            }
            pairs += 1;
        }
    }
    Ok(format!(
        "6x6 pairs inequivalent, {pairs} 5x5 pairs equivalent"
    ))
}

fn c12_soundness() -> Outcome {
    let mut rng = rng(12);
    for _ in 0..500 {
        let r = rng.gen_range(3..=30u64);
        let n = rng.gen_range(2..=7usize);
        let a = count_matrix(&random_params(&mut rng, r, n));
        let b = unipotent_transform(&mut rng, &a);
        match decide_equiv(&a, &b).map_err(|e| e.to_string())? {
            EquivDecision::Equivalent(w) => {
                ensure!(verify_witness(&a, &b, &w), "witness fails r={r} n={n}")
            }
            EquivDecision::NotEquivalent(o) => {
                return Err(format!("transform of r={r} n={n} rejected: {o}"))
            }
        }
    }

    let odd_moduli: Vec<u64> = (3..=60u64).filter(|&r| r % 2 == 1 || r % 4 == 2).collect();
    let solver_only = DecideOptions { prefilter: false };
    for round in 0..500 {
        let (a, k) = if round % 2 == 0 {
            // Path matrices with n <= p: every strict-upper entry is divisible by p^alpha.
            let r = odd_moduli[rng.gen_range(0..odd_moduli.len())];
            let f = factorize(r).unwrap();
            let (p, alpha) = f.odd_primes[rng.gen_range(0..f.odd_primes.len())];
            let n = rng.gen_range(2..=(p as usize).min(7));
            (count_matrix(&random_params(&mut rng, r, n)), p.pow(alpha))
        } else {
            let k = rng.gen_range(2..=12u64);
            let n = rng.gen_range(2..=7usize);
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i < j {
                                k as i64 * rng.gen_range(-5..=5)
                            } else {
                                0
                            }
                        })
                        .collect()
                })
                .collect();
            (PathMatrix::from_strict_upper(&rows).unwrap(), k)
        };
        let n = a.n();
        let mut perturbed = a.clone();
        let delta = rng.gen_range(1..k) as i64 + k as i64 * rng.gen_range(-3i64..=3);
        perturbed.set(1, n, a.get(1, n) + delta);
        let b = unipotent_transform(&mut rng, &perturbed);

        let kb = BigInt::from(k);
        for (i, j) in a.strict_upper_positions() {
            if (i, j) != (1, n) {
                ensure!(
                    (a.get(i, j) % &kb).is_zero() && (b.get(i, j) % &kb).is_zero(),
                    "setup k={k}"
                );
            }
        }
        ensure!(
            !((a.get(1, n) - b.get(1, n)) % &kb).is_zero(),
            "setup corner k={k}"
        );

        for opts in [DecideOptions::default(), solver_only] {
            let d = decide_equiv_with(&a, &b, opts).map_err(|e| e.to_string())?;
            ensure!(
                !d.is_equivalent(),
                "k={k} n={n} perturbation reported equivalent ({opts:?})"
            );
        }
    }
    Ok(
        "500 transforms equivalent, 500 perturbations inequivalent (with and without prefilter)"
            .into(),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        (
            "dynamic program matches brute-force paths on M and N",
            c1_oracle,
        ),
        (
            "all-ones matrices equal the binomial formula",
            c2_closed_form,
        ),
        ("first three diagonals are forced", c3_forced),
        ("scaling and endpoint invariance", c4_invariance),
        ("prime-power and two-power divisibility", c5_divisibility),
        ("<1,6> polynomial for (1,1,-1,1,1,1)", c6_polynomial),
        ("corner congruence modulo p^alpha", c7_congruence),
        ("two classes at n = 4 when 3 | r", c8_three_divides),
        ("phitilde search agrees with formula", c9_phitilde),
        ("class-structure conjectures", c10_conjectures),
        ("4 | r endgame matrices", c11_endgame),
        ("equivalence solver soundness", c12_soundness),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (idx, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = match panic::catch_unwind(AssertUnwindSafe(check)) {
            Ok(o) => o,
            Err(p) => Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into())),
        };
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {:>2} {name}: {detail} ({secs:.1}s)", idx + 1),
            Err(why) => {
                failures += 1;
                println!("[FAIL] {:>2} {name}: {why} ({secs:.1}s)", idx + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
