use num_bigint::BigInt;
use qlens_core::classify::{
    partition_classes, phitilde_search, verify_conjectures, ConjectureReport, PhitildeOutcome,
    SearchConfig,
};
use qlens_core::equivalence::{decide_equiv, EquivDecision, WitnessRecord};
use qlens_core::invariants::{check_divisibility_of, congruence_main_of, phitilde_formula};
use qlens_core::numtheory::{factorize, units};
use qlens_core::pathmatrix::MatrixRecord;
use qlens_core::{count_matrix, poly_1to6, Error, GraphKind, LensGraph, LensParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::{Cli, Command, Format, Kind, Suite};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NOT_EQUIVALENT: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;
pub const EXIT_MISMATCH: u8 = 4;

pub struct Output {
    pub text: String,
    pub code: u8,
}

pub struct Failure {
    pub message: String,
    pub code: u8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } | Error::TooLarge(_) => EXIT_BUDGET,
            Error::LowerBoundViolated { .. } => EXIT_MISMATCH,
            _ => EXIT_INPUT,
        };
        Failure {
            message: e.to_string(),
            code,
        }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure {
        message: message.into(),
        code: EXIT_INPUT,
    }
}

fn ok(text: String) -> Result<Output, Failure> {
    Ok(Output {
        text,
        code: EXIT_OK,
    })
}

fn parse_params(r: u64, raw: &str, flag: &str) -> Result<LensParams, Failure> {
    let values = raw
        .split(',')
        .map(|s| s.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| input_error(format!("--{flag}: cannot parse {raw:?}: {e}")))?;
    LensParams::from_signed(r, &values).map_err(|e| input_error(format!("--{flag}: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn graph_kind(kind: Kind) -> GraphKind {
    match kind {
        Kind::M => GraphKind::M,
        Kind::N => GraphKind::N,
    }
}

pub fn run(cli: &Cli) -> Result<Output, Failure> {
    let cfg = SearchConfig { budget: cli.budget };
    match &cli.command {
        Command::Matrix { r, m } => {
            let params = parse_params(*r, m, "m")?;
            let matrix = count_matrix(&params);
            ok(match cli.format {
                Format::Json => to_json(&MatrixRecord::new(&params, &matrix)),
                Format::Csv => matrix.to_csv(),
                Format::Plain => matrix.to_string(),
            })
        }
        Command::Equiv { r, m1, m2 } => {
            let (p1, p2) = (parse_params(*r, m1, "m1")?, parse_params(*r, m2, "m2")?);
            if p1.n() != p2.n() {
                return Err(input_error(format!(
                    "--m1 has {} entries but --m2 has {}",
                    p1.n(),
                    p2.n()
                )));
            }
            let decision = decide_equiv(&count_matrix(&p1), &count_matrix(&p2))?;
            equiv_output(cli.format, &p1, &p2, &decision)
        }
        Command::Classes { r, n } => {
            let partition = partition_classes(*r, *n, cfg)?;
            ok(match cli.format {
                Format::Json => to_json(&partition),
                Format::Csv => {
                    let mut s = String::from(
                        "representative_m,size,distinct_matrices,signature,matrix_digest\n",
                    );
                    for c in &partition.classes {
                        s.push_str(&format!(
                            "\"{}\",{},{},\"{}\",\"{}\"\n",
                            join(&c.representative_m),
                            c.size,
                            c.distinct_matrices,
                            serde_json::to_string(&c.signature.windows).expect("serializable"),
                            c.matrix_digest
                        ));
                    }
                    s
                }
                Format::Plain => {
                    let mut s = format!(
                        "r = {}, n = {}: {} classes (lower bound {})\n",
                        partition.r, partition.n, partition.phi, partition.lower_bound
                    );
                    for c in &partition.classes {
                        s.push_str(&format!(
                            "  ({}) size {} matrices {}\n",
                            join(&c.representative_m),
                            c.size,
                            c.distinct_matrices
                        ));
                    }
                    s
                }
            })
        }
        Command::Phitilde { r, n_max } => {
            let formula = phitilde_formula(*r)?;
            let search = phitilde_search(*r, *n_max, cfg)?;
            let (found, agree) = match search.outcome {
                PhitildeOutcome::Found(n) => (Some(n), n == formula),
                PhitildeOutcome::NotFoundBelow(max) => (None, formula > max),
            };
            let text = match cli.format {
                Format::Plain => format!(
                    "r = {r}: formula {formula}, search {}\n",
                    found.map_or(format!("none up to {n_max}"), |n| n.to_string())
                ),
                _ => to_json(&json!({
                    "r": r,
                    "formula": formula,
                    "search": found,
                    "n_max": n_max,
                    "phis": search.phis,
                    "agree": agree,
                })),
            };
            Ok(Output {
                text,
                code: if agree { EXIT_OK } else { EXIT_MISMATCH },
            })
        }
        Command::Verify {
            suite,
            r,
            n_max,
            samples,
        } => match suite {
            Suite::Lemmas => lemma_suite(cli.format, r, *n_max, *samples, cli.seed),
            Suite::Conjectures => conjecture_suite(cli.format, r, *n_max, cfg),
        },
        Command::Paths { r, m, kind } => {
            let params = parse_params(*r, m, "m")?;
            let graph = LensGraph::build(&params, graph_kind(*kind));
            let n = params.n();
            let mut rows = Vec::with_capacity(n);
            for i in 1..=n {
                let mut row = vec!["0".to_string(); n];
                for (j, cell) in row.iter_mut().enumerate().skip(i - 1) {
                    *cell = graph.count_legal_paths(i, j + 1)?.to_string();
                }
                rows.push(row);
            }
            ok(match cli.format {
                Format::Json => to_json(&MatrixRecord {
                    r: *r,
                    m: params.m().to_vec(),
                    n,
                    entries: rows,
                }),
                _ => rows.iter().map(|row| row.join(",") + "\n").collect(),
            })
        }
        Command::Graph { r, m, kind } => {
            let params = parse_params(*r, m, "m")?;
            ok(LensGraph::build(&params, graph_kind(*kind)).to_dot())
        }
    }
}

fn join(xs: &[u64]) -> String {
    xs.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

fn equiv_output(
    format: Format,
    p1: &LensParams,
    p2: &LensParams,
    decision: &EquivDecision,
) -> Result<Output, Failure> {
    let (code, text) = match (decision, format) {
        (EquivDecision::Equivalent(w), Format::Plain) => {
            (EXIT_OK, format!("equivalent\nU =\n{}V =\n{}", w.u, w.v))
        }
        (EquivDecision::NotEquivalent(o), Format::Plain) => {
            (EXIT_NOT_EQUIVALENT, format!("not equivalent: {o}\n"))
        }
        (EquivDecision::Equivalent(w), _) => (
            EXIT_OK,
            to_json(&json!({
                "r": p1.r(),
                "m1": p1.m(),
                "m2": p2.m(),
                "verdict": "equivalent",
                "witness": WitnessRecord::from(w),
            })),
        ),
        (EquivDecision::NotEquivalent(o), _) => (
            EXIT_NOT_EQUIVALENT,
            to_json(&json!({
                "r": p1.r(),
                "m1": p1.m(),
                "m2": p2.m(),
                "verdict": "not_equivalent",
                "obstruction": o.to_string(),
            })),
        ),
    };
    Ok(Output { text, code })
}

#[derive(Serialize)]
struct LemmaCheck {
    check: &'static str,
    r: u64,
    m: Vec<u64>,
    detail: String,
    pass: bool,
}

fn random_params(rng: &mut ChaCha8Rng, r: u64, n: usize) -> LensParams {
    let us = units(r);
    let m = (0..n).map(|_| us[rng.gen_range(0..us.len())]).collect();
    LensParams::new(r, m).expect("units")
}

fn lemma_suite(
    format: Format,
    moduli: &[u64],
    n_max: usize,
    samples: usize,
    seed: u64,
) -> Result<Output, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    for &r in moduli {
        if r <= 2 {
            return Err(input_error(format!("r must exceed 2, got {r}")));
        }
        let f = factorize(r)?;
        for _ in 0..samples {
            let params = random_params(&mut rng, r, n_max.max(1));
            let matrix = count_matrix(&params);
            let report = check_divisibility_of(&params, &matrix);
            checks.push(LemmaCheck {
                check: "divisibility",
                r,
                m: params.m().to_vec(),
                detail: format!("{} assertions", report.checks.len()),
                pass: report.all_pass(),
            });
            for &(p, alpha) in &f.odd_primes {
                let n = n_max.min(p as usize + 1).max(1);
                let window = params.window(1, n)?;
                let c = congruence_main_of(&window, &matrix.block(1, n)?, p, alpha)?;
                checks.push(LemmaCheck {
                    check: "congruence",
                    r,
                    m: window.m().to_vec(),
                    detail: format!("mod {}: {} vs {}", c.modulus, c.lhs, c.rhs),
                    pass: c.holds(),
                });
            }
        }
        let poly = poly_1to6(r)?;
        let dp: BigInt = count_matrix(&LensParams::from_signed(r, &[1, 1, -1, 1, 1, 1])?)
            .get(1, 6)
            .clone();
        checks.push(LemmaCheck {
            check: "poly_1to6",
            r,
            m: vec![1, 1, r - 1, 1, 1, 1],
            detail: format!("polynomial {poly}, count {dp}"),
            pass: poly == dp,
        });
    }
    let all = checks.iter().all(|c| c.pass);
    let text = match format {
        Format::Plain => checks
            .iter()
            .map(|c| {
                format!(
                    "[{}] {} r={} m=({}) {}\n",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.check,
                    c.r,
                    join(&c.m),
                    c.detail
                )
            })
            .collect(),
        _ => to_json(&json!({ "suite": "lemmas", "pass": all, "checks": checks })),
    };
    Ok(Output {
        text,
        code: if all { EXIT_OK } else { EXIT_MISMATCH },
    })
}

fn conjecture_suite(
    format: Format,
    moduli: &[u64],
    n_max: usize,
    cfg: SearchConfig,
) -> Result<Output, Failure> {
    let mut reports: Vec<ConjectureReport> = Vec::new();
    for &r in moduli {
        for n in 1..=n_max {
            reports.push(verify_conjectures(r, n, cfg)?);
        }
    }
    let all = reports.iter().all(ConjectureReport::passed);
    let text = match format {
        Format::Plain => reports
            .iter()
            .map(|c| {
                format!(
                    "[{}] r={} n={} phi={} bound={} sizes={:?}\n",
                    if c.passed() { "PASS" } else { "FAIL" },
                    c.r,
                    c.n,
                    c.phi,
                    c.lower_bound,
                    c.class_sizes
                )
            })
            .collect(),
        _ => to_json(&json!({ "suite": "conjectures", "pass": all, "reports": reports })),
    };
    Ok(Output {
        text,
        code: if all { EXIT_OK } else { EXIT_MISMATCH },
    })
}
