//! `tvlab` — exact TV distance between product distributions, the
//! counting reductions behind its hardness, and seeded verification runs.
//!
//! Machine-readable JSON goes to stdout (deterministic for a fixed command
//! line and seed); human summaries and timings go to stderr. Exit codes:
//! 0 success, 2 input error, 3 enumeration cap, 4 invariant failure,
//! 5 oracle mismatch.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tvlab::gen::{self, ParamStyle};
use tvlab::json::{ArtifactsJson, PairJson, PmfEqualsJson, ProductJson, SubsetProdJson};
use tvlab::report::{digest, Check, RunReport};
use tvlab::suites::{run_suites, Suite, SuiteConfig};
use tvlab::CliError;

use tvlab_core::divergence::{
    chi2_brute, chi2_product, hellinger2_brute, hellinger2_product, kl_brute, kl_product,
    DivergenceValue, LogBase,
};
use tvlab_core::oracle::{brute_pmfequals, brute_subsetprod, OracleBudget};
use tvlab_core::reduction::{
    build_gadgets, solve_pmfequals_via_tv, solve_subsetprod_via_tv, subsetprod_to_pmfequals,
};
use tvlab_core::tv::{accepting_path_count, tv_half_abs, tv_max_event, tv_positive_part};
use tvlab_core::Cap;

#[derive(Parser)]
#[command(
    name = "tvlab",
    version,
    about = "Exact total variation distance between product Bernoulli distributions,\n\
             with the counting reductions that make the exact problem hard"
)]
struct Cli {
    /// Enumeration cap: exact-TV work is 2^n, widths past the cap are
    /// refused (exit 3). Defaults to TVLAB_MAX_N or 24.
    #[arg(long, global = true)]
    max_n: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact TV distance of a JSON product pair {"p": {...}, "q": {...}}
    Tv {
        file: PathBuf,
        /// Compute all three defining forms independently and cross-check
        #[arg(long)]
        all_forms: bool,
        /// Emit the maximizing event {x : P(x) > Q(x)}
        #[arg(long)]
        witness: bool,
        /// Fraction digits of the decimal rendering (presentation only)
        #[arg(long, default_value_t = 50)]
        digits: u32,
    },
    /// Tensorizing divergences (closed form, linear in n)
    Divergence {
        file: PathBuf,
        #[arg(long, value_enum)]
        measure: MeasureArg,
        /// Working precision in decimal digits for KL / Hellinger
        #[arg(long, default_value_t = 50)]
        digits: u32,
        /// Report KL in bits instead of nats
        #[arg(long)]
        bits: bool,
        /// Cross-check the closed form against 2^n brute force (exit 5 on
        /// disagreement)
        #[arg(long)]
        brute: bool,
    },
    /// Accepting-path accounting: M, the path count, and the implied TV
    Membership { file: PathBuf },
    /// Run the counting reductions
    Reduce {
        #[command(subcommand)]
        problem: ReduceProblem,
    },
    /// Brute-force oracle counts
    Oracle {
        #[command(subcommand)]
        problem: OracleProblem,
    },
    /// Generate a seeded pseudo-random instance on stdout
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Coordinate / item count
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// Dyadic parameters a/2^bits (default style, bits = 4)
        #[arg(long, conflicts_with = "denom_max")]
        bits: Option<u32>,
        /// General rational parameters with denominators up to this bound
        #[arg(long)]
        denom_max: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Plant k >= 1 guaranteed structure: an attained pmf value
        /// (pmfequals) or a subset-product target (subsetprod)
        #[arg(long, default_value_t = 0)]
        planted: u64,
        /// Bound on subset-product items
        #[arg(long, default_value_t = 50)]
        a_max: u64,
    },
    /// Run invariant suites over seeded random instances
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 100)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ReduceProblem {
    /// Map a #SubsetProd instance to #PMFEquals (and optionally solve it)
    Subsetprod {
        file: PathBuf,
        /// Solve through the full chain: gadgets, two TV queries, recovery
        #[arg(long)]
        solve: bool,
        /// Also run the brute-force oracle and compare (exit 5 on mismatch)
        #[arg(long)]
        verify: bool,
    },
    /// Build the TV gadget pair for a #PMFEquals instance
    Pmfequals {
        file: PathBuf,
        #[arg(long)]
        solve: bool,
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Subcommand)]
enum OracleProblem {
    Subsetprod { file: PathBuf },
    Pmfequals { file: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Kl,
    Chi2,
    Hellinger2,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Subsetprod,
    Pmfequals,
    Pair,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Forms,
    Membership,
    Claim1,
    Claims23,
    Lemma2,
    Tensorize,
    All,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    match run(cli) {
        Ok(summary) => {
            eprintln!("{summary} [{} ms]", started.elapsed().as_millis());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code)
        }
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    let cap = resolve_cap(cli.max_n)?;
    match cli.command {
        Command::Tv { file, all_forms, witness, digits } => cmd_tv(&file, cap, all_forms, witness, digits),
        Command::Divergence { file, measure, digits, bits, brute } => {
            cmd_divergence(&file, cap, measure, digits, bits, brute)
        }
        Command::Membership { file } => cmd_membership(&file, cap),
        Command::Reduce { problem } => match problem {
            ReduceProblem::Subsetprod { file, solve, verify } => {
                cmd_reduce_subsetprod(&file, cap, solve, verify)
            }
            ReduceProblem::Pmfequals { file, solve, verify } => {
                cmd_reduce_pmfequals(&file, cap, solve, verify)
            }
        },
        Command::Oracle { problem } => cmd_oracle(problem, cap),
        Command::Gen { kind, n, bits, denom_max, seed, planted, a_max } => {
            cmd_gen(kind, n, bits, denom_max, seed, planted, a_max)
        }
        Command::Verify { suite, trials, seed } => cmd_verify(suite, trials, seed, cap),
    }
}

/// Flag beats environment beats the built-in default of 24.
fn resolve_cap(flag: Option<usize>) -> Result<Cap, CliError> {
    if let Some(n) = flag {
        return Ok(Cap(n));
    }
    match std::env::var("TVLAB_MAX_N") {
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .map(Cap)
            .map_err(|_| CliError::input(format!("TVLAB_MAX_N must be an integer, got {raw:?}"))),
        Err(_) => Ok(Cap::DEFAULT),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<(T, String), CliError> {
    let bytes = std::fs::read(path)?;
    let parsed = serde_json::from_slice(&bytes)?;
    Ok((parsed, digest(&bytes)))
}

fn cmd_tv(
    file: &PathBuf,
    cap: Cap,
    all_forms: bool,
    witness: bool,
    digits: u32,
) -> Result<String, CliError> {
    let (pair, input_digest) = read_json::<PairJson>(file)?;
    let (p, q) = pair.to_core()?;

    let mut verdicts = Vec::new();
    let mut outputs = serde_json::Map::new();
    outputs.insert("n".into(), p.n().into());

    let max_event = if witness || all_forms { Some(tv_max_event(&p, &q, cap)?) } else { None };
    let value = tv_half_abs(&p, &q, cap)?;

    let mut forms_agree = true;
    if all_forms {
        let positive = tv_positive_part(&p, &q, cap)?;
        let event_value = &max_event.as_ref().expect("computed above").value;
        forms_agree = value == positive && &value == event_value;
        outputs.insert(
            "forms".into(),
            serde_json::json!({
                "half_abs": value.to_string(),
                "positive_part": positive.to_string(),
                "max_event": event_value.to_string(),
            }),
        );
        verdicts.push(Check::new(
            "three_form_equality",
            forms_agree,
            format!("half_abs={value} positive_part={positive} max_event={event_value}"),
        ));
    }
    if witness {
        let event = &max_event.as_ref().expect("computed above").witness_event;
        outputs.insert("witness_size".into(), event.len().into());
        outputs.insert("witness".into(), event.clone().into());
    }
    outputs.insert("tv".into(), value.to_string().into());
    outputs.insert("tv_decimal".into(), value.to_decimal_string(digits as usize).into());

    let report = RunReport {
        command: "tv".into(),
        input_digest,
        outputs: outputs.into(),
        verdicts,
    };
    report.print();
    if !forms_agree {
        return Err(CliError::invariant("the three TV forms disagree; see report"));
    }
    Ok(format!("tv = {value} = {}", value.to_decimal_string(6)))
}

fn divergence_outputs(
    value: &DivergenceValue,
    digits: u32,
    unit: Option<&str>,
) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    map.insert("finite".into(), value.finite().into());
    match (&value.as_exact(), &value.as_decimal()) {
        (Some(exact), _) => {
            map.insert("value".into(), exact.to_string().into());
            map.insert("value_decimal".into(), exact.to_decimal_string(digits as usize).into());
        }
        (_, Some(decimal)) => {
            map.insert("value".into(), tvlab_core::decimal::decimal_string(decimal).into());
        }
        _ => {
            map.insert("value".into(), serde_json::Value::Null);
            map.insert("display".into(), "infinite".into());
        }
    }
    if let Some(unit) = unit {
        map.insert("unit".into(), unit.into());
    }
    map.into()
}

fn human_divergence(value: &DivergenceValue) -> String {
    match (value.as_exact(), value.as_decimal()) {
        (Some(exact), _) => format!("{exact} = {}", exact.to_decimal_string(6)),
        (_, Some(decimal)) => {
            tvlab_core::decimal::decimal_string(decimal).chars().take(10).collect()
        }
        _ => "infinite".into(),
    }
}

fn cmd_divergence(
    file: &PathBuf,
    cap: Cap,
    measure: MeasureArg,
    digits: u32,
    bits: bool,
    brute: bool,
) -> Result<String, CliError> {
    let (pair, input_digest) = read_json::<PairJson>(file)?;
    let (p, q) = pair.to_core()?;
    let base = if bits { LogBase::Bits } else { LogBase::Nats };

    let (name, closed, brute_value): (&str, DivergenceValue, Option<DivergenceValue>) =
        match measure {
            MeasureArg::Kl => (
                "kl",
                kl_product(&p, &q, digits, base)?,
                brute.then(|| kl_brute(&p, &q, digits, base, cap)).transpose()?,
            ),
            MeasureArg::Chi2 => (
                "chi2",
                chi2_product(&p, &q)?,
                brute.then(|| chi2_brute(&p, &q, cap)).transpose()?,
            ),
            MeasureArg::Hellinger2 => (
                "hellinger2",
                hellinger2_product(&p, &q, digits)?,
                brute.then(|| hellinger2_brute(&p, &q, digits, cap)).transpose()?,
            ),
        };

    let unit = matches!(measure, MeasureArg::Kl).then(|| if bits { "bits" } else { "nats" });
    let mut outputs = serde_json::Map::new();
    outputs.insert("measure".into(), name.into());
    outputs.insert("n".into(), p.n().into());
    outputs.insert("digits".into(), digits.into());
    outputs.insert("closed".into(), divergence_outputs(&closed, digits, unit));

    let mut verdicts = Vec::new();
    let mut agree = true;
    if let Some(brute_value) = &brute_value {
        outputs.insert("brute".into(), divergence_outputs(brute_value, digits, unit));
        let (invariant, pass) = match measure {
            MeasureArg::Chi2 => ("chi2_closed_equals_brute_exactly", closed == *brute_value),
            _ => {
                let pass = match (closed.as_decimal(), brute_value.as_decimal()) {
                    (Some(c), Some(b)) => tvlab::suites::decimals_within_1e12(c, b),
                    _ => closed.finite() == brute_value.finite(),
                };
                ("closed_vs_brute_within_1e-12", pass)
            }
        };
        agree = pass;
        verdicts.push(Check::new(
            invariant,
            pass,
            format!("closed={} brute={}", human_divergence(&closed), human_divergence(brute_value)),
        ));
    }

    let summary = format!("{name} = {}", human_divergence(&closed));
    let report =
        RunReport { command: "divergence".into(), input_digest, outputs: outputs.into(), verdicts };
    report.print();
    if !agree {
        return Err(CliError::mismatch("closed form disagrees with brute force; see report"));
    }
    Ok(summary)
}

fn cmd_membership(file: &PathBuf, cap: Cap) -> Result<String, CliError> {
    let (pair, input_digest) = read_json::<PairJson>(file)?;
    let (p, q) = pair.to_core()?;
    // this call verifies per-term integrality and the 2*M*tv identity
    // internally, failing with an invariant error (exit 4) if either breaks
    let report = accepting_path_count(&p, &q, cap)?;
    let outputs = serde_json::json!({
        "n": p.n(),
        "m": report.m.to_string(),
        "accepting_paths": report.accepting_paths.to_string(),
        "tv_from_paths": report.tv_from_paths.to_string(),
        "tv_decimal": report.tv_from_paths.to_decimal_string(50),
    });
    let verdicts = vec![Check::new(
        "accepting_paths_equal_2M_tv",
        true,
        format!("M={} paths={}", report.m, report.accepting_paths),
    )];
    RunReport { command: "membership".into(), input_digest, outputs, verdicts }.print();
    Ok(format!(
        "M = {}, accepting paths = {}, tv = {}",
        report.m, report.accepting_paths, report.tv_from_paths
    ))
}

fn cmd_reduce_subsetprod(
    file: &PathBuf,
    cap: Cap,
    solve: bool,
    verify: bool,
) -> Result<String, CliError> {
    let (json, input_digest) = read_json::<SubsetProdJson>(file)?;
    let instance = json.to_core()?;
    let image = subsetprod_to_pmfequals(&instance);

    let mut outputs = serde_json::Map::new();
    outputs.insert("instance".into(), serde_json::to_value(PmfEqualsJson::from_core(&image))?);

    let count = if solve || verify {
        let count = solve_subsetprod_via_tv(&instance, cap)?;
        outputs.insert("count".into(), count.into());
        Some(count)
    } else {
        None
    };

    let mut verdicts = Vec::new();
    let mut matches = true;
    if verify {
        let oracle = brute_subsetprod(&instance, OracleBudget { max_n: cap.0 })?;
        outputs.insert("oracle_count".into(), oracle.into());
        matches = count == Some(oracle);
        verdicts.push(Check::new(
            "count_matches_oracle",
            matches,
            format!("via_tv={} oracle={oracle}", count.unwrap_or_default()),
        ));
    }

    let summary = match count {
        Some(c) => format!("subsetprod -> pmfequals; count = {c}"),
        None => "subsetprod -> pmfequals".to_string(),
    };
    RunReport { command: "reduce subsetprod".into(), input_digest, outputs: outputs.into(), verdicts }
        .print();
    if !matches {
        return Err(CliError::mismatch("recovered count disagrees with the oracle; see report"));
    }
    Ok(summary)
}

fn cmd_reduce_pmfequals(
    file: &PathBuf,
    cap: Cap,
    solve: bool,
    verify: bool,
) -> Result<String, CliError> {
    let (json, input_digest) = read_json::<PmfEqualsJson>(file)?;
    let instance = json.to_core()?;

    let mut outputs = serde_json::Map::new();
    // v = 0 has no gadget but still solves by the closed form; emitting
    // artifacts alone for it is a domain error
    if instance.value().is_zero() && solve {
        outputs.insert("artifacts".into(), serde_json::Value::Null);
    } else {
        let artifacts = build_gadgets(&instance)?;
        outputs.insert("artifacts".into(), serde_json::to_value(ArtifactsJson::from_core(&artifacts))?);
    }

    let count = if solve || verify {
        let count = solve_pmfequals_via_tv(&instance, cap)?;
        outputs.insert("count".into(), count.into());
        Some(count)
    } else {
        None
    };

    let mut verdicts = Vec::new();
    let mut matches = true;
    if verify {
        let oracle = brute_pmfequals(&instance, OracleBudget { max_n: cap.0 })?;
        outputs.insert("oracle_count".into(), oracle.into());
        matches = count == Some(oracle);
        verdicts.push(Check::new(
            "count_matches_oracle",
            matches,
            format!("via_tv={} oracle={oracle}", count.unwrap_or_default()),
        ));
    }

    let summary = match count {
        Some(c) => format!("pmfequals gadgets built; count = {c}"),
        None => "pmfequals gadgets built".to_string(),
    };
    RunReport { command: "reduce pmfequals".into(), input_digest, outputs: outputs.into(), verdicts }
        .print();
    if !matches {
        return Err(CliError::mismatch("recovered count disagrees with the oracle; see report"));
    }
    Ok(summary)
}

fn cmd_oracle(problem: OracleProblem, cap: Cap) -> Result<String, CliError> {
    let budget = OracleBudget { max_n: cap.0 };
    let (name, input_digest, count) = match problem {
        OracleProblem::Subsetprod { file } => {
            let (json, digest) = read_json::<SubsetProdJson>(&file)?;
            ("subsetprod", digest, brute_subsetprod(&json.to_core()?, budget)?)
        }
        OracleProblem::Pmfequals { file } => {
            let (json, digest) = read_json::<PmfEqualsJson>(&file)?;
            ("pmfequals", digest, brute_pmfequals(&json.to_core()?, budget)?)
        }
    };
    let outputs = serde_json::json!({ "problem": name, "count": count });
    RunReport { command: "oracle".into(), input_digest, outputs, verdicts: vec![] }.print();
    Ok(format!("oracle {name}: count = {count}"))
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    kind: KindArg,
    n: usize,
    bits: Option<u32>,
    denom_max: Option<u64>,
    seed: u64,
    planted: u64,
    a_max: u64,
) -> Result<String, CliError> {
    if n == 0 || n > 62 {
        return Err(CliError::input(format!("--n must be in 1..=62, got {n}")));
    }
    let style = match (bits, denom_max) {
        (Some(bits), _) => ParamStyle::Dyadic { bits },
        (None, Some(denom_max)) => ParamStyle::General { denom_max },
        (None, None) => ParamStyle::Dyadic { bits: 4 },
    };
    let planted = planted >= 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let line = match kind {
        KindArg::Pair => {
            if planted {
                return Err(CliError::input("--planted does not apply to --kind pair"));
            }
            let (p, q) = gen::pair(&mut rng, n, style);
            serde_json::to_string(&PairJson {
                p: ProductJson::from_core(&p),
                q: ProductJson::from_core(&q),
            })?
        }
        KindArg::Pmfequals => {
            let instance = gen::pmfequals(&mut rng, n, style, planted);
            serde_json::to_string(&PmfEqualsJson::from_core(&instance))?
        }
        KindArg::Subsetprod => {
            let instance = gen::subsetprod(&mut rng, n, a_max, planted);
            serde_json::to_string(&SubsetProdJson::from_core(&instance))?
        }
    };
    println!("{line}");
    Ok(format!("gen n={n} seed={seed}"))
}

fn cmd_verify(suite: SuiteArg, trials: u32, seed: u64, cap: Cap) -> Result<String, CliError> {
    let suites: Vec<Suite> = match suite {
        SuiteArg::Forms => vec![Suite::Forms],
        SuiteArg::Membership => vec![Suite::Membership],
        SuiteArg::Claim1 => vec![Suite::Claim1],
        SuiteArg::Claims23 => vec![Suite::Claims23],
        SuiteArg::Lemma2 => vec![Suite::Lemma2],
        SuiteArg::Tensorize => vec![Suite::Tensorize],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let cfg = SuiteConfig { trials, seed, max_n: cap.0 };
    let verdicts = run_suites(&suites, cfg);
    for v in &verdicts {
        println!("{}", serde_json::to_string(v)?);
    }
    let failed = verdicts.iter().filter(|v| !v.pass).count();
    let suite_names: Vec<&str> = suites.iter().map(|s| s.name()).collect();
    let config_echo = format!(
        "suite={} trials={trials} seed={seed} max_n={}",
        suite_names.join(","),
        cfg.max_n
    );
    let summary = serde_json::json!({
        "suites": suite_names,
        "trials": trials,
        "seed": seed,
        "max_n": cfg.max_n,
        "checks": verdicts.len(),
        "failed": failed,
    });
    RunReport {
        command: "verify".into(),
        input_digest: digest(config_echo.as_bytes()),
        outputs: summary,
        verdicts: vec![],
    }
    .print();
    if failed > 0 {
        return Err(CliError::invariant(format!(
            "{failed} of {} checks failed; see verdict lines",
            verdicts.len()
        )));
    }
    Ok(format!("verify {config_echo}: {} checks passed", verdicts.len()))
}
