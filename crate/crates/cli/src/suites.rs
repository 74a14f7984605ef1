//! Seeded invariant suites. Each suite draws random instances from a
//! ChaCha stream and checks one family of identities, emitting one
//! [`Verdict`] per named invariant per trial. A failed check never aborts
//! the suite: it becomes a failing verdict with the error in its detail,
//! so a report always covers every trial.
//!
//! Suites are deterministic functions of `(suite, trials, seed, max_n)`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use tvlab_core::divergence::{
    chi2_brute, chi2_product, hellinger2_brute, hellinger2_product, kl_brute, kl_product,
    LogBase, DEFAULT_DIGITS,
};
use tvlab_core::decimal::Decimal;
use tvlab_core::oracle::{brute_pmfequals, brute_subsetprod, OracleBudget};
use tvlab_core::reduction::{
    build_gadgets, check_beta_separation, compute_beta, solve_subsetprod_via_tv,
    subsetprod_to_pmfequals, CaseTag, PmfEqualsInstance,
};
use tvlab_core::tv::{accepting_path_count, tv_half_abs, tv_max_event, tv_positive_part};
use tvlab_core::{BigUint, Cap, Outcome, Rational};

use crate::gen::{self, ParamStyle};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Forms,
    Membership,
    Claim1,
    Claims23,
    Lemma2,
    Tensorize,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Forms,
        Suite::Membership,
        Suite::Claim1,
        Suite::Claims23,
        Suite::Lemma2,
        Suite::Tensorize,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Forms => "forms",
            Suite::Membership => "membership",
            Suite::Claim1 => "claim1",
            Suite::Claims23 => "claims23",
            Suite::Lemma2 => "lemma2",
            Suite::Tensorize => "tensorize",
        }
    }

    fn stream_salt(self) -> u64 {
        // disjoint rng streams per suite, so `all` is not correlated
        0x9e37_79b9_7f4a_7c15u64.wrapping_mul(1 + Suite::ALL.iter().position(|s| *s == self).unwrap() as u64)
    }
}

/// Trial count, seed, and width bound for one suite run. Widths are also
/// clamped per suite (12 for the TV forms, 10 elsewhere) to keep the
/// exhaustive checks inside their runtime budgets.
#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub trials: u32,
    pub seed: u64,
    pub max_n: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Verdict {
    pub suite: &'static str,
    pub trial: u32,
    pub invariant: &'static str,
    pub pass: bool,
    pub detail: String,
}

const CAP: Cap = Cap::DEFAULT;
const BUDGET: OracleBudget = OracleBudget::DEFAULT;

pub fn run_suite(suite: Suite, cfg: SuiteConfig) -> Vec<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(suite.stream_salt()));
    let mut verdicts = Vec::new();
    for trial in 0..cfg.trials {
        match suite {
            Suite::Forms => forms_trial(&mut rng, cfg, trial, &mut verdicts),
            Suite::Membership => membership_trial(&mut rng, cfg, trial, &mut verdicts),
            Suite::Claim1 => claim1_trial(&mut rng, cfg, trial, &mut verdicts),
            Suite::Claims23 => claims23_trial(&mut rng, cfg, trial, &mut verdicts),
            Suite::Lemma2 => lemma2_trial(&mut rng, cfg, trial, &mut verdicts),
            Suite::Tensorize => tensorize_trial(&mut rng, cfg, trial, &mut verdicts),
        }
    }
    verdicts
}

pub fn run_suites(suites: &[Suite], cfg: SuiteConfig) -> Vec<Verdict> {
    suites.iter().flat_map(|&s| run_suite(s, cfg)).collect()
}

fn verdict(
    suite: Suite,
    trial: u32,
    invariant: &'static str,
    pass: bool,
    detail: String,
) -> Verdict {
    Verdict { suite: suite.name(), trial, invariant, pass, detail }
}

/// Alternates the two parameter regimes across trials.
fn mixed_style(rng: &mut ChaCha8Rng, trial: u32, max_bits: u32, denom_max: u64) -> ParamStyle {
    if trial.is_multiple_of(2) {
        ParamStyle::Dyadic { bits: rng.random_range(1..=max_bits) }
    } else {
        ParamStyle::General { denom_max }
    }
}

fn forms_trial(rng: &mut ChaCha8Rng, cfg: SuiteConfig, trial: u32, out: &mut Vec<Verdict>) {
    let n = rng.random_range(1..=cfg.max_n.clamp(1, 12));
    let style = mixed_style(rng, trial, 6, 30);
    let (p, q) = gen::pair(rng, n, style);

    let half_abs = tv_half_abs(&p, &q, CAP);
    let positive = tv_positive_part(&p, &q, CAP);
    let max_event = tv_max_event(&p, &q, CAP);
    match (half_abs, positive, max_event) {
        (Ok(a), Ok(b), Ok(c)) => {
            let pass = a == b && a == c.value;
            let detail = if pass {
                format!("n={n} tv={a}")
            } else {
                format!("n={n} half_abs={a} positive_part={b} max_event={}", c.value)
            };
            out.push(verdict(Suite::Forms, trial, "three_form_equality", pass, detail));

            if n <= 4 {
                let sp = p.split_tables(CAP).expect("within cap");
                let sq = q.split_tables(CAP).expect("within cap");
                let outcomes = 1u64 << n;
                let mut maximal = true;
                for _ in 0..1000 {
                    let mask = rng.random::<u64>() & ((1u64 << outcomes) - 1);
                    let mut diff = Rational::zero();
                    for x in 0..outcomes {
                        if (mask >> x) & 1 == 1 {
                            diff = diff + (sp.at(x) - sq.at(x));
                        }
                    }
                    if diff > c.value {
                        maximal = false;
                        break;
                    }
                }
                out.push(verdict(
                    Suite::Forms,
                    trial,
                    "witness_event_maximality",
                    maximal,
                    format!("n={n} subsets=1000 tv={}", c.value),
                ));
            }
        }
        (a, b, c) => out.push(verdict(
            Suite::Forms,
            trial,
            "three_form_equality",
            false,
            format!("errors: {a:?} {b:?} {:?}", c.map(|r| r.value)),
        )),
    }
}

fn membership_trial(rng: &mut ChaCha8Rng, cfg: SuiteConfig, trial: u32, out: &mut Vec<Verdict>) {
    let n = rng.random_range(1..=cfg.max_n.clamp(1, 10));
    let style = mixed_style(rng, trial, 6, 30);
    let (p, q) = gen::pair(rng, n, style);
    // the call itself enforces per-term integrality and the 2*M*tv identity
    let v = match accepting_path_count(&p, &q, CAP) {
        Ok(report) => verdict(
            Suite::Membership,
            trial,
            "accepting_paths_equal_2M_tv",
            true,
            format!("n={n} M={} paths={} tv={}", report.m, report.accepting_paths, report.tv_from_paths),
        ),
        Err(err) => verdict(
            Suite::Membership,
            trial,
            "accepting_paths_equal_2M_tv",
            false,
            format!("n={n} {err}"),
        ),
    };
    out.push(v);
}

fn claim1_trial(rng: &mut ChaCha8Rng, cfg: SuiteConfig, trial: u32, out: &mut Vec<Verdict>) {
    let n = rng.random_range(1..=cfg.max_n.clamp(1, 10));
    let dyadic = trial.is_multiple_of(2);
    let (dist, mut v, branch) = if dyadic {
        let bits = rng.random_range(1..=6u32);
        let dist = gen::product(rng, n, ParamStyle::Dyadic { bits });
        let v = if trial.is_multiple_of(4) {
            planted_value(rng, &dist, n)
        } else {
            // any value inside the instance's n*m-bit budget
            let nm = (n as u32 * bits).min(60);
            Rational::new(rng.random_range(0..=1u64 << nm), 1u64 << nm).expect("power of two")
        };
        (dist, v, "dyadic")
    } else {
        let style = ParamStyle::General { denom_max: 20 };
        let dist = gen::product(rng, n, style);
        let v = if trial % 4 == 1 {
            planted_value(rng, &dist, n)
        } else {
            gen::rational_param(rng, style)
        };
        (dist, v, "general")
    };
    if v.is_zero() {
        // beta is only defined for positive targets
        v = Rational::pow2(-(n as i64));
    }
    let inst = PmfEqualsInstance::new(dist.params().to_vec(), v).expect("valid instance");
    let result = compute_beta(&inst)
        .and_then(|beta| check_beta_separation(&inst, &beta, CAP).map(|ok| (beta, ok)));
    let v = match result {
        Ok((beta, pass)) => verdict(
            Suite::Claim1,
            trial,
            "claim1_beta_separation",
            pass,
            format!("n={n} branch={branch} beta={beta}"),
        ),
        Err(err) => verdict(
            Suite::Claim1,
            trial,
            "claim1_beta_separation",
            false,
            format!("n={n} branch={branch} {err}"),
        ),
    };
    out.push(v);
}

fn planted_value(
    rng: &mut ChaCha8Rng,
    dist: &tvlab_core::ProductDistribution,
    n: usize,
) -> Rational {
    let index = rng.random_range(0..1u64 << n);
    dist.pmf(&Outcome::new(index, n).expect("in range")).expect("matching width")
}

fn claims23_trial(rng: &mut ChaCha8Rng, cfg: SuiteConfig, trial: u32, out: &mut Vec<Verdict>) {
    let n = rng.random_range(1..=cfg.max_n.clamp(1, 10));
    let style = mixed_style(rng, trial, 5, 16);
    let dist = gen::product(rng, n, style);
    let boundary = Rational::pow2(-(n as i64));
    let v = match trial % 4 {
        // forced Case A: v = a / 2^(n+k) < 2^-n
        0 => {
            let k = rng.random_range(1..=4u32);
            let num = rng.random_range(1..1u64 << k);
            Rational::new(num, 1u64 << (n as u32 + k)).expect("power of two")
        }
        // forced Case B: clamp a random value up to the threshold
        1 => {
            let raw = gen::rational_param(rng, style);
            if raw < boundary {
                boundary.clone()
            } else {
                raw
            }
        }
        // the exact boundary, which must land in Case B
        2 => boundary.clone(),
        // planted, so nonzero counts occur regularly; a degenerate zero
        // plant falls back below Case A's threshold to stay on the
        // gadget path
        _ => {
            let planted = planted_value(rng, &dist, n);
            if planted.is_zero() {
                Rational::pow2(-(n as i64 + 1))
            } else {
                planted
            }
        }
    };
    let inst = PmfEqualsInstance::new(dist.params().to_vec(), v.clone()).expect("valid instance");
    let brute = match brute_pmfequals(&inst, BUDGET) {
        Ok(count) => count,
        Err(err) => {
            out.push(verdict(
                Suite::Claims23,
                trial,
                "claims23_count_recovery",
                false,
                format!("oracle failed: {err}"),
            ));
            return;
        }
    };

    let artifacts = match build_gadgets(&inst) {
        Ok(artifacts) => artifacts,
        Err(err) => {
            out.push(verdict(
                Suite::Claims23,
                trial,
                "claims23_count_recovery",
                false,
                format!("gadget construction failed: {err}"),
            ));
            return;
        }
    };
    let case = match artifacts.case_tag {
        CaseTag::A => "A",
        CaseTag::B => "B",
    };
    let at_boundary = v == boundary;

    let gadget_cap = Cap(CAP.0 + 2);
    let tv_hat = tv_positive_part(&artifacts.hat_p, &artifacts.hat_q, gadget_cap);
    let tv_prime = tv_positive_part(&artifacts.prime_p, &artifacts.prime_q, gadget_cap);
    let (tv_hat, tv_prime) = match (tv_hat, tv_prime) {
        (Ok(h), Ok(p)) => (h, p),
        (h, p) => {
            out.push(verdict(
                Suite::Claims23,
                trial,
                "claims23_count_recovery",
                false,
                format!("gadget tv failed: {h:?} {p:?}"),
            ));
            return;
        }
    };

    let recovery = tvlab_core::reduction::recover_count(&artifacts, &tv_prime, &tv_hat);
    let (pass, detail) = match recovery {
        Ok(count) => (
            count == brute,
            format!("n={n} case={case} boundary={at_boundary} recovered={count} brute={brute}"),
        ),
        Err(err) => (false, format!("n={n} case={case} {err}")),
    };
    out.push(verdict(Suite::Claims23, trial, "claims23_count_recovery", pass, detail));

    out.push(verdict(
        Suite::Claims23,
        trial,
        "monotone_tv_gap",
        tv_prime >= tv_hat,
        format!("n={n} case={case} tv_prime={tv_prime} tv_hat={tv_hat}"),
    ));

    // the identity the hatted pair was built to satisfy, computed straight
    // from the source pmf table
    let table = inst.distribution().pmf_table(CAP).expect("within cap");
    match artifacts.case_tag {
        CaseTag::A => {
            let direct = table
                .iter()
                .filter(|mass| *mass > &v)
                .fold(Rational::zero(), |acc, mass| acc + (mass - &v));
            out.push(verdict(
                Suite::Claims23,
                trial,
                "eq1_hat_identity",
                tv_hat == direct,
                format!("n={n} tv_hat={tv_hat} sum_positive_excess={direct}"),
            ));
        }
        CaseTag::B => {
            let v_scaled = &v * &Rational::pow2(n as i64);
            let inv = Rational::one() / &v_scaled;
            let cell = Rational::pow2(-(n as i64));
            let mut direct = Rational::one() - &inv;
            for mass in &table {
                let excess = mass * &inv - &cell;
                if !excess.is_negative() {
                    direct = direct + excess;
                }
            }
            out.push(verdict(
                Suite::Claims23,
                trial,
                "case_b_hat_identity",
                tv_hat == direct,
                format!("n={n} tv_hat={tv_hat} displayed_form={direct}"),
            ));
        }
    }
}

fn lemma2_trial(rng: &mut ChaCha8Rng, cfg: SuiteConfig, trial: u32, out: &mut Vec<Verdict>) {
    let n = rng.random_range(1..=cfg.max_n.clamp(1, 10));
    let planted = trial.is_multiple_of(2);
    let source = gen::subsetprod(rng, n, 50, planted);
    let image = subsetprod_to_pmfequals(&source);

    let counts = (brute_subsetprod(&source, BUDGET), brute_pmfequals(&image, BUDGET));
    let (sp_count, pe_count) = match counts {
        (Ok(a), Ok(b)) => (a, b),
        (a, b) => {
            out.push(verdict(
                Suite::Lemma2,
                trial,
                "lemma2_count_preservation",
                false,
                format!("oracle failed: {a:?} {b:?}"),
            ));
            return;
        }
    };
    out.push(verdict(
        Suite::Lemma2,
        trial,
        "lemma2_count_preservation",
        sp_count == pe_count,
        format!("n={n} subsetprod={sp_count} pmfequals={pe_count}"),
    ));

    // pointwise: each subset hits the target iff its outcome hits v
    let table = image.distribution().pmf_table(CAP).expect("within cap");
    let mut pointwise = true;
    for mask in 0..1u64 << n {
        let product = source
            .items()
            .iter()
            .enumerate()
            .filter(|&(i, _)| (mask >> i) & 1 == 1)
            .fold(BigUint::from(1u32), |acc, (_, a)| acc * a);
        if (&product == source.target()) != (&table[mask as usize] == image.value()) {
            pointwise = false;
            break;
        }
    }
    out.push(verdict(
        Suite::Lemma2,
        trial,
        "lemma2_pointwise_equivalence",
        pointwise,
        format!("n={n} subsets={}", 1u64 << n),
    ));

    let chain = solve_subsetprod_via_tv(&source, CAP);
    let (pass, detail) = match chain {
        Ok(count) => (count == sp_count, format!("n={n} via_tv={count} brute={sp_count}")),
        Err(err) => (false, format!("n={n} {err}")),
    };
    out.push(verdict(Suite::Lemma2, trial, "end_to_end_chain", pass, detail));
}

fn tensorize_trial(rng: &mut ChaCha8Rng, cfg: SuiteConfig, trial: u32, out: &mut Vec<Verdict>) {
    let n = rng.random_range(1..=cfg.max_n.clamp(1, 10));
    let style = mixed_style(rng, trial, 5, 12);
    let (p, q) = gen::pair(rng, n, style);

    let closed = chi2_product(&p, &q);
    let brute = chi2_brute(&p, &q, CAP);
    let (pass, detail) = match (&closed, &brute) {
        (Ok(c), Ok(b)) => (c == b, format!("n={n} closed={:?} brute={:?}", c.as_exact(), b.as_exact())),
        (c, b) => (false, format!("n={n} errors: {c:?} {b:?}")),
    };
    out.push(verdict(Suite::Tensorize, trial, "chi2_closed_equals_brute_exactly", pass, detail));

    let closed = kl_product(&p, &q, DEFAULT_DIGITS, LogBase::Nats);
    let brute = kl_brute(&p, &q, DEFAULT_DIGITS, LogBase::Nats, CAP);
    out.push(decimal_agreement_verdict(
        Suite::Tensorize,
        trial,
        "kl_closed_vs_brute_within_1e-12",
        n,
        closed,
        brute,
    ));

    let closed = hellinger2_product(&p, &q, DEFAULT_DIGITS);
    let brute = hellinger2_brute(&p, &q, DEFAULT_DIGITS, CAP);
    out.push(decimal_agreement_verdict(
        Suite::Tensorize,
        trial,
        "hellinger2_closed_vs_brute_within_1e-12",
        n,
        closed,
        brute,
    ));
}

/// Pass iff both sides are infinite together or agree within `1e-12` on
/// their shared fixed-point grid.
fn decimal_agreement_verdict(
    suite: Suite,
    trial: u32,
    invariant: &'static str,
    n: usize,
    closed: tvlab_core::Result<tvlab_core::divergence::DivergenceValue>,
    brute: tvlab_core::Result<tvlab_core::divergence::DivergenceValue>,
) -> Verdict {
    let (pass, detail) = match (&closed, &brute) {
        (Ok(c), Ok(b)) => match (c.as_decimal(), b.as_decimal()) {
            (Some(cd), Some(bd)) => (
                decimals_within_1e12(cd, bd),
                format!("n={n} closed={} brute={}", short(cd), short(bd)),
            ),
            (None, None) => (c.finite() == b.finite(), format!("n={n} both infinite")),
            _ => (false, format!("n={n} finiteness mismatch")),
        },
        (c, b) => (false, format!("n={n} errors: {c:?} {b:?}")),
    };
    verdict(suite, trial, invariant, pass, detail)
}

pub fn decimals_within_1e12(a: &Decimal, b: &Decimal) -> bool {
    debug_assert_eq!(a.digits(), b.digits());
    let tolerance = BigUint::from(10u32).pow(a.digits().saturating_sub(12));
    (a.mantissa() - b.mantissa()).magnitude() <= &tolerance
}

fn short(d: &Decimal) -> String {
    let s = tvlab_core::decimal::decimal_string(d);
    s.chars().take(20).collect()
}
