//! Command-line front door: field ingestion, sampling, counting,
//! enumeration, and the self-check suite.
//!
//! Output is JSON-lines by default — one object per line, big integers as
//! decimal strings — with the seed echoed in a header line so every run can
//! be replayed bit-for-bit. Exit codes: 0 success, 2 usage error, 3 domain
//! error (unreadable field file, missing override, failed self-check, ...).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use idealgen::factored::{factor_integer, FactoredInteger};
use idealgen::function_field::{
    decode, ff_acceptance_probability, ff_candidate_probability, ff_count_norm, ff_derive_params,
    ff_from_json, ff_sample_ideal_with_params, FFFactoredPoly, FFIdealFactorization, FFMode,
    FFSamplerParams, FunctionField,
};
use idealgen::ideals::{count_norm, enumerate_ideals, IdealFactorization};
use idealgen::kalai::sample_uniform_factored;
use idealgen::number_field::{field_from_json, split_prime, NumberField, PrimeSplitting};
use idealgen::poly::{Poly, PrimeField, ResidueField};
use idealgen::rng::RandomSource;
use idealgen::sampler::{
    acceptance_probability, candidate_probability, derive_params, sample_ideal_with_params,
    sample_norm,
};

#[derive(Parser)]
#[command(name = "idealgen", version, about = "Uniformly random pre-factored ideals")]
struct Cli {
    /// RNG seed; a fresh one is drawn from the clock when absent. Always
    /// echoed in the header line.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::JsonLines)]
    format: Format,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    JsonLines,
    Plain,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    /// Norms g with Π n(π_i)^(e_i) < q^(N+1) (efficient, default).
    EncodingBounded,
    /// Norms g with deg g ≤ N (inflated denominator; desk scale only).
    ExactDegree,
}

impl From<ModeArg> for FFMode {
    fn from(m: ModeArg) -> FFMode {
        match m {
            ModeArg::EncodingBounded => FFMode::EncodingBounded,
            ModeArg::ExactDegree => FFMode::ExactDegree,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Uniform pre-factored integer in [1, N].
    Kalai {
        /// Upper bound N (decimal).
        #[arg(long)]
        bound: String,
        #[arg(long, default_value_t = 1)]
        count: u64,
    },
    /// Random ideal norm of the given field, P(r) ∝ D(r), r ≤ N.
    SampleNorm {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        bound: String,
        #[arg(long, default_value_t = 1)]
        count: u64,
    },
    /// Uniformly random ideal of norm ≤ N, in prime-ideal factored form.
    SampleIdeal {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        bound: String,
        #[arg(long, default_value_t = 1)]
        count: u64,
    },
    /// D(r): the number of ideals of norm exactly r.
    CountIdeals {
        #[arg(long)]
        field: PathBuf,
        /// Norm r (decimal).
        #[arg(long)]
        norm: String,
    },
    /// Factorization shape of a rational prime in the field.
    SplitPrime {
        #[arg(long)]
        field: PathBuf,
        /// Prime p (decimal).
        #[arg(long)]
        prime: String,
    },
    /// Every ideal of norm ≤ N, one per line, unit ideal included.
    EnumerateIdeals {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        bound: String,
    },
    /// Uniformly random ideal of a function field, norm degree-bounded.
    FfSample {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        degree_bound: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::EncodingBounded)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1)]
        count: u64,
    },
    /// Exact proportionality identity over every norm ≤ N; prints the
    /// constant c_N. Nonzero exit iff any identity fails.
    Selfcheck {
        #[arg(long)]
        field: PathBuf,
        /// Norm bound (number field) or degree bound (function field).
        #[arg(long)]
        bound: String,
        /// Support mode when the field is a function field.
        #[arg(long, value_enum, default_value_t = ModeArg::EncodingBounded)]
        mode: ModeArg,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn entropy_seed() -> u64 {
    use std::hash::{Hash, Hasher};
    use std::time::{SystemTime, UNIX_EPOCH};
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .unwrap_or_default();
    let mut h = std::collections::hash_map::DefaultHasher::new();
    now.as_secs().hash(&mut h);
    now.subsec_nanos().hash(&mut h);
    std::process::id().hash(&mut h);
    h.finish()
}

struct Out {
    format: Format,
}

impl Out {
    fn record(&self, v: Value, plain: String) {
        match self.format {
            Format::JsonLines => println!("{v}"),
            Format::Plain => println!("{plain}"),
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let seed = cli.seed.unwrap_or_else(entropy_seed);
    let out = Out { format: cli.format };
    out.record(json!({ "seed": seed.to_string() }), format!("seed {seed}"));
    let mut rng = RandomSource::from_seed(seed);
    match cli.cmd {
        Cmd::Kalai { bound, count } => {
            let n = parse_big(&bound)?;
            for _ in 0..count {
                let (r, stats) = sample_uniform_factored(&n, &mut rng)?;
                out.record(
                    json!({
                        "value": r.value().to_string(),
                        "factors": factors_json(&r),
                        "rounds": stats.rounds,
                        "primality_tests": stats.primality_tests,
                    }),
                    format!(
                        "{} = {} (rounds {}, primality tests {})",
                        r.value(),
                        factored_plain(&r),
                        stats.rounds,
                        stats.primality_tests
                    ),
                );
            }
        }
        Cmd::SampleNorm { field, bound, count } => {
            let field = number_field(&field)?;
            let n = parse_big(&bound)?;
            let params = derive_params(&field, &n)?;
            warn(&out, params.warning());
            for _ in 0..count {
                let (r, trials) = sample_norm(&params, &mut rng)?;
                out.record(
                    json!({
                        "value": r.value().to_string(),
                        "factors": factors_json(&r),
                        "trials": trials,
                    }),
                    format!("{} = {} (trials {})", r.value(), factored_plain(&r), trials),
                );
            }
        }
        Cmd::SampleIdeal { field, bound, count } => {
            let field = number_field(&field)?;
            let n = parse_big(&bound)?;
            let params = derive_params(&field, &n)?;
            warn(&out, params.warning());
            for _ in 0..count {
                let (ideal, trials) = sample_ideal_with_params(&params, &mut rng)?;
                revalidate(&ideal)?;
                out.record(ideal_json(&ideal, Some(trials)), ideal_plain(&ideal, Some(trials)));
            }
        }
        Cmd::CountIdeals { field, norm } => {
            let field = number_field(&field)?;
            let r = factor_integer(&parse_big(&norm)?)?;
            let d = count_norm(&field, &r, &mut rng)?;
            out.record(
                json!({ "D": d.to_string() }),
                format!("D({}) = {d}", r.value()),
            );
        }
        Cmd::SplitPrime { field, prime } => {
            let field = number_field(&field)?;
            let p = parse_big(&prime)?;
            let split = split_prime(&field, &p, &mut rng)?;
            out.record(split_json(&split), split_plain(&split));
        }
        Cmd::EnumerateIdeals { field, bound } => {
            let field = number_field(&field)?;
            let n = parse_big(&bound)?;
            let ideals = enumerate_ideals(&field, &n, &mut rng)?;
            for ideal in &ideals {
                revalidate(ideal)?;
                out.record(ideal_json(ideal, None), ideal_plain(ideal, None));
            }
            out.record(
                json!({ "count": ideals.len() }),
                format!("count {}", ideals.len()),
            );
        }
        Cmd::FfSample { field, degree_bound, mode, count } => {
            let field = function_field(&field)?;
            let params = ff_derive_params(&field, degree_bound, mode.into())?;
            for _ in 0..count {
                let (ideal, trials) = ff_sample_ideal_with_params(&params, &mut rng)?;
                ff_revalidate(&ideal)?;
                out.record(
                    ff_ideal_json(&ideal, Some(trials)),
                    ff_ideal_plain(&ideal, Some(trials)),
                );
            }
        }
        Cmd::Selfcheck { field, bound, mode } => match load_field(&field)? {
            AnyField::Number(f) => selfcheck_number(&f, &parse_big(&bound)?, seed, &out)?,
            AnyField::Function(f) => {
                let n: u64 = bound.trim().parse().context("degree bound must be a small integer")?;
                selfcheck_function(&f, n, mode.into(), seed, &out)?
            }
        },
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// field ingestion

enum AnyField {
    Number(NumberField),
    Function(FunctionField),
}

fn load_field(path: &Path) -> Result<AnyField> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading field file {}", path.display()))?;
    let probe: Value = serde_json::from_str(&text)
        .with_context(|| format!("{} is not JSON", path.display()))?;
    if probe.get("q").is_some() {
        Ok(AnyField::Function(ff_from_json(&text)?))
    } else {
        Ok(AnyField::Number(field_from_json(&text)?))
    }
}

fn number_field(path: &Path) -> Result<NumberField> {
    match load_field(path)? {
        AnyField::Number(f) => Ok(f),
        AnyField::Function(_) => bail!(
            "{} describes a function field; use ff-sample or selfcheck",
            path.display()
        ),
    }
}

fn function_field(path: &Path) -> Result<FunctionField> {
    match load_field(path)? {
        AnyField::Function(f) => Ok(f),
        AnyField::Number(_) => bail!(
            "{} describes a number field; ff-sample needs a function field",
            path.display()
        ),
    }
}

fn parse_big(s: &str) -> Result<BigUint> {
    s.trim()
        .parse()
        .with_context(|| format!("not a decimal integer: {s:?}"))
}

fn warn(out: &Out, warning: Option<&str>) {
    if let Some(w) = warning {
        out.record(json!({ "warning": w }), format!("warning: {w}"));
    }
}

// ---------------------------------------------------------------------------
// record rendering

fn factors_json(r: &FactoredInteger) -> Value {
    Value::Array(
        r.factors()
            .iter()
            .map(|(p, e)| json!([p.to_string(), e]))
            .collect(),
    )
}

fn factored_plain(r: &FactoredInteger) -> String {
    if r.is_one() {
        return "1".into();
    }
    r.factors()
        .iter()
        .map(|(p, e)| {
            if *e == 1 {
                p.to_string()
            } else {
                format!("{p}^{e}")
            }
        })
        .collect::<Vec<_>>()
        .join(" * ")
}

/// Coefficients lowest-first; plain numbers where they are exact in JSON.
fn gen_json(g: &Poly<PrimeField>) -> Value {
    Value::Array(
        g.coeffs()
            .iter()
            .map(|c| match c.to_u64().filter(|v| *v < (1 << 53)) {
                Some(v) => json!(v),
                None => json!(c.to_string()),
            })
            .collect(),
    )
}

fn split_json(split: &PrimeSplitting) -> Value {
    json!({
        "p": split.p.to_string(),
        "primes_above": split.primes_above.iter().map(|q| {
            json!({ "e": q.e, "f": q.f, "gen": gen_json(&q.generator) })
        }).collect::<Vec<_>>(),
    })
}

fn split_plain(split: &PrimeSplitting) -> String {
    let parts: Vec<String> = split
        .primes_above
        .iter()
        .map(|q| {
            format!(
                "(e={}, f={}, g={})",
                q.e,
                q.f,
                q.generator.render("x", |c| c.to_string())
            )
        })
        .collect();
    format!("{}: {}", split.p, parts.join(" "))
}

fn ideal_json(ideal: &IdealFactorization, trials: Option<u64>) -> Value {
    let mut v = json!({
        "norm": ideal.norm.value().to_string(),
        "norm_factors": factors_json(&ideal.norm),
        "entries": ideal.entries.iter().map(|e| {
            json!({
                "p": e.p.to_string(),
                "gen": gen_json(&e.generator),
                "e": e.e_ram,
                "f": e.f_res,
                "exponent": e.exponent,
            })
        }).collect::<Vec<_>>(),
    });
    if let Some(t) = trials {
        v["trials"] = json!(t);
    }
    v
}

fn ideal_plain(ideal: &IdealFactorization, trials: Option<u64>) -> String {
    let entries = if ideal.entries.is_empty() {
        "unit ideal".to_string()
    } else {
        ideal
            .entries
            .iter()
            .map(|e| {
                format!(
                    "(p={}, g={}, e={}, f={})^{}",
                    e.p,
                    e.generator.render("x", |c| c.to_string()),
                    e.e_ram,
                    e.f_res,
                    e.exponent
                )
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let tail = trials.map_or(String::new(), |t| format!(" (trials {t})"));
    format!("norm {} = {}: {entries}{tail}", ideal.norm.value(), factored_plain(&ideal.norm))
}

/// The emitted factorization must reproduce its own norm.
fn revalidate(ideal: &IdealFactorization) -> Result<()> {
    let mut norm = BigUint::one();
    for e in &ideal.entries {
        norm *= e.p.pow(e.exponent * e.f_res);
    }
    ensure!(
        norm == *ideal.norm.value(),
        "internal error: emitted ideal fails norm revalidation"
    );
    Ok(())
}

fn t_poly(p: &Poly<PrimeField>) -> String {
    p.render("t", |c| c.to_string())
}

fn y_poly(g: &Poly<ResidueField>) -> String {
    g.render("y", |c| {
        if c.degree().unwrap_or(0) >= 1 {
            format!("({})", t_poly(c))
        } else {
            t_poly(c)
        }
    })
}

fn ff_ideal_json(ideal: &FFIdealFactorization, trials: Option<u64>) -> Value {
    let mut v = json!({
        "norm": t_poly(ideal.norm.value()),
        "r": ideal.norm.encode_product().to_string(),
        "degree": ideal.norm.degree(),
        "norm_factors": ideal.norm.factors().iter().map(|(pi, e)| {
            json!([t_poly(pi), e])
        }).collect::<Vec<_>>(),
        "entries": ideal.entries.iter().map(|e| {
            json!({
                "pi": t_poly(&e.pi),
                "gen": y_poly(&e.generator),
                "e": e.e_ram,
                "f": e.f_res,
                "exponent": e.exponent,
            })
        }).collect::<Vec<_>>(),
    });
    if let Some(t) = trials {
        v["trials"] = json!(t);
    }
    v
}

fn ff_ideal_plain(ideal: &FFIdealFactorization, trials: Option<u64>) -> String {
    let entries = if ideal.entries.is_empty() {
        "unit ideal".to_string()
    } else {
        ideal
            .entries
            .iter()
            .map(|e| {
                format!(
                    "(pi={}, g={}, e={}, f={})^{}",
                    t_poly(&e.pi),
                    y_poly(&e.generator),
                    e.e_ram,
                    e.f_res,
                    e.exponent
                )
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    let tail = trials.map_or(String::new(), |t| format!(" (trials {t})"));
    format!("norm {}: {entries}{tail}", t_poly(ideal.norm.value()))
}

fn ff_revalidate(ideal: &FFIdealFactorization) -> Result<()> {
    let base = ideal.norm.value().field().clone();
    let mut norm = Poly::one(base);
    for e in &ideal.entries {
        for _ in 0..e.exponent * e.f_res {
            norm = norm.mul(&e.pi);
        }
    }
    ensure!(
        norm == *ideal.norm.value(),
        "internal error: emitted ideal fails norm revalidation"
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// selfcheck: the exact proportionality identity

fn selfcheck_number(field: &NumberField, n: &BigUint, seed: u64, out: &Out) -> Result<()> {
    let params = derive_params(field, n)?;
    warn(out, params.warning());
    let n64 = n
        .to_u64()
        .context("selfcheck bound must fit a machine word")?;
    let mut rng = RandomSource::from_seed(seed);
    let mut constant: Option<BigRational> = None;
    let mut support = 0u64;
    let mut failures = 0u64;
    for r in 1..=n64 {
        let fact = factor_integer(&BigUint::from(r))?;
        let acc = acceptance_probability(&params, &fact)?;
        if acc < BigRational::zero() || acc > BigRational::one() {
            failures += 1;
            continue;
        }
        let d = count_norm(field, &fact, &mut rng)?;
        if d.is_zero() {
            if !acc.is_zero() {
                failures += 1;
            }
            continue;
        }
        support += 1;
        let ratio = candidate_probability(&params, &fact)? * acc
            / BigRational::from(num_bigint::BigInt::from(d));
        match &constant {
            None => constant = Some(ratio),
            Some(c) if *c == ratio => {}
            Some(_) => failures += 1,
        }
    }
    report_selfcheck(out, constant, n64, support, failures)
}

fn selfcheck_function(
    field: &FunctionField,
    n: u64,
    mode: FFMode,
    seed: u64,
    out: &Out,
) -> Result<()> {
    let params = ff_derive_params(field, n, mode)?;
    let bound = params
        .bound()
        .to_u64()
        .context("selfcheck needs q^(N+1) to fit a machine word")?;
    let mut rng = RandomSource::from_seed(seed);
    let mut constant: Option<BigRational> = None;
    let mut support = 0u64;
    let mut failures = 0u64;
    let mut checked = 0u64;
    for s in 1..bound {
        let g = decode(&BigUint::from(s), field.base());
        if !g.is_monic() {
            continue;
        }
        let g = FFFactoredPoly::factor(&g, &mut rng)?;
        if !ff_in_support(&params, &g, mode, n) {
            continue;
        }
        checked += 1;
        let acc = ff_acceptance_probability(&params, &g)?;
        if acc < BigRational::zero() || acc > BigRational::one() {
            failures += 1;
            continue;
        }
        let d = ff_count_norm(field, &g, &mut rng)?;
        if d.is_zero() {
            if !acc.is_zero() {
                failures += 1;
            }
            continue;
        }
        support += 1;
        let ratio = ff_candidate_probability(&params, &g)? * acc
            / BigRational::from(num_bigint::BigInt::from(d));
        match &constant {
            None => constant = Some(ratio),
            Some(c) if *c == ratio => {}
            Some(_) => failures += 1,
        }
    }
    report_selfcheck(out, constant, checked, support, failures)
}

fn ff_in_support(params: &FFSamplerParams, g: &FFFactoredPoly, mode: FFMode, n: u64) -> bool {
    match mode {
        FFMode::EncodingBounded => g.encode_product() < *params.bound(),
        FFMode::ExactDegree => g.degree() <= n,
    }
}

fn report_selfcheck(
    out: &Out,
    constant: Option<BigRational>,
    checked: u64,
    support: u64,
    failures: u64,
) -> Result<()> {
    let c = constant
        .map(|c| c.to_string())
        .unwrap_or_else(|| "undefined (empty support)".into());
    out.record(
        json!({
            "c_N": c,
            "norms_checked": checked,
            "support": support,
            "failures": failures,
            "ok": failures == 0,
        }),
        format!("c_N = {c} over {support} of {checked} norms: {}", if failures == 0 { "ok" } else { "FAILED" }),
    );
    ensure!(failures == 0, "{failures} exact identities failed");
    Ok(())
}
