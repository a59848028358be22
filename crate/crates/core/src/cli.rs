//! Command-line front end. Reports go to stdout as JSON, diagnostics to
//! stderr; the exit code is 0 on success, 1 when a verification fails and 2
//! for usage or validation errors.

use std::io::Write;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::bernoulli::{bernoulli, format_rational};
use crate::dirichlet::{CharacterSpec, DirichletCharacter};
use crate::error::Error;
use crate::genbernoulli::{general_bernoulli, general_bernoulli_rational};
use crate::lfunction::{p_adic_L, verify_interpolation, LpParams, Weight};
use crate::measure::{compatibility_sweep, norm_bound_check, random_cylinder, BernoulliParams, EcVariant, NormBound};
use crate::modarith;
use crate::suite::{self, Profile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "klpadic", version, about = "p-adic L-functions via the Bernoulli measure")]
pub struct Cli {
    /// Relative p-adic precision in digits.
    #[arg(long, global = true, default_value_t = 8)]
    pub prec: u32,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Emit JSON (always on).
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

fn odd_prime(s: &str) -> Result<u64, String> {
    let p: u64 = s.parse().map_err(|_| format!("p must be an odd prime (got {s:?})"))?;
    if modarith::ensure_odd_prime(p).is_err() {
        return Err(format!("p must be an odd prime (got {p})"));
    }
    Ok(p)
}

fn positive(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("expected a positive integer (got {s:?})")),
    }
}

fn char_spec(s: &str) -> Result<CharacterSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct LpArgs {
    #[arg(long, value_parser = odd_prime)]
    pub p: u64,
    #[arg(long, value_parser = positive, default_value_t = 1)]
    pub d: u64,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long = "char", value_parser = char_spec)]
    pub chi: CharacterSpec,
    #[arg(long, value_parser = positive)]
    pub c: u64,
    #[arg(long, default_value_t = 4)]
    pub target: i64,
    #[arg(long, default_value_t = 0)]
    pub jmin: u32,
    #[arg(long, default_value_t = 7)]
    pub jmax: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// The Bernoulli number B_n.
    Bernoulli {
        #[arg(long)]
        n: usize,
    },
    /// The generalized Bernoulli number B_{n,chi}.
    Genbernoulli {
        #[arg(long, value_parser = odd_prime)]
        p: u64,
        #[arg(long = "char", value_parser = char_spec)]
        chi: CharacterSpec,
        #[arg(long)]
        n: usize,
    },
    /// Level, conductor, parity and values of a character.
    CharInfo {
        #[arg(long, value_parser = odd_prime)]
        p: u64,
        #[arg(long = "char", value_parser = char_spec)]
        chi: CharacterSpec,
    },
    /// Compatibility and boundedness sweeps for the Bernoulli distribution.
    MeasureCheck {
        #[arg(long, value_parser = odd_prime)]
        p: u64,
        #[arg(long, value_parser = positive, default_value_t = 1)]
        d: u64,
        #[arg(long, value_parser = positive)]
        c: u64,
        #[arg(long, default_value_t = 3)]
        max_level: u32,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Evaluates the p-adic L-function at the weight <a>^k.
    LpEval {
        #[command(flatten)]
        lp: LpArgs,
        #[arg(long)]
        weight_k: u32,
    },
    /// Compares the L-function at weight <a>^(n-1) with the special value.
    Verify {
        #[command(flatten)]
        lp: LpArgs,
        #[arg(long)]
        n: u32,
    },
    /// Runs the bundled acceptance criteria.
    Suite {
        #[arg(long, default_value = "fast")]
        profile: Profile,
    },
}

/// Result of running a command: a JSON report and whether it passed.
struct Outcome {
    report: serde_json::Value,
    pass: bool,
}

fn to_value<T: Serialize>(x: &T) -> serde_json::Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn build_character(spec: &CharacterSpec, p: u64, prec: u32) -> Result<DirichletCharacter, Error> {
    spec.build(p, prec)
}

fn lp_params(lp: &LpArgs, prec: u32) -> Result<LpParams, Error> {
    let measure = BernoulliParams::new(lp.p, lp.d, lp.c)?;
    let chi = build_character(&lp.chi, lp.p, prec)?;
    LpParams::new(measure, lp.m, chi, prec, lp.jmin, lp.jmax, lp.target)
}

fn execute(cli: &Cli) -> Result<Outcome, Error> {
    let prec = cli.prec;
    if prec == 0 {
        return Err(Error::Precondition("--prec must be positive".into()));
    }
    match &cli.command {
        Command::Bernoulli { n } => {
            Ok(Outcome { report: json!({ "n": n, "value": format_rational(&bernoulli(*n)) }), pass: true })
        }
        Command::Genbernoulli { p, chi, n } => {
            let character = build_character(chi, *p, prec)?;
            let value = general_bernoulli(&character, *n)?;
            let rational = general_bernoulli_rational(&character, *n)?.map(|q| format_rational(&q));
            Ok(Outcome {
                report: json!({
                    "p": p,
                    "char": chi.to_string(),
                    "level": character.level().to_string(),
                    "conductor": character.conductor().to_string(),
                    "n": n,
                    "value": to_value(&value),
                    "rational": rational,
                }),
                pass: true,
            })
        }
        Command::CharInfo { p, chi } => {
            let character = build_character(chi, *p, prec)?;
            let values: serde_json::Map<String, serde_json::Value> = character
                .table()
                .iter()
                .map(|(a, v)| Ok((a.to_string(), json!(v.appr(prec)?.to_string()))))
                .collect::<Result<_, Error>>()?;
            Ok(Outcome {
                report: json!({
                    "p": p,
                    "char": chi.to_string(),
                    "level": character.level().to_string(),
                    "conductor": character.conductor().to_string(),
                    "primitive": character.is_primitive(),
                    "parity": character.parity(),
                    "prec": prec,
                    "values": values,
                }),
                pass: true,
            })
        }
        Command::MeasureCheck { p, d, c, max_level, samples } => {
            measure_check(*p, *d, *c, *max_level, *samples, cli.seed, prec)
        }
        Command::LpEval { lp, weight_k } => {
            let params = lp_params(lp, prec)?;
            let report = p_adic_L(&params, Weight::new(*weight_k))?;
            Ok(Outcome { pass: report.converged, report: to_value(&report) })
        }
        Command::Verify { lp, n } => {
            let params = lp_params(lp, prec)?;
            let report = verify_interpolation(&params, *n)?;
            Ok(Outcome { pass: report.pass, report: to_value(&report) })
        }
        Command::Suite { profile } => {
            let report = suite::run(*profile, cli.seed);
            Ok(Outcome { pass: report.pass, report: to_value(&report) })
        }
    }
}

fn measure_check(
    p: u64,
    d: u64,
    c: u64,
    max_level: u32,
    samples: usize,
    seed: u64,
    prec: u32,
) -> Result<Outcome, Error> {
    let params = BernoulliParams::new(p, d, c)?;
    let (checked, compat_failures) = compatibility_sweep(&params, EcVariant::IntegerInverse, max_level)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d_big = BigUint::from(d);
    let mut bound_failures: Vec<NormBound> = Vec::new();
    for i in 0..samples {
        let level = (i as u32) % max_level.max(1);
        let f = random_cylinder(&mut rng, p, &d_big, level, prec)?;
        let bound = norm_bound_check(&params, &f, prec)?;
        if !bound.ok {
            bound_failures.push(bound);
        }
    }
    let pass = compat_failures.is_empty() && bound_failures.is_empty();
    Ok(Outcome {
        report: json!({
            "p": p,
            "d": d,
            "c": c,
            "max_level": max_level,
            "seed": seed,
            "bound_constant": params.bound_constant().to_string(),
            "compatibility": { "checked": checked, "failures": to_value(&compat_failures) },
            "boundedness": { "samples": samples, "failures": to_value(&bound_failures) },
            "pass": pass,
        }),
        pass,
    })
}

/// Runs a parsed command, writing the report to `out` and diagnostics to
/// `err`. Returns the exit code.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(cli) {
        Ok(outcome) => {
            let _ = writeln!(out, "{}", outcome.report);
            if outcome.pass {
                EXIT_OK
            } else {
                let _ = writeln!(err, "verification failed");
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, out, err),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            code
        }
    }
}
