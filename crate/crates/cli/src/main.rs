//! `feriet` — evaluate the double hypergeometric series F(0:3;1:1)(x,y) and
//! generalized pFq series at unit argument, and verify the registered
//! transformation/summation identities, with machine-readable reports.
//!
//! Exit codes: 0 success, 2 no convergence or failed verification,
//! 3 parameter errors (e.g. a pole-before-termination violation),
//! 4 identity not applicable to the given parameters.

use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::ToPrimitive;
use serde::Serialize;

use feriet_core::exact::ExactKdfParams;
use feriet_core::{
    applicable, eval_kdf, eval_pfq, sample_params, verify, verify_exact, verify_with_backend,
    Backend, EvalError, IdentityId, KdfParams, PfqParams, Scalar, SeriesValue, VerifyError,
    DEFAULT_MAX_DIAGONALS, DEFAULT_MAX_TERMS,
};

#[derive(Parser)]
#[command(name = "feriet")]
#[command(about = "Kampé de Fériet F(0:3;1:1) double series and pFq evaluation & identity verification")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Commands,
}

#[derive(Subcommand)]
enum Commands {
    /// Evaluate the double series on nine parameters and arguments x, y
    EvalKdf(EvalKdfArgs),
    /// Evaluate a generalized pFq series
    EvalPfq(EvalPfqArgs),
    /// Verify one identity on explicit parameters
    Verify(VerifyArgs),
    /// Verify an identity on deterministically sampled parameter sets
    Sweep(SweepArgs),
    /// Print the identity registry with relations and validity conditions
    ListIdentities,
}

/// A numeric argument: a decimal literal or a rational "p/q". The rational
/// form is kept so exact verification can run on the value as typed.
#[derive(Clone, Debug)]
struct NumArg {
    value: f64,
    exact: BigRational,
}

fn parse_num(s: &str) -> Result<NumArg, String> {
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num
            .trim()
            .parse()
            .map_err(|e| format!("bad rational numerator {num:?}: {e}"))?;
        let den: BigInt = den
            .trim()
            .parse()
            .map_err(|e| format!("bad rational denominator {den:?}: {e}"))?;
        if den == BigInt::from(0) {
            return Err("rational denominator must be nonzero".into());
        }
        let exact = BigRational::new(num, den);
        let value = exact
            .to_f64()
            .ok_or_else(|| "rational does not fit a double".to_string())?;
        Ok(NumArg { value, exact })
    } else {
        let value: f64 = s.parse().map_err(|e| format!("bad number {s:?}: {e}"))?;
        let exact = BigRational::from_float(value)
            .ok_or_else(|| "value must be finite".to_string())?;
        Ok(NumArg { value, exact })
    }
}

/// The nine parameters (a,b,c;e), (a',b',c';e'), d plus arguments.
#[derive(Args, Clone)]
struct ParamArgs {
    #[arg(long, value_parser = parse_num, allow_hyphen_values = true)]
    a: NumArg,
    #[arg(long, value_parser = parse_num, allow_hyphen_values = true)]
    b: NumArg,
    #[arg(long, value_parser = parse_num, allow_hyphen_values = true)]
    c: NumArg,
    #[arg(long, value_parser = parse_num, allow_hyphen_values = true)]
    e: NumArg,
    #[arg(long, value_parser = parse_num, allow_hyphen_values = true)]
    ap: NumArg,
    #[arg(long, value_parser = parse_num, allow_hyphen_values = true)]
    bp: NumArg,
    #[arg(long, value_parser = parse_num, allow_hyphen_values = true)]
    cp: NumArg,
    #[arg(long, value_parser = parse_num, allow_hyphen_values = true)]
    ep: NumArg,
    #[arg(long, value_parser = parse_num, allow_hyphen_values = true)]
    d: NumArg,
    #[arg(long, default_value = "1", value_parser = parse_num, allow_hyphen_values = true)]
    x: NumArg,
    #[arg(long, default_value = "1", value_parser = parse_num, allow_hyphen_values = true)]
    y: NumArg,
}

impl ParamArgs {
    fn to_kdf(&self) -> KdfParams {
        let s = |n: &NumArg| Scalar::new(n.value, 0.0);
        KdfParams {
            a: s(&self.a),
            b: s(&self.b),
            c: s(&self.c),
            e: s(&self.e),
            ap: s(&self.ap),
            bp: s(&self.bp),
            cp: s(&self.cp),
            ep: s(&self.ep),
            d: s(&self.d),
            x: s(&self.x),
            y: s(&self.y),
        }
    }

    fn to_exact(&self) -> ExactKdfParams {
        ExactKdfParams {
            a: self.a.exact.clone(),
            b: self.b.exact.clone(),
            c: self.c.exact.clone(),
            e: self.e.exact.clone(),
            ap: self.ap.exact.clone(),
            bp: self.bp.exact.clone(),
            cp: self.cp.exact.clone(),
            ep: self.ep.exact.clone(),
            d: self.d.exact.clone(),
            x: self.x.exact.clone(),
            y: self.y.exact.clone(),
        }
    }
}

#[derive(Args)]
struct EvalKdfArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Stop tolerance for the series sums
    #[arg(long, default_value_t = 1e-14)]
    tol: f64,
    /// Anti-diagonal budget for non-terminating sums
    #[arg(long, default_value_t = DEFAULT_MAX_DIAGONALS)]
    max_diagonals: usize,
}

#[derive(Args)]
struct EvalPfqArgs {
    /// Numerator parameters, comma-separated
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_num, allow_hyphen_values = true)]
    num: Vec<NumArg>,
    /// Denominator parameters, comma-separated
    #[arg(long, value_delimiter = ',', value_parser = parse_num, allow_hyphen_values = true)]
    den: Vec<NumArg>,
    /// Series argument
    #[arg(long, default_value = "1", value_parser = parse_num, allow_hyphen_values = true)]
    arg: NumArg,
    #[arg(long, default_value_t = 1e-14)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_TERMS)]
    max_terms: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// Identity name (see `list-identities`)
    #[arg(long, value_parser = parse_identity)]
    identity: IdentityId,
    #[command(flatten)]
    params: ParamArgs,
    /// Relative-error threshold for a passing verification
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Use the exact rational backend (available for the Pochhammer-ratio
    /// summation identities on doubly terminating parameters)
    #[arg(long)]
    exact: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Identity name (see `list-identities`)
    #[arg(long, value_parser = parse_identity)]
    identity: IdentityId,
    /// Number of parameter sets to sample
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    samples: u32,
    /// Sampler seed; identical seeds give byte-identical reports
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Relative-error threshold for a passing record
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Report file (one record per line); stdout when omitted
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

fn parse_identity(s: &str) -> Result<IdentityId, String> {
    IdentityId::from_name(s).ok_or_else(|| {
        let names: Vec<_> = IdentityId::ALL.iter().map(|id| id.name()).collect();
        format!("unknown identity {s:?}; expected one of {}", names.join(", "))
    })
}

#[derive(Serialize)]
struct ComplexRepr {
    re: f64,
    im: f64,
}

impl From<Scalar> for ComplexRepr {
    fn from(z: Scalar) -> Self {
        ComplexRepr { re: z.re, im: z.im }
    }
}

/// One verification record; written as a single JSON line with stable key
/// order.
#[derive(Serialize)]
struct SweepRecord {
    identity: String,
    params: BTreeMap<&'static str, f64>,
    lhs: Option<ComplexRepr>,
    rhs: Option<ComplexRepr>,
    rel_err: Option<f64>,
    status: &'static str,
    terms_lhs: usize,
}

fn param_map(p: &KdfParams) -> BTreeMap<&'static str, f64> {
    BTreeMap::from([
        ("a", p.a.re),
        ("b", p.b.re),
        ("c", p.c.re),
        ("e", p.e.re),
        ("ap", p.ap.re),
        ("bp", p.bp.re),
        ("cp", p.cp.re),
        ("ep", p.ep.re),
        ("d", p.d.re),
        ("x", p.x.re),
        ("y", p.y.re),
    ])
}

fn record_from(
    id: IdentityId,
    p: &KdfParams,
    outcome: &Result<feriet_core::IdentityEvaluation, VerifyError>,
) -> SweepRecord {
    let (lhs, rhs, rel_err, status, terms_lhs) = match outcome {
        Ok(ev) => (
            Some(ev.lhs.value.into()),
            Some(ev.rhs.value.into()),
            Some(ev.rel_err),
            "ok",
            ev.lhs.terms,
        ),
        Err(VerifyError::NotApplicable { .. }) => (None, None, None, "inapplicable", 0),
        Err(VerifyError::Lhs(_)) => (None, None, None, "lhs_failed", 0),
        Err(VerifyError::Rhs(_) | VerifyError::ExactUnavailable(_)) => {
            (None, None, None, "rhs_failed", 0)
        }
    };
    SweepRecord {
        identity: id.name().to_string(),
        params: param_map(p),
        lhs,
        rhs,
        rel_err,
        status,
        terms_lhs,
    }
}

fn print_series_value(v: &SeriesValue) {
    if v.value.im == 0.0 {
        println!("value    = {:.15e}", v.value.re);
    } else {
        println!("value    = {:.15e} + {:.15e} i", v.value.re, v.value.im);
    }
    println!("abs_err  = {:.3e}", v.abs_err);
    println!("terms    = {}", v.terms);
    println!("status   = {}", v.status.as_str());
}

fn eval_exit_code(err: &EvalError) -> u8 {
    match err {
        EvalError::NoConvergence { .. } => 2,
        _ => 3,
    }
}

fn cmd_eval_kdf(args: &EvalKdfArgs) -> u8 {
    match eval_kdf(&args.params.to_kdf(), args.tol, args.max_diagonals) {
        Ok(v) => {
            print_series_value(&v);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            eval_exit_code(&e)
        }
    }
}

fn cmd_eval_pfq(args: &EvalPfqArgs) -> u8 {
    let p = PfqParams::new(
        args.num.iter().map(|n| Scalar::new(n.value, 0.0)).collect(),
        args.den.iter().map(|n| Scalar::new(n.value, 0.0)).collect(),
        Scalar::new(args.arg.value, 0.0),
    );
    match eval_pfq(&p, args.tol, args.max_terms) {
        Ok(v) => {
            print_series_value(&v);
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            eval_exit_code(&e)
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> u8 {
    let p = args.params.to_kdf();
    let report = applicable(args.identity, &p);
    if !report.applicable {
        let outcome = Err(VerifyError::NotApplicable {
            id: args.identity,
            report: Box::new(report.clone()),
        });
        println!(
            "{}",
            serde_json::to_string(&record_from(args.identity, &p, &outcome)).unwrap()
        );
        eprintln!("not applicable: {report}");
        return 4;
    }
    let outcome = if args.exact {
        verify_exact(args.identity, &args.params.to_exact())
    } else {
        verify_with_backend(args.identity, &p, 1e-14, Backend::Float)
    };
    println!(
        "{}",
        serde_json::to_string(&record_from(args.identity, &p, &outcome)).unwrap()
    );
    match outcome {
        Ok(ev) if ev.rel_err <= args.tol => 0,
        Ok(ev) => {
            eprintln!(
                "verification failed: rel_err {} exceeds tolerance {}",
                ev.rel_err, args.tol
            );
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn cmd_sweep(args: &SweepArgs) -> u8 {
    let params = match sample_params(args.identity, args.seed, args.samples as usize) {
        Ok(params) => params,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let mut sink: Box<dyn Write> = match &args.out {
        Some(path) => match std::fs::File::create(path) {
            Ok(f) => Box::new(std::io::BufWriter::new(f)),
            Err(e) => {
                eprintln!("error: cannot create {}: {e}", path.display());
                return 2;
            }
        },
        None => Box::new(std::io::stdout().lock()),
    };
    let mut ok = 0usize;
    let mut failures = 0usize;
    let mut max_rel_err = 0.0f64;
    for p in &params {
        let outcome = verify(args.identity, p, 1e-14);
        let record = record_from(args.identity, p, &outcome);
        match &outcome {
            Ok(ev) => {
                max_rel_err = max_rel_err.max(ev.rel_err);
                if ev.rel_err <= args.tol {
                    ok += 1;
                } else {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
        writeln!(sink, "{}", serde_json::to_string(&record).unwrap()).unwrap();
    }
    drop(sink);
    eprintln!(
        "identity={} samples={} ok={} failures={} max_rel_err={:.3e}",
        args.identity,
        params.len(),
        ok,
        failures,
        max_rel_err
    );
    if failures == 0 {
        0
    } else {
        2
    }
}

fn cmd_list_identities() {
    for id in IdentityId::ALL {
        println!("{id}");
        println!("  relations:  {}", id.relations_text().join("; "));
        println!("  conditions: {}", id.conditions_text().join("; "));
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Commands::EvalKdf(args) => cmd_eval_kdf(args),
        Commands::EvalPfq(args) => cmd_eval_pfq(args),
        Commands::Verify(args) => cmd_verify(args),
        Commands::Sweep(args) => cmd_sweep(args),
        Commands::ListIdentities => {
            cmd_list_identities();
            0
        }
    };
    ExitCode::from(code)
}
