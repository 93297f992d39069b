mod render;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use polya::biquad::{polya_report, ramification};
use polya::quadratic::{fundamental_unit, quadratic_polya_oracle, zantema_classify};
use polya::verify::{self, PrimeTriple, Theorem, TheoremReport};
use polya::{BiquadraticField, Budget, Error};
use render::{emit, AnalyzeOutput, Format, QuadraticOutput, Record};

const EXIT_USAGE: u8 = 2;
const EXIT_DISAGREE: u8 = 3;
const EXIT_UNDECIDED: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "polya", version, about = "Pólya groups of quadratic and bi-quadratic fields")]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Write to this file instead of standard output
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Treat claim mismatches as failures
    #[arg(long, global = true)]
    strict: bool,
    /// Pollard-rho iterations per factorization
    #[arg(long, env = "POLYA_FACTOR_BUDGET", global = true, default_value_t = Budget::DEFAULT_FACTOR_STEPS,
          value_parser = clap::value_parser!(u64).range(1..))]
    budget_factor: u64,
    /// Values scanned per bounded norm-equation search
    #[arg(long, env = "POLYA_NORMEQ_BUDGET", global = true, default_value_t = Budget::DEFAULT_NORMEQ_STEPS,
          value_parser = clap::value_parser!(u64).range(1..))]
    budget_normeq: u64,
    /// Worker threads for scans
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify Q(√d) and cross-check with the ramified-prime oracle
    #[command(allow_negative_numbers = true)]
    ClassifyQuadratic { d: i64 },
    /// Pólya group of Q(√m, √n)
    #[command(allow_negative_numbers = true)]
    Analyze { m: i64, n: i64 },
    /// Check one instance: `t1 p q r`, `t2 p q r` or `t3 p q`
    Verify {
        theorem: Theorem,
        #[arg(num_args = 2..=3, required = true)]
        primes: Vec<u64>,
        /// Analyze the field even when the hypotheses fail
        #[arg(long)]
        force: bool,
    },
    /// All admissible instances with primes up to a bound
    Scan { theorem: Theorem, bound: u64 },
    /// Reproduce the table of admissible (2, p, q)
    Table,
    /// Smallest p ≡ 3, q ≡ 1 (mod 4) that are non-residues mod r
    Pollack { r: u64 },
    /// Q(√p, √qr) with p ≡ q ≡ 3 (mod 4), r ≡ 5 (mod 8), expected Pólya
    Contrast { p: u64, q: u64, r: u64 },
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            e if e.is_undecided() => EXIT_UNDECIDED,
            Error::Invariant(_) => EXIT_DISAGREE,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, message: message.into() }
}

struct Ctx {
    format: Format,
    strict: bool,
    budget: Budget,
    out: Box<dyn Write>,
}

impl Ctx {
    fn emit<R: Record>(&mut self, records: &[R]) -> Result<(), Failure> {
        emit(records, self.format, &mut self.out)?;
        Ok(())
    }
}

fn classify_quadratic(ctx: &mut Ctx, d: i64) -> Result<u8, Failure> {
    let zantema = zantema_classify(d)?;
    let oracle = quadratic_polya_oracle(d, &ctx.budget)?;
    let unit = if d > 0 { Some(fundamental_unit(d)?) } else { None };
    let agree = oracle.verdict.decided().map(|v| v == zantema.verdict);
    let out = QuadraticOutput { d, case_label: zantema.label(), zantema, oracle, unit, agree };
    ctx.emit(&[out])?;
    Ok(match agree {
        Some(true) => 0,
        Some(false) => EXIT_DISAGREE,
        None => EXIT_UNDECIDED,
    })
}

fn analyze(ctx: &mut Ctx, m: i64, n: i64) -> Result<u8, Failure> {
    let field = BiquadraticField::new(m, n)?;
    match polya_report(&field, &ctx.budget) {
        Ok(r) => {
            ctx.emit(&[AnalyzeOutput::Done(Box::new(r))])?;
            Ok(0)
        }
        Err(e) if e.is_undecided() => {
            let profile = ramification(&field);
            ctx.emit(&[AnalyzeOutput::Partial { field, profile, undecided: e.to_string() }])?;
            Ok(EXIT_UNDECIDED)
        }
        Err(e) => Err(e.into()),
    }
}

fn theorem_exit(reports: &[TheoremReport], strict: bool) -> u8 {
    if reports.iter().any(|r| !r.violations.is_empty()) {
        EXIT_DISAGREE
    } else if reports.iter().any(|r| r.undecided.is_some()) {
        EXIT_UNDECIDED
    } else if strict && reports.iter().any(|r| !r.claim_matches || r.epsilon_in_allowed_set == Some(false)) {
        EXIT_DISAGREE
    } else {
        0
    }
}

fn verify_one(ctx: &mut Ctx, theorem: Theorem, primes: &[u64], force: bool) -> Result<u8, Failure> {
    if primes.len() != theorem.arity() {
        return Err(usage(format!("{theorem} takes {} primes, got {}", theorem.arity(), primes.len())));
    }
    if let Some(x) = primes.iter().find(|&&x| !polya::arith::is_prime(x)) {
        return Err(usage(format!("{x} is not prime")));
    }
    let triple = match *primes {
        [p, q] => PrimeTriple::pair(p, q),
        [p, q, r] => PrimeTriple::new(p, q, r),
        _ => unreachable!(),
    };
    let report = verify::verify_theorem_with(theorem, triple, &ctx.budget, force);
    let code = theorem_exit(std::slice::from_ref(&report), ctx.strict);
    ctx.emit(&[report])?;
    Ok(code)
}

fn scan(ctx: &mut Ctx, theorem: Theorem, bound: u64) -> Result<u8, Failure> {
    let reports = verify::scan(theorem, bound, &ctx.budget)?;
    ctx.emit(&reports)?;
    Ok(theorem_exit(&reports, ctx.strict))
}

fn table(ctx: &mut Ctx) -> Result<u8, Failure> {
    let rows = verify::verify_table(&ctx.budget);
    ctx.emit(&rows)?;
    Ok(if rows.iter().all(|r| r.ok) { 0 } else { EXIT_DISAGREE })
}

fn pollack(ctx: &mut Ctx, r: u64) -> Result<u8, Failure> {
    let pair = verify::pollack_search(r)?;
    ctx.emit(&[pair])?;
    Ok(0)
}

fn contrast(ctx: &mut Ctx, p: u64, q: u64, r: u64) -> Result<u8, Failure> {
    let rep = verify::contrast_rajaei(p, q, r, &ctx.budget)?;
    let code = if ctx.strict && !rep.matches { EXIT_DISAGREE } else { 0 };
    ctx.emit(&[rep])?;
    Ok(code)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs as usize)
            .build_global()
            .map_err(|e| Failure { code: 1, message: e.to_string() })?;
    }
    let out: Box<dyn Write> = match &cli.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    let mut ctx = Ctx {
        format: cli.format,
        strict: cli.strict,
        budget: Budget { factor_steps: cli.budget_factor, normeq_steps: cli.budget_normeq },
        out,
    };
    match cli.command {
        Command::ClassifyQuadratic { d } => classify_quadratic(&mut ctx, d),
        Command::Analyze { m, n } => analyze(&mut ctx, m, n),
        Command::Verify { theorem, primes, force } => verify_one(&mut ctx, theorem, &primes, force),
        Command::Scan { theorem, bound } => scan(&mut ctx, theorem, bound),
        Command::Table => table(&mut ctx),
        Command::Pollack { r } => pollack(&mut ctx, r),
        Command::Contrast { p, q, r } => contrast(&mut ctx, p, q, r),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("polya: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
