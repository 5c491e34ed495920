use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use fpselberg_core::closed2d::condition_set;
use fpselberg_core::harness::{
    run_sweep, run_verify, write_report, write_sweep, Method, OutputFormat, Suite, SweepConfig,
};
use fpselberg_core::morris::{morris_ct_bruteforce, morris_lhs_symmetric_form, morris_rhs};
use fpselberg_core::{
    eval_closed_explained, selberg_bruteforce, selberg_bruteforce_integer, selberg_direct_2d,
    Cycle, Error, FpContext, MasterPolySpec, MorrisParams, ResourceLimits, SelbergParams,
};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

/// Evaluate and cross-check Selberg-type integrals over prime fields.
#[derive(Parser)]
#[command(name = "fpselberg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one integral.
    Eval(EvalArgs),
    /// Show which case of the closed-form analysis applies.
    Classify(PointArgs),
    /// Run verification suites and print a report.
    Verify(VerifyArgs),
    /// Tabulate values over every parameter triple.
    Sweep(SweepArgs),
    /// Check the Morris constant-term identity for one parameter set.
    Morris(MorrisArgs),
}

#[derive(Args)]
struct PointArgs {
    #[arg(short = 'p', long = "prime")]
    prime: u32,
    #[arg(short = 'a', conflicts_with = "params")]
    a: Option<u32>,
    #[arg(short = 'b', conflicts_with = "params")]
    b: Option<u32>,
    #[arg(short = 'c', conflicts_with = "params")]
    c: Option<u32>,
    /// `a,b,c` in one flag.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    params: Option<Vec<u32>>,
    /// Cycle `l1,l2`.
    #[arg(short = 'l', long = "cycle", value_delimiter = ',', default_value = "1,1")]
    cycle: Vec<u32>,
    /// Print the instantiated formula.
    #[arg(short, long)]
    verbose: bool,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    point: PointArgs,
    #[arg(long, default_value = "closed")]
    method: Method,
    /// Expand over the integers before reducing (bruteforce only).
    #[arg(long)]
    integer_mode: bool,
}

#[derive(Args)]
struct CommonSweepArgs {
    /// Comma-separated odd primes.
    #[arg(long, value_delimiter = ',', default_value = "3,5,7,11,13")]
    primes: Vec<u32>,
    #[arg(long, default_value_t = 4)]
    cycle_bound: u32,
    #[arg(long = "method", value_delimiter = ',')]
    methods: Vec<Method>,
    #[arg(long)]
    integer_mode: bool,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonSweepArgs,
    #[arg(long = "suite", value_delimiter = ',')]
    suites: Vec<Suite>,
    #[arg(long, default_value = "text")]
    format: OutputFormat,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonSweepArgs,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Args)]
struct MorrisArgs {
    #[arg(short = 'n', default_value_t = 2)]
    n: usize,
    /// `alpha,beta,gamma`.
    #[arg(long, value_delimiter = ',', num_args = 1, required = true)]
    params: Vec<u32>,
}

/// Error carrying the process exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Resource(_) => EXIT_RESOURCE,
            Error::Guard(_) | Error::DivisionByZero { .. } => EXIT_VERIFY_FAILED,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            error: e.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            error,
        }
    }
}

type CliResult<T = ExitCode> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        error: anyhow::anyhow!(msg.into()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(args) => eval(args),
        Command::Classify(args) => classify(args),
        Command::Verify(args) => verify(args),
        Command::Sweep(args) => sweep(args),
        Command::Morris(args) => morris(args),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn point(args: &PointArgs) -> CliResult<(FpContext, SelbergParams, u32, u32)> {
    let ctx = FpContext::new(args.prime as u64)?;
    let (a, b, c) = match (&args.params, args.a, args.b, args.c) {
        (Some(v), ..) if v.len() == 3 => (v[0], v[1], v[2]),
        (Some(v), ..) => return Err(usage(format!("--params takes a,b,c, got {} values", v.len()))),
        (None, Some(a), Some(b), Some(c)) => (a, b, c),
        _ => return Err(usage("give -a, -b and -c, or --params a,b,c")),
    };
    let params = SelbergParams::new(args.prime, a, b, c)?;
    let [l1, l2] = args.cycle[..] else {
        return Err(usage(format!("--cycle takes l1,l2, got {} values", args.cycle.len())));
    };
    Cycle::pair(l1, l2)?;
    Ok((ctx, params, l1, l2))
}

fn limits() -> CliResult<ResourceLimits> {
    Ok(ResourceLimits::from_env()?)
}

fn eval(args: EvalArgs) -> CliResult {
    let (ctx, params, l1, l2) = point(&args.point)?;
    if args.integer_mode && args.method != Method::Bruteforce {
        return Err(usage("--integer-mode needs --method bruteforce"));
    }
    let explained = eval_closed_explained(&ctx, &params, l1, l2)?;
    let cycle = Cycle::pair(l1, l2)?;
    let mut integer = None;
    let value = match args.method {
        Method::Closed => explained.value,
        Method::Direct => selberg_direct_2d(&ctx, &params, l1, l2)?,
        Method::Bruteforce => {
            let spec = MasterPolySpec::from_params(2, &params)?;
            if args.integer_mode {
                let v = selberg_bruteforce_integer(&spec, &cycle, &limits()?)?;
                let reduced = fpselberg_core::poly::reduce_bigint(&v, params.p());
                integer = Some(v);
                reduced
            } else {
                selberg_bruteforce(&spec, &cycle, &limits()?)?
            }
        }
    };
    println!("value: {value}");
    if let Some(v) = integer {
        println!("integer: {v}");
    }
    println!("branch: {}", explained.tag);
    if args.point.verbose {
        print_formula(&explained.formula);
    }
    Ok(ExitCode::SUCCESS)
}

fn print_formula(formula: &Option<fpselberg_core::FactorialFormula>) {
    match formula {
        Some(f) => println!("formula: {f}"),
        None => println!("formula: 0 (vanishing case)"),
    }
}

fn classify(args: PointArgs) -> CliResult {
    let (ctx, params, l1, l2) = point(&args)?;
    let explained = eval_closed_explained(&ctx, &params, l1, l2)?;
    println!("cycle_class: {}", explained.tag.cycle_class.name());
    println!("branch: {}", explained.tag.branch);
    println!(
        "condition_set: {}",
        condition_set(&params).map_or("none", |s| s.name())
    );
    print_formula(&explained.formula);
    if args.verbose {
        println!("value: {}", explained.value);
    }
    Ok(ExitCode::SUCCESS)
}

fn config(common: CommonSweepArgs, suites: Vec<Suite>, format: OutputFormat) -> CliResult<SweepConfig> {
    let config = SweepConfig {
        primes: common.primes,
        cycle_bound: common.cycle_bound,
        methods: if common.methods.is_empty() {
            Method::ALL.to_vec()
        } else {
            common.methods
        },
        suites: if suites.is_empty() {
            Suite::ALL.to_vec()
        } else {
            suites
        },
        integer_mode: common.integer_mode,
        output_format: format,
        jobs: common.jobs,
        limits: limits()?,
    };
    config.validate()?;
    Ok(config)
}

fn output(path: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot write {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn verify(args: VerifyArgs) -> CliResult {
    let out_path = args.common.out.clone();
    let config = config(args.common, args.suites, args.format)?;
    let report = run_verify(&config)?;
    let mut out = output(&out_path)?;
    write_report(&report, config.output_format, &mut out).context("writing report")?;
    out.flush().context("writing report")?;
    if report.failed() == 0 {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("{} check(s) failed", report.failed());
        Ok(ExitCode::from(EXIT_VERIFY_FAILED))
    }
}

fn sweep(args: SweepArgs) -> CliResult {
    let out_path = args.common.out.clone();
    let config = config(args.common, Vec::new(), args.format)?;
    let rows = run_sweep(&config)?;
    let mut out = output(&out_path)?;
    write_sweep(&rows, config.output_format, &mut out).context("writing sweep")?;
    out.flush().context("writing sweep")?;
    Ok(ExitCode::SUCCESS)
}

fn morris(args: MorrisArgs) -> CliResult {
    let [alpha, beta, gamma] = args.params[..] else {
        return Err(usage(format!(
            "--params takes alpha,beta,gamma, got {} values",
            args.params.len()
        )));
    };
    let mp = MorrisParams::new(args.n, alpha, beta, gamma)?;
    let ct = morris_ct_bruteforce(&mp)?;
    let symmetric = morris_lhs_symmetric_form(&mp)?;
    let rhs = morris_rhs(&mp);
    println!("constant_term: {ct}");
    println!("symmetric_form: {symmetric}");
    println!("product: {rhs}");
    if ct == rhs && symmetric == ct {
        println!("identity: holds");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("identity: FAILS");
        Ok(ExitCode::from(EXIT_VERIFY_FAILED))
    }
}
