//! Front end for `zhu`: dimension tables, identity certification and the
//! Verma module suite, each emitted as a JSON report.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use zhu_core::generators::{GenBounds, Level};
use zhu_core::identities::{verify_all, IdentityId, IdentityRecord, VerifyConfig};
use zhu_core::quotient::{
    algebra_structure, prime_full_delta, AlgebraStructure, DimRecord, FilteredQuotient, LevelDelta,
};
use zhu_core::verma::{
    run_suite, AModuleSpec, CheckConfig, QuotientCache, VermaConfig, VermaReport,
};
use zhu_core::voa::{Automorphism, FreeBoson, VoaContext};
use zhu_core::{Error, GradeIndex};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_TRUNCATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "zhu",
    version,
    about = "Twisted Zhu algebras of the rank-one free boson"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Filtered dimension of A_{g,n,m}(V).
    Dims(DimsArgs),
    /// Certify the congruence identities by span membership.
    Verify(VerifyArgs),
    /// Build M(U) and M(U*), run the operator checks and the pairing.
    Verma(VermaArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Aut {
    Trivial,
    Theta,
}

impl Aut {
    fn automorphism(self) -> Automorphism {
        match self {
            Aut::Trivial => Automorphism::Trivial,
            Aut::Theta => Automorphism::Theta,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelArg {
    Prime,
    Full,
    /// Both, with the difference of dimensions.
    Both,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Common {
    #[arg(long, value_enum, default_value = "theta")]
    pub aut: Aut,
    /// Cutoff on internal grades; m + n + 2 when absent.
    #[arg(long = "P")]
    pub p: Option<String>,
    #[arg(long, default_value_t = 3)]
    pub composite: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(clap::Args, Debug, Clone)]
pub struct DimsArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value = "0")]
    pub m: String,
    #[arg(long, default_value = "0")]
    pub n: String,
    #[arg(long = "W", default_value_t = 3)]
    pub w: u32,
    /// Generator budget; W + 3 when absent.
    #[arg(long = "B")]
    pub b: Option<u32>,
    #[arg(long, value_enum, default_value = "full")]
    pub level: LevelArg,
    /// Also emit structure constants (needs m = n and a stable quotient).
    #[arg(long)]
    pub structure: bool,
}

#[derive(clap::Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    /// Comma-separated identity ids, or `all`.
    #[arg(long, default_value = "all")]
    pub ids: String,
    /// Largest grade m, n, p drawn for samples.
    #[arg(long, default_value = "3/2")]
    pub grades: String,
    /// Largest total weight of the monomials in a sample.
    #[arg(long = "W", default_value_t = 4)]
    pub w: u32,
    /// Largest generator budget tried.
    #[arg(long = "B", default_value_t = 8)]
    pub b: u32,
    #[arg(long, default_value_t = 48)]
    pub samples: usize,
    /// Record wall-clock time per identity; breaks byte-identical output.
    #[arg(long)]
    pub timings: bool,
}

#[derive(clap::Args, Debug, Clone)]
pub struct VermaArgs {
    #[command(flatten)]
    pub common: Common,
    /// Module spec JSON; the one-dimensional module over A_{g,m} when absent.
    #[arg(long)]
    pub module: Option<PathBuf>,
    /// Grade of the bottom level, used only without --module.
    #[arg(long, default_value = "0")]
    pub m: String,
    /// Highest level built.
    #[arg(long = "levels", visible_alias = "N", default_value = "2")]
    pub levels: String,
    #[arg(long = "W", default_value_t = 3)]
    pub w: u32,
    #[arg(long = "B", default_value_t = 12)]
    pub b: u32,
    #[arg(long, value_enum, default_value = "full")]
    pub level: LevelArg,
    /// Order of the associativity check.
    #[arg(long = "L", default_value_t = 2)]
    pub l: i64,
    #[arg(long, default_value_t = 48)]
    pub samples: usize,
    /// Largest weight of the vectors whose modes are sampled.
    #[arg(long, default_value_t = 3)]
    pub sample_weight: u32,
}

/// A finished run: its exit code and the report, if one was produced.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: Option<String>,
    pub error: Option<String>,
}

#[derive(Serialize)]
struct Report<C: Serialize, R: Serialize> {
    command: &'static str,
    config: C,
    result: R,
}

#[derive(Serialize)]
struct DimsConfig<'a> {
    aut: Aut,
    m: &'a str,
    n: &'a str,
    #[serde(rename = "W")]
    w: u32,
    #[serde(rename = "B")]
    b: u32,
    composite: u32,
    #[serde(rename = "P")]
    p: String,
    level: LevelArg,
}

#[derive(Serialize)]
#[serde(untagged)]
enum DimsResult {
    One {
        table: DimRecord,
        #[serde(skip_serializing_if = "Option::is_none")]
        structure: Option<AlgebraStructure>,
    },
    Both(LevelDelta),
}

#[derive(Serialize)]
struct VerifyReport {
    records: Vec<IdentityRecord>,
    passed: bool,
}

#[derive(Serialize)]
struct VermaRunConfig<'a> {
    aut: Aut,
    module: Option<&'a str>,
    #[serde(flatten)]
    verma: VermaConfig,
    checks: CheckConfig,
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Truncation(_) | Error::Unstable(_) => EXIT_TRUNCATION,
        Error::NotInAmbient => EXIT_CHECK_FAILED,
        _ => EXIT_CONFIG,
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn grade(s: &str, t: u32) -> zhu_core::Result<GradeIndex> {
    GradeIndex::parse(s, t)
}

fn level_of(arg: LevelArg) -> zhu_core::Result<Level> {
    match arg {
        LevelArg::Prime => Ok(Level::Prime),
        LevelArg::Full => Ok(Level::Full),
        LevelArg::Both => Err(Error::Config(
            "--level both is only meaningful for dims".into(),
        )),
    }
}

fn dims(args: &DimsArgs) -> zhu_core::Result<(i32, String)> {
    let aut = args.common.aut.automorphism();
    let t = aut.order();
    let m = grade(&args.m, t)?;
    let n = grade(&args.n, t)?;
    let p = match &args.common.p {
        Some(p) => grade(p, t)?,
        None => m.add(&n).shift(2 * t as i64),
    };
    let b = args.b.unwrap_or(args.w + 3);
    let bounds = GenBounds::new(b, args.common.composite, p);
    let ctx = VoaContext::new(FreeBoson::new(aut));
    let result = match args.level {
        LevelArg::Both => DimsResult::Both(prime_full_delta(&ctx, m, n, args.w, bounds)?),
        l => {
            let q = FilteredQuotient::build(&ctx, m, n, args.w, bounds, level_of(l)?)?;
            let structure = if args.structure {
                Some(algebra_structure(&q)?)
            } else {
                None
            };
            DimsResult::One {
                table: q.summary(),
                structure,
            }
        }
    };
    let config = DimsConfig {
        aut: args.common.aut,
        m: &args.m,
        n: &args.n,
        w: args.w,
        b,
        composite: bounds.composite,
        p: p.to_string(),
        level: args.level,
    };
    let report = Report {
        command: "dims",
        config,
        result,
    };
    Ok((EXIT_OK, to_json(&report)))
}

fn verify(args: &VerifyArgs) -> zhu_core::Result<(i32, String)> {
    let aut = args.common.aut.automorphism();
    let t = aut.order();
    let ids = IdentityId::parse_list(&args.ids)?;
    let cfg = VerifyConfig {
        max_grade: grade(&args.grades, t)?,
        sample_weight: args.w,
        b_cap: args.b,
        composite: args.common.composite,
        p_max: args.common.p.as_deref().map(|p| grade(p, t)).transpose()?,
        samples: args.samples,
        seed: args.common.seed,
        timings: args.timings,
    };
    let ctx = VoaContext::new(FreeBoson::new(aut));
    let records = verify_all(&ctx, &ids, &cfg)?;
    let passed = records.iter().all(|r| r.found);
    #[derive(Serialize)]
    struct Config<'a> {
        aut: Aut,
        ids: Vec<&'static str>,
        #[serde(flatten)]
        verify: &'a VerifyConfig,
    }
    let report = Report {
        command: "verify",
        config: Config {
            aut: args.common.aut,
            ids: ids.iter().map(|i| i.as_str()).collect(),
            verify: &cfg,
        },
        result: VerifyReport { records, passed },
    };
    let code = if passed { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok((code, to_json(&report)))
}

fn verma(args: &VermaArgs) -> zhu_core::Result<(i32, String)> {
    let aut = args.common.aut.automorphism();
    let t = aut.order();
    let cfg = VermaConfig {
        w: args.w,
        b: args.b,
        composite: args.common.composite,
        level: level_of(args.level)?,
        p_max: args.common.p.as_deref().map(|p| grade(p, t)).transpose()?,
        n_max: grade(&args.levels, t)?,
    };
    let checks = CheckConfig {
        sample_weight: args.sample_weight,
        samples: args.samples,
        seed: args.common.seed,
        l: args.l,
    };
    let ctx = VoaContext::new(FreeBoson::new(aut));
    let cache = QuotientCache::new(cfg);
    let spec = match &args.module {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            AModuleSpec::from_json(&text)?
        }
        None => {
            let m = grade(&args.m, t)?;
            AModuleSpec::one_dimensional(&*cache.get(&ctx, &m, &m)?)?
        }
    };
    let result: VermaReport = run_suite(&ctx, &spec, &cache, &checks)?;
    let code = if result.passed {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    let module = args
        .module
        .as_ref()
        .map(|p| p.to_str().unwrap_or("<non-utf8 path>"));
    let report = Report {
        command: "verma",
        config: VermaRunConfig {
            aut: args.common.aut,
            module,
            verma: cfg,
            checks,
        },
        result,
    };
    Ok((code, to_json(&report)))
}

/// Runs a parsed command line without touching stdout or the filesystem
/// beyond reading a module spec.
pub fn execute(cli: &Cli) -> Outcome {
    let run = match &cli.command {
        Command::Dims(a) => dims(a),
        Command::Verify(a) => verify(a),
        Command::Verma(a) => verma(a),
    };
    match run {
        Ok((code, report)) => Outcome {
            code,
            report: Some(report),
            error: None,
        },
        Err(e) => Outcome {
            code: exit_code(&e),
            report: None,
            error: Some(e.to_string()),
        },
    }
}

fn out_path(cli: &Cli) -> Option<&PathBuf> {
    match &cli.command {
        Command::Dims(a) => a.common.out.as_ref(),
        Command::Verify(a) => a.common.out.as_ref(),
        Command::Verma(a) => a.common.out.as_ref(),
    }
}

/// Parses `args`, runs, writes the report and returns the exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let outcome = execute(&cli);
    if let Some(err) = &outcome.error {
        eprintln!("zhu: {err}");
    }
    if let Some(report) = &outcome.report {
        match out_path(&cli) {
            Some(path) => {
                if let Err(e) = fs::write(path, report) {
                    eprintln!("zhu: cannot write {}: {e}", path.display());
                    return EXIT_CONFIG;
                }
            }
            None => print!("{report}"),
        }
    }
    outcome.code
}
