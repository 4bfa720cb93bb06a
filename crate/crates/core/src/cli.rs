//! Command-line front end: `classify`, `scan`, `choi`, `compose`, `ppt2`, `oracle`, `twirl`.
//!
//! Exit codes: 0 on success, 2 when input fails validation (including malformed JSON and bad
//! flags), 1 on internal failures such as unwritable output.

use std::ffi::OsString;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::channels::{identity_map, transpose_map, twirl, DiagonalParams, Family, LinearMap, ProductParams, TwirlTarget, UnitaryParams};
use crate::choi::{analytic_spectrum, choi_generic, numeric_spectrum, ChoiMatrix, SpectralFamily};
use crate::classify::classify;
use crate::compose::{compose, power, ppt2_check, ppt2_sweep, SampleClass};
use crate::error::Error;
use crate::format_float;
use crate::linalg::{ComplexMatrix, Tolerance, C64};
use crate::oracle::{block_positivity_falsify, region_scan, schwarz_falsify, FalsifyOptions, ScanSpec};

/// Overrides `--seed` everywhere it applies.
pub const SEED_ENV: &str = "EQUICHAN_SEED";

#[derive(Debug)]
enum CliError {
    /// Bad input: exit code 2.
    Invalid(String),
    /// Failure unrelated to the input: exit code 1.
    Internal(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Internal(format!("I/O error: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Internal(format!("CSV error: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "equichan", version, about = "Classify and compose group-equivariant quantum channels")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Eigenvalues above -EIG_ZERO count as nonnegative.
    #[arg(long, global = true, default_value_t = 1e-9)]
    eig_zero: f64,
    /// Largest tolerated Hermiticity defect.
    #[arg(long, global = true, default_value_t = 1e-9)]
    herm_sym: f64,
    /// Write the main output here instead of stdout.
    #[arg(short = 'o', long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
    /// Worker threads for scans and sampling (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Structural flags and region verdicts for one map.
    Classify(ParamArgs),
    /// Evaluate region predicates on a parameter grid (CSV).
    Scan(ScanArgs),
    /// Choi matrix and its spectrum.
    Choi(ChoiArgs),
    /// Parameters of a composition or power.
    Compose(ComposeArgs),
    /// PPT-squared check for one map, or over sampled PPT maps (JSON lines).
    Ppt2(Ppt2Args),
    /// Search for a Schwarz (or block-positivity) violation.
    Oracle(OracleArgs),
    /// Project a map onto an equivariant family.
    Twirl(TwirlArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    #[value(name = "U")]
    U,
    #[value(name = "DU2")]
    Du2,
    #[value(name = "DU3S")]
    Du3s,
    #[value(name = "PROD")]
    Prod,
}

/// A map given either as a JSON file (`-` for stdin) or by family flags.
#[derive(Args, Debug, Clone)]
struct ParamArgs {
    /// Parameter JSON as printed by `compose`; `-` reads stdin.
    #[arg(long, value_name = "FILE", conflicts_with = "family")]
    params: Option<PathBuf>,
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    /// Imaginary part of lambda.
    #[arg(long, allow_negative_numbers = true)]
    lambda_im: Option<f64>,
    /// Trace weight of a U(n) map (1 for unital maps).
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c12: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c21: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    l01: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    l10: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    l11: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct ScanArgs {
    /// Scan description JSON; `-` reads stdin.
    #[arg(long, value_name = "FILE")]
    spec: PathBuf,
    /// Replaces the seed in the scan file.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
}

#[derive(Args, Debug)]
struct ChoiArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Also write the spectra as CSV (eigenvalue, multiplicity, source).
    #[arg(long, value_name = "FILE")]
    spectra: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ComposeArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Inner map: the output is PARAMS ∘ WITH, so WITH acts first.
    #[arg(long, value_name = "FILE")]
    with: Option<PathBuf>,
    /// Raise the (composed) map to this power.
    #[arg(long)]
    power: Option<u32>,
}

#[derive(Args, Debug)]
struct Ppt2Args {
    #[command(flatten)]
    params: ParamArgs,
    /// Sample this many PPT maps from the class given by --family (and --n, --n1, --n2).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 2000)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Local-search steps after the random probes.
    #[arg(long, default_value_t = 300)]
    refine: usize,
    /// Search product vectors against the Choi matrix instead of Kadison gaps.
    #[arg(long)]
    block_positivity: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BuiltinMap {
    Identity,
    Transpose,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TwirlTargetArg {
    #[value(name = "U")]
    U,
    #[value(name = "DU")]
    Du,
    #[value(name = "PROD")]
    Prod,
}

#[derive(Args, Debug)]
struct TwirlArgs {
    /// Choi matrix JSON: output of `choi`, `{"dim_in","dim_out","matrix"}`, or a bare matrix; `-` reads stdin.
    #[arg(long, value_name = "FILE", conflicts_with = "map")]
    choi: Option<PathBuf>,
    #[arg(long, value_enum)]
    map: Option<BuiltinMap>,
    /// Dimension for --map.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_enum)]
    target: TwirlTargetArg,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(CliError::Invalid(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    if !(g.eig_zero >= 0.0 && g.herm_sym >= 0.0) {
        return Err(CliError::Invalid("tolerances must be nonnegative".into()));
    }
    let tol = Tolerance { eig_zero: g.eig_zero, herm_sym: g.herm_sym };
    match g.threads {
        Some(0) => Err(CliError::Invalid("--threads must be positive".into())),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build().map_err(|e| CliError::Internal(e.to_string()))?;
            pool.install(|| execute(&cli.command, g.output.as_deref(), &tol))
        }
        None => execute(&cli.command, g.output.as_deref(), &tol),
    }
}

/// Output is buffered and written only after the command succeeds, so a failed run never
/// leaves a truncated file behind.
fn execute(cmd: &Command, output: Option<&Path>, tol: &Tolerance) -> CliResult<()> {
    let mut out: Vec<u8> = Vec::new();
    match cmd {
        Command::Classify(a) => write_json(&mut out, &classify(&a.to_family()?, tol)?)?,
        Command::Scan(a) => {
            let mut spec: ScanSpec = read_json(&a.spec)?;
            if let Some(s) = effective_seed(a.seed)? {
                spec.seed = s;
            }
            let table = region_scan(&spec, tol)?;
            match a.format {
                TableFormat::Csv => table.write_csv(&mut out)?,
                TableFormat::Json => write_json(&mut out, &table)?,
            }
        }
        Command::Choi(a) => run_choi(a, &mut out, tol)?,
        Command::Compose(a) => {
            let mut f = a.params.to_family()?;
            if let Some(path) = &a.with {
                let inner: Family = read_json(path)?;
                f = compose(&f, &inner)?;
            }
            if let Some(k) = a.power {
                f = power(&f, k)?;
            }
            write_json(&mut out, &f)?;
        }
        Command::Ppt2(a) => match a.samples {
            None => write_json(&mut out, &ppt2_check(&a.params.to_family()?, tol)?)?,
            Some(samples) => {
                let class = a.params.sample_class()?;
                let seed = effective_seed(Some(a.seed))?.unwrap_or(a.seed);
                for report in ppt2_sweep(class, samples, seed, tol)? {
                    serde_json::to_writer(&mut out, &report).map_err(|e| CliError::Internal(e.to_string()))?;
                    writeln!(out)?;
                }
            }
        },
        Command::Oracle(a) => run_oracle(a, &mut out, tol)?,
        Command::Twirl(a) => run_twirl(a, &mut out)?,
    }
    match output {
        Some(p) => std::fs::write(p, &out).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(&out)?;
            stdout.flush().map_err(Into::into)
        }
    }
}

#[derive(Serialize)]
struct ChoiOutput<'a> {
    choi: &'a ChoiMatrix,
    analytic_spectrum: Option<Vec<SpectralFamily>>,
    numeric_spectrum: Vec<SpectralFamily>,
}

fn run_choi(a: &ChoiArgs, out: &mut dyn Write, tol: &Tolerance) -> CliResult<()> {
    let f = a.params.to_family()?;
    let choi = choi_generic(&f, f.dim())?;
    // closed forms need real parameters; complex inputs still get the numeric spectrum
    let analytic = match analytic_spectrum(&f, tol) {
        Ok(s) => Some(s),
        Err(Error::NonRealParameter(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let numeric = numeric_spectrum(&choi, tol)?;
    if let Some(path) = &a.spectra {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["eigenvalue", "multiplicity", "source"])?;
        let tagged = analytic.iter().flatten().map(|s| (s, "analytic")).chain(numeric.iter().map(|s| (s, "numeric")));
        for (s, source) in tagged {
            w.write_record([format_float(s.value), s.multiplicity.to_string(), source.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
        std::fs::write(path, bytes).map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
    }
    write_json(out, &ChoiOutput { choi: &choi, analytic_spectrum: analytic, numeric_spectrum: numeric })
}

fn run_oracle(a: &OracleArgs, out: &mut dyn Write, tol: &Tolerance) -> CliResult<()> {
    let f = a.params.to_family()?;
    let seed = effective_seed(Some(a.seed))?.unwrap_or(a.seed);
    if a.block_positivity {
        let choi = choi_generic(&f, f.dim())?;
        match block_positivity_falsify(&choi, a.budget, seed, tol)? {
            Some(w) => write_json(out, &w),
            None => writeln!(out, "none").map_err(Into::into),
        }
    } else {
        let opts = FalsifyOptions { budget: a.budget, seed, stream: 0, refine_steps: a.refine, tol: *tol };
        match schwarz_falsify(&f, &opts)? {
            Some(w) => write_json(out, &w),
            None => writeln!(out, "none").map_err(Into::into),
        }
    }
}

fn run_twirl(a: &TwirlArgs, out: &mut dyn Write) -> CliResult<()> {
    let choi = match (&a.choi, a.map) {
        (Some(path), _) => {
            let value: serde_json::Value = read_json(path)?;
            let choi = value.get("choi").cloned().unwrap_or(value);
            match ChoiMatrix::deserialize(&choi) {
                Ok(c) => c,
                Err(_) => ChoiMatrix::from_matrix(ComplexMatrix::deserialize(&choi).map_err(|e| {
                    CliError::Invalid(format!("{}: expected a Choi matrix or a square matrix: {e}", path.display()))
                })?)?,
            }
        }
        (None, Some(m)) => {
            let n = a.n.ok_or_else(|| CliError::Invalid("--map requires --n".into()))?;
            if n == 0 {
                return Err(CliError::Invalid("--n must be positive".into()));
            }
            match m {
                BuiltinMap::Identity => choi_generic(&identity_map(n), n)?,
                BuiltinMap::Transpose => choi_generic(&transpose_map(n), n)?,
            }
        }
        (None, None) => return Err(CliError::Invalid("give --choi FILE or --map identity|transpose".into())),
    };
    let target = match a.target {
        TwirlTargetArg::U => TwirlTarget::Unitary,
        TwirlTargetArg::Du => TwirlTarget::Diagonal,
        TwirlTargetArg::Prod => match (a.n1, a.n2) {
            (Some(n1), Some(n2)) => TwirlTarget::Product { n1, n2 },
            _ => return Err(CliError::Invalid("--target PROD requires --n1 and --n2".into())),
        },
    };
    write_json(out, &twirl(&choi, target)?)
}

impl ParamArgs {
    fn require<T: Copy>(v: Option<T>, flag: &str, family: &str) -> CliResult<T> {
        v.ok_or_else(|| CliError::Invalid(format!("--{flag} is required for --family {family}")))
    }

    fn to_family(&self) -> CliResult<Family> {
        if let Some(path) = &self.params {
            return read_json(path);
        }
        let family = self.family.ok_or_else(|| CliError::Invalid("give --params FILE or --family U|DU2|DU3S|PROD".into()))?;
        let lam = |name: &str| -> CliResult<C64> {
            Ok(C64::new(Self::require(self.lambda, "lambda", name)?, self.lambda_im.unwrap_or(0.0)))
        };
        Ok(match family {
            FamilyArg::U => {
                let n = Self::require(self.n, "n", "U")?;
                UnitaryParams::new(n, C64::new(self.sigma.unwrap_or(1.0), 0.0), lam("U")?)?.into()
            }
            FamilyArg::Du2 => DiagonalParams::du2(Self::require(self.c12, "c12", "DU2")?, Self::require(self.c21, "c21", "DU2")?, lam("DU2")?).into(),
            FamilyArg::Du3s => DiagonalParams::du3_symmetric(Self::require(self.p, "p", "DU3S")?, lam("DU3S")?).into(),
            FamilyArg::Prod => ProductParams::unital(
                Self::require(self.n1, "n1", "PROD")?,
                Self::require(self.n2, "n2", "PROD")?,
                Self::require(self.l01, "l01", "PROD")?,
                Self::require(self.l10, "l10", "PROD")?,
                Self::require(self.l11, "l11", "PROD")?,
            )?
            .into(),
        })
    }

    fn sample_class(&self) -> CliResult<SampleClass> {
        let family = self.family.ok_or_else(|| CliError::Invalid("--samples requires --family U|DU2|DU3S|PROD".into()))?;
        Ok(match family {
            FamilyArg::U => SampleClass::Unitary { n: Self::require(self.n, "n", "U")? },
            FamilyArg::Du2 => SampleClass::Du2,
            FamilyArg::Du3s => SampleClass::Du3Symmetric,
            FamilyArg::Prod => SampleClass::Product { n1: Self::require(self.n1, "n1", "PROD")?, n2: Self::require(self.n2, "n2", "PROD")? },
        })
    }
}

fn effective_seed(flag: Option<u64>) -> CliResult<Option<u64>> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| CliError::Invalid(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(flag),
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Invalid(format!("cannot read {}: {e}", path.display())))
    }
}

fn parse_json<T: DeserializeOwned>(text: &str, path: &Path) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| {
        CliError::Invalid(format!("{}: invalid JSON at line {}, column {}: {e}", path.display(), e.line(), e.column()))
    })
}

fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    parse_json(&read_text(path)?, path)
}

fn write_json<T: Serialize + ?Sized>(out: &mut dyn Write, value: &T) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::Internal(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_exit_with_two() {
        assert_eq!(run(["equichan", "frobnicate"]), 2);
        assert_eq!(run(["equichan", "classify", "--family", "U"]), 2);
        assert_eq!(run(["equichan", "classify", "--family", "U", "--n", "1", "--lambda", "0"]), 2);
    }

    #[test]
    fn negative_values_parse() {
        let cli = Cli::try_parse_from(["equichan", "classify", "--family", "U", "--n", "2", "--lambda", "-0.4"]).unwrap();
        match cli.command {
            Command::Classify(a) => assert_eq!(a.lambda, Some(-0.4)),
            _ => panic!("wrong subcommand"),
        }
    }
}
