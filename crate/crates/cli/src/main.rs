use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use kmer_pinv::estimate::{estimate_counts, read_sequences, write_estimate_tsv, ClassMap};
use kmer_pinv::io::{
    format_value, word_labels, write_matrix_csv, write_matrix_json, write_matrix_market, write_system_json,
    NumberFormat, DEFAULT_FLOAT_DIGITS,
};
use kmer_pinv::oracle::{self, CheckReport, DenseExactMatrix};
use kmer_pinv::pinv::{PinvContext, PinvOperator};
use kmer_pinv::spectra::{build_incidence_with, build_system_with};
use kmer_pinv::words::DEFAULT_CAP;
use kmer_pinv::{AlphabetProfile, Error, ExactScalar, Execution, WordSpace};

#[derive(Parser)]
#[command(name = "kmer-pinv", version, about = "Gapped k-mer incidence matrices, their spectra and pseudoinverses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write A, the spectrum of A A^T, and optionally dense W and H.
    Build(BuildArgs),
    /// Certify the closed forms with exact checks and print a JSON report.
    Verify(VerifyArgs),
    /// Estimate l-mer counts from gapped k-mer counts of sequences.
    Estimate(EstimateArgs),
    /// Print one entry of W (with --v) or H (with --w).
    Entry(EntryArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Alphabet sizes, comma separated (e.g. 3,2).
    #[arg(long = "B", value_name = "SIZES")]
    profile: String,
    /// Number of letters in a gapped word.
    #[arg(long)]
    k: usize,
    /// Upper bound on any enumerated word set.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    cap: u64,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Exact,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum DenseFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputFormat {
    #[arg(long, value_enum, default_value = "exact")]
    format: FormatArg,
    /// Significant digits for --format float.
    #[arg(long, default_value_t = DEFAULT_FLOAT_DIGITS)]
    precision: usize,
}

impl OutputFormat {
    fn number_format(&self) -> NumberFormat {
        match self.format {
            FormatArg::Exact => NumberFormat::Exact,
            FormatArg::Float => NumberFormat::Float {
                digits: self.precision,
            },
        }
    }
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    common: Common,
    /// Artifacts to write: any of A, W, H, spectrum.
    #[arg(long, value_delimiter = ',', default_value = "A,spectrum")]
    emit: Vec<String>,
    #[command(flatten)]
    output: OutputFormat,
    #[arg(long, value_enum, default_value = "csv")]
    dense_format: DenseFormat,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Write the report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Perturb one entry of W before checking (exercises the failure path).
    #[arg(long, hide = true)]
    inject_corruption: bool,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    common: Common,
    /// TSV file with one `id<TAB>symbols` record per line.
    #[arg(long)]
    sequences: PathBuf,
    /// JSON position-class map `{"alphabet_sizes": [...], "period": n}`.
    #[arg(long)]
    map: Option<PathBuf>,
    /// Output TSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    output: OutputFormat,
}

#[derive(Args)]
struct EntryArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    u: String,
    /// Gapped word: print W(u, v).
    #[arg(long, conflicts_with = "w", required_unless_present = "w")]
    v: Option<String>,
    /// Ungapped word: print H(u, w).
    #[arg(long)]
    w: Option<String>,
    #[command(flatten)]
    output: OutputFormat,
}

enum Failure {
    Verify,
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Build(a) => build(a),
        Command::Verify(a) => verify(a),
        Command::Estimate(a) => estimate(a),
        Command::Entry(a) => entry(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(1),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::CapExceeded { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

impl Common {
    fn profile(&self) -> Result<AlphabetProfile, Error> {
        let p = AlphabetProfile::parse(&self.profile)?.with_cap(self.cap);
        if self.k > p.len() {
            return Err(Error::InvalidProfile(format!(
                "k = {} exceeds word length {}",
                self.k,
                p.len()
            )));
        }
        Ok(p)
    }

    fn execution(&self) -> Result<Execution, Error> {
        match self.threads {
            Some(0) => Err(Error::InvalidProfile("--threads must be at least 1".into())),
            Some(1) => Ok(Execution::Sequential),
            Some(_n) => {
                #[cfg(feature = "parallel")]
                {
                    // a second call fails once a pool exists; the first one wins
                    let _ = rayon::ThreadPoolBuilder::new().num_threads(_n).build_global();
                }
                Ok(Execution::Parallel)
            }
            None => Ok(Execution::default()),
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(path)?))
}

fn build(args: BuildArgs) -> Result<(), Failure> {
    let profile = args.common.profile()?;
    let k = args.common.k;
    let exec = args.common.execution()?;
    let format = args.output.number_format();
    let mut emit = Vec::new();
    for item in &args.emit {
        let item = item.trim();
        match item {
            "A" | "W" | "H" | "spectrum" => emit.push(item.to_string()),
            other => {
                return Err(Error::Parse(format!("unknown artifact {other:?}; expected A, W, H or spectrum")).into())
            }
        }
    }
    fs::create_dir_all(&args.out_dir)?;
    let sigma = word_labels(&profile, &WordSpace::sigma(&profile)?.words());
    let rows = word_labels(&profile, &WordSpace::gapped(&profile, k)?.words());
    let dense = |name: &str, m: &DenseExactMatrix, rl: &[String], cl: &[String]| -> Result<PathBuf, Error> {
        let path = match args.dense_format {
            DenseFormat::Csv => args.out_dir.join(format!("{name}.csv")),
            DenseFormat::Json => args.out_dir.join(format!("{name}.json")),
        };
        let out = create(&path)?;
        match args.dense_format {
            DenseFormat::Csv => write_matrix_csv(m, rl, cl, format, out)?,
            DenseFormat::Json => write_matrix_json(m, rl, cl, format, out)?,
        }
        Ok(path)
    };
    let ctx = if emit.iter().any(|e| e == "W" || e == "H") {
        Some(PinvContext::with_execution(&profile, k, exec)?)
    } else {
        None
    };
    for item in &emit {
        let path = match item.as_str() {
            "A" => {
                let path = args.out_dir.join("A.mtx");
                write_matrix_market(&build_incidence_with(&profile, k, exec)?, create(&path)?)?;
                path
            }
            "spectrum" => {
                let path = args.out_dir.join("spectrum.json");
                write_system_json(&build_system_with(&profile, k, exec)?, create(&path)?)?;
                path
            }
            "W" => dense("W", &ctx.as_ref().expect("context").materialize_w()?, &sigma, &rows)?,
            _ => dense("H", &ctx.as_ref().expect("context").materialize_h()?, &sigma, &sigma)?,
        };
        println!("{}", path.display());
    }
    Ok(())
}

fn verify_reports(profile: &AlphabetProfile, k: usize, exec: Execution, corrupt: bool) -> Result<Vec<CheckReport>, Error> {
    let a = DenseExactMatrix::from_incidence(&build_incidence_with(profile, k, exec)?);
    let ctx = PinvContext::with_execution(profile, k, exec)?;
    let mut w = ctx.materialize_w()?;
    if corrupt && w.rows() > 0 && w.cols() > 0 {
        let bumped = w.get(0, 0) + ExactScalar::new(1.into(), 7.into());
        w.set(0, 0, bumped);
    }
    let system = build_system_with(profile, k, exec)?;
    let h = ctx.materialize_h()?;
    let mut reports = oracle::penrose_check(&a, &w)?;
    reports.push(oracle::rank_check(&a, &system));
    reports.push(oracle::gram_residual(&a, &system)?);
    reports.push(oracle::column_space_check(&a, &system)?);
    reports.extend(oracle::eigen_checks(&a, &system)?);
    reports.extend(oracle::orthogonality_check(&system)?);
    reports.extend(oracle::trace_check(&system));
    reports.extend(oracle::projector_checks(&h)?);
    reports.push(oracle::equality_check("WA=H", &w.mul(&a)?, &h));
    let op = PinvOperator::with_execution(profile, k, exec)?;
    let mut applied = DenseExactMatrix::zeros(w.rows(), w.cols());
    for j in 0..w.cols() {
        let mut e = vec![ExactScalar::from_integer(0.into()); w.cols()];
        e[j] = ExactScalar::from_integer(1.into());
        for (i, x) in op.apply_w(&e)?.into_iter().enumerate() {
            applied.set(i, j, x);
        }
    }
    reports.push(oracle::equality_check("w_apply=W", &applied, &w));
    Ok(reports)
}

fn verify(args: VerifyArgs) -> Result<(), Failure> {
    let profile = args.common.profile()?;
    let exec = args.common.execution()?;
    let reports = verify_reports(&profile, args.common.k, exec, args.inject_corruption)?;
    let pass = oracle::all_pass(&reports);
    let doc = json!({
        "profile": profile.sizes(),
        "k": args.common.k,
        "pass": pass,
        "checks": reports,
    });
    let text = serde_json::to_string_pretty(&doc).map_err(Error::from)?;
    match &args.report {
        Some(path) => {
            let mut f = create(path)?;
            writeln!(f, "{text}")?;
            f.flush()?;
        }
        None => println!("{text}"),
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn estimate(args: EstimateArgs) -> Result<(), Failure> {
    let profile = args.common.profile()?;
    let exec = args.common.execution()?;
    let map = match &args.map {
        Some(path) => ClassMap::from_json(&fs::read_to_string(path)?)?,
        None => ClassMap::default_for(&profile),
    };
    let records = read_sequences(BufReader::new(File::open(&args.sequences)?), &map)?;
    let est = estimate_counts(&profile, args.common.k, &map, &records, exec)?;
    let format = args.output.number_format();
    match &args.out {
        Some(path) => write_estimate_tsv(&profile, &est, format, create(path)?)?,
        None => write_estimate_tsv(&profile, &est, format, io::stdout().lock())?,
    }
    Ok(())
}

fn entry(args: EntryArgs) -> Result<(), Failure> {
    let profile = args.common.profile()?;
    let ctx = PinvContext::untabulated(&profile, args.common.k)?;
    let u = profile.parse_word(&args.u)?;
    let value = match (&args.v, &args.w) {
        (Some(v), _) => ctx.w_entry(&u, &profile.parse_word(v)?)?,
        (None, Some(w)) => ctx.h_entry(&u, &profile.parse_word(w)?)?,
        (None, None) => unreachable!("clap requires --v or --w"),
    };
    println!("{}", format_value(&value, args.output.number_format()));
    Ok(())
}
