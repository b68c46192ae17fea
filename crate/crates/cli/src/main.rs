//! Command-line harness: run the experiment protocol, generate synthetic
//! cohorts, verify the published statistics, and re-render saved reports.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 verification discrepancies found.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use partum::cohort::default_cohort_config;
use partum::evalstat::F1Averaging;
use partum::protocol::{
    run_protocol, verify_embedded_fixture, DataSource, ProtocolConfig,
};
use partum::report::{emit_report, load_report, render_verification, ReportFormat};
use partum::select::GroupMode;
use partum::tabular::paper_schema;
use partum::Error;

#[derive(Parser)]
#[command(name = "partum", version, about = "Tabular classification experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    MarkdownTable,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::MarkdownTable => ReportFormat::MarkdownTable,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupsArg {
    Replication,
    DataDriven,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AveragingArg {
    Binary,
    Macro,
    Weighted,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full cross-validation protocol and write a report.
    RunProtocol(RunArgs),
    /// Generate a synthetic cohort CSV plus its schema.
    GenerateCohort(GenerateArgs),
    /// Recompute the published summary statistics from the embedded
    /// results fixture and flag discrepancies.
    VerifyPaper,
    /// Re-render a saved JSON report in another format.
    Report(ReportArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Protocol configuration JSON; defaults to the built-in synthetic run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Cross-validation fold count.
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Feature-group construction mode.
    #[arg(long, value_enum)]
    groups: Option<GroupsArg>,
    /// Force one F1 averaging mode for every target.
    #[arg(long, value_enum)]
    f1_averaging: Option<AveragingArg>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Cohort configuration JSON; defaults to the built-in generator.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Row count when no configuration file is given.
    #[arg(long, default_value_t = 93)]
    rows: usize,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Saved JSON report to re-render.
    input: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::MarkdownTable)]
    format: FormatArg,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::InvalidArgument(_) | Error::TooManyFolds { .. } => 1,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::RunProtocol(args) => {
            let mut config: ProtocolConfig = match &args.config {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    serde_json::from_str(&text)
                        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
                }
                None => ProtocolConfig::default(),
            };
            if let Some(seed) = args.seed {
                config.seed = seed;
                if let DataSource::Synthetic { config: c } = &mut config.data {
                    c.seed = seed;
                }
            }
            config.folds = args.folds;
            if let Some(groups) = args.groups {
                config.group_mode = match groups {
                    GroupsArg::Replication => GroupMode::Replication,
                    GroupsArg::DataDriven => GroupMode::DataDriven,
                };
            }
            if let Some(avg) = args.f1_averaging {
                let mode = match avg {
                    AveragingArg::Binary => F1Averaging::Binary { pos: 1 },
                    AveragingArg::Macro => F1Averaging::Macro,
                    AveragingArg::Weighted => F1Averaging::Weighted,
                };
                for target in config.targets.clone() {
                    config.averaging.insert(target, mode);
                }
            }
            let report = run_protocol(&config)?;
            let files = emit_report(&report, args.format.into(), &args.out)?;
            for f in &files {
                println!("wrote {}", f.display());
            }
            println!(
                "{} cross-validation cells, {} notes",
                report.cv_executions,
                report.notes.len()
            );
            Ok(0)
        }
        Command::GenerateCohort(args) => {
            let mut config = match &args.config {
                Some(path) => {
                    let text = std::fs::read_to_string(path)?;
                    serde_json::from_str(&text)
                        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
                }
                None => default_cohort_config(args.rows, args.seed.unwrap_or(42)),
            };
            if let Some(seed) = args.seed {
                config.seed = seed;
            }
            let schema = paper_schema();
            let dataset = partum::cohort::generate_cohort(&schema, &config)?;
            std::fs::create_dir_all(&args.out)?;
            let csv_path = args.out.join("cohort.csv");
            dataset.write_csv(&csv_path)?;
            let schema_path = args.out.join("schema.json");
            schema.to_json_file(&schema_path)?;
            println!("wrote {}", csv_path.display());
            println!("wrote {}", schema_path.display());
            println!("{} rows, {} columns", dataset.n_rows, schema.columns.len());
            Ok(0)
        }
        Command::VerifyPaper => {
            let verification = verify_embedded_fixture()?;
            print!("{}", render_verification(&verification));
            let clean =
                verification.all_checks_passed() && verification.discrepancies.is_empty();
            Ok(if clean { 0 } else { 3 })
        }
        Command::Report(args) => {
            let report = load_report(&args.input)?;
            let files = emit_report(&report, args.format.into(), &args.out)?;
            for f in &files {
                println!("wrote {}", f.display());
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap uses exit code 2 for usage errors; this tool reserves 2
            // for data errors, so remap to 1 (help/version still exit 0)
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
