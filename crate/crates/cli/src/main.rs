//! `brevity`: analyze corpora for the frequency/length trade-off.
//!
//! `analyze` runs every language of a TOML config and writes the report
//! files; `single` analyzes one input and prints the numbers.
//!
//! Exit codes: 0 all languages analyzed, 2 partial failures, 1 fatal
//! config or I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use brevity_core::report::{significance_marker, BatchOutcome, ReportRow};
use brevity_core::{
    analyze_path, permutation_test, run_batch, write_batch_outputs, BatchConfig, BatchOptions,
    InputFormat, LanguageAnalysis, LanguageSpec, ShuffleVariant, Unit,
};

#[derive(Parser)]
#[command(
    name = "brevity",
    about = "Word-length statistics against a random re-pairing baseline",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze every language in a batch config and write report files
    Analyze(AnalyzeArgs),
    /// Analyze one input file and print its report
    Single(SingleArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Batch config (TOML) with global options and \[\[language\]\] entries
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: the config's out_dir, or ./out)
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Override the config seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config Monte-Carlo trial count
    #[arg(long)]
    trials: Option<u64>,
}

#[derive(Args)]
struct SingleArgs {
    /// Input corpus file
    #[arg(long)]
    input: PathBuf,
    /// Input format
    #[arg(long, value_enum)]
    format: FormatArg,
    /// Length unit
    #[arg(long, value_enum, default_value_t = UnitArg::Chars)]
    unit: UnitArg,
    /// Unit mapping TSV (required for --unit mapped on token formats)
    #[arg(long)]
    mapping: Option<PathBuf>,
    /// Run the unsupervised alphabet filter
    #[arg(long, value_enum, default_value_t = Toggle::On)]
    optional_filter: Toggle,
    /// Replace the unsupervised filter with the CJK-block filter
    #[arg(long)]
    cjk_mode: bool,
    /// Language name used in the report
    #[arg(long, default_value = "language")]
    language: String,
    #[arg(long, default_value = "")]
    family: String,
    #[arg(long, default_value = "")]
    script: String,
    /// Also write report files for this one language
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Seed for the Monte-Carlo compression test
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Trials for the Monte-Carlo compression test
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Conllu,
    Alignment,
    Typelist,
}

impl From<FormatArg> for InputFormat {
    fn from(value: FormatArg) -> Self {
        match value {
            FormatArg::Conllu => InputFormat::Conllu,
            FormatArg::Alignment => InputFormat::Alignment,
            FormatArg::Typelist => InputFormat::Typelist,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum UnitArg {
    Chars,
    Duration,
    Mapped,
}

impl From<UnitArg> for Unit {
    fn from(value: UnitArg) -> Self {
        match value {
            UnitArg::Chars => Unit::Characters,
            UnitArg::Duration => Unit::DurationSeconds,
            UnitArg::Mapped => Unit::Mapped,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Single(args) => run_single(args),
    };
    ExitCode::from(code)
}

fn run_analyze(args: AnalyzeArgs) -> u8 {
    let raw = match std::fs::read_to_string(&args.config) {
        Ok(raw) => raw,
        Err(error) => {
            eprintln!("brevity: cannot read {}: {error}", args.config.display());
            return 1;
        }
    };
    let mut config: BatchConfig = match toml::from_str(&raw) {
        Ok(config) => config,
        Err(error) => {
            eprintln!("brevity: invalid config {}: {error}", args.config.display());
            return 1;
        }
    };
    if let Some(seed) = args.seed {
        config.options.seed = seed;
    }
    if let Some(trials) = args.trials {
        config.options.trials = trials;
    }
    let base_dir = args
        .config
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."))
        .to_path_buf();
    let out_dir = args
        .out_dir
        .or_else(|| config.options.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"));

    let outcome = match run_batch(&config, &base_dir) {
        Ok(outcome) => outcome,
        Err(error) => {
            eprintln!("brevity: {error}");
            return 1;
        }
    };
    if let Err(error) = write_batch_outputs(&outcome, &out_dir) {
        eprintln!("brevity: {error}");
        return 1;
    }

    print_batch_summary(&outcome, &out_dir);
    if outcome.failures.is_empty() {
        0
    } else {
        2
    }
}

fn print_batch_summary(outcome: &BatchOutcome, out_dir: &Path) {
    println!(
        "{:<16} {:>8} {:>10} {:>7} {:>7} {:>7} {:>10} {:>7} {:>10}",
        "language", "n", "T", "L", "L_r", "tau", "tau_p_adj", "r", "r_p_adj"
    );
    for report in outcome.reports() {
        let row = ReportRow::from(report);
        println!(
            "{:<16} {:>8} {:>10} {:>7.2} {:>7.2} {:>7.2} {:>7.1e}{:<3} {:>7.2} {:>7.1e}{:<3}",
            row.language,
            row.n_filtered,
            row.token_count_filtered,
            row.mean_token_length,
            row.random_baseline,
            row.tau,
            row.tau_p_adj,
            significance_marker(row.tau_p_adj),
            row.r,
            row.r_p_adj,
            significance_marker(row.r_p_adj),
        );
    }
    for failure in &outcome.failures {
        println!("error: {}: {}", failure.language, failure.error);
    }
    println!(
        "{} analyzed, {} failed; reports in {}",
        outcome.analyses.len(),
        outcome.failures.len(),
        out_dir.display()
    );
}

fn run_single(args: SingleArgs) -> u8 {
    let mut spec = LanguageSpec::new(
        args.language.clone(),
        args.input.clone(),
        args.format.into(),
    );
    spec.family = args.family.clone();
    spec.script = args.script.clone();
    spec.unit = args.unit.into();
    spec.mapping = args.mapping.clone();
    spec.optional_filter = args.optional_filter == Toggle::On;
    spec.cjk_mode = args.cjk_mode;

    let analysis = match analyze_path(&spec, Path::new(".")) {
        Ok(analysis) => analysis,
        Err(error) => {
            eprintln!("brevity: {error}");
            return 1;
        }
    };
    print_single(&analysis, args.seed, args.trials);

    if let Some(out_dir) = &args.out_dir {
        let outcome = BatchOutcome {
            options: BatchOptions {
                seed: args.seed,
                trials: args.trials,
                out_dir: Some(out_dir.clone()),
            },
            analyses: vec![analysis],
            failures: vec![],
        };
        if let Err(error) = write_batch_outputs(&outcome, out_dir) {
            eprintln!("brevity: {error}");
            return 1;
        }
        println!("reports in {}", out_dir.display());
    }
    0
}

fn print_single(analysis: &LanguageAnalysis, seed: u64, trials: u64) {
    let report = &analysis.report;
    let summary = &report.summary;
    println!("language        {}", report.language);
    println!("unit            {}", report.unit.as_str());
    println!(
        "alphabet        A = {} -> A' = {}",
        report.alphabet_size, report.alphabet_size_filtered
    );
    println!(
        "types           n = {} -> n' = {}",
        report.type_count, report.type_count_filtered
    );
    println!(
        "tokens          T = {} -> T' = {}",
        report.token_count, report.token_count_filtered
    );
    println!("mean length     L   = {:.4}", summary.mean_token_length);
    println!("baseline        L_r = {:.4}", summary.random_baseline);
    println!(
        "kendall         tau = {:.4}, left p = {:.2e}{}",
        summary.kendall_tau,
        summary.kendall_pvalue,
        significance_marker(summary.kendall_pvalue)
    );
    println!(
        "pearson         r = {:.4}, left p = {:.2e}{}",
        summary.pearson_r,
        summary.pearson_pvalue,
        significance_marker(summary.pearson_pvalue)
    );
    match permutation_test(
        &analysis.filtered_lexicon,
        ShuffleVariant::ShuffleLengths,
        trials,
        seed,
    ) {
        Ok(p) => {
            println!("compression     permutation left p = {p:.2e} ({trials} trials, seed {seed})")
        }
        Err(error) => println!("compression     permutation test unavailable: {error}"),
    }
}
