//! End-to-end per-language analysis and batch reporting: runs the filter
//! pipeline, assembles per-language statistics, applies the
//! multiple-testing correction across languages and renders the TSV/JSON
//! reports and the scatter figure.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::filter::{
    apply_alphabet_filter, cjk_complement_filter, is_cjk_char, mandatory_filter,
    render_alphabet_audit, working_alphabet, FilterConfig, FilterError,
};
use crate::ingest::{parse_alignment, parse_conllu, parse_typelist, ParseError, RawToken};
use crate::lengths::{LengthError, UnitMapping};
use crate::model::{build_lexicon, character_inventory, Lexicon, Metadata, ModelError, Unit};
use crate::stats::{holm_bonferroni, summarize, StatsError, StatsSummary};
use crate::svg::{scatter_svg, ScatterPoint};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Length(#[from] LengthError),
    #[error("write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Supported input file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    Conllu,
    Alignment,
    Typelist,
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conllu" => Ok(InputFormat::Conllu),
            "alignment" => Ok(InputFormat::Alignment),
            "typelist" => Ok(InputFormat::Typelist),
            other => Err(format!(
                "unknown format {other:?} (expected conllu, alignment or typelist)"
            )),
        }
    }
}

fn default_true() -> bool {
    true
}

fn default_unit() -> Unit {
    Unit::Characters
}

/// One language entry of a batch config.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LanguageSpec {
    pub name: String,
    #[serde(default)]
    pub family: String,
    #[serde(default)]
    pub script: String,
    pub input: PathBuf,
    pub format: InputFormat,
    #[serde(default = "default_unit")]
    pub unit: Unit,
    #[serde(default)]
    pub mapping: Option<PathBuf>,
    #[serde(default = "default_true")]
    pub optional_filter: bool,
    #[serde(default)]
    pub cjk_mode: bool,
    #[serde(default)]
    pub drop_pos: Option<Vec<String>>,
    #[serde(default)]
    pub drop_digit_tokens: Option<bool>,
    #[serde(default)]
    pub lowercase: Option<bool>,
    /// Cluster count for the alphabet filter; anything but 2 is rejected.
    #[serde(default)]
    pub cluster_count: Option<usize>,
}

impl LanguageSpec {
    pub fn new(name: impl Into<String>, input: impl Into<PathBuf>, format: InputFormat) -> Self {
        LanguageSpec {
            name: name.into(),
            family: String::new(),
            script: String::new(),
            input: input.into(),
            format,
            unit: Unit::Characters,
            mapping: None,
            optional_filter: true,
            cjk_mode: false,
            drop_pos: None,
            drop_digit_tokens: None,
            lowercase: None,
            cluster_count: None,
        }
    }

    fn filter_config(&self) -> FilterConfig {
        let mut config = FilterConfig::default();
        if let Some(tags) = &self.drop_pos {
            config.drop_pos = tags.iter().cloned().collect();
        }
        if let Some(flag) = self.drop_digit_tokens {
            config.drop_digit_tokens = flag;
        }
        if let Some(flag) = self.lowercase {
            config.lowercase = flag;
        }
        if let Some(count) = self.cluster_count {
            config.cluster_count = count;
        }
        config.optional_filter = self.optional_filter;
        config.cjk_mode = self.cjk_mode;
        config
    }

    fn metadata(&self) -> Metadata {
        Metadata {
            language: self.name.clone(),
            family: self.family.clone(),
            script: self.script.clone(),
        }
    }
}

/// Global batch options; fully reproducible from the config file plus the
/// seed (environment variables are never consulted).
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatchOptions {
    pub seed: u64,
    pub trials: u64,
    pub out_dir: Option<PathBuf>,
}

impl Default for BatchOptions {
    fn default() -> Self {
        BatchOptions {
            seed: 42,
            trials: 10_000,
            out_dir: None,
        }
    }
}

/// A whole batch: global options plus one entry per language.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchConfig {
    #[serde(default)]
    pub options: BatchOptions,
    #[serde(rename = "language", default)]
    pub languages: Vec<LanguageSpec>,
}

/// Everything needed to analyze one language in memory.
#[derive(Debug, Clone)]
pub struct AnalysisOptions {
    pub unit: Unit,
    pub filter: FilterConfig,
    pub mapping: Option<UnitMapping>,
    pub metadata: Metadata,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            unit: Unit::Characters,
            filter: FilterConfig::default(),
            mapping: None,
            metadata: Metadata::default(),
        }
    }
}

/// The per-language result block: pre/post filter accounting plus the
/// statistics summary and Holm-corrected p-values.
#[derive(Debug, Clone, PartialEq)]
pub struct LanguageReport {
    pub language: String,
    pub family: String,
    pub script: String,
    pub unit: Unit,
    /// Observed alphabet size after the mandatory filter.
    pub alphabet_size: usize,
    /// Alphabet size after the optional filter.
    pub alphabet_size_filtered: usize,
    pub type_count: usize,
    pub token_count: u64,
    pub type_count_filtered: usize,
    pub token_count_filtered: u64,
    pub summary: StatsSummary,
    /// Holm-corrected Kendall p; equals the raw p until a batch correction
    /// runs.
    pub kendall_pvalue_adjusted: f64,
    /// Holm-corrected Pearson p; equals the raw p until a batch correction
    /// runs.
    pub pearson_pvalue_adjusted: f64,
}

/// A language report plus pipeline byproducts callers may want: the
/// filtered lexicon and the alphabet audit log.
#[derive(Debug, Clone)]
pub struct LanguageAnalysis {
    pub report: LanguageReport,
    pub filtered_lexicon: Lexicon,
    /// One kept/dropped line per character; present when an alphabet
    /// decision was made.
    pub alphabet_audit: Option<String>,
}

/// Run mandatory filter, lexicon build, optional filter and statistics
/// over a parsed token stream.
pub fn analyze_token_stream<I>(
    tokens: I,
    options: &AnalysisOptions,
) -> Result<LanguageAnalysis, ReportError>
where
    I: IntoIterator<Item = Result<RawToken, ParseError>>,
{
    let mut stream_error: Option<ParseError> = None;
    let lexicon_result = {
        let ok_tokens = tokens.into_iter().map_while(|item| match item {
            Ok(token) => Some(token),
            Err(error) => {
                stream_error = Some(error);
                None
            }
        });
        let filtered = mandatory_filter(ok_tokens, &options.filter);
        let pairs = filtered.map(|token| (token.form, token.duration_s));
        match (&options.unit, &options.mapping) {
            // unmappable types are dropped up front, the way unromanizable
            // hapax legomena drop out of a mapped-unit corpus
            (Unit::Mapped, Some(mapping)) => build_lexicon(
                pairs.filter(|(form, _)| mapping.covers(form)),
                options.unit,
                options.mapping.as_ref(),
                options.metadata.clone(),
            ),
            _ => build_lexicon(
                pairs,
                options.unit,
                options.mapping.as_ref(),
                options.metadata.clone(),
            ),
        }
    };
    if let Some(error) = stream_error {
        return Err(error.into());
    }
    finish_analysis(lexicon_result?, options)
}

/// Analyze an already-aggregated lexicon (the type-list path). The
/// mandatory token filter does not apply; the optional alphabet filter
/// still does.
pub fn analyze_lexicon(
    lexicon: Lexicon,
    options: &AnalysisOptions,
) -> Result<LanguageAnalysis, ReportError> {
    let lexicon = lexicon.with_metadata(options.metadata.clone());
    finish_analysis(lexicon, options)
}

fn finish_analysis(
    lexicon: Lexicon,
    options: &AnalysisOptions,
) -> Result<LanguageAnalysis, ReportError> {
    if options.filter.optional_filter && options.filter.cluster_count != 2 {
        return Err(FilterError::UnsupportedClusterCount(options.filter.cluster_count).into());
    }
    let inventory = character_inventory(&lexicon);
    let alphabet_size = inventory.observed_size();
    let type_count = lexicon.type_count();
    let token_count = lexicon.token_count();

    let (filtered, alphabet_audit) = if options.filter.cjk_mode {
        let kept: BTreeSet<char> = inventory
            .entries()
            .keys()
            .copied()
            .filter(|&c| is_cjk_char(c))
            .collect();
        let filtered = cjk_complement_filter(&lexicon)?;
        (filtered, Some(render_alphabet_audit(&inventory, &kept)))
    } else if options.filter.optional_filter {
        match working_alphabet(&inventory) {
            Ok(alphabet) => {
                let filtered = apply_alphabet_filter(&lexicon, &alphabet)?;
                let audit = render_alphabet_audit(&inventory, &alphabet);
                (filtered, Some(audit))
            }
            // all characters equally frequent: keep the full inventory
            Err(FilterError::DegenerateClustering) => (lexicon, None),
            Err(error) => return Err(error.into()),
        }
    } else {
        (lexicon, None)
    };

    let inventory_filtered = character_inventory(&filtered);
    let summary = summarize(&filtered)?;
    let metadata = filtered.metadata().clone();
    let report = LanguageReport {
        language: metadata.language,
        family: metadata.family,
        script: metadata.script,
        unit: filtered.unit(),
        alphabet_size,
        alphabet_size_filtered: inventory_filtered.observed_size(),
        type_count,
        token_count,
        type_count_filtered: filtered.type_count(),
        token_count_filtered: filtered.token_count(),
        kendall_pvalue_adjusted: summary.kendall_pvalue,
        pearson_pvalue_adjusted: summary.pearson_pvalue,
        summary,
    };
    Ok(LanguageAnalysis {
        report,
        filtered_lexicon: filtered,
        alphabet_audit,
    })
}

fn open_input(path: &Path) -> Result<BufReader<fs::File>, ReportError> {
    fs::File::open(path)
        .map(BufReader::new)
        .map_err(|source| ReportError::Io {
            path: path.to_path_buf(),
            source,
        })
}

/// Resolve a language spec against the config directory and run the full
/// pipeline on its input file.
pub fn analyze_path(spec: &LanguageSpec, base_dir: &Path) -> Result<LanguageAnalysis, ReportError> {
    let input = if spec.input.is_absolute() {
        spec.input.clone()
    } else {
        base_dir.join(&spec.input)
    };
    let mapping = match &spec.mapping {
        Some(path) => {
            let path = if path.is_absolute() {
                path.clone()
            } else {
                base_dir.join(path)
            };
            let reader = open_input(&path)?;
            Some(UnitMapping::from_tsv(reader)?)
        }
        None => None,
    };
    if spec.unit == Unit::Mapped && spec.format != InputFormat::Typelist && mapping.is_none() {
        return Err(ReportError::Config(format!(
            "language {:?}: mapped unit requires a mapping file",
            spec.name
        )));
    }
    if spec.unit == Unit::DurationSeconds && spec.format == InputFormat::Conllu {
        return Err(ReportError::Config(format!(
            "language {:?}: conllu input carries no durations",
            spec.name
        )));
    }
    let options = AnalysisOptions {
        unit: spec.unit,
        filter: spec.filter_config(),
        mapping,
        metadata: spec.metadata(),
    };
    let reader = open_input(&input)?;
    match spec.format {
        InputFormat::Conllu => analyze_token_stream(parse_conllu(reader), &options),
        InputFormat::Alignment => analyze_token_stream(parse_alignment(reader), &options),
        InputFormat::Typelist => {
            // a pre-aggregated table carries its own lengths; unit stays
            // generic regardless of the requested unit
            let lexicon = parse_typelist(reader)?;
            analyze_lexicon(lexicon, &options)
        }
    }
}

/// One failed language, isolated from the rest of the batch.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct LanguageFailure {
    pub language: String,
    pub error: String,
}

/// The outcome of a batch run: successful analyses in config order plus
/// the per-language failures.
#[derive(Debug, Clone)]
pub struct BatchOutcome {
    pub options: BatchOptions,
    pub analyses: Vec<LanguageAnalysis>,
    pub failures: Vec<LanguageFailure>,
}

impl BatchOutcome {
    pub fn reports(&self) -> impl Iterator<Item = &LanguageReport> {
        self.analyses.iter().map(|a| &a.report)
    }
}

/// Analyze every language of the batch (concurrently; each pipeline is
/// independent) and Holm-correct the Kendall and Pearson p-value families
/// across the successful languages.
pub fn run_batch(config: &BatchConfig, base_dir: &Path) -> Result<BatchOutcome, ReportError> {
    if config.languages.is_empty() {
        return Err(ReportError::Config(
            "config lists no [[language]] entries".into(),
        ));
    }
    let results: Vec<Result<LanguageAnalysis, ReportError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = config
            .languages
            .iter()
            .map(|spec| scope.spawn(move || analyze_path(spec, base_dir)))
            .collect();
        handles
            .into_iter()
            .map(|handle| handle.join().expect("language analysis panicked"))
            .collect()
    });

    let mut analyses = Vec::new();
    let mut failures = Vec::new();
    for (spec, result) in config.languages.iter().zip(results) {
        match result {
            Ok(analysis) => analyses.push(analysis),
            Err(error) => failures.push(LanguageFailure {
                language: spec.name.clone(),
                error: error.to_string(),
            }),
        }
    }

    // the Holm step is a barrier: it needs every raw p-value of the family
    let kendall_ps: Vec<f64> = analyses
        .iter()
        .map(|a| a.report.summary.kendall_pvalue)
        .collect();
    let pearson_ps: Vec<f64> = analyses
        .iter()
        .map(|a| a.report.summary.pearson_pvalue)
        .collect();
    let kendall_adjusted = holm_bonferroni(&kendall_ps)?;
    let pearson_adjusted = holm_bonferroni(&pearson_ps)?;
    for (analysis, (kendall, pearson)) in analyses
        .iter_mut()
        .zip(kendall_adjusted.into_iter().zip(pearson_adjusted))
    {
        analysis.report.kendall_pvalue_adjusted = kendall;
        analysis.report.pearson_pvalue_adjusted = pearson;
    }

    Ok(BatchOutcome {
        options: config.options.clone(),
        analyses,
        failures,
    })
}

/// Significance marker ranges: `***` for p <= 0.01, `**` for p <= 0.05,
/// `*` for p <= 0.1, blank otherwise.
pub fn significance_marker(pvalue: f64) -> &'static str {
    if pvalue <= 0.01 {
        "***"
    } else if pvalue <= 0.05 {
        "**"
    } else if pvalue <= 0.1 {
        "*"
    } else {
        ""
    }
}

fn format_stat(value: f64) -> String {
    format!("{value:.2}")
}

fn format_pvalue(value: f64) -> String {
    format!("{value:.1e}")
}

/// One row of the report, with the exact field names of the TSV header.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ReportRow {
    pub language: String,
    pub family: String,
    pub script: String,
    pub unit: String,
    #[serde(rename = "A")]
    pub alphabet_size: usize,
    #[serde(rename = "A_filtered")]
    pub alphabet_size_filtered: usize,
    pub n: usize,
    #[serde(rename = "T")]
    pub token_count: u64,
    pub n_filtered: usize,
    #[serde(rename = "T_filtered")]
    pub token_count_filtered: u64,
    #[serde(rename = "L")]
    pub mean_token_length: f64,
    #[serde(rename = "L_r")]
    pub random_baseline: f64,
    pub tau: f64,
    pub tau_p: f64,
    pub tau_p_adj: f64,
    pub r: f64,
    pub r_p: f64,
    pub r_p_adj: f64,
}

impl From<&LanguageReport> for ReportRow {
    fn from(report: &LanguageReport) -> Self {
        ReportRow {
            language: report.language.clone(),
            family: report.family.clone(),
            script: report.script.clone(),
            unit: report.unit.as_str().to_string(),
            alphabet_size: report.alphabet_size,
            alphabet_size_filtered: report.alphabet_size_filtered,
            n: report.type_count,
            token_count: report.token_count,
            n_filtered: report.type_count_filtered,
            token_count_filtered: report.token_count_filtered,
            mean_token_length: report.summary.mean_token_length,
            random_baseline: report.summary.random_baseline,
            tau: report.summary.kendall_tau,
            tau_p: report.summary.kendall_pvalue,
            tau_p_adj: report.kendall_pvalue_adjusted,
            r: report.summary.pearson_r,
            r_p: report.summary.pearson_pvalue,
            r_p_adj: report.pearson_pvalue_adjusted,
        }
    }
}

pub const REPORT_TSV_HEADER: &str = "language\tfamily\tscript\tA\tA_filtered\tn\tT\tn_filtered\tT_filtered\tL\tL_r\ttau\ttau_p\ttau_p_adj\tr\tr_p\tr_p_adj";

/// Render the batch TSV report. Means and correlations print with two
/// decimals, p-values in scientific notation with two significant digits.
pub fn render_report_tsv(outcome: &BatchOutcome) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "# Holm-Bonferroni applied separately to the tau and r p-value families (m = {})\n",
        outcome.analyses.len()
    ));
    out.push_str(REPORT_TSV_HEADER);
    out.push('\n');
    for report in outcome.reports() {
        let row = ReportRow::from(report);
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            row.language,
            row.family,
            row.script,
            row.alphabet_size,
            row.alphabet_size_filtered,
            row.n,
            row.token_count,
            row.n_filtered,
            row.token_count_filtered,
            format_stat(row.mean_token_length),
            format_stat(row.random_baseline),
            format_stat(row.tau),
            format_pvalue(row.tau_p),
            format_pvalue(row.tau_p_adj),
            format_stat(row.r),
            format_pvalue(row.r_p),
            format_pvalue(row.r_p_adj),
        ));
    }
    for failure in &outcome.failures {
        out.push_str(&format!(
            "# error\t{}\t{}\n",
            failure.language, failure.error
        ));
    }
    out
}

#[derive(Serialize)]
struct JsonReport<'a> {
    options: &'a BatchOptions,
    holm_families: &'static str,
    languages: Vec<ReportRow>,
    errors: &'a [LanguageFailure],
}

/// Render the batch report as JSON: the same content as the TSV, nested,
/// with full-precision numbers.
pub fn render_report_json(outcome: &BatchOutcome) -> Result<String, ReportError> {
    let doc = JsonReport {
        options: &outcome.options,
        holm_families: "tau and r p-values corrected as separate families",
        languages: outcome.reports().map(ReportRow::from).collect(),
        errors: &outcome.failures,
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

/// Render the mean-length-versus-baseline scatter with the identity
/// diagonal.
pub fn render_scatter(outcome: &BatchOutcome) -> String {
    let points: Vec<ScatterPoint> = outcome
        .reports()
        .map(|report| ScatterPoint {
            x: report.summary.random_baseline,
            y: report.summary.mean_token_length,
            label: report.language.clone(),
        })
        .collect();
    scatter_svg(&points, "L_r (random baseline)", "L (mean token length)")
}

fn sanitize_language_name(name: &str) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { '_' })
        .collect();
    if cleaned.is_empty() {
        "language".to_string()
    } else {
        cleaned.to_lowercase()
    }
}

/// Write `report.tsv`, `report.json`, `scatter.svg` and the per-language
/// alphabet audit files into `out_dir`.
pub fn write_batch_outputs(outcome: &BatchOutcome, out_dir: &Path) -> Result<(), ReportError> {
    let write = |path: PathBuf, contents: &str| -> Result<(), ReportError> {
        fs::write(&path, contents).map_err(|source| ReportError::Write { path, source })
    };
    fs::create_dir_all(out_dir).map_err(|source| ReportError::Write {
        path: out_dir.to_path_buf(),
        source,
    })?;
    write(out_dir.join("report.tsv"), &render_report_tsv(outcome))?;
    write(out_dir.join("report.json"), &render_report_json(outcome)?)?;
    write(out_dir.join("scatter.svg"), &render_scatter(outcome))?;
    for analysis in &outcome.analyses {
        if let Some(audit) = &analysis.alphabet_audit {
            let name = sanitize_language_name(&analysis.report.language);
            write(out_dir.join(format!("alphabet_{name}.txt")), audit)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::RawToken;
    use crate::model::TypeRecord;

    fn typelist_lexicon(rows: &[(&str, u64, f64)]) -> Lexicon {
        let records: Vec<TypeRecord> = rows
            .iter()
            .map(|&(form, frequency, length)| TypeRecord::new(form, frequency, length))
            .collect();
        Lexicon::from_records(records, Unit::Mapped, Metadata::default()).unwrap()
    }

    fn no_optional_filter() -> AnalysisOptions {
        let mut options = AnalysisOptions::default();
        options.filter.optional_filter = false;
        options
    }

    #[test]
    fn analyze_lexicon_worked_example() {
        let lexicon = typelist_lexicon(&[("x", 100, 2.0), ("y", 20, 1.0), ("z", 5, 3.0)]);
        let mut options = no_optional_filter();
        options.metadata = Metadata::named("toy");
        let analysis = analyze_lexicon(lexicon, &options).unwrap();
        let report = &analysis.report;
        assert_eq!(report.language, "toy");
        assert!((report.summary.mean_token_length - 1.88).abs() < 1e-12);
        assert!((report.summary.random_baseline - 2.0).abs() < 1e-12);
        assert!((report.summary.kendall_tau - (-1.0 / 3.0)).abs() < 1e-12);
        assert_eq!(report.type_count, 3);
        assert_eq!(report.token_count, 125);
        // no batch correction: adjusted equals raw
        assert_eq!(
            report.kendall_pvalue_adjusted,
            report.summary.kendall_pvalue
        );
        assert_eq!(
            report.pearson_pvalue_adjusted,
            report.summary.pearson_pvalue
        );
    }

    #[test]
    fn analyze_token_stream_removes_contaminated_types() {
        // Latin base corpus plus three tokens carrying one rare Cyrillic
        // character; the optional filter must remove exactly those types
        let mut tokens: Vec<Result<RawToken, ParseError>> = Vec::new();
        let base = ["the", "cat", "sat", "on", "a", "mat", "with", "her", "hat"];
        for round in 0..500usize {
            let word = base[round % base.len()];
            tokens.push(Ok(RawToken::word(word)));
        }
        for _ in 0..3 {
            tokens.push(Ok(RawToken::word("ca\u{442}")));
        }
        let options = AnalysisOptions {
            metadata: Metadata::named("synthetic"),
            ..AnalysisOptions::default()
        };
        let analysis = analyze_token_stream(tokens, &options).unwrap();
        let report = &analysis.report;
        assert_eq!(report.alphabet_size_filtered, report.alphabet_size - 1);
        assert!(analysis
            .filtered_lexicon
            .records()
            .iter()
            .all(|r| !r.form.contains('\u{442}')));
        assert_eq!(report.type_count_filtered, report.type_count - 1);
        assert_eq!(report.token_count_filtered, report.token_count - 3);
        let audit = analysis.alphabet_audit.as_deref().unwrap();
        assert!(audit.contains("\u{442}\t3\tdropped"));
    }

    #[test]
    fn analyze_token_stream_propagates_parse_errors() {
        let tokens: Vec<Result<RawToken, ParseError>> = vec![
            Ok(RawToken::word("fine")),
            Err(ParseError::EndBeforeStart { row: 7 }),
            Ok(RawToken::word("unreached")),
        ];
        let err = analyze_token_stream(tokens, &no_optional_filter()).unwrap_err();
        assert!(err.to_string().contains("end before start, row 7"));
    }

    #[test]
    fn mapped_unit_drops_unmappable_types() {
        let mapping = UnitMapping::new([('a', 2), ('b', 3)]).unwrap();
        let tokens: Vec<Result<RawToken, ParseError>> = vec![
            Ok(RawToken::word("ab")),
            Ok(RawToken::word("ab")),
            Ok(RawToken::word("b")),
            Ok(RawToken::word("aa")),
            Ok(RawToken::word("aa")),
            Ok(RawToken::word("aa")),
            Ok(RawToken::word("ax")),
        ];
        let options = AnalysisOptions {
            unit: Unit::Mapped,
            mapping: Some(mapping),
            ..no_optional_filter()
        };
        let analysis = analyze_token_stream(tokens, &options).unwrap();
        assert_eq!(analysis.report.type_count, 3);
        assert_eq!(analysis.report.token_count, 6);
        assert!(analysis
            .filtered_lexicon
            .records()
            .iter()
            .all(|r| !r.form.contains('x')));
    }

    #[test]
    fn batch_isolates_per_language_failures() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("good.csv"),
            "form,frequency,length\nxx,100,2\ny,20,1\nzzz,5,3\n",
        )
        .unwrap();
        std::fs::write(
            dir.path().join("bad.csv"),
            "form,frequency,length\na,1,1\na,2,1\n",
        )
        .unwrap();
        let mut good = LanguageSpec::new("good", "good.csv", InputFormat::Typelist);
        good.optional_filter = false;
        let mut bad = LanguageSpec::new("bad", "bad.csv", InputFormat::Typelist);
        bad.optional_filter = false;
        let config = BatchConfig {
            options: BatchOptions::default(),
            languages: vec![good, bad],
        };
        let outcome = run_batch(&config, dir.path()).unwrap();
        assert_eq!(outcome.analyses.len(), 1);
        assert_eq!(outcome.failures.len(), 1);
        assert_eq!(outcome.failures[0].language, "bad");
        assert!(outcome.failures[0]
            .error
            .contains("duplicate form a, row 3"));
    }

    #[test]
    fn empty_config_is_an_error() {
        let config = BatchConfig {
            options: BatchOptions::default(),
            languages: vec![],
        };
        let err = run_batch(&config, Path::new(".")).unwrap_err();
        assert!(matches!(err, ReportError::Config(_)));
    }

    #[test]
    fn tsv_has_pinned_columns_and_formats() {
        let lexicon = typelist_lexicon(&[("x", 100, 2.0), ("y", 20, 1.0), ("z", 5, 3.0)]);
        let analysis = analyze_lexicon(lexicon, &no_optional_filter()).unwrap();
        let outcome = BatchOutcome {
            options: BatchOptions::default(),
            analyses: vec![analysis],
            failures: vec![],
        };
        let tsv = render_report_tsv(&outcome);
        let mut lines = tsv.lines();
        assert!(lines.next().unwrap().starts_with('#'));
        assert_eq!(lines.next().unwrap(), REPORT_TSV_HEADER);
        let row = lines.next().unwrap();
        let fields: Vec<&str> = row.split('\t').collect();
        assert_eq!(fields.len(), 17);
        assert_eq!(fields[9], "1.88");
        assert_eq!(fields[10], "2.00");
        assert_eq!(fields[11], "-0.33");
    }

    #[test]
    fn single_language_holm_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("one.csv"),
            "form,frequency,length\nxx,100,2\ny,20,1\nzzz,5,3\n",
        )
        .unwrap();
        let mut spec = LanguageSpec::new("one", "one.csv", InputFormat::Typelist);
        spec.optional_filter = false;
        let config = BatchConfig {
            options: BatchOptions::default(),
            languages: vec![spec],
        };
        let outcome = run_batch(&config, dir.path()).unwrap();
        let report = &outcome.analyses[0].report;
        assert_eq!(
            report.kendall_pvalue_adjusted,
            report.summary.kendall_pvalue
        );
        assert_eq!(
            report.pearson_pvalue_adjusted,
            report.summary.pearson_pvalue
        );
    }

    #[test]
    fn other_cluster_counts_are_rejected() {
        let lexicon = typelist_lexicon(&[("x", 100, 2.0), ("y", 20, 1.0), ("z", 5, 3.0)]);
        let mut options = AnalysisOptions::default();
        options.filter.cluster_count = 3;
        let err = analyze_lexicon(lexicon, &options).unwrap_err();
        assert!(err.to_string().contains("exactly 2 clusters"));
    }

    #[test]
    fn significance_markers_follow_ranges() {
        assert_eq!(significance_marker(0.005), "***");
        assert_eq!(significance_marker(0.03), "**");
        assert_eq!(significance_marker(0.08), "*");
        assert_eq!(significance_marker(0.2), "");
    }

    #[test]
    fn sanitizes_audit_file_names() {
        assert_eq!(sanitize_language_name("Modern Greek"), "modern_greek");
        assert_eq!(sanitize_language_name("??"), "__");
    }
}
