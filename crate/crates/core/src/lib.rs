//! Corpus statistics for word-length compression.
//!
//! The crate ingests tokenized corpora (CoNLL-U treebanks, forced
//! alignment tables or pre-aggregated type lists), filters tokens with a
//! mandatory elementary pass plus an optional unsupervised alphabet
//! filter, computes the mean token length against its random re-pairing
//! baseline, and runs left-sided Kendall and Pearson correlation tests
//! with Holm-Bonferroni correction across languages.

pub mod filter;
pub mod ingest;
pub mod lengths;
pub mod model;
pub mod report;
pub mod stats;
pub mod svg;

pub use filter::{
    apply_alphabet_filter, cjk_complement_filter, cluster_1d_exact, mandatory_filter,
    working_alphabet, ClusterSplit, FilterConfig, FilterError,
};
pub use ingest::{
    parse_alignment, parse_conllu, parse_typelist, write_typelist, ParseError, RawToken,
};
pub use lengths::{char_length, mapped_length, median_duration, LengthError, UnitMapping};
pub use model::{
    build_lexicon, character_inventory, CharacterInventory, Lexicon, Metadata, ModelError,
    TypeRecord, Unit,
};
pub use report::{
    analyze_lexicon, analyze_path, analyze_token_stream, run_batch, write_batch_outputs,
    AnalysisOptions, BatchConfig, BatchOptions, BatchOutcome, InputFormat, LanguageAnalysis,
    LanguageFailure, LanguageReport, LanguageSpec, ReportError,
};
pub use stats::{
    enumerate_shuffles, holm_bonferroni, kendall_tau, mean_token_length, mean_type_length,
    pearson_r, permutation_test, random_baseline, summarize, KendallTest, PearsonTest,
    ShuffleVariant, StatsError, StatsSummary, EXACT_ENUMERATION_CAP,
};
