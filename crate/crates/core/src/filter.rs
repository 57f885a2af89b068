//! Token filtering: the mandatory elementary filter (POS drops, digit
//! tokens, unknown/null sentinels, lowercasing) and the unsupervised
//! alphabet filter built on exact 1-D 2-means over log character
//! frequencies.

use std::collections::BTreeSet;

use serde::Deserialize;
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::ingest::RawToken;
use crate::model::{CharacterInventory, Lexicon};

#[derive(Debug, Error, PartialEq)]
pub enum FilterError {
    #[error("the alphabet filter uses exactly 2 clusters (requested {0})")]
    UnsupportedClusterCount(usize),
    #[error("degenerate clustering: fewer than 2 distinct values")]
    DegenerateClustering,
    #[error("clustering input contains a non-finite value")]
    NonFiniteValue,
    #[error("filter removed all types")]
    AllTypesRemoved,
}

/// Filtering knobs. The cluster count is fixed at 2; other values are
/// rejected by [`cluster_1d_exact`].
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default)]
pub struct FilterConfig {
    /// POS tags whose tokens are dropped outright.
    pub drop_pos: BTreeSet<String>,
    /// Drop tokens containing any ASCII digit 0-9.
    pub drop_digit_tokens: bool,
    /// Lowercase every form (forms are NFC-normalized either way).
    pub lowercase: bool,
    /// Run the unsupervised alphabet filter after the mandatory one.
    pub optional_filter: bool,
    /// Number of clusters for the alphabet filter; must stay 2.
    pub cluster_count: usize,
    /// Replace the unsupervised filter with the CJK-block complement
    /// filter (for Chinese/Japanese-style syllabaries).
    pub cjk_mode: bool,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            drop_pos: BTreeSet::from(["PUNCT".to_string()]),
            drop_digit_tokens: true,
            lowercase: true,
            optional_filter: true,
            cluster_count: 2,
            cjk_mode: false,
        }
    }
}

fn normalize_form(form: &str, lowercase: bool) -> String {
    let composed: String = form.nfc().collect();
    if lowercase {
        composed.to_lowercase().nfc().collect()
    } else {
        composed
    }
}

/// The mandatory elementary filter. Drops tokens by POS tag, unknown and
/// null sentinels, and tokens containing ASCII digits; normalizes the
/// surviving forms (NFC, lowercased). Order-preserving and total.
pub fn mandatory_filter<'a, I>(
    tokens: I,
    config: &'a FilterConfig,
) -> impl Iterator<Item = RawToken> + 'a
where
    I: IntoIterator<Item = RawToken>,
    I::IntoIter: 'a,
{
    tokens.into_iter().filter_map(move |mut token| {
        if token.is_unknown || token.is_null {
            return None;
        }
        if let Some(pos) = &token.pos {
            if config.drop_pos.contains(pos) {
                return None;
            }
        }
        if config.drop_digit_tokens && token.form.chars().any(|c| c.is_ascii_digit()) {
            return None;
        }
        token.form = normalize_form(&token.form, config.lowercase);
        if token.form.is_empty() {
            return None;
        }
        Some(token)
    })
}

/// A two-cluster partition of values, contiguous in ascending value order.
/// `low_cluster` and `high_cluster` hold indices into the original input
/// slice, ordered by value.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSplit {
    /// Number of values in the low cluster.
    pub boundary_index: usize,
    pub low_cluster: Vec<usize>,
    pub high_cluster: Vec<usize>,
    /// Within-cluster sum of squares of the returned partition.
    pub wcss: f64,
}

/// Exact 1-D 2-means: globally minimizes the within-cluster sum of squares
/// over all contiguous splits of the sorted values. Ties between
/// equal-wcss splits are broken toward the smaller low cluster so that
/// fewer characters are discarded downstream.
pub fn cluster_1d_exact(values: &[f64], k: usize) -> Result<ClusterSplit, FilterError> {
    if k != 2 {
        return Err(FilterError::UnsupportedClusterCount(k));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(FilterError::NonFiniteValue);
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let distinct = 1 + sorted.windows(2).filter(|w| w[0] != w[1]).count();
    if sorted.len() < 2 || distinct < 2 {
        return Err(FilterError::DegenerateClustering);
    }

    let n = sorted.len();
    let mut prefix = vec![0.0f64; n + 1];
    let mut prefix_sq = vec![0.0f64; n + 1];
    for (i, &v) in sorted.iter().enumerate() {
        prefix[i + 1] = prefix[i] + v;
        prefix_sq[i + 1] = prefix_sq[i] + v * v;
    }
    // sum of squared deviations from the mean over sorted[lo..hi]
    let segment_sse = |lo: usize, hi: usize| -> f64 {
        let len = (hi - lo) as f64;
        let sum = prefix[hi] - prefix[lo];
        let sum_sq = prefix_sq[hi] - prefix_sq[lo];
        (sum_sq - sum * sum / len).max(0.0)
    };

    let mut best_boundary = 1;
    let mut best_wcss = segment_sse(0, 1) + segment_sse(1, n);
    for boundary in 2..n {
        let wcss = segment_sse(0, boundary) + segment_sse(boundary, n);
        if wcss < best_wcss {
            best_wcss = wcss;
            best_boundary = boundary;
        }
    }
    Ok(ClusterSplit {
        boundary_index: best_boundary,
        low_cluster: order[..best_boundary].to_vec(),
        high_cluster: order[best_boundary..].to_vec(),
        wcss: best_wcss,
    })
}

/// Split the inventory on the natural log of character frequencies and
/// keep the high-frequency cluster as the working alphabet.
pub fn working_alphabet(inventory: &CharacterInventory) -> Result<BTreeSet<char>, FilterError> {
    let characters: Vec<char> = inventory.entries().keys().copied().collect();
    let log_frequencies: Vec<f64> = inventory
        .entries()
        .values()
        .map(|&f| (f as f64).ln())
        .collect();
    let split = cluster_1d_exact(&log_frequencies, 2)?;
    Ok(split
        .high_cluster
        .iter()
        .map(|&index| characters[index])
        .collect())
}

/// Remove every type whose form contains a character outside `alphabet`.
pub fn apply_alphabet_filter(
    lexicon: &Lexicon,
    alphabet: &BTreeSet<char>,
) -> Result<Lexicon, FilterError> {
    let retained: Vec<_> = lexicon
        .records()
        .iter()
        .filter(|record| record.form.chars().all(|c| alphabet.contains(&c)))
        .cloned()
        .collect();
    if retained.is_empty() {
        return Err(FilterError::AllTypesRemoved);
    }
    Ok(
        Lexicon::from_records(retained, lexicon.unit(), lexicon.metadata().clone())
            .expect("retained records come from a valid lexicon"),
    )
}

/// True for characters of the CJK Unified Ideographs, Hiragana, Katakana
/// and Hangul Syllables blocks.
pub fn is_cjk_char(c: char) -> bool {
    matches!(c,
        '\u{4e00}'..='\u{9fff}'     // CJK Unified Ideographs
        | '\u{3040}'..='\u{309f}'   // Hiragana
        | '\u{30a0}'..='\u{30ff}'   // Katakana
        | '\u{ac00}'..='\u{d7af}'   // Hangul Syllables
    )
}

/// Remove every type whose form contains a non-CJK character. Used in
/// place of the unsupervised filter for languages whose writing system is
/// essentially a syllabary.
pub fn cjk_complement_filter(lexicon: &Lexicon) -> Result<Lexicon, FilterError> {
    let retained: Vec<_> = lexicon
        .records()
        .iter()
        .filter(|record| record.form.chars().all(is_cjk_char))
        .cloned()
        .collect();
    if retained.is_empty() {
        return Err(FilterError::AllTypesRemoved);
    }
    Ok(
        Lexicon::from_records(retained, lexicon.unit(), lexicon.metadata().clone())
            .expect("retained records come from a valid lexicon"),
    )
}

/// One line per observed character: the character, its corpus frequency
/// and whether the alphabet decision kept or dropped it.
pub fn render_alphabet_audit(inventory: &CharacterInventory, kept: &BTreeSet<char>) -> String {
    let mut out = String::new();
    for (&character, &frequency) in inventory.entries() {
        let verdict = if kept.contains(&character) {
            "kept"
        } else {
            "dropped"
        };
        out.push_str(&format!("{character}\t{frequency}\t{verdict}\n"));
    }
    out
}
