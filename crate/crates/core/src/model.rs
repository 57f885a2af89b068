//! Immutable lexicon model shared by every analysis stage.
//!
//! A [`Lexicon`] aggregates a token stream into one [`TypeRecord`] per
//! distinct form, together with the type count `n` and token count `T`.
//! A [`CharacterInventory`] holds per-character corpus frequencies for
//! the alphabet filter.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lengths::{self, LengthError, UnitMapping};

/// The unit word length is measured in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    #[serde(alias = "chars")]
    Characters,
    #[serde(alias = "duration")]
    DurationSeconds,
    Mapped,
}

impl Unit {
    pub fn as_str(self) -> &'static str {
        match self {
            Unit::Characters => "characters",
            Unit::DurationSeconds => "duration_seconds",
            Unit::Mapped => "mapped",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("missing duration for form {form:?}")]
    MissingDuration { form: String },
    #[error("negative duration for form {form:?}")]
    NegativeDuration { form: String },
    #[error("mapped unit requires a unit mapping table")]
    MissingMapping,
    #[error("duplicate form {form:?}")]
    DuplicateForm { form: String },
    #[error("frequency of form {form:?} must be >= 1")]
    ZeroFrequency { form: String },
    #[error("length of form {form:?} must be a finite nonnegative number")]
    InvalidLength { form: String },
    #[error(transparent)]
    Length(#[from] LengthError),
}

/// One word type: its surface form, how often it occurs and how long it is
/// in the active unit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TypeRecord {
    pub form: String,
    pub frequency: u64,
    pub length: f64,
    /// Raw duration samples in seconds; present only for duration corpora.
    /// `length` is their median.
    pub duration_samples: Option<Vec<f64>>,
}

impl TypeRecord {
    pub fn new(form: impl Into<String>, frequency: u64, length: f64) -> Self {
        TypeRecord {
            form: form.into(),
            frequency,
            length,
            duration_samples: None,
        }
    }

    /// Build a record from raw duration samples; the length is their median.
    pub fn from_duration_samples(
        form: impl Into<String>,
        frequency: u64,
        samples: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let length = lengths::median_duration(&samples)?;
        Ok(TypeRecord {
            form: form.into(),
            frequency,
            length,
            duration_samples: Some(samples),
        })
    }
}

/// Pass-through annotations; never validated against external registries.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metadata {
    pub language: String,
    pub family: String,
    pub script: String,
}

impl Metadata {
    pub fn named(language: impl Into<String>) -> Self {
        Metadata {
            language: language.into(),
            ..Metadata::default()
        }
    }
}

/// The full set of [`TypeRecord`]s for one language and unit.
/// Immutable after construction; records are kept sorted by form.
#[derive(Debug, Clone, PartialEq)]
pub struct Lexicon {
    records: Vec<TypeRecord>,
    unit: Unit,
    token_count: u64,
    metadata: Metadata,
}

impl Lexicon {
    /// Validating constructor. Records are sorted by form; forms must be
    /// distinct, frequencies >= 1 and lengths finite and nonnegative.
    pub fn from_records(
        mut records: Vec<TypeRecord>,
        unit: Unit,
        metadata: Metadata,
    ) -> Result<Self, ModelError> {
        if records.is_empty() {
            return Err(ModelError::EmptyCorpus);
        }
        records.sort_by(|a, b| a.form.cmp(&b.form));
        let mut token_count = 0u64;
        for (i, record) in records.iter().enumerate() {
            if record.frequency == 0 {
                return Err(ModelError::ZeroFrequency {
                    form: record.form.clone(),
                });
            }
            if !record.length.is_finite() || record.length < 0.0 {
                return Err(ModelError::InvalidLength {
                    form: record.form.clone(),
                });
            }
            if i > 0 && records[i - 1].form == record.form {
                return Err(ModelError::DuplicateForm {
                    form: record.form.clone(),
                });
            }
            token_count += record.frequency;
        }
        Ok(Lexicon {
            records,
            unit,
            token_count,
            metadata,
        })
    }

    pub fn records(&self) -> &[TypeRecord] {
        &self.records
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    /// Number of distinct types, `n`.
    pub fn type_count(&self) -> usize {
        self.records.len()
    }

    /// Total number of tokens, `T` (sum of type frequencies).
    pub fn token_count(&self) -> u64 {
        self.token_count
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    pub fn with_metadata(mut self, metadata: Metadata) -> Self {
        self.metadata = metadata;
        self
    }

    /// Relative frequency of each type, in record order.
    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        let total = self.token_count as f64;
        self.records.iter().map(move |r| r.frequency as f64 / total)
    }
}

/// Aggregate an already-filtered token stream into a lexicon.
///
/// Each input item is a form plus an optional duration in seconds. For the
/// duration unit every token must carry a duration; the type length is the
/// median across its tokens. For characters the length is the scalar count
/// of the form; for mapped units it is looked up through `mapping`.
pub fn build_lexicon<I>(
    tokens: I,
    unit: Unit,
    mapping: Option<&UnitMapping>,
    metadata: Metadata,
) -> Result<Lexicon, ModelError>
where
    I: IntoIterator<Item = (String, Option<f64>)>,
{
    let mut groups: BTreeMap<String, (u64, Vec<f64>)> = BTreeMap::new();
    for (form, duration) in tokens {
        if unit == Unit::DurationSeconds {
            match duration {
                None => return Err(ModelError::MissingDuration { form }),
                Some(d) if d < 0.0 => return Err(ModelError::NegativeDuration { form }),
                _ => {}
            }
        }
        let entry = groups.entry(form).or_insert_with(|| (0, Vec::new()));
        entry.0 += 1;
        if let Some(d) = duration {
            entry.1.push(d);
        }
    }
    if groups.is_empty() {
        return Err(ModelError::EmptyCorpus);
    }
    if unit == Unit::Mapped && mapping.is_none() {
        return Err(ModelError::MissingMapping);
    }
    let mut records = Vec::with_capacity(groups.len());
    for (form, (frequency, durations)) in groups {
        let record = match unit {
            Unit::Characters => {
                TypeRecord::new(form.clone(), frequency, lengths::char_length(&form) as f64)
            }
            Unit::DurationSeconds => {
                debug_assert_eq!(durations.len() as u64, frequency);
                TypeRecord::from_duration_samples(form, frequency, durations)?
            }
            Unit::Mapped => {
                let table = mapping.expect("checked above");
                let length = lengths::mapped_length(&form, table)?;
                TypeRecord::new(form, frequency, length as f64)
            }
        };
        records.push(record);
    }
    Lexicon::from_records(records, unit, metadata)
}

/// Per-character corpus frequencies, token-weighted: each character counts
/// once per occurrence in a form, multiplied by the type frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterInventory {
    entries: BTreeMap<char, u64>,
    working_alphabet: Option<BTreeSet<char>>,
}

impl CharacterInventory {
    pub fn entries(&self) -> &BTreeMap<char, u64> {
        &self.entries
    }

    /// Observed alphabet size: the number of distinct characters.
    pub fn observed_size(&self) -> usize {
        self.entries.len()
    }

    pub fn frequency(&self, character: char) -> u64 {
        self.entries.get(&character).copied().unwrap_or(0)
    }

    pub fn working_alphabet(&self) -> Option<&BTreeSet<char>> {
        self.working_alphabet.as_ref()
    }

    /// Attach a working alphabet; it must be a nonempty subset of the
    /// observed characters.
    pub fn with_working_alphabet(mut self, alphabet: BTreeSet<char>) -> Self {
        debug_assert!(!alphabet.is_empty());
        debug_assert!(alphabet.iter().all(|c| self.entries.contains_key(c)));
        self.working_alphabet = Some(alphabet);
        self
    }
}

/// Character frequencies over the orthographic forms of a lexicon.
///
/// The inventory is always computed from written forms; duration lexicons
/// contribute through their orthographic forms.
pub fn character_inventory(lexicon: &Lexicon) -> CharacterInventory {
    let mut entries: BTreeMap<char, u64> = BTreeMap::new();
    for record in lexicon.records() {
        for character in record.form.chars() {
            *entries.entry(character).or_insert(0) += record.frequency;
        }
    }
    CharacterInventory {
        entries,
        working_alphabet: None,
    }
}
