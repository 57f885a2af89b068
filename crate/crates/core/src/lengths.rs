//! Word length in the three supported units: characters, median duration
//! in seconds, and user-mapped units (stroke counts and the like).

use std::collections::BTreeMap;
use std::io::BufRead;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LengthError {
    #[error("unmapped character {character} in form {form:?}")]
    UnmappedCharacter { character: char, form: String },
    #[error("cannot take the median of an empty sample list")]
    EmptySamples,
    #[error("invalid duration sample {value}")]
    InvalidSample { value: f64 },
    #[error("unit mapping row {row}: {message}")]
    MappingRow { row: usize, message: String },
    #[error("unit mapping: missing or malformed header (expected \"char\\tunits\")")]
    MappingHeader,
    #[error("unit mapping i/o: {0}")]
    Io(String),
}

/// Number of Unicode scalar values in `form`.
///
/// Accented letters count as single characters distinct from their base,
/// so callers are expected to NFC-normalize first.
pub fn char_length(form: &str) -> usize {
    form.chars().count()
}

/// Median of a nonempty list of nonnegative duration samples.
/// For an even count, the midpoint of the two central values.
pub fn median_duration(samples: &[f64]) -> Result<f64, LengthError> {
    if samples.is_empty() {
        return Err(LengthError::EmptySamples);
    }
    for &value in samples {
        if !value.is_finite() || value < 0.0 {
            return Err(LengthError::InvalidSample { value });
        }
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("samples are finite"));
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        Ok(sorted[mid])
    } else {
        Ok((sorted[mid - 1] + sorted[mid]) / 2.0)
    }
}

/// Per-character unit counts, e.g. printed stroke counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitMapping {
    table: BTreeMap<char, u64>,
}

impl UnitMapping {
    /// Build a mapping from explicit pairs. Every unit count must be >= 1.
    pub fn new(pairs: impl IntoIterator<Item = (char, u64)>) -> Result<Self, LengthError> {
        let mut table = BTreeMap::new();
        for (row, (character, units)) in pairs.into_iter().enumerate() {
            if units == 0 {
                return Err(LengthError::MappingRow {
                    row: row + 1,
                    message: format!("unit count for {character:?} must be >= 1"),
                });
            }
            if table.insert(character, units).is_some() {
                return Err(LengthError::MappingRow {
                    row: row + 1,
                    message: format!("duplicate character {character:?}"),
                });
            }
        }
        Ok(UnitMapping { table })
    }

    /// Parse the TSV mapping format: header `char\tunits`, one character per row.
    pub fn from_tsv<R: BufRead>(reader: R) -> Result<Self, LengthError> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or(LengthError::MappingHeader)?
            .map_err(|e| LengthError::Io(e.to_string()))?;
        if header.trim_end_matches('\r') != "char\tunits" {
            return Err(LengthError::MappingHeader);
        }
        let mut table = BTreeMap::new();
        for (idx, line) in lines.enumerate() {
            let row = idx + 2;
            let line = line.map_err(|e| LengthError::Io(e.to_string()))?;
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let (Some(ch), Some(units), None) = (fields.next(), fields.next(), fields.next())
            else {
                return Err(LengthError::MappingRow {
                    row,
                    message: "expected exactly 2 tab-separated fields".into(),
                });
            };
            let mut chars = ch.chars();
            let (Some(character), None) = (chars.next(), chars.next()) else {
                return Err(LengthError::MappingRow {
                    row,
                    message: format!("expected a single character, got {ch:?}"),
                });
            };
            let units: u64 = units.parse().map_err(|_| LengthError::MappingRow {
                row,
                message: format!("invalid unit count {units:?}"),
            })?;
            if units == 0 {
                return Err(LengthError::MappingRow {
                    row,
                    message: format!("unit count for {character:?} must be >= 1"),
                });
            }
            if table.insert(character, units).is_some() {
                return Err(LengthError::MappingRow {
                    row,
                    message: format!("duplicate character {character:?}"),
                });
            }
        }
        Ok(UnitMapping { table })
    }

    pub fn units(&self, character: char) -> Option<u64> {
        self.table.get(&character).copied()
    }

    /// True when every character of `form` has a mapping entry.
    pub fn covers(&self, form: &str) -> bool {
        form.chars().all(|c| self.table.contains_key(&c))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// Sum of per-character unit counts over `form`.
pub fn mapped_length(form: &str, mapping: &UnitMapping) -> Result<u64, LengthError> {
    let mut total = 0u64;
    for character in form.chars() {
        match mapping.units(character) {
            Some(units) => total += units,
            None => {
                return Err(LengthError::UnmappedCharacter {
                    character,
                    form: form.to_string(),
                })
            }
        }
    }
    Ok(total)
}
