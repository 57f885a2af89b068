//! Streaming parsers for the three supported input formats:
//! CoNLL-U treebanks, forced-alignment TSV and pre-aggregated type lists.
//!
//! The token parsers yield one item per input token and never buffer the
//! whole file, so corpora with millions of tokens stream through in
//! constant memory.

use std::io::{self, BufRead, Write};

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::model::{Lexicon, Metadata, ModelError, TypeRecord, Unit};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: expected 10 tab-separated columns, found {found}")]
    ConlluColumns { line: usize, found: usize },
    #[error("line {line}: invalid token id {id:?}")]
    ConlluId { line: usize, id: String },
    #[error("missing or malformed header (expected {expected:?})")]
    Header { expected: &'static str },
    #[error("row {row}: expected {expected} fields, found {found}")]
    FieldCount {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}: invalid number {value:?} in column {column}")]
    InvalidNumber {
        row: usize,
        column: &'static str,
        value: String,
    },
    #[error("end before start, row {row}")]
    EndBeforeStart { row: usize },
    #[error("duplicate form {form}, row {row}")]
    DuplicateForm { form: String, row: usize },
    #[error("row {row}: frequency must be a positive integer")]
    NonPositiveFrequency { row: usize },
    #[error("row {row}: length must be a finite nonnegative number")]
    NegativeLength { row: usize },
    #[error("row {row}: form must not be empty")]
    EmptyForm { row: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// One token as read from an input file, before any filtering.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawToken {
    pub form: String,
    pub pos: Option<String>,
    pub duration_s: Option<f64>,
    pub is_unknown: bool,
    pub is_null: bool,
}

impl RawToken {
    pub fn word(form: impl Into<String>) -> Self {
        RawToken {
            form: form.into(),
            ..RawToken::default()
        }
    }
}

fn trim_newline(line: &str) -> &str {
    line.trim_end_matches('\r')
}

/// Streaming CoNLL-U parser: one [`RawToken`] per single-word token line.
///
/// Comment lines, blank sentence separators, multiword-token ranges
/// (`3-4`) and empty nodes (`5.1`) are skipped.
pub struct ConlluTokens<R: BufRead> {
    lines: io::Lines<R>,
    line_no: usize,
}

pub fn parse_conllu<R: BufRead>(reader: R) -> ConlluTokens<R> {
    ConlluTokens {
        lines: reader.lines(),
        line_no: 0,
    }
}

enum ConlluId {
    Word,
    Skip,
}

fn classify_conllu_id(id: &str) -> Option<ConlluId> {
    if id.parse::<u64>().is_ok() {
        return Some(ConlluId::Word);
    }
    let both_parse = |sep: char| {
        id.split_once(sep)
            .is_some_and(|(a, b)| a.parse::<u64>().is_ok() && b.parse::<u64>().is_ok())
    };
    // "3-4" multiword range, "5.1" empty node: skip in favour of word lines
    if both_parse('-') || both_parse('.') {
        return Some(ConlluId::Skip);
    }
    None
}

impl<R: BufRead> Iterator for ConlluTokens<R> {
    type Item = Result<RawToken, ParseError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => return Some(Err(e.into())),
            };
            self.line_no += 1;
            let line = trim_newline(&line);
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let columns: Vec<&str> = line.split('\t').collect();
            if columns.len() != 10 {
                return Some(Err(ParseError::ConlluColumns {
                    line: self.line_no,
                    found: columns.len(),
                }));
            }
            match classify_conllu_id(columns[0]) {
                Some(ConlluId::Word) => {
                    let pos = match columns[3] {
                        "_" | "" => None,
                        tag => Some(tag.to_string()),
                    };
                    return Some(Ok(RawToken {
                        form: columns[1].to_string(),
                        pos,
                        duration_s: None,
                        is_unknown: false,
                        is_null: columns[1].is_empty(),
                    }));
                }
                Some(ConlluId::Skip) => continue,
                None => {
                    return Some(Err(ParseError::ConlluId {
                        line: self.line_no,
                        id: columns[0].to_string(),
                    }))
                }
            }
        }
    }
}

pub const ALIGNMENT_HEADER: &str = "utt\tform\tstart\tend";

/// Streaming parser for forced-alignment tables: header row, then
/// `utterance_id, form, start_s, end_s` per row. The token duration is
/// `end - start`.
pub struct AlignmentTokens<R: BufRead> {
    lines: io::Lines<R>,
    row: usize,
    header_checked: bool,
}

pub fn parse_alignment<R: BufRead>(reader: R) -> AlignmentTokens<R> {
    AlignmentTokens {
        lines: reader.lines(),
        row: 0,
        header_checked: false,
    }
}

impl<R: BufRead> AlignmentTokens<R> {
    fn parse_row(&mut self, line: &str) -> Result<RawToken, ParseError> {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(ParseError::FieldCount {
                row: self.row,
                expected: 4,
                found: fields.len(),
            });
        }
        let parse_seconds = |value: &str, column: &'static str| -> Result<f64, ParseError> {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| ParseError::InvalidNumber {
                    row: self.row,
                    column,
                    value: value.to_string(),
                })
        };
        let start = parse_seconds(fields[2], "start")?;
        let end = parse_seconds(fields[3], "end")?;
        if end < start {
            return Err(ParseError::EndBeforeStart { row: self.row });
        }
        let form = fields[1];
        Ok(RawToken {
            form: form.to_string(),
            pos: None,
            duration_s: Some(end - start),
            is_unknown: form == "<unk>",
            is_null: form.is_empty(),
        })
    }
}

impl<R: BufRead> Iterator for AlignmentTokens<R> {
    type Item = Result<RawToken, ParseError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => return Some(Err(e.into())),
            };
            self.row += 1;
            let line = trim_newline(&line);
            if !self.header_checked {
                self.header_checked = true;
                if line != ALIGNMENT_HEADER {
                    return Some(Err(ParseError::Header {
                        expected: ALIGNMENT_HEADER,
                    }));
                }
                continue;
            }
            if line.is_empty() {
                continue;
            }
            return Some(self.parse_row(line));
        }
    }
}

const TYPELIST_FIELDS: [&str; 3] = ["form", "frequency", "length"];

/// Parse a pre-aggregated type list (`form, frequency, length` rows) into a
/// lexicon with the generic `mapped` unit. The delimiter (comma or tab) is
/// detected from the header line. Forms are NFC-normalized and lowercased;
/// duplicates after normalization are an error.
pub fn parse_typelist<R: BufRead>(reader: R) -> Result<Lexicon, ParseError> {
    let mut lines = reader.lines();
    let header = lines.next().transpose()?.ok_or(ParseError::Header {
        expected: "form,frequency,length",
    })?;
    let header = trim_newline(&header);
    let delimiter = if header.contains('\t') { '\t' } else { ',' };
    let names: Vec<&str> = header.split(delimiter).map(str::trim).collect();
    if names != TYPELIST_FIELDS {
        return Err(ParseError::Header {
            expected: "form,frequency,length",
        });
    }

    let mut records: Vec<TypeRecord> = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (idx, line) in lines.enumerate() {
        let row = idx + 2;
        let line = line?;
        let line = trim_newline(&line);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(delimiter).collect();
        if fields.len() != 3 {
            return Err(ParseError::FieldCount {
                row,
                expected: 3,
                found: fields.len(),
            });
        }
        let form: String = fields[0].nfc().collect::<String>().to_lowercase();
        if form.is_empty() {
            return Err(ParseError::EmptyForm { row });
        }
        let frequency: u64 = match fields[1].parse::<i64>() {
            Ok(f) if f >= 1 => f as u64,
            Ok(_) => return Err(ParseError::NonPositiveFrequency { row }),
            Err(_) => {
                return Err(ParseError::InvalidNumber {
                    row,
                    column: "frequency",
                    value: fields[1].to_string(),
                })
            }
        };
        let length: f64 = fields[2].parse().map_err(|_| ParseError::InvalidNumber {
            row,
            column: "length",
            value: fields[2].to_string(),
        })?;
        if !length.is_finite() || length < 0.0 {
            return Err(ParseError::NegativeLength { row });
        }
        if !seen.insert(form.clone()) {
            return Err(ParseError::DuplicateForm { form, row });
        }
        records.push(TypeRecord::new(form, frequency, length));
    }
    Ok(Lexicon::from_records(
        records,
        Unit::Mapped,
        Metadata::default(),
    )?)
}

/// Serialize a lexicon in the type-list TSV format accepted by
/// [`parse_typelist`]. Lengths print in shortest round-trip form, so
/// parsing the output reproduces the lexicon exactly.
pub fn write_typelist<W: Write>(lexicon: &Lexicon, mut writer: W) -> io::Result<()> {
    writeln!(writer, "form\tfrequency\tlength")?;
    for record in lexicon.records() {
        writeln!(
            writer,
            "{}\t{}\t{}",
            record.form, record.frequency, record.length
        )?;
    }
    Ok(())
}
