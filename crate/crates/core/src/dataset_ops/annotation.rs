//! Tolerant extraction of `valid` judgements from model-written JSON-like
//! annotation lines, and assembly of those judgements into a dense dataset.
//!
//! Observed output deviates from strict JSON in several ways: single quotes,
//! booleans written as strings or capitalised literals, `yes`/`no`/`sometimes`
//! instead of booleans, and free-text explanations following the answer.
//! The parser accepts all of these but only ever returns a boolean that is
//! witnessed by a vocabulary token at the start of the `valid` value.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::datamodel::{AttributeId, ConceptId, DatasetRows, NormDataset};

/// Normalised (lower-cased) truth token to boolean.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthMapping {
    tokens: BTreeMap<String, bool>,
}

impl Default for TruthMapping {
    fn default() -> Self {
        let tokens = [
            ("true", true),
            ("yes", true),
            ("sometimes", true),
            ("false", false),
            ("no", false),
        ]
        .into_iter()
        .map(|(t, v)| (t.to_owned(), v))
        .collect();
        TruthMapping { tokens }
    }
}

impl TruthMapping {
    pub fn empty() -> Self {
        TruthMapping {
            tokens: BTreeMap::new(),
        }
    }

    /// Adds or overrides one token. Tokens are matched case-insensitively.
    pub fn set(&mut self, token: &str, value: bool) -> Result<(), DatasetError> {
        let normalized = normalize_token(token);
        if normalized.is_empty() || !normalized.chars().all(|c| c.is_ascii_alphabetic()) {
            return Err(DatasetError::InvalidTruthToken(token.to_owned()));
        }
        self.tokens.insert(normalized, value);
        Ok(())
    }

    pub fn remove(&mut self, token: &str) -> Option<bool> {
        self.tokens.remove(&normalize_token(token))
    }

    pub fn lookup(&self, token: &str) -> Option<bool> {
        self.tokens.get(&normalize_token(token)).copied()
    }

    pub fn tokens(&self) -> impl Iterator<Item = (&str, bool)> {
        self.tokens.iter().map(|(t, &v)| (t.as_str(), v))
    }
}

fn normalize_token(token: &str) -> String {
    token.trim().to_ascii_lowercase()
}

/// Fields recovered from one annotation line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedAnnotation {
    /// Echoed `concept` field, if present.
    pub concept: Option<String>,
    /// Echoed `attribute` field, if present.
    pub attribute: Option<String>,
    pub valid: bool,
    /// The vocabulary token the boolean was read from, as written.
    pub token: String,
    /// Byte offset of the `valid` key in the line.
    pub valid_offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "detail")]
pub enum FailureReason {
    /// No `valid` key found.
    NoValidField,
    /// The `valid` value does not start with a vocabulary token.
    UnrecognizedValue(String),
    MissingConcept,
    MissingAttribute,
}

impl std::fmt::Display for FailureReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FailureReason::NoValidField => f.write_str("no `valid` field"),
            FailureReason::UnrecognizedValue(v) => write!(f, "unrecognised value `{v}`"),
            FailureReason::MissingConcept => f.write_str("no concept field"),
            FailureReason::MissingAttribute => f.write_str("no attribute field"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseFailure {
    pub raw: String,
    pub source_line: usize,
    /// Byte offset of the `valid` key when it was located.
    pub valid_offset: Option<usize>,
    pub reason: FailureReason,
}

/// One (concept, attribute) judgement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub concept: ConceptId,
    /// Attribute name; its type comes from the attribute list at assembly.
    pub attribute: String,
    pub valid: bool,
    pub source_line: usize,
}

fn key_regex(key: &str) -> Regex {
    Regex::new(&format!(r#"["']?\b{key}\b["']?\s*:"#)).expect("static pattern")
}

fn valid_key() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| key_regex("valid"))
}

fn concept_key() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| key_regex("concept"))
}

fn attribute_key() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| key_regex("attribute"))
}

/// String value following a key: quoted with either quote style, or bare up
/// to the next comma or closing brace.
fn string_field(raw: &str, key: &Regex) -> Option<String> {
    let m = key.find(raw)?;
    let rest = raw[m.end()..].trim_start();
    let mut chars = rest.chars();
    let value = match chars.next()? {
        q @ ('"' | '\'') => {
            let body = &rest[1..];
            let close = body.find(q).unwrap_or(body.len());
            &body[..close]
        }
        _ => {
            let stop = rest.find([',', '}']).unwrap_or(rest.len());
            &rest[..stop]
        }
    };
    let value = value.trim();
    (!value.is_empty()).then(|| value.to_owned())
}

/// Extracts the `valid` judgement (and any echoed concept/attribute) from
/// one line of model output.
pub fn parse_annotation_line(
    raw: &str,
    mapping: &TruthMapping,
) -> Result<ParsedAnnotation, (Option<usize>, FailureReason)> {
    let m = valid_key()
        .find(raw)
        .ok_or((None, FailureReason::NoValidField))?;
    let offset = m.start();
    let rest = raw[m.end()..].trim_start();
    let rest = rest.strip_prefix(['"', '\'']).unwrap_or(rest).trim_start();
    let token_len = rest
        .find(|c: char| !c.is_ascii_alphabetic())
        .unwrap_or(rest.len());
    let token = &rest[..token_len];
    let valid = mapping
        .lookup(token)
        .filter(|_| !token.is_empty())
        .ok_or_else(|| {
            let shown: String = rest.chars().take(40).collect();
            (Some(offset), FailureReason::UnrecognizedValue(shown))
        })?;
    Ok(ParsedAnnotation {
        concept: string_field(raw, concept_key()),
        attribute: string_field(raw, attribute_key()),
        valid,
        token: token.to_owned(),
        valid_offset: offset,
    })
}

/// Parses a full annotation line into a record.
///
/// Lines of the form `concept<TAB>attribute<TAB>response` take the pair from
/// the leading columns (the request keys); otherwise the echoed `concept` and
/// `attribute` fields of the response are used.
pub fn parse_annotation_record(
    raw: &str,
    source_line: usize,
    mapping: &TruthMapping,
) -> Result<AnnotationRecord, ParseFailure> {
    let fail = |valid_offset, reason| ParseFailure {
        raw: raw.to_owned(),
        source_line,
        valid_offset,
        reason,
    };
    let (keys, response, shift) = match raw.splitn(3, '\t').collect::<Vec<_>>().as_slice() {
        [c, a, resp] => (Some((*c, *a)), *resp, raw.len() - resp.len()),
        _ => (None, raw, 0),
    };
    let parsed = parse_annotation_line(response, mapping)
        .map_err(|(offset, reason)| fail(offset.map(|o| o + shift), reason))?;
    let offset = Some(parsed.valid_offset + shift);
    let (concept, attribute) = match keys {
        Some((c, a)) => (Some(c.to_owned()), Some(a.to_owned())),
        None => (parsed.concept, parsed.attribute),
    };
    let concept = concept
        .and_then(|c| ConceptId::new(c).ok())
        .ok_or_else(|| fail(offset, FailureReason::MissingConcept))?;
    let attribute = attribute
        .map(|a| a.trim().to_owned())
        .filter(|a| !a.is_empty())
        .ok_or_else(|| fail(offset, FailureReason::MissingAttribute))?;
    Ok(AnnotationRecord {
        concept,
        attribute,
        valid: parsed.valid,
        source_line,
    })
}

/// Outcome of parsing a whole annotation file.
#[derive(Debug, Clone, Default)]
pub struct ParsedAnnotations {
    pub records: Vec<AnnotationRecord>,
    pub failures: Vec<ParseFailure>,
}

/// Parses every non-blank line; line numbers are 1-based.
pub fn parse_annotations<'a>(
    lines: impl IntoIterator<Item = &'a str>,
    mapping: &TruthMapping,
) -> ParsedAnnotations {
    let mut out = ParsedAnnotations::default();
    for (i, line) in lines.into_iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match parse_annotation_record(line, i + 1, mapping) {
            Ok(r) => out.records.push(r),
            Err(f) => out.failures.push(f),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AssemblyReport {
    /// Repeated records that agreed with an earlier one and were dropped.
    pub duplicates: usize,
}

/// Number of missing pairs listed in a `MissingPair` error.
pub const MISSING_PAIR_LIMIT: usize = 20;

/// Builds the dense binary matrix from one record per (concept, attribute).
pub fn assemble_norms(
    records: &[AnnotationRecord],
    concepts: &[ConceptId],
    attributes: &[AttributeId],
) -> Result<(NormDataset, AssemblyReport), DatasetError> {
    let concept_index: HashMap<&ConceptId, usize> =
        concepts.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let attribute_index: HashMap<&str, usize> = attributes
        .iter()
        .enumerate()
        .map(|(j, a)| (a.name(), j))
        .collect();
    let width = attributes.len();
    let mut cells: Vec<Option<(bool, usize)>> = vec![None; concepts.len() * width];
    let mut report = AssemblyReport::default();
    for r in records {
        let i = *concept_index
            .get(&r.concept)
            .ok_or_else(|| DatasetError::UnknownConcept {
                concept: r.concept.to_string(),
                line: r.source_line,
            })?;
        let j = *attribute_index.get(r.attribute.as_str()).ok_or_else(|| {
            DatasetError::UnknownAttribute {
                attribute: r.attribute.clone(),
                line: r.source_line,
            }
        })?;
        match cells[i * width + j] {
            None => cells[i * width + j] = Some((r.valid, r.source_line)),
            Some((v, _)) if v == r.valid => report.duplicates += 1,
            Some((_, first_line)) => {
                return Err(DatasetError::ConflictingDuplicate {
                    concept: r.concept.to_string(),
                    attribute: r.attribute.clone(),
                    first_line,
                    second_line: r.source_line,
                })
            }
        }
    }
    let missing: Vec<(String, String)> = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_none())
        .map(|(k, _)| {
            (
                concepts[k / width].to_string(),
                attributes[k % width].name().to_owned(),
            )
        })
        .collect();
    if !missing.is_empty() {
        let total = missing.len();
        return Err(DatasetError::MissingPair {
            total,
            pairs: missing.into_iter().take(MISSING_PAIR_LIMIT).collect(),
        });
    }
    if report.duplicates > 0 {
        log::warn!("{} duplicate annotation records dropped", report.duplicates);
    }
    let labels = cells
        .into_iter()
        .map(|c| u8::from(c.map(|(v, _)| v).unwrap_or(false)))
        .collect();
    let dataset = NormDataset::new(concepts.to_vec(), attributes.to_vec(), labels)?;
    Ok((dataset, report))
}

/// Per-attribute agreement between a reference dataset (e.g. the original
/// elicited norms) and an assembled one over their shared concepts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallRow {
    pub attribute: String,
    pub reference_positives: usize,
    pub assembled_positives: usize,
    /// Reference positives that are also positive in the assembled data.
    pub recovered: usize,
    pub recall: f64,
}

pub fn annotation_recall(reference: &NormDataset, assembled: &NormDataset) -> Vec<RecallRow> {
    let shared: HashSet<&ConceptId> = assembled.concepts().iter().collect();
    let rows: Vec<usize> = reference
        .concepts()
        .iter()
        .enumerate()
        .filter(|(_, c)| shared.contains(c))
        .map(|(i, _)| i)
        .collect();
    let assembled_row: HashMap<&ConceptId, usize> = assembled
        .concepts()
        .iter()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    let mut out = Vec::new();
    for (j, attr) in reference.attributes().iter().enumerate() {
        let Some(k) = assembled.attribute_index(attr.name()) else {
            continue;
        };
        let mut reference_positives = 0;
        let mut recovered = 0;
        for &i in &rows {
            if reference.label(i, j) {
                reference_positives += 1;
                if assembled.label(assembled_row[&reference.concepts()[i]], k) {
                    recovered += 1;
                }
            }
        }
        out.push(RecallRow {
            attribute: attr.name().to_owned(),
            reference_positives,
            assembled_positives: assembled.positive_count(k),
            recovered,
            recall: if reference_positives == 0 {
                0.0
            } else {
                recovered as f64 / reference_positives as f64
            },
        });
    }
    out
}
