//! Long-format CSV datasets.
//!
//! Norms: `concept,attribute,value` with value 0 or 1, plus a companion
//! `attribute,type` file. Ratings: `concept,attribute,rating` with the same
//! companion. Supercategories: `concept,supercategory`. Every file must
//! cover the full concept x attribute grid exactly once; concepts and
//! attributes keep their order of first appearance.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use normprobe_core::datamodel::DatasetRows;
use normprobe_core::{
    AttributeId, ConceptId, NormDataset, RatingDataset, RatingScale, SupercategoryMap,
};

use crate::error::{CliError, Result};
use crate::output::{exact, sibling, write_atomic};

pub const NORMS_HEADER: [&str; 3] = ["concept", "attribute", "value"];
pub const RATINGS_HEADER: [&str; 3] = ["concept", "attribute", "rating"];
pub const ATTRIBUTES_HEADER: [&str; 2] = ["attribute", "type"];
pub const SUPERCATEGORY_HEADER: [&str; 2] = ["concept", "supercategory"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetKind {
    Norms,
    Ratings,
}

/// One data row of a CSV file with its 1-based line number.
struct Row {
    line: usize,
    fields: Vec<String>,
}

fn read_csv(path: &Path, header: &[&str]) -> Result<Vec<Row>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let mut rows = Vec::new();
    let mut saw_header = false;
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let fields: Vec<String> = record.iter().map(|f| f.trim().to_owned()).collect();
        if !saw_header {
            if fields != header {
                return Err(CliError::format(
                    path,
                    Some(line),
                    format!(
                        "header is `{}`, expected `{}`",
                        fields.join(","),
                        header.join(",")
                    ),
                ));
            }
            saw_header = true;
            continue;
        }
        if fields.len() == 1 && fields[0].is_empty() {
            continue;
        }
        if fields.len() != header.len() {
            return Err(CliError::format(
                path,
                Some(line),
                format!("expected {} fields, found {}", header.len(), fields.len()),
            ));
        }
        rows.push(Row { line, fields });
    }
    if !saw_header {
        return Err(CliError::format(path, Some(1), "file is empty"));
    }
    Ok(rows)
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    let line = e.position().map(|p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::io(path, io),
        other => CliError::format(path, line, format!("{other:?}")),
    }
}

/// Reads the header of a dataset file to tell norms from ratings.
pub fn detect_kind(path: &Path) -> Result<DatasetKind> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let first = reader
        .records()
        .next()
        .ok_or_else(|| CliError::format(path, Some(1), "file is empty"))?
        .map_err(|e| csv_error(path, e))?;
    let fields: Vec<&str> = first.iter().map(str::trim).collect();
    if fields == NORMS_HEADER {
        Ok(DatasetKind::Norms)
    } else if fields == RATINGS_HEADER {
        Ok(DatasetKind::Ratings)
    } else {
        Err(CliError::format(
            path,
            Some(1),
            format!(
                "header is `{}`, expected `{}` or `{}`",
                fields.join(","),
                NORMS_HEADER.join(","),
                RATINGS_HEADER.join(",")
            ),
        ))
    }
}

/// Companion attribute-type file of a dataset: the explicit path if given,
/// else `<stem>.attributes.csv`, else `attributes.csv` in the same directory.
pub fn companion_path(dataset: &Path, explicit: Option<&Path>) -> Result<PathBuf> {
    if let Some(p) = explicit {
        return Ok(p.to_owned());
    }
    let own = sibling(dataset, ".attributes.csv");
    if own.exists() {
        return Ok(own);
    }
    let shared = dataset.with_file_name("attributes.csv");
    if shared.exists() {
        return Ok(shared);
    }
    Err(CliError::Usage(format!(
        "no attribute-type file for {} (looked for {} and {}); pass --attributes",
        dataset.display(),
        own.display(),
        shared.display()
    )))
}

/// Attribute names with their type labels, in file order.
pub fn read_attribute_types(path: &Path) -> Result<Vec<AttributeId>> {
    let mut seen = HashMap::new();
    let mut out = Vec::new();
    for row in read_csv(path, &ATTRIBUTES_HEADER)? {
        let attribute = AttributeId::new(&row.fields[0], &row.fields[1])
            .map_err(|e| CliError::format(path, Some(row.line), e.to_string()))?;
        if let Some(first) = seen.insert(attribute.name().to_owned(), row.line) {
            return Err(CliError::format(
                path,
                Some(row.line),
                format!(
                    "attribute `{}` already listed on line {first}",
                    attribute.name()
                ),
            ));
        }
        out.push(attribute);
    }
    Ok(out)
}

struct Grid {
    concepts: Vec<ConceptId>,
    attributes: Vec<String>,
    /// Row-major cell values with the line they came from.
    cells: Vec<Option<(String, usize)>>,
}

fn read_grid(path: &Path, header: &[&str]) -> Result<Grid> {
    let rows = read_csv(path, header)?;
    let mut concept_index: HashMap<String, usize> = HashMap::new();
    let mut attribute_index: HashMap<String, usize> = HashMap::new();
    let mut concepts = Vec::new();
    let mut attributes = Vec::new();
    let mut coords = Vec::with_capacity(rows.len());
    for row in &rows {
        let concept = ConceptId::new(&row.fields[0])
            .map_err(|e| CliError::format(path, Some(row.line), e.to_string()))?;
        if row.fields[1].is_empty() {
            return Err(CliError::format(
                path,
                Some(row.line),
                "attribute name is empty",
            ));
        }
        let next = concepts.len();
        let i = *concept_index
            .entry(concept.as_str().to_owned())
            .or_insert_with(|| {
                concepts.push(concept.clone());
                next
            });
        let next = attributes.len();
        let j = *attribute_index
            .entry(row.fields[1].clone())
            .or_insert_with(|| {
                attributes.push(row.fields[1].clone());
                next
            });
        coords.push((i, j));
    }
    let width = attributes.len();
    let mut cells: Vec<Option<(String, usize)>> = vec![None; concepts.len() * width];
    for (row, (i, j)) in rows.into_iter().zip(coords) {
        let cell = &mut cells[i * width + j];
        if let Some((_, first)) = cell {
            return Err(CliError::format(
                path,
                Some(row.line),
                format!(
                    "(`{}`, `{}`) already given on line {first}",
                    row.fields[0], row.fields[1]
                ),
            ));
        }
        let value = row.fields.into_iter().nth(2).expect("three fields");
        *cell = Some((value, row.line));
    }
    let missing: Vec<String> = cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.is_none())
        .take(5)
        .map(|(k, _)| format!("(`{}`, `{}`)", concepts[k / width], attributes[k % width]))
        .collect();
    if !missing.is_empty() {
        let total = cells.iter().filter(|c| c.is_none()).count();
        return Err(CliError::format(
            path,
            None,
            format!(
                "{total} concept/attribute pairs are missing, e.g. {}",
                missing.join(", ")
            ),
        ));
    }
    Ok(Grid {
        concepts,
        attributes,
        cells,
    })
}

fn typed_attributes(
    path: &Path,
    names: &[String],
    types: &[AttributeId],
) -> Result<Vec<AttributeId>> {
    let by_name: HashMap<&str, &AttributeId> = types.iter().map(|a| (a.name(), a)).collect();
    names
        .iter()
        .map(|n| {
            by_name
                .get(n.as_str())
                .map(|a| (*a).clone())
                .ok_or_else(|| {
                    CliError::format(
                        path,
                        None,
                        format!("attribute `{n}` has no type in the attribute file"),
                    )
                })
        })
        .collect()
}

pub fn read_norms(path: &Path, attributes_path: &Path) -> Result<NormDataset> {
    let types = read_attribute_types(attributes_path)?;
    let grid = read_grid(path, &NORMS_HEADER)?;
    let attributes = typed_attributes(path, &grid.attributes, &types)?;
    let labels = grid
        .cells
        .into_iter()
        .map(|cell| {
            let (value, line) = cell.expect("grid is dense");
            match value.as_str() {
                "0" => Ok(0u8),
                "1" => Ok(1u8),
                other => Err(CliError::format(
                    path,
                    Some(line),
                    format!("value `{other}` is not 0 or 1"),
                )),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    NormDataset::new(grid.concepts, attributes, labels)
        .map_err(|e| CliError::format(path, None, e.to_string()))
}

pub fn read_ratings(
    path: &Path,
    attributes_path: &Path,
    scale: RatingScale,
) -> Result<RatingDataset> {
    let types = read_attribute_types(attributes_path)?;
    let grid = read_grid(path, &RATINGS_HEADER)?;
    let attributes = typed_attributes(path, &grid.attributes, &types)?;
    let ratings = grid
        .cells
        .into_iter()
        .map(|cell| {
            let (value, line) = cell.expect("grid is dense");
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    CliError::format(
                        path,
                        Some(line),
                        format!("rating `{value}` is not a finite number"),
                    )
                })
        })
        .collect::<Result<Vec<_>>>()?;
    RatingDataset::new(grid.concepts, attributes, ratings, scale)
        .map_err(|e| CliError::format(path, None, e.to_string()))
}

fn csv_bytes<'a>(header: &[&str], rows: impl Iterator<Item = Vec<String>> + 'a) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// Writes the `attribute,type` companion for a dataset written to `path`.
pub fn write_attribute_types(path: &Path, attributes: &[AttributeId]) -> Result<PathBuf> {
    let companion = sibling(path, ".attributes.csv");
    let rows = attributes
        .iter()
        .map(|a| vec![a.name().to_owned(), a.type_label().to_owned()]);
    write_atomic(&companion, &csv_bytes(&ATTRIBUTES_HEADER, rows))?;
    Ok(companion)
}

pub fn norms_csv(d: &NormDataset) -> Vec<u8> {
    let width = d.n_attributes();
    let rows = (0..d.n_concepts() * width).map(move |k| {
        let (i, j) = (k / width, k % width);
        vec![
            d.concepts()[i].as_str().to_owned(),
            d.attributes()[j].name().to_owned(),
            if d.label(i, j) { "1" } else { "0" }.to_owned(),
        ]
    });
    csv_bytes(&NORMS_HEADER, rows)
}

pub fn ratings_csv(d: &RatingDataset) -> Vec<u8> {
    let width = d.n_attributes();
    let rows = (0..d.n_concepts() * width).map(move |k| {
        let (i, j) = (k / width, k % width);
        vec![
            d.concepts()[i].as_str().to_owned(),
            d.attributes()[j].name().to_owned(),
            exact(d.rating(i, j)),
        ]
    });
    csv_bytes(&RATINGS_HEADER, rows)
}

/// Writes a norms file and its companion attribute-type file.
pub fn write_norms(path: &Path, d: &NormDataset) -> Result<PathBuf> {
    write_atomic(path, &norms_csv(d))?;
    write_attribute_types(path, d.attributes())
}

pub fn write_ratings(path: &Path, d: &RatingDataset) -> Result<PathBuf> {
    write_atomic(path, &ratings_csv(d))?;
    write_attribute_types(path, d.attributes())
}

pub fn read_supercategories(path: &Path) -> Result<SupercategoryMap> {
    let mut pairs = Vec::new();
    for row in read_csv(path, &SUPERCATEGORY_HEADER)? {
        let concept = ConceptId::new(&row.fields[0])
            .map_err(|e| CliError::format(path, Some(row.line), e.to_string()))?;
        pairs.push((concept, row.fields[1].clone()));
    }
    SupercategoryMap::new(pairs).map_err(|e| CliError::format(path, None, e.to_string()))
}

/// One concept per line; blank lines and a leading `concept` header are
/// skipped.
pub fn read_concept_list(path: &Path) -> Result<Vec<ConceptId>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let name = line.trim();
        if name.is_empty() || (i == 0 && name == "concept") {
            continue;
        }
        out.push(
            ConceptId::new(name).map_err(|e| CliError::format(path, Some(i + 1), e.to_string()))?,
        );
    }
    Ok(out)
}
