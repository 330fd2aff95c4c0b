//! CSV tables: labeled matrices, traits, trait kinds and availability masks.
//!
//! Floats are written in Rust's shortest round-trip form, so a written table
//! reads back to the same bits.

use std::collections::HashMap;
use std::path::Path;

use mgpca_core::analysis::{Trait, TraitKind, TraitTable};
use mgpca_core::Matrix;

use crate::error::{CliError, Result};

pub fn fmt(v: f64) -> String {
    format!("{v:?}")
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| csv_error(path, e))
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(source) => CliError::Io {
                path: path.to_path_buf(),
                source,
            },
            _ => unreachable!("checked io kind"),
        }
    } else {
        CliError::format(path, e)
    }
}

/// Writes `header` then `rows`; every row must match the header width.
pub fn write_table(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(CliError::io(path))
}

/// All records of a CSV file with its header.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = reader(path)?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(String::from)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_error(path, e))?;
        rows.push(rec.iter().map(String::from).collect());
    }
    Ok((header, rows))
}

/// A matrix whose rows carry a label in the first column.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    pub label_header: String,
    pub columns: Vec<String>,
    pub labels: Vec<String>,
    pub values: Matrix,
}

pub fn write_labeled(path: &Path, m: &LabeledMatrix) -> Result<()> {
    let header: Vec<String> = std::iter::once(m.label_header.clone())
        .chain(m.columns.iter().cloned())
        .collect();
    let rows: Vec<Vec<String>> = m
        .labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            std::iter::once(l.clone())
                .chain(m.values.row(i).iter().map(|v| fmt(*v)))
                .collect()
        })
        .collect();
    write_table(path, &header, &rows)
}

pub fn read_labeled(path: &Path) -> Result<LabeledMatrix> {
    let (header, rows) = read_table(path)?;
    let Some((label_header, columns)) = header.split_first() else {
        return Err(CliError::format(path, "empty header"));
    };
    let cols = columns.len();
    let mut labels = Vec::with_capacity(rows.len());
    let mut values = Vec::with_capacity(rows.len() * cols);
    for (line, r) in rows.iter().enumerate() {
        labels.push(r[0].clone());
        for cell in &r[1..] {
            let v: f64 = cell.parse().map_err(|_| {
                CliError::format(path, format!("row {}: `{cell}` is not a number", line + 1))
            })?;
            values.push(v);
        }
    }
    let values =
        Matrix::from_row_major(rows.len(), cols, values).map_err(|e| CliError::format(path, e))?;
    Ok(LabeledMatrix {
        label_header: label_header.clone(),
        columns: columns.to_vec(),
        labels,
        values,
    })
}

fn parse_kind(s: &str) -> Option<TraitKind> {
    match s.to_ascii_lowercase().as_str() {
        "continuous" => Some(TraitKind::Continuous),
        "ordinal" => Some(TraitKind::Ordinal),
        "binary" => Some(TraitKind::Binary),
        _ => None,
    }
}

pub fn kind_name(k: TraitKind) -> &'static str {
    match k {
        TraitKind::Continuous => "continuous",
        TraitKind::Ordinal => "ordinal",
        TraitKind::Binary => "binary",
    }
}

/// Reads `subject_id,<trait>,...` with empty or `NA` cells as missing.
///
/// Kinds and categories come from an optional `trait,kind,category` file.
/// Traits it does not list are binary when they take exactly two values and
/// continuous otherwise.
pub fn read_traits(path: &Path, kinds: Option<&Path>) -> Result<TraitTable> {
    let (header, rows) = read_table(path)?;
    if header.len() < 2 {
        return Err(CliError::format(
            path,
            "need a subject column and at least one trait",
        ));
    }
    let declared: HashMap<String, (TraitKind, String)> = match kinds {
        None => HashMap::new(),
        Some(kp) => {
            let (kh, krows) = read_table(kp)?;
            if kh.len() < 2 {
                return Err(CliError::format(kp, "expected trait,kind[,category]"));
            }
            let mut map = HashMap::new();
            for r in krows {
                let kind = parse_kind(&r[1]).ok_or_else(|| {
                    CliError::format(kp, format!("unknown trait kind `{}`", r[1]))
                })?;
                map.insert(r[0].clone(), (kind, r.get(2).cloned().unwrap_or_default()));
            }
            map
        }
    };
    let subject_ids: Vec<String> = rows.iter().map(|r| r[0].clone()).collect();
    let mut traits = Vec::with_capacity(header.len() - 1);
    for (c, name) in header.iter().enumerate().skip(1) {
        let values = rows
            .iter()
            .enumerate()
            .map(|(line, r)| {
                let cell = r[c].as_str();
                if cell.is_empty() || cell.eq_ignore_ascii_case("na") {
                    Ok(None)
                } else {
                    cell.parse::<f64>().map(Some).map_err(|_| {
                        CliError::format(
                            path,
                            format!("row {}, trait {name}: `{cell}` is not a number", line + 1),
                        )
                    })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let (kind, category) = declared.get(name).cloned().unwrap_or_else(|| {
            let mut distinct: Vec<f64> = values.iter().flatten().copied().collect();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            let kind = if distinct.len() == 2 {
                TraitKind::Binary
            } else {
                TraitKind::Continuous
            };
            (kind, String::new())
        });
        traits.push(Trait {
            name: name.clone(),
            kind,
            category,
            values,
        });
    }
    TraitTable::new(subject_ids, traits).map_err(|e| CliError::format(path, e))
}

pub fn write_traits(path: &Path, table: &TraitTable) -> Result<()> {
    let header: Vec<String> = std::iter::once("subject_id".to_string())
        .chain(table.traits().iter().map(|t| t.name.clone()))
        .collect();
    let rows: Vec<Vec<String>> = table
        .subject_ids()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            std::iter::once(s.clone())
                .chain(
                    table
                        .traits()
                        .iter()
                        .map(|t| t.values[i].map(fmt).unwrap_or_default()),
                )
                .collect()
        })
        .collect();
    write_table(path, &header, &rows)
}

/// Writes the `trait,kind,category` file that [`read_traits`] accepts.
pub fn write_kinds(path: &Path, table: &TraitTable) -> Result<()> {
    let header: Vec<String> = ["trait", "kind", "category"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<String>> = table
        .traits()
        .iter()
        .map(|t| vec![t.name.clone(), kind_name(t.kind).into(), t.category.clone()])
        .collect();
    write_table(path, &header, &rows)
}

/// Long-form `subject_id,scale_id,available` with one `0`/`1` row per pair.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskFile {
    pub subject_ids: Vec<String>,
    pub scale_ids: Vec<String>,
    /// Row-major by subject.
    pub bits: Vec<bool>,
}

pub fn read_mask(path: &Path) -> Result<MaskFile> {
    let (header, rows) = read_table(path)?;
    if header != ["subject_id", "scale_id", "available"] {
        return Err(CliError::format(
            path,
            "header must be subject_id,scale_id,available",
        ));
    }
    let mut subject_ids: Vec<String> = Vec::new();
    let mut scale_ids: Vec<String> = Vec::new();
    let mut subjects = HashMap::new();
    let mut scales = HashMap::new();
    let mut cells = HashMap::new();
    for (line, r) in rows.iter().enumerate() {
        if r.len() != 3 {
            return Err(CliError::format(
                path,
                format!("row {}: expected 3 fields", line + 1),
            ));
        }
        let bit = match r[2].as_str() {
            "1" => true,
            "0" => false,
            other => {
                return Err(CliError::format(
                    path,
                    format!("row {}: available is 0 or 1, got `{other}`", line + 1),
                ))
            }
        };
        let i = *subjects.entry(r[0].clone()).or_insert_with(|| {
            subject_ids.push(r[0].clone());
            subject_ids.len() - 1
        });
        let j = *scales.entry(r[1].clone()).or_insert_with(|| {
            scale_ids.push(r[1].clone());
            scale_ids.len() - 1
        });
        if cells.insert((i, j), bit).is_some() {
            return Err(CliError::format(
                path,
                format!("row {}: duplicate entry for ({}, {})", line + 1, r[0], r[1]),
            ));
        }
    }
    if subject_ids.is_empty() {
        return Err(CliError::format(path, "mask has no rows"));
    }
    let mut bits = Vec::with_capacity(subject_ids.len() * scale_ids.len());
    for (i, id) in subject_ids.iter().enumerate() {
        for (j, scale) in scale_ids.iter().enumerate() {
            match cells.get(&(i, j)) {
                Some(b) => bits.push(*b),
                None => {
                    return Err(CliError::format(
                        path,
                        format!("no entry for subject {id} at scale {scale}"),
                    ))
                }
            }
        }
    }
    Ok(MaskFile {
        subject_ids,
        scale_ids,
        bits,
    })
}

pub fn write_mask(path: &Path, mask: &MaskFile) -> Result<()> {
    let s = mask.scale_ids.len();
    let header: Vec<String> = ["subject_id", "scale_id", "available"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::with_capacity(mask.bits.len());
    for (i, id) in mask.subject_ids.iter().enumerate() {
        for (j, scale) in mask.scale_ids.iter().enumerate() {
            let bit = if mask.bits[i * s + j] { "1" } else { "0" };
            rows.push(vec![id.clone(), scale.clone(), bit.to_string()]);
        }
    }
    write_table(path, &header, &rows)
}
