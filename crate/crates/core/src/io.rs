//! Delimited text input and output.
//!
//! Matrices are stored with a header row of column ids and a leading column
//! of row ids; the top-left cell is a free label. Floats are written in the
//! shortest form that parses back to the same bits, so every written matrix
//! round-trips exactly. `-inf` marks undefined scores and `NA` missing ones.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView2};
use serde::Serialize;

use crate::calibration::ScoreGrid;
use crate::cluster::ClusterAssignment;
use crate::distance::DataMatrix;
use crate::{Error, Result};

/// Tab unless the file name ends in `.csv`.
pub fn delimiter_for(path: &Path) -> u8 {
    match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("csv") => b',',
        _ => b'\t',
    }
}

fn parse_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), message: message.into() }
}

/// A labelled real matrix: `(row ids, column ids, values)`.
pub type Labelled = (Vec<String>, Vec<String>, Array2<f64>);

pub fn read_matrix(path: &Path, delimiter: Option<u8>) -> Result<Labelled> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter.unwrap_or_else(|| delimiter_for(path)))
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header = reader.headers().map_err(|e| parse_err(path, e.to_string()))?.clone();
    if header.len() < 2 {
        return Err(parse_err(path, "header needs an id column and at least one attribute"));
    }
    let cols: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| parse_err(path, e.to_string()))?;
        rows.push(record[0].to_owned());
        for (c, field) in record.iter().skip(1).enumerate() {
            let v = field.parse::<f64>().map_err(|_| {
                parse_err(path, format!("line {}: column '{}': cannot parse '{field}'", r + 2, cols[c]))
            })?;
            values.push(v);
        }
    }
    let values = Array2::from_shape_vec((rows.len(), cols.len()), values).expect("row lengths are checked by the reader");
    Ok((rows, cols, values))
}

/// Items in rows, attributes in columns.
pub fn read_data(path: &Path, delimiter: Option<u8>) -> Result<DataMatrix> {
    let (rows, cols, values) = read_matrix(path, delimiter)?;
    DataMatrix::new(values, rows, cols).map_err(|e| parse_err(path, e.to_string()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn finish(path: &Path, w: BufWriter<File>) -> Result<()> {
    w.into_inner().map_err(|e| Error::io(path, e.into_error()))?.sync_all().map_err(|e| Error::io(path, e))
}

/// Writes `values` with ids; `corner` labels the id column.
pub fn write_matrix<T: std::fmt::Display>(
    path: &Path,
    corner: &str,
    row_ids: &[String],
    col_ids: &[String],
    values: ArrayView2<'_, T>,
) -> Result<()> {
    let d = delimiter_for(path) as char;
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    write!(w, "{corner}").map_err(io)?;
    for c in col_ids {
        write!(w, "{d}{c}").map_err(io)?;
    }
    writeln!(w).map_err(io)?;
    for (id, row) in row_ids.iter().zip(values.rows()) {
        write!(w, "{id}").map_err(io)?;
        for v in row {
            write!(w, "{d}{v}").map_err(io)?;
        }
        writeln!(w).map_err(io)?;
    }
    finish(path, w)
}

pub fn write_data(path: &Path, data: &DataMatrix) -> Result<()> {
    write_matrix(path, "item", data.item_ids(), data.attribute_ids(), data.values())
}

/// Two columns: item id and 1-based cluster label.
pub fn write_labels(path: &Path, item_ids: &[String], z: &ClusterAssignment) -> Result<()> {
    let d = delimiter_for(path) as char;
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "item{d}cluster").map_err(io)?;
    for (id, l) in item_ids.iter().zip(z.labels()) {
        writeln!(w, "{id}{d}{l}").map_err(io)?;
    }
    finish(path, w)
}

/// Reads a two-column label file. Labels may be any tokens; they are
/// renumbered by first occurrence.
pub fn read_labels(path: &Path) -> Result<(Vec<String>, ClusterAssignment)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter_for(path))
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut ids = Vec::new();
    let mut tokens: Vec<String> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(path, e.to_string()))?;
        if record.len() != 2 {
            return Err(parse_err(path, format!("expected 2 columns, found {}", record.len())));
        }
        ids.push(record[0].to_owned());
        tokens.push(record[1].to_owned());
    }
    let mut seen = std::collections::HashMap::new();
    let raw: Vec<usize> = tokens
        .iter()
        .map(|t| {
            let next = seen.len();
            *seen.entry(t.as_str()).or_insert(next)
        })
        .collect();
    let z = ClusterAssignment::from_raw(&raw).map_err(|e| parse_err(path, e.to_string()))?;
    Ok((ids, z))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".to_owned(), |x| x.to_string())
}

/// One row per `(lambda, G)` cell with every score and tally.
pub fn write_score_grid(path: &Path, grid: &ScoreGrid) -> Result<()> {
    let d = delimiter_for(path) as char;
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    let header = [
        "lambda", "G", "consensus", "delta", "pac", "area", "silhouette", "x_within", "x_between", "n_within",
        "n_between", "converged",
    ];
    writeln!(w, "{}", header.join(&d.to_string())).map_err(io)?;
    for c in grid.cells() {
        let t = &c.tallies;
        let fields = [
            c.lambda.to_string(),
            c.g.to_string(),
            c.consensus.to_string(),
            opt(c.delta),
            c.pac.to_string(),
            c.area.to_string(),
            opt(c.silhouette),
            t.x_within.to_string(),
            t.x_between.to_string(),
            t.n_within.to_string(),
            t.n_between.to_string(),
            c.converged.to_string(),
        ];
        writeln!(w, "{}", fields.join(&d.to_string())).map_err(io)?;
    }
    finish(path, w)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::io(path, e.into()))?;
    writeln!(w).map_err(|e| Error::io(path, e))?;
    finish(path, w)
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
