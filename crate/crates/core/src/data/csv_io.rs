use std::collections::HashMap;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::CategoricalDataset;
use crate::error::{DtfError, Result};

/// How the raw cells of one column map to category codes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnEncoding {
    /// Cells are already nonnegative integer codes.
    Integer,
    /// `labels[code]` is the raw string of that code, in order of first appearance.
    Labels(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingMap {
    pub column_names: Option<Vec<String>>,
    pub columns: Vec<ColumnEncoding>,
}

impl EncodingMap {
    pub fn integer(d: usize) -> Self {
        Self {
            column_names: None,
            columns: vec![ColumnEncoding::Integer; d],
        }
    }

    fn encode(&self, j: usize, cell: &str, row: usize) -> Result<usize> {
        match &self.columns[j] {
            ColumnEncoding::Integer => cell.parse::<usize>().map_err(|_| {
                DtfError::Csv(format!("row {row}, column {j}: `{cell}` is not a category code"))
            }),
            ColumnEncoding::Labels(labels) => labels.iter().position(|l| l == cell).ok_or_else(|| {
                DtfError::Csv(format!("row {row}, column {j}: unseen label `{cell}`"))
            }),
        }
    }

    fn decode(&self, j: usize, code: usize) -> String {
        match &self.columns[j] {
            ColumnEncoding::Integer => code.to_string(),
            ColumnEncoding::Labels(labels) => labels[code].clone(),
        }
    }
}

/// Optional overrides when reading a CSV. Also the content of the sidecar
/// file `<data>.csv.schema.json` that `gen` writes next to its outputs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cardinalities: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub has_header: Option<bool>,
}

pub fn schema_path(csv_path: &Path) -> PathBuf {
    let mut s = csv_path.as_os_str().to_owned();
    s.push(".schema.json");
    PathBuf::from(s)
}

/// Reads the sidecar schema of `csv_path` if there is one.
pub fn read_schema(csv_path: &Path) -> Result<Option<Schema>> {
    let path = schema_path(csv_path);
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path)?;
    serde_json::from_str(&text)
        .map(Some)
        .map_err(|e| DtfError::Csv(format!("{}: {e}", path.display())))
}

pub fn write_schema(csv_path: &Path, schema: &Schema) -> Result<()> {
    let text = serde_json::to_string_pretty(schema).expect("schema serializes");
    std::fs::write(schema_path(csv_path), text + "\n")?;
    Ok(())
}

fn read_cells(path: &Path) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| DtfError::Csv(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| DtfError::Csv(format!("{}: {e}", path.display())))?;
        rows.push(record.iter().map(str::to_owned).collect::<Vec<_>>());
    }
    if rows.is_empty() {
        return Err(DtfError::Csv(format!("{}: file is empty", path.display())));
    }
    Ok(rows)
}

/// A first row is a header when there are at least two rows and every cell
/// of it is non-numeric and appears nowhere else in its column.
fn looks_like_header(rows: &[Vec<String>]) -> bool {
    if rows.len() < 2 {
        return false;
    }
    rows[0].iter().enumerate().all(|(j, cell)| {
        cell.parse::<usize>().is_err() && rows[1..].iter().all(|r| r.get(j) != Some(cell))
    })
}

fn split_header(
    mut rows: Vec<Vec<String>>,
    has_header: Option<bool>,
) -> (Option<Vec<String>>, Vec<Vec<String>>) {
    let header = has_header.unwrap_or_else(|| looks_like_header(&rows));
    if header {
        let names = rows.remove(0);
        (Some(names), rows)
    } else {
        (None, rows)
    }
}

/// Loads a CSV of categories. Columns whose cells all parse as nonnegative
/// integers are taken as codes with `k = max + 1`; other columns are encoded
/// by order of first appearance. The schema may fix the header choice and
/// the cardinalities.
pub fn load_csv(path: &Path, schema: Option<&Schema>) -> Result<(CategoricalDataset, EncodingMap)> {
    let schema = schema.cloned().unwrap_or_default();
    let (names, rows) = split_header(read_cells(path)?, schema.has_header);
    let d = names
        .as_ref()
        .map(Vec::len)
        .or_else(|| rows.first().map(Vec::len))
        .unwrap_or(0);
    if d == 0 {
        return Err(DtfError::Csv(format!("{}: no columns", path.display())));
    }
    let mut columns = Vec::with_capacity(d);
    let mut inferred = Vec::with_capacity(d);
    for j in 0..d {
        let ints: Option<Vec<usize>> = rows.iter().map(|r| r[j].parse::<usize>().ok()).collect();
        match ints {
            Some(codes) => {
                inferred.push(codes.iter().max().map_or(1, |m| m + 1));
                columns.push(ColumnEncoding::Integer);
            }
            None => {
                let mut labels: Vec<String> = Vec::new();
                let mut seen: HashMap<&str, ()> = HashMap::new();
                for r in &rows {
                    if seen.insert(r[j].as_str(), ()).is_none() {
                        labels.push(r[j].clone());
                    }
                }
                inferred.push(labels.len().max(1));
                columns.push(ColumnEncoding::Labels(labels));
            }
        }
    }
    let cardinalities = match schema.cardinalities {
        Some(k) if k.len() != d => {
            return Err(DtfError::DimensionMismatch {
                expected: k.len(),
                got: d,
            })
        }
        Some(k) => k,
        None => inferred,
    };
    let encoding = EncodingMap {
        column_names: names,
        columns,
    };
    let data = encode_rows(&rows, &encoding, cardinalities)?;
    Ok((data, encoding))
}

/// Loads a CSV with an existing encoding, as used when evaluating a model on
/// new data. Unseen labels and out-of-range codes are errors.
pub fn load_csv_with_encoding(
    path: &Path,
    encoding: &EncodingMap,
    cardinalities: &[usize],
    has_header: Option<bool>,
) -> Result<CategoricalDataset> {
    let cells = read_cells(path)?;
    let has_header = has_header.or_else(|| {
        encoding
            .column_names
            .as_ref()
            .map(|names| *names == cells[0])
            .filter(|&same| same)
    });
    let (_, rows) = split_header(cells, has_header);
    if encoding.columns.len() != cardinalities.len() {
        return Err(DtfError::DimensionMismatch {
            expected: cardinalities.len(),
            got: encoding.columns.len(),
        });
    }
    encode_rows(&rows, encoding, cardinalities.to_vec())
}

fn encode_rows(
    rows: &[Vec<String>],
    encoding: &EncodingMap,
    cardinalities: Vec<usize>,
) -> Result<CategoricalDataset> {
    let d = encoding.columns.len();
    let mut values = Vec::with_capacity(rows.len() * d);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != d {
            return Err(DtfError::Csv(format!(
                "row {i} has {} cells, expected {d}",
                r.len()
            )));
        }
        for (j, cell) in r.iter().enumerate() {
            values.push(encoding.encode(j, cell, i)?);
        }
    }
    let data = CategoricalDataset::from_flat(values, cardinalities)?;
    match &encoding.column_names {
        Some(names) => data.with_column_names(names.clone()),
        None => Ok(data),
    }
}

/// Writes a header (the dataset's column names, or `x0, x1, …`) and one line
/// per row, decoding labels when an encoding is given.
pub fn write_csv(path: &Path, data: &CategoricalDataset, encoding: Option<&EncodingMap>) -> Result<()> {
    let d = data.n_features();
    let fallback = EncodingMap::integer(d);
    let encoding = encoding.unwrap_or(&fallback);
    let names: Vec<String> = data
        .column_names()
        .map(<[String]>::to_vec)
        .or_else(|| encoding.column_names.clone())
        .unwrap_or_else(|| (0..d).map(|j| format!("x{j}")).collect());
    let file = File::create(path)?;
    let mut writer = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let csv_err = |e: csv::Error| DtfError::Csv(e.to_string());
    writer.write_record(&names).map_err(csv_err)?;
    for row in data.rows() {
        let cells: Vec<String> = row.iter().enumerate().map(|(j, &a)| encoding.decode(j, a)).collect();
        writer.write_record(&cells).map_err(csv_err)?;
    }
    let mut inner = writer
        .into_inner()
        .map_err(|e| DtfError::Csv(e.to_string()))?;
    inner.flush()?;
    Ok(())
}
