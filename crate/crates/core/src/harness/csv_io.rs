use std::fs::File;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::Dataset;

/// What [`load_csv`] found.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoadSummary {
    pub d: usize,
    pub n: usize,
    pub features_header: bool,
    pub response_header: bool,
    pub response_given: bool,
}

struct Table {
    header: Option<Vec<String>>,
    rows: Vec<Vec<f64>>,
}

fn read_table(path: &Path) -> Result<Table> {
    let name = path.display().to_string();
    let file = File::open(path).map_err(|e| Error::io(&name, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut header = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;
    for (i, record) in reader.records().enumerate() {
        let line = i + 1;
        let record = record.map_err(|e| Error::Parse {
            file: name.clone(),
            row: line,
            column: 0,
            message: e.to_string(),
        })?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if let Some(w) = width {
            if record.len() != w {
                return Err(Error::Parse {
                    file: name.clone(),
                    row: line,
                    column: record.len().min(w) + 1,
                    message: format!("expected {w} fields, found {}", record.len()),
                });
            }
        }
        width = Some(record.len());
        let parsed: Vec<std::result::Result<f64, usize>> = record
            .iter()
            .enumerate()
            .map(|(j, cell)| cell.parse::<f64>().map_err(|_| j + 1))
            .collect();
        if i == 0 && parsed.iter().any(|p| p.is_err()) {
            header = Some(record.iter().map(str::to_string).collect());
            continue;
        }
        let mut row = Vec::with_capacity(parsed.len());
        for (j, p) in parsed.into_iter().enumerate() {
            match p {
                Ok(v) if v.is_finite() => row.push(v),
                Ok(v) => {
                    return Err(Error::Parse {
                        file: name.clone(),
                        row: line,
                        column: j + 1,
                        message: format!("non-finite value {v}"),
                    })
                }
                Err(col) => {
                    return Err(Error::Parse {
                        file: name.clone(),
                        row: line,
                        column: col,
                        message: format!("'{}' is not a number", &record[col - 1]),
                    })
                }
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::data(format!("{name} holds no data rows")));
    }
    Ok(Table { header, rows })
}

/// Reads a features file (one observation per row) and an optional
/// single-column response file. A first row with any non-numeric cell is
/// a header. Without a response file the response is all zeros.
pub fn load_csv(features: &Path, response: Option<&Path>) -> Result<(Dataset, LoadSummary)> {
    let table = read_table(features)?;
    let d = table.rows.len();
    let n = table.rows[0].len();
    let x = DMatrix::from_fn(d, n, |i, j| table.rows[i][j]);
    let (y, response_header) = match response {
        Some(path) => {
            let t = read_table(path)?;
            if t.rows[0].len() != 1 {
                return Err(Error::Parse {
                    file: path.display().to_string(),
                    row: 1,
                    column: 2,
                    message: format!("response file must have 1 column, found {}", t.rows[0].len()),
                });
            }
            if t.rows.len() != d {
                return Err(Error::data(format!(
                    "response has {} rows but the features have {d}",
                    t.rows.len()
                )));
            }
            (DVector::from_iterator(d, t.rows.iter().map(|r| r[0])), t.header.is_some())
        }
        None => (DVector::zeros(d), false),
    };
    let summary = LoadSummary {
        d,
        n,
        features_header: table.header.is_some(),
        response_header,
        response_given: response.is_some(),
    };
    let data = Dataset::with_names(x, y, table.header)?;
    Ok((data, summary))
}

/// Writes a dataset as a features file and, if a path is given, a response file.
///
/// Values use the shortest representation that parses back exactly.
pub fn write_csv(data: &Dataset, features: &Path, response: Option<&Path>) -> Result<()> {
    let name = features.display().to_string();
    let mut w = csv::Writer::from_path(features).map_err(|e| csv_io_error(&name, e))?;
    if let Some(names) = data.column_names() {
        w.write_record(names).map_err(|e| csv_io_error(&name, e))?;
    }
    let x = data.features();
    for i in 0..x.nrows() {
        w.write_record(x.row(i).iter().map(|v| v.to_string()))
            .map_err(|e| csv_io_error(&name, e))?;
    }
    w.flush().map_err(|e| Error::io(&name, e))?;
    if let Some(path) = response {
        let name = path.display().to_string();
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_io_error(&name, e))?;
        for v in data.response().iter() {
            w.write_record([v.to_string()]).map_err(|e| csv_io_error(&name, e))?;
        }
        w.flush().map_err(|e| Error::io(&name, e))?;
    }
    Ok(())
}

fn csv_io_error(path: &str, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e.to_string()))
}
