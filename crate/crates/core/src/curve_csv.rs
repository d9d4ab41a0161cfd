//! Risk curves as CSV.
//!
//! Canonical files have a `train_size` column followed by `<EST>_M` and
//! `<EST>_S` pairs (mean and standard deviation over seeds), optionally with
//! `<EST>_MC` Monte-Carlo columns. Any table whose first column holds
//! training-set sizes can be read as a [`CurveTable`] for fitting and plotting.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sweep::{RiskCurve, Series};

pub const SIZE_COLUMN: &str = "train_size";

/// A numeric table keyed by its first column.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveTable {
    pub x_name: String,
    pub x: Vec<f64>,
    pub columns: Vec<String>,
    /// One vector per entry of `columns`.
    pub data: Vec<Vec<f64>>,
}

impl CurveTable {
    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.columns
            .iter()
            .position(|c| c == name)
            .map(|i| self.data[i].as_slice())
            .ok_or_else(|| Error::MissingColumn {
                name: name.to_string(),
                available: self.columns.clone(),
            })
    }

    /// `(x, value)` pairs of one column.
    pub fn points(&self, name: &str) -> Result<Vec<(f64, f64)>> {
        let col = self.column(name)?;
        Ok(self.x.iter().copied().zip(col.iter().copied()).collect())
    }
}

fn parse_number(field: &str, line: u64, column: &str) -> Result<f64> {
    let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("column `{column}`: `{}` is not a number", field.trim()),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("column `{column}`: value is not finite"),
        });
    }
    Ok(v)
}

/// Parses any header-plus-numbers table with at least two columns.
pub fn parse_table(text: &str) -> Result<CurveTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    if headers.len() < 2 || headers.iter().any(str::is_empty) {
        return Err(Error::Parse {
            line: 1,
            message: "header needs a size column and at least one named value column".into(),
        });
    }
    let names: Vec<String> = headers.iter().map(str::to_string).collect();
    for (i, name) in names.iter().enumerate() {
        if names[..i].contains(name) {
            return Err(Error::Parse {
                line: 1,
                message: format!("duplicate column `{name}`"),
            });
        }
    }

    let mut x = Vec::new();
    let mut data = vec![Vec::new(); names.len() - 1];
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != names.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", names.len(), record.len()),
            });
        }
        x.push(parse_number(&record[0], line, &names[0])?);
        for (j, field) in record.iter().skip(1).enumerate() {
            data[j].push(parse_number(field, line, &names[j + 1])?);
        }
    }
    if x.is_empty() {
        return Err(Error::Parse {
            line: 2,
            message: "no data rows".into(),
        });
    }
    Ok(CurveTable {
        x_name: names[0].clone(),
        x,
        columns: names[1..].to_vec(),
        data,
    })
}

pub fn read_table(path: &Path) -> Result<CurveTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_table(&text)
}

/// Interprets a parsed table as a canonical risk curve.
pub fn curve_from_table(table: &CurveTable) -> Result<RiskCurve> {
    let header_error = |message: String| Error::Parse { line: 1, message };
    if table.x_name != SIZE_COLUMN {
        return Err(header_error(format!(
            "first column must be `{SIZE_COLUMN}`, found `{}`",
            table.x_name
        )));
    }
    let mut train_sizes = Vec::with_capacity(table.x.len());
    for (row, &v) in table.x.iter().enumerate() {
        if v < 1.0 || v.fract() != 0.0 {
            return Err(Error::Parse {
                line: row as u64 + 2,
                message: format!("`{SIZE_COLUMN}` must be a positive integer, found {v}"),
            });
        }
        train_sizes.push(v as usize);
    }

    let mut series = Vec::new();
    for name in &table.columns {
        let (label, suffix) = name
            .rsplit_once('_')
            .ok_or_else(|| header_error(format!("column `{name}` lacks an _M, _S or _MC suffix")))?;
        match suffix {
            "M" => {
                let std_name = format!("{label}_S");
                let std = table
                    .column(&std_name)
                    .map_err(|_| header_error(format!("missing column `{std_name}`")))?;
                let mc_name = format!("{label}_MC");
                series.push(Series {
                    label: label.to_string(),
                    mean: table.column(name)?.to_vec(),
                    std: std.to_vec(),
                    monte_carlo: table.column(&mc_name).ok().map(<[f64]>::to_vec),
                });
            }
            "S" | "MC" => {
                let mean_name = format!("{label}_M");
                if !table.columns.contains(&mean_name) {
                    return Err(header_error(format!("missing column `{mean_name}`")));
                }
            }
            _ => return Err(header_error(format!("column `{name}` lacks an _M, _S or _MC suffix"))),
        }
    }
    Ok(RiskCurve {
        train_sizes,
        series,
        config: None,
    })
}

pub fn parse_curve(text: &str) -> Result<RiskCurve> {
    curve_from_table(&parse_table(text)?)
}

pub fn read_curve_csv(path: &Path) -> Result<RiskCurve> {
    curve_from_table(&read_table(path)?)
}

/// Canonical text: LF line endings, values in `{:.16e}`, which round-trips
/// every `f64` exactly.
pub fn format_curve(curve: &RiskCurve) -> String {
    let mut out = String::from(SIZE_COLUMN);
    for s in &curve.series {
        write!(out, ",{0}_M,{0}_S", s.label).unwrap();
        if s.monte_carlo.is_some() {
            write!(out, ",{}_MC", s.label).unwrap();
        }
    }
    out.push('\n');
    for (row, n) in curve.train_sizes.iter().enumerate() {
        write!(out, "{n}").unwrap();
        for s in &curve.series {
            write!(out, ",{:.16e},{:.16e}", s.mean[row], s.std[row]).unwrap();
            if let Some(mc) = &s.monte_carlo {
                write!(out, ",{:.16e}", mc[row]).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_curve_csv(curve: &RiskCurve, path: &Path) -> Result<()> {
    fs::write(path, format_curve(curve)).map_err(|e| Error::io(path, e))
}
