//! Metrics CSV rendering and parsing.
//!
//! One header line, then one newline-terminated row per epoch with floats at
//! 6 decimal places and `.` as the decimal separator. Parsing is strict and
//! validates the row invariants, so a rendered file round-trips into the
//! exact rows it came from at that precision.

use crate::error::{Error, Result};
use crate::train::MetricsRow;

pub const CSV_HEADER: &str = "epoch,train_loss,train_acc,test_loss,test_acc";

/// One newline-terminated CSV data row.
pub fn csv_row(row: &MetricsRow) -> String {
    format!(
        "{},{:.6},{:.6},{:.6},{:.6}\n",
        row.epoch, row.train_loss, row.train_acc, row.test_loss, row.test_acc
    )
}

/// Full CSV document: header plus every row.
pub fn render_csv(rows: &[MetricsRow]) -> String {
    let mut out = String::with_capacity((rows.len() + 1) * 48);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&csv_row(row));
    }
    out
}

fn parse_field<T: std::str::FromStr>(field: &str, name: &str, line: usize) -> Result<T> {
    field.parse().map_err(|_| Error::Csv {
        line,
        detail: format!("bad {name} value {field:?}"),
    })
}

fn parse_accuracy(field: &str, name: &str, line: usize) -> Result<f64> {
    let value: f64 = parse_field(field, name, line)?;
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::Csv {
            line,
            detail: format!("{name} {value} outside [0, 1]"),
        });
    }
    Ok(value)
}

/// Parse a document produced by [`render_csv`], enforcing the header, the
/// field layout, finite losses, accuracies in `[0, 1]`, and strictly
/// increasing epochs.
pub fn parse_csv(text: &str) -> Result<Vec<MetricsRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(first) if first == CSV_HEADER => {}
        Some(first) => {
            return Err(Error::Csv {
                line: 1,
                detail: format!("expected header {CSV_HEADER:?}, found {first:?}"),
            })
        }
        None => {
            return Err(Error::Csv {
                line: 1,
                detail: "empty document".into(),
            })
        }
    }
    let mut rows: Vec<MetricsRow> = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(Error::Csv {
                line: lineno,
                detail: format!("expected 5 fields, found {}", fields.len()),
            });
        }
        let row = MetricsRow {
            epoch: parse_field(fields[0], "epoch", lineno)?,
            train_loss: parse_field(fields[1], "train_loss", lineno)?,
            train_acc: parse_accuracy(fields[2], "train_acc", lineno)?,
            test_loss: parse_field(fields[3], "test_loss", lineno)?,
            test_acc: parse_accuracy(fields[4], "test_acc", lineno)?,
        };
        if !(row.train_loss.is_finite() && row.test_loss.is_finite()) {
            return Err(Error::Csv {
                line: lineno,
                detail: "non-finite loss".into(),
            });
        }
        if let Some(prev) = rows.last() {
            if row.epoch <= prev.epoch {
                return Err(Error::Csv {
                    line: lineno,
                    detail: format!(
                        "epoch {} does not increase past {}",
                        row.epoch, prev.epoch
                    ),
                });
            }
        }
        rows.push(row);
    }
    Ok(rows)
}
