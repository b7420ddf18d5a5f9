// Copyright 2026 open-rabi Contributors
// SPDX-License-Identifier: Apache-2.0

//! CSV and JSON emission. CSV columns follow each row type's field order;
//! floats are written as `{:.10e}`.

use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::config::Format;
use crate::error::CliError;

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => format!("{:.10e}", n.as_f64().unwrap()),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn flat_object<T: Serialize>(row: &T) -> Result<serde_json::Map<String, Value>, CliError> {
    match serde_json::to_value(row)? {
        Value::Object(map) => Ok(map),
        _ => Err(CliError::Config("row type does not serialise to an object".into())),
    }
}

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
    let mut header: Option<Vec<String>> = None;
    for row in rows {
        let map = flat_object(row)?;
        if header.is_none() {
            let keys: Vec<String> = map.keys().cloned().collect();
            w.write_record(&keys)?;
            header = Some(keys);
        }
        w.write_record(map.values().map(cell))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize, W: Write>(value: &T, mut out: W) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Writes rows as CSV, or as a JSON array (a single object for one row).
pub fn emit<T: Serialize, W: Write>(rows: &[T], format: Format, out: W) -> Result<(), CliError> {
    match format {
        Format::Csv => write_csv(rows, out),
        Format::Json if rows.len() == 1 => write_json(&rows[0], out),
        Format::Json => write_json(&rows, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        name: &'static str,
        n: usize,
        x: f64,
        ok: bool,
        maybe: Option<f64>,
    }

    #[test]
    fn csv_formatting() {
        let rows = [
            Row { name: "a", n: 3, x: 1.0, ok: true, maybe: None },
            Row { name: "b,c", n: 4, x: -2.5e-7, ok: false, maybe: Some(0.1) },
        ];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "name,n,x,ok,maybe\r\n\
             a,3,1.0000000000e0,true,\r\n\
             \"b,c\",4,-2.5000000000e-7,false,1.0000000000e-1\r\n"
        );
    }

    #[test]
    fn json_single_and_many() {
        let one = [Row { name: "a", n: 1, x: 0.5, ok: true, maybe: None }];
        let mut buf = Vec::new();
        emit(&one, Format::Json, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().trim_start().starts_with('{'));
    }
}
