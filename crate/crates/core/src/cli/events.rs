//! Event record CSV: header `trial,a,b,A1,A2,B1,B2`, integer fields, one
//! `\n`-terminated row per trial, no quoting.

use std::io::{self, Read, Write};

use crate::montecarlo::EventRecord;
use crate::space::Setting;

use super::CliError;

pub const HEADER: [&str; 7] = ["trial", "a", "b", "A1", "A2", "B1", "B2"];

pub fn write_records<'a, W: Write>(out: W, records: impl IntoIterator<Item = &'a EventRecord>) -> io::Result<()> {
    let mut out = io::BufWriter::new(out);
    writeln!(out, "{}", HEADER.join(","))?;
    for r in records {
        let [a1, a2, b1, b2] = r.values;
        writeln!(out, "{},{},{},{a1},{a2},{b1},{b2}", r.trial, r.a, r.b)?;
    }
    out.flush()
}

/// A row that could not be accepted, with its 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    pub line: u64,
    pub message: String,
}

/// Parse and validate every row. All offending rows are collected; a file
/// without data rows is an error.
pub fn read_records<R: Read>(input: R) -> Result<Vec<EventRecord>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(input);

    let header = reader
        .headers()
        .map_err(|e| CliError::Parse(format!("header: {e}")))?
        .clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(CliError::EmptyFile);
    }
    if header.iter().ne(HEADER) {
        return Err(CliError::Parse(format!(
            "line 1: expected header `{}`, found `{}`",
            HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut records = Vec::new();
    let mut errors = Vec::new();
    for row in reader.records() {
        let row = match row {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = row.position().map_or(0, |p| p.line());
        match parse_row(&row) {
            Ok(rec) => match rec.atom() {
                Ok(_) => records.push(rec),
                Err(message) => errors.push(RowError { line, message }),
            },
            Err(message) => errors.push(RowError { line, message }),
        }
    }
    if !errors.is_empty() {
        return Err(CliError::Schema(errors));
    }
    if records.is_empty() {
        return Err(CliError::EmptyFile);
    }
    Ok(records)
}

fn parse_row(row: &csv::StringRecord) -> Result<EventRecord, String> {
    if row.len() != HEADER.len() {
        return Err(format!("expected {} fields, found {}", HEADER.len(), row.len()));
    }
    let int = |k: usize| -> Result<i64, String> {
        row[k]
            .parse::<i64>()
            .map_err(|_| format!("{}: `{}` is not an integer", HEADER[k], &row[k]))
    };
    let trial = u64::try_from(int(0)?).map_err(|_| "trial: must be nonnegative".to_string())?;
    let setting = |k: usize| -> Result<Setting, String> {
        let v = int(k)?;
        Setting::from_number(v).ok_or_else(|| format!("{}: {v} is not a setting (1 or 2)", HEADER[k]))
    };
    let a = setting(1)?;
    let b = setting(2)?;
    let mut values = [0i8; 4];
    for (slot, k) in values.iter_mut().zip(3..7) {
        let v = int(k)?;
        if !(-1..=1).contains(&v) {
            return Err(format!("{}: {v} is not in {{-1, 0, 1}}", HEADER[k]));
        }
        *slot = v as i8;
    }
    Ok(EventRecord { trial, a, b, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_exact_format() {
        let recs = [
            EventRecord {
                trial: 0,
                a: Setting::One,
                b: Setting::Two,
                values: [1, 0, 0, -1],
            },
            EventRecord {
                trial: 1,
                a: Setting::Two,
                b: Setting::One,
                values: [0, -1, 1, 0],
            },
        ];
        let mut buf = Vec::new();
        write_records(&mut buf, &recs).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "trial,a,b,A1,A2,B1,B2\n0,1,2,1,0,0,-1\n1,2,1,0,-1,1,0\n"
        );
        assert_eq!(read_records(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn rule_violation_names_row() {
        let text = "trial,a,b,A1,A2,B1,B2\n0,1,1,1,0,1,0\n1,1,1,1,1,1,0\n";
        match read_records(text.as_bytes()).unwrap_err() {
            CliError::Schema(rows) => {
                assert_eq!(rows.len(), 1);
                assert_eq!(rows[0].line, 3);
                assert!(rows[0].message.contains("A2"));
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn bad_values_and_header() {
        let text = "trial,a,b,A1,A2,B1,B2\n0,3,1,1,0,1,0\n1,1,1,x,0,1,0\n2,1,1,2,0,1,0\n";
        match read_records(text.as_bytes()).unwrap_err() {
            CliError::Schema(rows) => assert_eq!(rows.iter().map(|r| r.line).collect::<Vec<_>>(), [2, 3, 4]),
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(
            read_records("trial,a,b,A1,A2,B1\n".as_bytes()),
            Err(CliError::Parse(_))
        ));
    }

    #[test]
    fn empty_inputs() {
        assert!(matches!(read_records("".as_bytes()), Err(CliError::EmptyFile)));
        assert!(matches!(
            read_records("trial,a,b,A1,A2,B1,B2\n".as_bytes()),
            Err(CliError::EmptyFile)
        ));
    }
}
