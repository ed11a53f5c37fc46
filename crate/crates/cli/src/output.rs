use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::{CliResult, Format};

/// A row that can be written as CSV (header + fields) or JSON.
pub trait Record: Serialize {
    const HEADER: &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

/// Shortest decimal that reads back to the same `f64`.
pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn sink(out: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_csv<R: Record>(w: &mut dyn Write, records: &[R]) -> io::Result<()> {
    writeln!(w, "{}", R::HEADER.join(","))?;
    for r in records {
        writeln!(w, "{}", r.fields().join(","))?;
    }
    Ok(())
}

/// All records; JSON output is an array.
pub fn emit<R: Record>(records: &[R], format: Format, out: Option<&Path>) -> CliResult<()> {
    let mut w = sink(out)?;
    match format {
        Format::Csv => write_csv(&mut w, records)?,
        Format::Json => {
            serde_json::to_writer(&mut w, records).map_err(io::Error::from)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// A single record; JSON output is one object.
pub fn emit_one<R: Record>(record: &R, format: Format, out: Option<&Path>) -> CliResult<()> {
    let mut w = sink(out)?;
    match format {
        Format::Csv => write_csv(&mut w, std::slice::from_ref(record))?,
        Format::Json => {
            serde_json::to_writer(&mut w, record).map_err(io::Error::from)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}
