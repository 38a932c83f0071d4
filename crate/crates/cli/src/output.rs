//! Output plumbing: line-delimited JSON for record streams, single JSON
//! documents for reports, and CSV with a header row. Every format carries
//! a schema_version field or column.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Destination for data output; diagnostics always go to stderr.
pub struct Sink {
    writer: BufWriter<Box<dyn Write>>,
}

impl Sink {
    pub fn open(path: &Option<PathBuf>) -> io::Result<Sink> {
        let inner: Box<dyn Write> = match path {
            Some(p) => Box::new(File::create(p)?),
            None => Box::new(io::stdout()),
        };
        Ok(Sink {
            writer: BufWriter::new(inner),
        })
    }

    pub fn line(&mut self, s: &str) -> io::Result<()> {
        writeln!(self.writer, "{s}")
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.writer.flush()
    }
}

/// Quote a CSV field if it contains a comma, quote, or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Join a float slice with semicolons, for list-valued CSV fields.
pub fn join_floats(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}
