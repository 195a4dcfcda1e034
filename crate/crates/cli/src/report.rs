use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    JsonLines,
}

/// One result row. The CSV columns are exactly these fields, in this order.
#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub instance: String,
    pub n: usize,
    pub m_colors: usize,
    pub k: Option<usize>,
    pub property: String,
    pub value: String,
    pub witness: Option<String>,
    pub runtime_ms: u128,
}

pub struct Emitter {
    format: Format,
    out: Box<dyn Write>,
    header_written: bool,
}

impl Emitter {
    pub fn new(format: Format, path: Option<&Path>) -> io::Result<Self> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(File::create(p)?),
            None => Box::new(io::stdout()),
        };
        Ok(Self { format, out, header_written: false })
    }

    pub fn record(&mut self, r: &Record) -> io::Result<()> {
        match self.format {
            Format::Text => {
                let k = r.k.map(|k| format!(" [k={k}]")).unwrap_or_default();
                match &r.witness {
                    Some(w) => writeln!(self.out, "{}{k}: {}  {w}", r.property, r.value),
                    None => writeln!(self.out, "{}{k}: {}", r.property, r.value),
                }
            }
            Format::JsonLines => {
                serde_json::to_writer(&mut self.out, r)?;
                writeln!(self.out)
            }
            Format::Csv => {
                let mut w = csv::WriterBuilder::new().has_headers(!self.header_written).from_writer(Vec::new());
                w.serialize(r).map_err(io::Error::other)?;
                self.header_written = true;
                let bytes = w.into_inner().map_err(|e| io::Error::other(e.to_string()))?;
                self.out.write_all(&bytes)
            }
        }
    }

    /// Free-form text, emitted only in text format.
    pub fn note(&mut self, line: &str) -> io::Result<()> {
        if self.format == Format::Text {
            writeln!(self.out, "{line}")?;
        }
        Ok(())
    }

    /// Raw document output, regardless of format.
    pub fn raw(&mut self, text: &str) -> io::Result<()> {
        self.out.write_all(text.as_bytes())
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}
