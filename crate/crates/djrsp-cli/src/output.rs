//! Deterministic record serialization: fixed column order, reals at 12
//! significant digits, byte-identical output for identical inputs.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use crate::Format;

/// Formats a real with 12 significant digits in scientific notation.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.11e}")
}

/// A serializable field value.
pub enum Field {
    Real(f64),
    Bool(bool),
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Real(x) => fmt_real(*x),
            Field::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> String {
        // fmt_real output is a valid JSON number.
        self.csv()
    }
}

/// A table of records with a fixed header, writable as CSV or JSON.
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn write(&self, format: Format, out: Option<PathBuf>) -> io::Result<()> {
        match out {
            Some(path) => {
                let mut writer = BufWriter::new(File::create(path)?);
                self.emit(format, &mut writer)?;
                writer.flush()
            }
            None => {
                let stdout = io::stdout();
                let mut writer = stdout.lock();
                self.emit(format, &mut writer)
            }
        }
    }

    fn emit<W: Write>(&self, format: Format, writer: &mut W) -> io::Result<()> {
        match format {
            Format::Csv => {
                writeln!(writer, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Field::csv).collect();
                    writeln!(writer, "{}", cells.join(","))?;
                }
            }
            Format::Json => {
                writeln!(writer, "[")?;
                for (i, row) in self.rows.iter().enumerate() {
                    let fields: Vec<String> = self
                        .columns
                        .iter()
                        .zip(row.iter())
                        .map(|(name, value)| format!("\"{}\":{}", name, value.json()))
                        .collect();
                    let comma = if i + 1 < self.rows.len() { "," } else { "" };
                    writeln!(writer, "  {{{}}}{}", fields.join(","), comma)?;
                }
                writeln!(writer, "]")?;
            }
        }
        Ok(())
    }
}
