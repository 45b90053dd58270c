use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// One line of `results.csv`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub experiment: String,
    pub n: usize,
    pub level: usize,
    pub seed: u64,
    pub quantity: String,
    pub value: f64,
    pub bound: Option<f64>,
    pub slack: Option<f64>,
}

/// A whitespace-delimited data file for gnuplot.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotData {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl PlotData {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        PlotData { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub fn write_csv(path: &Path, rows: &[Row]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    if rows.is_empty() {
        w.write_record(["experiment", "n", "level", "seed", "quantity", "value", "bound", "slack"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `plot` with a `#`-prefixed header line; an empty data set gives a
/// file holding only the header.
pub fn emit_plotdata<W: Write>(mut out: W, plot: &PlotData) -> std::io::Result<()> {
    writeln!(out, "# {}", plot.columns.join(" "))?;
    for row in &plot.rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.12e}")).collect();
        writeln!(out, "{}", cells.join(" "))?;
    }
    Ok(())
}

pub fn write_plot(dir: &Path, plot: &PlotData) -> Result<(), CliError> {
    let file = std::fs::File::create(dir.join(format!("{}.dat", plot.name)))?;
    let mut w = std::io::BufWriter::new(file);
    emit_plotdata(&mut w, plot)?;
    w.flush()?;
    Ok(())
}
