use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use plotters::prelude::*;

use crate::error::{Error, Result};
use crate::runner::config::RunConfig;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as u64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl Cell {
    fn render(&self, out: &mut String) {
        match self {
            Cell::Num(x) => write_f64(out, *x),
            Cell::Int(n) => write!(out, "{n}").unwrap(),
            Cell::Text(s) => out.push_str(s),
            Cell::Empty => {}
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(n) => Some(*n as f64),
            _ => None,
        }
    }
}

/// Shortest decimal that reads back to the same `f64`; exponent form outside
/// `[1e-4, 1e15)`.
pub fn write_f64(out: &mut String, x: f64) {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        write!(out, "{x}").unwrap();
    } else {
        write!(out, "{x:e}").unwrap();
    }
}

/// One CSV artifact: named columns and rows of cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub stem: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(stem: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            stem: stem.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn with_columns(stem: impl Into<String>, columns: Vec<String>) -> Self {
        Self {
            stem: stem.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width in {}", self.stem);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// CSV text: `#` metadata lines, the header row, then the data rows.
    pub fn render(&self, config: &RunConfig) -> String {
        let mut out = String::new();
        writeln!(out, "# cavitylink {}", env!("CARGO_PKG_VERSION")).unwrap();
        writeln!(out, "# scenario: {}", config.scenario).unwrap();
        writeln!(out, "# seed: {}", config.numerics.seed).unwrap();
        out.push_str(
            "# units: rates and Rabi frequencies in units of a reference rate kappa_0 \
             (figure configs use kappa_0 = kappa1); times in units of 1/kappa_0\n",
        );
        out.push_str("# resolved config:\n");
        for line in config.to_toml().lines() {
            if line.is_empty() {
                out.push_str("#\n");
            } else {
                writeln!(out, "#   {line}").unwrap();
            }
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                cell.render(&mut out);
            }
            out.push('\n');
        }
        out
    }

    pub fn write(&self, dir: &Path, config: &RunConfig) -> Result<PathBuf> {
        let path = dir.join(format!("{}.csv", self.stem));
        std::fs::write(&path, self.render(config))?;
        Ok(path)
    }
}

/// A named curve for [`line_plot`].
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Writes a simple SVG line plot of `series`.
pub fn line_plot(
    path: &Path,
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[Series],
) -> Result<()> {
    let finite = series
        .iter()
        .flat_map(|s| s.points.iter())
        .filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x0.is_finite() && y0.is_finite()) {
        return Ok(());
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let pad = 0.05 * (y1 - y0);
    let plot_err = |e: String| Error::Solver(format!("plotting {}: {e}", path.display()));

    let mut svg = String::new();
    {
        let root = SVGBackend::with_string(&mut svg, (800, 560)).into_drawing_area();
        root.fill(&WHITE).map_err(|e| plot_err(e.to_string()))?;
        let mut chart = ChartBuilder::on(&root)
            .caption(title, ("sans-serif", 20))
            .margin(12)
            .x_label_area_size(40)
            .y_label_area_size(70)
            .build_cartesian_2d(x0..x1, (y0 - pad)..(y1 + pad))
            .map_err(|e| plot_err(e.to_string()))?;
        chart
            .configure_mesh()
            .x_desc(x_label)
            .y_desc(y_label)
            .draw()
            .map_err(|e| plot_err(e.to_string()))?;
        for (k, s) in series.iter().enumerate() {
            let color = Palette99::pick(k).to_rgba();
            chart
                .draw_series(LineSeries::new(
                    s.points
                        .iter()
                        .copied()
                        .filter(|(x, y)| x.is_finite() && y.is_finite()),
                    color.stroke_width(2),
                ))
                .map_err(|e| plot_err(e.to_string()))?
                .label(s.label.clone())
                .legend(move |(x, y)| {
                    PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2))
                });
        }
        chart
            .configure_series_labels()
            .background_style(WHITE.mix(0.8))
            .border_style(BLACK)
            .draw()
            .map_err(|e| plot_err(e.to_string()))?;
        root.present().map_err(|e| plot_err(e.to_string()))?;
    }
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [
            0.0,
            1.0,
            -2.5,
            1e-4,
            9.99e-5,
            1.6653345369377348e-16,
            3e20,
            0.1 + 0.2,
            f64::MIN_POSITIVE,
        ] {
            let mut s = String::new();
            write_f64(&mut s, x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        let mut s = String::new();
        write_f64(&mut s, 1e-10);
        assert_eq!(s, "1e-10");
    }
}
