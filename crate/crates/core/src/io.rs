//! Plain-text file formats.
//!
//! - Edge list: first line is the node count `n`, then one `i j` pair per line.
//! - Matrix: CSV without header, one full row per line.
//! - Simplex points: one point per line, coordinates separated by commas or
//!   whitespace.
//!
//! Blank lines and lines starting with `#` are ignored by the readers.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::geometry::SimplexPoint;
use crate::graphs::{Graph, SquareMatrix};
use crate::{Error, Result};

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub fn format_edge_list(g: &Graph) -> String {
    let mut out = format!("{}\n", g.n());
    for (a, b) in g.edges() {
        out.push_str(&format!("{a} {b}\n"));
    }
    out
}

pub fn parse_edge_list(text: &str, origin: &Path) -> Result<Graph> {
    let mut lines = content_lines(text);
    let (line, first) = lines
        .next()
        .ok_or_else(|| Error::parse(origin, 1, "empty edge list"))?;
    let n: usize = first
        .parse()
        .map_err(|_| Error::parse(origin, line, format!("expected node count, got {first:?}")))?;
    let mut g = Graph::new(n);
    for (line, l) in lines {
        let fields: Vec<&str> = l.split_whitespace().collect();
        let [a, b] = fields[..] else {
            return Err(Error::parse(origin, line, "expected two node indices"));
        };
        let parse = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::parse(origin, line, format!("bad node index {s:?}")))
        };
        g.add_edge(parse(a)?, parse(b)?)
            .map_err(|e| Error::parse(origin, line, e.to_string()))?;
    }
    Ok(g)
}

pub fn write_edge_list(g: &Graph, path: &Path) -> Result<()> {
    fs::write(path, format_edge_list(g)).map_err(|e| Error::io(path, e))
}

pub fn read_edge_list(path: &Path) -> Result<Graph> {
    parse_edge_list(&read_to_string(path)?, path)
}

/// Writes one row per line using the shortest round-trip float representation.
pub fn write_matrix_rows<'a, W: Write>(
    out: W,
    rows: impl IntoIterator<Item = &'a [f64]>,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for row in rows {
        w.write_record(row.iter().map(|x| x.to_string()))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_matrix_csv(m: &SquareMatrix, path: &Path) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_matrix_rows(file, m.rows())
}

/// Reads CSV rows of floats; rows may have any length.
pub fn parse_rows(text: &str, origin: &Path) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (line, l) in content_lines(text) {
        let row = l
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::parse(origin, line, format!("bad number {s:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn read_matrix_csv(path: &Path) -> Result<SquareMatrix> {
    SquareMatrix::from_rows(parse_rows(&read_to_string(path)?, path)?)
}

pub fn read_simplex_points(path: &Path) -> Result<Vec<SimplexPoint>> {
    parse_rows(&read_to_string(path)?, path)?
        .into_iter()
        .map(SimplexPoint::new)
        .collect()
}
