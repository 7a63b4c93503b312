//! Text formats for graphs, matrices and data tables, and number formatting for CSV output.
//!
//! Graphs use 1-based vertex labels on disk and 0-based labels in memory. The file
//! form is a line `n m` followed by `m` lines `μ ν` with `1 ≤ μ < ν ≤ n`; the inline
//! form is `n:4;edges:1-2,2-3,3-4,4-1`.

use std::path::Path;

use gwishart_core::{Graph, SymmetricMatrix};

use crate::{parse_error, Error, Result};

/// Largest accepted asymmetry of a matrix file, relative to its largest entry.
pub const MATRIX_SYMMETRY_TOLERANCE: f64 = 1e-9;

/// Parses either graph format.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let trimmed = text.trim();
    if trimmed.starts_with("n:") {
        parse_inline_graph(trimmed)
    } else {
        parse_graph_file(text)
    }
}

/// Treats `arg` as a path if such a file exists, otherwise as an inline graph.
pub fn load_graph(arg: &str) -> Result<Graph> {
    if Path::new(arg).is_file() {
        parse_graph(&std::fs::read_to_string(arg)?)
    } else {
        parse_graph(arg)
    }
}

fn parse_inline_graph(text: &str) -> Result<Graph> {
    let (n_part, edge_part) =
        text.split_once(';').ok_or_else(|| parse_error(1, "inline graph must look like n:4;edges:1-2,2-3"))?;
    let n = parse_count(n_part.trim().strip_prefix("n:").unwrap_or(""), 1)?;
    let list = edge_part.trim().strip_prefix("edges:").ok_or_else(|| parse_error(1, "missing 'edges:' section"))?;
    let mut edges = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (a, b) = item.split_once('-').ok_or_else(|| parse_error(1, format!("bad edge '{item}'")))?;
        edges.push(vertex_pair(parse_count(a.trim(), 1)?, parse_count(b.trim(), 1)?, n, 1, false)?);
    }
    Ok(Graph::new(n, edges)?)
}

fn parse_graph_file(text: &str) -> Result<Graph> {
    let mut lines =
        text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (line, header) = lines.next().ok_or_else(|| parse_error(1, "empty graph file"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(parse_error(line, "header must be 'n m'"));
    }
    let n = parse_count(fields[0], line)?;
    let m = parse_count(fields[1], line)?;
    let mut edges = Vec::with_capacity(m);
    for (line, l) in lines {
        let fields: Vec<&str> = l.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_error(line, "edge lines must be 'μ ν'"));
        }
        let (a, b) = (parse_count(fields[0], line)?, parse_count(fields[1], line)?);
        edges.push(vertex_pair(a, b, n, line, true)?);
    }
    if edges.len() != m {
        return Err(parse_error(line, format!("header announces {m} edges, found {}", edges.len())));
    }
    Ok(Graph::new(n, edges)?)
}

fn parse_count(s: &str, line: usize) -> Result<usize> {
    s.parse().map_err(|_| parse_error(line, format!("expected a non-negative integer, got '{s}'")))
}

/// Converts a 1-based pair to 0-based, checking range and (optionally) `a < b`.
fn vertex_pair(a: usize, b: usize, n: usize, line: usize, ordered: bool) -> Result<(usize, usize)> {
    if a == 0 || b == 0 || a > n || b > n {
        return Err(parse_error(line, format!("vertex out of range 1..={n}")));
    }
    if a == b || (ordered && a > b) {
        return Err(parse_error(line, "edge endpoints must satisfy μ < ν"));
    }
    Ok((a - 1, b - 1))
}

/// File form of a graph, 1-based.
pub fn format_graph(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edge_count());
    for &(u, v) in g.edges() {
        out.push_str(&format!("{} {}\n", u + 1, v + 1));
    }
    out
}

/// Inline form of a graph, 1-based.
pub fn format_graph_inline(g: &Graph) -> String {
    format!("n:{};edges:{}", g.n(), format_edges(g, ","))
}

/// Edges as `1-2<sep>2-3...`, 1-based.
pub fn format_edges(g: &Graph, sep: &str) -> String {
    g.edges().iter().map(|&(u, v)| format!("{}-{}", u + 1, v + 1)).collect::<Vec<_>>().join(sep)
}

/// Parses an edge written `μ-ν` (1-based) into a 0-based pair.
pub fn parse_edge(s: &str, n: usize) -> Result<(usize, usize)> {
    let (a, b) = s.split_once('-').ok_or_else(|| parse_error(1, format!("bad edge '{s}'")))?;
    vertex_pair(parse_count(a.trim(), 1)?, parse_count(b.trim(), 1)?, n, 1, false)
}

/// Square numeric CSV without a header. Asymmetry up to [`MATRIX_SYMMETRY_TOLERANCE`]
/// relative to the largest entry is averaged away; anything larger is an error.
pub fn parse_matrix_csv(text: &str) -> Result<SymmetricMatrix> {
    let rows = read_numeric_records(text, false)?;
    let n = rows.len();
    if n == 0 {
        return Err(parse_error(1, "empty matrix"));
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.into_iter().enumerate() {
        if row.len() != n {
            return Err(parse_error(i + 1, format!("expected {n} columns, found {}", row.len())));
        }
        data.extend(row);
    }
    let scale = data.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    Ok(SymmetricMatrix::from_row_major_tol(n, data, MATRIX_SYMMETRY_TOLERANCE * scale)?)
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<SymmetricMatrix> {
    parse_matrix_csv(&std::fs::read_to_string(path)?)
}

pub fn format_matrix_csv(m: &SymmetricMatrix, full_precision: bool) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for i in 0..m.dim() {
        w.write_record(m.row(i).iter().map(|&x| format_number(x, full_precision)))?;
    }
    into_string(w)
}

/// Numeric table with a header line.
#[derive(Debug, Clone, PartialEq)]
pub struct DataTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn parse_data_csv(text: &str) -> Result<DataTable> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let columns: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    let rows = numeric_rows(reader.records(), 2)?;
    if rows.is_empty() {
        return Err(Error::Core(gwishart_core::Error::Empty));
    }
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != columns.len()) {
        return Err(parse_error(i + 2, format!("expected {} columns, found {}", columns.len(), row.len())));
    }
    Ok(DataTable { columns, rows })
}

fn read_numeric_records(text: &str, headers: bool) -> Result<Vec<Vec<f64>>> {
    let mut reader =
        csv::ReaderBuilder::new().has_headers(headers).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    numeric_rows(reader.records(), if headers { 2 } else { 1 })
}

fn numeric_rows(
    records: impl Iterator<Item = csv::Result<csv::StringRecord>>,
    first_line: usize,
) -> Result<Vec<Vec<f64>>> {
    let mut rows = Vec::new();
    for (i, record) in records.enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = record
            .iter()
            .map(|f| f.parse::<f64>().ok().filter(|x| x.is_finite()))
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| parse_error(first_line + i, "non-numeric field"))?;
        rows.push(row);
    }
    Ok(rows)
}

/// Six significant digits, or the shortest round-trip form with `full_precision`.
pub fn format_number(x: f64, full_precision: bool) -> String {
    if full_precision || x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-4..15).contains(&magnitude) {
        let decimals = (5 - magnitude).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}

pub(crate) fn into_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is built from UTF-8 strings"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_formats_round_trip() {
        let g = parse_graph("n:4;edges:1-2,2-3,3-4,4-1").unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 3), (1, 2), (2, 3)]);
        assert_eq!(parse_graph(&format_graph(&g)).unwrap(), g);
        assert_eq!(parse_graph(&format_graph_inline(&g)).unwrap(), g);
        let file = "# a path\n3 2\n1 2\n\n2 3\n";
        assert_eq!(parse_graph(file).unwrap(), Graph::path(3));
        assert_eq!(parse_graph("n:3;edges:").unwrap(), Graph::empty(3));
    }

    #[test]
    fn graph_format_errors() {
        assert!(parse_graph("3 1\n2 1\n").is_err());
        assert!(parse_graph("3 2\n1 2\n").is_err());
        assert!(parse_graph("3 1\n1 4\n").is_err());
        assert!(parse_graph("n:3;edges:1-1").is_err());
        assert!(parse_graph("n:x;edges:1-2").is_err());
        assert!(parse_edge("2-5", 4).is_err());
        assert_eq!(parse_edge("3-1", 4).unwrap(), (2, 0));
    }

    #[test]
    fn matrix_csv_symmetrises_within_tolerance() {
        let m = parse_matrix_csv("2, 1\n1.0000000001, 3\n").unwrap();
        assert_eq!(m.get(0, 1), m.get(1, 0));
        assert!(parse_matrix_csv("2,1\n1.1,3\n").is_err());
        assert!(parse_matrix_csv("1,2,3\n4,5,6\n").is_err());
        assert!(parse_matrix_csv("1,a\na,1\n").is_err());
        let out = format_matrix_csv(&SymmetricMatrix::identity(2), false).unwrap();
        assert_eq!(out, "1.00000,0\n0,1.00000\n");
        assert_eq!(parse_matrix_csv(&out).unwrap(), SymmetricMatrix::identity(2));
    }

    #[test]
    fn data_csv_needs_a_header_and_rectangular_rows() {
        let t = parse_data_csv("a,b\n1,2\n3,4\n").unwrap();
        assert_eq!(t.columns, ["a", "b"]);
        assert_eq!(t.rows, [[1.0, 2.0], [3.0, 4.0]]);
        assert!(parse_data_csv("a,b\n").is_err());
        assert!(parse_data_csv("a,b\n1,x\n").is_err());
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(format_number(83.685083, false), "83.6851");
        assert_eq!(format_number(112.76640, false), "112.766");
        assert_eq!(format_number(0.405284735, false), "0.405285");
        assert_eq!(format_number(-0.0053217, false), "-0.00532170");
        assert_eq!(format_number(1.5e-7, false), "1.50000e-7");
        assert_eq!(format_number(0.1 + 0.2, true), "0.30000000000000004");
    }
}
