//! Plain-text file formats.
//!
//! * matrices: `n` lines of `n` comma-separated reals, no header;
//! * edge lists: one whitespace-separated `u v` pair per line, 0-based,
//!   `#` starts a comment line (a `# nodes N` comment fixes the node count);
//! * labels: one non-negative integer per line;
//! * points: an `x,y,label` header, then one `x,y,label` row per point.
//!
//! Blank lines are ignored everywhere. Parse errors carry 1-based line numbers.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graphs::Graph;
use crate::matrix::SquareMatrix;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Non-blank lines with their 1-based numbers.
fn lines<R: BufRead>(r: R) -> impl Iterator<Item = Result<(usize, String)>> {
    r.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(l) if l.trim().is_empty() => None,
        Ok(l) => Some(Ok((i + 1, l))),
        Err(e) => Some(Err(e.into())),
    })
}

fn parse_real(line: usize, field: &str) -> Result<f64> {
    let field = field.trim();
    let v: f64 = field
        .parse()
        .map_err(|_| parse_err(line, format!("cannot parse number {field:?}")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("non-finite value {field:?}")));
    }
    Ok(v)
}

fn parse_index(line: usize, field: &str) -> Result<usize> {
    field.trim().parse().map_err(|_| {
        parse_err(
            line,
            format!("expected a non-negative integer, got {field:?}"),
        )
    })
}

pub fn read_matrix<R: BufRead>(r: R) -> Result<SquareMatrix> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut numbers = Vec::new();
    for item in lines(r) {
        let (no, l) = item?;
        let row = l
            .split(',')
            .map(|f| parse_real(no, f))
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(parse_err(
                    no,
                    format!("row has {} entries, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
        numbers.push(no);
    }
    if let Some(first) = rows.first() {
        if first.len() != rows.len() {
            return Err(parse_err(
                numbers[0],
                format!(
                    "{} rows of {} entries is not a square matrix",
                    rows.len(),
                    first.len()
                ),
            ));
        }
    }
    SquareMatrix::from_rows(&rows)
}

pub fn write_matrix<W: Write>(mut w: W, m: &SquareMatrix) -> Result<()> {
    for row in m.rows() {
        let fields: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(w, "{}", fields.join(","))?;
    }
    Ok(())
}

/// Result of reading an edge list.
#[derive(Debug, Clone)]
pub struct EdgeList {
    pub graph: Graph,
    /// Line numbers of edges that repeated an earlier one and were dropped.
    pub duplicate_lines: Vec<usize>,
}

/// Reads an edge list. The node count is the `# nodes N` header if present,
/// else `n` if given, else one more than the largest id.
pub fn read_edge_list<R: BufRead>(r: R, n: Option<usize>) -> Result<EdgeList> {
    let mut declared = None;
    let mut edges = Vec::new();
    for item in lines(r) {
        let (no, l) = item?;
        let t = l.trim();
        if let Some(comment) = t.strip_prefix('#') {
            let mut words = comment.split_whitespace();
            if words.next() == Some("nodes") {
                if let Some(v) = words.next() {
                    declared = Some(parse_index(no, v)?);
                }
            }
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(no, format!("expected \"u v\", got {t:?}")));
        }
        let (a, b) = (parse_index(no, fields[0])?, parse_index(no, fields[1])?);
        if a == b {
            return Err(parse_err(no, format!("self-loop at node {a}")));
        }
        edges.push((no, a, b));
    }
    let max_id = edges
        .iter()
        .map(|&(_, a, b)| a.max(b) + 1)
        .max()
        .unwrap_or(0);
    let n = declared.or(n).unwrap_or(max_id);
    let mut graph = Graph::new(n);
    let mut duplicate_lines = Vec::new();
    for (no, a, b) in edges {
        if a.max(b) >= n {
            return Err(parse_err(
                no,
                format!("node id {} out of range for {n} nodes", a.max(b)),
            ));
        }
        if !graph.add_edge(a, b)? {
            duplicate_lines.push(no);
        }
    }
    Ok(EdgeList {
        graph,
        duplicate_lines,
    })
}

pub fn write_edge_list<W: Write>(mut w: W, g: &Graph) -> Result<()> {
    writeln!(w, "# nodes {}", g.n())?;
    for (a, b) in g.edges() {
        writeln!(w, "{a} {b}")?;
    }
    Ok(())
}

pub fn read_labels<R: BufRead>(r: R) -> Result<Vec<usize>> {
    lines(r)
        .map(|item| {
            let (no, l) = item?;
            parse_index(no, &l)
        })
        .collect()
}

pub fn write_labels<W: Write>(mut w: W, labels: &[usize]) -> Result<()> {
    for l in labels {
        writeln!(w, "{l}")?;
    }
    Ok(())
}

/// Reads `x,y,label` rows; the header line is optional.
pub fn read_points<R: BufRead>(r: R) -> Result<(Vec<[f64; 2]>, Vec<usize>)> {
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (i, item) in lines(r).enumerate() {
        let (no, l) = item?;
        let fields: Vec<&str> = l.split(',').map(str::trim).collect();
        if i == 0 && fields == ["x", "y", "label"] {
            continue;
        }
        if fields.len() != 3 {
            return Err(parse_err(no, format!("expected \"x,y,label\", got {l:?}")));
        }
        points.push([parse_real(no, fields[0])?, parse_real(no, fields[1])?]);
        labels.push(parse_index(no, fields[2])?);
    }
    Ok((points, labels))
}

pub fn write_points<W: Write>(mut w: W, points: &[[f64; 2]], labels: &[usize]) -> Result<()> {
    if points.len() != labels.len() {
        return Err(Error::Input(format!(
            "{} points but {} labels",
            points.len(),
            labels.len()
        )));
    }
    writeln!(w, "x,y,label")?;
    for (p, l) in points.iter().zip(labels) {
        writeln!(w, "{},{},{l}", p[0], p[1])?;
    }
    Ok(())
}
