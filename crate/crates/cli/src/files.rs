//! Opening inputs and outputs, where `-` means stdin or stdout.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use ksets_core::io::{read_edge_list, read_labels, read_matrix, read_points};
use ksets_core::{CohesionMatrix, DistanceMatrix, Graph, SquareMatrix};

use crate::{CliResult, Failure, MatrixKind};

fn is_std(path: &Path) -> bool {
    path.as_os_str() == "-"
}

fn context(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}

pub fn open_input(path: &Path) -> CliResult<Box<dyn BufRead>> {
    if is_std(path) {
        return Ok(Box::new(BufReader::new(io::stdin().lock())));
    }
    let f = File::open(path).map_err(|e| context(path, e))?;
    Ok(Box::new(BufReader::new(f)))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    let mut s = String::new();
    open_input(path)?
        .read_to_string(&mut s)
        .map_err(|e| context(path, e))?;
    Ok(s)
}

pub fn open_output(path: &Path) -> CliResult<Box<dyn Write>> {
    if is_std(path) {
        return Ok(Box::new(BufWriter::new(io::stdout().lock())));
    }
    let f = File::create(path).map_err(|e| context(path, e))?;
    Ok(Box::new(BufWriter::new(f)))
}

/// Runs `body` against the opened output and flushes it.
pub fn write_to(
    path: &Path,
    body: impl FnOnce(&mut dyn Write) -> ksets_core::Result<()>,
) -> CliResult {
    let mut w = open_output(path)?;
    body(&mut w).map_err(|e| context(path, e))?;
    w.flush().map_err(|e| context(path, e))
}

pub fn load_matrix(path: &Path) -> CliResult<SquareMatrix> {
    read_matrix(open_input(path)?).map_err(|e| context(path, e))
}

pub fn load_distance(path: &Path) -> CliResult<DistanceMatrix> {
    DistanceMatrix::new(load_matrix(path)?).map_err(|e| context(path, e))
}

pub fn load_cohesion(path: &Path, kind: MatrixKind) -> CliResult<CohesionMatrix> {
    Ok(match kind {
        MatrixKind::Distance => ksets_core::cohesion_matrix(&load_distance(path)?),
        MatrixKind::Cohesion => {
            CohesionMatrix::new(load_matrix(path)?).map_err(|e| context(path, e))?
        }
    })
}

pub fn load_points(path: &Path) -> CliResult<(Vec<[f64; 2]>, Vec<usize>)> {
    read_points(open_input(path)?).map_err(|e| context(path, e))
}

pub fn load_graph(path: &Path) -> CliResult<Graph> {
    let el = read_edge_list(open_input(path)?, None).map_err(|e| context(path, e))?;
    if !el.duplicate_lines.is_empty() {
        eprintln!(
            "warning: {}: {} duplicate edge(s) ignored (first at line {})",
            path.display(),
            el.duplicate_lines.len(),
            el.duplicate_lines[0]
        );
    }
    Ok(el.graph)
}

/// Labels from a label file, or the last column of a points CSV.
pub fn load_labels(path: &Path) -> CliResult<Vec<usize>> {
    let text = read_text(path)?;
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'));
    let labels = if first.is_some_and(|l| l.contains(',')) {
        read_points(text.as_bytes()).map(|(_, l)| l)
    } else {
        read_labels(text.as_bytes())
    };
    labels.map_err(|e| context(path, e))
}
