//! Text ingestion and export.
//!
//! Ingestion accepts header-less CSV (one sample per line, decimal-point
//! floats) and whitespace-separated edge lists ("i j w" with 1-based node
//! indices). Exports print every float with `{:e}`, Rust's shortest
//! round-tripping scientific notation, so identical values always produce
//! identical bytes and files can be compared directly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::eigen::Spectrum;
use crate::embed::{Embedding, Expansion, LppModel};
use crate::error::{Error, Result};
use crate::graph::{from_edge_list, DataSet, SimilarityGraph};

fn split_fields(line: &str) -> Vec<&str> {
    if line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

fn parse_float(token: &str, line_no: usize) -> Result<f64> {
    token.parse::<f64>().map_err(|_| {
        Error::Parse(format!(
            "line {line_no}: cannot parse '{token}' as a number"
        ))
    })
}

fn parse_index(token: &str, line_no: usize) -> Result<usize> {
    token.parse::<usize>().map_err(|_| {
        Error::Parse(format!(
            "line {line_no}: cannot parse '{token}' as an index"
        ))
    })
}

/// Parses a header-less CSV of samples: one row per sample, d float fields
/// each, separated by commas (or plain whitespace). Blank lines are
/// skipped; ragged rows are rejected with their 1-based line number.
pub fn parse_dataset_csv(text: &str) -> Result<DataSet> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields = split_fields(line);
        let mut row = Vec::with_capacity(fields.len());
        for f in &fields {
            row.push(parse_float(f, idx + 1)?);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} fields, found {}",
                    idx + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("no data rows found".into()));
    }
    let n = rows.len();
    let d = rows[0].len();
    let mut pts = Array2::zeros((n, d));
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            pts[[i, j]] = v;
        }
    }
    DataSet::new(pts)
}

/// [`parse_dataset_csv`] on a file's contents.
pub fn read_dataset_csv(path: impl AsRef<Path>) -> Result<DataSet> {
    parse_dataset_csv(&fs::read_to_string(path)?)
}

/// Parses an edge list: one "i j w" triple per line, whitespace-separated,
/// node indices 1-based. With `n_nodes` of `None` the node count is the
/// largest index mentioned; pass it explicitly to keep trailing isolated
/// nodes or to read an empty list.
pub fn parse_edge_list(text: &str, n_nodes: Option<usize>) -> Result<SimilarityGraph> {
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(a), Some(b), Some(w), None) = (it.next(), it.next(), it.next(), it.next())
        else {
            return Err(Error::Parse(format!(
                "line {}: expected exactly three fields 'i j w'",
                idx + 1
            )));
        };
        edges.push((
            parse_index(a, idx + 1)?,
            parse_index(b, idx + 1)?,
            parse_float(w, idx + 1)?,
        ));
    }
    let n = match n_nodes {
        Some(n) => n,
        None => edges.iter().map(|e| e.0.max(e.1)).max().unwrap_or(0),
    };
    if n == 0 {
        return Err(Error::Parse(
            "edge list is empty and no node count was given".into(),
        ));
    }
    from_edge_list(n, &edges)
}

/// [`parse_edge_list`] on a file's contents.
pub fn read_edge_list(path: impl AsRef<Path>, n_nodes: Option<usize>) -> Result<SimilarityGraph> {
    parse_edge_list(&fs::read_to_string(path)?, n_nodes)
}

/// Parses a flat list of floats separated by newlines, commas, or spaces;
/// used for initial temperature vectors.
pub fn parse_vector(text: &str) -> Result<Array1<f64>> {
    let mut vals = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        for tok in line.split(|c: char| c == ',' || c.is_whitespace()) {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            vals.push(parse_float(tok, idx + 1)?);
        }
    }
    if vals.is_empty() {
        return Err(Error::Parse("no values found".into()));
    }
    Ok(Array1::from(vals))
}

/// [`parse_vector`] on a file's contents.
pub fn read_vector(path: impl AsRef<Path>) -> Result<Array1<f64>> {
    parse_vector(&fs::read_to_string(path)?)
}

/// Parses cluster labels, either one label per line or "sample_index,label"
/// rows (the format [`format_labels`] writes). Indexed rows may appear in
/// any order but must cover 1..=N exactly.
pub fn parse_labels(text: &str) -> Result<Vec<usize>> {
    let mut plain: Vec<usize> = Vec::new();
    let mut indexed: Vec<(usize, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields = split_fields(line);
        match fields.as_slice() {
            [l] => plain.push(parse_index(l, idx + 1)?),
            [i, l] => indexed.push((parse_index(i, idx + 1)?, parse_index(l, idx + 1)?)),
            _ => {
                return Err(Error::Parse(format!(
                    "line {}: expected 'label' or 'sample_index,label'",
                    idx + 1
                )))
            }
        }
    }
    match (plain.is_empty(), indexed.is_empty()) {
        (true, true) => Err(Error::Parse("no labels found".into())),
        (false, false) => Err(Error::Parse(
            "mixed label formats: use either bare labels or indexed rows".into(),
        )),
        (false, true) => Ok(plain),
        (true, false) => {
            indexed.sort_by_key(|&(i, _)| i);
            for (pos, &(i, _)) in indexed.iter().enumerate() {
                if i != pos + 1 {
                    return Err(Error::Parse(format!(
                        "sample indices must cover 1..={} exactly, problem near index {}",
                        indexed.len(),
                        i
                    )));
                }
            }
            Ok(indexed.into_iter().map(|(_, l)| l).collect())
        }
    }
}

/// [`parse_labels`] on a file's contents.
pub fn read_labels(path: impl AsRef<Path>) -> Result<Vec<usize>> {
    parse_labels(&fs::read_to_string(path)?)
}

/// Exports print values, not bit patterns: negative zero collapses to
/// plain zero so a zero weight and its negation export identically.
fn sci(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

/// One matrix row per line, entries in scientific notation separated by
/// single spaces.
pub fn format_matrix(m: &Array2<f64>) -> String {
    let mut out = String::new();
    for row in m.rows() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(' ');
            }
            write!(out, "{:e}", sci(*v)).unwrap();
        }
        out.push('\n');
    }
    out
}

/// One line per eigenpair: the eigenvalue followed by the eigenvector
/// components, space-separated.
pub fn format_spectrum(s: &Spectrum) -> String {
    let mut out = String::new();
    let n = s.eigenvectors.nrows();
    for (u, lam) in s.eigenvalues.iter().enumerate() {
        write!(out, "{:e}", sci(*lam)).unwrap();
        for j in 0..n {
            write!(out, " {:e}", sci(s.eigenvectors[[j, u]])).unwrap();
        }
        out.push('\n');
    }
    out
}

/// CSV rows "sample_index,y_1,...,y_m", samples in input order.
pub fn format_embedding(e: &Embedding) -> String {
    let mut out = String::new();
    for j in 0..e.n_samples() {
        write!(out, "{}", j + 1).unwrap();
        for u in 0..e.dimension() {
            write!(out, ",{:e}", sci(e.coords[[u, j]])).unwrap();
        }
        out.push('\n');
    }
    out
}

/// CSV rows "t,h_1,...,h_N", one per sample time.
pub fn format_trajectory(times: &[f64], states: &[Array1<f64>]) -> Result<String> {
    if times.len() != states.len() {
        return Err(Error::ShapeError(format!(
            "{} sample times but {} states",
            times.len(),
            states.len()
        )));
    }
    let mut out = String::new();
    for (t, h) in times.iter().zip(states) {
        if let Some(first) = states.first() {
            if h.len() != first.len() {
                return Err(Error::ShapeError(
                    "trajectory states differ in length".into(),
                ));
            }
        }
        write!(out, "{:e}", sci(*t)).unwrap();
        for v in h {
            write!(out, ",{:e}", sci(*v)).unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

/// CSV rows "sample_index,label", samples in input order.
pub fn format_labels(labels: &[usize]) -> String {
    let mut out = String::new();
    for (i, l) in labels.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, l).unwrap();
    }
    out
}

/// Plain-text projection model: header lines for the dimension, input
/// dimension, expansion, eigenvalues, and near-constant flags, then one
/// "projection u z_1 ... z_P" line per component.
pub fn format_lpp_model(m: &LppModel) -> String {
    let mut out = String::new();
    writeln!(out, "m {}", m.dimension()).unwrap();
    writeln!(out, "input_dim {}", m.input_dim()).unwrap();
    match m.expansion {
        None => writeln!(out, "expansion none").unwrap(),
        Some(Expansion::Monomials { degree }) => {
            writeln!(out, "expansion monomials {degree}").unwrap()
        }
    }
    out.push_str("eigenvalues");
    for lam in &m.eigenvalues {
        write!(out, " {:e}", sci(*lam)).unwrap();
    }
    out.push('\n');
    out.push_str("near_constant");
    for &flag in &m.near_constant {
        write!(out, " {}", flag as u8).unwrap();
    }
    out.push('\n');
    for u in 0..m.dimension() {
        write!(out, "projection {}", u + 1).unwrap();
        for r in 0..m.n_features() {
            write!(out, " {:e}", sci(m.projections[[r, u]])).unwrap();
        }
        out.push('\n');
    }
    out
}
