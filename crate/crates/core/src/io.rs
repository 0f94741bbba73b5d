//! Dataset loaders, the constraint file format and result writers.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::sets::ConvexRegion;
use crate::solver::TraceRow;

pub const TRACE_HEADER: &str =
    "stage,iter,mu,tau,lambda_trial,lambda_accepted,backtracks,f_value,step_fro,skipped,wall_ns";

/// Reads a comma-separated numeric table. A first row with any non-numeric
/// cell is taken as a header.
pub fn load_points_csv(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;

    let mut data = Vec::new();
    let mut cols: Option<usize> = None;
    let mut rows = 0;
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(idx + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Vec<std::result::Result<f64, usize>> = record
            .iter()
            .enumerate()
            .map(|(c, cell)| cell.parse::<f64>().map_err(|_| c))
            .collect();
        if rows == 0 && cols.is_none() && parsed.iter().any(|v| v.is_err()) {
            cols = Some(record.len());
            continue;
        }
        let expected = *cols.get_or_insert(record.len());
        if record.len() != expected {
            return Err(Error::parse(
                path,
                line,
                format!("expected {expected} columns, found {}", record.len()),
            ));
        }
        for (c, v) in parsed.into_iter().enumerate() {
            match v {
                Ok(x) if x.is_finite() => data.push(x),
                _ => {
                    return Err(Error::parse(
                        path,
                        line,
                        format!("column {}: {:?} is not a finite number", c + 1, &record[c]),
                    ))
                }
            }
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(Error::parse(path, 1, "no numeric rows"));
    }
    Matrix::from_vec(rows, cols.unwrap_or(0), data)
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::parse(path, line, format!("{other:?}")),
    }
}

/// Reads node coordinates from a TSPLIB file; node indices are dropped.
pub fn load_points_tsplib(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let mut dimension: Option<usize> = None;
    let mut in_section = false;
    let mut saw_section = false;
    let mut saw_eof = false;
    let mut cols: Option<usize> = None;
    let mut data = Vec::new();
    let mut rows = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == "EOF" {
            saw_eof = true;
            break;
        }
        if !in_section {
            let (key, value) = match trimmed.split_once(':') {
                Some((k, v)) => (k.trim(), v.trim()),
                None => (trimmed, ""),
            };
            match key {
                "NODE_COORD_SECTION" => {
                    in_section = true;
                    saw_section = true;
                }
                "DIMENSION" => {
                    dimension = Some(value.parse().map_err(|_| {
                        Error::parse(path, line, format!("DIMENSION {value:?} is not an integer"))
                    })?);
                }
                "EDGE_WEIGHT_TYPE" if !matches!(value, "EUC_2D" | "EUC_3D" | "CEIL_2D" | "ATT") => {
                    return Err(Error::parse(
                        path,
                        line,
                        format!(
                            "unsupported EDGE_WEIGHT_TYPE {value}; expected Euclidean coordinates"
                        ),
                    ));
                }
                _ => {}
            }
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields[0]
            .chars()
            .all(|c| c.is_ascii_uppercase() || c == '_')
        {
            // next keyword section; coordinates are complete
            in_section = false;
            continue;
        }
        let coords = &fields[1..];
        let expected = *cols.get_or_insert(coords.len());
        if coords.is_empty() || coords.len() != expected {
            return Err(Error::parse(
                path,
                line,
                format!("expected an index and {expected} coordinates"),
            ));
        }
        for (c, cell) in coords.iter().enumerate() {
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => data.push(v),
                _ => {
                    return Err(Error::parse(
                        path,
                        line,
                        format!("column {}: {cell:?} is not a finite number", c + 2),
                    ))
                }
            }
        }
        rows += 1;
    }
    if !saw_section {
        return Err(Error::parse(path, 0, "missing NODE_COORD_SECTION"));
    }
    if !saw_eof {
        return Err(Error::parse(
            path,
            text.lines().count(),
            "missing EOF marker",
        ));
    }
    if let Some(d) = dimension {
        if d != rows {
            return Err(Error::parse(
                path,
                0,
                format!("DIMENSION is {d} but {rows} nodes were listed"),
            ));
        }
    }
    if rows == 0 {
        return Err(Error::parse(path, 0, "NODE_COORD_SECTION is empty"));
    }
    Matrix::from_vec(rows, cols.unwrap_or(0), data)
}

/// Parses per-center region literals.
///
/// ```text
/// # comment
/// center 1          # 1-based center index, or `*` for every center
/// ball c1 .. cn r
/// box lo1 .. lon hi1 .. hin
/// ```
pub fn parse_constraints(
    text: &str,
    path: &Path,
    k: usize,
    n: usize,
) -> Result<Vec<Vec<ConvexRegion>>> {
    let mut lists = vec![Vec::new(); k];
    let mut target: Option<Vec<usize>> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut words = content.split_whitespace();
        let keyword = words.next().unwrap_or_default();
        let rest: Vec<&str> = words.collect();
        match keyword {
            "center" => {
                let [which] = rest[..] else {
                    return Err(Error::parse(
                        path,
                        line,
                        "expected `center <index>` or `center *`",
                    ));
                };
                target = Some(if which == "*" {
                    (0..k).collect()
                } else {
                    let i: usize = which.parse().map_err(|_| {
                        Error::parse(path, line, format!("bad center index {which:?}"))
                    })?;
                    if i == 0 || i > k {
                        return Err(Error::parse(
                            path,
                            line,
                            format!("center index {i} outside 1..={k}"),
                        ));
                    }
                    vec![i - 1]
                });
            }
            "ball" | "box" => {
                let Some(centers) = &target else {
                    return Err(Error::parse(
                        path,
                        line,
                        format!("`{keyword}` before any `center` line"),
                    ));
                };
                let nums = rest
                    .iter()
                    .enumerate()
                    .map(|(c, w)| {
                        w.parse::<f64>().map_err(|_| {
                            Error::parse(
                                path,
                                line,
                                format!("field {}: {w:?} is not a number", c + 2),
                            )
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                let region = if keyword == "ball" {
                    if nums.len() != n + 1 {
                        return Err(Error::parse(
                            path,
                            line,
                            format!(
                                "ball needs {n} center coordinates and a radius, got {} numbers",
                                nums.len()
                            ),
                        ));
                    }
                    ConvexRegion::ball(nums[..n].to_vec(), nums[n])
                } else {
                    if nums.len() != 2 * n {
                        return Err(Error::parse(
                            path,
                            line,
                            format!(
                                "box needs {} numbers (lower then upper corner), got {}",
                                2 * n,
                                nums.len()
                            ),
                        ));
                    }
                    ConvexRegion::boxed(nums[..n].to_vec(), nums[n..].to_vec())
                }
                .map_err(|e| Error::parse(path, line, e.to_string()))?;
                for &c in centers {
                    lists[c].push(region.clone());
                }
            }
            other => {
                return Err(Error::parse(
                    path,
                    line,
                    format!("unknown keyword {other:?}"),
                ));
            }
        }
    }
    Ok(lists)
}

pub fn load_constraints(
    path: impl AsRef<Path>,
    k: usize,
    n: usize,
) -> Result<Vec<Vec<ConvexRegion>>> {
    let path = path.as_ref();
    parse_constraints(&fs::read_to_string(path)?, path, k, n)
}

/// Float formatting used in CSV outputs (17 significant digits).
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn write_trace_csv<W: Write>(mut out: W, trace: &[TraceRow]) -> Result<()> {
    writeln!(out, "{TRACE_HEADER}")?;
    for r in trace {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.stage,
            r.iter,
            fmt_f64(r.mu),
            fmt_f64(r.tau),
            fmt_f64(r.lambda_trial),
            fmt_f64(r.lambda_accepted),
            r.backtracks,
            fmt_f64(r.f_value),
            fmt_f64(r.step_fro),
            r.skipped,
            r.wall_ns
        )?;
    }
    Ok(())
}

pub fn write_json<T: Serialize>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let file = fs::File::create(path)?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), value)
        .map_err(|e| Error::Io(e.into()))
}
