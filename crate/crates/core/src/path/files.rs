//! Plain-text path files: one waypoint per line, `#` starts a comment line.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use super::{Path2D, Path3D};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum PathFileError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: expected {expected} values")]
    Parse { line: usize, expected: usize },
}

fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .map(|(i, l)| (i, l.split_whitespace().collect()))
}

fn parse_fields<V: std::str::FromStr, const N: usize>(
    line: usize,
    fields: &[&str],
) -> Result<[V; N], PathFileError> {
    let err = || PathFileError::Parse { line, expected: N };
    if fields.len() != N {
        return Err(err());
    }
    let parsed: Vec<V> = fields
        .iter()
        .map(|f| f.parse().map_err(|_| err()))
        .collect::<Result<_, _>>()?;
    parsed.try_into().map_err(|_| err())
}

pub fn parse_path2d(text: &str) -> Result<Path2D, PathFileError> {
    let waypoints = records(text)
        .map(|(line, fields)| parse_fields::<usize, 2>(line, &fields).map(|[m, n]| (m, n)))
        .collect::<Result<_, _>>()?;
    Ok(Path2D { waypoints })
}

pub fn parse_path3d<T: Scalar>(text: &str) -> Result<Path3D<T>, PathFileError> {
    let waypoints = records(text)
        .map(|(line, fields)| parse_fields::<T, 3>(line, &fields))
        .collect::<Result<_, _>>()?;
    Ok(Path3D { waypoints })
}

pub fn read_path2d(path: impl AsRef<Path>) -> Result<Path2D, PathFileError> {
    parse_path2d(&fs::read_to_string(path)?)
}

pub fn read_path3d<T: Scalar>(path: impl AsRef<Path>) -> Result<Path3D<T>, PathFileError> {
    parse_path3d(&fs::read_to_string(path)?)
}

pub fn write_path2d(path: &Path2D, out: impl AsRef<Path>) -> Result<(), PathFileError> {
    let mut text = String::from("# m n\n");
    for (m, n) in &path.waypoints {
        text.push_str(&format!("{m} {n}\n"));
    }
    fs::write(out, text)?;
    Ok(())
}

pub fn write_path3d<T: Scalar>(
    path: &Path3D<T>,
    out: impl AsRef<Path>,
) -> Result<(), PathFileError> {
    let mut text = String::from("# x y z\n");
    for [x, y, z] in &path.waypoints {
        text.push_str(&format!("{x} {y} {z}\n"));
    }
    fs::write(out, text)?;
    Ok(())
}
