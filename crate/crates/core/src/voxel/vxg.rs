//! VXG: a minimal neutral voxel map file format.
//!
//! ```text
//! VXG 1
//! res <float>
//! origin <x> <y> <z>
//! extent <M> <N> <K>
//! count <R>
//! <R records of four little-endian u32: i, j, k, state>
//! ```
//!
//! `state` is 1 for occupied and 2 for free; unknown voxels are omitted.
//! Canonical files list records sorted by `(i, j, k)`.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use super::{Run, VoxelError, VoxelMap, VoxelState};
use crate::scalar::Scalar;

const VERSION: u32 = 1;
const RECORD_BYTES: usize = 16;

#[derive(Debug, Error)]
pub enum VxgError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed header line {line}: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("unsupported VXG version {0}")]
    UnsupportedVersion(u32),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("{0} trailing bytes after the last record")]
    TrailingBytes(usize),
    #[error("record {record} has invalid state value {value}")]
    InvalidState { record: usize, value: u32 },
    #[error("record {record} at ({i}, {j}, {k}) lies outside the extent")]
    RecordOutOfRange {
        record: usize,
        i: u32,
        j: u32,
        k: u32,
    },
    #[error("invalid map geometry: {0}")]
    Geometry(#[from] VoxelError),
}

fn malformed(line: usize, reason: impl Into<String>) -> VxgError {
    VxgError::MalformedHeader {
        line,
        reason: reason.into(),
    }
}

/// Splits off the next `\n`-terminated header line.
fn next_line(bytes: &[u8], pos: &mut usize, line: usize) -> Result<Vec<String>, VxgError> {
    let rest = &bytes[*pos..];
    let end = rest
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| malformed(line, "missing line terminator"))?;
    let text = std::str::from_utf8(&rest[..end]).map_err(|_| malformed(line, "not ASCII"))?;
    *pos += end + 1;
    Ok(text.split_whitespace().map(str::to_owned).collect())
}

fn keyword_values(
    tokens: Vec<String>,
    line: usize,
    keyword: &str,
    count: usize,
) -> Result<Vec<String>, VxgError> {
    match tokens.split_first() {
        Some((k, values)) if k == keyword && values.len() == count => Ok(values.to_vec()),
        _ => Err(malformed(
            line,
            format!("expected `{keyword}` followed by {count} value(s)"),
        )),
    }
}

fn parse<V: std::str::FromStr>(s: &str, line: usize) -> Result<V, VxgError> {
    s.parse()
        .map_err(|_| malformed(line, format!("cannot parse `{s}`")))
}

/// Decodes a VXG byte buffer.
pub fn read_vxg<T: Scalar>(bytes: &[u8]) -> Result<VoxelMap<T>, VxgError> {
    let mut pos = 0;
    let magic = next_line(bytes, &mut pos, 1)?;
    match magic.as_slice() {
        [tag, v] if tag == "VXG" => {
            let version: u32 = parse(v, 1)?;
            if version != VERSION {
                return Err(VxgError::UnsupportedVersion(version));
            }
        }
        _ => return Err(malformed(1, "expected `VXG <version>`")),
    }
    let res = keyword_values(next_line(bytes, &mut pos, 2)?, 2, "res", 1)?;
    let resolution: T = parse(&res[0], 2)?;
    let origin = keyword_values(next_line(bytes, &mut pos, 3)?, 3, "origin", 3)?;
    let origin: [T; 3] = [
        parse(&origin[0], 3)?,
        parse(&origin[1], 3)?,
        parse(&origin[2], 3)?,
    ];
    let extent = keyword_values(next_line(bytes, &mut pos, 4)?, 4, "extent", 3)?;
    let extent: [u32; 3] = [
        parse(&extent[0], 4)?,
        parse(&extent[1], 4)?,
        parse(&extent[2], 4)?,
    ];
    let count = keyword_values(next_line(bytes, &mut pos, 5)?, 5, "count", 1)?;
    let count: usize = parse(&count[0], 5)?;

    let payload = &bytes[pos..];
    let expected = count
        .checked_mul(RECORD_BYTES)
        .ok_or_else(|| malformed(5, "record count overflows"))?;
    if payload.len() < expected {
        return Err(VxgError::Truncated {
            expected,
            found: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(VxgError::TrailingBytes(payload.len() - expected));
    }

    let mut map = VoxelMap::new(resolution, origin, extent)?;
    let mut records = payload.chunks_exact(RECORD_BYTES).enumerate().peekable();
    let mut pending: Vec<(u32, VoxelState)> = Vec::new();
    while let Some((record, chunk)) = records.next() {
        let (i, j, k, raw) = decode_record(chunk);
        let state = match raw {
            1 => VoxelState::Occupied,
            2 => VoxelState::Free,
            value => return Err(VxgError::InvalidState { record, value }),
        };
        if i >= extent[0] || j >= extent[1] || k >= extent[2] {
            return Err(VxgError::RecordOutOfRange { record, i, j, k });
        }
        pending.push((k, state));
        let same_column_next = records.peek().is_some_and(|(_, next)| {
            let (ni, nj, _, _) = decode_record(next);
            (ni, nj) == (i, j)
        });
        if !same_column_next {
            flush_column(&mut map, i, j, &mut pending);
        }
    }
    Ok(map)
}

fn decode_record(chunk: &[u8]) -> (u32, u32, u32, u32) {
    let word = |o: usize| u32::from_le_bytes(chunk[o..o + 4].try_into().expect("4-byte slice"));
    (word(0), word(4), word(8), word(12))
}

/// Writes a group of records for one column. Strictly ascending groups (the
/// canonical case) are converted to runs directly.
fn flush_column<T: Scalar>(
    map: &mut VoxelMap<T>,
    i: u32,
    j: u32,
    pending: &mut Vec<(u32, VoxelState)>,
) {
    let ascending = pending.windows(2).all(|w| w[0].0 < w[1].0);
    let fresh = map.known_runs(i, j).is_empty();
    if ascending && fresh {
        let mut runs: Vec<Run> = Vec::new();
        for &(k, state) in pending.iter() {
            match runs.last_mut() {
                Some(last) if last.end() == k && last.state == state => last.len += 1,
                _ => runs.push(Run::new(k, 1, state)),
            }
        }
        map.set_column_runs(i, j, runs)
            .expect("records validated against extent");
    } else {
        for &(k, state) in pending.iter() {
            map.write(i, j, k, state);
        }
    }
    pending.clear();
}

/// Encodes a map canonically: records sorted by `(i, j, k)`.
pub fn write_vxg<T: Scalar>(map: &VoxelMap<T>) -> Vec<u8> {
    let [ox, oy, oz] = map.origin();
    let [m, n, k] = map.extent();
    let count = map.known_count();
    let header = format!(
        "VXG {VERSION}\nres {}\norigin {ox} {oy} {oz}\nextent {m} {n} {k}\ncount {count}\n",
        map.resolution()
    );
    let mut out = Vec::with_capacity(header.len() + count as usize * RECORD_BYTES);
    out.extend_from_slice(header.as_bytes());
    for ((i, j), runs) in map.known_columns() {
        for run in runs {
            let state: u32 = match run.state {
                VoxelState::Occupied => 1,
                VoxelState::Free => 2,
                VoxelState::Unknown => unreachable!("unknown runs are never stored"),
            };
            for layer in run.start..run.end() {
                for word in [i, j, layer, state] {
                    out.extend_from_slice(&word.to_le_bytes());
                }
            }
        }
    }
    out
}

pub fn load_voxel_map<T: Scalar>(path: impl AsRef<Path>) -> Result<VoxelMap<T>, VxgError> {
    read_vxg(&fs::read(path)?)
}

pub fn save_voxel_map<T: Scalar>(
    map: &VoxelMap<T>,
    path: impl AsRef<Path>,
) -> Result<(), VxgError> {
    fs::write(path, write_vxg(map))?;
    Ok(())
}
