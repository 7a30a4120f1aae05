//! Compact binary files for the 2D products, size accounting, and a PGM
//! export for image viewers.
//!
//! Every grid file starts with a fixed 52-byte little-endian header:
//!
//! | offset | size | field                                          |
//! |--------|------|------------------------------------------------|
//! | 0      | 4    | magic `V2DG`                                   |
//! | 4      | 4    | version (1)                                    |
//! | 8      | 2    | kind (0 occupancy, 1 floor, 2 floor+ceiling, 3 slope) |
//! | 10     | 2    | variant (occupancy: 0 UAV, 1 UGV)              |
//! | 12     | 4    | M                                              |
//! | 16     | 4    | N                                              |
//! | 20     | 8    | resolution (f64)                               |
//! | 28     | 24   | origin x, y, z (f64)                           |
//!
//! Payloads are row-major over `(m, n)`. Occupancy stores one byte per cell
//! (255 unknown, otherwise `round(p * 254)`); float grids store `f32` with NaN
//! marking absent cells, floor+ceiling files hold the floor plane followed by
//! the ceiling plane.

use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::column::{HeightCell, HeightMap};
use crate::grid::{Grid2, GridGeometry};
use crate::occupancy::{MapKind, OccupancyGrid};
use crate::scalar::Scalar;
use crate::slope::SlopeMap;

pub const MAGIC: [u8; 4] = *b"V2DG";
pub const VERSION: u32 = 1;
pub const HEADER_BYTES: usize = 52;
const UNKNOWN_BYTE: u8 = 255;
const OCCUPANCY_STEPS: f64 = 254.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    Occupancy,
    HeightFloor,
    HeightFloorCeiling,
    Slope,
}

impl GridKind {
    fn code(self) -> u16 {
        match self {
            GridKind::Occupancy => 0,
            GridKind::HeightFloor => 1,
            GridKind::HeightFloorCeiling => 2,
            GridKind::Slope => 3,
        }
    }

    fn from_code(code: u16) -> Option<Self> {
        Some(match code {
            0 => GridKind::Occupancy,
            1 => GridKind::HeightFloor,
            2 => GridKind::HeightFloorCeiling,
            3 => GridKind::Slope,
            _ => return None,
        })
    }

    /// Payload bytes per cell.
    pub fn cell_bytes(self) -> usize {
        match self {
            GridKind::Occupancy => 1,
            GridKind::HeightFloor | GridKind::Slope => 4,
            GridKind::HeightFloorCeiling => 8,
        }
    }
}

impl fmt::Display for GridKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GridKind::Occupancy => "occupancy",
            GridKind::HeightFloor => "height-floor",
            GridKind::HeightFloorCeiling => "height-floor-ceiling",
            GridKind::Slope => "slope",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridFileHeader {
    pub kind: GridKind,
    pub variant: u16,
    pub m: u32,
    pub n: u32,
    pub resolution: f64,
    pub origin: [f64; 3],
}

impl GridFileHeader {
    pub fn payload_len(&self) -> usize {
        self.m as usize * self.n as usize * self.kind.cell_bytes()
    }

    fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_BYTES + self.payload_len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&self.kind.code().to_le_bytes());
        out.extend_from_slice(&self.variant.to_le_bytes());
        out.extend_from_slice(&self.m.to_le_bytes());
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&self.resolution.to_le_bytes());
        for o in self.origin {
            out.extend_from_slice(&o.to_le_bytes());
        }
        out
    }

    fn geometry<T: Scalar>(&self) -> GridGeometry<T> {
        GridGeometry {
            resolution: T::lit(self.resolution),
            origin: self.origin.map(T::lit),
            m: self.m as usize,
            n: self.n as usize,
        }
    }

    fn from_geometry<T: Scalar>(kind: GridKind, variant: u16, g: &GridGeometry<T>) -> Self {
        let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
        Self {
            kind,
            variant,
            m: g.m as u32,
            n: g.n as u32,
            resolution: f(g.resolution),
            origin: g.origin.map(f),
        }
    }
}

#[derive(Debug, Error)]
pub enum GridFileError {
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("file too short for a grid header")]
    ShortHeader,
    #[error("bad magic, not a grid file")]
    BadMagic,
    #[error("unsupported grid file version {0}")]
    UnsupportedVersion(u32),
    #[error("unknown grid kind code {0}")]
    UnknownKind(u16),
    #[error("expected a {expected} grid, found {found}")]
    WrongKind { expected: String, found: GridKind },
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("{0} trailing bytes after the payload")]
    TrailingBytes(usize),
    #[error("grid headers differ: {0}")]
    HeaderMismatch(String),
}

fn read_file(path: &Path) -> Result<Vec<u8>, GridFileError> {
    fs::read(path).map_err(|source| GridFileError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), GridFileError> {
    fs::write(path, bytes).map_err(|source| GridFileError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Parses and validates the header, returning it with the payload slice.
pub fn decode_header(bytes: &[u8]) -> Result<(GridFileHeader, &[u8]), GridFileError> {
    if bytes.len() < HEADER_BYTES {
        return Err(GridFileError::ShortHeader);
    }
    if bytes[0..4] != MAGIC {
        return Err(GridFileError::BadMagic);
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
    let u16_at = |o: usize| u16::from_le_bytes(bytes[o..o + 2].try_into().expect("2 bytes"));
    let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
    let version = u32_at(4);
    if version != VERSION {
        return Err(GridFileError::UnsupportedVersion(version));
    }
    let code = u16_at(8);
    let kind = GridKind::from_code(code).ok_or(GridFileError::UnknownKind(code))?;
    let header = GridFileHeader {
        kind,
        variant: u16_at(10),
        m: u32_at(12),
        n: u32_at(16),
        resolution: f64_at(20),
        origin: [f64_at(28), f64_at(36), f64_at(44)],
    };
    let payload = &bytes[HEADER_BYTES..];
    let expected = header.payload_len();
    if payload.len() < expected {
        return Err(GridFileError::Truncated {
            expected,
            found: payload.len(),
        });
    }
    if payload.len() > expected {
        return Err(GridFileError::TrailingBytes(payload.len() - expected));
    }
    Ok((header, payload))
}

pub fn read_header(path: impl AsRef<Path>) -> Result<GridFileHeader, GridFileError> {
    let bytes = read_file(path.as_ref())?;
    decode_header(&bytes).map(|(h, _)| h)
}

fn expect_kind(header: &GridFileHeader, allowed: &[GridKind]) -> Result<(), GridFileError> {
    if allowed.contains(&header.kind) {
        Ok(())
    } else {
        Err(GridFileError::WrongKind {
            expected: allowed
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" or "),
            found: header.kind,
        })
    }
}

pub fn quantize_occupancy<T: Scalar>(value: Option<T>) -> u8 {
    match value {
        None => UNKNOWN_BYTE,
        Some(p) => {
            let p = p.to_f64().unwrap_or(0.0).clamp(0.0, 1.0);
            (p * OCCUPANCY_STEPS).round() as u8
        }
    }
}

pub fn dequantize_occupancy<T: Scalar>(byte: u8) -> Option<T> {
    (byte != UNKNOWN_BYTE).then(|| T::lit(f64::from(byte) / OCCUPANCY_STEPS))
}

pub fn encode_occupancy<T: Scalar>(grid: &OccupancyGrid<T>) -> Vec<u8> {
    let variant = match grid.kind() {
        MapKind::Uav => 0,
        MapKind::Ugv => 1,
    };
    let mut out =
        GridFileHeader::from_geometry(GridKind::Occupancy, variant, grid.geometry()).encode();
    out.extend(
        grid.cells()
            .as_slice()
            .iter()
            .map(|&v| quantize_occupancy(v)),
    );
    out
}

pub fn decode_occupancy<T: Scalar>(bytes: &[u8]) -> Result<OccupancyGrid<T>, GridFileError> {
    let (header, payload) = decode_header(bytes)?;
    expect_kind(&header, &[GridKind::Occupancy])?;
    let kind = if header.variant == 1 {
        MapKind::Ugv
    } else {
        MapKind::Uav
    };
    let g = header.geometry::<T>();
    let cells = payload.iter().map(|&b| dequantize_occupancy(b)).collect();
    Ok(OccupancyGrid::new(
        g,
        kind,
        Grid2::from_vec(g.m, g.n, cells),
    ))
}

pub fn write_occupancy<T: Scalar>(
    grid: &OccupancyGrid<T>,
    path: impl AsRef<Path>,
) -> Result<(), GridFileError> {
    write_file(path.as_ref(), &encode_occupancy(grid))
}

pub fn read_occupancy<T: Scalar>(
    path: impl AsRef<Path>,
) -> Result<OccupancyGrid<T>, GridFileError> {
    decode_occupancy(&read_file(path.as_ref())?)
}

fn push_f32<T: Scalar>(out: &mut Vec<u8>, v: Option<T>) {
    let v = v.and_then(|v| v.to_f32()).unwrap_or(f32::NAN);
    out.extend_from_slice(&v.to_le_bytes());
}

fn f32_plane<T: Scalar>(payload: &[u8]) -> Vec<Option<T>> {
    payload
        .chunks_exact(4)
        .map(|c| {
            let v = f32::from_le_bytes(c.try_into().expect("4 bytes"));
            (!v.is_nan()).then(|| T::lit(f64::from(v)))
        })
        .collect()
}

pub fn encode_height<T: Scalar>(h: &HeightMap<T>, include_ceiling: bool) -> Vec<u8> {
    let kind = if include_ceiling {
        GridKind::HeightFloorCeiling
    } else {
        GridKind::HeightFloor
    };
    let mut out = GridFileHeader::from_geometry(kind, 0, h.geometry()).encode();
    let cells = h.cells().as_slice();
    for c in cells {
        push_f32(&mut out, c.map(|c| c.floor));
    }
    if include_ceiling {
        for c in cells {
            push_f32(&mut out, c.map(|c| c.ceiling));
        }
    }
    out
}

/// Decodes a height file. Floor-only files yield an infinite ceiling.
pub fn decode_height<T: Scalar>(bytes: &[u8]) -> Result<HeightMap<T>, GridFileError> {
    let (header, payload) = decode_header(bytes)?;
    expect_kind(
        &header,
        &[GridKind::HeightFloor, GridKind::HeightFloorCeiling],
    )?;
    let g = header.geometry::<T>();
    let plane = g.m * g.n * 4;
    let floors = f32_plane::<T>(&payload[..plane]);
    let ceilings = match header.kind {
        GridKind::HeightFloorCeiling => f32_plane::<T>(&payload[plane..]),
        _ => vec![Some(T::infinity()); g.m * g.n],
    };
    let cells = floors
        .into_iter()
        .zip(ceilings)
        .map(|(f, c)| {
            Some(HeightCell {
                floor: f?,
                ceiling: c?,
            })
        })
        .collect();
    Ok(HeightMap::new(g, Grid2::from_vec(g.m, g.n, cells)))
}

pub fn write_height<T: Scalar>(
    h: &HeightMap<T>,
    include_ceiling: bool,
    path: impl AsRef<Path>,
) -> Result<(), GridFileError> {
    write_file(path.as_ref(), &encode_height(h, include_ceiling))
}

pub fn read_height<T: Scalar>(path: impl AsRef<Path>) -> Result<HeightMap<T>, GridFileError> {
    decode_height(&read_file(path.as_ref())?)
}

/// Float grid read back from a slope file.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarGrid<T> {
    pub geometry: GridGeometry<T>,
    pub values: Grid2<Option<T>>,
}

pub fn encode_slope<T: Scalar>(s: &SlopeMap<T>) -> Vec<u8> {
    let mut out = GridFileHeader::from_geometry(GridKind::Slope, 0, s.geometry()).encode();
    for c in s.cells().as_slice() {
        push_f32(&mut out, c.map(|c| c.value));
    }
    out
}

pub fn decode_slope<T: Scalar>(bytes: &[u8]) -> Result<ScalarGrid<T>, GridFileError> {
    let (header, payload) = decode_header(bytes)?;
    expect_kind(&header, &[GridKind::Slope])?;
    let g = header.geometry::<T>();
    Ok(ScalarGrid {
        geometry: g,
        values: Grid2::from_vec(g.m, g.n, f32_plane(payload)),
    })
}

pub fn write_slope<T: Scalar>(
    s: &SlopeMap<T>,
    path: impl AsRef<Path>,
) -> Result<(), GridFileError> {
    write_file(path.as_ref(), &encode_slope(s))
}

pub fn read_slope<T: Scalar>(path: impl AsRef<Path>) -> Result<ScalarGrid<T>, GridFileError> {
    decode_slope(&read_file(path.as_ref())?)
}

/// ASCII PGM rendering of an occupancy grid: free white, occupied black,
/// unknown mid-gray 127. Image rows run from the top (`n = N - 1`) down.
pub fn encode_pgm<T: Scalar>(grid: &OccupancyGrid<T>) -> String {
    let (m, n) = grid.dims();
    let mut out = format!("P2\n{m} {n}\n255\n");
    for row in (0..n).rev() {
        let line: Vec<String> = (0..m)
            .map(|col| match grid.get(col, row) {
                None => "127".to_owned(),
                Some(p) => {
                    let p = p.to_f64().unwrap_or(0.0).clamp(0.0, 1.0);
                    ((1.0 - p) * 254.0).round().to_string()
                }
            })
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_pgm<T: Scalar>(
    grid: &OccupancyGrid<T>,
    path: impl AsRef<Path>,
) -> Result<(), GridFileError> {
    write_file(path.as_ref(), encode_pgm(grid).as_bytes())
}

/// Cell-wise comparison of two grid files.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDiff {
    pub cells: usize,
    pub differing: usize,
    pub max_abs: f64,
}

fn decoded_values(header: &GridFileHeader, payload: &[u8]) -> Vec<f64> {
    match header.kind {
        GridKind::Occupancy => payload
            .iter()
            .map(|&b| dequantize_occupancy::<f64>(b).unwrap_or(-1.0))
            .collect(),
        _ => f32_plane::<f64>(payload)
            .into_iter()
            .map(|v| v.unwrap_or(f64::NAN))
            .collect(),
    }
}

/// Compares two grid files of the same kind and shape. Cells differ when one
/// is absent and the other not, or when values differ by more than `tolerance`.
pub fn diff_grids(a: &[u8], b: &[u8], tolerance: f64) -> Result<GridDiff, GridFileError> {
    let (ha, pa) = decode_header(a)?;
    let (hb, pb) = decode_header(b)?;
    if ha.kind != hb.kind || ha.m != hb.m || ha.n != hb.n {
        return Err(GridFileError::HeaderMismatch(format!(
            "{} {}x{} vs {} {}x{}",
            ha.kind, ha.m, ha.n, hb.kind, hb.m, hb.n
        )));
    }
    let va = decoded_values(&ha, pa);
    let vb = decoded_values(&hb, pb);
    let mut diff = GridDiff {
        cells: va.len(),
        differing: 0,
        max_abs: 0.0,
    };
    for (x, y) in va.iter().zip(&vb) {
        let absent = (x.is_nan(), y.is_nan());
        let differs = match absent {
            (true, true) => false,
            (false, false) => {
                let d = (x - y).abs();
                diff.max_abs = diff.max_abs.max(d);
                d > tolerance
            }
            _ => true,
        };
        if differs {
            diff.differing += 1;
        }
    }
    Ok(diff)
}

pub fn diff_grid_files(
    a: impl AsRef<Path>,
    b: impl AsRef<Path>,
    tolerance: f64,
) -> Result<GridDiff, GridFileError> {
    diff_grids(&read_file(a.as_ref())?, &read_file(b.as_ref())?, tolerance)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizeEntry {
    pub label: String,
    pub bytes: u64,
    pub percent: f64,
}

/// Raw byte counts relative to the voxel map file.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeReport {
    pub voxel_bytes: u64,
    pub entries: Vec<SizeEntry>,
}

impl SizeReport {
    pub fn entry(&self, label: &str) -> Option<&SizeEntry> {
        self.entries.iter().find(|e| e.label == label)
    }
}

impl fmt::Display for SizeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<40} {:>14} {:>8}", "artifact", "bytes", "percent")?;
        writeln!(
            f,
            "{:<40} {:>14} {:>7.1}%",
            "voxel map", self.voxel_bytes, 100.0
        )?;
        for e in &self.entries {
            writeln!(f, "{:<40} {:>14} {:>7.1}%", e.label, e.bytes, e.percent)?;
        }
        Ok(())
    }
}

fn percent(bytes: u64, of: u64) -> f64 {
    if of == 0 {
        return f64::NAN;
    }
    (bytes as f64 / of as f64 * 1000.0).round() / 10.0
}

/// Sizes of `grid_paths` relative to `voxel_path`, one decimal place.
///
/// Files are labelled by name. When an occupancy file and a height file are
/// both present, a bundle row is added whose size is the occupancy file plus
/// the height payload (the bundle shares one header).
pub fn size_report(
    voxel_path: impl AsRef<Path>,
    grid_paths: &[PathBuf],
) -> Result<SizeReport, GridFileError> {
    let size = |p: &Path| {
        fs::metadata(p)
            .map(|m| m.len())
            .map_err(|source| GridFileError::Io {
                path: p.to_owned(),
                source,
            })
    };
    let voxel_bytes = size(voxel_path.as_ref())?;
    let mut entries = Vec::new();
    let mut occupancy = None;
    let mut heights = Vec::new();
    for p in grid_paths {
        let bytes = size(p)?;
        let label = p.file_name().map_or_else(
            || p.display().to_string(),
            |s| s.to_string_lossy().into_owned(),
        );
        entries.push(SizeEntry {
            label,
            bytes,
            percent: percent(bytes, voxel_bytes),
        });
        if let Ok(header) = read_header(p) {
            match header.kind {
                GridKind::Occupancy if occupancy.is_none() => occupancy = Some(bytes),
                GridKind::HeightFloor | GridKind::HeightFloorCeiling => heights.push(header),
                _ => {}
            }
        }
    }
    if let Some(occ) = occupancy {
        for h in heights {
            let label = match h.kind {
                GridKind::HeightFloor => "2d map + height (floor)",
                _ => "2d map + height (floor & ceiling)",
            };
            let bytes = occ + h.payload_len() as u64;
            entries.push(SizeEntry {
                label: label.to_owned(),
                bytes,
                percent: percent(bytes, voxel_bytes),
            });
        }
    }
    Ok(SizeReport {
        voxel_bytes,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn geometry(m: usize, n: usize) -> GridGeometry<f64> {
        GridGeometry {
            resolution: 0.1,
            origin: [1.0, 2.0, -3.0],
            m,
            n,
        }
    }

    fn occupancy(
        m: usize,
        n: usize,
        f: impl Fn(usize, usize) -> Option<f64>,
    ) -> OccupancyGrid<f64> {
        OccupancyGrid::new(geometry(m, n), MapKind::Ugv, Grid2::from_fn(m, n, f))
    }

    #[test]
    fn unknown_grid_payload() {
        let bytes = encode_occupancy(&occupancy(3, 4, |_, _| None));
        assert_eq!(bytes.len(), HEADER_BYTES + 12);
        assert!(bytes[HEADER_BYTES..].iter().all(|&b| b == 255));
    }

    #[test]
    fn endpoint_quantization() {
        assert_eq!(quantize_occupancy(Some(0.0f64)), 0);
        assert_eq!(quantize_occupancy(Some(1.0f64)), 254);
        assert_eq!(quantize_occupancy::<f64>(None), 255);
        assert_eq!(dequantize_occupancy::<f64>(254), Some(1.0));
        assert_eq!(dequantize_occupancy::<f64>(0), Some(0.0));
    }

    #[test]
    fn header_errors() {
        let bytes = encode_occupancy(&occupancy(2, 2, |_, _| Some(0.0)));
        assert!(matches!(
            decode_occupancy::<f64>(&bytes[..10]),
            Err(GridFileError::ShortHeader)
        ));
        assert!(matches!(
            decode_occupancy::<f64>(&bytes[..bytes.len() - 1]),
            Err(GridFileError::Truncated {
                expected: 4,
                found: 3
            })
        ));
        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(
            decode_occupancy::<f64>(&long),
            Err(GridFileError::TrailingBytes(1))
        ));
        let mut magic = bytes.clone();
        magic[0] = b'X';
        assert!(matches!(
            decode_occupancy::<f64>(&magic),
            Err(GridFileError::BadMagic)
        ));
        let mut version = bytes.clone();
        version[4] = 9;
        assert!(matches!(
            decode_occupancy::<f64>(&version),
            Err(GridFileError::UnsupportedVersion(9))
        ));
        let mut kind = bytes.clone();
        kind[8] = 7;
        assert!(matches!(
            decode_occupancy::<f64>(&kind),
            Err(GridFileError::UnknownKind(7))
        ));
        assert!(matches!(
            decode_height::<f64>(&bytes),
            Err(GridFileError::WrongKind { .. })
        ));
        assert!(matches!(
            decode_slope::<f64>(&bytes),
            Err(GridFileError::WrongKind { .. })
        ));
    }

    #[test]
    fn height_files() {
        let h = HeightMap::new(
            geometry(2, 3),
            Grid2::from_fn(2, 3, |i, j| {
                (i + j != 1).then_some(HeightCell {
                    floor: 0.0,
                    ceiling: 2.5,
                })
            }),
        );
        let floor_only = encode_height(&h, false);
        let both = encode_height(&h, true);
        assert_eq!(floor_only.len(), HEADER_BYTES + 4 * 6);
        assert_eq!(both.len(), HEADER_BYTES + 8 * 6);
        assert_eq!(decode_height::<f64>(&both).unwrap(), h);
        let floors = decode_height::<f64>(&floor_only).unwrap();
        assert_eq!(floors.get(0, 0).unwrap().floor, 0.0);
        assert_eq!(floors.get(0, 0).unwrap().ceiling, f64::INFINITY);
        assert!(floors.get(0, 1).is_none());

        let empty = HeightMap::<f64>::empty(geometry(2, 2));
        let bytes = encode_height(&empty, false);
        assert!(bytes[HEADER_BYTES..]
            .chunks(4)
            .all(|c| f32::from_le_bytes(c.try_into().unwrap()).is_nan()));
    }

    #[test]
    fn pgm_export() {
        let g = occupancy(2, 2, |i, j| match (i, j) {
            (0, 0) => Some(0.0),
            (1, 0) => Some(1.0),
            _ => None,
        });
        assert_eq!(encode_pgm(&g), "P2\n2 2\n255\n127 127\n254 0\n");
    }

    #[test]
    fn diff_counts() {
        let a = encode_occupancy(&occupancy(2, 2, |i, _| (i == 0).then_some(0.0)));
        let b = encode_occupancy(&occupancy(2, 2, |_, _| Some(0.0)));
        assert_eq!(diff_grids(&a, &a, 0.0).unwrap().differing, 0);
        assert_eq!(diff_grids(&a, &b, 0.0).unwrap().differing, 2);
        let c = encode_occupancy(&occupancy(3, 2, |_, _| None));
        assert!(matches!(
            diff_grids(&a, &c, 0.0),
            Err(GridFileError::HeaderMismatch(_))
        ));
    }

    #[test]
    fn size_report_arithmetic() {
        let dir = tempfile::tempdir().unwrap();
        let vox = dir.path().join("map.vxg");
        fs::write(&vox, vec![0u8; 4000]).unwrap();
        let occ = dir.path().join("uav.v2g");
        let hgt = dir.path().join("height.v2g");
        let g = occupancy(10, 10, |_, _| Some(0.0));
        write_occupancy(&g, &occ).unwrap();
        let h = HeightMap::<f64>::empty(geometry(10, 10));
        write_height(&h, true, &hgt).unwrap();
        let report = size_report(&vox, &[occ.clone(), hgt]).unwrap();
        let occ_bytes = report.entry("uav.v2g").unwrap().bytes;
        assert_eq!(occ_bytes, (HEADER_BYTES + 100) as u64);
        assert_eq!(report.entry("uav.v2g").unwrap().percent, 3.8);
        let bundle = report.entry("2d map + height (floor & ceiling)").unwrap();
        assert_eq!(bundle.bytes, occ_bytes + 8 * 100);

        let self_report = size_report(&vox, std::slice::from_ref(&vox)).unwrap();
        assert_eq!(self_report.entries[0].percent, 100.0);
        assert!(size_report(dir.path().join("nope"), &[]).is_err());
    }

    proptest! {
        #[test]
        fn occupancy_round_trip(values in prop::collection::vec(prop::option::of(0.0f64..=1.0), 12)) {
            let g = occupancy(3, 4, |i, j| values[i * 4 + j]);
            let back: OccupancyGrid<f64> = decode_occupancy(&encode_occupancy(&g)).unwrap();
            prop_assert_eq!(back.kind(), MapKind::Ugv);
            for i in 0..3 {
                for j in 0..4 {
                    match (g.get(i, j), back.get(i, j)) {
                        (None, None) => {}
                        (Some(a), Some(b)) => prop_assert!((a - b).abs() <= 1.0 / 254.0),
                        _ => prop_assert!(false, "known/unknown flipped"),
                    }
                }
            }
        }

        #[test]
        fn height_round_trip_exact(values in prop::collection::vec(prop::option::of((-100.0f32..100.0, 0.0f32..10.0)), 12)) {
            let cells = Grid2::from_fn(3, 4, |i, j| {
                values[i * 4 + j].map(|(f, d)| HeightCell { floor: f, ceiling: f + d })
            });
            let g = GridGeometry { resolution: 0.1f32, origin: [0.0; 3], m: 3, n: 4 };
            let h = HeightMap::new(g, cells);
            prop_assert_eq!(decode_height::<f32>(&encode_height(&h, true)).unwrap(), h);
        }
    }
}
