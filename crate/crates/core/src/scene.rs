//! Synthetic voxel scenes with analytic ground truth, and exploration traces
//! that reveal a scene batch by batch.
//!
//! Each scene is described column by column: unknown, solid from bottom to
//! top, or open with an occupied floor slab below `floor_k`, free voxels in
//! `[floor_k, ceil_k)` and an occupied roof in `[ceil_k, roof_k)`. Heights in
//! the ground truth use the same layer-to-meter rule as the converter, so a
//! converted height map can be compared with it exactly.

use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::voxel::{Run, VoxelMap, VoxelState, VoxelUpdate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SceneKind {
    FlatRoom,
    Corridor,
    Ramp,
    Step,
    Overhang,
    LowWall,
    CrawlSpace,
    Composite,
}

impl SceneKind {
    pub const ALL: [SceneKind; 8] = [
        SceneKind::FlatRoom,
        SceneKind::Corridor,
        SceneKind::Ramp,
        SceneKind::Step,
        SceneKind::Overhang,
        SceneKind::LowWall,
        SceneKind::CrawlSpace,
        SceneKind::Composite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SceneKind::FlatRoom => "flat-room",
            SceneKind::Corridor => "corridor",
            SceneKind::Ramp => "ramp",
            SceneKind::Step => "step",
            SceneKind::Overhang => "overhang",
            SceneKind::LowWall => "low-wall",
            SceneKind::CrawlSpace => "crawl-space",
            SceneKind::Composite => "composite",
        }
    }
}

impl FromStr for SceneKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SceneKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown scene kind `{s}`"))
    }
}

/// Scene description. Lengths are meters; `height` is the total voxel
/// column height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub kind: SceneKind,
    pub resolution: f64,
    pub size_x: f64,
    pub size_y: f64,
    pub height: f64,
    pub origin: [f64; 3],
    pub seed: u64,
    /// Ramp gradient (rise over run).
    pub ramp_slope: f64,
    /// Total rise of ramps and height of steps.
    pub rise: f64,
    pub wall_height: f64,
    pub crawl_height: f64,
    pub overhang_clearance: f64,
    pub corridor_width: f64,
}

impl SceneSpec {
    /// Defaults at 0.1 m resolution. The origin sits one layer below zero so
    /// the floor surface of the base slab is at `z = 0`.
    pub fn new(kind: SceneKind) -> Self {
        let base = Self {
            kind,
            resolution: 0.1,
            size_x: 4.0,
            size_y: 4.0,
            height: 3.2,
            origin: [0.0, 0.0, -0.1],
            seed: 0,
            ramp_slope: 0.5,
            rise: 1.0,
            wall_height: 0.8,
            crawl_height: 0.5,
            overhang_clearance: 1.2,
            corridor_width: 1.0,
        };
        match kind {
            SceneKind::Corridor => Self {
                size_x: 8.0,
                size_y: 2.0,
                ..base
            },
            SceneKind::Ramp | SceneKind::Step => Self {
                size_x: 6.0,
                height: 4.2,
                ..base
            },
            SceneKind::Composite => Self {
                size_x: 8.0,
                size_y: 8.0,
                height: 4.2,
                ..base
            },
            _ => base,
        }
    }

    fn layers(&self, meters: f64) -> u32 {
        (meters / self.resolution).round().max(0.0) as u32
    }

    pub fn extent(&self) -> [u32; 3] {
        [
            self.layers(self.size_x).max(1),
            self.layers(self.size_y).max(1),
            self.layers(self.height).max(1),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellClass {
    Unknown,
    Solid,
    Open,
}

/// Construction of one column in voxel layers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ColumnShape {
    Unknown,
    Solid,
    Open {
        floor_k: u32,
        ceil_k: u32,
        roof_k: u32,
        surface: u32,
        slope: f64,
    },
}

impl ColumnShape {
    fn open(floor_k: u32, ceil_k: u32, surface: u32, slope: f64) -> Self {
        ColumnShape::Open {
            floor_k,
            ceil_k,
            roof_k: ceil_k + 1,
            surface,
            slope,
        }
    }

    fn runs(&self, height: u32) -> Vec<Run> {
        match *self {
            ColumnShape::Unknown => Vec::new(),
            ColumnShape::Solid => vec![Run::new(0, height, VoxelState::Occupied)],
            ColumnShape::Open {
                floor_k,
                ceil_k,
                roof_k,
                ..
            } => {
                let ceil_k = ceil_k.min(height);
                let roof_k = roof_k.min(height);
                vec![
                    Run::new(0, floor_k, VoxelState::Occupied),
                    Run::new(floor_k, ceil_k.saturating_sub(floor_k), VoxelState::Free),
                    Run::new(ceil_k, roof_k.saturating_sub(ceil_k), VoxelState::Occupied),
                ]
            }
        }
    }
}

/// Ground truth of one cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellTruth {
    pub class: CellClass,
    /// Bottom of the free span, meters.
    pub floor: Option<f64>,
    /// Top of the free span, meters.
    pub ceiling: Option<f64>,
    /// Analytic gradient of the generating surface.
    pub slope: Option<f64>,
    /// Identifier of the smooth surface the floor belongs to.
    pub surface: Option<u32>,
    /// Top of the known column, meters. Known voxels span from the map
    /// origin up to here.
    pub top: Option<f64>,
}

/// Ground-truth sidecar, row-major over `(m, n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneTruth {
    pub spec: SceneSpec,
    pub extent: [u32; 3],
    pub cells: Vec<CellTruth>,
}

impl SceneTruth {
    pub fn get(&self, m: usize, n: usize) -> &CellTruth {
        &self.cells[m * self.extent[1] as usize + n]
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> io::Result<()> {
        let text = serde_json::to_string(self).map_err(io::Error::other)?;
        fs::write(path, text)
    }

    pub fn read_json(path: impl AsRef<Path>) -> io::Result<Self> {
        serde_json::from_str(&fs::read_to_string(path)?).map_err(io::Error::other)
    }
}

pub struct Scene<T> {
    pub map: VoxelMap<T>,
    pub truth: SceneTruth,
}

/// Randomized obstacles of the composite scene.
struct Features {
    pillars: Vec<(u32, u32)>,
    boxes: Vec<(u32, u32, u32, u32, u32)>,
}

impl Features {
    fn generate(spec: &SceneSpec, m: u32, n: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let mut pillars = Vec::new();
        let mut boxes = Vec::new();
        if spec.kind == SceneKind::Composite && m > 8 && n > 8 {
            for _ in 0..6 {
                pillars.push((rng.gen_range(2..m / 2 - 2), rng.gen_range(2..n / 2 - 2)));
            }
            for _ in 0..4 {
                let x = rng.gen_range(2..m / 2 - 4);
                let y = rng.gen_range(n / 2 + 2..n - 6);
                let w = rng.gen_range(2..5);
                let h = rng.gen_range(2..5);
                let lift = rng.gen_range(3..9);
                boxes.push((x, y, w, h, lift));
            }
        }
        Self { pillars, boxes }
    }
}

impl SceneSpec {
    /// Shape of column `(m, n)`.
    pub fn column_shape(&self, m: u32, n: u32) -> ColumnShape {
        self.column_shape_with(
            m,
            n,
            &Features::generate(self, self.extent()[0], self.extent()[1]),
        )
    }

    fn column_shape_with(&self, m: u32, n: u32, features: &Features) -> ColumnShape {
        let [mm, nn, kk] = self.extent();
        let border = m == 0 || n == 0 || m + 1 == mm || n + 1 == nn;
        let top = kk.saturating_sub(1);
        let room = ColumnShape::open(1, top, 0, 0.0);
        let rise = self.layers(self.rise);
        match self.kind {
            SceneKind::FlatRoom => {
                if border {
                    ColumnShape::Solid
                } else {
                    room
                }
            }
            SceneKind::Corridor => {
                let width = self
                    .layers(self.corridor_width)
                    .min(nn.saturating_sub(2))
                    .max(1);
                let n0 = (nn - width) / 2;
                if n + 1 == n0 || n == n0 + width {
                    ColumnShape::Solid
                } else if (n0..n0 + width).contains(&n) {
                    if m == 0 || m + 1 == mm {
                        ColumnShape::Solid
                    } else {
                        room
                    }
                } else {
                    ColumnShape::Unknown
                }
            }
            SceneKind::Ramp => {
                if border {
                    return ColumnShape::Solid;
                }
                self.ramp_column(m, mm / 4, rise, top)
            }
            SceneKind::Step => {
                if border {
                    ColumnShape::Solid
                } else if m < mm / 2 {
                    room
                } else {
                    ColumnShape::open(1 + rise, top, 1, 0.0)
                }
            }
            SceneKind::Overhang => {
                if border {
                    return ColumnShape::Solid;
                }
                let mid = mm / 2;
                if m + 2 >= mid && m < mid + 2 {
                    let ceil_k = 1 + self.layers(self.overhang_clearance);
                    ColumnShape::Open {
                        floor_k: 1,
                        ceil_k,
                        roof_k: kk,
                        surface: 0,
                        slope: 0.0,
                    }
                } else {
                    room
                }
            }
            SceneKind::LowWall => {
                let mid = mm / 2;
                if border {
                    ColumnShape::Solid
                } else if m + 1 >= mid && m < mid + 1 {
                    ColumnShape::open(1 + self.layers(self.wall_height), top, 1, 0.0)
                } else {
                    room
                }
            }
            SceneKind::CrawlSpace => {
                if border {
                    ColumnShape::Solid
                } else if m >= mm / 2 {
                    ColumnShape::Open {
                        floor_k: 1,
                        ceil_k: 1 + self.layers(self.crawl_height),
                        roof_k: kk,
                        surface: 1,
                        slope: 0.0,
                    }
                } else {
                    room
                }
            }
            SceneKind::Composite => {
                if border {
                    return ColumnShape::Solid;
                }
                if features
                    .pillars
                    .iter()
                    .any(|&(x, y)| (x..x + 2).contains(&m) && (y..y + 2).contains(&n))
                {
                    return ColumnShape::Solid;
                }
                for (id, &(x, y, w, h, lift)) in features.boxes.iter().enumerate() {
                    if (x..x + w).contains(&m) && (y..y + h).contains(&n) {
                        return ColumnShape::open(1 + lift, top, 10 + id as u32, 0.0);
                    }
                }
                let (hx, hy) = (mm / 2, nn / 2);
                match (m >= hx, n >= hy) {
                    (true, false) => self.ramp_column(m, hx + 2, rise, top),
                    (true, true) if m + 1 >= hx + (mm - hx) / 2 && m < hx + (mm - hx) / 2 + 1 => {
                        ColumnShape::open(1 + self.layers(self.wall_height), top, 5, 0.0)
                    }
                    _ => room,
                }
            }
        }
    }

    /// Staircase ramp starting at column `m0`, climbing `rise` layers.
    fn ramp_column(&self, m: u32, m0: u32, rise: u32, top: u32) -> ColumnShape {
        let clearance = top.saturating_sub(1 + rise);
        let run = (f64::from(rise) / self.ramp_slope).ceil() as u32;
        let (lift, surface, slope) = if m < m0 {
            (0, 0, 0.0)
        } else if m < m0 + run {
            let lift = (self.ramp_slope * f64::from(m - m0)).floor() as u32;
            (lift.min(rise), 1, self.ramp_slope)
        } else {
            (rise, 2, 0.0)
        };
        ColumnShape::open(1 + lift, 1 + lift + clearance, surface, slope)
    }

    /// Generates the voxel map and its ground truth.
    pub fn build<T: Scalar>(&self) -> Scene<T> {
        let [mm, nn, kk] = self.extent();
        let features = Features::generate(self, mm, nn);
        let mut map = VoxelMap::new(
            T::lit(self.resolution),
            self.origin.map(T::lit),
            [mm, nn, kk],
        )
        .expect("scene geometry is valid");
        let res = self.resolution;
        let oz = self.origin[2];
        let height_at = |k: u32| oz + f64::from(k) * res;
        let mut cells = Vec::with_capacity((mm * nn) as usize);
        for m in 0..mm {
            for n in 0..nn {
                let shape = self.column_shape_with(m, n, &features);
                map.set_column_runs(m, n, shape.runs(kk))
                    .expect("scene columns fit the extent");
                cells.push(match shape {
                    ColumnShape::Unknown => CellTruth {
                        class: CellClass::Unknown,
                        floor: None,
                        ceiling: None,
                        slope: None,
                        surface: None,
                        top: None,
                    },
                    ColumnShape::Solid => CellTruth {
                        class: CellClass::Solid,
                        floor: None,
                        ceiling: None,
                        slope: None,
                        surface: None,
                        top: Some(height_at(kk)),
                    },
                    ColumnShape::Open {
                        floor_k,
                        ceil_k,
                        roof_k,
                        surface,
                        slope,
                    } => CellTruth {
                        class: CellClass::Open,
                        floor: Some(height_at(floor_k)),
                        ceiling: Some(height_at(ceil_k.min(kk))),
                        slope: Some(slope),
                        surface: Some(surface),
                        top: Some(height_at(roof_k.min(kk).max(ceil_k.min(kk)))),
                    },
                });
            }
        }
        Scene {
            map,
            truth: SceneTruth {
                spec: self.clone(),
                extent: [mm, nn, kk],
                cells,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    /// Batch `t` reveals every column with `m == t`.
    Sweep,
    /// Batch `t` reveals the columns at horizontal distance `[t, t + 1)`
    /// cells from the map center.
    Radial,
}

impl FromStr for TraceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sweep" => Ok(TraceKind::Sweep),
            "radial" => Ok(TraceKind::Radial),
            _ => Err(format!("unknown trace kind `{s}`")),
        }
    }
}

fn column_updates<T: Scalar>(map: &VoxelMap<T>, m: u32, n: u32, out: &mut Vec<VoxelUpdate>) {
    for run in map.known_runs(m, n) {
        for k in run.start..run.end() {
            out.push(VoxelUpdate::new(m, n, k, run.state));
        }
    }
}

/// Update batches that reveal `map` from an all-unknown start.
pub fn exploration_trace<T: Scalar>(map: &VoxelMap<T>, kind: TraceKind) -> Vec<Vec<VoxelUpdate>> {
    let [mm, nn, _] = map.extent();
    match kind {
        TraceKind::Sweep => (0..mm)
            .map(|m| {
                let mut batch = Vec::new();
                for n in 0..nn {
                    column_updates(map, m, n, &mut batch);
                }
                batch
            })
            .collect(),
        TraceKind::Radial => {
            let (cx, cy) = (f64::from(mm) / 2.0, f64::from(nn) / 2.0);
            let ring = |m: u32, n: u32| {
                (f64::from(m) + 0.5 - cx)
                    .hypot(f64::from(n) + 0.5 - cy)
                    .floor() as usize
            };
            let rings = ring(0, 0)
                .max(ring(mm - 1, nn - 1))
                .max(ring(0, nn - 1))
                .max(ring(mm - 1, 0))
                + 1;
            let mut batches = vec![Vec::new(); rings];
            for m in 0..mm {
                for n in 0..nn {
                    column_updates(map, m, n, &mut batches[ring(m, n)]);
                }
            }
            batches
        }
    }
}

/// Random batches of voxel writes within `extent`.
pub fn random_trace(
    extent: [u32; 3],
    batches: usize,
    per_batch: usize,
    seed: u64,
) -> Vec<Vec<VoxelUpdate>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states = [VoxelState::Occupied, VoxelState::Free, VoxelState::Unknown];
    (0..batches)
        .map(|_| {
            let count = rng.gen_range(0..=per_batch);
            (0..count)
                .map(|_| {
                    VoxelUpdate::new(
                        rng.gen_range(0..extent[0]),
                        rng.gen_range(0..extent[1]),
                        rng.gen_range(0..extent[2]),
                        states[rng.gen_range(0..3)],
                    )
                })
                .collect()
        })
        .collect()
}

fn state_code(state: VoxelState) -> u8 {
    match state {
        VoxelState::Unknown => 0,
        VoxelState::Occupied => 1,
        VoxelState::Free => 2,
    }
}

/// Trace text: one `batch i j k state` line per write, state 0 unknown,
/// 1 occupied, 2 free. `#` starts a comment line.
pub fn format_trace(batches: &[Vec<VoxelUpdate>]) -> String {
    let mut out = String::from("# batch i j k state\n");
    for (b, batch) in batches.iter().enumerate() {
        for u in batch {
            out.push_str(&format!(
                "{b} {} {} {} {}\n",
                u.i,
                u.j,
                u.k,
                state_code(u.state)
            ));
        }
    }
    out
}

pub fn parse_trace(text: &str) -> Result<Vec<Vec<VoxelUpdate>>, String> {
    let mut batches: Vec<Vec<VoxelUpdate>> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<u32> = line
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| format!("line {}: expected five unsigned integers", line_no + 1))?;
        let [b, i, j, k, s] = fields[..] else {
            return Err(format!(
                "line {}: expected five unsigned integers",
                line_no + 1
            ));
        };
        let state = match s {
            0 => VoxelState::Unknown,
            1 => VoxelState::Occupied,
            2 => VoxelState::Free,
            _ => return Err(format!("line {}: invalid state {s}", line_no + 1)),
        };
        let b = b as usize;
        if b >= batches.len() {
            batches.resize_with(b + 1, Vec::new);
        }
        batches[b].push(VoxelUpdate::new(i, j, k, state));
    }
    Ok(batches)
}
