//! Command-line interface.
//!
//! Exit codes: 0 success, 1 usage errors, 2 data errors (unreadable or
//! malformed inputs, infeasible paths, differing grids).

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::incremental::{ConversionState, DirtyReport};
use crate::io::{
    diff_grid_files, read_height, read_occupancy, size_report, write_height, write_occupancy,
    write_pgm, write_slope,
};
use crate::occupancy::MapKind;
use crate::params::ConversionParams;
use crate::path::{convert_path, parse_path2d, plan_2d, write_path3d, LiftParams};
use crate::scene::{exploration_trace, format_trace, parse_trace, SceneKind, SceneSpec, TraceKind};
use crate::slope::neighborhood_cells;
use crate::voxel::{load_voxel_map, save_voxel_map, VoxelMap};

pub const UAV_FILE: &str = "uav.v2g";
pub const UGV_FILE: &str = "ugv.v2g";
pub const HEIGHT_FILE: &str = "height.v2g";
pub const SLOPE_FILE: &str = "slope.v2g";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(
    name = "voxproj",
    version,
    about = "Voxel map to 2D map conversion and path lifting"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert a VXG voxel map into UAV/UGV occupancy, height and slope grids.
    Convert(ConvertArgs),
    /// Lift a 2D grid path into a 3D path.
    Lift(LiftArgs),
    /// Generate a synthetic scene and its ground-truth sidecar.
    Synth(SynthArgs),
    /// Replay an exploration trace through the incremental converter.
    Bench(BenchArgs),
    /// Compare two grid files cell by cell.
    Diff(DiffArgs),
    /// Report grid file sizes relative to the voxel map.
    Size(SizeArgs),
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// Minimum navigable free height, meters.
    #[arg(long, default_value_t = 1.0)]
    r_max_z: f64,
    /// Minimum occupancy ratio for boundary cells.
    #[arg(long, default_value_t = 0.5)]
    o_min: f64,
    /// Slope neighborhood radius, meters (rounded to whole cells, at least one).
    #[arg(long, default_value_t = 0.2)]
    s_a: f64,
    /// Maximum slope traversable by ground robots.
    #[arg(long, default_value_t = 2.0)]
    r_ms: f64,
}

impl ParamArgs {
    fn params(&self, resolution: f64) -> Result<ConversionParams<f64>, CliError> {
        let params = ConversionParams {
            r_max_z: self.r_max_z,
            o_min: self.o_min,
            s_a: neighborhood_cells(self.s_a, resolution),
            r_ms: self.r_ms,
        };
        params
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(params)
    }
}

#[derive(Debug, Args)]
struct ConvertArgs {
    /// Input VXG file.
    input: PathBuf,
    /// Output directory.
    #[arg(short, long)]
    out: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    /// Also write PGM images of both occupancy maps.
    #[arg(long)]
    pgm: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Uav,
    Ugv,
}

#[derive(Debug, Args)]
struct LiftArgs {
    /// Directory written by `convert`.
    #[arg(long)]
    maps: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Uav)]
    mode: Mode,
    /// 2D path file with one `m n` pair per line.
    #[arg(long, conflicts_with_all = ["start", "goal"])]
    path: Option<PathBuf>,
    /// Start cell `m,n`; plans over the mode's occupancy map.
    #[arg(long, value_parser = parse_cell, requires = "goal")]
    start: Option<(usize, usize)>,
    /// Goal cell `m,n`.
    #[arg(long, value_parser = parse_cell, requires = "start")]
    goal: Option<(usize, usize)>,
    /// Output 3D path file.
    #[arg(short, long)]
    out: PathBuf,
    /// Clearance sphere radius, meters (UAV).
    #[arg(long)]
    r_r: Option<f64>,
    /// Height above the floor, meters.
    #[arg(long)]
    r_off: Option<f64>,
    /// Look-ahead distance, meters.
    #[arg(long)]
    p_f: Option<f64>,
    /// Navigable height used to bound the sphere radius; read from the
    /// manifest when omitted.
    #[arg(long)]
    r_max_z: Option<f64>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(value_parser = parse_scene_kind)]
    kind: SceneKind,
    /// Output VXG file; the sidecar goes next to it as `<stem>.truth.json`.
    #[arg(short, long)]
    out: PathBuf,
    #[arg(long)]
    resolution: Option<f64>,
    #[arg(long)]
    size_x: Option<f64>,
    #[arg(long)]
    size_y: Option<f64>,
    #[arg(long)]
    height: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    ramp_slope: Option<f64>,
    #[arg(long)]
    rise: Option<f64>,
    #[arg(long)]
    wall_height: Option<f64>,
    #[arg(long)]
    crawl_height: Option<f64>,
    #[arg(long)]
    overhang_clearance: Option<f64>,
    #[arg(long)]
    corridor_width: Option<f64>,
    /// Also write an exploration trace of the scene.
    #[arg(long, value_parser = parse_trace_kind, requires = "trace_out")]
    trace: Option<TraceKind>,
    #[arg(long)]
    trace_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Synthetic scene to explore.
    #[arg(long, value_parser = parse_scene_kind, conflicts_with = "vxg", required_unless_present = "vxg")]
    scene: Option<SceneKind>,
    /// VXG map. With `--trace` the trace is applied on top of it; otherwise the
    /// map is revealed from empty.
    #[arg(long)]
    vxg: Option<PathBuf>,
    /// Trace file (`batch i j k state` lines).
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Generated trace when no trace file is given.
    #[arg(long, value_parser = parse_trace_kind, default_value = "sweep")]
    trace_kind: TraceKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    params: ParamArgs,
    /// CSV output; standard output when omitted.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DiffArgs {
    a: PathBuf,
    b: PathBuf,
    /// Largest absolute difference treated as equal.
    #[arg(long, default_value_t = 0.0)]
    tolerance: f64,
}

#[derive(Debug, Args)]
struct SizeArgs {
    /// VXG file the sizes are relative to.
    vxg: PathBuf,
    /// Grid files to report.
    grids: Vec<PathBuf>,
}

fn parse_cell(s: &str) -> Result<(usize, usize), String> {
    let (m, n) = s.split_once(',').ok_or("expected `m,n`")?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| e.to_string());
    Ok((parse(m)?, parse(n)?))
}

fn parse_scene_kind(s: &str) -> Result<SceneKind, String> {
    s.parse()
}

fn parse_trace_kind(s: &str) -> Result<TraceKind, String> {
    s.parse()
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

fn data(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match cli.command {
        Command::Convert(a) => convert(a),
        Command::Lift(a) => lift(a),
        Command::Synth(a) => synth(a),
        Command::Bench(a) => bench(a),
        Command::Diff(a) => diff(a),
        Command::Size(a) => size(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            match &e {
                CliError::Usage(msg) => eprintln!("usage error: {msg}"),
                CliError::Data(msg) => eprintln!("error: {msg}"),
            }
            e.code()
        }
    }
}

pub fn run_from_env() -> i32 {
    run(std::env::args_os())
}

fn convert(args: ConvertArgs) -> Result<i32, CliError> {
    let map: VoxelMap<f64> = load_voxel_map(&args.input)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.input.display())))?;
    let params = args.params.params(map.resolution())?;
    let started = Instant::now();
    let extent = map.extent();
    let state = ConversionState::init(map, params).map_err(|e| CliError::Usage(e.to_string()))?;
    let elapsed = started.elapsed();

    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.out.display())))?;
    write_occupancy(state.uav(), args.out.join(UAV_FILE)).map_err(data)?;
    write_occupancy(state.ugv(), args.out.join(UGV_FILE)).map_err(data)?;
    write_height(state.heights(), true, args.out.join(HEIGHT_FILE)).map_err(data)?;
    write_slope(state.slopes(), args.out.join(SLOPE_FILE)).map_err(data)?;
    let mut outputs = vec![UAV_FILE, UGV_FILE, HEIGHT_FILE, SLOPE_FILE];
    if args.pgm {
        write_pgm(state.uav(), args.out.join("uav.pgm")).map_err(data)?;
        write_pgm(state.ugv(), args.out.join("ugv.pgm")).map_err(data)?;
        outputs.extend(["uav.pgm", "ugv.pgm"]);
    }
    let manifest = json!({
        "input": args.input.display().to_string(),
        "resolution": state.map().resolution(),
        "origin": state.map().origin(),
        "extent": extent,
        "params": params,
        "s_a_meters": args.params.s_a,
        "outputs": outputs,
        "wall_time_ms": elapsed.as_secs_f64() * 1e3,
    });
    let text = serde_json::to_string_pretty(&manifest).map_err(data)?;
    write_file(&args.out.join(MANIFEST_FILE), text + "\n")?;
    Ok(0)
}

fn manifest_r_max_z(dir: &Path) -> Option<f64> {
    let text = fs::read_to_string(dir.join(MANIFEST_FILE)).ok()?;
    let value: serde_json::Value = serde_json::from_str(&text).ok()?;
    value["params"]["r_max_z"].as_f64()
}

fn lift(args: LiftArgs) -> Result<i32, CliError> {
    let heights = read_height::<f64>(args.maps.join(HEIGHT_FILE)).map_err(data)?;
    let res = heights.geometry().resolution;
    let (kind, grid_file) = match args.mode {
        Mode::Uav => (MapKind::Uav, UAV_FILE),
        Mode::Ugv => (MapKind::Ugv, UGV_FILE),
    };
    let mut params = match kind {
        MapKind::Uav => LiftParams::uav_defaults(res),
        MapKind::Ugv => LiftParams::ugv_defaults(res),
    };
    if let Some(r) = args.r_r {
        params.r_r = r;
    }
    if let Some(r) = args.r_off {
        params.r_off = r;
    }
    if let Some(p) = args.p_f {
        params.p_f = crate::path::window_steps(p, res);
    }
    let r_max_z = args
        .r_max_z
        .or_else(|| manifest_r_max_z(&args.maps))
        .unwrap_or(1.0);
    params
        .validate(r_max_z)
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let path2d = match (&args.path, args.start, args.goal) {
        (Some(p), _, _) => {
            let text = fs::read_to_string(p)
                .map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
            parse_path2d(&text).map_err(data)?
        }
        (None, Some(start), Some(goal)) => {
            let grid = read_occupancy::<f64>(args.maps.join(grid_file)).map_err(data)?;
            plan_2d(&grid, start, goal)
                .map_err(data)?
                .ok_or_else(|| CliError::Data(format!("no free path from {start:?} to {goal:?}")))?
        }
        _ => {
            return Err(CliError::Usage(
                "give --path or both --start and --goal".into(),
            ))
        }
    };
    let path3d = convert_path(&path2d, &heights, &params).map_err(data)?;
    write_path3d(&path3d, &args.out).map_err(data)?;
    Ok(0)
}

fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("truth.json")
}

fn synth(args: SynthArgs) -> Result<i32, CliError> {
    let mut spec = SceneSpec::new(args.kind);
    if let Some(r) = args.resolution {
        spec.origin[2] = -r;
        spec.resolution = r;
    }
    let overrides = [
        (args.size_x, &mut spec.size_x),
        (args.size_y, &mut spec.size_y),
        (args.height, &mut spec.height),
        (args.ramp_slope, &mut spec.ramp_slope),
        (args.rise, &mut spec.rise),
        (args.wall_height, &mut spec.wall_height),
        (args.crawl_height, &mut spec.crawl_height),
        (args.overhang_clearance, &mut spec.overhang_clearance),
        (args.corridor_width, &mut spec.corridor_width),
    ];
    for (value, field) in overrides {
        if let Some(v) = value {
            *field = v;
        }
    }
    spec.seed = args.seed;
    if !(spec.resolution > 0.0 && spec.ramp_slope > 0.0) {
        return Err(CliError::Usage(
            "resolution and ramp slope must be positive".into(),
        ));
    }
    let scene = spec.build::<f64>();
    save_voxel_map(&scene.map, &args.out)
        .map_err(|e| CliError::Data(format!("{}: {e}", args.out.display())))?;
    scene
        .truth
        .write_json(sidecar_path(&args.out))
        .map_err(data)?;
    if let (Some(kind), Some(out)) = (args.trace, &args.trace_out) {
        write_file(out, format_trace(&exploration_trace(&scene.map, kind)))?;
    }
    Ok(0)
}

fn bench(args: BenchArgs) -> Result<i32, CliError> {
    let (start, trace) = match (&args.scene, &args.vxg) {
        (Some(kind), _) => {
            let mut spec = SceneSpec::new(*kind);
            spec.seed = args.seed;
            let full = spec.build::<f64>().map;
            let empty =
                VoxelMap::new(full.resolution(), full.origin(), full.extent()).map_err(data)?;
            let trace = match &args.trace {
                Some(_) => None,
                None => Some(exploration_trace(&full, args.trace_kind)),
            };
            (empty, trace)
        }
        (None, Some(path)) => {
            let map: VoxelMap<f64> = load_voxel_map(path)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            if args.trace.is_some() {
                (map, None)
            } else {
                let trace = exploration_trace(&map, args.trace_kind);
                let empty =
                    VoxelMap::new(map.resolution(), map.origin(), map.extent()).map_err(data)?;
                (empty, Some(trace))
            }
        }
        (None, None) => return Err(CliError::Usage("give --scene or --vxg".into())),
    };
    let trace = match (trace, &args.trace) {
        (Some(t), _) => t,
        (None, Some(path)) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
            parse_trace(&text).map_err(CliError::Data)?
        }
        (None, None) => unreachable!("a trace is generated when no file is given"),
    };

    let params = args.params.params(start.resolution())?;
    let mut state =
        ConversionState::init(start, params).map_err(|e| CliError::Usage(e.to_string()))?;
    let mut csv = String::from(DirtyReport::CSV_HEADER);
    csv.push('\n');
    for (index, batch) in trace.iter().enumerate() {
        let report = state.update(batch).map_err(data)?;
        csv.push_str(&report.csv_row(index));
        csv.push('\n');
    }
    match &args.out {
        Some(path) => write_file(path, csv)?,
        None => io::stdout().write_all(csv.as_bytes()).map_err(data)?,
    }
    Ok(0)
}

fn diff(args: DiffArgs) -> Result<i32, CliError> {
    if args.tolerance.is_nan() || args.tolerance < 0.0 {
        return Err(CliError::Usage("tolerance must be non-negative".into()));
    }
    let d = diff_grid_files(&args.a, &args.b, args.tolerance).map_err(data)?;
    println!(
        "cells {} differing {} max_abs {}",
        d.cells, d.differing, d.max_abs
    );
    Ok(if d.differing == 0 { 0 } else { 2 })
}

fn size(args: SizeArgs) -> Result<i32, CliError> {
    let report = size_report(&args.vxg, &args.grids).map_err(data)?;
    print!("{report}");
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cell_argument() {
        assert_eq!(parse_cell("3,4"), Ok((3, 4)));
        assert_eq!(parse_cell(" 3, 4"), Ok((3, 4)));
        assert!(parse_cell("3").is_err());
        assert!(parse_cell("a,4").is_err());
    }

    #[test]
    fn usage_and_help_codes() {
        assert_eq!(run(["voxproj", "--help"]), 0);
        assert_eq!(run(["voxproj", "--version"]), 0);
        assert_eq!(run(["voxproj"]), 1);
        assert_eq!(run(["voxproj", "convert"]), 1);
        assert_eq!(run(["voxproj", "frobnicate"]), 1);
    }

    #[test]
    fn missing_input_is_a_data_error() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.vxg");
        let out = dir.path().join("out");
        let code = run([
            "voxproj".as_ref(),
            "convert".as_ref(),
            missing.as_os_str(),
            "-o".as_ref(),
            out.as_os_str(),
        ]);
        assert_eq!(code, 2);
    }

    #[test]
    fn bad_parameter_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let vxg = dir.path().join("room.vxg");
        assert_eq!(
            run([
                "voxproj".as_ref(),
                "synth".as_ref(),
                "flat-room".as_ref(),
                "-o".as_ref(),
                vxg.as_os_str()
            ]),
            0
        );
        let out = dir.path().join("out");
        let code = run([
            "voxproj".as_ref(),
            "convert".as_ref(),
            vxg.as_os_str(),
            "-o".as_ref(),
            out.as_os_str(),
            "--o-min".as_ref(),
            "1.5".as_ref(),
        ]);
        assert_eq!(code, 1);
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(
            sidecar_path(Path::new("a/room.vxg")),
            PathBuf::from("a/room.truth.json")
        );
    }
}
