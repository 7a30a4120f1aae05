//! End-to-end runs of the `voxproj` binary.

use std::ffi::OsStr;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use voxproj::io::{read_header, read_occupancy, GridKind};
use voxproj::path::read_path3d;
use voxproj::scene::SceneTruth;

fn voxproj<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_voxproj"))
        .args(args)
        .output()
        .unwrap()
}

fn synth(dir: &Path, kind: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(format!("{kind}.vxg"));
    let mut args = vec!["synth", kind, "-o", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = voxproj(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    out
}

fn convert(vxg: &Path, out: &Path) {
    let o = voxproj([
        OsStr::new("convert"),
        vxg.as_os_str(),
        OsStr::new("-o"),
        out.as_os_str(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn convert_flat_room() {
    let dir = tempfile::tempdir().unwrap();
    let vxg = synth(dir.path(), "flat-room", &[]);
    let out = dir.path().join("maps");
    convert(&vxg, &out);
    for (file, kind) in [
        ("uav.v2g", GridKind::Occupancy),
        ("ugv.v2g", GridKind::Occupancy),
        ("height.v2g", GridKind::HeightFloorCeiling),
        ("slope.v2g", GridKind::Slope),
    ] {
        assert_eq!(read_header(out.join(file)).unwrap().kind, kind, "{file}");
    }
    let uav = read_occupancy::<f64>(out.join("uav.v2g")).unwrap();
    let (dm, dn) = uav.dims();
    for m in 1..dm - 1 {
        for n in 1..dn - 1 {
            assert!(uav.is_free(m, n), "({m}, {n})");
        }
    }
    assert!(uav.is_occupied(0, 5));

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["params"]["r_max_z"], 1.0);
    assert_eq!(manifest["params"]["s_a"], 2);
    assert!(manifest["wall_time_ms"].as_f64().is_some());
}

#[test]
fn convert_missing_input() {
    let dir = tempfile::tempdir().unwrap();
    let o = voxproj([
        "convert",
        "/nonexistent/map.vxg",
        "-o",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("map.vxg"));
}

#[test]
fn usage_errors() {
    assert_eq!(voxproj(["--help"]).status.code(), Some(0));
    assert_eq!(voxproj(["convert", "x.vxg"]).status.code(), Some(1));
    assert_eq!(
        voxproj(["synth", "cave", "-o", "x.vxg"]).status.code(),
        Some(1)
    );
    assert_eq!(
        voxproj(["diff", "a", "b", "--tolerance", "-1"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn lift_flat_room_uav() {
    let dir = tempfile::tempdir().unwrap();
    let vxg = synth(dir.path(), "flat-room", &[]);
    let maps = dir.path().join("maps");
    convert(&vxg, &maps);
    let out = dir.path().join("path3d.txt");
    let o = voxproj([
        "lift",
        "--maps",
        maps.to_str().unwrap(),
        "--mode",
        "uav",
        "--start",
        "5,5",
        "--goal",
        "30,30",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let path = read_path3d::<f64>(&out).unwrap();
    assert_eq!(path.waypoints.len(), 26);
    assert!(path.waypoints.iter().all(|w| w[2] == 1.0));
    assert!((path.waypoints[0][0] - 0.55).abs() < 1e-9);
}

#[test]
fn lift_step_ugv_tracks_floor() {
    let dir = tempfile::tempdir().unwrap();
    let vxg = synth(dir.path(), "step", &[]);
    let truth = SceneTruth::read_json(vxg.with_extension("truth.json")).unwrap();
    let maps = dir.path().join("maps");
    convert(&vxg, &maps);
    let [dm, dn, _] = truth.extent;
    let n = dn as usize / 2;
    let cells: Vec<usize> = (2..dm as usize - 2).collect();
    let path_in = dir.path().join("path.txt");
    fs::write(
        &path_in,
        cells
            .iter()
            .map(|m| format!("{m} {n}\n"))
            .collect::<String>(),
    )
    .unwrap();
    let out = dir.path().join("path3d.txt");
    let o = voxproj([
        "lift",
        "--maps",
        maps.to_str().unwrap(),
        "--mode",
        "ugv",
        "--path",
        path_in.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let path = read_path3d::<f64>(&out).unwrap();
    // 0.5 m look-ahead at 0.1 m resolution is five waypoints.
    for (i, w) in path.waypoints.iter().enumerate() {
        let lo = i.saturating_sub(5);
        let hi = (i + 5).min(cells.len() - 1);
        let floor = (lo..=hi)
            .map(|j| truth.get(cells[j], n).floor.unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(
            (w[2] - (floor + 0.1)).abs() < 1e-6,
            "waypoint {i}: {} vs {}",
            w[2],
            floor + 0.1
        );
    }
    assert!(path.waypoints.first().unwrap()[2] < 0.2);
    assert!(path.waypoints.last().unwrap()[2] > 1.0);
}

#[test]
fn lift_infeasible_clearance_reports_waypoint() {
    let dir = tempfile::tempdir().unwrap();
    // One meter of headroom over a 0.5 grade.
    let vxg = synth(dir.path(), "ramp", &["--height", "2.2"]);
    let maps = dir.path().join("maps");
    convert(&vxg, &maps);
    let path_in = dir.path().join("path.txt");
    fs::write(
        &path_in,
        (2..58).map(|m| format!("{m} 20\n")).collect::<String>(),
    )
    .unwrap();
    let out = dir.path().join("path3d.txt");
    let args = [
        "lift",
        "--maps",
        maps.to_str().unwrap(),
        "--path",
        path_in.to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ];
    let o = voxproj(args);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("waypoint 10"), "{}", stderr(&o));
    assert_eq!(stderr(&voxproj(args)), stderr(&o));
    assert!(!out.exists());
}

#[test]
fn lift_rejects_oversized_sphere() {
    let dir = tempfile::tempdir().unwrap();
    let vxg = synth(dir.path(), "flat-room", &[]);
    let maps = dir.path().join("maps");
    convert(&vxg, &maps);
    let o = voxproj([
        "lift",
        "--maps",
        maps.to_str().unwrap(),
        "--start",
        "5,5",
        "--goal",
        "6,6",
        "--r-r",
        "0.6",
        "-o",
        dir.path().join("p.txt").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn synth_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let va = synth(a.path(), "composite", &["--seed", "4"]);
    let vb = synth(b.path(), "composite", &["--seed", "4"]);
    assert_eq!(fs::read(&va).unwrap(), fs::read(&vb).unwrap());
    assert_eq!(
        fs::read(va.with_extension("truth.json")).unwrap(),
        fs::read(vb.with_extension("truth.json")).unwrap()
    );
}

#[test]
fn synth_ramp_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let vxg = synth(dir.path(), "ramp", &["--ramp-slope", "0.5"]);
    let truth = SceneTruth::read_json(vxg.with_extension("truth.json")).unwrap();
    let ramp: Vec<_> = truth
        .cells
        .iter()
        .filter(|c| c.surface == Some(1))
        .collect();
    assert!(!ramp.is_empty());
    assert!(ramp.iter().all(|c| c.slope == Some(0.5)));
}

fn bench_rows(args: &[&str]) -> Vec<Vec<u64>> {
    let o = voxproj(args);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("update,columns_dirty,slope_cells,occupancy_cells,wall_time_us")
    );
    lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn bench_empty_trace_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let vxg = synth(dir.path(), "flat-room", &[]);
    let trace = dir.path().join("empty.trace");
    fs::write(&trace, "# nothing\n").unwrap();
    let rows = bench_rows(&[
        "bench",
        "--vxg",
        vxg.to_str().unwrap(),
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert!(rows.is_empty());
}

#[test]
fn bench_corridor_counts_are_constant() {
    let rows = bench_rows(&["bench", "--scene", "corridor", "--trace-kind", "sweep"]);
    assert_eq!(rows.len(), 80);
    // Away from the corridor ends every sweep step touches the same cells.
    let interior = &rows[4..76];
    for r in interior {
        assert_eq!(r[1..4], interior[0][1..4], "row {}", r[0]);
    }
    assert_eq!(interior[0][1..4], [12, 80, 126]);
}

#[test]
fn bench_open_area_counts_grow_with_frontier() {
    let rows = bench_rows(&["bench", "--scene", "flat-room", "--trace-kind", "radial"]);
    let cols: Vec<u64> = rows.iter().map(|r| r[1]).collect();
    let occ: Vec<u64> = rows.iter().map(|r| r[3]).collect();
    for (a, b) in [(1, 5), (5, 10), (10, 15)] {
        assert!(cols[b] > cols[a], "{cols:?}");
        assert!(occ[b] > occ[a], "{occ:?}");
    }
}

#[test]
fn bench_trace_file_from_synth() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("sweep.trace");
    synth(
        dir.path(),
        "corridor",
        &["--trace", "sweep", "--trace-out", trace.to_str().unwrap()],
    );
    let from_file = bench_rows(&[
        "bench",
        "--scene",
        "corridor",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    let generated = bench_rows(&["bench", "--scene", "corridor"]);
    let strip = |rows: &[Vec<u64>]| rows.iter().map(|r| r[..4].to_vec()).collect::<Vec<_>>();
    assert_eq!(strip(&from_file), strip(&generated));
}

#[test]
fn diff_and_size() {
    let dir = tempfile::tempdir().unwrap();
    let vxg = synth(dir.path(), "low-wall", &[]);
    let maps = dir.path().join("maps");
    convert(&vxg, &maps);
    let uav = maps.join("uav.v2g");
    let ugv = maps.join("ugv.v2g");

    let same = voxproj([OsStr::new("diff"), uav.as_os_str(), uav.as_os_str()]);
    assert_eq!(same.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&same.stdout).contains("differing 0"));

    let differ = voxproj([OsStr::new("diff"), uav.as_os_str(), ugv.as_os_str()]);
    assert_eq!(differ.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&differ.stdout).contains("differing 0"));

    let mismatch = voxproj([
        OsStr::new("diff"),
        uav.as_os_str(),
        maps.join("slope.v2g").as_os_str(),
    ]);
    assert_eq!(mismatch.status.code(), Some(2));

    let size = voxproj([
        OsStr::new("size"),
        vxg.as_os_str(),
        uav.as_os_str(),
        maps.join("height.v2g").as_os_str(),
    ]);
    assert!(size.status.success());
    let text = String::from_utf8_lossy(&size.stdout);
    assert!(text.contains("uav.v2g"));
    assert!(text.contains("2d map + height (floor & ceiling)"));
}
