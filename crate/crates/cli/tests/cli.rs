use std::path::PathBuf;
use std::process::{Command, Output};

fn drum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("drum-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn without_timing(s: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(s).unwrap();
    v.as_object_mut().unwrap().remove("timing_seconds");
    v
}

#[test]
fn solve_disk_first_eigenfrequency() {
    let o = drum(&["solve", "--shape", "disk", "--interval", "2", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let roots = v["eigenfrequencies"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    let k = roots[0]["kappa"].as_f64().unwrap();
    assert!((k - 2.404825557695773).abs() <= 1e-10);
    assert_eq!(roots[0]["method"], "boyd-det");
    assert!(roots[0]["err_est"].as_f64().unwrap() <= 1e-9);
    assert!(v["evaluations"]["determinant"].as_u64().unwrap() > 0);
}

#[test]
fn solve_nonsymmetric_with_double_layer() {
    let shape = r#"{"type":"radial","a0":1,"cos":[0,0,0.2],"sin":[0,0.3]}"#;
    let o = drum(&[
        "solve", "--shape", shape, "--interval", "20.4", "20.5", "--eta", "0", "--n-rule", "200", "--no-estimates",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["representation"], "dlp");
    // κ₁₀₀ and κ₁₀₁ ≈ 20.4938 both lie in the interval
    let roots = v["eigenfrequencies"].as_array().unwrap();
    assert_eq!(roots.len(), 2);
    assert!((roots[0]["kappa"].as_f64().unwrap() - 20.4300941760382).abs() <= 1e-9);
    assert!((roots[1]["kappa"].as_f64().unwrap() - 20.4938073997339).abs() <= 1e-9);
    assert!(roots.iter().all(|r| r["N"] == 200 && r["spurious"] == false));
}

#[test]
fn solve_reads_shape_files_and_writes_csv() {
    let dir = scratch("csv");
    let shape = dir.join("ellipse.json");
    std::fs::write(&shape, r#"{"type":"ellipse","a":1.0,"b":1.0}"#).unwrap();
    let out = dir.join("roots.csv");
    let o = drum(&[
        "solve",
        "--shape",
        shape.to_str().unwrap(),
        "--interval",
        "3.5",
        "4.2",
        "--format",
        "csv",
        "--no-estimates",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let body = std::fs::read_to_string(out).unwrap();
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines[0], "kappa,beta,method,N,err_est,spurious,sigma_min");
    // j_{1,1} is double
    assert_eq!(lines.len(), 3);
    for l in &lines[1..] {
        let k: f64 = l.split(',').next().unwrap().parse().unwrap();
        assert!((k - 3.831705970207512).abs() <= 1e-10);
    }
}

#[test]
fn solve_output_is_deterministic() {
    let args = ["solve", "--shape", "nonsymmetric", "--interval", "4", "5.5"];
    let a = drum(&args);
    let b = drum(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(without_timing(&stdout(&a)), without_timing(&stdout(&b)));
}

#[test]
fn malformed_shapes_exit_1() {
    for shape in [
        r#"{"type":"ellipse","a":-1,"b":1}"#,
        r#"{"type":"radial","a0":0.1,"cos":[0.5]}"#,
        r#"{"type":"hexagon"}"#,
        "/nonexistent/shape.json",
    ] {
        let o = drum(&["solve", "--shape", shape, "--interval", "2", "3"]);
        assert_eq!(o.status.code(), Some(1), "{shape}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("malformed shape"));
    }
}

#[test]
fn bad_arguments_exit_1() {
    assert_eq!(drum(&["solve", "--shape", "disk", "--interval", "3", "2"]).status.code(), Some(1));
    assert_eq!(drum(&["solve", "--shape", "disk"]).status.code(), Some(1));
    assert_eq!(drum(&["solve", "--shape", "disk", "--interval", "2", "3", "--n-rule", "lots"]).status.code(), Some(1));
    assert_eq!(drum(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(drum(&["--help"]).status.code(), Some(0));
}

#[test]
fn modes_off_spectrum_exit_2() {
    let dir = scratch("off");
    let o = drum(&["modes", "--shape", "disk", "--kappa", "2.5", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn modes_writes_grids_index_and_montage() {
    let dir = scratch("modes");
    let o = drum(&[
        "modes",
        "--shape",
        "disk",
        "--interval",
        "2",
        "4",
        "--grid",
        "40",
        "40",
        "--montage",
        "2",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let index: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("modes.json")).unwrap()).unwrap();
    // j01 and the double j11, which gives one mode
    assert_eq!(index.as_array().unwrap().len(), 2);
    let grid = std::fs::File::open(dir.join("mode_001.grid")).unwrap();
    let g = drum_core::modes::ModeGrid::read_binary(grid).unwrap();
    assert_eq!((g.nx, g.ny), (40, 40));
    assert!(g.values.iter().all(|v| v.is_finite()));
    assert!((g.kappa - 2.404825557695773).abs() <= 1e-10);
    let img = image::open(dir.join("montage.png")).unwrap();
    assert!(img.width() > 80);
}

#[test]
fn sweep_writes_both_columns() {
    let o = drum(&["sweep", "--shape", "disk", "--interval", "2.3", "2.5", "--samples", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let body = stdout(&o);
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines[0], "kappa,sigma_min_dlp,sigma_min_cfie");
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[1].split(',').count(), 3);
}

#[test]
fn sweep_annulus_dlp_dips_where_cfie_does_not() {
    // hole Neumann frequency j'_{1,1}/0.4
    let dir = scratch("sweep");
    let png = dir.join("sweep.png");
    let o = drum(&[
        "sweep", "--shape", "annulus", "--interval", "4.5", "4.7", "--samples", "41", "--plot",
        png.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<(f64, f64, f64)> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (f[0], f[1], f[2])
        })
        .collect();
    let near = rows
        .iter()
        .min_by(|a, b| (a.0 - 4.602959453).abs().total_cmp(&(b.0 - 4.602959453).abs()))
        .unwrap();
    let cfie_min = rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    assert!(near.1 < 1e-2, "{near:?}");
    assert!(cfie_min > 10.0 * near.1);
    assert!(png.exists());
}

#[test]
fn converge_csv() {
    let o = drum(&[
        "converge", "--shape", "nonsymmetric", "--kappa", "20.4300941760382", "--ns", "160,180,200",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let body = stdout(&o);
    let rows: Vec<Vec<&str>> = body.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(body.lines().next().unwrap(), "N,det_abs,root");
    assert_eq!(rows.len(), 3);
    let det: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(det[1] < det[0] / 10.0);
    let root: f64 = rows[2][2].parse().unwrap();
    assert!((root - 20.4300941760382).abs() <= 1e-12);
    assert_eq!(drum(&["converge", "--shape", "disk", "--kappa", "2.4", "--ns", "80,70"]).status.code(), Some(1));
}

#[test]
fn shapes_listing_and_json_round_trip() {
    let text = stdout(&drum(&["shapes"]));
    assert!(text.contains("crescent"));
    assert!(text.contains("radial"));
    assert!(text.contains("1 + 0.2 cos 3t + 0.3 sin 2t"));
    let o = drum(&["shapes", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for p in v.as_array().unwrap() {
        let spec: drum_core::geometry::ShapeSpec = serde_json::from_value(p["spec"].clone()).unwrap();
        spec.build().unwrap();
    }
}

#[test]
fn selftest_passes() {
    let o = drum(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("selftest passed"));
}
