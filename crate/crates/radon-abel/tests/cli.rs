//! End-to-end tests of the command-line interface: pipeline wiring, output
//! formats, warnings, and the documented exit codes (0 ok, 2 usage,
//! 3 input file, 4 numerical).

use std::path::Path;
use std::process::{Command, Output};

fn exe() -> &'static str {
    env!("CARGO_BIN_EXE_radon-abel")
}

fn run(args: &[&str]) -> Output {
    Command::new(exe()).args(args).output().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_two_disc_phantom(dir: &Path) -> String {
    let path = dir.join("p.txt");
    std::fs::write(&path, "disc 0 0 2 1\ndisc 1 0 0.5 1\n").unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn full_pipeline_from_phantom_to_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();

    let out = run(&[
        "phantom",
        "--disc", "0", "0", "2", "1",
        "--disc", "1", "0", "0.5", "1",
        "--out", &format!("{d}/p.txt"),
        "--truth-grid", &format!("{d}/truth.csv"),
        "--nx", "9", "--ny", "9",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(
        std::fs::read_to_string(format!("{d}/p.txt")).unwrap(),
        "disc 0 0 2 1\ndisc 1 0 0.5 1\n"
    );

    let out = run(&[
        "sinogram",
        "--phantom", &format!("{d}/p.txt"),
        "--npsi", "64", "--nt", "512",
        "--tmin", "-3", "--tmax", "3",
        "--out", &format!("{d}/s.sino"),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));

    let out = run(&[
        "reconstruct",
        "--sinogram", &format!("{d}/s.sino"),
        "--alpha", "0.3",
        "--method", "split",
        "--nx", "9", "--ny", "9",
        "--out", &format!("{d}/rec"),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    // No analytic truth from a sinogram source.
    assert!(stdout(&out).contains("no analytic truth"));
    assert!(Path::new(&format!("{d}/rec.csv")).exists());
    assert!(Path::new(&format!("{d}/rec.pgm")).exists());
    assert!(Path::new(&format!("{d}/rec.report.txt")).exists());

    let out = run(&[
        "compare",
        &format!("{d}/rec.csv"),
        "--phantom", &format!("{d}/p.txt"),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("rmse:"), "{text}");
    assert!(text.contains("exact local average"), "{text}");

    let out = run(&[
        "compare",
        &format!("{d}/rec.csv"),
        &format!("{d}/rec.csv"),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("rmse: 0.0"), "{}", stdout(&out));
}

#[test]
fn reconstruct_from_phantom_reports_against_truth() {
    let dir = tempfile::tempdir().unwrap();
    let phantom = write_two_disc_phantom(dir.path());
    let prefix = dir.path().join("rec");
    let out = run(&[
        "reconstruct",
        "--phantom", &phantom,
        "--alpha", "0.5",
        "--method", "oracle",
        "--nx", "7", "--ny", "7",
        "--out", prefix.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let report = std::fs::read_to_string(prefix.with_extension("report.txt")).unwrap();
    assert!(report.contains("method: oracle"), "{report}");
    assert!(report.contains("rmse:"), "{report}");

    let pgm = std::fs::read_to_string(prefix.with_extension("pgm")).unwrap();
    assert!(pgm.starts_with("P2\n"), "{pgm}");
    assert!(pgm.contains("min="), "{pgm}");
    let dims = pgm.lines().nth(2).unwrap();
    assert_eq!(dims, "7 7");
}

#[test]
fn truth_grid_hits_the_exact_corner_average() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    // 3x3 cells over [0,3]^2 put a point exactly at the square corner (1,1).
    let out = run(&[
        "phantom",
        "--rect", "0", "0", "1", "1", "1",
        "--out", &format!("{d}/q.txt"),
        "--truth-grid", &format!("{d}/truth.csv"),
        "--xmin", "-1.5", "--xmax", "4.5",
        "--ymin", "-1.5", "--ymax", "4.5",
        "--nx", "3", "--ny", "3",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let truth = std::fs::read_to_string(format!("{d}/truth.csv")).unwrap();
    // Centers at -0.5, 1.5, 3.5: (-0.5,-0.5) interior -> 1, rest 0 or edge-free.
    assert!(truth.contains("-0.5,-0.5,1"), "{truth}");
    assert!(truth.contains("1.5,1.5,0"), "{truth}");
}

#[test]
fn kernel_profile_emits_critical_values_and_samples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("prof.csv");
    let out = run(&[
        "kernel-profile",
        "--alpha", "0.2",
        "--samples", "41",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("peak_value=1.266514795529222"), "{text}");
    assert!(text.contains("zero_left=-0.2 zero_right=0.2"), "{text}");
    assert!(text.contains("t_min_right=0.34641016151377546"), "{text}");
    // Header comments + column header + 41 sample rows.
    assert_eq!(text.lines().count(), 3 + 41);
    // The sample at t = 0 is the peak.
    assert!(text.contains("0,1.266514795529222"), "{text}");
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let phantom = write_two_disc_phantom(dir.path());

    let out = run(&["reconstruct", "--alpha", "0.1", "--out", "x"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));

    let out = run(&["--bogus-flag"]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&[
        "reconstruct",
        "--phantom", &phantom,
        "--alpha", "-0.5",
        "--out", dir.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));

    // Oracle from a sinogram is an incompatible method/source pair.
    let sino = dir.path().join("s.sino");
    let ph = radon_abel::Phantom::parse("disc 0 0 1 1\n").unwrap();
    radon_abel::Sinogram::sample(&ph, 4, 16, (-2.0, 2.0))
        .unwrap()
        .write(&sino)
        .unwrap();
    let out = run(&[
        "reconstruct",
        "--sinogram", sino.to_str().unwrap(),
        "--alpha", "0.1",
        "--method", "oracle",
        "--out", dir.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn input_file_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "reconstruct",
        "--phantom", "does-not-exist.txt",
        "--alpha", "0.1",
        "--out", dir.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));

    let bad = dir.path().join("bad.sino");
    std::fs::write(&bad, "SINOGRAM v1 n_psi=2 n_t=2 t_min=-1 t_max=1\n0 zap\n0 0\n").unwrap();
    let out = run(&[
        "reconstruct",
        "--sinogram", bad.to_str().unwrap(),
        "--alpha", "0.1",
        "--out", dir.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    // The parse error names the position.
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let bad_phantom = dir.path().join("bad.txt");
    std::fs::write(&bad_phantom, "disc 0 0 2 1\nsphere 0 0 1 1\n").unwrap();
    let out = run(&[
        "sinogram",
        "--phantom", bad_phantom.to_str().unwrap(),
        "--npsi", "4", "--nt", "16",
        "--tmin", "-2", "--tmax", "2",
        "--out", dir.path().join("s").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    // Mismatched grids cannot be compared.
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let geom_a = radon_abel::GridGeom::new((0.0, 1.0), (0.0, 1.0), 2, 2).unwrap();
    let geom_b = radon_abel::GridGeom::new((0.0, 1.0), (0.0, 1.0), 3, 3).unwrap();
    radon_abel::ReconGrid::from_fn(geom_a, |_, _| 0.0).write_csv(&a).unwrap();
    radon_abel::ReconGrid::from_fn(geom_b, |_, _| 0.0).write_csv(&b).unwrap();
    let out = run(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn numerical_failures_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let phantom = write_two_disc_phantom(dir.path());
    let out = run(&[
        "reconstruct",
        "--phantom", &phantom,
        "--alpha", "1e-200",
        "--nx", "2", "--ny", "2",
        "--out", dir.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    assert!(stderr(&out).contains("grid point"), "{}", stderr(&out));
}

#[test]
fn warnings_are_printed_to_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let phantom = write_two_disc_phantom(dir.path());

    // Sinogram t range that clips the support radius 2.
    let out = run(&[
        "sinogram",
        "--phantom", &phantom,
        "--npsi", "4", "--nt", "16",
        "--tmin", "-1", "--tmax", "1",
        "--out", dir.path().join("s.sino").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("does not cover"), "{}", stderr(&out));

    // Naive rule with the peak far below the panel width.
    let out = run(&[
        "reconstruct",
        "--phantom", &phantom,
        "--alpha", "0.01",
        "--method", "naive",
        "--nx", "3", "--ny", "3",
        "--quiet",
        "--out", dir.path().join("x").to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("slips between samples"), "{}", stderr(&out));

    // Tiny alpha triggers the peak-magnitude warning on the profile too.
    let out = run(&[
        "kernel-profile",
        "--alpha", "1e-7",
        "--samples", "3",
        "--out", dir.path().join("prof.csv").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("peak"), "{}", stderr(&out));
}

#[test]
fn quiet_silences_stdout_but_not_warnings() {
    let dir = tempfile::tempdir().unwrap();
    let phantom = write_two_disc_phantom(dir.path());
    let out = run(&[
        "reconstruct",
        "--phantom", &phantom,
        "--alpha", "0.5",
        "--nx", "3", "--ny", "3",
        "--quiet",
        "--out", dir.path().join("q").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty(), "{}", stdout(&out));
}
