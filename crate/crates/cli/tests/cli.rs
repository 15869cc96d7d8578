use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn homloss(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homloss"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(str::to_string).collect()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert_eq!(code(&homloss(out, &["frobnicate"])), 1);
    assert_eq!(code(&homloss(out, &["landscape", "--synthetic", "--axis", "up", "--range", "0:1"])), 1);
    assert_eq!(code(&homloss(out, &["landscape", "--synthetic", "--axis", "tx", "--range", "1"])), 1);
    let missing = out.join("nope.txt");
    let o = homloss(out, &["eval", "--synthetic", "--est", missing.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    fs::write(out.join("bad.txt"), "frame_0000 1 2 3\n").unwrap();
    let o = homloss(out, &["eval", "--synthetic", "--est", out.join("bad.txt").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert_eq!(code(&homloss(out, &["--help"])), 0);
}

#[test]
fn landscape_writes_one_row_per_step_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = homloss(
        &out,
        &["landscape", "--synthetic", "--axis", "tx", "--range", "-1:1", "--steps", "21", "--losses", "posenet,homography_global"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&out.join("landscape_posenet.csv"));
    assert_eq!(r.len(), 21);
    assert!(r[10].starts_with("0"));
    assert_eq!(rows(&out.join("landscape_homography_global.csv")).len(), 21);
    let manifest = fs::read_to_string(out.join("manifest.json")).unwrap();
    assert!(manifest.contains("landscape_posenet.csv"));
}

#[test]
fn homoscedastic_run_reports_log_variances() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let o = homloss(
        out,
        &["optimize", "--synthetic", "--loss", "homoscedastic", "--epochs", "10", "--batch", "4", "--s-q", "-3"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("run.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "epoch,mean_loss,train_mrd_px,s_t,s_q");
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert_eq!((first[3], first[4]), (0.0, -3.0));
    assert_eq!(text.lines().count(), 12);
    assert_eq!(rows(&out.join("final_poses.txt")).len(), 24);
}

#[test]
fn slab_modes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let o = homloss(out, &["slabs", "--synthetic", "--mode", "global", "--xmin", "1", "--xmax", "9"]);
    assert_eq!(code(&o), 0);
    assert_eq!(rows(&out.join("slabs.csv")), vec!["1.0000000000000000e0,9.0000000000000000e0"]);
    let o = homloss(out, &["slabs", "--synthetic", "--n-frames", "6", "--histogram-bins", "8"]);
    assert_eq!(code(&o), 0);
    assert_eq!(rows(&out.join("slabs.csv")).len(), 6);
    let counts: Vec<usize> = rows(&out.join("histogram_frame_0003.csv"))
        .iter()
        .map(|r| r.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(counts.len(), 8);
    assert!(counts.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(code(&homloss(out, &["slabs", "--synthetic", "--xmin", "1", "--xmax", "9"])), 1);
}

#[test]
fn gradcheck_tolerance_failure_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let o = homloss(out, &["gradcheck", "--loss", "posenet", "--samples", "10", "--tolerance", "1e-12"]);
    assert_eq!(code(&o), 3);
    assert!(out.join("manifest.json").exists());
    assert!(rows(&out.join("gradcheck_posenet.csv")).iter().any(|r| r.ends_with(",fail")));
}

#[test]
fn identity_sample_has_near_zero_gradient() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    let o = homloss(out, &["gradcheck", "--loss", "homography_local", "--samples", "3", "--include-identity"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let first = &rows(&out.join("gradcheck_homography_local.csv"))[0];
    let cols: Vec<&str> = first.split(',').collect();
    assert_eq!(cols[4], "identity");
    let (analytic, numeric): (f64, f64) = (cols[2].parse().unwrap(), cols[3].parse().unwrap());
    assert!(analytic < 1e-10 && numeric < 1e-10, "{first}");
}

#[test]
fn same_seed_same_bytes_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["--seed", "3", "optimize", "--synthetic", "--loss", "geometric", "--epochs", "15", "--batch", "8"];
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    assert_eq!(code(&homloss(&a, &args)), 0);
    assert_eq!(code(&homloss(&b, &args)), 0);
    let m = a.join("manifest.json");
    assert_eq!(code(&homloss(&c, &["--from-manifest", m.to_str().unwrap()])), 0);
    for f in ["run.csv", "final_poses.txt", "manifest.json"] {
        let first = fs::read(a.join(f)).unwrap();
        assert_eq!(first, fs::read(b.join(f)).unwrap(), "{f}");
        assert_eq!(first, fs::read(c.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn replay_rejects_modified_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let est = dir.path().join("est.txt");
    let first = dir.path().join("first");
    assert_eq!(code(&homloss(&first, &["optimize", "--synthetic", "--loss", "posenet", "--epochs", "1"])), 0);
    fs::copy(first.join("final_poses.txt"), &est).unwrap();
    let run = dir.path().join("eval");
    assert_eq!(code(&homloss(&run, &["eval", "--synthetic", "--est", est.to_str().unwrap()])), 0);
    fs::write(&est, fs::read_to_string(&est).unwrap().replace("frame_0000 ", "frame_0000  ")).unwrap();
    let m = run.join("manifest.json");
    let o = homloss(&dir.path().join("replay"), &["--from-manifest", m.to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
}
