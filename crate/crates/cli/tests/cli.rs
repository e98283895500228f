use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lowlight_core::{io, ImageF};
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lowlight"))
}

fn fixture(kind: &str, name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/data")
        .join(kind)
        .join(format!("{name}.png"))
}

fn run(cmd: &mut Command) -> (i32, String, String) {
    let Output {
        status,
        stdout,
        stderr,
    } = cmd.output().unwrap();
    (
        status.code().unwrap(),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

fn write_png(path: &Path, image: &ImageF) {
    io::save_rgb(image, path).unwrap();
}

#[test]
fn enhance_happy_path_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.png"), dir.path().join("b.png"));
    let input = fixture("low", "coffee");
    let (code, out, err) = run(bin().arg("enhance").arg(&input).arg("-o").arg(&a));
    assert_eq!(code, 0, "{err}");
    let json: Value = serde_json::from_str(out.trim()).unwrap();
    for key in [
        "gamma_star",
        "curve",
        "timings",
        "radius",
        "warnings",
        "dv_sequence",
    ] {
        assert!(json.get(key).is_some(), "missing {key} in {out}");
    }
    for key in [
        "curve_fit_ms",
        "global_ms",
        "filter_ms",
        "fuse_ms",
        "total_ms",
    ] {
        assert!(json["timings"][key].as_f64().unwrap() >= 0.0);
    }
    assert!(json["curve"]["a"].is_number());

    let (code, _, _) = run(bin().arg("enhance").arg(&input).arg("-o").arg(&b));
    assert_eq!(code, 0);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn png_round_trip_is_lossless() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.png"), dir.path().join("b.png"));
    let (code, _, _) = run(bin()
        .arg("enhance")
        .arg(fixture("low", "moon"))
        .arg("-o")
        .arg(&a));
    assert_eq!(code, 0);
    io::save_rgb(&io::load_rgb(&a).unwrap(), &b).unwrap();
    let (pa, pb) = (image_bytes(&a), image_bytes(&b));
    assert_eq!(pa, pb);
}

fn image_bytes(path: &Path) -> Vec<u8> {
    let img = io::load_rgb(path).unwrap();
    io::to_rgb8(&img).unwrap().into_raw()
}

#[test]
fn enhance_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.png");
    let (code, _, _) = run(bin()
        .args(["enhance", "/nonexistent/x.png", "-o"])
        .arg(&out));
    assert_eq!(code, 2);

    let garbage = dir.path().join("garbage.png");
    std::fs::write(&garbage, b"not an image").unwrap();
    let (code, _, _) = run(bin().arg("enhance").arg(&garbage).arg("-o").arg(&out));
    assert_eq!(code, 2);

    let (code, _, err) = run(bin()
        .arg("enhance")
        .arg(fixture("low", "coffee"))
        .arg("-o")
        .arg(&out)
        .args(["--lambda", "1.0"]));
    assert_eq!(code, 3);
    assert!(err.contains("(1, 2]"), "{err}");

    let (code, _, _) = run(bin()
        .arg("enhance")
        .arg(fixture("low", "coffee"))
        .arg("-o")
        .arg(&out)
        .args(["--gammas", "0.3,0.8"]));
    assert_eq!(code, 3);

    let (code, _, _) = run(bin().args(["enhance", "--bogus"]));
    assert_eq!(code, 3);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "lambda = 1.5\ndv_star = 1.5\n").unwrap();
    let out = dir.path().join("o.png");
    let input = fixture("low", "coffee");
    let (code, _, _) = run(bin()
        .arg("enhance")
        .arg(&input)
        .arg("-o")
        .arg(&out)
        .arg("--config")
        .arg(&cfg));
    assert_eq!(code, 3);
    // the flag wins over the file
    let (code, _, err) = run(bin()
        .arg("enhance")
        .arg(&input)
        .arg("-o")
        .arg(&out)
        .arg("--config")
        .arg(&cfg)
        .args(["--dv", "0.2"]));
    assert_eq!(code, 0, "{err}");

    std::fs::write(&cfg, "lambda = 1.0\n").unwrap();
    let (code, _, err) = run(bin()
        .arg("enhance")
        .arg(&input)
        .arg("-o")
        .arg(&out)
        .arg("--config")
        .arg(&cfg));
    assert_eq!(code, 3);
    assert!(err.contains("(1, 2]"));
}

#[test]
fn curve_sweep_output() {
    let (code, out, err) = run(bin().arg("curve").arg(fixture("low", "chelsea")));
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "gamma,dv_measured,dv_fitted");
    // header + 39 rows + footer
    assert_eq!(lines.len(), 41);
    let footer: Value = serde_json::from_str(lines[40]).unwrap();
    for key in ["a", "b", "c", "fit_mse", "sweep_mse", "degenerate"] {
        assert!(footer.get(key).is_some());
    }
    assert_eq!(footer["degenerate"], false);

    let (code, _, _) = run(bin()
        .arg("curve")
        .arg(fixture("low", "chelsea"))
        .args(["--sweep", "2.2:0.3:0.05"]));
    assert_eq!(code, 3);
}

#[test]
fn curve_on_constant_image_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let flat = dir.path().join("flat.png");
    write_png(&flat, &ImageF::rgb_filled(32, 24, [0.2, 0.2, 0.2]));
    let (code, out, err) = run(bin().arg("curve").arg(&flat));
    assert_eq!(code, 0, "{err}");
    let footer: Value = serde_json::from_str(out.lines().last().unwrap()).unwrap();
    assert_eq!(footer["degenerate"], true);
}

#[test]
fn metrics_command() {
    let r = fixture("ref", "rocket");
    let (code, out, _) = run(bin().arg("metrics").arg(&r).arg(&r));
    assert_eq!(code, 0);
    let json: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(json["delta_e"], 0.0);
    assert_eq!(json["mssim"], 1.0);
    assert_eq!(json["psnr"], 99.0);
    assert_eq!(json["loe"], 0.0);

    let (code, out, _) = run(bin()
        .arg("metrics")
        .arg(&r)
        .arg(&r)
        .arg("--low")
        .arg(fixture("low", "rocket")));
    assert_eq!(code, 0);
    let json: Value = serde_json::from_str(out.trim()).unwrap();
    for key in ["delta_e", "psnr", "mssim", "loe", "dv_m", "ds_m", "d_m"] {
        assert!(json[key].is_number(), "{key}");
    }

    let (code, _, _) = run(bin().arg("metrics").arg(&r).arg(fixture("ref", "coffee")));
    assert_eq!(code, 4);
}

fn manifest(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("manifest.csv");
    std::fs::write(&path, format!("id,low,ref\n{body}")).unwrap();
    path
}

fn row(name: &str) -> String {
    format!(
        "{name},{},{}\n",
        fixture("low", name).display(),
        fixture("ref", name).display()
    )
}

#[test]
fn batch_all_valid() {
    let dir = tempfile::tempdir().unwrap();
    let names = ["coins", "moon", "camera"];
    let m = manifest(
        dir.path(),
        &names.iter().map(|n| row(n)).collect::<String>(),
    );
    let report = dir.path().join("report.csv");
    let json = dir.path().join("run.json");
    let (code, _, err) = run(bin()
        .arg("batch")
        .arg(&m)
        .arg("-o")
        .arg(&report)
        .arg("--json")
        .arg(&json)
        .arg("--out-dir")
        .arg(dir.path().join("out"))
        .args(["--jobs", "3"]));
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "id,gamma_star,fit_mse,delta_e,psnr,mssim,loe,dv_m,ds_m,d_m,total_ms"
    );
    assert_eq!(lines.len(), 5);
    for (line, name) in lines[1..4].iter().zip(names) {
        assert!(line.starts_with(&format!("{name},")));
        assert!(!line.contains("error"));
    }
    assert!(lines[4].starts_with("mean,"));
    for name in names {
        assert!(dir.path().join("out").join(format!("{name}.png")).exists());
    }
    let run_report: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(run_report["rows"].as_array().unwrap().len(), 3);
    assert_eq!(run_report["config"]["dv_star"], 0.25);
}

#[test]
fn batch_bad_row_is_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let body = format!(
        "{}missing,/nonexistent/low.png,\n{}",
        row("coins"),
        row("moon")
    );
    let m = manifest(dir.path(), &body);
    let (code, out, err) = run(bin().arg("batch").arg(&m));
    assert_eq!(code, 0, "{err}");
    assert!(err.contains("missing"));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[2].starts_with("missing,error"));

    let psnr = |line: &str| line.split(',').nth(4).unwrap().parse::<f64>().unwrap();
    let expected = (psnr(lines[1]) + psnr(lines[3])) / 2.0;
    assert!((psnr(lines[4]) - expected).abs() < 1e-9);
}

#[test]
fn batch_manifest_errors() {
    let dir = tempfile::tempdir().unwrap();
    let empty = manifest(dir.path(), "");
    let (code, _, _) = run(bin().arg("batch").arg(&empty));
    assert_eq!(code, 3);
    let (code, _, _) = run(bin().arg("batch").arg(dir.path().join("absent.csv")));
    assert_eq!(code, 2);
}
