use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use seqhop::frameio::{load_sequence, FrameFormat, FrameShape};
use seqhop::retrieval::count_scene_changes;
use seqhop::FrameVector;

fn seqhop(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqhop"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn synth(cwd: &Path, dir: &str, extra: &[&str]) {
    let mut args = vec!["synth", "--output", dir, "--width", "8", "--height", "8"];
    args.extend_from_slice(extra);
    let out = seqhop(&args, cwd);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn retrieve_with_trial_parameters() {
    let tmp = tempfile::tempdir().unwrap();
    synth(
        tmp.path(),
        "in",
        &["--n", "50", "--cuts", "17,34", "--seed", "3"],
    );
    let out = seqhop(
        &[
            "retrieve",
            "--input",
            "in",
            "--output",
            "out",
            "--beta",
            "1",
            "--sigma",
            "2",
            "--lambda",
            "0.01",
            "--lambda-f",
            "500",
            "--mu",
            "0.001",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let line = stdout(&out);
    assert_eq!(line.lines().count(), 1);
    assert!(line.contains("eta=100.0"), "{line}");
    assert!(
        line.contains("N=50") && line.contains("d=192") && line.contains("S=2"),
        "{line}"
    );

    let report = json(&tmp.path().join("out/report.json"));
    for key in [
        "mse",
        "eta",
        "iterations",
        "converged",
        "energy_final",
        "energy_traces",
        "scene_changes",
        "wall_time_s",
    ] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["mse"].as_array().unwrap().len(), 50);
    assert_eq!(report["config"]["lambda_f"], 500.0);
    assert_eq!(report["config"]["max_iters"], 500);
    assert!(tmp.path().join("out/frame_000049.ppm").exists());
    assert_eq!(
        fs::read_to_string(tmp.path().join("out/norms.txt"))
            .unwrap()
            .lines()
            .count(),
        50
    );
}

#[test]
fn report_echo_replays_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    synth(
        tmp.path(),
        "in",
        &["--n", "6", "--format", "raw", "--cuts", "3"],
    );
    fs::write(
        tmp.path().join("run.toml"),
        "input = \"in\"\nformat = \"raw\"\nbeta = 0.5\nmu = 0.01\np = 2\n",
    )
    .unwrap();
    let first = seqhop(
        &[
            "retrieve", "--config", "run.toml", "--output", "a", "--mu", "0.002",
        ],
        tmp.path(),
    );
    assert_eq!(code(&first), 0);
    let report = json(&tmp.path().join("a/report.json"));
    let config = &report["config"];
    assert_eq!(config["beta"], 0.5);
    assert_eq!(config["mu"], 0.002);
    assert_eq!(config["sigma"], 2.0);
    assert_eq!(config["p"], 2);
    assert_eq!(config["n"], 5);

    let echo = format!(
        "input = \"in\"\nformat = \"raw\"\nbeta = {}\nsigma = {}\nlambda = {}\nlambda_f = {}\nmu = {}\ntol = {}\nmax_iters = {}\np = {}\nn = {}\n",
        config["beta"], config["sigma"], config["lambda"], config["lambda_f"], config["mu"],
        config["tol"], config["max_iters"], config["p"], config["n"]
    );
    fs::write(tmp.path().join("echo.toml"), echo).unwrap();
    let second = seqhop(
        &["retrieve", "--config", "echo.toml", "--output", "b"],
        tmp.path(),
    );
    assert_eq!(code(&second), 0);
    let replay = json(&tmp.path().join("b/report.json"));
    assert_eq!(replay["mse"], report["mse"]);
    assert_eq!(replay["energy_final"], report["energy_final"]);
}

#[test]
fn retrieve_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path(), "in", &["--n", "4"]);
    let missing = seqhop(
        &["retrieve", "--input", "nowhere", "--output", "o"],
        tmp.path(),
    );
    assert_eq!(code(&missing), 3);

    let too_many = seqhop(
        &["retrieve", "--input", "in", "--output", "o", "--n", "9"],
        tmp.path(),
    );
    assert_eq!(code(&too_many), 2);
    assert!(String::from_utf8_lossy(&too_many.stderr).contains("window"));

    let bad_param = seqhop(&["retrieve", "--input", "in", "--sigma", "0"], tmp.path());
    assert_eq!(code(&bad_param), 2);

    fs::write(tmp.path().join("bad.toml"), "bogus_key = 1\n").unwrap();
    let bad_config = seqhop(
        &["retrieve", "--config", "bad.toml", "--input", "in"],
        tmp.path(),
    );
    assert_eq!(code(&bad_config), 2);

    let diverging = seqhop(
        &[
            "retrieve",
            "--input",
            "in",
            "--output",
            "o",
            "--line-search",
            "false",
            "--step-size",
            "1e200",
        ],
        tmp.path(),
    );
    assert_eq!(code(&diverging), 4);
    assert!(String::from_utf8_lossy(&diverging.stderr).contains("frame 0"));

    let threads = Command::new(env!("CARGO_BIN_EXE_seqhop"))
        .args(["retrieve", "--input", "in"])
        .env("SEQHOP_THREADS", "zero")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(code(&threads), 2);
}

#[test]
fn synth_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    synth(
        tmp.path(),
        "a",
        &["--n", "12", "--cuts", "4,9", "--seed", "5"],
    );
    synth(
        tmp.path(),
        "b",
        &["--n", "12", "--cuts", "4,9", "--seed", "5"],
    );
    for k in 0..12 {
        let name = format!("frame_{k:06}.ppm");
        assert_eq!(
            fs::read(tmp.path().join("a").join(&name)).unwrap(),
            fs::read(tmp.path().join("b").join(&name)).unwrap()
        );
    }
    let (store, shape) = load_sequence(&tmp.path().join("a"), FrameFormat::Ppm, None).unwrap();
    assert_eq!(shape, FrameShape::rgb(8, 8));
    assert_eq!(count_scene_changes(&store, 0.5), 2);

    synth(tmp.path(), "still", &["--n", "5", "--drift", "0"]);
    let first = fs::read(tmp.path().join("still/frame_000000.ppm")).unwrap();
    for k in 1..5 {
        assert_eq!(
            fs::read(tmp.path().join(format!("still/frame_{k:06}.ppm"))).unwrap(),
            first
        );
    }

    let bad_cuts = seqhop(
        &["synth", "--output", "x", "--n", "5", "--cuts", "5"],
        tmp.path(),
    );
    assert_eq!(code(&bad_cuts), 2);
    fs::write(tmp.path().join("blocker"), "").unwrap();
    let unwritable = seqhop(
        &["synth", "--output", "blocker/sub", "--n", "2"],
        tmp.path(),
    );
    assert_eq!(code(&unwritable), 3);
}

#[test]
fn stability_table() {
    let tmp = tempfile::tempdir().unwrap();
    let out = seqhop(
        &[
            "stability",
            "--lambdas",
            "0,1",
            "--lambda-f-range",
            "0.5:2:4",
            "--variant",
            "3",
            "--output",
            "fig.csv",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let csv = fs::read_to_string(tmp.path().join("fig.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2 * 4);
    assert!(rows.contains(&"0,1,2,1"), "{csv}");

    let text = stdout(&out);
    let critical: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("lambda=0 critical_lambda_f="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((critical - 1.43).abs() <= 0.01, "{critical}");

    let squared = seqhop(
        &[
            "stability",
            "--lambdas",
            "0",
            "--variant",
            "2",
            "--output",
            "sq.csv",
        ],
        tmp.path(),
    );
    assert_eq!(code(&squared), 0);
    assert!(stdout(&squared).contains("critical_lambda_f=none"));

    let bad_range = seqhop(&["stability", "--lambda-f-range", "5:1:3"], tmp.path());
    assert_eq!(code(&bad_range), 2);
    let bad_variant = seqhop(&["stability", "--variant", "4"], tmp.path());
    assert_eq!(code(&bad_variant), 2);
}

#[test]
fn landscape_of_the_planar_demo() {
    let tmp = tempfile::tempdir().unwrap();
    let out = seqhop(
        &[
            "landscape",
            "--output",
            "a",
            "--times",
            "0,1,2,3",
            "--grid",
            "61",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let nearest: Vec<String> = stdout(&out)
        .lines()
        .map(|l| l.rsplit("nearest=").next().unwrap().to_string())
        .collect();
    assert_eq!(nearest, ["0", "1", "2", "3"]);

    let again = seqhop(
        &[
            "landscape",
            "--output",
            "b",
            "--times",
            "0,1,2,3",
            "--grid",
            "61",
        ],
        tmp.path(),
    );
    assert_eq!(code(&again), 0);
    for t in 0..4 {
        let name = format!("landscape_t{t}.csv");
        let a = fs::read(tmp.path().join("a").join(&name)).unwrap();
        assert_eq!(a, fs::read(tmp.path().join("b").join(&name)).unwrap());
        assert_eq!(String::from_utf8(a).unwrap().lines().count(), 2 + 61 * 61);
    }

    synth(tmp.path(), "rgb", &["--n", "3"]);
    let not_planar = seqhop(&["landscape", "--input", "rgb"], tmp.path());
    assert_eq!(code(&not_planar), 2);
    let bad_grid = seqhop(&["landscape", "--grid", "1"], tmp.path());
    assert_eq!(code(&bad_grid), 2);
}

fn write_raw(dir: &Path, k: usize, values: &[f64]) {
    fs::create_dir_all(dir).unwrap();
    let shape = FrameShape::new(values.len(), 1, 1).unwrap();
    FrameFormat::Raw
        .save(
            &FrameVector::new(values.to_vec()).unwrap(),
            shape,
            &dir.join(format!("frame_{k:06}.raw")),
        )
        .unwrap();
}

#[test]
fn eval_scores_directories() {
    let tmp = tempfile::tempdir().unwrap();
    let orig = tmp.path().join("orig");
    let same = tmp.path().join("same");
    let bad = tmp.path().join("bad");
    for k in 0..10 {
        let v = [1.0 + k as f64, 2.0, 0.0, 0.0];
        write_raw(&orig, k, &v);
        write_raw(&same, k, &v);
        if k == 6 {
            write_raw(&bad, k, &[0.0, 0.0, 1.0, 3.0]);
        } else {
            write_raw(&bad, k, &v);
        }
    }
    let out = seqhop(
        &[
            "eval",
            "--input",
            "orig",
            "--retrieved",
            "same",
            "--format",
            "raw",
            "--output",
            "e1",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let report = json(&tmp.path().join("e1/eval.json"));
    assert_eq!(report["eta"], 100.0);
    assert!(report["mse"]
        .as_array()
        .unwrap()
        .iter()
        .all(|m| m.as_f64() == Some(0.0)));

    let out = seqhop(
        &[
            "eval",
            "--input",
            "orig",
            "--retrieved",
            "bad",
            "--format",
            "raw",
            "--output",
            "e2",
        ],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("eta=90.0"));
    let report = json(&tmp.path().join("e2/eval.json"));
    assert!((report["mse"][6].as_f64().unwrap() - 2.0).abs() < 1e-12);

    fs::create_dir_all(tmp.path().join("empty1")).unwrap();
    fs::create_dir_all(tmp.path().join("empty2")).unwrap();
    let empty = seqhop(
        &[
            "eval",
            "--input",
            "empty1",
            "--retrieved",
            "empty2",
            "--format",
            "raw",
        ],
        tmp.path(),
    );
    assert_eq!(code(&empty), 3);

    write_raw(&tmp.path().join("short"), 0, &[1.0, 2.0, 0.0, 0.0]);
    let count = seqhop(
        &[
            "eval",
            "--input",
            "orig",
            "--retrieved",
            "short",
            "--format",
            "raw",
        ],
        tmp.path(),
    );
    assert_eq!(code(&count), 3);
}
