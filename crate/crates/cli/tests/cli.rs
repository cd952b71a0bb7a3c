use rashba::evolve::io::read_bin;
use rashba::evolve::{propagate_symbol, SpinorGrid};
use rashba::green::green2_alpha0;
use rashba::kernel::{heat_kernel, propagator_kernel};
use rashba::{Coupling, Exec, C64};
use rashba_cli::commands::{green, kernel};
use rashba_cli::main_with_args;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::Command;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> u8 {
    main_with_args(std::iter::once("rashba").chain(args.iter().copied()))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rashba"))
}

/// Parses a CSV with `#` metadata into (header, rows of strings).
fn table(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn kernel_header_matches_golden_file() {
    let out = bin().args(["--alpha", "0.4", "--beta", "0.6", "--t-re", "0.5", "kernel", "--point", "0,0,1"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let golden = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/kernel_header.txt")).unwrap();
    let head: String = text.lines().take(golden.lines().count()).map(|l| format!("{l}\n")).collect();
    assert_eq!(head, golden);
}

#[test]
fn kernel_table_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.csv");
    let pts = ["0.1,-0.2,0.3", "1e-3,2.5,-1.75", "0,0,0"];
    let mut args = vec!["--alpha", "0.7", "--beta", "0.2", "--t-re", "0.3", "--t-im", "0.4", "--out", out.to_str().unwrap(), "kernel"];
    for p in &pts {
        args.extend(["--point", p]);
    }
    assert_eq!(run(&args), 0);
    let rows = kernel::read_table(BufReader::new(fs::File::open(&out).unwrap())).unwrap();
    let c = Coupling::new(0.7, 0.2).unwrap();
    assert_eq!(rows.len(), pts.len());
    for (x, g) in rows {
        let want = propagator_kernel(&c, C64::new(0.3, 0.4), x).unwrap();
        assert_eq!(g, want, "at {x:?}");
    }
}

#[test]
fn free_kernel_table_is_heat_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.csv");
    assert_eq!(run(&["--out", out.to_str().unwrap(), "kernel", "--point", "0.5,0.5,0.5", "--point", "2,0,-1"]), 0);
    let rows = kernel::read_table(BufReader::new(fs::File::open(&out).unwrap())).unwrap();
    for (x, g) in rows {
        let k = heat_kernel(C64::new(0.5, 0.0), x).unwrap();
        assert!((g.0[0][0] - k).norm() <= 1e-15 * k.norm());
        assert!((g.0[1][1] - k).norm() <= 1e-15 * k.norm());
        assert_eq!(g.0[0][1].norm() + g.0[1][0].norm(), 0.0);
    }
}

#[test]
fn points_file_and_bad_point() {
    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("p.csv");
    fs::write(&pts, "x1,x2,x3\n0,0,1\n1,1,1\n").unwrap();
    let out = dir.path().join("k.json");
    assert_eq!(run(&["--format", "json", "--out", out.to_str().unwrap(), "kernel", "--points", pts.to_str().unwrap()]), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert!(v["meta"]["fft_convention"].is_string());
    assert_eq!(run(&["kernel", "--point", "1,2"]), 2);
    assert_eq!(run(&["kernel"]), 2);
    assert_eq!(run(&["--format", "bin", "kernel", "--point", "0,0,1"]), 2);
}

#[test]
fn alpha_zero_batch_reproduces_free_elements() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let q = data("sample_queries.csv");
    assert_eq!(run(&["--beta", "0.5", "--out", out.to_str().unwrap(), "green", q.to_str().unwrap()]), 0);
    let (h, rows) = table(&fs::read_to_string(&out).unwrap());
    for (line, row) in green::read_queries(&q).unwrap().iter().zip(&rows) {
        let (_, query_row) = line;
        let query = query_row.query().unwrap();
        let f = |name: &str| row[column(&h, name)].parse::<f64>().unwrap();
        let got = C64::new(f("re_g"), f("im_g"));
        let want = if query.sigma_out == query.sigma_in {
            green2_alpha0(0.5, query.z, &query.q, query.sigma_in).unwrap()
        } else {
            C64::new(0.0, 0.0)
        };
        assert_eq!(got, want);
    }
}

#[test]
fn oracle_residual_column_on_sample_batch() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let q = data("sample_queries.csv");
    let cfg = data("sample_config.toml");
    let args = ["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "green", q.to_str().unwrap(), "--oracle"];
    assert_eq!(run(&args), 0);
    let (h, rows) = table(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 16);
    let r = column(&h, "oracle_residual");
    for row in &rows {
        let v: f64 = row[r].parse().unwrap();
        assert!(v <= 1e-5, "residual {v}");
    }
}

#[test]
fn malformed_rows_name_their_line() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("0.1,0.5,1,0,0,0,0,0,1,1,1,1\n0.1,0.5,1,0,abc,0,0,0,1,1,1,1\n", "line 3"),
        ("0.1,0.5,1,0,0,0,0,0,1,1,1,1\n\n0.1,0.5,1,0,0,0,0,0,1,2,1,1\n", "line 4"),
        ("0.1,0.5,1,0,0,0,0\n", "line 2"),
        ("0.1,0.5,1,0,0,0,0,0,1,1,1,1\n0.1,0.0,1,0,0,0,0,0,1,1,1,1\n", "line 3"),
    ];
    for (i, (body, line)) in cases.iter().enumerate() {
        let p = dir.path().join(format!("bad{i}.csv"));
        fs::write(&p, format!("{}\n{body}", green::INPUT_HEADER)).unwrap();
        let out = bin().args(["green", p.to_str().unwrap()]).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "case {i}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains(line), "case {i}: {err}");
    }
    let p = dir.path().join("header.csv");
    fs::write(&p, "re_z,im_z\n1,2\n").unwrap();
    assert_eq!(run(&["green", p.to_str().unwrap()]), 2);
}

#[test]
fn nonconvergence_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let q = data("sample_queries.csv");
    assert_eq!(run(&["--tol", "1e-30", "--out", out.to_str().unwrap(), "green", q.to_str().unwrap(), "--oracle"]), 3);
}

#[test]
fn config_overrides_flags_only_when_given() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.csv");
    let cfg = data("sample_config.toml");
    let o = out.to_str().unwrap();
    assert_eq!(run(&["--alpha", "0.1", "--out", o, "kernel", "--point", "0,0,1"]), 0);
    assert!(fs::read_to_string(&out).unwrap().contains("# alpha=0.1\n"));
    assert_eq!(run(&["--alpha", "0.1", "--config", cfg.to_str().unwrap(), "--out", o, "kernel", "--point", "0,0,1"]), 0);
    assert!(fs::read_to_string(&out).unwrap().contains("# alpha=0.3\n"));

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[coupling]\nalhpa = 1.0\n").unwrap();
    assert_eq!(run(&["--config", bad.to_str().unwrap(), "kernel", "--point", "0,0,1"]), 2);
    assert_eq!(run(&["--alpha=-1", "kernel", "--point", "0,0,1"]), 2);
    assert_eq!(run(&["--grid-n", "12", "kernel", "--point", "0,0,1"]), 2);
}

#[test]
fn evolve_binary_snapshot_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.bin");
    let args = [
        "--alpha", "0.5", "--beta", "0.3", "--t-re", "0.1", "--t-im", "0.2", "--grid-n", "16", "--box", "12",
        "--out", out.to_str().unwrap(), "evolve", "--steps", "2", "--spin", "1,0,0,0.5",
    ];
    assert_eq!(run(&args), 0);
    let got = read_bin(BufReader::new(fs::File::open(&out).unwrap())).unwrap();
    let c = Coupling::new(0.5, 0.3).unwrap();
    let f = SpinorGrid::from_fn(16, 12.0, |x| {
        let g = (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / 4.0).exp();
        [C64::new(g, 0.0), C64::new(0.0, 0.5 * g)]
    })
    .unwrap();
    let t = C64::new(0.1, 0.2);
    let want = propagate_symbol(&propagate_symbol(&f, &c, t, Exec::Sequential).unwrap(), &c, t, Exec::Sequential).unwrap();
    assert!(got.max_abs_diff(&want) < 1e-14);

    // the binary snapshot feeds back in as the initial state
    let json = dir.path().join("s.json");
    let args = ["--t-re", "0", "--t-im", "0.3", "--out", json.to_str().unwrap(), "--format", "json", "evolve", "--input", out.to_str().unwrap()];
    assert_eq!(run(&args), 0);
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    let norms = s["norms"].as_array().unwrap();
    assert!((norms[0].as_f64().unwrap() - norms[1].as_f64().unwrap()).abs() < 1e-12);
}

#[test]
fn report_json_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    assert_eq!(run(&["--beta", "0.5", "--out", out.to_str().unwrap(), "report", "--sigma", "1,-1", "--gamma", "5"]), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    for key in ["sigma", "alpha", "beta", "n_const", "h4_norm", "h3_divergent", "log_slope", "lambda_roots"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["h3_divergent"], true);
    assert_eq!(v["lambda_minus_one"], true);
    assert_eq!(run(&["report", "--sigma", "2,0"]), 2);
    assert_eq!(run(&["report", "--sigma", "x"]), 2);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.txt");
    let o = out.to_str().unwrap();
    assert_eq!(run(&["--out", o, "verify", "--suite", "specfun"]), 0);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with(&format!("seed {}", rashba::verify::DEFAULT_SEED)));
    assert!(text.contains("PASS") && !text.contains("FAIL"));
    assert_eq!(run(&["--out", o, "verify", "--suite", "green", "--inject-fault", "green-sign-flip"]), 1);
    assert!(fs::read_to_string(&out).unwrap().contains("FAIL"));
    assert_eq!(run(&["verify", "--suite", "nope"]), 2);
}

#[test]
fn verify_all_emits_json_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    assert_eq!(run(&["--out", out.to_str().unwrap(), "verify", "--suite", "all", "--seed", "99"]), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["seed"], 99);
    assert_eq!(v["passed"], true);
    let suites = v["suites"].as_array().unwrap();
    let names: Vec<&str> = suites.iter().map(|s| s["suite"].as_str().unwrap()).collect();
    assert_eq!(names, ["specfun", "kernel", "evolve", "green", "perturb"]);
    for s in suites {
        assert!(s["passed"].is_boolean());
        for c in s["checks"].as_array().unwrap() {
            assert!(c["name"].is_string() && c["value"].is_number() && c["bound"].is_string());
            assert!(c["passed"].as_bool().unwrap());
        }
    }
}
