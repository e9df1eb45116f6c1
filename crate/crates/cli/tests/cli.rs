use std::path::Path;
use std::process::{Command, Output};

fn nlwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlwave"))
        .args(args)
        .env_remove("NLWAVE_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Header row and data rows of a CSV report, skipping `#` lines.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

fn meta<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    let prefix = format!("# meta.{key} = ");
    text.lines().find_map(|l| l.strip_prefix(prefix.as_str()))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn printed_config_parses_back_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let first = nlwave(&["converge", "--print-config", "--grid.h", "0.25", "--kernel.name", "sech2"]);
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    let file = dir.path().join("echo.toml");
    std::fs::write(&file, stdout(&first)).unwrap();
    let second = nlwave(&["converge", "--config", path_str(&file), "--print-config"]);
    assert_eq!(code(&second), 0, "{}", stderr(&second));
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn solitary_defaults_are_echoed() {
    let text = stdout(&nlwave(&["run", "--print-config"]));
    for line in [
        "grid.h = 1.25e-1",
        "grid.x_left = -3e1",
        "grid.x_right = 3e1",
        "integrator.t_end = 2e1",
        "integrator.rel_tol = 1e-10",
        "integrator.abs_tol = 1e-10",
        "initial_data.preset = \"solitary\"",
    ] {
        assert!(text.lines().any(|l| l == line), "missing '{line}' in\n{text}");
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.toml");
    std::fs::write(&file, "[grid]\nh = 0.25\n\n[integrator]\nt_end = 3.0\n").unwrap();
    let out = nlwave(&["run", "--config", path_str(&file), "--grid.h", "0.5", "--print-config"]);
    let text = stdout(&out);
    assert!(text.contains("grid.h = 5e-1\n"), "{text}");
    assert!(text.contains("integrator.t_end = 3e0\n"), "{text}");
}

#[test]
fn identical_configs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let mut outputs = Vec::new();
        // Same paths both times, since the config echo records them.
        let path = dir.path().join(format!("run.{format}"));
        let trace = dir.path().join(format!("trace.{format}"));
        for _ in 0..2 {
            let out = nlwave(&[
                "run",
                "--grid.h", "0.5",
                "--integrator.t_end", "2",
                "--output.times", "[0.5, 1.0]",
                "--output.format", format,
                "--output.path", path_str(&path),
                "--output.trace", path_str(&trace),
            ]);
            assert_eq!(code(&out), 0, "{}", stderr(&out));
            outputs.push((std::fs::read(&path).unwrap(), std::fs::read(&trace).unwrap()));
        }
        assert_eq!(outputs[0], outputs[1], "{format} output differs between runs");
    }
}

#[test]
fn run_writes_snapshots_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = nlwave(&[
        "run",
        "--grid.h", "0.5",
        "--integrator.t_end", "1",
        "--output.trace", path_str(&trace),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(meta(&text, "status"), Some("completed"));
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["t", "x", "u", "u_t", "exact"]);
    assert_eq!(rows.len(), 121);
    for row in &rows {
        let u: f64 = row[2].parse().unwrap();
        let exact: f64 = row[4].parse().unwrap();
        assert!((u - exact).abs() < 0.2, "{row:?}");
    }
    let (header, rows) = csv_rows(&std::fs::read_to_string(&trace).unwrap());
    assert_eq!(header, ["t", "linf_u"]);
    assert!(rows.len() > 2);
}

#[test]
fn json_output_is_a_self_describing_envelope() {
    let out = nlwave(&["kernel-info", "exp", "--output.format", "json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["command"], "kernel-info");
    assert_eq!(doc["config"]["kernel.name"], "exp");
    assert_eq!(doc["metadata"]["tv_mass"], 2.0);
    assert_eq!(doc["columns"][0], "h");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn misaligned_grid_is_a_config_error() {
    let out = nlwave(&["run", "--grid.h", "0.3", "--grid.x_left", "-1", "--grid.x_right", "1"]);
    assert_eq!(code(&out), 1);
    let msg = stderr(&out);
    assert_eq!(msg.lines().count(), 1, "{msg}");
    assert!(msg.contains("grid.h"), "{msg}");
}

#[test]
fn unknown_kernel_is_a_config_error() {
    let out = nlwave(&["run", "--kernel.name", "gaussian"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("kernel.name"), "{}", stderr(&out));
}

#[test]
fn missing_required_field_is_named() {
    let out = nlwave(&["run", "--initial_data.preset", "table"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("grid.h"), "{}", stderr(&out));
    let out = nlwave(&[
        "run",
        "--initial_data.preset", "table",
        "--grid.h", "0.5", "--grid.x_left", "-1", "--grid.x_right", "1",
        "--integrator.t_end", "1",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("initial_data.phi_file"), "{}", stderr(&out));
}

#[test]
fn unknown_keys_and_bad_values_are_rejected() {
    let out = nlwave(&["run", "--grid.spacing", "0.1"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("grid.spacing"));
    let out = nlwave(&["run", "--integrator.rel_tol", "tight"]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("integrator.rel_tol"));
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("out.csv");
    let out = nlwave(&["kernel-info", "exp", "--output.path", path_str(&target)]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("out.csv"), "{}", stderr(&out));
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_nlwave"))
        .args(["kernel-info", "exp"])
        .env("NLWAVE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("NLWAVE_THREADS"));
}

#[test]
fn triangle_selects_the_lattice_kernel() {
    let out = nlwave(&["kernel-info", "triangle"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(meta(&text, "kernel"), Some("triangle"));
    assert_eq!(meta(&text, "support"), Some("compact(radius=1e0)"));
    let (_, rows) = csv_rows(&text);
    // The weights are 1, -2, 1 at spacing 1/h, so |b| sums to 4.
    for row in rows {
        let abs_sum: f64 = row[4].parse().unwrap();
        assert!((abs_sum - 4.0).abs() < 1e-12, "{row:?}");
    }
}

#[test]
fn exponential_kernel_info_passes_the_weight_bound() {
    let out = nlwave(&["kernel-info", "exp"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(meta(&text, "tv_mass"), Some("2e0"));
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["h", "K", "grid_mass", "row_sum", "abs_sum", "bound", "passed"]);
    for row in rows {
        let h: f64 = row[0].parse().unwrap();
        let grid_mass: f64 = row[2].parse().unwrap();
        let abs_sum: f64 = row[4].parse().unwrap();
        // Closed forms for e^{-|x|}/2 sampled at spacing h.
        assert!((grid_mass - 0.5 * h / (h / 2.0).tanh()).abs() < 1e-12, "{row:?}");
        assert!((abs_sum - 2.0 * (1.0 - (-h).exp()) / h).abs() < 1e-12, "{row:?}");
        assert_eq!(row[6], "true");
    }
}

#[test]
fn lemma_check_passes_and_flags_a_corrupted_operator() {
    let out = nlwave(&["lemma-check"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(meta(&text, "violations"), Some("0"));
    let (header, rows) = csv_rows(&text);
    let h_col = header.iter().position(|c| c == "h").unwrap();
    let hs: std::collections::BTreeSet<&str> = rows.iter().map(|r| r[h_col].as_str()).collect();
    assert_eq!(hs.into_iter().collect::<Vec<_>>(), ["1e-1", "2e-1", "4e-1", "5e-2"]);

    let bad = nlwave(&["lemma-check", "--lemma.mode", "corrupted"]);
    assert_eq!(code(&bad), 4);
    assert_ne!(meta(&stdout(&bad), "violations"), Some("0"));
}

#[test]
fn lorentzian_blowup_reports_the_singular_time() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = nlwave(&[
        "blowup",
        "--study.kernels", "[\"lorentz\"]",
        "--output.trace", path_str(&trace),
    ]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let msg = stderr(&out);
    let t_star: f64 = msg
        .split("t* = ")
        .nth(1)
        .and_then(|s| s.split_whitespace().next())
        .and_then(|s| s.parse().ok())
        .unwrap_or_else(|| panic!("no t* in '{msg}'"));
    assert!((t_star - 2.689993).abs() <= 0.01 * 2.689993, "t* = {t_star}");
    let (header, rows) = csv_rows(&std::fs::read_to_string(&trace).unwrap());
    assert_eq!(header, ["kernel", "threshold", "t", "linf_u"]);
    let last: f64 = rows.last().unwrap()[3].parse().unwrap();
    assert!(last > 1e8);
}

#[test]
fn tabulated_kernel_and_data_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let kernel = dir.path().join("hat.txt");
    let phi = dir.path().join("phi.txt");
    std::fs::write(&kernel, "# x beta\n0 1\n1 0\n").unwrap();
    std::fs::write(&phi, "-2 0\n0 0.2\n2 0\n").unwrap();
    let base = [
        "--initial_data.preset", "table",
        "--initial_data.phi_file", path_str(&phi),
        "--grid.h", "0.5", "--grid.x_left", "-4", "--grid.x_right", "4",
        "--integrator.t_end", "1",
    ];
    let table = nlwave(&[&["run", "--kernel.table", path_str(&kernel)][..], &base].concat());
    let builtin = nlwave(&[&["run", "--kernel.name", "triangle"][..], &base].concat());
    assert_eq!(code(&table), 0, "{}", stderr(&table));
    assert_eq!(code(&builtin), 0, "{}", stderr(&builtin));
    // The table is the triangle kernel, so the solutions coincide.
    let (_, a) = csv_rows(&stdout(&table));
    let (_, b) = csv_rows(&stdout(&builtin));
    for (ra, rb) in a.iter().zip(&b) {
        let (u, v): (f64, f64) = (ra[2].parse().unwrap(), rb[2].parse().unwrap());
        assert!((u - v).abs() < 1e-12, "{ra:?} vs {rb:?}");
    }
}
