use std::fs;
use std::path::Path;
use std::process::Command;

use measure_control::assembly::{DiscreteProblem, OperatorSpec, Target};
use measure_control::cli::{export_results, presets, Preset, RunConfig};
use measure_control::diagnostics::sparsity_stats;
use measure_control::mesh::{build_rect_mesh, select_nodes, Bounds, Region};
use measure_control::ssn::{
    continuation_path, ContinuationOptions, SolverOptions, SUPPORT_THRESHOLD_REL,
};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_measure-control"))
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn two_box_run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let status = bin()
        .args([
            "--preset",
            "two_box_dirichlet",
            "--nx",
            "20",
            "--emit-matrices",
        ])
        .arg("--output-dir")
        .arg(&out)
        .arg("--log-file")
        .arg(dir.path().join("solver.log"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for name in [
        "control.csv",
        "state.csv",
        "support.csv",
        "path.csv",
        "report.json",
        "stiffness.mtx",
        "mass.mtx",
        "control.mtx",
    ] {
        assert!(out.join(name).is_file(), "{name}");
    }
    let header = |name: &str| {
        fs::read_to_string(out.join(name))
            .unwrap()
            .lines()
            .next()
            .unwrap()
            .to_string()
    };
    assert_eq!(header("control.csv"), "node,x,y,u");
    assert_eq!(header("state.csv"), "node,x,y,yh");
    assert_eq!(
        header("path.csv"),
        "alpha_or_beta,objective,mass,support_size"
    );

    let mesh = build_rect_mesh(20, 20, Bounds::symmetric_unit()).unwrap();
    let control = presets::box_control(&mesh);
    let support = csv_rows(&out.join("support.csv"));
    assert!(!support.is_empty());
    for row in &support {
        let node: usize = row[0].parse().unwrap();
        assert!(control.contains(node), "{node}");
    }

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let stages = report["solve"]["stages"].as_array().unwrap();
    let regularized = stages
        .iter()
        .filter(|s| s["stage"] == "regularized")
        .count();
    assert_eq!(csv_rows(&out.join("path.csv")).len(), regularized);
    let log = fs::read_to_string(dir.path().join("solver.log")).unwrap();
    assert!(log.lines().any(|l| l.starts_with("limit\t")));
}

#[test]
fn missing_parent_directory_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["--preset", "slater_check", "--nx", "8"])
        .arg("--output-dir")
        .arg(dir.path().join("absent").join("out"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn invalid_flag_value_exits_one_naming_the_key() {
    let out = bin().args(["--alpha-factor", "1.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha_factor"));
}

#[test]
fn unknown_config_key_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "preset = \"two_box_dirichlet\"\nalpha_step = 0.5\n").unwrap();
    let out = bin().arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha_step"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "preset = \"two_box_dirichlet\"\nnx = 12\nbeta = 1e-3\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .arg("--config")
        .arg(&cfg)
        .args(["--beta", "0"])
        .arg("--output-dir")
        .arg(&out)
        .arg("--log-file")
        .arg(dir.path().join("log.txt"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["beta"], 0.0);
    assert_eq!(report["config"]["nx"], 12);
    assert_eq!(report["config"]["ny"], 12);
}

#[test]
fn iteration_cap_reports_nonconvergence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .args([
            "--preset",
            "two_box_dirichlet",
            "--nx",
            "16",
            "--newton-tol",
            "1e-30",
        ])
        .arg("--output-dir")
        .arg(&out)
        .arg("--log-file")
        .arg(dir.path().join("log.txt"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn oracle_preset_matches_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .args(["--preset", "oracle_1d"])
        .arg("--output-dir")
        .arg(&out)
        .arg("--log-file")
        .arg(dir.path().join("log.txt"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for row in csv_rows(&out.join("nonattainment.csv")) {
        let n: f64 = row[0].parse().unwrap();
        let objective: f64 = row[1].parse().unwrap();
        let mass: f64 = row[2].parse().unwrap();
        assert!((objective - 1.0 / (3.0 * n)).abs() <= 1e-14);
        assert_eq!(mass, n);
    }
    for row in csv_rows(&out.join("oracle_fem.csv")) {
        let fem: f64 = row[2].parse().unwrap();
        let exact: f64 = row[3].parse().unwrap();
        assert!((fem - exact).abs() <= 1e-10);
    }
}

#[test]
fn zero_target_exports_zero_control() {
    let mesh = build_rect_mesh(12, 12, Bounds::symmetric_unit()).unwrap();
    let problem = DiscreteProblem::assemble(
        &mesh,
        &OperatorSpec::laplace_dirichlet(),
        presets::box_control(&mesh),
        select_nodes(&mesh, &Region::Whole),
        &Target::Zero,
    )
    .unwrap();
    let (state, _, path) = continuation_path(
        &problem,
        &ContinuationOptions::default(),
        &SolverOptions::default(),
    )
    .unwrap();
    let sparsity = sparsity_stats(&state, problem.control_nodes(), SUPPORT_THRESHOLD_REL);
    let dir = tempfile::tempdir().unwrap();
    export_results(
        dir.path(),
        &mesh,
        &problem,
        &state,
        &path,
        &sparsity,
        &serde_json::json!({}),
        false,
    )
    .unwrap();
    let rows = csv_rows(&dir.path().join("control.csv"));
    assert_eq!(rows.len(), problem.n_control());
    assert!(rows.iter().all(|r| r[3].parse::<f64>().unwrap() == 0.0));
    assert!(csv_rows(&dir.path().join("support.csv")).is_empty());
}

#[test]
fn library_run_matches_binary_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = RunConfig::for_preset(Preset::SlaterCheck);
    config.nx = 10;
    config.ny = 10;
    config.output_dir = dir.path().join("out");
    assert_eq!(measure_control::cli::run(&config), 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(config.output_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["whole_domain_dirichlet"]["satisfied"], false);
    assert_eq!(report["box_dirichlet"]["satisfied"], true);
}
