//! End-to-end checks of the command line surface: exit codes, the error
//! line format, config file precedence, format inference, and output
//! atomicity on late failures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const PATH3_EDGES: &str = "1 2 0.2\n2 3 0.8\n";
const H0: &str = "1\n0\n0\n";

/// Two well-separated four-point squares.
const BLOBS_CSV: &str = "\
0.0,0.0
0.3,0.0
0.0,0.3
0.3,0.3
6.0,0.0
6.3,0.0
6.0,0.3
6.3,0.3
";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectral"))
        .args(args)
        .output()
        .expect("failed to spawn the spectral binary")
}

fn write(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, contents).expect("write fixture");
    path
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

fn stderr_line(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).trim_end().to_string()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process terminated by signal")
}

#[test]
fn spectrum_generalized_reports_the_worked_eigenvalues() {
    let dir = TempDir::new().unwrap();
    let edges = write(&dir, "path3.edges", PATH3_EDGES);
    let out_path = dir.path().join("spectrum.txt");
    let out = run(&[
        "spectrum",
        "--input",
        edges.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
        "--kind",
        "generalized",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_line(&out));
    let text = read(&out_path);
    let eigenvalues: Vec<f64> = text
        .lines()
        .map(|l| l.split(' ').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(eigenvalues.len(), 3);
    for (got, want) in eigenvalues.iter().zip([0.0, 1.0, 2.0]) {
        assert!(
            (got - want).abs() <= 1e-9,
            "eigenvalue {got} should be {want}"
        );
    }
}

#[test]
fn missing_required_setting_exits_2_with_one_error_line() {
    let dir = TempDir::new().unwrap();
    let edges = write(&dir, "path3.edges", PATH3_EDGES);
    let out = run(&["spectrum", "--input", edges.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    let line = stderr_line(&out);
    assert!(
        line.starts_with("error: Parse: ") && line.contains("missing required setting: output"),
        "unexpected error line: {line}"
    );
    assert_eq!(line.lines().count(), 1, "stderr must be a single line");
}

#[test]
fn unreadable_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let out = run(&[
        "spectrum",
        "--input",
        dir.path().join("absent.edges").to_str().unwrap(),
        "--output",
        dir.path().join("o.txt").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_line(&out).starts_with("error: Io: "));
}

#[test]
fn malformed_csv_exits_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.csv", "1.0,2.0\nnot-a-number,3.0\n");
    let out = run(&[
        "graph",
        "--input",
        bad.to_str().unwrap(),
        "--graph",
        "full",
        "--sigma",
        "1.0",
        "--output",
        dir.path().join("o.txt").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_line(&out).starts_with("error: Parse: "));
}

#[test]
fn nonpositive_epsilon_exits_3() {
    let dir = TempDir::new().unwrap();
    let csv = write(&dir, "blobs.csv", BLOBS_CSV);
    let out = run(&[
        "graph",
        "--input",
        csv.to_str().unwrap(),
        "--graph",
        "epsilon",
        "--epsilon",
        "-1.0",
        "--output",
        dir.path().join("o.txt").to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 3);
    assert!(stderr_line(&out).starts_with("error: InvalidRecipe: "));
}

#[test]
fn oversized_embedding_dimension_exits_3() {
    let dir = TempDir::new().unwrap();
    let edges = write(&dir, "path3.edges", PATH3_EDGES);
    let out = run(&[
        "embed-lem",
        "--input",
        edges.to_str().unwrap(),
        "--output",
        dir.path().join("o.txt").to_str().unwrap(),
        "--m",
        "3",
    ]);
    assert_eq!(exit_code(&out), 3);
    assert!(stderr_line(&out).starts_with("error: ShapeError: "));
}

#[test]
fn disconnected_graph_embedding_exits_5() {
    let dir = TempDir::new().unwrap();
    let edges = write(&dir, "disc.edges", "1 2 1.0\n3 4 1.0\n");
    let out = run(&[
        "embed-lem",
        "--input",
        edges.to_str().unwrap(),
        "--output",
        dir.path().join("o.txt").to_str().unwrap(),
        "--m",
        "1",
    ]);
    assert_eq!(exit_code(&out), 5);
    assert!(stderr_line(&out).starts_with("error: DisconnectedGraph: "));
}

#[test]
fn unstable_step_size_exits_4_unless_told_to_proceed() {
    let dir = TempDir::new().unwrap();
    let edges = write(&dir, "path3.edges", PATH3_EDGES);
    let h0 = write(&dir, "h0.txt", H0);
    let out_path = dir.path().join("traj.csv");
    let base = [
        "diffuse",
        "--input",
        edges.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
        "--h0",
        h0.to_str().unwrap(),
        "--dt",
        "5.0",
        "--steps",
        "2",
    ];
    let rejected = run(&base);
    assert_eq!(exit_code(&rejected), 4);
    assert!(stderr_line(&rejected).starts_with("error: UnstableStep: "));
    assert!(!out_path.exists(), "rejected run must not write outputs");

    let mut proceed = base.to_vec();
    proceed.extend(["--on-instability", "proceed"]);
    let warned = run(&proceed);
    assert_eq!(exit_code(&warned), 0, "stderr: {}", stderr_line(&warned));
    assert!(stderr_line(&warned).starts_with("warning: "));
    assert_eq!(read(&out_path).lines().count(), 3);
}

#[test]
fn rejected_plot_dimension_exits_3_and_writes_nothing() {
    let dir = TempDir::new().unwrap();
    let csv = write(&dir, "blobs.csv", BLOBS_CSV);
    let out_path = dir.path().join("embedding.csv");
    let plot_path = dir.path().join("embedding.svg");
    let out = run(&[
        "embed-lem",
        "--input",
        csv.to_str().unwrap(),
        "--graph",
        "full",
        "--sigma",
        "2.0",
        "--output",
        out_path.to_str().unwrap(),
        "--m",
        "3",
        "--plot",
        plot_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 3);
    assert!(stderr_line(&out).starts_with("error: PlotDimension: "));
    assert!(
        !out_path.exists() && !plot_path.exists(),
        "a failed run must leave no partial outputs"
    );
}

#[test]
fn config_file_supplies_defaults_and_flags_override_it() {
    let dir = TempDir::new().unwrap();
    let edges = write(&dir, "path3.edges", PATH3_EDGES);
    let out_path = dir.path().join("spectrum.txt");
    let config = write(
        &dir,
        "run.toml",
        &format!(
            "input = {:?}\noutput = {:?}\nkind = \"ordinary\"\n",
            edges.to_str().unwrap(),
            out_path.to_str().unwrap()
        ),
    );

    let from_file = run(&["spectrum", "--config", config.to_str().unwrap(), "--dump-config"]);
    assert_eq!(exit_code(&from_file), 0);
    let dumped = String::from_utf8_lossy(&from_file.stdout).to_string();
    assert!(dumped.contains("kind = \"ordinary\""), "dump: {dumped}");

    let overridden = run(&[
        "spectrum",
        "--config",
        config.to_str().unwrap(),
        "--kind",
        "generalized",
        "--dump-config",
    ]);
    assert_eq!(exit_code(&overridden), 0);
    let dumped = String::from_utf8_lossy(&overridden.stdout).to_string();
    assert!(dumped.contains("kind = \"generalized\""), "dump: {dumped}");
}

#[test]
fn dumped_config_replays_the_run_without_flags() {
    let dir = TempDir::new().unwrap();
    let csv = write(&dir, "blobs.csv", BLOBS_CSV);
    let labels_path = dir.path().join("labels.csv");
    let args = [
        "cluster",
        "--input",
        csv.to_str().unwrap(),
        "--graph",
        "full",
        "--sigma",
        "1.0",
        "--clusters",
        "2",
        "--seed",
        "7",
        "--output",
        labels_path.to_str().unwrap(),
    ];
    let direct = run(&args);
    assert_eq!(exit_code(&direct), 0, "stderr: {}", stderr_line(&direct));
    let direct_labels = read(&labels_path);

    let mut dump_args = args.to_vec();
    dump_args.push("--dump-config");
    let dump = run(&dump_args);
    assert_eq!(exit_code(&dump), 0);
    let config = write(
        &dir,
        "replay.toml",
        &String::from_utf8_lossy(&dump.stdout),
    );

    std::fs::remove_file(&labels_path).unwrap();
    let replayed = run(&["cluster", "--config", config.to_str().unwrap()]);
    assert_eq!(exit_code(&replayed), 0, "stderr: {}", stderr_line(&replayed));
    assert_eq!(read(&labels_path), direct_labels);
}

#[test]
fn config_dumped_for_another_command_is_refused() {
    let dir = TempDir::new().unwrap();
    let config = write(&dir, "cluster.toml", "command = \"cluster\"\n");
    let out = run(&["spectrum", "--config", config.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_line(&out).contains("for the cluster command"));
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = TempDir::new().unwrap();
    let config = write(&dir, "bad.toml", "bogus = 1\n");
    let out = run(&["spectrum", "--config", config.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr_line(&out).starts_with("error: Parse: "));
}

#[test]
fn format_is_inferred_from_the_extension_and_overridable() {
    let dir = TempDir::new().unwrap();
    let odd = write(&dir, "graph.dat", PATH3_EDGES);
    let out_path = dir.path().join("o.txt");
    let inferred = run(&[
        "spectrum",
        "--input",
        odd.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&inferred), 2);
    assert!(stderr_line(&inferred).contains("cannot infer"));

    let forced = run(&[
        "spectrum",
        "--input",
        odd.to_str().unwrap(),
        "--format",
        "edges",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&forced), 0, "stderr: {}", stderr_line(&forced));
}

#[test]
fn nodes_flag_keeps_trailing_isolated_nodes() {
    let dir = TempDir::new().unwrap();
    let edges = write(&dir, "one.edges", "1 2 1.0\n");
    let out_path = dir.path().join("w.txt");
    let out = run(&[
        "graph",
        "--input",
        edges.to_str().unwrap(),
        "--nodes",
        "3",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_line(&out));
    assert_eq!(read(&out_path).lines().count(), 3);
}

#[test]
fn cluster_accepts_k_as_cluster_count_except_under_knn() {
    let dir = TempDir::new().unwrap();
    let csv = write(&dir, "blobs.csv", BLOBS_CSV);
    let out_path = dir.path().join("labels.csv");
    let synonym = run(&[
        "cluster",
        "--input",
        csv.to_str().unwrap(),
        "--graph",
        "full",
        "--sigma",
        "1.0",
        "--k",
        "2",
        "--seed",
        "7",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&synonym), 0, "stderr: {}", stderr_line(&synonym));
    assert_eq!(read(&out_path).lines().count(), 8);

    let ambiguous = run(&[
        "cluster",
        "--input",
        csv.to_str().unwrap(),
        "--graph",
        "knn",
        "--k",
        "3",
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&ambiguous), 2);
    assert!(stderr_line(&ambiguous).contains("missing required setting: clusters"));
}

#[test]
fn cluster_metrics_report_perfect_agreement_with_component_labels() {
    let dir = TempDir::new().unwrap();
    let csv = write(&dir, "blobs.csv", BLOBS_CSV);
    let reference = write(&dir, "ref.csv", "1\n1\n1\n1\n2\n2\n2\n2\n");
    let metrics_path = dir.path().join("metrics.json");
    let out = run(&[
        "cluster",
        "--input",
        csv.to_str().unwrap(),
        "--graph",
        "full",
        "--sigma",
        "1.0",
        "--clusters",
        "2",
        "--seed",
        "7",
        "--output",
        dir.path().join("labels.csv").to_str().unwrap(),
        "--metrics",
        metrics_path.to_str().unwrap(),
        "--reference",
        reference.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_line(&out));
    let metrics = read(&metrics_path);
    assert!(
        metrics.contains("\"ari_vs_reference\": 1.0"),
        "metrics: {metrics}"
    );
    assert!(metrics.contains("\"inertia\""));
    assert!(metrics.contains("\"iterations\""));
}

#[test]
fn conflicting_trajectory_modes_exit_3() {
    let dir = TempDir::new().unwrap();
    let edges = write(&dir, "path3.edges", PATH3_EDGES);
    let h0 = write(&dir, "h0.txt", H0);
    let out = run(&[
        "diffuse",
        "--input",
        edges.to_str().unwrap(),
        "--output",
        dir.path().join("o.csv").to_str().unwrap(),
        "--h0",
        h0.to_str().unwrap(),
        "--dt",
        "0.1",
        "--steps",
        "2",
        "--times",
        "1.0",
    ]);
    assert_eq!(exit_code(&out), 3);
    assert!(stderr_line(&out).starts_with("error: InvalidRecipe: "));
}

#[test]
fn trajectory_sampling_keeps_first_and_final_states() {
    let dir = TempDir::new().unwrap();
    let edges = write(&dir, "path3.edges", PATH3_EDGES);
    let h0 = write(&dir, "h0.txt", H0);
    let out_path = dir.path().join("traj.csv");
    let out = run(&[
        "diffuse",
        "--input",
        edges.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
        "--h0",
        h0.to_str().unwrap(),
        "--dt",
        "0.1",
        "--steps",
        "5",
        "--sample-every",
        "2",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_line(&out));
    let text = read(&out_path);
    let first_fields: Vec<String> = text
        .lines()
        .map(|l| l.split(',').next().unwrap().to_string())
        .collect();
    // Steps 5 sampled every 2 records t = 0, 0.2, 0.4, 0.5.
    assert_eq!(first_fields.len(), 4, "trajectory: {text}");
    assert_eq!(first_fields[0], "0e0");
    let final_t: f64 = first_fields.last().unwrap().parse().unwrap();
    assert!((final_t - 0.5).abs() <= 1e-12);
}

#[test]
fn analytic_trajectory_rows_follow_the_requested_times() {
    let dir = TempDir::new().unwrap();
    let edges = write(&dir, "path3.edges", PATH3_EDGES);
    let h0 = write(&dir, "h0.txt", H0);
    let out_path = dir.path().join("traj.csv");
    let out = run(&[
        "diffuse",
        "--input",
        edges.to_str().unwrap(),
        "--output",
        out_path.to_str().unwrap(),
        "--h0",
        h0.to_str().unwrap(),
        "--times",
        "0,0.5,1.0",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_line(&out));
    let text = read(&out_path);
    let times: Vec<f64> = text
        .lines()
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(times, vec![0.0, 0.5, 1.0]);
    // The total heat of each row matches the initial total.
    for line in text.lines() {
        let total: f64 = line.split(',').skip(1).map(|v| v.parse::<f64>().unwrap()).sum();
        assert!((total - 1.0).abs() <= 1e-10, "row {line} lost heat");
    }
}

#[test]
fn scatter_svg_is_self_contained_and_colored_by_label() {
    let dir = TempDir::new().unwrap();
    let csv = write(&dir, "blobs.csv", BLOBS_CSV);
    let plot_path = dir.path().join("clusters.svg");
    let out = run(&[
        "cluster",
        "--input",
        csv.to_str().unwrap(),
        "--graph",
        "full",
        "--sigma",
        "1.0",
        "--clusters",
        "2",
        "--seed",
        "7",
        "--output",
        dir.path().join("labels.csv").to_str().unwrap(),
        "--plot",
        plot_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_line(&out));
    let svg = read(&plot_path);
    assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<circle").count(), 8);
    // Two clusters means two distinct fill colors.
    let distinct: std::collections::BTreeSet<&str> = svg
        .match_indices("fill=\"#")
        .map(|(i, _)| &svg[i + 6..i + 13])
        .collect();
    assert_eq!(distinct.len(), 2, "fills: {distinct:?}");
}
