use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use phononet_cli::{header_config, parse_config};

fn phononet(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phononet"))
        .args(args)
        .current_dir(cwd)
        .env_remove("PHONONET_OUT_DIR")
        .output()
        .expect("binary runs")
}

/// Writes `config` and runs `experiment` with output into `dir/out`.
fn run(dir: &Path, experiment: &str, config: &str, extra: &[&str]) -> (Output, PathBuf) {
    let cfg = dir.join("run.toml");
    std::fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    let mut args = vec![experiment, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    (phononet(&args, dir), out)
}

fn summary(csv: &str, key: &str) -> f64 {
    let prefix = format!("## {key} = ");
    csv.lines().find_map(|l| l.strip_prefix(&prefix)).unwrap_or_else(|| panic!("no {key}")).parse().unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn unknown_key_is_named_and_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let (o, _) = run(dir.path(), "filter", "experiment = \"filter\"\n[parameters]\ngama = 1.0\n", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gama"));
}

#[test]
fn unknown_top_level_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (o, _) = run(dir.path(), "filter", "experiment = \"filter\"\nsed = 3\n", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sed"));
}

#[test]
fn missing_config_and_mismatched_experiment_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = phononet(&["filter", "--config", "nope.toml"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let (o, _) = run(dir.path(), "nv", "experiment = \"filter\"\n", &[]);
    assert_eq!(o.status.code(), Some(2));
    let (o, _) = run(dir.path(), "filter", "[parameters]\ngamma = -1.0\n", &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_3() {
    // drives out of reach of the amplitude bound
    let dir = tempfile::tempdir().unwrap();
    let (o, _) = run(dir.path(), "design", "[parameters]\nalpha_max = 1.0\n", &[]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn minimal_filter_config_uses_the_defaults_and_reaches_the_floor() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run(dir.path(), "filter", "experiment = \"filter\"\n", &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("filter.csv")).unwrap();
    let cfg = parse_config(&header_config(&csv), None).unwrap();
    let phononet_cli::config::Parameters::Filter(p) = cfg.parameters else { panic!() };
    assert_eq!((p.omega_m, p.gamma, p.kappa, p.n_th), (1.2e9, 1e6, 3e8, 40.0));
    assert!(p.rotating_wave);

    let min = data_rows(&csv).iter().map(|r| r[1]).fold(f64::INFINITY, f64::min);
    assert!(min / 40.0 < 1e-3, "min N_F/N_th = {}", min / 40.0);
    assert!(summary(&csv, "min_N_F_over_N_th") < 1e-3);
}

#[test]
fn csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run(dir.path(), "circulator", "[parameters]\npoints = 11\n", &[]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(out.join("circulator.csv")).unwrap();
    assert!(!csv.contains('\r'));
    assert!(csv.starts_with("#! phononet "));
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "delta_omega_over_gamma,P_11,P_12,P_13");
    assert_eq!(rows.len(), 12);
    for cell in rows[1].split(',') {
        let mantissa = cell.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
        assert_eq!(mantissa.len(), 17, "{cell}");
    }
}

#[test]
fn header_reparses_to_the_same_config() {
    let dir = tempfile::tempdir().unwrap();
    let text = "experiment = \"waveguide\"\n[parameters]\ndistances = [0.0, 0.5]\npoints = 21\n";
    let (o, out) = run(dir.path(), "waveguide", text, &[]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(out.join("waveguide.csv")).unwrap();
    let original = parse_config(text, None).unwrap();
    assert_eq!(parse_config(&header_config(&csv), None).unwrap(), original);

    // the recovered header reproduces the file
    let (o, out2) = run(&dir.path().join("out"), "waveguide", &header_config(&csv), &[]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(out2.join("waveguide.csv")).unwrap(), csv);
}

#[test]
fn runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let text = "experiment = \"multimode\"\n[parameters]\npoints = 201\n";
    let (oa, outa) = run(a.path(), "multimode", text, &["--threads", "3"]);
    let (ob, outb) = run(b.path(), "multimode", text, &["--threads", "1"]);
    assert!(oa.status.success() && ob.status.success());
    let fa = std::fs::read(outa.join("multimode.csv")).unwrap();
    assert_eq!(fa, std::fs::read(outb.join("multimode.csv")).unwrap());
}

#[test]
fn fidelity_list_expands_to_one_run_per_entry() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run(dir.path(), "fidelity", "experiment = \"fidelity\"\n[parameters]\nn_th = [0.5, 5, 20]\n", &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("fidelity.csv")).unwrap();
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), vec![0.5, 5.0, 20.0]);
    assert!(rows.windows(2).all(|w| w[1][3] < w[0][3]));
    assert_eq!(summary(&csv, "runs"), 3.0);
}

#[test]
fn matched_circulator_routes_one_to_two() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run(dir.path(), "circulator", "[parameters]\ngamma = 2e6\nt = 1e6\npoints = 101\n", &[]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(out.join("circulator.csv")).unwrap();
    let rows = data_rows(&csv);
    let center = rows.iter().find(|r| r[0] == 0.0).unwrap();
    assert!(center[2] > 0.999, "P_12 = {}", center[2]);
    assert!(summary(&csv, "resonant_P_12") > 0.999);
}

#[test]
fn json_output_and_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("nv.toml");
    std::fs::write(&cfg, "experiment = \"nv\"\n[output]\ndir = \"from_config\"\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_phononet"))
        .args(["nv", "--config", cfg.to_str().unwrap(), "--format", "json"])
        .current_dir(dir.path())
        .env("PHONONET_OUT_DIR", dir.path().join("from_env"))
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(!dir.path().join("from_config").exists());
    let text = std::fs::read_to_string(dir.path().join("from_env/nv.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["config"]["output"]["format"], "json");
    assert_eq!(v["columns"][5], "figure_of_merit");
    let cfg_back = parse_config(v["config_toml"].as_str().unwrap(), None).unwrap();
    assert_eq!(cfg_back.experiment, phononet_cli::Experiment::Nv);
}

#[test]
fn every_experiment_runs_on_defaults() {
    let dir = tempfile::tempdir().unwrap();
    for e in ["filter", "multimode", "transfer", "circulator", "waveguide", "design", "nv"] {
        let (o, out) = run(dir.path(), e, "", &[]);
        assert!(o.status.success(), "{e}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(out.join(format!("{e}.csv")).exists());
    }
}

#[test]
fn shipped_example_configs_run() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(configs).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        let cfg = parse_config(&text, None).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        let o = phononet(
            &[cfg.experiment.name(), "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()],
            dir.path(),
        );
        assert!(o.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&o.stderr));
    }
}
