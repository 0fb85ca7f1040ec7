use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopsampler"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn probabilities(path: &Path) -> Vec<f64> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split_whitespace().last().unwrap().parse().unwrap())
        .collect()
}

const BEAMSPLITTER: &str = "modes = 2\nunitary_seed = 3\ninjection = [[1, 1]]\n";
const LOOPED: &str =
    "modes = 5\nloops = 1\niterations = 2\nunitary_seed = 1\nfeedback_phases = [0.3]\ninjection = [[1, 1, 0, 0]]\n";

#[test]
fn beamsplitter_writes_three_normalized_files() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bs.toml", BEAMSPLITTER);
    let o = run(dir.path(), &["simulate", "--spec", "bs.toml", "--out", "out"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut names: Vec<String> = std::fs::read_dir(dir.path().join("out"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["distinguishable.dist", "quantum.dist", "uniform.dist"]);
    for n in &names {
        let p = probabilities(&dir.path().join("out").join(n));
        assert_eq!(p.len(), 3);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12, "{n}");
    }
}

#[test]
fn reruns_are_byte_identical_across_output_dirs() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "dev.toml", LOOPED);
    for out in ["a", "b"] {
        let o = run(
            dir.path(),
            &["simulate", "--spec", "dev.toml", "--out", out, "--threads", "2"],
        );
        assert!(o.status.success());
        let o = run(
            dir.path(),
            &[
                "sample",
                "--spec",
                "dev.toml",
                "--samples",
                "50",
                "--seed",
                "9",
                "--out",
                out,
            ],
        );
        assert!(o.status.success());
    }
    for f in [
        "quantum.dist",
        "quantum-unlooped.dist",
        "quantum-iter2.dist",
        "quantum-looped.samples",
    ] {
        let a = std::fs::read(dir.path().join("a").join(f)).unwrap();
        let b = std::fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn overrides_change_the_spec_hash() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "dev.toml", LOOPED);
    let hash = |extra: &[&str], out: &str| {
        let mut args = vec!["simulate", "--spec", "dev.toml", "--out", out];
        args.extend_from_slice(extra);
        assert!(run(dir.path(), &args).status.success());
        let text = std::fs::read_to_string(dir.path().join(out).join("quantum.dist")).unwrap();
        text.lines()
            .find(|l| l.starts_with("# spec_hash="))
            .unwrap()
            .to_string()
    };
    assert_ne!(hash(&[], "x"), hash(&["--set", "feedback_phases=[1.0]"], "y"));
}

#[test]
fn info_reports_the_equivalent_size() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "big.toml",
        "modes = 25\nloops = 5\niterations = 4\nunitary_seed = 0\nfeedback_phases = \"random\"\n\
         injection = [[1,1,1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0], [1,1,1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0], \
         [1,1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0], [1,1,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0]]\n",
    );
    let o = run(dir.path(), &["info", "--spec", "big.toml"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("10 photons / 85 modes / \u{2248}43.0 qubits"), "{text}");
    assert!(text.contains("enumeration refused"), "{text}");
}

#[test]
fn outcome_cap_exits_with_resource_code() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "dev.toml", LOOPED);
    let o = run(
        dir.path(),
        &["simulate", "--spec", "dev.toml", "--cap", "10", "--out", "o"],
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["tomo", "--out", "o"]).status.code(), Some(1));
    assert_eq!(run(dir.path(), &["simulate"]).status.code(), Some(1));
    write(dir.path(), "bad.toml", "modes = \n");
    assert_eq!(
        run(dir.path(), &["simulate", "--spec", "bad.toml"]).status.code(),
        Some(1)
    );
}

#[test]
fn validate_writes_one_trajectory_per_pair() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "dev.toml", LOOPED);
    let o = run(
        dir.path(),
        &[
            "validate",
            "--spec",
            "dev.toml",
            "--sets",
            "40",
            "--set-size",
            "60",
            "--phase-samples",
            "10",
            "--out",
            "v",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["distinguishable", "uniform", "unlooped", "unlooped-averaged"] {
        assert!(dir.path().join("v").join(format!("{name}.traj")).exists(), "{name}");
    }
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn tomo_round_trips_synthetic_data() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        dir.path(),
        &[
            "tomo",
            "--synthetic",
            "4",
            "--restarts",
            "4",
            "--seed",
            "2",
            "--out",
            "t",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let t = dir.path().join("t");
    assert!(t.join("reconstruction.txt").exists());
    let fid: f64 = stdout(&o)
        .lines()
        .find_map(|l| l.strip_prefix("fidelity vs truth (moduli): "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(fid > 0.999, "{fid}");

    // data mode reads back the written measurement files
    let o = run(
        dir.path(),
        &[
            "tomo",
            "--moduli",
            "t/tomo-moduli.txt",
            "--visibilities",
            "t/tomo-visibilities.csv",
            "--restarts",
            "4",
            "--out",
            "d",
        ],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!stdout(&o).contains("vs truth"));
}
