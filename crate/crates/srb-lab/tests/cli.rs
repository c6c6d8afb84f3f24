//! Binary-level contract: exit codes, artifact files, verify mode, and
//! byte-stable reruns, all through the real executable.

use std::path::{Path, PathBuf};
use std::process::Command;

const SMALL_CAT: &str = "[model]\nkind = \"cat\"\n\n[sampling]\nparam_grid = 128\npilot_params = 16\ntransverse_samples = 16\n\n[count]\nn_list = [8]\n";
const SMALL_IDENTITY: &str = "[model]\nkind = \"identity\"\n\n[sampling]\nparam_grid = 128\npilot_params = 16\ntransverse_samples = 16\n";

struct Workbench {
    dir: PathBuf,
}

impl Workbench {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("srb-cli-{}-{tag}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        Workbench { dir }
    }

    fn config(&self, name: &str, text: &str) -> PathBuf {
        let path = self.dir.join(name);
        std::fs::write(&path, text).unwrap();
        path
    }

    fn run(&self, args: &[&str]) -> (i32, String) {
        let output = Command::new(env!("CARGO_BIN_EXE_srb-lab"))
            .args(args)
            .output()
            .expect("binary launches");
        (output.status.code().unwrap_or(-1), String::from_utf8_lossy(&output.stderr).into_owned())
    }

    fn out(&self, tag: &str) -> PathBuf {
        self.dir.join(tag)
    }
}

impl Drop for Workbench {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.dir);
    }
}

fn has_artifacts(dir: &Path, stem: &str) -> bool {
    dir.join(format!("{stem}.json")).is_file() && dir.join(format!("{stem}.csv")).is_file()
}

#[test]
fn certify_exit_codes_follow_the_verdict() {
    let bench = Workbench::new("verdicts");
    let cat = bench.config("cat.toml", SMALL_CAT);
    let identity = bench.config("identity.toml", SMALL_IDENTITY);

    let out_cat = bench.out("cat");
    let (code, _) = bench.run(&[
        "certify",
        "--config",
        cat.to_str().unwrap(),
        "--out",
        out_cat.to_str().unwrap(),
        "--seed",
        "7",
    ]);
    assert_eq!(code, 2, "cat certification ends in soft failures");
    assert!(has_artifacts(&out_cat, "certify"));

    let out_id = bench.out("identity");
    let (code, _) = bench.run(&[
        "certify",
        "--config",
        identity.to_str().unwrap(),
        "--out",
        out_id.to_str().unwrap(),
        "--seed",
        "7",
    ]);
    assert_eq!(code, 0, "a hypothesis failure is a clean negative result");
    assert!(has_artifacts(&out_id, "certify"));
}

#[test]
fn broken_configs_are_hard_errors() {
    let bench = Workbench::new("badcfg");
    let out = bench.out("scratch");

    let unknown_key = bench.config("unknown.toml", "[model]\nkind = \"cat\"\nextra = 1\n");
    let (code, stderr) =
        bench.run(&["orbit", "--config", unknown_key.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(!stderr.is_empty(), "hard errors explain themselves on stderr");

    let wrong_param = bench.config("wrong.toml", "[model]\nkind = \"cat\"\nkick = 1.0\n");
    let (code, _) =
        bench.run(&["orbit", "--config", wrong_param.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);

    let missing = bench.dir.join("absent.toml");
    let (code, _) =
        bench.run(&["orbit", "--config", missing.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn stage_commands_emit_artifacts_under_verify() {
    let bench = Workbench::new("stages");
    let cat = bench.config("cat.toml", SMALL_CAT);

    for stage in ["orbit", "pliss", "neutral", "decompose", "curve", "count"] {
        let out = bench.out(stage);
        let (code, stderr) = bench.run(&[
            stage,
            "--config",
            cat.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "7",
            "--verify",
        ]);
        assert_eq!(code, 0, "{stage} failed under --verify: {stderr}");
        assert!(has_artifacts(&out, stage), "{stage} left no json + csv pair");
    }
}

#[test]
fn stage_reruns_are_byte_identical() {
    let bench = Workbench::new("rerun");
    let cat = bench.config("cat.toml", SMALL_CAT);

    let mut artifacts = Vec::new();
    for tag in ["first", "second"] {
        let out = bench.out(tag);
        let (code, _) = bench.run(&[
            "decompose",
            "--config",
            cat.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "11",
        ]);
        assert_eq!(code, 0);
        artifacts.push((
            std::fs::read(out.join("decompose.json")).unwrap(),
            std::fs::read(out.join("decompose.csv")).unwrap(),
        ));
    }
    assert_eq!(artifacts[0], artifacts[1], "decompose artifacts drifted between reruns");
}
