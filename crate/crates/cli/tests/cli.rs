use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const DATASET_A: &str = "# x,y\n0,0\n1,0\n2,1\n3,3\n";
// a member bumped above the chord at x = 1.5
const ABOVE_CHORD: &str =
    r#"{"anchor":[1,0],"left_slope":0,"breakpoints":[[1,1.5],[1.5,-1],[2,1.5]]}"#;

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let f = Self {
            dir: tempfile::tempdir().unwrap(),
        };
        f.write("A.csv", DATASET_A);
        f
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.path(name);
        fs::write(&p, text).unwrap();
        p
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_ridgeless"))
            .current_dir(self.dir.path())
            .args(args)
            .output()
            .unwrap()
    }
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_record(o: &Output) -> serde_json::Value {
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(err.lines().count(), 1, "stderr: {err}");
    serde_json::from_str(err.trim()).unwrap()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} ")))
        .unwrap_or_else(|| panic!("no `{key}` in {text}"))
        .to_string()
}

#[test]
fn chord_interpolant_is_a_member() {
    let fx = Fixture::new();
    assert!(fx.run(&["fd", "A.csv", "--out", "fd.json"]).status.success());
    let o = fx.run(&["check", "A.csv", "fd.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(field(&stdout(&o), "member"), "true");
    assert!(o.stderr.is_empty());
}

#[test]
fn above_chord_bump_is_rejected() {
    let fx = Fixture::new();
    fx.write("bad.json", ABOVE_CHORD);
    let o = fx.run(&["check", "A.csv", "bad.json", "--json", "report.json"]);
    assert_eq!(o.status.code(), Some(3));
    let rec = error_record(&o);
    assert_eq!(rec["error"], "non-member");
    assert!(rec["violations"]
        .as_array()
        .unwrap()
        .iter()
        .any(|t| t == "block-envelope"));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(fx.path("report.json")).unwrap()).unwrap();
    assert_eq!(report["direct_pass"], false);
    assert_eq!(report["tv_pass"], false);
    assert_eq!(report["tv"], 4.0);
}

#[test]
fn certify_dataset_a() {
    let fx = Fixture::new();
    let o = fx.run(&["certify", "A.csv", "--grid", "64", "--tol", "1e-3", "--json", "c.json"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(field(&out, "target"), "2");
    let achieved: f64 = field(&out, "achieved").parse().unwrap();
    assert!((achieved - 2.0).abs() <= 1e-3);
    let c: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(fx.path("c.json")).unwrap()).unwrap();
    assert_eq!(c["pass"], true);
    assert!(c["iterations"].as_u64().unwrap() > 0);
}

#[test]
fn certify_rejects_bad_flags() {
    let fx = Fixture::new();
    let o = fx.run(&["certify", "A.csv", "--grid", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_record(&o)["error"], "usage");
}

#[test]
fn characterize_text_and_json() {
    let fx = Fixture::new();
    let o = fx.run(&["characterize", "A.csv", "--json", "ch.json"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(field(&out, "minimal_tv"), "2");
    assert!(out.contains("interval 1 (1, 2) free block 0"));
    let ch: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(fx.path("ch.json")).unwrap()).unwrap();
    assert_eq!(ch["minimal_tv"], 2.0);
    assert_eq!(ch["verdicts"][0]["reason"], "forced-1a");
    assert_eq!(ch["verdicts"][1]["kind"], "free");
    assert_eq!(ch["blocks"][0]["sign"], 1);
    assert_eq!(ch["inflection_set"], serde_json::json!([0, 2]));
}

#[test]
fn json_dataset_input() {
    let fx = Fixture::new();
    fx.write("z.json", r#"{"points": [[0,0],[1,1],[2,0],[3,1]]}"#);
    let o = fx.run(&["characterize", "z.json"]);
    assert!(o.status.success());
    assert_eq!(field(&stdout(&o), "minimal_tv"), "4");
}

#[test]
fn usage_and_format_errors() {
    let fx = Fixture::new();
    let o = fx.run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(error_record(&o)["exit"], 1);

    let o = fx.run(&["check", "missing.csv", "fd.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["error"], "io");

    fx.write("broken.csv", "0,0\n\n1,oops\n");
    let o = fx.run(&["characterize", "broken.csv"]);
    assert_eq!(o.status.code(), Some(2));
    let rec = error_record(&o);
    assert_eq!(rec["error"], "format");
    assert!(rec["message"].as_str().unwrap().contains("line 3"), "{rec}");

    fx.write("dup.csv", "0,0\n0,1\n");
    let o = fx.run(&["characterize", "dup.csv"]);
    assert_eq!(o.status.code(), Some(2));

    let o = fx.run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("certify"));
}

#[test]
fn sampling_is_deterministic_and_members_check() {
    let fx = Fixture::new();
    let a = fx.run(&["sample", "A.csv", "--n", "4", "--seed", "9"]);
    let b = fx.run(&["sample", "A.csv", "--n", "4", "--seed", "9"]);
    let c = fx.run(&["sample", "A.csv", "--n", "4", "--seed", "10"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(stdout(&a).lines().count(), 4);

    let o = fx.run(&["sample", "A.csv", "--n", "3", "--seed", "2", "--out-dir", "members"]);
    assert!(o.status.success());
    for k in 0..3 {
        let file = format!("members/member-{k:03}.json");
        assert!(Path::new(&fx.path(&file)).exists());
        let o = fx.run(&["check", "A.csv", &file]);
        assert_eq!(o.status.code(), Some(0), "{file}");
    }
}

#[test]
fn tv_and_network_round_trip() {
    let fx = Fixture::new();
    fx.run(&["fd", "A.csv", "--out", "fd.json"]);
    assert_eq!(stdout(&fx.run(&["tv", "fd.json"])).trim(), "2");

    let o = fx.run(&["to-network", "fd.json", "--out", "net.json"]);
    assert_eq!(field(&stdout(&o), "cost"), "2");
    let o = fx.run(&["from-network", "net.json", "--out", "back.json"]);
    assert!(o.status.success());
    assert_eq!(
        fs::read_to_string(fx.path("back.json")).unwrap(),
        fs::read_to_string(fx.path("fd.json")).unwrap()
    );

    fx.write("flip.json", r#"{"a":0,"b":0,"units":[[-1,0,1]]}"#);
    let o = fx.run(&["from-network", "flip.json"]);
    let f: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(f["left_slope"], -1.0);
    assert_eq!(f["breakpoints"], serde_json::json!([[0.0, 1.0]]));
}

#[test]
fn plot_is_well_formed_svg_with_metadata() {
    let fx = Fixture::new();
    let o = fx.run(&["plot", "A.csv", "--members", "4", "--seed", "1", "--out", "p.svg"]);
    assert!(o.status.success());
    let text = fs::read_to_string(fx.path("p.svg")).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    let root = doc.root_element();
    assert_eq!(root.tag_name().name(), "svg");
    assert_eq!(root.attribute("version"), Some("1.1"));
    let summary = doc
        .descendants()
        .find(|n| n.tag_name().name() == "summary")
        .unwrap();
    assert_eq!(summary.attribute("minimal_tv"), Some("2"));
    assert_eq!(summary.attribute("members"), Some("4"));
    let members = doc
        .descendants()
        .find(|n| n.attribute("id") == Some("members"))
        .unwrap();
    assert_eq!(members.children().filter(|n| n.is_element()).count(), 4);

    let again = fx.run(&["plot", "A.csv", "--members", "4", "--seed", "1"]);
    assert_eq!(again.stdout, text.as_bytes());
}

#[test]
fn bound_reports() {
    let fx = Fixture::new();
    fx.write("vee.json", r#"{"anchor":[0.5,0],"left_slope":-1,"breakpoints":[[0.5,2]]}"#);
    let o = fx.run(&["bound", "--fstar", "vee.json", "--m", "10", "--members", "50", "--json", "b.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let b: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(fx.path("b.json")).unwrap()).unwrap();
    assert_eq!(b["sup_error"]["bound"], 0.2);
    assert!(b["sup_error"]["achieved_exact"].as_f64().unwrap() <= 0.2);
    assert_eq!(b["pass"], true);

    // non-uniform design: the sup bound does not apply and is skipped
    fx.write("nu.csv", "0,0.5\n0.3,0.2\n0.9,0.4\n");
    let o = fx.run(&["bound", "nu.csv", "--fstar", "vee.json", "--members", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sup_error skipped"));

    // data steeper than the claimed ground truth breaks the Lipschitz chain
    fx.write("steep.csv", "0,0\n0.5,3\n1,0\n");
    let o = fx.run(&["bound", "steep.csv", "--fstar", "vee.json"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(error_record(&o)["error"], "bound");

    let o = fx.run(&["bound", "A.csv", "--fstar", "vee.json", "--m", "5"]);
    assert_eq!(o.status.code(), Some(1));
}
