use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_toponym"));
    c.env_remove("TOPONYM_ASSETS").env("RUST_LOG", "error");
    c
}

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn geonames_row(id: u32, name: &str, lat: f64, lon: f64) -> String {
    let mut fields = vec![String::new(); 19];
    fields[0] = id.to_string();
    fields[1] = name.to_string();
    fields[2] = name.to_string();
    fields[4] = lat.to_string();
    fields[5] = lon.to_string();
    fields[6] = "P".into();
    fields[7] = "PPL".into();
    fields[8] = "US".into();
    fields.join("\t")
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    /// Two sources: a Geonames dump and an OSM export.
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let geonames = [
            geonames_row(1, "Houston", 29.76, -95.36),
            geonames_row(2, "New Iberia", 30.0, -91.8),
            geonames_row(3, "Louisiana", 31.0, -92.0),
            geonames_row(4, "Sydney", -33.9, 151.2),
        ]
        .join("\n");
        std::fs::write(dir.path().join("places.tsv"), geonames + "\n").unwrap();
        let osm = serde_json::json!([
            {"id": 10, "name": "Oxford School", "lat": 13.04, "lon": 80.22, "tags": {"amenity": "school"}},
            {"id": 11, "name": "West Mambalam", "lat": 13.03, "lon": 80.22},
            {"id": 12, "name": "Balalok Matriculation Higher Secondary School", "lat": 13.05, "lon": 80.21},
        ]);
        std::fs::write(dir.path().join("osm.json"), osm.to_string()).unwrap();
        let config = r#"
model_cache = "model.bin"

[[gazetteers]]
path = "places.tsv"
format = "geonames_tsv"
name = "geonames"

[[gazetteers]]
path = "osm.json"
format = "osm_json"
name = "osm"
"#;
        std::fs::write(dir.path().join("config.toml"), config).unwrap();
        Self { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn config(&self) -> String {
        self.path("config.toml").display().to_string()
    }

    fn build(&self) -> Output {
        run(&["build", "--config", &self.config()], "")
    }
}

const TWEETS: &str = concat!(
    r#"{"id":"1","text":"sou th kr koil street near Oxford school.west mambalam.."}"#,
    "\n",
    r#"{"id":"2","text":"We r lucky where I am in New Iberia. #PrayForLouisiana #lawx"}"#,
    "\n",
    r#"{"id":"3","text":"Didn't Houston have a bad flood last year now again  poor htown"}"#,
    "\n"
);

fn records(out: &str) -> Vec<Value> {
    out.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

fn surfaces(record: &Value) -> Vec<String> {
    record["mentions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["surface"].as_str().unwrap().to_string())
        .collect()
}

#[test]
fn build_reports_counts_and_is_reproducible() {
    let ws = Workspace::new();
    let out = ws.build();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout(&out);
    assert!(report.contains("entries               7"), "{report}");
    // 8 skip-gram surfaces of the school name: the original plus 7 contractions
    assert!(report.contains("skipgram            7"), "{report}");
    let first = std::fs::read(ws.path("model.bin")).unwrap();
    assert!(ws.build().status.success());
    assert_eq!(first, std::fs::read(ws.path("model.bin")).unwrap());
}

#[test]
fn extract_golden_tweets_with_qualified_ids() {
    let ws = Workspace::new();
    assert!(ws.build().status.success());
    let out = run(&["extract", "--config", &ws.config()], TWEETS);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&stdout(&out));
    assert_eq!(recs.len(), 3);
    assert_eq!(surfaces(&recs[0]), ["Oxford school", "west mambalam"]);
    assert_eq!(surfaces(&recs[1]), ["New Iberia", "Louisiana"]);
    assert_eq!(surfaces(&recs[2]), ["Houston"]);
    assert_eq!(recs[1]["mentions"][1]["from_hashtag"], true);
    assert_eq!(recs[1]["mentions"][1]["char_start"], 37);
    assert_eq!(recs[2]["mentions"][0]["entry_ids"][0], "geonames:1");
    assert!(String::from_utf8_lossy(&out.stderr).contains("tweets/s"));
}

#[test]
fn extract_is_identical_across_worker_counts() {
    let ws = Workspace::new();
    assert!(ws.build().status.success());
    let input: String = TWEETS.repeat(200) + "garbage\n\n";
    let one = run(&["extract", "--config", &ws.config(), "--workers", "1"], &input);
    let four = run(&["extract", "--config", &ws.config(), "--workers", "4"], &input);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(stdout(&one).lines().count(), 602);
}

#[test]
fn extract_empty_stream_and_bad_lines() {
    let ws = Workspace::new();
    assert!(ws.build().status.success());
    let cache = ws.path("model.bin").display().to_string();
    let out = run(&["extract", "--model-cache", &cache], "");
    assert!(out.status.success());
    assert!(out.stdout.is_empty());

    let out = run(&["extract", "--model-cache", &cache], "{\"id\": \"x\"}\n[1,2]\n");
    assert!(out.status.success());
    let recs = records(&stdout(&out));
    assert_eq!(recs.len(), 2);
    assert!(recs.iter().all(|r| r["error"].is_string()));
}

#[test]
fn spelling_flag_is_accepted() {
    let ws = Workspace::new();
    assert!(ws.build().status.success());
    let out = run(
        &["extract", "--config", &ws.config(), "--spell", "on"],
        "{\"id\":\"s\",\"text\":\"flooding in Houstn tonight\"}\n",
    );
    assert!(out.status.success());
    assert_eq!(surfaces(&records(&stdout(&out))[0]), ["Houstn"]);
}

#[test]
fn exit_codes() {
    let ws = Workspace::new();
    // missing cache is a data error
    let missing = ws.path("absent.bin").display().to_string();
    assert_eq!(run(&["extract", "--model-cache", &missing], "").status.code(), Some(2));
    // usage errors
    assert_eq!(run(&["extract", "--bogus"], "").status.code(), Some(1));
    assert_eq!(run(&["extract", "--spell", "maybe"], "").status.code(), Some(1));
    assert_eq!(run(&["extract"], "").status.code(), Some(1));
    let bad = ws.path("bad.toml");
    std::fs::write(&bad, "bbox = [30, -90, 29, -91]\n").unwrap();
    assert_eq!(
        run(&["build", "--config", bad.to_str().unwrap()], "").status.code(),
        Some(1)
    );
    // malformed source is a data error that names the file
    std::fs::write(ws.path("places.tsv"), "1\tHouston\n").unwrap();
    let out = ws.build();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("places.tsv"));
    assert!(run(&["--help"], "").status.success());
}

#[test]
fn bbox_filters_records() {
    let ws = Workspace::new();
    let config = format!(
        "model_cache = \"m.bin\"\nbbox = [29.0, -96.0, 31.5, -91.0]\n[[gazetteers]]\npath = \"{}\"\nformat = \"geonames_tsv\"\n",
        ws.path("places.tsv").display()
    );
    std::fs::write(ws.path("box.toml"), config).unwrap();
    let out = run(&["build", "--config", ws.path("box.toml").to_str().unwrap()], "");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("entries               3"));
}

fn write_doc(dir: &Path, id: &str, text: &str, ann: &str) {
    std::fs::write(dir.join(format!("{id}.txt")), text).unwrap();
    std::fs::write(dir.join(format!("{id}.ann")), ann).unwrap();
}

fn mention(start: usize, end: usize) -> Value {
    serde_json::json!({
        "surface": "", "matched_name": "", "char_start": start, "char_end": end,
        "entry_ids": [], "from_hashtag": false
    })
}

#[test]
fn evaluate_predictions_against_gold() {
    let ws = Workspace::new();
    let gold = ws.path("gold");
    std::fs::create_dir(&gold).unwrap();
    write_doc(&gold, "a", "The Louisiana coast", "T1\tinLoc 4 13\tLouisiana\n");
    write_doc(
        &gold,
        "b",
        "Houston and Paris",
        "T1\tinLoc 0 7\tHouston\nT2\toutLoc 12 17\tParis\n",
    );
    write_doc(&gold, "c", "stuck near Avadi", "T1\tinLoc 11 16\tAvadi\n");
    let preds = [
        serde_json::json!({"id": "a", "mentions": [mention(0, 13)]}),
        serde_json::json!({"id": "b", "mentions": [mention(0, 7), mention(12, 17)]}),
        serde_json::json!({"id": "zzz", "mentions": []}),
    ]
    .iter()
    .map(|v| v.to_string() + "\n")
    .collect::<String>();
    std::fs::write(ws.path("preds.jsonl"), preds).unwrap();
    let args = |mode: &str| {
        vec![
            "evaluate".to_string(),
            "--gold".into(),
            gold.display().to_string(),
            "--predictions".into(),
            ws.path("preds.jsonl").display().to_string(),
            "--eval-mode".into(),
            mode.into(),
        ]
    };
    let a = args("standard");
    let out = run(&a.iter().map(String::as_str).collect::<Vec<_>>(), "");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["documents"][0]["fp"], 0.5);
    assert_eq!(report["documents"][0]["fn"], 0.5);
    assert_eq!(report["aggregate"]["tp"], 1.0);
    assert_eq!(report["aggregate"]["fp"], 0.5);
    assert_eq!(report["aggregate"]["fn"], 1.5);
    assert_eq!(report["missing_predictions"][0], "c");
    assert_eq!(report["unknown_predictions"][0], "zzz");

    let s = args("lnex_strict");
    let out = run(&s.iter().map(String::as_str).collect::<Vec<_>>(), "");
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["aggregate"]["fp"], 1.5);
    assert_eq!(report["mode"], "lnex_strict");

    let mut t = args("standard");
    t.extend(["--format".into(), "table".into()]);
    let out = run(&t.iter().map(String::as_str).collect::<Vec<_>>(), "");
    let table = stdout(&out);
    assert!(table.lines().last().unwrap().starts_with("TOTAL"), "{table}");
}

#[test]
fn evaluate_extracts_gold_texts_when_no_predictions() {
    let ws = Workspace::new();
    assert!(ws.build().status.success());
    let gold = ws.path("gold");
    std::fs::create_dir(&gold).unwrap();
    write_doc(
        &gold,
        "t",
        "flood in Houston\nWe r lucky where I am in New Iberia. #PrayForLouisiana",
        "T1\tinLoc 9 16\tHouston\nT2\tinLoc 42 52\tNew Iberia\nT3\tinLoc 62 71\tLouisiana\n",
    );
    let out = run(
        &["evaluate", "--config", &ws.config(), "--gold", gold.to_str().unwrap()],
        "",
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["aggregate"]["f1"], 1.0, "{report}");
}

#[test]
fn evaluate_rejects_misaligned_gold() {
    let ws = Workspace::new();
    let gold = ws.path("gold");
    std::fs::create_dir(&gold).unwrap();
    write_doc(
        &gold,
        "x",
        "Water level in Ganapathy Colony",
        "T1\tinLoc 26 42\tGanapathy Colony\n",
    );
    std::fs::write(ws.path("p.jsonl"), "").unwrap();
    let out = run(
        &[
            "evaluate",
            "--gold",
            gold.to_str().unwrap(),
            "--predictions",
            ws.path("p.jsonl").to_str().unwrap(),
        ],
        "",
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("T1"));
}

#[test]
fn bench_reports_throughput() {
    let out = run(&["bench", "--variants", "500", "--tweets", "200"], "");
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("tweets/s"), "{text}");
    assert!(text.contains("peak resident memory"));
}
